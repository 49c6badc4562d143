"""JSON workspace files: named algebras, bimodules, morphisms, phi-bimodules, deformations.

Scalars are integers or strings ``"p/q"``.  Sparse tensors are lists of
index tuples followed by a scalar, 0-based: structure constants and actions
as ``[i, j, k, "c"]``, matrices as ``[r, c, "v"]``, vectors as ``[i, "v"]``.
A bimodule may be given as ``{"regular": "<algebra>"}``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from .algebra import AlgebraSpec, BimoduleSpec, MorphismSpec, PhiBimoduleSpec, check_unit, regular_bimodule, zeros
from .deformation import TruncatedDeformation
from .exact_linalg import Field, QQ, field_from_name, format_scalar, parse_scalar

SECTIONS = ("algebras", "bimodules", "morphisms", "phi_bimodules", "deformations")


@dataclass
class ParseError:
    location: str
    message: str

    def __str__(self):
        return f"{self.location}: {self.message}"


class WorkspaceError(ValueError):
    def __init__(self, errors: List[ParseError]):
        self.errors = errors
        super().__init__("; ".join(str(e) for e in errors))


@dataclass
class Workspace:
    field: Field = QQ
    algebras: Dict[str, AlgebraSpec] = dc_field(default_factory=dict)
    bimodules: Dict[str, BimoduleSpec] = dc_field(default_factory=dict)
    bimodule_algebra: Dict[str, str] = dc_field(default_factory=dict)
    morphisms: Dict[str, MorphismSpec] = dc_field(default_factory=dict)
    morphism_ends: Dict[str, Tuple[str, str]] = dc_field(default_factory=dict)
    phi_bimodules: Dict[str, PhiBimoduleSpec] = dc_field(default_factory=dict)
    phi_refs: Dict[str, Tuple[str, str, str]] = dc_field(default_factory=dict)
    deformations: Dict[str, TruncatedDeformation] = dc_field(default_factory=dict)
    deformation_base: Dict[str, str] = dc_field(default_factory=dict)

    def kind_of(self, name: str) -> Optional[str]:
        for section in SECTIONS:
            if name in getattr(self, section):
                return section
        return None

    def get(self, name: str):
        kind = self.kind_of(name)
        if kind is None:
            raise KeyError(name)
        return getattr(self, kind)[name]


# -- reading --------------------------------------------------------------------------------

class _Reader:
    def __init__(self):
        self.errors: List[ParseError] = []

    def fail(self, loc: str, msg: str) -> None:
        self.errors.append(ParseError(loc, msg))

    def scalar(self, raw, loc):
        try:
            return parse_scalar(raw)
        except ValueError:
            self.fail(loc, f"malformed scalar {raw!r}")
            return None

    def integer(self, raw, loc, lo=None, hi=None):
        if isinstance(raw, bool) or not isinstance(raw, int):
            self.fail(loc, f"expected an integer, got {raw!r}")
            return None
        if (lo is not None and raw < lo) or (hi is not None and raw >= hi):
            self.fail(loc, f"index {raw} out of range [{lo}, {hi})")
            return None
        return raw

    def sparse(self, raw, shape: Tuple[int, ...], loc: str) -> Optional[np.ndarray]:
        out = zeros(shape)
        if not isinstance(raw, list):
            self.fail(loc, "expected a list of sparse entries")
            return None
        ok = True
        seen = set()
        for n, entry in enumerate(raw):
            eloc = f"{loc}[{n}]"
            if not isinstance(entry, list) or len(entry) != len(shape) + 1:
                self.fail(eloc, f"shape mismatch: expected {len(shape)} indices and a value, got {entry!r}")
                ok = False
                continue
            idx = [self.integer(v, eloc, 0, s) for v, s in zip(entry[:-1], shape)]
            val = self.scalar(entry[-1], eloc)
            if None in idx or val is None:
                ok = False
                continue
            if tuple(idx) in seen:
                self.fail(eloc, f"repeated entry at {tuple(idx)}")
                ok = False
                continue
            seen.add(tuple(idx))
            out[tuple(idx)] = val
        return out if ok else None

    def obj(self, raw, loc) -> Optional[dict]:
        if not isinstance(raw, dict):
            self.fail(loc, "expected an object")
            return None
        return raw

    def need(self, d: dict, key: str, loc: str):
        if key not in d:
            self.fail(loc, f"missing key {key!r}")
            return None
        return d[key]


def _no_duplicate_keys(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise WorkspaceError([ParseError(f"key {k!r}", "duplicate name")])
        out[k] = v
    return out


def parse_text(text: str, source: str = "<string>") -> Workspace:
    if not text.strip():
        raise WorkspaceError([ParseError(source, "empty workspace file")])
    try:
        doc = json.loads(text, object_pairs_hook=_no_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise WorkspaceError([ParseError(f"{source}:{exc.lineno}:{exc.colno}", exc.msg)]) from None
    return parse_document(doc, source)


def parse_workspace(path: Union[str, Path]) -> Workspace:
    path = Path(path)
    return parse_text(path.read_text(), str(path))


def parse_document(doc: Any, source: str = "<document>") -> Workspace:
    rd = _Reader()
    if not isinstance(doc, dict):
        raise WorkspaceError([ParseError(source, "top level must be an object")])
    unknown = set(doc) - set(SECTIONS) - {"field"}
    for key in sorted(unknown):
        rd.fail(key, "unknown top-level key")
    ws = Workspace()
    try:
        ws.field = field_from_name(str(doc.get("field", "QQ")))
    except ValueError as exc:
        rd.fail("field", str(exc))

    names: Dict[str, str] = {}
    for section in SECTIONS:
        body = doc.get(section, {})
        if not isinstance(body, dict):
            rd.fail(section, "expected an object of named entries")
            continue
        for name in body:
            if name in names:
                rd.fail(f"{section}.{name}", f"duplicate name (already used in {names[name]})")
            names[name] = section

    for name, raw in (doc.get("algebras") or {}).items():
        _read_algebra(rd, ws, name, raw)
    for name, raw in (doc.get("bimodules") or {}).items():
        _read_bimodule(rd, ws, name, raw)
    for name, raw in (doc.get("morphisms") or {}).items():
        _read_morphism(rd, ws, name, raw)
    for name, raw in (doc.get("phi_bimodules") or {}).items():
        _read_phi_bimodule(rd, ws, name, raw)
    for name, raw in (doc.get("deformations") or {}).items():
        _read_deformation(rd, ws, name, raw)
    if rd.errors:
        raise WorkspaceError(rd.errors)
    return ws


def _read_algebra(rd: _Reader, ws: Workspace, name: str, raw) -> None:
    loc = f"algebras.{name}"
    d = rd.obj(raw, loc)
    if d is None:
        return
    dim = rd.need(d, "dim", loc)
    if dim is None or rd.integer(dim, f"{loc}.dim") is None:
        return
    if dim < 1:
        rd.fail(f"{loc}.dim", "dimension must be positive")
        return
    mul = rd.sparse(d.get("mul", []), (dim, dim, dim), f"{loc}.mul")
    nij = rd.sparse(d.get("nij", []), (dim, dim), f"{loc}.nij")
    unit = None
    if d.get("unit") is not None:
        unit = rd.sparse(d["unit"], (dim,), f"{loc}.unit")
        if unit is None:
            return
    if mul is None or nij is None:
        return
    alg = AlgebraSpec(mul, nij, unit)
    if unit is not None and not check_unit(alg).ok:
        rd.fail(f"{loc}.unit", "designated unit is not a two-sided unit")
        return
    ws.algebras[name] = alg


def _ref(rd: _Reader, table: dict, key, loc: str, what: str):
    if key is None:
        return None
    if not isinstance(key, str) or key not in table:
        rd.fail(loc, f"dangling reference to {what} {key!r}")
        return None
    return table[key]


def _read_bimodule(rd: _Reader, ws: Workspace, name: str, raw) -> None:
    loc = f"bimodules.{name}"
    d = rd.obj(raw, loc)
    if d is None:
        return
    if "regular" in d:
        alg = _ref(rd, ws.algebras, d["regular"], f"{loc}.regular", "algebra")
        if alg is not None:
            ws.bimodules[name] = regular_bimodule(alg)
            ws.bimodule_algebra[name] = d["regular"]
        return
    alg = _ref(rd, ws.algebras, rd.need(d, "algebra", loc), f"{loc}.algebra", "algebra")
    dim = rd.need(d, "dim", loc)
    if alg is None or dim is None or rd.integer(dim, f"{loc}.dim", 0) is None:
        return
    left = rd.sparse(d.get("left", []), (alg.dim, dim, dim), f"{loc}.left")
    right = rd.sparse(d.get("right", []), (dim, alg.dim, dim), f"{loc}.right")
    op = rd.sparse(d.get("op", []), (dim, dim), f"{loc}.op")
    if left is None or right is None or op is None:
        return
    ws.bimodules[name] = BimoduleSpec(left, right, op)
    ws.bimodule_algebra[name] = d["algebra"]


def _read_morphism(rd: _Reader, ws: Workspace, name: str, raw) -> None:
    loc = f"morphisms.{name}"
    d = rd.obj(raw, loc)
    if d is None:
        return
    src = _ref(rd, ws.algebras, rd.need(d, "source", loc), f"{loc}.source", "algebra")
    tgt = _ref(rd, ws.algebras, rd.need(d, "target", loc), f"{loc}.target", "algebra")
    if src is None or tgt is None:
        return
    mat = rd.sparse(d.get("mat", []), (tgt.dim, src.dim), f"{loc}.mat")
    if mat is None:
        return
    ws.morphisms[name] = MorphismSpec(src, tgt, mat)
    ws.morphism_ends[name] = (d["source"], d["target"])


def _read_phi_bimodule(rd: _Reader, ws: Workspace, name: str, raw) -> None:
    loc = f"phi_bimodules.{name}"
    d = rd.obj(raw, loc)
    if d is None:
        return
    phi = _ref(rd, ws.morphisms, rd.need(d, "morphism", loc), f"{loc}.morphism", "morphism")
    m = _ref(rd, ws.bimodules, rd.need(d, "m", loc), f"{loc}.m", "bimodule")
    n = _ref(rd, ws.bimodules, rd.need(d, "n", loc), f"{loc}.n", "bimodule")
    if phi is None or m is None or n is None:
        return
    src, tgt = ws.morphism_ends[d["morphism"]]
    if ws.bimodule_algebra[d["m"]] != src:
        rd.fail(f"{loc}.m", f"bimodule {d['m']!r} is not over the source algebra {src!r}")
        return
    if ws.bimodule_algebra[d["n"]] != tgt:
        rd.fail(f"{loc}.n", f"bimodule {d['n']!r} is not over the target algebra {tgt!r}")
        return
    psi = rd.sparse(d.get("psi", []), (n.dim, m.dim), f"{loc}.psi")
    if psi is None:
        return
    ws.phi_bimodules[name] = PhiBimoduleSpec(phi, m, n, psi)
    ws.phi_refs[name] = (d["morphism"], d["m"], d["n"])


def _read_deformation(rd: _Reader, ws: Workspace, name: str, raw) -> None:
    loc = f"deformations.{name}"
    d = rd.obj(raw, loc)
    if d is None:
        return
    base = _ref(rd, ws.morphisms, rd.need(d, "morphism", loc), f"{loc}.morphism", "morphism")
    order = rd.need(d, "order", loc)
    if base is None or order is None or rd.integer(order, f"{loc}.order", 1) is None:
        return
    dA, dB = base.source.dim, base.target.dim
    shapes = {"mulA": (dA,) * 3, "mulB": (dB,) * 3, "opA": (dA, dA), "opB": (dB, dB), "phi": (dB, dA)}
    parts = {}
    for key, shape in shapes.items():
        raw_list = d.get(key, [[]] * order)
        if not isinstance(raw_list, list) or len(raw_list) != order:
            rd.fail(f"{loc}.{key}", f"shape mismatch: expected {order} orders")
            return
        arrs = [rd.sparse(r, shape, f"{loc}.{key}[{i}]") for i, r in enumerate(raw_list)]
        if any(a is None for a in arrs):
            return
        parts[key] = arrs
    ws.deformations[name] = TruncatedDeformation(base, **parts)
    ws.deformation_base[name] = d["morphism"]


# -- writing ----------------------------------------------------------------------------------

def sparse_entries(arr: np.ndarray) -> list:
    return [[*map(int, idx), format_scalar(v)] for idx, v in np.ndenumerate(arr) if v != 0]


def dump_document(ws: Workspace) -> dict:
    doc: Dict[str, Any] = {"field": ws.field.name}
    doc["algebras"] = {
        name: {"dim": a.dim, "mul": sparse_entries(a.mul), "nij": sparse_entries(a.nij),
               **({"unit": sparse_entries(a.unit)} if a.unit is not None else {})}
        for name, a in ws.algebras.items()
    }
    doc["bimodules"] = {
        name: {"algebra": ws.bimodule_algebra[name], "dim": m.dim, "left": sparse_entries(m.left),
               "right": sparse_entries(m.right), "op": sparse_entries(m.op)}
        for name, m in ws.bimodules.items()
    }
    doc["morphisms"] = {
        name: {"source": ws.morphism_ends[name][0], "target": ws.morphism_ends[name][1],
               "mat": sparse_entries(f.mat)}
        for name, f in ws.morphisms.items()
    }
    doc["phi_bimodules"] = {
        name: {"morphism": ws.phi_refs[name][0], "m": ws.phi_refs[name][1], "n": ws.phi_refs[name][2],
               "psi": sparse_entries(pb.psi)}
        for name, pb in ws.phi_bimodules.items()
    }
    doc["deformations"] = {
        name: {"morphism": ws.deformation_base[name], "order": d.order,
               **{key: [sparse_entries(x) for x in getattr(d, key)]
                  for key in ("mulA", "mulB", "opA", "opB", "phi")}}
        for name, d in ws.deformations.items()
    }
    return doc


_FLAT_LIST = re.compile(r"\[[^\[\]{}]*\]")


def dump_text(ws: Workspace) -> str:
    # one sparse entry per line keeps fixtures diff-friendly
    text = json.dumps(dump_document(ws), indent=1)
    return _FLAT_LIST.sub(lambda m: json.dumps(json.loads(m.group(0))), text)


def save_workspace(ws: Workspace, path: Union[str, Path]) -> None:
    Path(path).write_text(dump_text(ws) + "\n")
