"""Command line front end.

Exit status: 0 when every requested check passes, 1 when one fails,
2 on usage or workspace errors, 3 when a complex exceeds NIJCOH_MEM_LIMIT.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from typing import Callable, List, Optional, Tuple

from .algebra import (
    DefectReport,
    PhiBimoduleSpec,
    check_algebra,
    check_bimodule,
    check_morphism,
    check_nijenhuis_bimodule,
    check_phi_bimodule,
    regular_phi_bimodule,
)
from .assembly import ResourceLimitError
from .cct import MissingUnitError, cct_report
from .cochains import CoefficientSystem
from .deformation import trivialize, verify_deformation
from .morphism import MorphismSystem
from .operad import d_P, d_squared_check
from .workspace import Workspace, WorkspaceError, parse_text, parse_workspace

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3
FIXTURE = "example_2_3.json"


class UsageError(Exception):
    pass


class Report:
    """Collects titled sections; renders as a plain table or as JSON."""

    def __init__(self):
        self.ok = True
        self.sections: List[Tuple[str, object]] = []

    def add(self, title: str, payload, ok: bool = True) -> None:
        self.ok = self.ok and ok
        self.sections.append((title, payload))

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps({"ok": self.ok, "sections": {t: p for t, p in self.sections}}, indent=1)
        lines = []
        for title, payload in self.sections:
            lines.append(f"== {title}")
            lines.extend(_table_lines(payload))
        lines.append("PASS" if self.ok else "FAIL")
        return "\n".join(lines)


def _table_lines(payload, indent: str = "  ") -> List[str]:
    if isinstance(payload, dict):
        out = []
        for k, v in payload.items():
            if isinstance(v, (dict, list)) and v:
                out.append(f"{indent}{k}:")
                out.extend(_table_lines(v, indent + "  "))
            else:
                out.append(f"{indent}{k}: {v}")
        return out
    if isinstance(payload, list):
        out = []
        for item in payload:
            if isinstance(item, dict):
                out.append(indent + "  ".join(f"{k}={v}" for k, v in item.items()))
            else:
                out.append(f"{indent}{item}")
        return out
    return [f"{indent}{payload}"]


# -- workspace lookup --------------------------------------------------------------------

def load_workspace(path: Optional[str]) -> Workspace:
    if path is None:
        text = resources.files("nijcoh.data").joinpath(FIXTURE).read_text()
        return parse_text(text, FIXTURE)
    try:
        return parse_workspace(path)
    except OSError as exc:
        raise UsageError(f"cannot read workspace {path!r}: {exc.strerror}") from None


def _lookup(ws: Workspace, name: str, kinds: Tuple[str, ...]):
    kind = ws.kind_of(name)
    if kind is None:
        raise UsageError(f"unknown name {name!r}")
    if kind not in kinds:
        raise UsageError(f"{name!r} is in {kind}, expected one of {', '.join(kinds)}")
    return kind, ws.get(name)


def _phi_bimodule(ws: Workspace, name: str) -> PhiBimoduleSpec:
    kind, obj = _lookup(ws, name, ("phi_bimodules", "morphisms"))
    return obj if kind == "phi_bimodules" else regular_phi_bimodule(obj)


def _degrees(text: str) -> range:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            lo, hi = int(lo), int(hi)
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"bad degree range {text!r}; expected a..b") from None
    if lo < 0 or hi < lo:
        raise UsageError(f"bad degree range {text!r}")
    return range(lo, hi + 1)


# -- commands -------------------------------------------------------------------------------

def _defects(rep: Report, title: str, d: DefectReport) -> None:
    rep.add(title, d.to_dict(), d.ok)


def cmd_check(ws: Workspace, args, rep: Report) -> None:
    kind, obj = _lookup(ws, args.name, ("algebras", "bimodules", "morphisms", "phi_bimodules", "deformations"))
    if kind == "algebras":
        _defects(rep, f"algebra {args.name}", check_algebra(obj))
    elif kind == "bimodules":
        alg_name = ws.bimodule_algebra[args.name]
        alg = ws.algebras[alg_name]
        _defects(rep, f"bimodule {args.name} over {alg_name}", check_bimodule(alg, obj))
        _defects(rep, f"Nijenhuis bimodule {args.name}", check_nijenhuis_bimodule(alg, obj))
    elif kind == "morphisms":
        src, tgt = ws.morphism_ends[args.name]
        _defects(rep, f"algebra {src}", check_algebra(obj.source))
        _defects(rep, f"algebra {tgt}", check_algebra(obj.target))
        _defects(rep, f"morphism {args.name}", check_morphism(obj))
    elif kind == "phi_bimodules":
        _defects(rep, f"morphism {ws.phi_refs[args.name][0]}", check_morphism(obj.phi))
        _defects(rep, f"phi-bimodule {args.name}", check_phi_bimodule(obj))
    else:
        res = verify_deformation(obj)
        rep.add(f"deformation {args.name}", res.to_dict(), res.ok)


def cmd_cohomology(ws: Workspace, args, rep: Report) -> None:
    degrees = _degrees(args.degrees)
    if args.complex == "njm":
        cx = MorphismSystem(_phi_bimodule(ws, args.object), args.convention).complex("njm", ws.field)
    else:
        kind, obj = _lookup(ws, args.object, ("algebras", "bimodules"))
        if kind == "algebras":
            system = CoefficientSystem.regular(obj)
        else:
            system = CoefficientSystem(ws.algebras[ws.bimodule_algebra[args.object]], obj)
        cx = system.complex(args.complex, args.convention, ws.field)
    rows = [{"degree": n, "dim C": cx.dim(n), "dim H": cx.cohomology_dim(n)} for n in degrees]
    rep.add(f"H^*_{args.complex} of {args.object}", rows)


def cmd_cct(ws: Workspace, args, rep: Report) -> None:
    if args.max_degree < 1:
        raise UsageError("--max-degree must be at least 1")
    pb = _phi_bimodule(ws, args.morphism)
    try:
        res = cct_report(pb, args.max_degree, ws.field, args.convention)
    except MissingUnitError as exc:
        raise UsageError(str(exc)) from None
    rep.add(f"comparison for {args.morphism}", res.to_dict(), res.ok)


def cmd_deform(ws: Workspace, args, rep: Report) -> None:
    _, d = _lookup(ws, args.name, ("deformations",))
    if args.action == "verify":
        res = verify_deformation(d)
        rep.add(f"verify {args.name}", res.to_dict(), res.ok)
        return
    ver = verify_deformation(d)
    if not ver.ok:
        rep.add(f"verify {args.name}", ver.to_dict(), False)
        return
    res = trivialize(d, args.convention)
    rep.add(f"trivialize {args.name}", res.to_dict(), res.ok)


def cmd_operad(ws: Optional[Workspace], args, rep: Report) -> None:
    if args.action == "d2":
        if args.max_arity < 1:
            raise UsageError("--max-arity must be at least 1")
        rows = []
        for kind, lo in (("m", 2), ("P", 1)):
            for n in range(lo, args.max_arity + 1):
                residual = d_squared_check(kind, n, args.convention)
                rows.append({"generator": f"{kind}{n}", "terms": len(residual), "zero": residual.is_zero()})
        rep.add(f"d^2 ({args.convention})", rows, all(r["zero"] for r in rows))
        return
    if args.arity < 1:
        raise UsageError("--arity must be at least 1")
    e = d_P(args.arity, args.convention)
    rep.add(f"d(P{args.arity}) ({args.convention})",
            {"terms": len(e), "expansion": [{"coeff": c, "tree": t} for t, c in e.canonical()]})


COMMANDS: dict = {"check": cmd_check, "cohomology": cmd_cohomology, "cct": cmd_cct,
                  "deform": cmd_deform, "operad": cmd_operad}


# -- argument parsing ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nijcoh", description="Exact cohomology of Nijenhuis algebras, bimodules and morphisms.")
    p.add_argument("-w", "--workspace", help="workspace JSON file (default: the bundled example fixture)")
    p.add_argument("--format", choices=("table", "json"), default="table")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="run the structural checks on a named object")
    c.add_argument("name")

    c = sub.add_parser("cohomology", help="cohomology dimensions over the workspace field")
    c.add_argument("--complex", choices=("alg", "njo", "nja", "njm"), required=True)
    c.add_argument("--object", required=True)
    c.add_argument("--degrees", default="0..2")
    c.add_argument("--convention", choices=("corrected", "printed"), default="corrected")

    c = sub.add_parser("cct", help="compare H_NjM with the mapping-ring cohomology")
    c.add_argument("--morphism", required=True, help="morphism (regular coefficients) or phi-bimodule")
    c.add_argument("--max-degree", type=int, default=2)
    c.add_argument("--convention", choices=("corrected", "printed"), default="corrected")

    c = sub.add_parser("deform", help="verify or trivialize a truncated deformation")
    c.add_argument("action", choices=("verify", "trivialize"))
    c.add_argument("--name", required=True)
    c.add_argument("--convention", choices=("corrected", "printed"), default="corrected")

    c = sub.add_parser("operad", help="minimal-model differential")
    c.add_argument("action", choices=("d2", "dP"))
    c.add_argument("--max-arity", type=int, default=4)
    c.add_argument("--arity", type=int, default=2)
    c.add_argument("--convention", choices=("ltr", "rtl"), default="ltr")
    return p


def run(argv: List[str], out: Callable[[str], None] = print) -> int:
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format
        ws = None if args.command == "operad" else load_workspace(args.workspace)
        rep = Report()
        COMMANDS[args.command](ws, args, rep)
    except UsageError as exc:
        out(f"usage error: {exc}")
        return EXIT_USAGE
    except WorkspaceError as exc:
        for e in exc.errors:
            out(f"parse error: {e}")
        return EXIT_USAGE
    except ResourceLimitError as exc:
        out(f"resource limit: {exc}")
        return EXIT_LIMIT
    out(rep.render(fmt))
    return EXIT_OK if rep.ok else EXIT_FAIL


def main(argv: Optional[List[str]] = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
