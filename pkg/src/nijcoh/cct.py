"""Mapping ring phi!, the module psi!, the comparison map tau and the
cohomology comparison report.

Basis blocks: phi! = [A | B | B phi] and psi! = [M | N | N phi].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from . import assembly as asm
from .algebra import (
    AlgebraSpec,
    BimoduleSpec,
    DefectReport,
    MorphismSpec,
    PhiBimoduleSpec,
    check_algebra,
    check_bimodule,
    check_morphism,
    check_nijenhuis_bimodule,
    check_phi_bimodule,
    check_unit,
    triangle_tensors,
    zeros,
)
from .cochains import DEFAULT_CONVENTION, Cochain, CoefficientSystem
from .exact_linalg import Field, Matrix, QQ, block
from .morphism import CochainTriple, MorphismSystem


class MissingUnitError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MappingRing:
    algebra: AlgebraSpec
    dA: int
    dB: int
    nominal_unit: np.ndarray
    unit_is_two_sided: bool

    @property
    def blocks(self) -> Dict[str, range]:
        a, b = self.dA, self.dB
        return {"A": range(0, a), "B": range(a, a + b), "Bphi": range(a + b, a + 2 * b)}


@dataclass(frozen=True, eq=False)
class MappingModule:
    ring: MappingRing
    bimodule: BimoduleSpec
    dM: int
    dN: int


def _require_units(f: MorphismSpec) -> None:
    for name, alg in (("source", f.source), ("target", f.target)):
        if alg.unit is None:
            raise MissingUnitError(f"the {name} algebra has no designated unit")
        rep = check_unit(alg)
        if not rep.ok:
            raise MissingUnitError(f"the designated unit of the {name} algebra is not a two-sided unit")


def build_phi_bang(f: MorphismSpec) -> MappingRing:
    """(x + y1 + y2 phi)(x' + y1' + y2' phi) = x x' + y1 y1' + (y2 phi(x') + y1 y2') phi."""
    rep = check_morphism(f)
    if not rep.ok:
        raise ValueError(f"not a morphism of Nijenhuis algebras: {rep.labels()}")
    _require_units(f)
    A, B, phi = f.source, f.target, f.mat
    a, b = A.dim, B.dim
    D = a + 2 * b
    sA, sB, sF = slice(0, a), slice(a, a + b), slice(a + b, D)
    c = zeros((D, D, D))
    c[sA, sA, sA] = A.mul
    c[sB, sB, sB] = B.mul
    c[sF, sA, sF] = np.einsum("li,jlk->jik", phi, B.mul)
    c[sB, sF, sF] = B.mul
    P = zeros((D, D))
    P[sA, sA] = A.nij
    P[sB, sB] = B.nij
    P[sF, sF] = B.nij
    unit = np.concatenate([A.unit, B.unit, zeros(b)])
    alg = AlgebraSpec(c, P)
    probe = check_unit(AlgebraSpec(c, P, unit))
    return MappingRing(alg, a, b, unit, probe.ok)


def build_psi_bang(pb: PhiBimoduleSpec, ring: Optional[MappingRing] = None) -> MappingModule:
    """(x + y1 + y2 phi)(m + n1 + n2 phi) = x m + y1 n1 + (y2 psi(m) + y1 n2) phi, and the mirror."""
    rep = check_phi_bimodule(pb)
    if not rep.ok:
        raise ValueError(f"not a Nijenhuis phi-bimodule: {rep.labels()}")
    ring = ring or build_phi_bang(pb.phi)
    a, b = ring.dA, ring.dB
    m, n = pb.m.dim, pb.n.dim
    D, E = a + 2 * b, m + 2 * n
    sA, sB, sF = slice(0, a), slice(a, a + b), slice(a + b, D)
    sM, sN, sNf = slice(0, m), slice(m, m + n), slice(m + n, E)
    L, R = zeros((D, E, E)), zeros((E, D, E))
    LN, RN = pb.n.left, pb.n.right
    L[sA, sM, sM] = pb.m.left
    L[sB, sN, sN] = LN
    L[sF, sM, sNf] = np.einsum("lp,jlk->jpk", pb.psi, LN)
    L[sB, sNf, sNf] = LN
    R[sM, sA, sM] = pb.m.right
    R[sN, sB, sN] = RN
    R[sNf, sA, sNf] = np.einsum("li,jlk->jik", pb.phi.mat, RN)
    R[sN, sF, sNf] = RN
    P = zeros((E, E))
    P[sM, sM] = pb.m.op
    P[sN, sN] = pb.n.op
    P[sNf, sNf] = pb.n.op
    return MappingModule(ring, BimoduleSpec(L, R, P), m, n)


def check_mapping_structures(ring: MappingRing, module: Optional[MappingModule] = None) -> DefectReport:
    rep = check_algebra(ring.algebra)
    if module is not None:
        rep.extend(check_bimodule(ring.algebra, module.bimodule))
        rep.extend(check_nijenhuis_bimodule(ring.algebra, module.bimodule))
    return rep


# -- tau -------------------------------------------------------------------------------------

class Comparison:
    """tau between C_mor of a phi-bimodule and cochains on (phi!, psi!)."""

    def __init__(self, pb: PhiBimoduleSpec, convention: str = DEFAULT_CONVENTION):
        self.pb = pb
        self.ms = MorphismSystem(pb, convention)
        self.ring = build_phi_bang(pb.phi)
        self.module = build_psi_bang(pb, self.ring)
        self.bang = CoefficientSystem(self.ring.algebra, self.module.bimodule)
        self.convention = convention
        B = pb.phi.target
        lt, _ = triangle_tensors(pb.n.left, pb.n.right, B.nij, pb.n.op)
        self._left = {"plain": pb.n.left, "triangle": lt}
        self._cache: Dict[tuple, Matrix] = {}

    def tau_values(self, t: CochainTriple, flavor: str = "plain") -> np.ndarray:
        ring, mod = self.ring, self.module
        a, b, m, nn = ring.dA, ring.dB, mod.dM, mod.dN
        D, E = a + 2 * b, m + 2 * nn
        n = t.degree
        out = zeros((D,) * n + (E,))
        if n == 0:
            out[:m] = t.f.values
            out[m:m + nn] = t.g.values
            return out
        f, g, h = t.f.values, t.g.values, t.h.values
        phi = self.pb.phi.mat
        LN = self._left[flavor]
        kind = lambda i: "A" if i < a else ("B" if i < a + b else "F")
        for idx in itertools.product(range(D), repeat=n):
            blocks = [kind(i) for i in idx]
            if all(k == "A" for k in blocks):
                out[idx][:m] = f[idx]
            elif all(k == "B" for k in blocks):
                out[idx][m:m + nn] = g[tuple(i - a for i in idx)]
            elif blocks.count("F") == 1:
                r = blocks.index("F")
                if all(k == "B" for k in blocks[:r]) and all(k == "A" for k in blocks[r + 1:]):
                    ys = tuple(i - a for i in idx[:r]) + (idx[r] - a - b,)
                    val = g[ys]
                    for x in idx[r + 1:]:
                        val = np.tensordot(phi[:, x], val, axes=([0], [0]))
                    if r == 0:
                        hv = h[idx[1:]]
                        val = val + np.tensordot(hv, LN[ys[0]], axes=([0], [0]))
                    out[idx][m + nn:] = val
        return out

    def tau_n(self, t: CochainTriple, flavor: str = "plain") -> Cochain:
        return Cochain(self.bang, self.tau_values(t, flavor))

    def tau_matrix(self, n: int, flavor: str = "plain") -> Matrix:
        key = ("tau", flavor, n)
        if key not in self._cache:
            asm.guard(self.bang.size(n), f"C^{n}(phi!, psi!)")
            cols = []
            size = self.ms.mor_dim(n)
            for j in range(size):
                e = [0] * size
                e[j] = 1
                vals = self.tau_values(self.ms.triple_from_vector(n, e), flavor).ravel()
                cols.append({r: v for r, v in enumerate(vals) if v != 0})
            self._cache[key] = Matrix.from_columns(self.bang.size(n), cols)
        return self._cache[key]

    def tau_njm_matrix(self, n: int) -> Matrix:
        """diag(tau_phi, (-1)^n tau_triangle): C^n_NjM -> C^n_NjA(phi!, psi!)."""
        top = self.tau_matrix(n, "plain")
        if n == 0:
            return top
        bottom = self.tau_matrix(n - 1, "triangle")
        return block([[top, None], [None, bottom if n % 2 == 0 else -bottom]],
                     [self.bang.size(n), self.bang.size(n - 1)],
                     [self.ms.mor_dim(n), self.ms.mor_dim(n - 1)])

    # residual matrices, zero exactly when the identity holds on every basis triple
    def square_residual(self, n: int) -> Matrix:
        return (self.bang.phi_matrix(n) @ self.tau_matrix(n, "plain")
                - self.tau_matrix(n, "triangle") @ self.ms.theta_matrix(n))

    def chain_residual(self, n: int) -> Matrix:
        return (self.bang.nja_matrix(n, self.convention) @ self.tau_njm_matrix(n)
                - self.tau_njm_matrix(n + 1) @ self.ms.njm_matrix(n))

    def plain_chain_residual(self, n: int) -> Matrix:
        return (self.bang.hochschild_matrix(n) @ self.tau_matrix(n, "plain")
                - self.tau_matrix(n + 1, "plain") @ self.ms.delta_mor_matrix(n, "plain"))

    def triangle_chain_residual(self, n: int) -> Matrix:
        return (self.bang.njo_matrix(n, self.convention) @ self.tau_matrix(n, "triangle")
                - self.tau_matrix(n + 1, "triangle") @ self.ms.delta_mor_matrix(n, "triangle"))


@dataclass
class ResidualSummary:
    degree: int
    failing_columns: int
    first_column: Optional[int]

    @property
    def ok(self) -> bool:
        return self.failing_columns == 0


def _summarize(n: int, m: Matrix) -> ResidualSummary:
    cols = m.nonzero_columns()
    return ResidualSummary(n, len(cols), cols[0] if cols else None)


@dataclass
class CCTRow:
    degree: int
    h_njm: int
    h_nja_bang: int
    h_mor: int
    h_alg_bang: int

    @property
    def equal(self) -> bool:
        return self.h_njm == self.h_nja_bang


@dataclass
class CCTReport:
    rows: List[CCTRow]
    structure: DefectReport
    square: List[ResidualSummary]
    chain: List[ResidualSummary]
    plain_chain: List[ResidualSummary]
    triangle_chain: List[ResidualSummary]
    unit_is_two_sided: bool

    @property
    def dimensions_equal(self) -> bool:
        return all(r.equal for r in self.rows)

    @property
    def square_commutes(self) -> bool:
        return all(s.ok for s in self.square)

    @property
    def ok(self) -> bool:
        return (self.structure.ok and self.dimensions_equal and self.square_commutes
                and all(s.ok for s in self.chain))

    def to_dict(self) -> dict:
        res = lambda xs: [{"degree": s.degree, "failing_columns": s.failing_columns,
                           "first_column": s.first_column} for s in xs]
        return {
            "ok": self.ok,
            "rows": [{"degree": r.degree, "H_NjM": r.h_njm, "H_NjA(phi!,psi!)": r.h_nja_bang,
                      "equal": r.equal, "H_mor": r.h_mor, "HH(phi!,psi!)": r.h_alg_bang} for r in self.rows],
            "structures_ok": self.structure.ok,
            "square": res(self.square),
            "njm_chain_map": res(self.chain),
            "plain_chain_map": res(self.plain_chain),
            "triangle_chain_map": res(self.triangle_chain),
            "nominal_unit_two_sided": self.unit_is_two_sided,
        }


def cct_report(pb: PhiBimoduleSpec, n_max: int = 2, field: Field = QQ,
               convention: str = DEFAULT_CONVENTION) -> CCTReport:
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    cmp_ = Comparison(pb, convention)
    njm = cmp_.ms.complex("njm", field)
    mor = cmp_.ms.complex("mor", field)
    nja = cmp_.bang.complex("nja", convention, field)
    alg = cmp_.bang.complex("alg", convention, field)
    rows = [CCTRow(n, njm.cohomology_dim(n), nja.cohomology_dim(n), mor.cohomology_dim(n), alg.cohomology_dim(n))
            for n in range(1, n_max + 1)]
    degrees = range(n_max + 1)
    return CCTReport(
        rows=rows,
        structure=check_mapping_structures(cmp_.ring, cmp_.module),
        square=[_summarize(n, cmp_.square_residual(n)) for n in degrees],
        chain=[_summarize(n, cmp_.chain_residual(n)) for n in range(n_max)],
        plain_chain=[_summarize(n, cmp_.plain_chain_residual(n)) for n in range(n_max)],
        triangle_chain=[_summarize(n, cmp_.triangle_chain_residual(n)) for n in range(n_max)],
        unit_is_two_sided=cmp_.ring.unit_is_two_sided,
    )
