"""Nijenhuis algebras, bimodules and morphisms over QQ, with axiom checkers.

Conventions (0-based throughout):

* algebra product ``e_i e_j = sum_k mul[i, j, k] e_k``
* operators act on column vectors: ``P e_i = sum_k P[k, i] e_k``
* left action ``e_i v_a = sum_b left[i, a, b] v_b``, right ``v_a e_i = sum_b right[a, i, b] v_b``
* a morphism ``phi`` is a ``target.dim x source.dim`` matrix

All tensors are numpy object arrays of :class:`fractions.Fraction`, frozen
read-only on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .exact_linalg import Matrix, QQ

DEFECT_LIMIT = 16


def exact_array(data, shape: Optional[Tuple[int, ...]] = None) -> np.ndarray:
    """Copy ``data`` into a read-only object array of Fractions."""
    arr = np.array(data, dtype=object)
    if shape is not None:
        if arr.size == 0 and 0 in shape:
            arr = np.zeros(shape, dtype=object)
        if arr.shape != tuple(shape):
            raise ValueError(f"expected shape {tuple(shape)}, got {arr.shape}")
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = QQ.convert(v)
    out.flags.writeable = False
    return out


def zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def identity(n: int) -> np.ndarray:
    out = zeros((n, n))
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def is_zero(arr: np.ndarray) -> bool:
    return all(v == 0 for v in arr.flat)


def to_matrix(arr: np.ndarray) -> Matrix:
    rows, cols = arr.shape
    return Matrix.from_entries(rows, cols, {(r, c): v for (r, c), v in np.ndenumerate(arr) if v != 0})


# -- defect reports -------------------------------------------------------------

@dataclass
class DefectReport:
    """Failing tuples with exact residuals; keeps the first ``limit`` only."""

    failures: List[Tuple[str, Tuple[int, ...], Tuple[Fraction, ...]]] = field(default_factory=list)
    total: int = 0
    limit: int = DEFECT_LIMIT

    @property
    def ok(self) -> bool:
        return self.total == 0

    @property
    def truncated(self) -> bool:
        return self.total > len(self.failures)

    def __bool__(self):
        # truthy when there is something to report
        return not self.ok

    def __len__(self):
        return self.total

    def add(self, label: str, index: Tuple[int, ...], residual: Iterable) -> None:
        self.total += 1
        if len(self.failures) < self.limit:
            self.failures.append((label, tuple(int(i) for i in index), tuple(Fraction(v) for v in residual)))

    def scan(self, label: str, residual: np.ndarray) -> "DefectReport":
        """Record every index tuple (all axes but the last) where ``residual`` is nonzero."""
        if residual.ndim == 1:
            if not is_zero(residual):
                self.add(label, (), residual)
            return self
        for idx in np.ndindex(*residual.shape[:-1]):
            vec = residual[idx]
            if not is_zero(vec):
                self.add(label, idx, vec)
        return self

    def extend(self, other: "DefectReport") -> "DefectReport":
        for f in other.failures:
            if len(self.failures) < self.limit:
                self.failures.append(f)
        self.total += other.total
        return self

    def labels(self) -> List[str]:
        return sorted({f[0] for f in self.failures})

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "total": self.total,
            "failures": [
                {"label": lab, "index": list(idx), "residual": [str(v) for v in res]}
                for lab, idx, res in self.failures
            ],
        }


# -- specs -------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AlgebraSpec:
    mul: np.ndarray
    nij: np.ndarray
    unit: Optional[np.ndarray] = None

    def __post_init__(self):
        mul = exact_array(self.mul)
        if mul.ndim != 3 or len(set(mul.shape)) > 1:
            raise ValueError(f"structure tensor must be d x d x d, got {mul.shape}")
        d = mul.shape[0]
        object.__setattr__(self, "mul", mul)
        object.__setattr__(self, "nij", exact_array(self.nij, (d, d)))
        if self.unit is not None:
            object.__setattr__(self, "unit", exact_array(self.unit, (d,)))

    @property
    def dim(self) -> int:
        return self.mul.shape[0]

    def product(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", np.asarray(x, dtype=object), np.asarray(y, dtype=object), self.mul)

    def with_operator(self, nij) -> "AlgebraSpec":
        return AlgebraSpec(self.mul, nij, self.unit)

    def __eq__(self, other):
        if not isinstance(other, AlgebraSpec):
            return NotImplemented
        same_unit = (self.unit is None) == (other.unit is None) and (
            self.unit is None or np.array_equal(self.unit, other.unit))
        return (self.mul.shape == other.mul.shape and np.array_equal(self.mul, other.mul)
                and np.array_equal(self.nij, other.nij) and same_unit)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BimoduleSpec:
    left: np.ndarray
    right: np.ndarray
    op: np.ndarray

    def __post_init__(self):
        left = exact_array(self.left)
        if left.ndim != 3 or left.shape[1] != left.shape[2]:
            raise ValueError(f"left action must be dA x dM x dM, got {left.shape}")
        dA, dM = left.shape[0], left.shape[1]
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", exact_array(self.right, (dM, dA, dM)))
        object.__setattr__(self, "op", exact_array(self.op, (dM, dM)))

    @property
    def dim(self) -> int:
        return self.op.shape[0]

    @property
    def algebra_dim(self) -> int:
        return self.left.shape[0]

    def __eq__(self, other):
        if not isinstance(other, BimoduleSpec):
            return NotImplemented
        return (self.left.shape == other.left.shape and np.array_equal(self.left, other.left)
                and np.array_equal(self.right, other.right) and np.array_equal(self.op, other.op))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class MorphismSpec:
    source: AlgebraSpec
    target: AlgebraSpec
    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", exact_array(self.mat, (self.target.dim, self.source.dim)))

    def __eq__(self, other):
        if not isinstance(other, MorphismSpec):
            return NotImplemented
        return self.source == other.source and self.target == other.target and np.array_equal(self.mat, other.mat)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class PhiBimoduleSpec:
    phi: MorphismSpec
    m: BimoduleSpec
    n: BimoduleSpec
    psi: np.ndarray

    def __post_init__(self):
        if self.m.algebra_dim != self.phi.source.dim or self.n.algebra_dim != self.phi.target.dim:
            raise ValueError("bimodules do not match the endpoint algebras of phi")
        object.__setattr__(self, "psi", exact_array(self.psi, (self.n.dim, self.m.dim)))

    def __eq__(self, other):
        if not isinstance(other, PhiBimoduleSpec):
            return NotImplemented
        return (self.phi == other.phi and self.m == other.m and self.n == other.n
                and np.array_equal(self.psi, other.psi))

    __hash__ = None


# -- tensor helpers --------------------------------------------------------------------

def deformed_tensor(mul: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Structure constants of x._P y = P(x)y + xP(y) - P(xy)."""
    return (np.einsum("ki,kjl->ijl", P, mul) + np.einsum("kj,ikl->ijl", P, mul)
            - np.einsum("ijk,lk->ijl", mul, P))


def triangle_tensors(left, right, PA, PM) -> Tuple[np.ndarray, np.ndarray]:
    """Action tensors of x|>m = P_A(x)m + xP_M(m) - P_M(xm) and its mirror m<|x."""
    lt = (np.einsum("ki,kab->iab", PA, left) + np.einsum("ca,icb->iab", PM, left)
          - np.einsum("iac,bc->iab", left, PM))
    rt = (np.einsum("ca,cib->aib", PM, right) + np.einsum("ki,akb->aib", PA, right)
          - np.einsum("aic,bc->aib", right, PM))
    return lt, rt


# -- checkers ----------------------------------------------------------------------------

def check_associative(a: AlgebraSpec) -> DefectReport:
    c = a.mul
    lhs = np.einsum("ijl,lkm->ijkm", c, c)
    rhs = np.einsum("jkl,ilm->ijkm", c, c)
    return DefectReport().scan("associativity", lhs - rhs)


def check_nijenhuis_operator(a: AlgebraSpec) -> DefectReport:
    c, P = a.mul, a.nij
    lhs = np.einsum("ki,lj,klm->ijm", P, P, c)
    rhs = np.einsum("ijk,mk->ijm", deformed_tensor(c, P), P)
    return DefectReport().scan("nijenhuis", lhs - rhs)


def check_unit(a: AlgebraSpec) -> DefectReport:
    """Two-sided unit check for the designated unit vector (only used where units matter)."""
    rep = DefectReport()
    if a.unit is None:
        rep.add("unit missing", (), ())
        return rep
    eye = identity(a.dim)
    rep.scan("left unit", np.einsum("i,ijk->jk", a.unit, a.mul) - eye)
    rep.scan("right unit", np.einsum("j,ijk->ik", a.unit, a.mul) - eye)
    return rep


def deformed_algebra(a: AlgebraSpec) -> AlgebraSpec:
    return AlgebraSpec(deformed_tensor(a.mul, a.nij), a.nij)


def regular_bimodule(a: AlgebraSpec) -> BimoduleSpec:
    return BimoduleSpec(a.mul, a.mul, a.nij)


def _shape_report(a: AlgebraSpec, m: BimoduleSpec) -> Optional[DefectReport]:
    if m.algebra_dim != a.dim:
        rep = DefectReport()
        rep.add("shape", (m.algebra_dim, a.dim), ())
        return rep
    return None


def check_bimodule(a: AlgebraSpec, m: BimoduleSpec) -> DefectReport:
    """Associative bimodule laws (xy)m = x(ym), (xm)y = x(my), (mx)y = m(xy)."""
    bad = _shape_report(a, m)
    if bad is not None:
        return bad
    c, L, R = a.mul, m.left, m.right
    rep = DefectReport()
    rep.scan("left action", np.einsum("ijl,lab->ijab", c, L) - np.einsum("jac,icb->ijab", L, L))
    rep.scan("middle", np.einsum("iac,cjb->iajb", L, R) - np.einsum("ajc,icb->iajb", R, L))
    rep.scan("right action", np.einsum("aic,cjb->aijb", R, R) - np.einsum("ijl,alb->aijb", c, R))
    return rep


def check_nijenhuis_bimodule(a: AlgebraSpec, m: BimoduleSpec) -> DefectReport:
    bad = _shape_report(a, m)
    if bad is not None:
        return bad
    PA, PM = a.nij, m.op
    lt, rt = triangle_tensors(m.left, m.right, PA, PM)
    rep = DefectReport()
    lhs = np.einsum("ki,ca,kcb->iab", PA, PM, m.left)
    rep.scan("left compatibility", lhs - np.einsum("iac,bc->iab", lt, PM))
    lhs = np.einsum("ca,ki,ckb->aib", PM, PA, m.right)
    rep.scan("right compatibility", lhs - np.einsum("aic,bc->aib", rt, PM))
    return rep


def triangle_bimodule(a: AlgebraSpec, m: BimoduleSpec) -> BimoduleSpec:
    """M with the triangle actions, a bimodule over the deformed algebra."""
    lt, rt = triangle_tensors(m.left, m.right, a.nij, m.op)
    return BimoduleSpec(lt, rt, m.op)


def check_morphism(f: MorphismSpec) -> DefectReport:
    A, B, phi = f.source, f.target, f.mat
    rep = DefectReport()
    lhs = np.einsum("ijk,lk->ijl", A.mul, phi)
    rhs = np.einsum("ki,lj,klm->ijm", phi, phi, B.mul)
    rep.scan("multiplicativity", lhs - rhs)
    rep.scan("operator", (phi.dot(A.nij) - B.nij.dot(phi)).T)
    return rep


def identity_morphism(a: AlgebraSpec) -> MorphismSpec:
    return MorphismSpec(a, a, identity(a.dim))


def restrict_along(f: MorphismSpec, n: BimoduleSpec) -> BimoduleSpec:
    """N viewed as a bimodule over the source through phi."""
    left = np.einsum("ki,kab->iab", f.mat, n.left)
    right = np.einsum("ki,akb->aib", f.mat, n.right)
    return BimoduleSpec(left, right, n.op)


def _intertwines(rep: DefectReport, tag: str, psi, lm, rm, ln, rn) -> None:
    rep.scan(f"{tag}left", np.einsum("iac,bc->iab", lm, psi) - np.einsum("ca,icb->iab", psi, ln))
    rep.scan(f"{tag}right", np.einsum("aic,bc->aib", rm, psi) - np.einsum("ca,cib->aib", psi, rn))


def check_phi_bimodule(pb: PhiBimoduleSpec) -> DefectReport:
    """psi is an A-bimodule map into N restricted along phi, commutes with the
    operators, and intertwines the triangle actions as well."""
    A = pb.phi.source
    nres = restrict_along(pb.phi, pb.n)
    psi = pb.psi
    rep = DefectReport()
    _intertwines(rep, "", psi, pb.m.left, pb.m.right, nres.left, nres.right)
    rep.scan("operator", (psi.dot(pb.m.op) - pb.n.op.dot(psi)).T)
    ltm, rtm = triangle_tensors(pb.m.left, pb.m.right, A.nij, pb.m.op)
    ltn, rtn = triangle_tensors(nres.left, nres.right, A.nij, nres.op)
    _intertwines(rep, "triangle ", psi, ltm, rtm, ltn, rtn)
    return rep


def regular_phi_bimodule(f: MorphismSpec) -> PhiBimoduleSpec:
    return PhiBimoduleSpec(f, regular_bimodule(f.source), regular_bimodule(f.target), f.mat)


def triangle_phi_bimodule(pb: PhiBimoduleSpec) -> PhiBimoduleSpec:
    """The same psi between the triangle bimodules, over the deformed morphism."""
    A, B = pb.phi.source, pb.phi.target
    phi_p = MorphismSpec(deformed_algebra(A), deformed_algebra(B), pb.phi.mat)
    return PhiBimoduleSpec(phi_p, triangle_bimodule(A, pb.m), triangle_bimodule(B, pb.n), pb.psi)


def check_algebra(a: AlgebraSpec) -> DefectReport:
    rep = check_associative(a)
    if rep.ok:
        rep.extend(check_nijenhuis_operator(a))
    return rep
