"""Hochschild, Nijenhuis-operator and mapping-cone cochain complexes.

Two independent code paths are provided and tested against each other:
cochain-level evaluators on dense value tensors (``Cochain``) and assembled
sparse coboundary matrices (``*_matrix``).

The operator differential comes in two conventions:

``"corrected"`` (default)
    ``d_NjO(f) = partial(f) - d_Alg(P_M o f)``.  This is the order-one
    linearisation of the operator compatibility equations; it squares to zero
    and makes ``Phi`` a chain map.
``"printed"``
    ``d_NjO(f) = -P_M o d_Alg(f) + partial(f)``.  Kept selectable so the sign
    audit can exhibit where it breaks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import assembly as asm
from .algebra import (
    AlgebraSpec,
    BimoduleSpec,
    deformed_tensor,
    exact_array,
    regular_bimodule,
    triangle_tensors,
    zeros,
)
from .exact_linalg import Field, Matrix, QQ, block

CONVENTIONS = ("corrected", "printed")
DEFAULT_CONVENTION = "corrected"


def _check_convention(convention: str) -> None:
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


# -- tensor kernels ----------------------------------------------------------------------

def _left(L, f):
    n = f.ndim - 1
    return np.moveaxis(np.tensordot(L, f, axes=([1], [n])), 1, -1)


def _right(R, f):
    return np.tensordot(f, R, axes=([f.ndim - 1], [0]))


def _insert(c, f, i):
    t = np.tensordot(c, f, axes=([2], [i]))
    return np.moveaxis(t, [0, 1], [i, i + 1])


def post_compose(Q, f):
    return np.tensordot(f, Q, axes=([f.ndim - 1], [1]))


def pre_compose(Q, f, i):
    return np.moveaxis(np.tensordot(Q, f, axes=([0], [i])), 0, i)


def hochschild_values(c, L, R, f):
    n = f.ndim - 1
    out = _left(L, f)
    for i in range(n):
        out = out + (-1) ** (i + 1) * _insert(c, f, i)
    return out + (-1) ** (n + 1) * _right(R, f)


def phi_values(PA, PM, f):
    n = f.ndim - 1
    if n == 0:
        return f.copy()
    out = None
    for S in itertools.product((False, True), repeat=n):
        g = f
        for i, s in enumerate(S):
            if s:
                g = pre_compose(PA, g, i)
        for _ in range(n - sum(S)):
            g = post_compose(PM, g)
        g = g if (n - sum(S)) % 2 == 0 else -g
        out = g if out is None else out + g
    return out


# -- coefficient systems --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CoefficientSystem:
    """A Nijenhuis algebra together with a Nijenhuis bimodule over it."""

    algebra: AlgebraSpec
    bimodule: BimoduleSpec

    def __post_init__(self):
        if self.bimodule.algebra_dim != self.algebra.dim:
            raise ValueError("bimodule does not act on this algebra")
        cp = deformed_tensor(self.algebra.mul, self.algebra.nij)
        lt, rt = triangle_tensors(self.bimodule.left, self.bimodule.right, self.algebra.nij, self.bimodule.op)
        object.__setattr__(self, "_deformed", cp)
        object.__setattr__(self, "_triangle", (lt, rt))
        object.__setattr__(self, "_cache", {})

    @classmethod
    def regular(cls, a: AlgebraSpec) -> "CoefficientSystem":
        return cls(a, regular_bimodule(a))

    @property
    def dA(self) -> int:
        return self.algebra.dim

    @property
    def dM(self) -> int:
        return self.bimodule.dim

    @property
    def PA(self):
        return self.algebra.nij

    @property
    def PM(self):
        return self.bimodule.op

    def shape(self, n: int) -> Tuple[int, ...]:
        return (self.dA,) * n + (self.dM,)

    def size(self, n: int) -> int:
        return self.dA**n * self.dM if n >= 0 else 0

    # matrices, cached per system
    def _memo(self, key, build):
        cache = self._cache
        if key not in cache:
            cache[key] = build()
        return cache[key]

    def hochschild_matrix(self, n: int) -> Matrix:
        asm.guard(self.size(n + 1), f"C^{n + 1}")
        a, m = self.algebra, self.bimodule
        return self._memo(("alg", n), lambda: asm.hochschild(a.mul, m.left, m.right, n))

    def partial_matrix(self, n: int) -> Matrix:
        asm.guard(self.size(n + 1), f"C^{n + 1}")
        lt, rt = self._triangle
        return self._memo(("partial", n), lambda: asm.hochschild(self._deformed, lt, rt, n))

    def post_matrix(self, Q, n: int) -> Matrix:
        return asm.post(Q, n, self.dA)

    def njo_matrix(self, n: int, convention: str = DEFAULT_CONVENTION) -> Matrix:
        _check_convention(convention)

        def build():
            if convention == "corrected":
                return self.partial_matrix(n) - self.hochschild_matrix(n) @ asm.post(self.PM, n, self.dA)
            return self.partial_matrix(n) - asm.post(self.PM, n + 1, self.dA) @ self.hochschild_matrix(n)

        return self._memo(("njo", convention, n), build)

    def phi_matrix(self, n: int) -> Matrix:
        asm.guard(self.size(n), f"C^{n}")
        return self._memo(("phi", n), lambda: asm.phi_sum(self.PA, self.PM, n))

    def nja_matrix(self, n: int, convention: str = DEFAULT_CONVENTION) -> Matrix:
        """Matrix of the mapping-cone differential C^n_NjA -> C^{n+1}_NjA."""
        if n == 0:
            return block([[self.hochschild_matrix(0)], [-asm.eye(self.dM)]],
                         [self.size(1), self.size(0)], [self.size(0)])
        return block(
            [[self.hochschild_matrix(n), None],
             [-self.phi_matrix(n), -self.njo_matrix(n - 1, convention)]],
            [self.size(n + 1), self.size(n)],
            [self.size(n), self.size(n - 1)],
        )

    def nja_size(self, n: int) -> int:
        return self.size(n) + (self.size(n - 1) if n >= 1 else 0)

    def complex(self, kind: str, convention: str = DEFAULT_CONVENTION, field: Field = QQ) -> "CochainComplex":
        kind = kind.lower()
        if kind == "alg":
            return CochainComplex("Alg", self.size, self.hochschild_matrix, field)
        if kind == "njo":
            return CochainComplex("NjO", self.size, lambda n: self.njo_matrix(n, convention), field)
        if kind == "nja":
            return CochainComplex("NjA", self.nja_size, lambda n: self.nja_matrix(n, convention), field)
        raise ValueError(f"unknown complex {kind!r}")


# -- cochains ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Cochain:
    system: CoefficientSystem
    values: np.ndarray

    def __post_init__(self):
        vals = exact_array(self.values)
        if vals.ndim < 1 or vals.shape != self.system.shape(vals.ndim - 1):
            raise ValueError(f"cochain tensor of shape {vals.shape} does not fit the coefficient system")
        object.__setattr__(self, "values", vals)

    @property
    def arity(self) -> int:
        return self.values.ndim - 1

    @classmethod
    def zero(cls, system: CoefficientSystem, n: int) -> "Cochain":
        return cls(system, zeros(system.shape(n)))

    @classmethod
    def basis(cls, system: CoefficientSystem, n: int, index: int) -> "Cochain":
        vals = zeros(system.size(n))
        vals[index] = Fraction(1)
        return cls(system, vals.reshape(system.shape(n)))

    @classmethod
    def from_vector(cls, system: CoefficientSystem, n: int, vec) -> "Cochain":
        return cls(system, np.array(list(vec), dtype=object).reshape(system.shape(n)))

    def vector(self) -> List[Fraction]:
        return list(self.values.ravel())

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values.flat)

    def __add__(self, other):
        return Cochain(self.system, self.values + other.values)

    def __sub__(self, other):
        return Cochain(self.system, self.values - other.values)

    def __neg__(self):
        return Cochain(self.system, -self.values)

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return self.values.shape == other.values.shape and np.array_equal(self.values, other.values)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class CochainPairNjA:
    f: Cochain
    g: Optional[Cochain] = None

    def __post_init__(self):
        if self.f.arity == 0:
            if self.g is not None:
                raise ValueError("degree-0 pairs carry no second component")
        elif self.g is None or self.g.arity != self.f.arity - 1:
            raise ValueError("second component must have arity one less than the first")

    @property
    def degree(self) -> int:
        return self.f.arity

    def vector(self) -> List[Fraction]:
        return self.f.vector() + (self.g.vector() if self.g is not None else [])

    def __eq__(self, other):
        if not isinstance(other, CochainPairNjA):
            return NotImplemented
        return self.f == other.f and self.g == other.g


def delta_alg(c: Cochain) -> Cochain:
    s = c.system
    return Cochain(s, hochschild_values(s.algebra.mul, s.bimodule.left, s.bimodule.right, c.values))


def partial_P(c: Cochain) -> Cochain:
    """Bar differential of the deformed algebra with triangle-action coefficients."""
    s = c.system
    lt, rt = s._triangle
    return Cochain(s, hochschild_values(s._deformed, lt, rt, c.values))


def delta_njo(c: Cochain, convention: str = DEFAULT_CONVENTION) -> Cochain:
    _check_convention(convention)
    s = c.system
    if convention == "corrected":
        return partial_P(c) - delta_alg(Cochain(s, post_compose(s.PM, c.values)))
    return partial_P(c) - Cochain(s, post_compose(s.PM, delta_alg(c).values))


def phi_map(c: Cochain) -> Cochain:
    s = c.system
    return Cochain(s, phi_values(s.PA, s.PM, c.values))


def delta_nja(p: CochainPairNjA, convention: str = DEFAULT_CONVENTION) -> CochainPairNjA:
    f = p.f
    if p.g is None:
        return CochainPairNjA(delta_alg(f), -f)
    return CochainPairNjA(delta_alg(f), -delta_njo(p.g, convention) - phi_map(f))


# -- complexes and cohomology ---------------------------------------------------------------

class CochainComplex:
    """Degreewise dimensions plus differential matrices, with cached ranks."""

    def __init__(self, name: str, dim: Callable[[int], int], differential: Callable[[int], Matrix],
                 field: Field = QQ):
        self.name = name
        self._dim = dim
        self._d = differential
        self.field = field
        self._mats: Dict[int, Matrix] = {}
        self._ranks: Dict[int, int] = {}

    def dim(self, n: int) -> int:
        return self._dim(n) if n >= 0 else 0

    def d(self, n: int) -> Matrix:
        if n not in self._mats:
            asm.guard(self.dim(n + 1), f"{self.name} degree {n + 1}")
            self._mats[n] = self._d(n)
        return self._mats[n]

    def rank(self, n: int) -> int:
        if n < 0:
            return 0
        if n not in self._ranks:
            m = self.d(n)
            if self.field != QQ:
                m = m.to_field(self.field)
            self._ranks[n] = m.rank()
        return self._ranks[n]

    def cocycle_dim(self, n: int) -> int:
        return self.dim(n) - self.rank(n)

    def coboundary_dim(self, n: int) -> int:
        return self.rank(n - 1)

    def cohomology_dim(self, n: int) -> int:
        return self.cocycle_dim(n) - self.coboundary_dim(n)

    def square(self, n: int) -> Matrix:
        return self.d(n + 1) @ self.d(n)


def cohomology_dim(kind: str, algebra: AlgebraSpec, coefficients: Optional[BimoduleSpec], n: int,
                   field: Field = QQ, convention: str = DEFAULT_CONVENTION) -> int:
    """dim H^n of the Alg, NjO or NjA complex; regular coefficients when ``coefficients`` is None."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    system = CoefficientSystem(algebra, coefficients if coefficients is not None else regular_bimodule(algebra))
    return system.complex(kind, convention, field).cohomology_dim(n)


# -- audits ---------------------------------------------------------------------------------

@dataclass
class Finding:
    """First failure of an identity between matrices, located at a basis cochain."""

    identity: str
    degree: int
    column: Optional[int]
    residual: Optional[Dict[int, Fraction]]

    @property
    def ok(self) -> bool:
        return self.column is None

    def __str__(self):
        if self.ok:
            return f"{self.identity}: holds through degree {self.degree}"
        res = {k: str(v) for k, v in sorted(self.residual.items())[:8]}
        return f"{self.identity}: fails first in degree {self.degree} at basis cochain {self.column}, residual {res}"


def first_nonzero_column(m: Matrix) -> Optional[Tuple[int, Dict[int, Fraction]]]:
    cols = m.nonzero_columns()
    if not cols:
        return None
    return cols[0], m.column(cols[0])


def audit_identity(name: str, residual: Callable[[int], Matrix], degrees: Sequence[int]) -> Finding:
    """Smallest degree at which ``residual(n)`` is nonzero, with the offending basis cochain."""
    last = degrees[-1] if degrees else -1
    for n in degrees:
        hit = first_nonzero_column(residual(n))
        if hit is not None:
            return Finding(name, n, hit[0], hit[1])
    return Finding(name, last, None, None)


def sign_audit(system: CoefficientSystem, max_degree: int = 3,
               convention: str = DEFAULT_CONVENTION) -> List[Finding]:
    """Check each differential squares to zero and Phi is a chain map, degree by degree."""
    degrees = list(range(max_degree))
    return [
        audit_identity("d_Alg^2", lambda n: system.hochschild_matrix(n + 1) @ system.hochschild_matrix(n), degrees),
        audit_identity("d_NjO^2", lambda n: system.njo_matrix(n + 1, convention) @ system.njo_matrix(n, convention),
                       degrees),
        audit_identity("d_NjA^2", lambda n: system.nja_matrix(n + 1, convention) @ system.nja_matrix(n, convention),
                       degrees),
        audit_identity("Phi chain map",
                       lambda n: system.njo_matrix(n, convention) @ system.phi_matrix(n)
                       - system.phi_matrix(n + 1) @ system.hochschild_matrix(n),
                       list(range(max_degree + 1))),
    ]
