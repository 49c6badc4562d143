"""Cochain complexes of a Nijenhuis phi-bimodule: C_mor, the chain map Theta and C_NjM.

Degree conventions.  ``C^n_mor = C^n(A,M) + C^n(B,N) + C^{n-1}(A,N)`` for
n >= 1 and ``C^0_mor = M + N`` with
``d^0_mor(m1, m2) = (d^0 m1, d^0 m2, psi(m1) - m2)``.  ``C^n_NjM`` is
``C^n_mor + C^{n-1}_mor`` (the second summand with triangle coefficients), so
``C^0_NjM = M + N`` and ``D^0(a) = (d^0_mor a, a)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import assembly as asm
from .algebra import PhiBimoduleSpec, restrict_along
from .cochains import (
    DEFAULT_CONVENTION,
    CochainComplex,
    Cochain,
    CoefficientSystem,
    delta_alg,
    delta_njo,
    phi_map,
    post_compose,
    pre_compose,
)
from .exact_linalg import Field, Matrix, QQ, block

FLAVORS = ("plain", "triangle")


class MorphismSystem:
    """The three coefficient systems (A,M), (B,N), (A, N through phi) of a phi-bimodule."""

    def __init__(self, pb: PhiBimoduleSpec, convention: str = DEFAULT_CONVENTION):
        self.pb = pb
        self.convention = convention
        A, B = pb.phi.source, pb.phi.target
        self.AM = CoefficientSystem(A, pb.m)
        self.BN = CoefficientSystem(B, pb.n)
        self.AN = CoefficientSystem(A, restrict_along(pb.phi, pb.n))
        self._cache: Dict[tuple, Matrix] = {}

    @property
    def phi(self) -> np.ndarray:
        return self.pb.phi.mat

    @property
    def psi(self) -> np.ndarray:
        return self.pb.psi

    # -- sizes ----------------------------------------------------------------

    def mor_sizes(self, n: int) -> List[int]:
        if n < 0:
            return []
        if n == 0:
            return [self.AM.dM, self.BN.dM]
        return [self.AM.size(n), self.BN.size(n), self.AN.size(n - 1)]

    def mor_dim(self, n: int) -> int:
        return sum(self.mor_sizes(n))

    def njm_dim(self, n: int) -> int:
        return self.mor_dim(n) + self.mor_dim(n - 1)

    # -- matrices -------------------------------------------------------------

    def _d(self, system: CoefficientSystem, n: int, flavor: str) -> Matrix:
        if flavor == "plain":
            return system.hochschild_matrix(n)
        return system.njo_matrix(n, self.convention)

    def delta_mor_matrix(self, n: int, flavor: str = "plain") -> Matrix:
        if flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {flavor!r}")
        key = ("mor", flavor, n)
        if key in self._cache:
            return self._cache[key]
        asm.guard(self.mor_dim(n + 1), f"C^{n + 1}_mor")
        rows, cols = self.mor_sizes(n + 1), self.mor_sizes(n)
        dN = self.BN.dM
        if n == 0:
            blocks = [
                [self._d(self.AM, 0, flavor), None],
                [None, self._d(self.BN, 0, flavor)],
                [asm.dense_to_matrix(self.psi), -asm.eye(dN)],
            ]
        else:
            blocks = [
                [self._d(self.AM, n, flavor), None, None],
                [None, self._d(self.BN, n, flavor), None],
                [asm.post(self.psi, n, self.AM.dA), -asm.pre_tensor([self.phi] * n, dN),
                 -self._d(self.AN, n - 1, flavor)],
            ]
        m = block(blocks, rows, cols)
        self._cache[key] = m
        return m

    def theta_matrix(self, n: int) -> Matrix:
        if n == 0:
            return asm.eye(self.mor_dim(0))
        sizes = self.mor_sizes(n)
        return block(
            [[self.AM.phi_matrix(n), None, None],
             [None, self.BN.phi_matrix(n), None],
             [None, None, self.AN.phi_matrix(n - 1)]],
            sizes, sizes,
        )

    def njm_matrix(self, n: int) -> Matrix:
        """D^n : C^n_NjM -> C^{n+1}_NjM."""
        key = ("njm", n)
        if key in self._cache:
            return self._cache[key]
        asm.guard(self.njm_dim(n + 1), f"C^{n + 1}_NjM")
        top_in, top_out = self.mor_dim(n), self.mor_dim(n + 1)
        if n == 0:
            m = block([[self.delta_mor_matrix(0)], [self.theta_matrix(0)]], [top_out, top_in], [top_in])
        else:
            theta = self.theta_matrix(n)
            m = block(
                [[self.delta_mor_matrix(n), None],
                 [theta if n % 2 == 0 else -theta, self.delta_mor_matrix(n - 1, "triangle")]],
                [top_out, top_in], [top_in, self.mor_dim(n - 1)],
            )
        self._cache[key] = m
        return m

    def complex(self, kind: str = "njm", field: Field = QQ) -> CochainComplex:
        if kind == "njm":
            return CochainComplex("NjM", self.njm_dim, self.njm_matrix, field)
        if kind in ("mor", "mor_plain"):
            return CochainComplex("mor", self.mor_dim, lambda n: self.delta_mor_matrix(n, "plain"), field)
        if kind == "mor_triangle":
            return CochainComplex("mor_tri", self.mor_dim, lambda n: self.delta_mor_matrix(n, "triangle"), field)
        raise ValueError(f"unknown complex {kind!r}")

    # -- vector <-> cochain tuples ------------------------------------------------

    def triple_from_vector(self, n: int, vec: Sequence) -> "CochainTriple":
        vec = list(vec)
        sizes = self.mor_sizes(n)
        parts, off = [], 0
        for s in sizes:
            parts.append(vec[off:off + s])
            off += s
        if n == 0:
            return CochainTriple(Cochain.from_vector(self.AM, 0, parts[0]),
                                 Cochain.from_vector(self.BN, 0, parts[1]))
        return CochainTriple(Cochain.from_vector(self.AM, n, parts[0]),
                             Cochain.from_vector(self.BN, n, parts[1]),
                             Cochain.from_vector(self.AN, n - 1, parts[2]))

    def pair_from_vector(self, n: int, vec: Sequence) -> "CochainPairNjM":
        vec = list(vec)
        k = self.mor_dim(n)
        top = self.triple_from_vector(n, vec[:k])
        bottom = self.triple_from_vector(n - 1, vec[k:]) if n >= 1 else None
        return CochainPairNjM(top, bottom)


@dataclass(frozen=True, eq=False)
class CochainTriple:
    """(f, g, h); at degree 0 only (m1, m2) = (f, g) with h absent."""

    f: Cochain
    g: Cochain
    h: Optional[Cochain] = None

    @property
    def degree(self) -> int:
        return self.f.arity

    def parts(self) -> List[Cochain]:
        return [self.f, self.g] + ([self.h] if self.h is not None else [])

    def vector(self) -> List[Fraction]:
        return [v for c in self.parts() for v in c.vector()]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.parts())

    def __add__(self, other):
        return CochainTriple(*[a + b for a, b in zip(self.parts(), other.parts())])

    def __neg__(self):
        return CochainTriple(*[-a for a in self.parts()])

    def __eq__(self, other):
        if not isinstance(other, CochainTriple):
            return NotImplemented
        return self.vector() == other.vector()


@dataclass(frozen=True, eq=False)
class CochainPairNjM:
    top: CochainTriple
    bottom: Optional[CochainTriple] = None

    @property
    def degree(self) -> int:
        return self.top.degree

    def vector(self) -> List[Fraction]:
        return self.top.vector() + (self.bottom.vector() if self.bottom is not None else [])

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.vector())

    def __eq__(self, other):
        if not isinstance(other, CochainPairNjM):
            return NotImplemented
        return self.vector() == other.vector()


def _compose_phi(phi: np.ndarray, values: np.ndarray) -> np.ndarray:
    for i in range(values.ndim - 1):
        values = pre_compose(phi, values, i)
    return values


def delta_mor(ms: MorphismSystem, t: CochainTriple, flavor: str = "plain") -> CochainTriple:
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")

    def d(c: Cochain) -> Cochain:
        return delta_alg(c) if flavor == "plain" else delta_njo(c, ms.convention)

    n = t.degree
    if n == 0:
        third = post_compose(ms.psi, t.f.values) - t.g.values
        return CochainTriple(d(t.f), d(t.g), Cochain(ms.AN, third))
    f, g, h = t.f, t.g, t.h
    third = post_compose(ms.psi, f.values) - _compose_phi(ms.phi, g.values) - d(h).values
    return CochainTriple(d(f), d(g), Cochain(ms.AN, third))


def theta_map(ms: MorphismSystem, t: CochainTriple) -> CochainTriple:
    if t.degree == 0:
        return t
    return CochainTriple(phi_map(t.f), phi_map(t.g), phi_map(t.h))


def big_D(ms: MorphismSystem, p: CochainPairNjM) -> CochainPairNjM:
    n = p.degree
    top = delta_mor(ms, p.top, "plain")
    th = theta_map(ms, p.top)
    if n == 0:
        return CochainPairNjM(top, th)
    bottom = delta_mor(ms, p.bottom, "triangle")
    return CochainPairNjM(top, bottom + (th if n % 2 == 0 else -th))


def njm_cohomology_dim(pb: PhiBimoduleSpec, n: int, field: Field = QQ,
                       convention: str = DEFAULT_CONVENTION) -> int:
    if n < 0:
        raise ValueError("degree must be nonnegative")
    return MorphismSystem(pb, convention).complex("njm", field).cohomology_dim(n)


@dataclass
class VanishingReport:
    degree: int
    h_nja_am: int
    h_nja_bn: int
    h_nja_an: int
    h_njm: int

    @property
    def components_vanish(self) -> bool:
        return self.h_nja_am == 0 and self.h_nja_bn == 0 and self.h_nja_an == 0

    @property
    def consistent(self) -> bool:
        return (not self.components_vanish) or self.h_njm == 0

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "H_NjA(A,M)": self.h_nja_am,
            "H_NjA(B,N)": self.h_nja_bn,
            "H_NjA(A,N) previous degree": self.h_nja_an,
            "H_NjM": self.h_njm,
            "consistent": self.consistent,
        }


def vanishing_check(pb: PhiBimoduleSpec, n: int, field: Field = QQ,
                    convention: str = DEFAULT_CONVENTION) -> VanishingReport:
    """If the three component groups vanish in the relevant degrees, so must H^n_NjM."""
    if n < 2:
        raise ValueError("the vanishing criterion is stated for n >= 2")
    ms = MorphismSystem(pb, convention)
    return VanishingReport(
        n,
        ms.AM.complex("nja", convention, field).cohomology_dim(n),
        ms.BN.complex("nja", convention, field).cohomology_dim(n),
        ms.AN.complex("nja", convention, field).cohomology_dim(n - 1),
        ms.complex("njm", field).cohomology_dim(n),
    )
