"""Truncated one-parameter deformations of a Nijenhuis algebra morphism.

A deformation of order N stores the perturbations of order 1..N of
``mu_A, mu_B, P_A, P_B, phi``; order 0 is the base morphism.  All identities
are imposed coefficientwise in t, modulo t^{N+1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import (
    DefectReport,
    MorphismSpec,
    exact_array,
    identity,
    is_zero,
    regular_phi_bimodule,
    zeros,
)
from .cochains import DEFAULT_CONVENTION, Cochain
from .morphism import CochainPairNjM, CochainTriple, MorphismSystem

FAMILIES = ("assoc A", "assoc B", "nijenhuis A", "nijenhuis B", "phi multiplicative", "phi operator")


def _freeze_list(arrs, shape) -> Tuple[np.ndarray, ...]:
    return tuple(exact_array(a, shape) for a in arrs)


@dataclass(frozen=True, eq=False)
class TruncatedDeformation:
    base: MorphismSpec
    mulA: Tuple[np.ndarray, ...]
    mulB: Tuple[np.ndarray, ...]
    opA: Tuple[np.ndarray, ...]
    opB: Tuple[np.ndarray, ...]
    phi: Tuple[np.ndarray, ...]

    def __post_init__(self):
        dA, dB = self.base.source.dim, self.base.target.dim
        orders = {len(self.mulA), len(self.mulB), len(self.opA), len(self.opB), len(self.phi)}
        if len(orders) != 1 or orders == {0}:
            raise ValueError("every perturbation list must have the same positive length (the order)")
        object.__setattr__(self, "mulA", _freeze_list(self.mulA, (dA, dA, dA)))
        object.__setattr__(self, "mulB", _freeze_list(self.mulB, (dB, dB, dB)))
        object.__setattr__(self, "opA", _freeze_list(self.opA, (dA, dA)))
        object.__setattr__(self, "opB", _freeze_list(self.opB, (dB, dB)))
        object.__setattr__(self, "phi", _freeze_list(self.phi, (dB, dA)))

    @property
    def order(self) -> int:
        return len(self.mulA)

    @classmethod
    def trivial(cls, base: MorphismSpec, order: int = 2) -> "TruncatedDeformation":
        dA, dB = base.source.dim, base.target.dim
        return cls(base, [zeros((dA,) * 3)] * order, [zeros((dB,) * 3)] * order,
                   [zeros((dA, dA))] * order, [zeros((dB, dB))] * order, [zeros((dB, dA))] * order)

    # full series including the base term at index 0
    def series(self) -> Dict[str, List[np.ndarray]]:
        A, B = self.base.source, self.base.target
        return {
            "mulA": [A.mul, *self.mulA],
            "mulB": [B.mul, *self.mulB],
            "opA": [A.nij, *self.opA],
            "opB": [B.nij, *self.opB],
            "phi": [self.base.mat, *self.phi],
        }

    def is_trivial(self) -> bool:
        return all(is_zero(x) for group in (self.mulA, self.mulB, self.opA, self.opB, self.phi) for x in group)

    def lowest_nonzero_order(self) -> Optional[int]:
        for k in range(self.order):
            if any(not is_zero(group[k]) for group in (self.mulA, self.mulB, self.opA, self.opB, self.phi)):
                return k + 1
        return None

    def __eq__(self, other):
        if not isinstance(other, TruncatedDeformation):
            return NotImplemented
        mine, theirs = self.series(), other.series()
        return self.base == other.base and self.order == other.order and all(
            np.array_equal(x, y) for k in mine for x, y in zip(mine[k], theirs[k]))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class GaugePair:
    """F_A = id + sum_i FA[i-1] t^i and likewise F_B."""

    FA: Tuple[np.ndarray, ...]
    FB: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.FA) != len(self.FB) or not self.FA:
            raise ValueError("FA and FB must have the same positive length")
        dA, dB = np.shape(self.FA[0])[0], np.shape(self.FB[0])[0]
        object.__setattr__(self, "FA", _freeze_list(self.FA, (dA, dA)))
        object.__setattr__(self, "FB", _freeze_list(self.FB, (dB, dB)))

    @property
    def order(self) -> int:
        return len(self.FA)

    @classmethod
    def identity(cls, dA: int, dB: int, order: int) -> "GaugePair":
        return cls([zeros((dA, dA))] * order, [zeros((dB, dB))] * order)

    def series(self, which: str) -> List[np.ndarray]:
        terms = self.FA if which == "A" else self.FB
        return [identity(terms[0].shape[0]), *terms]

    def inverse(self) -> "GaugePair":
        return GaugePair(series_inverse(self.series("A"))[1:], series_inverse(self.series("B"))[1:])

    def then(self, other: "GaugePair") -> "GaugePair":
        """Apply ``self`` first, then ``other``: the gauge other o self."""
        n = min(self.order, other.order)
        return GaugePair(series_mul(other.series("A"), self.series("A"), n)[1:],
                         series_mul(other.series("B"), self.series("B"), n)[1:])

    def is_identity(self) -> bool:
        return all(is_zero(x) for x in self.FA + self.FB)

    def __eq__(self, other):
        if not isinstance(other, GaugePair):
            return NotImplemented
        return self.order == other.order and all(
            np.array_equal(x, y) for x, y in zip(self.FA + self.FB, other.FA + other.FB))

    __hash__ = None


# -- power series helpers ---------------------------------------------------------------

def series_mul(X: Sequence[np.ndarray], Y: Sequence[np.ndarray], order: int) -> List[np.ndarray]:
    return [sum((X[i].dot(Y[n - i]) for i in range(n + 1)), zeros((X[0].shape[0], Y[0].shape[1])))
            for n in range(order + 1)]


def series_inverse(F: Sequence[np.ndarray]) -> List[np.ndarray]:
    """Inverse of a series with identity constant term: G_n = -sum_{i>=1} F_i G_{n-i}."""
    d = F[0].shape[0]
    G = [identity(d)]
    for n in range(1, len(F)):
        acc = zeros((d, d))
        for i in range(1, n + 1):
            acc = acc - F[i].dot(G[n - i])
        G.append(acc)
    return G


def _compositions3(n: int):
    for a in range(n + 1):
        for b in range(n + 1 - a):
            yield a, b, n - a - b


# -- verification --------------------------------------------------------------------------

@dataclass
class DeformationReport:
    order: int
    reports: Dict[Tuple[str, int], DefectReport] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports.values())

    def failing(self) -> List[Tuple[str, int]]:
        return [key for key, r in self.reports.items() if not r.ok]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "order": self.order,
                "failing": [{"family": fam, "order": n, "total": self.reports[(fam, n)].total}
                            for fam, n in self.failing()]}


def _assoc_residual(mu, n):
    d = mu[0].shape[0]
    out = zeros((d,) * 4)
    for i in range(n + 1):
        j = n - i
        out = out + np.einsum("ijl,lkm->ijkm", mu[j], mu[i]) - np.einsum("jkl,ilm->ijkm", mu[j], mu[i])
    return out


def _nijenhuis_residual(mu, P, n):
    d = mu[0].shape[0]
    out = zeros((d,) * 3)
    for i, j, k in _compositions3(n):
        out = out + np.einsum("ki,lj,klm->ijm", P[j], P[k], mu[i])
        # P_i( mu_j(P_k x, y) + mu_j(x, P_k y) )
        inner = np.einsum("ki,kjl->ijl", P[k], mu[j]) + np.einsum("kj,ikl->ijl", P[k], mu[j])
        out = out - np.einsum("ijk,mk->ijm", inner, P[i])
        # + P_i P_j mu_k(x, y)
        out = out + np.einsum("ijk,mk->ijm", mu[k], P[i].dot(P[j]))
    return out


def _phi_mult_residual(phi, muA, muB, n):
    dA, dB = phi[0].shape[1], phi[0].shape[0]
    out = zeros((dA, dA, dB))
    for i in range(n + 1):
        out = out + np.einsum("ijk,lk->ijl", muA[n - i], phi[i])
    for i, j, k in _compositions3(n):
        out = out - np.einsum("ki,lj,klm->ijm", phi[j], phi[k], muB[i])
    return out


def _phi_op_residual(phi, PA, PB, n):
    out = zeros(phi[0].shape)
    for i in range(n + 1):
        out = out + phi[i].dot(PA[n - i]) - PB[i].dot(phi[n - i])
    return out.T


def verify_deformation(d: TruncatedDeformation) -> DeformationReport:
    s = d.series()
    rep = DeformationReport(d.order)
    for n in range(d.order + 1):
        rep.reports[("assoc A", n)] = DefectReport().scan("assoc A", _assoc_residual(s["mulA"], n))
        rep.reports[("assoc B", n)] = DefectReport().scan("assoc B", _assoc_residual(s["mulB"], n))
        rep.reports[("nijenhuis A", n)] = DefectReport().scan(
            "nijenhuis A", _nijenhuis_residual(s["mulA"], s["opA"], n))
        rep.reports[("nijenhuis B", n)] = DefectReport().scan(
            "nijenhuis B", _nijenhuis_residual(s["mulB"], s["opB"], n))
        rep.reports[("phi multiplicative", n)] = DefectReport().scan(
            "phi multiplicative", _phi_mult_residual(s["phi"], s["mulA"], s["mulB"], n))
        rep.reports[("phi operator", n)] = DefectReport().scan(
            "phi operator", _phi_op_residual(s["phi"], s["opA"], s["opB"], n))
    return rep


# -- cochains attached to a deformation ---------------------------------------------------------

def base_system(base: MorphismSpec, convention: str = DEFAULT_CONVENTION) -> MorphismSystem:
    return MorphismSystem(regular_phi_bimodule(base), convention)


def order_pair(d: TruncatedDeformation, k: int, ms: Optional[MorphismSystem] = None) -> CochainPairNjM:
    """((mu_A,k, mu_B,k, phi_k), (P_A,k, P_B,k, 0)) as a degree-2 cochain pair."""
    ms = ms or base_system(d.base)
    i = k - 1
    top = CochainTriple(Cochain(ms.AM, d.mulA[i]), Cochain(ms.BN, d.mulB[i]), Cochain(ms.AN, d.phi[i].T))
    bottom = CochainTriple(Cochain(ms.AM, d.opA[i].T), Cochain(ms.BN, d.opB[i].T),
                           Cochain.zero(ms.AN, 0))
    return CochainPairNjM(top, bottom)


def infinitesimal(d: TruncatedDeformation, ms: Optional[MorphismSystem] = None) -> CochainPairNjM:
    rep = verify_deformation(d)
    bad = [key for key in rep.failing() if key[1] <= 1]
    if bad:
        raise ValueError(f"not a deformation modulo t^2: {bad}")
    return order_pair(d, 1, ms)


def gauge_generator(FA: np.ndarray, FB: np.ndarray, ms: MorphismSystem) -> CochainPairNjM:
    """The degree-1 pair ((F_A, F_B, 0), (0, 0))."""
    top = CochainTriple(Cochain(ms.AM, np.asarray(FA, dtype=object).T), Cochain(ms.BN, np.asarray(FB, dtype=object).T),
                        Cochain.zero(ms.AN, 0))
    bottom = CochainTriple(Cochain.zero(ms.AM, 0), Cochain.zero(ms.BN, 0))
    return CochainPairNjM(top, bottom)


# -- gauge action --------------------------------------------------------------------------------

def _transport_product(mu, F, G, order):
    d = mu[0].shape[0]
    out = []
    for n in range(order + 1):
        acc = zeros((d, d, d))
        for a in range(n + 1):
            for b, c, e in _compositions3(n - a):
                inner = np.einsum("ki,lj,klp->ijp", G[c], G[e], mu[b])
                acc = acc + np.einsum("ijp,mp->ijm", inner, F[a])
        out.append(acc)
    return out


def _conjugate(F, X, G, order):
    return series_mul(series_mul(F, X, order), G, order)


def gauge_transform(d: TruncatedDeformation, g: GaugePair) -> TruncatedDeformation:
    """mu' = F mu (F^-1 x F^-1), P' = F P F^-1, phi' = F_B phi F_A^-1, truncated at the order of d."""
    if g.order < d.order:
        g = GaugePair(list(g.FA) + [zeros(g.FA[0].shape)] * (d.order - g.order),
                      list(g.FB) + [zeros(g.FB[0].shape)] * (d.order - g.order))
    N = d.order
    s = d.series()
    FA, FB = g.series("A")[:N + 1], g.series("B")[:N + 1]
    GA, GB = series_inverse(FA), series_inverse(FB)
    return TruncatedDeformation(
        d.base,
        _transport_product(s["mulA"], FA, GA, N)[1:],
        _transport_product(s["mulB"], FB, GB, N)[1:],
        _conjugate(FA, s["opA"], GA, N)[1:],
        _conjugate(FB, s["opB"], GB, N)[1:],
        _conjugate(FB, s["phi"], GA, N)[1:],
    )


# -- trivialization ---------------------------------------------------------------------------------

@dataclass
class TrivializeResult:
    """Outcome of the order-by-order trivialization.

    ``gauge`` is the composed gauge when every order was cleared, else None and
    ``obstruction`` holds the order-k pair that is not a D^1-image.
    """

    gauge: Optional[GaugePair]
    obstruction_order: Optional[int] = None
    obstruction: Optional[CochainPairNjM] = None
    witnesses: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.gauge is not None

    def to_dict(self) -> dict:
        out = {"ok": self.ok, "witnesses": self.witnesses}
        if not self.ok:
            out["obstruction_order"] = self.obstruction_order
            out["obstruction"] = [str(v) for v in self.obstruction.vector()]
        return out


def _inner_derivation(a: np.ndarray, mul: np.ndarray) -> np.ndarray:
    """Matrix of x -> x a - a x."""
    return (np.einsum("l,ilk->ik", a, mul) - np.einsum("l,lik->ik", a, mul)).T


def trivialize(d: TruncatedDeformation, convention: str = DEFAULT_CONVENTION) -> TrivializeResult:
    """Solve D^1 x = (order-k pair) order by order and gauge the order away.

    With x = ((F', G', b), (a1, b1)) the gauge used is F_A = F' - [., a1],
    F_B = G' - [., b1]; the inner derivations fold the degree-0 slots back in,
    since D^1((0,0,0),(a1,b1)) = -D^1((d a1, d b1, phi(a1) - b1), 0).
    """
    rep = verify_deformation(d)
    if not rep.ok:
        raise ValueError(f"input is not a valid truncated deformation: {rep.failing()}")
    A, B = d.base.source, d.base.target
    ms = base_system(d.base, convention)
    D1 = ms.njm_matrix(1)
    sizes = ms.mor_sizes(1) + ms.mor_sizes(0)
    total = GaugePair.identity(A.dim, B.dim, d.order)
    cur = d
    witnesses = []
    for k in range(1, d.order + 1):
        z = order_pair(cur, k, ms)
        if z.is_zero():
            continue
        x = D1.solve(z.vector())
        if x is None:
            return TrivializeResult(None, k, z, witnesses)
        offs = np.cumsum([0] + sizes)
        Fp, Gp, b, a1, b1 = (x[offs[i]:offs[i + 1]] for i in range(5))
        Fp = np.array(Fp, dtype=object).reshape(A.dim, A.dim).T
        Gp = np.array(Gp, dtype=object).reshape(B.dim, B.dim).T
        a1 = np.array(a1, dtype=object)
        b1 = np.array(b1, dtype=object)
        FA_k = Fp - _inner_derivation(a1, A.mul)
        FB_k = Gp - _inner_derivation(b1, B.mul)
        witnesses.append({"order": k, "b": [str(v) for v in b], "a1": [str(v) for v in a1],
                          "b1": [str(v) for v in b1]})
        step = GaugePair(
            [FA_k if i == k - 1 else zeros((A.dim, A.dim)) for i in range(d.order)],
            [FB_k if i == k - 1 else zeros((B.dim, B.dim)) for i in range(d.order)],
        )
        cur = gauge_transform(cur, step)
        total = total.then(step)
        if not order_pair(cur, k, ms).is_zero():
            raise AssertionError(f"gauge step failed to clear order {k}")
    return TrivializeResult(total, witnesses=witnesses)
