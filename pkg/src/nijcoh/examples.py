"""Worked examples and a seeded generator of small Nijenhuis algebras."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from .algebra import (
    AlgebraSpec,
    MorphismSpec,
    check_algebra,
    identity,
    zeros,
)


def example_algebra_a(alpha=1, beta=1) -> AlgebraSpec:
    """Three-dimensional algebra with diagonal operator diag(alpha, alpha, beta).

    Associative exactly when alpha == beta (otherwise (e2 e1) e3 != e2 (e1 e3)).
    """
    alpha, beta = Fraction(alpha), Fraction(beta)
    c = zeros((3, 3, 3))
    c[0, 0, 0] = alpha
    c[0, 1, 1] = c[1, 0, 1] = alpha
    c[0, 2, 2] = c[2, 0, 2] = beta
    c[1, 1, 1] = alpha
    c[1, 2, 2] = beta
    unit = None
    if alpha == beta and alpha != 0:
        unit = [1 / alpha, 0, 0]
    return AlgebraSpec(c, np.diag(np.array([alpha, alpha, beta], dtype=object)), unit)


def example_algebra_b(gamma=1) -> AlgebraSpec:
    """f1 f1 = f1, every other product of basis vectors is f2; P(f1) = gamma (f1 - f2)."""
    gamma = Fraction(gamma)
    c = zeros((2, 2, 2))
    c[0, 0, 0] = 1
    for i in range(2):
        for j in range(2):
            if (i, j) != (0, 0):
                c[i, j, 1] = 1
    P = zeros((2, 2))
    P[0, 0], P[1, 0] = gamma, -gamma
    return AlgebraSpec(c, P, [1, 0])


def example_morphism(alpha=1, beta=1, gamma=1) -> MorphismSpec:
    """phi(e1) = phi(e2) = f1 - f2, phi(e3) = 0."""
    mat = [[1, 1, 0], [-1, -1, 0]]
    return MorphismSpec(example_algebra_a(alpha, beta), example_algebra_b(gamma), mat)


def one_dim_algebra(square=1, op=0) -> AlgebraSpec:
    c = zeros((1, 1, 1))
    c[0, 0, 0] = Fraction(square)
    unit = [1 / Fraction(square)] if square else None
    return AlgebraSpec(c, [[op]], unit)


# -- seed algebras for property tests ------------------------------------------------

def truncated_polynomial(n: int) -> AlgebraSpec:
    """k[x]/(x^n) in the monomial basis 1, x, ..., x^{n-1}."""
    c = zeros((n, n, n))
    for i in range(n):
        for j in range(n - i):
            c[i, j, i + j] = 1
    unit = [1] + [0] * (n - 1)
    return AlgebraSpec(c, zeros((n, n)), unit)


def upper_triangular() -> AlgebraSpec:
    """2x2 upper triangular matrices, basis E11, E12, E22."""
    c = zeros((3, 3, 3))
    c[0, 0, 0] = 1
    c[0, 1, 1] = 1
    c[1, 2, 1] = 1
    c[2, 2, 2] = 1
    return AlgebraSpec(c, zeros((3, 3)), [1, 0, 1])


def product_algebra() -> AlgebraSpec:
    c = zeros((2, 2, 2))
    c[0, 0, 0] = c[1, 1, 1] = 1
    return AlgebraSpec(c, zeros((2, 2)), [1, 1])


def zero_product(n: int) -> AlgebraSpec:
    return AlgebraSpec(zeros((n, n, n)), zeros((n, n)))


def left_mult(a: AlgebraSpec, x) -> np.ndarray:
    """Matrix of y -> x y."""
    return np.einsum("i,ijk->kj", np.asarray(x, dtype=object), a.mul)


def right_mult(a: AlgebraSpec, x) -> np.ndarray:
    """Matrix of y -> y x."""
    return np.einsum("i,jik->kj", np.asarray(x, dtype=object), a.mul)


SCALARS = (0, 1, -1, 2)


def _base_algebras(rng: random.Random) -> List[Tuple[str, AlgebraSpec]]:
    s = rng.choice((1, -1, 2))
    return [
        ("k", one_dim_algebra(1)),
        ("k0", zero_product(1)),
        ("k[x]/x^2", truncated_polynomial(2)),
        ("k[x]/x^3", truncated_polynomial(3)),
        ("kxk", product_algebra()),
        ("T2", upper_triangular()),
        (f"A({s},{s})", example_algebra_a(s, s)),
        ("B", example_algebra_b()),
        ("zero3", zero_product(3)),
    ]


def _operators(a: AlgebraSpec, rng: random.Random) -> List[Tuple[str, np.ndarray]]:
    d = a.dim
    lam = rng.choice((-1, 2, Fraction(1, 2)))
    x = [rng.choice(SCALARS) for _ in range(d)]
    y = [rng.choice(SCALARS) for _ in range(d)]
    La, Rb = left_mult(a, x), right_mult(a, y)
    mu = rng.choice(SCALARS)
    ops = [
        ("0", zeros((d, d))),
        ("id", identity(d)),
        (f"{lam}*id", identity(d) * Fraction(lam)),
        ("L_a", La),
        ("R_a", Rb),
        ("L_a^2+mu L_a", La.dot(La) + La * mu),
        ("lam*id+L_a", identity(d) * Fraction(lam) + La),
    ]
    if d == 3 and a.mul[1, 2, 2] != 0 and a.mul[2, 1, 2] == 0:
        # the diagonal operator of the three-dimensional example
        ops.append(("diag", a.nij))
    if d == 2 and a.mul[1, 0, 1] == 1 and a.mul[0, 0, 0] == 1 and a.mul[1, 1, 1] == 1:
        ops.append(("P_B", example_algebra_b(rng.choice((1, -1, 2))).nij))
    return ops


def random_nijenhuis_algebra(seed: int) -> Tuple[str, AlgebraSpec]:
    """A checked Nijenhuis algebra of dimension <= 3, reproducible from ``seed``.

    The algebra comes from a fixed list of associative seeds; the operator is
    zero, a scalar multiple of the identity, a left or right multiplication
    operator, a polynomial in a left multiplication operator, or the diagonal
    operator of the worked example.  Every choice is re-verified.
    """
    rng = random.Random(seed)
    name, base = rng.choice(_base_algebras(rng))
    op_name, P = rng.choice(_operators(base, rng))
    a = base.with_operator(P)
    rep = check_algebra(a)
    if not rep.ok:
        raise AssertionError(f"generator produced a non-Nijenhuis pair {name}/{op_name}: {rep.failures[:1]}")
    return f"{name}/{op_name}", a


def seeded_family(count: int = 24, start: int = 0) -> List[Tuple[str, AlgebraSpec]]:
    return [random_nijenhuis_algebra(s) for s in range(start, start + count)]
