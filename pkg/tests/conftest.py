"""Shared fixtures and independent oracles.

The oracles work on plain Python lists of Fractions with explicit loops over
basis tuples; they share no code with the tensordot evaluators or the sparse
assembly in the package.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from importlib import resources

import pytest

from nijcoh.workspace import parse_text


# -- dense linear algebra oracle -------------------------------------------------------------

def dense_rank(rows, p=None):
    """Rank by textbook Gauss-Jordan on a copy; over GF(p) when ``p`` is given."""
    m = [[(Fraction(v) if p is None else int(v) % p) for v in row] for row in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = (1 / m[r][c]) if p is None else pow(m[r][c], p - 2, p)
        m[r] = [(v * inv) if p is None else (v * inv) % p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [(a - f * b) if p is None else (a - f * b) % p for a, b in zip(m[i], m[r])]
        r += 1
    return r


def columns_to_rows(cols, nrows):
    return [[col[i] for col in cols] for i in range(nrows)]


def dense(mat):
    return [[Fraction(v) for v in row] for row in mat.to_dense()]


# -- multilinear loop oracles -------------------------------------------------------------------

def basis_tuples(d, n):
    return list(itertools.product(range(d), repeat=n))


def vec_add(u, v, s=1):
    return [a + s * b for a, b in zip(u, v)]


def mult(c, x, y):
    """Product of coordinate vectors through structure constants c[i][j][k]."""
    d = len(c[0][0])
    out = [Fraction(0)] * d
    for i, xi in enumerate(x):
        if xi == 0:
            continue
        for j, yj in enumerate(y):
            if yj == 0:
                continue
            for k in range(d):
                out[k] += xi * yj * c[i][j][k]
    return out


def unit_vec(d, i):
    v = [Fraction(0)] * d
    v[i] = Fraction(1)
    return v


def apply_op(P, x):
    """P given as the package stores it: P[i][j] = coefficient of e_i in P(e_j)."""
    return [sum(Fraction(P[i][j]) * x[j] for j in range(len(x))) for i in range(len(P))]


class LoopCochain:
    """f(e_{i1},...,e_{in}) stored as dict tuple -> coordinate list, extended multilinearly."""

    def __init__(self, n, dA, dM, table):
        self.n, self.dA, self.dM, self.table = n, dA, dM, table

    @classmethod
    def from_flat(cls, n, dA, dM, vec):
        table = {}
        for pos, t in enumerate(basis_tuples(dA, n)):
            table[t] = [Fraction(v) for v in vec[pos * dM:(pos + 1) * dM]]
        return cls(n, dA, dM, table)

    def flat(self):
        return [v for t in basis_tuples(self.dA, self.n) for v in self.table[t]]

    def __call__(self, *xs):
        out = [Fraction(0)] * self.dM
        supports = [[(i, v) for i, v in enumerate(x) if v != 0] for x in xs]
        for combo in itertools.product(*supports):
            coef = Fraction(1)
            for _, v in combo:
                coef *= v
            val = self.table[tuple(i for i, _ in combo)]
            out = vec_add(out, val, coef)
        return out


def loop_hochschild(f, c, L, R):
    """(d f)(x_0..x_n) = x_0 f(..) + sum (-1)^{i+1} f(.., x_i x_{i+1}, ..) + (-1)^{n+1} f(..) x_n."""
    n, dA, dM = f.n, f.dA, f.dM
    table = {}
    for t in basis_tuples(dA, n + 1):
        xs = [unit_vec(dA, i) for i in t]
        acc = mult_left(L, xs[0], f(*xs[1:]))
        for i in range(n):
            merged = xs[:i] + [mult(c, xs[i], xs[i + 1])] + xs[i + 2:]
            acc = vec_add(acc, f(*merged), (-1) ** (i + 1))
        acc = vec_add(acc, mult_right(R, f(*xs[:-1]), xs[-1]), (-1) ** (n + 1))
        table[t] = acc
    return LoopCochain(n + 1, dA, dM, table)


def mult_left(L, x, m):
    dM = len(m)
    out = [Fraction(0)] * dM
    for i, xi in enumerate(x):
        for a, ma in enumerate(m):
            if xi and ma:
                for b in range(dM):
                    out[b] += xi * ma * L[i][a][b]
    return out


def mult_right(R, m, x):
    dM = len(m)
    out = [Fraction(0)] * dM
    for a, ma in enumerate(m):
        for i, xi in enumerate(x):
            if xi and ma:
                for b in range(dM):
                    out[b] += xi * ma * R[a][i][b]
    return out


def loop_deformed(c, P):
    """Structure constants of x._P y = P(x)y + xP(y) - P(xy)."""
    d = len(c)
    out = [[[Fraction(0)] * d for _ in range(d)] for _ in range(d)]
    for i in range(d):
        for j in range(d):
            x, y = unit_vec(d, i), unit_vec(d, j)
            v = vec_add(vec_add(mult(c, apply_op(P, x), y), mult(c, x, apply_op(P, y))),
                        apply_op(P, mult(c, x, y)), -1)
            out[i][j] = v
    return out


def loop_triangle(L, R, PA, PM):
    dA, dM = len(L), len(L[0])
    lt = [[[Fraction(0)] * dM for _ in range(dM)] for _ in range(dA)]
    rt = [[[Fraction(0)] * dM for _ in range(dA)] for _ in range(dM)]
    for i in range(dA):
        for a in range(dM):
            x, m = unit_vec(dA, i), unit_vec(dM, a)
            lt[i][a] = vec_add(vec_add(mult_left(L, apply_op(PA, x), m), mult_left(L, x, apply_op(PM, m))),
                               apply_op(PM, mult_left(L, x, m)), -1)
            rt[a][i] = vec_add(vec_add(mult_right(R, apply_op(PM, m), x), mult_right(R, m, apply_op(PA, x))),
                               apply_op(PM, mult_right(R, m, x)), -1)
    return lt, rt


def loop_phi(f, PA, PM):
    """Phi(f)(x_1..x_n) = sum over subsets S of (-P_M)^{n-|S|} f(P_A on S)."""
    n, dA, dM = f.n, f.dA, f.dM
    table = {}
    for t in basis_tuples(dA, n):
        xs = [unit_vec(dA, i) for i in t]
        acc = [Fraction(0)] * dM
        for S in itertools.product((False, True), repeat=n):
            args = [apply_op(PA, x) if s else x for x, s in zip(xs, S)]
            v = f(*args)
            for _ in range(n - sum(S)):
                v = [-w for w in apply_op(PM, v)]
            acc = vec_add(acc, v)
        table[t] = acc
    return LoopCochain(n, dA, dM, table)


def loop_post(f, Q):
    return LoopCochain(f.n, f.dA, len(Q), {t: apply_op(Q, v) for t, v in f.table.items()})


def loop_njo(f, c, L, R, PA, PM):
    """Corrected operator differential: partial(f) - d_Alg(P_M o f)."""
    lt, rt = loop_triangle(L, R, PA, PM)
    part = loop_hochschild(f, loop_deformed(c, PA), lt, rt)
    corr = loop_hochschild(loop_post(f, PM), c, L, R)
    return LoopCochain(f.n + 1, f.dA, f.dM, {t: vec_add(part.table[t], corr.table[t], -1) for t in part.table})


def as_lists(arr):
    return arr.tolist()


def operator_lists(P):
    """Package operators are stored as (out, in) matrices; keep that orientation."""
    return [[Fraction(v) for v in row] for row in P.tolist()]


def oracle_matrix(dA, dM, n, op):
    """Matrix of a linear map on C^n(A, M) built column by column through ``op``."""
    cols = []
    size = dA ** n * dM
    for k in range(size):
        e = [0] * size
        e[k] = 1
        cols.append(op(LoopCochain.from_flat(n, dA, dM, e)).flat())
    nrows = len(cols[0]) if cols else 0
    return columns_to_rows(cols, nrows)


# -- fixtures -----------------------------------------------------------------------------------

@pytest.fixture(scope="session")
def fixture_text():
    return resources.files("nijcoh.data").joinpath("example_2_3.json").read_text()


@pytest.fixture(scope="session")
def ws(fixture_text):
    return parse_text(fixture_text, "example_2_3.json")
