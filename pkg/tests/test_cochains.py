from fractions import Fraction

import pytest

from nijcoh.algebra import deformed_algebra, regular_bimodule, restrict_along, triangle_bimodule
from nijcoh.cochains import (
    Cochain,
    CochainPairNjA,
    CoefficientSystem,
    cohomology_dim,
    delta_alg,
    delta_nja,
    delta_njo,
    partial_P,
    phi_map,
    sign_audit,
)
from nijcoh.examples import seeded_family
from nijcoh.exact_linalg import GF

from conftest import (
    LoopCochain,
    as_lists,
    columns_to_rows,
    dense,
    dense_rank,
    loop_deformed,
    loop_hochschild,
    loop_njo,
    loop_phi,
    loop_triangle,
    oracle_matrix,
    operator_lists,
)

SEEDS = seeded_family(24)


def fixture_systems(ws):
    A, B = ws.algebras["A"], ws.algebras["B"]
    phi = ws.morphisms["phi"]
    return {
        "A": CoefficientSystem.regular(A),
        "B": CoefficientSystem.regular(B),
        "A with N through phi": CoefficientSystem(A, restrict_along(phi, regular_bimodule(B))),
    }


def loop_ops(system):
    a, m = system.algebra, system.bimodule
    c, L, R = as_lists(a.mul), as_lists(m.left), as_lists(m.right)
    PA, PM = operator_lists(a.nij), operator_lists(m.op)
    lt, rt = loop_triangle(L, R, PA, PM)
    dp = loop_deformed(c, PA)
    return {
        "alg": lambda f: loop_hochschild(f, c, L, R),
        "partial": lambda f: loop_hochschild(f, dp, lt, rt),
        "njo": lambda f: loop_njo(f, c, L, R, PA, PM),
        "phi": lambda f: loop_phi(f, PA, PM),
    }


def package_matrix(system, kind, n):
    return {
        "alg": system.hochschild_matrix,
        "partial": system.partial_matrix,
        "njo": system.njo_matrix,
        "phi": system.phi_matrix,
    }[kind](n)


@pytest.mark.parametrize("kind", ["alg", "partial", "njo", "phi"])
@pytest.mark.parametrize("n", [0, 1, 2])
def test_matrices_match_loop_oracle(ws, kind, n):
    for name, system in fixture_systems(ws).items():
        expected = oracle_matrix(system.dA, system.dM, n, loop_ops(system)[kind])
        assert dense(package_matrix(system, kind, n)) == expected, name


@pytest.mark.parametrize("name,alg", SEEDS[::3], ids=[n for n, _ in SEEDS[::3]])
def test_seed_matrices_match_loop_oracle(name, alg):
    system = CoefficientSystem.regular(alg)
    ops = loop_ops(system)
    for kind in ("alg", "njo", "phi"):
        for n in (0, 1):
            assert dense(package_matrix(system, kind, n)) == oracle_matrix(system.dA, system.dM, n, ops[kind])


@pytest.mark.parametrize("n", [0, 1, 2])
def test_evaluators_match_matrices(ws, n):
    for system in fixture_systems(ws).values():
        D, Dp, Dn, Ph = (system.hochschild_matrix(n), system.partial_matrix(n), system.njo_matrix(n),
                         system.phi_matrix(n))
        for k in range(system.size(n)):
            e = Cochain.basis(system, n, k)
            assert delta_alg(e).vector() == D.apply(e.vector())
            assert partial_P(e).vector() == Dp.apply(e.vector())
            assert delta_njo(e).vector() == Dn.apply(e.vector())
            assert phi_map(e).vector() == Ph.apply(e.vector())


def test_nja_evaluator_matches_matrix(ws):
    system = fixture_systems(ws)["A"]
    for n in (0, 1, 2):
        M = system.nja_matrix(n)
        for k in range(system.nja_size(n)):
            vec = [Fraction(int(i == k)) for i in range(system.nja_size(n))]
            f = Cochain.from_vector(system, n, vec[:system.size(n)])
            g = Cochain.from_vector(system, n - 1, vec[system.size(n):]) if n else None
            assert delta_nja(CochainPairNjA(f, g)).vector() == M.apply(vec)


def assert_squares_vanish(system, max_n=3):
    for n in range(max_n):
        assert (system.hochschild_matrix(n + 1) @ system.hochschild_matrix(n)).is_zero(), ("alg", n)
        assert (system.njo_matrix(n + 1) @ system.njo_matrix(n)).is_zero(), ("njo", n)
        assert (system.nja_matrix(n + 1) @ system.nja_matrix(n)).is_zero(), ("nja", n)


def test_squares_vanish_on_fixture(ws):
    for system in fixture_systems(ws).values():
        assert_squares_vanish(system)


@pytest.mark.parametrize("name,alg", SEEDS, ids=[n for n, _ in SEEDS])
def test_squares_vanish_on_seeds(name, alg):
    assert_squares_vanish(CoefficientSystem.regular(alg))


@pytest.mark.parametrize("name,alg", SEEDS, ids=[n for n, _ in SEEDS])
def test_phi_is_chain_map(name, alg):
    system = CoefficientSystem.regular(alg)
    for n in range(3):
        lhs = system.njo_matrix(n) @ system.phi_matrix(n)
        assert (lhs - system.phi_matrix(n + 1) @ system.hochschild_matrix(n)).is_zero(), n


def test_corrected_audit_is_clean(ws):
    for system in list(fixture_systems(ws).values()) + [CoefficientSystem.regular(a) for _, a in SEEDS]:
        assert all(f.ok for f in sign_audit(system, 3))


def test_printed_convention_fails_with_location():
    system = CoefficientSystem.regular(dict(SEEDS)["T2/L_a"])
    findings = {f.identity: f for f in sign_audit(system, 3, "printed")}
    njo = findings["d_NjO^2"]
    assert not njo.ok and njo.degree == 1 and njo.column == 2
    assert "fails first in degree 1" in str(njo)
    # the residual is a genuine nonzero vector of d^2 applied to that basis cochain
    e = Cochain.basis(system, 1, njo.column)
    twice = delta_njo(delta_njo(e, "printed"), "printed")
    assert {i: v for i, v in enumerate(twice.vector()) if v} == njo.residual


def test_partial_P_is_deformed_hochschild(ws):
    # partial_P equals the bar differential of (A, .P) with triangle coefficients
    A = ws.algebras["A"]
    tri = CoefficientSystem(deformed_algebra(A), triangle_bimodule(A, regular_bimodule(A)))
    plain = CoefficientSystem.regular(A)
    for n in range(3):
        assert dense(plain.partial_matrix(n)) == dense(tri.hochschild_matrix(n))


def loop_nja_dims(system, top):
    """Cohomology dimensions of the NjA cone from loop-oracle blocks and a dense rank."""
    ops = loop_ops(system)
    dA, dM = system.dA, system.dM

    def size(n):
        return dA ** n * dM if n >= 0 else 0

    def mat(n):
        cols = []
        for k in range(size(n) + size(n - 1)):
            vec = [int(i == k) for i in range(size(n) + size(n - 1))]
            f = LoopCochain.from_flat(n, dA, dM, vec[:size(n)])
            top_part = ops["alg"](f).flat()
            bottom = [-v for v in ops["phi"](f).flat()] if n else [-v for v in f.flat()]
            if n:
                g = LoopCochain.from_flat(n - 1, dA, dM, vec[size(n):])
                bottom = [b - v for b, v in zip(bottom, ops["njo"](g).flat())]
            cols.append(top_part + bottom)
        return columns_to_rows(cols, size(n + 1) + size(n))

    ranks = {n: dense_rank(mat(n)) for n in range(top + 1)}
    ranks[-1] = 0
    return [size(n) + size(n - 1) - ranks[n] - ranks[n - 1] for n in range(top + 1)]


def test_frozen_nja_dimensions(ws):
    A = ws.algebras["A"]
    # oracle values from the loop evaluators; the package must reproduce them
    assert loop_nja_dims(CoefficientSystem.regular(A), 2) == [0, 2, 9]
    assert [cohomology_dim("nja", A, None, n) for n in range(3)] == [0, 2, 9]


def test_cohomology_bookkeeping(ws):
    system = fixture_systems(ws)["B"]
    for kind in ("alg", "njo", "nja"):
        cx = system.complex(kind)
        for n in range(3):
            z, b = cx.cocycle_dim(n), cx.coboundary_dim(n)
            assert z == cx.dim(n) - cx.rank(n)
            assert cx.cohomology_dim(n) == z - b >= 0
    assert [system.nja_size(n) for n in range(3)] == [2, 6, 12]


def test_cohomology_mod_p_agrees_on_small_case(ws):
    A = ws.algebras["A"]
    assert [cohomology_dim("nja", A, None, n, GF()) for n in range(3)] == [0, 2, 9]


def test_negative_degree_rejected(ws):
    with pytest.raises(ValueError):
        cohomology_dim("alg", ws.algebras["A"], None, -1)


def test_unknown_convention_rejected(ws):
    system = fixture_systems(ws)["A"]
    with pytest.raises(ValueError):
        delta_njo(Cochain.zero(system, 1), "sideways")


def test_cochain_shape_validation(ws):
    system = fixture_systems(ws)["B"]
    with pytest.raises(ValueError):
        Cochain(system, [[1, 2, 3]])
    with pytest.raises(ValueError):
        CochainPairNjA(Cochain.zero(system, 2), Cochain.zero(system, 2))
