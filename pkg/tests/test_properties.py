from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from nijcoh.algebra import check_algebra, exact_array, identity_morphism, regular_bimodule, regular_phi_bimodule
from nijcoh.cochains import CoefficientSystem
from nijcoh.deformation import GaugePair, TruncatedDeformation, gauge_transform, trivialize, verify_deformation
from nijcoh.examples import example_morphism, random_nijenhuis_algebra
from nijcoh.exact_linalg import GF, Matrix, format_scalar, parse_scalar
from nijcoh.morphism import MorphismSystem
from nijcoh.workspace import Workspace, dump_text, parse_text

from conftest import dense_rank

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def matrices(max_rows=6, max_cols=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(fractions, min_size=c, max_size=c), min_size=r, max_size=r)))


@given(fractions)
def test_scalar_round_trip(x):
    assert parse_scalar(format_scalar(x)) == x


@given(matrices())
def test_rank_properties(rows):
    m = Matrix.from_dense(rows)
    r = m.rank()
    assert r == dense_rank(rows) == m.transpose().rank()
    assert len(m.kernel_basis()) == m.cols - r


@given(matrices(5, 5), st.integers(1, 5))
def test_rank_of_product(rows, k):
    m = Matrix.from_dense(rows)
    other = Matrix.from_dense([[Fraction((i * 7 + j * 3) % 5 - 2) for j in range(k)] for i in range(m.cols)])
    assert (m @ other).rank() <= min(m.rank(), other.rank())


@given(st.lists(st.lists(st.integers(-50, 50), min_size=4, max_size=4), min_size=3, max_size=5))
def test_rank_mod_p(rows):
    assert Matrix.from_dense(rows, GF(3)).rank() == dense_rank(rows, 3)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_random_algebras_give_complexes(seed):
    _, alg = random_nijenhuis_algebra(seed)
    assert check_algebra(alg).ok
    system = CoefficientSystem.regular(alg)
    for n in range(2):
        assert (system.njo_matrix(n + 1) @ system.njo_matrix(n)).is_zero()
        assert (system.nja_matrix(n + 1) @ system.nja_matrix(n)).is_zero()


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_random_identity_morphisms_give_complexes(seed):
    _, alg = random_nijenhuis_algebra(seed)
    ms = MorphismSystem(regular_phi_bimodule(identity_morphism(alg)))
    for n in range(2):
        assert (ms.njm_matrix(n + 1) @ ms.njm_matrix(n)).is_zero()


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_workspace_round_trip(seed):
    name, alg = random_nijenhuis_algebra(seed)
    ws = Workspace()
    ws.algebras["X"] = alg
    ws.bimodules["X_reg"] = regular_bimodule(alg)
    ws.bimodule_algebra["X_reg"] = "X"
    assert parse_text(dump_text(ws)) == ws


@settings(max_examples=8, deadline=None)
@given(st.lists(fractions, min_size=26, max_size=26))
def test_gauge_generated_deformations_trivialize(entries):
    phi = example_morphism()
    it = iter(entries)
    FA = [exact_array([[next(it) for _ in range(3)] for _ in range(3)]) for _ in range(2)]
    FB = [exact_array([[next(it) for _ in range(2)] for _ in range(2)]) for _ in range(2)]
    d = gauge_transform(TruncatedDeformation.trivial(phi, 2), GaugePair(FA, FB))
    assert verify_deformation(d).ok
    res = trivialize(d)
    assert res.ok and gauge_transform(d, res.gauge).is_trivial()
