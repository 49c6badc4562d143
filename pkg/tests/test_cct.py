"""Mapping ring, comparison map and the cohomology comparison.

The comparison dimensions recorded here are characterisation values: they
document what the complexes actually give.  The equality criterion itself is
asserted in test_acceptance.py.
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from nijcoh.algebra import (
    AlgebraSpec,
    MorphismSpec,
    check_unit,
    identity_morphism,
    regular_phi_bimodule,
)
from nijcoh.cct import (
    Comparison,
    MissingUnitError,
    build_phi_bang,
    build_psi_bang,
    cct_report,
    check_mapping_structures,
)
from nijcoh.examples import example_morphism, one_dim_algebra, seeded_family, truncated_polynomial

from conftest import apply_op, as_lists, mult, unit_vec, vec_add

UNITAL_SEEDS = [(n, a) for n, a in seeded_family(24) if a.unit is not None and check_unit(a).ok][:6]


@pytest.fixture(scope="module")
def cmp_():
    return Comparison(regular_phi_bimodule(example_morphism()))


def loop_bang_product(f, u, v):
    """(x + y1 + y2 phi)(x' + y1' + y2' phi) = x x' + y1 y1' + (y2 phi(x') + y1 y2') phi."""
    A, B = f.source, f.target
    a, b = A.dim, B.dim
    x, y1, y2 = u[:a], u[a:a + b], u[a + b:]
    xp, y1p, y2p = v[:a], v[a:a + b], v[a + b:]
    cA, cB, phi = as_lists(A.mul), as_lists(B.mul), as_lists(f.mat)
    tail = vec_add(mult(cB, y2, apply_op(phi, xp)), mult(cB, y1, y2p))
    return mult(cA, x, xp) + mult(cB, y1, y1p) + tail


def test_phi_bang_product_matches_formula():
    f = example_morphism()
    ring = build_phi_bang(f)
    D = ring.algebra.dim
    c = as_lists(ring.algebra.mul)
    for i, j in itertools.product(range(D), repeat=2):
        assert mult(c, unit_vec(D, i), unit_vec(D, j)) == loop_bang_product(f, unit_vec(D, i), unit_vec(D, j))


def test_structures_on_fixture():
    pb = regular_phi_bimodule(example_morphism())
    ring = build_phi_bang(pb.phi)
    module = build_psi_bang(pb, ring)
    assert ring.algebra.dim == 7 and module.bimodule.dim == 7
    assert check_mapping_structures(ring, module).ok
    assert list(ring.blocks) == ["A", "B", "Bphi"]


def test_nominal_unit_is_one_sided_for_nonunital_phi():
    ring = build_phi_bang(example_morphism())
    assert not ring.unit_is_two_sided
    # 1_B . (y phi) = y phi holds, but (y phi) . 1_A = y phi(1_A) phi differs from y phi
    probe = check_unit(AlgebraSpec(ring.algebra.mul, ring.algebra.nij, ring.nominal_unit))
    assert set(probe.labels()) == {"right unit"}


@pytest.mark.parametrize("name,alg", UNITAL_SEEDS, ids=[n for n, _ in UNITAL_SEEDS])
def test_structures_on_identity_morphisms(name, alg):
    pb = regular_phi_bimodule(identity_morphism(alg))
    ring = build_phi_bang(pb.phi)
    assert ring.unit_is_two_sided
    assert check_mapping_structures(ring, build_psi_bang(pb, ring)).ok


def test_missing_unit_rejected():
    alg = truncated_polynomial(2)
    with pytest.raises(MissingUnitError):
        build_phi_bang(identity_morphism(AlgebraSpec(alg.mul, alg.nij)))


def test_non_morphism_rejected():
    f = example_morphism()
    bad = MorphismSpec(f.source, f.target, f.mat * 2)
    with pytest.raises(ValueError):
        build_phi_bang(bad)


def test_tau_degree_zero(cmp_):
    vec = [Fraction(v) for v in (1, 2, 3, 4, 5)]
    out = cmp_.tau_n(cmp_.ms.triple_from_vector(0, vec)).vector()
    assert out == vec + [0, 0]


def test_tau_degree_one_blocks(cmp_):
    ms = cmp_.ms
    # (f, 0, 0): supported on A inputs and M outputs only
    t = ms.triple_from_vector(1, [1] + [0] * (ms.mor_dim(1) - 1))
    vals = cmp_.tau_values(t)
    assert vals[0, 0] == 1 and np.count_nonzero(vals) == 1
    # (0, 0, h): tau(y phi) = h(.) acting through y on the N phi block
    k = ms.AM.size(1) + ms.BN.size(1)
    t = ms.triple_from_vector(1, [0] * k + [1] + [0] * (ms.mor_dim(1) - k - 1))
    vals = cmp_.tau_values(t)
    nz = list(zip(*np.nonzero(vals)))
    assert nz and all(3 + 2 <= i < 7 and 5 <= j < 7 for i, j in nz)


def test_tau_njm_sign(cmp_):
    for n in (1, 2):
        T = cmp_.tau_njm_matrix(n).to_dense()
        top = cmp_.ms.mor_dim(n)
        bottom = cmp_.tau_matrix(n - 1, "triangle").to_dense()
        rows0 = cmp_.bang.size(n)
        for r, row in enumerate(bottom):
            assert [Fraction(v) for v in T[rows0 + r][top:]] == [(-1) ** n * Fraction(v) for v in row]


def test_plain_comparison_is_chain_map(cmp_):
    for n in range(3):
        assert cmp_.plain_chain_residual(n).is_zero()


def test_square_fails_only_in_degree_one(cmp_):
    assert cmp_.square_residual(0).is_zero()
    assert cmp_.square_residual(2).is_zero()
    bad = cmp_.square_residual(1)
    assert bad.nonzero_columns() == [13]


def test_report_on_fixture_records_discrepancy():
    rep = cct_report(regular_phi_bimodule(example_morphism()), 2)
    rows = [(r.h_njm, r.h_nja_bang, r.h_mor, r.h_alg_bang) for r in rep.rows]
    assert rows == [(2, 6, 0, 0), (8, 29, 0, 0)]
    assert rep.structure.ok and not rep.dimensions_equal and not rep.ok


def test_report_on_one_dim_identity_records_discrepancy():
    rep = cct_report(regular_phi_bimodule(identity_morphism(one_dim_algebra())), 2)
    assert [(r.h_njm, r.h_nja_bang) for r in rep.rows] == [(0, 2), (1, 9)]
    # every comparison map commutes here, so the gap is in the dimensions alone
    assert rep.square_commutes and all(s.ok for s in rep.chain)
    assert rep.unit_is_two_sided


def test_report_validates_degree():
    with pytest.raises(ValueError):
        cct_report(regular_phi_bimodule(example_morphism()), 0)
