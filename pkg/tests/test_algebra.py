import itertools
from fractions import Fraction

import numpy as np
import pytest

from nijcoh.algebra import (
    DEFECT_LIMIT,
    AlgebraSpec,
    BimoduleSpec,
    DefectReport,
    MorphismSpec,
    PhiBimoduleSpec,
    check_algebra,
    check_associative,
    check_bimodule,
    check_morphism,
    check_nijenhuis_bimodule,
    check_nijenhuis_operator,
    check_phi_bimodule,
    check_unit,
    deformed_algebra,
    exact_array,
    regular_bimodule,
    regular_phi_bimodule,
    restrict_along,
    triangle_bimodule,
    triangle_phi_bimodule,
    zeros,
)
from nijcoh.examples import (
    example_algebra_a,
    example_algebra_b,
    example_morphism,
    one_dim_algebra,
    seeded_family,
    truncated_polynomial,
    upper_triangular,
)

from conftest import apply_op, as_lists, loop_deformed, loop_triangle, mult, unit_vec, vec_add

SEEDS = seeded_family(24)


def loop_nijenhuis_ok(alg):
    c, P = as_lists(alg.mul), as_lists(alg.nij)
    d = alg.dim
    for i in range(d):
        for j in range(d):
            x, y = unit_vec(d, i), unit_vec(d, j)
            lhs = mult(c, apply_op(P, x), apply_op(P, y))
            inner = vec_add(vec_add(mult(c, apply_op(P, x), y), mult(c, x, apply_op(P, y))),
                            apply_op(P, mult(c, x, y)), -1)
            if lhs != apply_op(P, inner):
                return False
    return True


def test_fixture_objects_pass(ws):
    A, B = ws.algebras["A"], ws.algebras["B"]
    assert (A.dim, B.dim) == (3, 2)
    for alg in (A, B):
        assert check_associative(alg).ok
        assert check_nijenhuis_operator(alg).ok
        assert check_unit(alg).ok
    assert check_morphism(ws.morphisms["phi"]).ok
    assert check_phi_bimodule(ws.phi_bimodules["phi_reg"]).ok


def test_non_associative_parameters_localized():
    A = example_algebra_a(1, 2)
    rep = check_associative(A)
    assert not rep.ok
    assert all(label == "associativity" for label in rep.labels())
    # (e2 e1) e3 != e2 (e1 e3)
    assert any(idx == (1, 0, 2) for _, idx, _ in rep.failures)


def test_perturbed_structure_constant_fails():
    B = example_algebra_b()
    mul = B.mul.copy()
    mul[0, 0, 0] = Fraction(2)
    rep = check_algebra(AlgebraSpec(mul, B.nij))
    assert not rep.ok
    assert rep.failures[0][0] == "associativity"


def test_nijenhuis_checker_matches_loop_oracle():
    for name, alg in SEEDS:
        assert check_nijenhuis_operator(alg).ok == loop_nijenhuis_ok(alg), name
    A = example_algebra_a()
    for scale in (1, 2, 3):
        bad = A.with_operator(A.nij * 0 + exact_array([[0, 1, 0], [0, 0, 0], [0, 0, scale]]))
        assert check_nijenhuis_operator(bad).ok == loop_nijenhuis_ok(bad)


def loop_bimodule_operator_ok(alg, PM):
    c, P, d = as_lists(alg.mul), as_lists(alg.nij), alg.dim
    for i in range(d):
        for a in range(d):
            x, m = unit_vec(d, i), unit_vec(d, a)
            for lhs, inner in (
                (mult(c, apply_op(P, x), apply_op(PM, m)),
                 vec_add(vec_add(mult(c, apply_op(P, x), m), mult(c, x, apply_op(PM, m))),
                         apply_op(PM, mult(c, x, m)), -1)),
                (mult(c, apply_op(PM, m), apply_op(P, x)),
                 vec_add(vec_add(mult(c, apply_op(PM, m), x), mult(c, m, apply_op(P, x))),
                         apply_op(PM, mult(c, m, x)), -1)),
            ):
                if lhs != apply_op(PM, inner):
                    return False
    return True


def test_regular_bimodule_operators_match_loop_oracle():
    B = example_algebra_b()
    reg = regular_bimodule(B)
    verdicts = []
    for entries in itertools.product((0, 1, -1), repeat=4):
        PM = exact_array(np.array(entries).reshape(2, 2))
        rep = check_nijenhuis_bimodule(B, BimoduleSpec(reg.left, reg.right, PM))
        expected = loop_bimodule_operator_ok(B, PM.tolist())
        assert rep.ok == expected, entries
        if not rep.ok:
            assert set(rep.labels()) <= {"left compatibility", "right compatibility"}
        verdicts.append(expected)
    assert any(verdicts) and not all(verdicts)


def test_zero_morphism_is_a_morphism():
    A, B = example_algebra_a(), example_algebra_b()
    assert check_morphism(MorphismSpec(A, B, zeros((2, 3)))).ok


def test_unit_preservation_not_required():
    # phi(1_A) = f1 - f2 is not the unit of B, yet phi is a valid morphism
    phi = example_morphism()
    assert check_morphism(phi).ok
    image = phi.mat.dot(phi.source.unit)
    assert list(image) != list(phi.target.unit)


def test_operator_perturbation_breaks_morphism():
    phi = example_morphism()
    B = phi.target
    bad_B = B.with_operator(B.nij * 2)
    rep = check_morphism(MorphismSpec(phi.source, bad_B, phi.mat))
    assert not rep.ok
    assert rep.labels() == ["operator"]


def test_restriction_kills_e3():
    phi = example_morphism()
    nres = restrict_along(phi, regular_bimodule(phi.target))
    assert not np.any(nres.left[2]) and not np.any(nres.right[:, 2])
    assert check_bimodule(phi.source, nres).ok
    assert check_nijenhuis_bimodule(phi.source, nres).ok


def test_psi_defect_is_localized():
    pb = regular_phi_bimodule(example_morphism())
    psi = pb.psi.copy()
    psi[0, 2] = Fraction(1)
    rep = check_phi_bimodule(PhiBimoduleSpec(pb.phi, pb.m, pb.n, psi))
    assert not rep.ok
    assert "left" in rep.labels() or "right" in rep.labels()


@pytest.mark.parametrize("name,alg", SEEDS, ids=[n for n, _ in SEEDS])
def test_deformed_algebra_is_nijenhuis(name, alg):
    dp = deformed_algebra(alg)
    assert check_algebra(dp).ok
    assert dp.mul.tolist() == loop_deformed(as_lists(alg.mul), as_lists(alg.nij))


@pytest.mark.parametrize("name,alg", SEEDS[:8], ids=[n for n, _ in SEEDS[:8]])
def test_triangle_bimodule_over_deformed(name, alg):
    reg = regular_bimodule(alg)
    tri = triangle_bimodule(alg, reg)
    lt, rt = loop_triangle(as_lists(reg.left), as_lists(reg.right), as_lists(alg.nij), as_lists(reg.op))
    assert tri.left.tolist() == lt and tri.right.tolist() == rt
    assert check_bimodule(deformed_algebra(alg), tri).ok
    assert check_nijenhuis_bimodule(deformed_algebra(alg), tri).ok


def test_triangle_phi_bimodule_checks(ws):
    tri = triangle_phi_bimodule(ws.phi_bimodules["phi_reg"])
    assert check_morphism(tri.phi).ok
    assert check_phi_bimodule(tri).ok


def test_small_examples_are_nijenhuis():
    for alg in (one_dim_algebra(), one_dim_algebra(1, 1), truncated_polynomial(3), upper_triangular()):
        assert check_algebra(alg).ok


def test_defect_report_truncates():
    rep = DefectReport()
    for i in range(DEFECT_LIMIT + 5):
        rep.add("x", (i,), [1])
    assert rep.total == DEFECT_LIMIT + 5 and len(rep.failures) == DEFECT_LIMIT
    assert rep.truncated and not rep.ok
    assert rep.to_dict()["failures"][0] == {"label": "x", "index": [0], "residual": ["1"]}


def test_shape_mismatch_bimodule():
    A, B = example_algebra_a(), example_algebra_b()
    rep = check_bimodule(A, regular_bimodule(B))
    assert rep.labels() == ["shape"]
