import math

import numpy as np
import pytest

from hbvm.legendre import (
    NodeFamily,
    gauss_system,
    lobatto_system,
    random_custom_system,
)
from hbvm.tableau import (
    HbvmSpec,
    abscissae,
    basis_matrices,
    collocation_matrix,
    filtered_tableau,
    hbvm_tableau,
    tableau_from_json,
    tableau_to_json,
    xhat_matrix,
    xs_matrix,
    xtilde_matrix,
)

SQRT3 = math.sqrt(3.0)

# the classical 2-stage Gauss tableau
GAUSS2_A = np.array([[0.25, 0.25 - SQRT3 / 6], [0.25 + SQRT3 / 6, 0.25]])


def both_family_systems(smax=4, kmax=10):
    for s in range(1, smax + 1):
        for k in range(s, kmax + 1):
            yield gauss_system(k), s
            if k >= max(2, s + 1):
                yield lobatto_system(k), s


class TestBasisMatrices:
    def test_single_midpoint_node(self):
        bm = basis_matrices(gauss_system(1), 1)
        assert bm.P_s == pytest.approx(np.array([[1.0]]))
        assert bm.I_s == pytest.approx(np.array([[0.5]]))
        assert bm.Omega == pytest.approx(np.array([[1.0]]))

    def test_gauss2_second_column(self):
        bm = basis_matrices(gauss_system(2), 2)
        assert bm.P_s[:, 1] == pytest.approx([-1.0, 1.0], abs=1e-14)

    def test_lobatto3_last_row_of_integrals(self):
        bm = basis_matrices(lobatto_system(3), 2)
        assert bm.I_s[-1] == pytest.approx([1.0, 0.0], abs=1e-15)

    def test_prefix_consistency(self):
        bm = basis_matrices(gauss_system(5), 3)
        assert np.array_equal(bm.P_s, bm.P_s1[:, :3])

    def test_weighted_basis_annihilates_constants(self):
        # P_s^T Omega 1 = e_1 whenever the rule integrates the basis exactly
        for sys, s in both_family_systems():
            bm = basis_matrices(sys, s)
            e1 = np.zeros(s)
            e1[0] = 1.0
            res = np.max(np.abs(bm.P_s.T @ bm.Omega @ np.ones(sys.k) - e1))
            assert res <= 1e-13, (sys.family, sys.k, s)

    def test_rejects_s_above_k(self):
        with pytest.raises(ValueError):
            basis_matrices(gauss_system(2), 3)


class TestHbvmTableau:
    def test_reduces_to_implicit_midpoint(self):
        tab = hbvm_tableau(HbvmSpec(1, 1))
        assert tab.A == pytest.approx(np.array([[0.5]]))
        assert tab.b == pytest.approx([1.0])
        assert tab.c == pytest.approx([0.5])

    def test_reduces_to_gauss2(self):
        tab = hbvm_tableau(HbvmSpec(2, 2))
        assert np.max(np.abs(tab.A - GAUSS2_A)) <= 1e-13

    def test_rank_and_row_sums(self):
        tab = hbvm_tableau(HbvmSpec(4, 2))
        sv = np.linalg.svd(tab.A, compute_uv=False)
        assert np.sum(sv > 1e-10) == 2
        assert np.max(np.abs(tab.A @ np.ones(4) - tab.c)) <= 1e-12

    def test_row_sums_and_weight_sums_across_matrix(self):
        for sys, s in both_family_systems():
            spec = HbvmSpec(sys.k, s, sys.family)
            tab = hbvm_tableau(spec)
            assert np.max(np.abs(tab.A @ np.ones(tab.k) - tab.c)) <= 1e-12
            assert math.fsum(tab.b) == pytest.approx(1.0, abs=1e-14)

    def test_rejects_weak_custom_quadrature(self):
        spec = HbvmSpec(3, 2, NodeFamily.CUSTOM, nodes=(0.2, 0.5, 0.8))
        with pytest.raises(ValueError, match="quadrature too weak for B"):
            hbvm_tableau(spec)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            HbvmSpec(2, 3)
        with pytest.raises(ValueError):
            HbvmSpec(13, 2)
        with pytest.raises(ValueError):
            HbvmSpec(3, 2, NodeFamily.CUSTOM)  # nodes missing
        with pytest.raises(ValueError):
            HbvmSpec(3, 2, NodeFamily.GAUSS, nodes=(0.1, 0.5, 0.9))


class TestCollocationMatrix:
    def test_midpoint(self):
        assert collocation_matrix(gauss_system(1)) == pytest.approx(np.array([[0.5]]))

    def test_trapezoid(self):
        # oracle: integrate ell_1 = 1 - x and ell_2 = x over [0, tau_i]
        A = collocation_matrix(lobatto_system(2))
        assert A == pytest.approx(np.array([[0.0, 0.0], [0.5, 0.5]]), abs=1e-15)

    def test_gauss2_collocation_is_gauss_method(self):
        A = collocation_matrix(gauss_system(2))
        assert np.max(np.abs(A - GAUSS2_A)) <= 1e-14

    def test_collocation_identity_needs_no_exactness(self):
        # I_s = (collocation) P_s holds for any distinct nodes
        for seed in (42, 43, 44):
            for k in (3, 6, 10):
                sys = random_custom_system(k, seed)
                for s in range(1, min(4, k) + 1):
                    bm = basis_matrices(sys, s)
                    res = np.max(np.abs(bm.I_s - collocation_matrix(sys) @ bm.P_s))
                    assert res <= 1e-12


class TestFilteredTableau:
    def test_identity_filter_at_k_equals_s(self):
        for s in (2, 3):
            sys = gauss_system(s)
            filt = filtered_tableau(sys, s)
            assert np.max(np.abs(filt.A - collocation_matrix(sys))) <= 1e-13

    def test_matches_direct_construction_gauss(self):
        tab = hbvm_tableau(HbvmSpec(6, 2))
        filt = filtered_tableau(gauss_system(6), 2)
        assert np.max(np.abs(tab.A - filt.A)) <= 1e-12

    def test_matches_direct_construction_lobatto(self):
        tab = hbvm_tableau(HbvmSpec(6, 3, NodeFamily.LOBATTO))
        filt = filtered_tableau(lobatto_system(6), 3)
        assert np.max(np.abs(tab.A - filt.A)) <= 1e-12

    def test_filter_equivalence_across_matrix(self):
        for sys, s in both_family_systems():
            spec = HbvmSpec(sys.k, s, sys.family)
            res = np.max(np.abs(filtered_tableau(sys, s).A - hbvm_tableau(spec).A))
            assert res <= 1e-12, (sys.family, sys.k, s)


class TestStructuralMatrices:
    def test_xs_one(self):
        assert xs_matrix(1) == pytest.approx(np.array([[0.5]]))

    def test_xs_two(self):
        xi1 = 1 / (2 * SQRT3)
        assert xs_matrix(2) == pytest.approx(np.array([[0.5, -xi1], [xi1, 0.0]]))

    def test_xtilde_two(self):
        X = xtilde_matrix(2)
        assert X.shape == (3, 3)
        assert np.all(X[:, 2] == 0.0)
        assert X[2, 1] == pytest.approx(1 / (2 * math.sqrt(15)))

    def test_transfer_identity_across_matrix(self):
        for sys, s in both_family_systems():
            bm = basis_matrices(sys, s)
            res = np.max(np.abs(bm.I_s - bm.P_s1 @ xhat_matrix(s)))
            assert res <= 1e-13, (sys.family, sys.k, s)

    def test_transfer_identity_custom_nodes(self):
        for seed in (42, 43, 44):
            sys = random_custom_system(8, seed)
            for s in (1, 2, 3, 4):
                bm = basis_matrices(sys, s)
                res = np.max(np.abs(bm.I_s - bm.P_s1 @ xhat_matrix(s)))
                assert res <= 1e-13


class TestGaussReduction:
    def test_tableau_equals_collocation_at_gauss_nodes(self):
        for s in range(1, 5):
            tab = hbvm_tableau(HbvmSpec(s, s))
            coll = collocation_matrix(gauss_system(s))
            assert np.max(np.abs(tab.A - coll)) <= 1e-13


class TestSerialization:
    def test_round_trip_is_exact(self):
        tab = hbvm_tableau(HbvmSpec(5, 2, NodeFamily.LOBATTO))
        back = tableau_from_json(tableau_to_json(tab))
        assert np.array_equal(tab.A, back.A)
        assert np.array_equal(tab.b, back.b)
        assert np.array_equal(tab.c, back.c)
        assert back.s == 2 and back.family == "lobatto"

    def test_rejects_inconsistent_k(self):
        tab = hbvm_tableau(HbvmSpec(2, 1))
        text = tableau_to_json(tab).replace('"k": 2', '"k": 3')
        with pytest.raises(ValueError):
            tableau_from_json(text)


def test_abscissae_dispatch():
    assert abscissae(HbvmSpec(3, 2)).family is NodeFamily.GAUSS
    assert abscissae(HbvmSpec(3, 1, NodeFamily.LOBATTO)).family is NodeFamily.LOBATTO
    spec = HbvmSpec(4, 2, NodeFamily.CUSTOM, nodes=(0.15, 0.35, 0.65, 0.85))
    assert abscissae(spec).tau == pytest.approx([0.15, 0.35, 0.65, 0.85])
