"""Tests for the 1-D GLL basis: nodes, weights, derivatives, filter."""

import numpy as np
import pytest

from semkit.basis import (
    build_gll_basis,
    differentiate,
    filter_transfer,
    interpolation_matrix,
    legendre,
    modal_filter_matrix,
    quadrature,
)


def monomial_integral(d):
    # int_{-1}^{1} x^d dx
    return 0.0 if d % 2 else 2.0 / (d + 1)


class TestNodesWeights:
    def test_order_one_is_trapezoid_endpoints(self):
        b = build_gll_basis(1)
        assert np.allclose(b.nodes, [-1.0, 1.0])
        assert np.allclose(b.weights, [1.0, 1.0])

    def test_order_two_closed_form(self):
        # interior node solves (1 - x^2) P_2'(x) = 0 -> x = 0; weights from
        # w_i = 2 / (N (N+1) P_N(x_i)^2)
        b = build_gll_basis(2)
        assert np.allclose(b.nodes, [-1.0, 0.0, 1.0], atol=1e-15)
        assert np.allclose(b.weights, [1 / 3, 4 / 3, 1 / 3], atol=1e-14)

    def test_order_two_interior_node_matches_bisection(self):
        # independent root find of (1-x^2) P_2'(x) on (-0.9, 0.9)
        f = lambda x: (1 - x * x) * 3 * x  # P_2' = 3x
        lo, hi = -0.9, 0.9
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if f(lo) * f(mid) <= 0:
                hi = mid
            else:
                lo = mid
        assert abs(build_gll_basis(2).nodes[1] - 0.5 * (lo + hi)) < 1e-12

    @pytest.mark.parametrize("order", range(1, 13))
    def test_invariants(self, order):
        b = build_gll_basis(order)
        assert b.nodes[0] == -1.0 and b.nodes[-1] == 1.0
        assert np.all(np.diff(b.nodes) > 0)
        assert np.max(np.abs(b.nodes + b.nodes[::-1])) <= 1e-14
        assert np.all(b.weights > 0)
        assert abs(b.weights.sum() - 2.0) <= 1e-14
        assert np.max(np.abs(b.diff_matrix.sum(axis=1))) <= 1e-12

    def test_nodes_cluster_toward_endpoints(self):
        b = build_gll_basis(7)
        gaps = np.diff(b.nodes)
        assert gaps[0] < gaps[len(gaps) // 2]

    def test_invalid_orders_rejected(self):
        for bad in (0, -1, 33):
            with pytest.raises(ValueError):
                build_gll_basis(bad)
        with pytest.raises(ValueError):
            build_gll_basis(2.5)


class TestQuadrature:
    def test_odd_monomial_is_zero(self):
        b = build_gll_basis(2)
        assert abs(quadrature(b, b.nodes**3)) < 1e-15

    def test_x_squared_exact(self):
        b = build_gll_basis(2)
        assert abs(quadrature(b, b.nodes**2) - 2.0 / 3.0) < 1e-14

    def test_degree_2n_not_exact(self):
        # N=2 rule applied to x^4: sum w x^4 = 2*(1/3) = 2/3... evaluated
        # directly: 1/3*1 + 4/3*0 + 1/3*1 = 2/3? No: hand evaluation below.
        b = build_gll_basis(2)
        val = quadrature(b, b.nodes**4)
        hand = (1 / 3) * 1.0 + (4 / 3) * 0.0 + (1 / 3) * 1.0
        assert abs(val - hand) < 1e-14
        assert abs(val - 2.0 / 5.0) > 1e-6  # analytic 2/5 is NOT reproduced

    @pytest.mark.parametrize("order", range(1, 13))
    def test_exactness_sweep(self, order):
        b = build_gll_basis(order)
        for d in range(2 * order):
            exact = monomial_integral(d)
            got = quadrature(b, b.nodes**d)
            assert abs(got - exact) <= 1e-12 * max(1.0, abs(exact))

    def test_length_mismatch(self):
        b = build_gll_basis(3)
        with pytest.raises(ValueError):
            quadrature(b, np.ones(3))


class TestDifferentiation:
    def test_constant(self):
        b = build_gll_basis(5)
        assert np.max(np.abs(differentiate(b, np.ones(6)))) < 1e-13

    def test_identity_function(self):
        b = build_gll_basis(5)
        assert np.allclose(differentiate(b, b.nodes), 1.0, atol=1e-12)

    def test_square(self):
        b = build_gll_basis(4)
        assert np.allclose(differentiate(b, b.nodes**2), 2 * b.nodes, atol=1e-12)

    @pytest.mark.parametrize("order", range(1, 13))
    def test_monomial_sweep(self, order):
        b = build_gll_basis(order)
        for d in range(order + 1):
            want = d * b.nodes ** (d - 1) if d > 0 else np.zeros(order + 1)
            got = differentiate(b, b.nodes**d)
            assert np.max(np.abs(got - want)) <= 1e-10


class TestInterpolation:
    def test_at_nodes_is_identity(self):
        b = build_gll_basis(6)
        assert np.allclose(interpolation_matrix(b, b.nodes), np.eye(7), atol=1e-13)

    def test_midnode_row(self):
        b = build_gll_basis(2)
        assert np.allclose(interpolation_matrix(b, [0.0]), [[0.0, 1.0, 0.0]])

    def test_linear_halfway(self):
        b = build_gll_basis(1)
        assert np.allclose(interpolation_matrix(b, [0.5]), [[0.25, 0.75]])

    def test_partition_of_unity(self):
        b = build_gll_basis(9)
        rng = np.random.default_rng(7)
        mat = interpolation_matrix(b, rng.uniform(-1, 1, size=40))
        assert np.max(np.abs(mat.sum(axis=1) - 1.0)) <= 1e-12

    def test_out_of_domain(self):
        b = build_gll_basis(3)
        with pytest.raises(ValueError):
            interpolation_matrix(b, [1.5])


class TestModalTransform:
    @pytest.mark.parametrize("order", [1, 4, 9, 16])
    def test_inverse_is_exact(self, order):
        b = build_gll_basis(order)
        eye = b.modal_matrix @ b.inv_modal_matrix
        assert np.max(np.abs(eye - np.eye(order + 1))) < 1e-12

    def test_columns_are_legendre(self):
        b = build_gll_basis(6)
        for m in range(7):
            pm, _ = legendre(m, b.nodes)
            assert np.allclose(b.modal_matrix[:, m], pm, atol=1e-13)


class TestFilter:
    def test_constant_preserved(self):
        b = build_gll_basis(8)
        f = modal_filter_matrix(b, 2, 0.05)
        assert np.allclose(f @ np.ones(9), 1.0, atol=1e-13)

    def test_low_modes_invariant(self):
        b = build_gll_basis(8)
        k = 2
        f = modal_filter_matrix(b, k, 0.3)
        for m in range(b.order - k + 1):
            pm, _ = legendre(m, b.nodes)
            assert np.max(np.abs(f @ pm - pm)) <= 1e-12

    def test_top_mode_scaling(self):
        b = build_gll_basis(7)
        alpha = 0.4
        f = modal_filter_matrix(b, 3, alpha)
        pn, _ = legendre(b.order, b.nodes)
        assert np.max(np.abs(f @ pn - (1 - alpha) * pn)) <= 1e-12

    def test_full_strength_kills_top_mode(self):
        b = build_gll_basis(6)
        f = modal_filter_matrix(b, 1, 1.0)
        pn, _ = legendre(6, b.nodes)
        assert np.max(np.abs(f @ pn)) <= 1e-11

    def test_not_idempotent_in_general(self):
        b = build_gll_basis(6)
        f = modal_filter_matrix(b, 2, 0.5)
        assert np.max(np.abs(f @ f - f)) > 1e-6

    def test_parameter_validation(self):
        b = build_gll_basis(4)
        for k, a in [(0, 0.5), (5, 0.5), (2, 0.0), (2, 1.5)]:
            with pytest.raises(ValueError):
                modal_filter_matrix(b, k, a)

    def test_transfer_endpoint(self):
        sigma = filter_transfer(10, 2, 0.05)
        assert sigma[-1] == pytest.approx(0.95)
        assert np.all(sigma[: 10 - 2 + 1] == 1.0)
