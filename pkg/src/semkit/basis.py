"""One-dimensional Gauss-Lobatto-Legendre nodal bases.

Everything downstream (meshes, tensor-product operators, the time stepper,
the modal filter) is built from the objects here: GLL nodes and quadrature
weights on [-1, 1], the Lagrange differentiation matrix, interpolation
matrices to arbitrary point sets, and the nodal<->Legendre-modal transform.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_ORDER = 32


def legendre(order, x):
    """Evaluate the Legendre polynomial P_order and its derivative at x.

    Three-term recurrence; x may be a scalar or an ndarray.
    Returns (P, dP).
    """
    x = np.asarray(x, dtype=float)
    p0 = np.ones_like(x)
    if order == 0:
        return p0, np.zeros_like(x)
    p1 = x.copy()
    for k in range(1, order):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    # derivative from the standard identity, safe at |x| = 1 by L'Hopital:
    # (1 - x^2) P_n' = n (P_{n-1} - x P_n)
    dp = np.empty_like(x)
    interior = np.abs(x) < 1.0
    xi = x[interior]
    dp[interior] = order * (p0[interior] - xi * p1[interior]) / (1.0 - xi * xi)
    dp[~interior] = np.sign(x[~interior]) ** (order + 1) * order * (order + 1) / 2.0
    return p1, dp


def gll_nodes_weights(order):
    """GLL nodes (endpoints plus roots of P_N') and quadrature weights.

    Newton iteration on P_N' with Chebyshev-Lobatto initial guesses,
    second derivative supplied by the Legendre ODE. Converges to ~1e-15
    for every order supported here (<= MAX_ORDER).
    """
    n = order
    if n == 1:
        return np.array([-1.0, 1.0]), np.array([1.0, 1.0])
    x = np.cos(np.pi * np.arange(n, -1, -1) / n)  # ascending Chebyshev-Lobatto
    xi = x[1:-1].copy()
    for _ in range(100):
        pn, dpn = legendre(n, xi)
        # P_N'' from the Legendre ODE (1-x^2) P'' - 2x P' + N(N+1) P = 0
        d2pn = (2.0 * xi * dpn - n * (n + 1) * pn) / (1.0 - xi * xi)
        dx = dpn / d2pn
        xi -= dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    x[1:-1] = xi
    # enforce exact symmetry about 0 (spec-level invariant of the node set)
    x = 0.5 * (x - x[::-1])
    x[0], x[-1] = -1.0, 1.0
    if n % 2 == 0:
        x[n // 2] = 0.0
    pn, _ = legendre(n, x)
    w = 2.0 / (n * (n + 1) * pn * pn)
    return x, w


def lagrange_diff_matrix(nodes):
    """Differentiation matrix D[i, j] = h_j'(x_i) for the Lagrange cardinals.

    Barycentric form; diagonal entries from the negative-sum trick so every
    row sums to zero to roundoff.
    """
    x = np.asarray(nodes, dtype=float)
    n = x.size
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    bary = 1.0 / np.prod(diff, axis=1)
    d = (bary[None, :] / bary[:, None]) / diff
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -np.sum(d, axis=1))
    return d


def legendre_vandermonde(nodes, order):
    """V[i, m] = P_m(nodes[i]) for m = 0..order."""
    x = np.asarray(nodes, dtype=float)
    v = np.empty((x.size, order + 1))
    v[:, 0] = 1.0
    if order >= 1:
        v[:, 1] = x
    for k in range(1, order):
        v[:, k + 1] = ((2 * k + 1) * x * v[:, k] - k * v[:, k - 1]) / (k + 1)
    return v


@dataclass(frozen=True)
class Basis1D:
    """GLL nodal basis of one polynomial order.

    Immutable after construction; instances are shared freely across the
    mesh, operator and solver layers (arrays are marked read-only).

    Attributes:
        order: polynomial degree N (N+1 nodes).
        nodes: ascending GLL nodes in [-1, 1], endpoints exact.
        weights: GLL quadrature weights, sum = 2.
        diff_matrix: D[i, j] = h_j'(nodes[i]).
        modal_matrix: Legendre Vandermonde, column m = P_m at the nodes.
        inv_modal_matrix: exact inverse of modal_matrix from the discrete
            Legendre orthogonality on GLL points.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray
    diff_matrix: np.ndarray
    modal_matrix: np.ndarray
    inv_modal_matrix: np.ndarray = field(repr=False, default=None)

    @property
    def n_nodes(self):
        return self.order + 1


def build_gll_basis(order):
    """Construct the GLL basis of the given polynomial degree.

    Raises ValueError for order < 1 or order > MAX_ORDER (higher orders run
    into Vandermonde conditioning that this desk-scale code does not chase).
    """
    if not isinstance(order, (int, np.integer)):
        raise ValueError(f"order must be an integer, got {order!r}")
    if order < 1:
        raise ValueError(f"invalid order {order}: need order >= 1")
    if order > MAX_ORDER:
        raise ValueError(f"invalid order {order}: maximum supported is {MAX_ORDER}")
    order = int(order)
    nodes, weights = gll_nodes_weights(order)
    dmat = lagrange_diff_matrix(nodes)
    vmat = legendre_vandermonde(nodes, order)
    # inverse transform via discrete orthogonality:
    #   sum_i w_i P_m(x_i) P_n(x_i) = gamma_m delta_mn  with
    #   gamma_m = 2/(2m+1) for m < N and gamma_N = 2/N.
    gamma = 2.0 / (2.0 * np.arange(order + 1) + 1.0)
    gamma[order] = 2.0 / order if order > 0 else 2.0
    vinv = (vmat * weights[:, None]).T / gamma[:, None]
    for arr in (nodes, weights, dmat, vmat, vinv):
        arr.setflags(write=False)
    return Basis1D(order, nodes, weights, dmat, vmat, vinv)


def quadrature(basis, samples):
    """GLL quadrature of an integrand sampled at the basis nodes.

    Exact (to roundoff) for polynomial integrands of degree <= 2N - 1.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (basis.n_nodes,):
        raise ValueError(
            f"expected {basis.n_nodes} samples, got shape {samples.shape}"
        )
    return float(basis.weights @ samples)


def differentiate(basis, samples):
    """Derivative of the nodal interpolant, evaluated at the nodes.

    Exact for polynomial samples of degree <= N.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (basis.n_nodes,):
        raise ValueError(
            f"expected {basis.n_nodes} samples, got shape {samples.shape}"
        )
    return basis.diff_matrix @ samples


def interpolation_matrix(basis, targets):
    """Matrix evaluating the Lagrange cardinals at the given targets.

    Row r holds h_j(targets[r]); rows sum to one (partition of unity).
    Targets must lie in [-1, 1].
    """
    t = np.atleast_1d(np.asarray(targets, dtype=float))
    if t.ndim != 1:
        raise ValueError("targets must be one-dimensional")
    if np.any(np.abs(t) > 1.0 + 1e-12):
        bad = t[np.abs(t) > 1.0 + 1e-12][0]
        raise ValueError(f"interpolation target {bad} outside [-1, 1]")
    x = basis.nodes
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    bary = 1.0 / np.prod(diff, axis=1)
    out = np.empty((t.size, x.size))
    for r, tr in enumerate(t):
        hit = np.nonzero(np.abs(tr - x) < 1e-14)[0]
        if hit.size:
            row = np.zeros(x.size)
            row[hit[0]] = 1.0
        else:
            c = bary / (tr - x)
            row = c / c.sum()
        out[r] = row
    return out


def filter_transfer(order, cutoff, strength):
    """Per-mode damping factors: quadratic ramp over the top `cutoff` modes.

    sigma_m = 1 for m <= N - cutoff and
    sigma_m = 1 - strength * ((m - (N - cutoff)) / cutoff)^2 above, so the
    highest mode is scaled by exactly 1 - strength.
    """
    n = order
    if not 1 <= cutoff <= n:
        raise ValueError(f"filter cutoff {cutoff} outside 1..{n}")
    if not 0.0 < strength <= 1.0:
        raise ValueError(f"filter strength {strength} outside (0, 1]")
    m = np.arange(n + 1, dtype=float)
    sigma = np.ones(n + 1)
    ramp = m > n - cutoff
    sigma[ramp] = 1.0 - strength * ((m[ramp] - (n - cutoff)) / cutoff) ** 2
    return sigma


def modal_filter_matrix(basis, cutoff, strength):
    """Nodal filter matrix F = V diag(sigma) V^-1.

    Leaves polynomials of degree <= N - cutoff unchanged; damps the top
    `cutoff` Legendre modes with the quadratic ramp of filter_transfer.
    """
    sigma = filter_transfer(basis.order, cutoff, strength)
    return (basis.modal_matrix * sigma[None, :]) @ basis.inv_modal_matrix
