"""Matrix-free tensor-product SEM operators on nodal fields.

A Discretization bundles mesh + basis with everything derived from them:
geometric factors, the gather-scatter map, the diagonal mass weights, the
packed metric contractions feeding the weak-Laplacian kernel, and the
over-integration context for dealiased convection. Operators are applied
element by element through the kernels backend (compiled or numpy) and made
continuous by direct stiffness summation; only 1-D matrices are ever stored.

Two entry levels:
  * Field-level functions (apply_mass, apply_stiffness, ...) keep values in
    per-element layout and dssum the result.
  * ``*_global`` methods on Discretization act on vectors of unique global
    nodes; these are the fast path used inside the CG loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from semkit import kernels
from semkit.basis import (
    Basis1D,
    build_gll_basis,
    interpolation_matrix,
    modal_filter_matrix,
)
from semkit.mesh import (
    DIRICHLET,
    Mesh,
    build_gather_scatter,
    compute_geometric_factors,
)


def _tensor_weights(weights, dim):
    w = weights
    if dim == 2:
        return np.multiply.outer(w, w)
    return np.multiply.outer(np.multiply.outer(w, w), w)


def face_slice(dim, axis, side):
    """Index tuple selecting the nodes of one reference face.

    Node axes are ordered [t, s, r] / [s, r] with r (= x direction) last;
    direction d lives on node axis dim-1-d.
    """
    idx = [slice(None)] * dim
    idx[dim - 1 - axis] = 0 if side == 0 else -1
    return tuple(idx)


class Discretization:
    """Mesh + basis and all per-node discrete geometry, immutable."""

    def __init__(self, mesh: Mesh, basis: Basis1D):
        if mesh.order is not None and mesh.order != basis.order:
            raise ValueError(
                f"mesh was built for order {mesh.order}, basis has {basis.order}"
            )
        self.mesh = mesh
        self.basis = basis
        self.dim = mesh.dim
        self.n1d = basis.n_nodes
        self.node_shape = (self.n1d,) * self.dim
        self.n_local = self.n1d**self.dim
        self.geom = compute_geometric_factors(mesh, basis)
        self.gs = build_gather_scatter(mesh, basis)
        self.n_global = self.gs.n_global

        wt = _tensor_weights(basis.weights, self.dim)
        self.mass_local = wt * self.geom.jac_det  # (E, *node_shape)
        self.mass_global = self.gs.gather_sum(self.mass_local)
        self.volume = float(self.mass_local.sum())

        # packed symmetric metric contraction G_ab = m * sum_c dxi_a/dx_c dxi_b/dx_c
        met = self.geom.metric
        pairs = [(0, 0), (0, 1), (1, 1)] if self.dim == 2 else [
            (0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
        g = np.stack(
            [self.mass_local * np.einsum("...c,...c->...", met[..., a, :], met[..., b, :])
             for a, b in pairs],
            axis=1,
        )
        self.stiff_factors = np.ascontiguousarray(g)
        self.dmat = np.ascontiguousarray(basis.diff_matrix)

        self._stiff_diag_global = None
        self._dealias = None
        self._spacing = None

    # ---- field construction -------------------------------------------------

    def field(self, fill=0.0):
        values = np.full((self.mesh.n_elements,) + self.node_shape, float(fill))
        return Field(self, values, assembled=True)

    def field_from_values(self, values, assembled=False):
        values = np.ascontiguousarray(values, dtype=float)
        expect = (self.mesh.n_elements,) + self.node_shape
        if values.shape != expect:
            raise ValueError(f"field values must have shape {expect}, got {values.shape}")
        return Field(self, values, assembled=assembled)

    def field_from_function(self, fn):
        """Sample fn(x, y[, z]) at the physical nodes (arrays in, array out)."""
        axes = tuple(self.geom.coords[..., d] for d in range(self.dim))
        return self.field_from_values(np.asarray(fn(*axes), dtype=float) +
                                      np.zeros_like(axes[0]), assembled=True)

    # ---- local/global transfer ----------------------------------------------

    def to_global(self, field_or_values, op="avg"):
        values = getattr(field_or_values, "values", field_or_values)
        if op == "avg":
            return self.gs.gather_avg(values)
        return self.gs.gather_sum(values)

    def from_global(self, vec):
        return Field(self, self.gs.scatter(vec).reshape(
            (self.mesh.n_elements,) + self.node_shape), assembled=True)

    def assemble_average(self, field):
        """Project to the continuous subspace by multiplicity averaging."""
        return self.from_global(self.to_global(field, op="avg"))

    # ---- inner products -------------------------------------------------------

    def inner(self, f1, f2):
        """Mass-weighted L2 inner product by elementwise GLL quadrature."""
        v1 = getattr(f1, "values", f1)
        v2 = getattr(f2, "values", f2)
        return float(np.sum(self.mass_local * v1 * v2))

    def norm(self, f):
        return math.sqrt(max(self.inner(f, f), 0.0))

    def mean(self, f):
        v = getattr(f, "values", f)
        return float(np.sum(self.mass_local * v)) / self.volume

    # ---- global-vector operators (CG fast path) -------------------------------

    def _local_grad_ref(self, values):
        if self.dim == 2:
            return kernels.grad_ref_2d(self.dmat, values)
        return kernels.grad_ref_3d(self.dmat, values)

    def _local_stiffness(self, values):
        if self.dim == 2:
            return kernels.stiffness_2d(self.dmat, self.stiff_factors, values)
        return kernels.stiffness_3d(self.dmat, self.stiff_factors, values)

    def apply_stiffness_global(self, x):
        local = self.gs.scatter(x).reshape((self.mesh.n_elements,) + self.node_shape)
        return self.gs.gather_sum(self._local_stiffness(local))

    def apply_mass_global(self, x):
        return self.mass_global * x

    def stiffness_diag_global(self):
        """Assembled diagonal of the weak Laplacian (for Jacobi/PCG)."""
        if self._stiff_diag_global is None:
            d2 = self.dmat**2
            g = self.stiff_factors
            dd = np.diag(self.dmat)
            if self.dim == 2:
                diag = np.einsum("pi,ejp->eji", d2, g[:, 0])
                diag += np.einsum("pj,epi->eji", d2, g[:, 2])
                diag += 2.0 * g[:, 1] * dd[None, None, :] * dd[None, :, None]
            else:
                diag = np.einsum("pi,ekjp->ekji", d2, g[:, 0])
                diag += np.einsum("pj,ekpi->ekji", d2, g[:, 3])
                diag += np.einsum("pk,epji->ekji", d2, g[:, 5])
                di = dd[None, None, None, :]
                dj = dd[None, None, :, None]
                dk = dd[None, :, None, None]
                diag += 2.0 * (g[:, 1] * di * dj + g[:, 2] * di * dk
                               + g[:, 4] * dj * dk)
            self._stiff_diag_global = self.gs.gather_sum(diag)
        return self._stiff_diag_global

    # ---- boundary bookkeeping -------------------------------------------------

    def boundary_node_mask(self, tags=(DIRICHLET,), sides=None):
        """Boolean mask over global nodes lying on matching boundary faces."""
        mask_local = np.zeros((self.mesh.n_elements,) + self.node_shape, dtype=bool)
        for e in range(self.mesh.n_elements):
            for f in range(2 * self.dim):
                t = self.mesh.boundary_tags[e, f]
                if t in tags and (sides is None or f in sides):
                    mask_local[(e,) + face_slice(self.dim, f // 2, f % 2)] = True
        return self.gs.gather_sum(mask_local.astype(float)) > 0.5

    def surface_flux_local(self, g_values, sides=None, tags=(DIRICHLET,)):
        """Local dual contribution of the surface integral of phi * (n . g).

        g_values: list of dim per-element arrays (vector field samples).
        Returns an unassembled local array; gather_sum it into a RHS.
        """
        w = self.basis.weights
        out = np.zeros((self.mesh.n_elements,) + self.node_shape)
        met = self.geom.metric
        det = self.geom.jac_det
        for e in range(self.mesh.n_elements):
            for f in range(2 * self.dim):
                t = self.mesh.boundary_tags[e, f]
                if t not in tags or (sides is not None and f not in sides):
                    continue
                axis, side = f // 2, f % 2
                sgn = 1.0 if side == 1 else -1.0
                sl = (e,) + face_slice(self.dim, axis, side)
                ndotg = sum(met[sl + (axis, c)] * g_values[c][sl]
                            for c in range(self.dim))
                wt = 1.0
                for d in range(self.dim):
                    if d == axis:
                        continue
                    shape = [1] * (self.dim - 1)
                    # node axes of the face keep their relative order
                    face_axes = [a for a in range(self.dim) if a != dim_axis(self.dim, axis)]
                    pos = face_axes.index(dim_axis(self.dim, d))
                    shape[pos] = self.n1d
                    wt = wt * w.reshape(shape)
                out[sl] += sgn * det[sl] * ndotg * wt
        return out

    # ---- dealiasing context -----------------------------------------------------

    def dealias_context(self):
        if self._dealias is None:
            n_oi = math.ceil(3 * self.n1d / 2)
            pts, wts = np.polynomial.legendre.leggauss(n_oi)
            interp = np.ascontiguousarray(interpolation_matrix(self.basis, pts))
            geom = compute_geometric_factors(self.mesh, [pts] * self.dim)
            wt = _tensor_weights(wts, self.dim) * geom.jac_det
            self._dealias = {
                "interp": interp,
                "interp_t": np.ascontiguousarray(interp.T),
                "weights": wt,
            }
        return self._dealias

    def interp_to_quad(self, values):
        ctx = self.dealias_context()
        j = ctx["interp"]
        if self.dim == 2:
            return kernels.tensor2(j, j, values)
        return kernels.tensor3(j, j, j, values)

    def project_from_quad(self, quad_values):
        """L2-project quadrature-grid samples back to nodal, assembled."""
        ctx = self.dealias_context()
        jt = ctx["interp_t"]
        weighted = ctx["weights"] * quad_values
        if self.dim == 2:
            rhs = kernels.tensor2(jt, jt, weighted)
        else:
            rhs = kernels.tensor3(jt, jt, jt, weighted)
        return self.from_global(self.gs.gather_sum(rhs) / self.mass_global)

    # ---- nodal spacing (CFL) ------------------------------------------------------

    def node_spacing(self):
        """Per-direction local node spacing, conservative (min adjacent gap)."""
        if self._spacing is None:
            out = []
            for d in range(self.dim):
                ax = 1 + (self.dim - 1 - d)
                gaps = np.linalg.norm(
                    np.diff(self.geom.coords, axis=ax), axis=-1)
                lo = np.concatenate([gaps.take([0], axis=ax), gaps], axis=ax)
                hi = np.concatenate([gaps, gaps.take([-1], axis=ax)], axis=ax)
                out.append(np.minimum(lo, hi))
            self._spacing = out
        return self._spacing


def dim_axis(dim, direction):
    """Node-array axis (excluding the element axis) of a space direction."""
    return dim - 1 - direction


@dataclass
class Field:
    """Per-element nodal coefficients of one scalar unknown."""

    space: Discretization
    values: np.ndarray
    assembled: bool = False

    def copy(self):
        return Field(self.space, self.values.copy(), self.assembled)


def _check_same_space(*fields):
    sp = fields[0].space
    for f in fields[1:]:
        if f.space is not sp:
            raise ValueError("fields live on different discretizations")
    return sp


def apply_mass(field):
    """Diagonal mass: pointwise quadrature weights, then dssum.

    The returned values are the assembled dual vector scattered back to
    every local copy.
    """
    sp = field.space
    return Field(sp, sp.gs.dssum(sp.mass_local * field.values).reshape(
        field.values.shape), assembled=True)


def apply_stiffness(field):
    """Weak Laplacian A with (A u, v) = int grad u . grad v, assembled."""
    sp = field.space
    local = sp._local_stiffness(np.ascontiguousarray(field.values))
    return Field(sp, sp.gs.dssum(local).reshape(field.values.shape),
                 assembled=True)


def apply_gradient(field):
    """Pointwise physical gradient (chain rule), one Field per direction.

    Values are elementwise collocation derivatives; they are not averaged
    across element faces (assembled=False).
    """
    sp = field.space
    refs = sp._local_grad_ref(np.ascontiguousarray(field.values))
    met = sp.geom.metric
    out = []
    for d in range(sp.dim):
        phys = sum(met[..., a, d] * refs[a] for a in range(sp.dim))
        out.append(Field(sp, phys, assembled=False))
    return tuple(out)


def apply_divergence(fields):
    """Pointwise divergence of a vector of Fields (adjoint of -gradient)."""
    sp = _check_same_space(*fields)
    div = np.zeros_like(fields[0].values)
    for d, f in enumerate(fields):
        refs = sp._local_grad_ref(np.ascontiguousarray(f.values))
        met = sp.geom.metric
        div += sum(met[..., a, d] * refs[a] for a in range(sp.dim))
    return Field(sp, div, assembled=False)


def weak_gradient_transpose(fields):
    """Assembled dual vector of (grad phi, F) for a vector field F.

    Equals -(phi, div F) plus the boundary flux, evaluated exactly by the
    same quadrature as the stiffness operator.
    """
    sp = _check_same_space(*fields)
    met = sp.geom.metric
    d = sp.dmat
    out = None
    for a in range(sp.dim):
        t = sp.mass_local * sum(met[..., a, c] * fields[c].values
                                for c in range(sp.dim))
        if sp.dim == 2:
            swept = np.matmul(t, d) if a == 0 else np.matmul(d.T, t)
        else:
            if a == 0:
                swept = np.matmul(t, d)
            elif a == 1:
                swept = np.einsum("qj,ekqi->ekji", d, t, optimize=True)
            else:
                swept = np.einsum("qk,eqji->ekji", d, t, optimize=True)
        out = swept if out is None else out + swept
    return Field(sp, sp.gs.dssum(out).reshape(out.shape), assembled=True)


def apply_convection(velocity, field, dealias=True):
    """Convective derivative (u . grad) field.

    With dealias on, velocity and gradient samples are interpolated to a
    Gauss grid of ceil(3(N+1)/2) points per direction, multiplied there,
    and L2-projected back (assembled). Without, the product is collocated
    on the GLL grid (unassembled).
    """
    sp = _check_same_space(*velocity, field)
    grads = apply_gradient(field)
    if not dealias:
        conv = sum(velocity[d].values * grads[d].values for d in range(sp.dim))
        return Field(sp, conv, assembled=False)
    acc = None
    for d in range(sp.dim):
        u_q = sp.interp_to_quad(np.ascontiguousarray(velocity[d].values))
        g_q = sp.interp_to_quad(np.ascontiguousarray(grads[d].values))
        acc = u_q * g_q if acc is None else acc + u_q * g_q
    return sp.project_from_quad(acc)


def apply_filter(field, cutoff, strength):
    """Modal low-pass filter applied per direction, then re-averaged."""
    sp = field.space
    f = np.ascontiguousarray(modal_filter_matrix(sp.basis, cutoff, strength))
    vals = np.ascontiguousarray(field.values)
    if sp.dim == 2:
        filtered = kernels.tensor2(f, f, vals)
    else:
        filtered = kernels.tensor3(f, f, f, vals)
    return sp.assemble_average(Field(sp, filtered))


def build_discretization(mesh, order=None):
    """Convenience: build the GLL basis (mesh.order unless overridden)."""
    n = order if order is not None else mesh.order
    if n is None:
        raise ValueError("polynomial order not set on mesh; pass order=")
    return Discretization(mesh, build_gll_basis(n))
