"""Structured multi-element quad/hex meshes and their discrete geometry.

Meshes are tensor-product boxes of bilinear (2-D) or trilinear (3-D)
elements, optionally graded geometrically toward the low wall of an axis
and optionally periodic per axis. Geometric factors (Jacobians, inverse
metric terms, nodal coordinates) are evaluated at arbitrary tensor point
sets so the same code serves the GLL grid and over-integration grids.
The gather-scatter map identifies coincident nodes (tolerance 1e-8, after
periodic wrapping) for direct stiffness summation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from semkit.basis import Basis1D

COINCIDENCE_TOL = 1e-8

DIRICHLET = "dirichlet"
NEUMANN = "neumann"
PERIODIC = "periodic"


class MeshError(ValueError):
    """Raised for invalid mesh construction or inverted elements."""


@dataclass(frozen=True)
class Mesh:
    """Tensor-product box mesh.

    Attributes:
        dim: 2 or 3.
        corners: (nelem, 2, 2[, 2], dim) corner coordinates in tensor order
            (last corner axis is x-fastest, matching node storage).
        boundary_tags: (nelem, 2*dim) object array; entry f = 2*axis + side
            is None on interior faces, "dirichlet"/"neumann" on boundary
            faces, or ("periodic", partner_element, partner_face).
        counts: elements per axis.
        bounds: (dim, 2) lo/hi per axis.
        periodic: per-axis periodicity flags.
        breakpoints: per-axis element edge coordinates (len counts[d]+1).
        order: polynomial degree the mesh is intended to run at (metadata;
            operators take the basis explicitly).
    """

    dim: int
    corners: np.ndarray
    boundary_tags: np.ndarray
    counts: tuple
    bounds: np.ndarray
    periodic: tuple
    breakpoints: tuple = field(repr=False, default=None)
    order: int = None

    @property
    def n_elements(self):
        return self.corners.shape[0]

    def element_index(self, *grid_idx):
        """Flat element id from per-axis indices (x-fastest ordering)."""
        e = 0
        for d in range(self.dim - 1, -1, -1):
            e = e * self.counts[d] + grid_idx[d]
        return e

    def boundary_faces(self, tag=None):
        """Yield (element, face) pairs whose tag matches (or any non-None)."""
        for e in range(self.n_elements):
            for f in range(2 * self.dim):
                t = self.boundary_tags[e, f]
                if t is None:
                    continue
                if tag is None or t == tag or (isinstance(t, tuple) and t[0] == tag):
                    yield e, f


def _axis_breakpoints(count, lo, hi, ratio):
    """Element edges on one axis; widths shrink toward lo by `ratio`."""
    if ratio is None or ratio == 1.0:
        return np.linspace(lo, hi, count + 1)
    if ratio <= 0:
        raise MeshError(f"grading ratio must be positive, got {ratio}")
    # widths {1, r, r^2, ...} counted from the high wall: each step toward
    # the low wall multiplies the width by `ratio`
    widths = ratio ** np.arange(count - 1, -1, -1, dtype=float)
    widths *= (hi - lo) / widths.sum()
    pts = np.empty(count + 1)
    pts[0] = lo
    np.cumsum(widths, out=pts[1:])
    pts[1:] += lo
    pts[-1] = hi
    return pts


def build_box_mesh(dim, counts, bounds, periodic=None, grading=None,
                   side_tags=None, order=None):
    """Structured box mesh of `counts` elements per axis.

    bounds is a per-axis sequence of (lo, hi). Non-periodic boundary faces
    default to Dirichlet; side_tags may override individual box sides
    (key 2*axis + side with side 0=low, 1=high) to "neumann"/"dirichlet".
    Grading, when given per axis, makes element widths follow a geometric
    progression toward the low wall (ratio < 1 refines at the low wall).
    """
    if dim not in (2, 3):
        raise MeshError(f"dim must be 2 or 3, got {dim}")
    counts = tuple(int(c) for c in counts)
    if len(counts) != dim or any(c < 1 for c in counts):
        raise MeshError(f"need {dim} positive element counts, got {counts}")
    bounds = np.asarray(bounds, dtype=float).reshape(dim, 2)
    if np.any(bounds[:, 1] <= bounds[:, 0]):
        raise MeshError("degenerate bounds: need lo < hi on every axis")
    periodic = tuple(bool(p) for p in periodic) if periodic else (False,) * dim
    if grading is None:
        grading = (1.0,) * dim
    grading = tuple(float(g) for g in grading)
    side_tags = dict(side_tags or {})
    for s, t in side_tags.items():
        if t not in (DIRICHLET, NEUMANN):
            raise MeshError(f"side {s}: unknown boundary tag {t!r}")

    brk = tuple(
        _axis_breakpoints(counts[d], bounds[d, 0], bounds[d, 1], grading[d])
        for d in range(dim)
    )

    nelem = int(np.prod(counts))
    corners = np.empty((nelem,) + (2,) * dim + (dim,))
    tags = np.empty((nelem, 2 * dim), dtype=object)
    tags[:] = None

    for e in range(nelem):
        rem, gidx = e, []
        for d in range(dim):
            gidx.append(rem % counts[d])
            rem //= counts[d]
        # corner tensor: index (cz, cy, cx) -> coordinates
        for c in np.ndindex(*(2,) * dim):
            # c is ordered like the node axes: (cy, cx) in 2-D, (cz, cy, cx)
            for d in range(dim):
                cd = c[dim - 1 - d]  # x-component varies along the last axis
                corners[(e,) + c + (d,)] = brk[d][gidx[d] + cd]
        for d in range(dim):
            for side in (0, 1):
                at_boundary = gidx[d] == (0 if side == 0 else counts[d] - 1)
                if not at_boundary:
                    continue
                face = 2 * d + side
                if periodic[d]:
                    partner_gidx = list(gidx)
                    partner_gidx[d] = counts[d] - 1 if side == 0 else 0
                    pe = 0
                    for dd in range(dim - 1, -1, -1):
                        pe = pe * counts[dd] + partner_gidx[dd]
                    tags[e, face] = (PERIODIC, pe, 2 * d + (1 - side))
                else:
                    tags[e, face] = side_tags.get(face, DIRICHLET)

    corners.setflags(write=False)
    bounds.setflags(write=False)
    return Mesh(dim, corners, tags, counts, bounds, periodic, brk, order)


@dataclass(frozen=True)
class GeometricFactors:
    """Per-element, per-node discrete geometry.

    coords[e, ..., d] are physical node positions; jac_det[e, ...] the
    (positive) Jacobian determinants; metric[e, ..., a, b] = d(xi_a)/d(x_b).
    Node axes are ordered [t, s, r] / [s, r] with r the x-fastest direction.
    """

    coords: np.ndarray
    jac_det: np.ndarray
    metric: np.ndarray


def _shape_pair(pts):
    """Linear shape functions and derivatives at 1-D points: (n, 2) each."""
    pts = np.asarray(pts, dtype=float)
    phi = np.stack([(1.0 - pts) / 2.0, (1.0 + pts) / 2.0], axis=1)
    dphi = np.broadcast_to(np.array([-0.5, 0.5]), (pts.size, 2)).copy()
    return phi, dphi


def compute_geometric_factors(mesh, basis_or_nodes):
    """Evaluate coordinates, Jacobians and metric terms on a tensor grid.

    `basis_or_nodes` is a Basis1D (its nodes are used on every axis) or a
    sequence of per-axis 1-D reference points. Raises MeshError naming the
    first element with a non-positive Jacobian.
    """
    if isinstance(basis_or_nodes, Basis1D):
        axis_pts = [basis_or_nodes.nodes] * mesh.dim
    else:
        axis_pts = [np.asarray(p, dtype=float) for p in basis_or_nodes]

    dim = mesh.dim
    shapes = [_shape_pair(axis_pts[d]) for d in range(dim)]

    def tensor_eval(use_deriv):
        # use_deriv[d] selects dphi for reference direction d (0 = x-dir)
        factors = [shapes[d][1] if use_deriv[d] else shapes[d][0]
                   for d in range(dim)]
        if dim == 2:
            return np.einsum("jq,ip,eqpd->ejid",
                             factors[1], factors[0], mesh.corners)
        return np.einsum("kr,jq,ip,erqpd->ekjid",
                         factors[2], factors[1], factors[0], mesh.corners)

    coords = tensor_eval([False] * dim)
    jac_cols = []
    for d in range(dim):
        use = [False] * dim
        use[d] = True
        jac_cols.append(tensor_eval(use))
    # jac[..., a, b] = d x_a / d xi_b
    jac = np.stack(jac_cols, axis=-1)
    jac_det = np.linalg.det(jac)
    bad = np.nonzero(np.any(jac_det.reshape(mesh.n_elements, -1) <= 0, axis=1))[0]
    if bad.size:
        raise MeshError(f"element {bad[0]} has a non-positive Jacobian")
    inv = np.linalg.inv(jac)  # inv[..., b, a] = d xi_b / d x_a
    for arr in (coords, jac_det, inv):
        arr.setflags(write=False)
    return GeometricFactors(coords, jac_det, inv)


@dataclass(frozen=True)
class GatherScatter:
    """Map between per-element local nodes and unique global nodes.

    global_ids is (nelem, n_local) int64; multiplicity counts local copies
    per global id. gather_sum uses a fixed reduction order (bincount), so
    assembled results are reproducible run to run.
    """

    global_ids: np.ndarray
    multiplicity: np.ndarray

    @property
    def n_global(self):
        return self.multiplicity.size

    def gather_sum(self, local):
        flat = np.ascontiguousarray(local).reshape(-1)
        return np.bincount(self.global_ids.reshape(-1), weights=flat,
                           minlength=self.n_global)

    def gather_avg(self, local):
        return self.gather_sum(local) / self.multiplicity

    def scatter(self, global_values):
        return np.asarray(global_values)[self.global_ids]

    def dssum(self, local):
        """Direct stiffness summation: sum coincident copies, redistribute."""
        return self.scatter(self.gather_sum(local))


def build_gather_scatter(mesh, basis):
    """Identify coincident nodes (periodic images included) into global ids."""
    geom = compute_geometric_factors(mesh, basis)
    coords = geom.coords.reshape(-1, mesh.dim).copy()
    for d in range(mesh.dim):
        if mesh.periodic[d]:
            lo, hi = mesh.bounds[d]
            span = hi - lo
            coords[:, d] = lo + np.mod(coords[:, d] - lo, span)
    keys = np.round(coords / COINCIDENCE_TOL).astype(np.int64)
    _, inverse = np.unique(keys, axis=0, return_inverse=True)
    n_local = basis.n_nodes ** mesh.dim
    global_ids = inverse.reshape(mesh.n_elements, n_local).astype(np.int64)
    multiplicity = np.bincount(global_ids.reshape(-1))
    global_ids.setflags(write=False)
    multiplicity.setflags(write=False)
    return GatherScatter(global_ids, multiplicity)


def axis_node_ladder(mesh, basis, axis):
    """All distinct 1-D node coordinates along one axis, ascending."""
    brk = mesh.breakpoints[axis]
    ref = (basis.nodes + 1.0) / 2.0
    pts = [brk[i] + ref * (brk[i + 1] - brk[i]) for i in range(len(brk) - 1)]
    ladder = np.unique(np.concatenate(pts))
    return ladder


def yplus_spacing_report(mesh, basis, friction_velocity, viscosity):
    """Wall-resolution check in viscous units for every Dirichlet box side.

    For each wall, reports y+ of the first off-wall GLL point and the number
    of off-wall points with y+ < 10, and flags the combined criterion
    (first point below 1, at least five points below 10). Returns a list of
    dicts; empty when no Dirichlet sides exist.
    """
    if friction_velocity <= 0 or viscosity <= 0:
        raise ValueError("friction_velocity and viscosity must be positive")
    scale = friction_velocity / viscosity
    walls = set()
    for e in range(mesh.n_elements):
        for f in range(2 * mesh.dim):
            if mesh.boundary_tags[e, f] == DIRICHLET:
                walls.add(f)
    report = []
    for f in sorted(walls):
        axis, side = f // 2, f % 2
        ladder = axis_node_ladder(mesh, basis, axis)
        wall_pos = mesh.bounds[axis, side]
        dist = np.sort(np.abs(ladder - wall_pos))
        off_wall = dist[dist > 0]
        yplus = off_wall * scale
        first = float(yplus[0])
        below = int(np.count_nonzero(yplus < 10.0))
        first_ok = first < 1.0
        count_ok = below >= 5
        report.append({
            "side": f,
            "axis": axis,
            "location": float(wall_pos),
            "first_yplus": first,
            "points_below_10": below,
            "first_point_ok": first_ok,
            "count_ok": count_ok,
            "passed": first_ok and count_ok,
        })
    return report
