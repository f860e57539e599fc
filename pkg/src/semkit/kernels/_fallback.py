"""Pure-numpy tensor-product kernels.

Reference implementation of the hot inner loops: reference-space gradients
and the factored weak-Laplacian sweep. Used when the compiled extension is
unavailable (or forced off); the compiled backend must match these results
to roundoff.

Array layout: fields are (nelem, n, n) in 2-D with the last axis the fastest
reference direction r, and (nelem, n, n, n) in 3-D ordered [e, t, s, r].
Packed stiffness factors G hold the upper triangle of the symmetric metric
contraction: [rr, rs, ss] in 2-D and [rr, rs, rt, ss, st, tt] in 3-D.
"""

import numpy as np

BACKEND = "python"


def grad_ref_2d(d, u):
    """Reference-space derivatives (du/dr, du/ds) per element."""
    ur = np.matmul(u, d.T)
    us = np.matmul(d, u)
    return ur, us


def grad_ref_3d(d, u):
    ur = np.matmul(u, d.T)
    us = np.einsum("jq,ekqi->ekji", d, u, optimize=True)
    ut = np.einsum("kq,eqji->ekji", d, u, optimize=True)
    return ur, us, ut


def stiffness_2d(d, g, u):
    """Weak Laplacian sweep: sum_a D_a^T (G_ab D_b u), unassembled."""
    ur, us = grad_ref_2d(d, u)
    fr = g[:, 0] * ur + g[:, 1] * us
    fs = g[:, 1] * ur + g[:, 2] * us
    return np.matmul(fr, d) + np.matmul(d.T, fs)


def stiffness_3d(d, g, u):
    ur, us, ut = grad_ref_3d(d, u)
    fr = g[:, 0] * ur + g[:, 1] * us + g[:, 2] * ut
    fs = g[:, 1] * ur + g[:, 3] * us + g[:, 4] * ut
    ft = g[:, 2] * ur + g[:, 4] * us + g[:, 5] * ut
    out = np.matmul(fr, d)
    out += np.einsum("qj,ekqi->ekji", d, fs, optimize=True)
    out += np.einsum("qk,eqji->ekji", d, ft, optimize=True)
    return out


def tensor2(ax, ay, u):
    """Apply the tensor product (Ay x Ax) elementwise: out[e] = Ay @ u[e] @ Ax^T.

    Rectangular factors allowed (interpolation to a finer grid).
    """
    return np.matmul(np.matmul(ay, u), ax.T)


def tensor3(ax, ay, az, u):
    t = np.einsum("kq,eqji->ekji", az, u, optimize=True)
    t = np.einsum("jq,ekqi->ekji", ay, t, optimize=True)
    return np.matmul(t, ax.T)
