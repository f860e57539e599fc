"""semkit: desk-scale spectral element flow solver and snapshot-POD toolkit.

Subpackages/modules:
    basis      - 1-D GLL nodes, weights, differentiation, modal transforms
    mesh       - structured quad/hex meshes, geometric factors, gather-scatter
    operators  - matrix-free tensor-product SEM operators on nodal fields
    kernels    - hot inner kernels (compiled extension with numpy fallback)
    solver     - BDF/EXT splitting time stepper with PCG linear solves
    pod        - snapshot proper orthogonal decomposition and time series stats
    cases      - built-in benchmark flows (Taylor-Green, Kovasznay, ...)
    config     - run configuration files
    io         - snapshot file format and CSV writers
    cli        - batch front-end (run / pod / stats / convergence)
"""

from semkit.basis import Basis1D, build_gll_basis

__version__ = "0.1.0"

__all__ = ["Basis1D", "build_gll_basis", "__version__"]
