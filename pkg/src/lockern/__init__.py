"""lockern: localized polynomial kernel approximation.

Filtered polynomial projections on tori and spheres, scattered-data
quadrature, optimization-free regression on point-cloud manifolds, zonal
|t|^(2g+1) network synthesis, and support-based active classification,
with a reproducible experiment CLI.
"""

__version__ = "0.1.0"

from .backend import backend_name
from .filters import QUINTIC, SHARP, SMOOTH_BUMP, FilterSpec, derived_mask, eval_filter, get_filter
from .manifold import AmbientLabeledCloud, ManifoldEstimator
from .masc import MascConfig, MetricCloud, masc_pipeline, psi_kernel, support_estimate
from .quadrature import PointCloud, QuadratureRule, separation_stats, solve_weights
from .sphere import SphericalKernel, gauss_jacobi, harmonic_basis, kernel_build, volume_omega
from .sphere_methods import ApproxModel, benchmark_table2, error_table, fit
from .torus import FourierExpansion, TorusSamples, grid_coeffs, kernel_phi, monte_carlo_sigma, sigma_n, tau_j, wavelet_expand
from .zonal import ZonalMask, ZonalNetwork, mask_build, synthesize

__all__ = [
    "__version__", "backend_name",
    "FilterSpec", "QUINTIC", "SHARP", "SMOOTH_BUMP", "eval_filter", "derived_mask", "get_filter",
    "TorusSamples", "FourierExpansion", "grid_coeffs", "kernel_phi", "sigma_n",
    "monte_carlo_sigma", "tau_j", "wavelet_expand",
    "volume_omega", "gauss_jacobi", "kernel_build", "SphericalKernel", "harmonic_basis",
    "PointCloud", "QuadratureRule", "solve_weights", "separation_stats",
    "ApproxModel", "fit", "error_table", "benchmark_table2",
    "AmbientLabeledCloud", "ManifoldEstimator",
    "ZonalMask", "ZonalNetwork", "mask_build", "synthesize",
    "MetricCloud", "MascConfig", "psi_kernel", "support_estimate", "masc_pipeline",
]
