"""Regression and density estimation on an unknown submanifold of a sphere.

Given labeled points on (or near) a q-dimensional submanifold of the ambient
sphere S^Q, the estimator is a plain kernel average

    F_n(x) = (1/M) sum_j y_j K_{n,q}(x . x_j),

where K_{n,q} is the q-dimensional localized kernel applied to ambient inner
products.  Nothing about the manifold beyond its dimension q enters the
construction: no charts, no graph Laplacian, no eigenbasis.  With constant
labels the same average estimates the sampling density.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .filters import FilterSpec
from .sphere import kernel_build


class OutOfSupportError(ValueError):
    """Ratio normalization was requested at points far from the data."""


@dataclass(frozen=True)
class AmbientLabeledCloud:
    """Labeled unit vectors in R^(Q+1); q is the only manifold knowledge."""
    ambient_dim: int          # Q: points live on S^Q
    manifold_dim: int         # q: assumed intrinsic dimension
    points: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.shape[1] != self.ambient_dim + 1:
            raise ValueError("points must be vectors in R^(Q+1)")
        nrm = np.linalg.norm(pts, axis=1)
        if np.any(np.abs(nrm - 1.0) > 1e-9):
            raise ValueError("points must be unit vectors")
        if not (1 <= self.manifold_dim <= self.ambient_dim):
            raise ValueError("need 1 <= q <= Q")
        vals = np.asarray(self.values, dtype=float)
        if vals.shape[0] != pts.shape[0]:
            raise ValueError("labels must match points")
        object.__setattr__(self, "points", np.ascontiguousarray(pts / nrm[:, None]))
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True)
class ManifoldEstimator:
    cloud: AmbientLabeledCloud
    n: float
    filter: FilterSpec
    normalization: str = "raw"     # raw | ratio

    def __post_init__(self):
        if self.normalization not in ("raw", "ratio"):
            raise ValueError("normalization must be raw or ratio")
        if len(self.cloud) == 0:
            raise ValueError("estimator needs at least one sample")
        if self.n < 1:
            raise ValueError("kernel degree must be >= 1")

    def evaluate(self, x, on_empty="raise"):
        """F_n at ambient unit vectors x (single vector or array).

        Ratio mode divides by sum_j K(x . x_j); where that sum is below
        1e-10 the probe is outside the estimator's reach and either raises
        OutOfSupportError or yields NaN (on_empty="nan").
        """
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 1
        probes = np.atleast_2d(x)
        kern = kernel_build(self.cloud.manifold_dim, self.n, self.filter)
        M = len(self.cloud)
        num = kern.weighted_sum(probes, self.cloud.points, self.cloud.values) / M
        if self.normalization == "raw":
            return float(num[0]) if scalar else num
        den = kern.weighted_sum(probes, self.cloud.points, np.ones(M))
        bad = np.abs(den) < 1e-10
        if bad.any():
            if on_empty == "raise":
                raise OutOfSupportError(
                    f"{int(bad.sum())} probe(s) have vanishing kernel mass")
            den = np.where(bad, np.nan, den)
        out = M * num / den
        return float(out[0]) if scalar else out


def sample_budget(n, q, gamma, delta=0.1, const=4.0):
    """Sample schedule M(n) = ceil(const * n^(q + 2 gamma) * ln(n / delta))."""
    return int(math.ceil(const * n ** (q + 2.0 * gamma) * math.log(n / delta)))


def rate_experiment(sampler, truth_fn, manifold_dim, ambient_dim, gamma_hint,
                    n_grid, seed, probes, filt, noise_sigma=0.0, const=4.0):
    """Sup-error of the raw estimator along a degree grid with the matched
    sample schedule; returns per-degree rows and the fitted log-log slope.

    sampler(rng, M) must return M points on the manifold as ambient unit
    vectors; truth_fn maps points to labels.
    """
    rng = np.random.default_rng(seed)
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    truth = truth_fn(probes)
    rows = []
    for n in n_grid:
        M = sample_budget(n, manifold_dim, gamma_hint, const=const)
        pts = sampler(rng, M)
        y = truth_fn(pts)
        if noise_sigma > 0:
            y = y + rng.normal(0.0, noise_sigma, size=M)
        est = ManifoldEstimator(
            AmbientLabeledCloud(ambient_dim, manifold_dim, pts, y), n, filt)
        err = float(np.abs(est.evaluate(probes) - truth).max())
        rows.append({"n": int(n), "M": int(M), "sup_error": err})
    ns = np.array([r["n"] for r in rows], dtype=float)
    errs = np.array([r["sup_error"] for r in rows])
    slope = float(np.polyfit(np.log2(ns), np.log2(np.maximum(errs, 1e-300)), 1)[0])
    return {"rows": rows, "loglog_slope": slope}
