"""Quadrature rules on scattered point clouds.

Weights are the minimal-norm solution of the moment system

    sum_j w_j phi_i(x_j) = integral of phi_i d(mu*)        for all phi_i

over an order-n test space (trigonometric on the torus, spherical harmonics
on S^2).  Small systems go through dense normal equations with iterative
refinement; large ones through conjugate gradients on the Gram operator,
which is applied without materializing the design matrix.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import backend
from .backend import kernels
from .sphere import harmonic_basis, product_rule


class QuadratureError(RuntimeError):
    """Raised when a weight construction fails its residual contract."""


@dataclass(frozen=True)
class PointCloud:
    """Scattered nodes on either torus_q or sphere_q (q = 2 for spheres)."""
    domain: str            # "torus" or "sphere"
    q: int
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.domain == "sphere":
            nrm = np.linalg.norm(pts, axis=1)
            if np.any(np.abs(nrm - 1.0) > 1e-9):
                raise ValueError("sphere points must be unit vectors")
            pts = pts / nrm[:, None]
            if pts.shape[1] != self.q + 1:
                raise ValueError("sphere_q points live in R^(q+1)")
        elif self.domain == "torus":
            pts = np.mod(pts, 2.0 * np.pi)
            if pts.shape[1] != self.q:
                raise ValueError("torus_q points need q coordinates")
        else:
            raise ValueError(f"unknown domain {self.domain!r}")
        object.__setattr__(self, "points", np.ascontiguousarray(pts))

    def __len__(self):
        return self.points.shape[0]

    @property
    def metric_code(self):
        return backend.METRIC_SPHERE if self.domain == "sphere" else backend.METRIC_TORUS


def parse_domain(text):
    """'sphere2' / 'sphere_2' / 'torus1' ... -> (domain, q)."""
    t = text.strip().lower().replace("_", "")
    for name in ("sphere", "torus"):
        if t.startswith(name):
            return name, int(t[len(name):])
    raise ValueError(f"cannot parse domain {text!r}")


@dataclass(frozen=True)
class SeparationStats:
    mesh_norm: float        # fill distance, estimated over a dense probe set
    min_separation: float   # exact smallest pairwise distance


def _domain_probes(cloud, count, rng):
    if cloud.domain == "sphere":
        p = rng.normal(size=(count, cloud.q + 1))
        return p / np.linalg.norm(p, axis=1, keepdims=True)
    return rng.uniform(0.0, 2.0 * np.pi, size=(count, cloud.q))


def separation_stats(cloud, probe_factor=50, seed=0):
    """Minimal separation (exact) and mesh norm (probe estimate).

    The mesh norm is a covering quantity; it is estimated as the largest
    probe-to-cloud distance over probe_factor * len(cloud) seeded uniform
    probes, so the estimate is a lower bound that is sharp for dense probes.
    """
    if len(cloud) < 2:
        raise ValueError("separation stats need at least 2 points")
    eta = float(kernels.min_pairwise(cloud.points, cloud.metric_code))
    rng = np.random.default_rng(seed)
    probes = np.ascontiguousarray(_domain_probes(cloud, probe_factor * len(cloud), rng))
    d = np.empty(probes.shape[0])
    kernels.nearest_dists(probes, cloud.points, cloud.metric_code, d)
    return SeparationStats(mesh_norm=float(d.max()), min_separation=eta)


def prune_cloud(cloud, r):
    """Greedy maximal r-separated subset, keeping earlier points first."""
    pts = cloud.points
    kept = [0]
    code = cloud.metric_code
    for i in range(1, len(cloud)):
        sub = pts[kept]
        d = np.empty(1)
        kernels.nearest_dists(np.ascontiguousarray(pts[i:i + 1]),
                              np.ascontiguousarray(sub), code, d)
        if d[0] >= r:
            kept.append(i)
    return PointCloud(cloud.domain, cloud.q, pts[kept]), np.asarray(kept)


@dataclass
class QuadratureRule:
    cloud: PointCloud
    weights: np.ndarray
    order: int
    moment_residual: float
    mz_norm_estimate: Optional[float] = None

    def integrate(self, values):
        return float(self.weights @ np.asarray(values, dtype=float))

    def to_json(self):
        return json.dumps({
            "domain": f"{self.cloud.domain}{self.cloud.q}",
            "order": self.order,
            "residual": self.moment_residual,
            "mz_estimate": self.mz_norm_estimate,
            "nodes": self.cloud.points.tolist(),
            "weights": self.weights.tolist(),
        })

    @classmethod
    def from_json(cls, text):
        rec = json.loads(text)
        dom, q = parse_domain(rec["domain"])
        cloud = PointCloud(dom, q, np.asarray(rec["nodes"], dtype=float))
        return cls(cloud=cloud, weights=np.asarray(rec["weights"], dtype=float),
                   order=int(rec["order"]), moment_residual=float(rec["residual"]),
                   mz_norm_estimate=rec.get("mz_estimate"))


# ---------------------------------------------------------------------------
# torus test basis: [1, sqrt2 cos(k.x), sqrt2 sin(k.x)] over half the lattice
# ---------------------------------------------------------------------------

def torus_lattice(q, order, half=True):
    """Integer vectors with |k|_2 < order; half=True keeps one of each +-k pair
    (zero excluded)."""
    r = int(math.ceil(order)) - 1
    axes = [np.arange(-r, r + 1)] * q
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, q)
    norm2 = (grid ** 2).sum(axis=1)
    grid = grid[norm2 < order ** 2]
    if not half:
        return grid
    keep = []
    for k in grid:
        nz = k[k != 0]
        if len(nz) == 0:
            continue
        if nz[0] > 0:
            keep.append(k)
    return np.asarray(keep, dtype=float).reshape(-1, q)


def _torus_design(pts, order):
    q = pts.shape[1]
    kvecs = torus_lattice(q, order, half=True)
    phase = pts @ kvecs.T
    s2 = math.sqrt(2.0)
    V = np.concatenate([np.ones((len(pts), 1)), s2 * np.cos(phase), s2 * np.sin(phase)],
                       axis=1)
    return V


# ---------------------------------------------------------------------------
# solvers
# ---------------------------------------------------------------------------

def _solve_dense(V, m, refine=2):
    A = V.T @ V
    A[np.diag_indices_from(A)] += 1e-13 * A.diagonal().max()
    c = cho_factor(A, lower=True)
    z = cho_solve(c, m)
    w = V @ z
    for _ in range(refine):
        r = m - V.T @ w
        w += V @ cho_solve(c, r)
    return w


def _solve_cg_sphere(basis, pts, m, tol, maxit):
    dim = basis.dim
    z = np.zeros(dim)
    r = m.copy()
    p = r.copy()
    rs = float(r @ r)
    it = 0
    while it < maxit:
        Ap = basis.gram_apply(pts, p)
        denom = float(p @ Ap)
        if denom <= 0.0:
            raise QuadratureError("Gram operator lost positive definiteness")
        alpha = rs / denom
        z += alpha * p
        r -= alpha * Ap
        it += 1
        if np.abs(r).max() < tol:
            break
        rs_new = float(r @ r)
        p = r + (rs_new / rs) * p
        rs = rs_new
    return basis.synth(pts, z), it


def solve_weights(cloud, order, residual_tol=1e-6, cg_tol=1e-10, maxit=10000,
                  dense_limit=2048):
    """Minimal-norm quadrature weights exact on the order-n test space.

    Raises QuadratureError when the cloud is too small for the test space or
    the final moment residual exceeds residual_tol (the geometric hypothesis
    behind existence is then violated in practice).
    """
    pts = cloud.points
    M = len(cloud)
    if cloud.domain == "sphere":
        if cloud.q != 2:
            raise NotImplementedError("scattered sphere quadrature is built for q = 2")
        basis = harmonic_basis(int(order) - 1)
        dim = basis.dim
        if M < dim:
            raise QuadratureError(f"{M} nodes cannot match {dim} moments")
        m = np.zeros(dim)
        m[0] = 1.0
        if dim <= dense_limit and M * dim <= 3e8:
            V = basis.matrix(pts)
            w = _solve_dense(V, m)
        else:
            w, _ = _solve_cg_sphere(basis, pts, m, cg_tol, maxit)
        resid = m - basis.moments(pts, w)
    else:
        V = _torus_design(pts, order)
        dim = V.shape[1]
        if M < dim:
            raise QuadratureError(f"{M} nodes cannot match {dim} moments")
        if dim > 8192:
            raise NotImplementedError("torus solver keeps a dense design; order too large")
        m = np.zeros(dim)
        m[0] = 1.0
        w = _solve_dense(V, m)
        resid = m - V.T @ w
    moment_residual = float(np.abs(resid).max())
    if moment_residual > residual_tol:
        raise QuadratureError(
            f"moment residual {moment_residual:.3e} exceeds {residual_tol:.1e}; "
            "cloud too sparse for this order")
    return QuadratureRule(cloud=cloud, weights=w, order=int(order),
                          moment_residual=moment_residual)


def mz_norm_estimate(rule, n=None, npoly=200, seed=0):
    """Estimate the measure's MZ norm over the order-n space.

    Maximum over seeded random polynomials P of
    (sum_j |w_j| |P(x_j)|) / integral of |P| d(mu*); the denominator uses a
    dense reference rule, so the result is a statistical lower estimate.
    """
    n = rule.order if n is None else n
    rng = np.random.default_rng(seed)
    cloud = rule.cloud
    absw = np.abs(rule.weights)
    best = 0.0
    if cloud.domain == "sphere":
        basis = harmonic_basis(int(n) - 1)
        ref_pts, ref_w = product_rule(4 * int(n))
        Vn = basis.matrix(cloud.points) if len(cloud) * basis.dim <= 3e8 else None
        for _ in range(npoly):
            c = rng.normal(size=basis.dim)
            c /= np.linalg.norm(c)
            vals = Vn @ c if Vn is not None else basis.synth(cloud.points, c)
            denom = float(ref_w @ np.abs(basis.synth(ref_pts, c)))
            best = max(best, float(absw @ np.abs(vals)) / denom)
        return best
    # torus reference: dense grid
    q = cloud.q
    N = max(8 * int(n), 64)
    axes = [2.0 * np.pi * np.arange(N) / N] * q
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, q)
    Vg = _torus_design(mesh, n)
    Vc = _torus_design(cloud.points, n)
    for _ in range(npoly):
        c = rng.normal(size=Vc.shape[1])
        c /= np.linalg.norm(c)
        denom = float(np.abs(Vg @ c).mean())
        best = max(best, float(absw @ np.abs(Vc @ c)) / denom)
    return best
