"""Sphere machinery: ultraspherical polynomials, localized zonal kernels,
real spherical harmonics on S^2, and Gauss-Jacobi quadrature.

Normalization conventions used throughout the package:

* mu* is the rotation-invariant probability measure on S^q.
* p_l are orthonormal against the plain weight (1-t^2)^(q/2-1) on [-1, 1]
  and have positive leading coefficients.
* Harmonics are orthonormal in L^2(mu*) with the constant function equal
  to 1, so the addition formula reads
      sum_k Y_{l,k}(x) Y_{l,k}(y) = (omega_q / omega_{q-1}) p_l(1) p_l(x.y).
* The degree-n localized kernel is
      K_n(t) = (omega_q / omega_{q-1}) sum_{l<n} h(l/n) p_l(1) p_l(t),
  evaluated by Clenshaw recurrence against the stored coefficients.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .backend import kernels
from .filters import FilterSpec, filter_values, get_filter


def volume_omega(q):
    """Riemannian volume of S^q: 2 pi^((q+1)/2) / Gamma((q+1)/2)."""
    if q < 0:
        raise ValueError("q must be >= 0")
    return 2.0 * math.pi ** ((q + 1) / 2.0) / math.gamma((q + 1) / 2.0)


def omega_ratio(q):
    """omega_q / omega_{q-1}, computed with log-Gamma for large q."""
    return math.sqrt(math.pi) * math.exp(math.lgamma(q / 2.0) - math.lgamma((q + 1) / 2.0))


# ---------------------------------------------------------------------------
# Jacobi / ultraspherical recurrences
# ---------------------------------------------------------------------------

def jacobi_recurrence(alpha, beta, m):
    """Monic three-term recurrence for the weight (1-t)^a (1+t)^b on [-1,1].

    Returns (mu0, diag, offsq): mu0 the weight's total mass, diag the a_k,
    offsq the b_k^2 (squared off-diagonal entries), k = 0..m-1.
    """
    if alpha <= -1 or beta <= -1:
        raise ValueError("Jacobi parameters must exceed -1")
    mu0 = 2.0 ** (alpha + beta + 1) * math.exp(
        math.lgamma(alpha + 1) + math.lgamma(beta + 1) - math.lgamma(alpha + beta + 2))
    k = np.arange(m, dtype=float)
    diag = np.empty(m)
    s = 2 * k + alpha + beta
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = (beta ** 2 - alpha ** 2) / (s * (s + 2))
    diag[0] = (beta - alpha) / (alpha + beta + 2)
    kk = np.arange(1, m, dtype=float)
    ss = 2 * kk + alpha + beta
    with np.errstate(divide="ignore", invalid="ignore"):
        offsq = (4 * kk * (kk + alpha) * (kk + beta) * (kk + alpha + beta)
                 / (ss ** 2 * (ss + 1) * (ss - 1)))
    if m > 1:
        offsq[0] = 4 * (1 + alpha) * (1 + beta) / ((2 + alpha + beta) ** 2 * (3 + alpha + beta))
    return mu0, diag, offsq


def gauss_jacobi_general(alpha, beta, m):
    """m-point Gauss rule for the weight (1-t)^a (1+t)^b, by Golub-Welsch."""
    mu0, diag, offsq = jacobi_recurrence(alpha, beta, m)
    if m == 1:
        return np.array([diag[0]]), np.array([mu0])
    nodes, vecs = eigh_tridiagonal(diag, np.sqrt(offsq))
    weights = mu0 * vecs[0] ** 2
    return nodes, weights


def gauss_jacobi(q, m):
    """m-point rule on [-1,1] for the ultraspherical weight (1-t^2)^(q/2-1).

    Exact for polynomials of degree <= 2m - 1.
    """
    a = q / 2.0 - 1.0
    return gauss_jacobi_general(a, a, m)


@dataclass(frozen=True)
class UltrasphericalBasis:
    """Orthonormal polynomials for the weight (1-t^2)^(q/2-1).

    ``sqb`` holds the orthonormal recurrence constants: p_0 = 1/sqrt(mu0),
    p_{l+1}(t) = (t p_l(t) - sqb[l] p_{l-1}(t)) / sqb[l+1].
    """
    q: int
    max_degree: int
    sqb: np.ndarray = field(repr=False)
    p0val: float
    p_at_one: np.ndarray = field(repr=False)

    def eval(self, l, t):
        """p_l(t) by forward recurrence (vectorized in t)."""
        if l > self.max_degree:
            raise ValueError(f"degree {l} exceeds max_degree {self.max_degree}")
        t = np.asarray(t, dtype=float)
        pm = np.zeros_like(t)
        pc = np.full_like(t, self.p0val)
        for k in range(l):
            pm, pc = pc, (t * pc - self.sqb[k] * pm) / self.sqb[k + 1]
        return pc if np.ndim(t) else float(pc)

    def values_matrix(self, t, lmax=None):
        """Matrix p_l(t_i), shape (lmax+1, len(t))."""
        lmax = self.max_degree if lmax is None else lmax
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty((lmax + 1, t.shape[0]))
        pm = np.zeros_like(t)
        pc = np.full_like(t, self.p0val)
        out[0] = pc
        for k in range(lmax):
            pm, pc = pc, (t * pc - self.sqb[k] * pm) / self.sqb[k + 1]
            out[k + 1] = pc
        return out


_BASIS_CACHE = {}


def ultraspherical_basis(q, max_degree):
    """Build (and cache) the orthonormal basis for dimension q."""
    key = (q, max_degree)
    hit = _BASIS_CACHE.get(key)
    if hit is not None:
        return hit
    a = q / 2.0 - 1.0
    mu0, _, offsq = jacobi_recurrence(a, a, max_degree + 3)
    sqb = np.empty(max_degree + 3)
    sqb[0] = 0.0          # unused slot; recurrence starts multiplying sqb[1]
    sqb[1:] = np.sqrt(offsq[: max_degree + 2])
    p0 = 1.0 / math.sqrt(mu0)
    basis = UltrasphericalBasis(q=q, max_degree=max_degree, sqb=sqb, p0val=p0,
                                p_at_one=np.empty(0))
    pone = basis.values_matrix(np.array([1.0]))[:, 0]
    basis = UltrasphericalBasis(q=q, max_degree=max_degree, sqb=sqb, p0val=p0,
                                p_at_one=pone)
    _BASIS_CACHE[key] = basis
    return basis


# ---------------------------------------------------------------------------
# localized zonal kernel
# ---------------------------------------------------------------------------

_T_CLAMP = 1e-12


@dataclass(frozen=True)
class SphericalKernel:
    """Degree-n localized kernel on S^q, stored as ultraspherical coefficients."""
    q: int
    n: float
    filter: FilterSpec
    coeffs: np.ndarray = field(repr=False)
    basis: UltrasphericalBasis = field(repr=False)

    def eval(self, t):
        """Kernel value at inner products t; |t| may exceed 1 by <= 1e-12."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t).astype(float)
        if np.any(np.abs(t) > 1.0 + _T_CLAMP):
            raise ValueError("kernel argument outside [-1 - 1e-12, 1 + 1e-12]")
        t = np.clip(t, -1.0, 1.0)
        out = np.empty_like(t)
        kernels.ultra_clenshaw(t, self.coeffs, self.basis.sqb, self.basis.p0val, out)
        return float(out[0]) if scalar else out

    def weighted_sum(self, probes, pts, yvals):
        """sum_j y_j K(probe_i . pt_j) for unit vectors; the estimator workhorse."""
        probes = np.ascontiguousarray(np.atleast_2d(probes), dtype=float)
        pts = np.ascontiguousarray(np.atleast_2d(pts), dtype=float)
        yvals = np.ascontiguousarray(yvals, dtype=float)
        out = np.empty(probes.shape[0])
        kernels.ultra_kernel_sum(probes, pts, yvals, self.coeffs,
                                 self.basis.sqb, self.basis.p0val, out)
        return out

    def to_json(self):
        return json.dumps({"q": self.q, "n": self.n, "filter": self.filter.kind,
                           "coeffs": self.coeffs.tolist()})


def kernel_build(q, n, filt):
    """Localized kernel K_n(t) = (w_q/w_{q-1}) sum_{l<n} h(l/n) p_l(1) p_l(t)."""
    if n < 1:
        raise ValueError("kernel degree must be >= 1")
    lmax = int(math.ceil(n)) - 1
    basis = ultraspherical_basis(q, lmax + 1)
    ls = np.arange(lmax + 1)
    hv = filter_values(filt, ls, n)
    if filt.kind == "sharp":
        hv = hv * (ls < n)      # strict cutoff at l = n
    coeffs = omega_ratio(q) * hv * basis.p_at_one[: lmax + 1]
    return SphericalKernel(q=q, n=float(n), filter=filt, coeffs=coeffs, basis=basis)


def kernel_from_json(text):
    rec = json.loads(text)
    k = kernel_build(int(rec["q"]), float(rec["n"]), get_filter(rec["filter"]))
    stored = np.asarray(rec["coeffs"], dtype=float)
    if stored.shape != k.coeffs.shape or not np.allclose(stored, k.coeffs, atol=1e-12):
        raise ValueError("stored kernel coefficients disagree with rebuild")
    return k


# ---------------------------------------------------------------------------
# real spherical harmonics on S^2
# ---------------------------------------------------------------------------

def _alf_tables(lmax):
    ra = np.zeros((lmax + 1, lmax + 1))
    rb = np.zeros((lmax + 1, lmax + 1))
    for m in range(lmax + 1):
        for l in range(m + 1, lmax + 1):
            ra[l, m] = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            if l > m + 1:
                rb[l, m] = math.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
    sect = np.zeros(lmax + 1)
    for m in range(1, lmax + 1):
        sect[m] = math.sqrt((2.0 * m + 1.0) / (2.0 * m))
    return ra, rb, sect


@dataclass(frozen=True)
class HarmonicBasis2:
    """Real orthonormal spherical harmonics on S^2 through degree lmax.

    Index layout: degree l occupies offsets l^2 .. l^2 + 2l, ordered
    [m=0, m=1 cos, m=1 sin, ..., m=l cos, m=l sin]; the (l, k) indexing with
    1 <= k <= 2l + 1 maps to offset l^2 + k - 1.
    """
    lmax: int
    ra: np.ndarray = field(repr=False)
    rb: np.ndarray = field(repr=False)
    sect: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return (self.lmax + 1) ** 2

    def _xyz(self, pts):
        pts = np.ascontiguousarray(np.atleast_2d(pts), dtype=float)
        return (np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1]),
                np.ascontiguousarray(pts[:, 2]))

    def matrix(self, pts):
        """Design matrix, shape (npts, dim)."""
        px, py, pz = self._xyz(pts)
        out = np.empty((px.shape[0], self.dim))
        kernels.harmonic_matrix(px, py, pz, self.lmax, self.ra, self.rb, self.sect, out)
        return out

    def eval(self, l, k, x):
        """Single harmonic Y_{l,k}(x), 1 <= k <= 2l + 1."""
        if not (0 <= l <= self.lmax):
            raise ValueError(f"degree {l} out of range")
        if not (1 <= k <= 2 * l + 1):
            raise ValueError(f"order index {k} out of range for degree {l}")
        row = self.matrix(np.atleast_2d(x))[0]
        return float(row[l * l + k - 1])

    def moments(self, pts, vals):
        """sum_j vals_j Y_i(x_j) over the whole basis."""
        px, py, pz = self._xyz(pts)
        out = np.empty(self.dim)
        kernels.harmonic_moments(px, py, pz, self.lmax, self.ra, self.rb, self.sect,
                                 np.ascontiguousarray(vals, dtype=float), out)
        return out

    def gram_apply(self, pts, z):
        """(V V^T) z where V is the design matrix, without materializing V."""
        px, py, pz = self._xyz(pts)
        out = np.empty(self.dim)
        kernels.harmonic_gram_apply(px, py, pz, self.lmax, self.ra, self.rb, self.sect,
                                    np.ascontiguousarray(z, dtype=float), out)
        return out

    def synth(self, pts, coef):
        """Evaluate the polynomial with coefficient vector coef at pts."""
        px, py, pz = self._xyz(pts)
        out = np.empty(px.shape[0])
        kernels.harmonic_poly_eval(px, py, pz, self.lmax, self.ra, self.rb, self.sect,
                                   np.ascontiguousarray(coef, dtype=float), out)
        return out


_HARM_CACHE = {}


def harmonic_basis(lmax):
    hit = _HARM_CACHE.get(lmax)
    if hit is None:
        hit = HarmonicBasis2(lmax, *_alf_tables(lmax))
        _HARM_CACHE[lmax] = hit
    return hit


def degree_filter_vector(filt, n, lmax, sharp_strict=True):
    """h(l/n) expanded over the harmonic layout (2l+1 copies per degree)."""
    ls = np.arange(lmax + 1)
    hv = filter_values(filt, ls, n)
    if filt.kind == "sharp" and sharp_strict:
        hv = hv * (ls < n)
    return np.repeat(hv, 2 * ls + 1)


# ---------------------------------------------------------------------------
# reference product rule on S^2 (Gauss-Legendre x equispaced longitudes)
# ---------------------------------------------------------------------------

def product_rule(order):
    """Positive rule integrating every spherical polynomial of degree < order
    against mu* exactly; about order^2 / 2 nodes."""
    nz = order // 2 + 1
    nphi = order + 1
    zn, zw = gauss_jacobi_general(0.0, 0.0, nz)
    phis = 2.0 * np.pi * np.arange(nphi) / nphi
    Z = np.repeat(zn, nphi)
    W = np.repeat(zw / 2.0 / nphi, nphi)
    PH = np.tile(phis, nz)
    S = np.sqrt(np.maximum(0.0, 1.0 - Z ** 2))
    pts = np.stack([S * np.cos(PH), S * np.sin(PH), Z], axis=1)
    return pts, W
