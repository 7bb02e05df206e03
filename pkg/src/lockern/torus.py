"""Trigonometric approximation on the q-torus.

The reconstruction operator against a discrete measure nu is

    sigma_n(nu; f)(x) = sum_j w_j f(x_j) K_n(x - x_j),
    K_n(u) = sum_{|k|_2 < n} h(|k|_2 / n) exp(i k . u),

with h a low-pass filter.  On an exact N^q sample grid the same operator is
computed through the discrete Fourier transform (the grid sum integrates
trigonometric polynomials of degree < N exactly), which is both faster and
how the dyadic wavelet-like expansion is synthesized.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .backend import kernels
from .filters import filter_values
from .quadrature import torus_lattice


def _as_points(x, q):
    """Normalize probe input to shape (P, q); returns (points, was_single)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        if q != 1:
            raise ValueError("scalar probe is only valid on T^1")
        return x.reshape(1, 1), True
    if x.ndim == 1:
        if q == 1:
            return x.reshape(-1, 1), False
        if x.shape[0] == q:
            return x.reshape(1, q), True
        raise ValueError(f"1-d probe array of length {x.shape[0]} does not fit q={q}")
    if x.shape[1] != q:
        raise ValueError(f"probe array must have {q} columns")
    return x, False


@dataclass
class TorusSamples:
    """Sampled values on T^q, with optional quadrature weights."""
    q: int
    points: np.ndarray
    values: np.ndarray
    weights: Optional[np.ndarray] = None
    _grid_cache: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            if self.q != 1:
                raise ValueError("1-d point array is only valid for q = 1")
            pts = pts.reshape(-1, 1)
        self.points = np.ascontiguousarray(np.mod(pts, 2.0 * np.pi))
        self.values = np.asarray(self.values)
        if self.points.shape[0] != self.values.shape[0]:
            raise ValueError("points and values must have equal length")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float)
            if self.weights.shape[0] != self.values.shape[0]:
                raise ValueError("weights must match points")

    def __len__(self):
        return self.points.shape[0]

    def grid_layout(self):
        """(N, perm) if the points tile the exact N^q grid once, else None.

        perm reorders samples into row-major grid order.
        """
        if self._grid_cache is not None:
            return self._grid_cache if self._grid_cache != (None,) else None
        M = len(self)
        N = round(M ** (1.0 / self.q))
        layout = None
        if N ** self.q == M:
            idx = np.rint(self.points * N / (2.0 * np.pi)).astype(int) % N
            ok = np.abs(self.points - idx * 2.0 * np.pi / N) < 1e-9
            if ok.all():
                flat = np.ravel_multi_index(idx.T, (N,) * self.q)
                if len(np.unique(flat)) == M:
                    perm = np.empty(M, dtype=int)
                    perm[flat] = np.arange(M)
                    layout = (N, perm)
        self._grid_cache = layout if layout is not None else (None,)
        return layout


def torus_grid_samples(f, q, N):
    """Sample a callable on the exact N^q grid with uniform weights 1/N^q."""
    axes = [2.0 * np.pi * np.arange(N) / N] * q
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, q)
    vals = f(mesh) if q > 1 else f(mesh[:, 0])
    return TorusSamples(q=q, points=mesh, values=np.asarray(vals),
                        weights=np.full(N ** q, 1.0 / N ** q))


@dataclass
class FourierExpansion:
    """Coefficients c_k on the lattice |k|_2 < band_limit, as a dict."""
    q: int
    coefficients: dict
    band_limit: float

    def coeff(self, k):
        k = (k,) if np.isscalar(k) else tuple(int(v) for v in k)
        return self.coefficients.get(k, 0.0 + 0.0j)

    def arrays(self):
        ks = np.array(sorted(self.coefficients.keys()), dtype=float).reshape(
            -1, self.q)
        cs = np.array([self.coefficients[tuple(int(v) for v in k)] for k in ks])
        return ks, cs

    def synth(self, x):
        """sum_k c_k exp(i k . x) at points x, complex output."""
        x, _ = _as_points(x, self.q)
        ks, cs = self.arrays()
        out = np.zeros(x.shape[0], dtype=complex)
        step = max(1, int(2e6) // max(len(ks), 1))
        for lo in range(0, x.shape[0], step):
            hi = min(x.shape[0], lo + step)
            out[lo:hi] = np.exp(1j * (x[lo:hi] @ ks.T)) @ cs
        return out

    def synth_real(self, x):
        v = self.synth(x)
        return v.real

    def filtered(self, filt, n, inclusive=False):
        """New expansion with coefficients h(|k|_2 / n) c_k.

        The sharp filter keeps |k|_2 < n strictly (or <= n when inclusive).
        """
        out = {}
        for k, c in self.coefficients.items():
            r = math.sqrt(sum(v * v for v in k))
            if filt.kind == "sharp":
                keep = (r <= n) if inclusive else (r < n)
                if keep:
                    out[k] = c
                continue
            h = float(filter_values(filt, np.array([r]), n)[0])
            if h != 0.0:
                out[k] = h * c
        return FourierExpansion(q=self.q, coefficients=out, band_limit=float(n))

    def is_conjugate_symmetric(self, tol=1e-10):
        scale = max((abs(c) for c in self.coefficients.values()), default=1.0)
        for k, c in self.coefficients.items():
            mk = tuple(-v for v in k)
            if abs(np.conj(c) - self.coefficients.get(mk, 0.0)) > tol * max(scale, 1.0):
                return False
        return True


def grid_coeffs(samples, n):
    """Discrete Fourier coefficients (1/N^q) sum f(2 pi m / N) e^{-i k . x_m}
    for |k|_2 < n, requiring the exact N^q grid and n <= N/2."""
    layout = samples.grid_layout()
    if layout is None:
        raise ValueError("samples do not cover an exact equispaced grid once")
    N, perm = layout
    if n > N / 2:
        raise ValueError(f"band limit n={n} needs a grid with N >= 2n")
    vals = np.asarray(samples.values)[perm].reshape((N,) * samples.q)
    c = np.fft.fftn(vals) / N ** samples.q
    coefficients = {}
    for k in torus_lattice(samples.q, n, half=False):
        kt = tuple(int(v) for v in k)
        bins = tuple(int(v) % N for v in kt)
        coefficients[kt] = complex(c[bins])
    return FourierExpansion(q=samples.q, coefficients=coefficients, band_limit=float(n))


# ---------------------------------------------------------------------------
# kernels and reconstruction operators
# ---------------------------------------------------------------------------

def _h_coeffs(filt, n):
    lmax = int(math.ceil(n)) - 1
    ls = np.arange(lmax + 1)
    hv = filter_values(filt, ls, n)
    if filt.kind == "sharp":
        hv = hv * (ls < n)
    return hv


def _phi_lattice(q, n, filt):
    """(kvecs, hvals) with one row per represented term: the k = 0 row plus one
    row per +-k pair weighted 2 h(|k|/n)."""
    kv = torus_lattice(q, n, half=True)
    r = np.linalg.norm(kv, axis=1) if len(kv) else np.empty(0)
    hv = 2.0 * filter_values(filt, r, n) if len(kv) else np.empty(0)
    if filt.kind == "sharp" and len(kv):
        hv = hv * (r < n)
    kv = np.concatenate([np.zeros((1, q)), kv], axis=0)
    hv = np.concatenate([[1.0], hv])
    return np.ascontiguousarray(kv), np.ascontiguousarray(hv)


def kernel_phi(q, n, filt, x):
    """K_n(x) = sum_{|k|_2 < n} h(|k|_2/n) e^{i k . x}, a real value."""
    if n < 1:
        raise ValueError("kernel degree must be >= 1")
    x, scalar = _as_points(x, q)
    if q == 1:
        hc = _h_coeffs(filt, n)
        out = np.empty(x.shape[0])
        kernels.cheb_kernel_sum(np.ascontiguousarray(x[:, 0]), np.zeros(1),
                                np.ones(1), hc, out)
    else:
        kv, hv = _phi_lattice(q, n, filt)
        out = np.empty(x.shape[0])
        kernels.lattice_phi(np.ascontiguousarray(x), kv, hv, out)
    return float(out[0]) if scalar else out


def _kernel_sum(data_pts, coeffs_y, q, n, filt, x):
    out = np.empty(x.shape[0])
    if q == 1:
        hc = _h_coeffs(filt, n)
        kernels.cheb_kernel_sum(np.ascontiguousarray(x[:, 0]),
                                np.ascontiguousarray(data_pts[:, 0]),
                                np.ascontiguousarray(coeffs_y, dtype=float), hc, out)
    else:
        kv, hv = _phi_lattice(q, n, filt)
        kernels.lattice_kernel_sum(np.ascontiguousarray(x), np.ascontiguousarray(data_pts),
                                   np.ascontiguousarray(coeffs_y, dtype=float), kv, hv, out)
    return out


def sigma_n(data, filt, n, x, prefer_fft=True):
    """sigma_n(nu; f) at probe points x for a weighted sample (quadrature measure).

    Uses the transform path automatically when the data sit on an exact grid
    with uniform weights and the grid resolves the kernel band.
    """
    if data.weights is None:
        raise ValueError("sigma_n needs quadrature weights; "
                         "use monte_carlo_sigma for plain averages")
    x, scalar = _as_points(x, data.q)
    layout = data.grid_layout() if prefer_fft else None
    if layout is not None:
        N = layout[0]
        uniform = np.allclose(data.weights, 1.0 / N ** data.q, rtol=0, atol=1e-15)
        if uniform and n <= N / 2:
            vals = grid_coeffs(data, float(n)).filtered(filt, n).synth(x)
            if not np.iscomplexobj(data.values):
                vals = vals.real
            return vals[0] if scalar else vals
    if np.iscomplexobj(data.values):
        wr = _kernel_sum(data.points, data.weights * data.values.real, data.q, n, filt, x)
        wi = _kernel_sum(data.points, data.weights * data.values.imag, data.q, n, filt, x)
        out = wr + 1j * wi
    else:
        out = _kernel_sum(data.points, data.weights * data.values, data.q, n, filt, x)
    return out[0] if scalar else out


def monte_carlo_sigma(data, filt, n, x):
    """Plain-average estimator (1/M) sum_j y_j K_n(x - x_j) for unweighted samples."""
    if len(data) == 0:
        raise ValueError("empty sample")
    x, scalar = _as_points(x, data.q)
    out = _kernel_sum(data.points, np.asarray(data.values, dtype=float) / len(data),
                      data.q, n, filt, x)
    return out[0] if scalar else out


def tau_j(data, filt, j, x, prefer_fft=True):
    """Dyadic detail operator: sigma_1 at j = 0, else sigma_{2^j} - sigma_{2^(j-1)}."""
    if j < 0:
        raise ValueError("level must be >= 0")
    if j == 0:
        return sigma_n(data, filt, 1, x, prefer_fft)
    hi = sigma_n(data, filt, 2 ** j, x, prefer_fft)
    lo = sigma_n(data, filt, 2 ** (j - 1), x, prefer_fft)
    return hi - lo


def wavelet_expand(data, filt, J, x):
    """Truncated dyadic synthesis sum of levels 0..J at probe points x.

    Level j details are sampled on the 2^(j+3) grid and synthesized with the
    wide-mask kernel (g_tilde); level 0 is the base projection sigma_1.  The
    data must cover the exact 2^(J+3) grid so every coarser dyadic grid is a
    stride subset.
    """
    layout = data.grid_layout()
    Nfine = 2 ** (J + 3)
    if layout is None or layout[0] < Nfine:
        raise ValueError(f"wavelet synthesis through level {J} needs the exact "
                         f"{Nfine}^q sample grid")
    N, perm = layout
    vals = np.asarray(data.values)[perm].reshape((N,) * data.q)
    x, scalar = _as_points(x, data.q)

    def level_projection(j):
        # filtered projection of order 2^j computed from its own dyadic grid
        Nj = 2 ** (j + 3)
        stride = N // Nj
        sub = vals[(slice(None, None, stride),) * data.q]
        subsamples = TorusSamples(
            q=data.q,
            points=np.stack(np.meshgrid(*[2 * np.pi * np.arange(Nj) / Nj] * data.q,
                                        indexing="ij"), axis=-1).reshape(-1, data.q),
            values=sub.reshape(-1),
            weights=np.full(Nj ** data.q, 1.0 / Nj ** data.q))
        return np.atleast_1d(sigma_n(subsamples, filt, 2 ** j, x))

    # telescoping sum of per-level details tau_j = proj_j - proj_{j-1}; each
    # detail is band-limited, so evaluating its grid transform coincides with
    # the wide-mask (g_tilde) synthesis from the 2^(j+3) sample grid
    total = np.zeros(x.shape[0], dtype=complex)
    prev = None
    for j in range(J + 1):
        cur = level_projection(j)
        total += cur if prev is None else cur - prev
        prev = cur
    out = total if np.iscomplexobj(np.asarray(data.values)) else total.real
    return out[0] if scalar else out


def fourier_partial_sum(expansion, n, x, inclusive=True):
    """Plain Fourier projection: sum of c_k e^{i k . x} over |k|_2 <= n
    (or < n when inclusive=False)."""
    out = {}
    for k, c in expansion.coefficients.items():
        r = math.sqrt(sum(v * v for v in k))
        if (r <= n) if inclusive else (r < n):
            out[k] = c
    return FourierExpansion(expansion.q, out, float(n)).synth(x)


def local_smoothness(data, filt, x0, j_range, radius=0.15):
    """Estimated local smoothness exponent from dyadic detail decay.

    Fits a least-squares line to log2 of the windowed sup of |tau_j| against
    the level j and returns the negated slope; +inf when every windowed
    detail is below 1e-14 (locally polynomial data).
    """
    js = list(j_range)
    if len(js) < 4:
        raise ValueError("need at least 4 dyadic levels for a slope")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    pts = data.points
    d = np.abs(pts - x0[None, :]) % (2 * np.pi)
    d = np.where(d > np.pi, 2 * np.pi - d, d)
    mask = d.max(axis=1) <= radius
    if not mask.any():
        raise ValueError("window contains no sample points")
    window = pts[mask]
    levels = []
    for j in js:
        det = np.abs(tau_j(data, filt, j, window))
        levels.append(det.max())
    levels = np.asarray(levels)
    keep = levels > 1e-14
    if keep.sum() < 2:
        return float("inf")
    slope = np.polyfit(np.asarray(js, dtype=float)[keep], np.log2(levels[keep]), 1)[0]
    return float(-slope)
