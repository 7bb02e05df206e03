"""Numba implementations of the hot numerical kernels.

Every public function here has a twin of the same name and signature in
``_kernels_numpy``; ``backend`` picks one of the two modules at import time.
Scalar loops are written for njit; callers pass precomputed recurrence /
filter tables so the inner loops stay free of special functions.
"""

import numpy as np
from numba import njit, prange, get_num_threads


# ---------------------------------------------------------------------------
# real spherical harmonics on S^2 (orthonormal w.r.t. the probability measure,
# first function identically 1); layout per degree l: offset l*l, then
# [m=0, m=1 cos, m=1 sin, ..., m=l cos, m=l sin]
# ---------------------------------------------------------------------------

@njit(cache=True, fastmath=True, inline="always")
def _harm_point(x, y, z, lmax, ra, rb, sect, out):
    st = np.sqrt(max(0.0, 1.0 - z * z))
    if st > 1e-300:
        cphi = x / st
        sphi = y / st
    else:
        cphi = 1.0
        sphi = 0.0
    sqrt2 = 1.4142135623730951
    qmm = 1.0
    cm = 1.0
    sm = 0.0
    for m in range(lmax + 1):
        if m > 0:
            qmm *= st * sect[m]
            cn = cm * cphi - sm * sphi
            sn = sm * cphi + cm * sphi
            cm = cn
            sm = sn
        qprev = 0.0
        qcur = qmm
        for l in range(m, lmax + 1):
            if l > m:
                qnew = ra[l, m] * (z * qcur - rb[l, m] * qprev)
                qprev = qcur
                qcur = qnew
            base = l * l
            if m == 0:
                out[base] = qcur
            else:
                v = sqrt2 * qcur
                out[base + 2 * m - 1] = v * cm
                out[base + 2 * m] = v * sm


@njit(cache=True, parallel=True, fastmath=True)
def harmonic_matrix(px, py, pz, lmax, ra, rb, sect, out):
    M = px.shape[0]
    for j in prange(M):
        _harm_point(px[j], py[j], pz[j], lmax, ra, rb, sect, out[j])


@njit(cache=True, parallel=True, fastmath=True)
def harmonic_gram_apply(px, py, pz, lmax, ra, rb, sect, zvec, out):
    # out = sum_j phi(x_j) (phi(x_j) . zvec), thread-private accumulators
    dim = (lmax + 1) * (lmax + 1)
    M = px.shape[0]
    nt = get_num_threads()
    acc = np.zeros((nt, dim))
    chunk = (M + nt - 1) // nt
    for t in prange(nt):
        lo = t * chunk
        hi = min(M, lo + chunk)
        phi = np.empty(dim)
        for j in range(lo, hi):
            _harm_point(px[j], py[j], pz[j], lmax, ra, rb, sect, phi)
            s = 0.0
            for i in range(dim):
                s += phi[i] * zvec[i]
            for i in range(dim):
                acc[t, i] += s * phi[i]
    for i in range(dim):
        tot = 0.0
        for t in range(nt):
            tot += acc[t, i]
        out[i] = tot


@njit(cache=True, parallel=True, fastmath=True)
def harmonic_moments(px, py, pz, lmax, ra, rb, sect, vals, out):
    # out_i = sum_j vals_j phi_i(x_j)
    dim = (lmax + 1) * (lmax + 1)
    M = px.shape[0]
    nt = get_num_threads()
    acc = np.zeros((nt, dim))
    chunk = (M + nt - 1) // nt
    for t in prange(nt):
        lo = t * chunk
        hi = min(M, lo + chunk)
        phi = np.empty(dim)
        for j in range(lo, hi):
            _harm_point(px[j], py[j], pz[j], lmax, ra, rb, sect, phi)
            v = vals[j]
            for i in range(dim):
                acc[t, i] += v * phi[i]
    for i in range(dim):
        tot = 0.0
        for t in range(nt):
            tot += acc[t, i]
        out[i] = tot


@njit(cache=True, parallel=True, fastmath=True)
def harmonic_poly_eval(px, py, pz, lmax, ra, rb, sect, coef, out):
    # out_j = sum_i coef_i phi_i(x_j)
    dim = (lmax + 1) * (lmax + 1)
    M = px.shape[0]
    for j in prange(M):
        phi = np.empty(dim)
        _harm_point(px[j], py[j], pz[j], lmax, ra, rb, sect, phi)
        s = 0.0
        for i in range(dim):
            s += coef[i] * phi[i]
        out[j] = s


# ---------------------------------------------------------------------------
# Clenshaw evaluation against a symmetric orthonormal three-term recurrence
#   p_0 = p0val,  p_{l+1}(t) = (t p_l(t) - sqb[l] p_{l-1}(t)) / sqb[l+1]
# sqb must have length >= ncoef + 2.
# ---------------------------------------------------------------------------

@njit(cache=True, fastmath=True, inline="always")
def _clenshaw_scalar(t, dcoef, sqb, p0val):
    L = dcoef.shape[0] - 1
    b1 = 0.0
    b2 = 0.0
    for l in range(L, -1, -1):
        b0 = dcoef[l] + (t / sqb[l + 1]) * b1 - (sqb[l + 1] / sqb[l + 2]) * b2
        b2 = b1
        b1 = b0
    return p0val * b1


@njit(cache=True, parallel=True, fastmath=True)
def ultra_clenshaw(tvals, dcoef, sqb, p0val, out):
    for i in prange(tvals.shape[0]):
        out[i] = _clenshaw_scalar(tvals[i], dcoef, sqb, p0val)


@njit(cache=True, parallel=True, fastmath=True)
def ultra_kernel_sum(probes, pts, yvals, dcoef, sqb, p0val, out):
    # out_i = sum_j yvals_j * S(probe_i . pt_j), dot products clamped to [-1,1]
    P = probes.shape[0]
    M = pts.shape[0]
    d = probes.shape[1]
    for i in prange(P):
        acc = 0.0
        for j in range(M):
            t = 0.0
            for k in range(d):
                t += probes[i, k] * pts[j, k]
            if t > 1.0:
                t = 1.0
            elif t < -1.0:
                t = -1.0
            acc += yvals[j] * _clenshaw_scalar(t, dcoef, sqb, p0val)
        out[i] = acc


# ---------------------------------------------------------------------------
# univariate torus kernels via Chebyshev Clenshaw:
#   first-kind series  C(r) = hc[0] + sum_{l>=1} hc[l] T_l(cos r)
#   second-kind series S(r) = sin(r) * sum_{l>=1} hc[l] U_{l-1}(cos r)
# ---------------------------------------------------------------------------

@njit(cache=True, fastmath=True, inline="always")
def _cheb_series(t, hc):
    L = hc.shape[0] - 1
    b1 = 0.0
    b2 = 0.0
    for l in range(L, 0, -1):
        b0 = hc[l] + 2.0 * t * b1 - b2
        b2 = b1
        b1 = b0
    return hc[0] + t * b1 - b2


@njit(cache=True, fastmath=True, inline="always")
def _chebu_series(t, hc):
    # sum_{l>=1} hc[l] U_{l-1}(t)
    L = hc.shape[0] - 1
    b1 = 0.0
    b2 = 0.0
    for l in range(L, 0, -1):
        b0 = hc[l] + 2.0 * t * b1 - b2
        b2 = b1
        b1 = b0
    return b1


@njit(cache=True, parallel=True, fastmath=True)
def cheb_kernel_sum(xprobe, xdata, yvals, hc, out):
    # out_i = sum_j yvals_j * (hc[0] + 2 sum_{l>=1} hc[l] cos(l (xprobe_i - xdata_j)))
    P = xprobe.shape[0]
    M = xdata.shape[0]
    for i in prange(P):
        acc = 0.0
        xi = xprobe[i]
        for j in range(M):
            t = np.cos(xi - xdata[j])
            c = _cheb_series(t, hc)
            acc += yvals[j] * (2.0 * c - hc[0])
        out[i] = acc


@njit(cache=True, parallel=True, fastmath=True)
def lattice_kernel_sum(xprobe, centers, yvals, kvecs, hvals, out):
    # torus q>=2: out_i = sum_j y_j sum_m hvals_m cos(k_m . (x_i - c_j))
    # (kvecs lists one representative per +-k pair, hvals carries the pairing weight)
    P = xprobe.shape[0]
    M = centers.shape[0]
    K = kvecs.shape[0]
    q = xprobe.shape[1]
    for i in prange(P):
        acc = 0.0
        for j in range(M):
            s = 0.0
            for m in range(K):
                dot = 0.0
                for c in range(q):
                    dot += kvecs[m, c] * (xprobe[i, c] - centers[j, c])
                s += hvals[m] * np.cos(dot)
            acc += yvals[j] * s
        out[i] = acc


@njit(cache=True, parallel=True, fastmath=True)
def lattice_phi(xprobe, kvecs, hvals, out):
    P = xprobe.shape[0]
    K = kvecs.shape[0]
    q = xprobe.shape[1]
    for i in prange(P):
        s = 0.0
        for m in range(K):
            dot = 0.0
            for c in range(q):
                dot += kvecs[m, c] * xprobe[i, c]
            s += hvals[m] * np.cos(dot)
        out[i] = s


# ---------------------------------------------------------------------------
# support-estimation kernel sums (squared cosine-sum kernel)
#   inner(r) = sum_{l=0}^{n} hc[l] cos(l r); value = inner^2, or
#   inner^2 + (sum hc[l] sin(l r))^2 in modulus mode
# ---------------------------------------------------------------------------

@njit(cache=True, fastmath=True, inline="always")
def _psi_val(rho, hc, modulus):
    t = np.cos(rho)
    c = _cheb_series(t, hc)
    v = c * c
    if modulus:
        s = np.sin(rho) * _chebu_series(t, hc)
        v += s * s
    return v


@njit(cache=True, parallel=True, fastmath=True)
def psi_sum_torus(xprobe, xdata, hc, modulus, out):
    P = xprobe.shape[0]
    M = xdata.shape[0]
    two_pi = 2.0 * np.pi
    for i in prange(P):
        acc = 0.0
        xi = xprobe[i]
        for j in range(M):
            d = np.abs(xi - xdata[j]) % two_pi
            if d > np.pi:
                d = two_pi - d
            acc += _psi_val(d, hc, modulus)
        out[i] = acc


@njit(cache=True, parallel=True, fastmath=True)
def psi_sum_euclid(xprobe, xdata, scale, hc, modulus, out):
    P = xprobe.shape[0]
    M = xdata.shape[0]
    d = xprobe.shape[1]
    for i in prange(P):
        acc = 0.0
        for j in range(M):
            s = 0.0
            for k in range(d):
                diff = xprobe[i, k] - xdata[j, k]
                s += diff * diff
            rho = scale * np.sqrt(s)
            if rho > np.pi:
                rho = np.pi
            acc += _psi_val(rho, hc, modulus)
        out[i] = acc


# ---------------------------------------------------------------------------
# metric helpers; metric codes: 0 = euclidean, 1 = torus max-norm (wrapped),
# 2 = sphere geodesic (arccos of dot)
# ---------------------------------------------------------------------------

@njit(cache=True, fastmath=True, inline="always")
def _dist(a, b, code):
    if code == 1:
        two_pi = 2.0 * np.pi
        m = 0.0
        for k in range(a.shape[0]):
            d = np.abs(a[k] - b[k]) % two_pi
            if d > np.pi:
                d = two_pi - d
            if d > m:
                m = d
        return m
    if code == 2:
        t = 0.0
        for k in range(a.shape[0]):
            t += a[k] * b[k]
        if t > 1.0:
            t = 1.0
        elif t < -1.0:
            t = -1.0
        return np.arccos(t)
    s = 0.0
    for k in range(a.shape[0]):
        d = a[k] - b[k]
        s += d * d
    return np.sqrt(s)


@njit(cache=True, parallel=True, fastmath=True)
def min_pairwise(pts, code):
    M = pts.shape[0]
    nt = get_num_threads()
    best = np.full(nt, np.inf)
    chunk = (M + nt - 1) // nt
    for t in prange(nt):
        lo = t * chunk
        hi = min(M, lo + chunk)
        b = np.inf
        for i in range(lo, hi):
            for j in range(i + 1, M):
                d = _dist(pts[i], pts[j], code)
                if d < b:
                    b = d
        best[t] = b
    out = np.inf
    for t in range(nt):
        if best[t] < out:
            out = best[t]
    return out


@njit(cache=True, parallel=True, fastmath=True)
def nearest_dists(probes, pts, code, out):
    # out_i = min_j dist(probe_i, pt_j)
    P = probes.shape[0]
    M = pts.shape[0]
    for i in prange(P):
        b = np.inf
        for j in range(M):
            d = _dist(probes[i], pts[j], code)
            if d < b:
                b = d
        out[i] = b


@njit(cache=True)
def single_linkage(pts, eta, code):
    # union-find over all pairs at distance < eta; labels canonicalized by
    # first appearance so the output is independent of merge order
    M = pts.shape[0]
    parent = np.arange(M)
    for i in range(M):
        for j in range(i + 1, M):
            if _dist(pts[i], pts[j], code) < eta:
                ri = i
                while parent[ri] != ri:
                    ri = parent[ri]
                rj = j
                while parent[rj] != rj:
                    rj = parent[rj]
                if ri != rj:
                    if ri < rj:
                        parent[rj] = ri
                    else:
                        parent[ri] = rj
    labels = np.empty(M, dtype=np.int64)
    nxt = 0
    for i in range(M):
        r = i
        while parent[r] != r:
            r = parent[r]
        if r == i:
            labels[i] = nxt
            nxt += 1
        else:
            labels[i] = labels[r]
    return labels
