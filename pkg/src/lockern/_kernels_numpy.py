"""Pure-numpy fallbacks for the hot kernels in ``_kernels_numba``.

Same function names and signatures as the numba module.  Vectorized over
points and chunked so peak memory stays around a hundred MB regardless of
problem size.
"""

import numpy as np

_CHUNK = 4096


def _harm_block(px, py, pz, lmax, ra, rb, sect):
    """Harmonic design block, shape (npts, (lmax+1)^2)."""
    n = px.shape[0]
    dim = (lmax + 1) * (lmax + 1)
    out = np.empty((n, dim))
    st = np.sqrt(np.maximum(0.0, 1.0 - pz * pz))
    safe = st > 1e-300
    cphi = np.where(safe, px / np.where(safe, st, 1.0), 1.0)
    sphi = np.where(safe, py / np.where(safe, st, 1.0), 0.0)
    sqrt2 = np.sqrt(2.0)
    qmm = np.ones(n)
    cm = np.ones(n)
    sm = np.zeros(n)
    for m in range(lmax + 1):
        if m > 0:
            qmm = qmm * st * sect[m]
            cm, sm = cm * cphi - sm * sphi, sm * cphi + cm * sphi
        qprev = np.zeros(n)
        qcur = qmm.copy()
        for l in range(m, lmax + 1):
            if l > m:
                qnew = ra[l, m] * (pz * qcur - rb[l, m] * qprev)
                qprev, qcur = qcur, qnew
            base = l * l
            if m == 0:
                out[:, base] = qcur
            else:
                v = sqrt2 * qcur
                out[:, base + 2 * m - 1] = v * cm
                out[:, base + 2 * m] = v * sm
    return out


def harmonic_matrix(px, py, pz, lmax, ra, rb, sect, out):
    M = px.shape[0]
    for lo in range(0, M, _CHUNK):
        hi = min(M, lo + _CHUNK)
        out[lo:hi] = _harm_block(px[lo:hi], py[lo:hi], pz[lo:hi], lmax, ra, rb, sect)


def harmonic_gram_apply(px, py, pz, lmax, ra, rb, sect, zvec, out):
    dim = (lmax + 1) * (lmax + 1)
    acc = np.zeros(dim)
    M = px.shape[0]
    for lo in range(0, M, _CHUNK):
        hi = min(M, lo + _CHUNK)
        V = _harm_block(px[lo:hi], py[lo:hi], pz[lo:hi], lmax, ra, rb, sect)
        acc += V.T @ (V @ zvec)
    out[:] = acc


def harmonic_moments(px, py, pz, lmax, ra, rb, sect, vals, out):
    dim = (lmax + 1) * (lmax + 1)
    acc = np.zeros(dim)
    M = px.shape[0]
    for lo in range(0, M, _CHUNK):
        hi = min(M, lo + _CHUNK)
        V = _harm_block(px[lo:hi], py[lo:hi], pz[lo:hi], lmax, ra, rb, sect)
        acc += V.T @ vals[lo:hi]
    out[:] = acc


def harmonic_poly_eval(px, py, pz, lmax, ra, rb, sect, coef, out):
    M = px.shape[0]
    for lo in range(0, M, _CHUNK):
        hi = min(M, lo + _CHUNK)
        V = _harm_block(px[lo:hi], py[lo:hi], pz[lo:hi], lmax, ra, rb, sect)
        out[lo:hi] = V @ coef


def _clenshaw_arr(t, dcoef, sqb, p0val):
    L = dcoef.shape[0] - 1
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    for l in range(L, -1, -1):
        b0 = dcoef[l] + (t / sqb[l + 1]) * b1 - (sqb[l + 1] / sqb[l + 2]) * b2
        b2 = b1
        b1 = b0
    return p0val * b1


def ultra_clenshaw(tvals, dcoef, sqb, p0val, out):
    out[:] = _clenshaw_arr(tvals, dcoef, sqb, p0val)


def ultra_kernel_sum(probes, pts, yvals, dcoef, sqb, p0val, out):
    P = probes.shape[0]
    M = pts.shape[0]
    cols = max(1, int(2e6) // max(P, 1))
    acc = np.zeros(P)
    for lo in range(0, M, cols):
        hi = min(M, lo + cols)
        t = np.clip(probes @ pts[lo:hi].T, -1.0, 1.0)
        acc += _clenshaw_arr(t, dcoef, sqb, p0val) @ yvals[lo:hi]
    out[:] = acc


def _cheb_arr(t, hc):
    L = hc.shape[0] - 1
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    for l in range(L, 0, -1):
        b0 = hc[l] + 2.0 * t * b1 - b2
        b2 = b1
        b1 = b0
    return hc[0] + t * b1 - b2


def _chebu_arr(t, hc):
    L = hc.shape[0] - 1
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    for l in range(L, 0, -1):
        b0 = hc[l] + 2.0 * t * b1 - b2
        b2 = b1
        b1 = b0
    return b1


def cheb_kernel_sum(xprobe, xdata, yvals, hc, out):
    P = xprobe.shape[0]
    M = xdata.shape[0]
    cols = max(1, int(2e6) // max(P, 1))
    acc = np.zeros(P)
    for lo in range(0, M, cols):
        hi = min(M, lo + cols)
        t = np.cos(xprobe[:, None] - xdata[None, lo:hi])
        acc += (2.0 * _cheb_arr(t, hc) - hc[0]) @ yvals[lo:hi]
    out[:] = acc


def lattice_kernel_sum(xprobe, centers, yvals, kvecs, hvals, out):
    P = xprobe.shape[0]
    acc = np.zeros(P)
    for j in range(centers.shape[0]):
        phase = (xprobe - centers[j]) @ kvecs.T
        acc += yvals[j] * (np.cos(phase) @ hvals)
    out[:] = acc


def lattice_phi(xprobe, kvecs, hvals, out):
    out[:] = np.cos(xprobe @ kvecs.T) @ hvals


def _psi_block(rho, hc, modulus):
    t = np.cos(rho)
    c = _cheb_arr(t, hc)
    v = c * c
    if modulus:
        s = np.sin(rho) * _chebu_arr(t, hc)
        v += s * s
    return v


def psi_sum_torus(xprobe, xdata, hc, modulus, out):
    P = xprobe.shape[0]
    M = xdata.shape[0]
    cols = max(1, int(2e6) // max(P, 1))
    acc = np.zeros(P)
    for lo in range(0, M, cols):
        hi = min(M, lo + cols)
        d = np.abs(xprobe[:, None] - xdata[None, lo:hi]) % (2 * np.pi)
        d = np.where(d > np.pi, 2 * np.pi - d, d)
        acc += _psi_block(d, hc, modulus).sum(axis=1)
    out[:] = acc


def psi_sum_euclid(xprobe, xdata, scale, hc, modulus, out):
    P = xprobe.shape[0]
    M = xdata.shape[0]
    cols = max(1, int(2e6) // max(P, 1))
    acc = np.zeros(P)
    for lo in range(0, M, cols):
        hi = min(M, lo + cols)
        diff = xprobe[:, None, :] - xdata[None, lo:hi, :]
        rho = np.minimum(scale * np.sqrt((diff * diff).sum(axis=2)), np.pi)
        acc += _psi_block(rho, hc, modulus).sum(axis=1)
    out[:] = acc


def _dist_block(A, B, code):
    if code == 1:
        d = np.abs(A[:, None, :] - B[None, :, :]) % (2 * np.pi)
        d = np.where(d > np.pi, 2 * np.pi - d, d)
        return d.max(axis=2)
    if code == 2:
        return np.arccos(np.clip(A @ B.T, -1.0, 1.0))
    diff = A[:, None, :] - B[None, :, :]
    return np.sqrt((diff * diff).sum(axis=2))


def min_pairwise(pts, code):
    M = pts.shape[0]
    best = np.inf
    step = max(1, int(4e6) // max(M, 1))
    for lo in range(0, M, step):
        hi = min(M, lo + step)
        D = _dist_block(pts[lo:hi], pts, code)
        for r in range(hi - lo):
            D[r, lo + r] = np.inf
        best = min(best, D.min())
    return best


def nearest_dists(probes, pts, code, out):
    P = probes.shape[0]
    step = max(1, int(4e6) // max(pts.shape[0], 1))
    for lo in range(0, P, step):
        hi = min(P, lo + step)
        out[lo:hi] = _dist_block(probes[lo:hi], pts, code).min(axis=1)


def single_linkage(pts, eta, code):
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    M = pts.shape[0]
    rows = []
    cols_ = []
    step = max(1, int(4e6) // max(M, 1))
    for lo in range(0, M, step):
        hi = min(M, lo + step)
        D = _dist_block(pts[lo:hi], pts, code)
        r, c = np.nonzero(D < eta)
        rows.append(r + lo)
        cols_.append(c)
    r = np.concatenate(rows)
    c = np.concatenate(cols_)
    adj = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(M, M))
    _, raw = connected_components(adj, directed=False)
    # canonicalize: relabel by order of first appearance
    labels = np.empty(M, dtype=np.int64)
    seen = {}
    for i in range(M):
        key = raw[i]
        if key not in seen:
            seen[key] = len(seen)
        labels[i] = seen[key]
    return labels
