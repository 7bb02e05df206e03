import numpy as np
import pytest

from lockern.filters import QUINTIC, SHARP
from lockern.torus import (FourierExpansion, TorusSamples, fourier_partial_sum,
                           grid_coeffs, kernel_phi, local_smoothness,
                           monte_carlo_sigma, sigma_n, tau_j, torus_grid_samples,
                           wavelet_expand)
from invariants import (torus_frame_telescoping, torus_localization,
                        torus_parseval_roundtrip, torus_reproduction)


def test_grid_coeffs_examples():
    s = torus_grid_samples(lambda x: np.exp(1j * 3 * x), 1, 16)
    c = grid_coeffs(s, 8)
    assert abs(c.coeff(3) - 1.0) < 1e-12
    others = [abs(v) for k, v in c.coefficients.items() if k != (3,)]
    assert max(others) < 1e-12

    s2 = torus_grid_samples(lambda p: np.ones(len(p)), 2, 8)
    c2 = grid_coeffs(s2, 4)
    assert abs(c2.coeff((0, 0)) - 1.0) < 1e-12

    s3 = torus_grid_samples(np.cos, 1, 8)
    c3 = grid_coeffs(s3, 4)
    assert abs(c3.coeff(1) - 0.5) < 1e-14
    assert abs(c3.coeff(-1) - 0.5) < 1e-14


def test_grid_coeffs_errors(rng):
    pts = rng.uniform(0, 2 * np.pi, 16)
    s = TorusSamples(1, pts, np.cos(pts))
    with pytest.raises(ValueError):
        grid_coeffs(s, 4)
    g = torus_grid_samples(np.cos, 1, 8)
    with pytest.raises(ValueError):
        grid_coeffs(g, 5)   # band above N/2


def test_kernel_phi_examples():
    for n in (4, 8, 16):
        assert kernel_phi(1, n, SHARP, 0.0) == pytest.approx(2 * n - 1, rel=1e-12)
    # direct-summation oracle at x = pi
    n = 8
    ks = np.arange(1, n)
    h = np.array([1.0 if k / n <= 0.5 else
                  1 - ((2 * k / n - 1) ** 3 * (10 - 15 * (2 * k / n - 1) + 6 * (2 * k / n - 1) ** 2))
                  for k in ks])
    oracle = 1.0 + 2.0 * float((h * np.cos(ks * np.pi)).sum())
    assert kernel_phi(1, n, QUINTIC, np.pi) == pytest.approx(oracle, abs=1e-12)


@pytest.mark.parametrize("q,n", [(1, 8), (2, 4)])
def test_kernel_phi_mean_is_one(q, n):
    # only the zero frequency survives averaging over an exact grid
    N = 4 * n
    axes = [2 * np.pi * np.arange(N) / N] * q
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, q)
    vals = kernel_phi(q, n, QUINTIC, grid)
    assert abs(vals.mean() - 1.0) < 1e-10


def test_sigma_reproduces_polynomial(rng):
    s = torus_grid_samples(lambda x: np.exp(2j * x), 1, 32)
    xp = rng.uniform(0, 2 * np.pi, 100)
    v = sigma_n(s, QUINTIC, 8, xp)
    assert np.abs(v - np.exp(2j * xp)).max() < 1e-10
    ones = torus_grid_samples(lambda x: np.ones(len(np.atleast_1d(x))), 1, 32)
    v1 = np.asarray(sigma_n(ones, QUINTIC, 8, xp)).real
    assert np.abs(v1 - 1.0).max() < 1e-10


def test_sigma_needs_weights(rng):
    pts = rng.uniform(0, 2 * np.pi, 64)
    s = TorusSamples(1, pts, np.cos(pts))
    with pytest.raises(ValueError):
        sigma_n(s, QUINTIC, 8, 0.3)


def test_sigma_fft_matches_direct(rng):
    s = torus_grid_samples(lambda x: np.abs(np.sin(x)), 1, 128)
    xp = rng.uniform(0, 2 * np.pi, 40)
    a = np.asarray(sigma_n(s, QUINTIC, 16, xp, prefer_fft=True)).real
    b = np.asarray(sigma_n(s, QUINTIC, 16, xp, prefer_fft=False))
    assert np.abs(a - b).max() < 1e-10


def test_monte_carlo_constant(rng):
    M = 100_000
    pts = rng.uniform(0, 2 * np.pi, M)
    data = TorusSamples(1, pts, np.ones(M))
    probes = rng.uniform(0, 2 * np.pi, 50)
    v = monte_carlo_sigma(data, QUINTIC, 16, probes)
    assert np.abs(v - 1.0).max() < 0.05


def test_monte_carlo_noisy_cosine(rng):
    M = 200_000
    pts = rng.uniform(0, 2 * np.pi, M)
    y = np.cos(pts) + rng.normal(0, 0.1, M)
    data = TorusSamples(1, pts, y)
    grid = 2 * np.pi * np.arange(256) / 256
    v = monte_carlo_sigma(data, QUINTIC, 8, grid)
    assert np.abs(v - np.cos(grid)).max() <= 0.1


def test_monte_carlo_empty():
    data = TorusSamples(1, np.zeros(0), np.zeros(0))
    with pytest.raises(ValueError):
        monte_carlo_sigma(data, QUINTIC, 8, 0.0)


def test_tau_annihilates_low_frequencies(rng):
    j = 4
    k = 2 ** (j - 2)          # inside the flat region at both scales
    s = torus_grid_samples(lambda x: np.exp(1j * k * x), 1, 256)
    xp = rng.uniform(0, 2 * np.pi, 32)
    v = tau_j(s, QUINTIC, j, xp)
    assert np.abs(v).max() < 1e-10
    # |k| = 2^j sits where both filters vanish
    k2 = 2 ** j
    s2 = torus_grid_samples(lambda x: np.exp(1j * k2 * x), 1, 256)
    v2 = tau_j(s2, QUINTIC, j, xp)
    assert np.abs(v2).max() < 1e-10


def test_tau_decay_on_smooth_window():
    f = lambda x: np.abs(np.cos(x)) ** 0.25
    data = torus_grid_samples(f, 1, 4096)
    # window well away from the kinks at +-pi/2
    window = np.linspace(-0.4, 0.4, 101) % (2 * np.pi)
    sups = []
    for j in range(4, 8):
        sups.append(float(np.abs(np.asarray(tau_j(data, QUINTIC, j, window))).max()))
    assert all(a > b for a, b in zip(sups, sups[1:])), sups


def test_frame_telescoping():
    torus_frame_telescoping(0)


def test_reproduction_invariant():
    torus_reproduction(0)


def test_localization_invariant():
    torus_localization()


def test_parseval_roundtrip():
    torus_parseval_roundtrip(0)


def test_wavelet_exact_on_polynomials(rng):
    J = 5
    deg = 2 ** (J - 1) - 1
    ks = np.arange(1, deg + 1)
    a = rng.normal(size=deg)
    f = lambda x: 1.0 + np.cos(np.outer(np.atleast_1d(x), ks)) @ a
    data = torus_grid_samples(lambda x: f(x).ravel(), 1, 2 ** (J + 3))
    xp = rng.uniform(0, 2 * np.pi, 64)
    v = np.asarray(wavelet_expand(data, QUINTIC, J, xp))
    assert np.abs(v - f(xp).ravel()).max() < 1e-8


def test_wavelet_levels_improve():
    f = lambda x: np.abs(np.sin(x))
    grid = 2 * np.pi * np.arange(512) / 512
    errs = {}
    for J in (5, 7):
        data = torus_grid_samples(f, 1, 2 ** (J + 3))
        v = np.asarray(wavelet_expand(data, QUINTIC, J, grid))
        errs[J] = np.abs(v - f(grid)).max()
    assert errs[7] <= errs[5]


def test_wavelet_base_level(rng):
    f = lambda x: 0.7 + np.cos(x)
    data = torus_grid_samples(f, 1, 8)
    xp = rng.uniform(0, 2 * np.pi, 16)
    v = np.asarray(wavelet_expand(data, QUINTIC, 0, xp))
    expect = np.asarray(sigma_n(data, QUINTIC, 1, xp)).real
    assert np.abs(v - expect).max() < 1e-12


def test_local_smoothness_orders_singularities():
    f = lambda x: np.abs(np.cos(x)) ** 0.25
    data = torus_grid_samples(f, 1, 4096)
    g_sing = local_smoothness(data, QUINTIC, np.pi / 2, range(4, 9))
    g_smooth = local_smoothness(data, QUINTIC, 0.0, range(4, 9))
    assert g_sing < g_smooth

    f2 = lambda x: np.abs(np.sin(x))
    data2 = torus_grid_samples(f2, 1, 4096)
    assert (local_smoothness(data2, QUINTIC, 0.0, range(4, 9))
            < local_smoothness(data2, QUINTIC, np.pi / 2, range(4, 9)))


def test_local_smoothness_sentinel(rng):
    ks = np.arange(1, 9)
    a = rng.normal(size=8)
    f = lambda x: np.cos(np.outer(np.atleast_1d(x), ks)) @ a
    data = torus_grid_samples(lambda x: f(x).ravel(), 1, 2048)
    assert local_smoothness(data, QUINTIC, 1.0, range(5, 9)) == float("inf")


def test_fourier_partial_sum_inclusive():
    s = torus_grid_samples(lambda x: np.cos(4 * x), 1, 64)
    c = grid_coeffs(s, 16)
    x = np.array([0.3])
    incl = fourier_partial_sum(c, 4, x, inclusive=True)
    excl = fourier_partial_sum(c, 4, x, inclusive=False)
    assert abs(incl[0].real - np.cos(1.2)) < 1e-12
    assert abs(excl[0].real) < 1e-12
