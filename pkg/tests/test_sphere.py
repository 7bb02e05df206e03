import math

import numpy as np
import pytest

from lockern.filters import QUINTIC, SHARP
from lockern.sphere import (gauss_jacobi, harmonic_basis, kernel_build,
                            kernel_from_json, product_rule, ultraspherical_basis,
                            volume_omega)
from invariants import sphere_clenshaw_vs_direct, sphere_localization


def test_volume_examples():
    assert volume_omega(1) == pytest.approx(2 * np.pi, rel=1e-14)
    assert volume_omega(2) == pytest.approx(4 * np.pi, rel=1e-14)
    assert volume_omega(3) == pytest.approx(2 * np.pi ** 2, rel=1e-14)


def test_ultraspherical_low_degrees():
    b = ultraspherical_basis(2, 8)
    t = np.linspace(-1, 1, 11)
    assert np.allclose(b.eval(0, t), 1 / np.sqrt(2), atol=1e-14)
    assert np.allclose(b.eval(1, t), np.sqrt(1.5) * t, atol=1e-14)
    for q in (1, 2, 3):
        bq = ultraspherical_basis(q, 8)
        for l in (1, 3, 5, 7):
            assert bq.eval(l, 0.0) == pytest.approx(0.0, abs=1e-14)


def test_degree_overflow():
    b = ultraspherical_basis(2, 4)
    with pytest.raises(ValueError):
        b.eval(5, 0.1)


@pytest.mark.parametrize("q", [1, 2, 3])
def test_orthonormality_gram(q):
    b = ultraspherical_basis(q, 64)
    nodes, weights = gauss_jacobi(q, 256)
    V = b.values_matrix(nodes)
    G = (V * weights) @ V.T
    assert np.abs(G - np.eye(65)).max() < 1e-8


def test_gauss_jacobi_two_point():
    nodes, weights = gauss_jacobi(2, 2)
    assert np.allclose(np.sort(nodes), [-1 / np.sqrt(3), 1 / np.sqrt(3)], atol=1e-14)
    assert np.allclose(weights, [1.0, 1.0], atol=1e-14)


@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_gauss_jacobi_mass(q):
    nodes, weights = gauss_jacobi(q, 48)
    ratio = volume_omega(q - 1) / volume_omega(q)
    assert abs(ratio * weights.sum() - 1.0) < 1e-12


def test_gauss_jacobi_moments_vs_beta():
    # beta-function moments: int t^(2k) (1-t^2)^(q/2-1) dt = B(k+1/2, q/2)
    q, m = 3, 8
    nodes, weights = gauss_jacobi(q, m)
    for k in range(m):        # even degrees up to 2m-2 < 2m-1
        got = float(weights @ nodes ** (2 * k))
        expect = math.exp(math.lgamma(k + 0.5) + math.lgamma(q / 2)
                          - math.lgamma(k + 0.5 + q / 2))
        assert abs(got - expect) < 1e-12 * max(1, expect)


def test_kernel_at_one_sharp():
    for n in (4, 8, 16):
        k = kernel_build(2, n, SHARP)
        assert k.eval(1.0) == pytest.approx(n ** 2, rel=1e-12)


def test_kernel_localization_ratio():
    k = kernel_build(2, 128, QUINTIC)
    near = abs(k.eval(np.cos(0.05)))
    far = abs(k.eval(np.cos(np.pi / 2)))
    assert near / max(far, 1e-300) >= 1e3


def test_kernel_normalization_integral():
    nodes, weights = gauss_jacobi(2, 128)
    for filt in (QUINTIC, SHARP):
        k = kernel_build(2, 16, filt)
        val = (volume_omega(1) / volume_omega(2)) * float(weights @ k.eval(nodes))
        assert abs(val - 1.0) < 1e-8


def test_kernel_eval_domain():
    k = kernel_build(2, 8, QUINTIC)
    k.eval(1.0 + 5e-13)      # absorbed by the clamp
    with pytest.raises(ValueError):
        k.eval(1.001)


def test_kernel_json_roundtrip():
    k = kernel_build(2, 12, QUINTIC)
    k2 = kernel_from_json(k.to_json())
    t = np.linspace(-1, 1, 64)
    assert np.array_equal(k.eval(t), k2.eval(t))


def test_clenshaw_vs_direct():
    sphere_clenshaw_vs_direct(0)


def test_localization_across_degrees():
    sphere_localization()


def test_harmonics_constant_and_bounds():
    b = harmonic_basis(8)
    x = np.array([0.2, -0.4, np.sqrt(1 - 0.2 ** 2 - 0.4 ** 2)])
    assert b.eval(0, 1, x) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        b.eval(2, 6, x)
    with pytest.raises(ValueError):
        b.eval(9, 1, x)


def test_addition_formula(rng):
    b = harmonic_basis(16)
    u2 = ultraspherical_basis(2, 16)
    X = rng.normal(size=(100, 3))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    Y = rng.normal(size=(100, 3))
    Y /= np.linalg.norm(Y, axis=1, keepdims=True)
    VX = b.matrix(X)
    VY = b.matrix(Y)
    ratio = volume_omega(2) / volume_omega(1)
    worst = 0.0
    for l in range(17):
        sl = slice(l * l, (l + 1) * (l + 1))
        got = (VX[:, sl] * VY[:, sl]).sum(axis=1)
        t = np.clip((X * Y).sum(axis=1), -1, 1)
        expect = ratio * u2.p_at_one[l] * u2.eval(l, t)
        worst = max(worst, float(np.abs(got - expect).max()))
    assert worst < 1e-8


def test_harmonic_means_vanish():
    pts, w = product_rule(24)
    b = harmonic_basis(8)
    V = b.matrix(pts)
    means = w @ V
    assert abs(means[0] - 1.0) < 1e-12
    assert np.abs(means[1:]).max() < 1e-12


def test_product_rule_orthonormality():
    pts, w = product_rule(20)
    b = harmonic_basis(9)
    V = b.matrix(pts)
    G = (V * w[:, None]).T @ V
    assert np.abs(G - np.eye(b.dim)).max() < 1e-12
