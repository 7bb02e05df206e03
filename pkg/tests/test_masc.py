import numpy as np
import pytest

from lockern.datasets import circle_ellipse, example10_1, substream, three_moons
from lockern.experiments import masc_circle_ellipse_run, masc_moons_run, mixture_support_run
from lockern.filters import QUINTIC
from lockern.masc import (MascConfig, MetricCloud, active_label, cluster,
                          detectability_profile, masc_pipeline, psi_kernel,
                          support_estimate, threshold_set)
from invariants import masc_invariants


def test_psi_kernel_examples():
    n = 16
    hc_sum = sum(psi_kernel(n, QUINTIC, 0.0) ** 0 for _ in range(1))  # placeholder
    ls = np.arange(n + 1) / n
    from lockern.filters import eval_filter
    expect = float(eval_filter(QUINTIC, ls).sum()) ** 2
    assert psi_kernel(n, QUINTIC, 0.0) == pytest.approx(expect, rel=1e-12)


def test_psi_kernel_nonnegative(rng):
    for _ in range(10):
        n = int(rng.integers(4, 200))
        rho = rng.uniform(0, np.pi, 1000)
        assert np.all(psi_kernel(n, QUINTIC, rho) >= -1e-12)


def test_psi_kernel_localization():
    # the far value at pi/2 is exactly 1/4 (alternating cosine sums), so the
    # main-lobe ratios are 8.5e3 at rho = 0.02 and 2.7e4 at rho = 0.01
    far = psi_kernel(128, QUINTIC, np.pi / 2)
    assert far == pytest.approx(0.25, rel=1e-9)
    assert psi_kernel(128, QUINTIC, 0.02) / far >= 5e3
    assert psi_kernel(128, QUINTIC, 0.01) / far >= 1e4


def test_psi_kernel_modulus_mode():
    r = np.linspace(0, np.pi, 50)
    real2 = psi_kernel(64, QUINTIC, r)
    mod2 = psi_kernel(64, QUINTIC, r, mode="modulus_squared")
    assert np.all(mod2 >= real2 - 1e-12)
    with pytest.raises(ValueError):
        psi_kernel(16, QUINTIC, 3.5)


def test_support_estimate_symmetry():
    a = MetricCloud.torus(np.array([0.3]))
    b = MetricCloud.torus(np.array([1.1]))
    fa = support_estimate(a, 32, QUINTIC, probes=np.array([1.1])).f_probes[0]
    fb = support_estimate(b, 32, QUINTIC, probes=np.array([0.3])).f_probes[0]
    assert fa == pytest.approx(fb, rel=1e-14)


def test_single_point_peak():
    cloud = MetricCloud.torus(np.array([2.0]))
    probes = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    est = support_estimate(cloud, 32, QUINTIC, probes=probes)
    peak = probes[np.argmax(est.f_probes)]
    assert min(abs(peak - 2.0), 2 * np.pi - abs(peak - 2.0)) < 2 * np.pi / 256 + 1e-12


def test_uniform_torus_flatness(rng):
    pts = rng.uniform(0, 2 * np.pi, 100_000)
    cloud = MetricCloud.torus(pts)
    probes = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    est = support_estimate(cloud, 32, QUINTIC, probes=probes)
    F = est.f_probes
    assert (F.max() - F.min()) / F.mean() < 0.2


def test_threshold_edges(rng):
    pts = rng.normal(0, 0.3, 500)
    cloud = MetricCloud.torus(pts)
    est = support_estimate(cloud, 32, QUINTIC)
    tiny = threshold_set(est, 1e-9)
    assert len(tiny.sample_indices) == len(pts)
    top = threshold_set(est, 0.999999)
    argmax = int(np.argmax(est.f_samples))
    assert argmax in top.sample_indices
    assert len(top.sample_indices) <= 5
    with pytest.raises(ValueError):
        threshold_set(est, 1.0)


def test_cluster_separation_cases():
    pts = np.array([0.0, 0.9])          # distance 0.9 = 3 eta for eta = 0.3
    cloud = MetricCloud.torus(pts)
    part = cluster(cloud, np.array([0, 1]), 0.3)
    assert len(part.clusters) == 2
    chain = MetricCloud.torus(np.arange(10) * 0.15)
    part2 = cluster(chain, np.arange(10), 0.3)
    assert len(part2.clusters) == 1
    with pytest.raises(ValueError):
        cluster(chain, np.arange(10), 0.0)


def test_active_label_single_cluster(rng):
    pts = rng.normal(1.0, 0.05, 200)
    cloud = MetricCloud.torus(pts)
    est = support_estimate(cloud, 64, QUINTIC)
    part = cluster(cloud, threshold_set(est, 0.05).sample_indices, 0.5)
    assert len(part.clusters) == 1
    calls = []

    def oracle(i):
        calls.append(i)
        return 7

    labels, queries = active_label(part, oracle, 10, est.f_samples, cloud)
    assert len(queries) == 1 and len(calls) == 1
    assert np.all(labels == 7)


def test_active_label_budget(rng):
    pts = np.concatenate([rng.normal(0.5, 0.02, 50), rng.normal(2.5, 0.02, 50),
                          rng.normal(4.5, 0.02, 50)])
    cloud = MetricCloud.torus(pts)
    est = support_estimate(cloud, 64, QUINTIC)
    part = cluster(cloud, threshold_set(est, 0.05).sample_indices, 0.5)
    assert len(part.clusters) == 3
    labels, queries = active_label(part, lambda i: 1, 2, est.f_samples, cloud)
    assert len(queries) == 2
    assert (labels == -1).any()          # one cluster stays unlabeled


def test_pipeline_two_blobs(rng):
    pts = np.concatenate([rng.normal(0, 0.05, size=(300, 2)),
                          rng.normal(2.0, 0.05, size=(300, 2)) ])
    truth = np.concatenate([np.zeros(300, int), np.ones(300, int)])
    cloud = MetricCloud.euclidean(pts)
    cfg = MascConfig(n=64, theta=0.05, eta=0.4, budget=8)
    res = masc_pipeline(cloud, lambda i: int(truth[i]), cfg)
    assert len(res["queries"]) == 2
    assert np.array_equal(res["labels"], truth)


def test_pipeline_empty():
    cloud = MetricCloud.torus(np.zeros(0))
    with pytest.raises(ValueError):
        masc_pipeline(cloud, lambda i: 0, MascConfig())


def test_moons_experiment():
    res = masc_moons_run()
    assert res["clusters"] == 3
    assert res["queries"] == 3
    assert res["accuracy"] == 1.0


def test_circle_ellipse_experiment():
    res = masc_circle_ellipse_run()
    assert res["queries"] <= 40
    assert res["accuracy"] >= 0.75


def test_mixture_support_experiment():
    res = mixture_support_run()
    tol = 4 * (2 * np.pi / 128)
    assert all(d < tol for d in res["atom_peak_dists"].values())
    assert all(res["coverage"])
    assert res["clusters_at_doc_params"] == 5


def test_detectability_diagnostic(rng):
    # uniform arc: ball mass grows linearly, so the ratio profile stays in a
    # narrow band (reported, not asserted beyond sanity)
    pts = rng.uniform(0.0, 1.0, 4000)
    cloud = MetricCloud.torus(pts)
    radii = np.linspace(0.02, 0.3, 8)
    prof = detectability_profile(cloud, 0, radii, dim_exponent=1)
    assert np.all(np.isfinite(prof)) and np.all(prof > 0)
    assert prof.max() / prof.min() < 10


def test_invariants():
    masc_invariants(0)
