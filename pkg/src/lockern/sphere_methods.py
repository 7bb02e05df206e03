"""Spherical approximation methods and the error-percentile benchmarks.

Five fits of a degree-n spherical polynomial to scattered labeled points:

    LS    least squares on the harmonic basis through degree n-1
    MS1   sample-projection coefficients, sharp cutoff filter
    MS5   sample-projection coefficients, quintic filter
    QS1   quadrature-weighted coefficients, sharp cutoff filter
    QS5   quadrature-weighted coefficients, quintic filter

"Sample projection" estimates the harmonic coefficients from the random
sample itself (the least-squares normal equations); with the sharp filter it
coincides with LS exactly, which is why the two rows of the benchmark table
agree digit for digit.  A plain Monte-Carlo average of y_j Y(x_j) is also
available (estimator="plain") but its noise floor at this sample size is
O(1); see monte_carlo notes in the manifold module for the averaging regime.
"""

import math
from dataclasses import dataclass

import numpy as np

from .filters import QUINTIC, SHARP
from .quadrature import PointCloud, QuadratureError, solve_weights
from .sphere import degree_filter_vector, harmonic_basis

METHODS = ("LS", "MS1", "QS1", "MS5", "QS5")
THRESHOLD_EXPONENTS = tuple(range(2, 11))


@dataclass(frozen=True)
class ApproxModel:
    """Fitted degree-n model: a coefficient vector over the harmonic basis."""
    method: str
    n: int
    coeffs: np.ndarray

    def evaluate(self, pts):
        basis = harmonic_basis(self.n - 1)
        return basis.synth(pts, self.coeffs)


@dataclass(frozen=True)
class ErrorHistogram:
    """Percent of test points with error below 10^-x for x = 2..10."""
    thresholds: tuple
    percent_below: tuple

    def as_dict(self):
        return {f"1e-{x}": p for x, p in
                zip(THRESHOLD_EXPONENTS, self.percent_below)}


def error_table(model_or_values, truth_values, test_pts=None):
    """Error histogram of a model (or precomputed predictions) on test data."""
    if isinstance(model_or_values, ApproxModel):
        pred = model_or_values.evaluate(test_pts)
    else:
        pred = np.asarray(model_or_values, dtype=float)
    err = np.abs(pred - np.asarray(truth_values, dtype=float))
    pct = tuple(100.0 * float(np.mean(err < 10.0 ** (-x)))
                for x in THRESHOLD_EXPONENTS)
    return ErrorHistogram(thresholds=tuple(10.0 ** (-x) for x in THRESHOLD_EXPONENTS),
                          percent_below=pct)


def _ls_coeffs(basis, pts, y, rel_tol=1e-12, maxit=300):
    """Least-squares coefficients by conjugate gradients on the Gram operator."""
    rhs = basis.moments(pts, y)
    c = np.zeros(basis.dim)
    r = rhs.copy()
    p = r.copy()
    rs = float(r @ r)
    stop = rel_tol * math.sqrt(rs)
    for _ in range(maxit):
        Ap = basis.gram_apply(pts, p)
        denom = float(p @ Ap)
        if denom <= 0:
            raise np.linalg.LinAlgError("normal equations are rank deficient")
        alpha = rs / denom
        c += alpha * p
        r -= alpha * Ap
        rs_new = float(r @ r)
        if math.sqrt(rs_new) < stop:
            break
        p = r + (rs_new / rs) * p
        rs = rs_new
    return c


def fit(method, pts, y, n, rule=None, estimator="projection", cg_tol=1e-11):
    """Fit one of the five methods at degree n to labeled sphere points.

    QS methods need a quadrature rule on the sample points (solved at order
    2n when not supplied).  estimator="plain" switches the MS methods to the
    raw Monte-Carlo coefficient average.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    pts = np.ascontiguousarray(pts, dtype=float)
    y = np.asarray(y, dtype=float)
    M = len(pts)
    basis = harmonic_basis(n - 1)
    if method == "LS" or method.startswith("MS"):
        if method != "LS" and estimator == "plain":
            coeffs = basis.moments(pts, y) / M
        else:
            if M < basis.dim:
                raise np.linalg.LinAlgError(
                    f"least squares needs at least {basis.dim} samples")
            coeffs = _ls_coeffs(basis, pts, y)
    else:
        if rule is None:
            cloud = PointCloud("sphere", 2, pts)
            rule = solve_weights(cloud, 2 * n, cg_tol=cg_tol, maxit=300)
        coeffs = basis.moments(pts, rule.weights * y)
    if method != "LS":
        filt = SHARP if method.endswith("1") else QUINTIC
        coeffs = coeffs * degree_filter_vector(filt, n, n - 1)
    return ApproxModel(method=method, n=n, coeffs=coeffs)


def fit_all(pts, y, n, cg_tol=1e-11, estimator="projection"):
    """All five methods, sharing one quadrature solve and one LS solve."""
    basis = harmonic_basis(n - 1)
    M = len(pts)
    pts = np.ascontiguousarray(pts, dtype=float)
    y = np.asarray(y, dtype=float)
    cloud = PointCloud("sphere", 2, pts)
    rule = solve_weights(cloud, 2 * n, cg_tol=cg_tol, maxit=300)
    cQS = basis.moments(pts, rule.weights * y)
    if estimator == "plain":
        cMS = basis.moments(pts, y) / M
    else:
        cMS = None
    cLS = _ls_coeffs(basis, pts, y)
    if cMS is None:
        cMS = cLS
    f1 = degree_filter_vector(SHARP, n, n - 1)
    f5 = degree_filter_vector(QUINTIC, n, n - 1)
    models = {
        "LS": ApproxModel("LS", n, cLS),
        "MS1": ApproxModel("MS1", n, cMS * f1),
        "QS1": ApproxModel("QS1", n, cQS * f1),
        "MS5": ApproxModel("MS5", n, cMS * f5),
        "QS5": ApproxModel("QS5", n, cQS * f5),
    }
    return models, rule


# ---------------------------------------------------------------------------
# benchmark targets and experiment drivers
# ---------------------------------------------------------------------------

def benchmark_target(pts):
    """Smooth exponential ridge plus a small spherical cap bump near the pole."""
    x1, x2, x3 = pts[:, 0], pts[:, 1], pts[:, 2]
    cap = np.maximum(0.015 - (x1 ** 2 + x2 ** 2 + (x3 - 1.02) ** 2), 0.0)
    return cap + np.exp(0.9 * x1 + 1.1 * x2 + x3)


def remark_target(pts):
    """Two one-sided power ridges, mildly rough along two small circles."""
    return (np.maximum(pts[:, 0] - 0.7, 0.0) ** (5.0 / 6.0)
            + np.maximum(pts[:, 2] - 0.7, 0.0) ** (5.0 / 6.0))


def _uniform_sphere(rng, M):
    p = rng.normal(size=(M, 3))
    return p / np.linalg.norm(p, axis=1, keepdims=True)


def benchmark_table2(seed, n=64, m_train=65536, m_test=20000, cg_tol=1e-11,
                     estimator="projection"):
    """One seeded run of the five-method comparison on the benchmark target.

    Returns a dict with the 5 x 9 percentage table, the quadrature residual,
    and per-point test errors for each method.
    """
    rng = np.random.default_rng(seed)
    train = _uniform_sphere(rng, m_train)
    test = _uniform_sphere(rng, m_test)
    y = benchmark_target(train)
    ytruth = benchmark_target(test)
    try:
        models, rule = fit_all(train, y, n, cg_tol=cg_tol, estimator=estimator)
    except QuadratureError as exc:
        return {"seed": seed, "n": n, "failure": f"quadrature: {exc}"}
    table = {}
    errors = {}
    for name in METHODS:
        pred = models[name].evaluate(test)
        err = np.abs(pred - ytruth)
        errors[name] = err
        table[name] = error_table(pred, ytruth).percent_below
    return {
        "seed": seed,
        "n": n,
        "m_train": m_train,
        "m_test": m_test,
        "threshold_exponents": list(THRESHOLD_EXPONENTS),
        "table": {k: list(v) for k, v in table.items()},
        "quad_residual": rule.moment_residual,
        "errors": errors,
    }


def example_remark79(seed, n=64, m_train=65536, m_test=20000, cg_tol=1e-11):
    """Least squares vs the localized quadrature reconstruction on the
    one-sided power target; reports percentages at 1e-3 and 1e-5."""
    rng = np.random.default_rng(seed)
    train = _uniform_sphere(rng, m_train)
    test = _uniform_sphere(rng, m_test)
    y = remark_target(train)
    ytruth = remark_target(test)
    basis = harmonic_basis(n - 1)
    cloud = PointCloud("sphere", 2, train)
    rule = solve_weights(cloud, 2 * n, cg_tol=cg_tol, maxit=300)
    cQS = basis.moments(train, rule.weights * y) * degree_filter_vector(QUINTIC, n, n - 1)
    cLS = _ls_coeffs(basis, train, y)
    errLS = np.abs(basis.synth(test, cLS) - ytruth)
    errRC = np.abs(basis.synth(test, cQS) - ytruth)
    out = {"seed": seed, "n": n, "quad_residual": rule.moment_residual}
    for tag, err in (("least_squares", errLS), ("reconstruction", errRC)):
        out[tag] = {"1e-3": 100.0 * float(np.mean(err < 1e-3)),
                    "1e-5": 100.0 * float(np.mean(err < 1e-5))}
    return out
