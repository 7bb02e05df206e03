"""Zonal |t|^(2 gamma + 1) network synthesis on the sphere.

The kernel |x . y|^(2 gamma + 1) is zonal, so it acts diagonally on harmonic
degrees with eigenvalues B_l (zero for odd l by parity).  Dividing a
polynomial's even-degree coefficients by B_l inverts the kernel transform;
discretizing the resulting integral with a quadrature rule turns any
filtered projection into a finite network

    x -> sum_c a_c |x . c|^(2 gamma + 1)

whose centers are the rule's nodes.  Valid whenever 2 gamma + 1 is not an
even integer (B_l would vanish).
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .filters import QUINTIC
from .sphere import (degree_filter_vector, gauss_jacobi_general, harmonic_basis,
                     omega_ratio, ultraspherical_basis)


class MaskError(ValueError):
    """Zonal expansion coefficients unusable (parity or vanishing)."""


@dataclass(frozen=True)
class ZonalMask:
    """Degreewise eigenvalues B_l of the |t|^(2 gamma + 1) kernel transform."""
    gamma: float
    q: int
    coefficients: np.ndarray = field(repr=False)   # B_l, odd entries zero

    @property
    def exponent(self):
        return 2.0 * self.gamma + 1.0

    def invert(self, coeffs, lmax):
        """Divide harmonic coefficients by B_l degreewise; odd degrees are
        projected out (the kernel only reaches even polynomials)."""
        out = np.zeros_like(coeffs)
        for l in range(0, lmax + 1, 2):
            out[l * l:(l + 1) * (l + 1)] = coeffs[l * l:(l + 1) * (l + 1)] / self.coefficients[l]
        return out


def mask_build(gamma, q, n_max):
    """Eigenvalues B_l, l = 0..n_max, of K(t) = |t|^(2 gamma + 1).

    B_l = (w_{q-1}/w_q) * integral |t|^(2g+1) p_l(t) (1-t^2)^(q/2-1) dt / p_l(1);
    the integral reduces under u = t^2 to a Jacobi-weighted polynomial
    integral, so a Gauss-Jacobi rule evaluates it exactly.
    """
    if gamma <= -0.5:
        raise MaskError("need gamma > -1/2")
    two_g1 = 2.0 * gamma + 1.0
    if abs(two_g1 - 2.0 * round(two_g1 / 2.0)) < 1e-12:
        raise MaskError("2 gamma + 1 must not be an even integer")
    a = q / 2.0 - 1.0
    m = max(n_max, 8) + 8
    nodes, wts = gauss_jacobi_general(a, gamma, m)
    u = (nodes + 1.0) / 2.0
    wts = wts / 2.0 ** (a + gamma + 1.0)   # now the weight u^gamma (1-u)^a on [0,1]
    basis = ultraspherical_basis(q, n_max)
    P = basis.values_matrix(np.sqrt(u))
    ratio = 1.0 / omega_ratio(q)           # w_{q-1} / w_q
    B = np.zeros(n_max + 1)
    for l in range(0, n_max + 1, 2):
        B[l] = ratio * float(wts @ P[l]) / basis.p_at_one[l]
        if abs(B[l]) < 1e-14:
            raise MaskError(f"vanishing zonal coefficient at degree {l}")
    return ZonalMask(gamma=float(gamma), q=q, coefficients=B)


@dataclass(frozen=True)
class ZonalNetwork:
    """Finite zonal network sum_c a_c |x . c|^(2 gamma + 1)."""
    gamma: float
    centers: np.ndarray = field(repr=False)
    coeffs: np.ndarray = field(repr=False)

    @property
    def exponent(self):
        return 2.0 * self.gamma + 1.0

    def __len__(self):
        return self.centers.shape[0]

    def evaluate(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.empty(x.shape[0])
        step = max(1, int(4e6) // max(len(self), 1))
        for lo in range(0, x.shape[0], step):
            hi = min(x.shape[0], lo + step)
            out[lo:hi] = np.abs(x[lo:hi] @ self.centers.T) ** self.exponent @ self.coeffs
        return out

    def coeff_l1(self):
        return float(np.abs(self.coeffs).sum())

    def to_json(self):
        return json.dumps({"gamma": self.gamma, "centers": self.centers.tolist(),
                           "coeffs": self.coeffs.tolist()})

    @classmethod
    def from_json(cls, text):
        rec = json.loads(text)
        return cls(gamma=float(rec["gamma"]),
                   centers=np.asarray(rec["centers"], dtype=float),
                   coeffs=np.asarray(rec["coeffs"], dtype=float))


def synthesize(mu_rule, fvals, nu_rule, n, gamma, filt=QUINTIC):
    """Network approximating f from samples on the analysis rule mu.

    Chain: filtered projection of degree n from (mu, f-values), inverse
    zonal transform degreewise, then discretization of the synthesis
    integral by nu.  Centers are nu's nodes; coefficients are nu's weights
    times the transformed polynomial there.  Odd-degree content of the
    projection is dropped (the network is automatically even).

    The guarantees behind this construction assume mu integrates degree-2n
    products and nu integrates degree-4n products correctly; residuals of
    the supplied rules are the practical check.
    """
    if mu_rule.cloud.domain != "sphere" or nu_rule.cloud.domain != "sphere":
        raise ValueError("zonal synthesis lives on the sphere")
    q = mu_rule.cloud.q
    lmax = int(math.ceil(n)) - 1
    mask = mask_build(gamma, q, lmax)
    basis = harmonic_basis(lmax)
    fvals = np.asarray(fvals, dtype=float)
    coeffs = basis.moments(mu_rule.cloud.points, mu_rule.weights * fvals)
    coeffs = coeffs * degree_filter_vector(filt, n, lmax)
    d = mask.invert(coeffs, lmax)
    dvals = basis.synth(nu_rule.cloud.points, d)
    return ZonalNetwork(gamma=float(gamma), centers=nu_rule.cloud.points.copy(),
                        coeffs=nu_rule.weights * dvals)
