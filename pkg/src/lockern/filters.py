"""Low-pass filters and their derived masks.

A filter h is an even function with h = 1 on [0, 1/2] and h = 0 on [1, oo).
Every kernel in the package is shaped by one of these:

    quintic      C^2 smoothstep transition on (1/2, 1); the default
    smooth_bump  C-infinity transition (quotient-of-bumps construction)
    sharp        indicator of [0, 1); reproducing-kernel baseline, no masks

Derived masks (smooth kinds only):

    g(t)       = h(t) - h(2t)
    g_star(t)  = sqrt(g(t))
    g_tilde(t) = h(t/2) - h(4t),   with g * g_tilde = g
"""

from dataclasses import dataclass

import numpy as np

KINDS = ("sharp", "quintic", "smooth_bump")
_CLI_ALIASES = {"sharp": "sharp", "quintic": "quintic", "bump": "smooth_bump",
                "smooth_bump": "smooth_bump"}


@dataclass(frozen=True)
class FilterSpec:
    """Immutable choice of low-pass filter; safe to share across threads."""
    kind: str
    description: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown filter kind {self.kind!r}")


def get_filter(name):
    """Resolve a CLI-style name (sharp|quintic|bump) to a FilterSpec."""
    try:
        kind = _CLI_ALIASES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown filter {name!r}; choose from sharp|quintic|bump")
    return FilterSpec(kind=kind, description=name)


def _quintic(t):
    # smoothstep 1 - s(u), s(u) = u^3 (10 - 15u + 6u^2), u = 2t - 1
    out = np.zeros_like(t)
    out[t <= 0.5] = 1.0
    mid = (t > 0.5) & (t < 1.0)
    u = 2.0 * t[mid] - 1.0
    out[mid] = 1.0 - u ** 3 * (10.0 - 15.0 * u + 6.0 * u * u)
    return out


def _smooth_bump(t):
    # classic C^inf partition step: B(2-2t) / (B(2-2t) + B(2t-1)), B(u)=exp(-1/u)
    out = np.zeros_like(t)
    out[t <= 0.5] = 1.0
    mid = (t > 0.5) & (t < 1.0)
    u = t[mid]
    b1 = np.exp(-1.0 / (2.0 - 2.0 * u))
    b2 = np.exp(-1.0 / (2.0 * u - 1.0))
    out[mid] = b1 / (b1 + b2)
    return out


def eval_filter(spec, t):
    """h(|t|) for a scalar or array argument."""
    arr = np.abs(np.asarray(t, dtype=float))
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if spec.kind == "sharp":
        out = (arr < 1.0).astype(float)
    elif spec.kind == "quintic":
        out = _quintic(arr)
    else:
        out = _smooth_bump(arr)
    return float(out[0]) if scalar else out


def derived_mask(spec, which, t):
    """Masks g, g_star, g_tilde derived from a smooth filter.

    Raises for the sharp kind: the mask family needs a continuous filter.
    """
    if spec.kind == "sharp":
        raise ValueError("derived masks are undefined for the sharp filter")
    t = np.asarray(t, dtype=float)
    if which == "g":
        return eval_filter(spec, t) - eval_filter(spec, 2.0 * t)
    if which == "g_star":
        g = eval_filter(spec, t) - eval_filter(spec, 2.0 * t)
        return np.sqrt(np.maximum(g, 0.0)) if np.ndim(g) else float(np.sqrt(max(g, 0.0)))
    if which == "g_tilde":
        return eval_filter(spec, t / 2.0) - eval_filter(spec, 4.0 * t)
    raise ValueError(f"unknown mask {which!r}; choose from g|g_star|g_tilde")


def filter_values(spec, degrees, n):
    """h(l/n) for an integer array of degrees; the shape every kernel needs."""
    return eval_filter(spec, np.asarray(degrees, dtype=float) / float(n))


QUINTIC = FilterSpec("quintic", "C^2 smoothstep low-pass")
SHARP = FilterSpec("sharp", "hard spectral cutoff")
SMOOTH_BUMP = FilterSpec("smooth_bump", "C^inf bump low-pass")
