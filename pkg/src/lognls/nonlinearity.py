"""Closed forms for the split of the logarithmic nonlinearity.

The pointwise nonlinearity s*log(s^2) ruins smoothness of the energy at
small amplitudes, so it is split at an amplitude delta into a convex
nonnegative part f1 (carrying the singular small-amplitude behaviour) and a
quadratically bounded part f2, tied together by the exact identity

    f2(s) - f1(s) = 0.5 * s^2 * log(s^2)   for every real s.

f1 doubles as the gauge function of an Orlicz-type norm (Luxemburg
construction) used to control fields whose tails decay too slowly for the
plain L2 log-integral to make sense.

All functions are pure, total, and accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NonlinearitySplit",
    "DEFAULT_SPLIT",
    "f1",
    "f2",
    "df1",
    "df2",
    "log_nl",
    "luxemburg_gauge",
    "ratio_bounds",
]

# f1'' on (0, delta) is -(log(s^2) + 3), positive exactly for s < exp(-3/2).
_CONVEXITY_LIMIT = math.exp(-1.5)


@dataclass(frozen=True)
class NonlinearitySplit:
    """Amplitude at which the logarithmic nonlinearity is split.

    delta must stay strictly below exp(-3/2) so that f1 is convex; the
    default exp(-2) additionally gives the explicit ratio lower bound
    2 + 1/log(delta) = 1.5 for df1(s)*s/f1(s).
    """

    delta: float = math.exp(-2.0)

    def __post_init__(self):
        if not 0.0 < self.delta < _CONVEXITY_LIMIT:
            raise ValueError(
                f"split delta must lie in (0, exp(-3/2)), got {self.delta!r}"
            )


DEFAULT_SPLIT = NonlinearitySplit()


def _scalar_or_array(out, like):
    return out.item() if np.ndim(like) == 0 else out


def f1(s, split: NonlinearitySplit = DEFAULT_SPLIT):
    """Convex nonnegative part of the split, extended evenly to s < 0.

    Equals -0.5*s^2*log(s^2) for 0 < |s| < delta and continues as the
    matching quadratic -0.5*s^2*(log(delta^2)+3) + 2*delta*|s| - 0.5*delta^2
    for |s| >= delta; f1(0) = 0.
    """
    d = split.delta
    t = np.abs(np.asarray(s, dtype=float))
    safe = np.where((t > 0.0) & (t < d), t, 0.5 * d)
    inner = -safe * safe * np.log(safe)  # == -0.5 t^2 log(t^2)
    outer = -0.5 * t * t * (2.0 * np.log(d) + 3.0) + 2.0 * d * t - 0.5 * d * d
    out = np.where(t >= d, outer, np.where(t > 0.0, inner, 0.0))
    return _scalar_or_array(out, s)


def df1(s, split: NonlinearitySplit = DEFAULT_SPLIT):
    """Derivative of f1; odd, with df1(0) = 0 and C1 matching at |s| = delta."""
    d = split.delta
    a = np.asarray(s, dtype=float)
    t = np.abs(a)
    safe = np.where((t > 0.0) & (t < d), t, 0.5 * d)
    inner = -(2.0 * np.log(safe) + 1.0) * safe  # == -(log(s^2)+1) s
    outer = -t * (2.0 * np.log(d) + 3.0) + 2.0 * d
    mag = np.where(t >= d, outer, np.where(t > 0.0, inner, 0.0))
    out = np.sign(a) * mag
    return _scalar_or_array(out, s)


def f2(s, split: NonlinearitySplit = DEFAULT_SPLIT):
    """Remainder part of the split; vanishes on [-delta, delta], even."""
    d = split.delta
    t = np.abs(np.asarray(s, dtype=float))
    safe = np.where(t >= d, t, d)
    outer = safe * safe * np.log(safe / d) + 2.0 * d * safe - 1.5 * safe * safe - 0.5 * d * d
    out = np.where(t >= d, outer, 0.0)
    return _scalar_or_array(out, s)


def df2(s, split: NonlinearitySplit = DEFAULT_SPLIT):
    """Derivative of f2; odd, zero on [-delta, delta], C1 at |s| = delta."""
    d = split.delta
    a = np.asarray(s, dtype=float)
    t = np.abs(a)
    safe = np.where(t >= d, t, d)
    mag = np.where(t >= d, 2.0 * safe * np.log(safe / d) - 2.0 * safe + 2.0 * d, 0.0)
    out = np.sign(a) * mag
    return _scalar_or_array(out, s)


def log_nl(s):
    """Combined nonlinearity s*log(s^2) with the removable zero at s = 0.

    Identical to df2(s) - df1(s) up to round-off, for any admissible split.
    """
    a = np.asarray(s, dtype=float)
    t = np.abs(a)
    safe = np.where(t > 0.0, t, 1.0)
    out = 2.0 * a * np.log(safe)
    return _scalar_or_array(out, s)


def luxemburg_gauge(values, weights, split: NonlinearitySplit = DEFAULT_SPLIT):
    """Gauge norm of a sampled field under quadrature weights.

    Returns the unique lam > 0 with sum(w * f1(|u|/lam)) = 1, located by
    monotone bisection, or 0.0 for the zero field.  The modular
    lam -> sum(w * f1(|u|/lam)) is continuous and strictly decreasing
    wherever positive, so the root is unique.

    Raises ValueError on non-finite samples or mismatched shapes.
    """
    u = np.abs(np.asarray(values, dtype=float)).ravel()
    w = np.asarray(weights, dtype=float).ravel()
    if u.shape != w.shape:
        raise ValueError("values and weights must have the same number of samples")
    if not np.isfinite(u).all():
        raise ValueError("non-finite samples rejected")
    umax = u.max() if u.size else 0.0
    if umax == 0.0:
        return 0.0

    def modular(lam):
        return float(np.sum(w * f1(u / lam, split)))

    rms = math.sqrt(float(np.sum(w * u * u)) / float(np.sum(w)))
    lo = 1e-3 * rms
    hi = 1e3 * umax
    # Widen the default bracket in the rare case it misses the root.
    for _ in range(200):
        if modular(lo) >= 1.0:
            break
        lo *= 0.1
    for _ in range(200):
        if modular(hi) <= 1.0:
            break
        hi *= 10.0
    for _ in range(100):
        if hi - lo <= 1e-12 * hi:
            break
        mid = 0.5 * (lo + hi)
        if modular(mid) >= 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ratio_bounds(split: NonlinearitySplit = DEFAULT_SPLIT, sample_count: int = 20000,
                 s_min: float = 1e-8, s_max: float = 1e8):
    """Empirical bounds (l, m) of df1(s)*s/f1(s) over a log-spaced grid of s > 0.

    For an admissible split the ratio lies in (1, 2]; the closed-form lower
    bound 2 + 1/log(delta) is attained as s -> delta.
    """
    if sample_count < 100:
        raise ValueError("sample_count must be at least 100")
    s = np.logspace(math.log10(s_min), math.log10(s_max), sample_count)
    r = df1(s, split) * s / f1(s, split)
    return float(r.min()), float(r.max())
