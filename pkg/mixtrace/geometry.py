"""Anisotropic distance |x|_a, quasi-homogeneous dilations and anisotropy normalization."""
import logging

import numpy as np

from mixtrace.errors import DomainError
from mixtrace.models import AnisotropyVector, Convention

_LOG = logging.getLogger(__name__)

_BISECT_RTOL = 1e-13
_MAX_BISECTIONS = 200


def _as_points(a: AnisotropyVector, x) -> tuple[np.ndarray, tuple[int, ...]]:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0 or arr.shape[0] != a.n:
        raise DomainError(f"point(s) must have leading dimension {a.n}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("anisotropic distance needs finite coordinates")
    return arr.reshape(a.n, -1), arr.shape[1:]


def _excess(sq: np.ndarray, w: np.ndarray, t: np.ndarray) -> np.ndarray:
    """g(t) - 1 with g(t) = sum_k x_k^2 / t^(2 a_k); decreasing in t."""
    return np.sum(sq / t[None, :] ** (2.0 * w[:, None]), axis=0) - 1.0


def _solve(w: np.ndarray, pts: np.ndarray) -> np.ndarray:
    absx = np.abs(pts)
    if np.all(w == w[0]):
        return np.sqrt(np.sum(absx * absx, axis=0)) ** (1.0 / w[0])

    powers = absx ** (1.0 / w[:, None])
    lo = powers.max(axis=0)
    hi = powers.sum(axis=0)
    zero = hi == 0.0
    lo = np.where(zero, 1.0, lo)
    hi = np.where(zero, 1.0, hi)
    sq = absx * absx

    # weights below 1/2 can push the root past the sum bound
    while True:
        short = _excess(sq, w, hi) > 0.0
        if not np.any(short):
            break
        hi = np.where(short, 2.0 * hi, hi)

    for _ in range(_MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        above = _excess(sq, w, mid) > 0.0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
        if np.all(hi - lo <= _BISECT_RTOL * hi):
            break

    t = 0.5 * (lo + hi)
    slope = -2.0 * np.sum(w[:, None] * sq / t[None, :] ** (2.0 * w[:, None] + 1.0), axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        polished = t - _excess(sq, w, t) / slope
    keep = np.isfinite(polished) & (polished >= lo) & (polished <= hi)
    t = np.where(keep, polished, t)
    return np.where(zero, 0.0, t)


def aniso_distance(a: AnisotropyVector, x):
    """Unique t > 0 with sum_k x_k^2 / t^(2 a_k) = 1, and 0 at the origin.

    ``x`` is one point (shape ``(n,)``) or a stack of points with the coordinate axis
    first (shape ``(n, ...)``); a stack returns an array of shape ``x.shape[1:]``.
    """
    pts, tail = _as_points(a, x)
    out = _solve(a.as_array(), pts)
    if not tail:
        return float(out[0])
    return out.reshape(tail)


def aniso_dilate(t: float, a: AnisotropyVector, x) -> np.ndarray:
    """(t^{a_1} x_1, ..., t^{a_n} x_n); works on stacks with the coordinate axis first."""
    if not np.isfinite(t) or t <= 0:
        raise DomainError(f"dilation parameter must be positive, got {t}")
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0 or arr.shape[0] != a.n:
        raise DomainError(f"point(s) must have leading dimension {a.n}")
    factors = float(t) ** a.as_array()
    return arr * factors.reshape((a.n,) + (1,) * (arr.ndim - 1))


def normalize_anisotropy(a: AnisotropyVector, target: Convention) -> tuple[AnisotropyVector, float]:
    """Rescale a to the target convention; callers rescale s by the same lambda."""
    if target == "min_one":
        lam = 1.0 / min(a.a)
    elif target == "sum_n":
        lam = a.n / a.total
    else:
        lam = 1.0
    scaled = tuple(lam * w for w in a.a)
    if target == "min_one":
        # exact 1 on the minimizing axis
        k = int(np.argmin(a.a))
        scaled = scaled[:k] + (1.0,) + scaled[k + 1:]
    _LOG.debug("normalized anisotropy", extra={"target": target, "lambda": lam})
    return AnisotropyVector(a=scaled, convention=target), lam
