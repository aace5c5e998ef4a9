"""Exact rational borderline calculators for traces, block criteria and embeddings."""
import math
from fractions import Fraction
from typing import Literal, Optional, Sequence

from mixtrace.errors import DomainError

MAX_DENOMINATOR = 10 ** 6
_RATIONAL_TOL = 1e-15

Number = int | float | Fraction


def exact(x: Number) -> Fraction:
    """Fraction for x; floats close to a small-denominator rational snap to it."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if not math.isfinite(x):
        raise DomainError(f"cannot represent {x} exactly")
    snapped = Fraction(x).limit_denominator(MAX_DENOMINATOR)
    if abs(float(snapped) - x) <= _RATIONAL_TOL * max(1.0, abs(x)):
        return snapped
    return Fraction(x)


def exact_or_inf(x: Number) -> Optional[Fraction]:
    """None stands for infinity."""
    if isinstance(x, float) and math.isinf(x):
        return None
    return exact(x)


def render(x: Optional[Fraction]) -> str:
    return "inf" if x is None else str(x)


def _pos(x: Fraction) -> Fraction:
    return x if x > 0 else Fraction(0)


def _min_one(values: Sequence[Optional[Fraction]]) -> Fraction:
    finite = [v for v in values if v is not None]
    return min([Fraction(1)] + finite)


def trace_bound(a: Sequence[Fraction], p: Sequence[Fraction], axis: int) -> Fraction:
    """a_k/p_k + sum_{i != k} (a_i/p_i - a_i)_+ for the hyperplane x_k = 0 (axis 1-based)."""
    k = axis - 1
    return a[k] / p[k] + sum((_pos(a[i] / p[i] - a[i]) for i in range(len(a)) if i != k), Fraction(0))


def strong_bound(
    a: Sequence[Fraction],
    p: Sequence[Fraction],
    q: Optional[Fraction],
    axis: int,
) -> Fraction:
    """Smoothness above which the trace estimates hold on the F scale without extra ordering.

    axis 1: a_1/p_1 + sum_{k>=2} (a_k / min(1, p_2..p_k, q) - a_k)
    axis n: a_n/p_n + sum_{k<n} (a_k / min(1, p_1..p_k) - a_k)
    """
    n = len(a)
    total = Fraction(0)
    if axis == 1:
        for k in range(1, n):
            total += a[k] / _min_one(list(p[1:k + 1]) + [q]) - a[k]
        return a[0] / p[0] + total
    if axis == n:
        for k in range(n - 1):
            total += a[k] / _min_one(p[:k + 1]) - a[k]
        return a[n - 1] / p[n - 1] + total
    raise DomainError(f"strong condition defined for axes 1 and {n}, not {axis}")


def ball_threshold(
    a: Sequence[Fraction],
    p: Sequence[Fraction],
    q: Optional[Fraction],
    scale: Literal["F", "B"],
) -> Fraction:
    """Smoothness beyond which dyadic-ball block series converge: sum_k a_k/min(1, p_1..p_k[, q]) - |a|."""
    total = Fraction(0)
    for k in range(len(a)):
        tail = list(p[:k + 1]) + ([q] if scale == "F" else [])
        total += a[k] / _min_one(tail)
    return total - sum(a, Fraction(0))


def sobolev_embedding_smoothness(s: Fraction, a: Sequence[Fraction], p: Sequence[Fraction], r: Sequence[Optional[Fraction]]) -> Fraction:
    """t = s - sum_k a_k (1/p_k - 1/r_k), with 1/inf = 0."""
    return s - sum((ak * (1 / pk - (0 if rk is None else 1 / rk)) for ak, pk, rk in zip(a, p, r)), Fraction(0))


def besov_embedding_holds(
    s: Fraction,
    p: Sequence[Fraction],
    q1: Optional[Fraction],
    t: Fraction,
    r: Sequence[Optional[Fraction]],
    q2: Optional[Fraction],
    a: Sequence[Fraction],
) -> bool:
    """B^{s}_{p,q1} into B^{t}_{r,q2} for p <= r: strict smoothness drop, or equality with q1 <= q2."""
    if any(rk is not None and pk > rk for pk, rk in zip(p, r)):
        return False
    lhs = t - sum((ak * (0 if rk is None else 1 / rk) for ak, rk in zip(a, r)), Fraction(0))
    rhs = s - sum((ak / pk for ak, pk in zip(a, p)), Fraction(0))
    if lhs < rhs:
        return True
    if lhs > rhs:
        return False
    if q2 is None:
        return True
    return q1 is not None and q1 <= q2


def bounded_continuous_threshold(a: Sequence[Fraction], p: Sequence[Fraction]) -> Fraction:
    """F^{s,a}_{p,q} lies in C_b for s above sum_k a_k/p_k."""
    return sum((ak / pk for ak, pk in zip(a, p)), Fraction(0))


def sobolev_embedding_borderline(p: Sequence[Fraction]) -> Fraction:
    """1/p_1 + sum_{k>1} (1/p_k - 1)_+, the isotropic trace borderline of W-type spaces."""
    return trace_bound([Fraction(1)] * len(p), p, 1)
