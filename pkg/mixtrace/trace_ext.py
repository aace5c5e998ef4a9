"""Traces on x_k = 0, admissibility verdicts, moment-orthogonal extension profiles and right inverses."""
import logging
import math
from fractions import Fraction
from typing import Iterator, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from mixtrace.borderlines import exact, exact_or_inf, render, strong_bound, trace_bound
from mixtrace.errors import DomainError, ExtensionFamilyError, GridMismatchError, ResolutionError, UnsupportedError
from mixtrace.grid_field import (
    center_index,
    combine,
    l2_norm,
    restrict_hyperplane,
    spectral_derivative,
    synthesize,
)
from mixtrace.littlewood_paley import LPFamily, decompose
from mixtrace.models import (
    AdmissibilityVerdict,
    AnisoBall,
    AnisotropyVector,
    ExponentVector,
    ExtensionFamily,
    Grid,
    GridField,
    SpaceParams,
    TraceSpaceParams,
    TraceSpec,
)
from mixtrace.norms import mixed_lp_array, mixed_lp_norm
from mixtrace.resilience import parallel_map

_LOG = logging.getLogger(__name__)

QUADRATURE_POINTS = 512
MOMENT_RESIDUAL_TOL = 1e-10
MAX_ATTEMPTS = 4
_MAX_CONDITION = 1e12
_REMAINDER_SKIP = 1e-14


# --- admissibility ----------------------------------------------------------


def _check_axis(n: int, axis: int) -> None:
    if n < 2:
        raise UnsupportedError("traces need dimension n >= 2")
    if axis not in (1, n):
        raise UnsupportedError(f"traces are supported on x_1 = 0 and x_n = 0 only, not axis {axis} of {n}")


def admissible(sp: SpaceParams, spec: TraceSpec) -> AdmissibilityVerdict:
    """Sharp borderline, equality clauses, strong conditions and the trace space of gamma_{j,k} on F^{s,a}_{p,q}."""
    if sp.scale != "F":
        raise UnsupportedError(f"trace verdicts are defined for the F scale, got {sp.scale}")
    if not sp.p.finite:
        raise UnsupportedError("trace verdicts need finite integrability exponents")
    n = sp.n
    k = spec.axis
    _check_axis(n, k)

    a = [exact(x) for x in sp.a.a]
    p = [exact(x) for x in sp.p.p]
    q = exact_or_inf(sp.q)
    s = exact(sp.s)
    idx = k - 1
    shift = spec.order * a[idx]
    s_eff = s - shift
    sharp = trace_bound(a, p, k)
    own = a[idx] / p[idx]

    open_case = False
    if s_eff > sharp:
        ok = True
    elif s_eff < sharp:
        ok = False
    elif k == 1:
        ok = sharp > own or p[0] <= 1
    elif p[idx] <= 1:
        ok = True
    elif all(x >= 1 for x in p[:idx]):
        ok = False
    else:
        ok = False
        open_case = True

    strong = strong_bound(a, p, q, k)
    strong_ok = s_eff > strong
    cauchy = None
    if spec.m is not None:
        cauchy = s > strong + (spec.m - 1) * a[idx]

    s_trace = s_eff - own
    if k == 1:
        space = TraceSpaceParams(
            scale="F", s=str(s_trace), a=tuple(str(x) for x in a[1:]), p=tuple(str(x) for x in p[1:]),
            q=render(p[0]), s_value=float(s_trace),
        )
    else:
        space = TraceSpaceParams(
            scale="B", s=str(s_trace), a=tuple(str(x) for x in a[:-1]), p=tuple(str(x) for x in p[:-1]),
            q=render(p[-1]), s_value=float(s_trace),
        )
    bound = sharp + shift
    return AdmissibilityVerdict(
        axis=k,
        order=spec.order,
        admissible=ok,
        borderline=s_eff == sharp,
        open_case=open_case,
        bound=str(bound),
        bound_value=float(bound),
        strong_condition=strong_ok,
        strong_bound=str(strong + shift),
        gap=ok and not strong_ok,
        cauchy_strong_condition=cauchy,
        trace_space=space,
    )


SobolevConvention = Literal["harmonic", "max"]


def sobolev_parameters(m: Sequence[int], convention: SobolevConvention = "harmonic") -> tuple[Fraction, AnisotropyVector]:
    """(s, a) with s/a_k = m_k: harmonic mean (|a| = n) or maximum (min a = 1)."""
    if not m or any(int(x) != x or x < 1 for x in m):
        raise DomainError(f"derivative orders must be positive integers, got {tuple(m)}")
    orders = [Fraction(int(x)) for x in m]
    if convention == "harmonic":
        s = len(orders) / sum(1 / x for x in orders)
        target = "sum_n"
    elif convention == "max":
        s = max(orders)
        target = "min_one"
    else:
        raise DomainError(f"unknown Sobolev convention {convention!r}")
    return s, AnisotropyVector(a=tuple(float(s / x) for x in orders), convention=target)


def sobolev_trace_conditions(m: Sequence[int], p: Sequence[float]) -> tuple[bool, bool]:
    """Whether gamma_{0,1} and gamma_{0,n} are defined on W^m_p (1 < p < inf)."""
    s, a = sobolev_parameters(m, "max")
    sp = SpaceParams(s=float(s), a=a, p=ExponentVector(p=tuple(p)), q=2.0, scale="F")
    inner = admissible(sp, TraceSpec(axis=1)).admissible
    outer = admissible(sp, TraceSpec(axis=len(m))).admissible
    return inner, outer


# --- traces on the grid -----------------------------------------------------


class TraceDiagnostics(BaseModel):
    """Partial-sum increments of the block series on the hyperplane, in L_{r''}."""
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    axis: int
    order: int
    r: tuple[float, ...]
    increments: tuple[float, ...]
    remainder_norm: float
    remainder_ratio: float = 0.0
    total_norm: float
    converged: bool
    continuity: tuple[tuple[float, float], ...] = ()


def _trace_slices(u: GridField, spec: TraceSpec, fam: LPFamily, index: Optional[int]):
    _check_axis(u.n, spec.axis)
    if fam.grid != u.grid:
        raise GridMismatchError("trace family and field grids differ")
    source = spectral_derivative(u, spec.axis, spec.order)
    d = decompose(source, fam)
    i = center_index(u.grid, spec.axis) if index is None else index
    slices = [restrict_hyperplane(b, spec.axis, i) for b in d.blocks]
    rest = restrict_hyperplane(d.remainder, spec.axis, i)
    return slices, rest


def trace(
    u: GridField,
    spec: TraceSpec,
    fam: LPFamily,
    index: Optional[int] = None,
    include_remainder: bool = False,
) -> GridField:
    """gamma_{j,k} u = sum_{j <= J_max} (d_k^j u_j)(x_k = 0).

    With ``include_remainder`` the sliced (1 - Psi_Jmax)(D) part is added as well, which makes the
    result the plain restriction of d_k^j u whatever the family covers.
    """
    slices, rest = _trace_slices(u, spec, fam, index)
    total = combine(slices + [rest] if include_remainder else slices)
    return GridField(grid=total.grid, values=total.values)


def slice_continuity(u: GridField, axis: int, p: ExponentVector, index: Optional[int] = None) -> tuple[tuple[float, float], ...]:
    """(h, ||slice(z + h) - slice(z)||_{L_r''}) for dyadic node offsets h."""
    _check_axis(u.n, axis)
    grid = u.grid
    i = center_index(grid, axis) if index is None else index
    r = ExponentVector(p=p.r()).without(axis)
    tangential = grid.restricted(axis)
    base = np.take(u.values, i, axis=axis - 1)
    out = []
    step = 1
    while step <= grid.points[axis - 1] // 2:
        moved = np.take(u.values, (i + step) % grid.points[axis - 1], axis=axis - 1)
        out.append((step * grid.spacing[axis - 1], mixed_lp_array(moved - base, tangential, r)))
        step *= 2
    return tuple(out)


def trace_report(
    u: GridField,
    spec: TraceSpec,
    fam: LPFamily,
    p: Optional[ExponentVector] = None,
    tol: float = 1e-6,
) -> TraceDiagnostics:
    """Convergence of the sliced block series; r_k = max(1, p_k) on the remaining axes."""
    p = p or ExponentVector.uniform(u.n, 2.0)
    slices, rest = _trace_slices(u, spec, fam, None)
    r = ExponentVector(p=p.r()).without(spec.axis)
    increments = tuple(mixed_lp_norm(s, r) for s in slices)
    total = mixed_lp_norm(combine(slices), r)
    remainder = mixed_lp_norm(rest, r)
    last = increments[-1] if increments else 0.0
    converged = total == 0.0 or (last + remainder) <= tol * total
    return TraceDiagnostics(
        axis=spec.axis,
        order=spec.order,
        r=r.p,
        increments=increments,
        remainder_norm=remainder,
        remainder_ratio=remainder / total if total > 0 else (0.0 if remainder == 0.0 else math.inf),
        total_norm=total,
        converged=converged,
        continuity=slice_continuity(u, spec.axis, p),
    )


def cauchy_trace(u: GridField, spec: TraceSpec, fam: LPFamily, include_remainder: bool = False) -> list[GridField]:
    """(gamma_{0,k} u, ..., gamma_{m-1,k} u)."""
    return [trace(u, TraceSpec(axis=spec.axis, order=j), fam, include_remainder=include_remainder) for j in range(spec.rows)]


# --- extension profiles -----------------------------------------------------


def _bump(eta: np.ndarray, center: float, halfwidth: float) -> np.ndarray:
    z = (np.asarray(eta, dtype=float) - center) / halfwidth
    inside = np.abs(z) < 1.0
    out = np.zeros_like(z)
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - z[inside] ** 2))
    return out


def _quadrature(points: int) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint rule on [1, 2]."""
    nodes = 1.0 + (np.arange(points) + 0.5) / points
    return nodes, np.full(points, 1.0 / points)


def _bump_shape(attempt: int) -> tuple[float, float]:
    halfwidth = 0.5 - 0.05 * attempt
    center = 1.5 + (0.02 * attempt if attempt % 2 else -0.02 * attempt)
    return center, halfwidth


def build_extension_family(
    axis: int,
    moment_order: int,
    weight: float = 1.0,
    seed: int = 0,
    max_attempts: int = MAX_ATTEMPTS,
    quadrature_points: int = QUADRATURE_POINTS,
) -> ExtensionFamily:
    """Profiles psi_nu, nu <= m, with psi_nu^{(k)}(0) = delta_{k nu} for k <= m and F psi_nu in [1, 2].

    F psi_nu = i^{-nu} b P_nu with b a bump and P_nu of degree m solving the Hankel system of
    the bump moments; psi_0 is the profile psi with psi(0) = 1 and vanishing moments 1..m.
    """
    if moment_order < 0:
        raise DomainError("moment order must be nonnegative")
    size = moment_order + 1
    nodes, w = _quadrature(quadrature_points)
    reason = ""
    for attempt in range(seed, seed + max_attempts):
        center, halfwidth = _bump_shape(attempt)
        b = _bump(nodes, center, halfwidth)
        moments = np.array([np.sum(w * b * nodes ** i) for i in range(2 * size - 1)])
        hankel = np.array([[moments[k + i] for i in range(size)] for k in range(size)])
        cond = float(np.linalg.cond(hankel))
        if not math.isfinite(cond) or cond > _MAX_CONDITION:
            reason = f"moment matrix condition {cond:.3e}"
            continue
        rhs = 2.0 * math.pi * np.eye(size)
        coeffs = np.linalg.solve(hankel, rhs)
        residual = float(np.abs(hankel @ coeffs - rhs).max() / (2.0 * math.pi))
        if not np.all(np.isfinite(coeffs)) or residual > MOMENT_RESIDUAL_TOL:
            reason = f"moment residual {residual:.3e}"
            continue
        _LOG.debug(
            "extension family built",
            extra={"axis": axis, "moment_order": moment_order, "attempt": attempt, "residual": residual},
        )
        return ExtensionFamily(
            axis=axis,
            moment_order=moment_order,
            weight=weight,
            bump_center=center,
            bump_halfwidth=halfwidth,
            coefficients=tuple(tuple(float(x) for x in coeffs[:, nu]) for nu in range(size)),
            residual=residual,
            attempts=attempt - seed + 1,
        )
    raise ExtensionFamilyError(f"moment orthogonalization failed after {max_attempts} attempts ({reason})")


def _polynomial(fam: ExtensionFamily, nu: int, eta: np.ndarray) -> np.ndarray:
    return np.polynomial.polynomial.polyval(eta, np.asarray(fam.coefficients[nu]))


def profile_transform(fam: ExtensionFamily, nu: int, eta) -> np.ndarray:
    """F psi_nu(eta) = i^{-nu} b(eta) P_nu(eta)."""
    if not 0 <= nu <= fam.moment_order:
        raise DomainError(f"profile index {nu} outside 0..{fam.moment_order}")
    eta = np.asarray(eta, dtype=float)
    return (-1j) ** nu * _bump(eta, fam.bump_center, fam.bump_halfwidth) * _polynomial(fam, nu, eta)


def profile_derivatives(fam: ExtensionFamily, nu: int, points: int = QUADRATURE_POINTS) -> np.ndarray:
    """psi_nu^{(k)}(0) = (2 pi)^{-1} int (i eta)^k F psi_nu(eta) d eta for k = 0..m."""
    nodes, w = _quadrature(points)
    values = profile_transform(fam, nu, nodes)
    return np.array([np.sum(w * (1j * nodes) ** k * values) / (2.0 * math.pi) for k in range(fam.moment_order + 1)])


def profile_support_leakage(fam: ExtensionFamily, nu: int, points: int = 4096) -> float:
    """Largest |F psi_nu| outside [1, 2] relative to its maximum (zero by construction)."""
    eta = np.linspace(0.0, 3.0, points)
    mags = np.abs(profile_transform(fam, nu, eta))
    outside = (eta < 1.0) | (eta > 2.0)
    return float(mags[outside].max() / mags.max())


def _band_frequencies(fam: ExtensionFamily, j: int, xi: np.ndarray) -> np.ndarray:
    eta = xi / 2.0 ** (j * fam.weight)
    return np.abs(eta - fam.bump_center) < fam.bump_halfwidth


def minimum_axis_grid(fam: ExtensionFamily, j_top: int) -> tuple[float, int]:
    """Smallest (L, N) that resolves every dilate j <= j_top along the extension axis."""
    half = math.pi * (fam.moment_order + 3) / (2.0 * fam.bump_halfwidth)
    top = (fam.bump_center + fam.bump_halfwidth) * 2.0 ** (j_top * fam.weight)
    need = 2.0 * half * (top + 2.0 * math.pi / half) / math.pi
    return half, 1 << max(2, int(math.ceil(math.log2(need))))


def _dilate_coefficients(
    fam: ExtensionFamily, nu: int, j: int, axis_grid: Grid
) -> tuple[np.ndarray, float]:
    """Coefficients of 2^{-j a nu} psi_nu(2^{j a} x) re-solved so grid derivatives at 0 are exact."""
    xi = axis_grid.axis_frequencies(1)
    scale = 2.0 ** (j * fam.weight)
    band = _band_frequencies(fam, j, xi) & (xi > 0)
    need = fam.moment_order + 2
    top = (fam.bump_center + fam.bump_halfwidth) * scale
    if int(band.sum()) < need or top >= xi.max():
        L, N = minimum_axis_grid(fam, j)
        raise ResolutionError(
            f"extension axis grid (L={axis_grid.half_periods[0]:.4g}, N={axis_grid.points[0]}) does not resolve "
            f"dilate j={j}; need L >= {L:.4g} and N >= {N}"
        )
    eta = xi / scale
    b = _bump(eta, fam.bump_center, fam.bump_halfwidth)
    size = fam.moment_order + 1
    basis = np.stack([b * eta ** i for i in range(size)])
    gram = np.array([[np.sum((1j * eta) ** k * basis[i]) for i in range(size)] for k in range(size)])
    rhs = np.zeros(size, dtype=complex)
    rhs[nu] = scale ** (-nu)
    weights = np.linalg.solve(gram, rhs)
    coeffs = weights @ basis
    continuous = scale ** (-(nu + 1)) * profile_transform(fam, nu, eta) / (2.0 * axis_grid.half_periods[0])
    peak = float(np.abs(continuous).max())
    drift = float(np.abs(coeffs - continuous).max() / peak) if peak > 0 else 0.0
    return coeffs, drift


def extension_terms(
    v: GridField,
    fam: ExtensionFamily,
    tangential: LPFamily,
    half_period: float,
    points: int,
    nu: int = 0,
) -> Iterator[GridField]:
    """Terms 2^{-j a_k nu} psi_nu(2^{j a_k} x_k) v_j(x''), each with its corona certificate."""
    n = v.n + 1
    if fam.axis not in (1, n):
        raise UnsupportedError(f"extension along axis {fam.axis} of {n} is not supported")
    if tangential.grid != v.grid:
        raise GridMismatchError("tangential family and field grids differ")
    if tangential.flavor != "inhomogeneous":
        raise DomainError("extension needs an inhomogeneous tangential family")
    if not 0 <= nu <= fam.moment_order:
        raise DomainError(f"profile index {nu} outside 0..{fam.moment_order}")

    axis_grid = Grid(half_periods=(half_period,), points=(points,))
    full_grid = v.grid.inserted(fam.axis, half_period, points)
    full_a = tangential.a.inserted(fam.axis, fam.weight)
    d = decompose(v, tangential)
    parts = list(zip(d.indices, d.blocks))
    size = l2_norm(v)
    if size > 0 and l2_norm(d.remainder) > _REMAINDER_SKIP * size:
        _LOG.warning("tangential field exceeds the dyadic window; extending its remainder as one more level")
        parts.append((tangential.j_max + 1, d.remainder))

    def _term(item: tuple[int, GridField]) -> GridField:
        j, block = item
        coeffs, drift = _dilate_coefficients(fam, nu, j, axis_grid)
        chi = synthesize(axis_grid, coeffs).values
        values = np.multiply.outer(chi, block.values) if fam.axis == 1 else np.multiply.outer(block.values, chi)
        _LOG.debug("extension term", extra={"j": j, "nu": nu, "profile_drift": drift})
        cert = AnisoBall(
            center=(0.0,) * n,
            radius=2.0 ** j * (2.0 ** (1.0 / fam.weight) + tangential.cutoff),
            inner=2.0 ** j,
            a=full_a,
        )
        return GridField(grid=full_grid, values=values, support_cert=cert)

    yield from parallel_map(_term, parts)


def extend(
    v: GridField,
    fam: ExtensionFamily,
    tangential: LPFamily,
    half_period: float,
    points: int,
    nu: int = 0,
) -> GridField:
    """K_{nu,k} v on the grid with the extension axis (L, N) inserted at position k."""
    terms = list(extension_terms(v, fam, tangential, half_period, points, nu))
    total = combine(terms)
    top = max(t.support_cert.radius for t in terms)
    full_a = tangential.a.inserted(fam.axis, fam.weight)
    cert = AnisoBall(center=(0.0,) * total.n, radius=top, a=full_a)
    return GridField(grid=total.grid, values=total.values, support_cert=cert)


def extend_cauchy(
    vs: Sequence[GridField],
    fam: ExtensionFamily,
    tangential: LPFamily,
    half_period: float,
    points: int,
) -> GridField:
    """K^{(m)}(v_0, ..., v_{m-1}) = sum_nu K_{nu,k} v_nu."""
    if not vs:
        raise DomainError("need at least one Cauchy datum")
    if len(vs) > fam.moment_order + 1:
        raise DomainError(f"{len(vs)} Cauchy data need moment order >= {len(vs) - 1}")
    return combine([extend(v, fam, tangential, half_period, points, nu) for nu, v in enumerate(vs)])
