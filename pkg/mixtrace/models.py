"""Value types for mixtrace: geometry, grids, space parameters, verdicts and suite reports."""
import math
from typing import Any, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Convention = Literal["min_one", "sum_n", "raw"]
Scale = Literal["F", "B", "W", "H"]

_CONVENTION_TOL = 1e-12
_INTEGER_TOL = 1e-12


class _Value(BaseModel):
    """Immutable value object; infinities serialize as JSON `Infinity`."""
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")


def _is_power_of_two(value: int) -> bool:
    return value > 0 and value & (value - 1) == 0


# --- aniso_geometry ---------------------------------------------------------


class AnisotropyVector(_Value):
    """Weights a_k of the quasi-homogeneous dilation t^a x = (t^{a_1}x_1, ..., t^{a_n}x_n)."""
    a: tuple[float, ...] = Field(..., min_length=1, description="Positive weight per axis")
    convention: Convention = Field("min_one", description="Normalization the weights satisfy")

    @model_validator(mode="after")
    def _check(self) -> "AnisotropyVector":
        if any(not math.isfinite(w) or w <= 0 for w in self.a):
            raise ValueError(f"anisotropy weights must be finite and positive, got {self.a}")
        if self.convention == "min_one" and abs(min(self.a) - 1.0) > _CONVENTION_TOL:
            raise ValueError(f"min_one convention needs min(a) = 1, got {min(self.a)}")
        if self.convention == "sum_n" and abs(sum(self.a) - len(self.a)) > _CONVENTION_TOL * len(self.a):
            raise ValueError(f"sum_n convention needs sum(a) = {len(self.a)}, got {sum(self.a)}")
        return self

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def total(self) -> float:
        """|a| = a_1 + ... + a_n."""
        return float(sum(self.a))

    @property
    def a0(self) -> float:
        return float(max(self.a))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.a, dtype=float)

    def without(self, axis: int) -> "AnisotropyVector":
        """Weights of the hyperplane x_axis = 0 (axis is 1-based)."""
        rest = self.a[: axis - 1] + self.a[axis:]
        return AnisotropyVector(a=rest, convention="raw")

    def inserted(self, axis: int, weight: float) -> "AnisotropyVector":
        return AnisotropyVector(a=self.a[: axis - 1] + (weight,) + self.a[axis - 1:], convention="raw")

    def scaled(self, lam: float) -> "AnisotropyVector":
        return AnisotropyVector(a=tuple(lam * w for w in self.a), convention="raw")

    @classmethod
    def isotropic(cls, n: int) -> "AnisotropyVector":
        return cls(a=(1.0,) * n)


class AnisoBox(_Value):
    """Frequency box Q_b = product of [-b_k, b_k]."""
    halfwidths: tuple[float, ...] = Field(..., min_length=1)

    @field_validator("halfwidths")
    @classmethod
    def _positive(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if any(b <= 0 for b in v):
            raise ValueError("box halfwidths must be positive")
        return v


class AnisoBall(_Value):
    """Anisotropic ball (or corona when inner > 0) {inner <= |xi - center|_a <= radius}."""
    center: tuple[float, ...] = Field(..., min_length=1)
    radius: float = Field(..., ge=0)
    inner: float = Field(0.0, ge=0, description="Inner radius of a corona; 0 for a ball")
    a: Optional[AnisotropyVector] = Field(None, description="Anisotropy; isotropic when omitted")

    @model_validator(mode="after")
    def _check(self) -> "AnisoBall":
        if self.inner > self.radius:
            raise ValueError("corona inner radius exceeds outer radius")
        if self.a is not None and self.a.n != len(self.center):
            raise ValueError("ball center and anisotropy differ in dimension")
        return self

    def weights(self) -> AnisotropyVector:
        return self.a if self.a is not None else AnisotropyVector.isotropic(len(self.center))


SupportCertificate = Union[AnisoBall, AnisoBox]


# --- grid_field -------------------------------------------------------------


class Grid(_Value):
    """Uniform periodic grid on prod [-L_k, L_k); axis 1 is array axis 0."""
    half_periods: tuple[float, ...] = Field(..., min_length=1, description="L_k per axis")
    points: tuple[int, ...] = Field(..., min_length=1, description="N_k per axis, power of two")

    @model_validator(mode="after")
    def _check(self) -> "Grid":
        if len(self.half_periods) != len(self.points):
            raise ValueError("half_periods and points differ in dimension")
        if any(not math.isfinite(h) or h <= 0 for h in self.half_periods):
            raise ValueError("half periods must be finite and positive")
        if any(n < 4 or not _is_power_of_two(n) for n in self.points):
            raise ValueError(f"points per axis must be powers of two >= 4, got {self.points}")
        return self

    @classmethod
    def cube(cls, n: int, half_period: float, points: int) -> "Grid":
        return cls(half_periods=(half_period,) * n, points=(points,) * n)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def size(self) -> int:
        return int(np.prod(self.points))

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(2.0 * h / n for h, n in zip(self.half_periods, self.points))

    @property
    def nyquist(self) -> tuple[float, ...]:
        return tuple(math.pi * n / (2.0 * h) for h, n in zip(self.half_periods, self.points))

    @property
    def volume(self) -> float:
        return float(np.prod([2.0 * h for h in self.half_periods]))

    def axis_nodes(self, axis: int) -> np.ndarray:
        """Nodes -L + k*spacing of a 1-based axis; index N/2 is x = 0."""
        h, n = self.half_periods[axis - 1], self.points[axis - 1]
        return -h + np.arange(n) * (2.0 * h / n)

    def axis_frequencies(self, axis: int) -> np.ndarray:
        """Frequencies k*pi/L in FFT order."""
        h, n = self.half_periods[axis - 1], self.points[axis - 1]
        return np.fft.fftfreq(n, d=1.0 / n) * (math.pi / h)

    def restricted(self, axis: int) -> "Grid":
        if self.n < 2:
            raise ValueError("cannot restrict a one-dimensional grid")
        return Grid(
            half_periods=self.half_periods[: axis - 1] + self.half_periods[axis:],
            points=self.points[: axis - 1] + self.points[axis:],
        )

    def inserted(self, axis: int, half_period: float, points: int) -> "Grid":
        return Grid(
            half_periods=self.half_periods[: axis - 1] + (half_period,) + self.half_periods[axis - 1:],
            points=self.points[: axis - 1] + (points,) + self.points[axis - 1:],
        )

    def refined(self, factor: int = 2) -> "Grid":
        """Same torus, factor times more points per axis."""
        return Grid(half_periods=self.half_periods, points=tuple(n * factor for n in self.points))


class SpectralBox(_Value):
    """Per-axis frequency bounds of the numerically supported coefficients."""
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    @property
    def halfwidths(self) -> tuple[float, ...]:
        return tuple(max(abs(lo), abs(hi)) for lo, hi in zip(self.lower, self.upper))


class SupportReport(_Value):
    empty: bool
    box: Optional[SpectralBox] = None
    radius_min: float = 0.0
    radius_max: float = 0.0


class GridField(BaseModel):
    """Complex samples of a function on a periodic grid, with an optional spectral certificate.

    The certificate is advisory. Construction checks shape and finiteness only; `certify` and
    `leakage` in mixtrace.grid_field measure whether the spectrum honours it. Multipliers keep it
    sound by intersecting it with the declared support of the symbol.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: Grid
    values: np.ndarray
    support_cert: Optional[SupportCertificate] = None

    @model_validator(mode="before")
    @classmethod
    def _coerce_values(cls, data: Any) -> Any:
        if isinstance(data, dict) and "values" in data:
            arr = np.array(data["values"], dtype=np.complex128, copy=True, order="C")
            arr.flags.writeable = False
            data = {**data, "values": arr}
        return data

    @model_validator(mode="after")
    def _check(self) -> "GridField":
        if self.values.shape != self.grid.points:
            raise ValueError(f"values shape {self.values.shape} does not match grid {self.grid.points}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")
        return self

    @property
    def n(self) -> int:
        return self.grid.n


# --- norms ------------------------------------------------------------------


class ExponentVector(_Value):
    """Integrability exponents p_k in (0, inf]; axis 1 innermost."""
    p: tuple[float, ...] = Field(..., min_length=1)

    @field_validator("p")
    @classmethod
    def _positive(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if any(math.isnan(x) or x <= 0 for x in v):
            raise ValueError(f"exponents must lie in (0, inf], got {v}")
        return v

    @classmethod
    def uniform(cls, n: int, p: float) -> "ExponentVector":
        return cls(p=(p,) * n)

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def finite(self) -> bool:
        return all(math.isfinite(x) for x in self.p)

    def r(self) -> tuple[float, ...]:
        """r_k = max(1, p_k)."""
        return tuple(max(1.0, x) for x in self.p)

    def tau(self, q: float) -> float:
        """tau = min(1, p_1, ..., p_n, q)."""
        return float(min(1.0, q, *self.p))

    def without(self, axis: int) -> "ExponentVector":
        return ExponentVector(p=self.p[: axis - 1] + self.p[axis:])


class SpaceParams(_Value):
    """Parameters (s, a, p, q) of F, B, W or H scales."""
    s: float = Field(..., description="Smoothness")
    a: AnisotropyVector
    p: ExponentVector
    q: float = Field(2.0, gt=0, description="Sum exponent, may be inf")
    scale: Scale = "F"

    @model_validator(mode="after")
    def _check(self) -> "SpaceParams":
        if not math.isfinite(self.s):
            raise ValueError("smoothness must be finite")
        if self.a.n != self.p.n:
            raise ValueError("anisotropy and exponents differ in dimension")
        if self.scale == "W":
            for m in self.orders():
                if m < 0:
                    raise ValueError("W scale needs nonnegative integer orders s/a_k")
        return self

    def orders(self) -> tuple[int, ...]:
        """Integer derivative orders m_k = s/a_k of a W space."""
        out = []
        for w in self.a.a:
            m = self.s / w
            if abs(m - round(m)) > _INTEGER_TOL * max(1.0, abs(m)):
                raise ValueError(f"s/a_k = {m} is not an integer")
            out.append(int(round(m)))
        return tuple(out)

    @property
    def n(self) -> int:
        return self.a.n


class NormReport(_Value):
    value: float = Field(..., ge=0)
    contributions: tuple[float, ...] = Field(..., description="Weighted L_p norm of each block")
    j_max: int
    tail_ratio: float = Field(0.0, ge=0, description="Last block contribution relative to the norm")
    remainder_ratio: float = Field(0.0, ge=0, description="L2 mass beyond Psi_Jmax relative to the field")
    tail_ok: bool = True


# --- maximal ----------------------------------------------------------------


class MaximalParams(_Value):
    """Exponents t (or Peetre r), Peetre scales b and optional per-axis radius sets."""
    t: tuple[float, ...] = Field(..., min_length=1)
    b: Optional[tuple[float, ...]] = None
    radii: Optional[tuple[tuple[float, ...], ...]] = None

    @model_validator(mode="after")
    def _check(self) -> "MaximalParams":
        if any(x <= 0 for x in self.t):
            raise ValueError("maximal exponents must be positive")
        if self.b is not None and (len(self.b) != len(self.t) or any(x <= 0 for x in self.b)):
            raise ValueError("Peetre scales must be positive, one per axis")
        if self.radii is not None:
            if len(self.radii) != len(self.t) or any(not rs or min(rs) <= 0 for rs in self.radii):
                raise ValueError("radius sets must be nonempty and positive, one per axis")
        return self

    @property
    def d(self) -> float:
        return float(min(1.0, *self.t))


# --- trace_ext --------------------------------------------------------------


class TraceSpec(_Value):
    """Trace gamma_{order, axis}; m rows for the Cauchy trace (defaults to order + 1)."""
    axis: int = Field(..., ge=1, description="1-based hyperplane axis, 1 or n")
    order: int = Field(0, ge=0)
    m: Optional[int] = Field(None, ge=1, description="Number of Cauchy rows")

    @model_validator(mode="after")
    def _check(self) -> "TraceSpec":
        if self.m is not None and self.order >= self.m:
            raise ValueError("trace order must be below the number of Cauchy rows")
        return self

    @property
    def rows(self) -> int:
        return self.m if self.m is not None else self.order + 1


class TraceSpaceParams(_Value):
    """Trace space with exact rational parameters rendered as strings ('3/2', 'inf')."""
    scale: Literal["F", "B"]
    s: str
    a: tuple[str, ...]
    p: tuple[str, ...]
    q: str
    s_value: float


class AdmissibilityVerdict(_Value):
    axis: int
    order: int
    admissible: bool
    borderline: bool
    open_case: bool = Field(False, description="Equality case the theory leaves open")
    bound: str = Field(..., description="Required smoothness bound on s (exact)")
    bound_value: float
    strong_condition: bool
    strong_bound: str
    gap: bool = Field(False, description="Admissible by the sharp bound but not the strong condition")
    cauchy_strong_condition: Optional[bool] = None
    trace_space: TraceSpaceParams


class ExtensionFamily(_Value):
    """Profiles psi_nu with F psi_nu = i^{-nu} b(eta) P_nu(eta), b a bump inside [1, 2]."""
    axis: int = Field(..., ge=1)
    moment_order: int = Field(..., ge=0)
    weight: float = Field(1.0, gt=0, description="a_k of the extension axis")
    bump_center: float
    bump_halfwidth: float
    coefficients: tuple[tuple[float, ...], ...] = Field(..., description="Row nu: polynomial P_nu, ascending")
    residual: float = Field(..., ge=0)
    attempts: int = Field(1, ge=1)


class CounterexampleFamily(_Value):
    """Tensor family w_l and its averages v_j concentrating at the trace borderline."""
    axis: int = Field(..., ge=1, description="Axis m carrying the g profile")
    a: AnisotropyVector
    p: ExponentVector
    ge_axes: tuple[int, ...] = Field(..., description="Axes k != m with p_k >= 1")
    lt_axes: tuple[int, ...] = Field(..., description="Axes k != m with p_k < 1")
    f_width: float = Field(..., gt=0, description="(10n)^{-a0}")
    g_band: tuple[float, float]
    j_min: int = Field(4, ge=1)
    j_max: int = Field(12, ge=1)
    layout: Literal["full", "reduced"] = "reduced"
    profile_points: int = Field(64, ge=16, description="Points per axis of reduced-layout factor grids")
    max_axis_points: int = Field(4096, ge=16, description="Largest full-layout axis")


# --- verify_cli -------------------------------------------------------------


class SuiteConfig(BaseModel):
    """Experiment configuration; unset fields are filled from the named preset profile."""
    model_config = ConfigDict(ser_json_inf_nan="constants")

    suite: str = Field(..., min_length=1)
    profile: str = Field("desk", description="Preset profile: quick or desk")
    grid: Optional[Grid] = None
    params: Optional[SpaceParams] = None
    ensemble_size: Optional[int] = Field(None, ge=1, le=4096)
    seed: int = Field(0, ge=0)
    tolerances: dict[str, float] = Field(default_factory=dict)
    options: dict[str, Any] = Field(default_factory=dict)
    refine_check: bool = False


class CaseResult(_Value):
    case_id: str
    group: str = "main"
    lhs: float
    rhs: float
    ratio: float
    passed: bool
    note: str = ""


class RefinementResult(_Value):
    coarse: Grid
    fine: Grid
    constant_coarse: float
    constant_fine: float
    variation: float
    stable: bool


class SuiteReport(_Value):
    suite: str
    statement: str
    passed: bool
    informational: bool = False
    declared_constant: float
    constant_max: float
    constant_p95: float
    cases: tuple[CaseResult, ...]
    failures: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()
    refinement: Optional[RefinementResult] = None
    config: dict[str, Any] = Field(default_factory=dict)
    environment: dict[str, str] = Field(default_factory=dict)


class FitResult(_Value):
    slope: float
    intercept: float
    residual: float


# --- service requests -------------------------------------------------------


class AdmissibleRequest(BaseModel):
    params: SpaceParams
    trace: TraceSpec


class NormRequest(BaseModel):
    """Quasi-norm of a seeded band-limited field generated on the given grid."""
    model_config = ConfigDict(ser_json_inf_nan="constants")

    grid: Grid
    params: SpaceParams
    radius: float = Field(8.0, gt=0, description="Band radius |xi|_a <= radius of the random field")
    seed: int = Field(0, ge=0)


class VerifyRequest(BaseModel):
    """SuiteConfig fields other than the suite name, which comes from the path."""
    model_config = ConfigDict(ser_json_inf_nan="constants")

    profile: str = "quick"
    grid: Optional[Grid] = None
    params: Optional[SpaceParams] = None
    ensemble_size: Optional[int] = Field(None, ge=1, le=4096)
    seed: int = Field(0, ge=0)
    tolerances: dict[str, float] = Field(default_factory=dict)
    options: dict[str, Any] = Field(default_factory=dict)
    refine_check: bool = False

    def config(self, suite: str) -> SuiteConfig:
        return SuiteConfig(suite=suite, **self.model_dump())
