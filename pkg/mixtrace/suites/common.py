"""Case bookkeeping shared by the suites."""
import math
from typing import Any, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from mixtrace.errors import ConfigError
from mixtrace.littlewood_paley import PLATEAU, LPFamily, build_family, covering_index
from mixtrace.models import AnisotropyVector, CaseResult, ExponentVector, Grid, SpaceParams, SuiteConfig

_RATIO_SLACK = 1e-12


class SuiteOutcome(BaseModel):
    """What a suite body returns; the runner turns it into a SuiteReport."""
    cases: list[CaseResult] = Field(default_factory=list)
    declared_constant: float
    primary_group: str = "main"
    informational_groups: tuple[str, ...] = ()
    notes: list[str] = Field(default_factory=list)
    failures: list[str] = Field(default_factory=list)

    def add(self, case: CaseResult) -> CaseResult:
        self.cases.append(case)
        return case

    def primary_ratios(self) -> list[float]:
        return [c.ratio for c in self.cases if c.group == self.primary_group]


def ratio_case(
    case_id: str,
    lhs: float,
    rhs: float,
    bound: float,
    group: str = "main",
    two_sided: bool = False,
    note: str = "",
) -> CaseResult:
    """lhs/rhs against bound; two-sided cases report max(r, 1/r)."""
    if rhs == 0.0:
        ratio = 0.0 if lhs == 0.0 else math.inf
    else:
        ratio = lhs / rhs
    if two_sided:
        ratio = math.inf if ratio == 0.0 else max(ratio, 1.0 / ratio)
    passed = bool(ratio <= bound * (1.0 + _RATIO_SLACK))
    return CaseResult(case_id=case_id, group=group, lhs=lhs, rhs=rhs, ratio=ratio, passed=passed, note=note)


def error_case(case_id: str, error: float, tol: float, group: str, note: str = "") -> CaseResult:
    """An absolute error checked against a tolerance; the ratio is the error itself."""
    return CaseResult(case_id=case_id, group=group, lhs=error, rhs=tol, ratio=error, passed=bool(error < tol), note=note)


def flag_case(case_id: str, ok: bool, group: str, note: str = "") -> CaseResult:
    return CaseResult(case_id=case_id, group=group, lhs=float(ok), rhs=1.0, ratio=float(ok), passed=bool(ok), note=note)


def summarize(ratios: Sequence[float]) -> tuple[float, float]:
    """(max, 95th percentile) of finite ratios."""
    values = np.asarray([r for r in ratios if math.isfinite(r)], dtype=float)
    if values.size == 0:
        return 0.0, 0.0
    return float(values.max()), float(np.percentile(values, 95))


# --- config access ------------------------------------------------------------


def require_grid(cfg: SuiteConfig) -> Grid:
    if cfg.grid is None:
        raise ConfigError(f"suite {cfg.suite!r} needs a grid")
    return cfg.grid


def require_params(cfg: SuiteConfig) -> SpaceParams:
    if cfg.params is None:
        raise ConfigError(f"suite {cfg.suite!r} needs space parameters")
    return cfg.params


def ensemble_size(cfg: SuiteConfig, default: int = 32) -> int:
    return cfg.ensemble_size or default


def option(cfg: SuiteConfig, key: str, default: Any) -> Any:
    return cfg.options.get(key, default)


def tolerance(cfg: SuiteConfig, key: str, default: float) -> float:
    return float(cfg.tolerances.get(key, default))


def exponents(values: Sequence[Any]) -> ExponentVector:
    """Exponent vector from JSON values, where 'inf' or None stand for infinity."""
    return ExponentVector(p=tuple(as_float(v) for v in values))


def as_float(value: Any) -> float:
    if value is None or (isinstance(value, str) and value.strip().lower() in ("inf", "infinity")):
        return math.inf
    if isinstance(value, str) and "/" in value:
        num, den = value.split("/", 1)
        return float(num) / float(den)
    return float(value)


def anisotropy(values: Optional[Sequence[Any]], n: int, convention: str = "raw") -> AnisotropyVector:
    if values is None:
        return AnisotropyVector.isotropic(n)
    return AnisotropyVector(a=tuple(as_float(v) for v in values), convention=convention)


def covering_family(a: AnisotropyVector, grid: Grid, radius: float, plateau: Optional[float] = None, cutoff: Optional[float] = None) -> LPFamily:
    """Inhomogeneous family whose last Psi_J is 1 on the ball of the given radius."""
    kwargs = {}
    if plateau is not None:
        kwargs["plateau"] = plateau
    if cutoff is not None:
        kwargs["cutoff"] = cutoff
    j_max = max(1, covering_index(radius, plateau if plateau is not None else PLATEAU))
    return build_family(a, grid, j_max=j_max, **kwargs)


def check_band(grid: Grid, a: AnisotropyVector, radius: float) -> None:
    """The ball |xi|_a <= radius must stay inside the Nyquist box."""
    for nyq, w in zip(grid.nyquist, a.a):
        if radius ** w >= nyq:
            raise ConfigError(
                f"band radius {radius:g} exceeds the grid Nyquist frequency {nyq:g} on an axis with weight {w:g}"
            )
