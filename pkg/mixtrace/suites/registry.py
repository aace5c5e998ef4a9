"""Named verification suites and the map of covered results."""
from typing import Callable

from pydantic import BaseModel, ConfigDict

from mixtrace.errors import UnknownSuiteError
from mixtrace.models import SuiteConfig
from mixtrace.suites.common import SuiteOutcome

SuiteFunc = Callable[[SuiteConfig], SuiteOutcome]


class SuiteEntry(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    statement: str
    func: SuiteFunc
    refinable: bool = True


_REGISTRY: dict[str, SuiteEntry] = {}


def register(name: str, statement: str, refinable: bool = True) -> Callable[[SuiteFunc], SuiteFunc]:
    def _wrap(func: SuiteFunc) -> SuiteFunc:
        if name in _REGISTRY:
            raise ValueError(f"suite {name!r} registered twice")
        _REGISTRY[name] = SuiteEntry(name=name, statement=statement, func=func, refinable=refinable)
        return func
    return _wrap


def get_suite(name: str) -> SuiteEntry:
    _ensure_loaded()
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownSuiteError(f"unknown suite {name!r}; known suites: {', '.join(suite_names())}") from None


def suite_names() -> list[str]:
    _ensure_loaded()
    return sorted(_REGISTRY)


def _ensure_loaded() -> None:
    # suite modules register themselves on import
    from mixtrace.suites import borderline, criteria, inequalities, operators, traces  # noqa: F401


# Results that are deliberately not verified numerically.
OUT_OF_SCOPE: dict[str, str] = {
    "convergence-in-tempered-distributions": "topological statement about S' convergence of dyadic series",
    "rapid-convergence-of-block-series": "pairing with test functions, not a grid quantity",
    "extension-adjoint": "the adjoint extension operator is a duality construction",
    "intermediate-axis-traces": "traces on x_k = 0 for 1 < k < n have no Besov or Triebel range",
    "besov-domain-traces": "trace theory on the B scale is left open",
    "spaces-on-domains": "boundary value problems on open sets are outside the periodic setting",
    "vector-valued-and-intersection-spaces": "intersection characterizations are not grid computable here",
    "lwp-left-inequality-by-duality": "the left Littlewood-Paley bound is checked, its duality proof is not",
    "weak-type-maximal-bounds": "weak (1,1) estimates have no discrete counterpart in the suites",
}

# Every stated inequality or criterion, mapped to its suite or to an OUT_OF_SCOPE key.
COVERAGE: dict[str, str] = {
    "vector-valued Nikol'skij inequality": "nikolskij",
    "directional maximal inequality on L_p(l_q)": "bagby",
    "Peetre maximal function against iterated maximal function": "peetre",
    "Peetre maximal function on L_p(l_q)": "peetre",
    "pointwise estimate of pseudo-differential operators": "marschall",
    "vector-valued multiplier estimate": "help1-multiplier",
    "Littlewood-Paley inequality": "lwp",
    "dyadic ball criterion, F scale": "ball-F",
    "dyadic corona criterion, F scale": "corona-F",
    "dyadic ball criterion, B scale": "ball-B",
    "dyadic corona criterion, B scale": "corona-B",
    "corona criterion on powers of 2^lambda": "corona-lambda",
    "Sobolev embedding, F scale": "embed-F",
    "Sobolev embedding, B scale": "embed-B",
    "embedding into bounded continuous functions": "embed-F",
    "lift property": "lift",
    "reparametrisation invariance (lambda s, lambda a)": "scaling",
    "translation continuity in F and B": "translation",
    "discrete Hardy inequalities": "hardy",
    "basic trace estimate": "trace-basic",
    "trace estimate uniform in slice position": "trace-sup-slices",
    "trace of the extension is the identity": "trace-rightinv",
    "extension bound into the F scale": "trace-rightinv",
    "Cauchy trace right inverse": "cauchy-rightinv",
    "borderline counterexample asymptotics": "counterexample-slopes",
    "trace admissibility and trace spaces": "borderline-table",
    "higher-order and Cauchy trace conditions": "borderline-table",
    "convergence of dyadic series in S'": "convergence-in-tempered-distributions",
    "rapid convergence of block series": "rapid-convergence-of-block-series",
    "continuity of the extension on S'": "extension-adjoint",
    "traces on intermediate hyperplanes": "intermediate-axis-traces",
    "traces of Besov spaces": "besov-domain-traces",
    "parabolic boundary problems": "spaces-on-domains",
    "intersection characterizations": "vector-valued-and-intersection-spaces",
    "left Littlewood-Paley bound via duality": "lwp-left-inequality-by-duality",
}
