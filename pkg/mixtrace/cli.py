"""Command-line surface: field tools, the trace calculator and `verify <suite>`.

Exit codes: 0 pass, 1 failed assertion, 2 configuration error, 3 input outside an
operation's domain (DomainError and the other numerical errors).
"""
import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from pydantic import ValidationError

from mixtrace.counterexamples import borderline_smoothness, build_counterexample_family, fit_asymptotics, norm_table, write_norm_table
from mixtrace.errors import ConfigError, FieldFormatError, MixtraceError, ResolutionError, UnknownSuiteError, UnsupportedError
from mixtrace.fieldio import export_slice_csv, read_field, write_field
from mixtrace.grid_field import combine, l2_norm
from mixtrace.littlewood_paley import build_family, decompose, nyquist_radius, recompose
from mixtrace.models import AnisotropyVector, ExponentVector, Grid, GridField, SpaceParams, SuiteConfig, TraceSpec
from mixtrace.norms import space_quasi_norm
from mixtrace.presets import get_suite_preset
from mixtrace.suites import emit_report, run_suite, suite_names
from mixtrace.suites.common import as_float, check_band, covering_family
from mixtrace.suites.ensembles import band_limited, rng_for
from mixtrace.trace_ext import admissible, build_extension_family, extend, minimum_axis_grid, trace, trace_report

_LOG = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_DOMAIN = 3

# request errors; every other MixtraceError is a domain or numerical failure
_CONFIG_ERRORS = (ConfigError, UnknownSuiteError, FieldFormatError, ResolutionError, UnsupportedError, ValidationError)

DEFAULT_HALF_PERIOD = 4 * math.pi
DEFAULT_GRID = "128x128"


# --- argument parsing ---------------------------------------------------------


def _vector(text: str) -> tuple[float, ...]:
    """'1,3/2,inf' -> (1.0, 1.5, inf)."""
    try:
        return tuple(as_float(x.strip()) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated list of numbers: {text!r}") from None


def _number(text: str) -> float:
    try:
        return as_float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _points(text: str) -> tuple[int, ...]:
    """'256x256' -> (256, 256)."""
    try:
        values = tuple(int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like NxN[xN], got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty grid")
    return values


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON configuration; grid, params, seed and options for field commands")
    common.add_argument("--out", type=Path, default=None, help="Output directory")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    return common


def _sampling_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="Ensemble seed")
    p.add_argument("--grid", type=_points, default=None, help="Points per axis, e.g. 256x256")


def _field_flags(p: argparse.ArgumentParser) -> None:
    _sampling_flags(p)
    p.add_argument("--field", type=Path, default=None, help="MTGF field file; a seeded band-limited field otherwise")
    p.add_argument("--a", type=_vector, default=None, help="Anisotropy, e.g. 1,3/2 (isotropic by default)")
    p.add_argument("--radius", type=_number, default=8.0, help="Band radius of the generated field")
    p.add_argument("--half-period", type=_number, default=DEFAULT_HALF_PERIOD, help="L of the generated grid [-L, L)")


def _space_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--s", type=_number, default=0.0, help="Smoothness")
    p.add_argument("--p", type=_vector, default=None, help="Integrability exponents, 2 on every axis by default")
    p.add_argument("--q", type=_number, default=2.0, help="Sum exponent")
    p.add_argument("--scale", choices=("F", "B"), default="F")


def _config_defaults(data: dict[str, Any], known: set[str], command: str) -> dict[str, Any]:
    """Translate a config file into argparse defaults of one command; flags still win."""
    extra = sorted(set(data) - {"grid", "params", "seed", "options"})
    if extra:
        raise ConfigError(f"config keys {', '.join(extra)} only apply to verify")

    def require(dest: str, key: str) -> None:
        if dest not in known:
            raise ConfigError(f"{command} does not take {key} from a config file")

    out: dict[str, Any] = {}
    if "grid" in data:
        require("grid", "grid")
        grid = Grid.model_validate(data["grid"])
        if len(set(grid.half_periods)) != 1:
            raise ConfigError("field commands need the same half period on every axis")
        out.update(grid=grid.points, half_period=grid.half_periods[0])
    if "seed" in data:
        require("seed", "seed")
        try:
            out["seed"] = int(data["seed"])
        except (TypeError, ValueError):
            raise ConfigError(f"seed must be an integer, got {data['seed']!r}") from None
    if "params" in data:
        sp = SpaceParams.model_validate(data["params"])
        fields = {"s": sp.s, "a": sp.a.a, "p": sp.p.p, "q": sp.q, "scale": sp.scale}
        taken = {k: fields[k] for k in sp.model_fields_set if k in known}
        if not taken:
            require("params", "params")
        out.update(taken)
    options = data.get("options") or {}
    if not isinstance(options, dict):
        raise ConfigError("config options must be a JSON object")
    for key, value in options.items():
        dest = key.replace("-", "_")
        require(dest, f"option {key!r}")
        out[dest] = value
    return out


def build_parser(config: Optional[dict[str, Any]] = None, command: Optional[str] = None) -> argparse.ArgumentParser:
    """The argument parser; `config` (a loaded config file) becomes the defaults of `command`."""
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="mixtrace", description="Anisotropic mixed-norm Triebel-Lizorkin/Besov lab.")
    sub = parser.add_subparsers(dest="command", required=True)
    parsers: dict[str, argparse.ArgumentParser] = {}

    p = parsers["decompose"] = sub.add_parser("decompose", parents=[common], help="Littlewood-Paley blocks of a field")
    _field_flags(p)
    p.add_argument("--j-max", type=int, default=None, help="Last block index (covers the band by default)")

    p = parsers["norm"] = sub.add_parser("norm", parents=[common], help="F or B quasi-norm of a field")
    _field_flags(p)
    _space_flags(p)

    p = parsers["trace"] = sub.add_parser("trace", parents=[common], help="Trace gamma_{order,axis} and its convergence diagnostics")
    _field_flags(p)
    p.add_argument("--axis", type=int, default=1)
    p.add_argument("--order", type=int, default=0)
    p.add_argument("--p", type=_vector, default=None, help="Exponents for the slice norms")

    p = parsers["extend"] = sub.add_parser("extend", parents=[common], help="Extension K_{nu,k} of a tangential field")
    _field_flags(p)
    p.add_argument("--axis", type=int, default=1, help="Position of the inserted axis in the full space")
    p.add_argument("--order", type=int, default=0, help="nu: the extension matches the nu-th normal derivative")
    p.add_argument("--weight", type=_number, default=1.0, help="a_k of the inserted axis")
    p.add_argument("--axis-half-period", type=_number, default=8 * math.pi)
    p.add_argument("--axis-points", type=int, default=512)

    p = parsers["admissible"] = sub.add_parser("admissible", parents=[common], help="Exact trace admissibility verdict")
    _space_flags(p)
    p.add_argument("--a", type=_vector, default=None, help="Anisotropy (required here or in the config params)")
    p.add_argument("--axis", type=int, default=1)
    p.add_argument("--order", type=int, default=0)
    p.add_argument("--m", type=int, default=None, help="Rows of the Cauchy trace")

    p = parsers["counterexample"] = sub.add_parser(
        "counterexample", parents=[common], help="Norms of v_j at the trace borderline and their log-log slope",
    )
    p.add_argument("--a", type=_vector, default=(1.0, 1.0))
    p.add_argument("--p", type=_vector, default=(2.0, 2.0))
    p.add_argument("--q", type=_number, default=2.0)
    p.add_argument("--scale", choices=("F", "B"), default="B")
    p.add_argument("--axis", type=int, default=1)
    p.add_argument("--s", type=_number, default=None, help="Smoothness, the borderline by default")
    p.add_argument("--j-min", type=int, default=4)
    p.add_argument("--j-max", type=int, default=12)
    p.add_argument("--layout", choices=("reduced", "full"), default="reduced")

    p = parsers["verify"] = sub.add_parser("verify", parents=[common], help="Run a named verification suite")
    _sampling_flags(p)
    p.add_argument("suite", nargs="?", help="Suite name")
    p.add_argument("--list", action="store_true", help="List the registered suites")
    p.add_argument("--profile", default=None, help="Preset profile (quick or desk)")
    p.add_argument("--refine-check", action="store_true", help="Re-run on a 2x refined grid and compare constants")

    if config is not None and command is not None:
        target = parsers[command]
        known = {action.dest for action in target._actions} - {"help", "config", "command"}
        target.set_defaults(**_config_defaults(config, known, command))
    return parser


# --- helpers ------------------------------------------------------------------


def _load_config_file(path: Optional[Path]) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def _grid(points: Sequence[int], half_period: float) -> Grid:
    return Grid(half_periods=(half_period,) * len(points), points=tuple(points))


def _anisotropy(values: Optional[Sequence[float]], n: int) -> AnisotropyVector:
    if values is None:
        return AnisotropyVector.isotropic(n)
    if len(values) != n:
        raise ConfigError(f"anisotropy has {len(values)} entries for a {n}-dimensional field")
    return AnisotropyVector(a=tuple(values), convention="raw")


def _exponents(values: Optional[Sequence[float]], n: int) -> ExponentVector:
    if values is None:
        return ExponentVector.uniform(n, 2.0)
    if len(values) != n:
        raise ConfigError(f"{len(values)} exponents for a {n}-dimensional field")
    return ExponentVector(p=tuple(values))


def _source_field(args: argparse.Namespace) -> tuple[GridField, AnisotropyVector]:
    if args.field is not None:
        try:
            u = read_field(args.field)
        except OSError as e:
            raise ConfigError(f"cannot read field {args.field}: {e}") from e
        return u, _anisotropy(args.a, u.n)
    points = args.grid or _points(DEFAULT_GRID)
    grid = _grid(points, args.half_period)
    a = _anisotropy(args.a, grid.n)
    check_band(grid, a, args.radius)
    return band_limited(grid, a, args.radius, rng_for(args.seed or 0, "cli", args.command)), a


def _family_for(u: GridField, a: AnisotropyVector, j_max: Optional[int] = None):
    if j_max is not None:
        return build_family(a, u.grid, j_max=j_max)
    cert = u.support_cert
    if getattr(cert, "a", None) is not None and cert.a.a == a.a:
        return covering_family(a, u.grid, cert.radius)
    return build_family(a, u.grid)


def _print(payload: Any) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def _out_dir(args: argparse.Namespace) -> Optional[Path]:
    if args.out is None:
        return None
    args.out.mkdir(parents=True, exist_ok=True)
    return args.out


# --- commands -----------------------------------------------------------------


def cmd_decompose(args: argparse.Namespace) -> int:
    u, a = _source_field(args)
    fam = _family_for(u, a, args.j_max)
    d = decompose(u, fam)
    size = l2_norm(u)
    error = l2_norm(combine([recompose(d), u], [1.0, -1.0]))
    blocks = []
    for j, block in zip(d.indices, d.blocks):
        inner, outer = fam.corona(j)
        blocks.append({"j": j, "l2": l2_norm(block), "inner": inner, "outer": outer})
    out = _out_dir(args)
    if out is not None:
        for j, block in zip(d.indices, d.blocks):
            write_field(block, out / f"block_{j:02d}.mtgf")
        write_field(d.remainder, out / "remainder.mtgf")
    _print({
        "grid": u.grid.model_dump(),
        "j_max": fam.j_max,
        "blocks": blocks,
        "remainder_l2": l2_norm(d.remainder),
        "reconstruction_error": error / size if size > 0 else error,
    })
    return EXIT_PASS


def cmd_norm(args: argparse.Namespace) -> int:
    u, a = _source_field(args)
    sp = SpaceParams(s=args.s, a=a, p=_exponents(args.p, u.n), q=args.q, scale=args.scale)
    report = space_quasi_norm(u, sp, _family_for(u, a))
    _print(json.loads(report.model_dump_json()))
    return EXIT_PASS


def cmd_trace(args: argparse.Namespace) -> int:
    u, a = _source_field(args)
    spec = TraceSpec(axis=args.axis, order=args.order)
    fam = _family_for(u, a)
    diagnostics = trace_report(u, spec, fam, _exponents(args.p, u.n))
    out = _out_dir(args)
    if out is not None:
        g = trace(u, spec, fam)
        write_field(g, out / "trace.mtgf")
        export_slice_csv(g, out / "trace.csv")
    _print(json.loads(diagnostics.model_dump_json()))
    return EXIT_PASS


def cmd_extend(args: argparse.Namespace) -> int:
    v, a_t = _source_field(args)
    tfam = _family_for(v, a_t)
    efam = build_extension_family(args.axis, args.order, weight=args.weight, seed=args.seed or 0)
    need_half, need_points = minimum_axis_grid(efam, tfam.j_max)
    half = max(args.axis_half_period, need_half)
    points = max(args.axis_points, need_points)
    w = extend(v, efam, tfam, half, points, args.order)
    full_a = a_t.inserted(args.axis, args.weight)
    g = trace(w, TraceSpec(axis=args.axis, order=args.order), build_family(full_a, w.grid, j_max=2), include_remainder=True)
    size = l2_norm(v)
    error = l2_norm(combine([g, v], [1.0, -1.0]))
    out = _out_dir(args)
    if out is not None:
        write_field(w, out / "extension.mtgf")
    _print({
        "grid": w.grid.model_dump(),
        "profile_residual": efam.residual,
        "trace_error": error / size if size > 0 else error,
        "nyquist_radius": nyquist_radius(w.grid, full_a),
    })
    return EXIT_PASS


def cmd_admissible(args: argparse.Namespace) -> int:
    if args.a is None:
        raise ConfigError("admissible needs --a or params in the config file")
    n = len(args.a)
    sp = SpaceParams(s=args.s, a=_anisotropy(args.a, n), p=_exponents(args.p, n), q=args.q, scale=args.scale)
    verdict = admissible(sp, TraceSpec(axis=args.axis, order=args.order, m=args.m))
    payload = json.loads(verdict.model_dump_json())
    out = _out_dir(args)
    if out is not None:
        (out / "admissible.json").write_text(json.dumps(payload, sort_keys=True, indent=2), encoding="utf-8")
    _print(payload)
    return EXIT_PASS


def cmd_counterexample(args: argparse.Namespace) -> int:
    fam = build_counterexample_family(
        args.axis,
        AnisotropyVector(a=args.a, convention="raw"),
        ExponentVector(p=args.p),
        j_min=args.j_min,
        j_max=args.j_max,
        layout=args.layout,
    )
    s = borderline_smoothness(fam) if args.s is None else args.s
    js = list(range(fam.j_min, fam.j_max + 1))
    rows = norm_table(fam, s, args.q, args.scale, js)
    payload: dict[str, Any] = {"s": s, "rows": [{"j": j, "norm": value} for j, value in rows]}
    if len(rows) >= 4:
        payload["fit"] = fit_asymptotics(js, [value for _, value in rows]).model_dump()
    out = _out_dir(args)
    if out is not None:
        write_norm_table(rows, out / "counterexample_norms.csv")
    _print(payload)
    return EXIT_PASS


def _suite_config(args: argparse.Namespace) -> SuiteConfig:
    data = _load_config_file(args.config)
    data["suite"] = args.suite
    if args.seed is not None:
        data["seed"] = args.seed
    if args.profile is not None:
        data["profile"] = args.profile
    if args.refine_check:
        data["refine_check"] = True
    cfg = SuiteConfig.model_validate(data)
    if args.grid is not None:
        # flag points keep the configured torus when the dimension matches
        base = cfg.grid or get_suite_preset(cfg.profile, cfg.suite).get("grid")
        base = Grid.model_validate(base) if isinstance(base, dict) else base
        if base is not None and base.n == len(args.grid):
            grid = Grid(half_periods=base.half_periods, points=args.grid)
        else:
            grid = _grid(args.grid, DEFAULT_HALF_PERIOD)
        cfg = cfg.model_copy(update={"grid": grid})
    return cfg


def cmd_verify(args: argparse.Namespace) -> int:
    if args.list:
        for name in suite_names():
            print(name)
        return EXIT_PASS
    if not args.suite:
        raise ConfigError("verify needs a suite name (or --list)")
    report = run_suite(_suite_config(args))
    out = args.out or Path(os.environ.get("MIXTRACE_OUT_DIR", "reports"))
    paths = emit_report(report, out)
    status = "PASS" if report.passed else "FAIL"
    print(f"{status} {report.suite}: constant max {report.constant_max:.4g} (declared {report.declared_constant:.4g}), report {paths['json']}")
    for case_id in report.failures:
        print(f"  failed: {case_id}")
    return EXIT_PASS if report.passed else EXIT_FAIL


_COMMANDS = {
    "decompose": cmd_decompose,
    "norm": cmd_norm,
    "trace": cmd_trace,
    "extend": cmd_extend,
    "admissible": cmd_admissible,
    "counterexample": cmd_counterexample,
    "verify": cmd_verify,
}


def _configure_logging(verbose: bool) -> None:
    level = "DEBUG" if verbose else os.environ.get("MIXTRACE_LOG_LEVEL", "INFO").upper()
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s %(message)s", stream=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        from dotenv import load_dotenv
        load_dotenv()
    except ImportError:
        pass
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        if args.config is not None and args.command != "verify":
            # second pass: the config file supplies defaults, explicit flags override it
            args = build_parser(_load_config_file(args.config), args.command).parse_args(argv)
        return _COMMANDS[args.command](args)
    except _CONFIG_ERRORS as e:
        _LOG.error("configuration error", extra={"command": args.command})
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except MixtraceError as e:
        _LOG.error("domain error", extra={"command": args.command, "error": type(e).__name__})
        print(f"domain error ({type(e).__name__}): {e}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
