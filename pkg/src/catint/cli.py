"""Command-line front end.

Subcommands ``integrate``, ``antiderive``, ``differentiate`` and ``fourier``
print one JSON object ``{"value", "level_reached", "converged", "residual"}``;
``verify`` prints one line per suite; ``table`` prints CSV with the header
``level,value,residual``.

Settings come from defaults, then ``--config file.json``, then explicit
flags. Exit codes: 0 success, 1 bad input or configuration, 2 no
convergence within the level cap, 3 a verification suite found violations.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, fields, replace
from typing import Any, Optional

from .algebra import (TauMap, algebra_from_json, checked, diagonal_algebra, field_algebra,
                      tau_from_vertex)
from .engine import theta, theta_limit
from .errors import CatIntError, DimensionMismatch, ParseError
from .expr import FunctionSpec, parse_function
from .measure import BoxMeasure, box_from_json
from .scalars import Backend, format_scalar, parse_scalar
from .stepfn import averaging_weight, max_level, ratio_weight, refine_to, sample, step_norm_p
from .targets import (PiecewiseLinear, check_antiderivative_setting, antiderivative_target,
                      fourier_coefficient, integrate_report, integration_target, weak_derivative)
from .verify import run_suites

log = logging.getLogger("catint")

EXIT_CONFIG, EXIT_NO_CONVERGENCE, EXIT_VERIFY = 1, 2, 3


class ConfigError(CatIntError):
    pass


@dataclass(frozen=True)
class RunConfig:
    function: Optional[str] = None
    n: Optional[int] = None
    backend: Optional[str] = None
    algebra: Optional[dict] = None
    measure: Any = "lebesgue"
    interval: Optional[str] = None
    xi: Optional[str] = None
    levels: Any = None
    tol: Optional[float] = None
    convention: str = "midpoint"
    weight: str = "ratio"
    k: Optional[int] = None
    u: int = 12
    suite: str = "all"
    cases: int = 100
    seed: int = 0


_FIELDS = {f.name for f in fields(RunConfig)}


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"config {path} is not valid JSON: {exc.msg} (line {exc.lineno})", exc.colno) from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def merge(config_file: Optional[str], flags: dict) -> RunConfig:
    """Defaults, overridden by the config file, overridden by explicit flags."""
    merged = load_config(config_file) if config_file else {}
    merged.update({k: v for k, v in flags.items() if v is not None and k in _FIELDS})
    return replace(RunConfig(), **merged)


# -- interpretation of a RunConfig -------------------------------------------------------


def parse_levels(spec, n: int) -> tuple[int, int]:
    if spec is None:
        return 4, min(16, max_level(n))
    if isinstance(spec, str):
        try:
            lo, hi = (int(x) for x in spec.split(":"))
        except ValueError:
            raise ParseError(f"levels must look like 4:16, got {spec!r}") from None
    else:
        try:
            lo, hi = (int(x) for x in spec)
        except (TypeError, ValueError):
            raise ParseError(f"levels must be a pair, got {spec!r}") from None
    if not 0 <= lo <= hi:
        raise ConfigError(f"levels need 0 <= low <= high, got {lo}:{hi}")
    if hi > max_level(n):
        raise ConfigError(f"level {hi} exceeds the maximum {max_level(n)} for n={n}")
    return lo, hi


def _measure_spec(cfg: RunConfig) -> Any:
    m = cfg.measure
    if isinstance(m, str):
        text = m.strip()
        if text.startswith("{") or text.startswith("["):
            try:
                return json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad measure JSON: {exc.msg}", exc.colno) from None
        if text == "lebesgue":
            spec = {"measure": {"kind": "lebesgue"}}
        elif text.startswith("power:"):
            spec = {"measure": {"kind": "power", "q": text[6:]}}
        elif text.startswith("poly:"):
            spec = {"measure": {"kind": "poly", "coeffs": [c for c in text[5:].split(",") if c]}}
        else:
            raise ParseError(f"unknown measure {text!r}")
        if cfg.interval:
            try:
                a, b = cfg.interval.split(",")
            except ValueError:
                raise ParseError(f"interval must look like 0,1, got {cfg.interval!r}") from None
            spec["interval"] = {"a": a.strip(), "b": b.strip()}
        if cfg.xi is not None:
            spec["xi"] = cfg.xi
        return spec
    return m


def _backend(cfg: RunConfig, default: Backend) -> Backend:
    if cfg.backend is None:
        return default
    try:
        return Backend(cfg.backend)
    except ValueError:
        raise ConfigError(f"unknown backend {cfg.backend!r}") from None


@dataclass
class Setup:
    fn: FunctionSpec
    n: int
    backend: Backend
    bm: BoxMeasure
    algebra: Any
    tau: Any
    levels: tuple


def build(cfg: RunConfig, default_backend: Backend | None = None) -> Setup:
    if not cfg.function:
        raise ConfigError("a function is required (--function)")
    text = cfg.function.strip()
    if default_backend is None:
        default_backend = Backend.RATIONAL if text.startswith(("step:", "pl:")) else Backend.FLOAT
    backend = _backend(cfg, default_backend)
    alg_backend = Backend.RATIONAL if backend is Backend.RATIONAL else Backend.FLOAT
    if cfg.algebra is not None:
        spec = cfg.algebra
        if isinstance(spec, str):
            try:
                spec = json.loads(spec)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad algebra JSON: {exc.msg}", exc.colno) from None
        A, tau = checked(*algebra_from_json(spec, alg_backend))
        n = A.dim
        if cfg.n is not None and cfg.n != n:
            raise DimensionMismatch(f"n={cfg.n} disagrees with the algebra dimension {n}")
    else:
        n = cfg.n
    fn = parse_function(text, n, backend)
    if n is None:
        n = fn.n
    if fn.n != n:
        raise DimensionMismatch(f"function uses {fn.n} variables but n={n}")
    if cfg.algebra is None:
        if n == 1:
            A = field_algebra(alg_backend)
            tau = TauMap.identity(A)
        else:
            A = diagonal_algebra(n, alg_backend)
            tau = tau_from_vertex(A, "1")
    num = Backend.RATIONAL if backend is Backend.RATIONAL else Backend.FLOAT
    bm = box_from_json(_measure_spec(cfg), n, num)
    if cfg.weight == "ratio":
        w = ratio_weight(bm)
    elif cfg.weight == "average":
        w = averaging_weight(n)
    else:
        raise ConfigError(f"unknown weight {cfg.weight!r}; use ratio or average")
    log.info("direct-sum weight %s = %s", cfg.weight, w)
    if cfg.convention not in ("midpoint", "left", "right"):
        raise ConfigError(f"unknown sampling convention {cfg.convention!r}")
    return Setup(fn, n, backend, bm, A, tau, parse_levels(cfg.levels, n))


def _result(value, level, converged, residual) -> dict:
    return {"value": value, "level_reached": level, "converged": bool(converged),
            "residual": None if residual is None else format_scalar(residual)}


def _tol(cfg: RunConfig, backend: Backend):
    if cfg.tol is None:
        return 0 if backend.exact else 1e-6
    return parse_scalar(cfg.tol, Backend.RATIONAL) if backend.exact else float(cfg.tol)


def cmd_integrate(cfg: RunConfig) -> tuple[dict, int]:
    s = build(cfg)
    if s.fn.kind == "step":
        value, rep = integrate_report(s.fn.step, s.bm, s.algebra, s.tau)
    else:
        lo, hi = s.levels
        value, rep = integrate_report(s.fn.sampler, s.bm, s.algebra, s.tau, backend=s.backend,
                                      tol=_tol(cfg, s.backend), u_min=lo, u_max=hi,
                                      convention=cfg.convention, vectorized=True)
    out = _result(format_scalar(value), rep.level_reached, rep.converged, rep.residual)
    return out, 0 if rep.converged else EXIT_NO_CONVERGENCE


def _pl_values(F: PiecewiseLinear) -> list:
    return [format_scalar(v) for v in F.values]


def cmd_antiderive(cfg: RunConfig) -> tuple[dict, int]:
    s = build(cfg)
    check_antiderivative_setting(s.bm, s.algebra, s.tau)
    t = antiderivative_target(s.backend)
    if s.fn.kind == "step":
        F = theta(s.fn.step, t)
        return _result(_pl_values(F), F.u, True, s.backend.zero()), 0
    if s.fn.kind == "pl":
        raise ConfigError("antiderive takes a step function or a sampler, not breakpoints")
    lo, hi = s.levels
    F, rep = theta_limit(s.fn.sampler, t, s.bm, _tol(cfg, s.backend), lo, hi, cfg.convention, True)
    return _result(_pl_values(F), rep.level_reached, rep.converged, rep.residual), \
        0 if rep.converged else EXIT_NO_CONVERGENCE


def cmd_differentiate(cfg: RunConfig) -> tuple[dict, int]:
    s = build(cfg)
    check_antiderivative_setting(s.bm, s.algebra, s.tau)
    if s.fn.kind == "pl":
        D = weak_derivative(s.fn.breakpoints)
        return _result([format_scalar(c) for c in D.coeffs], D.u, True, s.backend.zero()), 0
    if s.fn.kind == "step":
        raise ConfigError("differentiate takes breakpoints (pl:...) or a sampler, not a step function")
    lo, hi = s.levels
    tol = _tol(cfg, s.backend)
    pts_scheme = s.bm.schemes[0]
    prev, residual, converged, D = None, None, False, None
    for u in range(lo, hi + 1):
        pts = pts_scheme.points(u)
        vals = s.fn.sampler(pts)
        vals = vals - vals[0]
        D = weak_derivative(PiecewiseLinear(u, vals))
        if prev is not None:
            residual = step_norm_p(D - refine_to(prev, u), s.bm, 1)
            if residual <= tol:
                converged = True
                break
        prev = D
    return _result([format_scalar(c) for c in D.coeffs], D.u, converged, residual), \
        0 if converged else EXIT_NO_CONVERGENCE


def cmd_fourier(cfg: RunConfig) -> tuple[dict, int]:
    if cfg.k is None:
        raise ConfigError("fourier needs --k")
    s = build(cfg, Backend.FLOAT)
    if s.n != 1:
        raise ConfigError("Fourier coefficients need a single axis")
    m = s.bm.measures[0]
    if m.a != 0 or m.b != 1 or m.degree != 1 or m.coeffs[1] != 1 or m.coeffs[0] != 0:
        raise ConfigError("Fourier coefficients use Lebesgue measure on [0, 1]")
    f = s.fn.step if s.fn.kind == "step" else s.fn.sampler
    if f is None:
        raise ConfigError("fourier takes a step function or a sampler")
    vec = s.fn.kind != "step"
    c = fourier_coefficient(f, cfg.k, cfg.u, vectorized=vec)
    residual = abs(c - fourier_coefficient(f, cfg.k, cfg.u - 1, vectorized=vec)) if cfg.u > 0 else None
    value = {"re": c.real, "im": c.imag, "k": cfg.k}
    return _result(value, max(cfg.u, getattr(f, "u", 0)), True, residual), 0


def cmd_table(cfg: RunConfig) -> tuple[str, int]:
    s = build(cfg)
    lo, hi = s.levels
    t = integration_target(s.bm, s.algebra, s.tau, s.backend)
    rows = ["level,value,residual"]
    prev = None
    for u in range(lo, hi + 1):
        if s.fn.kind == "step":
            f = refine_to(s.fn.step, max(u, s.fn.step.u))
        elif s.fn.sampler is not None:
            f = sample(s.fn.sampler, s.bm, u, cfg.convention, True, s.backend)
        else:
            raise ConfigError("table takes a step function or a sampler")
        value = t.value(theta(f, t))
        residual = "" if prev is None else _csv(abs(value - prev))
        rows.append(f"{u},{_csv(value)},{residual}")
        prev = value
    return "\n".join(rows), 0


def _csv(x) -> str:
    v = format_scalar(x)
    return repr(v) if isinstance(v, float) else str(v)


# -- argument parsing ---------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="catint", description="Integration by universal recursion over dyadic step functions.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, with_function=True):
        sp.add_argument("--config", help="JSON file with RunConfig keys; flags override it")
        if with_function:
            sp.add_argument("--function", help="expression in x1..xn, step:U,c1,..., poly:c0,c1,... or pl:U,v0,...")
            sp.add_argument("--n", type=int, help="dimension of the box")
            sp.add_argument("--backend", choices=[b.value for b in Backend])
            sp.add_argument("--algebra", help="algebra JSON (explicit table or quiver)")
            sp.add_argument("--measure", help="lebesgue, power:Q, poly:c0,c1,... or per-axis JSON")
            sp.add_argument("--interval", help="a,b for every axis")
            sp.add_argument("--xi", help="split point, default the midpoint")
            sp.add_argument("--levels", help="LOW:HIGH refinement levels")
            sp.add_argument("--tol", help="stop when successive levels differ by at most this")
            sp.add_argument("--convention", choices=["midpoint", "left", "right"])
            sp.add_argument("--weight", choices=["ratio", "average"])

    for name in ("integrate", "antiderive", "differentiate", "table"):
        common(sub.add_parser(name))
    f = sub.add_parser("fourier")
    common(f)
    f.add_argument("--k", type=int, help="frequency")
    f.add_argument("--u", type=int, help="sampling level for sine and cosine")
    v = sub.add_parser("verify")
    common(v, with_function=False)
    v.add_argument("--suite", help="suite name or 'all'")
    v.add_argument("--cases", type=int)
    v.add_argument("--seed", type=int)
    return p


COMMANDS = {
    "integrate": cmd_integrate,
    "antiderive": cmd_antiderive,
    "differentiate": cmd_differentiate,
    "fourier": cmd_fourier,
    "table": cmd_table,
}


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose")}
    try:
        cfg = merge(args.config, flags)
        if args.command == "verify":
            results = run_suites(cfg.suite, cfg.cases, cfg.seed)
            for r in results:
                print(r.line())
                for failure in r.failures[:10]:
                    log.warning("%s: %s", r.name, failure)
            return 0 if all(r.ok for r in results) else EXIT_VERIFY
        out, code = COMMANDS[args.command](cfg)
    except (CatIntError, KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    print(out if isinstance(out, str) else json.dumps(out))
    if code == EXIT_NO_CONVERGENCE:
        print("error: no convergence within the level cap", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
