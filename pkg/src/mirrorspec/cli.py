"""Command-line front end: sweeps written as self-describing CSV, and a self-check.

Every CSV starts with ``#`` comment lines echoing the tool version and the
full effective configuration as ``key=value``, followed by a header row and
data rows with 17 significant digits.  Identical configurations produce
byte-identical files.

Exit codes: 0 success, 2 usage error, 3 non-convergence, 4 other numerical
failure (tail bound, overflow), 10 + k when self-check suite k fails first.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .bogoliubov import FrequencyPair, beta_abs2_many, beta_closed, beta_numeric
from .exceptions import MirrorSpecError, NonConvergence, UsageError
from .oracles import bessel_k_trapezoid, gamma_abs2_on_line, re_digamma_series
from .quadrature import QuadratureConfig
from .spectrum import (
    CLOSED,
    EXACT,
    METHODS,
    SpectrumSeries,
    graybody_many,
    spectrum_closed_many,
    spectrum_exact,
    spectrum_sweep,
    thermal_fit,
    total_count,
)
from .specfun import EULER_GAMMA, bessel_k_imag_order, complex_gamma, re_digamma_on_line
from .trajectory import MirrorParams, sinh_advanced_time, schwarzschild_advanced_time, sinh_velocity, worldline_sample

MODES = ("spectrum-closed", "spectrum-exact", "beta", "trajectory", "total-count", "self-check")
SPACINGS = ("linear", "log")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3
EXIT_NUMERIC = 4
EXIT_SELF_CHECK_BASE = 10

FIGURE1 = {"kappa": 1.0, "g": 1e6, "omega_min": 1e-3, "omega_max": 4.0, "omega_steps": 400, "spacing": "log"}


@dataclass
class RunConfig:
    g: float | None = None
    kappa: float = 1.0
    omega_min: float = 1e-3
    omega_max: float = 4.0
    omega_steps: int = 400
    spacing: str = "log"
    mode: str = "spectrum-closed"
    omega_prime_min: float = 1e-2
    omega_prime_max: float = 1e2
    omega_prime_steps: int = 41
    x_min: float = -5.0
    x_max: float = 5.0
    x_steps: int = 101
    method: str = CLOSED
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    output_path: str = "-"

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise UsageError(f"--mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if self.spacing not in SPACINGS:
            raise UsageError(f"--spacing must be linear or log, got {self.spacing!r}")
        if self.method not in METHODS:
            raise UsageError(f"--method must be one of {', '.join(METHODS)}, got {self.method!r}")
        if self.mode != "self-check" and self.g is None:
            raise UsageError("--g is required (or use --figure1)")
        for name in ("kappa", "g", "omega_min", "omega_max", "omega_prime_min", "omega_prime_max"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise UsageError(f"--{name.replace('_', '-')} must be finite and > 0, got {value!r}")
        for lo, hi in (("omega_min", "omega_max"), ("omega_prime_min", "omega_prime_max"), ("x_min", "x_max")):
            if not getattr(self, lo) < getattr(self, hi):
                raise UsageError(f"--{lo.replace('_', '-')} must be below --{hi.replace('_', '-')}")
        for name in ("omega_steps", "omega_prime_steps", "x_steps"):
            if getattr(self, name) < 2:
                raise UsageError(f"--{name.replace('_', '-')} must be at least 2")
        return self

    def echo(self) -> list[tuple[str, str]]:
        """Flattened ``(key, value)`` pairs, in a fixed order, for CSV headers."""
        items = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name == "quadrature":
                for qf in dataclasses.fields(value):
                    items.append((f"quadrature.{qf.name}", _fmt_value(getattr(value, qf.name))))
            else:
                items.append((f.name, _fmt_value(value)))
        return items


def _fmt_value(value) -> str:
    if isinstance(value, tuple):
        return ",".join(_fmt_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

def _float(text):
    return float(text)


def _int(text):
    value = float(text)
    if value != int(value):
        raise ValueError(f"not an integer: {text}")
    return int(value)


def _eps_list(text):
    return tuple(float(t) for t in str(text).split(",") if t.strip())


_KEYS: dict[str, Callable] = {
    "kappa": _float,
    "g": _float,
    "omega_min": _float,
    "omega_max": _float,
    "omega_steps": _int,
    "spacing": str,
    "mode": str,
    "omega_prime_min": _float,
    "omega_prime_max": _float,
    "omega_prime_steps": _int,
    "x_min": _float,
    "x_max": _float,
    "x_steps": _int,
    "method": str,
    "output": str,
    "quadrature.rel_tol": _float,
    "quadrature.abs_tol": _float,
    "quadrature.max_refinements": _int,
    "quadrature.damping_eps_sequence": _eps_list,
    "quadrature.u_max": _float,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="mirrorspec",
        description="Particle creation by the asymptotically static thermal mirror.",
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"mirrorspec {__version__}")
    parser.add_argument("--config", metavar="PATH", help="flat key=value config file")
    parser.add_argument("--figure1", action="store_true", help="defaults of the g/kappa = 1e6 spectrum figure")
    for key in _KEYS:
        flag = "--" + key.replace("_", "-") if not key.startswith("quadrature.") else "--" + key
        parser.add_argument(flag, dest=key, default=None, metavar="VALUE")
    return parser


def read_config_file(path) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment; dotted keys nest."""
    out = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_") if not key.startswith("quadrature.") else key
        if key == "output_path":
            key = "output"
        if key not in _KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = value
    return out


def _apply(cfg: RunConfig, values: dict, source: str) -> RunConfig:
    quad = {}
    plain = {}
    for key, raw in values.items():
        try:
            value = _KEYS[key](raw)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"{source}: bad value for {key!r}: {raw!r} ({exc})") from None
        if key.startswith("quadrature."):
            quad[key.split(".", 1)[1]] = value
        elif key == "output":
            plain["output_path"] = value
        else:
            plain[key] = value
    if quad:
        try:
            plain["quadrature"] = dataclasses.replace(cfg.quadrature, **quad)
        except MirrorSpecError as exc:
            raise UsageError(f"{source}: {exc}") from None
    return dataclasses.replace(cfg, **plain)


def parse_config(argv: Sequence[str] | None = None, config_path=None) -> RunConfig:
    """Build the effective :class:`RunConfig`: defaults < config file < flags."""
    args = _build_parser().parse_args(list(argv) if argv is not None else None)
    cfg = RunConfig()
    if args.figure1:
        cfg = dataclasses.replace(cfg, mode="spectrum-closed", **FIGURE1)
    path = args.config or config_path
    if path is not None:
        try:
            file_values = read_config_file(path)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        cfg = _apply(cfg, file_values, str(path))
    flags = {k: v for k, v in vars(args).items() if k in _KEYS and v is not None}
    cfg = _apply(cfg, flags, "command line")
    return cfg.validate()


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------

def _grid(lo, hi, steps, spacing):
    if spacing == "log":
        grid = np.geomspace(lo, hi, steps)
    else:
        grid = np.linspace(lo, hi, steps)
    grid[0], grid[-1] = lo, hi
    return grid


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _csv(cfg: RunConfig, columns, rows, extra=()) -> str:
    buf = io.StringIO()
    buf.write(f"# mirrorspec version={__version__}\n")
    for key, value in cfg.echo():
        buf.write(f"# {key}={value}\n")
    for key, value in extra:
        buf.write(f"# {key}={value}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _spectrum_csv(cfg: RunConfig, method: str) -> str:
    p = MirrorParams(cfg.kappa, cfg.g)
    grid = _grid(cfg.omega_min, cfg.omega_max, cfg.omega_steps, cfg.spacing)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        series = spectrum_sweep(grid, p, method, cfg.quadrature)
    extra = [("flags", ",".join(series.meta.get("flags", ())) or "none")]
    extra += [("warning", str(w.message)) for w in caught]
    rows = zip(series.omega, series.n_omega, series.est_error)
    return _csv(cfg, ("omega", "n_omega", "est_error"), rows, extra)


def run_figure1(cfg: RunConfig | None = None) -> str:
    """CSV of the closed-form spectrum at ``g/kappa = 1e6``, ``omega`` in ``[1e-3, 4]``."""
    if cfg is None:
        cfg = RunConfig(**FIGURE1)
    return _spectrum_csv(dataclasses.replace(cfg, mode="spectrum-closed").validate(), CLOSED)


def _beta_csv(cfg: RunConfig) -> str:
    p = MirrorParams(cfg.kappa, cfg.g)
    omegas = _grid(cfg.omega_min, cfg.omega_max, cfg.omega_steps, cfg.spacing)
    primes = _grid(cfg.omega_prime_min, cfg.omega_prime_max, cfg.omega_prime_steps, cfg.spacing)
    rows = []
    for w in omegas:
        if cfg.method == EXACT:
            # direct quadrature of the defining integral, one pair at a time
            vals = [abs(beta_numeric(FrequencyPair(w, wp), p, cfg.quadrature)) ** 2 for wp in primes]
        else:
            vals, _ = beta_abs2_many(w, primes, p, cfg.quadrature)
        rows.extend(zip([w] * primes.size, primes, vals))
    return _csv(cfg, ("omega", "omega_prime", "abs_beta2"), rows)


def _trajectory_csv(cfg: RunConfig) -> str:
    p = MirrorParams(cfg.kappa, cfg.g)
    xs = np.linspace(cfg.x_min, cfg.x_max, cfg.x_steps)
    points = worldline_sample(xs, p)
    rows = [(pt.x, pt.t, pt.v, pt.velocity) for pt in points]
    return _csv(cfg, ("x", "t", "v", "velocity"), rows)


def _total_csv(cfg: RunConfig) -> str:
    p = MirrorParams(cfg.kappa, cfg.g)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = total_count(p, cfg.quadrature, cfg.method)
    extra = [("warning", str(w.message)) for w in caught]
    row = (p.kappa, p.g, res.method, res.n_total, res.est_error, res.tail_bound, res.omega_max)
    return _csv(cfg, ("kappa", "g", "method", "n_total", "est_error", "tail_bound", "omega_max"), [row], extra)


# ---------------------------------------------------------------------------
# Self-check
# ---------------------------------------------------------------------------

@dataclass
class SuiteResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""


def _suite_specfun(cfg: RunConfig, hooks: dict) -> SuiteResult:
    tight = dataclasses.replace(cfg.quadrature, rel_tol=min(cfg.quadrature.rel_tol, 1e-12), abs_tol=1e-15)
    worst = 0.0
    for y in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
        worst = max(worst, abs(abs(complex_gamma(1 + 1j * y)) ** 2 / gamma_abs2_on_line(y) - 1.0))
    for x in (0.5, 1.0, 2.0, 5.0):
        ref = bessel_k_trapezoid(0.0, x)
        worst = max(worst, abs(bessel_k_imag_order(0.0, x, tight) / ref - 1.0))
    ref = bessel_k_trapezoid(2.0, 0.1)
    worst = max(worst, abs(bessel_k_imag_order(2.0, 0.1, tight) / ref - 1.0))
    worst = max(worst, abs(re_digamma_on_line(0.0) + EULER_GAMMA))
    worst = max(worst, abs(re_digamma_on_line(1.0) - re_digamma_series(1.0)))
    tol = 1e-10
    return SuiteResult("specfun identities", worst <= tol, worst, tol)


def _suite_trajectory(cfg: RunConfig, hooks: dict) -> SuiteResult:
    rng = np.random.default_rng(20190628)
    worst = 0.0
    ok = True
    for _ in range(2000):
        kappa, g = 10 ** rng.uniform(-2, 2), 10 ** rng.uniform(-2, 6)
        p = MirrorParams(kappa, g)
        x = rng.uniform(-300, 300) / kappa
        ok &= abs(sinh_velocity(x, p)) < 1.0
        worst = max(worst, abs(abs(sinh_velocity(0.0, p)) - 1.0 / (1.0 + 2.0 * kappa / g)))
    p = MirrorParams(1.0, 1e6)
    for u in (15.5, 20.0, 40.0):
        x = u / 2.0
        ratio = sinh_advanced_time(x, p) / schwarzschild_advanced_time(x, 1.0)
        worst = max(worst, abs(ratio - 1.0 / (2.0 * p.g)) * 2.0 * p.g)
    tol = 1e-6
    return SuiteResult("trajectory kinematics", bool(ok) and worst <= tol, worst, tol)


def _suite_beta(cfg: RunConfig, hooks: dict) -> SuiteResult:
    p = MirrorParams(1.0, 10.0)
    worst = 0.0
    for w in (0.5, 1.0, 2.0):
        for wp in (0.5, 1.0, 2.0):
            fp = FrequencyPair(w, wp)
            c = beta_closed(fp, p, cfg.quadrature)
            n = beta_numeric(fp, p, cfg.quadrature)
            worst = max(worst, abs(abs(n) - abs(c)) / abs(c))
    tol = 1e-4
    return SuiteResult("beta numeric vs closed", worst <= tol, worst, tol)


def _suite_spectrum(cfg: RunConfig, hooks: dict) -> SuiteResult:
    g = 1e3
    p = MirrorParams(1.0, g)
    grid = np.geomspace(0.1, 2.0, 10)
    closed = spectrum_closed_many(grid, g).n_omega
    worst = 0.0
    for w, c in zip(grid, closed):
        e = spectrum_exact(float(w), p, cfg.quadrature).n_omega
        worst = max(worst, abs(c - e) / e)
    tol = 0.05
    return SuiteResult("spectrum exact vs closed", worst <= tol, worst, tol)


def _suite_thermal(cfg: RunConfig, hooks: dict) -> SuiteResult:
    g = 1e6
    grid = np.geomspace(1e-3, 4.0, 400)
    d = graybody_many(grid, g)
    temperature = hooks.get("temperature_scale", 1.0) / (2.0 * math.pi)
    with np.errstate(over="ignore"):
        n = d["gray"] / np.expm1(grid / temperature)
    fit = thermal_fit(SpectrumSeries(grid, n, np.zeros_like(n), CLOSED))
    measured = abs(fit.temperature * 2.0 * math.pi - 1.0)
    tol = 0.02
    return SuiteResult("thermal tail fit", measured <= tol, measured, tol,
                       f"T={fit.temperature:.6g} plateau={fit.plateau:.6g}")


SUITES = (_suite_specfun, _suite_trajectory, _suite_beta, _suite_spectrum, _suite_thermal)


def run_self_check(cfg: RunConfig | None = None, **hooks) -> tuple[int, str]:
    """Run every oracle suite in order; returns ``(exit_code, report)``.

    ``hooks`` are test-only mutations, e.g. ``temperature_scale=1.1``.
    """
    cfg = cfg or RunConfig(mode="self-check")
    results = []
    for k, suite in enumerate(SUITES, 1):
        try:
            results.append(suite(cfg, hooks))
        except MirrorSpecError as exc:
            results.append(SuiteResult(suite.__name__[7:], False, float("nan"), float("nan"), repr(exc)))
    buf = io.StringIO()
    buf.write(f"# mirrorspec version={__version__}\n")
    for key, value in cfg.echo():
        buf.write(f"# {key}={value}\n")
    buf.write(f"{'suite':<28} {'status':<6} {'measured':>12} {'tolerance':>10}  detail\n")
    code = EXIT_OK
    for k, r in enumerate(results, 1):
        status = "PASS" if r.passed else "FAIL"
        buf.write(f"{r.name:<28} {status:<6} {r.measured:>12.3e} {r.tolerance:>10.1e}  {r.detail}\n")
        if not r.passed and code == EXIT_OK:
            code = EXIT_SELF_CHECK_BASE + k
    return code, buf.getvalue()


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute a validated config; returns ``(exit_code, text)``."""
    if cfg.mode == "self-check":
        return run_self_check(cfg)
    if cfg.mode == "spectrum-closed":
        return EXIT_OK, _spectrum_csv(cfg, CLOSED)
    if cfg.mode == "spectrum-exact":
        return EXIT_OK, _spectrum_csv(cfg, EXACT)
    if cfg.mode == "beta":
        return EXIT_OK, _beta_csv(cfg)
    if cfg.mode == "trajectory":
        return EXIT_OK, _trajectory_csv(cfg)
    return EXIT_OK, _total_csv(cfg)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
        code, text = run(cfg)
    except UsageError as exc:
        print(f"mirrorspec: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergence as exc:
        print(f"mirrorspec: did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (MirrorSpecError, OverflowError) as exc:
        print(f"mirrorspec: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.output_path in ("-", ""):
        sys.stdout.write(text)
    else:
        Path(cfg.output_path).write_text(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
