"""Particle spectrum of the sinh mirror and derived quantities.

Two routes to ``N_omega`` are provided:

* ``exact_quadrature`` integrates ``|beta_{w w'}|^2`` over ``w'`` on a log
  scale, with certified bounds on the discarded ranges.
* ``closed_form`` is the large-``g`` result
  ``N_w = Gamma_w / (exp(2 pi w) - 1)`` with the graybody factor
  ``Gamma_w = A / pi + B / 4``, stated in units ``kappa = 1``.

The graybody factor is a difference of terms that grow like ``ln(1/w)``
while their sum vanishes as ``w -> 0``; below ``OMEGA_SMALL`` it is
evaluated in extended precision with mpmath.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .bogoliubov import beta_abs2_many
from .exceptions import (
    CancellationWarning,
    DomainError,
    InsufficientTail,
    TailBoundExceeded,
    ValidityWarning,
)
from .quadrature import QuadratureConfig, integrate
from .specfun import EULER_GAMMA, bessel_k_imag_order, complex_loggamma, harmonic_imag
from .trajectory import THERMAL_RATIO, MirrorParams

__all__ = [
    "EXACT",
    "CLOSED",
    "OMEGA_SMALL",
    "SpectrumSample",
    "SpectrumSeries",
    "GraybodyParts",
    "TotalCount",
    "ThermalFitResult",
    "spectrum_exact",
    "graybody",
    "graybody_many",
    "spectrum_closed",
    "spectrum_closed_many",
    "spectrum_sweep",
    "total_count",
    "thermal_fit",
    "graybody_plateau",
]

EXACT = "exact_quadrature"
CLOSED = "closed_form"
METHODS = (EXACT, CLOSED)

OMEGA_SMALL = 1e-2
_EXTENDED_DPS = (40, 60)

# omega' integration starts at omega * _LOWER_FRACTION
_LOWER_FRACTION = 1e-4
_TAIL_C0 = 20.0
_TAIL_DOUBLINGS = 12

_DEFAULT_CFG = QuadratureConfig()
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SpectrumSample:
    """One spectrum value with its provenance."""

    omega: float
    n_omega: float
    method: str
    est_error: float
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}")
        if not (math.isfinite(self.n_omega) and math.isfinite(self.est_error)):
            raise DomainError("spectrum values must be finite")
        if self.n_omega < 0 and "negative_closed_form" not in self.flags:
            raise DomainError("negative spectrum value without a validity flag")


@dataclass
class SpectrumSeries:
    """Spectrum sampled on a grid of frequencies (ascending)."""

    omega: np.ndarray
    n_omega: np.ndarray
    est_error: np.ndarray
    method: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=float)
        self.n_omega = np.asarray(self.n_omega, dtype=float)
        self.est_error = np.asarray(self.est_error, dtype=float)
        if not (self.omega.shape == self.n_omega.shape == self.est_error.shape):
            raise DomainError("omega, n_omega and est_error must have the same shape")

    @classmethod
    def from_samples(cls, samples: Sequence[SpectrumSample], **meta) -> "SpectrumSeries":
        method = samples[0].method if samples else CLOSED
        return cls(
            np.array([s.omega for s in samples]),
            np.array([s.n_omega for s in samples]),
            np.array([s.est_error for s in samples]),
            method,
            dict(meta),
        )

    def __len__(self):
        return self.omega.size


@dataclass(frozen=True)
class GraybodyParts:
    """Pieces of the closed-form spectrum at one frequency (``kappa = 1``)."""

    omega: float
    g: float
    a_term: float
    b_term: float
    b_imag: float
    gray: float
    planck: float
    extended_precision: bool = False
    est_error: float = 0.0

    @property
    def n_omega(self) -> float:
        return self.gray * self.planck


@dataclass(frozen=True)
class TotalCount:
    """Total particle number with its error budget."""

    n_total: float
    est_error: float
    tail_bound: float
    omega_max: float
    method: str

    def __float__(self):
        return self.n_total


@dataclass(frozen=True)
class ThermalFitResult:
    temperature: float
    plateau: float
    fit_residual: float
    window: tuple[float, float]

    def __iter__(self):
        return iter((self.temperature, self.plateau, self.fit_residual))


# ---------------------------------------------------------------------------
# Exact spectrum
# ---------------------------------------------------------------------------

def _upper_tail_bound(omega, w_cut, p: MirrorParams):
    # |K_{i nu}(x)| <= K_0(x) <= sqrt(pi / 2x) e^{-x}, and w' / w_p <= 1
    wp = omega + w_cut
    return (
        omega * math.exp(-math.pi * omega / p.kappa) * p.g**2
        * math.exp(-2.0 * wp / p.g) / (4.0 * math.pi * p.kappa**2 * wp**2)
    )


def _lower_tail_bound(omega, w_low, p: MirrorParams, cfg):
    # |beta|^2 <= w' / (pi^2 kappa^2 w) e^{-pi w / kappa} K_0(w / g)^2 for w' < w_low
    k0 = bessel_k_imag_order(0.0, omega / p.g, cfg)
    return w_low**2 / (2.0 * math.pi**2 * p.kappa**2 * omega) * math.exp(-math.pi * omega / p.kappa) * k0**2


def spectrum_exact(omega: float, p: MirrorParams, cfg: QuadratureConfig | None = None) -> SpectrumSample:
    """``N_omega = int_0^inf |beta_{omega omega'}|^2 d omega'`` by quadrature.

    The integral runs over ``s = ln omega'`` from ``ln(omega * 1e-4)`` up to
    ``ln(C g)``, with ``C`` doubled until the bound on the discarded tail
    (from ``|K_{i nu}(x)| <= sqrt(pi / 2x) exp(-x)``) is below ``abs_tol``.
    The returned ``est_error`` adds the quadrature error, both discarded
    ranges and the propagated Bessel-kernel tolerance.

    Raises
    ------
    TailBoundExceeded
        If no cutoff up to ``C = 20 * 2**12`` certifies the tail.
    NonConvergence
        From the inner or outer quadrature.
    """
    cfg = cfg or _DEFAULT_CFG
    omega = float(omega)
    if not (math.isfinite(omega) and omega > 0):
        raise DomainError(f"omega must be finite and > 0, got {omega!r}")

    c = _TAIL_C0
    for _ in range(_TAIL_DOUBLINGS + 1):
        w_cut = c * p.g
        tail = _upper_tail_bound(omega, w_cut, p)
        if tail < cfg.abs_tol:
            break
        c *= 2.0
    else:
        raise TailBoundExceeded(f"tail bound {tail:.3g} above abs_tol {cfg.abs_tol:g}")

    w_low = omega * _LOWER_FRACTION
    lower = _lower_tail_bound(omega, w_low, p, cfg)

    def integrand(s):
        wp = np.exp(s)
        val, _ = beta_abs2_many(omega, wp, p, cfg)
        return val * wp

    s0, s1 = math.log(w_low), math.log(w_cut)
    breaks = np.concatenate([np.arange(s0, s1, 1.0), [s1, math.log(omega), math.log(p.g)]])
    breaks = breaks[(breaks >= s0) & (breaks <= s1)]
    value, q_err = integrate(
        integrand,
        breaks,
        rel_tol=cfg.rel_tol,
        abs_tol=cfg.abs_tol,
        max_refinements=cfg.max_refinements,
        what=f"N_omega at omega={omega:g}",
    )
    value = float(value)
    est = float(q_err) + tail + lower + 2.0 * cfg.rel_tol * abs(value)
    return SpectrumSample(omega, value, EXACT, est)


# ---------------------------------------------------------------------------
# Closed form
# ---------------------------------------------------------------------------

def _log_csch(x):
    return -x + math.log(2.0) - np.log(-np.expm1(-2.0 * x))


def _graybody_double(omega: np.ndarray, g: float):
    a_term = np.log(2.0 * g / omega) + harmonic_imag(omega).real - EULER_GAMMA - 1.0
    log_ratio = np.log(omega / (2.0 * g))
    lc = _log_csch(math.pi * omega)
    term1 = np.exp(2j * omega * log_ratio - 2.0 * complex_loggamma(1.0 + 1j * omega) + lc) / (2.0 * omega + 1j)
    term2 = np.exp(-2j * omega * log_ratio - 2.0 * complex_loggamma(1.0 - 1j * omega) + lc) / (2.0 * omega - 1j)
    b = term1 + term2
    gray = a_term / math.pi + b.real / 4.0
    scale = np.abs(a_term) / math.pi + (np.abs(term1) + np.abs(term2)) / 4.0
    return a_term, b.real, b.imag, gray, 32.0 * _EPS * scale


def _graybody_mp(omega: float, g: float, dps: int):
    with mpmath.workdps(dps):
        w = mpmath.mpf(omega)
        gg = mpmath.mpf(g)
        a_term = mpmath.log(2 * gg / w) + mpmath.re(mpmath.euler + mpmath.digamma(1 + 1j * w)) - mpmath.euler - 1
        ratio = w / (2 * gg)
        csch = mpmath.csch(mpmath.pi * w)
        term1 = ratio ** (2j * w) * csch / ((2 * w + 1j) * mpmath.gamma(1 + 1j * w) ** 2)
        term2 = ratio ** (-2j * w) * csch / ((2 * w - 1j) * mpmath.gamma(1 - 1j * w) ** 2)
        b = term1 + term2
        gray = a_term / mpmath.pi + mpmath.re(b) / 4
        return float(a_term), float(mpmath.re(b)), float(mpmath.im(b)), gray


def _graybody_extended(omega: float, g: float):
    lo, hi = _EXTENDED_DPS
    a_term, b_re, b_im, gray = _graybody_mp(omega, g, lo)
    _, _, _, gray_hi = _graybody_mp(omega, g, hi)
    diff = float(abs(gray - gray_hi))
    gray = float(gray_hi)
    if diff > 1e-12 * abs(gray):
        warnings.warn(
            f"graybody at omega={omega:g}: extended precision disagrees by {diff:.3g}",
            CancellationWarning,
            stacklevel=3,
        )
    return a_term, b_re, b_im, gray, diff + 4.0 * _EPS * abs(gray)


def _check_omega_g(omega, g):
    omega = np.asarray(omega, dtype=float)
    if not (np.all(np.isfinite(omega)) and np.all(omega > 0)):
        raise DomainError("omega must be finite and > 0")
    if not (math.isfinite(g) and g > 0):
        raise DomainError(f"g must be finite and > 0, got {g!r}")
    return omega


def graybody_many(omega, g: float) -> dict:
    """Vectorized graybody factor; returns a dict of arrays.

    Keys: ``a_term``, ``b_term``, ``b_imag``, ``gray``, ``planck``,
    ``est_error``, ``extended``.
    """
    omega = np.atleast_1d(_check_omega_g(omega, float(g)))
    g = float(g)
    out = {k: np.empty(omega.shape) for k in ("a_term", "b_term", "b_imag", "gray", "est_error")}
    small = omega < OMEGA_SMALL
    if np.any(~small):
        parts = _graybody_double(omega[~small], g)
        for key, val in zip(("a_term", "b_term", "b_imag", "gray", "est_error"), parts):
            out[key][~small] = val
    for i in np.flatnonzero(small):
        parts = _graybody_extended(float(omega[i]), g)
        for key, val in zip(("a_term", "b_term", "b_imag", "gray", "est_error"), parts):
            out[key][i] = val
    with np.errstate(over="ignore"):
        out["planck"] = 1.0 / np.expm1(2.0 * math.pi * omega)
    out["extended"] = small
    return out


def graybody(omega: float, g: float) -> GraybodyParts:
    """Graybody factor ``Gamma_w = A / pi + B / 4`` at ``kappa = 1``.

    ``A = ln(2g / w) + Re H_{iw} - gamma - 1`` and ``B`` is the sum of the
    two complex-conjugate terms involving ``(w / 2g)^{+-2iw}``,
    ``csch(pi w)`` and ``Gamma(1 +- iw)^2``.  Both terms are computed
    separately so that ``b_imag`` records the residue of the conjugate-pair
    cancellation.  For ``w < OMEGA_SMALL`` everything is evaluated with
    mpmath at 40 and 60 digits.

    Warns
    -----
    CancellationWarning
        If the two extended-precision evaluations disagree.
    """
    d = graybody_many([omega], g)
    return GraybodyParts(
        omega=float(omega),
        g=float(g),
        a_term=float(d["a_term"][0]),
        b_term=float(d["b_term"][0]),
        b_imag=float(d["b_imag"][0]),
        gray=float(d["gray"][0]),
        planck=float(d["planck"][0]),
        extended_precision=bool(d["extended"][0]),
        est_error=float(d["est_error"][0]),
    )


def graybody_plateau(g: float) -> float:
    """High-frequency limit of the graybody factor, ``(ln(2g) - 1) / pi``.

    ``Re H_{iw} - ln w -> gamma`` and ``B -> 0`` as ``w -> inf``.
    """
    return (math.log(2.0 * g) - 1.0) / math.pi


def _validity_flags(g):
    if g < THERMAL_RATIO:
        warnings.warn(
            f"g/kappa = {g:g} is below {THERMAL_RATIO:g}; the closed form assumes g >> kappa",
            ValidityWarning,
            stacklevel=3,
        )
        return ("low_g",)
    return ()


def spectrum_closed_many(omega, g: float) -> SpectrumSeries:
    """Closed-form spectrum on an array of frequencies (``kappa = 1``)."""
    flags = _validity_flags(float(g))
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    d = graybody_many(omega, g)
    n = d["gray"] * d["planck"]
    err = d["est_error"] * d["planck"] + 4.0 * _EPS * np.abs(n)
    negative = bool(np.any(n < 0))
    meta = {"g": float(g), "kappa": 1.0, "flags": flags + (("negative_closed_form",) if negative else ())}
    return SpectrumSeries(omega, n, err, CLOSED, meta)


def spectrum_closed(omega: float, g: float) -> SpectrumSample:
    """Closed-form ``N_w = Gamma_w / (exp(w / T) - 1)`` with ``T = 1 / 2pi``.

    Frequencies and ``g`` are in units of ``kappa``.  Warns with
    :class:`ValidityWarning` when ``g < 100``.  A negative value is not
    clamped; it is returned with the ``negative_closed_form`` flag.
    """
    series = spectrum_closed_many([omega], g)
    n = float(series.n_omega[0])
    flags = tuple(series.meta["flags"])
    if n < 0 and "negative_closed_form" not in flags:
        flags += ("negative_closed_form",)
    return SpectrumSample(float(omega), n, CLOSED, float(series.est_error[0]), flags)


def _max_workers(max_workers):
    if max_workers is not None:
        return max(1, int(max_workers))
    env = os.environ.get("MIRRORSPEC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise DomainError(f"MIRRORSPEC_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def spectrum_sweep(
    omega,
    p: MirrorParams,
    method: str = CLOSED,
    cfg: QuadratureConfig | None = None,
    max_workers: int | None = None,
) -> SpectrumSeries:
    """Spectrum on a frequency grid, in physical units (any ``kappa``).

    The closed form is evaluated at ``omega / kappa`` with ``g / kappa`` and
    divided by ``kappa``, which is exact because ``kappa * beta`` depends
    only on the ratios ``omega / kappa``, ``omega' / kappa``, ``g / kappa``.
    Exact samples are independent and are fanned out over a thread pool
    (``MIRRORSPEC_THREADS`` caps its size); results keep grid order.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    meta = {"kappa": p.kappa, "g": p.g}
    if method == CLOSED:
        s = spectrum_closed_many(omega / p.kappa, p.ratio)
        meta["flags"] = s.meta["flags"]
        return SpectrumSeries(omega, s.n_omega / p.kappa, s.est_error / p.kappa, CLOSED, meta)
    if method != EXACT:
        raise DomainError(f"unknown method {method!r}")
    cfg = cfg or _DEFAULT_CFG
    workers = min(_max_workers(max_workers), omega.size)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(lambda w: spectrum_exact(float(w), p, cfg), omega))
    else:
        samples = [spectrum_exact(float(w), p, cfg) for w in omega]
    return SpectrumSeries.from_samples(samples, **meta)


# ---------------------------------------------------------------------------
# Total count
# ---------------------------------------------------------------------------

def _planck_tail(w, gray_max):
    # int_w^inf gray_max / (e^{2 pi x} - 1) dx = -gray_max ln(1 - e^{-2 pi w}) / 2pi
    return -gray_max * math.log1p(-math.exp(-2.0 * math.pi * w)) / (2.0 * math.pi)


def total_count(
    p: MirrorParams,
    cfg: QuadratureConfig | None = None,
    method: str = CLOSED,
    max_workers: int | None = None,
) -> TotalCount:
    """Total particle number ``N = int_0^inf N_omega d omega``.

    ``N`` is dimensionless and depends only on ``g / kappa``, so the
    integral is done in units ``kappa = 1``.  It is split at the spectrum
    peak: a log-scaled integral from ``1e-8`` to the peak and a linear one
    from the peak to ``omega_max``.  ``omega_max`` is the smallest point
    where the Planck factor times ``ln(2g)/pi + 1`` bounds the remainder
    below ``abs_tol``; that graybody bound is checked on samples beyond
    ``omega_max``.

    Raises
    ------
    TailBoundExceeded
        If the sampled graybody factor exceeds the bound used for the tail.
    """
    cfg = cfg or _DEFAULT_CFG
    g = p.ratio
    unit = MirrorParams(1.0, g)
    if method == CLOSED:
        _validity_flags(g)

        def density(w):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ValidityWarning)
                return spectrum_closed_many(w, g).n_omega
    elif method == EXACT:
        workers = _max_workers(max_workers)

        def density(w):
            return spectrum_sweep(w, unit, EXACT, cfg, max_workers=workers).n_omega
    else:
        raise DomainError(f"unknown method {method!r}")

    gray_max = math.log(2.0 * g) / math.pi + 1.0
    w_max = 1.0
    while _planck_tail(w_max, gray_max) >= cfg.abs_tol:
        w_max += 0.5

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        probe = np.geomspace(1e-3, w_max, 200)
        peak = float(probe[np.argmax(spectrum_closed_many(probe, g).n_omega)])
    beyond = np.linspace(w_max, w_max + 20.0, 81)
    gray_beyond = graybody_many(beyond, g)["gray"]
    if np.any(gray_beyond > gray_max):
        raise TailBoundExceeded(
            f"graybody factor {gray_beyond.max():.4g} exceeds tail bound {gray_max:.4g}"
        )

    w_low = 1e-8
    # N is increasing near 0, so int_0^w_low N <= w_low * N(w_low)
    low_bound = w_low * abs(float(density(np.array([w_low]))[0]))

    def in_log(s):
        w = np.exp(s)
        return density(w) * w

    s0, s1 = math.log(w_low), math.log(peak)
    left, left_err = integrate(
        in_log,
        np.linspace(s0, s1, 9),
        rel_tol=cfg.rel_tol,
        abs_tol=cfg.abs_tol,
        max_refinements=cfg.max_refinements,
        what="total count below peak",
    )
    right, right_err = integrate(
        density,
        np.concatenate([[peak], np.arange(math.ceil(2 * peak) / 2, w_max, 0.5), [w_max]]),
        rel_tol=cfg.rel_tol,
        abs_tol=cfg.abs_tol,
        max_refinements=cfg.max_refinements,
        what="total count above peak",
    )
    tail = _planck_tail(w_max, gray_max)
    n_total = float(left + right)
    err = float(left_err + right_err) + tail + low_bound
    if method == EXACT:
        err += 2.0 * cfg.rel_tol * abs(n_total)
    return TotalCount(n_total, err, tail, w_max * p.kappa, method)


# ---------------------------------------------------------------------------
# Thermal fit
# ---------------------------------------------------------------------------

def thermal_fit(series: SpectrumSeries, window: tuple[float, float] | None = None) -> ThermalFitResult:
    """Fit ``ln N_w = ln(plateau) - w / T`` on the exponential tail.

    By default the window starts at the first point past the peak where
    ``N`` has dropped below ``e^-6`` of its maximum, then moves to
    ``omega >= 6 T`` using the fitted ``T`` (there the Planck factor is
    within 0.3% of a pure exponential).  It extends to the last positive
    point.  ``fit_residual`` is the RMS of the
    residuals in ``ln N``.

    Raises
    ------
    InsufficientTail
        If the window holds fewer than three positive points or spans less
        than one decade in ``N``.
    """
    w = np.asarray(series.omega, dtype=float)
    n = np.asarray(series.n_omega, dtype=float)
    positive = np.isfinite(n) & (n > 0)
    if not positive.any():
        raise InsufficientTail("series has no positive values")
    if window is None:
        i_peak = int(np.argmax(np.where(positive, n, -np.inf)))
        after = np.arange(w.size) > i_peak
        deep = positive & after & (n < n[i_peak] * math.exp(-6.0))
        if not deep.any():
            raise InsufficientTail("no points in the exponential tail")
        lo = w[np.flatnonzero(deep)[0]]
        hi = w[np.flatnonzero(positive)[-1]]
    else:
        lo, hi = window
    sel, slope, intercept = _fit_window(w, n, positive, lo, hi)
    if window is None:
        # move the start to omega >= 6 T, where the Planck factor is exponential
        for _ in range(3):
            start = max(lo, -6.0 / slope)
            if start <= w[sel][0]:
                break
            try:
                sel, slope, intercept = _fit_window(w, n, positive, start, hi)
            except InsufficientTail:
                break
            lo = start
    log_n = np.log(n[sel])
    resid = log_n - (slope * w[sel] + intercept)
    return ThermalFitResult(
        temperature=float(-1.0 / slope),
        plateau=float(math.exp(intercept)),
        fit_residual=float(np.sqrt(np.mean(resid**2))),
        window=(float(lo), float(hi)),
    )


def _fit_window(w, n, positive, lo, hi):
    sel = positive & (w >= lo) & (w <= hi)
    if sel.sum() < 3:
        raise InsufficientTail(f"only {int(sel.sum())} positive points in the tail window")
    log_n = np.log(n[sel])
    if log_n.max() - log_n.min() < math.log(10.0):
        raise InsufficientTail("tail window spans less than one decade")
    slope, intercept = np.polyfit(w[sel], log_n, 1)
    if slope >= 0:
        raise InsufficientTail("tail is not decaying")
    return sel, slope, intercept
