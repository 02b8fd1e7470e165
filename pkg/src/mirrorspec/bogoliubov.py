"""Beta Bogoliubov coefficients of the sinh mirror.

Two independent routes are provided:

* :func:`beta_closed` uses the Bessel-K closed form
  ``beta = -sqrt(w w') / (pi kappa w_p) exp(-pi w / 2 kappa) K_{i w/kappa}(w_p / g)``.
* :func:`beta_numeric` integrates the defining oscillatory x-integral
  directly.  The integrand has a phase growing like ``sinh``, so it is
  damped with ``exp(-eps cosh u)`` and the damped values are extrapolated
  to ``eps -> 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, NonConvergence
from .quadrature import QuadratureConfig, integrate, richardson_to_zero
from .specfun import bessel_k_imag_order, bessel_k_imag_order_many
from .trajectory import OVERFLOW_THRESHOLD, MirrorParams, TrajectoryOverflow

__all__ = [
    "FrequencyPair",
    "beta_closed",
    "beta_numeric",
    "beta_abs2",
    "beta_abs2_many",
]

_DEFAULT_CFG = QuadratureConfig()


@dataclass(frozen=True)
class FrequencyPair:
    """Outgoing frequency ``omega`` and incoming frequency ``omega_prime``."""

    omega: float
    omega_prime: float
    omega_p: float = field(init=False)
    omega_n: float = field(init=False)

    def __post_init__(self):
        for name in ("omega", "omega_prime"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "omega_p", self.omega + self.omega_prime)
        object.__setattr__(self, "omega_n", self.omega - self.omega_prime)


def _prefactor(omega, omega_prime, p: MirrorParams):
    omega_p = omega + omega_prime
    return -np.sqrt(omega * omega_prime) / (math.pi * p.kappa * omega_p) * np.exp(
        -math.pi * omega / (2.0 * p.kappa)
    )


def beta_closed(fp: FrequencyPair, p: MirrorParams, cfg: QuadratureConfig | None = None) -> complex:
    """Closed-form beta coefficient.

    Real.  Its sign follows ``-K_{i nu}``, which oscillates for small
    ``(omega + omega') / g``, so it is not of fixed sign.
    """
    k = bessel_k_imag_order(fp.omega / p.kappa, fp.omega_p / p.g, cfg)
    return complex(_prefactor(fp.omega, fp.omega_prime, p) * k, 0.0)


def beta_abs2(fp: FrequencyPair, p: MirrorParams, cfg: QuadratureConfig | None = None) -> float:
    """``|beta|^2 = w w' / (pi kappa w_p)^2 exp(-pi w / kappa) K_{i w/kappa}(w_p/g)^2``."""
    return float(beta_abs2_many(fp.omega, [fp.omega_prime], p, cfg)[0][0])


def beta_abs2_many(omega: float, omega_prime, p: MirrorParams, cfg: QuadratureConfig | None = None):
    """``|beta|^2`` for one ``omega`` and an array of ``omega_prime``.

    Returns ``(values, error_estimates)`` where the error propagates the
    Bessel quadrature error to first order.
    """
    omega = float(omega)
    wp = np.atleast_1d(np.asarray(omega_prime, dtype=float))
    if not omega > 0 or np.any(wp <= 0):
        raise DomainError("frequencies must be > 0")
    k, k_err = bessel_k_imag_order_many(omega / p.kappa, (omega + wp) / p.g, cfg)
    pre2 = omega * wp / (math.pi * p.kappa * (omega + wp)) ** 2 * math.exp(-math.pi * omega / p.kappa)
    return pre2 * k * k, pre2 * (2.0 * np.abs(k) * k_err + k_err * k_err)


def _damped_integrals(fp: FrequencyPair, p: MirrorParams, cfg: QuadratureConfig, eps):
    """Damped beta integrals in ``u = 2 kappa x``, one per ``eps``."""
    nu = fp.omega / p.kappa
    a = fp.omega_p / p.g
    c1 = -fp.omega_n / p.g
    c2 = -fp.omega / p.kappa
    eps = np.asarray(eps, dtype=float)
    eps_min = float(eps.min())

    # exp(-eps cosh u) * (|c1| cosh u + |c2|) below abs_tol * 1e-2 beyond u_cut
    cut = -math.log(cfg.abs_tol * 1e-2)
    cosh_cut = cut / eps_min
    for _ in range(3):
        cosh_cut = (cut + math.log1p((abs(c1) * cosh_cut + abs(c2)))) / eps_min
    u_cut = math.acosh(cosh_cut)
    if u_cut > min(cfg.u_max, OVERFLOW_THRESHOLD):
        raise NonConvergence(
            f"damped integrand not negligible before u_max={cfg.u_max:g} (needs {u_cut:.3g})"
        )

    def phase(u):
        return nu * u + a * np.sinh(u)

    # panel edges at multiples of pi in the (monotone) phase
    n_dense = int(min(4e6, max(2000, 8 * (phase(u_cut) - phase(-u_cut)) / math.pi)))
    grid = np.linspace(-u_cut, u_cut, n_dense)
    ph = phase(grid)
    targets = np.arange(math.ceil(ph[0] / math.pi), math.floor(ph[-1] / math.pi) + 1) * math.pi
    edges = np.concatenate([[-u_cut], np.interp(targets, ph, grid), [u_cut]])

    # reversed limits flip the sign; dx = du / (2 kappa) cancels the 2 kappa in v'
    scale = 1.0 / (4.0 * math.pi * math.sqrt(fp.omega * fp.omega_prime))

    def integrand(u):
        ch = np.cosh(u)
        base = scale * np.exp(1j * phase(u)) * (c1 * ch + c2)
        return base[:, None] * np.exp(-np.outer(ch, eps))

    val, err = integrate(
        integrand,
        edges,
        rel_tol=cfg.rel_tol,
        abs_tol=cfg.abs_tol,
        max_refinements=cfg.max_refinements,
        what="damped beta integral",
        noise=lambda u: 1.0 + np.abs(phase(u)) / 50.0,
    )
    return val, err


def beta_numeric(fp: FrequencyPair, p: MirrorParams, cfg: QuadratureConfig | None = None) -> complex:
    """Beta coefficient by direct quadrature of the defining x-integral.

    The integral runs from ``x = +inf`` to ``x = -inf`` as written in the
    definition.  With ``u = 2 kappa x`` the integrand is damped by
    ``exp(-eps cosh u)`` for each ``eps`` in ``cfg.damping_eps_sequence``
    (scaled by ``(omega + omega') / g``), and the damped integrals are
    extrapolated polynomially to ``eps = 0``.

    Raises
    ------
    NonConvergence
        If any damped integral fails, or if dropping the smallest damping
        value changes the extrapolated result by more than
        ``max(rel_tol * |beta|, abs_tol)``.
    TrajectoryOverflow
        If the required ``u`` range exceeds the trajectory overflow threshold.
    """
    cfg = cfg or _DEFAULT_CFG
    a = fp.omega_p / p.g
    eps = a * np.asarray(cfg.damping_eps_sequence)
    try:
        vals, errs = _damped_integrals(fp, p, cfg, eps)
    except OverflowError as exc:
        raise TrajectoryOverflow(str(exc)) from exc
    full, prev = richardson_to_zero(eps, list(vals))
    full, prev = complex(full), complex(prev)
    if abs(full - prev) > max(cfg.rel_tol * abs(full), cfg.abs_tol):
        raise NonConvergence(
            f"eps extrapolation unstable: last two estimates differ by {abs(full - prev):.3g}"
        )
    return full
