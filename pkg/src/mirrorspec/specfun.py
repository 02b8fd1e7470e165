"""Special-function kernels: K_{i nu}(x), complex gamma, digamma on 1 + iy.

Only the pieces needed for the mirror spectrum are provided.  Everything is
implemented directly on top of numpy so the kernels can be checked against
independent oracles (brute-force quadrature, mpmath) in the test-suite.
"""

from __future__ import annotations

import math

import numpy as np

from .exceptions import DomainError, PoleError
from .quadrature import QuadratureConfig, integrate

__all__ = [
    "EULER_GAMMA",
    "bessel_k_imag_order",
    "bessel_k_imag_order_many",
    "complex_gamma",
    "complex_loggamma",
    "complex_digamma",
    "re_digamma_on_line",
    "harmonic_imag",
    "csch",
]

EULER_GAMMA = 0.57721566490153286061

_DEFAULT_CFG = QuadratureConfig()

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_{2k} / (2k) for the digamma asymptotic series, k = 1..8.
_DIGAMMA_ASYMPTOTIC = np.array([
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 4.0,
    1.0 / 42.0 / 6.0,
    -1.0 / 30.0 / 8.0,
    5.0 / 66.0 / 10.0,
    -691.0 / 2730.0 / 12.0,
    7.0 / 6.0 / 14.0,
    -3617.0 / 510.0 / 16.0,
])
_DIGAMMA_SHIFT = 12


def _check_finite(name, value):
    if not np.all(np.isfinite(value)):
        raise DomainError(f"{name} must be finite, got {value!r}")


# ---------------------------------------------------------------------------
# Modified Bessel function of imaginary order
# ---------------------------------------------------------------------------

def _bessel_breakpoints(nu, t_max):
    # Panels end at zeros of cos(nu t); none wider than one unit of t.
    pts = [0.0, t_max]
    if nu > 0:
        k_max = int(nu * t_max / math.pi - 0.5)
        if k_max >= 0:
            pts.extend(((np.arange(k_max + 1) + 0.5) * math.pi / nu).tolist())
    pts.extend(np.arange(1.0, t_max, 1.0).tolist())
    pts = np.unique(np.asarray(pts))
    return pts[(pts >= 0.0) & (pts <= t_max)]


def bessel_k_imag_order_many(nu, x, cfg: QuadratureConfig | None = None):
    """Vectorized :func:`bessel_k_imag_order` over an array of arguments.

    All arguments share one set of panels, so the cost is roughly that of
    the smallest argument.  Returns ``(values, error_estimates)``.
    """
    cfg = cfg or _DEFAULT_CFG
    nu = abs(float(nu))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check_finite("nu", nu)
    _check_finite("x", x)
    if np.any(x <= 0):
        raise DomainError("K_{i nu}(x) requires x > 0")

    # e^{-x cosh t} < abs_tol * 1e-2 beyond t_max
    cut = -math.log(cfg.abs_tol * 1e-2)
    t_max = max(math.acosh(max(cut / float(x.min()), 1.0)), 1.0)

    def integrand(t):
        return np.exp(-np.outer(np.cosh(t), x)) * np.cos(nu * t)[:, None]

    val, err = integrate(
        integrand,
        _bessel_breakpoints(nu, t_max),
        rel_tol=cfg.rel_tol,
        abs_tol=cfg.abs_tol,
        max_refinements=cfg.max_refinements,
        what=f"K_(i*{nu:g})",
    )
    return np.atleast_1d(val), np.atleast_1d(err)


def bessel_k_imag_order(nu: float, x: float, cfg: QuadratureConfig | None = None) -> float:
    """Modified Bessel function of the second kind of imaginary order.

    Evaluates ``K_{i nu}(x) = int_0^inf exp(-x cosh t) cos(nu t) dt`` by
    adaptive Gauss-Kronrod quadrature, splitting the range at the zeros of
    ``cos(nu t)`` and truncating where the exponential drops below
    ``abs_tol * 1e-2``.  The result is real and even in ``nu``.

    Raises
    ------
    DomainError
        If ``x <= 0`` or an input is not finite.
    NonConvergence
        If the quadrature tolerance is not reached.
    """
    if not x > 0:
        raise DomainError(f"K_{{i nu}}(x) requires x > 0, got x={x!r}")
    val, _ = bessel_k_imag_order_many(nu, [x], cfg)
    return float(val[0])


# ---------------------------------------------------------------------------
# Gamma, digamma, harmonic numbers
# ---------------------------------------------------------------------------

def _is_pole(z):
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


def _lanczos_loggamma(z):
    # valid for Re z >= 0.5
    z = z - 1.0
    series = np.full_like(z, _LANCZOS_COEF[0])
    for k in range(1, len(_LANCZOS_COEF)):
        series = series + _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(series)


def complex_loggamma(z):
    """Logarithm of the gamma function for complex ``z`` (Lanczos, g=7).

    The imaginary part is not reduced to the principal branch; only
    ``exp(complex_loggamma(z))`` and the real part are meaningful.
    """
    z = np.asarray(z, dtype=complex)
    _check_finite("z", z)
    if np.any(_is_pole(z)):
        raise PoleError("gamma function pole at a non-positive integer")
    left = z.real < 0.5
    out = np.empty_like(z)
    out[~left] = _lanczos_loggamma(z[~left])
    if np.any(left):
        zl = z[left]
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        out[left] = math.log(math.pi) - np.log(np.sin(math.pi * zl)) - _lanczos_loggamma(1.0 - zl)
    return out[()] if out.ndim == 0 else out


def complex_gamma(z):
    """Gamma function of a complex argument.

    Accurate to about 1e-14 relative in the strip ``0.5 <= Re z <= 2`` for
    ``|Im z| <= 50``; uses the reflection formula for ``Re z < 0.5``.

    >>> complex_gamma(1.0)
    (1+0j)
    """
    val = np.exp(complex_loggamma(z))
    if np.ndim(val) == 0:
        return complex(val)
    return val


def complex_digamma(z):
    """Digamma function for ``Re z > 0`` via upward recurrence and asymptotics."""
    z = np.asarray(z, dtype=complex)
    _check_finite("z", z)
    if np.any(z.real <= 0):
        raise DomainError("complex_digamma is implemented for Re z > 0 only")
    shift = np.zeros_like(z)
    for k in range(_DIGAMMA_SHIFT):
        shift = shift + 1.0 / (z + k)
    w = z + _DIGAMMA_SHIFT
    inv2 = 1.0 / (w * w)
    tail = np.zeros_like(w)
    for c in _DIGAMMA_ASYMPTOTIC[::-1]:
        tail = (tail + c) * inv2
    out = np.log(w) - 0.5 / w - tail - shift
    return out[()] if out.ndim == 0 else out


def re_digamma_on_line(y):
    """Real part of the digamma function on the line ``1 + iy``.

    Even in ``y``; ``re_digamma_on_line(0) == -EULER_GAMMA`` to rounding.
    """
    y = np.asarray(y, dtype=float)
    _check_finite("y", y)
    out = complex_digamma(1.0 + 1j * np.abs(y)).real
    return float(out) if np.ndim(out) == 0 else out


def harmonic_imag(omega):
    """Harmonic number of imaginary argument, ``H_{i omega} = gamma + psi(1 + i omega)``.

    Computed as ``psi(1 + i omega) - psi(1)`` so that ``H_0`` is exactly zero.
    """
    omega = np.asarray(omega, dtype=float)
    _check_finite("omega", omega)
    out = complex_digamma(1.0 + 1j * omega) - complex_digamma(1.0 + 0j)
    return complex(out) if np.ndim(out) == 0 else out


def csch(x):
    """Hyperbolic cosecant, without overflow for large ``|x|``."""
    x = np.asarray(x, dtype=float)
    _check_finite("x", x)
    if np.any(x == 0):
        raise DomainError("csch has a pole at 0")
    ax = np.abs(x)
    e = np.exp(-ax)
    out = np.sign(x) * 2.0 * e / -np.expm1(-2.0 * ax)
    return float(out) if out.ndim == 0 else out

