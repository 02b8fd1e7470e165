"""Brute-force reference computations used by the self-check and the tests.

These deliberately share no code with the production kernels: a plain
trapezoidal rule with step halving for ``K_{i nu}``, the defining series for
``Re psi(1 + iy)`` and the reflection identity for ``|Gamma(1 + iy)|^2``.
"""

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061


def bessel_k_trapezoid(nu, x, digits=12, h0=0.5, max_halvings=12):
    """``int_0^inf exp(-x cosh t) cos(nu t) dt`` by the trapezoidal rule.

    The step is halved until two successive sums agree to ``digits``
    significant digits.  The integrand decays double-exponentially, so the
    rule converges geometrically in ``1/h``.
    """
    t_max = math.acosh(max(60.0 / x, 1.0)) + 1.0
    prev = None
    h = h0
    for _ in range(max_halvings):
        t = np.arange(0.0, t_max + h, h)
        f = np.exp(-x * np.cosh(t)) * np.cos(nu * t)
        total = h * (f.sum() - 0.5 * f[0])
        if prev is not None and abs(total - prev) <= 10.0 ** (-digits) * max(abs(total), 1e-300):
            return float(total)
        prev = total
        h *= 0.5
    raise ArithmeticError(f"trapezoid oracle for K_(i{nu})({x}) did not stabilize")


def re_digamma_series(y, terms=1_000_000):
    """``Re psi(1 + iy) = -gamma + y^2 sum_k 1 / (k (k^2 + y^2))`` with a tail estimate.

    The tail ``sum_{k > K}`` is replaced by its Euler-Maclaurin
    approximation ``y^2 / (2 K^2)``, accurate to ``O(y^4 / K^4 + y^2 / K^3)``.
    """
    k = np.arange(1, terms + 1, dtype=float)
    s = np.sum(1.0 / (k * (k * k + y * y)))
    tail = 1.0 / (2.0 * terms**2) - 1.0 / (2.0 * terms**3)
    return -EULER_GAMMA + y * y * (s + tail)


def gamma_abs2_on_line(y):
    """``|Gamma(1 + iy)|^2 = pi y / sinh(pi y)``."""
    if y == 0:
        return 1.0
    return math.pi * y / math.sinh(math.pi * y)
