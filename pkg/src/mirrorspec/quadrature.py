"""Adaptive Gauss-Kronrod quadrature for vector-valued integrands.

All integrals in the package go through :func:`integrate`.  The integrand is
evaluated on every node of every active panel in a single call, so callers
can vectorize over a batch of parameters (Bessel arguments, damping values)
by returning a 2-D array of shape ``(n_nodes, n_components)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .exceptions import DomainError, NonConvergence

__all__ = ["QuadratureConfig", "integrate", "richardson_to_zero"]

# 15-point Kronrod nodes on [0, 1] (symmetric), with the embedded 7-point Gauss rule.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KRONROD = np.concatenate([_WK[:-1], _WK[::-1]])
_GAUSS = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes in _XK order (0.949.., 0.741.., 0.405.., 0).
_GAUSS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


# Panels whose Kronrod-Gauss difference is below this multiple of
# machine epsilon times the integral of |f| cannot be improved by bisection.
_ROUNDOFF = 50.0 * np.finfo(float).eps
MAX_PANELS = 200_000
_CHUNK = 2048


def _default_damping() -> tuple[float, ...]:
    return tuple(0.2 * 0.5**k for k in range(8))


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and cutoffs shared by every numerical integral.

    Parameters
    ----------
    rel_tol, abs_tol : float
        A result is accepted once its error estimate is below
        ``max(abs_tol, rel_tol * |value|)``.
    max_refinements : int
        Maximum number of panel-bisection sweeps before giving up.
    damping_eps_sequence : tuple of float
        Damping strengths for the regularized Bogoliubov integral, in units
        of the natural phase scale ``(omega + omega') / g``.  Must be strictly
        decreasing and positive; they are extrapolated to zero.
    u_max : float
        Hard cap on ``|u|`` (with ``u = 2 kappa x``) for the damped integral.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_refinements: int = 50
    damping_eps_sequence: tuple[float, ...] = field(default_factory=_default_damping)
    u_max: float = 50.0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if not (math.isfinite(self.rel_tol) and math.isfinite(self.abs_tol)):
            raise DomainError("quadrature tolerances must be finite")
        if int(self.max_refinements) != self.max_refinements or self.max_refinements < 1:
            raise DomainError("max_refinements must be a positive integer")
        eps = tuple(float(e) for e in self.damping_eps_sequence)
        if len(eps) < 2:
            raise DomainError("damping_eps_sequence needs at least two values")
        if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            raise DomainError("damping_eps_sequence must be positive and strictly decreasing")
        object.__setattr__(self, "damping_eps_sequence", eps)
        if not self.u_max > 0:
            raise DomainError("u_max must be positive")

    def with_(self, **changes) -> "QuadratureConfig":
        return replace(self, **changes)


def _panel_rules(f, a, b, noise=None):
    if a.size > _CHUNK:
        parts = [_panel_rules(f, a[i:i + _CHUNK], b[i:i + _CHUNK], noise) for i in range(0, a.size, _CHUNK)]
        return tuple(np.concatenate(p) for p in zip(*parts))
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    t = mid[:, None] + half[:, None] * _NODES[None, :]
    vals = np.asarray(f(t.ravel()))
    vals = vals.reshape(t.shape + vals.shape[1:])
    # vals: (panels, 15, ...) -> contract over the node axis
    h = _expand(half, vals.ndim - 2)
    kron = np.tensordot(_KRONROD, vals, axes=([0], [1])) * h
    gauss = np.tensordot(_GAUSS, vals, axes=([0], [1])) * h
    mag = np.abs(vals)
    if noise is not None:
        mag = mag * _expand(np.asarray(noise(t)), vals.ndim - 2)
    resabs = np.tensordot(_KRONROD, mag, axes=([0], [1])) * np.abs(h)
    return kron, np.abs(kron - gauss), _ROUNDOFF * resabs


def _expand(x, extra):
    return x.reshape(x.shape + (1,) * extra)


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    breakpoints: Sequence[float],
    *,
    rel_tol: float,
    abs_tol: float,
    max_refinements: int = 50,
    what: str = "integral",
    noise: Callable[[np.ndarray], np.ndarray] | None = None,
):
    """Integrate ``f`` over ``[breakpoints[0], breakpoints[-1]]``.

    Each interval between consecutive breakpoints starts as one panel.
    Panels whose error exceeds their width-weighted share of the tolerance
    are bisected until the summed error estimate meets
    ``max(abs_tol, rel_tol * |value|)`` in every component.

    ``noise``, if given, maps nodes to a relative round-off amplification
    factor (>= 1) of the integrand, e.g. the size of a phase whose sine is
    taken.  Panels already at that round-off level are not bisected.

    Returns
    -------
    value, error : ndarray or float
        Integral and error estimate, with the trailing shape of ``f``'s output.

    Raises
    ------
    NonConvergence
        If the tolerance is not met after ``max_refinements`` sweeps.
    """
    edges = np.unique(np.asarray(breakpoints, dtype=float))
    if edges.size < 2:
        raise DomainError("need at least two distinct breakpoints")
    length = edges[-1] - edges[0]
    a, b = edges[:-1], edges[1:]

    val, err, floor = _panel_rules(f, a, b, noise)
    for _ in range(int(max_refinements) + 1):
        total = val.sum(axis=0)
        total_err = err.sum(axis=0)
        tol = np.maximum(abs_tol, rel_tol * np.abs(total))
        if not np.all(np.isfinite(total)):
            raise NonConvergence(f"{what}: non-finite integrand values")
        if np.all(total_err <= tol):
            return _squeeze(total), _squeeze(total_err)
        share = _expand((b - a) / length, err.ndim - 1) * tol
        bad = (err > share) & (err > floor)
        if err.ndim > 1:
            bad = bad.reshape(bad.shape[0], -1).any(axis=1)
        if not bad.any():
            raise NonConvergence(
                f"{what}: round-off limited, error estimate {np.max(total_err):.3g} "
                f"above tolerance {np.min(tol):.3g}"
            )
        if a.size + bad.sum() > MAX_PANELS:
            break
        mid = 0.5 * (a[bad] + b[bad])
        new_a = np.concatenate([a[bad], mid])
        new_b = np.concatenate([mid, b[bad]])
        new_val, new_err, new_floor = _panel_rules(f, new_a, new_b, noise)
        keep = ~bad
        a = np.concatenate([a[keep], new_a])
        b = np.concatenate([b[keep], new_b])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])
        floor = np.concatenate([floor[keep], new_floor])
        # stable ordering keeps summation order, and so results, deterministic
        order = np.argsort(a, kind="stable")
        a, b, val, err, floor = a[order], b[order], val[order], err[order], floor[order]
    raise NonConvergence(
        f"{what}: error estimate {np.max(total_err):.3g} above tolerance "
        f"{np.min(tol):.3g} after {max_refinements} refinements"
    )


def _squeeze(x):
    x = np.asarray(x)
    return x[()] if x.ndim == 0 else x


def richardson_to_zero(h, values):
    """Polynomial extrapolation of ``values(h)`` to ``h = 0`` (Neville).

    Returns the extrapolated value using all points and the value using all
    but the last (smallest ``h``) point; their difference measures stability.
    """
    h = np.asarray(h, dtype=float)
    p = [np.asarray(v) for v in values]
    if len(p) < 2:
        raise DomainError("extrapolation needs at least two points")
    return _neville(h, p), _neville(h[:-1], p[:-1])


def _neville(h, p):
    table = list(p)
    n = len(table)
    for m in range(1, n):
        for i in range(n - m):
            table[i] = (h[i + m] * table[i] - h[i] * table[i + 1]) / (h[i + m] - h[i])
    return table[0]
