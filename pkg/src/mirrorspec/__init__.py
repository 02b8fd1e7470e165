"""Particle creation by the asymptotically static sinh moving mirror.

The mirror follows ``g v = -sinh(2 kappa x)``.  The package evaluates its
beta Bogoliubov coefficients, particle spectrum and total particle count,
both by direct quadrature and through the Bessel-K closed forms.
"""

__version__ = "0.1.0"

from .bogoliubov import FrequencyPair, beta_abs2, beta_abs2_many, beta_closed, beta_numeric
from .exceptions import (
    CancellationWarning,
    DomainError,
    InsufficientTail,
    MirrorSpecError,
    NonConvergence,
    PoleError,
    TailBoundExceeded,
    TrajectoryOverflow,
    UsageError,
    ValidityWarning,
)
from .quadrature import QuadratureConfig
from .spectrum import (
    CLOSED,
    EXACT,
    GraybodyParts,
    SpectrumSample,
    SpectrumSeries,
    ThermalFitResult,
    TotalCount,
    graybody,
    graybody_many,
    graybody_plateau,
    spectrum_closed,
    spectrum_closed_many,
    spectrum_exact,
    spectrum_sweep,
    thermal_fit,
    total_count,
)
from .specfun import (
    EULER_GAMMA,
    bessel_k_imag_order,
    complex_digamma,
    complex_gamma,
    complex_loggamma,
    harmonic_imag,
    re_digamma_on_line,
)
from .trajectory import (
    MirrorParams,
    WorldlinePoint,
    schwarzschild_advanced_time,
    sinh_advanced_time,
    sinh_coordinate_time,
    sinh_velocity,
    worldline_sample,
)
