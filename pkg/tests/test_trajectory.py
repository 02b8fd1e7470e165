import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorspec import (
    DomainError,
    MirrorParams,
    TrajectoryOverflow,
    schwarzschild_advanced_time,
    sinh_advanced_time,
    sinh_coordinate_time,
    sinh_velocity,
    worldline_sample,
)
from mirrorspec.trajectory import OVERFLOW_THRESHOLD

scales = st.floats(1e-3, 1e6)
positions = st.floats(-300.0, 300.0)


class TestParams:
    @pytest.mark.parametrize("kappa,g", [(0.0, 1.0), (1.0, -1.0), (math.nan, 1.0), (1.0, math.inf)])
    def test_invalid(self, kappa, g):
        with pytest.raises(DomainError):
            MirrorParams(kappa, g)

    def test_ratio_overflow(self):
        with pytest.raises(DomainError):
            MirrorParams(1e-300, 1e300)

    def test_regime_flag(self):
        assert MirrorParams(1.0, 1e6).thermal_regime
        assert not MirrorParams(1.0, 10.0).thermal_regime

    def test_temperature(self):
        assert MirrorParams(1.0, 1e6).temperature == pytest.approx(1 / (2 * math.pi))


class TestAdvancedTime:
    def test_origin(self):
        assert sinh_advanced_time(0.0, MirrorParams(1.0, 1.0)) == 0.0

    def test_unit_point(self):
        v = sinh_advanced_time(1.0, MirrorParams(1.0, 1.0))
        assert v == pytest.approx(-3.6268604, abs=1e-7)
        assert v == pytest.approx(-(math.e**2 - math.e**-2) / 2, rel=1e-15)

    def test_coordinate_time(self):
        p = MirrorParams(1.0, 1.0)
        assert sinh_coordinate_time(0.0, p) == 0.0
        assert sinh_coordinate_time(1.0, p) == pytest.approx(-4.6268604, abs=1e-7)

    def test_overflow_reported(self):
        p = MirrorParams(1.0, 1.0)
        with pytest.raises(TrajectoryOverflow):
            sinh_advanced_time(OVERFLOW_THRESHOLD / 2 + 1, p)
        with pytest.raises(OverflowError):
            sinh_coordinate_time(-400.0, p)

    def test_nonfinite(self):
        with pytest.raises(DomainError):
            sinh_advanced_time(math.nan, MirrorParams(1.0, 1.0))

    @settings(max_examples=200, deadline=None)
    @given(positions, scales, scales)
    def test_antisymmetric_and_decreasing(self, x, kappa, g):
        p = MirrorParams(kappa, g)
        x = x / kappa
        assert sinh_advanced_time(-x, p) == -sinh_advanced_time(x, p)
        if x != 0:
            assert sinh_coordinate_time(x, p) < sinh_coordinate_time(0.0, p) or x < 0


class TestVelocity:
    def test_ultrarelativistic_peak(self):
        assert sinh_velocity(0.0, MirrorParams(1.0, 1e6)) == pytest.approx(-1 / (1 + 2e-6), rel=1e-15)

    def test_half_light_speed(self):
        assert sinh_velocity(0.0, MirrorParams(1.0, 2.0)) == -0.5

    def test_asymptotically_static(self):
        p = MirrorParams(1.0, 1e3)
        x = math.acosh(p.g * 1e6 / 2) / 2 * 1.01
        assert abs(sinh_velocity(x, p)) < 1e-6
        assert abs(sinh_velocity(-x, p)) < 1e-6
        assert sinh_velocity(1e6, p) == 0.0

    @settings(max_examples=500, deadline=None)
    @given(positions, scales, scales)
    def test_timelike(self, x, kappa, g):
        p = MirrorParams(kappa, g)
        vel = sinh_velocity(x / kappa, p)
        assert -1.0 < vel <= 0.0
        assert abs(vel) <= abs(sinh_velocity(0.0, p))

    @settings(max_examples=100, deadline=None)
    @given(st.floats(-20.0, 20.0), st.floats(0.1, 10.0), st.floats(0.1, 1e4))
    def test_matches_finite_difference(self, x, kappa, g):
        # dx/dt = 1 / (dt/dx) with dt/dx = -(2 kappa/g) cosh(2 kappa x) - 1
        p = MirrorParams(kappa, g)
        x = x / kappa
        h = 1e-6 / kappa
        dtdx = (sinh_coordinate_time(x + h, p) - sinh_coordinate_time(x - h, p)) / (2 * h)
        assert sinh_velocity(x, p) == pytest.approx(1 / dtdx, rel=1e-5)


class TestSchwarzschild:
    def test_origin(self):
        assert schwarzschild_advanced_time(0.0, 1.0) == -1.0

    def test_unit_point(self):
        assert schwarzschild_advanced_time(1.0, 1.0) == pytest.approx(-7.389056, abs=1e-6)

    @pytest.mark.parametrize("u", [15.01, 20.0, 60.0, 600.0])
    @pytest.mark.parametrize("kappa,g", [(1.0, 1e6), (0.5, 3.0), (2.0, 1e3)])
    def test_late_time_ratio(self, u, kappa, g):
        p = MirrorParams(kappa, g)
        x = u / (2 * kappa)
        ratio = sinh_advanced_time(x, p) / schwarzschild_advanced_time(x, kappa)
        assert abs(ratio / (kappa / (2 * g)) - 1) < 1e-6

    def test_invalid_kappa(self):
        with pytest.raises(DomainError):
            schwarzschild_advanced_time(0.0, 0.0)


class TestWorldline:
    def test_single_point(self):
        p = MirrorParams(1.0, 10.0)
        (pt,) = worldline_sample([0.0], p)
        assert (pt.x, pt.t, pt.v) == (0.0, 0.0, 0.0)
        assert pt.velocity == -1 / (1 + 2 / 10.0)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-50.0, 50.0), min_size=1, max_size=30), scales)
    def test_v_equals_t_plus_x_exactly(self, xs, g):
        for pt in worldline_sample(sorted(xs), MirrorParams(1.0, g)):
            assert pt.v == pt.t + pt.x
            assert abs(pt.velocity) < 1

    def test_symmetric_grid_antisymmetric_v(self):
        xs = np.linspace(-3, 3, 13)
        pts = worldline_sample(xs, MirrorParams(1.0, 5.0))
        v = np.array([pt.v for pt in pts])
        assert np.array_equal(v, -v[::-1])

    def test_unsorted_rejected(self):
        with pytest.raises(DomainError):
            worldline_sample([1.0, 0.0], MirrorParams(1.0, 1.0))

    def test_overflow_propagates(self):
        with pytest.raises(TrajectoryOverflow):
            worldline_sample([0.0, 1e3], MirrorParams(1.0, 1.0))
