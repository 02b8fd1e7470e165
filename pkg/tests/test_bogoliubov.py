import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorspec import (
    DomainError,
    FrequencyPair,
    MirrorParams,
    NonConvergence,
    QuadratureConfig,
    beta_abs2,
    beta_abs2_many,
    beta_closed,
    beta_numeric,
)
from mirrorspec.oracles import bessel_k_trapezoid

GRID3 = [0.5, 1.0, 2.0]


def _mp_beta(w, wp, kappa, g):
    k = mpmath.besselk(1j * w / kappa, (w + wp) / g).real
    pre = -mpmath.sqrt(w * wp) / (mpmath.pi * kappa * (w + wp)) * mpmath.exp(-mpmath.pi * w / (2 * kappa))
    return float(pre * k)


class TestFrequencyPair:
    def test_derived(self):
        fp = FrequencyPair(1.0, 3.0)
        assert fp.omega_p == 4.0 and fp.omega_n == -2.0

    @pytest.mark.parametrize("w,wp", [(0.0, 1.0), (1.0, -1.0), (math.inf, 1.0)])
    def test_invalid(self, w, wp):
        with pytest.raises(DomainError):
            FrequencyPair(w, wp)


class TestClosed:
    def test_unit_point_composition(self):
        p = MirrorParams(1.0, 1.0)
        b = beta_closed(FrequencyPair(1.0, 1.0), p)
        ref = math.exp(-math.pi / 2) * bessel_k_trapezoid(1.0, 2.0) / (2 * math.pi)
        assert b.imag == 0.0
        assert abs(b) == pytest.approx(abs(ref), rel=1e-8)

    @pytest.mark.parametrize("w,wp,kappa,g", [(0.3, 2.0, 1.0, 10.0), (2.0, 0.1, 0.5, 1e3), (1.0, 50.0, 1.0, 10.0)])
    def test_against_mpmath(self, w, wp, kappa, g):
        b = beta_closed(FrequencyPair(w, wp), MirrorParams(kappa, g))
        assert b.real == pytest.approx(_mp_beta(w, wp, kappa, g), rel=1e-7, abs=1e-13)

    def test_sign_follows_bessel(self):
        # K_{i nu}(x) oscillates for x << nu, so beta is not of fixed sign
        p = MirrorParams(1.0, 1e3)
        signs = {np.sign(beta_closed(FrequencyPair(1.0, wp), p).real) for wp in (0.5, 5.0, 50.0, 500.0)}
        assert signs == {-1.0, 1.0}

    def test_ir_sqrt_vanishing(self):
        p = MirrorParams(1.0, 10.0)
        ratios = [abs(beta_closed(FrequencyPair(w, 1.0), p)) / math.sqrt(w) for w in (1e-4, 1e-6, 1e-8)]
        assert ratios[1] == pytest.approx(ratios[2], rel=1e-3)
        assert ratios[0] == pytest.approx(ratios[2], rel=1e-2)

    def test_ir_vanishing_decades(self):
        p = MirrorParams(1.0, 10.0)
        vals = [beta_abs2(FrequencyPair(10.0**-k, 2.0), p) for k in range(1, 9)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-7

    @settings(max_examples=25, deadline=None)
    @given(
        st.floats(0.05, 3.0), st.floats(0.05, 30.0), st.floats(0.3, 3.0),
        st.floats(1.0, 1e3), st.floats(0.1, 10.0),
    )
    def test_rescaling(self, w, wp, kappa, g, lam):
        # beta carries dimension 1/frequency: lam * beta(lam * all) == beta
        b1 = beta_closed(FrequencyPair(w, wp), MirrorParams(kappa, g))
        b2 = beta_closed(FrequencyPair(lam * w, lam * wp), MirrorParams(lam * kappa, lam * g))
        assert abs(lam * b2 - b1) <= 1e-7 * abs(b1) + 1e-12


class TestAbs2:
    @settings(max_examples=40, deadline=None)
    @given(st.floats(1e-3, 5.0), st.floats(1e-3, 100.0), st.floats(0.1, 1e4))
    def test_nonnegative_and_consistent(self, w, wp, g):
        fp, p = FrequencyPair(w, wp), MirrorParams(1.0, g)
        a2 = beta_abs2(fp, p)
        assert a2 >= 0
        assert a2 == pytest.approx(abs(beta_closed(fp, p)) ** 2, rel=1e-12, abs=1e-300)

    def test_unit_point(self):
        a2 = beta_abs2(FrequencyPair(1.0, 1.0), MirrorParams(1.0, 1.0))
        ref = math.exp(-math.pi) * bessel_k_trapezoid(1.0, 2.0) ** 2 / (4 * math.pi**2)
        assert a2 == pytest.approx(ref, rel=1e-8)

    def test_many_matches_single(self):
        p = MirrorParams(1.0, 10.0)
        wps = np.array([0.1, 1.0, 10.0])
        vals, errs = beta_abs2_many(0.7, wps, p)
        for wp, v in zip(wps, vals):
            assert v == pytest.approx(beta_abs2(FrequencyPair(0.7, wp), p), rel=1e-7)
        assert np.all(errs >= 0)

    def test_many_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            beta_abs2_many(1.0, [1.0, 0.0], MirrorParams(1.0, 1.0))


class TestNumeric:
    def test_grid_agreement_and_phase(self):
        p = MirrorParams(1.0, 10.0)
        phases = []
        for w in GRID3:
            for wp in GRID3:
                fp = FrequencyPair(w, wp)
                c, n = beta_closed(fp, p), beta_numeric(fp, p)
                assert abs(abs(n) - abs(c)) / abs(c) < 1e-4
                phases.append(cmath.phase(n / c))
        assert np.std(phases) < 1e-3
        # with the printed orientation the two agree as complex numbers
        assert max(abs(ph) for ph in phases) < 1e-6

    @pytest.mark.slow
    @pytest.mark.parametrize("g", [10.0, 1e3])
    def test_oracle_equivalence_5x5(self, g):
        cfg = QuadratureConfig(abs_tol=1e-10)
        p = MirrorParams(1.0, g)
        for w in np.geomspace(0.1, 10, 5):
            for wp in np.geomspace(0.1, 10, 5):
                fp = FrequencyPair(w, wp)
                c, n = beta_closed(fp, p, cfg), beta_numeric(fp, p, cfg)
                assert abs(abs(n) - abs(c)) <= max(cfg.rel_tol * abs(c), cfg.abs_tol)

    def test_round_off_limit_is_reported(self):
        # |beta| ~ 1e-16 against an O(1) integrand: 1e-12 absolute is out of reach
        with pytest.raises(NonConvergence, match="round-off"):
            beta_numeric(FrequencyPair(10.0, 0.1), MirrorParams(1.0, 10.0))

    def test_large_omega_prime_tail_monotone(self):
        p = MirrorParams(1.0, 10.0)
        vals = [abs(beta_numeric(FrequencyPair(1.0, wp), p)) for wp in (50.0, 100.0, 200.0)]
        assert vals[0] > vals[1] > vals[2]

    def test_extrapolation_stability(self):
        cfg = QuadratureConfig()
        p, fp = MirrorParams(1.0, 10.0), FrequencyPair(1.0, 2.0)
        from mirrorspec.bogoliubov import _damped_integrals
        from mirrorspec.quadrature import richardson_to_zero

        eps = fp.omega_p / p.g * np.asarray(cfg.damping_eps_sequence)
        vals, _ = _damped_integrals(fp, p, cfg, eps)
        full, prev = richardson_to_zero(eps, list(vals))
        assert abs(full - prev) < cfg.rel_tol * abs(full)

    def test_unstable_extrapolation_raises(self):
        # two large damping values cannot be extrapolated to rel 1e-8
        cfg = QuadratureConfig(damping_eps_sequence=(2.0, 1.0))
        with pytest.raises(NonConvergence, match="extrapolation"):
            beta_numeric(FrequencyPair(1.0, 1.0), MirrorParams(1.0, 10.0), cfg)

    def test_u_max_cap(self):
        cfg = QuadratureConfig(u_max=2.0)
        with pytest.raises(NonConvergence, match="u_max"):
            beta_numeric(FrequencyPair(1.0, 1.0), MirrorParams(1.0, 10.0), cfg)

    def test_deterministic(self):
        fp, p = FrequencyPair(0.5, 2.0), MirrorParams(1.0, 10.0)
        assert beta_numeric(fp, p) == beta_numeric(fp, p)
