import math

import numpy as np
import pytest

from cetlab import (Grid, ModelConfig, PowerLawExp, ValidationError,
                    build_quadrature, decay_fit, evolve, memory_limit,
                    scattering_residual, scattering_residual_fit)
from cetlab.errors import (InsufficientSamplesError, MemoryBelowNoiseError,
                           SnapshotUnavailableError)


@pytest.fixture(scope="module")
def memory_run():
    quad = build_quadrature(PowerLawExp(1.0, 1.0, 1.0), 32)
    cfg = ModelConfig(epsilon=1e-2, quad=quad, cfl=0.5, t_final=100.0,
                      r_c=5.0, sigma=1.0)
    grid = Grid(111.0, 768)
    return evolve(cfg, grid, cadence=10,
                  snapshot_times=(25.0, 50.0, 100.0))


@pytest.fixture(scope="module")
def linear_run():
    # single outgoing pulse (no origin reflection inside the fit window)
    cfg = ModelConfig(epsilon=1e-2, a_null=0.0, b_bad=0.0, c_grad=0.0,
                      d_quad=0.0, quad=None, cfl=0.5, t_final=40.0,
                      r_c=5.0, sigma=1.0, velocity_mode="ingoing")
    grid = Grid(51.0, 512)
    return evolve(cfg, grid, cadence=10, snapshot_times=(10.0, 20.0, 40.0))


class TestDecayFit:
    def test_exact_power_law_recovered(self):
        t = np.linspace(1.0, 100.0, 60)
        series = list(zip(t, 3.7 / (1.0 + t)))
        fit = decay_fit(series, (1.0, 100.0))
        assert fit.exponent == pytest.approx(-1.0, abs=1e-6)
        assert fit.amplitude == pytest.approx(3.7, rel=1e-6)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_rescaling_moves_amplitude_not_exponent(self):
        t = np.linspace(1.0, 50.0, 40)
        base = decay_fit(list(zip(t, 2.0 / (1 + t) ** 1.3)), (1.0, 50.0))
        scaled = decay_fit(list(zip(t, 17.0 / (1 + t) ** 1.3)), (1.0, 50.0))
        assert scaled.exponent == pytest.approx(base.exponent, abs=1e-9)
        assert scaled.amplitude == pytest.approx(17.0, rel=1e-6)

    def test_insufficient_samples(self):
        t = np.linspace(1.0, 10.0, 5)
        with pytest.raises(InsufficientSamplesError):
            decay_fit(list(zip(t, 1.0 / (1 + t))), (1.0, 10.0))

    def test_free_wave_sup_decay(self, linear_run):
        t = linear_run.series("t")
        su = linear_run.series("sup_u")
        fit = decay_fit(list(zip(t, su)), (15.0, 40.0))
        assert -1.2 <= fit.exponent <= -0.8


class TestMemoryLimit:
    def test_no_memory_raises_below_noise(self, linear_run):
        with pytest.raises(MemoryBelowNoiseError):
            memory_limit(linear_run)

    def test_reports_positive_norm_and_decay(self, memory_run):
        rep = memory_limit(memory_run)
        assert rep.m_inf_norm > 0.0
        assert rep.residual_fit.exponent < 0.0  # net decay toward the mean
        assert rep.beat_period == pytest.approx(22.8, abs=0.2)

    def test_mean_window_stability(self, memory_run):
        # final-10% versus final-5% estimates differ by less than the
        # fitted residual envelope at the window edge
        t = memory_run.profile_times
        m10 = memory_run.m_profiles[t >= 0.9 * t[-1]].mean(axis=0)
        m05 = memory_run.m_profiles[t >= 0.95 * t[-1]].mean(axis=0)
        r = memory_run.grid.r
        diff = math.sqrt(float(np.trapezoid((m10 - m05) ** 2 * r * r,
                                            dx=memory_run.grid.dr)))
        rep = memory_limit(memory_run)
        envelope = rep.residual_fit.amplitude \
            * (1.0 + 0.9 * t[-1]) ** rep.residual_fit.exponent
        assert diff <= 10.0 * max(envelope, rep.m_inf_norm)


class TestScatteringResidual:
    def test_linear_run_discrete_residual_is_roundoff(self, linear_run):
        d = scattering_residual(linear_run, 10.0, 20.0)
        assert d < 1e-14

    def test_linear_run_dalembert_residual_is_second_order(self, linear_run):
        d = scattering_residual(linear_run, 10.0, 20.0, method="dalembert")
        # pure interpolation/dispersion error of the closed-form route
        assert d < 10.0 * linear_run.grid.dr ** 2

    def test_residuals_decrease(self, memory_run):
        d1 = scattering_residual(memory_run, 25.0, 50.0)
        d2 = scattering_residual(memory_run, 50.0, 100.0)
        assert d1 > d2 > 0.0

    def test_fit_reports_decay(self, memory_run):
        fit = scattering_residual_fit(memory_run, (25.0, 50.0))
        assert fit.exponent < 0.0

    def test_missing_snapshot(self, memory_run):
        with pytest.raises(SnapshotUnavailableError):
            scattering_residual(memory_run, 30.0, 60.0)

    def test_time_ordering_validated(self, memory_run):
        with pytest.raises(ValidationError):
            scattering_residual(memory_run, 50.0, 25.0)

    def test_padding_invariance(self):
        quad = build_quadrature(PowerLawExp(1.0, 1.0, 1.0), 16)
        base = dict(epsilon=1e-2, quad=quad, cfl=0.5, t_final=40.0,
                    r_c=5.0, sigma=1.0)
        runs = []
        for n_r, rmax in ((384, 51.0), (424, 51.0 * 424 / 384)):
            cfg = ModelConfig(**base)
            out = evolve(cfg, Grid(rmax, n_r), cadence=10,
                         snapshot_times=(15.0, 30.0))
            runs.append(scattering_residual(out, 15.0, 30.0))
        assert abs(runs[0] - runs[1]) <= 10.0 * (51.0 / 384) ** 2
