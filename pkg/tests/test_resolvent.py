import math

import numpy as np
import pytest

from cetlab import (MassQuadrature, PowerLawExp, ValidationError,
                    apply_memory, apply_memory2, build_quadrature,
                    commutator_residual, duhamel_ratio, kg_retarded,
                    mass_weighted_bound_check, positivity_functional)
from cetlab.errors import CommutatorInputError, ModeStepUnstableError
from cetlab.resolvent import ModeParams, TimeSeries, kg_retarded_with_velocity

ONE_ATOM = MassQuadrature(np.array([1.0]), np.array([1.0]), "diraccomb")


def series(dt, n, fn):
    t = dt * np.arange(n)
    return TimeSeries(0.0, dt, fn(t))


def smooth_bump(t, c, w):
    y = (t - c) / w
    out = np.zeros_like(t)
    m = np.abs(y) < 1
    out[m] = np.exp(-1.0 / (1.0 - y[m] ** 2))
    return out


class TestModeResponse:
    def test_zero_source_zero_output(self):
        f = series(0.01, 500, np.zeros_like)
        v = kg_retarded(ModeParams(1.0, 0.5), f)
        assert np.all(v.samples == 0.0)

    def test_step_source_oracle_fourth_order(self):
        errs = []
        for dt in (0.02, 0.01, 0.005):
            n = int(round(20.0 / dt)) + 1
            f = series(dt, n, np.ones_like)
            v = kg_retarded(ModeParams(1.0, 0.0), f)
            errs.append(np.max(np.abs(v.samples - (1 - np.cos(v.times)))))
        assert math.log2(errs[0] / errs[1]) > 3.7
        assert math.log2(errs[1] / errs[2]) > 3.7

    def test_causal_support_bitwise(self):
        dt = 0.01
        n = 2001
        t = dt * np.arange(n)
        f = TimeSeries(0.0, dt, np.where(t > 5.0, np.exp(-(t - 8) ** 2), 0.0))
        v = kg_retarded(ModeParams(1.0, 0.5), f)
        assert np.all(v.samples[t <= 5.0] == 0.0)
        assert v.sup() > 0

    def test_stability_guard(self):
        f = series(0.5, 100, np.ones_like)
        with pytest.raises(ModeStepUnstableError):
            kg_retarded(ModeParams(100.0, 0.0), f)

    def test_zero_mode_rejected_without_flag(self):
        with pytest.raises(ValidationError):
            ModeParams(0.0, 0.0)
        ModeParams(0.0, 0.0, allow_zero_mode=True)


class TestMemoryOperator:
    def test_single_atom_reduces_to_mode_oracle(self):
        dt = 0.01
        f = series(dt, 2001, np.ones_like)
        km = apply_memory(ONE_ATOM, 0.0, f)
        assert np.max(np.abs(km.samples - (1 - np.cos(km.times)))) < 1e-8

    def test_near_zero_weights_give_near_zero_output(self):
        quad = build_quadrature(PowerLawExp(1.0, 1.0, 1.0), 16)
        tiny = quad.scaled(1e-30)
        f = series(0.01, 1000, lambda t: np.sin(t))
        out = apply_memory(tiny, 0.0, f)
        assert out.sup() < 1e-25

    def test_linearity_to_roundoff(self):
        quad = build_quadrature(PowerLawExp(1.0, 1.0, 1.0), 32)
        dt = 0.01
        t = dt * np.arange(1500)
        f = TimeSeries(0.0, dt, np.exp(-(t - 4) ** 2))
        g = TimeSeries(0.0, dt, np.sin(t) * np.exp(-0.2 * t))
        combo = TimeSeries(0.0, dt, 2.0 * f.samples - 0.5 * g.samples)
        lhs = apply_memory(quad, 0.3, combo).samples
        rhs = 2.0 * apply_memory(quad, 0.3, f).samples \
            - 0.5 * apply_memory(quad, 0.3, g).samples
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs))

    def test_uniform_bound_l1(self):
        quad = build_quadrature(PowerLawExp(1.0, 1.0, 1.0), 32)
        dt = 0.01
        t = dt * np.arange(2001)
        f = TimeSeries(0.0, dt, np.exp(-(t - 6) ** 2))
        out = apply_memory(quad, 0.0, f)
        l1 = float(np.sum(quad.weights))
        assert out.sup() <= l1 * f.l1() * (1 + 1e-10)

    def test_instability_names_offending_node(self):
        quad = build_quadrature(PowerLawExp(1.0, 1.0, 1.0), 32)
        f = series(0.5, 100, np.ones_like)
        with pytest.raises(ModeStepUnstableError, match="mu="):
            apply_memory(quad, 0.0, f)


class TestDoubleResolvent:
    def test_zero_source(self):
        f = series(0.01, 500, np.zeros_like)
        out = apply_memory2(ONE_ATOM, 0.0, f)
        assert np.all(out.samples == 0.0)

    def test_cascade_matches_fine_reference(self):
        dt = 0.01
        n = 2001
        t = dt * np.arange(n)
        f = TimeSeries(0.0, dt, smooth_bump(t, 1.5, 0.5))
        coarse = apply_memory2(ONE_ATOM, 0.0, f)
        dtf = dt / 10
        tf = dtf * np.arange((n - 1) * 10 + 1)
        ff = TimeSeries(0.0, dtf, smooth_bump(tf, 1.5, 0.5))
        fine = apply_memory2(ONE_ATOM, 0.0, ff)
        assert np.max(np.abs(coarse.samples - fine.samples[::10])) < 1e-7

    def test_growth_bound(self):
        quad = build_quadrature(PowerLawExp(1.0, 1.0, 1.0), 32)
        dt = 0.01
        t = dt * np.arange(2001)
        f = TimeSeries(0.0, dt, smooth_bump(t, 1.5, 0.5))
        out = apply_memory2(quad, 0.0, f)
        c_p1 = 2.0
        assert out.sup() <= c_p1 * f.l1() * t[-1]


class TestCommutator:
    def test_zero_signal(self):
        f = series(1e-3, 2000, np.zeros_like)
        chk = commutator_residual(1.0, f)
        assert chk.residual == 0.0

    def test_residual_small_and_sign_stable(self):
        signs = set()
        for mu in (0.5, 1.0, 2.0):
            for center in (3.0, 4.0, 5.0):
                n = int(round(12.0 / 1e-3)) + 1
                t = 1e-3 * np.arange(n)
                f = TimeSeries(0.0, 1e-3, smooth_bump(t, center, 1.0))
                chk = commutator_residual(mu, f)
                assert chk.residual <= 1e-5 * chk.scale
                signs.add(chk.sign)
        assert len(signs) == 1

    def test_second_order_convergence(self):
        res = []
        for dt in (4e-3, 2e-3, 1e-3):
            n = int(round(12.0 / dt)) + 1
            t = dt * np.arange(n)
            f = TimeSeries(0.0, dt, smooth_bump(t, 4.0, 1.0))
            res.append(commutator_residual(1.0, f).residual)
        assert math.log2(res[0] / res[1]) >= 2.0
        assert math.log2(res[1] / res[2]) >= 2.0

    def test_rough_input_rejected(self):
        rng = np.random.default_rng(7)
        f = TimeSeries(0.0, 1e-3, rng.choice([-1.0, 1.0], size=2000))
        with pytest.raises(CommutatorInputError):
            commutator_residual(1.0, f)


class TestPositivity:
    def test_zero(self):
        f = series(0.01, 500, np.zeros_like)
        assert positivity_functional(ONE_ATOM, f) == 0.0

    def test_energy_identity_oracle(self):
        dt = 0.005
        t = dt * np.arange(3001)
        f = TimeSeries(0.0, dt, np.exp(-(t - 4) ** 2))
        q = positivity_functional(ONE_ATOM, f)
        v, vd = kg_retarded_with_velocity(ModeParams(1.0, 0.0), f)
        e_term = 0.5 * vd.samples[-1] ** 2 + 0.5 * v.samples[-1] ** 2
        assert q == pytest.approx(e_term, rel=1e-12)
        power = float(np.trapezoid(f.samples * vd.samples, dx=dt))
        assert q == pytest.approx(power, rel=1e-8)

    def test_hundred_seeded_sign_sources(self):
        quad = build_quadrature(PowerLawExp(1.0, 1.0, 1.0), 32)
        for s in range(100):
            rng = np.random.default_rng(1000 + s)
            f = TimeSeries(0.0, 0.01, rng.choice([-1.0, 1.0], size=800))
            assert positivity_functional(quad, f) >= -1e-12 * f.l1() ** 2


class TestBounds:
    def test_mass_weighted_ratio_below_sqrt2(self):
        dt = 0.01
        t = dt * np.arange(2001)
        f = TimeSeries(0.0, dt, np.exp(-(t - 3) ** 2))
        for mu in (1.0, 4.0, 100.0):
            rep = mass_weighted_bound_check(mu, f)
            assert rep.holds

    def test_ratio_shrinks_with_mass(self):
        dt = 0.01
        t = dt * np.arange(2001)
        f = TimeSeries(0.0, dt, np.exp(-(t - 3) ** 2))
        r1 = mass_weighted_bound_check(1.0, f).ratio
        r100 = mass_weighted_bound_check(100.0, f).ratio
        assert r100 < 0.2 * r1

    def test_duhamel_uniform_over_masses(self):
        dt = 0.01
        t = dt * np.arange(2001)
        f = TimeSeries(0.0, dt, np.exp(-(t - 3) ** 2))
        for mu in (0.0, 0.25, 1.0, 10.0, 100.0):
            assert duhamel_ratio(ModeParams(mu, 0.3), f) <= 1.02
