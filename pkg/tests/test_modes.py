import numpy as np
import pytest

from conftest import opo_moment_oracle

from cwherald.modes import (
    OutputModeSpec,
    TriggerModeSpec,
    build_output_mode,
    build_trigger_mode,
    second_moments,
)
from cwherald.quadrature import correlation_moment_once, l2_norm_sq
from cwherald.sources import OpoParams, opo_kernel


class TestBuildTriggerMode:
    def test_collapsed_filter_closed_form(self):
        spec = TriggerModeSpec(
            tap_amplitude=0.1, filter_width=5.0, window_center=0.0, window_width=0.02
        )
        mode = build_trigger_mode(spec)
        expected = 0.1 * np.sqrt(0.02) * 5.0 * np.exp(-1.0)
        assert mode.amplitude(-0.2) == pytest.approx(expected, rel=1e-12)
        assert mode.amplitude(0.1) == 0.0

    def test_zero_tap_is_vacuum(self):
        spec = TriggerModeSpec(tap_amplitude=0.0, filter_width=5.0)
        mode = build_trigger_mode(spec)
        assert mode.source_weight == pytest.approx(0.0, abs=1e-300)
        ts = np.linspace(-3, 1, 50)
        assert np.all(mode.amplitude(ts) == 0.0)

    def test_full_tap_window_has_unit_norm(self):
        spec = TriggerModeSpec(tap_amplitude=1.0, filter_width=None, window_width=0.02)
        mode = build_trigger_mode(spec)
        assert mode.source_weight == pytest.approx(1.0, rel=1e-12)
        assert l2_norm_sq(mode.as_axis()) == pytest.approx(1.0, rel=1e-12)

    def test_efficiency_folds_into_tap(self):
        full = build_trigger_mode(TriggerModeSpec(tap_amplitude=0.2, filter_width=None))
        halved = build_trigger_mode(
            TriggerModeSpec(tap_amplitude=0.2, filter_width=None, detector_efficiency=0.25)
        )
        assert halved.source_weight == pytest.approx(0.25 * full.source_weight, rel=1e-12)

    def test_wide_window_integrates_filter_explicitly(self):
        # dt * gamma = 0.5 > 0.1: window no longer collapsible
        spec = TriggerModeSpec(
            tap_amplitude=0.1, filter_width=5.0, window_center=0.0, window_width=0.1
        )
        mode = build_trigger_mode(spec)
        # inside the window the response saturates toward tau/sqrt(dt)
        inside = mode.amplitude(-0.049)
        pref = 0.1 / np.sqrt(0.1)
        assert inside == pytest.approx(pref * (1 - np.exp(-5.0 * 0.099)), rel=1e-12)
        # unit-norm bound holds
        assert mode.source_weight <= 0.1**2 + 1e-12

    def test_mode_norm_guard(self):
        from cwherald.modes import ModeFunction

        with pytest.raises(ValueError, match="unit norm"):
            ModeFunction(
                amplitude=lambda t: np.ones_like(t),
                support=(0.0, 2.0),
                source_weight=1.1,
            )

    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            TriggerModeSpec(tap_amplitude=0.1, filter_width=None, window_width=0.0)
        with pytest.raises(ValueError):
            TriggerModeSpec(tap_amplitude=0.1, filter_width=-1.0)
        with pytest.raises(ValueError):
            TriggerModeSpec(tap_amplitude=1.5, filter_width=None)
        with pytest.raises(ValueError):
            TriggerModeSpec(tap_amplitude=0.1, filter_width=None, detector_efficiency=1.2)


class TestBuildOutputMode:
    def test_unit_norm_and_peak(self):
        mode = build_output_mode(OutputModeSpec(envelope="exponential", alpha=0.5))
        assert l2_norm_sq(mode.as_axis()) == pytest.approx(1.0, rel=1e-10)
        assert mode.amplitude(0.0) == pytest.approx(np.sqrt(0.5), rel=1e-12)

    def test_reflect_amplitude_scales_weight(self):
        mode = build_output_mode(
            OutputModeSpec(envelope="exponential", alpha=0.5, reflect_amplitude=0.8)
        )
        assert mode.source_weight == pytest.approx(0.64, rel=1e-10)

    def test_tabulated_gaussian_normalises(self):
        ts = np.linspace(-6, 6, 241)
        us = np.exp(-(ts**2))
        mode = build_output_mode(
            OutputModeSpec(envelope="tabulated", alpha=None, table=(ts, us))
        )
        assert l2_norm_sq(mode.as_axis()) == pytest.approx(1.0, rel=1e-9)

    def test_bad_envelopes(self):
        with pytest.raises(ValueError):
            OutputModeSpec(envelope="exponential", alpha=0.0)
        with pytest.raises(ValueError):
            OutputModeSpec(envelope="gaussian")
        bad = OutputModeSpec(
            envelope="tabulated",
            alpha=None,
            table=(np.array([0.0, 1.0]), np.array([1.0, np.inf])),
        )
        with pytest.raises(ValueError, match="non-finite"):
            build_output_mode(bad)


class TestSecondMoments:
    def setup_method(self):
        self.kernel = opo_kernel(OpoParams(epsilon=0.01))
        self.trigger = build_trigger_mode(
            TriggerModeSpec(
                tap_amplitude=0.1, filter_width=5.0, window_center=0.0, window_width=0.02
            ),
            source_fast_rate=self.kernel.fast_rate,
            truncation_rate=min(0.49, 0.5),
        )
        self.output = build_output_mode(
            OutputModeSpec(envelope="exponential", alpha=0.5, reflect_amplitude=1.0),
            truncation_rate=min(0.49, 0.5),
        )

    def test_zero_kernel_gives_zero_moments(self):
        k0 = opo_kernel(OpoParams(epsilon=0.0))
        m = second_moments(self.trigger, self.output, k0)
        assert np.all(m.a == 0.0)
        assert np.all(m.b == 0.0)

    def test_moments_match_analytic_oracle(self):
        m = second_moments(self.trigger, self.output, self.kernel)
        c1 = 0.1 * np.sqrt(0.02) * 5.0
        a11, b11 = opo_moment_oracle("11", 0.01, 5.0, 0.5, c1, 1.0)
        a12, b12 = opo_moment_oracle("12", 0.01, 5.0, 0.5, c1, 1.0)
        a22, b22 = opo_moment_oracle("22", 0.01, 5.0, 0.5, c1, 1.0)
        assert m.a[0, 0] == pytest.approx(a11, rel=1e-8)
        assert m.b[0, 0] == pytest.approx(b11, rel=1e-8)
        assert m.a[0, 1] == pytest.approx(a12, rel=1e-8)
        assert m.b[0, 1] == pytest.approx(b12, rel=1e-8)
        assert m.a[1, 1] == pytest.approx(a22, rel=1e-8)
        assert m.b[1, 1] == pytest.approx(b22, rel=1e-8)

    def test_moment_symmetry(self):
        m = second_moments(self.trigger, self.output, self.kernel)
        assert abs(m.a[0, 1] - m.a[1, 0]) < 1e-10
        assert abs(m.b[0, 1] - m.b[1, 0]) < 1e-10

    def test_scaling_of_trigger(self):
        m = second_moments(self.trigger, self.output, self.kernel)
        half = second_moments(self.trigger.scaled(0.5), self.output, self.kernel)
        assert half.a[0, 0] == pytest.approx(0.25 * m.a[0, 0], rel=1e-9)
        assert half.a[0, 1] == pytest.approx(0.5 * m.a[0, 1], rel=1e-9)
        assert half.b[0, 0] == pytest.approx(0.25 * m.b[0, 0], rel=1e-9)

    def test_cauchy_schwarz(self):
        m = second_moments(self.trigger, self.output, self.kernel)
        assert m.b[0, 1] ** 2 <= m.b[0, 0] * m.b[1, 1] + 1e-12

    def test_panel_halving_converged(self):
        ax1 = self.trigger.as_axis()
        ax2 = self.output.as_axis()
        k = self.kernel
        for kern in (k.c_aa, k.c_ada):
            coarse = correlation_moment_once(ax1, ax2, kern, k.fast_rate, scale=2.0)
            fine = correlation_moment_once(ax1, ax2, kern, k.fast_rate, scale=4.0)
            assert abs(fine - coarse) <= max(1e-8 * abs(fine), 1e-12)

    def test_non_converging_integrand_raises_with_estimate(self):
        from cwherald.errors import QuadratureError
        from cwherald.quadrature import QuadAxis, correlation_moment

        axis = QuadAxis(
            amplitude=lambda t: np.ones_like(t), breakpoints=np.array([-1.0, 1.0]), rate=1.0
        )
        # discontinuity away from the diagonal defeats panel refinement
        step_kernel = lambda s: np.where(np.abs(s) < 0.37, 1.0, 0.0)
        with pytest.raises(QuadratureError) as err:
            correlation_moment(axis, axis, step_kernel, 1.0, rtol=1e-10, atol=1e-14)
        assert np.isfinite(err.value.estimate)
        assert err.value.bound > 0.0


