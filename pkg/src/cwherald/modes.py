"""Temporal mode functions and their second moments against a source kernel.

A discrete mode is defined by a real amplitude f(t) of unit (or smaller)
L2 norm; the missing norm is vacuum fill and contributes nothing to the
source-part moments.  The trigger mode composes a beam-splitter tap, an
optional single-pole frequency filter and a detection window; the output
mode is a normalised envelope scaled by the tap's reflection amplitude.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import QuadratureError
from .quadrature import QuadAxis, correlation_moment, l2_norm_sq
from .sources import CorrelationKernel

NORM_TOL = 1e-6
# window much narrower than every relevant correlation time: treat as a point
NARROW_WINDOW_LIMIT = 0.1
TRUNCATION_DECADES = 30.0


@dataclass(frozen=True)
class ModeFunction:
    """A temporal mode: amplitude, finite support, interior kinks, source weight.

    ``source_weight`` is the squared source fraction Int f^2 dt; values
    below one mean the mode carries vacuum fill.  ``decay_scale`` sizes
    quadrature panels.
    """

    amplitude: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float]
    source_weight: float
    kinks: tuple[float, ...] = ()
    decay_scale: float = 0.0

    def __post_init__(self):
        lo, hi = self.support
        if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
            raise ValueError(f"mode support must be a finite interval, got {self.support}")
        if self.source_weight > 1.0 + NORM_TOL:
            raise ValueError(
                f"mode source weight {self.source_weight:g} exceeds unit norm"
            )

    def as_axis(self) -> QuadAxis:
        lo, hi = self.support
        pts = np.array(sorted({lo, hi, *self.kinks}))
        pts = pts[(pts >= lo) & (pts <= hi)]
        return QuadAxis(amplitude=self.amplitude, breakpoints=pts, rate=self.decay_scale)

    def scaled(self, factor: float) -> "ModeFunction":
        amp = self.amplitude
        return ModeFunction(
            amplitude=lambda t: factor * amp(t),
            support=self.support,
            source_weight=factor**2 * self.source_weight,
            kinks=self.kinks,
            decay_scale=self.decay_scale,
        )


@dataclass(frozen=True)
class TriggerModeSpec:
    """Tap amplitude, optional filter width, detection window, detector efficiency."""

    tap_amplitude: float
    filter_width: float | None
    window_center: float = 0.0
    window_width: float = 0.02
    detector_efficiency: float = 1.0

    def __post_init__(self):
        if abs(self.tap_amplitude) > 1.0:
            raise ValueError(f"|tap_amplitude| must be <= 1, got {self.tap_amplitude}")
        if not (0.0 <= self.detector_efficiency <= 1.0):
            raise ValueError(
                f"detector_efficiency must lie in [0, 1], got {self.detector_efficiency}"
            )
        if self.window_width <= 0.0:
            raise ValueError(f"window_width must be positive, got {self.window_width}")
        if self.filter_width is not None and self.filter_width <= 0.0:
            raise ValueError(f"filter_width must be positive, got {self.filter_width}")


@dataclass(frozen=True)
class OutputModeSpec:
    """Output envelope choice: symmetric exponential or tabulated samples."""

    envelope: str = "exponential"
    alpha: float | None = 0.5
    center: float = 0.0
    reflect_amplitude: float = 1.0
    table: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        if self.envelope not in ("exponential", "tabulated"):
            raise ValueError(f"unknown envelope kind {self.envelope!r}")
        if self.envelope == "exponential":
            if self.alpha is None or self.alpha <= 0.0:
                raise ValueError(f"exponential envelope needs alpha > 0, got {self.alpha}")
        else:
            if self.table is None:
                raise ValueError("tabulated envelope needs a (t, u) sample table")
        if not (0.0 <= self.reflect_amplitude <= 1.0):
            raise ValueError(
                f"reflect_amplitude must lie in [0, 1], got {self.reflect_amplitude}"
            )


@dataclass(frozen=True)
class SecondMoments:
    """Source-part mode moments: a[i,j] = <a_i a_j>, b[i,j] = <a_i+ a_j>."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        for name, m in (("a", self.a), ("b", self.b)):
            m = np.asarray(m, dtype=float)
            if m.shape != (2, 2):
                raise ValueError(f"moment matrix {name} must be 2x2")
            if abs(m[0, 1] - m[1, 0]) > 1e-10 * max(1.0, abs(m[0, 1])):
                raise ValueError(f"moment matrix {name} must be symmetric")

    def scaled_trigger(self, factor: float) -> "SecondMoments":
        """Moments after scaling the trigger mode function by a factor."""
        s = np.array([[factor**2, factor], [factor, 1.0]])
        return SecondMoments(a=self.a * s, b=self.b * s)


def build_trigger_mode(
    spec: TriggerModeSpec,
    source_fast_rate: float | None = None,
    truncation_rate: float | None = None,
) -> ModeFunction:
    """Construct the trigger mode function from its physical stages.

    Detector efficiency folds into the effective tap amplitude.  Without a
    filter the mode is the rectangular detection window.  With a filter the
    window is collapsed onto its centre when it is much narrower than both
    the filter response and the source correlations
    (``dt * max(filter, fastest source rate) <= 0.1``); otherwise the
    window is integrated through the filter response explicitly.
    """
    tau_eff = spec.tap_amplitude * np.sqrt(spec.detector_efficiency)
    dt = spec.window_width
    tc = spec.window_center

    if spec.filter_width is None:
        lo, hi = tc - dt / 2.0, tc + dt / 2.0
        height = tau_eff / np.sqrt(dt)

        def amp_rect(t):
            t = np.asarray(t, dtype=float)
            return np.where((t >= lo) & (t <= hi), height, 0.0)

        return ModeFunction(
            amplitude=amp_rect,
            support=(lo, hi),
            source_weight=tau_eff**2,
            decay_scale=0.0,
        )

    gamma = spec.filter_width
    t_rate = min(gamma, truncation_rate) if truncation_rate else gamma
    tail = TRUNCATION_DECADES / t_rate
    narrow = dt * max(gamma, source_fast_rate or 0.0) <= NARROW_WINDOW_LIMIT

    if narrow:
        scale = tau_eff * np.sqrt(dt) * gamma

        def amp_collapsed(t):
            t = np.asarray(t, dtype=float)
            return np.where(t <= tc, scale * np.exp(-gamma * np.clip(tc - t, 0.0, None)), 0.0)

        mode = ModeFunction(
            amplitude=amp_collapsed,
            support=(tc - tail, tc),
            source_weight=0.0,
            decay_scale=gamma,
        )
    else:
        lo_w, hi_w = tc - dt / 2.0, tc + dt / 2.0
        pref = tau_eff / np.sqrt(dt)

        def amp_explicit(t):
            t = np.asarray(t, dtype=float)
            upper = 1.0 - np.exp(-gamma * np.clip(hi_w - t, 0.0, None))
            lower = np.exp(-gamma * np.clip(lo_w - t, 0.0, None)) - np.exp(
                -gamma * np.clip(hi_w - t, 0.0, None)
            )
            return pref * np.where(t > hi_w, 0.0, np.where(t >= lo_w, upper, lower))

        mode = ModeFunction(
            amplitude=amp_explicit,
            support=(lo_w - tail, hi_w),
            source_weight=0.0,
            kinks=(lo_w,),
            decay_scale=gamma,
        )
    weight = l2_norm_sq(mode.as_axis())
    return ModeFunction(
        amplitude=mode.amplitude,
        support=mode.support,
        source_weight=weight,
        kinks=mode.kinks,
        decay_scale=mode.decay_scale,
    )


def build_output_mode(
    spec: OutputModeSpec, truncation_rate: float | None = None
) -> ModeFunction:
    """Construct the output mode: unit-norm envelope times the reflection amplitude."""
    if spec.envelope == "exponential":
        alpha = float(spec.alpha)
        refl = spec.reflect_amplitude
        tc = spec.center
        t_rate = min(alpha, truncation_rate) if truncation_rate else alpha
        tail = TRUNCATION_DECADES / t_rate
        scale = refl * np.sqrt(alpha)

        def amp(t):
            t = np.asarray(t, dtype=float)
            return scale * np.exp(-alpha * np.abs(t - tc))

        return ModeFunction(
            amplitude=amp,
            support=(tc - tail, tc + tail),
            source_weight=refl**2 * (1.0 - np.exp(-2.0 * alpha * tail)),
            kinks=(tc,),
            decay_scale=alpha,
        )

    ts, us = spec.table
    ts = np.asarray(ts, dtype=float)
    us = np.asarray(us, dtype=float)
    if ts.ndim != 1 or ts.shape != us.shape or len(ts) < 2:
        raise ValueError("tabulated envelope needs matching 1-d t and u samples")
    if not (np.all(np.isfinite(ts)) and np.all(np.isfinite(us))):
        raise ValueError("tabulated envelope contains non-finite values")
    if np.any(np.diff(ts) <= 0.0):
        raise ValueError("tabulated envelope times must be strictly increasing")
    # exact L2 norm of the linear interpolant
    h = np.diff(ts)
    sq = np.sum(h * (us[:-1] ** 2 + us[:-1] * us[1:] + us[1:] ** 2) / 3.0)
    if sq <= 0.0:
        raise ValueError("tabulated envelope has zero norm")
    un = us / np.sqrt(sq)
    refl = spec.reflect_amplitude

    def amp_tab(t):
        t = np.asarray(t, dtype=float)
        return refl * np.interp(t, ts, un, left=0.0, right=0.0)

    return ModeFunction(
        amplitude=amp_tab,
        support=(float(ts[0]), float(ts[-1])),
        source_weight=refl**2,
        kinks=tuple(float(t) for t in ts[1:-1]),
        decay_scale=0.0,
    )


def load_envelope_table(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column (t, u) text table for a tabulated envelope."""
    data = np.loadtxt(path, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError(f"envelope table {path} must have two columns")
    return data[:, 0], data[:, 1]


def second_moments(
    f1: ModeFunction,
    f2: ModeFunction,
    k: CorrelationKernel,
    rtol: float = 1e-8,
    atol: float = 1e-12,
) -> SecondMoments:
    """Mode moments by double quadrature of the kernel against the mode pair.

    ``a[i, j] = Int f_i(t) f_j(t') c_aa(t - t') dt dt'`` and likewise for
    ``b`` with ``c_ada``.  Converged to the stated tolerances or raises
    :class:`~cwherald.errors.QuadratureError`.
    """
    if k.decay_rate <= 0.0:
        raise ValueError("kernel decay rate must be positive")
    axes = (f1.as_axis(), f2.as_axis())
    a = np.zeros((2, 2))
    b = np.zeros((2, 2))
    for i in range(2):
        for j in range(i, 2):
            a[i, j] = a[j, i] = correlation_moment(
                axes[i], axes[j], k.c_aa, k.fast_rate, rtol=rtol, atol=atol
            )
            b[i, j] = b[j, i] = correlation_moment(
                axes[i], axes[j], k.c_ada, k.fast_rate, rtol=rtol, atol=atol
            )
    return SecondMoments(a=a, b=b)
