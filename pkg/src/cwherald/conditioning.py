"""Trigger-mode measurement back-actions and the conditioned output state.

Three detector models act on the two-mode Gaussian state: projection onto
a photon number (0, 1 or 2), the binary on/off detector (removal of the
vacuum component), and the absorptive click detector whose back-action is
the annihilation operator, rho -> a rho a+ / Tr(a+ a rho).  Each returns
the normalised conditioned state of the output mode together with the
outcome probability (the click case reports the trigger-mode occupation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covariance import CovarianceMatrix4, physicality_check
from .errors import ImpossibleOutcomeError, UnphysicalCovarianceError
from .quadrature import _gl_rule
from .wigner import (
    GaussPolyState,
    TwoModeGaussianWigner,
    _integrate_out,
    fock_wigner_poly,
    integrate_out_trigger,
)

PROBABILITY_FLOOR = 1e-300

# weight polynomial of the click back-action after integration by parts:
# (x1^2 + p1^2 - 1) / 2
_CLICK_WEIGHT = np.array(
    [
        [-0.5, 0.0, 0.5],
        [0.0, 0.0, 0.0],
        [0.5, 0.0, 0.0],
    ]
)


@dataclass(frozen=True)
class ConditionResult:
    """Normalised conditioned output state plus the trigger outcome probability.

    For number and on/off detection ``probability`` is the outcome
    probability of the discrete trigger mode; for click detection it is
    the trigger-mode occupation <a1+ a1> (per-window click rate).
    """

    state: GaussPolyState
    probability: float


def _require_physical(v: CovarianceMatrix4) -> None:
    report = physicality_check(v)
    if not report.physical:
        raise UnphysicalCovarianceError(
            "cannot condition on an unphysical covariance: min eigenvalue of "
            f"V + i*Omega = {report.min_eigenvalue:g}"
        )


def _number_projection_raw(v: CovarianceMatrix4, n: int):
    """Unnormalised number-conditioned state and its mass (the probability)."""
    fock = fock_wigner_poly(n)
    m = np.linalg.inv(v.m)
    m_tilde = m + np.diag([1.0, 1.0, 0.0, 0.0])
    det_v = float(np.linalg.det(v.m))
    det_tilde = 1.0 / float(np.linalg.det(m_tilde))
    if det_tilde <= 0.0:
        raise np.linalg.LinAlgError("projected Gaussian core is singular")
    # W_V * exp(-x1^2-p1^2) = sqrt(det Vt / det V) * (Gaussian of core Vt)
    factor = 2.0 * np.pi * np.sqrt(det_tilde / det_v)
    return _integrate_out(m_tilde, det_tilde, fock * factor)


def condition_on_number(v: CovarianceMatrix4, n: int) -> ConditionResult:
    """Project the trigger mode onto the n-photon state, n in {0, 1, 2}.

    The conditioned Wigner function is the trigger-plane integral of
    W_V W_n, normalised; the probability comes from the same integral via
    the trace rule.  Impossible outcomes (zero probability) raise.
    """
    if n not in (0, 1, 2):
        raise ValueError(f"number detection supports n in {{0, 1, 2}}, got {n}")
    _require_physical(v)
    state_u, mass = _number_projection_raw(v, n)
    if mass < PROBABILITY_FLOOR:
        raise ImpossibleOutcomeError(
            f"outcome n={n} has zero probability on this state (P={mass:g})"
        )
    return ConditionResult(state=state_u.scaled(1.0 / mass), probability=float(mass))


def vacuum_projection(v: CovarianceMatrix4) -> ConditionResult:
    """No-click conditioning: projection of the trigger mode on vacuum."""
    return condition_on_number(v, 0)


def condition_on_on(v: CovarianceMatrix4) -> ConditionResult:
    """The "on" outcome of an on/off detector: vacuum component removed.

    Built from the mixture identity
    marginal = P0 * state_0 + (1 - P0) * state_on, so the result is a
    difference of two Gaussians and the probability is exactly 1 - P0.
    """
    _require_physical(v)
    state0_u, p0 = _number_projection_raw(v, 0)
    p_on = 1.0 - p0
    if p_on < PROBABILITY_FLOOR:
        raise ImpossibleOutcomeError(
            "trigger mode is exact vacuum; the on outcome never fires"
        )
    marginal, _ = integrate_out_trigger(TwoModeGaussianWigner(v), np.array([[1.0]]))
    terms = marginal.scaled(1.0 / p_on).terms + state0_u.scaled(-1.0 / p_on).terms
    return ConditionResult(state=GaussPolyState(terms=terms), probability=float(p_on))


def condition_on_click(v: CovarianceMatrix4) -> ConditionResult:
    """Click-detector back-action rho -> a1 rho a1+ / <a1+ a1>.

    Uses the reduced moment form: after integration by parts the trigger
    reduction weight is (x1^2 + p1^2 - 1)/2, and the normalisation is the
    trigger occupation (V11 + V22 - 2)/4.  The equivalent differential
    form is available as :func:`click_wigner_direct` for cross-checks.
    """
    _require_physical(v)
    occupation = v.trigger_occupation()
    if occupation < PROBABILITY_FLOOR:
        raise ImpossibleOutcomeError(
            f"trigger mode occupation is zero (<a+a> = {occupation:g}); "
            "no photon available to subtract"
        )
    state_u, mass = integrate_out_trigger(TwoModeGaussianWigner(v), _CLICK_WEIGHT)
    return ConditionResult(
        state=state_u.scaled(1.0 / mass), probability=float(occupation)
    )


def click_integrand_direct(v: CovarianceMatrix4, y: np.ndarray) -> np.ndarray:
    """Differential-operator form of the click back-action, before reduction.

    Evaluates
    ``[ (x1^2+p1^2)/2 + 1/2 + (x1 d/dx1 + p1 d/dp1)/2 + (d^2/dx1^2 + d^2/dp1^2)/8 ] W_V``
    at phase-space points ``y`` of shape (..., 4), using the closed-form
    derivatives of the Gaussian.
    """
    m = np.linalg.inv(v.m)
    det = float(np.linalg.det(v.m))
    my = np.einsum("ij,...j->...i", m, y)
    w = np.exp(-np.einsum("...i,...i", y, my)) / (np.pi**2 * np.sqrt(det))
    x1 = y[..., 0]
    p1 = y[..., 1]
    # first derivatives: dW/dy_i = -2 (M y)_i W; second: (4 (My)_i^2 - 2 M_ii) W
    drift = -(x1 * my[..., 0] + p1 * my[..., 1])
    laplace = (
        4.0 * my[..., 0] ** 2
        - 2.0 * m[0, 0]
        + 4.0 * my[..., 1] ** 2
        - 2.0 * m[1, 1]
    )
    return ((x1**2 + p1**2) / 2.0 + 0.5 + drift + laplace / 8.0) * w


def click_wigner_direct(
    v: CovarianceMatrix4,
    x2: float,
    p2: float,
    half_width: float | None = None,
    order: int = 80,
) -> float:
    """Unnormalised click-conditioned Wigner value by explicit trigger quadrature.

    Integrates the differential-operator form over the trigger phase plane
    on a Gauss-Legendre stencil; serves as the independent cross-check of
    the reduced moment form used by :func:`condition_on_click`.
    """
    if half_width is None:
        half_width = 7.0 * np.sqrt(max(v.m[0, 0], v.m[1, 1]) / 2.0)
    nodes, weights = _gl_rule(order)
    t = half_width * nodes
    wts = half_width * weights
    xx, pp = np.meshgrid(t, t, indexing="ij")
    y = np.stack(
        [xx, pp, np.full_like(xx, float(x2)), np.full_like(xx, float(p2))], axis=-1
    )
    vals = click_integrand_direct(v, y)
    return float(wts @ vals @ wts)
