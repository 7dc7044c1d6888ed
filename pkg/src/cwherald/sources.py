"""Stationary Gaussian light-source models.

The central object is a :class:`CorrelationKernel` holding the two-time
correlations ``<a(t) a(t+tau)>`` and ``<a+(t) a(t+tau)>`` of the source
field, with operators normalised to delta-correlated commutators.  The
below-threshold optical parametric oscillator (OPO) is the physical source
of interest; a two-mode squeezed vacuum covariance is provided as an
exactly solvable source for tests, bypassing the quadrature stage.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .covariance import CovarianceMatrix4, physicality_check
from .errors import ThresholdError


@dataclass(frozen=True)
class OpoParams:
    """Below-threshold OPO: mirror leakage rates and nonlinear gain.

    All rates are expressed in units of ``gamma1`` (and times in units of
    ``1/gamma1``), so ``gamma1`` is conventionally 1.0.  The sum and
    difference rates ``rate_fast = (gamma1+gamma2)/2 + epsilon`` and
    ``rate_slow = (gamma1+gamma2)/2 - epsilon`` govern the decay of the
    anti-squeezed and squeezed output correlations; ``rate_slow > 0`` is
    the below-threshold condition.
    """

    gamma1: float = 1.0
    gamma2: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if not (self.gamma1 > 0):
            raise ValueError(f"gamma1 must be positive, got {self.gamma1}")
        if self.gamma2 < 0:
            raise ValueError(f"gamma2 must be nonnegative, got {self.gamma2}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")
        if self.rate_slow <= 0:
            raise ThresholdError(
                "at or above threshold: (gamma1 + gamma2)/2 - epsilon = "
                f"{self.rate_slow:g} <= 0 for gamma1={self.gamma1:g}, "
                f"gamma2={self.gamma2:g}, epsilon={self.epsilon:g}"
            )

    @property
    def rate_fast(self) -> float:
        return 0.5 * (self.gamma1 + self.gamma2) + self.epsilon

    @property
    def rate_slow(self) -> float:
        return 0.5 * (self.gamma1 + self.gamma2) - self.epsilon


@dataclass(frozen=True)
class CorrelationKernel:
    """Two-time source correlations, both even functions of the time lag.

    ``c_aa(tau)`` is the anomalous correlation ``<a(t) a(t+tau)>`` and
    ``c_ada(tau)`` the occupation correlation ``<a+(t) a(t+tau)>``, per
    unit time.  ``decay_rate`` is the slowest exponential rate (used to
    truncate integrals), ``fast_rate`` the fastest (used to size
    quadrature panels and the narrow-window rule).  Both callables accept
    numpy arrays.
    """

    c_aa: Callable[[np.ndarray], np.ndarray]
    c_ada: Callable[[np.ndarray], np.ndarray]
    decay_rate: float
    fast_rate: float


@dataclass(frozen=True)
class DirectTwoModeSource:
    """A two-mode covariance supplied verbatim, bypassing the quadrature stage."""

    v: CovarianceMatrix4

    def __post_init__(self):
        report = physicality_check(self.v)
        if not report.physical:
            raise ValueError(
                "direct source covariance is unphysical: "
                f"min eigenvalue of V + i*Omega = {report.min_eigenvalue:g}"
            )


def opo_kernel(p: OpoParams) -> CorrelationKernel:
    """Correlation kernel of the below-threshold OPO output field.

    Both correlations are sums of two exponentials decaying at
    ``rate_slow`` and ``rate_fast``, with overall scale
    ``gamma1/(gamma1+gamma2) * (rate_fast^2 - rate_slow^2)/4``.
    At ``epsilon = 0`` both kernels vanish identically.
    """
    lam = p.rate_fast
    mu = p.rate_slow
    scale = p.gamma1 / (p.gamma1 + p.gamma2) * (lam**2 - mu**2) / 4.0

    def c_aa(tau):
        s = np.abs(tau)
        return scale * (np.exp(-mu * s) / (2.0 * mu) + np.exp(-lam * s) / (2.0 * lam))

    def c_ada(tau):
        s = np.abs(tau)
        return scale * (np.exp(-mu * s) / (2.0 * mu) - np.exp(-lam * s) / (2.0 * lam))

    return CorrelationKernel(c_aa=c_aa, c_ada=c_ada, decay_rate=mu, fast_rate=lam)


def tmsv_covariance(r: float) -> DirectTwoModeSource:
    """Two-mode squeezed vacuum covariance for squeezing parameter ``r``.

    Diagonal blocks ``cosh(2r) I``, off-diagonal blocks
    ``sinh(2r) diag(1, -1)``, in the vacuum = identity convention.
    """
    ch = np.cosh(2.0 * r)
    sh = np.sinh(2.0 * r)
    m = np.array(
        [
            [ch, 0.0, sh, 0.0],
            [0.0, ch, 0.0, -sh],
            [sh, 0.0, ch, 0.0],
            [0.0, -sh, 0.0, ch],
        ]
    )
    return DirectTwoModeSource(v=CovarianceMatrix4(m))
