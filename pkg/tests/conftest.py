"""Shared test helpers: random physical covariances and brute-force oracles."""

import numpy as np
import pytest

from cwherald.covariance import CovarianceMatrix4
from cwherald.wigner import TwoModeGaussianWigner
from cwherald.polynomials import poly_eval


def rot2(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, s], [-s, c]])


def squeeze2(r, phi):
    R = rot2(phi)
    return R.T @ np.diag([np.exp(r), np.exp(-r)]) @ R


def beamsplit4(theta):
    c, s = np.cos(theta), np.sin(theta)
    eye = np.eye(2)
    return np.block([[c * eye, s * eye], [-s * eye, c * eye]])


def random_physical_covariance(rng, squeeze_max=0.8, noise=0.2):
    """Random physical 4x4 covariance: symplectic on vacuum plus classical noise.

    V = S S^T is the covariance of a pure Gaussian state for symplectic S;
    adding a positive semidefinite term keeps V + i Omega >= 0.
    """
    s1 = squeeze2(rng.uniform(-squeeze_max, squeeze_max), rng.uniform(0, np.pi))
    s2 = squeeze2(rng.uniform(-squeeze_max, squeeze_max), rng.uniform(0, np.pi))
    local = np.block(
        [[s1, np.zeros((2, 2))], [np.zeros((2, 2)), s2]]
    )
    S = beamsplit4(rng.uniform(0, 2 * np.pi)) @ local
    v = S @ S.T
    if noise > 0:
        w = rng.normal(size=(4, 2)) * noise
        v = v + w @ w.T
    return CovarianceMatrix4(v)


def brute_force_trigger_integral(v, weight_coeffs, x2, p2, order=140):
    """2-D Gauss-Legendre quadrature of weight(x1,p1) W_V over the trigger plane."""
    trig = v.m[:2, :2]
    half = 7.5 * np.sqrt(np.max(np.linalg.eigvalsh(trig)) / 2.0)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    t = half * nodes
    wts = half * weights
    xx, pp = np.meshgrid(t, t, indexing="ij")
    y = np.stack(
        [xx, pp, np.full_like(xx, float(x2)), np.full_like(xx, float(p2))], axis=-1
    )
    wv = TwoModeGaussianWigner(v).evaluate(y)
    vals = poly_eval(weight_coeffs, xx, pp) * wv
    return float(wts @ vals @ wts)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


# Closed-form double integrals of exponential mode pairs against exp(-r|t-t'|),
# by antiderivative evaluation over the sign regions:
#   causal-causal   II_{t,t'<0} e^{g(t+t')} e^{-r|t-t'|}           = 1/(g (g+r))
#   causal-symmetric Int_{t<0} e^{gt} Int e^{-b|t'|} e^{-r|t-t'|}  = 2(b+g+r)/((b+g)(b+r)(g+r))
#   symmetric pair   II e^{-a(|t|+|t'|)} e^{-r|t-t'|}              = 2(2a+r)/(a (a+r)^2)
def causal_causal(g, r):
    return 1.0 / (g * (g + r))


def causal_symmetric(g, b, r):
    return 2.0 * (b + g + r) / ((b + g) * (b + r) * (g + r))


def symmetric_pair(a, r):
    return 2.0 * (2.0 * a + r) / (a * (a + r) ** 2)


def opo_moment_oracle(kind, eps, gamma, alpha, c1, c2):
    """Exact moments for a causal-exp trigger (rate gamma, amplitude c1) and
    a symmetric-exp output (rate alpha, amplitude c2 sqrt(alpha))."""
    lam, mu = 0.5 + eps, 0.5 - eps
    scale = (lam**2 - mu**2) / 4.0
    forms = {
        "11": lambda r: c1**2 * causal_causal(gamma, r),
        "12": lambda r: c1 * c2 * np.sqrt(alpha) * causal_symmetric(gamma, alpha, r),
        "22": lambda r: c2**2 * alpha * symmetric_pair(alpha, r),
    }
    f = forms[kind]
    plus = scale * (f(mu) / (2 * mu) + f(lam) / (2 * lam))
    minus = scale * (f(mu) / (2 * mu) - f(lam) / (2 * lam))
    return plus, minus  # (a-moment, b-moment)
