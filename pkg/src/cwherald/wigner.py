"""Closed-form algebra for Wigner functions of polynomial-times-Gaussian form.

The two-mode Gaussian Wigner function
``W_V(y) = exp(-y^T V^-1 y) / (pi^2 sqrt(det V))`` is reduced over the
trigger-mode phase plane against polynomial weights by Schur-complement
block decomposition; the result of every conditioning operation is a
(short sum of) polynomial-times-Gaussian single-mode states.  All
integrals here are exact Gaussian-moment reductions; no quadrature enters
the core path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covariance import CovarianceMatrix4
from .polynomials import (
    expected_poly_of_shifted_gaussian,
    gaussian_poly_integral,
    poly_eval,
    poly_mul,
)

FOCK_MAX = 2


@dataclass(frozen=True)
class TwoModeGaussianWigner:
    """Zero-mean two-mode Gaussian Wigner function with covariance ``v``."""

    v: CovarianceMatrix4

    def evaluate(self, y: np.ndarray) -> np.ndarray:
        """Value at phase-space points; ``y`` has shape (..., 4)."""
        m = np.linalg.inv(self.v.m)
        det = np.linalg.det(self.v.m)
        expo = -np.einsum("...i,ij,...j", y, m, y)
        return np.exp(expo) / (np.pi**2 * np.sqrt(det))


@dataclass(frozen=True)
class PolyGaussTerm:
    """One component poly(x, p) * exp(-(x,p) sigma^-1 (x,p)^T)."""

    coeffs: np.ndarray
    sigma: np.ndarray


@dataclass(frozen=True)
class GaussPolyState:
    """Single-mode Wigner function as a sum of polynomial-times-Gaussian terms.

    Conditioning on a photon-number or click outcome yields a single
    term; on/off conditioning yields a difference of two Gaussians, hence
    the short sum.  Normalised states integrate to one, checked and
    enforced analytically through Gaussian-moment reduction.
    """

    terms: tuple[PolyGaussTerm, ...]

    def evaluate(self, x, p):
        """Wigner value at (x, p); broadcasts over array arguments."""
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        out = np.zeros(np.broadcast(x, p).shape)
        for t in self.terms:
            si = np.linalg.inv(t.sigma)
            expo = -(si[0, 0] * x * x + 2.0 * si[0, 1] * x * p + si[1, 1] * p * p)
            out = out + poly_eval(t.coeffs, x, p) * np.exp(expo)
        return out

    def at_origin(self) -> float:
        """Exact value at the phase-space origin (constant coefficients)."""
        return float(sum(t.coeffs[0, 0] for t in self.terms))

    def total_integral(self) -> float:
        """Exact integral over the plane via Gaussian-moment reduction."""
        return float(
            sum(gaussian_poly_integral(t.coeffs, t.sigma) for t in self.terms)
        )

    def scaled(self, factor: float) -> "GaussPolyState":
        return GaussPolyState(
            terms=tuple(
                PolyGaussTerm(coeffs=t.coeffs * factor, sigma=t.sigma)
                for t in self.terms
            )
        )

    def normalized(self) -> "GaussPolyState":
        total = self.total_integral()
        if total == 0.0:
            raise ValueError("state has zero total integral")
        return self.scaled(1.0 / total)


def fock_wigner_poly(n: int) -> np.ndarray:
    """Polynomial part of the Fock-state Wigner function W_n = poly * exp(-x^2-p^2).

    Supported for n in {0, 1, 2}; higher projections are a documented
    extension point and rejected.
    """
    if n == 0:
        return np.array([[1.0 / np.pi]])
    if n == 1:
        c = np.zeros((3, 3))
        c[0, 0] = -1.0 / np.pi
        c[2, 0] = 2.0 / np.pi
        c[0, 2] = 2.0 / np.pi
        return c
    if n == 2:
        c = np.zeros((5, 5))
        c[0, 0] = 1.0 / np.pi
        c[2, 0] = -4.0 / np.pi
        c[0, 2] = -4.0 / np.pi
        c[4, 0] = 2.0 / np.pi
        c[2, 2] = 4.0 / np.pi
        c[0, 4] = 2.0 / np.pi
        return c
    raise ValueError(f"Fock index n={n} unsupported; analytic set is n in {{0, 1, 2}}")


def fock_state(n: int) -> GaussPolyState:
    """The Fock-state Wigner function as a normalised one-term state."""
    return GaussPolyState(
        terms=(PolyGaussTerm(coeffs=fock_wigner_poly(n), sigma=np.eye(2)),)
    )


def fock_wigner(n: int):
    """Closed-form callable (x, p) -> W_n(x, p)."""
    c = fock_wigner_poly(n)

    def w(x, p):
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        return poly_eval(c, x, p) * np.exp(-(x * x) - p * p)

    return w


def _integrate_out(m4: np.ndarray, det_v: float, weight: np.ndarray):
    """Reduce exp(-y^T M y)/(pi^2 sqrt(det V)) over (x1, p1) against a weight.

    ``m4`` is the full 4x4 exponent matrix (inverse of the Gaussian core),
    ``det_v`` the determinant of that core.  Returns the unnormalised
    one-term output state and its total integral.
    """
    g = m4[:2, :2]
    det_g = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    if det_g <= 0.0:
        raise np.linalg.LinAlgError("singular trigger block in partial integration")
    gi = np.linalg.inv(g)
    cross = m4[:2, 2:]
    # conditional mean of (x1, p1) is lin @ (x2, p2); conditional covariance gi/2
    lin = -gi @ cross
    schur = m4[2:, 2:] - cross.T @ gi @ cross
    sigma_out = np.linalg.inv(schur)
    prefactor = 1.0 / (np.pi * np.sqrt(det_g * det_v))
    out_poly = expected_poly_of_shifted_gaussian(weight, lin, gi / 2.0) * prefactor
    term = PolyGaussTerm(coeffs=out_poly, sigma=sigma_out)
    state = GaussPolyState(terms=(term,))
    return state, state.total_integral()


def integrate_out_trigger(w: TwoModeGaussianWigner, weight: np.ndarray):
    """Integrate weight(x1, p1) * W_V over the trigger phase plane, exactly.

    ``weight`` is a dense polynomial coefficient table of total degree at
    most four.  Returns the unnormalised output state (a polynomial in
    (x2, p2) times the Gaussian with the Schur-complement core) and the
    scalar mass, i.e. the integral of the result over (x2, p2).
    """
    nz = np.argwhere(weight != 0.0)
    if len(nz) and int(np.max(nz.sum(axis=1))) > 4:
        raise ValueError("weight polynomial total degree must be at most four")
    v = w.v.m
    return _integrate_out(np.linalg.inv(v), float(np.linalg.det(v)), weight)


def overlap(s: GaussPolyState, n: int) -> float:
    """Fidelity of the state with the n-photon Fock state, 2*pi*Int(W_s W_n)."""
    fock = fock_wigner_poly(n)
    acc = 0.0
    for t in s.terms:
        merged = np.linalg.inv(np.linalg.inv(t.sigma) + np.eye(2))
        acc += gaussian_poly_integral(poly_mul(t.coeffs, fock), merged)
    return 2.0 * np.pi * acc


def state_purity(s: GaussPolyState) -> float:
    """Tr rho^2 of the single-mode state, 2*pi*Int(W^2)."""
    acc = 0.0
    for ta in s.terms:
        for tb in s.terms:
            merged = np.linalg.inv(np.linalg.inv(ta.sigma) + np.linalg.inv(tb.sigma))
            acc += gaussian_poly_integral(poly_mul(ta.coeffs, tb.coeffs), merged)
    return 2.0 * np.pi * acc


@dataclass(frozen=True)
class GridSpec:
    """Rectangular phase-space grid; symmetric odd-count axes hit the origin exactly."""

    xmin: float = -5.0
    xmax: float = 5.0
    pmin: float = -5.0
    pmax: float = 5.0
    nx: int = 201
    np_: int = 201

    def __post_init__(self):
        if self.nx < 2 or self.np_ < 2:
            raise ValueError("grid needs at least 2 points per axis")
        for lo, hi in ((self.xmin, self.xmax), (self.pmin, self.pmax)):
            if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
                raise ValueError(f"bad grid range ({lo}, {hi})")

    def x_axis(self) -> np.ndarray:
        return _axis(self.xmin, self.xmax, self.nx)

    def p_axis(self) -> np.ndarray:
        return _axis(self.pmin, self.pmax, self.np_)


def _axis(lo: float, hi: float, n: int) -> np.ndarray:
    if n % 2 == 1 and lo == -hi:
        # build around the exact midpoint so the origin is hit exactly
        step = (hi - lo) / (n - 1)
        return (np.arange(n) - (n - 1) // 2) * step
    return np.linspace(lo, hi, n)


def evaluate_grid(s: GaussPolyState, grid: GridSpec):
    """Dense table of W values; returns (x_axis, p_axis, w[p_index, x_index])."""
    xs = grid.x_axis()
    ps = grid.p_axis()
    w = s.evaluate(xs[None, :], ps[:, None])
    return xs, ps, w


def write_grid_csv(path, xs: np.ndarray, ps: np.ndarray, w: np.ndarray) -> None:
    """Serialise a grid as CSV with header x,p,w; rows sweep x inside p."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,p,w\n")
        for ip, p in enumerate(ps):
            for ix, x in enumerate(xs):
                fh.write(f"{_fmt9(x)},{_fmt9(p)},{_fmt9(w[ip, ix])}\n")


def _fmt9(v: float) -> str:
    v = float(v)
    if v == 0.0:
        v = 0.0  # normalise -0.0
    return f"{v:.9g}"
