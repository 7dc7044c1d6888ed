"""Scalar diagnostics of conditioned single-mode states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .wigner import GaussPolyState, GridSpec, evaluate_grid, overlap, state_purity


def wigner_at_origin(s: GaussPolyState) -> float:
    """Exact Wigner value at the origin; never grid-sampled."""
    return s.at_origin()


def fock_fidelity(s: GaussPolyState, n: int) -> float:
    """Overlap with the n-photon Fock state via Gaussian-moment reduction."""
    return overlap(s, n)


def purity(s: GaussPolyState) -> float:
    """Tr rho^2 of the single-mode state."""
    return state_purity(s)


@dataclass(frozen=True)
class NegativityResult:
    """Integrated negative Wigner volume with the grid step it was taken on."""

    volume: float
    dx: float
    dp: float


def negativity_volume(s: GaussPolyState, grid: GridSpec) -> NegativityResult:
    """Integral of max(0, -W) over the grid, by Riemann sum at the grid step."""
    xs, ps, w = evaluate_grid(s, grid)
    dx = float(xs[1] - xs[0])
    dp = float(ps[1] - ps[0])
    vol = float(np.sum(np.clip(-w, 0.0, None)) * dx * dp)
    return NegativityResult(volume=vol, dx=dx, dp=dp)
