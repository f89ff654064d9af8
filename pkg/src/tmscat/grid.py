"""Momentum-space channel grids and singular quadrature on (-k, k).

Propagating channels of a wave with wavenumber k carry a transverse momentum
p in (-k, k) and a longitudinal frequency omega(p) = sqrt(k^2 - p^2).
Integrals over the channel interval generically carry a 1/omega factor, so
the natural quadrature is the Chebyshev-Gauss rule

    sum_j w_j g(p_j)  ~  int_{-k}^{k} g(p) / sqrt(k^2 - p^2) dp,

with p_j = k cos((2j-1) pi / 2N) and w_j = pi / N, exact for g a polynomial
of degree < 2N.  Endpoints +-k (omega = 0, grazing channels) are excluded;
channels with |p| > k (evanescent) are not represented at all.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MomentumGrid:
    """Quadrature nodes, weights and channel frequencies on (-k, k).

    nodes are in decreasing order and symmetric about 0; omegas[j] =
    sqrt(k^2 - nodes[j]^2) > 0 for all j.  Instances are immutable and safe
    to share between concurrent computations.
    """

    k: float
    nodes: np.ndarray
    weights: np.ndarray
    omegas: np.ndarray

    @property
    def size(self) -> int:
        return self.nodes.size


def build_grid(k: float, n: int) -> MomentumGrid:
    """Build the N-point Chebyshev-Gauss channel grid for wavenumber k.

    Raises ValueError for k <= 0 or n < 2.
    """
    if not np.isfinite(k) or k <= 0:
        raise ValueError(f"wavenumber must be positive and finite, got {k}")
    if int(n) != n or n < 2:
        raise ValueError(f"grid size must be an integer >= 2, got {n}")
    n = int(n)
    j = np.arange(1, n + 1)
    theta = (2 * j - 1) * np.pi / (2 * n)
    nodes = k * np.cos(theta)
    weights = np.full(n, np.pi / n)
    omegas = k * np.sin(theta)
    for a in (nodes, weights, omegas):
        a.setflags(write=False)
    return MomentumGrid(k=float(k), nodes=nodes, weights=weights, omegas=omegas)


def quadrature(grid: MomentumGrid, samples: np.ndarray, weighted: bool = False) -> complex:
    """Channel average of sampled data.

    weighted=False: (1/2pi) sum_j w_j f_j, approximating
        (1/2pi) int f(p) / sqrt(k^2 - p^2) dp
    (for integrands that carry an explicit 1/omega factor; exact for
    polynomial f of degree < 2N).

    weighted=True: (1/2pi) sum_j w_j omega_j f_j, approximating the plain
    average (1/2pi) int f(p) dp.
    """
    samples = np.asarray(samples)
    if samples.shape != (grid.size,):
        raise ValueError(f"expected {grid.size} samples, got shape {samples.shape}")
    if weighted:
        return complex(np.sum(grid.weights * grid.omegas * samples) / (2 * np.pi))
    return complex(np.sum(grid.weights * samples) / (2 * np.pi))


@dataclass(frozen=True)
class SpectralAmplitude:
    """A half-line wave in momentum representation.

    delta_coeff is the coefficient multiplying 2 pi delta(p) (the coherent
    plane-wave beam); smooth holds samples of the diffuse part on the grid
    nodes.  The delta factor itself is never sampled numerically.
    """

    grid: MomentumGrid
    delta_coeff: complex
    smooth: np.ndarray

    def __post_init__(self):
        if np.asarray(self.smooth).shape != (self.grid.size,):
            raise ValueError("smooth sample count does not match the grid")

    @classmethod
    def zero(cls, grid: MomentumGrid) -> "SpectralAmplitude":
        return cls(grid=grid, delta_coeff=0.0 + 0.0j, smooth=np.zeros(grid.size, dtype=complex))


def chebyshev_barycentric_weights(n: int) -> np.ndarray:
    """Barycentric weights for first-kind Chebyshev nodes (up to a constant)."""
    j = np.arange(1, n + 1)
    theta = (2 * j - 1) * np.pi / (2 * n)
    return (-1.0) ** (j - 1) * np.sin(theta)


def barycentric_interpolate(nodes: np.ndarray, bary_weights: np.ndarray,
                            values: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate the barycentric interpolant of (nodes, values) at points x.

    Exact node hits return the stored value; otherwise the standard second
    barycentric formula is used.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    diff = x[:, None] - nodes[None, :]
    out = np.empty(x.size, dtype=complex)
    hit_rows, hit_cols = np.nonzero(diff == 0.0)
    kernel = np.zeros_like(diff, dtype=float)
    safe = diff != 0.0
    kernel[safe] = bary_weights[np.nonzero(safe)[1]] / diff[safe]
    denom = kernel.sum(axis=1)
    numer = kernel @ values
    with np.errstate(invalid="ignore", divide="ignore"):
        out[:] = numer / denom
    out[hit_rows] = values[hit_cols]
    return out
