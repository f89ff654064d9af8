"""Three-dimensional formulation: disc grids, point defect, stacked layers.

Channels now carry a transverse momentum vector pvec inside the disc
|pvec| <= k, with omega(pvec) = sqrt(k^2 - |pvec|^2).  The radial direction
is parametrized by omega itself: integrals over the disc satisfy

    int_disc d2p f / omega = int_0^{2pi} dphi int_0^k f domega,

so Gauss-Legendre nodes in omega integrate the ubiquitous 1/omega factor
with its plain weights (exactly, for constants, at any node count), while
the uniform azimuthal rule is exact for trigonometric polynomials.  The
incident coherent beam is 4 pi^2 delta(p_x) delta(p_y) and the extraction
algebra is identical to the 2D case.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ResourceLimitError, UnsupportedEvaluationError
from .closedforms import CHANNEL_FACTOR
from .operators import SingularityFlag, _solve_outgoing_channels
from .potentials import (Slab, SumPotential, discontinuities, has_uniform_part,
                         is_x_singular, uniform_part, x_support)

# dense 3D evolution is bounded to desk scale; the physics of interest
# (point defect, stacked layers) never needs more channels
MAX_CHANNELS_3D = 128


@dataclass(frozen=True)
class DiscGrid:
    """Polar quadrature grid strictly inside the momentum disc of radius k.

    omega_radial / radial_weights are Gauss-Legendre nodes and weights in
    the omega variable on (0, k); phis are uniform azimuth angles.  The
    flattened per-point arrays (px, py, omegas, point_weights) run radial-
    major; point_weights approximate the plain disc measure d2p.
    """

    k: float
    omega_radial: np.ndarray
    radial_weights: np.ndarray
    phis: np.ndarray
    px: np.ndarray
    py: np.ndarray
    omegas: np.ndarray
    point_weights: np.ndarray

    @property
    def size(self) -> int:
        return self.px.size

    @property
    def n_radial(self) -> int:
        return self.omega_radial.size

    @property
    def n_azimuthal(self) -> int:
        return self.phis.size


def build_disc_grid(k: float, n_radial: int, n_azimuthal: int) -> DiscGrid:
    if not np.isfinite(k) or k <= 0:
        raise ValueError(f"wavenumber must be positive and finite, got {k}")
    if n_radial < 2 or n_azimuthal < 2:
        raise ValueError("need at least 2 radial and 2 azimuthal points")
    x, w = np.polynomial.legendre.leggauss(int(n_radial))
    omega_r = 0.5 * k * (x + 1.0)
    w_r = 0.5 * k * w
    rho = np.sqrt((k - omega_r) * (k + omega_r))
    phis = 2.0 * np.pi * np.arange(int(n_azimuthal)) / int(n_azimuthal)
    w_phi = 2.0 * np.pi / int(n_azimuthal)
    px = (rho[:, None] * np.cos(phis)[None, :]).ravel()
    py = (rho[:, None] * np.sin(phis)[None, :]).ravel()
    omegas = np.repeat(omega_r, int(n_azimuthal))
    # rho drho = omega domega, so the plain measure folds omega into w_r
    point_weights = np.repeat(w_r * omega_r * w_phi, int(n_azimuthal))
    for a in (omega_r, w_r, phis, px, py, omegas, point_weights):
        a.setflags(write=False)
    return DiscGrid(k=float(k), omega_radial=omega_r, radial_weights=w_r,
                    phis=phis, px=px, py=py, omegas=omegas,
                    point_weights=point_weights)


def disc_quadrature(grid: DiscGrid, samples: np.ndarray) -> complex:
    """(1 / 4 pi^2) int_disc d2p f(pvec) from point samples."""
    samples = np.asarray(samples)
    if samples.shape != (grid.size,):
        raise ValueError(f"expected {grid.size} samples, got shape {samples.shape}")
    return complex(np.sum(grid.point_weights * samples) / (4 * np.pi ** 2))


@dataclass(frozen=True)
class SpectralAmplitude3D:
    """Coefficient of 4 pi^2 delta(p_x) delta(p_y) plus smooth disc samples."""

    grid: DiscGrid
    delta_coeff: complex
    smooth: np.ndarray

    def __post_init__(self):
        if np.asarray(self.smooth).shape != (self.grid.size,):
            raise ValueError("smooth sample count does not match the grid")

    @classmethod
    def zero(cls, grid: DiscGrid) -> "SpectralAmplitude3D":
        return cls(grid=grid, delta_coeff=0.0 + 0.0j,
                   smooth=np.zeros(grid.size, dtype=complex))


@dataclass(frozen=True)
class TransferOperator3D:
    """mult + kernel split on a DiscGrid; mult maps (px, py) to (2, 2, m)."""

    grid: DiscGrid
    mult: Callable[[np.ndarray, np.ndarray], np.ndarray]
    kernel: np.ndarray | None
    kernel_at_zero: np.ndarray | None

    def __post_init__(self):
        s = self.grid.size
        if self.kernel is not None and self.kernel.shape != (2, 2, s, s):
            raise ValueError(f"kernel shape {self.kernel.shape} does not match the grid")
        if self.kernel_at_zero is not None and self.kernel_at_zero.shape != (2, 2, s):
            raise ValueError(
                f"kernel_at_zero shape {self.kernel_at_zero.shape} does not match the grid")

    def mult_on_grid(self) -> np.ndarray:
        return np.asarray(self.mult(self.grid.px, self.grid.py))

    def mult_at_zero(self) -> np.ndarray:
        return np.asarray(self.mult(np.zeros(1), np.zeros(1)))[:, :, 0]


def constant_mult_3d(matrix: np.ndarray) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    matrix = np.asarray(matrix, dtype=complex)

    def mult(px: np.ndarray, py: np.ndarray) -> np.ndarray:
        px = np.atleast_1d(px)
        return np.broadcast_to(matrix[:, :, None], (2, 2, px.size)).copy()

    return mult


def identity_operator_3d(grid: DiscGrid) -> TransferOperator3D:
    return TransferOperator3D(grid=grid, mult=constant_mult_3d(np.eye(2)),
                              kernel=None, kernel_at_zero=None)


def delta3d_operator(strength: complex, grid: DiscGrid) -> TransferOperator3D:
    """Transfer operator of the 3D point potential strength * delta3(r).

    Identity plus the rank-one disc average: block (a, b) entries
    -(i z / 2 omega_j) * C[a, b] * W_l / (4 pi^2).
    """
    strength = complex(strength)
    if strength == 0:
        return identity_operator_3d(grid)
    col = -(0.5j * strength) / grid.omegas
    row = grid.point_weights / (4 * np.pi ** 2)
    kernel = np.einsum("ab,j,l->abjl", CHANNEL_FACTOR, col, row)
    k0 = np.einsum("ab,j->abj", CHANNEL_FACTOR, col)
    return TransferOperator3D(grid=grid, mult=constant_mult_3d(np.eye(2)),
                              kernel=kernel, kernel_at_zero=k0)


def delta3d_amplitude(strength: complex, k: float) -> complex:
    """Exact isotropic amplitude of the 3D point potential: -z / (4 pi + i k z)."""
    strength = complex(strength)
    return -strength / (4 * np.pi + 1j * k * strength)


def scattering_length(strength: complex) -> complex:
    """Low-energy limit -f(k -> 0) of the 3D point potential: z / 4 pi."""
    return complex(strength) / (4 * np.pi)


def solve_outgoing_3d(op: TransferOperator3D, incident: complex = 1.0):
    """Outgoing amplitudes for an incident beam incident * 4 pi^2 delta2(pvec).

    Same algebra as the 2D extraction with the disc normalization.
    Returns (T_plus, T_minus, flag).
    """
    b0, phi, tp_delta, tp_smooth, flag = _solve_outgoing_channels(
        op.mult_at_zero(), op.mult_on_grid(), op.kernel, op.kernel_at_zero, incident)
    grid = op.grid
    t_minus = SpectralAmplitude3D(grid=grid, delta_coeff=complex(b0), smooth=phi)
    t_plus = SpectralAmplitude3D(grid=grid, delta_coeff=complex(tp_delta), smooth=tp_smooth)
    return t_plus, t_minus, flag


def compose_3d(second: TransferOperator3D, first: TransferOperator3D) -> TransferOperator3D:
    """Operator product for z-ordered disjoint supports (first acts first)."""
    if not (second.grid is first.grid
            or (second.grid.k == first.grid.k
                and np.array_equal(second.grid.px, first.grid.px)
                and np.array_equal(second.grid.py, first.grid.py))):
        raise ValueError("operands live on different grids")
    grid = first.grid
    m2, m1 = second.mult, first.mult

    def mult(px: np.ndarray, py: np.ndarray) -> np.ndarray:
        return np.einsum("acm,cbm->abm", np.asarray(m2(px, py)), np.asarray(m1(px, py)))

    m2g, m1g = second.mult_on_grid(), first.mult_on_grid()
    k2, k1 = second.kernel, first.kernel
    kernel = None
    if k1 is not None:
        kernel = np.einsum("acj,cbjl->abjl", m2g, k1)
    if k2 is not None:
        term = np.einsum("acjl,cbl->abjl", k2, m1g)
        kernel = term if kernel is None else kernel + term
        if k1 is not None:
            kernel = kernel + np.einsum("acjs,cbsl->abjl", k2, k1)

    k01, k02 = first.kernel_at_zero, second.kernel_at_zero
    m1z = first.mult_at_zero()
    k0 = None
    if k01 is not None:
        k0 = np.einsum("acj,cbj->abj", m2g, k01)
        if k2 is not None:
            k0 = k0 + np.einsum("acjl,cbl->abj", k2, k01)
    if k02 is not None:
        term = np.einsum("acj,cb->abj", k02, m1z)
        k0 = term if k0 is None else k0 + term
    return TransferOperator3D(grid=grid, mult=mult, kernel=kernel, kernel_at_zero=k0)


# ---------------------------------------------------------------------------
# interpolation and the angular amplitude
# ---------------------------------------------------------------------------

def _barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    w = 1.0 / np.prod(diff, axis=1)
    return w / np.max(np.abs(w))


def _trig_interpolate(values: np.ndarray, phi: float) -> complex:
    """Trigonometric interpolation of samples on a uniform circle grid."""
    m = values.size
    coeff = np.fft.fft(values) / m
    modes = np.fft.fftfreq(m, d=1.0 / m)
    if m % 2 == 0:
        # split the Nyquist mode symmetrically to keep the interpolant balanced
        ny = m // 2
        total = coeff[ny]
        val = coeff @ np.exp(1j * modes * phi) - total * np.exp(-1j * ny * phi)
        val += total * np.cos(ny * phi)
        return complex(val)
    return complex(coeff @ np.exp(1j * modes * phi))


def amplitude3d(t_plus: SpectralAmplitude3D, t_minus: SpectralAmplitude3D,
                k: float, theta: float, phi: float) -> complex:
    """Angular amplitude f(theta, phi) = -(i / 2 pi) [omega T](k sin th cos ph, k sin th sin ph).

    T_plus is used for cos theta > 0, T_minus for cos theta < 0; theta =
    pi/2 (omega = 0) is excluded.  As in 2D, the omega-premultiplied samples
    are interpolated: polynomial in the radial omega variable, trigonometric
    in azimuth.
    """
    grid = t_plus.grid
    cos_t = float(np.cos(theta))
    if abs(cos_t) < 1e-12:
        raise ValueError("f(theta, phi) is undefined at cos(theta) = 0")
    amp = t_plus if cos_t > 0 else t_minus
    omega_eval = k * abs(cos_t)

    nr, na = grid.n_radial, grid.n_azimuthal
    u = (grid.omegas * amp.smooth).reshape(nr, na)
    bary = _barycentric_weights(grid.omega_radial)
    diff = omega_eval - grid.omega_radial
    hit = np.nonzero(diff == 0.0)[0]
    if hit.size:
        ring = u[hit[0]]
    else:
        kernel = bary / diff
        ring = (kernel @ u) / kernel.sum()
    return complex(-1j / (2 * np.pi) * _trig_interpolate(ring, float(phi)))


# ---------------------------------------------------------------------------
# numeric evolution along z (xy-independent potentials)
# ---------------------------------------------------------------------------

def _require_uniform(pot) -> None:
    if is_x_singular(pot):
        raise UnsupportedEvaluationError(
            f"{type(pot).__name__} is singular along the axis; use its closed form")
    if not isinstance(pot, (Slab, SumPotential)) or not has_uniform_part(pot):
        raise UnsupportedEvaluationError(
            "3D numeric evolution supports transverse-uniform layered potentials only")
    if isinstance(pot, SumPotential) and any(not isinstance(m, Slab) for m in pot.members):
        raise UnsupportedEvaluationError(
            "3D numeric evolution supports transverse-uniform layered potentials only")


def effective_hamiltonian_3d(pot, z: float, grid: DiscGrid) -> np.ndarray:
    """Evolution generator blocks (2, 2, S, S) at height z.

    Restricted to transverse-uniform layered potentials (diagonal in pvec)
    and to desk-scale grids.
    """
    if grid.size > MAX_CHANNELS_3D:
        raise ResourceLimitError(
            f"grid has {grid.size} channels; dense 3D blocks are capped at {MAX_CHANNELS_3D}")
    _require_uniform(pot)
    s = grid.size
    blocks = np.zeros((2, 2, s, s), dtype=complex)
    u = uniform_part(pot, z, grid.k)
    if u != 0:
        e2 = np.exp(2j * grid.omegas * z)
        pref = u / (2 * grid.omegas)
        idx = np.arange(s)
        blocks[0, 0, idx, idx] = pref
        blocks[0, 1, idx, idx] = pref / e2
        blocks[1, 0, idx, idx] = -pref * e2
        blocks[1, 1, idx, idx] = -pref
    return blocks


def evolve_transfer_3d(pot, grid: DiscGrid, z_min: float, z_max: float,
                       steps: int) -> TransferOperator3D:
    """Numeric transfer operator of a layered potential over [z_min, z_max]."""
    _require_uniform(pot)
    if grid.size > MAX_CHANNELS_3D:
        raise ResourceLimitError(
            f"grid has {grid.size} channels; dense 3D evolution is capped at {MAX_CHANNELS_3D}")
    if not z_min < z_max:
        raise ValueError("z_min must be below z_max")

    def channels(omegas: np.ndarray) -> np.ndarray:
        m = omegas.size

        def hfun(z):
            h = np.zeros((m, 2, 2), dtype=complex)
            u = uniform_part(pot, z, grid.k)
            if u != 0:
                e2 = np.exp(2j * omegas * z)
                pref = u / (2 * omegas)
                h[:, 0, 0] = pref
                h[:, 0, 1] = pref / e2
                h[:, 1, 0] = -pref * e2
                h[:, 1, 1] = -pref
            return h

        from .evolution import _rk4
        eye = np.broadcast_to(np.eye(2, dtype=complex), (m, 2, 2)).copy()
        return _rk4(hfun, eye, z_min, z_max, steps, breaks=discontinuities(pot))

    def mult(px: np.ndarray, py: np.ndarray) -> np.ndarray:
        px = np.atleast_1d(np.asarray(px, dtype=float))
        py = np.atleast_1d(np.asarray(py, dtype=float))
        om = np.sqrt(grid.k ** 2 - px * px - py * py)
        return np.moveaxis(channels(om), 0, -1)

    return TransferOperator3D(grid=grid, mult=mult, kernel=None, kernel_at_zero=None)


def support_window_3d(pot) -> tuple[float, float]:
    """z-support of a layered potential (axis label aside, same as x_support)."""
    return x_support(pot)
