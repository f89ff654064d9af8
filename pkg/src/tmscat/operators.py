"""Transfer operators on the channel grid: composition and wave extraction.

A transfer operator maps the left-asymptotic coefficient pair (A-, B-) of a
wave to the right-asymptotic pair (A+, B+).  In two dimensions these
coefficients are functions of the transverse momentum p, and the operator
splits into

    M = mult(p) + K,

a 2x2 multiplication part evaluable at any p in (-k, k), plus a smoothing
integral part K represented by Nystrom matrices on the grid (quadrature
weights folded in).  An incident coherent beam c * 2 pi delta(p) survives
only through the multiplication part, while K turns it into a smooth
function; the columns of K against the delta channel are stored separately
in kernel_at_zero, so the delta function itself is never sampled.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .grid import (MomentumGrid, SpectralAmplitude, barycentric_interpolate,
                   chebyshev_barycentric_weights)

# rcond thresholds for the smooth-channel solve diagnostics
RCOND_SINGULAR = 1e-14
RCOND_NEAR_SINGULAR = 1e-9
# |mult_22(0)| below this (relative to the mult scale) flags the delta channel
MULT_ZERO_TOL = 1e-13


@dataclass(frozen=True)
class SingularityFlag:
    """Diagnostic attached to an extraction: none, near-singular or singular.

    condition is the estimated condition number of the smooth-channel system
    (None when it could not be estimated).
    """

    kind: str
    condition: float | None = None

    @property
    def is_singular(self) -> bool:
        return self.kind == "singular"

    @classmethod
    def none(cls) -> "SingularityFlag":
        return cls(kind="none")


@dataclass(frozen=True)
class TransferOperator:
    """mult + kernel split of a transfer operator on a MomentumGrid.

    mult maps an array of momenta to a (2, 2, m) array; kernel is a
    (2, 2, N, N) array (None means zero), kernel_at_zero a (2, 2, N) array
    of responses to a unit coherent beam in either channel (None means
    zero).  Instances are immutable.
    """

    grid: MomentumGrid
    mult: Callable[[np.ndarray], np.ndarray]
    kernel: np.ndarray | None
    kernel_at_zero: np.ndarray | None

    def __post_init__(self):
        n = self.grid.size
        if self.kernel is not None and self.kernel.shape != (2, 2, n, n):
            raise ValueError(f"kernel shape {self.kernel.shape} does not match the grid")
        if self.kernel_at_zero is not None and self.kernel_at_zero.shape != (2, 2, n):
            raise ValueError(
                f"kernel_at_zero shape {self.kernel_at_zero.shape} does not match the grid")

    def mult_on_grid(self) -> np.ndarray:
        return np.asarray(self.mult(self.grid.nodes))

    def mult_at_zero(self) -> np.ndarray:
        return np.asarray(self.mult(np.zeros(1)))[:, :, 0]

    def entries_on_grid(self) -> np.ndarray:
        """Full (2, 2, N, N) matrix of the operator restricted to the grid."""
        n = self.grid.size
        out = np.zeros((2, 2, n, n), dtype=complex)
        mg = self.mult_on_grid()
        idx = np.arange(n)
        out[:, :, idx, idx] = mg
        if self.kernel is not None:
            out = out + self.kernel
        return out


def constant_mult(matrix: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    matrix = np.asarray(matrix, dtype=complex)

    def mult(p: np.ndarray) -> np.ndarray:
        p = np.atleast_1d(p)
        return np.broadcast_to(matrix[:, :, None], (2, 2, p.size)).copy()

    return mult


def identity_operator(grid: MomentumGrid) -> TransferOperator:
    return TransferOperator(grid=grid, mult=constant_mult(np.eye(2)),
                            kernel=None, kernel_at_zero=None)


def _same_grid(a: MomentumGrid, b: MomentumGrid) -> bool:
    return a is b or (a.k == b.k and a.size == b.size
                      and np.array_equal(a.nodes, b.nodes))


def compose(second: TransferOperator, first: TransferOperator) -> TransferOperator:
    """Operator product second * first (first acts first).

    The caller asserts that the x-support of first's potential lies to the
    left of second's, overlapping at most at a point; only grid identity is
    checked here.
    """
    if not _same_grid(second.grid, first.grid):
        raise ValueError("operands live on different grids")
    grid = first.grid
    m2, m1 = second.mult, first.mult

    def mult(p: np.ndarray) -> np.ndarray:
        a, b = np.asarray(m2(p)), np.asarray(m1(p))
        return np.einsum("acm,cbm->abm", a, b)

    m2g = second.mult_on_grid()
    m1g = first.mult_on_grid()
    k2, k1 = second.kernel, first.kernel

    kernel = None
    if k1 is not None:
        # mult2 acting after K1: row-scale by m2 sampled at the output node
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

    return TransferOperator(grid=grid, mult=mult, kernel=kernel, kernel_at_zero=k0)


def _solve_outgoing_channels(m0, mult_grid, kernel, k0, incident):
    """Shared extraction algebra for the 2D and 3D operators.

    m0: (2, 2) multiplication part on the coherent channel; mult_grid:
    (2, 2, S) samples; kernel: (2, 2, S, S) or None; k0: (2, 2, S) or None.
    Returns (b0, phi, tp_delta, tp_smooth, flag).
    """
    s = mult_grid.shape[-1]
    scale = float(np.max(np.abs(m0)))
    flag_kind = "none"
    if abs(m0[1, 1]) <= MULT_ZERO_TOL * max(1.0, scale):
        flag_kind = "singular"
        b0 = np.inf + 0j if m0[1, 0] != 0 else 0.0j
    else:
        b0 = -m0[1, 0] / m0[1, 1] * incident

    zeros = np.zeros(s, dtype=complex)
    k011, k012 = (k0[0, 0], k0[0, 1]) if k0 is not None else (zeros, zeros)
    k021, k022 = (k0[1, 0], k0[1, 1]) if k0 is not None else (zeros, zeros)

    rhs = -(k021 * incident + b0 * k022)
    a22 = np.diag(mult_grid[1, 1])
    if kernel is not None:
        a22 = a22 + kernel[1, 1]

    condition = None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        anorm = np.linalg.norm(a22, 1)
        lu, piv = scipy.linalg.lu_factor(a22, check_finite=False)
        gecon = scipy.linalg.get_lapack_funcs("gecon", (a22,))
        rcond, info = gecon(lu, anorm)
        if info != 0:
            rcond = 0.0
        if rcond > 0:
            condition = float(1.0 / rcond)
        with np.errstate(all="ignore"):
            phi = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)

    if rcond <= RCOND_SINGULAR or not np.all(np.isfinite(phi)):
        flag_kind = "singular"
    elif rcond <= RCOND_NEAR_SINGULAR and flag_kind == "none":
        flag_kind = "near-singular"

    if flag_kind != "singular":
        tp_delta = m0[0, 0] * incident + m0[0, 1] * b0 - incident
    else:
        tp_delta = complex(np.nan)

    tp_smooth = k011 * incident + b0 * k012 + mult_grid[0, 1] * phi
    if kernel is not None:
        tp_smooth = tp_smooth + kernel[0, 1] @ phi
    return b0, phi, tp_delta, tp_smooth, SingularityFlag(flag_kind, condition)


def solve_outgoing(op: TransferOperator, incident: complex = 1.0):
    """Outgoing amplitudes for an incident coherent beam incident * 2 pi delta(p).

    Returns (T_plus, T_minus, flag): T_minus is the reflected amplitude
    B-, T_plus = A+ - A- the transmitted modification; both split into a
    delta coefficient and smooth node samples.  When the reflected-channel
    system is (near-)singular the flag reports it and values may be
    non-finite; such a point is a spectral singularity of the potential.
    """
    b0, phi, tp_delta, tp_smooth, flag = _solve_outgoing_channels(
        op.mult_at_zero(), op.mult_on_grid(), op.kernel, op.kernel_at_zero, incident)
    grid = op.grid
    t_minus = SpectralAmplitude(grid=grid, delta_coeff=complex(b0), smooth=phi)
    t_plus = SpectralAmplitude(grid=grid, delta_coeff=complex(tp_delta), smooth=tp_smooth)
    return t_plus, t_minus, flag


COS_EXCLUSION = 1e-12


def amplitude(t_plus: SpectralAmplitude, t_minus: SpectralAmplitude,
              k: float, thetas) -> list[tuple[float, complex]]:
    """Angular scattering amplitude f(theta) from the outgoing momenta.

    f(theta) = -(i / sqrt(2 pi)) * [omega T](k sin theta) with T = T_plus for
    cos theta > 0 and T_minus for cos theta < 0.  The product omega(p) T(p)
    is interpolated (barycentric, spectrally accurate on these nodes) rather
    than T itself, since T generically carries a 1/omega factor.  theta =
    pi/2 and 3 pi/2 (omega = 0) are excluded; delta coefficients are not
    folded in (they modify the coherent beam, not the diffuse wave).
    """
    grid = t_plus.grid
    if not _same_grid(grid, t_minus.grid):
        raise ValueError("amplitudes live on different grids")
    if not np.isclose(k, grid.k, rtol=1e-12, atol=0.0):
        raise ValueError(f"wavenumber {k} does not match the grid ({grid.k})")
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float)) % (2 * np.pi)
    cos_t = np.cos(thetas)
    if np.any(np.abs(cos_t) < COS_EXCLUSION):
        raise ValueError("f(theta) is undefined at cos(theta) = 0")

    bary = chebyshev_barycentric_weights(grid.size)
    u_plus = grid.omegas * t_plus.smooth
    u_minus = grid.omegas * t_minus.smooth
    p_eval = k * np.sin(thetas)
    f = np.empty(thetas.size, dtype=complex)
    fwd = cos_t > 0
    if np.any(fwd):
        f[fwd] = barycentric_interpolate(grid.nodes, bary, u_plus, p_eval[fwd])
    if np.any(~fwd):
        f[~fwd] = barycentric_interpolate(grid.nodes, bary, u_minus, p_eval[~fwd])
    f *= -1j / np.sqrt(2 * np.pi)
    return [(float(t), complex(v)) for t, v in zip(thetas, f)]


@dataclass(frozen=True)
class ScatteringResult:
    """Outgoing amplitudes plus sampled f(theta) and the extraction diagnostic."""

    t_plus: SpectralAmplitude
    t_minus: SpectralAmplitude
    f_samples: list[tuple[float, complex]]
    singularity_flag: SingularityFlag

    def csv_rows(self) -> list[tuple[float, float, float, float]]:
        """Rows (theta_deg, re_f, im_f, abs_f_sq) for the amplitude table."""
        return [(np.degrees(t), f.real, f.imag, abs(f) ** 2)
                for t, f in self.f_samples]

    def metadata(self) -> dict:
        """JSON-style record: wavenumber, grid size, beam coefficients, flag."""
        grid = self.t_plus.grid
        return {
            "k": grid.k,
            "n": grid.size,
            "t_plus_delta": {"re": self.t_plus.delta_coeff.real,
                             "im": self.t_plus.delta_coeff.imag},
            "t_minus_delta": {"re": self.t_minus.delta_coeff.real,
                              "im": self.t_minus.delta_coeff.imag},
            "singularity_flag": self.singularity_flag.kind,
        }


def scattering_result(op: TransferOperator, thetas) -> ScatteringResult:
    """Run the full extraction pipeline on an operator."""
    t_plus, t_minus, flag = solve_outgoing(op)
    if flag.is_singular:
        f_samples = []
    else:
        f_samples = amplitude(t_plus, t_minus, op.grid.k, thetas)
    return ScatteringResult(t_plus=t_plus, t_minus=t_minus,
                            f_samples=f_samples, singularity_flag=flag)
