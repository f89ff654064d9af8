"""Scattering-potential descriptions and their transverse Fourier transforms.

Potentials are small frozen dataclasses with closed-form transforms.  The
transverse transform is vt(x, q) = int dy e^{-iqy} v(x, y); potentials that
are independent of y have vt proportional to 2 pi delta(q), which is kept
symbolic (see uniform_part) and never sampled.

The serialization format is a key-value tree with a `kind` discriminator;
every numeric field is a decimal string and complex numbers are {re, im}
pairs, so documents round-trip exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedEvaluationError

# Gaussian tails are truncated at this many sigmas when computing the
# numeric x-support window; the neglected tail is below 1e-14 of the peak.
GAUSSIAN_SUPPORT_SIGMAS = 8.0


@dataclass(frozen=True)
class Delta2D:
    """Point potential strength * delta(x) delta(y) (a thin wire along z)."""

    strength: complex


@dataclass(frozen=True)
class Slab:
    """Homogeneous layer of relative permittivity epsilon on 0 <= x <= thickness.

    The potential value is k^2 (1 - epsilon), so it depends on the wavenumber
    of the field probing it.  Reused with z as the propagation axis in 3D.
    """

    epsilon: complex
    thickness: float

    def __post_init__(self):
        if not self.thickness > 0:
            raise ValueError("slab thickness must be positive")


@dataclass(frozen=True)
class SlabWithDefect:
    """Slab on [0, thickness] with a line defect of coupling `strength` at x = y = 0."""

    epsilon: complex
    thickness: float
    strength: complex

    def __post_init__(self):
        if not self.thickness > 0:
            raise ValueError("slab thickness must be positive")


@dataclass(frozen=True)
class GaussianBump:
    """Separable Gaussian v(x,y) = amplitude exp(-(x-x0)^2/2sx^2) exp(-(y-y0)^2/2sy^2)."""

    amplitude: complex
    center: tuple[float, float] = (0.0, 0.0)
    widths: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        sx, sy = self.widths
        if not (sx > 0 and sy > 0):
            raise ValueError("gaussian widths must be positive")


@dataclass(frozen=True)
class Delta3D:
    """Point potential strength * delta(x) delta(y) delta(z)."""

    strength: complex


@dataclass(frozen=True)
class SumPotential:
    """Sum of potentials whose x-supports overlap at most at endpoints."""

    members: tuple

    def __post_init__(self):
        if len(self.members) == 0:
            raise ValueError("sum potential needs at least one member")
        for m in self.members:
            if isinstance(m, (SumPotential, Delta3D)):
                raise ValueError(f"sum members of type {type(m).__name__} are not supported")
        spans = sorted(x_support(m) for m in self.members)
        for (a0, a1), (b0, b1) in zip(spans, spans[1:]):
            if b0 < a1 - 1e-12 * max(1.0, abs(a1)):
                raise ValueError(
                    f"member x-supports overlap: [{a0}, {a1}] and [{b0}, {b1}]")


PotentialSpec = Delta2D | Slab | SlabWithDefect | GaussianBump | Delta3D | SumPotential


def x_support(pot) -> tuple[float, float]:
    """Numeric x-support interval of a potential (Gaussian tails truncated)."""
    if isinstance(pot, Delta2D):
        return (0.0, 0.0)
    if isinstance(pot, (Slab, SlabWithDefect)):
        return (0.0, pot.thickness)
    if isinstance(pot, GaussianBump):
        x0 = pot.center[0]
        half = GAUSSIAN_SUPPORT_SIGMAS * pot.widths[0]
        return (x0 - half, x0 + half)
    if isinstance(pot, SumPotential):
        spans = [x_support(m) for m in pot.members]
        return (min(a for a, _ in spans), max(b for _, b in spans))
    raise TypeError(f"no x-support for {type(pot).__name__}")


def is_x_singular(pot) -> bool:
    """True if the potential carries a delta(x) (or delta(z)) factor."""
    if isinstance(pot, (Delta2D, Delta3D, SlabWithDefect)):
        return True
    if isinstance(pot, SumPotential):
        return any(is_x_singular(m) for m in pot.members)
    return False


def is_y_independent(pot) -> bool:
    if isinstance(pot, Slab):
        return True
    if isinstance(pot, SumPotential):
        return all(is_y_independent(m) for m in pot.members)
    return False


def discontinuities(pot) -> tuple[float, ...]:
    """x locations where the potential jumps (layer edges)."""
    if isinstance(pot, Slab):
        return (0.0, pot.thickness)
    if isinstance(pot, SumPotential):
        out: list[float] = []
        for m in pot.members:
            out.extend(discontinuities(m))
        return tuple(sorted(set(out)))
    return ()


def fourier_y(pot, x: float, q) -> complex | np.ndarray:
    """Transverse transform vt(x, q) = int dy e^{-iqy} v(x, y).

    Only potentials whose transform is an ordinary function of q can be
    sampled; y-independent potentials carry a symbolic 2 pi delta(q) factor
    and x-singular ones a delta(x) factor, and both raise
    UnsupportedEvaluationError.
    """
    if isinstance(pot, GaussianBump):
        q = np.asarray(q, dtype=float)
        x0, y0 = pot.center
        sx, sy = pot.widths
        profile = np.exp(-((x - x0) ** 2) / (2 * sx * sx))
        vals = (pot.amplitude * profile * np.sqrt(2 * np.pi) * sy
                * np.exp(-(sy * sy) * q * q / 2 - 1j * q * y0))
        return vals if vals.ndim else complex(vals)
    if isinstance(pot, SumPotential):
        return sum(fourier_y(m, x, q) for m in pot.members)
    if isinstance(pot, Slab):
        raise UnsupportedEvaluationError(
            "slab transform is 2 pi delta(q) * k^2 (1 - epsilon); use uniform_part")
    if isinstance(pot, (Delta2D, Delta3D, SlabWithDefect)):
        raise UnsupportedEvaluationError(
            f"{type(pot).__name__} carries a symbolic delta factor and cannot be sampled")
    raise TypeError(f"no transverse transform for {type(pot).__name__}")


def uniform_part(pot, x: float, k: float) -> complex:
    """Value of the y-independent component at x (zero when there is none)."""
    if isinstance(pot, Slab):
        return k * k * (1 - pot.epsilon) if 0.0 <= x <= pot.thickness else 0.0j
    if isinstance(pot, SumPotential):
        return sum(uniform_part(m, x, k) for m in pot.members)
    return 0.0j


def has_uniform_part(pot) -> bool:
    if isinstance(pot, Slab):
        return True
    if isinstance(pot, SumPotential):
        return any(has_uniform_part(m) for m in pot.members)
    return False


def smooth_members(pot) -> list:
    """Members with an ordinary (samplable) transverse transform."""
    if isinstance(pot, GaussianBump):
        return [pot]
    if isinstance(pot, SumPotential):
        out = []
        for m in pot.members:
            out.extend(smooth_members(m))
        return out
    return []


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _enc_real(x) -> str:
    return repr(float(x))


def _enc_complex(z) -> dict:
    z = complex(z)
    return {"re": _enc_real(z.real), "im": _enc_real(z.imag)}


def _dec_real(s) -> float:
    return float(s)


def _dec_complex(d) -> complex:
    return complex(float(d["re"]), float(d["im"]))


def potential_to_document(pot) -> dict:
    """Encode a potential as a key-value tree (all numbers as decimal strings)."""
    if isinstance(pot, Delta2D):
        return {"kind": "delta2d", "strength": _enc_complex(pot.strength)}
    if isinstance(pot, Delta3D):
        return {"kind": "delta3d", "strength": _enc_complex(pot.strength)}
    if isinstance(pot, Slab):
        return {"kind": "slab", "epsilon": _enc_complex(pot.epsilon),
                "thickness": _enc_real(pot.thickness)}
    if isinstance(pot, SlabWithDefect):
        return {"kind": "slab_with_defect", "epsilon": _enc_complex(pot.epsilon),
                "thickness": _enc_real(pot.thickness),
                "strength": _enc_complex(pot.strength)}
    if isinstance(pot, GaussianBump):
        return {"kind": "gaussian_bump", "amplitude": _enc_complex(pot.amplitude),
                "center": {"x": _enc_real(pot.center[0]), "y": _enc_real(pot.center[1])},
                "widths": {"x": _enc_real(pot.widths[0]), "y": _enc_real(pot.widths[1])}}
    if isinstance(pot, SumPotential):
        return {"kind": "sum", "members": [potential_to_document(m) for m in pot.members]}
    raise TypeError(f"cannot serialize {type(pot).__name__}")


def potential_from_document(doc: dict):
    """Inverse of potential_to_document. Raises ValueError on malformed input."""
    try:
        kind = doc["kind"]
    except (TypeError, KeyError):
        raise ValueError("potential document lacks a 'kind' discriminator")
    try:
        if kind == "delta2d":
            return Delta2D(strength=_dec_complex(doc["strength"]))
        if kind == "delta3d":
            return Delta3D(strength=_dec_complex(doc["strength"]))
        if kind == "slab":
            return Slab(epsilon=_dec_complex(doc["epsilon"]),
                        thickness=_dec_real(doc["thickness"]))
        if kind == "slab_with_defect":
            return SlabWithDefect(epsilon=_dec_complex(doc["epsilon"]),
                                  thickness=_dec_real(doc["thickness"]),
                                  strength=_dec_complex(doc["strength"]))
        if kind == "gaussian_bump":
            return GaussianBump(amplitude=_dec_complex(doc["amplitude"]),
                                center=(_dec_real(doc["center"]["x"]),
                                        _dec_real(doc["center"]["y"])),
                                widths=(_dec_real(doc["widths"]["x"]),
                                        _dec_real(doc["widths"]["y"])))
        if kind == "sum":
            return SumPotential(members=tuple(potential_from_document(m)
                                              for m in doc["members"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed {kind!r} potential document: {exc}") from exc
    raise ValueError(f"unknown potential kind {kind!r}")


def potential_to_json(pot, **kwargs) -> str:
    return json.dumps(potential_to_document(pot), **kwargs)


def potential_from_json(text: str):
    return potential_from_document(json.loads(text))
