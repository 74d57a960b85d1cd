"""Material constants, donor geometry and the hydrogenic tunnel coupling.

Units are nm / meV / ns everywhere. Couplings are stored as energies; the
only conversion to angular frequency is :func:`to_angular`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: Reduced Planck constant in meV*ns.
HBAR_MEV_NS = 6.58212e-4


def to_angular(energy):
    """Convert a coupling energy in meV to an angular frequency in rad/ns."""
    return energy / HBAR_MEV_NS


@dataclass(frozen=True)
class MaterialParams:
    """Effective-mass scales of the donor electron.

    The defaults (3 nm, 40 meV) are calibration values for Si:P, not
    measured constants. ``hbar`` is fixed and cannot be overridden.
    """

    bohr_radius: float = 3.0
    hartree: float = 40.0
    hbar: float = field(default=HBAR_MEV_NS, init=False)

    def __post_init__(self):
        if not (self.bohr_radius > 0 and math.isfinite(self.bohr_radius)):
            raise ValueError(f"bohr_radius must be positive, got {self.bohr_radius}")
        if not (self.hartree > 0 and math.isfinite(self.hartree)):
            raise ValueError(f"hartree must be positive, got {self.hartree}")


@dataclass(frozen=True)
class Position3D:
    """Donor position; x runs along the aperture line, z is depth."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite coordinate in {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class DonorTriple:
    """Three donors labelled by the aperture they were implanted through.

    Labels are never re-sorted by position, so ``d13`` is always the pair
    from the two outer apertures.
    """

    p1: Position3D
    p2: Position3D
    p3: Position3D

    @classmethod
    def from_array(cls, arr) -> "DonorTriple":
        a = np.asarray(arr, dtype=float).reshape(3, 3)
        return cls(*(Position3D(*map(float, row)) for row in a))

    def as_array(self) -> np.ndarray:
        return np.stack([self.p1.as_array(), self.p2.as_array(), self.p3.as_array()])


def pair_distances(triple: DonorTriple) -> tuple[float, float, float]:
    """Return ``(d12, d23, d13)`` in nm."""
    a = triple.as_array()
    return (
        float(np.linalg.norm(a[0] - a[1])),
        float(np.linalg.norm(a[1] - a[2])),
        float(np.linalg.norm(a[0] - a[2])),
    )


def pair_distances_array(positions: np.ndarray):
    """Vectorised :func:`pair_distances` for an ``(n, 3, 3)`` position array."""
    p = np.asarray(positions, dtype=float)
    d12 = np.linalg.norm(p[:, 0] - p[:, 1], axis=1)
    d23 = np.linalg.norm(p[:, 1] - p[:, 2], axis=1)
    d13 = np.linalg.norm(p[:, 0] - p[:, 2], axis=1)
    return d12, d23, d13


def tunnel_coupling(d, params: MaterialParams = MaterialParams()):
    """Hydrogenic tunnel matrix element between two donors ``d`` nm apart.

    ``W = 4 E* (d/a) exp(-d/a - 1)``. Peaks at ``d = a`` with value
    ``4 E* / e**2`` and vanishes at both ends. Accepts scalars or arrays.
    """
    x = np.asarray(d, dtype=float) / params.bohr_radius
    w = 4.0 * params.hartree * x * np.exp(-x - 1.0)
    return float(w) if w.ndim == 0 else w
