"""Three-state CTAP analytics: pulses, eigensystem, adiabaticity, t_max and J.

Couplings are energies in meV. Every formula that needs a rate goes through
:func:`ctapyield.physics.to_angular`, so the closed-form and numerical
adiabaticity share the same single division by hbar.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, DomainError
from .physics import HBAR_MEV_NS, MaterialParams, to_angular, tunnel_coupling

SQRT2 = math.sqrt(2.0)

#: Pairs closer than this are flagged; the hydrogenic form is unreliable there.
TOO_CLOSE_NM = 5.0


class PulseShape(enum.Enum):
    SIN_SQUARED = "sin-squared"


@dataclass(frozen=True)
class PulseSchedule:
    """Peak couplings (meV) and protocol duration (ns)."""

    w12_peak: float
    w23_peak: float
    t_max: float
    shape: PulseShape = PulseShape.SIN_SQUARED

    def __post_init__(self):
        # zero peaks are allowed so the trivial H = 0 evolution can be run
        if not (self.w12_peak >= 0 and self.w23_peak >= 0):
            raise DomainError(f"peak couplings must be >= 0, got {self.w12_peak}, {self.w23_peak}")
        if not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise DomainError(f"t_max must be positive and finite, got {self.t_max}")
        if not isinstance(self.shape, PulseShape):
            raise DomainError(f"unknown pulse shape {self.shape!r}")


def _check_time(t, s: PulseSchedule, open_interval=False):
    ta = np.asarray(t, dtype=float)
    if open_interval:
        ok = np.all((ta > 0) & (ta < s.t_max))
    else:
        ok = np.all((ta >= 0) & (ta <= s.t_max))
    if not ok:
        span = f"(0, {s.t_max})" if open_interval else f"[0, {s.t_max}]"
        raise DomainError(f"time {t} outside {span} ns")
    return ta


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def _envelopes(ta, s: PulseSchedule):
    # sin^2 and cos^2 of pi t / (2 t_max)
    s2 = np.sin(np.pi * ta / (2.0 * s.t_max)) ** 2
    return s2, 1.0 - s2


def omega12(t, s: PulseSchedule):
    """Rising coupling ``W12 sin^2(pi t / 2 t_max)`` in meV."""
    s2, _ = _envelopes(_check_time(t, s), s)
    return _scalar(s.w12_peak * s2)


def omega23(t, s: PulseSchedule):
    """Falling coupling ``W23 cos^2(pi t / 2 t_max)`` in meV."""
    _, c2 = _envelopes(_check_time(t, s), s)
    return _scalar(s.w23_peak * c2)


def hamiltonian(o12: float, o23: float, o13: float = 0.0) -> np.ndarray:
    """Real symmetric 3x3 Hamiltonian (meV) in the site basis."""
    return np.array(
        [[0.0, o12, o13],
         [o12, 0.0, o23],
         [o13, o23, 0.0]]
    )


def dark_state(o12: float, o23: float) -> np.ndarray:
    """Null eigenvector ``(o23|1> - o12|3>)/norm``; no weight on site 2."""
    norm = math.hypot(o12, o23)
    if norm == 0.0:
        raise DegenerateError("dark state undefined when both couplings vanish")
    return np.array([o23 / norm, 0.0, -o12 / norm], dtype=complex)


def bright_energies(o12: float, o23: float) -> tuple[float, float, float]:
    """Eigenvalues ``(E-, E0, E+)`` of the Hamiltonian with no 1-3 coupling."""
    e = math.hypot(o12, o23)
    return (-e, 0.0, e)


def adiabaticity_analytic(t, s: PulseSchedule):
    """Closed-form adiabaticity for sin^2 pulses.

    ``A = pi W12 W23 sin(pi t/t_max) / (sqrt2 t_max (W12^2 + W23^2)^1.5)``
    with couplings as angular frequencies. Peaks at ``t_max/2`` for every
    peak ratio.
    """
    ta = _check_time(t, s)
    w12, w23 = to_angular(s.w12_peak), to_angular(s.w23_peak)
    gap3 = (w12 ** 2 + w23 ** 2) ** 1.5
    if gap3 == 0.0:
        return _scalar(np.zeros_like(ta))
    a = np.pi * w12 * w23 * np.sin(np.pi * ta / s.t_max) / (SQRT2 * s.t_max * gap3)
    return _scalar(np.abs(a))


def adiabaticity_numeric(t: float, s: PulseSchedule) -> float:
    """Adiabaticity from its definition, ``|<D+|dH/dt|D0>| / |E+ - E0|^2``.

    Diagonalises H(t) numerically and differentiates the pulses analytically.
    Defined on the open interval ``0 < t < t_max``.
    """
    t = float(_check_time(t, s, open_interval=True))
    s2, c2 = _envelopes(t, s)
    w12, w23 = to_angular(s.w12_peak), to_angular(s.w23_peak)
    h = hamiltonian(w12 * s2, w23 * c2)
    rate = np.pi / (2.0 * s.t_max) * math.sin(np.pi * t / s.t_max)
    dh = hamiltonian(w12 * rate, -w23 * rate)
    evals, evecs = np.linalg.eigh(h)
    gap = evals[2] - evals[1]
    if not gap > 0:
        raise DegenerateError(f"eigensystem degenerate at t={t}")
    d0, dplus = evecs[:, 1], evecs[:, 2]
    return float(abs(dplus @ dh @ d0) / gap ** 2)


def tmax_for_adiabaticity(w12: float, w23: float, a_target: float) -> float:
    """Protocol time (ns) whose peak closed-form adiabaticity equals ``a_target``."""
    if not (w12 > 0 and w23 > 0):
        raise DomainError(f"couplings must be positive for a CTAP pathway, got {w12}, {w23}")
    if not (a_target > 0 and math.isfinite(a_target)):
        raise DomainError(f"adiabaticity target must be positive, got {a_target}")
    o12, o23 = to_angular(w12), to_angular(w23)
    return math.pi * o12 * o23 / (SQRT2 * a_target * (o12 ** 2 + o23 ** 2) ** 1.5)


@dataclass(frozen=True)
class TripleMetrics:
    d12: float
    d23: float
    d13: float
    w12: float
    w23: float
    w13: float
    t_max: float
    j_param: float
    too_close_flag: bool


def metrics_arrays(d12, d23, d13, params: MaterialParams, a_target: float) -> dict:
    """Vectorised distance-form t_max and J.

    Works on the exponent-shifted form of ``F_ij = d_ij exp(-d_ij/a - 1)``
    (shifting by the nearer of the two pair distances) so that large
    separations do not underflow.
    """
    d12, d23, d13 = (np.asarray(d, dtype=float) for d in (d12, d23, d13))
    if not (a_target > 0 and math.isfinite(a_target)):
        raise DomainError(f"adiabaticity target must be positive, got {a_target}")
    bad = ~((d12 > 0) & (d23 > 0) & (d13 > 0) & np.isfinite(d12) & np.isfinite(d23) & np.isfinite(d13))
    if np.any(bad):
        idx = int(np.flatnonzero(np.atleast_1d(bad))[0])
        raise DegenerateError(f"coincident or invalid donor pair (entry {idx})")
    a = params.bohr_radius
    near = np.minimum(d12, d23)
    g12 = d12 * np.exp(-(d12 - near) / a)
    g23 = d23 * np.exp(-(d23 - near) / a)
    gsum = (g12 ** 2 + g23 ** 2) ** 1.5
    t_max = (
        params.hbar * np.pi * a * g12 * g23 * np.exp(near / a + 1.0)
        / (4.0 * SQRT2 * params.hartree * a_target * gsum)
    )
    j = np.pi * g12 * g23 * d13 * np.exp((near - d13) / a) / (SQRT2 * a_target * gsum)
    return {
        "d12": d12, "d23": d23, "d13": d13,
        "w12": tunnel_coupling(d12, params),
        "w23": tunnel_coupling(d23, params),
        "w13": tunnel_coupling(d13, params),
        "t_max": t_max,
        "j_param": j,
        "too_close_flag": (d12 < TOO_CLOSE_NM) | (d23 < TOO_CLOSE_NM) | (d13 < TOO_CLOSE_NM),
    }


def metrics_from_distances(
    d12: float, d23: float, d13: float,
    params: MaterialParams = MaterialParams(),
    a_target: float = 0.01,
) -> TripleMetrics:
    """Per-triple couplings, CTAP time at ``a_target`` and the 1-3 leakage bound J."""
    m = metrics_arrays(d12, d23, d13, params, a_target)
    return TripleMetrics(
        **{k: float(v) for k, v in m.items() if k != "too_close_flag"},
        too_close_flag=bool(m["too_close_flag"]),
    )


def j_parameter(w13: float, t_max: float) -> float:
    """``J = Omega13 * t_max`` with the coupling converted to rad/ns."""
    return to_angular(w13) * t_max


__all__ = [
    "HBAR_MEV_NS",
    "PulseShape",
    "PulseSchedule",
    "TripleMetrics",
    "omega12",
    "omega23",
    "hamiltonian",
    "dark_state",
    "bright_energies",
    "adiabaticity_analytic",
    "adiabaticity_numeric",
    "tmax_for_adiabaticity",
    "metrics_arrays",
    "metrics_from_distances",
    "j_parameter",
]
