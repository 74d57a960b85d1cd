"""Fixed-step RK4 integration of the three-site Schrodinger equation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .ctap import PulseSchedule, tmax_for_adiabaticity
from .errors import DomainError, IntegrationError
from .physics import to_angular

DEFAULT_STEPS = 20_000
MIN_STEPS = 1_000
MAX_RECORDED = 2_001
NORM_TOLERANCE = 1e-6


@dataclass
class EvolutionResult:
    final_state: np.ndarray
    fidelity: float
    max_p2: float
    norm_drift: float
    trajectory: Optional[np.ndarray] = None  # rows of (t_ns, p1, p2, p3)


def _rhs(o12, o23, o13, a1, a2, a3):
    # -i H psi with H in rad/ns
    return (
        -1j * (o12 * a2 + o13 * a3),
        -1j * (o12 * a1 + o23 * a3),
        -1j * (o13 * a1 + o23 * a2),
    )


def evolve(
    s: PulseSchedule,
    omega13_peak: float = 0.0,
    steps: int = DEFAULT_STEPS,
    record: bool = False,
    initial_state: Optional[Sequence[complex]] = None,
) -> EvolutionResult:
    """Propagate ``|1>`` through the sin^2 schedule and report transfer to ``|3>``.

    The 1-3 coupling is held at the constant ``omega13_peak`` (meV) for the
    whole protocol. The trajectory, when recorded, is decimated to at most
    2001 samples including both endpoints.
    """
    if steps < MIN_STEPS:
        raise DomainError(f"need at least {MIN_STEPS} steps, got {steps}")
    if not (omega13_peak >= 0 and math.isfinite(omega13_peak)):
        raise DomainError(f"omega13_peak must be >= 0, got {omega13_peak}")

    h = s.t_max / steps
    # pulse values on the half-step grid, k = 0..2*steps
    half_grid = np.linspace(0.0, s.t_max, 2 * steps + 1)
    s2 = np.sin(np.pi * half_grid / (2.0 * s.t_max)) ** 2
    o12s = (to_angular(s.w12_peak) * s2).tolist()
    o23s = (to_angular(s.w23_peak) * (1.0 - s2)).tolist()
    o13 = to_angular(omega13_peak)

    if initial_state is None:
        a1, a2, a3 = 1.0 + 0j, 0j, 0j
    else:
        a1, a2, a3 = (complex(v) for v in initial_state)

    stride = max(1, math.ceil(steps / (MAX_RECORDED - 1)))
    rows = [(0.0, abs(a1) ** 2, abs(a2) ** 2, abs(a3) ** 2)] if record else None
    max_p2 = abs(a2) ** 2
    half = 0.5 * h

    try:
        for n in range(steps):
            k = 2 * n
            x12, x23 = o12s[k], o23s[k]
            m12, m23 = o12s[k + 1], o23s[k + 1]
            y12, y23 = o12s[k + 2], o23s[k + 2]

            k1 = _rhs(x12, x23, o13, a1, a2, a3)
            k2 = _rhs(m12, m23, o13, a1 + half * k1[0], a2 + half * k1[1], a3 + half * k1[2])
            k3 = _rhs(m12, m23, o13, a1 + half * k2[0], a2 + half * k2[1], a3 + half * k2[2])
            k4 = _rhs(y12, y23, o13, a1 + h * k3[0], a2 + h * k3[1], a3 + h * k3[2])
            c = h / 6.0
            a1 += c * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            a2 += c * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            a3 += c * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])

            p2 = abs(a2) ** 2
            if p2 > max_p2:
                max_p2 = p2
            if record and ((n + 1) % stride == 0 or n + 1 == steps):
                rows.append(((n + 1) * h, abs(a1) ** 2, p2, abs(a3) ** 2))
    except OverflowError:
        raise IntegrationError(f"amplitudes overflowed; increase the step count (now {steps})") from None

    final = np.array([a1, a2, a3], dtype=complex)
    norm_drift = abs(float(np.vdot(final, final).real) - 1.0)
    if not norm_drift <= NORM_TOLERANCE:
        raise IntegrationError(
            f"norm drift {norm_drift:.3e} exceeds {NORM_TOLERANCE:g}; increase the step count (now {steps})"
        )
    return EvolutionResult(
        final_state=final,
        fidelity=abs(a3) ** 2,
        max_p2=max_p2,
        norm_drift=norm_drift,
        trajectory=np.array(rows) if record else None,
    )


def fidelity_vs_adiabaticity_sweep(
    w12: float,
    w23: float,
    omega13_peak: float,
    a_values: Sequence[float],
    steps: int = DEFAULT_STEPS,
) -> list[tuple[float, float]]:
    """Transfer fidelity for each adiabaticity target, using the closed-form t_max."""
    a_values = [float(a) for a in a_values]
    if not a_values:
        raise DomainError("a_values is empty")
    if any(not (a > 0) for a in a_values):
        raise DomainError(f"adiabaticity targets must be positive, got {a_values}")
    if any(b >= a for a, b in zip(a_values, a_values[1:])):
        raise DomainError(f"adiabaticity targets must be strictly descending, got {a_values}")
    out = []
    for a in a_values:
        sched = PulseSchedule(w12, w23, tmax_for_adiabaticity(w12, w23, a))
        out.append((a, evolve(sched, omega13_peak, steps=steps).fidelity))
    return out
