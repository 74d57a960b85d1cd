"""Population statistics: empirical CDF of t_max, yield and J fractions."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence, Union

import numpy as np

from .ctap import metrics_arrays
from .errors import DomainError
from .physics import DonorTriple, MaterialParams, pair_distances_array
from .reporting import write_csv, write_json

PERCENTILES = (1, 5, 25, 50, 75, 95, 99)


@dataclass
class YieldReport:
    n_samples: int
    adiabaticity_target: float
    threshold: float  # ns
    yield_fraction: float
    j_below_one_fraction: float
    j_below_tenth_fraction: float
    too_close_fraction: float
    tmax_percentiles: dict = field(default_factory=dict)
    cdf: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def write_json(self, path):
        return write_json(path, self.to_dict())

    def write_cdf_csv(self, path):
        return write_csv(path, ("tmax_ns", "fraction"), self.cdf)


def empirical_cdf(values) -> list[tuple[float, float]]:
    """Right-continuous empirical CDF as ``(value, fraction <= value)`` pairs."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise DomainError("empirical CDF of an empty sample")
    uniq, counts = np.unique(v, return_counts=True)
    frac = np.cumsum(counts) / v.size
    frac[-1] = 1.0
    return [(float(x), float(f)) for x, f in zip(uniq, frac)]


def cdf_at(cdf: Sequence[tuple[float, float]], x: float) -> float:
    """Evaluate a step CDF from :func:`empirical_cdf` at ``x``."""
    xs = [p[0] for p in cdf]
    i = int(np.searchsorted(xs, x, side="right"))
    return 0.0 if i == 0 else cdf[i - 1][1]


def nearest_rank(sorted_values: np.ndarray, pct: float) -> float:
    n = len(sorted_values)
    rank = max(1, math.ceil(pct / 100.0 * n))
    return float(sorted_values[rank - 1])


def _as_positions(triples) -> np.ndarray:
    if isinstance(triples, np.ndarray):
        return triples.reshape(-1, 3, 3)
    return np.stack([t.as_array() for t in triples]) if len(triples) else np.empty((0, 3, 3))


def evaluate_population(
    triples: Union[Sequence[DonorTriple], np.ndarray],
    params: MaterialParams = MaterialParams(),
    a_target: float = 0.01,
    threshold: float = 1.0,
) -> YieldReport:
    """Reduce a population of triples to a :class:`YieldReport`.

    Yield counts triples with ``t_max <= threshold``. Triples flagged as too
    close are counted in ``too_close_fraction`` but stay in the yield.
    """
    pos = _as_positions(triples)
    n = len(pos)
    if n == 0:
        raise DomainError("cannot evaluate an empty population")
    if not 0 < a_target < 1:
        raise DomainError(f"adiabaticity target must lie in (0, 1), got {a_target}")
    if not threshold > 0:
        raise DomainError(f"threshold must be positive, got {threshold}")
    m = metrics_arrays(*pair_distances_array(pos), params, a_target)
    t = np.sort(m["t_max"])
    j = m["j_param"]
    return YieldReport(
        n_samples=n,
        adiabaticity_target=float(a_target),
        threshold=float(threshold),
        yield_fraction=int(np.count_nonzero(t <= threshold)) / n,
        j_below_one_fraction=int(np.count_nonzero(j < 1.0)) / n,
        j_below_tenth_fraction=int(np.count_nonzero(j < 0.1)) / n,
        too_close_fraction=int(np.count_nonzero(m["too_close_flag"])) / n,
        tmax_percentiles={str(p): nearest_rank(t, p) for p in PERCENTILES},
        cdf=empirical_cdf(t),
    )
