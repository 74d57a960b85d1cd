"""Donor placement by single-ion implantation through three apertures.

Each ion enters uniformly over its aperture disk and is then displaced by a
straggle drawn either from a Gaussian model or from recorded SRIM ions.

Randomness is counter based: the draws for sample ``i`` at aperture ``k``
come from a Philox stream keyed by the master seed with counter ``(i, k)``,
so a triple depends only on ``(seed, i)`` and never on chunking or worker
count.
"""

from __future__ import annotations

import math
import os
import re
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import NamedTuple, Sequence, Union

import numpy as np

from .config import read_key_value
from .errors import ConfigError, DomainError, LowStatisticsWarning, SRIMFormatError
from .physics import DonorTriple

MASK64 = (1 << 64) - 1
MIN_EMPIRICAL_SAMPLES = 100
ANGSTROM_PER_NM = 10.0

# counter word 1 separates stream families
_TRIPLE_STREAM = 0
_STRAGGLE_STREAM = 1


@dataclass(frozen=True)
class ImplantStrategy:
    """Beam, oxide and aperture geometry for one implant recipe (lengths in nm)."""

    name: str
    energy: float  # keV
    oxide_thickness: float
    mean_depth: float
    lateral_straggle_sigma: float
    depth_straggle_sigma: float
    aperture_diameter: float
    aperture_pitch: float

    def __post_init__(self):
        for f in fields(self):
            if f.name == "name":
                continue
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise DomainError(f"{f.name} must be finite, got {v}")
        for key in ("energy", "oxide_thickness", "mean_depth", "aperture_pitch"):
            if not getattr(self, key) > 0:
                raise DomainError(f"{key} must be positive, got {getattr(self, key)}")
        # zero straggle / zero aperture are allowed as degenerate limits
        for key in ("lateral_straggle_sigma", "depth_straggle_sigma", "aperture_diameter"):
            if getattr(self, key) < 0:
                raise DomainError(f"{key} must be >= 0, got {getattr(self, key)}")
        if not self.aperture_diameter < self.aperture_pitch:
            raise DomainError(
                f"apertures overlap: diameter {self.aperture_diameter} >= pitch {self.aperture_pitch}"
            )

    def aperture_centres(self) -> tuple[float, float, float]:
        return (0.0, self.aperture_pitch, 2.0 * self.aperture_pitch)


def builtin_strategies() -> list[ImplantStrategy]:
    """The 14 keV (5 nm oxide) and 7 keV (1.2 nm oxide) phosphorus recipes.

    The 7 keV straggle is 40% below the 14 keV value.
    """
    return [
        ImplantStrategy("P14keV", 14.0, 5.0, 20.0, 11.0, 11.0, 10.0, 20.0),
        ImplantStrategy("P7keV", 7.0, 1.2, 14.0, 6.6, 6.6, 10.0, 20.0),
    ]


def strategy_from_mapping(values: dict[str, str], source: str = "<config>") -> ImplantStrategy:
    known = {f.name for f in fields(ImplantStrategy)}
    for key in values:
        if key not in known:
            raise ConfigError(f"{source}: unknown strategy key {key!r}")
    missing = sorted(known - set(values))
    if missing:
        raise ConfigError(f"{source}: missing strategy keys {', '.join(missing)}")
    kwargs = {}
    for key, raw in values.items():
        if key == "name":
            kwargs[key] = raw
            continue
        try:
            kwargs[key] = float(raw)
        except ValueError:
            raise ConfigError(f"{source}: {key}={raw!r} is not a number") from None
    return ImplantStrategy(**kwargs)


def load_strategy(path) -> ImplantStrategy:
    """Read an :class:`ImplantStrategy` from a key=value file."""
    return strategy_from_mapping(read_key_value(path), source=str(path))


def resolve_strategy(name_or_path: str) -> ImplantStrategy:
    presets = {s.name: s for s in builtin_strategies()}
    if name_or_path in presets:
        return presets[name_or_path]
    if Path(name_or_path).is_file():
        return load_strategy(name_or_path)
    raise ConfigError(
        f"unknown strategy {name_or_path!r}; available presets: {', '.join(presets)}"
    )


class StraggleSample(NamedTuple):
    dx: float
    dy: float
    z: float


@dataclass(frozen=True)
class ParametricSource:
    """Independent Gaussian lateral straggle and truncated Gaussian depth."""

    strategy: ImplantStrategy


class EmpiricalSource:
    """Recorded ion end points, resampled uniformly with replacement."""

    def __init__(self, samples: Union[Sequence[StraggleSample], np.ndarray]):
        arr = np.asarray(samples, dtype=float)
        if arr.size == 0:
            raise DomainError("empirical straggle source is empty")
        arr = arr.reshape(-1, 3)
        if not np.all(np.isfinite(arr)):
            raise DomainError("empirical straggle source contains non-finite values")
        if len(arr) < MIN_EMPIRICAL_SAMPLES:
            warnings.warn(
                f"only {len(arr)} recorded ions (< {MIN_EMPIRICAL_SAMPLES}); straggle statistics unreliable",
                LowStatisticsWarning,
                stacklevel=2,
            )
        self.samples = arr

    def __len__(self):
        return len(self.samples)


StraggleSource = Union[ParametricSource, EmpiricalSource]


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def stream(seed: int, index: int, aperture: int, family: int = _TRIPLE_STREAM) -> np.random.Generator:
    """Independent generator for one (sample, aperture) cell."""
    return np.random.Generator(
        np.random.Philox(key=seed, counter=[0, family, aperture, index])
    )


def _parametric_straggle(g: np.random.Generator, st: ImplantStrategy) -> tuple[float, float, float]:
    dx = st.lateral_straggle_sigma * g.standard_normal()
    dy = st.lateral_straggle_sigma * g.standard_normal()
    # resample rather than clamp so no pile-up forms at the surface
    while True:
        z = st.mean_depth + st.depth_straggle_sigma * g.standard_normal()
        if z > 0:
            return dx, dy, z


def _draw_ion(g, source: StraggleSource, geometry: ImplantStrategy, centre: float):
    radius = 0.5 * geometry.aperture_diameter
    r = radius * math.sqrt(g.random())
    phi = 2.0 * math.pi * g.random()
    ex, ey = centre + r * math.cos(phi), r * math.sin(phi)
    if isinstance(source, ParametricSource):
        dx, dy, z = _parametric_straggle(g, source.strategy)
    else:
        dx, dy, z = source.samples[g.integers(len(source.samples))]
    return ex + dx, ey + dy, z


def _sample_block(source, geometry, seed, lo, hi) -> np.ndarray:
    out = np.empty((hi - lo, 3, 3))
    centres = geometry.aperture_centres()
    for row, i in enumerate(range(lo, hi)):
        for k in range(3):
            out[row, k] = _draw_ion(stream(seed, i, k), source, geometry, centres[k])
    return out


def sample_triple(source: StraggleSource, geometry: ImplantStrategy, seed: int, index: int) -> DonorTriple:
    """Triple number ``index`` of the population defined by ``seed``.

    One ion per aperture; apertures are centred at x = 0, pitch, 2*pitch.
    """
    seed = _check_seed(seed)
    return DonorTriple.from_array(_sample_block(source, geometry, seed, index, index + 1)[0])


def sample_positions(
    source: StraggleSource,
    geometry: ImplantStrategy,
    seed: int,
    n: int,
    start: int = 0,
    threads: int = 1,
) -> np.ndarray:
    """Positions of triples ``start .. start+n-1`` as an ``(n, 3, 3)`` array.

    Output is identical for every ``threads`` value.
    """
    seed = _check_seed(seed)
    if n < 1:
        raise DomainError(f"need at least one sample, got {n}")
    threads = max(1, int(threads or os.cpu_count() or 1))
    if threads == 1 or n < 2000:
        return _sample_block(source, geometry, seed, start, start + n)
    edges = np.linspace(start, start + n, threads * 4 + 1).astype(int)
    bounds = [(lo, hi) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(
            _sample_block,
            *zip(*[(source, geometry, seed, lo, hi) for lo, hi in bounds]),
        )
        return np.concatenate(list(parts))


def draw_straggle(strategy: ImplantStrategy, seed: int, n: int) -> np.ndarray:
    """``n`` parametric straggle end points ``(dx, dy, z)``, e.g. to build fixtures."""
    seed = _check_seed(seed)
    out = np.empty((n, 3))
    for i in range(n):
        out[i] = _parametric_straggle(stream(seed, i, 0, family=_STRAGGLE_STREAM), strategy)
    return out


_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def parse_srim_range3d(text: str) -> list[StraggleSample]:
    """Parse the ion end points of a SRIM ``RANGE_3D.txt`` file.

    Data rows are ``ion depth lateral_y lateral_z`` in Angstrom; any line
    whose first token is not a number is treated as header. Comma decimal
    marks are accepted. Returns samples in nm with depth as ``z``.
    """
    samples: list[StraggleSample] = []
    first_rejected = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.replace(",", ".").split()
        if not tokens or not _NUMBER.match(tokens[0]):
            if first_rejected is None and line.strip():
                first_rejected = (lineno, line.strip())
            continue
        if len(tokens) < 4:
            raise SRIMFormatError(f"line {lineno}: expected 4 columns, got {len(tokens)}: {line.strip()!r}")
        try:
            depth, lat_y, lat_z = (float(tok) for tok in tokens[1:4])
        except ValueError:
            raise SRIMFormatError(f"line {lineno}: non-numeric field in {line.strip()!r}") from None
        if not all(math.isfinite(v) for v in (depth, lat_y, lat_z)):
            raise SRIMFormatError(f"line {lineno}: non-finite value in {line.strip()!r}")
        samples.append(
            StraggleSample(lat_y / ANGSTROM_PER_NM, lat_z / ANGSTROM_PER_NM, depth / ANGSTROM_PER_NM)
        )
    if not samples:
        if first_rejected is None:
            raise SRIMFormatError("no data rows found (input is empty)")
        lineno, line = first_rejected
        raise SRIMFormatError(f"no data rows found; first rejected line {lineno}: {line!r}")
    return samples


def read_srim_file(path) -> list[StraggleSample]:
    path = Path(path)
    try:
        text = path.read_text(errors="replace")
    except OSError as exc:
        raise SRIMFormatError(f"cannot read SRIM file {path}: {exc.strerror}") from exc
    try:
        return parse_srim_range3d(text)
    except SRIMFormatError as exc:
        raise SRIMFormatError(f"{path}: {exc}") from None


def format_srim_range3d(samples, title: str = "synthetic") -> str:
    """Render straggle samples (nm) as RANGE_3D text in Angstrom."""
    arr = np.asarray(samples, dtype=float).reshape(-1, 3)
    lines = [
        " " + "=" * 60,
        f" ION RANGES ({title})",
        " " + "=" * 60,
        "   Ion     Depth (X)    Lateral (Y)    Lateral (Z)",
        "  Number   (Angstrom)   (Angstrom)     (Angstrom)",
        " -------  -----------  -----------  -----------",
    ]
    for i, (dx, dy, z) in enumerate(arr * ANGSTROM_PER_NM, start=1):
        lines.append(f"{i:07d} {z: .10E} {dx: .10E} {dy: .10E}")
    return "\n".join(lines) + "\n"
