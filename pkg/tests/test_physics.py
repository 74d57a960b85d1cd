import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctapyield.physics import (
    HBAR_MEV_NS,
    DonorTriple,
    MaterialParams,
    Position3D,
    pair_distances,
    pair_distances_array,
    to_angular,
    tunnel_coupling,
)

# 4*40*(20/3)*exp(-23/3) at 40 digits (mpmath)
W_20NM_DEFAULT = 0.4993875324296288325090212952364713020078


def triple(*pts):
    return DonorTriple(*(Position3D(*p) for p in pts))


@pytest.mark.parametrize(
    "pts, expected",
    [
        (((0, 0, 0), (20, 0, 0), (40, 0, 0)), (20, 20, 40)),
        (((1, 2, 3), (1, 2, 3), (1, 2, 3)), (0, 0, 0)),
        (((0, 0, 0), (3, 4, 0), (3, 4, 12)), (5, 12, 13)),
    ],
)
def test_pair_distances(pts, expected):
    assert pair_distances(triple(*pts)) == pytest.approx(expected, abs=1e-12)


def test_pair_distances_array_matches_scalar(rng):
    pos = rng.normal(size=(50, 3, 3)) * 10
    d12, d23, d13 = pair_distances_array(pos)
    for i in range(50):
        assert (d12[i], d23[i], d13[i]) == pytest.approx(pair_distances(DonorTriple.from_array(pos[i])))


def test_material_defaults_and_fixed_hbar():
    p = MaterialParams()
    assert (p.bohr_radius, p.hartree, p.hbar) == (3.0, 40.0, 6.58212e-4)
    with pytest.raises(TypeError):
        MaterialParams(hbar=1.0)
    with pytest.raises(ValueError):
        MaterialParams(bohr_radius=0.0)
    with pytest.raises(ValueError):
        MaterialParams(hartree=-1.0)


def test_position_rejects_nonfinite():
    with pytest.raises(ValueError):
        Position3D(0.0, math.nan, 1.0)


def test_to_angular():
    assert to_angular(HBAR_MEV_NS) == 1.0


def test_coupling_peak_value_at_bohr_radius():
    p = MaterialParams()
    assert tunnel_coupling(p.bohr_radius, p) == pytest.approx(4 * p.hartree * math.exp(-2), rel=1e-15)


def test_coupling_zero_at_origin():
    assert tunnel_coupling(0.0) == 0.0


def test_coupling_reference_value():
    # the brief quotes ~0.4979 meV; direct evaluation of the formula gives 0.49939
    assert tunnel_coupling(20.0, MaterialParams(3.0, 40.0)) == pytest.approx(W_20NM_DEFAULT, rel=1e-14)


def test_coupling_vanishes_at_large_distance():
    assert tunnel_coupling(1e4) < 1e-300


def test_coupling_accepts_arrays():
    d = np.array([0.0, 3.0, 20.0])
    w = tunnel_coupling(d)
    assert isinstance(w, np.ndarray) and w.shape == (3,)
    assert w[2] == pytest.approx(W_20NM_DEFAULT, rel=1e-14)


positive = st.floats(0.5, 20.0)


@given(a=positive, e=positive)
@settings(max_examples=50, deadline=None)
def test_coupling_maximised_at_bohr_radius(a, e):
    p = MaterialParams(a, e)
    grid = np.linspace(0, 10 * a, 10001)  # grid contains d = a exactly
    w = tunnel_coupling(grid, p)
    assert grid[np.argmax(w)] == pytest.approx(a, rel=1e-12)


@given(a=positive, e=positive)
@settings(max_examples=50, deadline=None)
def test_coupling_decreasing_beyond_bohr_radius(a, e):
    p = MaterialParams(a, e)
    grid = np.linspace(a * 1.001, 20 * a, 2000)
    assert np.all(np.diff(tunnel_coupling(grid, p)) < 0)


coord = st.floats(-100, 100, allow_nan=False)


@given(st.lists(coord, min_size=9, max_size=9))
def test_triangle_inequality(xs):
    d12, d23, d13 = pair_distances(DonorTriple.from_array(xs))
    assert d13 <= d12 + d23 + 1e-9
