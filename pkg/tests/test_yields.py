import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctapyield.errors import DomainError
from ctapyield.implant import ParametricSource, sample_positions
from ctapyield.physics import DonorTriple, MaterialParams, Position3D
from ctapyield.yields import YieldReport, cdf_at, empirical_cdf, evaluate_population, nearest_rank

IDEAL_TMAX = 0.1035185026368291294  # ns, d = 20 nm, defaults, A = 0.01


def test_cdf_single_value():
    assert empirical_cdf([5]) == [(5.0, 1.0)]


def test_cdf_with_ties():
    assert empirical_cdf([1, 2, 2, 4]) == [(1.0, 0.25), (2.0, 0.75), (4.0, 1.0)]


def test_cdf_empty():
    with pytest.raises(DomainError):
        empirical_cdf([])


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=200))
def test_cdf_properties(values):
    cdf = empirical_cdf(values)
    xs, fs = zip(*cdf)
    assert all(b > a for a, b in zip(xs, xs[1:]))
    assert all(b > a for a, b in zip(fs, fs[1:]))
    assert fs[-1] == 1.0
    assert cdf_at(cdf, math.inf) == 1.0
    assert cdf_at(cdf, min(values) - 1) == 0.0
    for x in values[:10]:
        assert cdf_at(cdf, x) == pytest.approx(sum(v <= x for v in values) / len(values))


def test_nearest_rank():
    v = np.arange(1, 101, dtype=float)
    assert [nearest_rank(v, p) for p in (1, 5, 50, 99)] == [1, 5, 50, 99]
    assert nearest_rank(np.array([3.0]), 1) == 3.0


def ideal_population(n=10):
    t = DonorTriple(Position3D(0, 0, 20), Position3D(20, 0, 20), Position3D(40, 0, 20))
    return [t] * n


@pytest.mark.parametrize("threshold, expected", [(0.1, 0.0), (0.11, 1.0), (1.0, 1.0)])
def test_ideal_population_is_a_step(threshold, expected):
    rep = evaluate_population(ideal_population(), MaterialParams(), 0.01, threshold)
    assert rep.yield_fraction == expected
    assert rep.cdf == [(pytest.approx(IDEAL_TMAX, rel=1e-12), 1.0)]
    assert rep.j_below_one_fraction == 1.0
    assert rep.too_close_fraction == 0.0


def test_input_validation():
    with pytest.raises(DomainError):
        evaluate_population([])
    with pytest.raises(DomainError):
        evaluate_population(ideal_population(), a_target=1.0)
    with pytest.raises(DomainError):
        evaluate_population(ideal_population(), threshold=0.0)


@pytest.fixture(scope="module")
def small_population(presets):
    s = presets["P14keV"]
    return sample_positions(ParametricSource(s), s, seed=123, n=20_000)


def test_yield_equals_cdf_at_threshold(small_population):
    for thr in (0.01, 0.3, 1.0, 7.0):
        rep = evaluate_population(small_population, threshold=thr)
        assert rep.yield_fraction == cdf_at(rep.cdf, thr)


def test_yield_antitone_in_adiabaticity(small_population):
    ys = [evaluate_population(small_population, a_target=a).yield_fraction for a in (0.005, 0.01, 0.02)]
    assert ys[0] <= ys[1] <= ys[2]


def test_yield_monotone_in_threshold(small_population):
    ys = [evaluate_population(small_population, threshold=t).yield_fraction for t in (0.1, 0.5, 1, 2, 10)]
    assert all(b >= a for a, b in zip(ys, ys[1:]))


def test_permutation_invariance(small_population, rng):
    a = evaluate_population(small_population)
    b = evaluate_population(small_population[rng.permutation(len(small_population))])
    assert a == b


def test_list_and_array_inputs_agree(small_population):
    triples = [DonorTriple.from_array(p) for p in small_population[:500]]
    assert evaluate_population(triples) == evaluate_population(small_population[:500])


def test_too_close_counted_not_excluded():
    close = DonorTriple(Position3D(0, 0, 20), Position3D(4, 0, 20), Position3D(24, 0, 20))
    rep = evaluate_population([close] + ideal_population(3), threshold=1.0)
    assert rep.too_close_fraction == 0.25
    assert rep.n_samples == 4


def test_sample_extension_is_stable(presets, small_population):
    s = presets["P14keV"]
    more = np.concatenate([small_population, sample_positions(ParametricSource(s), s, 123, 20_000, start=20_000)])
    y1 = evaluate_population(small_population).yield_fraction
    y2 = evaluate_population(more).yield_fraction
    se = math.sqrt(y1 * (1 - y1) / len(small_population))
    assert abs(y2 - y1) < 3 * se


def test_report_serialisation(tmp_path):
    rep = evaluate_population(ideal_population(4) + [
        DonorTriple(Position3D(0, 0, 20), Position3D(22, 1, 18), Position3D(41, -2, 25))
    ])
    doc = json.loads(rep.write_json(tmp_path / "r.json").read_text())
    assert list(doc) == [
        "n_samples", "adiabaticity_target", "threshold", "yield_fraction",
        "j_below_one_fraction", "j_below_tenth_fraction", "too_close_fraction",
        "tmax_percentiles", "cdf",
    ]
    assert list(doc["tmax_percentiles"]) == ["1", "5", "25", "50", "75", "95", "99"]
    csv = rep.write_cdf_csv(tmp_path / "c.csv").read_text()
    lines = csv.split("\n")
    assert lines[0] == "tmax_ns,fraction" and lines[-1] == ""
    assert lines[-2].endswith(",1")
    assert len(lines) == 2 + len(rep.cdf)
    assert isinstance(rep, YieldReport)
