import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from chronoscope.errors import (
    DegenerateDesign,
    InsufficientData,
    MissingCoordinates,
    NonPositiveValue,
)
from chronoscope.gravity import (
    EARTH_RADIUS_KM,
    DistanceSeries,
    GeoPoint,
    StrengthPair,
    distance_strength_series,
    export_geo_links,
    fit_gravity_exponent,
    haversine_km,
    normalized_strengths,
    read_geo_points,
    symmetrize_pairs,
    write_geo_points,
)
from chronoscope.snapshot import YearSnapshot
from oracles import sphere_distance_km

OXFORD = GeoPoint(51.7548, -1.2544)
CAMBRIDGE = GeoPoint(52.2053, 0.1218)


# --- haversine ---

def test_haversine_zero_for_identical_points():
    assert haversine_km(OXFORD, OXFORD) == 0.0


def test_haversine_antipodal_half_circumference():
    d = haversine_km(GeoPoint(0, 0), GeoPoint(0, 180))
    assert d == pytest.approx(math.pi * EARTH_RADIUS_KM, rel=1e-12)


def test_haversine_matches_independent_formula():
    d = haversine_km(OXFORD, CAMBRIDGE)
    expected = sphere_distance_km(51.7548, -1.2544, 52.2053, 0.1218)
    assert d == pytest.approx(expected, rel=1e-6)


coords = st.tuples(
    st.floats(min_value=-89.9, max_value=89.9),
    st.floats(min_value=-179.9, max_value=179.9),
)


@given(a=coords, b=coords)
def test_haversine_symmetric(a, b):
    p, q = GeoPoint(*a), GeoPoint(*b)
    assert haversine_km(p, q) == haversine_km(q, p)


@given(a=coords, b=coords, c=coords)
def test_haversine_triangle_inequality(a, b, c):
    p, q, r = GeoPoint(*a), GeoPoint(*b), GeoPoint(*c)
    assert haversine_km(p, r) <= haversine_km(p, q) + haversine_km(q, r) + 1e-9


def test_geopoint_range_validation():
    with pytest.raises(ValueError):
        GeoPoint(91.0, 0.0)
    with pytest.raises(ValueError):
        GeoPoint(0.0, 181.0)


# --- normalized strengths ---

def geo_for(nodes, seed=0):
    rng = random.Random(seed)
    return {
        n: GeoPoint(50 + 8 * rng.random(), -6 + 7 * rng.random()) for n in nodes
    }


def test_two_node_sigma():
    snap = YearSnapshot(2010, {("a.ac.uk", "b.ac.uk"): 4})
    geo = geo_for(["a.ac.uk", "b.ac.uk"])
    result = normalized_strengths(snap, ["a.ac.uk", "b.ac.uk"], geo)
    assert len(result.pairs) == 1
    pair = result.pairs[0]
    assert pair.normalized_strength == pytest.approx(0.25)
    assert pair.raw_strength == 4
    # the unlinked opposite direction is the one excluded ordered pair
    assert result.excluded_pairs == 1


def test_unlinked_pairs_excluded():
    nodes = ["a.ac.uk", "b.ac.uk", "c.ac.uk"]
    snap = YearSnapshot(2010, {("a.ac.uk", "b.ac.uk"): 1})
    result = normalized_strengths(snap, nodes, geo_for(nodes))
    assert len(result.pairs) == 1
    assert result.excluded_pairs == 6 - 1


def test_sigma_matches_first_principles_recompute():
    rng = random.Random(9)
    nodes = [f"n{i}.ac.uk" for i in range(5)]
    edges = {
        (u, v): rng.randint(1, 20)
        for u in nodes
        for v in nodes
        if u != v and rng.random() < 0.7
    }
    snap = YearSnapshot(2010, edges)
    geo = geo_for(nodes, seed=9)
    result = normalized_strengths(snap, nodes, geo)
    assert len(result.pairs) == len(edges)
    for pair in result.pairs:
        s_out = sum(w for (u, _), w in edges.items() if u == pair.source)
        s_in = sum(w for (_, v), w in edges.items() if v == pair.target)
        expected = edges[(pair.source, pair.target)] / (s_out * s_in)
        assert pair.normalized_strength == pytest.approx(expected, rel=1e-12)
        assert pair.distance_km == haversine_km(geo[pair.source], geo[pair.target])


def test_strengths_use_induced_subgraph_only():
    nodes = ["a.ac.uk", "b.ac.uk"]
    snap = YearSnapshot(
        2010, {("a.ac.uk", "b.ac.uk"): 4, ("a.ac.uk", "x.co.uk"): 1000}
    )
    result = normalized_strengths(snap, nodes, geo_for(nodes))
    assert result.pairs[0].normalized_strength == pytest.approx(0.25)


def test_missing_coordinates():
    snap = YearSnapshot(2010, {("a.ac.uk", "b.ac.uk"): 1})
    with pytest.raises(MissingCoordinates):
        normalized_strengths(snap, ["a.ac.uk", "b.ac.uk"], {"a.ac.uk": OXFORD})


def test_symmetrize_mean():
    pairs = (
        StrengthPair("a.ac.uk", "b.ac.uk", 4, 0.2, 100.0),
        StrengthPair("b.ac.uk", "a.ac.uk", 2, 0.1, 100.0),
        StrengthPair("c.ac.uk", "a.ac.uk", 1, 0.5, 50.0),
    )
    merged = symmetrize_pairs(pairs)
    assert len(merged) == 2
    ab = next(p for p in merged if p.target == "b.ac.uk")
    assert ab.normalized_strength == pytest.approx(0.15)
    assert ab.raw_strength == 6
    ac = next(p for p in merged if p.target == "c.ac.uk")
    assert ac.normalized_strength == pytest.approx(0.5)  # single direction kept


# --- moving-average series ---

def pairs_from(points):
    return tuple(
        StrengthPair(f"s{i}", f"t{i}", 1, sigma, d)
        for i, (d, sigma) in enumerate(points)
    )


def test_series_pairwise_means():
    series = distance_strength_series(
        pairs_from([(1, 1), (2, 3), (3, 5)]), window=2, d_min_km=0
    )
    assert series.points == ((1.5, 2.0), (2.5, 4.0))


def test_series_window_one_is_identity():
    pts = [(5.0, 2.0), (1.0, 1.0), (9.0, 7.0)]
    series = distance_strength_series(pairs_from(pts), window=1, d_min_km=0)
    assert series.points == ((1.0, 1.0), (5.0, 2.0), (9.0, 7.0))


def test_series_distance_floor():
    pts = [(5.0, 1.0), (25.0, 2.0), (30.0, 4.0)]
    series = distance_strength_series(pairs_from(pts), window=1, d_min_km=20)
    assert series.points == ((25.0, 2.0), (30.0, 4.0))
    assert series.n_pairs == 2


def test_series_distance_ceiling():
    pts = [(5.0, 1.0), (25.0, 2.0), (900.0, 4.0)]
    series = distance_strength_series(
        pairs_from(pts), window=1, d_min_km=0, d_max_km=100.0
    )
    assert series.points == ((5.0, 1.0), (25.0, 2.0))


def test_series_insufficient_data():
    with pytest.raises(InsufficientData):
        distance_strength_series(pairs_from([(30.0, 1.0)]), window=2)


@given(
    n=st.integers(min_value=1, max_value=200),
    window=st.integers(min_value=1, max_value=60),
)
def test_series_point_count(n, window):
    rng = random.Random(n * 1000 + window)
    pts = [(20 + 500 * rng.random(), rng.random() + 0.1) for _ in range(n)]
    if n < window:
        with pytest.raises(InsufficientData):
            distance_strength_series(pairs_from(pts), window=window)
    else:
        series = distance_strength_series(pairs_from(pts), window=window)
        assert len(series.points) == n - window + 1


# --- the log-log fit ---

def power_law_series(a=0.3, scale=1.0, n=50):
    ds = np.linspace(30, 800, n)
    return DistanceSeries(
        tuple((float(d), float(scale * d**-a)) for d in ds),
        window=1,
        d_min_km=20.0,
        d_max_km=None,
        n_pairs=n,
    )


def test_fit_exact_power_law():
    fit = fit_gravity_exponent(power_law_series(a=0.3))
    assert fit.exponent == pytest.approx(0.3, abs=1e-9)
    assert fit.std_error == pytest.approx(0.0, abs=1e-12)


def test_fit_noiseless_residuals_tiny():
    series = power_law_series(a=0.77)
    fit = fit_gravity_exponent(series)
    x = np.log(series.distances())
    y = np.log(series.strengths())
    rss = float(np.sum((y - (fit.intercept - fit.exponent * x)) ** 2))
    assert rss < 1e-18


def test_fit_scale_invariance_of_exponent():
    base = fit_gravity_exponent(power_law_series(a=0.3, scale=1.0))
    scaled = fit_gravity_exponent(power_law_series(a=0.3, scale=7.3))
    assert scaled.exponent == pytest.approx(base.exponent, abs=1e-12)
    assert scaled.intercept - base.intercept == pytest.approx(
        math.log(7.3), abs=1e-9
    )


def test_fit_matches_scipy_linregress():
    rng = np.random.default_rng(4)
    d = np.sort(rng.uniform(25, 900, 300))
    sigma = d**-0.4 * np.exp(rng.normal(0, 0.2, 300))
    series = DistanceSeries(
        tuple(zip(d.tolist(), sigma.tolist())), 1, 20.0, None, 300
    )
    fit = fit_gravity_exponent(series)
    ref = stats.linregress(np.log(d), np.log(sigma))
    assert fit.exponent == pytest.approx(-ref.slope, abs=1e-12)
    assert fit.std_error == pytest.approx(ref.stderr, abs=1e-12)
    assert fit.intercept == pytest.approx(ref.intercept, abs=1e-12)


def test_fit_rejects_bad_input():
    with pytest.raises(InsufficientData):
        fit_gravity_exponent(
            DistanceSeries(((1.0, 1.0), (2.0, 0.5)), 1, 0.0, None, 2)
        )
    with pytest.raises(NonPositiveValue):
        fit_gravity_exponent(
            DistanceSeries(((1.0, 1.0), (2.0, 0.0), (3.0, 1.0)), 1, 0.0, None, 3)
        )
    with pytest.raises(DegenerateDesign):
        fit_gravity_exponent(
            DistanceSeries(((2.0, 1.0), (2.0, 0.5), (2.0, 0.2)), 1, 0.0, None, 3)
        )


def test_weight_scaling_leaves_exponent_fixed():
    # snapshot-level version: scaling all weights by c shifts every sigma by
    # 1/c and must not move the fitted exponent
    rng = random.Random(2)
    nodes = [f"n{i:02d}.ac.uk" for i in range(30)]
    geo = geo_for(nodes, seed=2)
    edges = {
        (u, v): rng.randint(1, 50)
        for u in nodes
        for v in nodes
        if u != v and rng.random() < 0.5
    }
    def fitted(snapshot):
        result = normalized_strengths(snapshot, nodes, geo)
        series = distance_strength_series(
            result.pairs, window=50, d_min_km=0
        )
        return fit_gravity_exponent(series)

    base = fitted(YearSnapshot(2010, edges))
    for c in (2, 10, 1000):
        scaled = fitted(YearSnapshot(2010, {k: w * c for k, w in edges.items()}))
        assert abs(scaled.exponent - base.exponent) < 1e-9
        assert scaled.intercept - base.intercept == pytest.approx(
            -math.log(c), abs=1e-9
        )


# --- geographic exports ---

def test_export_geo_links_rows(tmp_path):
    nodes = ["a.ac.uk", "b.ac.uk"]
    geo = geo_for(nodes)
    pairs = (StrengthPair("a.ac.uk", "b.ac.uk", 4, 0.25, 120.0),)
    out = tmp_path / "geo_links.csv"
    export_geo_links(pairs, geo, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "source,target,source_lat,source_lon,target_lat,target_lon,sigma"
    assert len(lines) == 2
    fields = lines[1].split(",")
    assert fields[0] == "a.ac.uk" and float(fields[6]) == 0.25


def test_export_geo_links_empty(tmp_path):
    out = tmp_path / "geo_links.csv"
    export_geo_links((), {}, out)
    assert out.read_text().splitlines() == [
        "source,target,source_lat,source_lon,target_lat,target_lon,sigma"
    ]


def test_export_geo_links_missing_coordinates(tmp_path):
    pairs = (StrengthPair("a.ac.uk", "b.ac.uk", 1, 0.5, 10.0),)
    with pytest.raises(MissingCoordinates):
        export_geo_links(pairs, {"a.ac.uk": OXFORD}, tmp_path / "x.csv")


def test_geo_file_roundtrip(tmp_path):
    geo = {"ox.ac.uk": OXFORD, "cam.ac.uk": CAMBRIDGE}
    path = tmp_path / "geo.tsv"
    write_geo_points(geo, path)
    assert read_geo_points(path) == geo
