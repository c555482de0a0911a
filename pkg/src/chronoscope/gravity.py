"""Distance decay of hyperlink strength: the spatial-interaction analysis.

For every ordered pair of linked nodes, the raw strength (edge weight) is
normalized by sender out-strength and receiver in-strength,
``sigma = S_ij / (S_i_out * S_j_in)``, which corrects for node size and
linking propensity.  The normalized strengths are smoothed with a moving
average over distance and fitted with ordinary least squares in log-log
space to estimate the decay exponent of ``sigma ~ d^-a``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateDesign,
    InsufficientData,
    MalformedLine,
    MissingCoordinates,
    NonPositiveValue,
)
from .snapshot import YearSnapshot

EARTH_RADIUS_KM = 6371.0088

DEFAULT_WINDOW = 500
DEFAULT_D_MIN_KM = 20.0

SYMMETRIZE_NONE = "none"
SYMMETRIZE_MEAN = "mean"


@dataclass(frozen=True)
class GeoPoint:
    latitude: float
    longitude: float

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} out of range")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} out of range")


def haversine_km(p: GeoPoint, q: GeoPoint) -> float:
    """Great-circle distance in km on a sphere of radius 6371.0088 km."""
    phi1 = math.radians(p.latitude)
    phi2 = math.radians(q.latitude)
    dphi = math.radians(q.latitude - p.latitude)
    dlam = math.radians(q.longitude - p.longitude)
    a = (
        math.sin(dphi / 2.0) ** 2
        + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    )
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))


@dataclass(frozen=True)
class StrengthPair:
    """One directed linked pair with its normalized strength and distance."""

    source: str
    target: str
    raw_strength: int
    normalized_strength: float
    distance_km: float


@dataclass(frozen=True)
class StrengthPairSet:
    """Normalized strengths of an induced subgraph.

    ``excluded_pairs`` counts the ordered node pairs that produced no entry
    because no link exists between them (a linked pair always has positive
    sender out-strength and receiver in-strength).
    """

    pairs: tuple[StrengthPair, ...]
    excluded_pairs: int


def normalized_strengths(
    snapshot: YearSnapshot,
    nodes: Iterable[str],
    geo: Mapping[str, GeoPoint],
) -> StrengthPairSet:
    """Normalize every linked ordered pair of the induced subgraph.

    Strength sums are taken within the induced subgraph, so the analysis
    population is self-contained.  Every node of the filter needs an entry
    in ``geo``.
    """
    node_list = sorted(set(nodes))
    missing = [n for n in node_list if n not in geo]
    if missing:
        raise MissingCoordinates(f"no coordinates for {missing[:5]}")
    keep = set(node_list)
    s_out: dict[str, int] = {}
    s_in: dict[str, int] = {}
    induced: dict[tuple[str, str], int] = {}
    for (src, tgt), weight in snapshot.edges.items():
        if src in keep and tgt in keep:
            induced[(src, tgt)] = weight
            s_out[src] = s_out.get(src, 0) + weight
            s_in[tgt] = s_in.get(tgt, 0) + weight
    pairs = []
    for (src, tgt) in sorted(induced):
        weight = induced[(src, tgt)]
        sigma = weight / (s_out[src] * s_in[tgt])
        pairs.append(
            StrengthPair(
                src, tgt, weight, sigma, haversine_km(geo[src], geo[tgt])
            )
        )
    n = len(node_list)
    return StrengthPairSet(tuple(pairs), n * (n - 1) - len(pairs))


def symmetrize_pairs(pairs: Sequence[StrengthPair]) -> tuple[StrengthPair, ...]:
    """Average the two directions of each linked pair into one entry.

    The entry is keyed with endpoints in lexicographic order; raw strengths
    add, normalized strengths average over the directions present.
    """
    grouped: dict[tuple[str, str], list[StrengthPair]] = {}
    for pair in pairs:
        key = (min(pair.source, pair.target), max(pair.source, pair.target))
        grouped.setdefault(key, []).append(pair)
    out = []
    for (a, b) in sorted(grouped):
        members = grouped[(a, b)]
        out.append(
            StrengthPair(
                a,
                b,
                sum(p.raw_strength for p in members),
                sum(p.normalized_strength for p in members) / len(members),
                members[0].distance_km,
            )
        )
    return tuple(out)


@dataclass(frozen=True)
class DistanceSeries:
    """Moving-average of (distance, sigma) points, sorted by distance."""

    points: tuple[tuple[float, float], ...]
    window: int
    d_min_km: float
    d_max_km: float | None
    n_pairs: int

    def distances(self) -> np.ndarray:
        return np.array([d for d, _ in self.points])

    def strengths(self) -> np.ndarray:
        return np.array([s for _, s in self.points])


def distance_strength_series(
    pairs: Sequence[StrengthPair],
    window: int = DEFAULT_WINDOW,
    d_min_km: float = DEFAULT_D_MIN_KM,
    d_max_km: float | None = None,
) -> DistanceSeries:
    """Slide a mean window of ``window`` points over distance-sorted pairs.

    Pairs closer than ``d_min_km`` (and, when set, farther than
    ``d_max_km``) are dropped before windowing.  A window of 1 reproduces
    the raw points, which is how the unsmoothed fit variant is expressed.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    kept = [
        p
        for p in pairs
        if p.distance_km >= d_min_km
        and (d_max_km is None or p.distance_km <= d_max_km)
    ]
    if len(kept) < window or not kept:
        raise InsufficientData(
            f"{len(kept)} pairs after distance filtering, window is {window}"
        )
    kept.sort(key=lambda p: (p.distance_km, p.source, p.target))
    d = np.array([p.distance_km for p in kept])
    s = np.array([p.normalized_strength for p in kept])
    kernel = np.ones(window) / window
    mean_d = np.convolve(d, kernel, mode="valid")
    mean_s = np.convolve(s, kernel, mode="valid")
    points = tuple(zip(mean_d.tolist(), mean_s.tolist()))
    return DistanceSeries(points, window, d_min_km, d_max_km, len(kept))


@dataclass(frozen=True)
class GravityFit:
    """Result of the log-log least-squares fit of sigma against distance.

    ``exponent`` is the decay exponent a in ``sigma ~ d^-a`` (the negated
    slope); ``std_error`` is the classical OLS standard error of the slope.
    ``d_min_km``/``d_max_km`` record the distance range of the fitted
    points.
    """

    exponent: float
    std_error: float
    intercept: float
    n_points: int
    window: int
    d_min_km: float
    d_max_km: float


def fit_gravity_exponent(series: DistanceSeries) -> GravityFit:
    """Ordinary least squares of ln(sigma) on ln(distance)."""
    if len(series.points) < 3:
        raise InsufficientData(f"{len(series.points)} series points, need >= 3")
    d = series.distances()
    s = series.strengths()
    if np.any(d <= 0) or np.any(s <= 0):
        raise NonPositiveValue("log fit needs strictly positive values")
    x = np.log(d)
    y = np.log(s)
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DegenerateDesign("all distances equal; slope undefined")
    slope = float(dx @ (y - ym)) / sxx
    intercept = ym - slope * xm
    residuals = y - (intercept + slope * x)
    rss = float(residuals @ residuals)
    dof = len(x) - 2
    std_error = math.sqrt(rss / dof / sxx)
    return GravityFit(
        exponent=-slope,
        std_error=std_error,
        intercept=intercept,
        n_points=len(series.points),
        window=series.window,
        d_min_km=series.d_min_km,
        d_max_km=float(d.max()),
    )


# --- file formats ---

def read_geo_points(path) -> dict[str, GeoPoint]:
    """Read ``third_level_domain<TAB>lat_degrees<TAB>lon_degrees`` lines."""
    geo: dict[str, GeoPoint] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise MalformedLine(f"{path}:{lineno}: expected 3 fields")
            try:
                point = GeoPoint(float(parts[1]), float(parts[2]))
            except ValueError as exc:
                raise MalformedLine(f"{path}:{lineno}: {exc}") from None
            geo[parts[0]] = point
    return geo


def write_geo_points(geo: Mapping[str, GeoPoint], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for node in sorted(geo):
            point = geo[node]
            fh.write(f"{node}\t{point.latitude!r}\t{point.longitude!r}\n")


def export_geo_links(
    pairs: Sequence[StrengthPair], geo: Mapping[str, GeoPoint], path
) -> None:
    """Emit ``geo_links_<year>.csv``: one plot-ready row per pair."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "source",
                "target",
                "source_lat",
                "source_lon",
                "target_lat",
                "target_lon",
                "sigma",
            ]
        )
        for pair in pairs:
            if pair.source not in geo or pair.target not in geo:
                raise MissingCoordinates(f"{pair.source} or {pair.target}")
            p, q = geo[pair.source], geo[pair.target]
            writer.writerow(
                [
                    pair.source,
                    pair.target,
                    repr(p.latitude),
                    repr(p.longitude),
                    repr(q.latitude),
                    repr(q.longitude),
                    repr(pair.normalized_strength),
                ]
            )


def write_gravity_series(series: DistanceSeries, path) -> None:
    """Emit ``gravity_series_<year>.csv``: mean_d_km,mean_sigma."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["mean_d_km", "mean_sigma"])
        for d, s in series.points:
            writer.writerow([repr(d), repr(s)])


def write_gravity_fit(fit: GravityFit, path) -> None:
    """Emit ``gravity_fit_<year>.csv``: a,std_error,n_points,window,d_min."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["a", "std_error", "n_points", "window", "d_min"])
        writer.writerow(
            [
                repr(fit.exponent),
                repr(fit.std_error),
                fit.n_points,
                fit.window,
                repr(fit.d_min_km),
            ]
        )
