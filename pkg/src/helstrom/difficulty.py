"""Heterogeneous distances and nearest-neighbour difficulty profiling.

Distances follow the HVDM recipe: numeric attributes contribute
``|x - y| / (4 sigma)`` clipped to [0, 1] (``sigma`` is the population
standard deviation of the attribute over the whole dataset), categorical
attributes contribute the normalised value-difference between the two
values' class-conditional distributions, and a missing value on either
side contributes the maximum 1. The squared components add and the total
is the square root.

A point's difficulty type counts how many of its 5 nearest neighbours
(HVDM, the point itself excluded, distance ties broken by smaller index)
share its class: 5 or 4 is ``safe``, 3 or 2 ``borderline``, 1 ``rare``,
0 ``outlier``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import RawSample
from .errors import StatsMismatchError, TooFewSamplesError

__all__ = [
    "POINT_TYPES",
    "AttributeStats",
    "DifficultyProfile",
    "hvdm_distance",
    "hvdm_matrix",
    "classify_point_type",
    "point_types",
    "categorize",
]

POINT_TYPES = ("safe", "borderline", "rare", "outlier")

NEIGHBOUR_COUNT = 5


def _type_from_same(same: int, neighbours: int) -> str:
    """Map a same-class neighbour count to a difficulty type.

    For the standard 5 neighbours: 5 or 4 safe, 3 or 2 borderline,
    1 rare, 0 outlier. Other neighbour counts use the same fractions.
    """
    fraction = same / neighbours
    if fraction >= 0.8:
        return "safe"
    if fraction >= 0.4:
        return "borderline"
    if fraction >= 0.2:
        return "rare"
    return "outlier"


def _features_of(x: RawSample | Sequence[float] | np.ndarray) -> np.ndarray:
    if isinstance(x, RawSample):
        return x.features
    return np.asarray(x, dtype=float).reshape(-1)


@dataclass(frozen=True)
class AttributeStats:
    """Per-attribute statistics fitted on one dataset.

    ``means``/``stds`` hold population statistics of the numeric
    attributes (entries for categorical attributes are 0 placeholders).
    ``value_tables[j][v]`` is the class-conditional distribution
    ``(P(class 0 | v), P(class 1 | v))`` of value ``v`` in categorical
    attribute ``j``.
    """

    means: np.ndarray
    stds: np.ndarray
    categorical: frozenset[int]
    value_tables: Mapping[int, Mapping[float, tuple[float, float]]]

    def __post_init__(self) -> None:
        means = np.asarray(self.means, dtype=float).reshape(-1)
        stds = np.asarray(self.stds, dtype=float).reshape(-1)
        if means.size != stds.size:
            raise StatsMismatchError("means and stds must be equally long")
        if np.any(stds < 0.0):
            raise ValueError("standard deviations must be non-negative")
        cat = frozenset(int(j) for j in self.categorical)
        if cat and (min(cat) < 0 or max(cat) >= means.size):
            raise StatsMismatchError("categorical index out of range")
        if set(self.value_tables) - cat:
            raise StatsMismatchError("value table for a non-categorical attribute")
        means.setflags(write=False)
        stds.setflags(write=False)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "stds", stds)
        object.__setattr__(self, "categorical", cat)

    @property
    def n_attributes(self) -> int:
        return self.means.size

    @classmethod
    def fit(cls, features: np.ndarray, labels: Sequence[int],
            categorical: Iterable[int] = ()) -> "AttributeStats":
        """Fit statistics on a feature matrix with NaN marking missing."""
        f = np.asarray(features, dtype=float)
        if f.ndim != 2:
            raise ValueError(f"features must be 2-d, got shape {f.shape}")
        y = np.asarray(labels, dtype=int).reshape(-1)
        if y.size != f.shape[0]:
            raise StatsMismatchError("one label per feature row required")
        cat = frozenset(int(j) for j in categorical)
        means = np.zeros(f.shape[1])
        stds = np.zeros(f.shape[1])
        tables: dict[int, dict[float, tuple[float, float]]] = {}
        for j in range(f.shape[1]):
            col = f[:, j]
            present = ~np.isnan(col)
            if j in cat:
                table: dict[float, tuple[float, float]] = {}
                for v in np.unique(col[present]):
                    mask = present & (col == v)
                    n0 = int(np.sum(mask & (y == 0)))
                    n1 = int(np.sum(mask & (y == 1)))
                    total = n0 + n1
                    table[float(v)] = (n0 / total, n1 / total)
                tables[j] = table
            elif present.any():
                means[j] = float(col[present].mean())
                stds[j] = float(col[present].std())  # population sigma
        return cls(means=means, stds=stds, categorical=cat, value_tables=tables)


def _numeric_component(x: float, y: float, sigma: float) -> float:
    if np.isnan(x) or np.isnan(y):
        return 1.0
    if sigma == 0.0:
        return 0.0 if x == y else 1.0
    return min(abs(x - y) / (4.0 * sigma), 1.0)


def _categorical_component(x: float, y: float,
                           table: Mapping[float, tuple[float, float]]) -> float:
    if np.isnan(x) or np.isnan(y):
        return 1.0
    px = table.get(float(x))
    py = table.get(float(y))
    if px is None or py is None:
        # A value never seen at fit time carries no distribution; score it
        # like a missing value.
        return 1.0
    d = np.sqrt((px[0] - py[0]) ** 2 + (px[1] - py[1]) ** 2)
    return min(float(d), 1.0)


def hvdm_distance(x: RawSample | np.ndarray, y: RawSample | np.ndarray,
                  stats: AttributeStats) -> float:
    """HVDM distance between two points under fitted statistics.

    Symmetric, zero for identical fully-observed points, and each
    attribute contributes at most 1, so the distance is bounded by
    ``sqrt(n_attributes)``.
    """
    xf = _features_of(x)
    yf = _features_of(y)
    if xf.size != stats.n_attributes or yf.size != stats.n_attributes:
        raise StatsMismatchError(
            f"points have {xf.size} and {yf.size} attributes, "
            f"stats were fitted on {stats.n_attributes}"
        )
    total = 0.0
    for j in range(stats.n_attributes):
        if j in stats.categorical:
            comp = _categorical_component(xf[j], yf[j], stats.value_tables[j])
        else:
            comp = _numeric_component(xf[j], yf[j], float(stats.stds[j]))
        total += comp * comp
    return float(np.sqrt(total))


def hvdm_matrix(features: np.ndarray, stats: AttributeStats) -> np.ndarray:
    """All pairwise HVDM distances of a feature matrix, vectorised.

    Matches :func:`hvdm_distance` entrywise; NaN entries behave as
    missing values (component 1 against everything).
    """
    f = np.asarray(features, dtype=float)
    if f.ndim != 2 or f.shape[1] != stats.n_attributes:
        raise StatsMismatchError(
            f"feature matrix shape {f.shape} does not match "
            f"{stats.n_attributes} fitted attributes"
        )
    n = f.shape[0]
    total = np.zeros((n, n))
    for j in range(stats.n_attributes):
        col = f[:, j]
        missing = np.isnan(col)
        if j in stats.categorical:
            table = stats.value_tables[j]
            probs = np.zeros((n, 2))
            known = np.zeros(n, dtype=bool)
            for i, v in enumerate(col):
                if not missing[i] and float(v) in table:
                    probs[i] = table[float(v)]
                    known[i] = True
            diff0 = probs[:, 0][:, None] - probs[:, 0][None, :]
            diff1 = probs[:, 1][:, None] - probs[:, 1][None, :]
            comp = np.minimum(np.sqrt(diff0**2 + diff1**2), 1.0)
            unknown = ~known
            comp[unknown, :] = 1.0
            comp[:, unknown] = 1.0
        else:
            sigma = float(stats.stds[j])
            if sigma == 0.0:
                comp = (col[:, None] != col[None, :]).astype(float)
            else:
                comp = np.minimum(np.abs(col[:, None] - col[None, :]) / (4.0 * sigma), 1.0)
        comp[missing, :] = 1.0
        comp[:, missing] = 1.0
        total += comp * comp
    return np.sqrt(total)


def _neighbour_order(distances: np.ndarray, index: int) -> np.ndarray:
    """Indices sorted by (distance to ``index``, index), self excluded."""
    order = np.lexsort((np.arange(distances.size), distances))
    return order[order != index]


def classify_point_type(index: int, features: np.ndarray,
                        labels: Sequence[int], stats: AttributeStats | None = None,
                        neighbours: int = NEIGHBOUR_COUNT) -> str:
    """Difficulty type of one point from its nearest neighbours' classes."""
    f = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=int).reshape(-1)
    if f.shape[0] != y.size:
        raise StatsMismatchError("one label per feature row required")
    if f.shape[0] < neighbours + 1:
        raise TooFewSamplesError(
            f"need at least {neighbours + 1} points, got {f.shape[0]}"
        )
    if not 0 <= index < f.shape[0]:
        raise IndexError(f"point index {index} out of range")
    if stats is None:
        stats = AttributeStats.fit(f, y)
    row = np.array([hvdm_distance(f[index], f[i], stats) for i in range(f.shape[0])])
    nearest = _neighbour_order(row, index)[:neighbours]
    same = int(np.sum(y[nearest] == y[index]))
    return _type_from_same(same, neighbours)


def point_types(features: np.ndarray, labels: Sequence[int],
                stats: AttributeStats | None = None,
                neighbours: int = NEIGHBOUR_COUNT) -> np.ndarray:
    """Difficulty type of every point, via one pairwise distance matrix."""
    f = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=int).reshape(-1)
    if f.shape[0] != y.size:
        raise StatsMismatchError("one label per feature row required")
    if f.shape[0] < neighbours + 1:
        raise TooFewSamplesError(
            f"need at least {neighbours + 1} points, got {f.shape[0]}"
        )
    if stats is None:
        stats = AttributeStats.fit(f, y)
    dist = hvdm_matrix(f, stats)
    out = np.empty(f.shape[0], dtype=object)
    for i in range(f.shape[0]):
        nearest = _neighbour_order(dist[i], i)[:neighbours]
        same = int(np.sum(y[nearest] == y[i]))
        out[i] = _type_from_same(same, neighbours)
    return out


@dataclass(frozen=True)
class DifficultyProfile:
    """Percentage of points in each difficulty type; sums to 100."""

    safe_pct: float
    borderline_pct: float
    rare_pct: float
    outlier_pct: float

    def __post_init__(self) -> None:
        values = self.as_tuple()
        if any(not 0.0 <= v <= 100.0 for v in values):
            raise ValueError(f"percentages must lie in [0, 100], got {values}")
        if abs(sum(values) - 100.0) > 0.1:
            raise ValueError(f"percentages must sum to 100, got {sum(values)!r}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.safe_pct, self.borderline_pct, self.rare_pct, self.outlier_pct)

    @classmethod
    def from_types(cls, types: Sequence[str]) -> "DifficultyProfile":
        arr = list(types)
        if not arr:
            raise TooFewSamplesError("cannot profile an empty type list")
        n = len(arr)
        counts = {t: 0 for t in POINT_TYPES}
        for t in arr:
            counts[t] += 1  # KeyError on unknown type is deliberate
        return cls(
            safe_pct=100.0 * counts["safe"] / n,
            borderline_pct=100.0 * counts["borderline"] / n,
            rare_pct=100.0 * counts["rare"] / n,
            outlier_pct=100.0 * counts["outlier"] / n,
        )


def categorize(features: np.ndarray, labels: Sequence[int],
               categorical: Iterable[int] = (),
               neighbours: int = NEIGHBOUR_COUNT,
               ) -> tuple[DifficultyProfile, np.ndarray]:
    """Fit statistics, type every point, and summarise the dataset.

    Returns the profile and the per-point type array in row order.
    """
    f = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=int).reshape(-1)
    stats = AttributeStats.fit(f, y, categorical)
    types = point_types(f, y, stats, neighbours)
    return DifficultyProfile.from_types(list(types)), types
