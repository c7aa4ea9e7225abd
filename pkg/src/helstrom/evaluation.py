"""Stratified cross-validation, F1 scoring, and the copy-count sweep."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classifier import (
    CLASSIFIER_IDS,
    FID,
    HQCS,
    build_overlap_cache,
    predict_labels,
    score_both,
)
from .core import BinaryDataset, check_copy_count
from .errors import (
    EmptyInputError,
    InvalidGridError,
    LengthMismatchError,
    TooFewPointsError,
    TooFewSamplesError,
)

__all__ = [
    "FoldPlan",
    "SweepResult",
    "stratified_kfold",
    "f1_score",
    "cross_validate",
    "fold_scores",
    "sweep_k",
    "make_grid",
    "nonmonotonicity_check",
]


@dataclass(frozen=True)
class FoldPlan:
    """Fold assignment for every sample of a dataset, in canonical order.

    ``assignments[i]`` is the fold of sample ``i`` in the dataset's
    class0-then-class1 ordering. Every fold is non-empty and the class
    proportions of each fold match the dataset's to within one sample
    per class (guaranteed by construction in :func:`stratified_kfold`).
    """

    fold_count: int
    seed: int
    assignments: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.assignments, dtype=int)
        if self.fold_count < 2:
            raise TooFewSamplesError(f"need at least 2 folds, got {self.fold_count}")
        if arr.ndim != 1 or arr.size < self.fold_count:
            raise TooFewSamplesError("fewer samples than folds")
        present = np.unique(arr)
        if present.min() < 0 or present.max() >= self.fold_count:
            raise ValueError("fold labels out of range")
        if present.size != self.fold_count:
            raise ValueError("every fold must receive at least one sample")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "assignments", arr)

    @property
    def size(self) -> int:
        return self.assignments.size

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)


def stratified_kfold(dataset: BinaryDataset, folds: int = 5,
                     seed: int = 42) -> FoldPlan:
    """Deal each class independently into folds after a seeded shuffle.

    Within a class the shuffled samples go to folds 0, 1, 2, ... round
    robin, so per-fold class counts differ by at most one sample from an
    exact split. Both shuffles come from one generator seeded with
    ``seed``, so the plan is a pure function of (dataset sizes, folds,
    seed).
    """
    if folds < 2:
        raise TooFewSamplesError(f"need at least 2 folds, got {folds}")
    if dataset.m_a < folds or dataset.m_b < folds:
        raise TooFewSamplesError(
            f"each class needs at least {folds} samples, got "
            f"{dataset.m_a} and {dataset.m_b}"
        )
    rng = np.random.default_rng(seed)
    assignments = np.empty(dataset.size, dtype=int)
    offset = 0
    for count in (dataset.m_a, dataset.m_b):
        order = rng.permutation(count)
        assignments[offset + order] = np.arange(count) % folds
        offset += count
    return FoldPlan(fold_count=folds, seed=seed, assignments=assignments)


def f1_score(y_true: Sequence[int], y_pred: Sequence[int], positive: int = 0) -> float:
    """Harmonic mean of precision and recall for the positive class.

    Defined as 0 when there are neither predicted nor actual positives,
    and 0 whenever precision + recall is 0.
    """
    t = np.asarray(y_true, dtype=int).reshape(-1)
    p = np.asarray(y_pred, dtype=int).reshape(-1)
    if t.size != p.size:
        raise LengthMismatchError(f"y_true has {t.size} entries, y_pred has {p.size}")
    if t.size == 0:
        raise EmptyInputError("F1 over zero samples is undefined")
    tp = int(np.sum((t == positive) & (p == positive)))
    fp = int(np.sum((t != positive) & (p == positive)))
    fn = int(np.sum((t == positive) & (p != positive)))
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 0.0
    return 2.0 * tp / denom


def _split_fold(dataset: BinaryDataset, plan: FoldPlan, fold: int):
    """Training dataset, held-out samples, held-out labels for one fold."""
    samples = dataset.samples
    labels = dataset.labels()
    test_idx = plan.test_indices(fold)
    train_idx = plan.train_indices(fold)
    train = BinaryDataset.from_samples(samples[i] for i in train_idx)
    test = [samples[i] for i in test_idx]
    return train, test, labels[test_idx], test_idx


def fold_scores(dataset: BinaryDataset, plan: FoldPlan, k: float):
    """Out-of-fold FID and HQCS scores for every sample, plus skip count.

    Each sample is scored by the model trained on the other folds.
    Returns ``(fid, hqcs, skipped)`` where the score arrays follow the
    dataset's canonical sample order.
    """
    if plan.size != dataset.size:
        raise LengthMismatchError("fold plan does not match the dataset size")
    k = check_copy_count(k)
    fid = np.empty(dataset.size)
    hqcs = np.empty(dataset.size)
    skipped = 0
    for fold in range(plan.fold_count):
        train, test, _, test_idx = _split_fold(dataset, plan, fold)
        cache = build_overlap_cache(test, train)
        fid_f, hqcs_f, skip_f = score_both(cache, k)
        fid[test_idx] = fid_f
        hqcs[test_idx] = hqcs_f
        skipped += skip_f
    return fid, hqcs, skipped


def cross_validate(dataset: BinaryDataset, classifier_id: str, k: float,
                   plan: FoldPlan, positive: int = 0) -> tuple[float, list[float]]:
    """Mean and per-fold F1 of one classifier under a fold plan."""
    if classifier_id not in CLASSIFIER_IDS:
        raise ValueError(f"unknown classifier id {classifier_id!r}")
    if plan.size != dataset.size:
        raise LengthMismatchError("fold plan does not match the dataset size")
    k = check_copy_count(k)
    per_fold: list[float] = []
    for fold in range(plan.fold_count):
        train, test, y_true, _ = _split_fold(dataset, plan, fold)
        cache = build_overlap_cache(test, train)
        fid_f, hqcs_f, _ = score_both(cache, k)
        scores = hqcs_f if classifier_id == HQCS else fid_f
        per_fold.append(f1_score(y_true, predict_labels(scores), positive))
    return float(np.mean(per_fold)), per_fold


def make_grid(k_min: float, k_max: float, step: float) -> np.ndarray:
    """Ascending grid ``k_min, k_min + step, ...`` up to and including k_max.

    The point count is computed once from the endpoints so accumulated
    rounding cannot add or drop the final point.
    """
    if not (np.isfinite(k_min) and np.isfinite(k_max) and np.isfinite(step)):
        raise InvalidGridError("grid endpoints and step must be finite")
    if k_min <= 0.0 or step <= 0.0 or k_max < k_min:
        raise InvalidGridError(
            f"need 0 < k_min <= k_max and step > 0, got "
            f"k_min={k_min}, k_max={k_max}, step={step}"
        )
    count = int(np.floor((k_max - k_min) / step + 1e-9)) + 1
    return k_min + step * np.arange(count)


@dataclass(frozen=True)
class SweepResult:
    """F1 of both classifiers across a copy-count grid.

    ``per_fold_*`` are (folds, grid) matrices; mean curves and the best
    (k, F1) pairs are derived views. ``skipped_pairs[j]`` totals the
    degenerate cross-class pairs over all folds at grid point ``j``.
    """

    k_grid: np.ndarray
    per_fold_hqcs: np.ndarray
    per_fold_fid: np.ndarray
    skipped_pairs: np.ndarray

    def __post_init__(self) -> None:
        grid = np.asarray(self.k_grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise InvalidGridError("grid must be a non-empty 1-d array")
        if np.any(np.diff(grid) <= 0.0):
            raise InvalidGridError("grid must be strictly ascending")
        hq = np.asarray(self.per_fold_hqcs, dtype=float)
        fi = np.asarray(self.per_fold_fid, dtype=float)
        sk = np.asarray(self.skipped_pairs, dtype=int)
        if hq.shape != fi.shape or hq.ndim != 2 or hq.shape[1] != grid.size:
            raise LengthMismatchError("per-fold matrices must be (folds, grid points)")
        if sk.shape != (grid.size,):
            raise LengthMismatchError("skipped_pairs must have one entry per grid point")
        for name, arr in (("per_fold_hqcs", hq), ("per_fold_fid", fi)):
            if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
                raise ValueError(f"{name} must lie in [0, 1]")
        for name, arr in (
            ("k_grid", grid), ("per_fold_hqcs", hq),
            ("per_fold_fid", fi), ("skipped_pairs", sk),
        ):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def fold_count(self) -> int:
        return self.per_fold_hqcs.shape[0]

    @property
    def f1_hqcs(self) -> np.ndarray:
        return self.per_fold_hqcs.mean(axis=0)

    @property
    def f1_fid(self) -> np.ndarray:
        return self.per_fold_fid.mean(axis=0)

    def _best(self, mean: np.ndarray) -> tuple[float, float]:
        # np.argmax takes the first maximum, i.e. the smallest k on ties.
        j = int(np.argmax(mean))
        return float(self.k_grid[j]), float(mean[j])

    @property
    def best_hqcs(self) -> tuple[float, float]:
        return self._best(self.f1_hqcs)

    @property
    def best_fid(self) -> tuple[float, float]:
        return self._best(self.f1_fid)

    def curve(self, classifier_id: str) -> list[tuple[float, float]]:
        """The (k, mean F1) curve of one classifier, grid order."""
        if classifier_id == HQCS:
            mean = self.f1_hqcs
        elif classifier_id == FID:
            mean = self.f1_fid
        else:
            raise ValueError(f"unknown classifier id {classifier_id!r}")
        return [(float(k), float(f)) for k, f in zip(self.k_grid, mean)]


def _sweep_fold(args) -> tuple[int, np.ndarray, np.ndarray, np.ndarray]:
    """Worker: F1 rows of one fold across the whole grid."""
    dataset, plan, fold, grid, positive = args
    train, test, y_true, _ = _split_fold(dataset, plan, fold)
    cache = build_overlap_cache(test, train)
    f1_hq = np.empty(grid.size)
    f1_fi = np.empty(grid.size)
    skipped = np.empty(grid.size, dtype=int)
    for j, k in enumerate(grid):
        fid_s, hqcs_s, skip = score_both(cache, float(k))
        f1_hq[j] = f1_score(y_true, predict_labels(hqcs_s), positive)
        f1_fi[j] = f1_score(y_true, predict_labels(fid_s), positive)
        skipped[j] = skip
    return fold, f1_hq, f1_fi, skipped


def sweep_k(dataset: BinaryDataset, plan: FoldPlan,
            k_min: float = 0.25, k_max: float = 100.0, step: float = 0.25,
            positive: int = 0, jobs: int = 1) -> SweepResult:
    """Cross-validated F1 of both classifiers over a copy-count grid.

    Overlaps are cached once per fold and reused across the entire grid,
    so each grid point costs one kernel pass. ``jobs > 1`` distributes
    folds over processes; fold order in the result is unchanged.
    """
    if plan.size != dataset.size:
        raise LengthMismatchError("fold plan does not match the dataset size")
    grid = make_grid(k_min, k_max, step)
    arg_list = [(dataset, plan, fold, grid, positive)
                for fold in range(plan.fold_count)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_fold, arg_list))
    else:
        rows = [_sweep_fold(a) for a in arg_list]
    rows.sort(key=lambda r: r[0])
    per_fold_hqcs = np.stack([r[1] for r in rows])
    per_fold_fid = np.stack([r[2] for r in rows])
    skipped = np.stack([r[3] for r in rows]).sum(axis=0)
    return SweepResult(
        k_grid=grid,
        per_fold_hqcs=per_fold_hqcs,
        per_fold_fid=per_fold_fid,
        skipped_pairs=skipped,
    )


def nonmonotonicity_check(
    curve: Sequence[tuple[float, float]], tol: float = 1e-9
) -> tuple[bool, tuple[int, int, int] | None]:
    """Detect an interior bump or dip in a (k, F1) curve.

    Returns ``(True, (i, j, l))`` with ``i < j < l`` when point ``j``
    rises above both neighbours' values or falls below both by more than
    ``tol``; ``(False, None)`` for monotone (or flat) curves. Runs in one
    pass using prefix/suffix extrema.
    """
    values = np.asarray([v for _, v in curve], dtype=float)
    n = values.size
    if n < 3:
        raise TooFewPointsError(f"need at least 3 points, got {n}")
    prefix_min = np.minimum.accumulate(values)
    prefix_max = np.maximum.accumulate(values)
    suffix_min = np.minimum.accumulate(values[::-1])[::-1]
    suffix_max = np.maximum.accumulate(values[::-1])[::-1]
    for j in range(1, n - 1):
        if (values[j] > prefix_min[j - 1] + tol
                and values[j] > suffix_min[j + 1] + tol):
            i = int(np.flatnonzero(values[:j] < values[j] - tol)[0])
            l = j + 1 + int(np.flatnonzero(values[j + 1:] < values[j] - tol)[0])
            return True, (i, j, l)
        if (values[j] < prefix_max[j - 1] - tol
                and values[j] < suffix_max[j + 1] - tol):
            i = int(np.flatnonzero(values[:j] > values[j] + tol)[0])
            l = j + 1 + int(np.flatnonzero(values[j + 1:] > values[j] + tol)[0])
            return True, (i, j, l)
    return False, None
