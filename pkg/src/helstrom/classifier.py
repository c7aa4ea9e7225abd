"""Linear-time HQCS and FID scoring over cached pairwise overlaps.

Both classifiers reduce to sums of the kernel ``|<c|x>|^(2k)`` between a
test sample ``c`` and training samples ``x``:

* FID scores a test sample by the difference between the mean kernel
  value against each class.
* HQCS additionally weights every cross-class training pair ``(a, b)`` by
  the reciprocal of its pair eigenvalue ``sqrt(1 - |<a|b>|^(2k))``, which
  recovers the sign-measurement statistics of the pair without ever
  forming a tensor-product operator.

All scoring is O(number of overlaps) per test sample and independent of
the feature dimension once the :class:`OverlapCache` is built, so a sweep
over many copy counts ``k`` pays the dot products once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import BinaryDataset, EncodedSample, check_copy_count, stack_amplitudes
from .errors import (
    DegeneratePairError,
    DimensionMismatchError,
    LengthMismatchError,
    NonFiniteError,
)

__all__ = [
    "HQCS",
    "FID",
    "CLASSIFIER_IDS",
    "DEGENERATE_LAMBDA",
    "OverlapCache",
    "ScoreReport",
    "build_overlap_cache",
    "fidelity_kernel",
    "pair_eigenvalue",
    "fid_pair_score",
    "fid_score",
    "fid_scores",
    "hqcs_score",
    "hqcs_scores",
    "score_both",
    "fid_score_kernel_form",
    "default_kernel_weights",
    "predict",
    "predict_labels",
    "score_report",
]

HQCS = "HQCS"
FID = "FID"
CLASSIFIER_IDS = (HQCS, FID)

# Pairs whose eigenvalue falls below this are treated as carrying no sign
# information: their contribution is dropped and the drop is counted.
DEGENERATE_LAMBDA = 1e-12

# Smallest positive normal double; kernel values below it flush to zero so
# that huge copy counts underflow cleanly instead of going subnormal.
_TINY = np.finfo(float).tiny


def _pow2k(values: np.ndarray, k: float) -> np.ndarray:
    """Elementwise ``v ** (2k)`` for v in [0, 1], with 0 mapping to 0.

    Computed in the log domain so fractional ``k`` is exact to rounding
    and large ``k`` underflows to zero instead of raising.
    """
    v = np.asarray(values, dtype=float)
    out = np.zeros_like(v)
    positive = v > 0.0
    # Underflow to zero is the designed behaviour for large k, not an error.
    with np.errstate(under="ignore"):
        np.exp(2.0 * k * np.log(v, where=positive, out=np.zeros_like(v)),
               where=positive, out=out)
    out[out < _TINY] = 0.0
    return out


def _lambda_squared(values: np.ndarray, k: float) -> np.ndarray:
    """Elementwise ``1 - v ** (2k)``, fully accurate for v near 1.

    Uses ``-expm1(2k log v)`` so that nearly parallel pairs keep their
    tiny eigenvalues instead of cancelling to 0 or rounding to 1.
    """
    v = np.asarray(values, dtype=float)
    out = np.ones_like(v)
    positive = v > 0.0
    # expm1(-huge) legitimately underflows toward -1 for large k.
    with np.errstate(under="ignore"):
        np.negative(
            np.expm1(2.0 * k * np.log(v, where=positive, out=np.zeros_like(v))),
            where=positive,
            out=out,
        )
    return np.clip(out, 0.0, 1.0)


def fidelity_kernel(overlap_value: float, k: float) -> float:
    """The classifier kernel ``overlap ** (2k)`` for one overlap in [0, 1]."""
    if not 0.0 <= overlap_value <= 1.0:
        raise ValueError(f"overlap must lie in [0, 1], got {overlap_value!r}")
    k = check_copy_count(k)
    return float(_pow2k(np.asarray(overlap_value), k))


def pair_eigenvalue(ab_overlap: float, k: float) -> float:
    """Positive eigenvalue ``sqrt(1 - overlap ** (2k))`` of a training pair.

    Raises :class:`DegeneratePairError` when the value falls below
    :data:`DEGENERATE_LAMBDA`, i.e. the pair is numerically parallel.
    """
    if not 0.0 <= ab_overlap <= 1.0:
        raise ValueError(f"overlap must lie in [0, 1], got {ab_overlap!r}")
    k = check_copy_count(k)
    value = float(np.sqrt(_lambda_squared(np.asarray(ab_overlap), k)))
    if value < DEGENERATE_LAMBDA:
        raise DegeneratePairError(
            f"pair overlap {ab_overlap!r} at k={k} leaves eigenvalue {value!r}"
        )
    return value


def fid_pair_score(ca_overlap: float, cb_overlap: float, k: float) -> float:
    """Single-pair FID contribution ``ca ** (2k) - cb ** (2k)``."""
    for name, value in (("ca_overlap", ca_overlap), ("cb_overlap", cb_overlap)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    k = check_copy_count(k)
    powers = _pow2k(np.array([ca_overlap, cb_overlap]), k)
    return float(powers[0] - powers[1])


@dataclass(frozen=True)
class OverlapCache:
    """All pairwise overlaps needed to score a batch of test samples.

    ``test_vs_class0`` is (n_test, m_a), ``test_vs_class1`` is
    (n_test, m_b), ``cross_train`` is (m_a, m_b). Every entry lies in
    [0, 1]. Building the cache is the only step whose cost depends on the
    feature dimension.
    """

    test_vs_class0: np.ndarray
    test_vs_class1: np.ndarray
    cross_train: np.ndarray

    def __post_init__(self) -> None:
        for name in ("test_vs_class0", "test_vs_class1", "cross_train"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 2:
                raise ValueError(f"{name} must be a 2-d array")
            if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
                raise ValueError(f"{name} entries must lie in [0, 1]")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.test_vs_class0.shape[0] != self.test_vs_class1.shape[0]:
            raise DimensionMismatchError("test row counts disagree across classes")
        if self.test_vs_class0.shape[1] != self.cross_train.shape[0]:
            raise DimensionMismatchError("class-0 column count disagrees")
        if self.test_vs_class1.shape[1] != self.cross_train.shape[1]:
            raise DimensionMismatchError("class-1 column count disagrees")

    @property
    def n_test(self) -> int:
        return self.test_vs_class0.shape[0]

    @property
    def m_a(self) -> int:
        return self.cross_train.shape[0]

    @property
    def m_b(self) -> int:
        return self.cross_train.shape[1]


def build_overlap_cache(
    test: Sequence[EncodedSample], train: BinaryDataset
) -> OverlapCache:
    """Compute every test/train and cross-class overlap in one pass."""
    for sample in test:
        if sample.dimension != train.dimension:
            raise DimensionMismatchError(
                f"test sample dimension {sample.dimension} does not match "
                f"training dimension {train.dimension}"
            )
    a = train.matrix0()
    b = train.matrix1()
    t = stack_amplitudes(test)
    if t.size == 0:
        t = np.zeros((0, train.dimension))
    clip = lambda m: np.minimum(np.abs(m), 1.0)  # noqa: E731
    return OverlapCache(
        test_vs_class0=clip(t @ a.T),
        test_vs_class1=clip(t @ b.T),
        cross_train=clip(a @ b.T),
    )


def _pair_weights(cache: OverlapCache, k: float) -> tuple[np.ndarray, int]:
    """Reciprocal pair eigenvalues, with degenerate pairs zeroed and counted."""
    lam2 = _lambda_squared(cache.cross_train, k)
    degenerate = lam2 < DEGENERATE_LAMBDA**2
    weights = np.zeros_like(lam2)
    np.divide(1.0, np.sqrt(lam2, where=~degenerate, out=np.ones_like(lam2)),
              where=~degenerate, out=weights)
    return weights, int(degenerate.sum())


def fid_scores(cache: OverlapCache, k: float) -> np.ndarray:
    """FID scores for every cached test sample at copy count ``k``."""
    k = check_copy_count(k)
    p0 = _pow2k(cache.test_vs_class0, k)
    p1 = _pow2k(cache.test_vs_class1, k)
    return p0.sum(axis=1) / cache.m_a - p1.sum(axis=1) / cache.m_b


def fid_score(cache: OverlapCache, test_index: int, k: float) -> float:
    """FID score of one cached test sample."""
    k = check_copy_count(k)
    p0 = _pow2k(cache.test_vs_class0[test_index], k)
    p1 = _pow2k(cache.test_vs_class1[test_index], k)
    return float(p0.sum() / cache.m_a - p1.sum() / cache.m_b)


def hqcs_scores(cache: OverlapCache, k: float) -> tuple[np.ndarray, int]:
    """HQCS scores for every cached test sample, plus the skipped-pair count.

    The double sum over cross-class pairs factorises: with pair weights
    ``W[a, b] = 1 / lambda(a, b)`` the score is
    ``(P0 @ W.sum(axis=1) - P1 @ W.sum(axis=0)) / (m_a * m_b)``, which
    keeps the per-``k`` cost linear in the number of training samples.
    """
    k = check_copy_count(k)
    weights, skipped = _pair_weights(cache, k)
    p0 = _pow2k(cache.test_vs_class0, k)
    p1 = _pow2k(cache.test_vs_class1, k)
    scores = (p0 @ weights.sum(axis=1) - p1 @ weights.sum(axis=0)) / (
        cache.m_a * cache.m_b
    )
    return scores, skipped


def hqcs_score(cache: OverlapCache, test_index: int, k: float) -> tuple[float, int]:
    """HQCS score of one cached test sample, plus the skipped-pair count."""
    k = check_copy_count(k)
    weights, skipped = _pair_weights(cache, k)
    p0 = _pow2k(cache.test_vs_class0[test_index], k)
    p1 = _pow2k(cache.test_vs_class1[test_index], k)
    score = (p0 @ weights.sum(axis=1) - p1 @ weights.sum(axis=0)) / (
        cache.m_a * cache.m_b
    )
    return float(score), skipped


def score_both(cache: OverlapCache, k: float) -> tuple[np.ndarray, np.ndarray, int]:
    """FID and HQCS scores sharing one kernel evaluation per overlap.

    Returns ``(fid, hqcs, skipped)``; used by the sweep so each grid point
    costs one pass over the cache.
    """
    k = check_copy_count(k)
    p0 = _pow2k(cache.test_vs_class0, k)
    p1 = _pow2k(cache.test_vs_class1, k)
    fid = p0.sum(axis=1) / cache.m_a - p1.sum(axis=1) / cache.m_b
    weights, skipped = _pair_weights(cache, k)
    hqcs = (p0 @ weights.sum(axis=1) - p1 @ weights.sum(axis=0)) / (
        cache.m_a * cache.m_b
    )
    return fid, hqcs, skipped


def default_kernel_weights(m_a: int, m_b: int) -> tuple[float, float]:
    """Per-class kernel weights that make the weighted sum equal FID."""
    if m_a < 1 or m_b < 1:
        raise ValueError("class sizes must be positive")
    return 1.0 / m_a, -1.0 / m_b


def fid_score_kernel_form(
    cache: OverlapCache,
    test_index: int,
    k: float,
    weights: tuple[float, float] | None = None,
) -> float:
    """FID as an explicitly weighted kernel sum over all training samples.

    With the default weights ``(+1/m_a, -1/m_b)`` this equals
    :func:`fid_score` to rounding; custom weights give a reweighted
    nearest-centroid rule over the same kernel values.
    """
    k = check_copy_count(k)
    if weights is None:
        weights = default_kernel_weights(cache.m_a, cache.m_b)
    w0, w1 = float(weights[0]), float(weights[1])
    p0 = _pow2k(cache.test_vs_class0[test_index], k)
    p1 = _pow2k(cache.test_vs_class1[test_index], k)
    return float(w0 * p0.sum() + w1 * p1.sum())


def predict(score: float) -> int:
    """Label 0 for a strictly positive score, label 1 otherwise."""
    if not np.isfinite(score):
        raise NonFiniteError(f"score must be finite, got {score!r}")
    return 0 if score > 0.0 else 1


def predict_labels(scores: np.ndarray) -> np.ndarray:
    """Vectorised :func:`predict` over a score array."""
    arr = np.asarray(scores, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("scores must be finite")
    return np.where(arr > 0.0, 0, 1)


@dataclass(frozen=True)
class ScoreReport:
    """Scores and predicted labels of one classifier over one test batch."""

    classifier_id: str
    k: float
    scores: np.ndarray
    predictions: np.ndarray
    skipped_pairs: int

    def __post_init__(self) -> None:
        if self.classifier_id not in CLASSIFIER_IDS:
            raise ValueError(f"unknown classifier id {self.classifier_id!r}")
        scores = np.asarray(self.scores, dtype=float)
        predictions = np.asarray(self.predictions, dtype=int)
        if scores.shape != predictions.shape:
            raise LengthMismatchError(
                f"scores shape {scores.shape} != predictions shape {predictions.shape}"
            )
        if not np.array_equal(predictions, np.where(scores > 0.0, 0, 1)):
            raise ValueError("predictions must follow the sign of the scores")
        if self.skipped_pairs < 0:
            raise ValueError("skipped_pairs must be non-negative")
        scores.setflags(write=False)
        predictions.setflags(write=False)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "predictions", predictions)
        object.__setattr__(self, "k", check_copy_count(self.k))


def score_report(cache: OverlapCache, classifier_id: str, k: float) -> ScoreReport:
    """Score every cached test sample with one classifier."""
    if classifier_id == FID:
        scores = fid_scores(cache, k)
        skipped = 0
    elif classifier_id == HQCS:
        scores, skipped = hqcs_scores(cache, k)
    else:
        raise ValueError(f"unknown classifier id {classifier_id!r}")
    return ScoreReport(
        classifier_id=classifier_id,
        k=check_copy_count(k),
        scores=scores,
        predictions=predict_labels(scores),
        skipped_pairs=skipped,
    )
