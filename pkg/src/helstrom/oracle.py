"""Brute-force tensor-product reference implementations.

Everything here builds the k-fold Kronecker objects explicitly and scores
by symmetric eigendecomposition. Cost grows as ``dimension ** k``, so a
size cap guards every entry point; the point of the module is not speed
but trust: the fast classifiers in :mod:`helstrom.classifier` are checked
against these constructions, and :func:`run_verification` packages those
checks as a self-test.

Conventions fixed here and relied on by the checks:

* ``hqc_score_naive`` decomposes the measurement over cross-class
  training pairs and scores each pair by the sign of its two non-zero
  eigenvalues. Eigenvectors with zero eigenvalue contribute nothing, so
  the value depends only on directions the pair can actually distinguish.
* ``centroid_sign_score`` instead diagonalises the full centroid
  difference once and assigns the zero eigenspace a configurable sign
  (+1 by default, crediting unseen directions to class 0). Because the
  sign function is nonlinear, this is NOT the same functional as the
  pair decomposition, and no fast path reproduces it; it is provided for
  comparison and for scoring states outside the training span.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import BinaryDataset, EncodedSample, overlap
from .errors import (
    DegeneratePairError,
    DimensionMismatchError,
    EigenFailureError,
    EmptyClassError,
    NonIntegerKError,
    SizeCapError,
)
from .classifier import (
    build_overlap_cache,
    fid_score,
    hqcs_score,
    pair_eigenvalue,
)

__all__ = [
    "DEFAULT_SIZE_CAP",
    "ZERO_EIGENVALUE",
    "DensityMatrix",
    "HelstromOperator",
    "PairSpectrumReport",
    "IdentityReport",
    "VerificationReport",
    "kron_power",
    "build_centroid",
    "helstrom_operator",
    "hqc_score_naive",
    "fid_score_naive",
    "centroid_sign_score",
    "verify_pair_eigenvalues",
    "verify_decomposition",
    "run_verification",
]

# Largest tensor-power vector length (and matrix side) the oracle will
# allocate. 4096 doubles ^2 is a 128 MiB matrix at most, fine for a desk
# check and far past anything the acceptance tests need.
DEFAULT_SIZE_CAP = 4096

# Eigenvalues with magnitude below this are treated as exact zeros when
# classifying the spectrum of an operator.
ZERO_EIGENVALUE = 1e-10


def kron_power(state: EncodedSample | np.ndarray, k: int,
               cap: int = DEFAULT_SIZE_CAP) -> np.ndarray:
    """The k-fold Kronecker power of a state vector.

    ``k`` must be a positive integer; the resulting length ``d ** k`` is
    checked against ``cap`` before anything is allocated.
    """
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise NonIntegerKError(f"tensor powers need an integer copy count, got {k!r}")
    if k < 1:
        raise NonIntegerKError(f"copy count must be at least 1, got {k}")
    vec = state.amplitudes if isinstance(state, EncodedSample) else np.asarray(state, float)
    dim = vec.size
    if dim ** int(k) > cap:  # exact integer arithmetic, no allocation yet
        raise SizeCapError(f"{dim} ** {k} exceeds the size cap {cap}")
    out = vec
    for _ in range(int(k) - 1):
        out = np.kron(out, vec)
    return out


@dataclass(frozen=True)
class DensityMatrix:
    """A symmetric, unit-trace, positive-semidefinite matrix."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        if not np.allclose(m, m.T, atol=1e-12, rtol=0.0):
            raise ValueError("density matrix must be symmetric")
        trace = float(np.trace(m))
        if abs(trace - 1.0) > 1e-10:
            raise ValueError(f"density matrix trace must be 1, got {trace!r}")
        smallest = float(np.linalg.eigvalsh(m)[0])
        if smallest < -1e-10:
            raise ValueError(f"density matrix must be PSD, min eigenvalue {smallest!r}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def build_centroid(samples: Sequence[EncodedSample], k: int,
                   cap: int = DEFAULT_SIZE_CAP) -> DensityMatrix:
    """Mean of the k-copy projectors of the given samples."""
    samples = tuple(samples)
    if not samples:
        raise EmptyClassError("a centroid needs at least one sample")
    dims = {s.dimension for s in samples}
    if len(dims) != 1:
        raise DimensionMismatchError(f"samples must share one dimension, got {sorted(dims)}")
    first = kron_power(samples[0], k, cap)
    acc = np.outer(first, first)
    for s in samples[1:]:
        v = kron_power(s, k, cap)
        acc += np.outer(v, v)
    return DensityMatrix(acc / len(samples))


@dataclass(frozen=True)
class HelstromOperator:
    """Difference of two centroids with its eigendecomposition attached.

    ``eigenvalues`` are sorted descending; ``eigenvectors[:, i]`` is the
    unit eigenvector for ``eigenvalues[i]``. Construction verifies the
    decomposition reconstructs the matrix and that the trace vanishes.
    """

    entries: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=float)
        vals = np.asarray(self.eigenvalues, dtype=float)
        vecs = np.asarray(self.eigenvectors, dtype=float)
        if np.any(np.diff(vals) > 0.0):
            raise ValueError("eigenvalues must be sorted descending")
        if abs(float(np.trace(m))) > 1e-10:
            raise ValueError("centroid difference must be traceless")
        recon = (vecs * vals) @ vecs.T
        if not np.allclose(recon, m, atol=1e-9, rtol=0.0):
            raise EigenFailureError("eigendecomposition does not reconstruct the operator")
        gram = vecs.T @ vecs
        if not np.allclose(gram, np.eye(vecs.shape[1]), atol=1e-9, rtol=0.0):
            raise EigenFailureError("eigenvectors are not orthonormal")
        for name, arr in (("entries", m), ("eigenvalues", vals), ("eigenvectors", vecs)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def nonzero_eigenvalues(self, tol: float = ZERO_EIGENVALUE) -> np.ndarray:
        return self.eigenvalues[np.abs(self.eigenvalues) > tol]

    def quadratic_form(self, state: np.ndarray) -> float:
        """``state . M . state`` evaluated through the eigenbasis."""
        proj = self.eigenvectors.T @ np.asarray(state, float)
        return float(np.sum(self.eigenvalues * proj * proj))

    def sign_expectation(self, state: np.ndarray, zero_sign: float = 0.0,
                         tol: float = ZERO_EIGENVALUE) -> float:
        """Expectation of the eigen-sign measurement in the given state.

        Eigenvalues within ``tol`` of zero contribute ``zero_sign`` times
        the weight of their eigenspace.
        """
        proj = self.eigenvectors.T @ np.asarray(state, float)
        signs = np.where(np.abs(self.eigenvalues) > tol,
                         np.sign(self.eigenvalues), zero_sign)
        return float(np.sum(signs * proj * proj))


def helstrom_operator(rho: DensityMatrix, sigma: DensityMatrix) -> HelstromOperator:
    """Eigendecompose the centroid difference ``rho - sigma``."""
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(f"centroid dims differ: {rho.dim} vs {sigma.dim}")
    m = rho.entries - sigma.entries
    try:
        vals, vecs = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise EigenFailureError(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(vals)[::-1]  # descending
    return HelstromOperator(m, vals[order], vecs[:, order])


def _pair_operator(a: EncodedSample, b: EncodedSample, k: int,
                   cap: int) -> HelstromOperator:
    return helstrom_operator(build_centroid([a], k, cap), build_centroid([b], k, cap))


def hqc_score_naive(c: EncodedSample, train: BinaryDataset, k: int,
                    cap: int = DEFAULT_SIZE_CAP) -> float:
    """Brute-force HQCS: average the per-pair sign measurements.

    For every cross-class pair the k-copy pair operator is formed and
    diagonalised, the test state is scored by the signs of the two
    non-zero eigenvalues, and the zero eigenspace contributes nothing.
    Matches :func:`helstrom.classifier.hqcs_score` on the same inputs,
    with degenerate pairs (eigenvalue below the shared threshold) dropped
    on both sides.
    """
    if c.dimension != train.dimension:
        raise DimensionMismatchError("test dimension does not match training dimension")
    c_k = kron_power(c, k, cap)
    total = 0.0
    for a in train.class0:
        for b in train.class1:
            if pair_degenerate(a, b, k):
                continue
            op = _pair_operator(a, b, k, cap)
            total += op.sign_expectation(c_k, zero_sign=0.0)
    return total / (train.m_a * train.m_b)


def pair_degenerate(a: EncodedSample, b: EncodedSample, k: float) -> bool:
    """True when a training pair is too close to parallel to score."""
    try:
        pair_eigenvalue(overlap(a, b), k)
    except DegeneratePairError:
        return True
    return False


def fid_score_naive(c: EncodedSample, train: BinaryDataset, k: int,
                    cap: int = DEFAULT_SIZE_CAP) -> float:
    """Brute-force FID: quadratic form of the centroid difference."""
    if c.dimension != train.dimension:
        raise DimensionMismatchError("test dimension does not match training dimension")
    rho = build_centroid(train.class0, k, cap)
    sigma = build_centroid(train.class1, k, cap)
    c_k = kron_power(c, k, cap)
    return helstrom_operator(rho, sigma).quadratic_form(c_k)


def centroid_sign_score(c: EncodedSample, train: BinaryDataset, k: int,
                        cap: int = DEFAULT_SIZE_CAP,
                        zero_sign: float = 1.0) -> float:
    """Sign measurement of the full centroid difference, one diagonalisation.

    Unlike :func:`hqc_score_naive` this does not decompose over pairs, and
    the two functionals genuinely differ whenever more than one pair
    contributes (the sign function is nonlinear). The zero eigenspace of
    the full operator is assigned ``zero_sign``.
    """
    if c.dimension != train.dimension:
        raise DimensionMismatchError("test dimension does not match training dimension")
    rho = build_centroid(train.class0, k, cap)
    sigma = build_centroid(train.class1, k, cap)
    c_k = kron_power(c, k, cap)
    return helstrom_operator(rho, sigma).sign_expectation(c_k, zero_sign=zero_sign)


@dataclass(frozen=True)
class PairSpectrumReport:
    """Spectrum check of one two-sample pair operator."""

    overlap: float
    copies: int
    analytic_eigenvalue: float
    numeric_eigenvalues: tuple[float, ...]
    nonzero_count: int
    max_deviation: float
    passed: bool


def verify_pair_eigenvalues(a: EncodedSample, b: EncodedSample, k: int,
                            cap: int = DEFAULT_SIZE_CAP,
                            tol: float = 1e-10) -> PairSpectrumReport:
    """Check that a pair operator has exactly the two eigenvalues +/- lambda.

    ``lambda = sqrt(1 - overlap ** (2k))`` is compared against the numeric
    spectrum of the explicitly built operator. The pair must not be
    parallel (that collapses the operator to zero).
    """
    ab = overlap(a, b)
    lam = pair_eigenvalue(ab, float(k))  # raises DegeneratePairError if parallel
    op = _pair_operator(a, b, k, cap)
    nonzero = op.nonzero_eigenvalues()
    if nonzero.size == 2:
        deviation = float(max(abs(nonzero[0] - lam), abs(nonzero[1] + lam)))
    else:
        deviation = float("inf")
    return PairSpectrumReport(
        overlap=ab,
        copies=int(k),
        analytic_eigenvalue=lam,
        numeric_eigenvalues=tuple(float(x) for x in nonzero),
        nonzero_count=int(nonzero.size),
        max_deviation=deviation,
        passed=nonzero.size == 2 and deviation <= tol,
    )


@dataclass(frozen=True)
class IdentityReport:
    """Agreement between averaged pair measurements and the direct sums."""

    hqcs_pairwise: float
    hqcs_fast: float
    hqcs_deviation: float
    fid_naive: float
    fid_fast: float
    fid_deviation: float
    passed: bool


def verify_decomposition(c: EncodedSample, train: BinaryDataset, k: int,
                         cap: int = DEFAULT_SIZE_CAP,
                         tol: float = 1e-9) -> IdentityReport:
    """Check both classifiers against their tensor-product constructions.

    HQCS: the average of explicit per-pair sign measurements must equal
    the rescaled-kernel fast path. FID: the quadratic form of the full
    centroid difference must equal the difference of mean kernel values.
    """
    cache = build_overlap_cache([c], train)
    hqcs_fast, _ = hqcs_score(cache, 0, float(k))
    hqcs_pairwise = hqc_score_naive(c, train, k, cap)
    fid_fast = fid_score(cache, 0, float(k))
    fid_naive = fid_score_naive(c, train, k, cap)
    hqcs_dev = abs(hqcs_fast - hqcs_pairwise)
    fid_dev = abs(fid_fast - fid_naive)
    return IdentityReport(
        hqcs_pairwise=hqcs_pairwise,
        hqcs_fast=hqcs_fast,
        hqcs_deviation=hqcs_dev,
        fid_naive=fid_naive,
        fid_fast=fid_fast,
        fid_deviation=fid_dev,
        passed=hqcs_dev <= tol and fid_dev <= tol,
    )


@dataclass(frozen=True)
class VerificationReport:
    """Aggregate result of the random self-test."""

    trials: int
    pair_max_deviation: float
    pairs_all_two_eigenvalues: bool
    hqcs_max_deviation: float
    fid_max_deviation: float
    failures: tuple[str, ...]
    vacuous: bool

    @property
    def passed(self) -> bool:
        return not self.failures


def _random_unit(rng: np.random.Generator, dim: int, label: int) -> EncodedSample:
    vec = rng.standard_normal(dim)
    return EncodedSample(vec / np.linalg.norm(vec), label)


def run_verification(dims: Sequence[int] = (2, 3, 4),
                     samples_per_class: int = 3,
                     k_max: int = 3,
                     trials: int = 100,
                     seed: int = 42,
                     cap: int = DEFAULT_SIZE_CAP,
                     eigen_tol: float = 1e-10,
                     score_tol: float = 1e-9) -> VerificationReport:
    """Random self-test of the fast classifiers against the oracle.

    Each trial draws a dimension, a copy count up to ``k_max``, class
    sizes up to ``samples_per_class``, random unit training samples and a
    random test state, then runs the eigenvalue check on one pair and the
    decomposition check on the whole instance. The worst instance would
    need ``max(dims) ** k_max`` entries, which is validated against the
    cap before any trial runs. ``trials == 0`` passes vacuously.
    """
    dims = tuple(int(d) for d in dims)
    if not dims or min(dims) < 2:
        raise ValueError(f"dims must all be at least 2, got {dims!r}")
    if samples_per_class < 1:
        raise ValueError("samples_per_class must be at least 1")
    if not isinstance(k_max, (int, np.integer)) or isinstance(k_max, bool) or k_max < 1:
        raise NonIntegerKError(f"k_max must be a positive integer, got {k_max!r}")
    if trials < 0:
        raise ValueError("trials must be non-negative")
    if max(dims) ** int(k_max) > cap:
        raise SizeCapError(
            f"{max(dims)} ** {k_max} exceeds the size cap {cap}; "
            "reduce dims or k_max"
        )
    if trials == 0:
        return VerificationReport(0, 0.0, True, 0.0, 0.0, (), vacuous=True)

    rng = np.random.default_rng(seed)
    pair_dev = 0.0
    pair_counts_ok = True
    hqcs_dev = 0.0
    fid_dev = 0.0
    failures: list[str] = []
    for trial in range(trials):
        dim = int(rng.choice(dims))
        k = int(rng.integers(1, k_max + 1))
        m_a = int(rng.integers(1, samples_per_class + 1))
        m_b = int(rng.integers(1, samples_per_class + 1))
        train = BinaryDataset(
            tuple(_random_unit(rng, dim, 0) for _ in range(m_a)),
            tuple(_random_unit(rng, dim, 1) for _ in range(m_b)),
        )
        c = _random_unit(rng, dim, 0)

        pair = verify_pair_eigenvalues(train.class0[0], train.class1[0], k, cap)
        pair_dev = max(pair_dev, pair.max_deviation)
        pair_counts_ok = pair_counts_ok and pair.nonzero_count == 2
        if not pair.passed:
            failures.append(
                f"trial {trial}: pair spectrum deviated by {pair.max_deviation:.3e} "
                f"({pair.nonzero_count} non-zero eigenvalues)"
            )

        ident = verify_decomposition(c, train, k, cap, tol=score_tol)
        hqcs_dev = max(hqcs_dev, ident.hqcs_deviation)
        fid_dev = max(fid_dev, ident.fid_deviation)
        if not ident.passed:
            failures.append(
                f"trial {trial}: fast/naive deviation hqcs={ident.hqcs_deviation:.3e} "
                f"fid={ident.fid_deviation:.3e}"
            )
    if pair_dev > eigen_tol:
        failures.append(f"pair eigenvalue deviation {pair_dev:.3e} > {eigen_tol:.1e}")
    return VerificationReport(
        trials=trials,
        pair_max_deviation=pair_dev,
        pairs_all_two_eigenvalues=pair_counts_ok,
        hqcs_max_deviation=hqcs_dev,
        fid_max_deviation=fid_dev,
        failures=tuple(failures),
        vacuous=False,
    )
