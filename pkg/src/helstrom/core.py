"""Dataset containers and amplitude encoding of feature vectors.

A classical feature vector enters the classifiers as a point on the unit
sphere: the vector divided by its Euclidean norm. Everything downstream
(overlaps, scores) consumes the containers defined here, so validation is
front-loaded: once an :class:`EncodedSample` or :class:`BinaryDataset`
exists, its invariants hold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyClassError,
    NonFiniteError,
    ZeroNormError,
)

__all__ = [
    "NORM_ATOL",
    "RawSample",
    "EncodedSample",
    "BinaryDataset",
    "amplitude_encode",
    "overlap",
    "check_copy_count",
    "stack_amplitudes",
]

# Unit-norm slack for encoded amplitudes. Wide enough for one rounding of
# a division by the norm, tight enough to catch unnormalised input.
NORM_ATOL = 1e-12


def _as_readonly_vector(values: object) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RawSample:
    """A feature vector in original dataset units plus its binary label."""

    features: np.ndarray
    label: int

    def __post_init__(self) -> None:
        arr = _as_readonly_vector(self.features)
        if arr.size == 0:
            raise ValueError("feature vector must not be empty")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError("feature vector contains NaN or infinity")
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")
        object.__setattr__(self, "features", arr)
        object.__setattr__(self, "label", int(self.label))

    @property
    def dimension(self) -> int:
        return self.features.size


@dataclass(frozen=True)
class EncodedSample:
    """A unit-norm amplitude vector plus its binary label.

    The norm is checked at construction; consumers may assume it is 1 up
    to :data:`NORM_ATOL`.
    """

    amplitudes: np.ndarray
    label: int

    def __post_init__(self) -> None:
        arr = _as_readonly_vector(self.amplitudes)
        if arr.size == 0:
            raise ValueError("amplitude vector must not be empty")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError("amplitude vector contains NaN or infinity")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"amplitudes must have unit norm, got {norm!r}")
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")
        object.__setattr__(self, "amplitudes", arr)
        object.__setattr__(self, "label", int(self.label))

    @property
    def dimension(self) -> int:
        return self.amplitudes.size


def amplitude_encode(raw: RawSample) -> EncodedSample:
    """Project a raw sample onto the unit sphere, keeping its label.

    Scaling all features by a common positive factor leaves the encoding
    unchanged (exactly so for power-of-two factors, to within one rounding
    otherwise). Raises :class:`ZeroNormError` for the all-zero vector,
    which has no direction to encode.
    """
    norm = float(np.linalg.norm(raw.features))
    if norm == 0.0:
        raise ZeroNormError("cannot encode a zero feature vector")
    return EncodedSample(raw.features / norm, raw.label)


def overlap(u: EncodedSample, v: EncodedSample) -> float:
    """Absolute inner product of two encoded samples, clamped to [0, 1].

    The clamp absorbs rounding of order ``NORM_ATOL`` above 1; anything
    larger is impossible for validated inputs.
    """
    if u.dimension != v.dimension:
        raise DimensionMismatchError(
            f"overlap needs equal dimensions, got {u.dimension} and {v.dimension}"
        )
    value = abs(float(np.dot(u.amplitudes, v.amplitudes)))
    return min(value, 1.0)


def check_copy_count(k: float) -> float:
    """Validate a copy count: any finite positive real, returned as float."""
    value = float(k)
    if not np.isfinite(value) or value <= 0.0:
        raise ValueError(f"copy count must be a finite positive real, got {k!r}")
    return value


@dataclass(frozen=True)
class BinaryDataset:
    """Encoded training samples split by class.

    ``class0`` and ``class1`` are both non-empty, hold samples whose label
    matches their slot, and share one feature dimension. Canonical sample
    order is all of ``class0`` followed by all of ``class1``; fold plans
    and caches index into that order.
    """

    class0: tuple[EncodedSample, ...]
    class1: tuple[EncodedSample, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "class0", tuple(self.class0))
        object.__setattr__(self, "class1", tuple(self.class1))
        if not self.class0 or not self.class1:
            raise EmptyClassError("both classes need at least one sample")
        for slot, expected in ((self.class0, 0), (self.class1, 1)):
            for sample in slot:
                if sample.label != expected:
                    raise ValueError(
                        f"sample with label {sample.label} in class-{expected} slot"
                    )
        dims = {s.dimension for s in self.class0 + self.class1}
        if len(dims) != 1:
            raise DimensionMismatchError(
                f"all samples must share one dimension, got {sorted(dims)}"
            )

    @classmethod
    def from_samples(cls, samples: Iterable[EncodedSample]) -> "BinaryDataset":
        """Group an iterable of encoded samples by label, preserving order."""
        materialized = tuple(samples)
        class0 = tuple(s for s in materialized if s.label == 0)
        class1 = tuple(s for s in materialized if s.label == 1)
        return cls(class0, class1)

    @property
    def m_a(self) -> int:
        return len(self.class0)

    @property
    def m_b(self) -> int:
        return len(self.class1)

    @property
    def size(self) -> int:
        return len(self.class0) + len(self.class1)

    @property
    def dimension(self) -> int:
        return self.class0[0].dimension

    @property
    def samples(self) -> tuple[EncodedSample, ...]:
        return self.class0 + self.class1

    def labels(self) -> np.ndarray:
        return np.array([0] * self.m_a + [1] * self.m_b, dtype=int)

    def matrix0(self) -> np.ndarray:
        return np.stack([s.amplitudes for s in self.class0])

    def matrix1(self) -> np.ndarray:
        return np.stack([s.amplitudes for s in self.class1])

    def swapped(self) -> "BinaryDataset":
        """The same dataset with the two class slots (and labels) exchanged."""
        new0 = tuple(EncodedSample(s.amplitudes, 0) for s in self.class1)
        new1 = tuple(EncodedSample(s.amplitudes, 1) for s in self.class0)
        return BinaryDataset(new0, new1)


def stack_amplitudes(samples: Sequence[EncodedSample]) -> np.ndarray:
    """Stack encoded samples into an (n, d) array; (0, 0) when empty."""
    if not samples:
        return np.zeros((0, 0))
    return np.stack([s.amplitudes for s in samples])
