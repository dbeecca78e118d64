"""Feature vector and per-specimen feature set containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..config import is_external, known_dim
from ..errors import DimMismatch, DuplicateEntry, MissingChannel, NonFiniteFeature


@dataclass(frozen=True)
class FeatureVector:
    """Fixed-length numeric vector tagged with its channel."""

    channel: str
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise DimMismatch(f"feature values must be 1-D, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise NonFiniteFeature(f"non-finite values in channel {self.channel!r}")
        expected = known_dim(self.channel)
        if expected is None and not is_external(self.channel):
            raise DimMismatch(f"unknown channel {self.channel!r}")
        if expected is not None and vals.size != expected:
            raise DimMismatch(
                f"channel {self.channel!r} must have dim {expected}, got {vals.size}")
        object.__setattr__(self, "values", vals)
        vals.setflags(write=False)

    @property
    def dim(self) -> int:
        return int(self.values.size)


@dataclass
class FeatureSet:
    """All extracted channels of one specimen."""

    writer_id: str
    specimen_index: int
    label: str
    vectors: dict[str, FeatureVector] = field(default_factory=dict)

    def add(self, vector: FeatureVector) -> None:
        if vector.channel in self.vectors:
            raise DuplicateEntry(
                f"channel {vector.channel!r} already present for {self.key}")
        self.vectors[vector.channel] = vector

    def get(self, channel: str) -> FeatureVector:
        try:
            return self.vectors[channel]
        except KeyError:
            raise MissingChannel(
                f"specimen {self.key} has no channel {channel!r}") from None

    @property
    def channels(self) -> tuple[str, ...]:
        return tuple(sorted(self.vectors))

    @property
    def key(self) -> tuple[str, int, str]:
        return (self.writer_id, self.specimen_index, self.label)


def stack(sets, channel: str) -> np.ndarray:
    """Stack one channel of several feature sets into a (n, dim) matrix."""
    return np.stack([fs.get(channel).values for fs in sets])
