"""
Melodic features of a monophonic line: ambitus, pitch-class entropy and the
distribution of melodic intervals.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import EmptyInput, EmptyVoice, NotMonophonic
from .notematrix import NoteMatrix

__all__ = [
    "PITCH_CLASS_NAMES",
    "INTERVAL_NAMES",
    "MAX_INTERVAL",
    "PitchWeighting",
    "IntervalWeighting",
    "AggregateMode",
    "AmbitusResult",
    "PitchClassDistribution",
    "EntropyResult",
    "IntervalDistribution",
    "FoldedIntervalView",
    "ambitus",
    "pc_distribution",
    "pitch_class_entropy",
    "interval_distribution",
    "fold_intervals",
    "aggregate_interval_distribution",
]

PITCH_CLASS_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")
#: unsigned interval classes, index = semitones
INTERVAL_NAMES = ("P1", "m2", "M2", "m3", "M3", "P4", "TT", "P5", "m6", "M6", "m7", "M7", "P8")
MAX_INTERVAL = 12
_NBINS = 2 * MAX_INTERVAL + 1


class PitchWeighting(str, Enum):
    DURATION = "duration"
    COUNT = "count"


class IntervalWeighting(str, Enum):
    COUNT = "count"
    DURATION = "duration"


class AggregateMode(str, Enum):
    EQUAL_SONG_WEIGHT = "song"
    POOLED = "pooled"


@dataclass(frozen=True)
class AmbitusResult:
    semitones: int
    lowest_pitch: int
    highest_pitch: int


@dataclass(frozen=True, eq=False)
class PitchClassDistribution:
    weights: np.ndarray
    weighting_mode: PitchWeighting = PitchWeighting.DURATION

    def as_dict(self) -> dict[str, float]:
        return dict(zip(PITCH_CLASS_NAMES, self.weights.tolist()))


@dataclass(frozen=True)
class EntropyResult:
    normalized_entropy: float

    def __float__(self):
        return self.normalized_entropy


@dataclass(frozen=True, eq=False)
class IntervalDistribution:
    """Signed interval profile over -12..+12 semitones.

    ``counts`` holds the un-normalized bin weights (interval counts in count
    mode); ``signed_bins`` is the normalized profile. Intervals wider than an
    octave are tallied in ``overflow_count`` only.
    """

    signed_bins: np.ndarray
    counts: np.ndarray
    overflow_count: int
    interval_count: int

    @property
    def semitones(self) -> np.ndarray:
        return np.arange(-MAX_INTERVAL, MAX_INTERVAL + 1)

    def bin(self, semitones: int) -> float:
        return float(self.signed_bins[semitones + MAX_INTERVAL])


@dataclass(frozen=True, eq=False)
class FoldedIntervalView:
    unsigned_bins: np.ndarray

    def as_dict(self) -> dict[str, float]:
        return dict(zip(INTERVAL_NAMES, self.unsigned_bins.tolist()))

    def ranking(self) -> list[tuple[str, float]]:
        """Interval names from most to least frequent; ties keep the smaller interval first."""
        order = sorted(range(len(self.unsigned_bins)), key=lambda k: (-self.unsigned_bins[k], k))
        return [(INTERVAL_NAMES[k], float(self.unsigned_bins[k])) for k in order]


def _require_notes(nm: NoteMatrix):
    if not len(nm):
        raise EmptyVoice(f"{nm.source_id or 'matrix'}: no notes")


def ambitus(nm: NoteMatrix) -> AmbitusResult:
    _require_notes(nm)
    p = nm.pitches
    lo, hi = int(p.min()), int(p.max())
    return AmbitusResult(hi - lo, lo, hi)


def pc_distribution(nm: NoteMatrix, mode: PitchWeighting | str = PitchWeighting.DURATION) -> PitchClassDistribution:
    mode = PitchWeighting(mode)
    _require_notes(nm)
    weights = nm.durations if mode is PitchWeighting.DURATION else np.ones(len(nm))
    hist = np.bincount(nm.pitches % 12, weights=weights, minlength=12).astype(float)
    return PitchClassDistribution(hist / hist.sum(), mode)


def pitch_class_entropy(pcd: PitchClassDistribution) -> EntropyResult:
    """Shannon entropy of the pitch-class weights divided by its maximum, ``log 12``."""
    p = np.asarray(pcd.weights, dtype=float)
    p = p[p > 0]
    h = -np.sum(p * np.log(p)) / np.log(12)
    return EntropyResult(float(min(max(h, 0.0), 1.0)) + 0.0)  # + 0.0 turns -0.0 into 0.0


def interval_distribution(nm: NoteMatrix,
                          weighting: IntervalWeighting | str = IntervalWeighting.COUNT) -> IntervalDistribution:
    """Profile of successive pitch differences.

    With duration weighting each interval counts the geometric mean of the
    two note durations instead of 1.
    """
    weighting = IntervalWeighting(weighting)
    _require_notes(nm)
    if not nm.monophonic:
        raise NotMonophonic(f"{nm.source_id or 'matrix'}: run enforce_monophony first")
    steps = np.diff(nm.pitches)
    if weighting is IntervalWeighting.DURATION:
        d = nm.durations
        w = np.sqrt(d[:-1] * d[1:])
    else:
        w = np.ones(len(steps))
    inside = np.abs(steps) <= MAX_INTERVAL
    counts = np.bincount(steps[inside] + MAX_INTERVAL, weights=w[inside], minlength=_NBINS).astype(float)
    total = counts.sum()
    bins = counts / total if total > 0 else np.zeros(_NBINS)
    return IntervalDistribution(bins, counts, int((~inside).sum()), int(len(steps)))


def fold_intervals(iv: IntervalDistribution) -> FoldedIntervalView:
    b = np.asarray(iv.signed_bins, dtype=float)
    up = b[MAX_INTERVAL:]
    down = b[MAX_INTERVAL::-1]
    folded = up + down
    folded[0] = b[MAX_INTERVAL]
    return FoldedIntervalView(folded)


def aggregate_interval_distribution(per_song: Sequence[IntervalDistribution],
                                    mode: AggregateMode | str = AggregateMode.EQUAL_SONG_WEIGHT) -> IntervalDistribution:
    """Combine per-song profiles.

    ``song`` averages the normalized profiles so each song weighs the same;
    ``pooled`` adds raw counts so longer songs weigh more.
    """
    mode = AggregateMode(mode)
    if not per_song:
        raise EmptyInput("no interval distributions to aggregate")
    counts = np.sum([iv.counts for iv in per_song], axis=0)
    if mode is AggregateMode.EQUAL_SONG_WEIGHT:
        combined = np.mean([iv.signed_bins for iv in per_song], axis=0)
    else:
        combined = counts
    total = combined.sum()
    bins = combined / total if total > 0 else np.zeros(_NBINS)
    return IntervalDistribution(
        bins,
        counts,
        sum(iv.overflow_count for iv in per_song),
        sum(iv.interval_count for iv in per_song),
    )
