"""
Note matrices: monophonic-capable note lists built from parsed MIDI files.

A :class:`NoteMatrix` mirrors the classic seven-column ``nmat`` layout
(onset and duration in beats, channel, pitch, velocity, onset and duration
in seconds). :func:`events_to_notes` pairs note-on/off events for a selected
voice, and :func:`enforce_monophony` reduces the result to a single
non-overlapping line.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict, deque
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import EmptyVoice
from .smf import (
    DEFAULT_TEMPO,
    NoteOff,
    NoteOn,
    SmfDocument,
    TempoMap,
    build_tempo_map,
    tick_to_beats,
    tick_to_seconds,
)

__all__ = [
    "EPS",
    "NMAT_COLUMNS",
    "Note",
    "NoteMatrix",
    "VoiceSelector",
    "MonoPolicy",
    "events_to_notes",
    "enforce_monophony",
    "matrix_summary",
    "melody",
]

#: tolerance in beats for coincident onsets and zero-length notes
EPS = 1e-9

NMAT_COLUMNS = ("onset_beats", "duration_beats", "channel", "pitch", "velocity", "onset_sec", "duration_sec")


@dataclass(frozen=True)
class Note:
    onset_beats: float
    duration_beats: float
    channel: int
    pitch: int
    velocity: int
    onset_sec: float
    duration_sec: float

    @property
    def offset_beats(self) -> float:
        return self.onset_beats + self.duration_beats


def _sort_key(note: Note):
    return (note.onset_beats, note.pitch)


@dataclass(frozen=True)
class NoteMatrix:
    """Notes ordered by ``(onset_beats, pitch)``.

    ``tempo_map`` and ``ticks_per_quarter`` are carried along so that
    durations changed in beats can be converted back to seconds.
    """

    notes: tuple[Note, ...]
    source_id: str = ""
    monophonic: bool = False
    ticks_per_quarter: int = 480
    tempo_map: TempoMap = TempoMap()
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        ordered = tuple(sorted(self.notes, key=_sort_key))
        object.__setattr__(self, "notes", ordered)

    def __len__(self):
        return len(self.notes)

    def __iter__(self):
        return iter(self.notes)

    @property
    def pitches(self) -> np.ndarray:
        return np.array([n.pitch for n in self.notes], dtype=int)

    @property
    def durations(self) -> np.ndarray:
        return np.array([n.duration_beats for n in self.notes], dtype=float)

    def beats_to_seconds(self, beats: float) -> float:
        return tick_to_seconds(beats * self.ticks_per_quarter, self.ticks_per_quarter, self.tempo_map)

    def to_array(self) -> np.ndarray:
        """Return the ``(n, 7)`` float array in :data:`NMAT_COLUMNS` order."""
        rows = [[getattr(n, c) for c in NMAT_COLUMNS] for n in self.notes]
        return np.array(rows, dtype=float).reshape(len(rows), len(NMAT_COLUMNS))

    def to_csv(self) -> str:
        """Seven-column CSV dump, for debugging."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(NMAT_COLUMNS)
        for n in self.notes:
            writer.writerow([f"{n.onset_beats:.6f}", f"{n.duration_beats:.6f}", n.channel, n.pitch,
                             n.velocity, f"{n.onset_sec:.6f}", f"{n.duration_sec:.6f}"])
        return buf.getvalue()


@dataclass(frozen=True)
class VoiceSelector:
    """Which notes make up the vocal line.

    All criteria that are set must match. ``name_pattern`` is a
    case-insensitive substring of the track name.
    """

    track: int | None = None
    channel: int | None = None
    name_pattern: str | None = None
    select_all: bool = False

    def __post_init__(self):
        if not self.select_all and self.track is None and self.channel is None and not self.name_pattern:
            raise ValueError("VoiceSelector needs a track, channel or name pattern, or VoiceSelector.all()")
        if self.track is not None and self.track < 0:
            raise ValueError(f"track index must be >= 0, got {self.track}")
        if self.channel is not None and not 0 <= self.channel <= 15:
            raise ValueError(f"channel must be in 0..15, got {self.channel}")

    @classmethod
    def all(cls) -> "VoiceSelector":
        return cls(select_all=True)

    def matches_track(self, index: int, name: str | None) -> bool:
        if self.track is not None and index != self.track:
            return False
        if self.name_pattern:
            return name is not None and self.name_pattern.lower() in name.lower()
        return True

    def matches_channel(self, channel: int) -> bool:
        return self.channel is None or channel == self.channel


class MonoPolicy(str, Enum):
    KEEP_HIGHER = "high"
    KEEP_LOWER = "low"
    KEEP_FIRST = "first"


def events_to_notes(doc: SmfDocument, selector: VoiceSelector, source_id: str = "") -> NoteMatrix:
    """Pair note-on/note-off events of the selected voice into a note matrix.

    A note-on with velocity 0 counts as a note-off. Repeated note-ons of one
    pitch and channel are closed first-in, first-out. Note-ons still open at
    the end of their track are closed at the track's last event tick; stray
    note-offs are dropped. Both cases are reported in ``warnings``.
    """
    tpq = doc.ticks_per_quarter
    tmap = build_tempo_map(doc)
    warnings: list[str] = []
    spans: list[tuple[int, int, int, int, int]] = []  # on_tick, off_tick, channel, pitch, velocity

    for track in doc.tracks:
        if not selector.matches_track(track.index, track.name):
            continue
        open_notes: dict[tuple[int, int], deque] = defaultdict(deque)
        for ev in track.events:
            kind = ev.kind
            if not isinstance(kind, (NoteOn, NoteOff)) or not selector.matches_channel(kind.channel):
                continue
            key = (kind.channel, kind.pitch)
            if isinstance(kind, NoteOn) and kind.velocity > 0:
                if open_notes[key]:
                    warnings.append(f"track {track.index}: note-on ch{kind.channel} pitch {kind.pitch} "
                                    f"at tick {ev.tick} while the same pitch is sounding")
                open_notes[key].append((ev.tick, kind.velocity))
            elif open_notes[key]:
                on_tick, vel = open_notes[key].popleft()
                spans.append((on_tick, ev.tick, kind.channel, kind.pitch, vel))
            else:
                warnings.append(f"track {track.index}: note-off ch{kind.channel} pitch {kind.pitch} "
                                f"at tick {ev.tick} without a sounding note; dropped")
        for (channel, pitch), pending in sorted(open_notes.items()):
            for on_tick, vel in pending:
                warnings.append(f"track {track.index}: note-on ch{channel} pitch {pitch} at tick {on_tick} "
                                f"never released; closed at tick {track.end_tick}")
                spans.append((on_tick, track.end_tick, channel, pitch, vel))

    notes = []
    for on_tick, off_tick, channel, pitch, vel in spans:
        duration_beats = tick_to_beats(off_tick - on_tick, tpq)
        if duration_beats <= EPS:
            warnings.append(f"zero-length note pitch {pitch} at tick {on_tick} dropped")
            continue
        onset_sec = tick_to_seconds(on_tick, tpq, tmap)
        notes.append(Note(
            onset_beats=tick_to_beats(on_tick, tpq),
            duration_beats=duration_beats,
            channel=channel,
            pitch=pitch,
            velocity=vel,
            onset_sec=onset_sec,
            duration_sec=tick_to_seconds(off_tick, tpq, tmap) - onset_sec,
        ))
    if not notes:
        raise EmptyVoice(f"{source_id or 'document'}: voice selection {selector} yields no notes")
    return NoteMatrix(tuple(notes), source_id, False, tpq, tmap, tuple(warnings))


def _pick(group: list[Note], policy: MonoPolicy) -> Note:
    if policy is MonoPolicy.KEEP_HIGHER:
        return max(group, key=lambda n: n.pitch)
    if policy is MonoPolicy.KEEP_LOWER:
        return min(group, key=lambda n: n.pitch)
    return group[0]


def enforce_monophony(nm: NoteMatrix, policy: MonoPolicy | str = MonoPolicy.KEEP_HIGHER) -> NoteMatrix:
    """Reduce ``nm`` to one non-overlapping line.

    Notes starting within :data:`EPS` of a group's first onset are treated
    as simultaneous and one survives per ``policy`` (``first`` keeps the
    earliest row in matrix order). Each survivor that still sounds past the
    next onset is then cut back to end exactly there; notes cut down to
    nothing are removed.
    """
    policy = MonoPolicy(policy)
    survivors: list[Note] = []
    group: list[Note] = []
    for note in nm.notes:
        if group and note.onset_beats - group[0].onset_beats > EPS:
            survivors.append(_pick(group, policy))
            group = []
        group.append(note)
    if group:
        survivors.append(_pick(group, policy))

    line: list[Note] = []
    for note in survivors:
        while line and line[-1].offset_beats - note.onset_beats > EPS:
            prev = line.pop()
            duration = note.onset_beats - prev.onset_beats
            if duration > EPS:
                end_sec = nm.beats_to_seconds(note.onset_beats)
                line.append(replace(prev, duration_beats=duration, duration_sec=end_sec - prev.onset_sec))
                break
        line.append(note)

    if not line:
        raise EmptyVoice(f"{nm.source_id or 'matrix'}: no notes left after monophony enforcement")
    return replace(nm, notes=tuple(line), monophonic=True)


def matrix_summary(nm: NoteMatrix) -> dict:
    if not len(nm):
        raise EmptyVoice("empty note matrix")
    pitches = nm.pitches
    return {
        "note_count": len(nm),
        "total_duration_beats": float(nm.durations.sum()),
        "pitch_min": int(pitches.min()),
        "pitch_max": int(pitches.max()),
    }


def melody(pitches, durations=None, onsets=None, *, source_id: str = "", monophonic: bool | None = None,
           ticks_per_quarter: int = 480, tempo_map: TempoMap | None = None) -> NoteMatrix:
    """Build a matrix directly from pitches and beat durations.

    Without ``onsets`` the notes follow each other back to back and the
    matrix is flagged monophonic.
    """
    pitches = list(pitches)
    durations = [1.0] * len(pitches) if durations is None else [float(d) for d in durations]
    if onsets is None:
        onsets = np.concatenate([[0.0], np.cumsum(durations)[:-1]]).tolist() if pitches else []
        if monophonic is None:
            monophonic = True
    tmap = tempo_map or TempoMap(((0, DEFAULT_TEMPO),))
    to_sec = lambda b: tick_to_seconds(b * ticks_per_quarter, ticks_per_quarter, tmap)  # noqa: E731
    notes = tuple(
        Note(float(on), dur, 0, int(p), 64, to_sec(on), to_sec(on + dur) - to_sec(on))
        for p, dur, on in zip(pitches, durations, onsets)
    )
    return NoteMatrix(notes, source_id, bool(monophonic), ticks_per_quarter, tmap)
