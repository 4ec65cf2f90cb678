"""
Standard MIDI File decoding.

Reads format 0 and 1 files into an immutable :class:`SmfDocument`, keeps
unknown meta and sysex events opaque, and converts tick positions to beats
and seconds through a merged tempo map.

Only metrical (ticks-per-quarter) time division is accepted. SMPTE divisions
and format 2 sequences are refused with an error rather than guessed at.
"""

from __future__ import annotations

import bisect
import struct
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Union

from .errors import (
    MalformedEvent,
    MalformedVlq,
    MissingHeader,
    RunningStatusWithoutPrior,
    TruncatedFile,
    UnsupportedDivision,
    UnsupportedFormat,
)

__all__ = [
    "DEFAULT_TEMPO",
    "SmfFormat",
    "NoteOn",
    "NoteOff",
    "Tempo",
    "TrackName",
    "Other",
    "TimedEvent",
    "Track",
    "SmfDocument",
    "TempoMap",
    "parse_vlq",
    "parse_smf",
    "read_smf",
    "build_tempo_map",
    "tick_to_beats",
    "tick_to_seconds",
]

#: microseconds per quarter note when a file carries no tempo (120 BPM)
DEFAULT_TEMPO = 500_000

META = 0xFF
SYSEX = 0xF0
SYSEX_ESCAPE = 0xF7
META_TRACK_NAME = 0x03
META_END_OF_TRACK = 0x2F
META_TEMPO = 0x51

# data bytes following each channel-voice status nibble
_CHANNEL_DATA_LENGTH = {0x8: 2, 0x9: 2, 0xA: 2, 0xB: 2, 0xC: 1, 0xD: 1, 0xE: 2}


class SmfFormat(IntEnum):
    SINGLE = 0
    MULTI_TRACK = 1


@dataclass(frozen=True)
class NoteOn:
    channel: int
    pitch: int
    velocity: int


@dataclass(frozen=True)
class NoteOff:
    channel: int
    pitch: int
    velocity: int


@dataclass(frozen=True)
class Tempo:
    microseconds_per_quarter: int

    @property
    def bpm(self) -> float:
        return 60_000_000 / self.microseconds_per_quarter


@dataclass(frozen=True)
class TrackName:
    text: str


@dataclass(frozen=True)
class Other:
    """Any event not modelled above, kept verbatim.

    ``status`` is the (possibly implied) status byte. For meta events
    ``meta_type`` holds the type byte; ``data`` is the payload without the
    status, type and length prefix.
    """

    status: int
    data: bytes = b""
    meta_type: int | None = None

    @property
    def is_end_of_track(self) -> bool:
        return self.status == META and self.meta_type == META_END_OF_TRACK


EventKind = Union[NoteOn, NoteOff, Tempo, TrackName, Other]


@dataclass(frozen=True)
class TimedEvent:
    tick: int
    kind: EventKind


@dataclass(frozen=True)
class Track:
    index: int
    events: tuple[TimedEvent, ...]
    name: str | None = None

    @property
    def end_tick(self) -> int:
        return self.events[-1].tick if self.events else 0


@dataclass(frozen=True)
class SmfDocument:
    format: SmfFormat
    ticks_per_quarter: int
    tracks: tuple[Track, ...]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def iter_events(self):
        """Yield ``(track_index, event)`` in file order."""
        for track in self.tracks:
            for ev in track.events:
                yield track.index, ev


@dataclass(frozen=True)
class TempoMap:
    """Tempo changes as ``(tick, microseconds_per_quarter)``, ticks strictly increasing."""

    changes: tuple[tuple[int, int], ...] = ((0, DEFAULT_TEMPO),)

    def __post_init__(self):
        if not self.changes or self.changes[0][0] != 0:
            raise ValueError("tempo map must start at tick 0")
        ticks = [t for t, _ in self.changes]
        if any(b <= a for a, b in zip(ticks, ticks[1:])):
            raise ValueError("tempo map ticks must be strictly increasing")
        if any(us <= 0 for _, us in self.changes):
            raise ValueError("tempo values must be positive")


def parse_vlq(data: bytes, offset: int = 0, end: int | None = None) -> tuple[int, int]:
    """Decode a variable-length quantity starting at ``offset``.

    Returns ``(value, bytes_consumed)``. Bytes at or beyond ``end`` (default:
    the end of ``data``) are treated as missing.
    """
    end = len(data) if end is None else min(end, len(data))
    if not 0 <= offset < end:
        raise MalformedVlq("variable-length quantity starts past end of input", offset)
    value = 0
    for i in range(4):
        pos = offset + i
        if pos >= end:
            raise MalformedVlq("input ends inside variable-length quantity", pos)
        byte = data[pos]
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, i + 1
    raise MalformedVlq("variable-length quantity longer than 4 bytes", offset)


class _Reader:
    def __init__(self, data: bytes, start: int, end: int):
        self.data = data
        self.pos = start
        self.end = end

    def need(self, n: int, what: str):
        if self.pos + n > self.end:
            raise TruncatedFile(f"unexpected end of track while reading {what}", self.pos)

    def byte(self, what: str) -> int:
        self.need(1, what)
        b = self.data[self.pos]
        self.pos += 1
        return b

    def take(self, n: int, what: str) -> bytes:
        self.need(n, what)
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return bytes(out)

    def vlq(self) -> int:
        try:
            value, used = parse_vlq(self.data, self.pos, self.end)
        except MalformedVlq as exc:
            if exc.offset >= self.end:
                raise TruncatedFile("unexpected end of track inside delta time", exc.offset) from None
            raise
        self.pos += used
        return value


def _decode_text(payload: bytes) -> str:
    try:
        return payload.decode("utf-8")
    except UnicodeDecodeError:
        return payload.decode("latin-1")


def _parse_track(data: bytes, start: int, end: int, index: int, warnings: list[str]) -> Track:
    r = _Reader(data, start, end)
    events: list[TimedEvent] = []
    tick = 0
    running: int | None = None
    name: str | None = None
    ended = False

    while r.pos < r.end:
        tick += r.vlq()
        status_pos = r.pos
        status = r.byte("status")

        if status < 0x80:
            if running is None:
                raise RunningStatusWithoutPrior("data byte with no running status in effect", status_pos)
            r.pos -= 1
            status = running

        if status == META:
            running = None
            meta_type = r.byte("meta type")
            length = r.vlq()
            payload = r.take(length, "meta payload")
            if meta_type == META_TEMPO:
                if length != 3:
                    raise MalformedEvent(f"tempo event with length {length}", status_pos)
                us = int.from_bytes(payload, "big")
                if us == 0:
                    raise MalformedEvent("tempo of zero microseconds per quarter", status_pos)
                kind = Tempo(us)
            elif meta_type == META_TRACK_NAME:
                kind = TrackName(_decode_text(payload))
                if name is None:
                    name = kind.text
            else:
                kind = Other(META, payload, meta_type)
            events.append(TimedEvent(tick, kind))
            if meta_type == META_END_OF_TRACK:
                ended = True
                break
        elif status in (SYSEX, SYSEX_ESCAPE):
            running = None
            length = r.vlq()
            events.append(TimedEvent(tick, Other(status, r.take(length, "sysex payload"))))
        elif status >= 0xF0:
            # system common / real-time bytes are not legal in files; keep them inert
            running = None
            events.append(TimedEvent(tick, Other(status)))
        else:
            running = status
            nibble, channel = status >> 4, status & 0x0F
            payload = r.take(_CHANNEL_DATA_LENGTH[nibble], "channel message")
            if any(b & 0x80 for b in payload):
                raise MalformedEvent("status byte found inside channel message data", status_pos)
            if nibble == 0x9:
                kind = NoteOn(channel, payload[0], payload[1])
            elif nibble == 0x8:
                kind = NoteOff(channel, payload[0], payload[1])
            else:
                kind = Other(status, payload)
            events.append(TimedEvent(tick, kind))

    if ended and r.pos < r.end:
        warnings.append(f"track {index}: {r.end - r.pos} byte(s) after end-of-track skipped")
    if not ended:
        warnings.append(f"track {index}: missing end-of-track, appended at tick {tick}")
        events.append(TimedEvent(tick, Other(META, b"", META_END_OF_TRACK)))
    return Track(index=index, events=tuple(events), name=name)


def parse_smf(data: bytes) -> SmfDocument:
    """Decode a complete Standard MIDI File held in memory."""
    data = bytes(data)
    if len(data) < 8 or data[:4] != b"MThd":
        raise MissingHeader("file does not start with an MThd chunk", 0)
    (header_len,) = struct.unpack(">I", data[4:8])
    if header_len < 6:
        raise MissingHeader(f"MThd chunk length {header_len} is shorter than 6", 4)
    if len(data) < 8 + header_len:
        raise TruncatedFile("header chunk extends past end of file", len(data))
    fmt, ntracks, division = struct.unpack(">HHH", data[8:14])
    if fmt == 2:
        raise UnsupportedFormat("format 2 (independent sequences) is not supported", 8)
    if fmt not in (0, 1):
        raise UnsupportedFormat(f"unknown format {fmt}", 8)
    if division & 0x8000:
        raise UnsupportedDivision("SMPTE time division is not supported", 12)
    if division == 0:
        raise UnsupportedDivision("time division of zero ticks per quarter", 12)

    warnings: list[str] = []
    tracks: list[Track] = []
    pos = 8 + header_len
    while len(tracks) < ntracks:
        if pos + 8 > len(data):
            raise TruncatedFile(f"expected {ntracks} tracks, found {len(tracks)}", pos)
        chunk_id = data[pos:pos + 4]
        (length,) = struct.unpack(">I", data[pos + 4:pos + 8])
        body = pos + 8
        if body + length > len(data):
            raise TruncatedFile(
                f"chunk {chunk_id!r} declares {length} bytes but only {len(data) - body} remain", pos + 4
            )
        if chunk_id == b"MTrk":
            tracks.append(_parse_track(data, body, body + length, len(tracks), warnings))
        else:
            warnings.append(f"unknown chunk {chunk_id!r} at offset {pos} skipped")
        pos = body + length

    return SmfDocument(SmfFormat(fmt), division, tuple(tracks), tuple(warnings))


def read_smf(path) -> SmfDocument:
    with open(path, "rb") as fh:
        return parse_smf(fh.read())


def build_tempo_map(doc: SmfDocument) -> TempoMap:
    """Merge tempo events from every track; at equal ticks the later one in file order wins."""
    by_tick: dict[int, int] = {}
    for _, ev in doc.iter_events():
        if isinstance(ev.kind, Tempo):
            by_tick[ev.tick] = ev.kind.microseconds_per_quarter
    by_tick.setdefault(0, DEFAULT_TEMPO)
    return TempoMap(tuple(sorted(by_tick.items())))


def tick_to_beats(tick: float, ticks_per_quarter: int) -> float:
    return tick / ticks_per_quarter


def tick_to_seconds(tick: float, ticks_per_quarter: int, tempo_map: TempoMap) -> float:
    """Wall-clock time of ``tick``, integrating across tempo segments."""
    changes = tempo_map.changes
    last = bisect.bisect_right(changes, (tick, float("inf"))) - 1
    seconds = 0.0
    for (start, us), (stop, _) in zip(changes[:last], changes[1:last + 1]):
        seconds += tick_to_beats(stop - start, ticks_per_quarter) * us / 1e6
    start, us = changes[max(last, 0)]
    return seconds + tick_to_beats(tick - start, ticks_per_quarter) * us / 1e6
