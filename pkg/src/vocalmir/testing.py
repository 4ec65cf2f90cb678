"""
Fixture support: a byte-level Standard MIDI File writer and synthetic melodies.

The writer shares no code with :mod:`vocalmir.smf`; tests use it as an
independent oracle for the parser. It is not meant as a general-purpose MIDI
authoring tool.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def encode_vlq(value: int) -> bytes:
    """Brute-force VLQ encoder: peel 7-bit groups off the low end."""
    if not 0 <= value <= 0x0FFFFFFF:
        raise ValueError(f"value {value} outside VLQ range")
    groups = [value & 0x7F]
    value >>= 7
    while value:
        groups.append(value & 0x7F)
        value >>= 7
    groups.reverse()
    return bytes([g | 0x80 for g in groups[:-1]] + [groups[-1]])


@dataclass
class FixtureTrack:
    """Events as ``(absolute_tick, raw_message_bytes)``; delta times are derived on write."""

    events: list[tuple[int, bytes]] = field(default_factory=list)
    name: str | None = None
    running_status: bool = False

    def note(self, tick: int, duration: int, pitch: int, velocity: int = 64, channel: int = 0,
             off_as_zero_velocity: bool = False):
        self.note_on(tick, pitch, velocity, channel)
        if off_as_zero_velocity:
            self.note_on(tick + duration, pitch, 0, channel)
        else:
            self.note_off(tick + duration, pitch, 0, channel)
        return self

    def note_on(self, tick: int, pitch: int, velocity: int = 64, channel: int = 0):
        self.events.append((tick, bytes([0x90 | channel, pitch, velocity])))
        return self

    def note_off(self, tick: int, pitch: int, velocity: int = 0, channel: int = 0):
        self.events.append((tick, bytes([0x80 | channel, pitch, velocity])))
        return self

    def tempo(self, tick: int, us_per_quarter: int):
        self.events.append((tick, b"\xff\x51\x03" + us_per_quarter.to_bytes(3, "big")))
        return self

    def meta(self, tick: int, meta_type: int, payload: bytes):
        self.events.append((tick, bytes([0xFF, meta_type]) + encode_vlq(len(payload)) + payload))
        return self

    def sysex(self, tick: int, payload: bytes):
        self.events.append((tick, b"\xf0" + encode_vlq(len(payload)) + payload))
        return self

    def raw(self, tick: int, message: bytes):
        self.events.append((tick, message))
        return self

    def encode(self, end_tick: int | None = None) -> bytes:
        body = bytearray()
        timeline = sorted(self.events, key=lambda e: e[0])  # stable: keeps insertion order at equal ticks
        if self.name is not None:
            text = self.name.encode("utf-8")
            timeline.insert(0, (0, b"\xff\x03" + encode_vlq(len(text)) + text))
        last_tick = 0
        previous_status = None
        for tick, message in timeline:
            body += encode_vlq(tick - last_tick)
            last_tick = tick
            status = message[0]
            if self.running_status and status < 0xF0 and status == previous_status:
                body += message[1:]
            else:
                body += message
            previous_status = status if status < 0xF0 else None
        final = last_tick if end_tick is None else max(end_tick, last_tick)
        body += encode_vlq(final - last_tick) + b"\xff\x2f\x00"
        return b"MTrk" + len(body).to_bytes(4, "big") + bytes(body)


def write_smf_bytes(tracks: list[FixtureTrack], division: int = 96, fmt: int | None = None) -> bytes:
    if fmt is None:
        fmt = 0 if len(tracks) == 1 else 1
    header = b"MThd" + (6).to_bytes(4, "big") + fmt.to_bytes(2, "big")
    header += len(tracks).to_bytes(2, "big") + division.to_bytes(2, "big")
    return header + b"".join(t.encode() for t in tracks)


def melody_track(pitches, durations=None, division: int = 96, channel: int = 0, name: str | None = None,
                 tempo: int | None = None) -> FixtureTrack:
    """One note after another; durations are in quarter notes (default 1 each)."""
    if durations is None:
        durations = [1.0] * len(pitches)
    track = FixtureTrack(name=name)
    if tempo is not None:
        track.tempo(0, tempo)
    tick = 0
    for pitch, dur in zip(pitches, durations):
        length = int(round(dur * division))
        track.note(tick, length, int(pitch), channel=channel)
        tick += length
    return track


def melody_smf(pitches, durations=None, division: int = 96, name: str | None = "Vocal", **kw) -> bytes:
    return write_smf_bytes([melody_track(pitches, durations, division, name=name, **kw)], division)


MAJOR_SCALE = (0, 2, 4, 5, 7, 9, 11)


def folk_melody(rng: np.random.Generator, n_notes: int = 48, repeat_share: float = 0.35,
                low: int = 55, high: int = 79) -> list[int]:
    """Random diatonic melody with a controlled share of repeated notes.

    The line walks over the degrees of a random major key: mostly steps,
    some thirds and fourths, rare fifths and octaves. Moves that would leave
    ``low..high`` are mirrored.
    """
    tonic = int(rng.integers(0, 12))
    scale = [p for p in range(low, high + 1) if (p - tonic) % 12 in MAJOR_SCALE]
    moves = np.array([1, 2, 3, 4, 7])
    weights = np.array([0.62, 0.18, 0.11, 0.06, 0.03])
    idx = int(rng.integers(len(scale) // 4, 3 * len(scale) // 4))
    out = [scale[idx]]
    is_repeat = np.zeros(n_notes - 1, dtype=bool)
    n_repeats = int(np.ceil(repeat_share * (n_notes - 1)))
    is_repeat[rng.choice(n_notes - 1, size=n_repeats, replace=False)] = True
    for rep in is_repeat:
        if not rep:
            step = int(rng.choice(moves, p=weights)) * (1 if rng.random() < 0.5 else -1)
            if not 0 <= idx + step < len(scale):
                step = -step
            idx += step
        out.append(scale[idx])
    return out


def write_synthetic_corpus(directory, n_songs: int = 12, seed: int = 20240501,
                           repeat_share: float = 0.35, with_accompaniment: bool = True) -> Path:
    """Write ``n_songs`` format-1 MIDI files plus ``manifest.csv``; return the manifest path.

    Track 0 carries the tempo and track 1 the vocal line (named "Vocal").
    Track 2, when present, holds chordal accompaniment on channel 1 that
    voice selection must ignore.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n_songs):
        pitches = folk_melody(rng, n_notes=int(rng.integers(32, 64)), repeat_share=repeat_share)
        durations = rng.choice([0.5, 1.0, 1.5, 2.0], size=len(pitches), p=[0.4, 0.4, 0.1, 0.1])
        division = 96
        conductor = FixtureTrack(name="Conductor").tempo(0, int(rng.integers(400_000, 700_000)))
        vocal = melody_track(pitches, durations, division, channel=0, name="Vocal")
        tracks = [conductor, vocal]
        if with_accompaniment:
            accomp = FixtureTrack(name="Guitar")
            total = int(sum(round(d * division) for d in durations))
            for bar in range(0, total, 4 * division):
                root = int(rng.integers(40, 52))
                for offset in (0, 4, 7):
                    accomp.note(bar, 4 * division, root + offset, channel=1)
            tracks.append(accomp)
        name = f"song{i:02d}.mid"
        (directory / name).write_bytes(write_smf_bytes(tracks, division))
        rows.append({
            "id": f"s{i:02d}",
            "title": f"Synthetic song {i}",
            "midi_path": name,
            "track": "",
            "channel": "",
            "name_pattern": "vocal",
            "plays": str(int(rng.integers(100_000, 50_000_000))),
        })
    manifest = directory / "manifest.csv"
    with open(manifest, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return manifest


def plays_for_target_r(x, r: float, rng: np.random.Generator, centre: float = 5e7, spread: float = 1e7):
    """Integer play counts whose Pearson correlation with ``x`` is ``r`` up to rounding."""
    x = np.asarray(x, dtype=float)
    xs = (x - x.mean()) / np.linalg.norm(x - x.mean())
    noise = rng.standard_normal(len(x))
    noise -= noise.mean()
    noise -= noise.dot(xs) * xs
    noise /= np.linalg.norm(noise)
    y = r * xs + np.sqrt(1.0 - r * r) * noise
    return np.rint(centre + spread * np.sqrt(len(x)) * y).astype(np.int64)
