"""
Reading a MIDI file
===================

Build a small two-track file with the fixture writer, decode it, and turn the
vocal track into a note matrix.
"""

import tempfile
from pathlib import Path

import numpy as np

from vocalmir import VoiceSelector, build_tempo_map, events_to_notes, read_smf, tick_to_seconds
from vocalmir.testing import FixtureTrack, write_smf_bytes

# A conductor track with a tempo change after two beats, and a vocal line.
conductor = FixtureTrack(name="Conductor").tempo(0, 500_000).tempo(192, 750_000)
vocal = FixtureTrack(name="Vocal", running_status=True)
for i, pitch in enumerate([67, 67, 69, 67, 72, 71]):
    vocal.note(i * 96, 96, pitch, off_as_zero_velocity=True)

workdir = Path(tempfile.mkdtemp())
path = workdir / "demo.mid"
path.write_bytes(write_smf_bytes([conductor, vocal], division=96))

doc = read_smf(path)
print(f"format {int(doc.format)}, {doc.ticks_per_quarter} ticks per quarter")
for track in doc.tracks:
    print(f"  track {track.index}: {track.name!r}, {len(track.events)} events")

# The tempo map drives the seconds columns.
tempo = build_tempo_map(doc)
print("tempo changes:", tempo.changes)
print("beat 4 falls at", tick_to_seconds(384, doc.ticks_per_quarter, tempo), "s")

nm = events_to_notes(doc, VoiceSelector(name_pattern="vocal"), source_id="demo")
print(nm.to_csv())

# The matrix is also available as a plain numpy array.
arr = nm.to_array()
print("mean duration (s):", np.round(arr[:, 6].mean(), 4))
