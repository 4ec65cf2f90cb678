"""
Melodic features
================

Ambitus, pitch-class entropy and the interval profile of a few melodies.
"""

import numpy as np

from vocalmir import (
    ambitus,
    enforce_monophony,
    fold_intervals,
    interval_distribution,
    melody,
    pc_distribution,
    pitch_class_entropy,
)
from vocalmir.testing import folk_melody

scale = melody([60, 62, 64, 65, 67, 69, 71, 72])
print("C major scale")
print("  ambitus:", ambitus(scale).semitones, "semitones")
print("  entropy:", round(float(pitch_class_entropy(pc_distribution(scale))), 6))
print("  folded intervals:", {k: round(v, 4) for k, v in fold_intervals(interval_distribution(scale)).as_dict().items() if v})

# Entropy ignores register and tempo: transpose by a fifth, double every duration.
line = folk_melody(np.random.default_rng(3), n_notes=40)
durs = np.random.default_rng(4).choice([0.5, 1.0, 2.0], size=len(line))
a = pitch_class_entropy(pc_distribution(melody(line, durs)))
b = pitch_class_entropy(pc_distribution(melody(np.add(line, 7), durs * 2)))
print(f"\nfolk line: entropy {float(a):.6f}, transposed and stretched {float(b):.6f}")

# Repeated notes land in the P1 bin.
ranking = fold_intervals(interval_distribution(melody(line))).ranking()
print("top intervals:", ranking[:4])

# A chord on the downbeat collapses to its highest note; overlaps are trimmed.
chordal = melody([48, 52, 55, 60, 62], [2, 2, 2, 1.5, 1], onsets=[0, 0, 0, 1, 2])
mono = enforce_monophony(chordal, "high")
for note in mono:
    print(f"  pitch {note.pitch} onset {note.onset_beats} dur {note.duration_beats}")
