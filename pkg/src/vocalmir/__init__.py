"""
vocalmir
========

Vocal-melody analysis for Standard MIDI File corpora.

The pipeline runs in four stages, one module each:

``smf``         decode MIDI files and their tempo maps
``notematrix``  pair notes, pick the vocal voice, remove overlaps
``features``    ambitus, pitch-class entropy, interval distributions
``stats``       means, Pearson correlation, exact p-values

``corpus`` ties them together over a manifest of songs and writes reports
and SVG charts; ``cli`` exposes the same as a command-line tool.
"""

from .errors import *  # noqa: F401,F403
from .smf import (
    SmfDocument,
    TempoMap,
    build_tempo_map,
    parse_smf,
    parse_vlq,
    read_smf,
    tick_to_beats,
    tick_to_seconds,
)
from .notematrix import (
    MonoPolicy,
    Note,
    NoteMatrix,
    VoiceSelector,
    enforce_monophony,
    events_to_notes,
    matrix_summary,
    melody,
)
from .features import (
    AggregateMode,
    IntervalWeighting,
    PitchWeighting,
    aggregate_interval_distribution,
    ambitus,
    fold_intervals,
    interval_distribution,
    pc_distribution,
    pitch_class_entropy,
)
from .stats import (
    CorrelationResult,
    Sample,
    correlate,
    mean,
    p_value_two_tailed,
    pearson_r,
    regularized_incomplete_beta,
)
from .corpus import (
    AnalysisConfig,
    CorpusReport,
    ManifestEntry,
    SongRecord,
    analyze_corpus,
    load_manifest,
    write_report,
)
from .charts import render_bar_chart, render_scatter

__version__ = "0.1.0"
