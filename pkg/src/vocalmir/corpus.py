"""
Corpus runs: manifest loading, per-song extraction, aggregates, correlations
and deterministic report/chart output.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import charts
from .errors import (
    CorpusEmpty,
    DegenerateSample,
    DuplicateId,
    InvalidField,
    IoFailure,
    ManifestSyntax,
    VocalMirError,
    ZeroVariance,
)
from .features import (
    INTERVAL_NAMES,
    AggregateMode,
    AmbitusResult,
    EntropyResult,
    FoldedIntervalView,
    IntervalDistribution,
    IntervalWeighting,
    PitchWeighting,
    aggregate_interval_distribution,
    ambitus,
    fold_intervals,
    interval_distribution,
    pc_distribution,
    pitch_class_entropy,
)
from .notematrix import MonoPolicy, NoteMatrix, VoiceSelector, enforce_monophony, events_to_notes
from .smf import read_smf
from .stats import CorrelationResult, correlate, mean

__all__ = [
    "MANIFEST_COLUMNS",
    "ManifestEntry",
    "AnalysisConfig",
    "SongRecord",
    "CorpusReport",
    "load_manifest",
    "extract_song",
    "correlate_feature",
    "analyze_corpus",
    "song_to_dict",
    "report_to_dict",
    "dumps_json",
    "write_report",
    "render_report_charts",
]

log = logging.getLogger(__name__)

MANIFEST_COLUMNS = ("id", "title", "midi_path", "track", "channel", "name_pattern", "plays")
CORRELATED_FEATURES = ("ambitus", "entropy")


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    title: str
    midi_path: str
    track: int | None = None
    channel: int | None = None
    name_pattern: str | None = None
    plays: int | None = None

    def selector(self) -> VoiceSelector:
        if self.track is None and self.channel is None and not self.name_pattern:
            return VoiceSelector.all()
        return VoiceSelector(self.track, self.channel, self.name_pattern)


@dataclass(frozen=True)
class AnalysisConfig:
    mono_policy: MonoPolicy = MonoPolicy.KEEP_HIGHER
    pc_weighting: PitchWeighting = PitchWeighting.DURATION
    iv_weighting: IntervalWeighting = IntervalWeighting.COUNT
    aggregate: AggregateMode = AggregateMode.EQUAL_SONG_WEIGHT
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "mono_policy", MonoPolicy(self.mono_policy))
        object.__setattr__(self, "pc_weighting", PitchWeighting(self.pc_weighting))
        object.__setattr__(self, "iv_weighting", IntervalWeighting(self.iv_weighting))
        object.__setattr__(self, "aggregate", AggregateMode(self.aggregate))

    def snapshot(self) -> dict:
        # jobs is left out: it never changes results
        return {
            "mono_policy": self.mono_policy.value,
            "pc_weighting": self.pc_weighting.value,
            "iv_weighting": self.iv_weighting.value,
            "aggregate": self.aggregate.value,
        }


@dataclass(frozen=True)
class SongRecord:
    entry: ManifestEntry
    ambitus: AmbitusResult | None = None
    entropy: EntropyResult | None = None
    intervals: IntervalDistribution | None = None
    note_count: int = 0
    warnings: tuple[str, ...] = ()
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class CorpusReport:
    songs: tuple[SongRecord, ...]
    mean_ambitus: float
    mean_entropy: float
    aggregate_intervals: IntervalDistribution
    folded_intervals: FoldedIntervalView
    correlations: tuple[CorrelationResult, ...]
    config: dict
    notices: tuple[str, ...] = field(default=())

    @property
    def succeeded(self) -> list[SongRecord]:
        return [s for s in self.songs if s.ok]


def _optional_int(row: dict, name: str, line: int, lo: int = 0, hi: int | None = None) -> int | None:
    raw = (row.get(name) or "").strip()
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise InvalidField(name, raw, line) from None
    if value < lo or (hi is not None and value > hi):
        raise InvalidField(name, raw, line)
    return value


def load_manifest(path) -> list[ManifestEntry]:
    """Read a corpus manifest CSV.

    Relative ``midi_path`` values are resolved against the manifest's
    directory. Lines starting with ``#`` are comments.
    """
    path = Path(path)
    base = path.parent
    with open(path, encoding="utf-8", newline="") as fh:
        numbered = [(i, ln) for i, ln in enumerate(fh, start=1) if ln.strip() and not ln.lstrip().startswith("#")]
    if not numbered:
        raise ManifestSyntax("manifest has no header", 1)
    header_line, header = numbered[0]
    columns = [c.strip() for c in next(csv.reader([header]))]
    if tuple(columns) != MANIFEST_COLUMNS:
        raise ManifestSyntax(f"expected header {','.join(MANIFEST_COLUMNS)}, got {','.join(columns)}", header_line)

    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    for line, text in numbered[1:]:
        cells = next(csv.reader([text]))
        if len(cells) != len(MANIFEST_COLUMNS):
            raise ManifestSyntax(f"expected {len(MANIFEST_COLUMNS)} fields, got {len(cells)}", line)
        row = dict(zip(MANIFEST_COLUMNS, cells))
        song_id = row["id"].strip()
        if not song_id:
            raise InvalidField("id", row["id"], line)
        if song_id in seen:
            raise DuplicateId(song_id, line)
        seen.add(song_id)
        midi = row["midi_path"].strip()
        if not midi:
            raise InvalidField("midi_path", row["midi_path"], line)
        if not Path(midi).is_absolute():
            midi = str(base / midi)
        entries.append(ManifestEntry(
            id=song_id,
            title=row["title"].strip(),
            midi_path=midi,
            track=_optional_int(row, "track", line),
            channel=_optional_int(row, "channel", line, 0, 15),
            name_pattern=row["name_pattern"].strip() or None,
            plays=_optional_int(row, "plays", line),
        ))
    return entries


def extract_song(entry: ManifestEntry, config: AnalysisConfig = AnalysisConfig()) -> SongRecord:
    """Run the single-song pipeline; any library error becomes an error record."""
    try:
        doc = read_smf(entry.midi_path)
        raw = events_to_notes(doc, entry.selector(), source_id=entry.id)
        mono: NoteMatrix = enforce_monophony(raw, config.mono_policy)
        return SongRecord(
            entry=entry,
            ambitus=ambitus(mono),
            entropy=pitch_class_entropy(pc_distribution(mono, config.pc_weighting)),
            intervals=interval_distribution(mono, config.iv_weighting),
            note_count=len(mono),
            warnings=doc.warnings + raw.warnings,
        )
    except (VocalMirError, OSError) as exc:
        log.warning("%s: %s", entry.id, exc)
        return SongRecord(entry=entry, error=f"{type(exc).__name__}: {exc}")


def _feature_value(song: SongRecord, feature: str) -> float:
    if feature == "ambitus":
        return float(song.ambitus.semitones)
    return song.entropy.normalized_entropy


def correlate_feature(songs: Sequence[SongRecord], feature: str) -> CorrelationResult:
    """Correlate ``feature`` with play counts over songs that have both."""
    usable = [s for s in songs if s.ok and s.entry.plays is not None]
    x = [_feature_value(s, feature) for s in usable]
    y = [float(s.entry.plays) for s in usable]
    if len(usable) < 3:
        raise DegenerateSample(f"{feature}: only {len(usable)} song(s) with plays; need at least 3")
    return correlate(x, y, feature)


def analyze_corpus(entries: Sequence[ManifestEntry], config: AnalysisConfig = AnalysisConfig()) -> CorpusReport:
    if config.jobs > 1 and len(entries) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            songs = tuple(pool.map(extract_song, entries, [config] * len(entries)))
    else:
        songs = tuple(extract_song(e, config) for e in entries)
    ok = [s for s in songs if s.ok]
    if not ok:
        raise CorpusEmpty(f"all {len(songs)} song(s) failed")

    notices = []
    correlations = []
    for feature in CORRELATED_FEATURES:
        try:
            correlations.append(correlate_feature(ok, feature))
        except (DegenerateSample, ZeroVariance) as exc:
            notices.append(f"{feature} vs plays skipped: {exc}")

    agg = aggregate_interval_distribution([s.intervals for s in ok], config.aggregate)
    return CorpusReport(
        songs=songs,
        mean_ambitus=mean([s.ambitus.semitones for s in ok]),
        mean_entropy=mean([s.entropy.normalized_entropy for s in ok]),
        aggregate_intervals=agg,
        folded_intervals=fold_intervals(agg),
        correlations=tuple(correlations),
        config=config.snapshot(),
        notices=tuple(notices),
    )


def song_to_dict(s: SongRecord) -> dict:
    d = {"id": s.entry.id, "title": s.entry.title, "plays": s.entry.plays}
    if s.ok:
        d.update({
            "note_count": s.note_count,
            "ambitus": {"semitones": s.ambitus.semitones, "lowest": s.ambitus.lowest_pitch,
                        "highest": s.ambitus.highest_pitch},
            "entropy": s.entropy.normalized_entropy,
            "intervals": {
                "signed": s.intervals.signed_bins.tolist(),
                "folded": fold_intervals(s.intervals).unsigned_bins.tolist(),
                "overflow": s.intervals.overflow_count,
            },
        })
    else:
        d.update({"note_count": 0, "ambitus": None, "entropy": None, "intervals": None, "error": s.error})
    d["warnings"] = list(s.warnings)
    return d


def report_to_dict(report: CorpusReport) -> dict:
    agg = report.aggregate_intervals
    return {
        "config": report.config,
        "songs": [song_to_dict(s) for s in report.songs],
        "means": {"ambitus": report.mean_ambitus, "entropy": report.mean_entropy},
        "aggregate_intervals": {
            "signed": agg.signed_bins.tolist(),
            "folded": report.folded_intervals.unsigned_bins.tolist(),
            "folded_names": list(INTERVAL_NAMES),
            "overflow": agg.overflow_count,
            "interval_count": agg.interval_count,
        },
        "correlations": [
            {"feature": c.feature, "r": c.r, "n": c.n, "t": c.t_statistic, "dof": c.dof,
             "p_two_tailed": c.p_two_tailed}
            for c in report.correlations
        ],
        "notices": list(report.notices),
    }


def _json(value, indent: int = 0) -> str:
    """JSON with every float printed to 6 decimal places."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isinf(v):
            return '"inf"' if v > 0 else '"-inf"'
        return f"{v + 0.0:.6f}"
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_json(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in value):
            return "[" + ", ".join(_json(v) for v in value) + "]"
        return "[\n" + ",\n".join(inner + _json(v, indent + 1) for v in value) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps_json(data) -> str:
    return _json(data) + "\n"


def _fmt(v) -> str:
    return "" if v is None else f"{float(v):.6f}"


def report_csv(report: CorpusReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "title", "ambitus", "entropy", "note_count", "plays"])
    for s in report.songs:
        w.writerow([
            s.entry.id,
            s.entry.title,
            s.ambitus.semitones if s.ok else "",
            _fmt(s.entropy.normalized_entropy) if s.ok else "",
            s.note_count if s.ok else "",
            "" if s.entry.plays is None else s.entry.plays,
        ])
    return buf.getvalue()


def song_text(s: SongRecord) -> str:
    if not s.ok:
        return f"{s.entry.id}  {s.entry.title}\n  error: {s.error}\n"
    folded = fold_intervals(s.intervals)
    lines = [
        f"{s.entry.id}  {s.entry.title}",
        f"  notes:    {s.note_count}",
        f"  ambitus:  {s.ambitus.semitones} semitones ({s.ambitus.lowest_pitch}-{s.ambitus.highest_pitch})",
        f"  entropy:  {s.entropy.normalized_entropy:.6f}",
        "  intervals: " + "  ".join(f"{name} {v:.6f}" for name, v in folded.ranking() if v > 0),
    ]
    if s.intervals.overflow_count:
        lines.append(f"  intervals wider than an octave: {s.intervals.overflow_count}")
    lines += [f"  warning: {w}" for w in s.warnings]
    return "\n".join(lines) + "\n"


def report_text(report: CorpusReport) -> str:
    out = ["Corpus report", "=============", ""]
    out += [f"{k}: {v}" for k, v in report.config.items()]
    out.append("")
    out.append(f"{'id':<12}{'ambitus':>9}{'entropy':>12}{'notes':>8}{'plays':>14}  title")
    for s in report.songs:
        if s.ok:
            out.append(f"{s.entry.id:<12}{s.ambitus.semitones:>9}{s.entropy.normalized_entropy:>12.6f}"
                       f"{s.note_count:>8}{'' if s.entry.plays is None else s.entry.plays:>14}  {s.entry.title}")
        else:
            out.append(f"{s.entry.id:<12}{'FAILED':>9}{'':>12}{'':>8}{'':>14}  {s.entry.title}: {s.error}")
    out += ["", f"mean ambitus: {report.mean_ambitus:.6f}", f"mean entropy: {report.mean_entropy:.6f}", ""]
    out.append("aggregate interval distribution (folded):")
    out += [f"  {name:<3} {v:.6f}" for name, v in report.folded_intervals.ranking()]
    if report.aggregate_intervals.overflow_count:
        out.append(f"  intervals wider than an octave: {report.aggregate_intervals.overflow_count}")
    out.append("")
    for c in report.correlations:
        out.append(f"{c.feature} vs plays: r = {c.r:.6f}, n = {c.n}, t = {c.t_statistic:.6f}, "
                   f"dof = {c.dof}, p = {c.p_two_tailed:.6f}")
    out += report.notices
    return "\n".join(out).rstrip("\n") + "\n"


_RENDERERS = {
    "json": lambda r: dumps_json(report_to_dict(r)),
    "csv": report_csv,
    "text": report_text,
}


def write_report(report: CorpusReport, format: str, path) -> None:
    try:
        text = _RENDERERS[format.lower()](report)
    except KeyError:
        raise ValueError(f"unknown report format {format!r}") from None
    try:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def render_report_charts(report: CorpusReport, directory) -> list[Path]:
    """Write the standard chart set into ``directory``; return the paths written in order."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create {directory}: {exc}") from exc
    ok = report.succeeded
    written = []

    def emit(name, fn, *args, **kw):
        path = directory / name
        fn(*args, path, **kw)
        written.append(path)

    emit("ambitus.svg", charts.render_bar_chart, [(s.entry.title, s.ambitus.semitones) for s in ok],
         "Ambitus per song", x_label="Song", y_label="Ambitus (semitones)")
    emit("entropy.svg", charts.render_bar_chart, [(s.entry.title, s.entropy.normalized_entropy) for s in ok],
         "Pitch-class entropy per song", x_label="Song", y_label="Normalized entropy")
    emit("intervals.svg", charts.render_bar_chart, list(zip(INTERVAL_NAMES, report.folded_intervals.unsigned_bins)),
         "Aggregate interval distribution", x_label="Interval", y_label="Relative frequency")
    for c in report.correlations:
        pts = [(float(s.entry.plays), _feature_value(s, c.feature), s.entry.title)
               for s in ok if s.entry.plays is not None]
        emit(f"{c.feature}_vs_plays.svg", charts.render_scatter, pts,
             f"{c.feature.capitalize()} vs plays (r = {c.r:.3f}, p = {c.p_two_tailed:.3f})",
             x_label="Plays", y_label=c.feature.capitalize())
    return written
