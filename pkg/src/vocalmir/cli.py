"""Command-line entry point: ``vocalmir {inspect,extract,analyze,correlate}``.

Exit codes: 0 on success (a corpus with some failed songs still counts),
1 on a fatal error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .corpus import (
    AnalysisConfig,
    ManifestEntry,
    analyze_corpus,
    correlate_feature,
    dumps_json,
    extract_song,
    load_manifest,
    render_report_charts,
    song_text,
    song_to_dict,
    write_report,
)
from .errors import VocalMirError
from .features import AggregateMode, IntervalWeighting, PitchWeighting
from .notematrix import MonoPolicy
from .smf import NoteOff, NoteOn, Tempo, read_smf

EXIT_OK, EXIT_FATAL, EXIT_USAGE = 0, 1, 2


def _channel(text: str) -> int:
    value = int(text)
    if not 0 <= value <= 15:
        raise argparse.ArgumentTypeError(f"channel must be 0..15, got {value}")
    return value


def _track(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"track must be >= 0, got {value}")
    return value


def _add_modes(p: argparse.ArgumentParser, aggregate: bool = False):
    p.add_argument("--mono-policy", choices=[m.value for m in MonoPolicy], default=MonoPolicy.KEEP_HIGHER.value,
                   help="which note survives when several start together")
    p.add_argument("--pc-weighting", choices=[m.value for m in PitchWeighting],
                   default=PitchWeighting.DURATION.value)
    p.add_argument("--iv-weighting", choices=[m.value for m in IntervalWeighting],
                   default=IntervalWeighting.COUNT.value)
    if aggregate:
        p.add_argument("--aggregate", choices=[m.value for m in AggregateMode],
                       default=AggregateMode.EQUAL_SONG_WEIGHT.value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vocalmir", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="summarize a MIDI file")
    p.add_argument("file", type=Path)

    p = sub.add_parser("extract", help="features of a single song")
    p.add_argument("file", type=Path)
    p.add_argument("--track", type=_track)
    p.add_argument("--channel", type=_channel)
    p.add_argument("--name-pattern")
    p.add_argument("--format", choices=["text", "json"], default="text")
    _add_modes(p)

    p = sub.add_parser("analyze", help="run a whole corpus")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="directory for report files")
    p.add_argument("--charts", type=Path, help="directory for SVG charts")
    p.add_argument("--format", choices=["text", "json", "csv"], action="append",
                   help="report format(s) to write; default all three")
    p.add_argument("--jobs", type=int, default=1)
    _add_modes(p, aggregate=True)

    p = sub.add_parser("correlate", help="correlate one feature with play counts")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--feature", choices=["ambitus", "entropy"], required=True)
    _add_modes(p)
    return parser


def _config(args) -> AnalysisConfig:
    return AnalysisConfig(
        mono_policy=args.mono_policy,
        pc_weighting=args.pc_weighting,
        iv_weighting=args.iv_weighting,
        aggregate=getattr(args, "aggregate", AggregateMode.EQUAL_SONG_WEIGHT),
        jobs=max(1, getattr(args, "jobs", 1)),
    )


def cmd_inspect(args) -> int:
    doc = read_smf(args.file)
    n = len(doc.tracks)
    print(f"format {int(doc.format)}, division {doc.ticks_per_quarter}, {n} track{'s' if n != 1 else ''}")
    for track in doc.tracks:
        notes = sum(isinstance(e.kind, NoteOn) and e.kind.velocity > 0 for e in track.events)
        tempos = sum(isinstance(e.kind, Tempo) for e in track.events)
        offs = sum(isinstance(e.kind, NoteOff) for e in track.events)
        channels = sorted({e.kind.channel for e in track.events if isinstance(e.kind, (NoteOn, NoteOff))})
        name = track.name if track.name is not None else "(unnamed)"
        print(f"  track {track.index}: {name}  notes={notes} note_offs={offs} tempo_changes={tempos} "
              f"channels={','.join(map(str, channels)) or '-'} end_tick={track.end_tick}")
    for w in doc.warnings:
        print(f"  warning: {w}")
    return EXIT_OK


def cmd_extract(args) -> int:
    entry = ManifestEntry(
        id=args.file.stem, title=args.file.stem, midi_path=str(args.file),
        track=args.track, channel=args.channel, name_pattern=args.name_pattern,
    )
    record = extract_song(entry, _config(args))
    if args.format == "json":
        sys.stdout.write(dumps_json(song_to_dict(record)))
    else:
        sys.stdout.write(song_text(record))
    if not record.ok:
        print(f"error: {record.error}", file=sys.stderr)
        return EXIT_FATAL
    return EXIT_OK


def cmd_analyze(args) -> int:
    entries = load_manifest(args.manifest)
    report = analyze_corpus(entries, _config(args))
    args.out.mkdir(parents=True, exist_ok=True)
    for fmt in args.format or ["json", "csv", "text"]:
        suffix = "txt" if fmt == "text" else fmt
        write_report(report, fmt, args.out / f"report.{suffix}")
    if args.charts is not None:
        render_report_charts(report, args.charts)
    failed = [s for s in report.songs if not s.ok]
    print(f"{len(report.songs) - len(failed)} of {len(report.songs)} songs analyzed; reports in {args.out}")
    for s in failed:
        print(f"  failed: {s.entry.id}: {s.error}", file=sys.stderr)
    return EXIT_OK


def cmd_correlate(args) -> int:
    entries = load_manifest(args.manifest)
    config = _config(args)
    songs = [extract_song(e, config) for e in entries]
    for s in songs:
        if not s.ok:
            print(f"  skipped: {s.entry.id}: {s.error}", file=sys.stderr)
    c = correlate_feature(songs, args.feature)
    print(f"feature {c.feature}")
    print(f"r {c.r:.6f}")
    print(f"n {c.n}")
    print(f"t {c.t_statistic:.6f}")
    print(f"dof {c.dof}")
    print(f"p {c.p_two_tailed:.6f}")
    return EXIT_OK


COMMANDS = {"inspect": cmd_inspect, "extract": cmd_extract, "analyze": cmd_analyze, "correlate": cmd_correlate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (VocalMirError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
