import pytest
from hypothesis import given, strategies as st

from vocalmir.errors import (
    MalformedEvent,
    MalformedVlq,
    MissingHeader,
    RunningStatusWithoutPrior,
    TruncatedFile,
    UnsupportedDivision,
    UnsupportedFormat,
)
from vocalmir.smf import (
    DEFAULT_TEMPO,
    NoteOff,
    NoteOn,
    Other,
    SmfFormat,
    Tempo,
    TempoMap,
    TrackName,
    build_tempo_map,
    parse_smf,
    parse_vlq,
    tick_to_beats,
    tick_to_seconds,
)
from vocalmir.testing import FixtureTrack, encode_vlq, write_smf_bytes

VLQ_BOUNDARIES = [0, 127, 128, 16383, 16384, 2097151, 2097152, 0x0FFFFFFF]


def one_note_file(division=96):
    return write_smf_bytes([FixtureTrack().note(0, 96, 60)], division)


def header(fmt=0, ntracks=1, division=96):
    return b"MThd" + (6).to_bytes(4, "big") + fmt.to_bytes(2, "big") + ntracks.to_bytes(2, "big") \
        + division.to_bytes(2, "big")


def mtrk(body: bytes) -> bytes:
    return b"MTrk" + len(body).to_bytes(4, "big") + body


# --- variable-length quantities -------------------------------------------------

@pytest.mark.parametrize("data, expected", [
    (b"\x00", (0, 1)),
    (b"\x81\x00", (128, 2)),
    (b"\xff\xff\xff\x7f", (0x0FFFFFFF, 4)),
])
def test_parse_vlq_examples(data, expected):
    assert parse_vlq(data, 0) == expected


def test_encoder_oracle_agrees_on_examples():
    assert encode_vlq(128) == b"\x81\x00"
    assert encode_vlq(0x0FFFFFFF) == b"\xff\xff\xff\x7f"


@pytest.mark.parametrize("value", VLQ_BOUNDARIES)
def test_vlq_boundaries_round_trip(value):
    encoded = encode_vlq(value)
    assert parse_vlq(encoded) == (value, len(encoded))
    # and with surrounding bytes
    assert parse_vlq(b"\x42" + encoded + b"\x99", 1) == (value, len(encoded))


@given(st.integers(0, 0x0FFFFFFF))
def test_vlq_round_trip_property(value):
    encoded = encode_vlq(value)
    assert parse_vlq(encoded) == (value, len(encoded))


def test_vlq_too_long():
    with pytest.raises(MalformedVlq) as exc:
        parse_vlq(b"\x80\x80\x80\x80\x00", 0)
    assert exc.value.offset == 0


def test_vlq_ends_mid_quantity():
    with pytest.raises(MalformedVlq) as exc:
        parse_vlq(b"\x00\x81", 1)
    assert exc.value.offset == 2


# --- whole files ------------------------------------------------------------------

def test_minimal_format0_file():
    doc = parse_smf(one_note_file())
    assert doc.format is SmfFormat.SINGLE
    assert doc.ticks_per_quarter == 96
    assert len(doc.tracks) == 1
    events = doc.tracks[0].events
    assert len(events) == 3
    assert events[0].tick == 0 and events[0].kind == NoteOn(0, 60, 64)
    assert events[1].tick == 96 and events[1].kind == NoteOff(0, 60, 0)
    assert events[2].kind.is_end_of_track


def test_format2_rejected():
    with pytest.raises(UnsupportedFormat):
        parse_smf(header(fmt=2) + mtrk(b"\x00\xff\x2f\x00"))


def test_smpte_division_rejected():
    with pytest.raises(UnsupportedDivision) as exc:
        parse_smf(header(division=0xE728) + mtrk(b"\x00\xff\x2f\x00"))
    assert exc.value.offset == 12


def test_missing_header():
    with pytest.raises(MissingHeader):
        parse_smf(b"RIFF" + bytes(20))


def test_second_track_length_past_end():
    track = mtrk(b"\x00\xff\x2f\x00")
    bad = b"MTrk" + (100).to_bytes(4, "big") + b"\x00\xff\x2f\x00"
    data = header(fmt=1, ntracks=2) + track + bad
    with pytest.raises(TruncatedFile) as exc:
        parse_smf(data)
    assert exc.value.offset == 14 + len(track) + 4


def test_fewer_tracks_than_declared():
    with pytest.raises(TruncatedFile):
        parse_smf(header(fmt=1, ntracks=3) + mtrk(b"\x00\xff\x2f\x00"))


def test_truncated_inside_event():
    # chunk length is honest but the note-on lacks its velocity byte
    with pytest.raises(TruncatedFile):
        parse_smf(header() + mtrk(b"\x00\x90\x3c"))


def test_running_status():
    body = b"\x00\x90\x3c\x40" + b"\x60\x3c\x00" + b"\x00\x3e\x40" + b"\x60\x3e\x00" + b"\x00\xff\x2f\x00"
    doc = parse_smf(header() + mtrk(body))
    kinds = [e.kind for e in doc.tracks[0].events]
    assert kinds[:4] == [NoteOn(0, 60, 64), NoteOn(0, 60, 0), NoteOn(0, 62, 64), NoteOn(0, 62, 0)]
    assert [e.tick for e in doc.tracks[0].events] == [0, 96, 96, 192, 192]


def test_running_status_matches_writer():
    track = FixtureTrack(running_status=True)
    for i, p in enumerate([60, 62, 64]):
        track.note(i * 96, 96, p, off_as_zero_velocity=True)
    plain = FixtureTrack()
    for i, p in enumerate([60, 62, 64]):
        plain.note(i * 96, 96, p, off_as_zero_velocity=True)
    compressed, full = write_smf_bytes([track]), write_smf_bytes([plain])
    assert len(compressed) < len(full)
    assert parse_smf(compressed).tracks == parse_smf(full).tracks


def test_running_status_without_prior():
    with pytest.raises(RunningStatusWithoutPrior) as exc:
        parse_smf(header() + mtrk(b"\x00\x3c\x40"))
    assert exc.value.offset == 14 + 8 + 1


def test_meta_cancels_running_status():
    body = b"\x00\x90\x3c\x40" + b"\x00\xff\x01\x02hi" + b"\x10\x3c\x00" + b"\x00\xff\x2f\x00"
    with pytest.raises(RunningStatusWithoutPrior):
        parse_smf(header() + mtrk(body))


def test_sysex_cancels_running_status():
    body = b"\x00\x90\x3c\x40" + b"\x00\xf0\x02\x7e\xf7" + b"\x10\x3c\x00" + b"\x00\xff\x2f\x00"
    with pytest.raises(RunningStatusWithoutPrior):
        parse_smf(header() + mtrk(body))


def test_unknown_events_preserved():
    track = FixtureTrack(name="Vocal")
    track.meta(0, 0x05, "la".encode())  # lyric
    track.sysex(0, b"\x7e\x7f\x09\x01\xf7")
    track.raw(0, b"\xc0\x05")  # program change
    track.note(0, 96, 60)
    doc = parse_smf(write_smf_bytes([track]))
    kinds = [e.kind for e in doc.tracks[0].events]
    assert kinds[0] == TrackName("Vocal")
    assert Other(0xFF, b"la", 0x05) in kinds
    assert Other(0xF0, b"\x7e\x7f\x09\x01\xf7") in kinds
    assert Other(0xC0, b"\x05") in kinds
    assert doc.tracks[0].name == "Vocal"


def test_bytes_after_end_of_track_skipped_with_warning():
    body = b"\x00\x90\x3c\x40\x60\x80\x3c\x00\x00\xff\x2f\x00" + b"\x00\x90\x40\x40"
    doc = parse_smf(header() + mtrk(body))
    assert len(doc.tracks[0].events) == 3
    assert any("after end-of-track" in w for w in doc.warnings)


def test_missing_end_of_track_appended():
    doc = parse_smf(header() + mtrk(b"\x00\x90\x3c\x40\x60\x80\x3c\x00"))
    assert doc.tracks[0].events[-1].kind.is_end_of_track
    assert doc.tracks[0].events[-1].tick == 96
    assert doc.warnings


def test_zero_tempo_rejected():
    body = b"\x00\xff\x51\x03\x00\x00\x00\x00\xff\x2f\x00"
    with pytest.raises(MalformedEvent):
        parse_smf(header() + mtrk(body))


def test_alien_chunk_skipped():
    data = header() + b"XFIH" + (3).to_bytes(4, "big") + b"abc" + mtrk(b"\x00\xff\x2f\x00")
    doc = parse_smf(data)
    assert len(doc.tracks) == 1


notes_strategy = st.lists(
    st.tuples(st.integers(0, 5000), st.integers(1, 500), st.integers(0, 127), st.integers(1, 127),
              st.integers(0, 15)),
    max_size=30,
)


@given(notes_strategy, st.lists(st.tuples(st.integers(0, 5000), st.integers(1, 0xFFFFFF)), max_size=4),
       st.integers(1, 0x7FFF), st.booleans())
def test_round_trip_through_writer(notes, tempos, division, running):
    track = FixtureTrack(running_status=running)
    for tick, us in tempos:
        track.tempo(tick, us)
    for on, dur, pitch, vel, ch in notes:
        track.note(on, dur, pitch, vel, ch)
    doc = parse_smf(write_smf_bytes([track], division))
    assert doc.ticks_per_quarter == division
    events = doc.tracks[0].events
    expected = sorted(track.events, key=lambda e: e[0])
    assert len(events) == len(expected) + 1
    for (tick, msg), ev in zip(expected, events):
        assert ev.tick == tick
        if msg[0] == 0xFF:
            assert ev.kind == Tempo(int.from_bytes(msg[3:6], "big"))
        elif msg[0] >> 4 == 0x9:
            assert ev.kind == NoteOn(msg[0] & 0x0F, msg[1], msg[2])
        else:
            assert ev.kind == NoteOff(msg[0] & 0x0F, msg[1], msg[2])


# --- tempo map and time conversion ------------------------------------------------

def test_tempo_map_default():
    assert build_tempo_map(parse_smf(one_note_file())).changes == ((0, DEFAULT_TEMPO),)


def test_tempo_map_ordering():
    track = FixtureTrack().tempo(960, 250000).tempo(0, 500000).note(0, 96, 60)
    assert build_tempo_map(parse_smf(write_smf_bytes([track]))).changes == ((0, 500000), (960, 250000))


def test_tempo_map_same_tick_later_wins():
    conductor = FixtureTrack().tempo(0, 400000).tempo(480, 300000)
    other = FixtureTrack().tempo(480, 200000).note(0, 96, 60)
    doc = parse_smf(write_smf_bytes([conductor, other]))
    assert build_tempo_map(doc).changes == ((0, 400000), (480, 200000))


def test_tempo_map_implicit_start():
    doc = parse_smf(write_smf_bytes([FixtureTrack().tempo(96, 250000).note(0, 96, 60)]))
    assert build_tempo_map(doc).changes == ((0, DEFAULT_TEMPO), (96, 250000))


def test_tempo_map_validation():
    with pytest.raises(ValueError):
        TempoMap(((0, 500000), (0, 400000)))
    with pytest.raises(ValueError):
        TempoMap(((5, 500000),))


@pytest.mark.parametrize("tick, expected", [(0, 0.0), (96, 1.0), (144, 1.5)])
def test_tick_to_beats(tick, expected):
    assert tick_to_beats(tick, 96) == expected


def test_tick_to_seconds_examples():
    default = TempoMap()
    assert tick_to_seconds(96, 96, default) == 0.5
    assert tick_to_seconds(0, 96, default) == 0.0
    two = TempoMap(((0, 500000), (96, 250000)))
    assert tick_to_seconds(192, 96, two) == pytest.approx(0.75, abs=1e-15)
    assert tick_to_seconds(96, 96, two) == pytest.approx(0.5, abs=1e-15)


tempo_maps = st.lists(st.tuples(st.integers(1, 100000), st.integers(1, 0xFFFFFF)), max_size=6).map(
    lambda extra: TempoMap(tuple(sorted({0: 500000, **dict(extra)}.items())))
)


@given(tempo_maps, st.integers(1, 2000), st.lists(st.integers(0, 200000), min_size=2, max_size=20))
def test_tick_to_seconds_monotone(tmap, tpq, ticks):
    ticks = sorted(ticks)
    secs = [tick_to_seconds(t, tpq, tmap) for t in ticks]
    assert all(a <= b for a, b in zip(secs, secs[1:]))


@given(st.integers(0, 10**7), st.integers(1, 0x7FFF), st.integers(1, 0xFFFFFF))
def test_single_tempo_exact(tick, tpq, us):
    tmap = TempoMap(((0, us),))
    assert tick_to_seconds(tick, tpq, tmap) == tick_to_beats(tick, tpq) * us / 10**6
