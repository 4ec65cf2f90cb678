"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class VocalMirError(Exception):
    """Base class for all errors raised by this package."""


class SmfError(VocalMirError):
    """A Standard MIDI File could not be decoded.

    ``offset`` is the byte position in the input where decoding failed.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class MissingHeader(SmfError):
    pass


class UnsupportedFormat(SmfError):
    pass


class UnsupportedDivision(SmfError):
    pass


class TruncatedFile(SmfError):
    pass


class MalformedVlq(SmfError):
    pass


class RunningStatusWithoutPrior(SmfError):
    pass


class MalformedEvent(SmfError):
    """An event's payload is inconsistent with its type (e.g. a zero tempo)."""


class EmptyVoice(VocalMirError):
    """Voice selection or normalization left no notes."""


class NotMonophonic(VocalMirError):
    pass


class EmptyInput(VocalMirError, ValueError):
    pass


class LengthMismatch(VocalMirError, ValueError):
    pass


class ZeroVariance(VocalMirError, ValueError):
    pass


class DegenerateSample(VocalMirError, ValueError):
    pass


class NonConvergence(VocalMirError, ArithmeticError):
    pass


class ManifestError(VocalMirError):
    pass


class ManifestSyntax(ManifestError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateId(ManifestError):
    def __init__(self, song_id: str, line: int):
        super().__init__(f"line {line}: duplicate id {song_id!r}")
        self.song_id = song_id
        self.line = line


class InvalidField(ManifestError):
    def __init__(self, field: str, value: str, line: int):
        super().__init__(f"line {line}: invalid value {value!r} for {field}")
        self.field = field
        self.line = line


class CorpusEmpty(VocalMirError):
    """Every song in the corpus failed to process."""


class IoFailure(VocalMirError, OSError):
    pass
