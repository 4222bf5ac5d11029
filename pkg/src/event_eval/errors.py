"""Exception hierarchy shared by every module.

Two broad families matter for the CLI exit codes: ValidationError (bad data
or configuration, exit 1) and InputError (unreadable or structurally broken
input files, exit 2).
"""

from __future__ import annotations


class EventEvalError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(EventEvalError, ValueError):
    """Invalid in-memory data, parameters, or configuration."""


class InputError(EventEvalError):
    """Missing or structurally malformed input file."""


def _with_context(msg: str, video_id: str | None, path: str | None) -> str:
    parts = [msg]
    if video_id is not None:
        parts.append(f"video_id={video_id!r}")
    if path is not None:
        parts.append(f"path={path}")
    return " | ".join(parts)


class LengthMismatch(ValidationError):
    def __init__(self, n_scores: int, n_labels: int,
                 video_id: str | None = None, path: str | None = None):
        self.n_scores = n_scores
        self.n_labels = n_labels
        self.video_id = video_id
        super().__init__(_with_context(
            f"length mismatch: {n_scores} scores vs {n_labels} labels",
            video_id, path))


class NonFiniteScore(ValidationError):
    def __init__(self, index: int, video_id: str | None = None,
                 path: str | None = None):
        self.index = index
        self.video_id = video_id
        super().__init__(_with_context(
            f"non-finite score at frame {index}", video_id, path))


class NonBinaryLabel(ValidationError):
    def __init__(self, index: int, video_id: str | None = None,
                 path: str | None = None):
        self.index = index
        self.video_id = video_id
        super().__init__(_with_context(
            f"label at frame {index} is not 0 or 1", video_id, path))


class DegenerateLabels(ValidationError):
    """All labels identical where both classes are required."""


class InvalidSigma(ValidationError):
    """Gaussian kernel sigma must be strictly positive."""


class InvalidWindow(ValidationError):
    """Majority-vote window/stride outside 1 <= stride <= window <= length."""


class EventOutOfRange(ValidationError):
    """Event extends beyond the frame range of its video."""


class BadLength(ValidationError):
    """Branch error sequences whose lengths do not satisfy |long| = 3*|short|."""


class WindowOutOfRange(ValidationError):
    """Scored window extends beyond the frame range of its video."""


class VideoIdMismatch(ValidationError):
    """Paired inputs refer to different video ids."""


class DuplicateVideoId(InputError):
    def __init__(self, video_id: str, path: str | None = None):
        self.video_id = video_id
        super().__init__(_with_context(
            f"duplicate video_id {video_id!r} in manifest", None, path))


class MissingFile(InputError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"referenced file does not exist: {path}")


class ParseError(InputError):
    def __init__(self, path: str, line: int | None, msg: str):
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {msg}")
