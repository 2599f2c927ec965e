"""File formats: RTTM and UEM text, plus the MSDF v1 feature container.

MSDF ("multi-scale diarization features") is the toolkit's binary contract
between feature producers and this back-end: frame posteriors plus per-scale
segment tables with embeddings. All integers are little-endian; floats are
IEEE-754 little-endian (f32 payloads, f64 times). Layout:

    magic "MSDF" | u16 version=1
    u16 name_len, recording_id bytes | f64 frame_period
    u16 n_tracks, per track: u16 name_len + name, u32 n_frames, f32 * n_frames
    u16 n_scales, per scale: f64 window_s, f64 shift_s, u32 n_segments,
        u32 dim, (f64 start, f64 end) * n_segments, f32 * (n_segments * dim)
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, ParseError, ValidationError
from .segmenter import ScaleSpec
from .timeline import Annotation, Timeline
from .vad import PosteriorTrack

MAGIC = b"MSDF"
VERSION = 1


# ---------------------------------------------------------------------------
# RTTM
# ---------------------------------------------------------------------------

def parse_rttm(text: str | bytes) -> dict[str, Annotation]:
    """Parse SPEAKER records into per-recording annotations.

    Lines whose type field is not SPEAKER are ignored. Same-speaker overlaps
    merge; onset/duration must be valid numbers with duration > 0.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    entries: dict[str, list] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        fields = line.split()
        if not fields:
            continue
        if fields[0] != "SPEAKER":
            continue
        if len(fields) < 9:
            raise ParseError(f"SPEAKER record has {len(fields)} fields, need >= 9", lineno)
        recording = fields[1]
        try:
            onset = float(fields[3])
            duration = float(fields[4])
        except ValueError as exc:
            raise ParseError(f"malformed numeric field: {exc}", lineno)
        if duration <= 0:
            raise ParseError(f"duration must be > 0, got {duration}", lineno)
        if onset < 0:
            raise ParseError(f"onset must be >= 0, got {onset}", lineno)
        speaker = fields[7]
        entries.setdefault(recording, []).append(((onset, onset + duration), speaker))
    return {rec: Annotation(items) for rec, items in entries.items()}


def write_rttm(annotations: dict[str, Annotation]) -> str:
    """Serialize annotations as SPEAKER lines, 3 decimals, sorted records.

    Onset and end are rounded to the millisecond before the duration is
    formed, so re-parsing moves each endpoint by at most 0.5 ms and a second
    serialization is byte-identical.
    """
    records = []
    for recording in sorted(annotations):
        for interval, speaker in annotations[recording].itertracks():
            onset = round(interval.start, 3)
            end = round(interval.end, 3)
            duration = max(end - onset, 0.001)
            records.append((recording, onset, speaker, duration))
    records.sort(key=lambda r: (r[0], r[1], r[2]))
    lines = [
        f"SPEAKER {rec} 1 {onset:.3f} {duration:.3f} <NA> <NA> {speaker} <NA> <NA>"
        for rec, onset, speaker, duration in records
    ]
    return "".join(line + "\n" for line in lines)


# ---------------------------------------------------------------------------
# UEM
# ---------------------------------------------------------------------------

def parse_uem(text: str | bytes) -> dict[str, Timeline]:
    """Parse "recording channel onset offset" lines into timelines."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    spans: dict[str, list] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        fields = line.split()
        if not fields or fields[0].startswith(";"):
            continue
        if len(fields) < 4:
            raise ParseError(f"UEM record has {len(fields)} fields, need 4", lineno)
        recording = fields[0]
        try:
            onset = float(fields[2])
            offset = float(fields[3])
        except ValueError as exc:
            raise ParseError(f"malformed numeric field: {exc}", lineno)
        if offset <= onset:
            raise ParseError(f"offset {offset} must exceed onset {onset}", lineno)
        if onset < 0:
            raise ParseError(f"onset must be >= 0, got {onset}", lineno)
        spans.setdefault(recording, []).append((onset, offset))
    return {rec: Timeline(items) for rec, items in spans.items()}


# ---------------------------------------------------------------------------
# MSDF feature container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScaleEmbeddings:
    """Per-scale segment table: (start, end) rows plus embedding vectors."""

    scale: ScaleSpec
    times: np.ndarray    # (n, 2) float64
    vectors: np.ndarray  # (n, dim) float32

    def __post_init__(self):
        times = np.ascontiguousarray(np.asarray(self.times, dtype="<f8"))
        vectors = np.ascontiguousarray(np.asarray(self.vectors, dtype="<f4"))
        if times.ndim != 2 or times.shape[1] != 2:
            raise ValidationError(f"segment times must be (n, 2), got {times.shape}")
        if vectors.ndim != 2:
            raise ValidationError(f"embeddings must be (n, dim), got {vectors.shape}")
        if len(times) != len(vectors):
            raise ValidationError(
                f"segment count {len(times)} != embedding rows {len(vectors)}"
            )
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "vectors", vectors)

    @property
    def n_segments(self) -> int:
        return len(self.times)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class FeatureSet:
    """Everything the pipeline needs for one recording."""

    recording_id: str
    frame_period: float
    tracks: dict[str, PosteriorTrack] = field(default_factory=dict)
    scales: list[ScaleEmbeddings] = field(default_factory=list)

    def __post_init__(self):
        if not self.recording_id:
            raise ValidationError("recording_id must be non-empty")
        if self.frame_period <= 0:
            raise ValidationError(f"frame_period must be > 0, got {self.frame_period}")
        for name, track in self.tracks.items():
            if abs(track.frame_period - self.frame_period) > 1e-9:
                raise ValidationError(
                    f"track {name!r} frame_period {track.frame_period} != {self.frame_period}"
                )

    def track_names(self, prefix: str) -> list[str]:
        return sorted(name for name in self.tracks if name.startswith(prefix))

    def scale_specs(self) -> list[ScaleSpec]:
        return [se.scale for se in self.scales]


class _Reader:
    def __init__(self, data: bytes):
        self._buf = io.BytesIO(data)

    def take(self, n: int, section: str) -> bytes:
        chunk = self._buf.read(n)
        if len(chunk) != n:
            raise FormatError(f"truncated {section}: wanted {n} bytes, got {len(chunk)}")
        return chunk

    def u16(self, section: str) -> int:
        return struct.unpack("<H", self.take(2, section))[0]

    def u32(self, section: str) -> int:
        return struct.unpack("<I", self.take(4, section))[0]

    def f64(self, section: str) -> float:
        return struct.unpack("<d", self.take(8, section))[0]

    def name(self, section: str) -> str:
        n = self.u16(section)
        return self.take(n, section).decode("utf-8")

    def f32_array(self, count: int, section: str) -> np.ndarray:
        raw = self.take(4 * count, section)
        return np.frombuffer(raw, dtype="<f4").copy()

    def f64_array(self, count: int, section: str) -> np.ndarray:
        raw = self.take(8 * count, section)
        return np.frombuffer(raw, dtype="<f8").copy()

    def at_end(self) -> bool:
        pos = self._buf.tell()
        extra = self._buf.read(1)
        self._buf.seek(pos)
        return not extra


def read_features(path) -> FeatureSet:
    """Read and validate one MSDF v1 file."""
    with open(path, "rb") as fh:
        data = fh.read()
    return decode_features(data)


def decode_features(data: bytes) -> FeatureSet:
    r = _Reader(data)
    magic = r.take(4, "header")
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    version = r.u16("header")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}, expected {VERSION}")
    recording_id = r.name("header")
    frame_period = r.f64("header")
    if frame_period <= 0:
        raise FormatError(f"frame_period must be > 0, got {frame_period}")

    tracks: dict[str, PosteriorTrack] = {}
    n_tracks = r.u16("track table")
    for t in range(n_tracks):
        section = f"track[{t}]"
        name = r.name(section)
        n_frames = r.u32(section)
        values = r.f32_array(n_frames, f"{section} values")
        if values.size and (values.min() < 0.0 or values.max() > 1.0):
            raise ValidationError(f"{section} ({name!r}): posterior outside [0, 1]")
        tracks[name] = PosteriorTrack(frame_period, values.astype(np.float64))

    scales: list[ScaleEmbeddings] = []
    n_scales = r.u16("scale table")
    for s in range(n_scales):
        section = f"scale[{s}]"
        window = r.f64(section)
        shift = r.f64(section)
        n_segments = r.u32(section)
        dim = r.u32(section)
        times = r.f64_array(2 * n_segments, f"{section} segments").reshape(n_segments, 2)
        vectors = r.f32_array(n_segments * dim, f"{section} embeddings").reshape(n_segments, dim)
        scales.append(ScaleEmbeddings(ScaleSpec(window, shift), times, vectors))

    if not r.at_end():
        raise FormatError("trailing bytes after last scale section")
    return FeatureSet(recording_id, frame_period, tracks, scales)


def write_features(fs: FeatureSet, path) -> None:
    """Write one MSDF v1 file; the round-trip is bit-exact for f32 payloads."""
    with open(path, "wb") as fh:
        fh.write(encode_features(fs))


def encode_features(fs: FeatureSet) -> bytes:
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<H", VERSION))
    _write_name(out, fs.recording_id)
    out.write(struct.pack("<d", fs.frame_period))

    out.write(struct.pack("<H", len(fs.tracks)))
    for name, track in fs.tracks.items():
        values = np.asarray(track.values, dtype="<f4")
        if values.size and (values.min() < 0.0 or values.max() > 1.0):
            raise ValidationError(f"track {name!r}: posterior outside [0, 1]")
        _write_name(out, name)
        out.write(struct.pack("<I", len(values)))
        out.write(values.tobytes())

    out.write(struct.pack("<H", len(fs.scales)))
    for se in fs.scales:
        out.write(struct.pack("<dd", se.scale.window, se.scale.shift))
        out.write(struct.pack("<II", se.n_segments, se.dim))
        out.write(np.asarray(se.times, dtype="<f8").tobytes())
        out.write(np.asarray(se.vectors, dtype="<f4").tobytes())
    return out.getvalue()


def _write_name(out, name: str) -> None:
    raw = name.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise ValidationError(f"name too long: {len(raw)} bytes")
    out.write(struct.pack("<H", len(raw)))
    out.write(raw)


def describe_features(path) -> dict:
    """Header summary of an MSDF file (the `inspect` subcommand payload)."""
    fs = read_features(path)
    return {
        "recording_id": fs.recording_id,
        "frame_period": fs.frame_period,
        "tracks": [
            {"name": name, "n_frames": len(track)} for name, track in fs.tracks.items()
        ],
        "scales": [
            {
                "window": se.scale.window,
                "shift": se.scale.shift,
                "n_segments": se.n_segments,
                "dim": se.dim,
            }
            for se in fs.scales
        ],
    }
