"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class DiarizeRequest(BaseModel):
    feature_files: list[str]
    config_path: str | None = None
    threshold: float | None = None
    overlap: bool | None = None
    jobs: int = 1


class RecordingStats(BaseModel):
    recording_id: str
    speech_s: float
    n_base_segments: int
    n_clusters: int
    overlap_s: float
    overlap_skipped: int


class DiarizeResponse(BaseModel):
    rttm: str
    recordings: list[RecordingStats]
    failures: dict[str, str] = Field(default_factory=dict)


class ScoreRequest(BaseModel):
    ref_rttm: str
    hyp_rttm: str
    uem: str | None = None
    collar: float = 0.25
    score_overlap: bool = True


class DerRecord(BaseModel):
    recording_id: str
    missed: float
    false_alarm: float
    confusion: float
    scored: float
    der: float


class ScoreResponse(BaseModel):
    per_recording: list[DerRecord]
    totals: DerRecord
    warnings: list[str] = Field(default_factory=list)


class SynthRequest(BaseModel):
    n_speakers: int = Field(ge=1)
    length: float = 60.0
    turn_min: float = 2.0
    turn_max: float = 6.0
    overlap_fraction: float = 0.1
    dim: int = 64
    centroid_min_angle: float = 78.0
    noise_scale: float = 0.05
    seed: int = 0
    frame_period: float = 0.01
    features_path: str
    rttm_path: str
    config_path: str | None = None


class SynthResponse(BaseModel):
    recording_id: str
    features_path: str
    rttm_path: str
    speech_s: float
    overlap_s: float


class InspectRequest(BaseModel):
    path: str


class TrackInfo(BaseModel):
    name: str
    n_frames: int


class ScaleInfo(BaseModel):
    window: float
    shift: float
    n_segments: int
    dim: int


class InspectResponse(BaseModel):
    recording_id: str
    frame_period: float
    tracks: list[TrackInfo]
    scales: list[ScaleInfo]
