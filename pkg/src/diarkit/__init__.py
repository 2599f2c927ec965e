"""diarkit: speaker-diarization back-end and scoring toolkit."""

from .clustering import ClusterParams, ClusterResult, ahc, relabel_by_first_appearance
from .config import PipelineConfig, VadConfig, load_config
from .errors import (
    ConfigError,
    DiarkitError,
    FormatError,
    ParseError,
    PipelineError,
    ValidationError,
)
from .formats import (
    FeatureSet,
    ScaleEmbeddings,
    parse_rttm,
    parse_uem,
    read_features,
    write_features,
    write_rttm,
)
from .metrics import DerBreakdown, ScoringParams, combine_breakdowns, der, optimal_mapping
from .overlap import OverlapAssignParams, assign_second_speaker, detect_overlap
from .pipeline import DiarizeOutcome, RecordingResult, diarize_recording, run_diarize
from .segmenter import ScaleSpec, Segment, build_scale_map, segment_region
from .synth import SynthSpec, generate
from .timeline import Annotation, TimeInterval, Timeline
from .vad import BinarizeParams, PosteriorTrack, binarize, fuse_posteriors, median_smooth

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "BinarizeParams",
    "ClusterParams",
    "ClusterResult",
    "ConfigError",
    "DerBreakdown",
    "DiarizeOutcome",
    "DiarkitError",
    "FeatureSet",
    "FormatError",
    "OverlapAssignParams",
    "ParseError",
    "PipelineConfig",
    "PipelineError",
    "PosteriorTrack",
    "RecordingResult",
    "ScaleEmbeddings",
    "ScaleSpec",
    "ScoringParams",
    "Segment",
    "SynthSpec",
    "TimeInterval",
    "Timeline",
    "VadConfig",
    "ValidationError",
    "ahc",
    "assign_second_speaker",
    "binarize",
    "build_scale_map",
    "combine_breakdowns",
    "der",
    "detect_overlap",
    "diarize_recording",
    "fuse_posteriors",
    "generate",
    "load_config",
    "median_smooth",
    "optimal_mapping",
    "parse_rttm",
    "parse_uem",
    "read_features",
    "relabel_by_first_appearance",
    "run_diarize",
    "segment_region",
    "write_features",
    "write_rttm",
]
