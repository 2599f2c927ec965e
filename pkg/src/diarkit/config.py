"""Pipeline configuration: defaults, YAML loading, feature-file validation."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .clustering import ClusterParams
from .errors import ConfigError
from .metrics import ScoringParams
from .overlap import OverlapAssignParams
from .segmenter import ScaleSpec
from .vad import BinarizeParams

# Default scales, finest last; none of these values comes from a published
# recipe, they are tunable starting points.
DEFAULT_SCALES = (
    ScaleSpec(window=1.5, shift=0.75),
    ScaleSpec(window=1.0, shift=0.5),
    ScaleSpec(window=0.5, shift=0.25),
)


@dataclass(frozen=True)
class VadConfig:
    """Ensemble weights (None = equal) plus binarization parameters."""

    weights: tuple[float, ...] | None = None
    binarize: BinarizeParams = field(default_factory=lambda: BinarizeParams(
        onset=0.5,
        offset=0.5,
        min_duration_on=0.2,
        min_duration_off=0.1,
    ))


@dataclass(frozen=True)
class PipelineConfig:
    vad: VadConfig = field(default_factory=VadConfig)
    scales: tuple[ScaleSpec, ...] = DEFAULT_SCALES
    fusion_weights: tuple[float, ...] = (1.0, 1.0, 1.0)
    clustering: ClusterParams = field(default_factory=lambda: ClusterParams(
        stop_threshold=0.45, min_speakers=1, max_speakers=20,
    ))
    overlap: OverlapAssignParams = field(default_factory=lambda: OverlapAssignParams(
        enabled=True,
        binarize=BinarizeParams(onset=0.5, offset=0.5, min_duration_on=0.1),
    ))
    scoring: ScoringParams = field(default_factory=ScoringParams)
    frame_period: float | None = None  # None = accept whatever the file says
    sparsify_top_k: int | None = None
    validate_segments: str = "off"     # off | speech | extent

    def __post_init__(self):
        if len(self.fusion_weights) != len(self.scales):
            raise ConfigError(
                f"{len(self.fusion_weights)} fusion weights for {len(self.scales)} scales"
            )
        if self.validate_segments not in ("off", "speech", "extent"):
            raise ConfigError(
                f"validate_segments must be off/speech/extent, got {self.validate_segments!r}"
            )
        if self.frame_period is not None and self.frame_period <= 0:
            raise ConfigError("frame_period must be > 0 when set")

    @property
    def base_scale_index(self) -> int:
        """The finest scale: smallest window, labels are produced there."""
        windows = [s.window for s in self.scales]
        return windows.index(min(windows))

    def override(self, *, stop_threshold: float | None = None,
                 overlap_enabled: bool | None = None) -> "PipelineConfig":
        cfg = self
        if stop_threshold is not None:
            cfg = replace(cfg, clustering=replace(cfg.clustering, stop_threshold=stop_threshold))
        if overlap_enabled is not None:
            cfg = replace(cfg, overlap=replace(cfg.overlap, enabled=overlap_enabled))
        return cfg


def _binarize_from(node: dict, where: str) -> BinarizeParams:
    known = {
        "onset", "offset", "min_duration_on", "min_duration_off",
        "pad_onset", "pad_offset", "smooth_window",
    }
    unknown = set(node) - known
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    try:
        return BinarizeParams(**node)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}")


def config_from_dict(data: dict) -> PipelineConfig:
    """Build a config from a parsed YAML/JSON tree; unknown keys are errors."""
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a mapping, got {type(data).__name__}")
    known = {
        "vad", "scales", "fusion", "clustering", "overlap", "scoring",
        "frame_period", "affinity", "validate_segments",
    }
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config sections {sorted(unknown)}")

    kwargs: dict = {}

    vad_node = dict(data.get("vad", {}))
    weights = vad_node.pop("weights", None)
    if weights is not None:
        weights = tuple(float(w) for w in weights)
    kwargs["vad"] = VadConfig(weights=weights, binarize=_binarize_from(vad_node, "vad"))

    if "scales" in data:
        scales = []
        for idx, node in enumerate(data["scales"]):
            try:
                scales.append(ScaleSpec(float(node["window"]), float(node["shift"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"scales[{idx}]: {exc}")
        kwargs["scales"] = tuple(scales)

    fusion_node = data.get("fusion", {})
    if "weights" in fusion_node:
        kwargs["fusion_weights"] = tuple(float(w) for w in fusion_node["weights"])
    elif "scales" in kwargs:
        kwargs["fusion_weights"] = tuple(1.0 for _ in kwargs["scales"])

    if "clustering" in data:
        try:
            kwargs["clustering"] = ClusterParams(**data["clustering"])
        except TypeError as exc:
            raise ConfigError(f"clustering: {exc}")

    if "overlap" in data:
        node = dict(data["overlap"])
        enabled = bool(node.pop("enabled", True))
        kwargs["overlap"] = OverlapAssignParams(
            enabled=enabled, binarize=_binarize_from(node, "overlap")
        )

    if "scoring" in data:
        try:
            kwargs["scoring"] = ScoringParams(**data["scoring"])
        except TypeError as exc:
            raise ConfigError(f"scoring: {exc}")

    if "frame_period" in data and data["frame_period"] is not None:
        kwargs["frame_period"] = float(data["frame_period"])

    affinity_node = data.get("affinity", {})
    if "sparsify_top_k" in affinity_node and affinity_node["sparsify_top_k"] is not None:
        kwargs["sparsify_top_k"] = int(affinity_node["sparsify_top_k"])

    if "validate_segments" in data:
        kwargs["validate_segments"] = str(data["validate_segments"])

    return PipelineConfig(**kwargs)


def load_config(path) -> PipelineConfig:
    """Load a YAML config file; missing sections fall back to defaults."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}")
    if data is None:
        data = {}
    return config_from_dict(data)
