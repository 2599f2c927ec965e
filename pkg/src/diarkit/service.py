"""FastAPI service exposing the diarization back-end.

The service is stateless: every request carries the file paths and parameter
overrides it needs, so any number of clients can share one instance. The CLI
is a thin client of these endpoints.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException

from . import __version__
from .config import PipelineConfig, load_config
from .errors import ConfigError, DiarkitError
from .formats import describe_features, parse_rttm, parse_uem, write_features, write_rttm
from .metrics import ScoringParams, combine_breakdowns, der
from .pipeline import run_diarize
from .schemas import (
    DerRecord,
    DiarizeRequest,
    DiarizeResponse,
    InspectRequest,
    InspectResponse,
    ScoreRequest,
    ScoreResponse,
    SynthRequest,
    SynthResponse,
)
from .synth import SynthSpec, generate
from .timeline import Annotation, Timeline


def _load_pipeline_config(path: str | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        return load_config(path)
    except FileNotFoundError:
        raise HTTPException(status_code=400, detail=f"config file not found: {path}")
    except DiarkitError as exc:
        raise HTTPException(status_code=400, detail=f"bad config: {exc}")


def _read_text(path: str, what: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise HTTPException(status_code=400, detail=f"cannot read {what}: {exc}")


def create_app() -> FastAPI:
    app = FastAPI(title="diarkit", version=__version__)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/diarize", response_model=DiarizeResponse)
    def diarize(req: DiarizeRequest) -> DiarizeResponse:
        cfg = _load_pipeline_config(req.config_path)
        try:
            cfg = cfg.override(stop_threshold=req.threshold, overlap_enabled=req.overlap)
        except ConfigError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        outcome = run_diarize(req.feature_files, cfg, jobs=req.jobs)
        return DiarizeResponse(
            rttm=write_rttm(outcome.annotations()),
            recordings=[r.stats() for r in outcome.results],
            failures=outcome.failures,
        )

    @app.post("/score", response_model=ScoreResponse)
    def score(req: ScoreRequest) -> ScoreResponse:
        try:
            params = ScoringParams(collar=req.collar, score_overlap=req.score_overlap)
        except DiarkitError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        try:
            ref = parse_rttm(_read_text(req.ref_rttm, "reference RTTM"))
            hyp = parse_rttm(_read_text(req.hyp_rttm, "hypothesis RTTM"))
            uem = parse_uem(_read_text(req.uem, "UEM")) if req.uem else {}
        except DiarkitError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

        extra = sorted(set(hyp) - set(ref))
        if extra:
            raise HTTPException(
                status_code=400,
                detail=f"hypothesis recordings missing from reference: {', '.join(extra)}",
            )

        warnings = []
        per_recording = []
        parts = []
        for recording in sorted(ref):
            scope = uem.get(recording)
            if scope is None:
                extent = ref[recording].speech().extent()
                scope = Timeline([extent]) if extent else Timeline()
                if req.uem:
                    warnings.append(f"{recording}: not in UEM, using reference extent")
            breakdown = der(ref[recording], hyp.get(recording, Annotation()), scope, params)
            parts.append(breakdown)
            per_recording.append(
                DerRecord(recording_id=recording, **breakdown.as_dict())
            )
        if not req.uem:
            warnings.append("no UEM supplied, scored over each reference extent")
        totals = combine_breakdowns(parts)
        return ScoreResponse(
            per_recording=per_recording,
            totals=DerRecord(recording_id="TOTAL", **totals.as_dict()),
            warnings=warnings,
        )

    @app.post("/synth", response_model=SynthResponse)
    def synth(req: SynthRequest) -> SynthResponse:
        cfg = _load_pipeline_config(req.config_path)
        try:
            spec = SynthSpec(
                n_speakers=req.n_speakers,
                length=req.length,
                turn_min=req.turn_min,
                turn_max=req.turn_max,
                overlap_fraction=req.overlap_fraction,
                dim=req.dim,
                centroid_min_angle=req.centroid_min_angle,
                noise_scale=req.noise_scale,
                seed=req.seed,
                frame_period=req.frame_period,
            )
            result = generate(spec, cfg)
        except DiarkitError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        try:
            write_features(result.features, req.features_path)
            Path(req.rttm_path).write_text(
                write_rttm({result.recording_id: result.reference}), encoding="utf-8"
            )
        except OSError as exc:
            raise HTTPException(status_code=400, detail=f"cannot write output: {exc}")
        return SynthResponse(
            recording_id=result.recording_id,
            features_path=req.features_path,
            rttm_path=req.rttm_path,
            speech_s=round(result.speech.duration(), 3),
            overlap_s=round(result.overlap.duration(), 3),
        )

    @app.post("/inspect", response_model=InspectResponse)
    def inspect(req: InspectRequest) -> InspectResponse:
        try:
            return InspectResponse(**describe_features(req.path))
        except FileNotFoundError:
            raise HTTPException(status_code=400, detail=f"no such file: {req.path}")
        except DiarkitError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    return app


app = create_app()
