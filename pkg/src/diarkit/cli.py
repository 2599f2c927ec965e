"""Command-line client for the diarization service.

Subcommands mirror the service endpoints one to one. By default each command
spins the service up in-process (no network); pass ``--server URL`` to talk
to a running instance instead. Exit codes: 0 success, 1 per-recording
failures, 2 usage or configuration errors.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx

EXIT_OK = 0
EXIT_RECORDING_FAILURES = 1
EXIT_USAGE = 2


def _post(server: str | None, path: str, payload: dict) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            return client.post(path, json=payload)

    from .service import create_app

    async def call() -> httpx.Response:
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://diarkit.local", timeout=600.0
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(call())


def _fail(response: httpx.Response) -> int:
    try:
        detail = response.json().get("detail", response.text)
    except ValueError:
        detail = response.text
    print(f"error: {detail}", file=sys.stderr)
    return EXIT_USAGE


def cmd_diarize(args) -> int:
    payload = {
        "feature_files": args.features,
        "config_path": args.config,
        "threshold": args.threshold,
        "overlap": args.overlap,
        "jobs": args.jobs,
    }
    response = _post(args.server, "/diarize", payload)
    if response.status_code != 200:
        return _fail(response)
    body = response.json()
    if args.output == "-":
        sys.stdout.write(body["rttm"])
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(body["rttm"])
    for rec in body["recordings"]:
        print(
            f"{rec['recording_id']}: speech {rec['speech_s']}s, "
            f"{rec['n_base_segments']} segments, {rec['n_clusters']} speakers, "
            f"overlap {rec['overlap_s']}s",
            file=sys.stderr,
        )
    for path, reason in sorted(body["failures"].items()):
        print(f"FAILED {path}: {reason}", file=sys.stderr)
    return EXIT_RECORDING_FAILURES if body["failures"] else EXIT_OK


def cmd_score(args) -> int:
    payload = {
        "ref_rttm": args.ref,
        "hyp_rttm": args.hyp,
        "uem": args.uem,
        "collar": args.collar,
        "score_overlap": args.score_overlap,
    }
    response = _post(args.server, "/score", payload)
    if response.status_code != 200:
        return _fail(response)
    body = response.json()
    for warning in body["warnings"]:
        print(f"warning: {warning}", file=sys.stderr)
    rows = body["per_recording"] + [body["totals"]]
    header = f"{'RECORDING':<24} {'MISS':>9} {'FA':>9} {'CONF':>9} {'SCORED':>10} {'DER':>7}"
    print(header)
    print("-" * len(header))
    for row in rows:
        print(
            f"{row['recording_id']:<24} {row['missed']:>9.3f} {row['false_alarm']:>9.3f} "
            f"{row['confusion']:>9.3f} {row['scored']:>10.3f} {row['der']:>7.3f}"
        )
    if args.json:
        record = {"per_recording": body["per_recording"], "totals": body["totals"]}
        if args.json == "-":
            print(json.dumps(record, indent=2))
        else:
            with open(args.json, "w", encoding="utf-8") as fh:
                json.dump(record, fh, indent=2)
    return EXIT_OK


def cmd_synth(args) -> int:
    payload = {
        "n_speakers": args.speakers,
        "length": args.length,
        "turn_min": args.turn_min,
        "turn_max": args.turn_max,
        "overlap_fraction": args.overlap_fraction,
        "dim": args.dim,
        "centroid_min_angle": args.centroid_min_angle,
        "noise_scale": args.noise_scale,
        "seed": args.seed,
        "frame_period": args.frame_period,
        "features_path": args.features,
        "rttm_path": args.rttm,
        "config_path": args.config,
    }
    response = _post(args.server, "/synth", payload)
    if response.status_code != 200:
        return _fail(response)
    body = response.json()
    print(
        f"{body['recording_id']}: speech {body['speech_s']}s "
        f"(overlap {body['overlap_s']}s) -> {body['features_path']}, {body['rttm_path']}"
    )
    return EXIT_OK


def cmd_inspect(args) -> int:
    status = EXIT_OK
    for path in args.features:
        response = _post(args.server, "/inspect", {"path": path})
        if response.status_code != 200:
            _fail(response)
            status = EXIT_RECORDING_FAILURES
            continue
        body = response.json()
        print(f"{path}: recording {body['recording_id']!r}, "
              f"frame_period {body['frame_period']}")
        for track in body["tracks"]:
            print(f"  track {track['name']}: {track['n_frames']} frames")
        for idx, scale in enumerate(body["scales"]):
            print(
                f"  scale {idx}: window {scale['window']}s shift {scale['shift']}s, "
                f"{scale['n_segments']} segments, dim {scale['dim']}"
            )
    return status


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("diarkit.service:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diarkit", description="Speaker-diarization back-end toolkit"
    )
    parser.add_argument("--server", default=None,
                        help="base URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diarize", help="turn feature files into a speaker RTTM")
    p.add_argument("features", nargs="*", help="MSDF feature files")
    p.add_argument("--config", default=None, help="pipeline config YAML")
    p.add_argument("--output", "-o", default="-", help="output RTTM path ('-' = stdout)")
    p.add_argument("--threshold", type=float, default=None,
                   help="override the clustering stop threshold")
    p.add_argument("--overlap", action=argparse.BooleanOptionalAction, default=None,
                   help="enable/disable second-speaker assignment")
    p.add_argument("--jobs", type=int, default=1, help="parallel recordings")
    p.set_defaults(func=cmd_diarize)

    p = sub.add_parser("score", help="score hypothesis RTTM against a reference")
    p.add_argument("--ref", required=True, help="reference RTTM")
    p.add_argument("--hyp", required=True, help="hypothesis RTTM")
    p.add_argument("--uem", default=None, help="UEM with evaluable regions")
    p.add_argument("--collar", type=float, default=0.25,
                   help="forgiveness collar around reference boundaries (seconds)")
    p.add_argument("--score-overlap", action=argparse.BooleanOptionalAction, default=True,
                   help="score regions where reference speakers overlap")
    p.add_argument("--json", default=None, help="also write a JSON report ('-' = stdout)")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("synth", help="generate a synthetic feature file + reference")
    p.add_argument("--speakers", type=int, required=True)
    p.add_argument("--length", type=float, default=60.0, help="recording length (s)")
    p.add_argument("--turn-min", type=float, default=2.0)
    p.add_argument("--turn-max", type=float, default=6.0)
    p.add_argument("--overlap-fraction", type=float, default=0.1)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--centroid-min-angle", type=float, default=78.0)
    p.add_argument("--noise-scale", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frame-period", type=float, default=0.01)
    p.add_argument("--features", required=True, help="output MSDF path")
    p.add_argument("--rttm", required=True, help="output reference RTTM path")
    p.add_argument("--config", default=None, help="pipeline config YAML (for scales)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("inspect", help="print MSDF headers")
    p.add_argument("features", nargs="+", help="MSDF feature files")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8077)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
