"""Command line entry points.

posture-bench serve        run the HTTP service
posture-bench simulate     run one move offline and print the outcome
posture-bench fit-posture  estimate posture angles from a probe track CSV
posture-bench emg          condition-ratio report from EMG recordings
posture-bench plan         suggest a posture for a set of views
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import ENV_VAR, load_bench_config
from .errors import BenchError


def _add_config_arg(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--config",
        default=None,
        help=f"bench config JSON (default: ${ENV_VAR} or built-ins)",
    )


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = load_bench_config(args.config)
    app = create_app(config, log=args.log, console_dir=args.console)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_simulate(args) -> int:
    from .session import Session, SetTarget

    config = load_bench_config(args.config)
    try:
        roll, pitch = (float(v) for v in args.target.split(","))
    except ValueError:
        print(f"--target must be ROLL,PITCH in degrees, got {args.target!r}", file=sys.stderr)
        return 2
    split = None
    if args.split is not None:
        try:
            lat, thor = (float(v) for v in args.split.split(","))
        except ValueError:
            print(f"--split must be LAT,THOR in degrees, got {args.split!r}", file=sys.stderr)
            return 2
        split = (lat, thor)
    session = Session(config, log=args.log)
    try:
        ack = session.command(SetTarget(roll_deg=roll, pitch_deg=pitch, split=split))
        session.run_until_settled()
    finally:
        session.close()
    out = session.snapshot()
    out["commanded"] = {"roll_deg": roll, "pitch_deg": pitch, "split": ack.get("split")}
    out["duration_s"] = ack.get("duration_s")
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def _cmd_fit_posture(args) -> int:
    from .posture import fit_plane, load_track, plane_to_posture, posture_to_gravity

    plane = fit_plane(load_track(args.track))
    angles = plane_to_posture(plane)
    gravity = posture_to_gravity(angles)
    print(json.dumps({
        "normal": list(plane.normal),
        "centroid_mm": list(plane.centroid_mm),
        "rms_residual_mm": plane.rms_residual_mm,
        "posture": {"roll_deg": angles.roll_deg, "pitch_deg": angles.pitch_deg},
        "gravity": {"roll_deg": gravity.roll_deg, "pitch_deg": gravity.pitch_deg},
    }, indent=2, sort_keys=True))
    return 0


def _cmd_emg(args) -> int:
    from .emg import condition_ratios, load_channel_map, load_recording, report_json, report_text

    records = {}
    channel_map = load_channel_map(args.channel_map) if args.channel_map else None
    for chunk in args.conditions.split(","):
        if "=" not in chunk:
            print(f"--conditions entries look like A=path.csv, got {chunk!r}", file=sys.stderr)
            return 2
        cond, path = chunk.split("=", 1)
        records[cond.strip()] = load_recording(path.strip(), channel_map)
    report = condition_ratios(records)
    if args.report:
        with open(args.report, "wb") as fh:
            fh.write(report_json(report))
    print(report_text(report), end="")
    return 0


def _cmd_plan(args) -> int:
    from .planner import plan_per_view, plan_posture

    config = load_bench_config(args.config)
    views = [v for v in (s.strip() for s in args.views.split(",")) if v]
    kwargs = dict(
        params=config.load,
        weights=config.weights,
        pendulum=config.session.pendulum,
        subject=args.subject,
        catalog=config.views,
        config=config.mechanism,
        pitch_weight=config.pitch_weight,
    )

    def payload(result):
        return {
            "views": list(result.views),
            "posture": {"roll_deg": result.posture.roll_deg, "pitch_deg": result.posture.pitch_deg},
            "split": {"lat_deg": result.split.lateral_deg, "thor_deg": result.split.thoracic_deg},
            "load": {"legs": result.load.legs, "abdomen": result.load.abdomen},
            "objective": result.objective,
        }

    if args.per_view:
        out = {name: payload(r) for name, r in plan_per_view(views, **kwargs).items()}
    else:
        out = payload(plan_posture(views, **kwargs))
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posture-bench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP control service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--log", default=None, help="write the session log JSONL here")
    p.add_argument("--console", default=None, help="mount a built operator console from this dir")
    _add_config_arg(p)
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("simulate", help="run one move offline")
    p.add_argument("--target", required=True, metavar="ROLL,PITCH")
    p.add_argument("--split", default=None, metavar="LAT,THOR")
    p.add_argument("--log", default=None, help="write the session log JSONL here")
    _add_config_arg(p)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("fit-posture", help="posture angles from a probe track CSV")
    p.add_argument("track", help="CSV with header t,x,y,z (seconds, millimetres)")
    p.set_defaults(fn=_cmd_fit_posture)

    p = sub.add_parser("emg", help="condition-ratio report from EMG CSVs")
    p.add_argument("--conditions", required=True, metavar="A=a.csv,B=b.csv,C=c.csv,D=d.csv")
    p.add_argument("--channel-map", default=None, help="sidecar JSON mapping channels to muscles")
    p.add_argument("--report", default=None, help="write the JSON report here")
    p.set_defaults(fn=_cmd_emg)

    p = sub.add_parser("plan", help="suggest a posture for a set of views")
    p.add_argument("--views", required=True, metavar="plax,a4c")
    p.add_argument("--subject", default=None)
    p.add_argument("--per-view", action="store_true", help="plan each view separately")
    _add_config_arg(p)
    p.set_defaults(fn=_cmd_plan)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except BenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
