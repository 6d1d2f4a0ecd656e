"""Operator CLI: serve the API, run simulations, replay scenarios, export logs."""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from .config import ConfigInvalid, load_config
from .events import CorruptLog, EventLog, read_log
from .simulation import SimConfig, replay_interview_scenarios, run_simulation
from .state import Platform

DATA_DIR_ENV = "FAIRRIDE_DATA_DIR"


def _data_dir(args) -> Path:
    if getattr(args, "data", None):
        return Path(args.data)
    return Path(os.environ.get(DATA_DIR_ENV, "./fairride-data"))


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    try:
        config = load_config(args.config)
    except ConfigInvalid as exc:
        print(f"config rejected: {exc}", file=sys.stderr)
        return 2
    data_dir = _data_dir(args)
    data_dir.mkdir(parents=True, exist_ok=True)
    log = EventLog(data_dir / "events.log")
    platform = Platform.bootstrap(config, log, datetime.now(timezone.utc))
    app = create_app(platform)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_simulate(args) -> int:
    if args.config:
        try:
            platform_config = load_config(args.config)
        except ConfigInvalid as exc:
            print(f"config rejected: {exc}", file=sys.stderr)
            return 2
        sim_doc = dict(platform_config.sim)
        sim_doc["match"] = platform_config.match.to_dict()
        sim_doc["learning_enabled"] = platform_config.learning_enabled
    else:
        sim_doc = {}
    if args.seed is not None:
        sim_doc["seed"] = args.seed
    cfg = SimConfig.from_dict(sim_doc)
    report = run_simulation(cfg, out_dir=args.out)
    print(f"offers issued: {report.offers_issued}")
    print(f"accepted/declined/expired/voided: "
          f"{report.offers_accepted}/{report.offers_declined}/"
          f"{report.offers_expired}/{report.offers_voided}")
    if report.overall_acceptance_rate is not None:
        print(f"acceptance rate: {report.overall_acceptance_rate:.3f}")
        print(f"brier: {report.overall_brier:.4f}  ece: {report.overall_ece:.4f}")
    print(f"incentive spend: {report.incentive_spend_c / 100:.2f}")
    if args.out:
        print(f"report and event log written to {args.out}")
    return 0


def cmd_replay_scenarios(args) -> int:
    transcripts = replay_interview_scenarios()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for transcript in transcripts:
        path = out / f"scenario-{transcript['scenario']}.json"
        path.write_text(json.dumps(transcript, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out / "scenarios.json").write_text(
        json.dumps(transcripts, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    for transcript in transcripts:
        print(
            f"scenario {transcript['scenario']}: p={transcript['probability']:.3f} "
            f"incentive={transcript['incentive_c'] / 100:.2f} — {transcript['description']}"
        )
    print(f"wrote {len(transcripts)} transcripts to {out}")
    return 0


def cmd_export_log(args) -> int:
    data_dir = _data_dir(args)
    log_path = Path(args.log) if args.log else data_dir / "events.log"
    if not log_path.exists():
        print(f"no event log at {log_path}", file=sys.stderr)
        return 2
    try:
        records = list(read_log(log_path))
    except CorruptLog as exc:
        print(f"log verification failed: {exc}", file=sys.stderr)
        return 3
    out = Path(args.out)
    with open(out, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record.to_line())
    print(f"verified and exported {len(records)} events to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairride", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the platform API")
    serve.add_argument("--config", help="platform config JSON (defaults used when omitted)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--data", help=f"data directory (or ${DATA_DIR_ENV})")
    serve.set_defaults(func=cmd_serve)

    simulate = sub.add_parser("simulate", help="run a seeded marketplace simulation")
    simulate.add_argument("--config", help="platform config JSON with a sim section")
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--out", help="directory for report.json and events.log")
    simulate.set_defaults(func=cmd_simulate)

    replay = sub.add_parser("replay-scenarios", help="write the six interview scenario transcripts")
    replay.add_argument("--out", required=True)
    replay.set_defaults(func=cmd_replay_scenarios)

    export = sub.add_parser("export-log", help="verify and export the event log")
    export.add_argument("--log", help="event log path (defaults to the data directory's)")
    export.add_argument("--out", required=True)
    export.add_argument("--data", help=f"data directory (or ${DATA_DIR_ENV})")
    export.set_defaults(func=cmd_export_log)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
