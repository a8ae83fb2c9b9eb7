"""Operator command line.

Every command is scriptable: no prompts, exit 0 on success, 1 on domain
failure, 2 on usage errors. `--backend scripted:<file>` replays canned
responses from a plain-text fixture (responses separated by a line of five
equals signs), which makes every command fully offline and deterministic.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .agents import (
    BackendError,
    ContextInput,
    GenerationFailed,
    ImagePayload,
    UnparsableAnalysis,
)
from .config import AppConfig
from .library import (
    GestureFileError,
    builtin_gestures,
    export_bundled,
    find_gesture,
    load_gesture,
)
from .motion import validate_state
from .session import (
    SessionError,
    SessionStore,
    feedback_statistics,
    finalize,
    start_session,
    submit_feedback,
)
from .trajectory import (
    check_sequence,
    compute_metrics,
    interpolate,
    trajectory_from_text,
    trajectory_to_text,
)


def _metrics_rows(metrics) -> list[tuple[str, str, str]]:
    d = metrics.to_dict()
    rows = []
    for key in ("mean_hand_height", "path_length", "jerk_rms", "peak_speed"):
        rows.append((key, f"{d[key]['left']:.4f}", f"{d[key]['right']:.4f}"))
    rows.append(("bilateral_symmetry", f"{metrics.bilateral_symmetry:.4f}", ""))
    return rows


def _print_metrics(metrics) -> None:
    print(f"{'metric':22s} {'left':>10s} {'right':>10s}")
    for name, left, right in _metrics_rows(metrics):
        print(f"{name:22s} {left:>10s} {right:>10s}")


def _print_session(record) -> None:
    print(f"session {record.id}")
    print(f"  status: {record.status.value}")
    if record.gesture:
        print(f"  gesture: {record.gesture.name} ({record.gesture.category.value})")
    if record.analysis:
        first_line = record.analysis.narrative.strip().splitlines()[0]
        print(f"  analysis: {first_line[:100]}")
    print(f"  iterations: {len(record.iterations)} (refinements {record.refinements}/{record.i_max})")
    for it in record.iterations:
        flag = "feasible" if it.feasibility.feasible else "INFEASIBLE"
        fb = f" feedback={it.feedback!r}" if it.feedback else ""
        print(f"    [{it.index}] {flag}{fb}")
    if record.iterations:
        print("  metrics (latest iteration):")
        _print_metrics(record.iterations[-1].metrics)
    for lat in record.latencies:
        print(f"  latency {lat.stage}: {lat.seconds:.2f} s")
    for note in record.notes:
        print(f"  note: {note}")


def _session_json(record) -> dict:
    data = record.to_dict()
    data.pop("input", None)  # image payloads do not belong on stdout
    return data


def _backend_or_fail(config: AppConfig, selector: str):
    backend = config.make_backend(selector)
    if selector == "openai" and not os.environ.get(config.api_key_env):
        raise BackendError(
            f"no API key found: export {config.api_key_env} before using the live backend"
        )
    return backend


def cmd_generate(args, config: AppConfig) -> int:
    store = SessionStore(args.sessions_dir or config.sessions_dir)
    backend = _backend_or_fail(config, args.backend)
    if args.gesture:
        spec = find_gesture(args.gesture)
        if spec is None:
            print(f"unknown gesture {args.gesture!r}; see `gesturelab gestures`", file=sys.stderr)
            return 1
        source = spec
    else:
        image = ImagePayload.from_file(args.image) if args.image else None
        source = ContextInput(instruction=args.instruction, image=image)
    record = start_session(source, backend, config.session_config(), store=store)
    if args.json:
        print(json.dumps(_session_json(record), indent=1))
    else:
        _print_session(record)
    return 0


def cmd_refine(args, config: AppConfig) -> int:
    store = SessionStore(args.sessions_dir or config.sessions_dir)
    backend = _backend_or_fail(config, args.backend)
    record = store.load(args.session_id)
    record = submit_feedback(record, args.feedback, backend, config.session_config(), store=store)
    if args.json:
        print(json.dumps(_session_json(record), indent=1))
    else:
        _print_session(record)
    return 0


def cmd_finalize(args, config: AppConfig) -> int:
    store = SessionStore(args.sessions_dir or config.sessions_dir)
    record = store.load(args.session_id)
    record, traj = finalize(
        record, args.rate, config.session_config(), store=store, max_speed=args.max_speed
    )
    payload = {
        "id": record.id,
        "rate": traj.rate,
        "duration": traj.duration,
        "samples": len(traj.samples),
        "feasible": traj.feasibility.feasible if traj.feasibility else None,
        "artifacts": list(record.artifacts),
    }
    if args.json:
        print(json.dumps(payload, indent=1))
    else:
        print(f"finalized {record.id}: {payload['samples']} samples over {traj.duration:g} s")
        for artifact in record.artifacts:
            print(f"  wrote {Path(store.directory) / artifact}")
    return 0


def cmd_validate(args, config: AppConfig) -> int:
    spec, seq = load_gesture(args.gesture_file)
    problems = []
    for k, state in enumerate(seq.states):
        report = validate_state(state, config.bounds)
        if not report.ok:
            problems.extend(f"keyframe {k}: {v.path} {v.message}" for v in report.violations)
    feas = check_sequence(seq, config.body, config.collision_margin)
    if not feas.feasible:
        problems.append(feas.describe())
    if args.json:
        print(json.dumps({"gesture": spec.name, "ok": not problems, "problems": problems}, indent=1))
    else:
        print(f"{spec.name}: {'ok' if not problems else 'FAILED'}")
        for problem in problems:
            print(f"  {problem}")
    return 0 if not problems else 1


def cmd_metrics(args, config: AppConfig) -> int:
    if args.trajectory_file:
        traj = trajectory_from_text(Path(args.trajectory_file).read_text())
    else:
        store = SessionStore(args.sessions_dir or config.sessions_dir)
        record = store.load(args.session)
        chosen = record.latest_feasible() or record.current
        if chosen is None:
            print("session has no iterations", file=sys.stderr)
            return 1
        traj = interpolate(chosen.sequence, config.rate, config.bounds)
    metrics = compute_metrics(traj)
    if args.plot_data:
        Path(args.plot_data).write_text(trajectory_to_text(traj))
    if args.json:
        print(json.dumps(metrics.to_dict(), indent=1))
    else:
        _print_metrics(metrics)
    return 0


def cmd_gestures(args, config: AppConfig) -> int:
    specs = builtin_gestures()
    if args.json:
        print(json.dumps([s.to_dict() for s in specs], indent=1))
    else:
        for spec in specs:
            print(f"{spec.name:15s} {spec.category.value:15s} {spec.description}")
    return 0


def cmd_sessions(args, config: AppConfig) -> int:
    store = SessionStore(args.sessions_dir or config.sessions_dir)
    rows = []
    for sid in store.list_ids():
        record = store.load(sid)
        rows.append(
            {
                "id": record.id,
                "status": record.status.value,
                "gesture": record.gesture.name if record.gesture else None,
                "iterations": len(record.iterations),
                "created_at": record.created_at,
            }
        )
    if args.json:
        print(json.dumps(rows, indent=1))
    else:
        for row in rows:
            print(f"{row['id']}  {row['status']:18s} {row['gesture'] or '-':15s} iters={row['iterations']}")
    return 0


def cmd_show(args, config: AppConfig) -> int:
    store = SessionStore(args.sessions_dir or config.sessions_dir)
    record = store.load(args.session_id)
    if args.json:
        print(json.dumps(_session_json(record), indent=1))
    else:
        _print_session(record)
    return 0


def cmd_export_gestures(args, config: AppConfig) -> int:
    for path in export_bundled(args.directory):
        print(path)
    return 0


def cmd_stats(args, config: AppConfig) -> int:
    store = SessionStore(args.sessions_dir or config.sessions_dir)
    records = [store.load(sid) for sid in store.list_ids()]
    stats = feedback_statistics(records)
    if args.json:
        print(json.dumps(stats.to_dict(), indent=1))
    else:
        print(f"sessions: {stats.sessions}")
        print(f"total feedback: {stats.total_feedback}")
        print(f"mean feedback per session: {stats.mean_feedback_per_session:.2f}")
        print(
            f"high-level vs positional: {stats.high_level}/{stats.positional} "
            f"({stats.high_level_fraction:.0%} high-level)"
        )
    return 0


def cmd_serve(args, config: AppConfig) -> int:
    import uvicorn

    from .server import create_app

    if args.sessions_dir:
        config.sessions_dir = Path(args.sessions_dir)
    app = create_app(config, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gesturelab",
        description="Generate, refine, and execute expressive humanoid gestures.",
    )
    parser.add_argument("--config", default=None, help="path to a JSON config file")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, backend=False):
        p.add_argument("--sessions-dir", default=None, help="session storage directory")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if backend:
            p.add_argument(
                "--backend",
                default="openai",
                help="'openai' or 'scripted:<fixture file>' (default: openai)",
            )

    p = sub.add_parser("generate", help="start a session from a gesture or instruction")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--gesture", help="builtin gesture name")
    group.add_argument("--instruction", help="operator instruction for context analysis")
    p.add_argument("--image", default=None, help="image file observed by the robot")
    common(p, backend=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("refine", help="submit feedback on the current iteration")
    p.add_argument("session_id")
    p.add_argument("feedback")
    common(p, backend=True)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("finalize", help="interpolate and export the final trajectory")
    p.add_argument("session_id")
    p.add_argument("--rate", type=float, default=None, help="sample rate in Hz")
    p.add_argument(
        "--max-speed",
        type=float,
        default=None,
        help="cap per-hand speed (m/s) by locally slowing fast segments",
    )
    common(p)
    p.set_defaults(func=cmd_finalize)

    p = sub.add_parser("validate", help="validate a gesture file end to end")
    p.add_argument("gesture_file")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("metrics", help="motion metrics for a trajectory or session")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--trajectory-file", dest="trajectory_file")
    group.add_argument("--session")
    p.add_argument("--plot-data", default=None, help="write plot-ready columnar data here")
    common(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("gestures", help="list the builtin gesture library")
    common(p)
    p.set_defaults(func=cmd_gestures)

    p = sub.add_parser("sessions", help="list stored sessions")
    common(p)
    p.set_defaults(func=cmd_sessions)

    p = sub.add_parser("show", help="show one session")
    p.add_argument("session_id")
    common(p)
    p.set_defaults(func=cmd_show)

    p = sub.add_parser("export-gestures", help="write bundled gesture files to a directory")
    p.add_argument("directory")
    common(p)
    p.set_defaults(func=cmd_export_gestures)

    p = sub.add_parser("stats", help="batch feedback statistics over stored sessions")
    common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the HTTP API and web UI")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--ui-dir", default=None, help="built web UI directory to serve")
    common(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = AppConfig.load(args.config)
        return args.func(args, config)
    except (
        BackendError,
        GenerationFailed,
        UnparsableAnalysis,
        SessionError,
        GestureFileError,
        FileNotFoundError,
        ValueError,
    ) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
