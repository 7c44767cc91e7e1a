"""Command-line entry point.

    wristcue encode --cue move-to --angle 20 --tier medium --duration 2.1 --out t.csv
    wristcue experiment --participants 27 --seed 1 --out-dir results/
    wristcue serve --port 8787
    wristcue device --replay t.csv --mock frames.bin
    wristcue --print-config

Exit codes: 0 success, 1 runtime failure, 2 usage error.  Output files
are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
import time

from .config import GuidanceConfig, format_config, parse_config
from .cues import CueCategory, encode, timeline_from_csv, timeline_to_csv
from .geometry import Tier
from .harness import run_experiment
from .service import ServiceConfig, serve
from .wire import MockPort, stream_timeline, write_frames

_CUE_TOKENS = ("move-to", "move-up", "move-down", "pause", "arrived")
_TIER_TOKENS = {"far": Tier.FAR, "medium": Tier.MEDIUM, "close": Tier.CLOSE}


def _atomic_write(path: str, data: str | bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".wristcue-")
    try:
        with os.fdopen(fd, mode, newline="" if mode == "w" else None) as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _usage(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _load_config(path: str | None) -> GuidanceConfig:
    if path is None:
        return GuidanceConfig()
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read())


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_encode(args) -> int:
    if args.cue == "move-to":
        if args.angle is None or args.tier is None:
            return _usage("--cue move-to requires --angle and --tier")
        cue = CueCategory.move_to(args.angle % 360.0, _TIER_TOKENS[args.tier])
    else:
        if args.angle is not None or args.tier is not None:
            return _usage(f"--angle/--tier are only valid with --cue move-to, not {args.cue}")
        cue = {
            "move-up": CueCategory.move_up,
            "move-down": CueCategory.move_down,
            "pause": CueCategory.pause,
            "arrived": CueCategory.arrived,
        }[args.cue]()
    cfg = _load_config(args.config)
    timeline = encode(cue, args.duration, cfg)
    _atomic_write(args.out, timeline_to_csv(timeline))
    print(f"wrote {args.out}: {len(timeline.frames)} frames, {timeline.duration_s:.2f} s")
    return 0


def cmd_experiment(args) -> int:
    cfg = _load_config(args.config)
    result = run_experiment(participants=args.participants, seed=args.seed, cfg=cfg)
    out = args.out_dir
    _atomic_write(os.path.join(out, "results.csv"), result.results_csv)
    _atomic_write(os.path.join(out, "manifest.txt"), result.manifest)
    for name, table in result.tables.items():
        _atomic_write(os.path.join(out, f"{name}.csv"), table)
    print(f"wrote {out}/results.csv: {len(result.records)} trials")
    return 0


def cmd_serve(args) -> int:
    cfg = _load_config(args.config)
    service = ServiceConfig(cfg=cfg, results_path=args.results, seed=args.seed)
    server = serve(service, host=args.host, port=args.port)
    print(f"READY {server.port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
        server.server_close()
    return 0


def cmd_device(args) -> int:
    if args.serial_port is None and args.mock is None:
        return _usage("device needs --serial-port or --mock")
    if args.replay is None:
        return _usage("device needs --replay <timeline.csv>")
    with open(args.replay, "r", encoding="utf-8") as f:
        timeline = timeline_from_csv(f.read())
    frames = stream_timeline(timeline, rate_hz=args.rate)
    if args.mock is not None:
        with open(args.mock, "wb") as sink:
            n = write_frames(MockPort(sink), frames)
        print(f"wrote {n} frames to {args.mock}")
        return 0
    try:
        import serial  # pyserial; optional, only needed for real hardware
    except ImportError:
        print("error: pyserial is not installed; use --mock for file output",
              file=sys.stderr)
        return 1
    port = serial.Serial(args.serial_port, baudrate=115200, bytesize=8,
                         parity="N", stopbits=1)
    try:
        t0 = time.monotonic()
        n = 0
        for t_s, frame in frames:
            delay = t_s - (time.monotonic() - t0)
            if delay > 0:
                time.sleep(delay)
            from .wire import encode_frame
            port.write(encode_frame(frame))
            n += 1
        port.flush()
    finally:
        port.close()
    print(f"sent {n} frames to {args.serial_port}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wristcue",
        description="Vibrotactile wristband guidance toolkit",
    )
    parser.add_argument("--print-config", action="store_true",
                        help="print every config default as key=value and exit")
    sub = parser.add_subparsers(dest="command")

    p_enc = sub.add_parser("encode", help="render a cue timeline to CSV")
    p_enc.add_argument("--cue", required=True, choices=_CUE_TOKENS)
    p_enc.add_argument("--angle", type=float, default=None,
                       help="ring angle in degrees (move-to only)")
    p_enc.add_argument("--tier", choices=sorted(_TIER_TOKENS), default=None,
                       help="distance tier (move-to only)")
    p_enc.add_argument("--duration", type=float, default=2.1)
    p_enc.add_argument("--out", required=True)
    p_enc.add_argument("--config", default=None)
    p_enc.set_defaults(func=cmd_encode)

    p_exp = sub.add_parser("experiment", help="run the simulated targeting experiment")
    p_exp.add_argument("--participants", type=int, required=True)
    p_exp.add_argument("--seed", type=int, default=0)
    p_exp.add_argument("--config", default=None)
    p_exp.add_argument("--out-dir", default="results")
    p_exp.set_defaults(func=cmd_experiment)

    p_srv = sub.add_parser("serve", help="run the live session service")
    p_srv.add_argument("--port", type=int, default=8787)
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--results", default=None,
                       help="append-only results CSV path")
    p_srv.add_argument("--seed", type=int, default=0)
    p_srv.add_argument("--config", default=None)
    p_srv.set_defaults(func=cmd_serve)

    p_dev = sub.add_parser("device", help="stream a timeline to the wristband")
    p_dev.add_argument("--serial-port", default=None)
    p_dev.add_argument("--mock", default=None,
                       help="write raw frames to this file instead of a port")
    p_dev.add_argument("--replay", default=None, help="timeline CSV to stream")
    p_dev.add_argument("--rate", type=float, default=100.0)
    p_dev.set_defaults(func=cmd_device)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.print_config:
        print(format_config(GuidanceConfig()), end="")
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
