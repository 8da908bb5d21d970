"""Operator entry points.

Subcommands: ``serve`` (run the gateway), ``walk`` (headless walkthrough
emitting or checking golden snapshots), ``dataset`` (emit a fine-tuning
corpus), ``validate`` (check a manifest).

Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import resources
from .database import combined_name, read_manifest, load_manifest
from .engine import load_steps, new_session, next_step
from .errors import PipelineError
from .extraction import ExtractorConfig, Lexicon, build_extractor
from .model import validate_database
from .sft import emit_sft_dataset, generate_sft_corpus, load_templates
from .snapshot import canonical_snapshot


def _add_bundle_args(parser: argparse.ArgumentParser, steps: bool = True) -> None:
    parser.add_argument(
        "--manifest", default=str(resources.pneumatic_manifest_path()), help="component manifest JSON"
    )
    if steps:
        parser.add_argument(
            "--steps", default=str(resources.pneumatic_steps_path()), help="step script, one step per line"
        )
    parser.add_argument(
        "--lexicon", default=str(resources.pneumatic_lexicon_path()), help="surface-form lexicon JSON"
    )
    parser.add_argument("--extractor", choices=("rule", "remote"), default="rule")
    parser.add_argument("--endpoint", default=None, help="remote extractor URL (mode=remote)")
    parser.add_argument("--timeout", type=float, default=10.0, help="remote extractor timeout, seconds")


def _extractor_from_args(args: argparse.Namespace, lexicon: Lexicon):
    config = ExtractorConfig(mode=args.extractor, endpoint=args.endpoint, timeout=args.timeout)
    return build_extractor(config, lexicon)


def cmd_serve(args: argparse.Namespace) -> int:
    from .gateway import GatewayState, bind_socket, create_app
    import uvicorn

    db = load_manifest(args.manifest)
    steps = load_steps(args.steps)
    lexicon = Lexicon.from_file(args.lexicon)
    state = GatewayState(db, steps, lexicon, _extractor_from_args(args, lexicon))
    app = create_app(state)
    try:
        sock = bind_socket(args.host, args.port)
    except OSError as exc:
        print(f"error: cannot bind port {args.port}: {exc}", file=sys.stderr)
        return 1
    port = sock.getsockname()[1]
    print(f"listening on :{port}", flush=True)
    config = uvicorn.Config(app, host=args.host, port=port, log_level="warning", access_log=False)
    server = uvicorn.Server(config)
    try:
        server.run(sockets=[sock])
    except KeyboardInterrupt:
        pass
    return 0


def _diff_bytes(expected: bytes, actual: bytes) -> str:
    limit = min(len(expected), len(actual))
    start = next((i for i in range(limit) if expected[i] != actual[i]), limit)
    end = max(len(expected), len(actual)) - 1
    return f"bytes {start}..{end} differ (expected {len(expected)} bytes, got {len(actual)})"


def cmd_walk(args: argparse.Namespace) -> int:
    db = load_manifest(args.manifest)
    steps = load_steps(args.steps)
    lexicon = Lexicon.from_file(args.lexicon)
    extractor = _extractor_from_args(args, lexicon)
    golden_dir = Path(args.golden_dir)
    if not args.check:
        golden_dir.mkdir(parents=True, exist_ok=True)

    session = new_session(db, steps)
    mismatches: list[str] = []
    started = time.perf_counter()
    for step in steps:
        try:
            session = next_step(session, extractor, db)
        except PipelineError as exc:
            print(f"error: step {step.index}: {exc}", file=sys.stderr)
            return 1
        clip = session.scene.current_clip
        if clip is not None:
            outcome = f"{clip.anchor}, {clip.target}, {clip.instance_count} -> {combined_name(clip.anchor, clip.target)}"
        else:
            outcome = "highlights only (no combined record)"
        print(f"step {step.index}: {outcome}")
        encoded = canonical_snapshot(session.scene).encode("utf-8")
        path = golden_dir / f"step_{step.index:02d}.txt"
        if args.check:
            if not path.exists():
                mismatches.append(f"{path}: missing golden file")
            else:
                expected = path.read_bytes()
                if expected != encoded:
                    mismatches.append(f"{path}: {_diff_bytes(expected, encoded)}")
        else:
            path.write_bytes(encoded)
    elapsed = time.perf_counter() - started

    if mismatches:
        for line in mismatches:
            print(f"mismatch: {line}", file=sys.stderr)
        return 1
    verb = "checked" if args.check else "wrote"
    print(f"{verb} {len(steps)} snapshots in {elapsed:.3f}s ({golden_dir})")
    return 0


def cmd_dataset(args: argparse.Namespace) -> int:
    lexicon = Lexicon.from_file(args.lexicon)
    templates = load_templates(args.templates)
    records = generate_sft_corpus(lexicon, templates, n=args.n, seed=args.seed)
    emit_sft_dataset(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    db = read_manifest(args.manifest)
    violations = validate_database(db)
    for v in violations:
        print(f"{v.record}: {v.rule}: {v.detail}")
    if violations:
        print(f"{len(violations)} violation(s) in {args.manifest}", file=sys.stderr)
        return 1
    print(f"{args.manifest}: ok ({len(db.components)} components)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="instructgen")
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP gateway")
    _add_bundle_args(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8844)
    p_serve.set_defaults(fn=cmd_serve)

    p_walk = sub.add_parser("walk", help="run every step headless, writing or checking snapshots")
    _add_bundle_args(p_walk)
    p_walk.add_argument("--golden-dir", required=True, help="directory for snapshot files")
    p_walk.add_argument("--check", action="store_true", help="diff against existing snapshots")
    p_walk.set_defaults(fn=cmd_walk)

    p_dataset = sub.add_parser("dataset", help="emit a templated fine-tuning dataset")
    p_dataset.add_argument(
        "--lexicon", default=str(resources.pneumatic_lexicon_path()), help="surface-form lexicon JSON"
    )
    p_dataset.add_argument(
        "--templates", default=str(resources.templates_path()), help="sentence template JSON"
    )
    p_dataset.add_argument("--n", type=int, default=420, help="number of records")
    p_dataset.add_argument("--seed", type=int, default=7, help="corpus RNG seed")
    p_dataset.add_argument("--out", required=True, help="output dataset path")
    p_dataset.set_defaults(fn=cmd_dataset)

    p_validate = sub.add_parser("validate", help="check a manifest against every database rule")
    p_validate.add_argument(
        "--manifest", default=str(resources.pneumatic_manifest_path()), help="component manifest JSON"
    )
    p_validate.set_defaults(fn=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (PipelineError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
