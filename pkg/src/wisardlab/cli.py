"""Command-line entry points: model lifecycle, folder training,
classification, mental-image export, BlockScript execution, and the
service launcher.

Exit codes: 0 success (an "unknown" answer is success), 1 runtime I/O
failure, 2 usage error, 3 program-validation failure.
"""

from __future__ import annotations

import argparse
import base64
import json
import os
import sys
from pathlib import Path

from .blockscript import (
    BlockScriptSyntaxError,
    BlockScriptValidationError,
    ModelConfig,
    RunLimits,
    ScriptedIo,
    parse,
    run as run_program,
    validate,
)
from .blockscript.nodes import AcquireImage, CameraSource
from .core import (
    MAX_TUPLE_SIZE,
    WisardModel,
    deserialize_model,
    new_model,
    serialize_model,
)
from .errors import WisardError
from .imaging import (
    BinarizeConfig,
    binarize,
    load_labeled_dir,
    load_pgm,
    render_mental_image,
    write_pgm,
)
from .service import ServiceDefaults, serve

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_INVALID_PROGRAM = 3


class CliFailure(Exception):
    def __init__(self, message: str, status: int = EXIT_IO):
        super().__init__(message)
        self.status = status


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _tuple_size(text: str) -> int:
    value = int(text)
    if not 1 <= value <= MAX_TUPLE_SIZE:
        raise argparse.ArgumentTypeError(f"must be between 1 and {MAX_TUPLE_SIZE}")
    return value


def _threshold(text: str) -> int:
    value = int(text)
    if not 0 <= value <= 255:
        raise argparse.ArgumentTypeError("must be within 0..255")
    return value


def _load_model_file(path: str) -> WisardModel:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CliFailure(f"cannot read model file: {exc}")
    try:
        return deserialize_model(data)
    except WisardError as exc:
        raise CliFailure(f"cannot load model file {path}: {exc}")


def _save_model_file(model: WisardModel, path: str) -> None:
    """Write-temp-rename so an interrupt never leaves a half-written model."""
    target = Path(path)
    tmp = target.with_name(target.name + ".tmp")
    try:
        tmp.write_bytes(serialize_model(model))
        os.replace(tmp, target)
    except OSError as exc:
        raise CliFailure(f"cannot write model file: {exc}")


def _load_pattern_file(path: str, model: WisardModel, threshold: int):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CliFailure(f"cannot read image: {exc}")
    try:
        gray = load_pgm(data)
    except WisardError as exc:
        raise CliFailure(f"cannot decode image {path}: {exc}")
    cfg = BinarizeConfig(
        target_width=model.width, target_height=model.height, threshold=threshold
    )
    return binarize(gray, cfg)


def cmd_new(args) -> int:
    model = new_model(args.width, args.height, args.tuple_size, args.seed)
    _save_model_file(model, args.out)
    sizes = [len(t) for t in model.mapping.tuples]
    summary = f"{len(sizes)} tuples of size {sizes[0]}"
    if sizes[-1] != sizes[0]:
        summary = f"{len(sizes)} tuples ({len(sizes) - 1} of size {sizes[0]}, 1 of size {sizes[-1]})"
    print(f"created {args.width}x{args.height} model, seed {args.seed}: {summary}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_train(args) -> int:
    model = _load_model_file(args.model)
    cfg = BinarizeConfig(
        target_width=model.width, target_height=model.height, threshold=args.threshold
    )
    trained = 0
    if args.dir:
        try:
            items, failures = load_labeled_dir(args.dir, cfg)
        except FileNotFoundError as exc:
            raise CliFailure(str(exc))
        for failure in failures:
            print(f"skipped {failure.path}: {failure.message}", file=sys.stderr)
        for label, pattern in items:
            model.train(pattern, label)
            trained += 1
    else:
        pattern = _load_pattern_file(args.image, model, args.threshold)
        model.train(pattern, args.label)
        trained = 1
    if trained == 0:
        raise CliFailure(f"no images trained from {args.dir}")
    _save_model_file(model, args.model)
    for label, count in model.label_counts().items():
        print(f"{label}: {count}")
    return EXIT_OK


def cmd_classify(args) -> int:
    model = _load_model_file(args.model)
    pattern = _load_pattern_file(args.image, model, args.threshold)
    outcome = model.classify(pattern)
    if args.json:
        document = {
            "decision": outcome.decision if outcome.decision is not None else "unknown",
            "unknown": outcome.is_unknown,
            "final_bleach": outcome.final_bleach,
            "scores": outcome.scores,
            "tie_broken": outcome.tie_broken,
            "trace": [{"bleach": b, "scores": s} for b, s in outcome.trace],
        }
        print(json.dumps(document, sort_keys=True))
    else:
        print(outcome.decision if outcome.decision is not None else "unknown")
    return EXIT_OK


def cmd_mental_image(args) -> int:
    model = _load_model_file(args.model)
    try:
        mi = model.mental_image(args.label)
    except WisardError as exc:
        raise CliFailure(str(exc))
    try:
        Path(args.out).write_bytes(write_pgm(render_mental_image(mi)))
    except OSError as exc:
        raise CliFailure(f"cannot write image: {exc}")
    print(f"wrote {args.out} (max count {mi.max_count})")
    return EXIT_OK


class _CliIo(ScriptedIo):
    """ScriptedIo that streams say-output to stdout and, without a stdin
    script, reads from the real stdin."""

    def __init__(self, camera, base_dir, script_lines):
        super().__init__(inputs=script_lines or [], camera=camera, base_dir=base_dir)
        self._interactive = script_lines is None

    def write_line(self, text: str) -> None:
        super().write_line(text)
        print(text)

    def read_line(self):
        if not self._interactive:
            return super().read_line()
        line = sys.stdin.readline()
        if line == "":
            return None
        return line.rstrip("\n")


def cmd_run(args) -> int:
    try:
        source = Path(args.program).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliFailure(f"cannot read program: {exc}")
    try:
        program = parse(source)
    except BlockScriptSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return EXIT_INVALID_PROGRAM
    diagnostics = validate(program)
    for d in diagnostics:
        print(str(d), file=sys.stderr)
    if any(d.severity == "error" for d in diagnostics):
        return EXIT_INVALID_PROGRAM

    camera_queue = []
    for entry in args.camera_map or []:
        source_name, _, path = entry.partition("=")
        if source_name != "camera" or not path:
            raise CliFailure(f"bad --camera-map entry {entry!r}, want camera=path", EXIT_USAGE)
        camera_queue.append(path)
    uses_camera = any(
        isinstance(s, AcquireImage) and isinstance(s.source, CameraSource)
        for s in program.walk()
    )
    if uses_camera and not camera_queue:
        print(
            "program takes pictures from the camera; supply --camera-map camera=file.pgm",
            file=sys.stderr,
        )
        return EXIT_INVALID_PROGRAM

    script_lines = None
    if args.stdin_script:
        try:
            script_lines = Path(args.stdin_script).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise CliFailure(f"cannot read stdin script: {exc}")

    config = ModelConfig(
        width=args.width,
        height=args.height,
        tuple_size=args.tuple_size,
        seed=args.seed,
        threshold=args.threshold,
    )
    limits = RunLimits(max_steps=args.max_steps, max_loop_iterations=args.max_iterations)
    io = _CliIo(camera_queue, Path.cwd(), script_lines)
    try:
        summary = run_program(program, config, io, limits=limits, base_dir=Path.cwd())
    except BlockScriptValidationError as exc:  # pragma: no cover - validated above
        print(str(exc), file=sys.stderr)
        return EXIT_INVALID_PROGRAM
    for note in summary.diagnostics:
        print(f"runtime: {note}", file=sys.stderr)
    for event in io.events:
        if event.get("type") == "mental_image":
            print(json.dumps(event, sort_keys=True), file=sys.stderr)
    return EXIT_OK


def cmd_serve(args) -> int:
    import socket

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, args.port))
    except OSError as exc:
        print(f"cannot bind port {args.port}: {exc}", file=sys.stderr)
        return EXIT_IO
    finally:
        probe.close()
    defaults = ServiceDefaults(
        width=args.default_width,
        height=args.default_height,
        tuple_size=args.default_tuple_size,
        threshold=args.default_threshold,
    )
    serve(args.port, args.models_dir, defaults, host=args.host)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wisardlab",
        description="WiSARD laboratory: train, classify, inspect, and run teaching programs",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("new", help="create an empty model file")
    p.add_argument("--width", type=_positive, required=True)
    p.add_argument("--height", type=_positive, required=True)
    p.add_argument("--tuple-size", type=_tuple_size, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_new)

    p = sub.add_parser("train", help="train a model on a labeled dir or one image")
    p.add_argument("--model", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--dir", help="directory with one subdirectory per label")
    group.add_argument("--image", help="single PGM image (requires --label)")
    p.add_argument("--label")
    p.add_argument("--threshold", type=_threshold, default=128)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="classify one image")
    p.add_argument("--model", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--threshold", type=_threshold, default=128)
    p.add_argument("--json", action="store_true", help="emit the full outcome document")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("mental-image", help="export a label's mental image as PGM")
    p.add_argument("--model", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mental_image)

    p = sub.add_parser("run", help="run a BlockScript program")
    p.add_argument("program")
    p.add_argument(
        "--camera-map",
        action="append",
        metavar="camera=FILE",
        help="queue a PGM for successive camera captures (repeatable)",
    )
    p.add_argument("--stdin-script", help="file whose lines answer ask statements")
    p.add_argument("--max-iterations", type=_positive, default=None)
    p.add_argument("--max-steps", type=_positive, default=None)
    p.add_argument("--width", type=_positive, default=32)
    p.add_argument("--height", type=_positive, default=32)
    p.add_argument("--tuple-size", type=_tuple_size, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=_threshold, default=128)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument(
        "--port", type=int, default=int(os.environ.get("WISARD_PORT", "8765"))
    )
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument(
        "--models-dir", default=os.environ.get("WISARD_MODELS_DIR", "models")
    )
    p.add_argument("--default-width", type=_positive, default=32)
    p.add_argument("--default-height", type=_positive, default=32)
    p.add_argument("--default-tuple-size", type=_tuple_size, default=16)
    p.add_argument("--default-threshold", type=_threshold, default=128)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.command == "train" and args.image and not args.label:
        parser.error("--image requires --label")  # exits 2
    try:
        return args.func(args)
    except CliFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.status
    except WisardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
