"""Tree-walking interpreter for BlockScript.

The host supplies an IoPort (text in/out plus image acquisition); the
interpreter owns one WiSARD model per run. Recognition stores its outcome
in the implicit result register that `result` conditions read.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..core import BinaryPattern, ClassificationOutcome, WisardModel
from ..imaging import BinarizeConfig, binarize, load_pgm, load_pgm_dir
from .nodes import (
    AcquireImage,
    Ask,
    CameraSource,
    CreateWisard,
    CurrentImage,
    FileSource,
    FolderSource,
    If,
    Learn,
    Program,
    Recognize,
    RepeatForever,
    ResultEquals,
    ResultUnknown,
    Say,
    ShowMentalImage,
    VarEquals,
)
from .validator import errors_of, validate


class ImageAcquireError(Exception):
    """An image source could not produce a usable pattern."""


class BlockScriptValidationError(Exception):
    """Raised when run() is handed a program with validation errors."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__(
            "program has validation errors:\n"
            + "\n".join(str(d) for d in self.diagnostics)
        )


@dataclass(frozen=True)
class ModelConfig:
    """Retina and binarization settings for the model a run creates."""

    width: int = 32
    height: int = 32
    tuple_size: int = 16
    seed: int = 0
    threshold: int = 128

    @property
    def binarize_config(self) -> BinarizeConfig:
        return BinarizeConfig(
            target_width=self.width,
            target_height=self.height,
            threshold=self.threshold,
        )


@dataclass(frozen=True)
class RunLimits:
    max_steps: int | None = None
    max_loop_iterations: int | None = None


@dataclass
class ExecutionSummary:
    statements_executed: int = 0
    labels_trained: tuple[str, ...] = ()
    examples_trained: int = 0
    classifications_made: int = 0
    stop_reason: str = "completed"  # completed | end_of_input | step_limit
    loop_limit_hit: bool = False
    diagnostics: list[str] = field(default_factory=list)
    model: WisardModel | None = None
    result: ClassificationOutcome | None = None


class IoPort:
    """Operations the host supplies to a running program."""

    def write_line(self, text: str) -> None:
        raise NotImplementedError

    def read_line(self) -> str | None:
        """Next input line without its newline, or None at end of input."""
        raise NotImplementedError

    def acquire_image(self, source, cfg: BinarizeConfig) -> BinaryPattern:
        """Produce a retina-sized pattern for a CameraSource or FileSource,
        binarized under the model's config. Raises ImageAcquireError."""
        raise NotImplementedError

    def emit_event(self, event: dict) -> None:
        """Structured side-channel (mental images, runtime reports)."""


def _load_pattern(raw, cfg: BinarizeConfig, what: str) -> BinaryPattern:
    """Turn a queue entry or file path into a retina pattern."""
    if isinstance(raw, BinaryPattern):
        if raw.width != cfg.target_width or raw.height != cfg.target_height:
            raise ImageAcquireError(
                f"{what}: pattern is {raw.width}x{raw.height}, "
                f"retina is {cfg.target_width}x{cfg.target_height}"
            )
        return raw
    path = Path(raw)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ImageAcquireError(f"{what}: cannot read {path}: {exc}")
    try:
        return binarize(load_pgm(data), cfg)
    except Exception as exc:
        raise ImageAcquireError(f"{what}: cannot decode {path}: {exc}")


class ScriptedIo(IoPort):
    """Deterministic IoPort for tests and headless runs.

    `inputs` answer read_line in order; `camera` is a queue consumed by
    successive camera captures (paths or ready-made BinaryPatterns). File
    sources resolve against base_dir. Every write_line is recorded so the
    run yields a byte-stable transcript.
    """

    def __init__(self, inputs=(), camera=(), base_dir: str | Path | None = None):
        self._inputs = list(inputs)
        self._camera = list(camera)
        self.base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
        self.lines: list[str] = []
        self.events: list[dict] = []

    def write_line(self, text: str) -> None:
        self.lines.append(text)

    def read_line(self) -> str | None:
        if not self._inputs:
            return None
        return self._inputs.pop(0)

    def acquire_image(self, source, cfg: BinarizeConfig) -> BinaryPattern:
        if isinstance(source, CameraSource):
            if not self._camera:
                raise ImageAcquireError("camera: no scripted captures left")
            return _load_pattern(self._camera.pop(0), cfg, "camera")
        return _load_pattern(self.base_dir / source.path, cfg, "file")

    def emit_event(self, event: dict) -> None:
        self.events.append(event)

    @property
    def transcript(self) -> str:
        return "".join(line + "\n" for line in self.lines)


class _Stop(Exception):
    def __init__(self, reason: str):
        self.reason = reason


class _Run:
    def __init__(self, config: ModelConfig, io: IoPort, limits: RunLimits, base_dir):
        self.config = config
        self.io = io
        self.limits = limits
        self.base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
        self.model: WisardModel | None = None
        self.image: BinaryPattern | None = None
        self.result: ClassificationOutcome | None = None
        self.vars: dict[str, str] = {}
        self.summary = ExecutionSummary()
        self._trained: set[str] = set()

    def report(self, stmt, message: str) -> None:
        note = f"{stmt.pos}: {message}"
        self.summary.diagnostics.append(note)
        self.io.emit_event({"type": "runtime_error", "where": str(stmt.pos), "message": message})

    def exec_program(self, program: Program) -> None:
        for stmt in program.statements:
            self.exec_statement(stmt)

    def exec_statement(self, stmt) -> None:
        limit = self.limits.max_steps
        if limit is not None and self.summary.statements_executed >= limit:
            raise _Stop("step_limit")
        self.summary.statements_executed += 1

        if isinstance(stmt, CreateWisard):
            self.model = WisardModel(
                self.config.width,
                self.config.height,
                tuple_size=self.config.tuple_size,
                seed=self.config.seed,
            )
        elif isinstance(stmt, Say):
            self.io.write_line(stmt.text)
        elif isinstance(stmt, Ask):
            line = self.io.read_line()
            if line is None:
                raise _Stop("end_of_input")
            self.vars[stmt.var] = line
        elif isinstance(stmt, AcquireImage):
            try:
                self.image = self.io.acquire_image(stmt.source, self.config.binarize_config)
            except ImageAcquireError as exc:
                self.report(stmt, str(exc))
        elif isinstance(stmt, Learn):
            self.exec_learn(stmt)
        elif isinstance(stmt, Recognize):
            if self.model is None:
                self.report(stmt, "recognize skipped: no model has been created")
                return
            if self.image is None:
                self.report(stmt, "recognize skipped: no picture has been taken")
                return
            self.result = self.model.classify(self.image)
            self.summary.classifications_made += 1
        elif isinstance(stmt, ShowMentalImage):
            if self.model is None or stmt.label not in self.model.discriminators:
                self.report(stmt, f"no mental image: label {stmt.label!r} was never trained")
                return
            mi = self.model.mental_image(stmt.label)
            self.io.emit_event(
                {
                    "type": "mental_image",
                    "label": stmt.label,
                    "width": mi.width,
                    "height": mi.height,
                    "counts": list(mi.counts),
                    "max_count": mi.max_count,
                }
            )
        elif isinstance(stmt, RepeatForever):
            iterations = 0
            while True:
                cap = self.limits.max_loop_iterations
                if cap is not None and iterations >= cap:
                    self.summary.loop_limit_hit = True
                    break
                self.exec_program(stmt.body)
                iterations += 1
        elif isinstance(stmt, If):
            if self.eval_condition(stmt.condition):
                self.exec_program(stmt.then_block)
            elif stmt.else_block is not None:
                self.exec_program(stmt.else_block)
        else:  # pragma: no cover - parser produces no other nodes
            raise TypeError(f"unknown statement {stmt!r}")

    def exec_learn(self, stmt: Learn) -> None:
        # validation puts `create wisard` lexically first, but it may sit in
        # a branch that never ran
        if self.model is None:
            self.report(stmt, "learn skipped: no model has been created")
            return
        if isinstance(stmt.source, CurrentImage):
            if self.image is None:
                self.report(stmt, "learn skipped: no picture has been taken")
                return
            self.model.train(self.image, stmt.label)
            self._note_training(stmt.label, 1)
            return
        folder = self.base_dir / stmt.source.path
        try:
            items, failures = load_pgm_dir(folder, self.config.binarize_config)
        except FileNotFoundError as exc:
            self.report(stmt, str(exc))
            return
        for failure in failures:
            self.report(stmt, f"{failure.path}: {failure.message}")
        for _, pattern in items:
            self.model.train(pattern, stmt.label)
        if items:
            self._note_training(stmt.label, len(items))

    def _note_training(self, label: str, count: int) -> None:
        self._trained.add(label)
        self.summary.examples_trained += count
        self.summary.labels_trained = tuple(sorted(self._trained))

    def eval_condition(self, cond) -> bool:
        if isinstance(cond, VarEquals):
            return self.vars.get(cond.var) == cond.value
        if isinstance(cond, ResultEquals):
            return self.result is not None and self.result.decision == cond.label
        if isinstance(cond, ResultUnknown):
            return self.result is not None and self.result.is_unknown
        raise TypeError(f"unknown condition {cond!r}")


def run(
    program: Program,
    config: ModelConfig,
    io: IoPort,
    limits: RunLimits = RunLimits(),
    base_dir: str | Path | None = None,
) -> ExecutionSummary:
    """Execute a validated program to completion or a clean stop.

    Raises BlockScriptValidationError if the program has validation
    errors. End of input inside `ask` and the step limit both stop the run
    cleanly; the summary records why it stopped.
    """
    problems = errors_of(validate(program))
    if problems:
        raise BlockScriptValidationError(problems)
    state = _Run(config, io, limits, base_dir)
    try:
        state.exec_program(program)
    except _Stop as stop:
        state.summary.stop_reason = stop.reason
    state.summary.model = state.model
    state.summary.result = state.result
    return state.summary


def transcript(
    program: Program,
    config: ModelConfig,
    io: ScriptedIo,
    limits: RunLimits = RunLimits(),
    base_dir: str | Path | None = None,
) -> str:
    """Run a program under a scripted IoPort and return everything it
    wrote, one line per write_line, byte-stable. An under-supplied script
    simply stops the run early; the transcript ends where the program did."""
    run(program, config, io, limits=limits, base_dir=base_dir)
    return io.transcript
