"""BlockScript: a small teaching language whose learning and recognition
primitives are ordinary statements."""

from .interpreter import (
    BlockScriptValidationError,
    ExecutionSummary,
    ImageAcquireError,
    IoPort,
    ModelConfig,
    RunLimits,
    ScriptedIo,
    run,
    transcript,
)
from .nodes import Program
from .parser import BlockScriptSyntaxError, parse
from .validator import ValidationDiagnostic, errors_of, validate

__all__ = [
    "BlockScriptSyntaxError",
    "BlockScriptValidationError",
    "ExecutionSummary",
    "ImageAcquireError",
    "IoPort",
    "ModelConfig",
    "Program",
    "RunLimits",
    "ScriptedIo",
    "ValidationDiagnostic",
    "errors_of",
    "parse",
    "run",
    "transcript",
    "validate",
]
