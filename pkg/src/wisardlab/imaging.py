"""Image handling around the binary retina: PGM read/write, threshold
binarization with mean-pool resampling, and grayscale rendering of mental
images."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import BinaryPattern, MentalImage
from .errors import PgmError


class GrayImage:
    """Row-major 8-bit luminance image."""

    __slots__ = ("width", "height", "luminance")

    def __init__(self, width: int, height: int, luminance):
        if width < 1 or height < 1:
            raise ValueError("image dimensions must be positive")
        arr = np.asarray(luminance).ravel()
        if arr.size != width * height:
            raise ValueError(
                f"expected {width * height} luminance values, got {arr.size}"
            )
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("luminance values must be within 0..255")
        self.width = width
        self.height = height
        self.luminance = arr.astype(np.uint8)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GrayImage)
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.luminance, other.luminance)
        )

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True)
class BinarizeConfig:
    """Resample-and-threshold settings: an image is mean-pooled to the
    target retina size, then each cell becomes 1 iff its mean luminance is
    strictly below the threshold."""

    target_width: int
    target_height: int
    threshold: int = 128

    def __post_init__(self):
        if not 0 <= self.threshold <= 255:
            raise ValueError("threshold must be within 0..255")
        if self.target_width < 1 or self.target_height < 1:
            raise ValueError("target dimensions must be positive")


def _read_header_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Next whitespace-delimited header token, skipping '#' comments."""
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise PgmError("malformed header: unexpected end of data")
    return data[start:pos], pos


def _read_header_int(data: bytes, pos: int, what: str) -> tuple[int, int]:
    token, pos = _read_header_token(data, pos)
    try:
        value = int(token)
    except ValueError:
        raise PgmError(f"malformed header: {what} is not an integer: {token!r}")
    return value, pos


def load_pgm(data: bytes) -> GrayImage:
    """Parse a PGM image, P2 (ASCII) or P5 (binary), maxval up to 255.

    Header comments ('#' to end of line) are allowed. Raises PgmError on a
    bad magic number, malformed header, unsupported maxval, or truncated
    pixel data.
    """
    if not isinstance(data, (bytes, bytearray)):
        raise PgmError("PGM data must be bytes")
    data = bytes(data)
    try:
        magic, pos = _read_header_token(data, 0)
    except PgmError:
        raise PgmError("malformed header: empty data")
    if magic not in (b"P2", b"P5"):
        raise PgmError(f"unsupported magic number {magic!r}, expected P2 or P5")
    width, pos = _read_header_int(data, pos, "width")
    height, pos = _read_header_int(data, pos, "height")
    maxval, pos = _read_header_int(data, pos, "maxval")
    if width < 1 or height < 1:
        raise PgmError(f"malformed header: bad dimensions {width}x{height}")
    if not 1 <= maxval <= 255:
        raise PgmError(f"unsupported maxval {maxval}, must be within 1..255")
    count = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates the header from the payload
        if pos >= len(data) or not data[pos : pos + 1].isspace():
            raise PgmError("malformed header: missing separator before pixel data")
        pos += 1
        payload = data[pos : pos + count]
        if len(payload) < count:
            raise PgmError(
                f"truncated pixel data: expected {count} bytes, got {len(payload)}"
            )
        values = np.frombuffer(payload, dtype=np.uint8)
    else:
        tokens = []
        while len(tokens) < count:
            try:
                token, pos = _read_header_token(data, pos)
            except PgmError:
                raise PgmError(
                    f"truncated pixel data: expected {count} values, got {len(tokens)}"
                )
            tokens.append(token)
        try:
            values = np.array([int(t) for t in tokens], dtype=np.int64)
        except ValueError:
            raise PgmError("malformed pixel data: non-integer sample")
        if values.size and (values.min() < 0 or values.max() > maxval):
            raise PgmError("malformed pixel data: sample outside 0..maxval")
    if maxval != 255 and magic == b"P5" and values.size and int(values.max()) > maxval:
        raise PgmError("malformed pixel data: sample outside 0..maxval")
    return GrayImage(width, height, values)


def write_pgm(image: GrayImage) -> bytes:
    """Binary (P5) encoding with maxval 255; load_pgm round-trips it
    byte-exactly."""
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + image.luminance.tobytes()


def _spans(source: int, target: int) -> list[tuple[int, int]]:
    """Even integer partition of `source` cells into `target` spans.

    When target <= source the spans tile the source exactly with sizes
    differing by at most one; when target > source each span is the single
    nearest source cell.
    """
    spans = []
    for i in range(target):
        start = i * source // target
        end = max(start + 1, (i + 1) * source // target)
        spans.append((start, end))
    return spans


def binarize(image: GrayImage, cfg: BinarizeConfig) -> BinaryPattern:
    """Mean-pool the image to the target retina size, then threshold:
    bit = 1 iff the cell's mean luminance < cfg.threshold (dark ink on a
    light background becomes 1s)."""
    grid = image.luminance.reshape(image.height, image.width).astype(np.float64)
    rows = _spans(image.height, cfg.target_height)
    cols = _spans(image.width, cfg.target_width)
    bits = np.zeros(cfg.target_height * cfg.target_width, dtype=np.uint8)
    k = 0
    for r0, r1 in rows:
        for c0, c1 in cols:
            if grid[r0:r1, c0:c1].mean() < cfg.threshold:
                bits[k] = 1
            k += 1
    return BinaryPattern(cfg.target_width, cfg.target_height, bits)


def render_mental_image(mi: MentalImage) -> GrayImage:
    """Grayscale rendering: the maximum count maps to black (0) and count
    zero to white (255). Rounds half away from zero so outputs are
    byte-stable."""
    if mi.max_count == 0:
        return GrayImage(mi.width, mi.height, [255] * (mi.width * mi.height))
    lum = [
        255 - int((255.0 * c / mi.max_count) + 0.5)
        for c in mi.counts
    ]
    return GrayImage(mi.width, mi.height, lum)


@dataclass(frozen=True)
class LoadFailure:
    """Per-file diagnostic emitted while loading a directory of images."""

    path: str
    message: str


def load_pgm_dir(
    path: str | os.PathLike, cfg: BinarizeConfig
) -> tuple[list[tuple[str, BinaryPattern]], list[LoadFailure]]:
    """Binarize every .pgm file directly inside a directory, in filename
    order. Unreadable files become LoadFailure entries and the batch
    continues."""
    directory = Path(path)
    if not directory.is_dir():
        raise FileNotFoundError(f"not a directory: {directory}")
    items: list[tuple[str, BinaryPattern]] = []
    failures: list[LoadFailure] = []
    for entry in sorted(directory.iterdir(), key=lambda p: p.name):
        if not entry.is_file() or entry.suffix.lower() != ".pgm":
            continue
        try:
            pattern = binarize(load_pgm(entry.read_bytes()), cfg)
        except (PgmError, OSError, ValueError) as exc:
            failures.append(LoadFailure(str(entry), str(exc)))
            continue
        items.append((entry.name, pattern))
    return items, failures


def load_labeled_dir(
    path: str | os.PathLike, cfg: BinarizeConfig
) -> tuple[list[tuple[str, BinaryPattern]], list[LoadFailure]]:
    """Load a dataset directory whose immediate subdirectories are labels
    containing PGM files.

    Returns (label, pattern) pairs ordered by label then filename, plus
    per-file failures for anything that would not parse.
    """
    directory = Path(path)
    if not directory.is_dir():
        raise FileNotFoundError(f"not a directory: {directory}")
    items: list[tuple[str, BinaryPattern]] = []
    failures: list[LoadFailure] = []
    for label_dir in sorted(
        (d for d in directory.iterdir() if d.is_dir()), key=lambda p: p.name
    ):
        sub_items, sub_failures = load_pgm_dir(label_dir, cfg)
        items.extend((label_dir.name, pattern) for _, pattern in sub_items)
        failures.extend(sub_failures)
    return items, failures
