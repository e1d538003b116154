"""WiSARD engine: retina patterns, tuple mappings, RAM discriminators with
access counters, bleaching classification, mental-image extraction, and a
versioned JSON model format.

A model owns one pixel-to-tuple mapping shared by every discriminator.
Neurons are sparse address->counter maps, so memory grows with training
volume rather than with 2**tuple_size.

Values are immutable after construction except through train/remove_label.
Concurrent readers of an unchanging model are safe; mutation needs
exclusive access, which callers (the service layer) enforce.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    ModelFormatError,
    UnknownLabelError,
    VersionMismatchError,
)

FORMAT_VERSION = 1
MAX_TUPLE_SIZE = 24

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    """One SplitMix64 step: returns (next_state, 64-bit output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def _seeded_permutation(n: int, seed: int) -> list[int]:
    """Fisher-Yates shuffle of range(n) driven by SplitMix64.

    Self-contained so that a given seed produces the same mapping on every
    platform and interpreter version; model files additionally store the
    mapping explicitly, so nothing downstream depends on this choice.
    """
    items = list(range(n))
    state = seed & _MASK64
    for i in range(n - 1, 0, -1):
        # rejection sampling for an unbiased draw in [0, i]
        bound = i + 1
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            state, value = _splitmix64(state)
            if value < limit:
                break
        j = value % bound
        items[i], items[j] = items[j], items[i]
    return items


class BinaryPattern:
    """A width x height grid of bits, row-major. Bit 1 is a black drawing
    pixel, bit 0 is white background."""

    __slots__ = ("width", "height", "bits")

    def __init__(self, width: int, height: int, bits):
        if width < 1 or height < 1:
            raise ValueError("pattern dimensions must be positive")
        arr = np.asarray(bits).ravel()
        if arr.size != width * height:
            raise ValueError(
                f"expected {width * height} bits for {width}x{height}, got {arr.size}"
            )
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("pattern bits must be 0 or 1")
        self.width = width
        self.height = height
        self.bits = arr.astype(np.uint8)
        self.bits.setflags(write=False)

    @classmethod
    def from_rows(cls, rows: list[str] | tuple[str, ...]) -> "BinaryPattern":
        """Build a pattern from strings of '0'/'1' characters, one per row."""
        height = len(rows)
        if height == 0:
            raise ValueError("at least one row required")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("all rows must have equal length")
        bits = [1 if c == "1" else 0 if c == "0" else None for r in rows for c in r]
        if None in bits:
            raise ValueError("rows may contain only '0' and '1'")
        return cls(width, height, bits)

    def with_flipped(self, *pixels: int) -> "BinaryPattern":
        """Copy of this pattern with the given pixel indices inverted."""
        bits = self.bits.copy()
        for p in pixels:
            bits[p] ^= 1
        return BinaryPattern(self.width, self.height, bits)

    def tolist(self) -> list[int]:
        return self.bits.astype(int).tolist()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BinaryPattern)
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.bits, other.bits)
        )

    def __hash__(self):
        return hash((self.width, self.height, self.bits.tobytes()))

    def __repr__(self):
        return f"BinaryPattern({self.width}x{self.height})"


def _check_mapping_shape(num_pixels: int, tuple_size: int, tuples) -> None:
    if num_pixels < 1:
        raise ValueError("zero-area retina: num_pixels must be >= 1")
    if not 1 <= tuple_size <= MAX_TUPLE_SIZE:
        raise ValueError(
            f"tuple_size must be between 1 and {MAX_TUPLE_SIZE}, got {tuple_size}"
        )
    flat = [p for t in tuples for p in t]
    if sorted(flat) != list(range(num_pixels)):
        raise ValueError("mapping tuples must partition the pixel indices exactly")
    remainder = num_pixels % tuple_size
    expected = [tuple_size] * (num_pixels // tuple_size)
    if remainder:
        expected.append(remainder)
    if [len(t) for t in tuples] != expected:
        raise ValueError(
            "tuples must all have length tuple_size, except a shorter final "
            "tuple holding the remainder pixels"
        )


@dataclass(frozen=True)
class TupleMapping:
    """Seeded partition of pixel indices into ordered tuples.

    Every pixel index appears in exactly one tuple. All tuples have length
    ``tuple_size`` except possibly the last, which holds the remainder when
    ``tuple_size`` does not divide ``num_pixels``.
    """

    num_pixels: int
    tuple_size: int
    seed: int
    tuples: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "tuples", tuple(tuple(int(p) for p in t) for t in self.tuples)
        )
        _check_mapping_shape(self.num_pixels, self.tuple_size, self.tuples)

    @classmethod
    def generate(cls, num_pixels: int, tuple_size: int, seed: int) -> "TupleMapping":
        if num_pixels < 1:
            raise ValueError("zero-area retina: num_pixels must be >= 1")
        if not 1 <= tuple_size <= MAX_TUPLE_SIZE:
            raise ValueError(
                f"tuple_size must be between 1 and {MAX_TUPLE_SIZE}, got {tuple_size}"
            )
        perm = _seeded_permutation(num_pixels, seed)
        tuples = tuple(
            tuple(perm[i : i + tuple_size]) for i in range(0, num_pixels, tuple_size)
        )
        return cls(num_pixels, tuple_size, seed, tuples)

    def __len__(self) -> int:
        return len(self.tuples)


def generate_mapping(num_pixels: int, tuple_size: int, seed: int) -> TupleMapping:
    """Seeded-shuffle permutation of pixel indices chunked into tuples."""
    return TupleMapping.generate(num_pixels, tuple_size, seed)


def address_of(pattern: BinaryPattern, tuple_indices) -> int:
    """RAM address selected by a tuple: big-endian, first pixel of the
    tuple is the most significant bit."""
    address = 0
    for idx in tuple_indices:
        idx = int(idx)
        if not 0 <= idx < pattern.bits.size:
            raise IndexError(f"pixel index {idx} out of bounds")
        address = (address << 1) | int(pattern.bits[idx])
    return address


@dataclass
class Discriminator:
    """One class's knowledge: a sparse counter RAM per tuple.

    Counters record how many training examples addressed each position;
    zero-count entries are never stored.
    """

    label: str
    neurons: list[dict[int, int]]
    examples_trained: int = 0


@dataclass(frozen=True)
class MentalImage:
    """Reverse read-out of a discriminator onto the retina: per-pixel sums
    of the counters whose addresses have that pixel's bit set."""

    width: int
    height: int
    counts: tuple[int, ...]
    max_count: int


@dataclass(frozen=True)
class ClassificationOutcome:
    """Result of a bleaching classification.

    ``decision`` is None for the explicit Unknown answer. ``trace`` lists
    (bleach level, scores) for every level visited, in order.
    """

    decision: str | None
    final_bleach: int
    scores: dict[str, int]
    tie_broken: bool
    trace: tuple[tuple[int, dict[str, int]], ...]

    @property
    def is_unknown(self) -> bool:
        return self.decision is None


class WisardModel:
    """A retina, one shared tuple mapping, and a discriminator per label."""

    def __init__(
        self,
        width: int,
        height: int,
        tuple_size: int | None = None,
        seed: int = 0,
        mapping: TupleMapping | None = None,
    ):
        if width < 1 or height < 1:
            raise ValueError("zero-area retina: width and height must be >= 1")
        num_pixels = width * height
        if mapping is None:
            if tuple_size is None:
                raise ValueError("tuple_size is required when no mapping is given")
            mapping = TupleMapping.generate(num_pixels, tuple_size, seed)
        elif mapping.num_pixels != num_pixels:
            raise ValueError(
                f"mapping covers {mapping.num_pixels} pixels, retina has {num_pixels}"
            )
        self.width = width
        self.height = height
        self.mapping = mapping
        self.discriminators: dict[str, Discriminator] = {}
        # padded gather matrix for vectorized address computation; the pad
        # index points at a sentinel 0 bit appended to the pattern
        sizes = [len(t) for t in mapping.tuples]
        widest = max(sizes)
        self._pad_index = num_pixels
        self._gather = np.array(
            [(self._pad_index,) * (widest - len(t)) + t for t in mapping.tuples],
            dtype=np.int64,
        )
        self._powers = 1 << np.arange(widest - 1, -1, -1, dtype=np.int64)

    @property
    def tuple_size(self) -> int:
        return self.mapping.tuple_size

    @property
    def seed(self) -> int:
        return self.mapping.seed

    @property
    def num_tuples(self) -> int:
        return len(self.mapping)

    def labels(self) -> list[str]:
        return sorted(self.discriminators)

    def label_counts(self) -> dict[str, int]:
        """Examples trained per label, sorted by label."""
        return {l: self.discriminators[l].examples_trained for l in self.labels()}

    def _check_dims(self, pattern: BinaryPattern) -> None:
        if pattern.width != self.width or pattern.height != self.height:
            raise DimensionMismatchError(
                f"pattern is {pattern.width}x{pattern.height}, "
                f"retina is {self.width}x{self.height}"
            )

    def addresses(self, pattern: BinaryPattern) -> list[int]:
        """Per-tuple RAM addresses for a pattern, in mapping order."""
        self._check_dims(pattern)
        bits = np.append(pattern.bits, np.uint8(0)).astype(np.int64)
        return (bits[self._gather] * self._powers).sum(axis=1).tolist()

    def train(self, pattern: BinaryPattern, label: str) -> "WisardModel":
        """Write one example: increment each addressed counter by 1,
        creating the label's discriminator on first use."""
        if not label:
            raise ValueError("label must be a non-empty string")
        self._check_dims(pattern)
        disc = self.discriminators.get(label)
        if disc is None:
            disc = Discriminator(label, [dict() for _ in self.mapping.tuples])
            self.discriminators[label] = disc
        for neuron, addr in zip(disc.neurons, self.addresses(pattern)):
            neuron[addr] = neuron.get(addr, 0) + 1
        disc.examples_trained += 1
        return self

    def remove_label(self, label: str) -> "WisardModel":
        if label not in self.discriminators:
            raise UnknownLabelError(f"no discriminator for label {label!r}")
        del self.discriminators[label]
        return self

    def _probe(self, pattern: BinaryPattern) -> dict[str, list[int]]:
        """Counter values at the addressed position of every neuron,
        per label."""
        addrs = self.addresses(pattern)
        return {
            label: [n.get(a, 0) for n, a in zip(disc.neurons, addrs)]
            for label, disc in self.discriminators.items()
        }

    def responses(self, pattern: BinaryPattern, b: int = 1) -> dict[str, int]:
        """Adder score per label at bleach level b: the number of tuples
        whose addressed counter is >= b. At b=1 this equals the original
        0/1 WiSARD adder."""
        if b < 1:
            raise ValueError("bleach level must be >= 1")
        probe = self._probe(pattern)
        return {label: sum(1 for c in values if c >= b) for label, values in probe.items()}

    def classify(self, pattern: BinaryPattern, min_score: int = 0) -> ClassificationOutcome:
        """Bleaching classification.

        Starts at b=1 and escalates b by 1 while the top score is tied
        between two or more labels. If escalation drives every score to
        zero, the tie is unbreakable: revert to the last informative level
        and pick the lexicographically smallest tied label, flagging
        tie_broken. Answers Unknown when the best score at b=1 does not
        exceed ``min_score``.
        """
        probe = self._probe(pattern)

        def scores_at(level: int) -> dict[str, int]:
            return {l: sum(1 for c in v if c >= level) for l, v in probe.items()}

        b = 1
        scores = scores_at(b)
        trace = [(b, scores)]
        if not scores or max(scores.values()) <= min_score:
            return ClassificationOutcome(None, b, scores, False, tuple(trace))
        while True:
            top = max(scores.values())
            tied = sorted(l for l, s in scores.items() if s == top)
            if len(tied) == 1:
                return ClassificationOutcome(tied[0], b, scores, False, tuple(trace))
            nxt = scores_at(b + 1)
            trace.append((b + 1, nxt))
            if max(nxt.values()) == 0:
                return ClassificationOutcome(tied[0], b, scores, True, tuple(trace))
            b, scores = b + 1, nxt

    def mental_image(self, label: str) -> MentalImage:
        """DRASiW read-out: for every stored (address, counter), add the
        counter to each retina cell whose tuple bit is 1 in that address."""
        disc = self.discriminators.get(label)
        if disc is None:
            raise UnknownLabelError(f"no discriminator for label {label!r}")
        counts = [0] * (self.width * self.height)
        for tup, neuron in zip(self.mapping.tuples, disc.neurons):
            size = len(tup)
            for addr, counter in neuron.items():
                for j, pixel in enumerate(tup):
                    if (addr >> (size - 1 - j)) & 1:
                        counts[pixel] += counter
        return MentalImage(self.width, self.height, tuple(counts), max(counts, default=0))


def new_model(width: int, height: int, tuple_size: int, seed: int) -> WisardModel:
    """Fresh model with an empty discriminator map and a generated mapping."""
    return WisardModel(width, height, tuple_size=tuple_size, seed=seed)


def _model_document(model: WisardModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "width": model.width,
        "height": model.height,
        "tuple_size": model.mapping.tuple_size,
        "seed": model.mapping.seed,
        "mapping": [list(t) for t in model.mapping.tuples],
        "discriminators": {
            label: {
                "examples_trained": disc.examples_trained,
                "neurons": [
                    {str(addr): count for addr, count in sorted(neuron.items())}
                    for neuron in disc.neurons
                ],
            }
            for label, disc in model.discriminators.items()
        },
    }


def serialize_model(model: WisardModel) -> bytes:
    """Versioned UTF-8 JSON document. Keys are sorted and separators fixed
    so that equal models serialize to identical bytes."""
    doc = _model_document(model)
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode(
        "utf-8"
    )


def _require(condition: bool, message: str, code: str) -> None:
    if not condition:
        raise ModelFormatError(message, code=code)


def deserialize_model(data: bytes | str) -> WisardModel:
    """Parse and validate a serialized model.

    Rejects unknown format versions, malformed structure, and invariant
    violations (bad mapping, out-of-range addresses, non-positive
    counters, counter mass inconsistent with examples_trained).
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"not valid JSON: {exc}", code="malformed_document")
    _require(isinstance(doc, dict), "document must be a JSON object", "malformed_document")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(
            f"unsupported format_version {version!r}, expected {FORMAT_VERSION}"
        )
    try:
        width = int(doc["width"])
        height = int(doc["height"])
        tuple_size = int(doc["tuple_size"])
        seed = int(doc["seed"])
        raw_mapping = doc["mapping"]
        raw_discs = doc["discriminators"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"missing or invalid field: {exc}", code="malformed_document")
    _require(isinstance(raw_mapping, list), "mapping must be a list", "malformed_document")
    _require(isinstance(raw_discs, dict), "discriminators must be an object", "malformed_document")
    try:
        mapping = TupleMapping(
            num_pixels=width * height,
            tuple_size=tuple_size,
            seed=seed,
            tuples=tuple(tuple(t) for t in raw_mapping),
        )
        model = WisardModel(width, height, mapping=mapping)
    except (ValueError, TypeError) as exc:
        raise ModelFormatError(f"invalid mapping: {exc}", code="invalid_mapping")

    for label, raw in raw_discs.items():
        _require(bool(label), "empty label", "invalid_label")
        _require(isinstance(raw, dict), f"discriminator {label!r} must be an object", "malformed_document")
        neurons_raw = raw.get("neurons")
        _require(
            isinstance(neurons_raw, list) and len(neurons_raw) == len(mapping),
            f"discriminator {label!r} must have one neuron per tuple",
            "malformed_document",
        )
        examples = raw.get("examples_trained")
        _require(
            isinstance(examples, int) and examples >= 0,
            f"discriminator {label!r} has invalid examples_trained",
            "malformed_document",
        )
        neurons: list[dict[int, int]] = []
        mass = 0
        for tup, raw_neuron in zip(mapping.tuples, neurons_raw):
            _require(
                isinstance(raw_neuron, dict),
                f"neuron of {label!r} must be an object",
                "malformed_document",
            )
            neuron: dict[int, int] = {}
            limit = 1 << len(tup)
            for key, count in raw_neuron.items():
                try:
                    addr = int(key)
                except (TypeError, ValueError):
                    raise ModelFormatError(
                        f"address {key!r} of {label!r} is not an integer",
                        code="invalid_address",
                    )
                _require(
                    0 <= addr < limit,
                    f"address {addr} of {label!r} out of range for a "
                    f"{len(tup)}-pixel tuple",
                    "invalid_address",
                )
                _require(
                    isinstance(count, int) and count >= 1,
                    f"counter at address {addr} of {label!r} must be a positive integer",
                    "invalid_counter",
                )
                neuron[addr] = count
                mass += count
            neurons.append(neuron)
        _require(
            mass == examples * len(mapping),
            f"counter mass of {label!r} is {mass}, expected "
            f"{examples * len(mapping)} for {examples} examples",
            "invalid_counter",
        )
        model.discriminators[label] = Discriminator(label, neurons, examples)
    return model
