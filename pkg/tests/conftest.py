"""Shared fixtures: the canonical letter bitmaps, their fixed tuple
mapping, and small PGM builders."""

from __future__ import annotations

import random

import pytest

from wisardlab.core import BinaryPattern, TupleMapping, WisardModel

E_ROWS = ("111", "100", "111", "100", "111")
T_ROWS = ("111", "010", "010", "010", "010")

# fixed mapping for the 3x5 letter fixtures: tuples (A4,B2,C1), (A1,C4,A5),
# (C3,A2,B4), (B3,C5,A3), (C2,B1,B5) under index = (row-1)*width + column
ET_FIXTURE_TUPLES = ((9, 4, 2), (0, 11, 12), (8, 3, 10), (7, 14, 6), (5, 1, 13))


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        print(f"\nACCEPTANCE {'PASS' if report.passed else 'FAIL'}: {name}")


@pytest.fixture
def canonical_e() -> BinaryPattern:
    return BinaryPattern.from_rows(E_ROWS)


@pytest.fixture
def canonical_t() -> BinaryPattern:
    return BinaryPattern.from_rows(T_ROWS)


@pytest.fixture
def et_mapping() -> TupleMapping:
    return TupleMapping(num_pixels=15, tuple_size=3, seed=0, tuples=ET_FIXTURE_TUPLES)


@pytest.fixture
def et_model(et_mapping, canonical_e, canonical_t) -> WisardModel:
    """3x5 model with the fixed letter mapping, trained once on E and T."""
    model = WisardModel(3, 5, mapping=et_mapping)
    model.train(canonical_e, "E")
    model.train(canonical_t, "T")
    return model


def random_pattern(rng: random.Random, width: int, height: int) -> BinaryPattern:
    return BinaryPattern(
        width, height, [rng.randint(0, 1) for _ in range(width * height)]
    )


def pgm_p2(width: int, height: int, values, maxval: int = 255) -> bytes:
    body = " ".join(str(int(v)) for v in values)
    return f"P2\n{width} {height}\n{maxval}\n{body}\n".encode("ascii")


def pgm_p5(width: int, height: int, values, maxval: int = 255) -> bytes:
    header = f"P5\n{width} {height}\n{maxval}\n".encode("ascii")
    return header + bytes(int(v) for v in values)


def pattern_pgm(pattern: BinaryPattern) -> bytes:
    """P5 image that binarizes back to the given pattern at threshold 128."""
    values = [0 if b else 255 for b in pattern.tolist()]
    return pgm_p5(pattern.width, pattern.height, values)
