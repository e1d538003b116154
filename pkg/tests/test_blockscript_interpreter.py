"""Interpreter behavior: scripted runs, limits, the result register, and
runtime diagnostics."""

import random

import pytest

from wisardlab.blockscript import (
    BlockScriptValidationError,
    ModelConfig,
    RunLimits,
    ScriptedIo,
    parse,
    run,
    transcript,
)
from wisardlab.core import BinaryPattern, WisardModel

from .conftest import pattern_pgm, random_pattern

CFG = ModelConfig(width=4, height=4, tuple_size=2, seed=5, threshold=128)


def write_pattern(tmp_path, name, pattern):
    path = tmp_path / name
    path.write_bytes(pattern_pgm(pattern))
    return path


@pytest.fixture
def star_and_probe(tmp_path):
    rng = random.Random(99)
    star = random_pattern(rng, 4, 4)
    probe = star.with_flipped(3)
    write_pattern(tmp_path, "star1.pgm", star)
    write_pattern(tmp_path, "star2.pgm", probe)
    return star, probe


class TestRun:
    def test_single_class_recognizes_perturbed_image(self, tmp_path, star_and_probe):
        source = (
            "create wisard\n"
            'take picture from file "star1.pgm"\n'
            'learn "Star" from picture\n'
            'take picture from file "star2.pgm"\n'
            "recognize\n"
            'if result == "Star" { say "Star" } else { say "something else" }\n'
        )
        io = ScriptedIo(base_dir=tmp_path)
        summary = run(parse(source), CFG, io, base_dir=tmp_path)
        assert io.lines == ["Star"]
        assert summary.stop_reason == "completed"
        assert summary.labels_trained == ("Star",)
        assert summary.examples_trained == 1
        assert summary.classifications_made == 1
        assert summary.result.decision == "Star"

    def test_recognize_before_training_is_unknown(self, tmp_path, star_and_probe):
        source = (
            "create wisard\n"
            'take picture from file "star1.pgm"\n'
            "recognize\n"
            'if result is unknown { say "I do not know" }\n'
        )
        io = ScriptedIo(base_dir=tmp_path)
        summary = run(parse(source), CFG, io, base_dir=tmp_path)
        assert io.lines == ["I do not know"]
        assert summary.result.is_unknown

    def test_loop_limit_stops_cleanly(self):
        source = 'repeat forever { say "tick" }'
        io = ScriptedIo()
        summary = run(
            parse(source), CFG, io, limits=RunLimits(max_loop_iterations=3)
        )
        assert io.lines == ["tick", "tick", "tick"]
        assert summary.loop_limit_hit
        assert summary.stop_reason == "completed"

    def test_end_of_input_stops_cleanly(self):
        source = 'repeat forever { ask -> x\n say "again" }'
        io = ScriptedIo(inputs=["a", "b"])
        summary = run(parse(source), CFG, io)
        assert io.lines == ["again", "again"]
        assert summary.stop_reason == "end_of_input"

    def test_step_limit(self):
        source = 'repeat forever { say "x" }'
        io = ScriptedIo()
        summary = run(parse(source), CFG, io, limits=RunLimits(max_steps=10))
        assert summary.stop_reason == "step_limit"
        assert summary.statements_executed == 10

    def test_ask_binds_variables_for_branching(self):
        source = (
            "create wisard\n"
            "ask -> choice\n"
            'if choice == "yes" { say "agreed" } else { say "declined" }\n'
        )
        io = ScriptedIo(inputs=["yes"])
        run(parse(source), CFG, io)
        assert io.lines == ["agreed"]
        io = ScriptedIo(inputs=["no"])
        run(parse(source), CFG, io)
        assert io.lines == ["declined"]

    def test_camera_queue(self, tmp_path, star_and_probe):
        star, _ = star_and_probe
        source = (
            "create wisard\n"
            "take picture from camera\n"
            'learn "Star" from picture\n'
            "take picture from camera\n"
            "recognize\n"
            'if result == "Star" { say "recognized" }\n'
        )
        io = ScriptedIo(camera=[tmp_path / "star1.pgm", tmp_path / "star2.pgm"])
        summary = run(parse(source), CFG, io, base_dir=tmp_path)
        assert io.lines == ["recognized"]
        assert summary.classifications_made == 1

    def test_image_failure_reported_and_skipped(self, tmp_path, star_and_probe):
        source = (
            "create wisard\n"
            'take picture from file "star1.pgm"\n'
            'take picture from file "missing.pgm"\n'
            "recognize\n"
            'if result is unknown { say "unknown" }\n'
        )
        io = ScriptedIo(base_dir=tmp_path)
        summary = run(parse(source), CFG, io, base_dir=tmp_path)
        # the failed acquire left star1 as the current image
        assert summary.classifications_made == 1
        assert len(summary.diagnostics) == 1
        assert "missing.pgm" in summary.diagnostics[0]
        assert io.lines == ["unknown"]

    def test_learn_from_folder_fixed_label(self, tmp_path):
        rng = random.Random(4)
        shapes = tmp_path / "shapes"
        shapes.mkdir()
        patterns = [random_pattern(rng, 4, 4) for _ in range(3)]
        for i, p in enumerate(patterns):
            (shapes / f"s{i}.pgm").write_bytes(pattern_pgm(p))
        (shapes / "bad.pgm").write_bytes(b"P5\n9 9\n255\nshort")
        source = 'create wisard\nlearn "Shape" from folder "shapes"'
        io = ScriptedIo(base_dir=tmp_path)
        summary = run(parse(source), CFG, io, base_dir=tmp_path)
        assert summary.examples_trained == 3
        assert summary.labels_trained == ("Shape",)
        assert len(summary.diagnostics) == 1 and "bad.pgm" in summary.diagnostics[0]
        assert summary.model.label_counts() == {"Shape": 3}

    def test_mental_image_event(self, tmp_path, star_and_probe):
        star, _ = star_and_probe
        source = (
            "create wisard\n"
            'take picture from file "star1.pgm"\n'
            'learn "Star" from picture\n'
            'show mental image of "Star"\n'
        )
        io = ScriptedIo(base_dir=tmp_path)
        run(parse(source), CFG, io, base_dir=tmp_path)
        (event,) = [e for e in io.events if e["type"] == "mental_image"]
        assert event["label"] == "Star"
        assert event["counts"] == star.tolist()
        assert event["max_count"] == 1

    def test_mental_image_unknown_label_reports(self):
        source = 'create wisard\nshow mental image of "Ghost"'
        io = ScriptedIo()
        summary = run(parse(source), CFG, io)
        assert len(summary.diagnostics) == 1
        assert "Ghost" in summary.diagnostics[0]

    def test_invalid_program_refused(self):
        program = parse('learn "X" from folder "d"\ncreate wisard')
        with pytest.raises(BlockScriptValidationError):
            run(program, CFG, ScriptedIo())

    def test_create_in_untaken_branch_guarded(self):
        source = (
            'ask -> go\n'
            'if go == "yes" { create wisard }\n'
            'learn "X" from folder "d"\n'
        )
        io = ScriptedIo(inputs=["no"])
        summary = run(parse(source), CFG, io)
        assert any("no model" in d for d in summary.diagnostics)

    def test_online_learning_correction(self, tmp_path):
        rng = random.Random(12)
        flower = random_pattern(rng, 4, 4)
        star = random_pattern(rng, 4, 4)
        confusing = random_pattern(rng, 4, 4)
        for name, p in [("flower.pgm", flower), ("star.pgm", star), ("new.pgm", confusing)]:
            write_pattern(tmp_path, name, p)
        source = (
            "create wisard\n"
            'take picture from file "flower.pgm"\n'
            'learn "Flower" from picture\n'
            'take picture from file "star.pgm"\n'
            'learn "Star" from picture\n'
            'take picture from file "new.pgm"\n'
            "recognize\n"
            'if result == "Flower" { say "guess: Flower" } else { say "guess: not Flower" }\n'
            'learn "Flower" from picture\n'
            "recognize\n"
            'if result == "Flower" { say "now: Flower" } else { say "now: not Flower" }\n'
        )
        io = ScriptedIo(base_dir=tmp_path)
        summary = run(parse(source), CFG, io, base_dir=tmp_path)
        # after the corrective lesson the same picture must be recognized
        assert io.lines[-1] == "now: Flower"
        assert summary.classifications_made == 2

    def test_result_register_matches_engine(self, tmp_path, star_and_probe):
        star, probe = star_and_probe
        source = (
            "create wisard\n"
            'take picture from file "star1.pgm"\n'
            'learn "Star" from picture\n'
            'take picture from file "star2.pgm"\n'
            "recognize\n"
        )
        io = ScriptedIo(base_dir=tmp_path)
        summary = run(parse(source), CFG, io, base_dir=tmp_path)
        mirror = WisardModel(CFG.width, CFG.height, CFG.tuple_size, CFG.seed)
        mirror.train(star, "Star")
        assert summary.result == mirror.classify(probe)


class TestTranscript:
    def test_empty_program(self):
        assert transcript(parse(""), CFG, ScriptedIo()) == ""

    def test_say_only(self):
        text = transcript(parse('say "a"\nsay "b"'), CFG, ScriptedIo())
        assert text == "a\nb\n"

    def test_under_supplied_script_truncates(self):
        source = 'say "one"\nask -> x\nsay "two"'
        text = transcript(parse(source), CFG, ScriptedIo(inputs=[]))
        assert text == "one\n"

    def test_deterministic(self, tmp_path, star_and_probe):
        source = (
            "create wisard\n"
            'take picture from file "star1.pgm"\n'
            'learn "Star" from picture\n'
            'take picture from file "star2.pgm"\n'
            "recognize\n"
            'if result == "Star" { say "Star" }\n'
        )
        program = parse(source)
        first = transcript(program, CFG, ScriptedIo(base_dir=tmp_path), base_dir=tmp_path)
        second = transcript(program, CFG, ScriptedIo(base_dir=tmp_path), base_dir=tmp_path)
        assert first == second == "Star\n"
