"""Parser and validator tests for BlockScript."""

from pathlib import Path

import pytest

from wisardlab.blockscript import BlockScriptSyntaxError, parse, validate
from wisardlab.blockscript.nodes import (
    AcquireImage,
    Ask,
    CameraSource,
    CreateWisard,
    CurrentImage,
    FileSource,
    FolderSource,
    If,
    Learn,
    Recognize,
    RepeatForever,
    ResultEquals,
    ResultUnknown,
    Say,
    ShowMentalImage,
    VarEquals,
)
from wisardlab.blockscript import validator

FIG40 = Path(__file__).resolve().parent.parent / "programs" / "fig40.bs"


class TestParse:
    def test_create_wisard(self):
        program = parse("create wisard")
        assert len(program.statements) == 1
        assert isinstance(program.statements[0], CreateWisard)

    def test_empty_source(self):
        assert parse("").statements == ()
        assert parse("# only a comment\n").statements == ()

    def test_say_and_ask(self):
        program = parse('say "hello"\nask -> name')
        say, ask = program.statements
        assert say.text == "hello"
        assert ask.var == "name"

    def test_take_picture_sources(self):
        program = parse('take picture from camera\ntake picture from file "img.pgm"')
        cam, fil = program.statements
        assert cam.source == CameraSource()
        assert fil.source == FileSource("img.pgm")

    def test_learn_sources(self):
        program = parse('learn "A" from picture\nlearn "B" from folder "shapes"')
        pic, folder = program.statements
        assert (pic.label, pic.source) == ("A", CurrentImage())
        assert (folder.label, folder.source) == ("B", FolderSource("shapes"))

    def test_show_mental_image(self):
        (stmt,) = parse('show mental image of "E"').statements
        assert stmt == ShowMentalImage("E", stmt.pos)

    def test_conditions(self):
        program = parse(
            'if x == "1" { recognize }\n'
            'if result == "A" { } else { }\n'
            "if result is unknown { }"
        )
        first, second, third = program.statements
        assert first.condition == VarEquals("x", "1")
        assert second.condition == ResultEquals("A")
        assert third.condition == ResultUnknown()
        assert second.else_block is not None
        assert third.else_block is None

    def test_string_escapes(self):
        (stmt,) = parse(r'say "a \"quoted\" word and a \\ slash"').statements
        assert stmt.text == 'a "quoted" word and a \\ slash'

    def test_positions_recorded(self):
        program = parse('\n  say "x"')
        assert program.statements[0].pos.line == 2
        assert program.statements[0].pos.column == 3

    def test_unclosed_quote(self):
        with pytest.raises(BlockScriptSyntaxError) as err:
            parse('learn "X from picture')
        assert err.value.line == 1
        assert err.value.column == 7
        assert "unterminated string" in str(err.value)

    def test_unterminated_block(self):
        with pytest.raises(BlockScriptSyntaxError, match="unterminated block"):
            parse("repeat forever {\n  recognize\n")

    def test_unknown_keyword(self):
        with pytest.raises(BlockScriptSyntaxError, match="unknown keyword"):
            parse("teach me")

    def test_reserved_result_variable(self):
        with pytest.raises(BlockScriptSyntaxError, match="reserved"):
            parse("ask -> result")

    def test_stray_close_brace(self):
        with pytest.raises(BlockScriptSyntaxError):
            parse("}")

    def test_fig40_shape(self):
        program = parse(FIG40.read_text())
        create, loop = program.statements
        assert isinstance(create, CreateWisard)
        assert isinstance(loop, RepeatForever)
        teach_or_recognize = loop.body.statements[-1]
        assert isinstance(teach_or_recognize, If)
        # teach arm: nested flower/star ifs with two learns
        learns = [s for s in loop.body.walk() if isinstance(s, Learn)]
        assert [l.label for l in learns] == ["Flower", "Star"]
        assert all(isinstance(l.source, CurrentImage) for l in learns)
        recognizes = [s for s in loop.body.walk() if isinstance(s, Recognize)]
        assert len(recognizes) == 1
        answers = [
            s.condition for s in loop.body.walk() if isinstance(s, If)
        ]
        assert ResultEquals("Flower") in answers
        assert ResultEquals("Star") in answers


class TestValidate:
    def test_learn_before_create(self):
        program = parse('learn "X" from folder "d"\ncreate wisard')
        diagnostics = validate(program)
        assert len(diagnostics) == 1
        d = diagnostics[0]
        assert d.code == validator.LEARN_BEFORE_CREATE
        assert d.severity == "error"
        assert "must FIRST use" in d.message
        assert d.line == 1

    def test_duplicate_create(self):
        diagnostics = validate(parse("create wisard\ncreate wisard"))
        assert [d.code for d in diagnostics] == [validator.DUPLICATE_CREATE]
        assert diagnostics[0].line == 2

    def test_recognize_needs_create_and_picture(self):
        diagnostics = validate(parse("recognize"))
        codes = {d.code for d in diagnostics}
        assert codes == {
            validator.RECOGNIZE_BEFORE_CREATE,
            validator.RECOGNIZE_BEFORE_PICTURE,
        }

    def test_learn_from_picture_needs_picture(self):
        program = parse('create wisard\nlearn "X" from picture')
        assert [d.code for d in validate(program)] == [validator.LEARN_BEFORE_PICTURE]

    def test_learn_from_folder_needs_no_picture(self):
        program = parse('create wisard\nlearn "X" from folder "d"')
        assert validate(program) == []

    def test_mental_image_before_create(self):
        diagnostics = validate(parse('show mental image of "X"'))
        assert [d.code for d in validate(parse('show mental image of "X"'))] == [
            validator.MENTAL_IMAGE_BEFORE_CREATE
        ]

    def test_unbound_variable_warning(self):
        program = parse('create wisard\nif x == "1" { say "y" }')
        diagnostics = validate(program)
        assert [d.code for d in diagnostics] == [validator.UNBOUND_VARIABLE]
        assert diagnostics[0].severity == "warning"

    def test_ask_binds_anywhere_lexically(self):
        program = parse('if x == "1" { say "y" }\nask -> x')
        assert validate(program) == []

    def test_nested_statements_checked(self):
        program = parse('repeat forever { learn "X" from folder "d" }\ncreate wisard')
        assert [d.code for d in validate(program)] == [validator.LEARN_BEFORE_CREATE]

    def test_fig40_is_clean(self):
        assert validate(parse(FIG40.read_text())) == []
