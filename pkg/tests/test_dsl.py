"""Netlist parsing, type checking, dual evaluation, and pretty printing."""

import random
import re
from fractions import Fraction

import pytest

from bctk import dsl, verify
from bctk.bct import Transformation
from bctk.systems import PureLabel, SystemShape

GOLDEN = """\
system a = elem 2
system b = elem 3
system ab = a * b
system ba = b * a
system fused = elem 12
state point : a = (2)
state mixed : ab = 1/2 ((1,2);0) + 1/2 ((2,3);1)
effect last : b = (3)
effect dump : ab = discard
gate t : a -> a = atomic 1 -> 2 tau 1 w 1/2 + atomic 2 -> 2 tau 0 w 1
gate wire : b -> b = id
gate flip : ab -> ba = swap a b
gate merge : ab -> fused = nu a b
gate split : fused -> ab = nu_inv a b
gate shuffle : a -> a = rev 2,1 1,0
circuit closed = mixed ; dump
circuit staged = point ; t ; shuffle
eval closed
"""


def test_parse_system_declaration():
    ast = dsl.parse("system a = elem 2\n")
    assert ast.shapes["a"] == SystemShape((2,))


def test_parse_gate_with_fractional_weight():
    ast = dsl.parse(
        "system a = elem 2\ngate t : a -> a = atomic 1 -> 2 tau 1 w 1/2\n"
    )
    gate = ast.gates["t"]
    assert isinstance(gate, Transformation)
    assert gate.coeffs == {(1, 2, 1): Fraction(1, 2)}


def test_parse_golden_corpus_and_build_everything():
    ast = dsl.parse(GOLDEN)
    assert ast.shapes["ab"] == SystemShape((2, 3))
    assert ast.states["mixed"].weights.count(Fraction(1, 2)) == 2
    assert ast.effects["dump"].weights == (1,) * 12
    assert ast.gates["merge"].out_shape == SystemShape((12,))
    assert len(ast.circuits) == 2


def test_pretty_round_trip_is_stable():
    ast = dsl.parse(GOLDEN)
    printed = dsl.pretty(ast)
    again = dsl.parse(printed)
    assert dsl.pretty(again) == printed
    # identity up to whitespace: token streams agree with the source
    def tokens(text):
        return re.findall(r"[^\s]+", text)

    assert tokens(printed) == tokens(GOLDEN)


def test_shape_error_reports_stage():
    bad = (
        "system a = elem 2\nsystem b = elem 3\n"
        "state s : a = (1)\ngate t : b -> b = id\neffect e : b = discard\n"
        "circuit p = s ; t ; e\n"
    )
    with pytest.raises(dsl.DslError) as err:
        dsl.parse(bad)
    assert "stage 2" in str(err.value)


def test_mixed_stage_kinds_rejected():
    bad = (
        "system a = elem 2\nstate s : a = (1)\ngate t : a -> a = id\n"
        "circuit p = s | t\n"
    )
    with pytest.raises(dsl.DslError) as err:
        dsl.parse(bad)
    assert "mixes" in str(err.value)


def test_duplicate_names_rejected():
    with pytest.raises(dsl.DslError) as err:
        dsl.parse("system a = elem 2\nsystem a = elem 3\n")
    assert "duplicate" in str(err.value)


def test_unknown_references_have_spans():
    with pytest.raises(dsl.DslError) as err:
        dsl.parse("state s : nowhere = (1)\n")
    diag = err.value.diagnostics[0]
    assert diag.span.line == 1
    assert "nowhere" in diag.message


def test_syntax_error_span():
    with pytest.raises(dsl.DslError) as err:
        dsl.parse("system a = elem 2\ngate ! : a -> a = id\n")
    assert err.value.diagnostics[0].span.line == 2


def test_empty_program_rejected():
    with pytest.raises(dsl.DslError):
        dsl.parse("# nothing but comments\n\n")


def test_label_out_of_range_rejected():
    with pytest.raises(dsl.DslError) as err:
        dsl.parse("system a = elem 2\nstate s : a = (3)\n")
    assert "label" in str(err.value)


def test_invalid_nu_typing_rejected():
    bad = (
        "system a = elem 2\nsystem b = elem 3\nsystem ab = a * b\n"
        "system wrong = elem 7\ngate m : ab -> wrong = nu a b\n"
    )
    with pytest.raises(dsl.DslError) as err:
        dsl.parse(bad)
    assert "nu" in str(err.value)


def test_eval_point_state_pairing():
    src = (
        "system a = elem 2\nstate s : a = (1)\neffect e : a = (1)\n"
        "circuit p = s ; e\neval p\n"
    )
    ast = dsl.parse(src)
    assert dsl.eval_bct(ast, "p") == 1
    assert dsl.eval_ontic(ast, "p") == 1


def test_eval_product_pairing_is_half():
    src = (
        "system a = elem 2\nsystem b = elem 2\nsystem ab = a * b\n"
        "state x : a = (1)\nstate y : b = (1)\n"
        "effect probe : ab = ((1,1);0)\n"
        "circuit p = x | y ; probe\neval p\n"
    )
    ast = dsl.parse(src)
    assert dsl.eval_bct(ast, "p") == Fraction(1, 2)
    assert dsl.eval_ontic(ast, "p") == Fraction(1, 2)


def test_eval_open_circuit_yields_state():
    src = (
        "system a = elem 2\nstate s : a = (1)\n"
        "gate t : a -> a = atomic 1 -> 2 tau 0 w 1\n"
        "circuit p = s ; t\n"
    )
    ast = dsl.parse(src)
    out = dsl.eval_bct(ast, "p")
    assert out.weights == (0, 1)
    img = dsl.eval_ontic(ast, "p")
    assert [v for v in img.entries.flat] == [0, 0, Fraction(1, 2), Fraction(1, 2)]


def test_eval_gate_only_circuit():
    src = (
        "system a = elem 2\ngate t : a -> a = atomic 1 -> 2 tau 0 w 1\n"
        "gate u : a -> a = atomic 2 -> 1 tau 0 w 1\ncircuit p = t ; u\n"
    )
    ast = dsl.parse(src)
    out = dsl.eval_bct(ast, "p")
    assert out.coeffs == {(1, 1, 0): 1}


def test_eval_unknown_name():
    ast = dsl.parse("system a = elem 2\nstate s : a = (1)\n")
    with pytest.raises(KeyError):
        dsl.eval_bct(ast, "missing")


def test_differential_oracle_on_seeded_corpus():
    for idx in range(30):
        rng = random.Random(verify.derive_seed(2024, "dsl-corpus", idx))
        src = verify.random_circuit_source(rng, max_dim=3)
        ast = dsl.parse(src)
        assert dsl.eval_bct(ast, "main") == dsl.eval_ontic(ast, "main")


def test_swap_gate_evaluates_consistently():
    src = (
        "system a = elem 2\nsystem b = elem 3\nsystem ab = a * b\nsystem ba = b * a\n"
        "state x : a = (2)\nstate y : b = (3)\n"
        "gate flip : ab -> ba = swap a b\n"
        "effect probe : ba = ((3,2);0)\n"
        "circuit p = x | y ; flip ; probe\neval p\n"
    )
    ast = dsl.parse(src)
    assert dsl.eval_bct(ast, "p") == Fraction(1, 2)
    assert dsl.eval_ontic(ast, "p") == Fraction(1, 2)
