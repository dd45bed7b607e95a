"""Tests for expression parsing, circuit compilation, and the adder."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lifelogic.circuits import (
    AdderSpec,
    And,
    ExprSyntaxError,
    MissingVariableError,
    Not,
    Or,
    Var,
    Xor,
    add,
    binarize,
    build_adder,
    compile,
    estimate_response,
    evaluate,
    evaluate_parallel,
    parse_expr,
    save_circuit,
)
from lifelogic.patterns import parse_rle


def interpret(e, env):
    """Reference evaluator used to cross-check symbolic rewrites."""
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Not):
        return not interpret(e.operand, env)
    if isinstance(e, And):
        return interpret(e.left, env) and interpret(e.right, env)
    if isinstance(e, Or):
        return interpret(e.left, env) or interpret(e.right, env)
    return interpret(e.left, env) != interpret(e.right, env)


def contains_xor(e):
    if isinstance(e, Var):
        return False
    if isinstance(e, Not):
        return contains_xor(e.operand)
    if isinstance(e, Xor):
        return True
    return contains_xor(e.left) or contains_xor(e.right)


def small_exprs(names="AB"):
    leaves = st.sampled_from([Var(n) for n in names])
    return st.recursive(
        leaves,
        lambda child: st.one_of(
            st.builds(Not, child),
            st.builds(And, child, child),
            st.builds(Or, child, child),
            st.builds(Xor, child, child),
        ),
        max_leaves=12,
    )


# ---------------------------------------------------------------------------
# Parsing.


def test_parser_precedence():
    assert parse_expr("!A & B | C ^ D") == Or(
        And(Not(Var("A")), Var("B")), Xor(Var("C"), Var("D"))
    )
    assert parse_expr("A | B & C") == Or(Var("A"), And(Var("B"), Var("C")))
    assert parse_expr("A ^ B | C") == Or(Xor(Var("A"), Var("B")), Var("C"))
    assert parse_expr("!!A") == Not(Not(Var("A")))


def test_parser_grouping_and_names():
    assert parse_expr("(A | B) & C") == And(Or(Var("A"), Var("B")), Var("C"))
    assert parse_expr("  x10&y_2 ") == And(Var("x10"), Var("y_2"))


@pytest.mark.parametrize("text", ["", "A &", "A @ B", "(A", "A B", "&A", "A)"])
def test_parser_rejects_malformed_input(text):
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr(text)
    assert isinstance(info.value.position, int)
    assert 0 <= info.value.position <= len(text)


def test_parser_reports_exact_position():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr("A &")
    assert info.value.position == 3


# ---------------------------------------------------------------------------
# Symbolic rewriting.


@given(e=small_exprs())
@settings(max_examples=200, deadline=None)
def test_binarize_removes_xor_and_preserves_meaning(e):
    b = binarize(e)
    assert not contains_xor(b)
    for bits in itertools.product((False, True), repeat=2):
        env = dict(zip("AB", bits))
        assert interpret(b, env) == interpret(e, env)


def test_estimate_response_consistency():
    text = "(x | y) & !(x & y)"
    r = estimate_response(text)
    assert r == estimate_response(parse_expr(text))
    assert r.d == 15
    assert r.weighted == r.n_not + 2 * r.n_and + 3 * r.n_or
    assert r.gun_total == compile(text).gun_count


# ---------------------------------------------------------------------------
# Compilation and simulation.


def test_compile_single_variable():
    c = compile("A")
    assert set(c.input_cells) == {"A.0"}
    assert evaluate(c, {"A": True}) is True
    assert evaluate(c, {"A": False}) is False


def test_compile_numbers_repeated_variables():
    c = compile("A & A")
    assert set(c.input_cells) == {"A.0", "A.1"}
    assert evaluate(c, {"A": True}) is True
    assert evaluate(c, {"A": False}) is False


@pytest.mark.parametrize(
    "text, fn",
    [
        ("A & B", lambda a, b: a and b),
        ("A | !B", lambda a, b: a or not b),
        ("A ^ B", lambda a, b: a != b),
    ],
)
def test_compiled_truth_tables(text, fn):
    c = compile(text)
    for a, b in itertools.product((False, True), repeat=2):
        assert evaluate(c, {"A": a, "B": b}) is bool(fn(a, b))


def test_compile_is_deterministic():
    first = compile("A | !B")
    second = compile("A | !B")
    assert first.cells == second.cells
    assert first.probe_generation == second.probe_generation
    assert first.input_cells == second.input_cells
    assert first.output_cell == second.output_cell
    assert first.gun_count == second.gun_count


def test_evaluate_requires_every_input():
    c = compile("A & B")
    with pytest.raises(MissingVariableError):
        evaluate(c, {"A": True})
    with pytest.raises(MissingVariableError):
        evaluate_parallel([c], {"B": False})


def test_save_circuit_round_trip(tmp_path):
    c = compile("!A")
    save_circuit(c, tmp_path / "neg")
    pat = parse_rle((tmp_path / "neg.rle").read_text())
    meta = dict(
        line.split("=", 1)
        for line in (tmp_path / "neg.meta").read_text().splitlines()
    )
    ox, oy = (int(v) for v in meta["origin"].split(","))
    rebuilt = frozenset((x + ox, y + oy) for x, y in pat.cells)
    assert rebuilt == c.cells
    assert int(meta["probe_generation"]) == c.probe_generation
    assert int(meta["gun_count"]) == c.gun_count
    x, y = (int(v) for v in meta["input_cell.A.0"].split(","))
    assert (x, y) == c.input_cells["A.0"]


# ---------------------------------------------------------------------------
# The two-bit adder.


@pytest.mark.parametrize("bad", ["2", "", "111", "ab", "1"])
def test_add_validates_operands(bad):
    with pytest.raises(ValueError):
        add(bad, "01")
    with pytest.raises(ValueError):
        add("01", bad)


def test_adder_spec_formats_binary_result():
    assert AdderSpec("11", "01", True, False, False).result == "100"


def test_adder_circuits_occupy_disjoint_cells():
    trio = build_adder()
    assert len(trio) == 3
    for a, b in itertools.combinations(trio, 2):
        assert not (a.cells & b.cells)


def test_add_spot_check():
    assert add("11", "01").result == "100"
