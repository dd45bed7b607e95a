"""Acceptance sweep: one check per headline capability of the package.

Each test exercises a complete behavior end to end, from raw cell sets up
to compiled circuits, using only public interfaces.  Expected values come
from independent reference computations inside the tests themselves.
"""

from __future__ import annotations

import itertools
import random
import time

from lifelogic.circuits import (
    And,
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
)
from lifelogic.components import (
    activate_input,
    build_and,
    build_not,
    build_or,
    check_annihilation_alignment,
    classify_collision,
    evaluate_gate,
    head_on_pair,
    materialize,
    template_universe,
)
from lifelogic.engine import (
    GLIDER_HEADINGS,
    PackedGrid,
    Universe,
    detect_stabilization,
    find_gliders,
    glider_cells,
    naive_step,
    run,
    step,
)
from lifelogic.patterns import CATALOG_NAMES, Pattern, catalog, emit_rle, parse_rle


def test_01_packed_grid_matches_dense_oracle_on_random_soups():
    """1000 random 16x16 soups advanced 64 generations agree cell for cell

    between the production engine and a naive dense reference, in under
    ten seconds of wall time.
    """
    rng = random.Random(2026)
    start = time.perf_counter()
    for _ in range(1000):
        cells = frozenset(
            (x, y) for y in range(16) for x in range(16) if rng.random() < 0.35
        )
        ref = Universe(cells)
        for _ in range(64):
            ref = naive_step(ref)
        grid = PackedGrid(cells)
        grid.advance(64)
        assert grid.live_cells() == ref.live
    assert time.perf_counter() - start < 10.0


def test_02_every_glider_form_translates_along_its_heading():
    """All 16 heading/phase forms recur after four generations, shifted

    exactly one cell along their heading.
    """
    for heading in GLIDER_HEADINGS:
        hx, hy = heading
        for phase in range(4):
            cells = glider_cells(heading, phase)
            u = run(Universe(cells), 4)
            assert u.live == frozenset((x + hx, y + hy) for x, y in cells)


def test_03_gun_emits_one_glider_per_period_with_clean_body():
    """At generation 30k the gun has exactly k gliders in flight and its

    body is back in its starting form, untouched by the stream.
    """
    body = catalog("gun_p30").cells
    for k in range(11):
        u = run(Universe(body), 30 * k)
        gliders = find_gliders(u)
        assert len(gliders) == k
        in_flight: set = set()
        for g in gliders:
            px, py = g.position
            in_flight |= {
                (x + px, y + py) for x, y in glider_cells(g.heading, g.phase)
            }
        assert u.live - frozenset(in_flight) == body


def test_04_r_pentomino_settles_at_1103_and_frees_six_gliders():
    """The r-pentomino stabilizes at generation 1103 with period 2, and six

    gliders should have separated from the debris by generation 300.
    """
    u = Universe(catalog("r_pentomino").cells)
    found = detect_stabilization(u, 1500, max_period=2)
    assert found is not None
    assert found.stabilized_at == 1103
    cur = run(u, 300)
    count_at_300 = len(find_gliders(cur))
    sixth_at = None
    probe = cur
    for gen in range(300, 401):
        if len(find_gliders(probe)) >= 6:
            sixth_at = gen
            break
        probe = step(probe)
    assert count_at_300 == 6, (
        f"only {count_at_300} gliders have separated from the debris at "
        f"generation 300; the sixth first resolves at generation {sixth_at}"
    )


def test_05_activated_inputs_erase_their_stoppers_within_nine_steps():
    """Seeding an entry cell wipes all seven cells of its stopper in at

    most nine generations, for both inputs of the AND template.
    """
    t = build_and()
    inputs = [c for c in t.components if c.role == "input"]
    assert len(inputs) == 2
    for comp in inputs:
        hook = materialize(comp)
        assert len(hook) == 7
        u = activate_input(template_universe(t), comp)
        assert not hook & run(u, 9).live


def test_06_alignment_rule_predicts_simulated_collision_outcomes():
    """The closed-form alignment verdict matches simulation on the named

    head-on cases, and should match across the whole distance/offset grid.
    """
    named = [
        (32, 1, "clean-annihilation"),
        (32, -1, "clean-annihilation"),
        (32, 0, "two-phase-block"),
    ]
    for distance, offset, verdict in named:
        s = head_on_pair(distance, offset)
        assert check_annihilation_alignment(s) == verdict
        assert classify_collision(s) == verdict
    disagreements = []
    for distance in range(28, 37):
        for offset in range(-2, 3):
            s = head_on_pair(distance, offset)
            predicted = check_annihilation_alignment(s)
            observed = classify_collision(s)
            if predicted != observed:
                disagreements.append((distance, offset, predicted, observed))
    assert not disagreements, (
        f"{len(disagreements)}/45 grid cases disagree with the geometric "
        f"rule; first few (distance, offset, predicted, simulated): "
        f"{disagreements[:4]}"
    )


def test_07_calibrated_gate_templates_implement_their_truth_tables():
    tables = (
        (build_and(), ("A", "B"), lambda a, b: a and b),
        (build_or(), ("A", "B"), lambda a, b: a or b),
        (build_not(), ("A",), lambda a: not a),
    )
    for t, slots, fn in tables:
        for bits in itertools.product((False, True), repeat=len(slots)):
            assert evaluate_gate(t, dict(zip(slots, bits))) is bool(fn(*bits))


def test_08_compiled_compound_expressions_match_boolean_semantics():
    c3 = compile("A & B & C")
    for a, b, c in itertools.product((False, True), repeat=3):
        assert evaluate(c3, {"A": a, "B": b, "C": c}) is (a and b and c)
    c2 = compile("!A & B")
    for a, b in itertools.product((False, True), repeat=2):
        assert evaluate(c2, {"A": a, "B": b}) is ((not a) and b)


# --- random expression sweep -------------------------------------------------

_NAMES = "ABCD"


def _op_count(e):
    if isinstance(e, Var):
        return 0
    if isinstance(e, Not):
        return 1 + _op_count(e.operand)
    return 1 + _op_count(e.left) + _op_count(e.right)


def _rand_expr(rng, depth):
    if depth == 0 or rng.random() < 0.4:
        return Var(rng.choice(_NAMES))
    op = rng.choices(["not", "and", "or", "xor"], weights=(3, 3, 3, 0.5))[0]
    if op == "not":
        return Not(_rand_expr(rng, depth - 1))
    return {"and": And, "or": Or, "xor": Xor}[op](
        _rand_expr(rng, depth - 1), _rand_expr(rng, depth - 1)
    )


def _draw(rng):
    # Keep the lattice budget bounded so the sweep stays well under time.
    while True:
        e = _rand_expr(rng, 4)
        if _op_count(binarize(e)) <= 24:
            return e


def _interpret(e, env):
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Not):
        return not _interpret(e.operand, env)
    if isinstance(e, And):
        return _interpret(e.left, env) and _interpret(e.right, env)
    if isinstance(e, Or):
        return _interpret(e.left, env) or _interpret(e.right, env)
    return _interpret(e.left, env) != _interpret(e.right, env)


def _names_of(e):
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Not):
        return _names_of(e.operand)
    return _names_of(e.left) | _names_of(e.right)


def test_09_random_expression_sweep_within_time_budget():
    """200 random expressions over four variables compile and reproduce

    their full truth tables in under five minutes.
    """
    rng = random.Random(404)
    start = time.perf_counter()
    for _ in range(200):
        e = _draw(rng)
        c = compile(e)
        names = sorted(_names_of(e))
        for bits in itertools.product((False, True), repeat=len(names)):
            env = dict(zip(names, bits))
            assert evaluate(c, env) == _interpret(e, env)
    assert time.perf_counter() - start < 300.0


def test_10_two_bit_adder_matches_integer_addition():
    """All 16 operand pairs sum correctly within a minute, and the three

    result circuits behave identically whether simulated together or alone.
    """
    trio = build_adder()
    start = time.perf_counter()
    for x in range(4):
        for y in range(4):
            spec = add(f"{x:02b}", f"{y:02b}")
            assert int(spec.result, 2) == x + y
    assert time.perf_counter() - start < 60.0
    for x in range(4):
        for y in range(4):
            env = {
                "x1": bool(x & 2),
                "x0": bool(x & 1),
                "y1": bool(y & 2),
                "y0": bool(y & 1),
            }
            together = evaluate_parallel(trio, env)
            alone = tuple(evaluate(c, env) for c in trio)
            assert together == alone


def test_11_xor_forms_report_expected_gun_totals():
    assert compile("(x | y) & !(x & y)").gun_count == 9
    assert estimate_response("(x | y) & !(x & y)").gun_total == 9
    assert compile("(x & !y) | (!x & y)").gun_count == 10
    assert estimate_response("(x & !y) | (!x & y)").gun_total == 10


def test_12_rle_round_trip_is_identity():
    """Emit then parse returns the original cells for every catalog

    pattern and for 500 random soups.
    """
    for name in CATALOG_NAMES:
        p = catalog(name)
        assert parse_rle(emit_rle(p)).cells == p.cells
    rng = random.Random(77)
    for _ in range(500):
        w = rng.randrange(1, 30)
        h = rng.randrange(1, 30)
        cells = {
            (x, y) for y in range(h) for x in range(w) if rng.random() < 0.35
        }
        if not cells:
            cells = {(0, 0)}
        x0 = min(x for x, _ in cells)
        y0 = min(y for _, y in cells)
        normalized = frozenset((x - x0, y - y0) for x, y in cells)
        pat = Pattern(name="soup", cells=normalized, kind="still-life")
        assert parse_rle(emit_rle(pat)).cells == normalized
