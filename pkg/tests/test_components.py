"""Tests for glider streams, gate templates, and collision analysis."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lifelogic.components import (
    DESTRUCTION_GENS,
    STREAM_PERIOD,
    ActivationError,
    Component,
    ComponentRoleError,
    NoValidPlacementError,
    _DEFAULT_SEARCH,
    _load_gate_files,
    activate_input,
    build_and,
    build_not,
    build_or,
    calibrate,
    check_annihilation_alignment,
    classify_collision,
    collision_universe,
    evaluate_gate,
    gun_stream,
    head_on_pair,
    materialize,
    probe_output,
    save_gate_fixture,
    solve_emission,
    stream_invariants,
    template_cells,
    template_universe,
    transform_template,
)
from lifelogic.engine import PackedGrid, Universe, find_gliders, run
from lifelogic.patterns import Orientation

DIAGONAL = [
    Orientation.IDENTITY,
    Orientation.FLIP_X,
    Orientation.FLIP_Y,
    Orientation.ROT180,
]


# ---------------------------------------------------------------------------
# Stream algebra.


@pytest.mark.parametrize(
    "o, at, emission",
    [
        (Orientation.IDENTITY, (0, 0), 0),
        (Orientation.IDENTITY, (7, 3), 11),
        (Orientation.FLIP_X, (-5, 12), 4),
        (Orientation.ROT180, (30, 40), 23),
    ],
)
def test_stream_matches_predicted_invariants(o, at, emission):
    """Every glider a gun emits carries the gun's predicted invariant triple."""
    comp = Component("gun", "gun_p30", at, o, emission_phase=emission)
    expect = gun_stream(o, at, emission)
    for horizon in (130, 134):
        u = run(Universe(materialize(comp)), horizon)
        gliders = find_gliders(u)
        assert len(gliders) >= 3
        for g in gliders:
            assert stream_invariants(g, horizon) == expect


@given(
    o=st.sampled_from(DIAGONAL),
    at=st.tuples(
        st.integers(min_value=-50, max_value=50),
        st.integers(min_value=-50, max_value=50),
    ),
    psi=st.integers(min_value=0, max_value=STREAM_PERIOD - 1),
)
@settings(max_examples=200, deadline=None)
def test_solve_emission_inverts_gun_stream(o, at, psi):
    emission = solve_emission(o, at, psi)
    assert 0 <= emission < STREAM_PERIOD
    assert gun_stream(o, at, emission)[2] == psi


@given(
    o=st.sampled_from(DIAGONAL),
    at=st.tuples(
        st.integers(min_value=-40, max_value=40),
        st.integers(min_value=-40, max_value=40),
    ),
    delta=st.tuples(
        st.integers(min_value=-40, max_value=40),
        st.integers(min_value=-40, max_value=40),
    ),
)
@settings(max_examples=200, deadline=None)
def test_translating_a_gun_shifts_its_line_predictably(o, at, delta):
    """Heading never changes under translation; the line index shifts by the

    cross product of heading and offset, matching its definition.
    """
    heading, line, _ = gun_stream(o, at)
    at2 = (at[0] + delta[0], at[1] + delta[1])
    heading2, line2, _ = gun_stream(o, at2)
    assert heading2 == heading
    assert line2 - line == heading[0] * delta[1] - heading[1] * delta[0]


# ---------------------------------------------------------------------------
# Input and output components.


def _input_components(t):
    return [c for c in t.components if c.role == "input"]


def test_activated_stopper_dies_within_nine_generations():
    t = build_and()
    inputs = _input_components(t)
    assert len(inputs) == 2
    for comp in inputs:
        hook = materialize(comp)
        assert len(hook) == 7
        u = activate_input(template_universe(t), comp)
        # The bound is tight: part of the stopper survives one step earlier.
        assert hook & run(u, DESTRUCTION_GENS - 1).live
        assert not hook & run(u, DESTRUCTION_GENS).live


def test_activate_input_rejects_bad_usage():
    t = build_not()
    comp = _input_components(t)[0]
    output = next(c for c in t.components if c.role == "output")
    u = template_universe(t)
    with pytest.raises(ComponentRoleError):
        activate_input(u, output)
    with pytest.raises(ActivationError):
        activate_input(Universe(u.live, generation=4), comp)
    with pytest.raises(ActivationError):
        activate_input(activate_input(u, comp), comp)


def test_probe_output_scans_sampled_states():
    t = build_not()
    output = next(c for c in t.components if c.role == "output")
    comp = _input_components(t)[0]
    with pytest.raises(ComponentRoleError):
        probe_output([template_universe(t)], comp)
    grid = PackedGrid(template_universe(t).live)
    grid.advance(t.probe_generation)
    window = []
    for offset in range(t.probe_window):
        window.append(Universe(grid.live_cells(), t.probe_generation + offset))
        grid.advance(1)
    assert probe_output(window, output)
    assert not probe_output([template_universe(t)], output)


def test_component_rejects_unknown_role():
    with pytest.raises(ValueError):
        Component("conductor", "block", (0, 0), Orientation.IDENTITY)


# ---------------------------------------------------------------------------
# Gate truth tables.


TABLES = [
    (build_and, ("A", "B"), lambda a, b: a and b),
    (build_or, ("A", "B"), lambda a, b: a or b),
    (build_not, ("A",), lambda a: not a),
]


@pytest.mark.parametrize("builder, slots, fn", TABLES)
def test_gate_truth_tables(builder, slots, fn):
    t = builder()
    assert tuple(sorted(t.input_cells)) == slots
    for bits in itertools.product((False, True), repeat=len(slots)):
        assignment = dict(zip(slots, bits))
        assert evaluate_gate(t, assignment) is bool(fn(*bits))


def test_mirrored_gate_truth_table():
    """Reflecting a template yields a working gate for the opposite heading."""
    t = transform_template(build_and(), Orientation.FLIP_X)
    for x, y in itertools.product((False, True), repeat=2):
        assert evaluate_gate(t, {"A": x, "B": y}) is (x and y)


def test_transform_template_moves_cells_and_keeps_calendar():
    t = build_not()
    for o in (Orientation.FLIP_X, Orientation.ROT90):
        t2 = transform_template(t, o)
        assert template_cells(t2) == frozenset(o.apply(c) for c in template_cells(t))
        assert t2.probe_generation == t.probe_generation
        assert t2.probe_window == t.probe_window
        assert t2.output_heading == o.apply(t.output_heading)


# ---------------------------------------------------------------------------
# Head-on collisions.


NAMED_CASES = [
    (32, 1, "clean-annihilation"),
    (32, -1, "clean-annihilation"),
    (32, 0, "two-phase-block"),
]


@pytest.mark.parametrize("distance, offset, verdict", NAMED_CASES)
def test_named_collision_cases(distance, offset, verdict):
    s = head_on_pair(distance, offset)
    assert check_annihilation_alignment(s) == verdict
    assert classify_collision(s) == verdict


def test_wide_offset_is_misaligned():
    s = head_on_pair(32, 12)
    assert check_annihilation_alignment(s) == "misaligned"
    assert classify_collision(s) == "misaligned"


def test_clean_annihilation_reaches_periodic_steady_state():
    """With every glider pair mutually destroyed, the whole field settles

    into an exact period-30 cycle; the blocking case never does.
    """
    for offset, periodic in ((1, True), (-1, True), (0, False)):
        u = collision_universe(head_on_pair(32, offset))
        assert (run(u, 300).live == run(u, 330).live) is periodic


def test_head_on_pair_geometry():
    s = head_on_pair(32, 1, at=(10, -4))
    assert s.nascent_distance == 32
    assert s.lateral_offset == 1
    assert s.gun_a.role == "gun" and s.gun_b.role == "gun"
    assert s.gun_a.orientation.apply((1, 1)) == (1, 1)
    assert s.gun_b.orientation.apply((1, 1)) == (-1, -1)


# ---------------------------------------------------------------------------
# Calibration and fixtures.


def test_calibrate_with_no_candidates_raises():
    empty = {label: () for label in _DEFAULT_SEARCH["NOT"]}
    with pytest.raises(NoValidPlacementError):
        calibrate("NOT", search=empty)


def test_calibrate_rejects_unknown_kind():
    with pytest.raises(ValueError):
        calibrate("NAND")


def test_calibrate_reproduces_packaged_template():
    t = calibrate("NOT")
    ref = build_not()
    assert template_cells(t) == template_cells(ref)
    assert t.probe_generation == ref.probe_generation
    assert t.input_cells == ref.input_cells


def test_gate_fixture_round_trip(tmp_path):
    t = build_not()
    save_gate_fixture(t, tmp_path)
    assert (tmp_path / "not.rle").exists()
    assert (tmp_path / "not.meta").exists()
    t2 = _load_gate_files("NOT", tmp_path)
    assert template_cells(t2) == template_cells(t)
    assert t2.probe_generation == t.probe_generation
    assert t2.probe_window == t.probe_window
    assert t2.input_cells == t.input_cells
    assert t2.output_cell == t.output_cell
    assert evaluate_gate(t2, {"A": False}) is True
    assert evaluate_gate(t2, {"A": True}) is False
