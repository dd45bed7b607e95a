"""Engine tests: rule conformance, glider recognition, stabilization."""

from __future__ import annotations

import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lifelogic.engine import (
    GLIDER_HEADINGS,
    Glider,
    PackedGrid,
    Universe,
    bounding_box,
    detect_stabilization,
    find_gliders,
    glider_cells,
    naive_step,
    population,
    residue,
    run,
    states,
    step,
)
from lifelogic.patterns import catalog


def counter_step(live: frozenset) -> frozenset:
    """Yet another rule implementation, for three-way cross-checks."""
    counts: Counter = Counter()
    for x, y in live:
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                if dx or dy:
                    counts[(x + dx, y + dy)] += 1
    return frozenset(
        c for c, n in counts.items() if n == 3 or (n == 2 and c in live)
    )


cells_strategy = st.frozensets(
    st.tuples(st.integers(-40, 40), st.integers(-40, 40)), max_size=60
)


# ---------------------------------------------------------------------------
# Rule conformance.


def test_block_is_still():
    block = frozenset({(0, 0), (1, 0), (0, 1), (1, 1)})
    assert step(Universe(block)).live == block


def test_blinker_oscillates():
    horiz = frozenset({(0, 1), (1, 1), (2, 1)})
    vert = frozenset({(1, 0), (1, 1), (1, 2)})
    assert step(Universe(horiz)).live == vert
    assert step(Universe(vert)).live == horiz


def test_sparse_survivors_die():
    assert step(Universe(frozenset({(0, 0), (5, 5)}))).live == frozenset()
    assert step(Universe(frozenset())).live == frozenset()


@given(cells_strategy)
@settings(max_examples=150, deadline=None)
def test_step_matches_independent_references(cells):
    u = Universe(cells)
    expect = counter_step(cells)
    assert step(u).live == expect
    assert naive_step(u).live == expect


@given(cells_strategy, st.integers(0, 8))
@settings(max_examples=60, deadline=None)
def test_packed_grid_matches_sparse_stepping(cells, n):
    grid = PackedGrid(cells)
    grid.advance(n)
    u = Universe(cells)
    for _ in range(n):
        u = step(u)
    assert grid.live_cells() == u.live


def test_packed_grid_point_queries():
    cells = frozenset({(0, 0), (1, 0), (0, 1), (1, 1), (100, -3)})
    grid = PackedGrid(cells)
    assert grid.test((0, 0)) and grid.test((100, -3))
    assert not grid.test((2, 2))
    grid.advance(0)
    assert grid.live_cells() == cells


def test_run_validates_and_counts_generations():
    u = Universe(frozenset({(0, 0)}))
    assert run(u, 0) is u
    with pytest.raises(ValueError):
        run(u, -1)
    assert run(Universe(frozenset(), 5), 3).generation == 8


def test_states_yields_inclusive_sequence():
    blinker = Universe(frozenset({(0, 1), (1, 1), (2, 1)}))
    seq = list(states(blinker, 4))
    assert len(seq) == 5
    assert seq[0].live == seq[2].live == seq[4].live


def test_population_and_bounding_box():
    u = Universe(frozenset({(-2, 3), (4, -1)}))
    assert population(u) == 2
    assert bounding_box(u) == ((-2, -1), (4, 3))
    assert bounding_box(Universe(frozenset())) is None


# ---------------------------------------------------------------------------
# Glider recognition.


def test_sixteen_glider_forms_are_distinct():
    forms = {glider_cells(h, p) for h in GLIDER_HEADINGS for p in range(4)}
    assert len(forms) == 16


@given(
    st.sampled_from(GLIDER_HEADINGS),
    st.integers(0, 3),
    st.tuples(st.integers(-50, 50), st.integers(-50, 50)),
)
@settings(max_examples=80, deadline=None)
def test_find_gliders_recovers_heading_and_phase(heading, phase, offset):
    ox, oy = offset
    cells = frozenset((x + ox, y + oy) for x, y in glider_cells(heading, phase))
    found = find_gliders(Universe(cells))
    assert found == [Glider(position=(ox, oy), phase=phase, heading=heading)]


def test_find_gliders_ignores_non_gliders():
    r = catalog("r_pentomino").cells
    assert find_gliders(Universe(r)) == []
    block = frozenset({(0, 0), (1, 0), (0, 1), (1, 1)})
    assert find_gliders(Universe(block)) == []


def test_glider_advances_one_cell_per_four_generations():
    for heading in GLIDER_HEADINGS:
        hx, hy = heading
        cells = glider_cells(heading, 0)
        after = run(Universe(cells), 4).live
        assert after == frozenset((x + hx, y + hy) for x, y in cells)


# ---------------------------------------------------------------------------
# Residue and stabilization.


def test_residue_strips_only_outbound_gliders():
    block = frozenset({(0, 0), (1, 0), (0, 1), (1, 1)})
    away = frozenset((x + 40, y + 40) for x, y in glider_cells((1, 1), 0))
    toward = frozenset((x + 40, y + 40) for x, y in glider_cells((-1, -1), 0))
    assert residue(Universe(block | away)) == block
    assert residue(Universe(block | toward)) == block | toward


def test_blinker_stabilizes_immediately():
    found = detect_stabilization(
        Universe(frozenset({(0, 1), (1, 1), (2, 1)})), 10, 2
    )
    assert found is not None
    assert found.stabilized_at == 0
    assert found.period == 2


def test_detect_stabilization_validates_arguments():
    u = Universe(frozenset({(0, 0)}))
    with pytest.raises(ValueError):
        detect_stabilization(u, 0, 2)
    with pytest.raises(ValueError):
        detect_stabilization(u, 10, 0)


def test_r_pentomino_settles_after_1103_generations():
    u = Universe(catalog("r_pentomino").cells)
    found = detect_stabilization(u, 1500, 2)
    assert found is not None
    assert found.stabilized_at == 1103


def test_soup_equivalence_against_dense_oracle():
    """Spot version of the full soup sweep: 40 random 16x16 soups."""
    rng = random.Random(99)
    for _ in range(40):
        cells = frozenset(
            (x, y) for y in range(16) for x in range(16) if rng.random() < 0.4
        )
        ref = Universe(cells)
        for _ in range(32):
            ref = naive_step(ref)
        grid = PackedGrid(cells)
        grid.advance(32)
        assert grid.live_cells() == ref.live
