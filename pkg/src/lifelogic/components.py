"""Functional assemblies built from glider streams.

A period-30 gun emits one glider every 30 generations along a fixed
diagonal.  Everything in this module is bookkeeping on two conserved
quantities of such a stream plus a small set of measured collision
reactions:

* ``line``  -- which diagonal the stream travels on (spatial invariant),
* ``psi``   -- where the stream sits inside its 30-generation cycle
  (temporal invariant).

Two perpendicular streams whose residues land in one of the known
annihilation classes consume each other glider by glider and leave no
debris; an eater placed at the unique lateral lock offset consumes a
stream silently; destroying an eater with a single seed cell releases
the stream it was blocking.  The AND/OR/NOT gate templates are fixed
arrangements of guns, eaters, and crossings whose geometry is calibrated
once, committed as fixtures, and re-verified on load.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .engine import (
    Cell,
    GLIDER_DRIFT,
    Glider,
    PackedGrid,
    Universe,
    find_gliders,
    glider_cells,
    run,
    step,
)
from .patterns import Orientation, catalog, fixture_dir, parse_rle, emit_rle, Pattern

STREAM_PERIOD = 30
PROBE_WINDOW = 30
PHASE_PER_CELL = 4  # psi advance per diagonal cell of flight

# Mod-30 phase classes at which two perpendicular streams (parity-0
# crossing: both gliders pass through the same lattice point) mutually
# annihilate with no residue.  Measured by exhaustive phase sweep under
# strict whole-state periodicity; three contiguous bands.  CANON_RESIDUE
# is a mid-band class used by every calibrated crossing in this package.
ANNIHILATION_RESIDUES = frozenset({5, 6, 7, 8, 15, 16, 17, 22, 23, 24, 25})
CANON_RESIDUE = 7

DESTRUCTION_GENS = 9  # an activated entry cell erases its eater this fast

GATE_KINDS = ("AND", "OR", "NOT")

_ROLES = frozenset({"input", "gun", "stopper", "output"})

# Eater anchored for a southeast stream on diagonal c sits at
# (k, k + c + 1); the entry/detector cell is anchor + (1, -1).  The
# stopper lock breaks for any other lateral offset in (-6, +7).
_STOPPER_ANCHOR_FROM_NASCENT = 5  # anchor x minus the nascent glider's x
_CONTROL_OFFSET = (1, -1)

# Orientation whose transform maps the canonical southeast stream frame
# onto each diagonal heading.
_HEADING_ORIENT: dict[Cell, Orientation] = {
    (1, 1): Orientation.IDENTITY,
    (-1, 1): Orientation.FLIP_X,
    (1, -1): Orientation.FLIP_Y,
    (-1, -1): Orientation.ROT180,
}


class ComponentRoleError(ValueError):
    """An operation was applied to a component of the wrong role."""


class ActivationError(ValueError):
    """An input was activated twice, or outside generation zero."""


class CalibrationError(RuntimeError):
    """A gate fixture failed its certificate."""


class NoValidPlacementError(CalibrationError):
    """An exhaustive calibration search found no working placement."""


# ---------------------------------------------------------------------------
# Stream invariants.


def stream_invariants(g: Glider, generation: int) -> tuple[Cell, int, int]:
    """(heading, line, psi) conserved along a glider's whole flight.

    ``line`` identifies the diagonal: for a phase-0 anchor (ax, ay) it is
    hx*ay - hy*ax, constant under flight.  ``psi`` folds the generation
    and the along-track position into a single mod-30 class; every glider
    of one gun stream shares both numbers.
    """
    hx, hy = g.heading
    dx, dy = GLIDER_DRIFT[(g.heading, g.phase)]
    ax, ay = g.position[0] - dx, g.position[1] - dy
    line = hx * ay - hy * ax
    psi = (generation - g.phase - PHASE_PER_CELL * hx * ax) % STREAM_PERIOD
    return g.heading, line, psi


@dataclass(frozen=True)
class GunProfile:
    """Measured emission data for one oriented placement of the p30 gun."""

    heading: Cell
    line: int  # stream line when the gun is placed at (0, 0)
    psi: int  # stream psi at placement (0, 0), emission phase 0
    detach: int  # generation the first glider separates
    nascent: Cell  # phase-0 anchor of that first glider
    body: tuple[Cell, Cell]  # resting bounding box at (0, 0)


@lru_cache(maxsize=None)
def _gun_profile(o: Orientation) -> GunProfile:
    raw = [o.apply(c) for c in catalog("gun_p30").cells]
    corner = _min_corner(raw)
    oriented = frozenset(_shift(c, _neg(corner)) for c in raw)
    u = Universe(oriented)
    xs = [x for x, _ in oriented]
    ys = [y for _, y in oriented]
    body = ((min(xs), min(ys)), (max(xs), max(ys)))
    cur = u
    for t in range(1, 46):
        cur = step(cur)
        found = find_gliders(cur)
        if found:
            g = found[0]
            heading, line, psi = stream_invariants(g, t)
            dx, dy = GLIDER_DRIFT[(g.heading, g.phase)]
            nascent = (g.position[0] - dx, g.position[1] - dy)
            return GunProfile(heading, line, psi, t, nascent, body)
    raise AssertionError("gun emitted no glider within 45 generations")


def _min_corner(cells: Iterable[Cell]) -> Cell:
    cs = list(cells)
    return (min(x for x, _ in cs), min(y for _, y in cs))


def _shift(c: Cell, d: Cell) -> Cell:
    return (c[0] + d[0], c[1] + d[1])


def _neg(c: Cell) -> Cell:
    return (-c[0], -c[1])


def gun_stream(o: Orientation, at: Cell, emission_phase: int = 0) -> tuple[Cell, int, int]:
    """(heading, line, psi) of the stream from a gun placed at ``at``."""
    prof = _gun_profile(o)
    hx, hy = prof.heading
    line = prof.line + hx * at[1] - hy * at[0]
    psi = (prof.psi - PHASE_PER_CELL * hx * at[0] - emission_phase) % STREAM_PERIOD
    return prof.heading, line, psi


def solve_emission(o: Orientation, at: Cell, psi: int) -> int:
    """Emission phase that gives the placed gun's stream the target psi."""
    _, _, psi0 = gun_stream(o, at, 0)
    return (psi0 - psi) % STREAM_PERIOD


@lru_cache(maxsize=None)
def phased_gun_cells(o: Orientation, emission_phase: int) -> frozenset[Cell]:
    """Gun body advanced ``emission_phase`` generations, detached gliders removed.

    Placing this body at generation 0 realizes a stream whose psi is the
    phase-0 stream's minus ``emission_phase``.
    """
    if not 0 <= emission_phase < STREAM_PERIOD:
        raise ValueError(f"emission phase must be in 0..29, got {emission_phase}")
    prof = _gun_profile(o)
    raw = [o.apply(c) for c in catalog("gun_p30").cells]
    corner = _min_corner(raw)
    base = Universe(frozenset(_shift(c, _neg(corner)) for c in raw))
    evolved = run(base, emission_phase)
    cells = set(evolved.live)
    for g in find_gliders(evolved):
        if g.heading != prof.heading:
            continue
        _, line, _ = stream_invariants(g, emission_phase)
        if line != prof.line:
            continue
        cells -= {_shift(c, g.position) for c in glider_cells(g.heading, g.phase)}
    return frozenset(cells)


# ---------------------------------------------------------------------------
# Eater placement frames.

_CANON_EATER_ANCHOR = (0, 1)  # for a line-0 southeast stream
_CANON_CONTROL = (1, 0)


@lru_cache(maxsize=None)
def _eater_frame(heading: Cell) -> tuple[frozenset[Cell], Cell, int, Orientation]:
    """Eater geometry serving a stream of the given heading on its image line.

    Returns (cells, control, line0, orientation) where the cells absorb
    the transformed reference stream; translating by j*heading slides the
    assembly along the flight direction, and a perpendicular unit fixes
    the target line.
    """
    o = _HEADING_ORIENT[heading]
    hook = catalog("eater_stopper").cells
    cells = frozenset(o.apply(_shift(c, _CANON_EATER_ANCHOR)) for c in hook)
    control = o.apply(_CANON_CONTROL)
    ref = frozenset(glider_cells((1, 1), 0))
    img = [o.apply(c) for c in ref]
    corner = _min_corner(img)
    norm = frozenset(_shift(c, _neg(corner)) for c in img)
    from .engine import GLIDER_FORMS

    h2, phase = GLIDER_FORMS[norm]
    assert h2 == heading
    dx, dy = GLIDER_DRIFT[(h2, phase)]
    ax, ay = corner[0] - dx, corner[1] - dy
    line0 = heading[0] * ay - heading[1] * ax
    return cells, control, line0, o


def _eater_component(heading: Cell, line: int, anchor_x: int, role: str) -> "Component":
    """Eater locked onto the stream (heading, line), anchored at x = anchor_x.

    ``role`` selects stopper (silent sink) or output (detector whose
    control cell lights during each consumption).
    """
    cells0, control0, line0, o = _eater_frame(heading)
    hx, hy = heading
    minx0 = min(x for x, _ in cells0)
    j = hx * (anchor_x - minx0)
    t = (j * hx, hx * (line - line0) + j * hy)
    cells = frozenset(_shift(c, t) for c in cells0)
    control = _shift(control0, t)
    anchor = _min_corner(cells)
    assert anchor[0] == anchor_x
    name = "eater_detector" if role == "output" else "eater_stopper"
    return Component(
        role=role,
        pattern_name=name,
        at=anchor,
        orientation=o,
        control_cell=control if role == "output" else None,
    )


@lru_cache(maxsize=None)
def _input_assembly(o: Orientation) -> tuple[frozenset[Cell], Cell, Cell]:
    """Stopper eater and entry cell for an oriented gun, in the gun's frame.

    In the reference frame the gun's nascent glider appears five diagonal
    cells short of the eater anchor; the whole assembly transforms
    rigidly with the gun body.  Returns (eater cells, anchor, entry).
    """
    gun = catalog("gun_p30").cells
    m = _min_corner([o.apply(c) for c in gun])
    prof_id = _gun_profile(Orientation.IDENTITY)
    k = prof_id.nascent[0] + _STOPPER_ANCHOR_FROM_NASCENT
    anchor0 = (k, k + prof_id.line + 1)
    hook = catalog("eater_stopper").cells
    cells = frozenset(
        _shift(o.apply(_shift(c, anchor0)), _neg(m)) for c in hook
    )
    entry = _shift(o.apply(_shift(_CONTROL_OFFSET, anchor0)), _neg(m))
    return cells, _min_corner(cells), entry


# ---------------------------------------------------------------------------
# Components and templates.


@dataclass(frozen=True)
class Component:
    """One placed functional element: input, gun, stopper, or output.

    ``control_cell`` is the entry cell for inputs (seed it live to
    destroy the stopper and release the stream) and the probe cell for
    outputs (dead at rest, lights during every glider consumption).
    ``emission_phase`` applies to guns and to the input riding a gun.
    """

    role: str
    pattern_name: str
    at: Cell
    orientation: Orientation
    control_cell: Optional[Cell] = None
    emission_phase: Optional[int] = None

    def __post_init__(self) -> None:
        if self.role not in _ROLES:
            raise ValueError(f"unknown role {self.role!r}")


def materialize(c: Component) -> frozenset[Cell]:
    """Live cells contributed by the component at generation zero."""
    if c.role == "gun":
        body = phased_gun_cells(c.orientation, c.emission_phase or 0)
    else:
        p = catalog(c.pattern_name)
        img = [c.orientation.apply(q) for q in p.cells]
        corner = _min_corner(img)
        body = frozenset(_shift(q, _neg(corner)) for q in img)
    return frozenset(_shift(q, c.at) for q in body)


@dataclass(frozen=True)
class GateTemplate:
    """A calibrated gate: placed components plus its probe calendar.

    ``probe_generation`` is the template's periodicity: the number of
    steps after which the output cell's behavior reflects the inputs and
    repeats every ``probe_window`` generations.
    """

    kind: str
    components: tuple[Component, ...]
    input_cells: Mapping[str, Cell]
    output_cell: Cell
    output_heading: Cell
    probe_generation: int
    probe_window: int = PROBE_WINDOW


def template_cells(t: GateTemplate) -> frozenset[Cell]:
    cells: set[Cell] = set()
    for c in t.components:
        cells |= materialize(c)
    return frozenset(cells)


def template_universe(t: GateTemplate) -> Universe:
    return Universe(template_cells(t))


def _input_component(t: GateTemplate, slot: str) -> Component:
    cell = t.input_cells[slot]
    for c in t.components:
        if c.role == "input" and c.control_cell == cell:
            return c
    raise KeyError(f"template has no input component for slot {slot!r}")


def _output_component(t: GateTemplate) -> Component:
    for c in t.components:
        if c.role == "output":
            return c
    raise AssertionError("template has no output component")


# ---------------------------------------------------------------------------
# Input and output operations.


def activate_input(u: Universe, c: Component) -> Universe:
    """Seed the component's entry cell; its stopper dies within 9 steps.

    Inputs are applied before any stepping, so the template's probe
    calendar stays a fixed constant.
    """
    if c.role != "input":
        raise ComponentRoleError(f"activate_input needs an input, got role {c.role!r}")
    if u.generation != 0:
        raise ActivationError("inputs are applied at generation 0")
    if c.control_cell in u.live:
        raise ActivationError(f"input at {c.control_cell} is already activated")
    return Universe(u.live | {c.control_cell}, u.generation)


def probe_output(states: Sequence[Universe], c: Component) -> bool:
    """True iff the output's probe cell lights in any sampled generation."""
    if c.role != "output":
        raise ComponentRoleError(f"probe_output needs an output, got role {c.role!r}")
    return any(c.control_cell in u.live for u in states)


def evaluate_gate(t: GateTemplate, assignment: Mapping[str, bool]) -> bool:
    """Simulate one input assignment of a calibrated gate template."""
    u = template_universe(t)
    for slot in t.input_cells:
        if assignment[slot]:
            u = activate_input(u, _input_component(t, slot))
    grid = PackedGrid(u.live)
    grid.advance(t.probe_generation)
    out = t.output_cell
    for _ in range(t.probe_window):
        if grid.test(out):
            return True
        grid.advance(1)
    return False


# ---------------------------------------------------------------------------
# Head-on collision geometry.


@dataclass(frozen=True)
class CollisionSpec:
    """Two guns facing each other on parallel diagonal tracks."""

    gun_a: Component
    gun_b: Component
    lateral_offset: int
    nascent_distance: int


def check_annihilation_alignment(s: CollisionSpec) -> str:
    """Classify head-on stream geometry without simulating.

    Even nascent distance with a one-cell lateral offset annihilates
    cleanly; even distance with zero offset runs the two-step block
    process (each collision leaves two 2x2 blocks that the following
    gliders consume); everything else is misaligned.
    """
    if s.nascent_distance % 2 == 0:
        if abs(s.lateral_offset) == 1:
            return "clean-annihilation"
        if s.lateral_offset == 0:
            return "two-phase-block"
    return "misaligned"


def head_on_pair(
    nascent_distance: int, lateral_offset: int, at: Cell = (0, 0)
) -> CollisionSpec:
    """Facing gun pair realizing the given head-on geometry.

    The second gun is the half-turn twin of the first; the placement law
    below reproduces the requested nascent distance and lateral offset
    between the two streams.
    """
    ox = nascent_distance + 4
    oy = ox + lateral_offset - 1
    a = Component("gun", "gun_p30", at, Orientation.IDENTITY, emission_phase=0)
    b = Component(
        "gun",
        "gun_p30",
        _shift(at, (ox, oy)),
        Orientation.ROT180,
        emission_phase=0,
    )
    return CollisionSpec(a, b, lateral_offset, nascent_distance)


def collision_universe(s: CollisionSpec) -> Universe:
    return Universe(materialize(s.gun_a) | materialize(s.gun_b))


def _gun_box(c: Component, margin: int) -> tuple[int, int, int, int]:
    (x0, y0), (x1, y1) = _gun_profile(c.orientation).body
    return (
        c.at[0] + x0 - margin,
        c.at[1] + y0 - margin,
        c.at[0] + x1 + margin,
        c.at[1] + y1 + margin,
    )


def _in_box(c: Cell, box: tuple[int, int, int, int]) -> bool:
    return box[0] <= c[0] <= box[2] and box[1] <= c[1] <= box[3]


def classify_collision(s: CollisionSpec, generations: int = 420) -> str:
    """Simulated verdict for a head-on gun pair.

    clean-annihilation: the state locks into a 30-periodic dance with no
    stationary stage between the guns.  two-phase-block: the lock runs
    the two-step process instead, alternating block-forming and
    block-consuming collisions (a 60-generation cycle with a stationary
    2x2 stage).  misaligned: anything else.
    """
    u = collision_universe(s)
    boxes = [_gun_box(s.gun_a, 3), _gun_box(s.gun_b, 3)]

    def away(live: frozenset[Cell]) -> frozenset[Cell]:
        return frozenset(c for c in live if not any(_in_box(c, b) for b in boxes))

    grid = PackedGrid(u.live)
    grid.advance(generations - 2 * STREAM_PERIOD)
    states: list[frozenset[Cell]] = []
    for t in range(2 * STREAM_PERIOD + 1):
        states.append(grid.live_cells())
        if t < 2 * STREAM_PERIOD:
            grid.advance(1)
    if states[0] != states[-1]:
        return "misaligned"
    outside = [away(sv) for sv in states]
    constant = outside[0]
    for cur in outside[1:]:
        constant &= cur
        if not constant:
            break
    if constant:
        return "misaligned"
    blocks = _has_block_stage(outside)
    if states[0] != states[STREAM_PERIOD]:
        return "two-phase-block" if blocks else "misaligned"
    return "two-phase-block" if blocks else "clean-annihilation"


def _has_block_stage(outside: Sequence[frozenset[Cell]]) -> bool:
    """A stationary, isolated 2x2 block persisting three generations."""
    for t in range(len(outside) - 2):
        window = outside[t] | outside[t + 1] | outside[t + 2]
        stationary = outside[t] & outside[t + 1] & outside[t + 2]
        for x, y in sorted(stationary):
            quad = {(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)}
            if not quad <= stationary:
                continue
            halo = {
                (a, b)
                for a in range(x - 1, x + 3)
                for b in range(y - 1, y + 3)
            } - quad
            if not halo & window:
                return True
    return False


# ---------------------------------------------------------------------------
# Crossing algebra for perpendicular streams.


def _crossing_residue(
    se: tuple[Cell, int, int], sw: tuple[Cell, int, int]
) -> tuple[int, int]:
    """(parity, residue) classifying a southeast/southwest stream crossing.

    Streams whose residue lies in ANNIHILATION_RESIDUES (parity 0)
    mutually annihilate at the crossing with no residue.
    """
    (h1, c, psi_se) = se
    (h2, lsw, psi_sw) = sw
    assert h1 == (1, 1) and h2 == (-1, 1)
    s = -lsw
    d = (psi_sw - psi_se - PHASE_PER_CELL * (s - c)) % STREAM_PERIOD
    return (s - c) % 2, d


def _crossing_point(c: int, s: int) -> Cell:
    return ((s - c) // 2, (s + c) // 2)


# ---------------------------------------------------------------------------
# Gate design.
#
# All three gates are built from one reaction: a southeast input stream
# crossing a southwest gun stream at the canonical annihilation residue.
# AND:  gun G crosses A's line, then B's line, then dies in stopper S;
#       the output detector sits on B's line past the second crossing.
# OR:   gun X crosses A, then B, then parallel gun P's line; stopper SB
#       absorbs B past its crossing; the output sits on P's line.
# NOT:  gun N crosses A once; the output detector sits on N's own line
#       past the crossing, so the gate reverses the signal's heading.

_AND_LABELS = ("gun_a", "input_a", "gun_b", "input_b", "gun_g", "stopper", "output")
_OR_LABELS = (
    "gun_a",
    "input_a",
    "gun_b",
    "input_b",
    "gun_x",
    "gun_p",
    "stopper",
    "output",
)
_NOT_LABELS = ("gun_a", "input_a", "gun_n", "output")

_LABELS = {"AND": _AND_LABELS, "OR": _OR_LABELS, "NOT": _NOT_LABELS}

_NOMINAL: dict[str, dict[str, Cell]] = {
    "AND": {
        "gun_a": (16, 30),
        "gun_b": (-9, 55),
        "gun_g": (86, 35),
        "stopper": (30, 0),  # x anchor on gun_g's line; y solved from the line
        "output": (70, 0),  # x anchor on gun_b's line
    },
    "OR": {
        "gun_a": (16, 30),
        "gun_b": (-9, 55),
        "gun_x": (86, 35),
        "gun_p": (-13, 101),
        "stopper": (70, 0),  # x anchor on gun_b's line
        "output": (45, 0),  # x anchor on gun_p's line
    },
    "NOT": {
        "gun_a": (16, 30),
        "gun_n": (86, 35),
        "output": (42, 0),  # x anchor on gun_n's line
    },
}

_HORIZON = {"AND": 720, "OR": 780, "NOT": 540}

# Shipped search seeds: the nominal placement first, then upstream
# slides of gun A in whole alignment quanta (15 diagonal cells delays a
# stream by two periods without touching any residue).
_DEFAULT_SEARCH: dict[str, dict[str, tuple[Cell, ...]]] = {
    kind: {"gun_a": ((0, 0), (-15, -15), (-30, -30))} for kind in GATE_KINDS
}

_SEARCH_LIMIT = 64


def _offset_grid(spec: object) -> tuple[Cell, ...]:
    """Normalize one component's search entry to a tuple of offsets."""
    if isinstance(spec, tuple) and len(spec) == 2 and all(
        isinstance(v, int) for v in spec
    ):
        return (spec,)  # a single offset
    return tuple((int(dx), int(dy)) for dx, dy in spec)


def _gun(o: Orientation, at: Cell, psi: int) -> Component:
    e = solve_emission(o, at, psi)
    return Component("gun", "gun_p30", at, o, emission_phase=e)


def _input_pair(o: Orientation, at: Cell, psi: int) -> tuple[Component, Component]:
    gun = _gun(o, at, psi)
    cells, anchor, entry = _input_assembly(o)
    inp = Component(
        "input",
        "eater_stopper",
        _shift(anchor, at),
        o,
        control_cell=_shift(entry, at),
        emission_phase=gun.emission_phase,
    )
    return gun, inp


def _sw_target_psi(se_psi: int, c: int, s: int) -> int:
    """psi a southwest stream needs to annihilate the given southeast one."""
    return (se_psi + CANON_RESIDUE + PHASE_PER_CELL * (s - c)) % STREAM_PERIOD


def _se_target_psi(sw_psi: int, c: int, s: int) -> int:
    """psi a southeast stream needs to annihilate the given southwest one."""
    return (sw_psi - CANON_RESIDUE - PHASE_PER_CELL * (s - c)) % STREAM_PERIOD


def _design(kind: str, offsets: Mapping[str, Cell]) -> Optional[GateTemplate]:
    """Assemble one candidate placement; None when the geometry cannot work.

    Hard constraints checked here: every crossing must land on a lattice
    point (even line-pair parity), every eater offset must slide along
    its own stream (the lateral lock admits exactly one offset), and the
    crossings must keep their flight order.
    """
    pos = {
        label: _shift(_NOMINAL[kind].get(label, (0, 0)), offsets.get(label, (0, 0)))
        for label in _LABELS[kind]
    }
    for label in _LABELS[kind]:
        if label.startswith("input_") and offsets.get(label, (0, 0)) != (0, 0):
            # the stopper must track its gun's muzzle; only the gun moves
            return None
    if kind == "AND":
        return _design_and(pos)
    if kind == "OR":
        return _design_or(pos)
    return _design_not(pos)


def _design_and(pos: Mapping[str, Cell]) -> Optional[GateTemplate]:
    ha, ca, psi_a0 = gun_stream(Orientation.IDENTITY, pos["gun_a"])
    hb, cb, _ = gun_stream(Orientation.IDENTITY, pos["gun_b"])
    hg, lg, _ = gun_stream(Orientation.FLIP_X, pos["gun_g"])
    s = -lg
    if (s - ca) % 2 or (s - cb) % 2:
        return None
    p1 = _crossing_point(ca, s)
    p2 = _crossing_point(cb, s)
    if not (p2[0] < p1[0] < pos["gun_g"][0]):
        return None
    psi_a = psi_a0  # slot A's gun keeps emission phase 0
    gun_a, inp_a = _input_pair(Orientation.IDENTITY, pos["gun_a"], psi_a)
    psi_g = _sw_target_psi(psi_a, ca, s)
    gun_g = _gun(Orientation.FLIP_X, pos["gun_g"], psi_g)
    psi_b = _se_target_psi(psi_g, cb, s)
    gun_b, inp_b = _input_pair(Orientation.IDENTITY, pos["gun_b"], psi_b)
    stop = _eater_component((-1, 1), lg, pos["stopper"][0], "stopper")
    out = _eater_component((1, 1), cb, pos["output"][0], "output")
    if pos["stopper"][0] >= p2[0] - 8 or pos["output"][0] <= p2[0] + 8:
        return None
    comps = (gun_a, inp_a, gun_b, inp_b, gun_g, stop, out)
    return GateTemplate(
        kind="AND",
        components=comps,
        input_cells={"A": inp_a.control_cell, "B": inp_b.control_cell},
        output_cell=out.control_cell,
        output_heading=(1, 1),
        probe_generation=0,
    )


def _design_or(pos: Mapping[str, Cell]) -> Optional[GateTemplate]:
    ha, ca, psi_a0 = gun_stream(Orientation.IDENTITY, pos["gun_a"])
    hb, cb, _ = gun_stream(Orientation.IDENTITY, pos["gun_b"])
    hx, lx, _ = gun_stream(Orientation.FLIP_X, pos["gun_x"])
    hp, cp, _ = gun_stream(Orientation.IDENTITY, pos["gun_p"])
    s = -lx
    if (s - ca) % 2 or (s - cb) % 2 or (s - cp) % 2:
        return None
    q1 = _crossing_point(ca, s)
    q2 = _crossing_point(cb, s)
    q3 = _crossing_point(cp, s)
    if not (q3[0] < q2[0] < q1[0] < pos["gun_x"][0]):
        return None
    psi_a = psi_a0
    gun_a, inp_a = _input_pair(Orientation.IDENTITY, pos["gun_a"], psi_a)
    psi_x = _sw_target_psi(psi_a, ca, s)
    gun_x = _gun(Orientation.FLIP_X, pos["gun_x"], psi_x)
    psi_b = _se_target_psi(psi_x, cb, s)
    gun_b, inp_b = _input_pair(Orientation.IDENTITY, pos["gun_b"], psi_b)
    psi_p = _se_target_psi(psi_x, cp, s)
    gun_p = _gun(Orientation.IDENTITY, pos["gun_p"], psi_p)
    stop = _eater_component((1, 1), cb, pos["stopper"][0], "stopper")
    out = _eater_component((1, 1), cp, pos["output"][0], "output")
    if pos["stopper"][0] <= q2[0] + 8 or pos["output"][0] <= q3[0] + 8:
        return None
    comps = (gun_a, inp_a, gun_b, inp_b, gun_x, gun_p, stop, out)
    return GateTemplate(
        kind="OR",
        components=comps,
        input_cells={"A": inp_a.control_cell, "B": inp_b.control_cell},
        output_cell=out.control_cell,
        output_heading=(1, 1),
        probe_generation=0,
    )


def _design_not(pos: Mapping[str, Cell]) -> Optional[GateTemplate]:
    ha, ca, psi_a0 = gun_stream(Orientation.IDENTITY, pos["gun_a"])
    hn, ln, _ = gun_stream(Orientation.FLIP_X, pos["gun_n"])
    s = -ln
    if (s - ca) % 2:
        return None
    r1 = _crossing_point(ca, s)
    if not r1[0] < pos["gun_n"][0]:
        return None
    psi_a = psi_a0
    gun_a, inp_a = _input_pair(Orientation.IDENTITY, pos["gun_a"], psi_a)
    psi_n = _sw_target_psi(psi_a, ca, s)
    gun_n = _gun(Orientation.FLIP_X, pos["gun_n"], psi_n)
    out = _eater_component((-1, 1), ln, pos["output"][0], "output")
    if pos["output"][0] >= r1[0] - 8:
        return None
    comps = (gun_a, inp_a, gun_n, out)
    return GateTemplate(
        kind="NOT",
        components=comps,
        input_cells={"A": inp_a.control_cell},
        output_cell=out.control_cell,
        output_heading=(-1, 1),
        probe_generation=0,
    )


# ---------------------------------------------------------------------------
# Certification.

_TRUTH: dict[str, dict[tuple[bool, ...], bool]] = {
    "AND": {(a, b): a and b for a in (False, True) for b in (False, True)},
    "OR": {(a, b): a or b for a in (False, True) for b in (False, True)},
    "NOT": {(a,): not a for a in (False, True)},
}


def _slots(kind: str) -> tuple[str, ...]:
    return ("A",) if kind == "NOT" else ("A", "B")


def _guard_cells(t: GateTemplate, slot: str) -> tuple[Cell, ...]:
    """Cells downstream of a slot's stopper that must stay dead while blocked.

    The band runs from just past the eater to just short of the first
    crossing on that line, three cells to each side of the diagonal.
    """
    inp = _input_component(t, slot)
    gun = t.components[t.components.index(inp) - 1]  # inputs follow their gun
    assert gun.role == "gun"
    heading, line, _ = gun_stream(gun.orientation, gun.at, 0)
    hx, hy = heading
    far = max(hx * x + hy * y for x, y in materialize(inp)) + 6
    caps = []
    for c in t.components:
        if c.role != "gun" or c is gun:
            continue
        h2, l2, _ = gun_stream(c.orientation, c.at, 0)
        if h2 == (-hy, hx):  # perpendicular: crossing at along-coordinate -l2
            caps.append(-l2)
        elif h2 == (hy, -hx):
            caps.append(l2)
    near = min(caps) - 8 if caps else far + 86
    cells = []
    for m in range(far, min(near, far + 86)):
        for lat in range(-3, 4):
            ltot = line + lat
            if (m + ltot) % 2:
                continue
            x = (hx * m - hy * ltot) // 2
            y = (hy * m + hx * ltot) // 2
            if hx * x + hy * y == m and hx * y - hy * x == ltot:
                cells.append((x, y))
    return tuple(cells)


@dataclass(frozen=True)
class Certificate:
    """Evidence from simulating every assignment of a template."""

    probe_generation: int
    lights: Mapping[tuple[bool, ...], tuple[int, ...]]


def _certify(t: GateTemplate) -> Optional[Certificate]:
    """Simulate all assignments; None when any contract fails.

    Checks, per assignment: the final state is exactly 30-periodic (no
    escaping gliders, no drifting debris), blocked stoppers stay intact
    with silent downstream bands, destroyed stoppers vanish, and the
    output cell's light record matches the truth table with a common
    probe generation.
    """
    kind = t.kind
    horizon = _HORIZON[kind]
    slots = _slots(kind)
    guards = {s: _guard_cells(t, s) for s in slots}
    lights: dict[tuple[bool, ...], tuple[int, ...]] = {}
    finals: dict[tuple[bool, ...], frozenset[Cell]] = {}
    for assignment in _TRUTH[kind]:
        u = template_universe(t)
        for slot, value in zip(slots, assignment):
            if value:
                u = activate_input(u, _input_component(t, slot))
        grid = PackedGrid(u.live)
        lit: list[int] = []
        snap: dict[int, frozenset[Cell]] = {}
        blocked = [s for s, v in zip(slots, assignment) if not v]
        for gen in range(horizon + 1):
            if gen:
                grid.advance(1)
            if grid.test(t.output_cell):
                lit.append(gen)
            for s in blocked:
                for cell in guards[s]:
                    if grid.test(cell):
                        return None
            if gen in (horizon - STREAM_PERIOD, horizon):
                snap[gen] = grid.live_cells()
        if snap[horizon] != snap[horizon - STREAM_PERIOD]:
            return None
        final = snap[horizon]
        for slot, value in zip(slots, assignment):
            eater = materialize(_input_component(t, slot))
            if value:
                if eater <= final:
                    return None
            else:
                if not eater <= final:
                    return None
        lights[assignment] = tuple(lit)
        finals[assignment] = final
    probe = 0
    for assignment, expected in _TRUTH[kind].items():
        lit = lights[assignment]
        if expected:
            anchor = _periodic_tail(lit, horizon)
            if anchor is None:
                return None
            probe = max(probe, anchor)
        else:
            if lit and lit[-1] >= horizon - 2 * STREAM_PERIOD:
                return None
            if lit:
                probe = max(probe, lit[-1] + 1)
    if probe + 2 * STREAM_PERIOD > horizon:
        return None
    for assignment, expected in _TRUTH[kind].items():
        window = [g for g in lights[assignment] if probe <= g < probe + PROBE_WINDOW]
        if bool(window) != expected:
            return None
    return Certificate(probe_generation=probe, lights=lights)


def _periodic_tail(lit: Sequence[int], horizon: int) -> Optional[int]:
    """First generation from which lights recur every period to the horizon."""
    if not lit:
        return None
    hits = set(lit)
    last = lit[-1]
    if last < horizon - STREAM_PERIOD:
        return None
    anchor = last
    while anchor - STREAM_PERIOD in hits:
        anchor -= STREAM_PERIOD
    if anchor > horizon - 2 * STREAM_PERIOD:
        return None
    return anchor


# ---------------------------------------------------------------------------
# Calibration.


def calibrate(
    kind: str,
    search: Optional[Mapping[str, Iterable[Cell]]] = None,
) -> GateTemplate:
    """Exhaustively search placements around the nominal design.

    ``search`` maps component labels to candidate offsets tried in the
    given order (missing labels stay at their nominal position).  The
    first candidate whose full certificate passes wins; the certificate
    simulates every input assignment and rejects any placement that
    leaks debris or breaks a stopper contract.
    """
    if kind not in GATE_KINDS:
        raise ValueError(f"unknown gate kind {kind!r}")
    table = _DEFAULT_SEARCH[kind] if search is None else dict(search)
    if not table:
        raise NoValidPlacementError(f"no valid placement for {kind}: empty search")
    labels = [lab for lab in _LABELS[kind] if lab in table]
    grids = []
    for lab in labels:
        offs = _offset_grid(table[lab])
        for dx, dy in offs:
            if abs(dx) > _SEARCH_LIMIT or abs(dy) > _SEARCH_LIMIT:
                raise ValueError("search offsets must stay within 64 cells per axis")
        grids.append(offs)
    for combo in itertools.product(*grids):
        offsets = dict(zip(labels, combo))
        candidate = _design(kind, offsets)
        if candidate is None:
            continue
        cert = _certify(candidate)
        if cert is None:
            continue
        return replace(candidate, probe_generation=cert.probe_generation)
    raise NoValidPlacementError(f"no valid placement for {kind} in the search space")


# ---------------------------------------------------------------------------
# Fixture round-trip.


def _gates_dir() -> Path:
    return fixture_dir() / "gates"


def save_gate_fixture(t: GateTemplate, directory: Optional[Path] = None) -> None:
    """Write the template as an RLE body plus a key=value sidecar."""
    directory = Path(directory) if directory else _gates_dir()
    directory.mkdir(parents=True, exist_ok=True)
    cells = template_cells(t)
    origin = _min_corner(cells)
    pat = Pattern(
        name=t.kind.lower(),
        cells=frozenset(_shift(c, _neg(origin)) for c in cells),
        kind="still-life",
    )
    (directory / f"{t.kind.lower()}.rle").write_text(
        emit_rle(pat, comment=f"{t.kind} gate template")
    )
    lines = [
        f"kind={t.kind}",
        f"origin={origin[0]},{origin[1]}",
        f"probe_generation={t.probe_generation}",
        f"probe_window={t.probe_window}",
        f"output_cell={t.output_cell[0]},{t.output_cell[1]}",
        f"output_heading={t.output_heading[0]},{t.output_heading[1]}",
    ]
    for slot in sorted(t.input_cells):
        cell = t.input_cells[slot]
        lines.append(f"input_cell.{slot}={cell[0]},{cell[1]}")
    for i, c in enumerate(t.components):
        lines.append(f"component.{i}.role={c.role}")
        lines.append(f"component.{i}.pattern={c.pattern_name}")
        lines.append(f"component.{i}.at={c.at[0]},{c.at[1]}")
        lines.append(f"component.{i}.orientation={c.orientation.name}")
        if c.control_cell is not None:
            lines.append(
                f"component.{i}.control={c.control_cell[0]},{c.control_cell[1]}"
            )
        if c.emission_phase is not None:
            lines.append(f"component.{i}.emission_phase={c.emission_phase}")
    (directory / f"{t.kind.lower()}.meta").write_text("\n".join(lines) + "\n")


def _parse_cell(text: str) -> Cell:
    x, y = text.split(",")
    return (int(x), int(y))


def _load_gate_files(kind: str, directory: Path) -> GateTemplate:
    rle_path = directory / f"{kind.lower()}.rle"
    meta_path = directory / f"{kind.lower()}.meta"
    if not rle_path.exists() or not meta_path.exists():
        raise CalibrationError(
            f"calibration-failure: missing fixture for {kind} in {directory}"
        )
    meta: dict[str, str] = {}
    for raw in meta_path.read_text().splitlines():
        raw = raw.strip()
        if not raw or raw.startswith("#"):
            continue
        key, _, value = raw.partition("=")
        meta[key] = value
    comp_ids = sorted(
        {int(k.split(".")[1]) for k in meta if k.startswith("component.")}
    )
    components = []
    for i in comp_ids:
        get = lambda f: meta.get(f"component.{i}.{f}")
        components.append(
            Component(
                role=get("role"),
                pattern_name=get("pattern"),
                at=_parse_cell(get("at")),
                orientation=Orientation[get("orientation")],
                control_cell=_parse_cell(get("control")) if get("control") else None,
                emission_phase=(
                    int(get("emission_phase"))
                    if get("emission_phase") is not None
                    else None
                ),
            )
        )
    input_cells = {
        k.split(".", 1)[1]: _parse_cell(v)
        for k, v in meta.items()
        if k.startswith("input_cell.")
    }
    t = GateTemplate(
        kind=meta["kind"],
        components=tuple(components),
        input_cells=input_cells,
        output_cell=_parse_cell(meta["output_cell"]),
        output_heading=_parse_cell(meta["output_heading"]),
        probe_generation=int(meta["probe_generation"]),
        probe_window=int(meta["probe_window"]),
    )
    pat = parse_rle(rle_path.read_text(), name=kind.lower())
    origin = _parse_cell(meta["origin"])
    stored = frozenset(_shift(c, origin) for c in pat.cells)
    if stored != template_cells(t):
        raise CalibrationError(
            f"calibration-failure: {kind} fixture cells do not match its components"
        )
    return t


@lru_cache(maxsize=None)
def _load_gate(kind: str, directory: str) -> GateTemplate:
    t = _load_gate_files(kind, Path(directory))
    cert = _certify(t)
    if cert is None:
        raise CalibrationError(f"calibration-failure: {kind} certificate does not pass")
    if cert.probe_generation != t.probe_generation:
        raise CalibrationError(
            f"calibration-failure: {kind} probe generation drifted "
            f"({t.probe_generation} stored, {cert.probe_generation} measured)"
        )
    return t


def build_and() -> GateTemplate:
    """The calibrated two-input AND template, certificate re-verified."""
    return _load_gate("AND", str(_gates_dir()))


def build_or() -> GateTemplate:
    """The calibrated two-input OR template, certificate re-verified."""
    return _load_gate("OR", str(_gates_dir()))


def build_not() -> GateTemplate:
    """The calibrated NOT template; its output heads perpendicular to A."""
    return _load_gate("NOT", str(_gates_dir()))


# ---------------------------------------------------------------------------
# Whole-template transforms (used to build the mirrored gate family).


def transform_template(t: GateTemplate, o: Orientation) -> GateTemplate:
    """Image of a calibrated template under a grid symmetry.

    The rule is isotropic, so certificates survive any of the eight
    orientations; timing constants are unchanged.
    """
    comps = tuple(_transform_component(c, o) for c in t.components)
    return GateTemplate(
        kind=t.kind,
        components=comps,
        input_cells={k: o.apply(v) for k, v in t.input_cells.items()},
        output_cell=o.apply(t.output_cell),
        output_heading=o.apply(t.output_heading),
        probe_generation=t.probe_generation,
        probe_window=t.probe_window,
    )


def _transform_component(c: Component, o: Orientation) -> Component:
    cells = materialize(c)
    img = [o.apply(q) for q in cells]
    new_orient = c.orientation.then(o)
    if c.role == "gun":
        body = phased_gun_cells(new_orient, c.emission_phase or 0)
    else:
        p = catalog(c.pattern_name)
        raw = [new_orient.apply(q) for q in p.cells]
        body = frozenset(_shift(q, _neg(_min_corner(raw))) for q in raw)
    at = _min_corner(img)
    rel = frozenset(_shift(q, _neg(at)) for q in img)
    if rel != body:
        raise AssertionError("component transform lost its shape")
    return replace(
        c,
        at=at,
        orientation=new_orient,
        control_cell=o.apply(c.control_cell) if c.control_cell else None,
    )
