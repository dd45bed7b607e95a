"""Boolean expression compiler targeting glider-stream logic gates.

Expressions parse into a small AST, lower to binary AND/OR/NOT, and
compile onto one lattice: every operator becomes a placed gate template,
every variable instance becomes a gun-plus-stopper input assembly, and
producers feed consumers over straight diagonal stream corridors.  The
compiler solves all stream phases exactly (no search) and computes the
probe calendar analytically from the calibrated per-gate latencies.

Layout happens in diagonal coordinates u = y - x, v = y + x.  A
southeast stream rides a constant-u track with v increasing; a southwest
stream rides a constant-v track with u increasing.  Mirrored gate
variants serve the southwest flow, so NOT gates alternate the travel
direction while binary gates preserve it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .engine import Cell, PackedGrid
from .patterns import Orientation, Pattern, emit_rle
from .components import (
    Component,
    GateTemplate,
    PROBE_WINDOW,
    STREAM_PERIOD,
    _eater_component,
    _gun_profile,
    _input_pair,
    build_and,
    build_not,
    build_or,
    gun_stream,
    materialize,
    transform_template,
)

__all__ = [
    "Var",
    "Not",
    "And",
    "Or",
    "Xor",
    "Expr",
    "ExprSyntaxError",
    "MissingVariableError",
    "PlacementConflictError",
    "AlignmentFailureError",
    "parse_expr",
    "binarize",
    "orient",
    "OrientedExpr",
    "PlacedGate",
    "Circuit",
    "compile",
    "evaluate",
    "evaluate_parallel",
    "save_circuit",
    "AdderSpec",
    "build_adder",
    "add",
    "ResponseEstimate",
    "estimate_response",
]


# ---------------------------------------------------------------------------
# Expression trees.


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Xor:
    """Input sugar; eliminated by binarize before compilation."""

    left: "Expr"
    right: "Expr"


Expr = Union[Var, Not, And, Or, Xor]


class ExprSyntaxError(ValueError):
    """Parse failure with the offending character position."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class MissingVariableError(KeyError):
    """An evaluation assignment does not cover every variable."""


class PlacementConflictError(RuntimeError):
    """Two placed regions of a compiled circuit would overlap."""


class AlignmentFailureError(RuntimeError):
    """No stream-valid placement exists for a producer-consumer edge."""


_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[&|!^()]))")


def parse_expr(text: str) -> Expr:
    """Parse ``&``, ``|``, ``!``, ``^`` and parentheses over identifiers.

    Precedence from tight to loose: ``!``, ``&``, ``^``, ``|``; binary
    operators associate left, so chains come out already binary.
    """
    tokens: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", at)
        group = "name" if m.group("name") else "op"
        tokens.append((m.group(group), m.start(group)))
        pos = m.end()
    cursor = 0

    def peek() -> Optional[str]:
        return tokens[cursor][0] if cursor < len(tokens) else None

    def take() -> tuple[str, int]:
        nonlocal cursor
        tok = tokens[cursor]
        cursor += 1
        return tok

    def parse_or() -> Expr:
        node = parse_xor()
        while peek() == "|":
            take()
            node = Or(node, parse_xor())
        return node

    def parse_xor() -> Expr:
        node = parse_and()
        while peek() == "^":
            take()
            node = Xor(node, parse_and())
        return node

    def parse_and() -> Expr:
        node = parse_unary()
        while peek() == "&":
            take()
            node = And(node, parse_unary())
        return node

    def parse_unary() -> Expr:
        if peek() == "!":
            take()
            return Not(parse_unary())
        return parse_atom()

    def parse_atom() -> Expr:
        if cursor >= len(tokens):
            raise ExprSyntaxError("unexpected end of expression", len(text))
        tok, at = take()
        if tok == "(":
            node = parse_or()
            if peek() != ")":
                raise ExprSyntaxError("missing closing parenthesis", at)
            take()
            return node
        if tok[0].isalpha() or tok[0] == "_":
            return Var(tok)
        raise ExprSyntaxError(f"unexpected token {tok!r}", at)

    if not tokens:
        raise ExprSyntaxError("empty expression", 0)
    node = parse_or()
    if cursor != len(tokens):
        raise ExprSyntaxError(
            f"unexpected token {tokens[cursor][0]!r}", tokens[cursor][1]
        )
    return node


def binarize(e: Expr) -> Expr:
    """Lower to binary AND/OR and unary NOT; XOR becomes (x|y) & !(x&y)."""
    if isinstance(e, Var):
        return e
    if isinstance(e, Not):
        return Not(binarize(e.operand))
    if isinstance(e, And):
        return And(binarize(e.left), binarize(e.right))
    if isinstance(e, Or):
        return Or(binarize(e.left), binarize(e.right))
    if isinstance(e, Xor):
        left, right = binarize(e.left), binarize(e.right)
        return And(Or(left, right), Not(And(left, right)))
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# Direction annotation.

_SE: Cell = (1, 1)
_SW: Cell = (-1, 1)
_MIRROR = {_SE: _SW, _SW: _SE}


@dataclass(frozen=True)
class OrientedExpr:
    """An expression node annotated with its output stream heading."""

    expr: Expr
    heading: Cell
    children: tuple["OrientedExpr", ...]


def orient(e: Expr, desired: Cell = _SE) -> OrientedExpr:
    """Assign each subexpression the heading its output must travel.

    Binary gates keep their side; a NOT consumes one heading and emits
    the mirror, so its operand travels opposite to its own output.
    """
    if desired not in _MIRROR:
        raise ValueError(f"heading must be southeast or southwest, got {desired}")
    if isinstance(e, Var):
        return OrientedExpr(e, desired, ())
    if isinstance(e, Not):
        return OrientedExpr(e, desired, (orient(e.operand, _MIRROR[desired]),))
    if isinstance(e, (And, Or)):
        return OrientedExpr(
            e, desired, (orient(e.left, desired), orient(e.right, desired))
        )
    if isinstance(e, Xor):
        raise ValueError("binarize the expression before orienting it")
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# Diagonal frames.
#
# lat(h, p) is the coordinate a stream of heading h keeps constant, and
# dep(h, p) grows along its flight; both families fly toward +dep.  One
# lattice step along the flight direction takes two generations.


def _lat(h: Cell, p: Cell) -> int:
    return p[1] - p[0] if h == _SE else p[0] + p[1]


def _dep(h: Cell, p: Cell) -> int:
    return p[0] + p[1] if h == _SE else p[1] - p[0]


def _stream_lat(h: Cell, line: int) -> int:
    """Track coordinate of a stream from its invariant line value."""
    return line if h == _SE else -line


def _frame_shift(h: Cell, dlat: int, ddep: int) -> Cell:
    """(dx, dy) realizing a (lat, dep) translation in the given family."""
    if (dlat + ddep) % 2:
        raise AlignmentFailureError("lattice translation needs matching parity")
    if h == _SE:
        return ((ddep - dlat) // 2, (ddep + dlat) // 2)
    return ((dlat - ddep) // 2, (dlat + ddep) // 2)


def _diag_box(cells: Iterable[Cell]) -> tuple[int, int, int, int]:
    us = []
    vs = []
    for x, y in cells:
        us.append(y - x)
        vs.append(y + x)
    return (min(us), max(us), min(vs), max(vs))


def _corridor_box(h: Cell, lat: int, dep0: int, dep1: int) -> tuple[int, int, int, int]:
    """Diagonal-space rectangle reserved for a stream segment."""
    if dep1 < dep0:
        dep0, dep1 = dep1, dep0
    if h == _SE:
        return (lat - 5, lat + 5, dep0, dep1)
    return (dep0, dep1, lat - 5, lat + 5)


_RECT_MARGIN = 8


def _boxes_clash(a: tuple[int, int, int, int], b: tuple[int, int, int, int]) -> bool:
    if a[1] + _RECT_MARGIN < b[0] or b[1] + _RECT_MARGIN < a[0]:
        return False
    if a[3] + _RECT_MARGIN < b[2] or b[3] + _RECT_MARGIN < a[2]:
        return False
    return True


@dataclass
class _Region:
    """A reserved diagonal-space rectangle owned by one placed gate.

    ``exempt`` names one other gate allowed to touch the region: an edge
    corridor threads its consumer's calibrated input geometry by design,
    so only foreign overlap is an error there.
    """

    owner: int
    box: tuple[int, int, int, int]
    exempt: Optional[int] = None


def _regions_clash(a: _Region, b: _Region) -> bool:
    if a.owner == b.owner:
        return False
    if a.exempt == b.owner or b.exempt == a.owner:
        return False
    return _boxes_clash(a.box, b.box)


# ---------------------------------------------------------------------------
# Gate template families and structural indexes.

_SLOTS = {"AND": ("A", "B"), "OR": ("A", "B"), "NOT": ("A",)}

# Component positions inside each template's ordered tuple.
_IDX = {
    "AND": {"slot_gun": {"A": 0, "B": 2}, "slot_input": {"A": 1, "B": 3},
            "killer": 4, "source": 2, "output": 6},
    "OR": {"slot_gun": {"A": 0, "B": 2}, "slot_input": {"A": 1, "B": 3},
           "killer": 4, "source": 5, "output": 7},
    "NOT": {"slot_gun": {"A": 0}, "slot_input": {"A": 1},
            "killer": 2, "source": 2, "output": 3},
}

_BUILDERS = {"AND": build_and, "OR": build_or, "NOT": build_not}


@lru_cache(maxsize=None)
def _family_template(kind: str, heading_in: Cell) -> GateTemplate:
    """The calibrated template whose input streams travel ``heading_in``."""
    base = _BUILDERS[kind]()
    if heading_in == _SE:
        return base
    return transform_template(base, Orientation.FLIP_X)


def _gate_headings(kind: str, heading_out: Cell) -> tuple[Cell, Cell]:
    if kind == "NOT":
        return _MIRROR[heading_out], heading_out
    return heading_out, heading_out


# ---------------------------------------------------------------------------
# Placed gates.


@dataclass(frozen=True)
class PlacedGate:
    """One concrete element of a compiled circuit.

    ``kind`` is AND, OR, NOT, or VAR (an input assembly).  ``removed``
    indexes components left out of the lattice: slot assemblies whose
    stream arrives from another gate, and interior output eaters.  The
    removed components still document the calibrated stream geometry,
    so they stay in ``components`` for alignment bookkeeping.
    """

    kind: str
    heading_in: Cell
    heading_out: Cell
    components: tuple[Component, ...]
    removed: frozenset[int] = frozenset()
    var_name: Optional[str] = None

    def live_cells(self) -> frozenset[Cell]:
        cells: set[Cell] = set()
        for i, c in enumerate(self.components):
            if i not in self.removed:
                cells |= materialize(c)
        return frozenset(cells)


def _shift_component(c: Component, d: Cell) -> Component:
    return replace(
        c,
        at=(c.at[0] + d[0], c.at[1] + d[1]),
        control_cell=(
            (c.control_cell[0] + d[0], c.control_cell[1] + d[1])
            if c.control_cell is not None
            else None
        ),
    )


def _shift_gate(g: PlacedGate, d: Cell) -> PlacedGate:
    return replace(g, components=tuple(_shift_component(c, d) for c in g.components))


def _stream_of(c: Component) -> tuple[Cell, int, int]:
    return gun_stream(c.orientation, c.at, c.emission_phase or 0)


def _nascent_of(c: Component) -> Cell:
    prof = _gun_profile(c.orientation)
    return (c.at[0] + prof.nascent[0], c.at[1] + prof.nascent[1])


def _head_time(c: Component) -> int:
    """Generation the first glider clears a placed gun's muzzle."""
    prof = _gun_profile(c.orientation)
    return (prof.detach - (c.emission_phase or 0)) % STREAM_PERIOD


def _source_of(g: PlacedGate) -> Component:
    """The gun whose survivors form the gate's output stream."""
    return g.components[0 if g.kind == "VAR" else _IDX[g.kind]["source"]]


# ---------------------------------------------------------------------------
# Subtree assembly.


_VAR_SETTLE = 60
_PROBE_MARGIN = 60
_STAGGER = 30  # upstream slide quantum; shifts stream timing by a full period
_WOBBLE = STREAM_PERIOD  # how far global phase choice can move a head time
_FIT_TRIES = 384


@dataclass
class _Edge:
    producer: int  # instance index of the feeding subtree's root
    consumer: int
    slot: str


@dataclass
class _Sub:
    """A placed subtree: concrete instances plus layout bookkeeping."""

    instances: list[PlacedGate]
    edges: list[_Edge]
    regions: list[_Region]
    out_heading: Cell
    out_ref: Cell  # output reference point: eater control cell or muzzle
    settle: int


def _translate_sub(sub: _Sub, d: Cell) -> None:
    du, dv = d[1] - d[0], d[1] + d[0]
    sub.instances = [_shift_gate(g, d) for g in sub.instances]
    sub.regions = [
        _Region(
            r.owner,
            (r.box[0] + du, r.box[1] + du, r.box[2] + dv, r.box[3] + dv),
            r.exempt,
        )
        for r in sub.regions
    ]
    sub.out_ref = (sub.out_ref[0] + d[0], sub.out_ref[1] + d[1])


def _build_var(node: OrientedExpr) -> _Sub:
    h = node.heading
    o = Orientation.IDENTITY if h == _SE else Orientation.FLIP_X
    _, _, psi = gun_stream(o, (0, 0), 0)
    gun, inp = _input_pair(o, (0, 0), psi)
    inst = PlacedGate(
        kind="VAR",
        heading_in=h,
        heading_out=h,
        components=(gun, inp),
        var_name=node.expr.name,
    )
    return _Sub(
        instances=[inst],
        edges=[],
        regions=[_Region(0, _diag_box(materialize(gun) | materialize(inp)))],
        out_heading=h,
        out_ref=_nascent_of(gun),
        settle=_VAR_SETTLE,
    )


def _own_regions(
    kind: str, t: GateTemplate, heading_in: Cell, removed: frozenset[int]
) -> list[_Region]:
    """Kept-component boxes plus the template's internal stream paths."""
    idx = _IDX[kind]
    boxes = [
        _diag_box(materialize(c))
        for i, c in enumerate(t.components)
        if i not in removed
    ]
    killer = t.components[idx["killer"]]
    kh, _, _ = _stream_of(killer)
    cross = _dep(heading_in, _nascent_of(killer))
    start = _lat(heading_in, _nascent_of(killer))
    ends = [start]
    for c in t.components:
        if c.role in ("stopper", "output"):
            ends.append(max(_lat(heading_in, q) for q in materialize(c)))
    if kind == "OR":
        _, line, _ = _stream_of(t.components[idx["source"]])
        ends.append(_stream_lat(heading_in, line) + 5)
    boxes.append(_corridor_box(kh, cross, start, max(ends)))
    if kind != "NOT":
        # For NOT the killer row above already covers the output run.
        far = max(_dep(heading_in, q) for c in t.components for q in materialize(c))
        src = t.components[idx["source"]]
        ch, line, _ = _stream_of(src)
        src_lat = _stream_lat(ch, line)
        boxes.append(_corridor_box(ch, src_lat, cross - 5, far + 5))
        if kind == "OR":
            boxes.append(
                _corridor_box(
                    ch, src_lat, _dep(heading_in, _nascent_of(src)), cross - 5
                )
            )
    return [_Region(0, b) for b in boxes]


def _attach(
    sub: _Sub,
    child: _Sub,
    heading: Cell,
    slot: str,
    slot_lat: int,
    crossing_dep: int,
    cap: int,
    want_psi: int,
    kill_t: int,
) -> int:
    """Place a child subtree on a slot track; returns input-steady time.

    The child slides upstream along the track in fixed quanta until two
    conditions hold: its regions and connecting corridor clear everything
    placed so far, and its first glider cannot reach the crossing before
    the consumer's killer stream covers it.  Sliding one quantum keeps
    every phase relation (it adds exactly one period of flight).  Lateral
    position is not free: the track pins it, so the scan must run deep
    enough to hoist the child past a wide sibling when necessary.
    """
    src = _source_of(child.instances[0])
    src_h, src_line, src_psi = _stream_of(src)
    if src_h != heading:
        raise AlignmentFailureError(
            f"slot {slot} needs heading {heading}, child emits {src_h}"
        )
    base = len(sub.instances)
    dlat = slot_lat - _stream_lat(heading, src_line)
    base_dep = cap - _dep(heading, child.out_ref)
    if (dlat + base_dep) % 2:
        base_dep -= 1
    # Head time of the child's stream under this edge's local phase fix;
    # the eventual global fix can move it at most one period either way.
    delta_local = (want_psi - src_psi) % STREAM_PERIOD
    head_muzzle = (_head_time(src) + delta_local) % STREAM_PERIOD
    muzzle_dep = _dep(heading, _nascent_of(src))
    placed = None
    for k in range(_FIT_TRIES):
        ddep = base_dep - _STAGGER * k
        head_t = head_muzzle + 2 * (crossing_dep - muzzle_dep - ddep)
        if head_t < kill_t + _WOBBLE:
            continue
        shift = _frame_shift(heading, dlat, ddep)
        du, dv = shift[1] - shift[0], shift[1] + shift[0]
        ref_dep = _dep(heading, child.out_ref) + ddep
        trial = [
            _Region(
                r.owner + base,
                (r.box[0] + du, r.box[1] + du, r.box[2] + dv, r.box[3] + dv),
                r.exempt + base if r.exempt is not None else None,
            )
            for r in child.regions
        ]
        trial.append(
            _Region(
                base,
                _corridor_box(heading, slot_lat, ref_dep + 2, crossing_dep - 16),
                exempt=0,
            )
        )
        if not any(
            _regions_clash(region, fixed)
            for region in trial
            for fixed in sub.regions
        ):
            placed = (shift, ref_dep, trial[-1])
            break
    if placed is None:
        raise PlacementConflictError(
            f"no clear placement for the {slot} subtree within {_FIT_TRIES} slides"
        )
    shift, ref_dep, corridor = placed
    _translate_sub(child, shift)
    root_child = child.instances[0]
    if root_child.kind != "VAR":
        out_idx = _IDX[root_child.kind]["output"]
        child.instances[0] = replace(root_child, removed=root_child.removed | {out_idx})
    sub.instances.extend(child.instances)
    sub.edges.extend(
        _Edge(e.producer + base, e.consumer + base, e.slot) for e in child.edges
    )
    sub.regions.extend(
        _Region(
            r.owner + base,
            r.box,
            r.exempt + base if r.exempt is not None else None,
        )
        for r in child.regions
    )
    sub.regions.append(corridor)
    sub.edges.append(_Edge(base, 0, slot))
    return child.settle + 2 * (crossing_dep - ref_dep)


def _build_gate(node: OrientedExpr) -> _Sub:
    kind = {And: "AND", Or: "OR", Not: "NOT"}[type(node.expr)]
    heading_in, heading_out = _gate_headings(kind, node.heading)
    t = _family_template(kind, heading_in)
    idx = _IDX[kind]

    removed = frozenset(
        {idx["slot_input"][s] for s in _SLOTS[kind]}
        | {idx["slot_gun"][s] for s in _SLOTS[kind]}
    )
    inst = PlacedGate(
        kind=kind,
        heading_in=heading_in,
        heading_out=heading_out,
        components=t.components,
        removed=removed,
    )
    sub = _Sub(
        instances=[inst],
        edges=[],
        regions=_own_regions(kind, t, heading_in, removed),
        out_heading=heading_out,
        out_ref=t.output_cell,
        settle=0,
    )
    killer = t.components[idx["killer"]]
    crossing_dep = _dep(heading_in, _nascent_of(killer))
    arrivals = []
    for slot, child_node in zip(_SLOTS[kind], node.children):
        child = _build(child_node)
        slot_gun = t.components[idx["slot_gun"][slot]]
        _, line, want_psi = _stream_of(slot_gun)
        slot_lat = _stream_lat(heading_in, line)
        kill_t = _head_time(killer) + 2 * (
            slot_lat - _lat(heading_in, _nascent_of(killer))
        )
        arrivals.append(
            _attach(
                sub,
                child,
                heading_in,
                slot,
                slot_lat,
                crossing_dep,
                _dep(heading_in, _nascent_of(slot_gun)),
                want_psi,
                kill_t,
            )
        )
    sub.settle = max(arrivals) + t.probe_generation
    return sub


def _build(node: OrientedExpr) -> _Sub:
    if isinstance(node.expr, Var):
        return _build_var(node)
    return _build_gate(node)


# ---------------------------------------------------------------------------
# Phase solving.


def _apply_delta(g: PlacedGate, delta: int) -> PlacedGate:
    """Advance every stream of one instance by ``delta`` phase steps."""
    if delta == 0:
        return g
    comps = tuple(
        replace(c, emission_phase=(c.emission_phase - delta) % STREAM_PERIOD)
        if c.emission_phase is not None
        else c
        for c in g.components
    )
    return replace(g, components=comps)


def _solve_phases(sub: _Sub) -> None:
    """Choose each instance's phase shift so every edge's streams match.

    A consumer's removed slot gun documents the exact stream it was
    calibrated against; the producer's source stream must reproduce its
    invariants at the same positions.  Shifting a whole instance moves
    all its streams together, so each edge pins its producer's shift
    directly from the consumer's, root first.
    """
    by_consumer: dict[int, list[_Edge]] = {}
    for e in sub.edges:
        by_consumer.setdefault(e.consumer, []).append(e)
    delta: dict[int, int] = {0: 0}
    queue = [0]
    while queue:
        c = queue.pop()
        consumer = sub.instances[c]
        for e in by_consumer.get(c, ()):
            slot_gun = consumer.components[_IDX[consumer.kind]["slot_gun"][e.slot]]
            src = _source_of(sub.instances[e.producer])
            want_h, want_line, want_psi = _stream_of(slot_gun)
            have_h, have_line, have_psi = _stream_of(src)
            if (want_h, want_line) != (have_h, have_line):
                raise AlignmentFailureError(
                    f"slot {e.slot} track mismatch: needs {want_h}/{want_line}, "
                    f"producer rides {have_h}/{have_line}"
                )
            delta[e.producer] = (want_psi + delta[c] - have_psi) % STREAM_PERIOD
            queue.append(e.producer)
    for i, d in delta.items():
        sub.instances[i] = _apply_delta(sub.instances[i], d)


def _verify_regions(sub: _Sub) -> None:
    """Belt and braces: no two foreign reservations may touch."""
    for i, ra in enumerate(sub.regions):
        for rb in sub.regions[i + 1 :]:
            if _regions_clash(ra, rb):
                raise PlacementConflictError(
                    f"regions of gates {ra.owner} and {rb.owner} overlap: "
                    f"{ra.box} vs {rb.box}"
                )


# ---------------------------------------------------------------------------
# The compiled circuit.


@dataclass(frozen=True)
class Circuit:
    """A Boolean expression realized as one generation-0 lattice.

    ``input_cells`` keys are per-instance: each occurrence of a variable
    gets its own assembly, named ``NAME.0``, ``NAME.1``, ... in layout
    order, and evaluation activates every instance of a true variable.
    """

    expr: Expr
    gates: tuple[PlacedGate, ...]
    wiring: Mapping[int, tuple[int, str]]
    input_cells: Mapping[str, Cell]
    output_cell: Cell
    output_heading: Cell
    probe_generation: int
    probe_window: int
    gun_count: int
    cells: frozenset[Cell]


def compile(e: Union[Expr, str], heading: Cell = _SE) -> Circuit:
    """Place one gate per operator and one input assembly per variable.

    Producers feed consumers over straight diagonal corridors; interior
    output eaters are removed so streams continue into their consumers.
    The root gate keeps its eater, and the returned probe calendar says
    when its light record reflects the settled inputs.
    """
    if isinstance(e, str):
        e = parse_expr(e)
    e = binarize(e)
    tree = orient(e, heading)
    if isinstance(tree.expr, Var):
        return _compile_trivial(tree, e)
    sub = _build(tree)
    _solve_phases(sub)
    _verify_regions(sub)

    seen: dict[str, int] = {}
    input_cells: dict[str, Cell] = {}
    for g in sub.instances:
        if g.kind == "VAR":
            n = seen.get(g.var_name, 0)
            seen[g.var_name] = n + 1
            input_cells[f"{g.var_name}.{n}"] = g.components[1].control_cell
    cells: set[Cell] = set()
    for g in sub.instances:
        cells |= g.live_cells()
    root = sub.instances[0]
    out_comp = root.components[_IDX[root.kind]["output"]]
    return Circuit(
        expr=e,
        gates=tuple(sub.instances),
        wiring={edge.producer: (edge.consumer, edge.slot) for edge in sub.edges},
        input_cells=input_cells,
        output_cell=out_comp.control_cell,
        output_heading=root.heading_out,
        probe_generation=sub.settle + _PROBE_MARGIN,
        probe_window=PROBE_WINDOW,
        gun_count=sum(
            1
            for g in sub.instances
            for i, c in enumerate(g.components)
            if c.role == "gun" and i not in g.removed
        ),
        cells=frozenset(cells),
    )


def _compile_trivial(tree: OrientedExpr, e: Expr) -> Circuit:
    """A single input assembly echoing its variable into an output eater."""
    sub = _build_var(tree)
    gun = sub.instances[0].components[0]
    h, line, _ = _stream_of(gun)
    nascent = _nascent_of(gun)
    anchor_x = nascent[0] + (50 if h == _SE else -56)
    out = _eater_component(h, line, anchor_x, "output")
    inst = replace(sub.instances[0], components=sub.instances[0].components + (out,))
    flight = 2 * (_dep(h, out.control_cell) - _dep(h, nascent))
    return Circuit(
        expr=e,
        gates=(inst,),
        wiring={},
        input_cells={f"{inst.var_name}.0": inst.components[1].control_cell},
        output_cell=out.control_cell,
        output_heading=h,
        probe_generation=_VAR_SETTLE + flight + _PROBE_MARGIN,
        probe_window=PROBE_WINDOW,
        gun_count=1,
        cells=inst.live_cells(),
    )


def _variables(c: Circuit) -> set[str]:
    return {key.rsplit(".", 1)[0] for key in c.input_cells}


def evaluate(c: Circuit, assignment: Mapping[str, bool]) -> bool:
    """Simulate the circuit under one assignment and probe its output."""
    missing = _variables(c) - set(assignment)
    if missing:
        raise MissingVariableError(
            f"assignment missing variables: {', '.join(sorted(missing))}"
        )
    live = set(c.cells)
    for key, cell in c.input_cells.items():
        if assignment[key.rsplit(".", 1)[0]]:
            live.add(cell)
    grid = PackedGrid(frozenset(live))
    grid.advance(c.probe_generation)
    for _ in range(c.probe_window):
        if grid.test(c.output_cell):
            return True
        grid.advance(1)
    return False


def evaluate_parallel(
    circuits: Sequence[Circuit], assignment: Mapping[str, bool]
) -> tuple[bool, ...]:
    """Evaluate region-disjoint circuits in one shared simulation."""
    live: set[Cell] = set()
    for c in circuits:
        missing = _variables(c) - set(assignment)
        if missing:
            raise MissingVariableError(
                f"assignment missing variables: {', '.join(sorted(missing))}"
            )
        live |= c.cells
        for key, cell in c.input_cells.items():
            if assignment[key.rsplit(".", 1)[0]]:
                live.add(cell)
    grid = PackedGrid(frozenset(live))
    lit = [False] * len(circuits)
    gen = min(c.probe_generation for c in circuits)
    grid.advance(gen)
    horizon = max(c.probe_generation + c.probe_window for c in circuits)
    while gen < horizon:
        for i, c in enumerate(circuits):
            if not lit[i] and c.probe_generation <= gen < c.probe_generation + c.probe_window:
                lit[i] = grid.test(c.output_cell)
        grid.advance(1)
        gen += 1
    return tuple(lit)


def save_circuit(c: Circuit, stem: Union[str, Path]) -> None:
    """Write the lattice as RLE plus a key=value sidecar."""
    stem = Path(stem)
    origin = (min(x for x, _ in c.cells), min(y for _, y in c.cells))
    pat = Pattern(
        name=stem.name,
        cells=frozenset((x - origin[0], y - origin[1]) for x, y in c.cells),
        kind="still-life",
    )
    stem.with_suffix(".rle").write_text(emit_rle(pat, comment="compiled circuit"))
    lines = [
        f"origin={origin[0]},{origin[1]}",
        f"probe_generation={c.probe_generation}",
        f"probe_window={c.probe_window}",
        f"output_cell={c.output_cell[0]},{c.output_cell[1]}",
        f"output_heading={c.output_heading[0]},{c.output_heading[1]}",
        f"gun_count={c.gun_count}",
    ]
    for key in sorted(c.input_cells):
        cell = c.input_cells[key]
        lines.append(f"input_cell.{key}={cell[0]},{cell[1]}")
    stem.with_suffix(".meta").write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# The two-bit adder.


@dataclass(frozen=True)
class AdderSpec:
    """One addition: two-bit operands and the three result bits."""

    x: str
    y: str
    b2: bool
    b1: bool
    b0: bool

    @property
    def result(self) -> str:
        return "".join(str(int(b)) for b in (self.b2, self.b1, self.b0))


_ADDER_EXPRS = (
    "x0 ^ y0",
    "y1 ^ x1 ^ (x0 & y0)",
    "(x1 & y1) | ((x1 ^ y1) & (x0 & y0))",
)


def _shift_circuit(c: Circuit, d: Cell) -> Circuit:
    return replace(
        c,
        gates=tuple(_shift_gate(g, d) for g in c.gates),
        input_cells={k: (v[0] + d[0], v[1] + d[1]) for k, v in c.input_cells.items()},
        output_cell=(c.output_cell[0] + d[0], c.output_cell[1] + d[1]),
        cells=frozenset((x + d[0], y + d[1]) for x, y in c.cells),
    )


@lru_cache(maxsize=1)
def build_adder() -> tuple[Circuit, Circuit, Circuit]:
    """Compile the three sum-bit circuits into disjoint lattice bands.

    The bands separate along the cross-flow diagonal, which moves whole
    circuits without touching any stream phase, so one lattice holds all
    three and evaluates them in parallel.
    """
    circuits = [compile(expr) for expr in _ADDER_EXPRS]
    shifted = [circuits[0]]
    for c in circuits[1:]:
        edge = max(y - x for x, y in shifted[-1].cells)
        u0 = min(y - x for x, y in c.cells)
        du = edge - u0 + 128
        du += du % 2
        shifted.append(_shift_circuit(c, (-du // 2, du // 2)))
    return tuple(shifted)


def _operand_bits(text: str) -> tuple[bool, bool]:
    if len(text) != 2 or any(ch not in "01" for ch in text):
        raise ValueError(f"operand must be two binary digits, got {text!r}")
    return text[0] == "1", text[1] == "1"


def add(x: str, y: str, circuits: Optional[Sequence[Circuit]] = None) -> AdderSpec:
    """Add two 2-bit numbers on one shared lattice."""
    x1, x0 = _operand_bits(x)
    y1, y0 = _operand_bits(y)
    if circuits is None:
        circuits = build_adder()
    b0, b1, b2 = evaluate_parallel(circuits, {"x0": x0, "x1": x1, "y0": y0, "y1": y1})
    return AdderSpec(x=x, y=y, b2=b2, b1=b1, b0=b0)


# ---------------------------------------------------------------------------
# Response estimation.

_GLIDER_SPACING = 15  # lattice steps between consecutive stream gliders


@dataclass(frozen=True)
class ResponseEstimate:
    """Operator counts and sizing data for a compiled expression."""

    d: int
    n_not: int
    n_and: int
    n_or: int
    weighted: int
    b: int
    gun_total: int


def estimate_response(e: Union[Expr, str]) -> ResponseEstimate:
    """Count operators and guns; the weighting is n + 2a + 3o.

    ``b`` reports how far the output sits across the flow from the first
    input assembly, in lattice steps along the cross diagonal.
    """
    if isinstance(e, str):
        e = parse_expr(e)
    e = binarize(e)
    n = a = o = 0

    def walk(node: Expr) -> None:
        nonlocal n, a, o
        if isinstance(node, Not):
            n += 1
            walk(node.operand)
        elif isinstance(node, And):
            a += 1
            walk(node.left)
            walk(node.right)
        elif isinstance(node, Or):
            o += 1
            walk(node.left)
            walk(node.right)

    walk(e)
    c = compile(e)
    first = min(c.input_cells)
    b = abs(
        _lat(c.output_heading, c.output_cell)
        - _lat(c.output_heading, c.input_cells[first])
    )
    return ResponseEstimate(
        d=_GLIDER_SPACING,
        n_not=n,
        n_and=a,
        n_or=o,
        weighted=n + 2 * a + 3 * o,
        b=b,
        gun_total=c.gun_count,
    )
