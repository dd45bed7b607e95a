"""Pattern catalog, RLE file I/O, and dihedral placement transforms.

The catalog entries (block, beehive, blinker, glider, r_pentomino,
gun_p30, eater_stopper, eater_detector) are loaded from RLE fixture
files, which are the bit-exact authority for geometry.  Every entry is
verified against its behavioral contract by simulation on first load.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Optional

from . import engine
from .engine import Cell, Universe


class Orientation(Enum):
    """The 8 dihedral symmetries, as integer matrices on (x, y).

    Rotations are clockwise in screen coordinates (y grows downward).
    """

    IDENTITY = (1, 0, 0, 1)
    ROT90 = (0, -1, 1, 0)
    ROT180 = (-1, 0, 0, -1)
    ROT270 = (0, 1, -1, 0)
    FLIP_X = (-1, 0, 0, 1)
    FLIP_Y = (1, 0, 0, -1)
    TRANSPOSE = (0, 1, 1, 0)
    ANTI_TRANSPOSE = (0, -1, -1, 0)

    def apply(self, c: Cell) -> Cell:
        a, b, cc, d = self.value
        x, y = c
        return (a * x + b * y, cc * x + d * y)

    def then(self, outer: "Orientation") -> "Orientation":
        """The composite transform: self first, then outer."""
        a1, b1, c1, d1 = self.value
        a2, b2, c2, d2 = outer.value
        composed = (
            a2 * a1 + b2 * c1,
            a2 * b1 + b2 * d1,
            c2 * a1 + d2 * c1,
            c2 * b1 + d2 * d1,
        )
        return _ORIENTATION_BY_MATRIX[composed]

    def inverse(self) -> "Orientation":
        for o in Orientation:
            if self.then(o) is Orientation.IDENTITY:
                return o
        raise AssertionError("group closure violated")


_ORIENTATION_BY_MATRIX = {o.value: o for o in Orientation}

KINDS = {"still-life", "oscillator", "spaceship", "gun", "eater", "methuselah"}


@dataclass(frozen=True)
class Pattern:
    name: str
    cells: frozenset[Cell]  # normalized: min x == 0 and min y == 0
    kind: str
    period: Optional[int] = None
    velocity: Optional[Cell] = None  # displacement per period (spaceships)

    def width(self) -> int:
        return max(x for x, _ in self.cells) + 1 if self.cells else 0

    def height(self) -> int:
        return max(y for _, y in self.cells) + 1 if self.cells else 0


def _normalized(cells: frozenset[Cell]) -> frozenset[Cell]:
    if not cells:
        return cells
    x0 = min(x for x, _ in cells)
    y0 = min(y for _, y in cells)
    if (x0, y0) == (0, 0):
        return cells
    return frozenset((x - x0, y - y0) for x, y in cells)


class RleError(ValueError):
    """RLE parse failure with 1-based line/column position."""

    def __init__(self, code: str, message: str, line: int, column: int):
        super().__init__(f"{code} at line {line}, column {column}: {message}")
        self.code = code
        self.line = line
        self.column = column


_HEADER_RE = re.compile(
    r"^\s*x\s*=\s*(\d+)\s*,\s*y\s*=\s*(\d+)"
    r"(?:\s*,\s*rule\s*=\s*(?P<rule>[^\s,]+))?\s*$",
    re.IGNORECASE,
)


def parse_rle(text: str, name: str = "pattern") -> Pattern:
    """Decode run-length-encoded pattern text.

    Accepts optional leading `#` comment lines, a `x = W, y = H` header
    with optional `rule = B3/S23`, then `b`/`o`/`$` runs ending in `!`.
    """
    lines = text.splitlines()
    header_idx = None
    for i, raw in enumerate(lines):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        header_idx = i
        break
    if header_idx is None:
        raise RleError("malformed-header", "no header line found", len(lines) or 1, 1)
    m = _HEADER_RE.match(lines[header_idx])
    if not m:
        raise RleError(
            "malformed-header",
            f"expected 'x = <w>, y = <h>': {lines[header_idx]!r}",
            header_idx + 1,
            1,
        )
    rule = m.group("rule")
    if rule is not None and rule.upper() != "B3/S23":
        raise RleError(
            "unsupported-rule",
            f"only B3/S23 is supported, got {rule!r}",
            header_idx + 1,
            m.start("rule") + 1,
        )

    cells: set[Cell] = set()
    x = y = 0
    run = 0
    for li in range(header_idx + 1, len(lines)):
        line = lines[li]
        for ci, ch in enumerate(line):
            if ch.isspace():
                continue
            if ch.isdigit():
                run = run * 10 + int(ch)
            elif ch in "bB":
                x += run or 1
                run = 0
            elif ch in "oO":
                n = run or 1
                for k in range(n):
                    cells.add((x + k, y))
                x += n
                run = 0
            elif ch == "$":
                y += run or 1
                x = 0
                run = 0
            elif ch == "!":
                return Pattern(name=name, cells=_normalized(frozenset(cells)), kind="still-life")
            else:
                raise RleError(
                    "unexpected-character", f"{ch!r}", li + 1, ci + 1
                )
    last_line = len(lines)
    last_col = len(lines[-1]) + 1 if lines else 1
    raise RleError("missing-terminator", "no '!' found", last_line, last_col)


def emit_rle(p: Pattern, comment: Optional[str] = None, wrap: int = 70) -> str:
    """Canonical RLE text; parse_rle(emit_rle(p)) recovers p.cells."""
    cells = _normalized(p.cells)
    if not cells:
        return "x = 0, y = 0\n!\n"
    w = max(x for x, _ in cells) + 1
    h = max(y for _, y in cells) + 1
    tokens: list[str] = []

    def emit(count: int, sym: str) -> None:
        if count <= 0:
            return
        tokens.append(sym if count == 1 else f"{count}{sym}")

    blank_rows = 0
    for y in range(h):
        row = sorted(x for x, yy in cells if yy == y)
        if not row:
            blank_rows += 1
            continue
        if y > 0:
            emit(blank_rows + 1, "$")
        blank_rows = 0
        x = 0
        i = 0
        while i < len(row):
            j = i
            while j + 1 < len(row) and row[j + 1] == row[j] + 1:
                j += 1
            emit(row[i] - x, "b")
            emit(j - i + 1, "o")
            x = row[j] + 1
            i = j + 1
    body = "".join(tokens) + "!"
    wrapped = "\n".join(body[i : i + wrap] for i in range(0, len(body), wrap))
    head = f"x = {w}, y = {h}"
    if comment:
        head = f"#C {comment}\n{head}"
    return f"{head}\n{wrapped}\n"


def transform(p: Pattern, o: Orientation) -> Pattern:
    cells = _normalized(frozenset(o.apply(c) for c in p.cells))
    velocity = o.apply(p.velocity) if p.velocity is not None else None
    return replace(p, cells=cells, velocity=velocity)


class PlacementError(ValueError):
    def __init__(self, cell: Cell):
        super().__init__(f"placement overlaps existing live cell at {cell}")
        self.cell = cell


def place(
    u: Universe,
    p: Pattern,
    at: Cell,
    o: Orientation = Orientation.IDENTITY,
) -> Universe:
    """Union the oriented pattern onto u at offset `at`; overlap is an error."""
    placed = transform(p, o).cells
    ax, ay = at
    shifted = [(x + ax, y + ay) for x, y in placed]
    clash = sorted(c for c in shifted if c in u.live)
    if clash:
        first = min(clash, key=lambda c: (c[1], c[0]))
        raise PlacementError(first)
    return Universe(u.live | frozenset(shifted), u.generation)


# ---------------------------------------------------------------------------
# Catalog.

_CATALOG_META: dict[str, tuple[str, Optional[int], Optional[Cell]]] = {
    "block": ("still-life", 1, None),
    "beehive": ("still-life", 1, None),
    "blinker": ("oscillator", 2, None),
    "glider": ("spaceship", 4, (1, 1)),
    "r_pentomino": ("methuselah", None, None),
    "gun_p30": ("gun", 30, None),
    "eater_stopper": ("eater", 1, None),
    "eater_detector": ("eater", 1, None),
}

CATALOG_NAMES = tuple(sorted(_CATALOG_META))


class CatalogError(ValueError):
    pass


def fixture_dir() -> Path:
    override = os.environ.get("LIFE_FIXTURE_DIR")
    if override:
        return Path(override)
    return Path(__file__).parent / "fixtures"


_catalog_cache: dict[tuple[Path, str], Pattern] = {}


def _verify_entry(p: Pattern) -> None:
    u = Universe(p.cells)
    if not p.cells:
        raise CatalogError(f"{p.name}: fixture is empty")
    if p.kind in ("still-life", "eater"):
        if engine.step(u).live != u.live:
            raise CatalogError(f"{p.name}: not a still life")
    elif p.kind == "oscillator":
        assert p.period is not None
        for k in range(1, p.period):
            if engine.run(u, k).live == u.live:
                raise CatalogError(f"{p.name}: period smaller than {p.period}")
        if engine.run(u, p.period).live != u.live:
            raise CatalogError(f"{p.name}: does not return after {p.period}")
    elif p.kind == "spaceship":
        assert p.period is not None and p.velocity is not None
        vx, vy = p.velocity
        moved = frozenset((x + vx, y + vy) for x, y in p.cells)
        if engine.run(u, p.period).live != moved:
            raise CatalogError(f"{p.name}: translation law fails")
    elif p.kind == "gun":
        assert p.period is not None
        after = engine.run(u, p.period)
        extra = after.live - u.live
        if not u.live <= after.live:
            raise CatalogError(f"{p.name}: body not periodic over {p.period}")
        gliders = engine.find_gliders(Universe(frozenset(extra)))
        if len(gliders) != 1 or len(extra) != 5:
            raise CatalogError(f"{p.name}: expected exactly one emitted glider")
    elif p.kind == "methuselah":
        pass
    else:  # pragma: no cover - table is fixed
        raise CatalogError(f"{p.name}: unknown kind {p.kind}")


def catalog(name: str) -> Pattern:
    """Fetch a verified catalog pattern by name."""
    if name not in _CATALOG_META:
        valid = ", ".join(CATALOG_NAMES)
        raise CatalogError(f"unknown pattern {name!r}; valid names: {valid}")
    key = (fixture_dir(), name)
    hit = _catalog_cache.get(key)
    if hit is not None:
        return hit
    kind, period, velocity = _CATALOG_META[name]
    path = key[0] / f"{name}.rle"
    if not path.is_file():
        raise CatalogError(f"fixture file missing: {path}")
    p = parse_rle(path.read_text(), name=name)
    p = replace(p, kind=kind, period=period, velocity=velocity)
    _verify_entry(p)
    _catalog_cache[key] = p
    return p
