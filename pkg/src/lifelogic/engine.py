"""Game of Life stepping on an unbounded plane.

Two step implementations are provided: a dense per-cell oracle
(`naive_step`) that scans the bounding box plus a one-cell margin, and an
optimized path used by `step`/`run` (sparse neighbor counting for single
steps, a bit-packed 64-cells-per-word kernel for long runs).  The two are
held equal by the test suite.

Coordinates: x grows rightward, y grows downward.  The rule is fixed to
B3/S23.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional

import numpy as np

try:
    from numba import njit as _njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

Cell = tuple[int, int]


@dataclass(frozen=True)
class Rule:
    """Birth/survival neighbor counts.  Fixed to B3/S23 in this package."""

    birth: frozenset[int]
    survival: frozenset[int]


B3S23 = Rule(birth=frozenset({3}), survival=frozenset({2, 3}))


@dataclass(frozen=True)
class Universe:
    """An immutable set of live cells plus a generation counter."""

    live: frozenset[Cell]
    generation: int = 0

    @staticmethod
    def from_cells(cells: Iterable[Cell], generation: int = 0) -> "Universe":
        return Universe(frozenset((int(x), int(y)) for x, y in cells), generation)


def population(u: Universe) -> int:
    return len(u.live)


def bounding_box(u: Universe) -> Optional[tuple[Cell, Cell]]:
    """Tight bounds of the live cells, or None for an empty universe."""
    if not u.live:
        return None
    xs = [x for x, _ in u.live]
    ys = [y for _, y in u.live]
    return (min(xs), min(ys)), (max(xs), max(ys))


def neighbor_count(u: Universe, c: Cell) -> int:
    """Number of live cells among the 8 Moore neighbors of c (c excluded)."""
    x, y = c
    live = u.live
    return sum(
        (x + dx, y + dy) in live
        for dx in (-1, 0, 1)
        for dy in (-1, 0, 1)
        if dx or dy
    )


def _step_set(live: frozenset[Cell]) -> frozenset[Cell]:
    counts: Counter[Cell] = Counter()
    for x, y in live:
        counts[(x - 1, y - 1)] += 1
        counts[(x, y - 1)] += 1
        counts[(x + 1, y - 1)] += 1
        counts[(x - 1, y)] += 1
        counts[(x + 1, y)] += 1
        counts[(x - 1, y + 1)] += 1
        counts[(x, y + 1)] += 1
        counts[(x + 1, y + 1)] += 1
    return frozenset(
        c for c, n in counts.items() if n == 3 or (n == 2 and c in live)
    )


def step(u: Universe) -> Universe:
    """Advance one generation under B3/S23."""
    return Universe(_step_set(u.live), u.generation + 1)


def naive_step(u: Universe) -> Universe:
    """Reference step: dense scan of the bounding box plus 1-cell margin.

    Independent of the sparse and bit-packed paths; kept as the
    correctness oracle for both.
    """
    box = bounding_box(u)
    if box is None:
        return Universe(frozenset(), u.generation + 1)
    (x0, y0), (x1, y1) = box
    # Grid covers the box plus a 2-cell margin so births on the 1-cell
    # margin are representable and the neighbor sum never wraps.
    w = x1 - x0 + 5
    h = y1 - y0 + 5
    grid = np.zeros((h, w), dtype=np.int32)
    for x, y in u.live:
        grid[y - y0 + 2, x - x0 + 2] = 1
    neigh = np.zeros_like(grid)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dx == 0 and dy == 0:
                continue
            neigh[1:-1, 1:-1] += grid[1 + dy : h - 1 + dy, 1 + dx : w - 1 + dx]
    alive = grid == 1
    nxt = (neigh == 3) | (alive & (neigh == 2))
    ys, xs = np.nonzero(nxt)
    cells = frozenset((int(x) + x0 - 2, int(y) + y0 - 2) for x, y in zip(xs, ys))
    return Universe(cells, u.generation + 1)


# ---------------------------------------------------------------------------
# Bit-packed stepping: 64 cells per uint64 word, classic carry-save adder
# over the eight neighbor bit-planes.


def _maj(a, b, c):
    return (a & b) | (c & (a | b))


def _step_words_np(src: np.ndarray, dst: np.ndarray) -> None:
    one = np.uint64(1)
    sixty3 = np.uint64(63)
    left = src << one
    left[:, 1:] |= src[:, :-1] >> sixty3
    right = src >> one
    right[:, :-1] |= src[:, 1:] << sixty3

    def down(a: np.ndarray) -> np.ndarray:
        out = np.zeros_like(a)
        out[1:] = a[:-1]
        return out

    def up(a: np.ndarray) -> np.ndarray:
        out = np.zeros_like(a)
        out[:-1] = a[1:]
        return out

    lu, au, ru = down(left), down(src), down(right)
    ld, ad, rd = up(left), up(src), up(right)

    u0 = lu ^ au ^ ru
    u1 = _maj(lu, au, ru)
    d0 = ld ^ ad ^ rd
    d1 = _maj(ld, ad, rd)
    m0 = left ^ right
    m1 = left & right

    low = u0 ^ d0 ^ m0
    clow = _maj(u0, d0, m0)
    x0 = u1 ^ d1
    x1 = u1 & d1
    y0 = m1 ^ clow
    y1 = m1 & clow
    # Neighbor count is in {2,3} iff exactly one weight-2 bit is set;
    # `low` then distinguishes 3 (birth or survival) from 2 (survival).
    exactly_one = (x0 ^ y0) & ~(x1 | y1 | (x0 & y0))
    np.bitwise_and(exactly_one, low | src, out=dst)


if _HAVE_NUMBA:

    @_njit(cache=True)
    def _step_words_nb(src, dst):  # pragma: no cover - measured via outputs
        h, w = src.shape
        for y in range(h):
            for i in range(w):
                am = src[y, i]
                al = src[y, i - 1] if i > 0 else np.uint64(0)
                ar = src[y, i + 1] if i < w - 1 else np.uint64(0)
                if y > 0:
                    um = src[y - 1, i]
                    ul = src[y - 1, i - 1] if i > 0 else np.uint64(0)
                    ur = src[y - 1, i + 1] if i < w - 1 else np.uint64(0)
                else:
                    um = ul = ur = np.uint64(0)
                if y < h - 1:
                    dm = src[y + 1, i]
                    dl = src[y + 1, i - 1] if i > 0 else np.uint64(0)
                    dr = src[y + 1, i + 1] if i < w - 1 else np.uint64(0)
                else:
                    dm = dl = dr = np.uint64(0)

                lf = (am << np.uint64(1)) | (al >> np.uint64(63))
                rt = (am >> np.uint64(1)) | (ar << np.uint64(63))
                lu = (um << np.uint64(1)) | (ul >> np.uint64(63))
                ru = (um >> np.uint64(1)) | (ur << np.uint64(63))
                ld = (dm << np.uint64(1)) | (dl >> np.uint64(63))
                rd = (dm >> np.uint64(1)) | (dr << np.uint64(63))

                u0 = lu ^ um ^ ru
                u1 = (lu & um) | (ru & (lu | um))
                d0 = ld ^ dm ^ rd
                d1 = (ld & dm) | (rd & (ld | dm))
                m0 = lf ^ rt
                m1 = lf & rt

                low = u0 ^ d0 ^ m0
                clow = (u0 & d0) | (m0 & (u0 | d0))
                x0 = u1 ^ d1
                x1 = u1 & d1
                y0 = m1 ^ clow
                y1 = m1 & clow
                exactly_one = (x0 ^ y0) & ~(x1 | y1 | (x0 & y0))
                dst[y, i] = exactly_one & (low | am)


def _step_words(src: np.ndarray, dst: np.ndarray) -> None:
    if _HAVE_NUMBA:
        _step_words_nb(src, dst)
    else:
        _step_words_np(src, dst)


class PackedGrid:
    """Dense bit-packed grid with an empty margin, regrown as needed.

    The margin guarantee: before each chunk of n generations the live
    region has at least n+2 empty cells on every side, so no per-step
    boundary checks are needed (patterns grow at most one cell per step).
    Horizontal reallocation moves the origin by whole words only, keeping
    bit phase intact.
    """

    _CHUNK = 30

    def __init__(self, live: frozenset[Cell]):
        if not live:
            self.words = np.zeros((4, 2), dtype=np.uint64)
            self.x0 = 0
            self.y0 = 0
            return
        xs = [x for x, _ in live]
        ys = [y for _, y in live]
        pad = self._CHUNK + 4
        self.x0 = min(xs) - pad
        self.y0 = min(ys) - pad
        width_words = (max(xs) - self.x0 + pad + 64) >> 6
        height = max(ys) - self.y0 + pad + 1
        self.words = np.zeros((height, width_words), dtype=np.uint64)
        for x, y in live:
            dx = x - self.x0
            self.words[y - self.y0, dx >> 6] |= np.uint64(1) << np.uint64(dx & 63)

    def _occupied(self) -> Optional[tuple[int, int, int, int]]:
        rows = np.flatnonzero(self.words.any(axis=1))
        if rows.size == 0:
            return None
        cols = np.flatnonzero(self.words.any(axis=0))
        return int(rows[0]), int(rows[-1]), int(cols[0]), int(cols[-1])

    def _ensure_margin(self, n: int) -> bool:
        """Regrow if needed; False when the grid is empty."""
        occ = self._occupied()
        if occ is None:
            return False
        r0, r1, c0, c1 = occ
        h, w = self.words.shape
        need = n + 2  # cells; horizontally one whole word (64) suffices
        if r0 >= need and h - 1 - r1 >= need and c0 >= 1 and w - 1 - c1 >= 1:
            return True
        vpad = need + 34
        wpad = 2
        old = self.words[r0 : r1 + 1, c0 : c1 + 1]
        new = np.zeros(
            (old.shape[0] + 2 * vpad, old.shape[1] + 2 * wpad), dtype=np.uint64
        )
        new[vpad : vpad + old.shape[0], wpad : wpad + old.shape[1]] = old
        self.x0 += (c0 - wpad) << 6
        self.y0 += r0 - vpad
        self.words = new
        return True

    def advance(self, n: int) -> None:
        while n > 0:
            chunk = min(n, self._CHUNK)
            if not self._ensure_margin(chunk):
                return
            buf = np.zeros_like(self.words)
            for _ in range(chunk):
                _step_words(self.words, buf)
                self.words, buf = buf, self.words
            n -= chunk

    def test(self, c: Cell) -> bool:
        x, y = c
        dx = x - self.x0
        dy = y - self.y0
        h, w = self.words.shape
        if dy < 0 or dy >= h or dx < 0 or dx >= (w << 6):
            return False
        return bool((self.words[dy, dx >> 6] >> np.uint64(dx & 63)) & np.uint64(1))

    def live_cells(self) -> frozenset[Cell]:
        import sys

        if sys.byteorder == "big":  # pragma: no cover - big endian only
            byte_view = self.words.byteswap().view(np.uint8)
        else:
            byte_view = self.words.view(np.uint8)
        bits = np.unpackbits(byte_view, axis=1, bitorder="little")
        ys, xs = np.nonzero(bits)
        return frozenset(
            (int(x) + self.x0, int(y) + self.y0) for x, y in zip(xs, ys)
        )


_PACKED_THRESHOLD = 12


def run(u: Universe, n: int) -> Universe:
    """Advance n generations; run(u, 0) is u itself."""
    if n < 0:
        raise ValueError("generation count must be >= 0")
    if n == 0:
        return u
    if n < _PACKED_THRESHOLD:
        live = u.live
        for _ in range(n):
            live = _step_set(live)
        return Universe(live, u.generation + n)
    grid = PackedGrid(u.live)
    grid.advance(n)
    return Universe(grid.live_cells(), u.generation + n)


def states(u: Universe, n: int) -> Iterator[Universe]:
    """Yield u and its next n successors (n+1 universes total)."""
    yield u
    cur = u
    for _ in range(n):
        cur = step(cur)
        yield cur


# ---------------------------------------------------------------------------
# Glider recognition.

GLIDER_HEADINGS: tuple[Cell, ...] = ((1, 1), (-1, 1), (1, -1), (-1, -1))

# Phase 0 of the southeast glider; the other 15 forms are derived below.
_GLIDER_SE = frozenset({(1, 0), (2, 1), (0, 2), (1, 2), (2, 2)})


def _normalize(cells: frozenset[Cell]) -> tuple[frozenset[Cell], Cell]:
    x0 = min(x for x, _ in cells)
    y0 = min(y for _, y in cells)
    return frozenset((x - x0, y - y0) for x, y in cells), (x0, y0)


def _build_glider_tables():
    forms: dict[frozenset[Cell], tuple[Cell, int]] = {}
    by_key: dict[tuple[Cell, int], frozenset[Cell]] = {}
    drift: dict[tuple[Cell, int], Cell] = {}
    for heading in GLIDER_HEADINGS:
        hx, hy = heading
        seed = frozenset((x * hx, y * hy) for x, y in _GLIDER_SE)
        cur, _ = _normalize(seed)
        origin = (0, 0)
        for phase in range(4):
            norm, corner = _normalize(cur)
            if phase == 0:
                origin = corner
            forms[norm] = (heading, phase)
            by_key[(heading, phase)] = norm
            drift[(heading, phase)] = (corner[0] - origin[0], corner[1] - origin[1])
            cur = _step_set(cur)
        norm, corner = _normalize(cur)
        assert norm == by_key[(heading, 0)]
        assert (corner[0] - origin[0], corner[1] - origin[1]) == heading
    assert len(forms) == 16
    return forms, by_key, drift


GLIDER_FORMS, _GLIDER_BY_KEY, GLIDER_DRIFT = _build_glider_tables()


def glider_cells(heading: Cell, phase: int) -> frozenset[Cell]:
    """Normalized cell set of the glider with the given heading and phase."""
    return _GLIDER_BY_KEY[(heading, phase % 4)]


class Glider(NamedTuple):
    position: Cell  # min corner of the normalized 3x3 form
    phase: int
    heading: Cell


def _components(live: frozenset[Cell]) -> Iterator[set[Cell]]:
    seen: set[Cell] = set()
    for start in live:
        if start in seen:
            continue
        comp = {start}
        queue = [start]
        seen.add(start)
        while queue:
            x, y = queue.pop()
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    if dx == 0 and dy == 0:
                        continue
                    nb = (x + dx, y + dy)
                    if nb in live and nb not in seen:
                        seen.add(nb)
                        comp.add(nb)
                        queue.append(nb)
        yield comp


def find_gliders(u: Universe) -> list[Glider]:
    """Detect isolated gliders: 5-cell components matching one of the 16
    glider forms with an empty 1-cell margin (implied by isolation)."""
    found = []
    for comp in _components(u.live):
        if len(comp) != 5:
            continue
        norm, corner = _normalize(frozenset(comp))
        hit = GLIDER_FORMS.get(norm)
        if hit is not None:
            heading, phase = hit
            found.append(Glider(position=corner, phase=phase, heading=heading))
    found.sort(key=lambda g: (g.position[1], g.position[0]))
    return found


class Stabilization(NamedTuple):
    stabilized_at: int
    period: int


def _outbound(g: Glider, box: Optional[tuple[Cell, Cell]]) -> bool:
    if box is None:
        return True
    (bx0, by0), (bx1, by1) = box
    px, py = g.position
    hx, hy = g.heading
    away_x = px > bx1 if hx > 0 else px + 2 < bx0
    away_y = py > by1 if hy > 0 else py + 2 < by0
    return away_x and away_y


def residue(u: Universe) -> frozenset[Cell]:
    """Live cells with strictly outward-bound gliders removed.

    A glider is outward-bound when it lies beyond the bounding box of the
    non-glider cells and is heading away from it on both axes; such a
    glider can never re-enter the box.
    """
    gliders = find_gliders(u)
    if not gliders:
        return u.live
    glider_cells_all = set()
    for g in gliders:
        px, py = g.position
        glider_cells_all.update(
            (px + dx, py + dy) for dx, dy in glider_cells(g.heading, g.phase)
        )
    core = Universe(frozenset(u.live - glider_cells_all))
    box = bounding_box(core)
    stripped = set(u.live)
    for g in gliders:
        if _outbound(g, box):
            px, py = g.position
            for dx, dy in glider_cells(g.heading, g.phase):
                stripped.discard((px + dx, py + dy))
    return frozenset(stripped)


def detect_stabilization(
    u: Universe, max_gen: int, max_period: int
) -> Optional[Stabilization]:
    """First generation G whose glider-stripped residue recurs within
    max_period generations; None if max_gen is reached first.

    Matches found later cannot precede an established G by more than
    max_period generations, so the scan stops max_period generations
    after the best candidate.
    """
    if max_gen <= 0 or max_period < 1:
        raise ValueError("max_gen must be > 0 and max_period >= 1")
    history: deque[tuple[int, frozenset[Cell]]] = deque(maxlen=max_period)
    best: Optional[Stabilization] = None
    cur = u
    for gen in range(max_gen + 1):
        res = residue(cur)
        h = hash(res)
        for back, (old_h, old) in enumerate(reversed(history), start=1):
            if old_h == h and old == res:
                cand = Stabilization(stabilized_at=gen - back, period=back)
                if best is None or cand.stabilized_at < best.stabilized_at:
                    best = cand
        if best is not None and gen >= best.stabilized_at + max_period:
            return best
        history.append((h, res))
        if gen < max_gen:
            cur = step(cur)
    return best
