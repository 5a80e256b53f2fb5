"""Tiles, self-assembling tile systems, scenarios, and bounded enumeration.

A tile is a letter with a label on each border. A tile system pairs a
finite tile set with admissible label sets for external borders (borders
not shared with another occupied cell). A scenario is a tile-valued
word; it is valid when adjacent cells agree on shared border labels and
accepting when every external border carries an admissible label. The
language of a system is the set of letter words obtained by stripping
accepting scenarios.

Enumeration searches an R x C box cell by cell in row-major order,
choosing an allowed tile or leaving the cell empty, pruning on every
decided border. Words are produced directly in normalized position by
requiring row 0 and column 0 to be occupied. The search space splits
into independent partitions by the first cell's choice, so runs can fan
out over processes and still merge deterministically in partition
order.

Labels are strings throughout. The two-color notation packs a 2-label
system into hex digits: tile digit d has borders (w, n, e, s) spelled
by the bits of d from high to low, and the optional trailing digit
fixes the single admissible external label per direction the same way.
"""

from __future__ import annotations

import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Optional, Sequence, Union

from .grid import (
    Bounds,
    Budget,
    BudgetExhausted,
    Pos,
    Word,
    normalize,
    render_ascii,
    word_sort_key,
)

_EMPTY = -1


def _good_symbol(s: object) -> bool:
    return (
        isinstance(s, str)
        and len(s) == 1
        and s.isprintable()
        and not s.isspace()
        and s != "."
    )


@dataclass(frozen=True)
class Tile:
    """A letter with west, north, east, south border labels."""

    letter: str
    west: str
    north: str
    east: str
    south: str

    def __post_init__(self) -> None:
        if not _good_symbol(self.letter):
            raise ValueError(f"bad tile letter {self.letter!r}")
        for side in (self.west, self.north, self.east, self.south):
            if not isinstance(side, str) or not side or any(
                ch.isspace() or ch in "{},=" for ch in side
            ):
                raise ValueError(f"bad border label {side!r}")

    def key(self) -> tuple[str, str, str, str, str]:
        return (self.letter, self.west, self.north, self.east, self.south)


@dataclass(frozen=True)
class TileSystem:
    """A self-assembling tile system: tiles plus external label sets."""

    tiles: tuple[Tile, ...]
    external_west: frozenset[str]
    external_north: frozenset[str]
    external_east: frozenset[str]
    external_south: frozenset[str]

    def __post_init__(self) -> None:
        if not self.tiles:
            raise ValueError("a tile system needs at least one tile")
        ordered = tuple(sorted(set(self.tiles), key=Tile.key))
        object.__setattr__(self, "tiles", ordered)
        for name in ("external_west", "external_north", "external_east", "external_south"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))

    @cached_property
    def letters(self) -> frozenset[str]:
        return frozenset(t.letter for t in self.tiles)

    @cached_property
    def tiles_by_letter(self) -> dict[str, tuple[Tile, ...]]:
        out: dict[str, list[Tile]] = {}
        for t in self.tiles:
            out.setdefault(t.letter, []).append(t)
        return {k: tuple(v) for k, v in out.items()}


@dataclass(frozen=True)
class Scenario:
    """A tile-valued word; validity and acceptance are separate checks."""

    cells: tuple[tuple[int, int, Tile], ...]

    def __post_init__(self) -> None:
        cells = tuple(sorted(self.cells, key=lambda c: (c[0], c[1])))
        if not cells:
            raise ValueError("a scenario needs at least one cell")
        seen: set[Pos] = set()
        for r, c, tile in cells:
            if not isinstance(r, int) or not isinstance(c, int):
                raise ValueError(f"cell position must be integral: ({r!r}, {c!r})")
            if not isinstance(tile, Tile):
                raise ValueError(f"not a tile: {tile!r}")
            if (r, c) in seen:
                raise ValueError(f"duplicate cell at ({r}, {c})")
            seen.add((r, c))
        object.__setattr__(self, "cells", cells)

    @cached_property
    def tile_map(self) -> dict[Pos, Tile]:
        return {(r, c): tile for r, c, tile in self.cells}

    @cached_property
    def positions(self) -> frozenset[Pos]:
        return frozenset((r, c) for r, c, _ in self.cells)

    @cached_property
    def bbox(self) -> tuple[int, int, int, int]:
        rows = [r for r, _, _ in self.cells]
        cols = [c for _, c, _ in self.cells]
        return (min(rows), min(cols), max(rows), max(cols))

    @property
    def height(self) -> int:
        return self.bbox[2] - self.bbox[0] + 1

    @property
    def width(self) -> int:
        return self.bbox[3] - self.bbox[1] + 1

    def __len__(self) -> int:
        return len(self.cells)


def translate_scenario(s: Scenario, dr: int, dc: int) -> Scenario:
    return Scenario(tuple((r + dr, c + dc, t) for r, c, t in s.cells))


def normalize_scenario(s: Scenario) -> Scenario:
    r0, c0, _, _ = s.bbox
    if r0 == 0 and c0 == 0:
        return s
    return translate_scenario(s, -r0, -c0)


def strip(s: Scenario) -> Word:
    """Forget border labels, keeping positions and letters."""
    return Word(tuple((r, c, t.letter) for r, c, t in s.cells))


# ---------------------------------------------------------------------------
# Two-color notation and the tile-system text format


_TWO_COLOR = re.compile(r"^F([0-9a-f]+)(?:\.([0-9a-f]))?$")


def parse_two_color(text: str) -> TileSystem:
    """Parse the compact hex notation for 2-label systems."""
    m = _TWO_COLOR.match(text.strip())
    if not m:
        raise ValueError(
            f"bad two-color notation {text!r}: expected F<hex digits>[.<hex digit>]"
        )
    digits, zpart = m.group(1), m.group(2)
    seen: set[str] = set()
    tiles: list[Tile] = []
    for ch in digits:
        if ch in seen:
            raise ValueError(f"duplicate tile digit {ch!r} in {text!r}")
        seen.add(ch)
        d = int(ch, 16)
        w, n, e, s = (str((d >> k) & 1) for k in (3, 2, 1, 0))
        tiles.append(Tile(ch, w, n, e, s))
    if zpart is None:
        both = frozenset({"0", "1"})
        ext = (both, both, both, both)
    else:
        z = int(zpart, 16)
        ext = tuple(frozenset({str((z >> k) & 1)}) for k in (3, 2, 1, 0))
    return TileSystem(tuple(tiles), *ext)


def _format_label_set(labels: frozenset[str]) -> str:
    return "{" + ",".join(sorted(labels)) + "}"


def format_tile_system(f: TileSystem) -> str:
    lines = [
        f"tile {t.letter} w={t.west} n={t.north} e={t.east} s={t.south}"
        for t in f.tiles
    ]
    lines.append(
        "accept w=%s n=%s e=%s s=%s"
        % (
            _format_label_set(f.external_west),
            _format_label_set(f.external_north),
            _format_label_set(f.external_east),
            _format_label_set(f.external_south),
        )
    )
    return "\n".join(lines) + "\n"


_TILE_LINE = re.compile(
    r"^tile\s+(\S)\s+w=(\S+)\s+n=(\S+)\s+e=(\S+)\s+s=(\S+)$"
)
_ACCEPT_LINE = re.compile(
    r"^accept\s+w=\{([^}]*)\}\s+n=\{([^}]*)\}\s+e=\{([^}]*)\}\s+s=\{([^}]*)\}$"
)


def _parse_label_set(body: str) -> frozenset[str]:
    body = body.strip()
    if not body:
        return frozenset()
    return frozenset(part.strip() for part in body.split(","))


def parse_tile_system(text: str) -> TileSystem:
    """Parse either tile/accept lines or a single "sats F..." line."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("--", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ValueError("empty tile system text")
    if len(lines) == 1 and lines[0].startswith("sats"):
        return parse_two_color(lines[0][4:].strip())
    tiles: list[Tile] = []
    externals: Optional[tuple[frozenset[str], ...]] = None
    for line in lines:
        m = _TILE_LINE.match(line)
        if m:
            tiles.append(Tile(*m.groups()))
            continue
        m = _ACCEPT_LINE.match(line)
        if m:
            if externals is not None:
                raise ValueError("multiple accept lines")
            externals = tuple(_parse_label_set(g) for g in m.groups())
            continue
        raise ValueError(f"unrecognized tile system line: {line!r}")
    if not tiles:
        raise ValueError("tile system text declares no tiles")
    if externals is None:
        raise ValueError("tile system text lacks an accept line")
    return TileSystem(tuple(tiles), *externals)


# ---------------------------------------------------------------------------
# Validity and acceptance


def scenario_valid(tiles: Union[TileSystem, Iterable[Tile]], s: Scenario) -> bool:
    """Tiles all belong to the set and shared borders agree."""
    tileset = set(tiles.tiles if isinstance(tiles, TileSystem) else tiles)
    tmap = s.tile_map
    for (r, c), t in tmap.items():
        if t not in tileset:
            return False
        east = tmap.get((r, c + 1))
        if east is not None and t.east != east.west:
            return False
        south = tmap.get((r + 1, c))
        if south is not None and t.south != south.north:
            return False
    return True


def accepting(f: TileSystem, s: Scenario) -> bool:
    """Every external border label is admissible for its direction."""
    tmap = s.tile_map
    for (r, c), t in tmap.items():
        if (r, c - 1) not in tmap and t.west not in f.external_west:
            return False
        if (r - 1, c) not in tmap and t.north not in f.external_north:
            return False
        if (r, c + 1) not in tmap and t.east not in f.external_east:
            return False
        if (r + 1, c) not in tmap and t.south not in f.external_south:
            return False
    return True


def word_accepted(f: TileSystem, w: Word) -> bool:
    """Some accepting scenario of f strips to this word.

    Backtracking over letter-matching tiles, constraint-checked cell by
    cell in row-major order; borders facing unoccupied positions must be
    externally admissible.
    """
    w = normalize(w)
    cells = w.cells
    occ = w.positions
    by_letter = f.tiles_by_letter
    assigned: dict[Pos, Tile] = {}

    def fits(r: int, c: int, t: Tile) -> bool:
        west = assigned.get((r, c - 1))
        if west is not None:
            if west.east != t.west:
                return False
        elif (r, c - 1) not in occ and t.west not in f.external_west:
            return False
        north = assigned.get((r - 1, c))
        if north is not None:
            if north.south != t.north:
                return False
        elif (r - 1, c) not in occ and t.north not in f.external_north:
            return False
        if (r, c + 1) not in occ and t.east not in f.external_east:
            return False
        if (r + 1, c) not in occ and t.south not in f.external_south:
            return False
        return True

    def rec(i: int) -> bool:
        if i == len(cells):
            return True
        r, c, letter = cells[i]
        for t in by_letter.get(letter, ()):
            if fits(r, c, t):
                assigned[(r, c)] = t
                if rec(i + 1):
                    return True
                del assigned[(r, c)]
        return False

    return rec(0)


# ---------------------------------------------------------------------------
# Scenario composition


def scenario_compose(v: Scenario, w: Scenario) -> frozenset[Scenario]:
    """All joint placements with point contact, no overlap, agreeing borders."""
    v = normalize_scenario(v)
    w = normalize_scenario(w)
    vmap = v.tile_map
    inflated = {
        (r + dr, c + dc)
        for r, c in v.positions
        for dr in (-1, 0, 1)
        for dc in (-1, 0, 1)
    }
    out: set[Scenario] = set()
    for dr in range(-w.height, v.height + 1):
        for dc in range(-w.width, v.width + 1):
            placed = [(r + dr, c + dc, t) for r, c, t in w.cells]
            if any((r, c) in vmap for r, c, _ in placed):
                continue
            if not any((r, c) in inflated for r, c, _ in placed):
                continue
            ok = True
            for r, c, t in placed:
                east = vmap.get((r, c + 1))
                if east is not None and t.east != east.west:
                    ok = False
                    break
                west = vmap.get((r, c - 1))
                if west is not None and west.east != t.west:
                    ok = False
                    break
                south = vmap.get((r + 1, c))
                if south is not None and t.south != south.north:
                    ok = False
                    break
                north = vmap.get((r - 1, c))
                if north is not None and north.south != t.north:
                    ok = False
                    break
            if ok:
                out.add(normalize_scenario(Scenario(v.cells + tuple(placed))))
    return frozenset(out)


# ---------------------------------------------------------------------------
# Bounded enumeration


class _SearchTables:
    """Pruning tables for the row-major box search."""

    def __init__(self, f: TileSystem):
        tiles = f.tiles
        self.tiles = tiles
        self.letters = tuple(t.letter for t in tiles)
        self.east = tuple(t.east for t in tiles)
        self.south = tuple(t.south for t in tiles)
        self.e_ok = tuple(t.east in f.external_east for t in tiles)
        self.s_ok = tuple(t.south in f.external_south for t in tiles)
        west_states: list[Optional[str]] = [None]
        west_states += sorted({t.east for t in tiles})
        north_states: list[Optional[str]] = [None]
        north_states += sorted({t.south for t in tiles})
        allowed: dict[tuple[Optional[str], Optional[str]], tuple[int, ...]] = {}
        for ws in west_states:
            for ns in north_states:
                allowed[(ws, ns)] = tuple(
                    i
                    for i, t in enumerate(tiles)
                    if (t.west in f.external_west if ws is None else t.west == ws)
                    and (t.north in f.external_north if ns is None else t.north == ns)
                )
        self.allowed = allowed


def _first_choices(f: TileSystem, bounds: Bounds) -> list[int]:
    """Choices for cell (0, 0): viable tile indices, then empty."""
    tables = _SearchTables(f)
    r_last = bounds.max_rows == 1
    c_last = bounds.max_cols == 1
    out = [
        i
        for i in tables.allowed[(None, None)]
        if (not c_last or tables.e_ok[i]) and (not r_last or tables.s_ok[i])
    ]
    out.append(_EMPTY)
    return out


def _search_partition(
    f: TileSystem,
    bounds: Bounds,
    first: int,
    node_limit: int,
    emit: Callable[[tuple[tuple[int, int, int], ...]], None],
) -> bool:
    """Run one first-cell branch; emit(occupied cells with tile indices).

    Returns True when the branch was fully explored, False when the node
    limit ran out.
    """
    tables = _SearchTables(f)
    rows, cols, max_cells = bounds.max_rows, bounds.max_cols, bounds.max_cells
    total = rows * cols
    assign = [_EMPTY] * total
    state = {"count": 0, "row0": 0, "col0": 0, "nodes": node_limit}

    def charge() -> None:
        state["nodes"] -= 1
        if state["nodes"] < 0:
            raise BudgetExhausted("enumeration node budget exhausted")

    def place(k: int, r: int, c: int, ti: int) -> None:
        assign[k] = ti
        state["count"] += 1
        if r == 0:
            state["row0"] += 1
        if c == 0:
            state["col0"] += 1

    def unplace(k: int, r: int, c: int) -> None:
        assign[k] = _EMPTY
        state["count"] -= 1
        if r == 0:
            state["row0"] -= 1
        if c == 0:
            state["col0"] -= 1

    def rec(k: int) -> None:
        if k == total:
            if state["row0"] and state["col0"]:
                emit(
                    tuple(
                        (i // cols, i % cols, ti)
                        for i, ti in enumerate(assign)
                        if ti != _EMPTY
                    )
                )
            return
        r, c = divmod(k, cols)
        # A normalized word occupies row 0 somewhere.
        if r == 1 and c == 0 and not state["row0"]:
            return
        ws = None
        if c > 0 and assign[k - 1] != _EMPTY:
            ws = tables.east[assign[k - 1]]
        ns = None
        if r > 0 and assign[k - cols] != _EMPTY:
            ns = tables.south[assign[k - cols]]
        if state["count"] < max_cells:
            for ti in tables.allowed[(ws, ns)]:
                charge()
                if c == cols - 1 and not tables.e_ok[ti]:
                    continue
                if r == rows - 1 and not tables.s_ok[ti]:
                    continue
                place(k, r, c, ti)
                rec(k + 1)
                unplace(k, r, c)
        # The empty choice: borders facing this cell become external.
        charge()
        if r == rows - 1 and c == 0 and not state["col0"]:
            return  # column 0 must be occupied somewhere
        if ws is not None and not tables.e_ok[assign[k - 1]]:
            return
        if ns is not None and not tables.s_ok[assign[k - cols]]:
            return
        rec(k + 1)

    try:
        if first == _EMPTY:
            # Leaving (0, 0) empty is out when it is the only column-0 cell.
            if rows > 1:
                rec(1)
        else:
            viable = first in tables.allowed[(None, None)] and max_cells >= 1
            if cols == 1 and not tables.e_ok[first]:
                viable = False
            if rows == 1 and not tables.s_ok[first]:
                viable = False
            if viable:
                place(0, 0, 0, first)
                rec(1)
                unplace(0, 0, 0)
    except BudgetExhausted:
        return False
    return True


def _emit_word(f: TileSystem, cells: tuple[tuple[int, int, int], ...]) -> Word:
    return Word(tuple((r, c, f.tiles[ti].letter) for r, c, ti in cells))


def _emit_scenario(f: TileSystem, cells: tuple[tuple[int, int, int], ...]) -> Scenario:
    return Scenario(tuple((r, c, f.tiles[ti]) for r, c, ti in cells))


def _partition_budget(bounds: Bounds, n_partitions: int) -> int:
    return max(1, bounds.node_budget // max(1, n_partitions))


def _enum_worker(args) -> tuple[frozenset[Word], bool]:
    f, bounds, first, limit = args
    out: set[Word] = set()
    complete = _search_partition(
        f, bounds, first, limit, lambda cells: out.add(_emit_word(f, cells))
    )
    return frozenset(out), complete


def _witness_worker(args) -> tuple[list[tuple[Word, Scenario]], bool]:
    f, bounds, first, limit = args
    seen: dict[Word, Scenario] = {}

    def keep(cells):
        w = _emit_word(f, cells)
        if w not in seen:
            seen[w] = _emit_scenario(f, cells)

    complete = _search_partition(f, bounds, first, limit, keep)
    return list(seen.items()), complete


class _EnoughWitnesses(Exception):
    """Internal signal: a witness search collected all it needs."""


def _miss_witness_worker(args) -> tuple[list[Word], bool]:
    f, bounds, first, limit, expected, max_witnesses = args
    witnesses: list[Word] = []

    def check(cells):
        w = _emit_word(f, cells)
        if w not in expected:
            witnesses.append(w)
            if len(witnesses) >= max_witnesses:
                raise _EnoughWitnesses()

    try:
        complete = _search_partition(f, bounds, first, limit, check)
    except _EnoughWitnesses:
        complete = True
    return witnesses, complete


def _run_partitions(worker, args_list: list, jobs: int) -> list:
    if jobs <= 1 or len(args_list) <= 1:
        return [worker(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=min(jobs, len(args_list))) as pool:
        return list(pool.map(worker, args_list))


def enumerate_language(f: TileSystem, bounds: Bounds, jobs: int = 1) -> frozenset[Word]:
    """All normalized words of accepting scenarios within the bounds."""
    firsts = _first_choices(f, bounds)
    limit = _partition_budget(bounds, len(firsts))
    results = _run_partitions(
        _enum_worker, [(f, bounds, first, limit) for first in firsts], jobs
    )
    merged: set[Word] = set()
    exhausted = False
    for words, complete in results:
        merged |= words
        exhausted = exhausted or not complete
    if exhausted:
        raise BudgetExhausted(
            "enumeration node budget exhausted", partial=frozenset(merged)
        )
    return frozenset(merged)


def enumerate_scenarios(
    f: TileSystem, bounds: Bounds, jobs: int = 1
) -> dict[Word, Scenario]:
    """Like enumerate_language, retaining one witness scenario per word.

    The witness is the first accepting scenario in search order, which
    does not depend on the jobs setting. Materializes everything; meant
    for small bounds.
    """
    firsts = _first_choices(f, bounds)
    limit = _partition_budget(bounds, len(firsts))
    results = _run_partitions(
        _witness_worker, [(f, bounds, first, limit) for first in firsts], jobs
    )
    merged: dict[Word, Scenario] = {}
    exhausted = False
    for items, complete in results:
        for word, scen in items:
            merged.setdefault(word, scen)
        exhausted = exhausted or not complete
    if exhausted:
        raise BudgetExhausted("enumeration node budget exhausted", partial=merged)
    return merged


def count_language(f: TileSystem, bounds: Bounds) -> int:
    """Exact number of words in the system's language within the bounds.

    Dynamic programming over the same row-major cell order as the
    enumeration, so it agrees with enumerate_language on every input but
    never materializes the words. One layer state is (cells used, row-0
    occupied, column-0 occupied, reachable border profiles), where a
    border profile records the south label facing each column of the
    frontier plus the east label facing the next cell. Keeping the SET
    of reachable profiles per state counts a letter word once even when
    several tile assignments realize it.

    Charges bounds.node_budget one unit per state transition; raises
    BudgetExhausted if the profile sets degenerate into too many states.
    """
    rows, cols, max_cells = bounds.max_rows, bounds.max_cols, bounds.max_cells
    ext_w, ext_n = f.external_west, f.external_north
    ext_e, ext_s = f.external_east, f.external_south
    groups = tuple((letter, f.tiles_by_letter[letter]) for letter in f.letters)
    budget = Budget(bounds.node_budget)

    Profile = tuple  # (south labels per column, east label), None = open
    start: tuple[int, bool, bool, frozenset[Profile]]
    start = (0, False, False, frozenset({((None,) * cols, None)}))
    states: dict[tuple[int, bool, bool, frozenset[Profile]], int] = {start: 1}

    for k in range(rows * cols):
        r, c = divmod(k, cols)
        if r == 1 and c == 0:
            # A normalized word occupies row 0 somewhere.
            states = {key: m for key, m in states.items() if key[1]}
        last_row = r == rows - 1
        last_col = c == cols - 1
        nxt: dict[tuple[int, bool, bool, frozenset[Profile]], int] = {}
        for (cnt, row0, col0, profiles), mult in states.items():
            if cnt < max_cells:
                for letter, group in groups:
                    budget.charge()
                    reached = set()
                    for fronts, east in profiles:
                        ns = fronts[c]
                        for t in group:
                            if east is None:
                                if t.west not in ext_w:
                                    continue
                            elif t.west != east:
                                continue
                            if ns is None:
                                if t.north not in ext_n:
                                    continue
                            elif t.north != ns:
                                continue
                            if last_col and t.east not in ext_e:
                                continue
                            if last_row and t.south not in ext_s:
                                continue
                            nf = fronts[:c] + (t.south,) + fronts[c + 1 :]
                            reached.add((nf, None if last_col else t.east))
                    if reached:
                        key = (cnt + 1, row0 or r == 0, col0 or c == 0,
                               frozenset(reached))
                        nxt[key] = nxt.get(key, 0) + mult
            # The empty choice: borders facing this cell become external.
            budget.charge()
            if last_row and c == 0 and not col0:
                continue  # column 0 must be occupied somewhere
            reached = set()
            for fronts, east in profiles:
                if east is not None and east not in ext_e:
                    continue
                ns = fronts[c]
                if ns is not None and ns not in ext_s:
                    continue
                nf = fronts[:c] + (None,) + fronts[c + 1 :]
                reached.add((nf, None))
            if reached:
                key = (cnt, row0, col0, frozenset(reached))
                nxt[key] = nxt.get(key, 0) + mult
        states = nxt
    return sum(m for (cnt, row0, col0, _), m in states.items()
               if cnt and row0 and col0)


# ---------------------------------------------------------------------------
# Language comparison


@dataclass(frozen=True)
class LanguageDiff:
    """Two-sided comparison with counts and bounded witness lists."""

    left_total: int
    right_total: int
    common: int
    only_left_count: int
    only_left: tuple[Word, ...]
    only_right_count: int
    only_right: tuple[Word, ...]

    @property
    def equal(self) -> bool:
        return self.only_left_count == 0 and self.only_right_count == 0


def diff_against_language(
    f: TileSystem,
    bounds: Bounds,
    words: Iterable[Word],
    max_witnesses: int = 10,
    jobs: int = 1,
) -> LanguageDiff:
    """Compare a finite word set (left) against the system language (right).

    The system language is never materialized: its size comes from
    count_language, membership of each left word from word_accepted, and
    the first `max_witnesses` right-only words in search order from an
    enumeration that stops early once each partition has enough. Left
    witnesses are reported in sorted word order, right witnesses in
    search order; neither depends on the jobs setting.
    """
    expected = frozenset(normalize(w) for w in words)
    only_left = sorted(
        (
            w
            for w in expected
            if not (bounds.admits(w) and word_accepted(f, w))
        ),
        key=word_sort_key,
    )
    common = len(expected) - len(only_left)
    right_total = count_language(f, bounds)
    witnesses: list[Word] = []
    if max_witnesses > 0 and right_total > common:
        firsts = _first_choices(f, bounds)
        limit = _partition_budget(bounds, len(firsts))
        results = _run_partitions(
            _miss_witness_worker,
            [(f, bounds, first, limit, expected, max_witnesses) for first in firsts],
            jobs,
        )
        exhausted = False
        for part_wits, complete in results:
            if len(witnesses) < max_witnesses:
                witnesses.extend(part_wits[: max_witnesses - len(witnesses)])
            exhausted = exhausted or not complete
        if exhausted:
            raise BudgetExhausted("enumeration node budget exhausted")
    return LanguageDiff(
        left_total=len(expected),
        right_total=right_total,
        common=common,
        only_left_count=len(only_left),
        only_left=tuple(only_left[:max_witnesses]),
        only_right_count=right_total - common,
        only_right=tuple(witnesses),
    )


def format_language_diff(
    diff: LanguageDiff, left_name: str = "A", right_name: str = "B"
) -> str:
    lines = [
        f"{left_name}: {diff.left_total} words",
        f"{right_name}: {diff.right_total} words",
        f"common: {diff.common}",
        f"only in {left_name}: {diff.only_left_count}",
    ]
    for i, w in enumerate(diff.only_left, 1):
        lines.append(f"-- {left_name} witness {i}")
        lines.append(render_ascii(w))
    lines.append(f"only in {right_name}: {diff.only_right_count}")
    for i, w in enumerate(diff.only_right, 1):
        lines.append(f"-- {right_name} witness {i}")
        lines.append(render_ascii(w))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Projection to a finite automaton


@dataclass(frozen=True)
class Nfa:
    """Nondeterministic automaton over tile letters."""

    states: tuple[str, ...]
    initial: frozenset[str]
    accepting: frozenset[str]
    transitions: tuple[tuple[str, str, str], ...]

    @cached_property
    def _step(self) -> dict[tuple[str, str], frozenset[str]]:
        out: dict[tuple[str, str], set[str]] = {}
        for src, letter, dst in self.transitions:
            out.setdefault((src, letter), set()).add(dst)
        return {k: frozenset(v) for k, v in out.items()}

    def accepts(self, s: str) -> bool:
        current = set(self.initial)
        for letter in s:
            nxt: set[str] = set()
            for state in current:
                nxt |= self._step.get((state, letter), frozenset())
            current = nxt
            if not current:
                return False
        return bool(current & self.accepting)

    def words_up_to(self, n: int) -> frozenset[str]:
        """All non-empty accepted strings of length at most n."""
        letters = sorted({letter for _, letter, _ in self.transitions})
        out: set[str] = set()

        def walk(prefix: str, current: frozenset[str]) -> None:
            if len(prefix) >= n:
                return
            for letter in letters:
                nxt: set[str] = set()
                for state in current:
                    nxt |= self._step.get((state, letter), frozenset())
                if not nxt:
                    continue
                word = prefix + letter
                if nxt & self.accepting:
                    out.add(word)
                walk(word, frozenset(nxt))

        walk("", frozenset(self.initial))
        return frozenset(out)


def project_to_nfa(f: TileSystem) -> Nfa:
    """Vertical projection for systems whose rows cannot grow.

    Precondition, checked: every tile has west != east, and no chain of
    east-west matches can connect a west-admissible tile to an
    east-admissible one across two or more columns. Accepted columns are
    then independent, and contiguous single-column words correspond
    exactly to automaton words read north to south.
    """
    for t in f.tiles:
        if t.west == t.east:
            raise ValueError(
                f"projection precondition violated: tile {t.letter} has the "
                f"same label {t.west!r} on west and east"
            )
    left_ok = {t for t in f.tiles if t.west in f.external_west}
    grew = True
    while grew:
        grew = False
        for t in f.tiles:
            if t not in left_ok and any(s.east == t.west for s in left_ok):
                left_ok.add(t)
                grew = True
    right_ok = {t for t in f.tiles if t.east in f.external_east}
    grew = True
    while grew:
        grew = False
        for t in f.tiles:
            if t not in right_ok and any(t.east == s.west for s in right_ok):
                right_ok.add(t)
                grew = True
    for t1 in sorted(left_ok, key=Tile.key):
        for t2 in sorted(right_ok, key=Tile.key):
            if t1.east == t2.west:
                raise ValueError(
                    "projection precondition violated: west/east labels let "
                    f"tiles {t1.letter} and {t2.letter} sit side by side"
                )
    transitions = sorted(
        {
            (t.north, t.letter, t.south)
            for t in f.tiles
            if t.west in f.external_west and t.east in f.external_east
        }
    )
    states = sorted(
        {t.north for t in f.tiles}
        | {t.south for t in f.tiles}
        | f.external_north
        | f.external_south
    )
    return Nfa(
        states=tuple(states),
        initial=f.external_north,
        accepting=f.external_south,
        transitions=tuple(transitions),
    )


def column_strings(words: Iterable[Word]) -> frozenset[str]:
    """North-to-south letter strings of contiguous single-column words."""
    out: set[str] = set()
    for w in words:
        w = normalize(w)
        if w.width != 1:
            continue
        if w.height != len(w):
            continue  # vertical gaps: a stack of shorter columns, skip
        out.add("".join(letter for _, _, letter in w.cells))
    return frozenset(out)


# ---------------------------------------------------------------------------
# Record output


def scenario_records(s: Scenario) -> list[dict[str, object]]:
    return [
        {
            "row": r,
            "col": c,
            "letter": t.letter,
            "w": t.west,
            "n": t.north,
            "e": t.east,
            "s": t.south,
        }
        for r, c, t in s.cells
    ]
