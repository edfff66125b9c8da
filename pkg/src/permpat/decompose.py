"""Building and checking bounded-width merge decompositions.

The builder keeps a coarse gridding of the plane (columns and rows of at
most d point-ranks each) and repeatedly merges two rectangles sharing a
cell, re-coarsening adjacent under-full lines so the gridding cannot
fragment.  Either everything collapses into one rectangle — giving a full
merge sequence in which every new rectangle sees fewer than d others per
axis — or every cell holds exactly one rectangle while at least two
remain, in which case the cell occupancy pattern is dense enough for the
grid finder and the permutation contains the canonical r x r grid pattern.

``verify_wide`` / ``width_of_decomposition`` replay a sequence with four
Fenwick trees (one per interval endpoint per axis), so checking a claimed
width costs O(n log n) regardless of how wide the rectangles get.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple, Union

from .core import (
    GridWitness,
    MergeSequence,
    MergeStep,
    Permutation,
    Point,
    ValidationError,
    validate_merge_sequence,
    verify_grid,
)
from .griddetect import PointSet, f_bound, find_grid


@dataclass(frozen=True)
class DecompositionResult:
    """Outcome of build_decomposition: exactly one of ``seq`` (a complete
    merge sequence, d-wide for ``width_bound`` = d) or ``grid`` (an r x r
    grid witness in the permutation's original coordinates)."""

    seq: Optional[MergeSequence]
    grid: Optional[GridWitness]
    width_bound: Optional[int]

    def __post_init__(self):
        if (self.seq is None) == (self.grid is None):
            raise ValidationError("result must carry exactly one of seq/grid")

    @property
    def is_grid(self) -> bool:
        return self.grid is not None


def _require_original_labels(perm: Permutation) -> None:
    n = len(perm)
    if perm.labels != tuple(range(1, n + 1)):
        raise ValidationError("merge sequences address original labels 1..n; "
                              "reduce the permutation first")


# ---------------------------------------------------------------------------
# replay verification
# ---------------------------------------------------------------------------

def _replay_views(perm: Permutation, seq: MergeSequence) -> Iterator[Tuple[int, int, int]]:
    """Yield (step number, x-views, y-views) of each newly created
    rectangle, counted against the rectangles alive alongside it."""
    n = len(perm)
    _require_original_labels(perm)
    validate_merge_sequence(seq, n)
    if n == 0:
        return

    # rank coordinates; intersection tests only care about relative order
    xr = [0] * (n + 1)
    yr = [0] * (n + 1)
    for l in perm.labels:
        xr[l] = perm.xrank(l)
        yr[l] = perm.yrank(l)

    top = n + len(seq)
    bx1 = [0] * (top + 1)
    bx2 = [0] * (top + 1)
    by1 = [0] * (top + 1)
    by2 = [0] * (top + 1)
    for l in range(1, n + 1):
        bx1[l] = bx2[l] = xr[l]
        by1[l] = by2[l] = yr[l]

    # four Fenwick trees over rank space: one per endpoint per axis.
    # t[i] covers a block of i & -i positions; building from the all-ones
    # multiset (every rank occupied once) gives t[i] = i & -i directly.
    hix = [0] + [i & -i for i in range(1, n + 1)]
    lox = hix[:]
    hiy = hix[:]
    loy = hix[:]

    def add(tree: List[int], i: int, v: int) -> None:
        while i <= n:
            tree[i] += v
            i += i & -i

    def pref(tree: List[int], i: int) -> int:
        s = 0
        while i > 0:
            s += tree[i]
            i -= i & -i
        return s

    live = n
    for p, (i, j, k) in enumerate(seq, 1):
        add(hix, bx2[i], -1); add(lox, bx1[i], -1)
        add(hiy, by2[i], -1); add(loy, by1[i], -1)
        add(hix, bx2[j], -1); add(lox, bx1[j], -1)
        add(hiy, by2[j], -1); add(loy, by1[j], -1)
        nx1 = bx1[i] if bx1[i] < bx1[j] else bx1[j]
        nx2 = bx2[i] if bx2[i] > bx2[j] else bx2[j]
        ny1 = by1[i] if by1[i] < by1[j] else by1[j]
        ny2 = by2[i] if by2[i] > by2[j] else by2[j]
        bx1[k] = nx1; bx2[k] = nx2; by1[k] = ny1; by2[k] = ny2
        others = live - 2
        # rectangles NOT x-viewing k either end left of k or start right of k
        v1 = others - pref(hix, nx1 - 1) - (others - pref(lox, nx2))
        v2 = others - pref(hiy, ny1 - 1) - (others - pref(loy, ny2))
        add(hix, nx2, 1); add(lox, nx1, 1)
        add(hiy, ny2, 1); add(loy, ny1, 1)
        live -= 1
        yield p, v1, v2


def replay_view_counts(perm: Permutation, seq: MergeSequence) -> List[int]:
    """Per-step view count max(x-views, y-views) of each new rectangle."""
    return [v1 if v1 >= v2 else v2 for _, v1, v2 in _replay_views(perm, seq)]


def width_of_decomposition(perm: Permutation, seq: MergeSequence) -> int:
    """Exact width of a merge sequence: one more than the largest view
    count over all created rectangles (1 for empty/singleton input)."""
    best = 0
    for _, v1, v2 in _replay_views(perm, seq):
        v = v1 if v1 >= v2 else v2
        if v > best:
            best = v
    return best + 1


def verify_wide(perm: Permutation, seq: MergeSequence, d: int) -> bool:
    """True iff every rectangle the sequence creates has fewer than d
    same-axis viewers among the rectangles alive with it (the starting
    point-rectangles always qualify for d >= 1)."""
    if d < 1:
        return False
    for _, v1, v2 in _replay_views(perm, seq):
        if v1 >= d or v2 >= d:
            return False
    return True


def first_violation(perm: Permutation, seq: MergeSequence, d: int) -> Optional[Tuple[int, int]]:
    """(step number, offending view count) of the first step whose new
    rectangle reaches d viewers on some axis; None when d-wide."""
    for p, v1, v2 in _replay_views(perm, seq):
        v = v1 if v1 >= v2 else v2
        if v >= d:
            return (p, v)
    return None


# ---------------------------------------------------------------------------
# the builder
# ---------------------------------------------------------------------------

class _Cell:
    __slots__ = ("col", "row", "rects")

    def __init__(self, col: "_Line", row: "_Line"):
        self.col = col
        self.row = row
        self.rects: List[int] = []


class _Line:
    """A gridding column or row: its size (rectangle count), original
    coordinate span, cells keyed by the crossing line, and neighbor links."""

    __slots__ = ("size", "lo", "hi", "cells", "prv", "nxt")

    def __init__(self) -> None:
        self.size = 0
        self.lo = 0
        self.hi = 0
        self.cells: Dict["_Line", _Cell] = {}
        self.prv: Optional["_Line"] = None
        self.nxt: Optional["_Line"] = None


class _State:
    __slots__ = ("n", "d", "total", "cols_head", "rows_head", "large",
                 "rep", "steps", "validate", "boxes")

    def __init__(self, n: int, d: int, validate: bool):
        self.n = n
        self.d = d
        self.total = n
        self.cols_head: Optional[_Line] = None
        self.rows_head: Optional[_Line] = None
        self.large: Dict[_Cell, None] = {}
        self.rep: List[int] = list(range(n + 1))  # min original label per index
        self.steps: List[MergeStep] = []
        self.validate = validate
        self.boxes: Dict[int, Tuple[int, int, int, int]] = {}


def _lines(head: Optional[_Line]) -> List[_Line]:
    out = []
    while head is not None:
        out.append(head)
        head = head.nxt
    return out


def _build_state(perm: Permutation, d: int, validate: bool = False) -> _State:
    n = len(perm)
    state = _State(n, d, validate)
    if n == 0:
        return state
    p = (n + d - 1) // d
    q = p
    cols = [_Line() for _ in range(p)]
    rows = [_Line() for _ in range(q)]
    for lines in (cols, rows):
        for a, b in zip(lines, lines[1:]):
            a.nxt = b
            b.prv = a
    state.cols_head = cols[0]
    state.rows_head = rows[0]

    by_x = perm.by_x()
    for pos, label in enumerate(by_x):
        pt = perm.point(label)
        col = cols[pos // d]
        row = rows[(perm.yrank(label) - 1) // d]
        cell = col.cells.get(row)
        if cell is None:
            cell = _Cell(col, row)
            col.cells[row] = cell
            row.cells[col] = cell
        cell.rects.append(label)
        if len(cell.rects) == 2:
            state.large[cell] = None
        col.size += 1
        row.size += 1
        if col.size == 1 or pt.x < col.lo:
            col.lo = pt.x
        if col.size == 1 or pt.x > col.hi:
            col.hi = pt.x
        if row.size == 1 or pt.y < row.lo:
            row.lo = pt.y
        if row.size == 1 or pt.y > row.hi:
            row.hi = pt.y
        if validate:
            state.boxes[label] = (pt.x, pt.x, pt.y, pt.y)
    return state


def _absorb_line(state: _State, a: _Line, b: _Line, axis: int) -> None:
    """Merge line b into a (cells at shared crossings concatenate with a's
    rectangles first); unlink b."""
    large = state.large
    for other, cb in list(b.cells.items()):
        ca = a.cells.get(other)
        if ca is None:
            if axis == 1:
                cb.col = a
            else:
                cb.row = a
            a.cells[other] = cb
            other.cells[a] = cb
        else:
            ca.rects.extend(cb.rects)
            if cb in large:
                del large[cb]
            if len(ca.rects) >= 2:
                large[ca] = None
        del other.cells[b]
    a.size += b.size
    if b.lo < a.lo:
        a.lo = b.lo
    if b.hi > a.hi:
        a.hi = b.hi
    if b.prv is not None:
        b.prv.nxt = b.nxt
    else:
        if axis == 1:
            state.cols_head = b.nxt
        else:
            state.rows_head = b.nxt
    if b.nxt is not None:
        b.nxt.prv = b.prv


def _maybe_coarsen(state: _State, line: _Line, axis: int, stats: Optional[dict]) -> None:
    # check the smaller-coordinate neighbor first; at most one merge per
    # axis per step (merging one side pushes the other back over budget)
    for nb in (line.prv, line.nxt):
        if nb is not None and line.size + nb.size <= state.d:
            _absorb_line(state, line, nb, axis)
            if stats is not None:
                stats["coarsen_cols" if axis == 1 else "coarsen_rows"] += 1
            return


def _check_invariants(state: _State) -> None:
    """Debug replay of the gridding invariants: rectangles inside their
    cell's span, line sizes within budget, consecutive lines over budget,
    large-cell bookkeeping exact."""
    d = state.d
    cols = _lines(state.cols_head)
    rows = _lines(state.rows_head)
    seen: Dict[int, bool] = {}
    count = 0
    for axis, lines in ((1, cols), (2, rows)):
        for ln in lines:
            assert 1 <= ln.size <= d, "line size %d outside 1..%d" % (ln.size, d)
            assert sum(len(c.rects) for c in ln.cells.values()) == ln.size
        for a, b in zip(lines, lines[1:]):
            assert a.size + b.size > d, "consecutive lines fit the budget but were not merged"
            assert a.hi < b.lo, "line spans out of order"
    for col in cols:
        for row, cell in col.cells.items():
            assert cell.col is col and cell.row is row
            assert cell.rects, "empty cell kept alive"
            assert (cell in state.large) == (len(cell.rects) >= 2), "large-cell set stale"
            for idx in cell.rects:
                assert idx not in seen, "rectangle in two cells"
                seen[idx] = True
                count += 1
                x1, x2, y1, y2 = state.boxes[idx]
                assert col.lo <= x1 and x2 <= col.hi and row.lo <= y1 and y2 <= row.hi, \
                    "rectangle escapes its cell"
    assert count == state.total


def _merge_loop(state: _State, stats: Optional[dict] = None) -> bool:
    """Run merges until one rectangle remains (True) or no cell holds two
    rectangles while several remain (False: dense)."""
    large = state.large
    n = state.n
    steps = state.steps
    rep = state.rep
    validate = state.validate
    while state.total > 1:
        if not large:
            return False
        cell = next(iter(large))
        rects = cell.rects
        i = rects[0]
        j = rects[1]
        k = n + len(steps) + 1
        steps.append(MergeStep(i, j, k))
        rects[0:2] = [k]
        rep.append(rep[i] if rep[i] < rep[j] else rep[j])
        state.total -= 1
        if len(rects) < 2:
            del large[cell]
        col = cell.col
        row = cell.row
        col.size -= 1
        row.size -= 1
        if validate:
            a = state.boxes[i]
            b = state.boxes[j]
            state.boxes[k] = (min(a[0], b[0]), max(a[1], b[1]),
                              min(a[2], b[2]), max(a[3], b[3]))
        _maybe_coarsen(state, col, 1, stats)
        _maybe_coarsen(state, row, 2, stats)
        if validate:
            _check_invariants(state)
    return True


def _dense_cells(state: _State, perm: Permutation):
    """PointSet of occupied cells plus the maps needed to pull a grid
    witness on the cells back to the permutation: per-column/row original
    coordinate cuts and a representative original point per cell."""
    cols = _lines(state.cols_head)
    rows = _lines(state.rows_head)
    row_index = {ln: i + 1 for i, ln in enumerate(rows)}
    pts: List[Point] = []
    reps: Dict[Point, Point] = {}
    for ci, col in enumerate(cols, 1):
        for rline, cell in col.cells.items():
            cellpt = Point(ci, row_index[rline])
            pts.append(cellpt)
            reps[cellpt] = perm.point(state.rep[cell.rects[0]])
    M = PointSet(len(cols), len(rows), sorted(pts))
    col_cuts = [c.hi for c in cols]
    row_cuts = [r.hi for r in rows]
    return M, col_cuts, row_cuts, reps


def build_decomposition(perm: Permutation, r: int,
                        stats: Optional[dict] = None,
                        validate: bool = False) -> DecompositionResult:
    """Merge-decompose perm with view budget d = 4 f(r): returns either a
    complete d-wide merge sequence, or — when the merging stalls — an
    r x r grid witness extracted from the dense cell pattern.  Runs in
    O(n) merges plus one grid-finder call; deterministic."""
    d = 4 * f_bound(r)
    _require_original_labels(perm)
    if stats is not None:
        stats.update(coarsen_cols=0, coarsen_rows=0, dense=False)
    state = _build_state(perm, d, validate)
    if _merge_loop(state, stats):
        return DecompositionResult(seq=MergeSequence(state.steps), grid=None, width_bound=d)
    if stats is not None:
        stats["dense"] = True
    M, col_cuts, row_cuts, reps = _dense_cells(state, perm)
    # every cell holds one rectangle and consecutive lines are over budget,
    # which forces the density the grid finder needs
    assert M.p + M.q > 2 and 4 * len(M) > d * (M.p + M.q - 2), "dense branch below threshold"
    sub = find_grid(M, r)
    w = GridWitness([col_cuts[c - 1] for c in sub.col_cuts],
                    [row_cuts[c - 1] for c in sub.row_cuts],
                    [[reps[sub.witnesses[j][i]] for i in range(r)] for j in range(r)])
    assert verify_grid(perm, w, r), "lifted dense-branch witness failed verification"
    return DecompositionResult(seq=None, grid=w, width_bound=None)


def build_decomposition_budget(perm: Permutation, d: int,
                               stats: Optional[dict] = None,
                               validate: bool = False) -> Union[MergeSequence, PointSet]:
    """Same loop under an explicit view budget d: a complete d-wide merge
    sequence, or the occupied-cell PointSet once merging stalls (which
    then has more than (p + q - 2) d / 4 points)."""
    if d < 1:
        raise ValidationError("view budget must be >= 1, got %d" % d)
    _require_original_labels(perm)
    if stats is not None:
        stats.update(coarsen_cols=0, coarsen_rows=0, dense=False)
    state = _build_state(perm, d, validate)
    if _merge_loop(state, stats):
        return MergeSequence(state.steps)
    if stats is not None:
        stats["dense"] = True
    M, _, _, _ = _dense_cells(state, perm)
    assert M.p + M.q > 2 and 4 * len(M) > d * (M.p + M.q - 2), "dense branch below threshold"
    return M


def canonical_grid_decomposition(r: int, s: int) -> MergeSequence:
    """Row-sweep merge sequence for canonical_grid(r, s): sweep the rows
    bottom to top, absorbing each row's point into its column's rectangle
    (columns left to right within a level), then join the r column
    rectangles left to right.  At every step the new rectangle stays inside
    its column's x-band and sees exactly the other r - 1 column rectangles
    on the y-axis, so the width is exactly r whenever s >= 2."""
    if r < 1 or s < 1:
        raise ValidationError("grid dimensions must be >= 1, got %d x %d" % (r, s))
    n = r * s
    steps: List[Tuple[int, int, int]] = []
    nxt = n + 1
    # label of the row-i point of column j is (j-1)s + (s-i+1); start each
    # column's rectangle at its row-1 point
    col_rect = [j * s for j in range(1, r + 1)]
    for t in range(2, s + 1):
        for j in range(1, r + 1):
            label = (j - 1) * s + (s - t + 1)
            steps.append((col_rect[j - 1], label, nxt))
            col_rect[j - 1] = nxt
            nxt += 1
    cur = col_rect[0]
    for other in col_rect[1:]:
        steps.append((cur, other, nxt))
        cur = nxt
        nxt += 1
    return MergeSequence(steps)
