"""Deciding pattern containment along a merge decomposition.

``find_pattern`` runs a dynamic program over the steps of a complete
merge sequence.  A subproblem asks whether a chosen subset of the
pattern embeds into the points accumulated by a connected set K of live
rectangles, with the subset distributed among the rectangles of K in a
fixed way.  When a step merges j1 and j2 into j, a subproblem whose set
contains j is answered by splitting the labels assigned to j between j1
and j2 and consulting the already-computed subproblems induced on the
connected components one step earlier; component answers combine exactly
when the pattern orders agree with the pairwise rectangle orders, which
reduces to per-axis min/max comparisons because rectangles in distinct
components never share a projection.

Rectangle geometry never changes after creation, and a set of rectangles
keeps the same induced visibility edges for as long as all its members
are alive.  Each table entry is therefore computed exactly once — at the
step creating the newest rectangle of its key — and every later lookup
routes to that step.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple

from .core import (
    Embedding,
    Interval,
    MergeSequence,
    MergeStep,
    Permutation,
    ValidationError,
    reduce,
    validate_merge_sequence,
    verify_embedding,
)
from .decompose import build_decomposition

Box = Tuple[int, int, int, int]  # x1, x2, y1, y2


# ---------------------------------------------------------------------------
# visibility graph
# ---------------------------------------------------------------------------

class VisibilityGraph:
    """Live rectangles, with an edge whenever two of them view each other
    along some axis (their x- or y-projections intersect).

    Per axis, the occupied coordinates are kept in a sorted doubly linked
    list recording which rectangle owns a left/right endpoint there, so
    the neighbours of a freshly merged rectangle are found by scanning
    only the coordinates under its own projection: anything overlapping
    the new interval either has an endpoint inside it or already viewed
    one of the two merged rectangles.
    """

    __slots__ = ("_box", "_adj", "_owner", "_nxt", "_prv")

    def __init__(self, perm: Permutation):
        self._box: Dict[int, Box] = {}
        self._adj: Tuple[Dict[int, Set[int]], Dict[int, Set[int]]] = ({}, {})
        self._owner: Tuple[Dict[int, List[int]], Dict[int, List[int]]] = ({}, {})
        self._nxt: Tuple[Dict[int, int], Dict[int, int]] = ({}, {})
        self._prv: Tuple[Dict[int, int], Dict[int, int]] = ({}, {})
        for label, pt in perm.pairs():
            self._box[label] = (pt.x, pt.x, pt.y, pt.y)
            self._adj[0][label] = set()
            self._adj[1][label] = set()
        for axis in (0, 1):
            owner, nxt, prv = self._owner[axis], self._nxt[axis], self._prv[axis]
            prev = 0
            for c, label in sorted((pt[axis], lab) for lab, pt in perm.pairs()):
                owner[c] = [label, label]  # degenerate: left and right endpoint
                prv[c] = prev
                if prev:
                    nxt[prev] = c
                prev = c
            if prev:
                nxt[prev] = 0

    # -- queries ------------------------------------------------------------

    def __len__(self) -> int:
        return len(self._box)

    def __contains__(self, v: int) -> bool:
        return v in self._box

    @property
    def vertices(self) -> FrozenSet[int]:
        return frozenset(self._box)

    def box(self, v: int) -> Box:
        return self._box[v]

    def interval(self, v: int, alpha: int) -> Interval:
        if alpha not in (1, 2):
            raise ValidationError("axis must be 1 or 2, got %d" % alpha)
        x1, x2, y1, y2 = self._box[v]
        return Interval(x1, x2) if alpha == 1 else Interval(y1, y2)

    def neighbor_set(self, v: int) -> Set[int]:
        return self._adj[0][v] | self._adj[1][v]

    def neighbors(self, v: int) -> List[int]:
        """Sorted list of rectangles viewing v along some axis."""
        if v not in self._box:
            raise ValidationError("vertex %d is not live" % v)
        return sorted(self.neighbor_set(v))

    def degree(self, v: int) -> int:
        return len(self.neighbor_set(v))

    def adjacency(self) -> Dict[int, List[int]]:
        return {v: self.neighbors(v) for v in self._box}

    # -- update -------------------------------------------------------------

    def _unlink(self, axis: int, pos: int) -> None:
        p, nx = self._prv[axis][pos], self._nxt[axis][pos]
        if p:
            self._nxt[axis][p] = nx
        if nx:
            self._prv[axis][nx] = p
        del self._prv[axis][pos], self._nxt[axis][pos], self._owner[axis][pos]

    def merge(self, step: MergeStep) -> None:
        i, j, k = step
        if i not in self._box or j not in self._box:
            raise ValidationError("merge step (%d,%d,%d) uses a dead or unknown rectangle" % (i, j, k))
        if i == j or k in self._box:
            raise ValidationError("merge step (%d,%d,%d) is not applicable" % (i, j, k))
        bi, bj = self._box[i], self._box[j]
        box = (min(bi[0], bj[0]), max(bi[1], bj[1]), min(bi[2], bj[2]), max(bi[3], bj[3]))
        self._box[k] = box
        for axis in (0, 1):
            lo, hi = box[2 * axis], box[2 * axis + 1]
            owner = self._owner[axis]
            dead = {bi[2 * axis], bi[2 * axis + 1], bj[2 * axis], bj[2 * axis + 1]}
            owner[bi[2 * axis]][0] = 0
            owner[bi[2 * axis + 1]][1] = 0
            owner[bj[2 * axis]][0] = 0
            owner[bj[2 * axis + 1]][1] = 0
            owner[lo][0] = k
            owner[hi][1] = k
            for pos in dead:
                if owner[pos][0] == 0 and owner[pos][1] == 0:
                    self._unlink(axis, pos)
            adj = self._adj[axis]
            seen = (adj[i] | adj[j]) - {i, j}
            nxt = self._nxt[axis]
            pos = lo
            while pos and pos <= hi:
                l, r = owner[pos]
                if l and l != k:
                    seen.add(l)
                if r and r != k:
                    seen.add(r)
                pos = nxt[pos]
            for v in adj[i]:
                adj[v].discard(i)
            for v in adj[j]:
                adj[v].discard(j)
            del adj[i], adj[j]
            adj[k] = seen
            for v in seen:
                adj[v].add(k)
        del self._box[i], self._box[j]


def visibility_update(state: VisibilityGraph, step: MergeStep) -> VisibilityGraph:
    """Apply one merge step to the graph in place and return it."""
    state.merge(MergeStep(*step))
    return state


def connected_sets(graph: VisibilityGraph, v: int, l: int) -> List[Tuple[int, ...]]:
    """Every set K with v ∈ K, |K| ≤ l and G[K] connected, as sorted
    tuples ordered by size then lexicographically."""
    if v not in graph:
        raise ValidationError("vertex %d is not live" % v)
    if l < 1:
        return []
    out: List[Tuple[int, ...]] = []

    def grow(cur: Tuple[int, ...], cur_set: Set[int], banned: Set[int]) -> None:
        out.append(tuple(sorted(cur)))
        if len(cur) == l:
            return
        ext: Set[int] = set()
        for u in cur:
            ext |= graph.neighbor_set(u)
        ext -= cur_set
        ext -= banned
        shadow: Set[int] = set()
        for u in sorted(ext):
            grow(cur + (u,), cur_set | {u}, banned | shadow)
            shadow.add(u)

    grow((v,), {v}, set())
    return sorted(out, key=lambda t: (len(t), t))


# ---------------------------------------------------------------------------
# subproblems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Distribution:
    """Assignment of pattern labels to the rectangles of a key set; labels
    absent from ``assignment`` are unassigned.  Parts are disjoint because
    this is a mapping; admissibility additionally demands a nonempty part
    for every rectangle of the key."""

    assignment: Mapping[int, int]  # pattern label -> rectangle index

    def part(self, rect: int) -> FrozenSet[int]:
        return frozenset(s for s, r in self.assignment.items() if r == rect)

    def range(self) -> FrozenSet[int]:
        return frozenset(self.assignment)

    def code(self, key: Tuple[int, ...], labels: Sequence[int]) -> int:
        parts = {r: [] for r in key}
        for s, r in self.assignment.items():
            parts[r].append(s)
        return _encode_parts(key, parts, labels)


def _encode_parts(key: Tuple[int, ...], parts: Mapping[int, object],
                  labels: Sequence[int]) -> int:
    """Base-(|key|+1) positional code over the pattern labels in label
    order: digit 0 = unassigned, digit t = assigned to the t-th smallest
    rectangle of the key."""
    digit: Dict[int, int] = {}
    for t, r in enumerate(key):
        for s in parts[r]:
            digit[s] = t + 1
    base = len(key) + 1
    c = 0
    for s in labels:
        c = c * base + digit.get(s, 0)
    return c


class SubproblemTable:
    """Satisfiable subproblems, stored at the step that created the newest
    rectangle of their key.

    Because geometry is static after creation, a subproblem's answer
    cannot change while every rectangle of its key is alive; storing it
    once and routing later lookups to the creation step is equivalent to
    a per-step table with invalidation of keys meeting the merged pair.
    A stored value is the label set sent to the first merged child in the
    winning split (used for witness reconstruction); subproblems on a
    single original point are implicit — satisfiable iff the part is a
    single label."""

    def __init__(self, n: int, steps: int):
        self._n = n
        self._tables: List[Dict[Tuple[Tuple[int, ...], int], FrozenSet[int]]] = [
            {} for _ in range(steps)
        ]

    def store(self, step: int, key: Tuple[int, ...], code: int,
              winner: FrozenSet[int]) -> None:
        self._tables[step - 1][(key, code)] = winner

    def winner(self, key: Tuple[int, ...], code: int) -> Optional[FrozenSet[int]]:
        step = key[-1] - self._n  # newest rectangle fixes the home step
        return self._tables[step - 1].get((key, code))

    def entry_count(self) -> int:
        return sum(len(t) for t in self._tables)


def _distributions(key: Tuple[int, ...], labels: Sequence[int]):
    """Yield (code, parts) for every distribution of the labels onto the
    key with all parts nonempty; parts maps rectangle -> frozenset."""
    m = len(key)
    base = m + 1
    need = set(range(1, m + 1))
    for digits in itertools.product(range(base), repeat=len(labels)):
        if not need <= set(digits):
            continue
        code = 0
        for d in digits:
            code = code * base + d
        parts = {
            r: frozenset(s for s, d in zip(labels, digits) if d == t + 1)
            for t, r in enumerate(key)
        }
        yield code, parts


def _components(members: Sequence[int], boxes: Mapping[int, Box]) -> List[Tuple[int, ...]]:
    """Connected components of the visibility relation restricted to
    ``members``, from the static boxes (edge iff the boxes' projections
    intersect on some axis)."""
    parent = {v: v for v in members}

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in itertools.combinations(members, 2):
        ba, bb = boxes[a], boxes[b]
        if (ba[0] <= bb[1] and bb[0] <= ba[1]) or (ba[2] <= bb[3] and bb[2] <= ba[3]):
            parent[find(a)] = find(b)
    groups: Dict[int, List[int]] = {}
    for v in members:
        groups.setdefault(find(v), []).append(v)
    return sorted(tuple(sorted(g)) for g in groups.values())


def _compatible(comps: Sequence[Tuple[int, ...]], parts: Mapping[int, FrozenSet[int]],
                boxes: Mapping[int, Box], sx: Mapping[int, int],
                sy: Mapping[int, int]) -> bool:
    """Pairwise compatibility across components: whenever one rectangle's
    projection lies fully before another's, every label of the first part
    must precede every label of the second in the same pattern order."""
    ext = {}
    for r in parts:
        xs = [sx[s] for s in parts[r]]
        ys = [sy[s] for s in parts[r]]
        ext[r] = (min(xs), max(xs), min(ys), max(ys))
    for ca, cb in itertools.combinations(comps, 2):
        for u in ca:
            for v in cb:
                bu, bv = boxes[u], boxes[v]
                eu, ev = ext[u], ext[v]
                if bu[1] < bv[0]:
                    if eu[1] >= ev[0]:
                        return False
                elif bv[1] < bu[0]:
                    if ev[1] >= eu[0]:
                        return False
                else:  # independent components cannot share an x-span
                    raise AssertionError("components overlap on x")
                if bu[3] < bv[2]:
                    if eu[3] >= ev[2]:
                        return False
                elif bv[3] < bu[2]:
                    if ev[3] >= eu[2]:
                        return False
                else:
                    raise AssertionError("components overlap on y")
    return True


# ---------------------------------------------------------------------------
# the dynamic program
# ---------------------------------------------------------------------------

def _require_canonical(pi: Permutation) -> None:
    n = len(pi)
    if set(pi.labels) != set(range(1, n + 1)):
        raise ValidationError("target labels must be 1..n to follow a merge sequence")


def find_pattern(sigma: Permutation, pi: Permutation, seq: MergeSequence,
                 stats: Optional[dict] = None) -> Optional[Embedding]:
    """Decide whether sigma occurs in pi along a complete merge sequence;
    returns an embedding (sigma label -> pi label) or None."""
    ell = len(sigma)
    n = len(pi)
    if ell < 1:
        raise ValidationError("pattern must be nonempty")
    _require_canonical(pi)
    validate_merge_sequence(seq, n, require_complete=True)
    if ell > n:
        return None
    labels = sorted(sigma.labels)
    sx = {s: sigma.xrank(s) for s in labels}
    sy = {s: sigma.yrank(s) for s in labels}
    if n == 1:
        emb = {labels[0]: 1}
        assert verify_embedding(sigma, pi, emb)
        return emb

    boxes: Dict[int, Box] = {lab: (pt.x, pt.x, pt.y, pt.y) for lab, pt in pi.pairs()}
    graph = VisibilityGraph(pi)
    table = SubproblemTable(n, len(seq))

    def lookup(comp: Tuple[int, ...], parts: Mapping[int, FrozenSet[int]]) -> bool:
        if len(comp) == 1 and comp[0] <= n:
            return len(parts[comp[0]]) == 1
        return table.winner(comp, _encode_parts(comp, parts, labels)) is not None

    def evaluate(key: Tuple[int, ...], parts: Dict[int, FrozenSet[int]],
                 j: int, j1: int, j2: int) -> Optional[FrozenSet[int]]:
        x_labels = sorted(parts[j])
        rest = {r: p for r, p in parts.items() if r != j}
        for mask in range(1 << len(x_labels)):
            x1 = frozenset(x_labels[t] for t in range(len(x_labels)) if mask >> t & 1)
            x2 = frozenset(x_labels) - x1
            split = dict(rest)
            if x1:
                split[j1] = x1
            if x2:
                split[j2] = x2
            comps = _components(sorted(split), boxes)
            if stats is not None and len(comps) > stats.get("max_components", 0):
                stats["max_components"] = len(comps)
            if all(lookup(c, split) for c in comps) and \
                    _compatible(comps, split, boxes, sx, sy):
                return x1
        return None

    for p, step in enumerate(seq, start=1):
        j1, j2, j = step
        b1, b2 = boxes[j1], boxes[j2]
        boxes[j] = (min(b1[0], b2[0]), max(b1[1], b2[1]),
                    min(b1[2], b2[2]), max(b1[3], b2[3]))
        visibility_update(graph, step)
        for key in connected_sets(graph, j, ell):
            for code, parts in _distributions(key, labels):
                winner = evaluate(key, parts, j, j1, j2)
                if winner is not None:
                    table.store(p, key, code, winner)

    if stats is not None:
        stats["entries"] = table.entry_count()

    root = n + len(seq)
    root_key = (root,)
    root_parts = {root: frozenset(labels)}
    if table.winner(root_key, _encode_parts(root_key, root_parts, labels)) is None:
        return None

    # re-descend the recorded winning splits to a concrete embedding
    emb: Embedding = {}
    stack: List[Tuple[Tuple[int, ...], Dict[int, FrozenSet[int]]]] = [(root_key, root_parts)]
    while stack:
        key, parts = stack.pop()
        if len(key) == 1 and key[0] <= n:
            (s,) = parts[key[0]]
            emb[s] = key[0]
            continue
        k = key[-1]
        j1, j2, _ = seq[k - n - 1]
        x1 = table.winner(key, _encode_parts(key, parts, labels))
        assert x1 is not None, "internal: missing table entry during reconstruction"
        x2 = parts[k] - x1
        split = {r: p for r, p in parts.items() if r != k}
        if x1:
            split[j1] = x1
        if x2:
            split[j2] = x2
        for comp in _components(sorted(split), boxes):
            stack.append((comp, {r: split[r] for r in comp}))
    assert verify_embedding(sigma, pi, emb), "internal: reconstructed embedding failed"
    return emb


# ---------------------------------------------------------------------------
# one-call matching
# ---------------------------------------------------------------------------

def match_auto(sigma: Permutation, pi: Permutation) -> Optional[Embedding]:
    """Decide sigma ≼ pi outright: build a decomposition of pi with
    r = |sigma|.  A grid outcome is immediately affirmative — an l x l
    grid contains every pattern of length l, witnessed by picking, for
    the pattern's i-th position, the point in grid cell (i, value).  A
    merge-sequence outcome delegates to find_pattern."""
    ell = len(sigma)
    n = len(pi)
    if ell < 1:
        raise ValidationError("pattern must be nonempty")
    if ell > n:
        return None
    by_x = pi.by_x()
    if ell == 1:
        emb = {sigma.labels[0]: by_x[0]}
        assert verify_embedding(sigma, pi, emb)
        return emb
    sig_by_x = sorted(sigma.labels, key=lambda s: sigma.xrank(s))
    red = reduce(pi.points)  # canonical copy for the merge machinery
    res = build_decomposition(red, ell)
    if res.grid is not None:
        emb = {}
        for i, s in enumerate(sig_by_x, start=1):
            wit = res.grid.witnesses[sigma.yrank(s) - 1][i - 1]
            emb[s] = by_x[wit.x - 1]  # reduced x-coordinate = x-rank in pi
        assert verify_embedding(sigma, pi, emb)
        return emb
    inner = find_pattern(sigma, red, res.seq)
    if inner is None:
        return None
    emb = {s: by_x[t - 1] for s, t in inner.items()}
    assert verify_embedding(sigma, pi, emb)
    return emb
