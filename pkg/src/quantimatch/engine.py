"""Weighted reachability over timed symbolic automata.

The engine advances a weight table (location, clock zone, value
sequence) -> semiring value across one signal segment at a time.  Time
is rescaled so that every segment boundary is an integer; zone bounds
then stay integral, keeping zone identity exact under hashing.

Per segment the table unfolds into a finite move graph: entries wait
into the open band between the previous and the current boundary or
onto the boundary itself, transitions fire from states whose recorded
value sequence is nonempty, and freshly fired states wait again.
Waiting is strictly positive (see `zone.up`), so a fired state can
never refire at the same instant.  Weighing the graph once yields both
the carried table (states pinned at the boundary) and the partial view
used for match harvesting (states strictly inside the segment).
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from . import zone as zn
from .automaton import (
    EvaluationError,
    WeightedAutomaton,
    cost_value,
    matching_automaton,
)
from .matchset import MatchPiece, MatchSet, zone_sort_key
from .semiring import Semiring
from .signals import EMPTY_SEQ, Segment, Signal, Valuation, absorbing_concat

# engine state: (location name, Zone over clocks + absolute time, ValueSeq)
State = tuple
Weight = dict


class EngineContext:
    """Lookup tables for one weighted automaton at a fixed time scale."""

    def __init__(self, wa: WeightedAutomaton, scale: int = 1, audit=None):
        a = wa.automaton
        self.wa = wa
        self.automaton = a
        self.semiring = wa.semiring
        self.kind = wa.cost
        t_name = "T"
        while t_name in a.clocks:
            t_name += "_"
        self.clock_names = a.clocks + (t_name,)
        self.t_index = len(a.clocks) + 1  # 1-based matrix index
        self.scale = scale
        self.audit = audit
        self.labels = {l.name: l.label for l in a.locations}
        self.accepting = frozenset(l.name for l in a.locations if l.accepting)
        self.out = {l.name: [] for l in a.locations}
        for tr in a.transitions:
            self.out[tr.source].append(tr)
        idx = {c: i + 1 for i, c in enumerate(a.clocks)}
        self._guards = {}
        self._resets = {}
        for tr in a.transitions:
            atoms = []
            for at in tr.guard:
                k = at.const * scale
                atoms.append((idx[at.var], at.op, int(k) if k.denominator == 1 else k))
            self._guards[tr] = tuple(atoms)
            self._resets[tr] = tuple(idx[c] for c in tr.resets)

    def guards(self, tr):
        return self._guards[tr]

    def resets(self, tr):
        return self._resets[tr]


def shortest_distance(nodes, edges, sources, semiring: Semiring) -> dict:
    """Sum the weights of all paths from the sources to every node.

    Parallel edges are merged additively first.  Acyclic graphs get a
    single topological pass; otherwise the all-pairs closure is taken,
    with `star` summing each cycle's unrolling.  The empty path
    contributes each source's own weight to its node.  Nodes whose
    total is the additive identity are left out of the result.
    """
    sr = semiring
    order = list(nodes)
    pos = {v: i for i, v in enumerate(order)}
    n = len(order)
    adj: dict = {}
    for u, v, w in edges:
        if w == sr.zero:
            continue
        key = (pos[u], pos[v])
        adj[key] = sr.oplus(adj[key], w) if key in adj else w
    src = [sr.zero] * n
    for v, w in sources.items():
        i = pos[v]
        src[i] = sr.oplus(src[i], w)

    out = [[] for _ in range(n)]
    indeg = [0] * n
    for (ui, vi), w in adj.items():
        out[ui].append((vi, w))
        indeg[vi] += 1
    queue = deque(i for i in range(n) if indeg[i] == 0)
    topo = []
    while queue:
        i = queue.popleft()
        topo.append(i)
        for vi, _ in out[i]:
            indeg[vi] -= 1
            if indeg[vi] == 0:
                queue.append(vi)

    if len(topo) == n:
        dist = list(src)
        for i in topo:
            di = dist[i]
            if di == sr.zero:
                continue
            for vi, w in out[i]:
                dist[vi] = sr.oplus(dist[vi], sr.otimes(di, w))
        return {order[i]: dist[i] for i in range(n) if dist[i] != sr.zero}

    # cyclic: Lehmann closure over the node matrix
    mat = [[sr.zero] * n for _ in range(n)]
    for (ui, vi), w in adj.items():
        mat[ui][vi] = w
    for k in range(n):
        s = sr.star(mat[k][k])
        row_k = mat[k]
        for i in range(n):
            wik = sr.otimes(mat[i][k], s)
            if wik == sr.zero:
                continue
            row_i = mat[i]
            for j in range(n):
                if row_k[j] != sr.zero:
                    row_i[j] = sr.oplus(row_i[j], sr.otimes(wik, row_k[j]))
    dist = list(src)
    for i in range(n):
        si = src[i]
        if si == sr.zero:
            continue
        row = mat[i]
        for j in range(n):
            if row[j] != sr.zero:
                dist[j] = sr.oplus(dist[j], sr.otimes(si, row[j]))
    return {order[j]: dist[j] for j in range(n) if dist[j] != sr.zero}


def _explore(ctx: EngineContext, weight: Weight, values: Valuation, prev: int, cur: int):
    """Unfold one segment into a move graph and weigh both views.

    `prev` and `cur` are scaled boundary times; input entries are
    expected to be pinned at `prev`.  Returns (partial, final).
    """
    sr = ctx.semiring
    t = ctx.t_index
    appended = (values,)
    nodes: dict = {}  # state -> pinned-at-cur flag
    roles: dict = {}
    edges: list = []
    stack: list = []

    def discover(state, role, at_wall):
        if state in nodes:
            return
        nodes[state] = at_wall
        roles[state] = role
        stack.append(state)
        if ctx.audit is not None:
            ctx.audit(state[1], ctx.scale, cur)

    sources = {}
    for state, s in weight.items():
        discover(state, "input", False)
        sources[state] = s

    cost_cache: dict = {}

    def cost(loc, seq):
        key = (loc, seq)
        if key not in cost_cache:
            cost_cache[key] = cost_value(ctx.kind, ctx.labels[loc], seq)
        return cost_cache[key]

    while stack:
        state = stack.pop()
        loc, z, seq = state
        if roles[state] == "elapsed":
            # a nonempty dwell is on record, so transitions may fire
            w = cost(loc, seq)
            if w == sr.zero:
                continue
            for tr in ctx.out[loc]:
                z2 = zn.intersect_guard(z, ctx.guards(tr))
                if z2.m is None:
                    continue
                succ = (tr.target, zn.reset(z2, ctx.resets(tr)), EMPTY_SEQ)
                discover(succ, "fired", nodes[state])
                edges.append((state, succ, w))
        else:
            # inputs and freshly fired states wait before anything else
            zu = zn.up(z)
            seq2 = absorbing_concat(seq, appended)
            band = zn.clamp_time(zu, t, prev, cur, True, True)
            if band.m is not None:
                succ = (loc, band, seq2)
                discover(succ, "elapsed", False)
                edges.append((state, succ, sr.one))
            wall = zn.clamp_time(zu, t, cur, cur)
            if wall.m is not None:
                succ = (loc, wall, seq2)
                discover(succ, "elapsed", True)
                edges.append((state, succ, sr.one))

    dist = shortest_distance(nodes, edges, sources, sr)
    partial: Weight = {}
    final: Weight = {}
    for state, at_wall in nodes.items():
        d = dist.get(state)
        if d is None:
            continue
        (final if at_wall else partial)[state] = d
    return partial, final


def initial_weight(ctx: EngineContext) -> Weight:
    z0 = zn.point_zone(ctx.clock_names, 0)
    return {
        (l.name, z0, EMPTY_SEQ): ctx.semiring.one
        for l in ctx.automaton.initial_locations
    }


def advance(ctx: EngineContext, weight: Weight, values: Valuation, prev: int, cur: int) -> Weight:
    """One boundary step: the entries pinned at `cur` (scaled units)."""
    return _explore(ctx, weight, values, prev, cur)[1]


def advance_partial(ctx: EngineContext, weight: Weight, values: Valuation, prev: int, cur: int) -> Weight:
    """Everything strictly before `cur`, carried inputs included."""
    return _explore(ctx, weight, values, prev, cur)[0]


def time_scale(sig: Signal) -> int:
    """Smallest integer multiplier that makes every boundary integral."""
    return math.lcm(*(b.denominator for b in sig.boundaries))


def trace_value(sig: Signal, wa: WeightedAutomaton, audit=None):
    """Aggregate weight of the accepting runs over the whole signal."""
    if len(sig) == 0:
        raise EvaluationError("empty signal")
    ctx = EngineContext(wa, time_scale(sig), audit)
    weight = initial_weight(ctx)
    prev = 0
    for seg, bound in zip(sig.segments, sig.boundaries[1:]):
        cur = int(bound * ctx.scale)
        weight = advance(ctx, weight, seg.values, prev, cur)
        prev = cur
    return ctx.semiring.big_oplus(
        s
        for (loc, _, seq), s in weight.items()
        if seq == EMPTY_SEQ and loc in ctx.accepting
    )


def symbolic_successors(ctx: EngineContext, state: State, bounds, vals):
    """Moves of one state relative to the scaled segment boundaries.

    Returns (successor, weight, kind) triples with kind "fire" or
    "elapse".  A state pinned at a boundary waits into the following
    segment; an unpinned state waits within its own segment only while
    its sequence is still empty (later waits from the same origin are
    subsumed by longer direct ones); any state with a nonempty sequence
    may fire.
    """
    sr = ctx.semiring
    t = ctx.t_index
    loc, z, seq = state
    moves = []
    if seq:
        w = cost_value(ctx.kind, ctx.labels[loc], seq)
        if w != sr.zero:
            for tr in ctx.out[loc]:
                z2 = zn.intersect_guard(z, ctx.guards(tr))
                if z2.m is None:
                    continue
                succ = (tr.target, zn.reset(z2, ctx.resets(tr)), EMPTY_SEQ)
                moves.append((succ, w, "fire"))
    hi = z.m[t][0]
    lo = z.m[0][t]
    if not hi[1] and not lo[1] and hi[0] == -lo[0]:
        k = bisect_left(bounds, hi[0])
    elif not seq:
        k = bisect_right(bounds, -lo[0]) - 1
    else:
        k = None
    if k is not None and k < len(vals):
        zu = zn.up(z)
        seq2 = absorbing_concat(seq, (vals[k],))
        band = zn.clamp_time(zu, t, bounds[k], bounds[k + 1], True, True)
        if band.m is not None:
            moves.append(((loc, band, seq2), sr.one, "elapse"))
        wall = zn.clamp_time(zu, t, bounds[k + 1], bounds[k + 1])
        if wall.m is not None:
            moves.append(((loc, wall, seq2), sr.one, "elapse"))
    return moves


@dataclass
class ReachableGraph:
    nodes: dict  # state -> aggregated weight of paths from the initial states
    edges: list  # (source, target, weight, kind)
    initial: tuple
    accepting: tuple
    scale: int
    clock_names: tuple


def reachable_graph(sig: Signal, wa: WeightedAutomaton, audit=None) -> ReachableGraph:
    """The whole-trace transition system, for inspection and checking.

    State count grows quickly with trace length; this is meant for
    small inputs, while `trace_value` folds segment by segment.
    """
    if len(sig) == 0:
        raise EvaluationError("empty signal")
    ctx = EngineContext(wa, time_scale(sig), audit)
    sr = ctx.semiring
    bounds = [int(b * ctx.scale) for b in sig.boundaries]
    vals = [s.values for s in sig.segments]
    z0 = zn.point_zone(ctx.clock_names, 0)
    initial = tuple((l.name, z0, EMPTY_SEQ) for l in ctx.automaton.initial_locations)

    seen = set(initial)
    stack = list(initial)
    edges = []
    if ctx.audit is not None:
        for state in initial:
            ctx.audit(state[1], ctx.scale, bounds[-1])
    while stack:
        state = stack.pop()
        for succ, w, kind in symbolic_successors(ctx, state, bounds, vals):
            edges.append((state, succ, w, kind))
            if succ not in seen:
                seen.add(succ)
                stack.append(succ)
                if ctx.audit is not None:
                    ctx.audit(succ[1], ctx.scale, bounds[-1])

    sources = {state: sr.one for state in initial}
    dist = shortest_distance(seen, [(u, v, w) for u, v, w, _ in edges], sources, sr)
    end = bounds[-1]
    accepting = []
    for state in seen:
        loc, z, seq = state
        hi = z.m[ctx.t_index][0]
        lo = z.m[0][ctx.t_index]
        if (
            seq == EMPTY_SEQ
            and loc in ctx.accepting
            and not hi[1]
            and not lo[1]
            and hi[0] == end
            and lo[0] == -end
        ):
            accepting.append(state)
    nodes = {state: dist.get(state, sr.zero) for state in seen}
    return ReachableGraph(
        nodes, edges, initial, tuple(accepting), ctx.scale, ctx.clock_names
    )


def _prune(ctx: EngineContext, weight: Weight) -> Weight:
    """Drop entries that can never contribute another accepting state.

    Feasibility is judged on clock lower bounds alone: waiting and
    resets never take a bound below its zone floor again, so an upper
    guard atom whose constant the floor already exceeds stays violated
    forever.  Lower guard atoms are treated as always satisfiable
    (waiting can meet them), which keeps the check conservative.
    """
    guarded = sorted(
        {i for atoms in ctx._guards.values() for (i, _, _) in atoms}
    )
    if not guarded:
        # no guards: an entry is live iff an accepting location is
        # reachable over the location graph
        live_locs = set()
        frontier = list(ctx.accepting)
        incoming: dict = {}
        for tr in ctx.automaton.transitions:
            incoming.setdefault(tr.target, []).append(tr.source)
        while frontier:
            l = frontier.pop()
            for src in incoming.get(l, ()):
                if src not in live_locs:
                    live_locs.add(src)
                    frontier.append(src)
        return {st: w for st, w in weight.items() if st[0] in live_locs}

    pos = {i: p for p, i in enumerate(guarded)}
    verdicts: dict = {}

    def is_live(loc, lbs) -> bool:
        root = (loc, lbs)
        if root in verdicts:
            return verdicts[root]
        visited = {root}
        frontier = [root]
        while frontier:
            cur_loc, cur_lbs = frontier.pop()
            if verdicts.get((cur_loc, cur_lbs)):
                verdicts[root] = True
                return True
            for tr in ctx.out[cur_loc]:
                ok = True
                for i, op, k in ctx.guards(tr):
                    if op in ("<", "<=") and cur_lbs[pos[i]] > k:
                        ok = False
                        break
                if not ok:
                    continue
                if tr.target in ctx.accepting:
                    verdicts[root] = True
                    return True
                resets = ctx.resets(tr)
                nxt = tuple(
                    0 if guarded[p] in resets else v for p, v in enumerate(cur_lbs)
                )
                node = (tr.target, nxt)
                if node not in visited:
                    visited.add(node)
                    frontier.append(node)
        # nothing reachable from the root can fire into acceptance, and
        # every state seen along the way shares that fate
        for node in visited:
            verdicts[node] = False
        return False

    out: Weight = {}
    for state, w in weight.items():
        loc, z, _ = state
        lbs = tuple(-z.m[0][i][0] for i in guarded)
        if is_live(loc, lbs):
            out[state] = w
    return out


class OnlineMatcher:
    """Incremental match-set computation over a segment stream.

    The automaton is wrapped with a fresh start location that records
    the match start on its own clock; every harvested accepting state
    projects onto the (start, end) plane and folds into the match set.
    Between segments the weight table keeps only states pinned at the
    latest boundary.  A fresh start copy is re-seeded there (older
    copies can produce nothing new) and dead entries are discarded,
    both optional for cross-checking.
    """

    def __init__(self, wa: WeightedAutomaton, prune: bool = True,
                 reseed: bool = True, audit=None):
        self.wa = wa
        self.semiring = wa.semiring
        expanded = matching_automaton(wa.automaton)
        self._expanded = WeightedAutomaton(expanded, wa.semiring, wa.cost)
        self._start = expanded.locations[-1].name
        self._tp_index = len(wa.automaton.clocks) + 1
        self.prune_enabled = prune
        self.reseed_enabled = reseed
        self.audit = audit
        self.scale = 1
        self._ctx = EngineContext(self._expanded, 1, audit)
        self._elapsed = Fraction(0)
        self.matchset = MatchSet(wa.semiring)
        z0 = zn.point_zone(self._ctx.clock_names, 0)
        self._weight: Weight = {(self._start, z0, EMPTY_SEQ): wa.semiring.one}
        for l in wa.automaton.initial_locations:
            # matches starting at time 0 exactly cannot come out of the
            # start location, whose hand-off needs a positive dwell
            self._weight[(l.name, z0, EMPTY_SEQ)] = wa.semiring.one

    def feed(self, seg: Segment) -> list:
        """Consume one segment; report match-set rows that changed."""
        sr = self.semiring
        new_end = self._elapsed + seg.duration
        s2 = math.lcm(self.scale, new_end.denominator)
        if s2 != self.scale:
            f = s2 // self.scale
            self._weight = {
                (l, zn.scale(z, f), q): w for (l, z, q), w in self._weight.items()
            }
            self.scale = s2
            self._ctx = EngineContext(self._expanded, s2, self.audit)
        prev = int(self._elapsed * self.scale)
        cur = int(new_end * self.scale)

        partial, final = _explore(self._ctx, self._weight, seg.values, prev, cur)
        changed = set()
        unscale = Fraction(1, self.scale)
        for view in (partial, final):
            for (loc, z, q), w in view.items():
                if q != EMPTY_SEQ or loc not in self._ctx.accepting:
                    continue
                if (loc, z, q) in self._weight:
                    continue  # carried input, harvested previously
                region = zn.scale(
                    zn.project_match(z, self._ctx.t_index, self._tp_index), unscale
                )
                if self.matchset.insert(region, w):
                    changed.add(region)

        self._weight = final
        if self.reseed_enabled:
            self._weight = {
                st: w for st, w in self._weight.items() if st[0] != self._start
            }
            z = zn.point_zone(self._ctx.clock_names, cur)
            self._weight[(self._start, z, EMPTY_SEQ)] = sr.one
        if self.prune_enabled:
            self._weight = _prune(self._ctx, self._weight)
        self._elapsed = new_end
        self.matchset.horizon = new_end
        return [
            MatchPiece(region, self.matchset.get(region))
            for region in sorted(changed, key=zone_sort_key)
        ]

    @property
    def elapsed(self) -> Fraction:
        return self._elapsed

    def footprint(self) -> int:
        """Entries retained plus their recorded sequence elements."""
        return sum(1 + len(q) for (_, _, q) in self._weight)
