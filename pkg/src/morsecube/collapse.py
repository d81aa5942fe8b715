"""Greedy elementary collapses of simplicial complexes with replayable certificates."""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from itertools import combinations

POINT = "point"
CIRCLE = "circle"
GRAPH = "connected-1-complex"
INCONCLUSIVE = "inconclusive"

OUTCOME_LETTERS = {POINT: "p", CIRCLE: "c", GRAPH: "g", INCONCLUSIVE: "i"}


def closure(simplices):
    """All faces (nonempty) of the given simplices, as sorted tuples."""
    out = set()
    for s in simplices:
        s = tuple(sorted(s))
        for r in range(1, len(s) + 1):
            out.update(combinations(s, r))
    return out


def facets_of(s):
    return [s[:j] + s[j + 1:] for j in range(len(s))] if len(s) > 1 else []


def is_connected(simplices):
    verts = {s[0] for s in simplices if len(s) == 1}
    if not verts:
        return False
    nbrs = {v: set() for v in verts}
    for s in simplices:
        if len(s) == 2:
            a, b = s
            nbrs[a].add(b)
            nbrs[b].add(a)
    start = next(iter(verts))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in nbrs[v] - seen:
            seen.add(w)
            stack.append(w)
    return len(seen) == len(verts)


@dataclass
class Residual:
    dimension: int
    connected: bool
    degrees: tuple[int, ...]  # sorted vertex degrees in the 1-skeleton
    simplices: tuple[tuple[int, ...], ...]

    @property
    def empty(self):
        return not self.simplices


def summarize(simplices):
    simplices = tuple(sorted(simplices, key=lambda s: (len(s), s)))
    if not simplices:
        return Residual(-1, False, (), ())
    dim = max(len(s) for s in simplices) - 1
    deg = {s[0]: 0 for s in simplices if len(s) == 1}
    for s in simplices:
        if len(s) == 2:
            deg[s[0]] += 1
            deg[s[1]] += 1
    return Residual(dim, is_connected(simplices), tuple(sorted(deg.values())), simplices)


def classify(res: Residual):
    if res.empty or not res.connected:
        return INCONCLUSIVE
    if res.dimension == 0:
        return POINT
    if res.dimension == 1:
        return CIRCLE if all(d == 2 for d in res.degrees) else GRAPH
    return INCONCLUSIVE


@dataclass
class CollapseCertificate:
    pairs: list[tuple[tuple[int, ...], tuple[int, ...]]]
    residual: Residual
    outcome: str
    restarts_used: int
    seed: object
    attempt_seed: object = None

    def replay(self, simplices):
        """Re-run the recorded collapses; raises ValueError if one is illegal."""
        return replay(simplices, self.pairs)

    def validate(self, simplices):
        res = replay(simplices, self.pairs)
        if res.simplices != self.residual.simplices:
            raise ValueError("replay residual differs from the recorded residual")
        if self.outcome == POINT and not (res.dimension == 0 and len(res.simplices) == 1):
            raise ValueError("outcome point but residual is not a single vertex")
        if self.outcome == CIRCLE and not (
                res.dimension == 1 and res.connected and all(d == 2 for d in res.degrees)):
            raise ValueError("outcome circle but residual is not a cycle graph")
        return True


class _Complex:
    """Mutable complex with immediate-coface counts."""

    def __init__(self, simplices):
        self.alive = set(simplices)
        self.cofaces = {s: set() for s in self.alive}
        for s in self.alive:
            for f in facets_of(s):
                if f not in self.cofaces:
                    raise ValueError(f"complex is not closed: {f} missing below {s}")
                self.cofaces[f].add(s)

    def free_partner(self, s):
        """The unique coface if ``s`` is a free face, else None."""
        if s not in self.alive:
            return None
        cf = self.cofaces[s]
        if len(cf) != 1:
            return None
        (t,) = cf
        return t if not self.cofaces[t] else None

    def remove(self, s):
        """Remove a maximal simplex; returns faces whose coface sets changed."""
        self.alive.discard(s)
        changed = []
        for f in facets_of(s):
            self.cofaces[f].discard(s)
            changed.append(f)
        del self.cofaces[s]
        return changed


def replay(simplices, pairs):
    cx = _Complex(closure(simplices))
    for sigma, tau in pairs:
        if cx.free_partner(sigma) != tau:
            raise ValueError(f"illegal collapse of {sigma} into {tau}")
        cx.remove(tau)
        cx.remove(sigma)
    return summarize(cx.alive)


def _attempt(simplices, rng):
    cx = _Complex(simplices)
    prio = {s: rng.random() for s in cx.alive}
    heaps = {}

    def push(s):
        if len(cx.cofaces.get(s, ())) == 1:
            heapq.heappush(heaps.setdefault(len(s), []), (prio[s], s))

    for s in cx.alive:
        push(s)
    pairs = []
    while True:
        # prefer free faces whose coface has the largest dimension
        live = [d for d, h in heaps.items() if h]
        if not live:
            break
        d = max(live)
        _, sigma = heapq.heappop(heaps[d])
        tau = cx.free_partner(sigma)
        if tau is None:
            continue
        pairs.append((sigma, tau))
        touched = cx.remove(tau)
        touched += cx.remove(sigma)
        for f in touched:
            if f not in cx.alive:
                continue
            if not cx.cofaces[f]:
                # f became maximal: its own free faces may now collapse into it
                for g in facets_of(f):
                    push(g)
            else:
                push(f)
    return pairs, summarize(cx.alive)


def collapse(simplices, restarts=32, seed=0):
    """Collapse greedily with seeded random priorities.

    Success outcomes (point, circle, connected 1-complex) are witnessed by
    the recorded pairs.  A 2-dimensional or larger residual triggers a
    restart with a fresh priority, up to ``restarts`` times.
    """
    simplices = closure(simplices)
    if not simplices:
        return CollapseCertificate([], summarize(()), INCONCLUSIVE, 0, seed)
    best = None
    for attempt in range(restarts + 1):
        attempt_seed = f"{seed}/{attempt}"
        pairs, res = _attempt(simplices, random.Random(attempt_seed))
        outcome = classify(res)
        cert = CollapseCertificate(pairs, res, outcome, attempt, seed, attempt_seed)
        if outcome != INCONCLUSIVE or res.dimension <= 1:
            # a residual of dimension <= 1 fixes the homotopy type; restarts cannot help
            return cert
        if best is None or res.dimension < best.residual.dimension:
            best = cert
    best.restarts_used = restarts
    return best
