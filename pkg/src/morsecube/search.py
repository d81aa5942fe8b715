"""Exhaustive search over ±1 states up to symmetry.

A ±1 state on at most 64 facets is a bitmask: bit ``i`` is set when facet
``i`` has value +1.  Flipping the state on one colour class is an XOR with
that class's mask.

The ascending link at vertex ``v`` only depends on which facets have
status O, and those are the set bits of ``mask ^ flip(v)`` where
``flip(v)`` is the union of the colour classes named by ``v``.  The
descending link at ``v`` is the ascending link at the complementary
vertex.  So the directed links of a state are the full subcomplexes on
the ``2^c`` masks ``mask ^ flip(v)``, and the search works with a single
predicate on link masks.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import collapse as collapse_mod
from . import quaternions as quat
from .collapse import CIRCLE, GRAPH, OUTCOME_LETTERS, POINT
from .morse import FIBRATION, PERFECT, RealState, dual_link, verify
from .polytope import Colouring, Polytope

ALL_CIRCLES = "all-circles"
FILTERS = (PERFECT, FIBRATION, ALL_CIRCLES)

CHUNK_BITS = 20
CANON_BATCH = 4096
EMPTY = "e"
DISCONNECTED = "d"


# -- symmetry ---------------------------------------------------------------------

@dataclass(frozen=True)
class Symmetry:
    facets: tuple[int, ...]  # facet i is sent to facets[i]
    colours: tuple[int, ...]  # induced colour permutation


class SymmetryGroup:
    """Facet permutations preserving the face lattice and the colour partition.

    Acting on states it is combined with the ``2^c`` colour-class flips.
    """

    def __init__(self, elements, col: Colouring):
        self.elements = list(elements)
        self.colouring = col
        self.facet_count = len(col)
        classes = col.classes()
        self.class_masks = [sum(1 << f for f in cls) for cls in classes]
        self.flips = [flip_mask(self.class_masks, v) for v in range(1 << col.c)]
        self._tables = None

    @property
    def order(self):
        return len(self.elements)

    @property
    def acting_order(self):
        return self.order * len(self.flips)

    def compose(self, g: Symmetry, h: Symmetry):
        """``g`` after ``h``."""
        return Symmetry(tuple(g.facets[i] for i in h.facets),
                        tuple(g.colours[i] for i in h.colours))

    def inverse(self, g: Symmetry):
        inv = [0] * len(g.facets)
        for i, j in enumerate(g.facets):
            inv[j] = i
        cinv = [0] * len(g.colours)
        for i, j in enumerate(g.colours):
            cinv[j] = i
        return Symmetry(tuple(inv), tuple(cinv))

    def is_closed(self):
        members = {g.facets for g in self.elements}
        return all(self.compose(g, h).facets in members for g in self.elements
                   for h in self.elements) and all(
            self.inverse(g).facets in members for g in self.elements)

    def _byte_tables(self):
        if self._tables is None:
            nbytes = (self.facet_count + 7) // 8
            tables = np.zeros((self.order, nbytes, 256), dtype=np.uint64)
            byte_values = np.arange(256, dtype=np.uint64)
            for k, g in enumerate(self.elements):
                for b in range(nbytes):
                    for j in range(8):
                        i = 8 * b + j
                        if i < self.facet_count:
                            bit = (byte_values >> np.uint64(j)) & np.uint64(1)
                            tables[k, b] |= bit << np.uint64(g.facets[i])
            self._tables = tables
        return self._tables

    def permuted(self, masks):
        """Array of shape (order, len(masks)) with every symmetry applied."""
        masks = np.asarray(masks, dtype=np.uint64)
        tables = self._byte_tables()
        out = np.zeros((self.order, len(masks)), dtype=np.uint64)
        for b in range(tables.shape[1]):
            byte = ((masks >> np.uint64(8 * b)) & np.uint64(0xFF)).astype(np.intp)
            out |= tables[:, b, :][:, byte]
        return out

    def images(self, mask):
        """All images of one mask under symmetries and colour flips (with repeats)."""
        perm = self.permuted([mask])[:, 0]
        flips = np.array(self.flips, dtype=np.uint64)
        return (perm[:, None] ^ flips[None, :]).ravel()

    def canonical(self, mask):
        return int(self.images(mask).min())

    def canonical_many(self, masks):
        masks = np.asarray(masks, dtype=np.uint64)
        if not len(masks):
            return np.zeros(0, dtype=np.uint64)
        perm = self.permuted(masks)
        best = perm.min(axis=0)
        for f in self.flips[1:]:
            best = np.minimum(best, (perm ^ np.uint64(f)).min(axis=0))
        return best

    def orbit_size(self, mask):
        return len(np.unique(self.images(mask)))

    def stabilizer_size(self, mask):
        return int(np.count_nonzero(self.images(mask) == np.uint64(mask)))


def flip_mask(class_masks, v):
    out = 0
    for i, m in enumerate(class_masks):
        if v >> i & 1:
            out |= m
    return out


def automorphisms(p: Polytope, col: Colouring):
    """All face-lattice automorphisms mapping colour classes to colour classes."""
    n = p.facet_count
    adj = p.adjacency
    nbrs = [set(x) for x in p.neighbours]
    order, seen = [], set()
    for start in range(n):
        if start in seen:
            continue
        seen.add(start)
        queue = [start]
        while queue:
            f = queue.pop(0)
            order.append(f)
            for g in sorted(nbrs[f]):
                if g not in seen:
                    seen.add(g)
                    queue.append(g)
    degree = [len(x) for x in nbrs]
    class_size = [len(cls) for cls in col.classes()]
    faces = [f for f in p.faces if len(f.facets) >= 2]
    lattice = {(f.facets, f.dim, f.ideal) for f in faces}
    found = []
    image = [None] * n
    used = [False] * n
    cmap = {}

    def preserves_lattice():
        for f in faces:
            key = (tuple(sorted(image[i] for i in f.facets)), f.dim, f.ideal)
            if key not in lattice:
                return False
        return True

    def extend(pos):
        if pos == n:
            if preserves_lattice():
                colours = tuple(cmap[c] for c in range(col.c))
                found.append(Symmetry(tuple(image), colours))
            return
        f = order[pos]
        for g in range(n):
            if used[g] or degree[g] != degree[f]:
                continue
            cf, cg = col[f], col[g]
            if cf in cmap:
                if cmap[cf] != cg:
                    continue
            elif cg in cmap.values() or class_size[cf] != class_size[cg]:
                continue
            if any(adj[f, h] != adj[g, image[h]] for h in order[:pos]):
                continue
            added = cf not in cmap
            if added:
                cmap[cf] = cg
            image[f], used[g] = g, True
            extend(pos + 1)
            image[f], used[g] = None, False
            if added:
                del cmap[cf]

    extend(0)
    return SymmetryGroup(found, col)


# -- link predicates -----------------------------------------------------------------

class LinkOracle:
    """Collapse outcome of the full link subcomplex on a facet mask, memoized."""

    def __init__(self, p: Polytope, restarts=32, seed=0):
        self.link = dual_link(p)
        self.restarts = restarts
        self.seed = seed
        self.cache = {}
        by_size = {}
        for s in self.link.simplices:
            by_size.setdefault(len(s), []).append(sum(1 << f for f in s))
        self.simplex_ints = dict(sorted(by_size.items()))
        self.simplex_masks = None
        if p.facet_count <= 64:
            self.simplex_masks = {k: np.array(v, dtype=np.uint64)
                                  for k, v in self.simplex_ints.items()}

    def euler(self, masks):
        """Euler characteristic of the full subcomplexes on an array of masks."""
        masks = np.asarray(masks, dtype=np.uint64)
        chi = np.zeros(masks.shape, dtype=np.int64)
        for size, sm in self.simplex_masks.items():
            sign = 1 if size % 2 else -1
            if size == 1:
                chi += np.bitwise_count(masks).astype(np.int64)
                continue
            for m in sm:
                chi += sign * ((masks & m) == m)
        return chi

    def euler_int(self, mask):
        """Same as :meth:`euler` for one mask of any width."""
        chi = 0
        for size, sm in self.simplex_ints.items():
            sign = 1 if size % 2 else -1
            chi += sign * sum(1 for x in sm if mask & x == x)
        return chi

    def letter(self, mask):
        mask = int(mask)
        out = self.cache.get(mask)
        if out is None:
            keep = {f for f in self.link.vertices if mask >> f & 1}
            sub = self.link.full_subcomplex(keep)
            if sub.empty:
                out = EMPTY
            elif not sub.connected:
                out = DISCONNECTED
            else:
                cert = collapse_mod.collapse(sub.simplices, self.restarts,
                                             f"{self.seed}:link:{mask:#x}")
                out = OUTCOME_LETTERS[cert.outcome]
            self.cache[mask] = out
        return out


def _accepts(letters, kind):
    if kind == ALL_CIRCLES:
        return all(x == OUTCOME_LETTERS[CIRCLE] for x in letters)
    if kind == FIBRATION:
        return all(x == OUTCOME_LETTERS[POINT] for x in letters)
    ok = {OUTCOME_LETTERS[POINT], OUTCOME_LETTERS[CIRCLE], OUTCOME_LETTERS[GRAPH]}
    return all(x in ok for x in letters) and any(x != OUTCOME_LETTERS[POINT] for x in letters)


def _euler_ok(chi, kind):
    if kind == ALL_CIRCLES:
        return chi == 0
    if kind == FIBRATION:
        return chi == 1
    return chi <= 1


class _Scanner:
    """Vectorized filters over a range of bitmasks; one instance per worker."""

    def __init__(self, p, col, kind, group, restarts, seed):
        self.kind = kind
        self.group = group
        self.full = (1 << p.facet_count) - 1
        self.oracle = LinkOracle(p, restarts, seed)
        self.flips = group.flips
        # each ideal vertex needs one same-coloured opposite pair with different bits
        self.ideal_pairs = []
        for u in p.ideal_vertices:
            self.ideal_pairs.append([(a, b) for a, b in p.ideal_pairs(u) if col[a] == col[b]])

    def ideal_filter(self, masks):
        keep = np.ones(masks.shape, dtype=bool)
        for pairs in self.ideal_pairs:
            ok = np.zeros(masks.shape, dtype=bool)
            for a, b in pairs:
                ok |= (((masks >> np.uint64(a)) ^ (masks >> np.uint64(b))) & np.uint64(1)).astype(bool)
            keep &= ok
        return masks[keep]

    def scan(self, start, stop):
        """Canonical forms of the masks in ``[start, stop)`` that pass the
        ideal test and the Euler characteristic test on every directed link."""
        masks = np.arange(start, stop, dtype=np.uint64)
        stats = {"examined": len(masks)}
        masks = self.ideal_filter(masks)
        stats["ideal"] = len(masks)
        for f in self.flips:
            shifted = masks ^ np.uint64(f)
            nonempty = (shifted != 0) & (shifted != np.uint64(self.full))
            masks = masks[nonempty & _euler_ok(self.oracle.euler(shifted), self.kind)]
        stats["euler"] = len(masks)
        canon = set()
        for k in range(0, len(masks), CANON_BATCH):
            canon.update(self.group.canonical_many(masks[k:k + CANON_BATCH]).tolist())
        return sorted(canon), stats


_worker_scanner = None


def _init_worker(args):
    global _worker_scanner
    _worker_scanner = _Scanner(*args)


def _scan_chunk(bounds):
    return _worker_scanner.scan(*bounds)


# -- census -----------------------------------------------------------------------

@dataclass(frozen=True)
class StateClass:
    mask: int  # lexicographically minimal orbit element
    orbit_size: int
    status: str
    critical_points: int
    outcomes: str

    def line(self, facet_count):
        width = (facet_count + 3) // 4
        return (f"0x{self.mask:0{width}x} {self.orbit_size} {self.status} "
                f"{self.critical_points} {self.outcomes}")


@dataclass
class Census:
    classes: list[StateClass]
    group_order: int
    partial: bool
    stats: dict = field(default_factory=dict)

    def lines(self, facet_count):
        return [c.line(facet_count) for c in self.classes]


def enumerate_states(p: Polytope, col: Colouring, kind=ALL_CIRCLES, budget=None,
                     threads=1, restarts=32, seed=0, group=None):
    """Classes of ±1 states passing ``kind``, up to symmetry and colour flips.

    The cheap tests run on every bitmask; collapsing and ``verify`` run once
    per surviving class, on its canonical representative.  ``budget`` caps
    the number of bitmasks examined; when it cuts the range short the
    census is returned with ``partial=True``.
    """
    if kind not in FILTERS:
        raise ValueError(f"unknown filter {kind!r}; expected one of {FILTERS}")
    if p.facet_count > 64:
        raise ValueError("bitmask search supports at most 64 facets")
    group = group or automorphisms(p, col)
    total = 1 << p.facet_count
    stop = total if budget is None else min(total, budget)
    chunk = 1 << min(CHUNK_BITS, p.facet_count)
    bounds = [(a, min(a + chunk, stop)) for a in range(0, stop, chunk)]
    args = (p, col, kind, group, restarts, seed)
    if threads > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(threads, initializer=_init_worker, initargs=(args,)) as pool:
            results = list(pool.map(_scan_chunk, bounds))
    else:
        scanner = _Scanner(*args)
        results = [scanner.scan(a, b) for a, b in bounds]
    stats = {}
    for _, st in results:
        for k, v in st.items():
            stats[k] = stats.get(k, 0) + v
    candidates = sorted({m for found, _ in results for m in found})
    stats["candidate_classes"] = len(candidates)
    oracle = LinkOracle(p, restarts, seed)
    link = oracle.link
    classes = []
    for mask in candidates:
        if not _accepts([oracle.letter(mask ^ f) for f in group.flips], kind):
            continue
        state = RealState.from_bits(mask, p.facet_count)
        verdict = verify(p, col, state, restarts, f"{seed}:{mask:#x}", link=link)
        classes.append(StateClass(mask, group.orbit_size(mask), verdict.status,
                                  verdict.critical_points, verdict.outcomes))
    stats["classes"] = len(classes)
    return Census(classes, group.order, stop < total, stats)


# -- quaternion states ----------------------------------------------------------------

def quaternion_orbit_state(multiplier=(0.0, 1.0, 0.0, 0.0)):
    """±1 state on the 24-cell from the orbits of left multiplication.

    Left multiplication by a unit of order 4 preserves each Q8 coset of
    T*24 and splits it into two orbits of four.  The orbit holding the
    coset's first element gets +1, the other -1.
    """
    group = quat.QuaternionGroup(quat.binary_tetrahedral())
    q = group.index(multiplier)
    values = [0] * len(group)
    for coset in group.left_cosets(group.subgroup_indices(quat.quaternion_group_q8())):
        g = coset[0]
        orbit = {g}
        h = group.mul(q, g)
        while h != g:
            orbit.add(h)
            h = group.mul(q, h)
        if len(orbit) != 4 or not orbit <= set(coset):
            raise ValueError("multiplier does not split the Q8 cosets into orbits of four")
        for h in coset:
            values[h] = 1 if h in orbit else -1
    return RealState(tuple(values))


class TransversalError(ValueError):
    pass


def coset_state_120(multipliers, base, icosahedral=None, tetrahedral=None):
    """Extend a state on T*24 to I*120: facet ``q t`` gets ``base[t]``.

    ``multipliers`` are indices into I*120 (sorted element order) and must
    hit each left coset of T*24 exactly once.
    """
    ico = icosahedral or quat.QuaternionGroup(quat.binary_icosahedral())
    tet_elems = quat.binary_tetrahedral()
    tet = tetrahedral or ico.subgroup_indices(tet_elems)
    values = [None] * len(ico)
    for q in multipliers:
        for k, t in enumerate(tet):
            f = ico.mul(q, t)
            if values[f] is not None:
                raise TransversalError("multipliers repeat a coset of T*24")
            values[f] = base[k]
    if any(x is None for x in values):
        raise TransversalError("multipliers miss a coset of T*24")
    return RealState(tuple(values))


@dataclass
class CosetSearchResult:
    multipliers: tuple[int, ...] | None
    state: RealState | None
    verdict: object
    examined: int


def coset_search(p: Polytope, col: Colouring, base, restarts=32, seed=0, limit=None):
    """First transversal (in a fixed order) whose coset state is perfect.

    The identity represents the T*24 coset.  Multipliers in one coset that
    induce the same pattern on it are tried once.
    """
    ico = quat.QuaternionGroup(quat.binary_icosahedral())
    tet = ico.subgroup_indices(quat.binary_tetrahedral())
    cosets = ico.left_cosets(tet)
    choices = []
    for k, coset in enumerate(cosets):
        options = [ico.identity] if ico.identity in coset else coset
        seen = {}
        for q in options:
            key = tuple(sorted((ico.mul(q, t), base[j] > 0) for j, t in enumerate(tet)))
            seen.setdefault(key, q)
        choices.append(sorted(seen.values()))
    oracle = LinkOracle(p, restarts, seed)
    class_masks = [sum(1 << f for f in cls) for cls in col.classes()]
    flips = [flip_mask(class_masks, v) for v in range(1 << col.c)]
    full = (1 << p.facet_count) - 1
    link = oracle.link
    examined = 0
    total = math.prod(len(c) for c in choices)
    for index in range(total):
        if limit is not None and examined >= limit:
            break
        pick = []
        rest = index
        for c in reversed(choices):
            rest, r = divmod(rest, len(c))
            pick.append(c[r])
        multipliers = tuple(reversed(pick))
        examined += 1
        state = coset_state_120(multipliers, base, ico, tet)
        mask = state.to_bits()
        shifted = [mask ^ f for f in flips]
        if any(m in (0, full) for m in shifted):
            continue
        if any(oracle.euler_int(m) > 1 for m in shifted):
            continue
        letters = [oracle.letter(m) for m in shifted]
        if not _accepts(letters, PERFECT):
            continue
        verdict = verify(p, col, state, restarts, f"{seed}:{mask:#x}", link=link)
        if verdict.status == PERFECT:
            return CosetSearchResult(multipliers, state, verdict, examined)
    return CosetSearchResult(None, None, None, examined)

