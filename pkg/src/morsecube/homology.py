"""Exact ranks and integral first homology of small chain complexes.

Matrices are sparse: a list of columns, each a ``{row: value}`` dict.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

# three primes just below 2**30
PRIMES = (1073741789, 1073741783, 1073741741)


def rank_mod_p(columns, p):
    """Rank over GF(p) by column reduction on the lowest nonzero row."""
    pivots = {}
    rank = 0
    for col in columns:
        col = {r: v % p for r, v in col.items() if v % p}
        while col:
            low = max(col)
            other = pivots.get(low)
            if other is None:
                inv = pow(col[low], -1, p)
                pivots[low] = {r: v * inv % p for r, v in col.items()}
                rank += 1
                break
            factor = col[low]
            for r, v in other.items():
                nv = (col.get(r, 0) - factor * v) % p
                if nv:
                    col[r] = nv
                else:
                    col.pop(r, None)
    return rank


def rank_rational(columns):
    """Exact rank over Q (Fraction arithmetic, same reduction scheme)."""
    pivots = {}
    rank = 0
    for col in columns:
        col = {r: Fraction(v) for r, v in col.items() if v}
        while col:
            low = max(col)
            other = pivots.get(low)
            if other is None:
                lead = col[low]
                pivots[low] = {r: v / lead for r, v in col.items()}
                rank += 1
                break
            factor = col[low]
            for r, v in other.items():
                nv = col.get(r, 0) - factor * v
                if nv:
                    col[r] = nv
                else:
                    col.pop(r, None)
    return rank


def rank(columns, primes=PRIMES):
    """Rank over Q: agreeing modular ranks, exact fallback on disagreement.

    A modular rank never exceeds the rational rank, so agreement across
    several large primes is taken as the rational rank.
    """
    columns = list(columns)
    ranks = {rank_mod_p(columns, p) for p in primes}
    if len(ranks) == 1:
        return ranks.pop()
    return rank_rational(columns)


# -- integral Smith form ------------------------------------------------------

def smith_form(matrix):
    """Smith normal form of a dense integer matrix (list of rows).

    Returns ``(diag, uinv)`` where ``diag`` lists the nonzero invariant
    factors and ``uinv`` is the inverse of the left transform ``U`` in
    ``U A V = S``.  Column ``i`` of ``uinv`` is the i-th new generator
    of the cokernel expressed in the old ones.
    """
    A = [list(row) for row in matrix]
    m = len(A)
    n = len(A[0]) if m else 0
    uinv = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        for row in uinv:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst -= q * row_src
        if q == 0:
            return
        rs, rd = A[src], A[dst]
        for k in range(n):
            if rs[k]:
                rd[k] -= q * rs[k]
        for row in uinv:
            row[src] += q * row[dst]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]

    def add_col(dst, src, q):
        if q == 0:
            return
        for row in A:
            if row[src]:
                row[dst] -= q * row[src]

    diag = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            piv = A[t][t]
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // piv)
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // piv)
                    if A[t][j]:
                        done = False
            if done:
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if A[i][j] % piv:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                # restore divisibility: fold the offending row into row t
                add_row(t, bad, -1)
                continue
            # move the smallest remaining entry of row/column t to the pivot
            best = (abs(A[t][t]), t, t)
            for i in range(t + 1, m):
                if A[i][t] and abs(A[i][t]) < best[0]:
                    best = (abs(A[i][t]), i, t)
            for j in range(t + 1, n):
                if A[t][j] and abs(A[t][j]) < best[0]:
                    best = (abs(A[t][j]), t, j)
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
        if A[t][t] < 0:
            A[t] = [-v for v in A[t]]
            for row in uinv:
                row[t] = -row[t]
        diag.append(A[t][t])
        t += 1
    return diag, uinv


@dataclass
class Quotient:
    """Finitely generated abelian group Z^n / <relations>."""

    rank: int
    torsion: list[int]
    # free generators as integer combinations {generator: coefficient}
    free_basis: list[dict] = field(default_factory=list)


def abelian_quotient(ngens, relations):
    """Present ``Z^ngens`` modulo the span of ``relations`` (dicts gen -> int).

    Unit pivots are eliminated sparsely first; the residual goes through a
    dense Smith form.
    """
    rels = [{g: v for g, v in r.items() if v} for r in relations]
    rels = [r for r in rels if r]
    by_gen = {}
    for k, r in enumerate(rels):
        for g in r:
            by_gen.setdefault(g, set()).add(k)
    alive = set(range(len(rels)))
    eliminated = set()
    queue = deque(range(len(rels)))
    while queue:
        k = queue.popleft()
        if k not in alive:
            continue
        r = rels[k]
        unit = None
        for g, v in r.items():
            if v in (1, -1) and (unit is None or len(by_gen[g]) < len(by_gen[unit])):
                unit = g
        if unit is None:
            continue
        sign = r[unit]
        alive.discard(k)
        for g in r:
            by_gen[g].discard(k)
        eliminated.add(unit)
        for k2 in list(by_gen.get(unit, ())):
            r2 = rels[k2]
            q = r2[unit] * sign
            for g, v in r.items():
                nv = r2.get(g, 0) - q * v
                if nv:
                    if g not in r2:
                        by_gen[g].add(k2)
                    r2[g] = nv
                else:
                    if g in r2:
                        del r2[g]
                        by_gen[g].discard(k2)
            if not r2:
                alive.discard(k2)
            else:
                queue.append(k2)
        by_gen.pop(unit, None)
    remaining = [g for g in range(ngens) if g not in eliminated]
    residual = [rels[k] for k in sorted(alive)]
    involved = sorted({g for r in residual for g in r})
    free = [{g: 1} for g in remaining if g not in set(involved)]
    if not involved:
        return Quotient(len(free), [], free)
    pos = {g: i for i, g in enumerate(involved)}
    dense = [[0] * len(residual) for _ in involved]
    for j, r in enumerate(residual):
        for g, v in r.items():
            dense[pos[g]][j] = v
    diag, uinv = smith_form(dense)
    torsion = [d for d in diag if d > 1]
    for i in range(len(diag), len(involved)):
        vec = {involved[j]: uinv[j][i] for j in range(len(involved)) if uinv[j][i]}
        free.append(vec)
    return Quotient(len(free), torsion, free)


# -- graphs and 2-complexes ----------------------------------------------------

def spanning_forest(nverts, edges, root=0):
    """BFS spanning forest of a multigraph.

    Returns ``(tree_edges, parent_edge, order)``; ``parent_edge[v]`` is
    ``(edge index, sign)`` with sign +1 when the edge is traversed along its
    orientation to reach ``v``.
    """
    incident = [[] for _ in range(nverts)]
    for k, (a, b) in enumerate(edges):
        incident[a].append((k, b, 1))
        incident[b].append((k, a, -1))
    parent_edge = [None] * nverts
    seen = [False] * nverts
    tree = set()
    order = []
    roots = [root] + [v for v in range(nverts) if v != root]
    for r in roots:
        if seen[r]:
            continue
        seen[r] = True
        dq = deque([r])
        while dq:
            v = dq.popleft()
            order.append(v)
            for k, w, sign in incident[v]:
                if not seen[w]:
                    seen[w] = True
                    parent_edge[w] = (k, sign)
                    tree.add(k)
                    dq.append(w)
    return tree, parent_edge, order


def tree_potential(nverts, edges, weights, root=0):
    """Integrate edge weights along a spanning forest from ``root``."""
    tree, parent_edge, order = spanning_forest(nverts, edges, root)
    pot = [None] * nverts
    for v in order:
        pe = parent_edge[v]
        if pe is None:
            pot[v] = 0
            continue
        k, sign = pe
        a, b = edges[k]
        prev = a if sign == 1 else b
        pot[v] = pot[prev] + sign * weights[k]
    return pot, tree


@dataclass
class H1:
    rank: int
    torsion: list[int]
    # free basis of H1 as 1-chains {edge index: coefficient}
    basis: list[dict]

    def periods(self, cochain):
        """Evaluate an edge cochain (sequence indexed by edge) on the basis."""
        return [sum(c * cochain[e] for e, c in z.items()) for z in self.basis]


def first_homology(nverts, edges, faces):
    """Integral H1 of a 2-complex.

    ``edges`` are ``(tail, head)`` pairs; ``faces`` are boundary chains
    ``{edge index: coefficient}``.  Cycles are coordinatised by the
    non-tree edges of a spanning forest.
    """
    tree, parent_edge, _ = spanning_forest(nverts, edges)
    nontree = [k for k in range(len(edges)) if k not in tree]
    gen = {k: i for i, k in enumerate(nontree)}
    rels = []
    for f in faces:
        rels.append({gen[e]: c for e, c in f.items() if e in gen})
    q = abelian_quotient(len(nontree), rels)

    def path_to_root(v):
        # the tree path from the root to v, as a chain
        chain = {}
        while parent_edge[v] is not None:
            k, sign = parent_edge[v]
            a, b = edges[k]
            chain[k] = chain.get(k, 0) + sign
            v = a if sign == 1 else b
        return chain

    def fundamental_cycle(k):
        # root to a through the tree, edge k from a to b, then b back to the root
        a, b = edges[k]
        chain = {k: 1}
        for e, c in path_to_root(a).items():
            chain[e] = chain.get(e, 0) + c
        for e, c in path_to_root(b).items():
            chain[e] = chain.get(e, 0) - c
        return {e: c for e, c in chain.items() if c}

    basis = []
    for vec in q.free_basis:
        z = {}
        for g, c in vec.items():
            for e, v in fundamental_cycle(nontree[g]).items():
                z[e] = z.get(e, 0) + c * v
        basis.append({e: c for e, c in z.items() if c})
    return H1(q.rank, q.torsion, basis)


def simplicial_betti(simplices, max_dim=None, primes=PRIMES):
    """Rational Betti numbers of a finite simplicial complex.

    ``simplices`` is an iterable of sorted tuples (closed under faces).
    """
    by_dim = {}
    for s in simplices:
        by_dim.setdefault(len(s) - 1, []).append(tuple(s))
    if not by_dim:
        return []
    top = max(by_dim) if max_dim is None else max_dim
    index = {d: {s: i for i, s in enumerate(sorted(by_dim.get(d, [])))} for d in range(top + 1)}
    ranks = [0] * (top + 2)
    for d in range(1, top + 1):
        cols = []
        for s in index[d]:
            col = {}
            for j in range(len(s)):
                face = s[:j] + s[j + 1:]
                col[index[d - 1][face]] = (-1) ** j
            cols.append(col)
        ranks[d] = rank(cols, primes) if cols else 0
    return [len(index[d]) - ranks[d] - ranks[d + 1] for d in range(top + 1)]
