"""The cube complex dual to the tessellation of a colour-mirrored polytope.

Vertices of the complex are the vectors ``v`` of Z_2^c, stored as int
bitmasks (bit ``i`` is colour ``i``).  A k-cube is a pair ``(face, rep)``:
``face`` is a finite face of codimension k and ``rep`` the orbit
representative, zero on the colours of the face's facets.  The k-cube
spans the vertices ``rep + span(e_i)`` over those colours.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from . import homology
from .polytope import Colouring, Polytope

DEFAULT_CELL_BUDGET = 10 ** 8


class CellBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class CubeCell:
    face: tuple[int, ...]  # containing facets of the dual face of P
    rep: int

    @property
    def dim(self):
        return len(self.face)


def _masks_with_zeros(c, zero_bits):
    free = [i for i in range(c) if not zero_bits >> i & 1]
    out = []
    for k in range(1 << len(free)):
        m = 0
        for j, bit in enumerate(free):
            if k >> j & 1:
                m |= 1 << bit
        out.append(m)
    return out


class CubeComplex:
    """Cell census and integral boundary maps of the dual cube complex."""

    def __init__(self, p: Polytope, col: Colouring, cell_budget=DEFAULT_CELL_BUDGET):
        self.polytope = p
        self.colouring = col
        self.c = col.c
        self.n = p.dim
        finite = p.finite_faces
        if (1 << self.c) * len(finite) > cell_budget:
            raise CellBudgetError(
                f"2^{self.c} x {len(finite)} faces exceeds the cell budget {cell_budget}")
        self.cells = [[] for _ in range(self.n + 1)]
        for face in sorted(finite, key=lambda f: f.facets):
            k = p.dim - face.dim
            zeros = 0
            for i in face.facets:
                zeros |= 1 << col[i]
            for rep in _masks_with_zeros(self.c, zeros):
                self.cells[k].append(CubeCell(face.facets, rep))
        self.index = [{cell: i for i, cell in enumerate(cells)} for cells in self.cells]
        self.boundary = [None] + [self._boundary(k) for k in range(1, self.n + 1)]

    def _boundary(self, k):
        col = self.colouring
        idx = self.index[k - 1]
        columns = []
        for cell in self.cells[k]:
            by_colour = sorted(cell.face, key=lambda f: col[f])
            chain = {}
            for j, facet in enumerate(by_colour, start=1):
                rest = tuple(f for f in cell.face if f != facet)
                for eps in (0, 1):
                    target = CubeCell(rest, cell.rep | (eps << col[facet]))
                    chain[idx[target]] = (-1) ** (j + eps)
            columns.append(chain)
        return columns

    # -- census -----------------------------------------------------------

    def cell_counts(self):
        return tuple(len(c) for c in self.cells)

    def euler_characteristic(self):
        return sum((-1) ** k * len(c) for k, c in enumerate(self.cells))

    @property
    def edges(self):
        """Edges as (tail, head, facet) with tail -> head the canonical direction."""
        col = self.colouring
        return [(cell.rep, cell.rep | 1 << col[cell.face[0]], cell.face[0])
                for cell in self.cells[1]]

    def check_boundary_squared(self):
        for k in range(2, self.n + 1):
            for chain in self.boundary[k]:
                total = {}
                for i, a in chain.items():
                    for j, b in self.boundary[k - 1][i].items():
                        total[j] = total.get(j, 0) + a * b
                if any(total.values()):
                    return False
        return True

    # -- homology ---------------------------------------------------------

    def boundary_ranks(self):
        ranks = [0] * (self.n + 2)
        for k in range(1, self.n + 1):
            ranks[k] = homology.rank(self.boundary[k]) if self.boundary[k] else 0
        return ranks

    @cached_property
    def betti(self):
        ranks = self.boundary_ranks()
        return tuple(len(self.cells[k]) - ranks[k] - ranks[k + 1] for k in range(self.n + 1))

    @cached_property
    def h1(self):
        """Integral H1 with a free basis of edge cycles (cached per complex)."""
        edges = [(a, b) for a, b, _ in self.edges]
        squares = self.boundary[2] if self.n >= 2 else []
        return homology.first_homology(1 << self.c, edges, squares)

    def edge_cochain(self, state):
        return [state[f] for _, _, f in self.edges]

    def cocycle_defects(self, state):
        """Coboundary of the state cochain on every square (all zero)."""
        values = self.edge_cochain(state)
        return [sum(coef * values[e] for e, coef in sq.items()) for sq in self.boundary[2]]

    def balanced_gap(self):
        """b1 minus the dimension of the balanced-state subspace."""
        return self.betti[1] - (self.polytope.facet_count - self.c)


def build_cube_complex(p, col, cell_budget=DEFAULT_CELL_BUDGET):
    cx = CubeComplex(p, col, cell_budget)
    if not cx.check_boundary_squared():
        raise AssertionError("boundary maps do not square to zero")
    return cx


def betti_numbers(cx: CubeComplex):
    return cx.betti


# -- cusps ------------------------------------------------------------------

@dataclass(frozen=True)
class Cusp:
    vertex: int  # index into polytope.ideal_vertices
    members: frozenset  # vertices v of the complex in this component


@dataclass
class CuspCensus:
    cusps: list[Cusp]
    per_vertex: list[int]

    @property
    def count(self):
        return len(self.cusps)


def cusp_census(p: Polytope, col: Colouring):
    """Components of (v, ideal vertex u) under v -> v + e_colour(F), F at u."""
    c = col.c
    cusps = []
    per_vertex = []
    for u_idx, u in enumerate(p.ideal_vertices):
        gens = {1 << col[f] for f in u.facets}
        seen = set()
        count = 0
        for start in range(1 << c):
            if start in seen:
                continue
            comp = {start}
            stack = [start]
            while stack:
                v = stack.pop()
                for g in gens:
                    w = v ^ g
                    if w not in comp:
                        comp.add(w)
                        stack.append(w)
            seen |= comp
            cusps.append(Cusp(u_idx, frozenset(comp)))
            count += 1
        per_vertex.append(count)
    return CuspCensus(cusps, per_vertex)


# -- periods and levels --------------------------------------------------------

class NonIntegralClassError(ValueError):
    pass


@dataclass
class Periods:
    periods: list
    integral: bool
    levels: dict | None  # vertex -> Fraction in [0, 1)


def periods_and_levels(cx: CubeComplex, state):
    values = cx.edge_cochain(state)
    periods = [Fraction(x) for x in cx.h1.periods(values)]
    integral = all(x.denominator == 1 for x in periods)
    levels = None
    if integral:
        levels = vertex_levels(cx, state)
    return Periods(periods, integral, levels)


def vertex_levels(cx: CubeComplex, state):
    """Levels in R/Z along a spanning tree from vertex 0; class must be integral."""
    h1 = cx.h1
    values = cx.edge_cochain(state)
    if any(Fraction(x).denominator != 1 for x in h1.periods(values)):
        raise NonIntegralClassError("levels requested for a non-integral class")
    edges = [(a, b) for a, b, _ in cx.edges]
    pot, _ = homology.tree_potential(1 << cx.c, edges, [Fraction(x) for x in values])
    return {v: pot[v] % 1 for v in range(1 << cx.c)}


def cusp_restriction(cx: CubeComplex, state, cusp_id, census=None):
    """``'trivial'`` iff the state's periods vanish on the cusp's 1-cycles."""
    p, col = cx.polytope, cx.colouring
    census = census or cusp_census(p, col)
    if not 0 <= cusp_id < census.count:
        raise IndexError(f"invalid cusp id {cusp_id}")
    cusp = census.cusps[cusp_id]
    u = set(p.ideal_vertices[cusp.vertex].facets)
    verts = sorted(cusp.members)
    vpos = {v: i for i, v in enumerate(verts)}
    edges, values, epos = [], [], {}
    for k, cell in enumerate(cx.cells[1]):
        if cell.face[0] in u and cell.rep in cusp.members:
            epos[k] = len(edges)
            a, b, f = cx.edges[k]
            edges.append((vpos[a], vpos[b]))
            values.append(Fraction(state[f]))
    squares = []
    for k, cell in enumerate(cx.cells[2]):
        if set(cell.face) <= u and cell.rep in cusp.members:
            squares.append({epos[e]: coef for e, coef in cx.boundary[2][k].items()})
    h1 = homology.first_homology(len(verts), edges, squares)
    periods = h1.periods(values)
    return "trivial" if all(x == 0 for x in periods) else "nontrivial"
