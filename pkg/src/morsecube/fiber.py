"""Triangulations of singular fibers by coning separating surfaces.

At a vertex ``v`` of the cube complex, a 2-face of the polytope separates
when its two facets have opposite status.  For every vertex at a given
level and every separating triangle there, the fiber gets one
tetrahedron: the cone from the centre of the polytope copy over the
triangle.  Corner 0 of each tetrahedron is the apex; corners 1..3 are the
triangle's polytope vertices in increasing index order.  Face ``f`` is
the face opposite corner ``f``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations

from . import homology
from .cubecomplex import build_cube_complex, periods_and_levels
from .morse import RealState, status_vector
from .polytope import Colouring, Polytope

APEX = "apex"
IDEAL = "ideal"


class UnsupportedPolytopeError(ValueError):
    pass


class FiberError(ValueError):
    pass


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


# -- separating surfaces ---------------------------------------------------------

class TriangleGeometry:
    """Vertex and edge incidences of the triangular 2-faces of a 4-polytope."""

    def __init__(self, p: Polytope):
        if p.dim != 4:
            raise UnsupportedPolytopeError("fibers need a 4-dimensional polytope")
        self.polytope = p
        vertex_index = {v.facets: k for k, v in enumerate(p.vertices)}
        self.edges = {}  # edge facets -> (vertex, vertex)
        for e in p.faces_of_dim(1):
            ends = [vertex_index[v.facets] for v in p.vertices if set(e.facets) <= set(v.facets)]
            if len(ends) != 2:
                raise UnsupportedPolytopeError(f"edge {e.facets} has {len(ends)} vertices")
            self.edges[e.facets] = tuple(sorted(ends))
        self.triangle_vertices = {}
        self.triangle_edges = {}
        for t in p.faces_of_dim(2):
            edges = [e for e in self.edges if set(t.facets) <= set(e)]
            verts = sorted({x for e in edges for x in self.edges[e]})
            if len(edges) != 3 or len(verts) != 3:
                raise UnsupportedPolytopeError(
                    f"2-face {t.facets} is not a triangle ({len(verts)} vertices)")
            self.triangle_vertices[t.facets] = tuple(verts)
            self.triangle_edges[t.facets] = tuple(sorted(edges))


@dataclass
class SeparatingSurface:
    owner: int
    triangles: tuple  # 2-faces (facet pairs), sorted
    edge_triangles: dict  # polytope edge -> (triangle, triangle)
    vertices: frozenset  # polytope vertex indices

    @property
    def euler_characteristic(self):
        return len(self.vertices) - len(self.edge_triangles) + len(self.triangles)

    def vertex_degrees(self, geometry: TriangleGeometry):
        deg = Counter()
        for t in self.triangles:
            deg.update(geometry.triangle_vertices[t])
        return dict(sorted(deg.items()))


def separating_surface(p: Polytope, col: Colouring, s, v, geometry=None):
    geometry = geometry or TriangleGeometry(p)
    status = status_vector(col, s, v)
    triangles = tuple(sorted(t for t in geometry.triangle_vertices
                             if status[t[0]] != status[t[1]]))
    incident = {}
    for t in triangles:
        for e in geometry.triangle_edges[t]:
            incident.setdefault(e, []).append(t)
    for e, ts in incident.items():
        if len(ts) != 2:
            raise FiberError(f"edge {e} lies on {len(ts)} separating triangles at vertex {v}")
    verts = frozenset(x for t in triangles for x in geometry.triangle_vertices[t])
    return SeparatingSurface(v, triangles, {e: tuple(ts) for e, ts in incident.items()}, verts)


# -- triangulations ---------------------------------------------------------------

@dataclass(frozen=True)
class Tetrahedron:
    owner: int | None
    triangle: tuple | None
    labels: tuple  # corner labels: ("apex", v) then ("vertex", k) x3


@dataclass(frozen=True)
class VertexClass:
    kind: str  # apex or ideal
    corners: tuple  # (tet, corner) pairs


@dataclass
class FiberTriangulation:
    tets: list[Tetrahedron]
    neighbours: list[list[int]]
    perms: list[list[tuple[int, int, int, int]]]
    vertex_classes: list[VertexClass] = field(default_factory=list)

    def __len__(self):
        return len(self.tets)

    def check_involution(self):
        for a in range(len(self.tets)):
            for f in range(4):
                b, perm = self.neighbours[a][f], self.perms[a][f]
                g = perm[f]
                if self.neighbours[b][g] != a:
                    return False
                back = self.perms[b][g]
                if any(back[perm[c]] != c for c in range(4)):
                    return False
                if (b, g) == (a, f):
                    return False
        return True

    def compute_vertex_classes(self):
        """Corner classes under the face identifications, flagged apex or ideal."""
        uf = _UnionFind()
        for a in range(len(self.tets)):
            for f in range(4):
                b, perm = self.neighbours[a][f], self.perms[a][f]
                for c in range(4):
                    if c != f:
                        uf.union((a, c), (b, perm[c]))
        groups = {}
        for a in range(len(self.tets)):
            for c in range(4):
                groups.setdefault(uf.find((a, c)), []).append((a, c))
        out = []
        for root in sorted(groups):
            corners = tuple(sorted(groups[root]))
            kind = APEX if any(self.tets[a].labels and self.tets[a].labels[c][0] == APEX
                               for a, c in corners) else IDEAL
            out.append(VertexClass(kind, corners))
        self.vertex_classes = out
        return out


def _perm_sign(perm):
    sign = 1
    for i, j in combinations(range(4), 2):
        if perm[i] > perm[j]:
            sign = -sign
    return sign


def build_fiber(p: Polytope, col: Colouring, s, level, cx=None, geometry=None):
    """Cone every separating triangle at the vertices of the given level."""
    s = s if isinstance(s, RealState) else RealState(tuple(s))
    geometry = geometry or TriangleGeometry(p)
    if not all(v.ideal for v in p.vertices):
        raise UnsupportedPolytopeError("the cone recipe needs every polytope vertex ideal")
    cx = cx or build_cube_complex(p, col)
    per = periods_and_levels(cx, s)
    if not per.integral:
        raise FiberError("the state's class is not integral")
    level = Fraction(level) % 1
    owners = [v for v in range(1 << col.c) if per.levels[v] == level]
    if not owners:
        raise FiberError(f"no vertex of the cube complex has level {level}")
    surfaces = {v: separating_surface(p, col, s, v, geometry) for v in owners}
    index = {}
    tets = []
    for v in owners:
        for t in surfaces[v].triangles:
            index[v, t] = len(tets)
            labels = ((APEX, v),) + tuple(("vertex", x) for x in geometry.triangle_vertices[t])
            tets.append(Tetrahedron(v, t, labels))
    neighbours = [[None] * 4 for _ in tets]
    perms = [[None] * 4 for _ in tets]
    for (v, t), a in index.items():
        partner = v ^ (1 << col[t[0]]) ^ (1 << col[t[1]])
        if per.levels[partner] != level or (partner, t) not in index:
            raise FiberError(f"base of triangle {t} at vertex {v} has no partner at {partner}")
        neighbours[a][0] = index[partner, t]
        perms[a][0] = (0, 1, 2, 3)
        corners = geometry.triangle_vertices[t]
        surface = surfaces[v]
        for k in (1, 2, 3):
            ends = tuple(x for j, x in enumerate(corners, start=1) if j != k)
            edge = next(e for e in geometry.triangle_edges[t] if geometry.edges[e] == ends)
            other = next(u for u in surface.edge_triangles[edge] if u != t)
            b = index[v, other]
            other_corners = geometry.triangle_vertices[other]
            pos = {x: j for j, x in enumerate(other_corners, start=1)}
            far = next(j for j, x in enumerate(other_corners, start=1) if x not in ends)
            perm = [0, 0, 0, 0]
            for j, x in enumerate(corners, start=1):
                perm[j] = pos[x] if j != k else far
            neighbours[a][k] = b
            perms[a][k] = tuple(perm)
    tri = FiberTriangulation(tets, neighbours, perms)
    if not tri.check_involution():
        raise FiberError("face gluings are not an involution")
    tri.compute_vertex_classes()
    return tri


# -- invariants ------------------------------------------------------------------

@dataclass
class FiberReport:
    tetrahedra: int
    components: int
    orientable: bool
    valences: dict  # valence -> number of edge classes
    vertex_links: list  # (kind, link Euler characteristic) per vertex class
    h1_rank: int
    h1_torsion: list

    @property
    def vertex_count(self):
        return len(self.vertex_links)

    @property
    def all_tori(self):
        return all(chi == 0 for _, chi in self.vertex_links)

    def kinds(self):
        return dict(sorted(Counter(kind for kind, _ in self.vertex_links).items()))


def _face_key(t: FiberTriangulation, a, f):
    b, g = t.neighbours[a][f], t.perms[a][f][f]
    return min((a, f), (b, g))


def edge_cycles(t: FiberTriangulation):
    """Walk around each edge class.

    Returns a list of cycles; each is a list of ``((tet, face), sign)`` face
    crossings, the sign telling whether the crossing agrees with the
    orientation of the dual edge (lower face key to higher).
    """
    seen = set()
    cycles = []
    for a0 in range(len(t.tets)):
        for e0 in combinations(range(4), 2):
            if (a0, e0) in seen:
                continue
            c0, d0 = (x for x in range(4) if x not in e0)
            a, (x, y), exit_face = a0, e0, c0
            crossings = []
            start = (a0, tuple(sorted(e0)), c0)
            while True:
                seen.add((a, tuple(sorted((x, y)))))
                b = t.neighbours[a][exit_face]
                perm = t.perms[a][exit_face]
                entry = perm[exit_face]
                key = _face_key(t, a, exit_face)
                crossings.append((key, 1 if key == (a, exit_face) else -1))
                a, x, y = b, perm[x], perm[y]
                exit_face = next(z for z in range(4) if z not in (x, y, entry))
                if (a, tuple(sorted((x, y))), exit_face) == start:
                    break
            cycles.append(crossings)
    return cycles


def _orientation(t: FiberTriangulation):
    """Components and orientability by propagating corner orientations."""
    sign = [None] * len(t.tets)
    components = 0
    orientable = True
    for root in range(len(t.tets)):
        if sign[root] is not None:
            continue
        components += 1
        sign[root] = 1
        stack = [root]
        while stack:
            a = stack.pop()
            for f in range(4):
                b = t.neighbours[a][f]
                want = -_perm_sign(t.perms[a][f]) * sign[a]
                if sign[b] is None:
                    sign[b] = want
                    stack.append(b)
                elif sign[b] != want:
                    orientable = False
    return components, orientable


def _link_euler(t: FiberTriangulation, vc: VertexClass):
    # link vertices are edge ends (tet, corner, other corner) up to gluing
    uf = _UnionFind()
    corners = set(vc.corners)
    for a, c in corners:
        for d in range(4):
            if d == c:
                continue
            uf.find((a, c, d))
            for f in range(4):
                if f in (c, d):
                    continue
                b, perm = t.neighbours[a][f], t.perms[a][f]
                uf.union((a, c, d), (b, perm[c], perm[d]))
    link_vertices = len({uf.find((a, c, d)) for a, c in corners for d in range(4) if d != c})
    faces = len(corners)
    return link_vertices - 3 * faces // 2 + faces


def fiber_report(t: FiberTriangulation):
    components, orientable = _orientation(t)
    cycles = edge_cycles(t)
    valences = dict(sorted(Counter(len(c) for c in cycles).items()))
    if not t.vertex_classes:
        t.compute_vertex_classes()
    links = [(vc.kind, _link_euler(t, vc)) for vc in t.vertex_classes]
    # the dual spine: tetrahedra, glued face pairs and edge cycles
    dual = sorted({_face_key(t, a, f) for a in range(len(t.tets)) for f in range(4)})
    dual_index = {k: i for i, k in enumerate(dual)}
    dual_edges = []
    for a, f in dual:
        dual_edges.append((a, t.neighbours[a][f]))
    cells = []
    for cyc in cycles:
        chain = {}
        for key, sign in cyc:
            chain[dual_index[key]] = chain.get(dual_index[key], 0) + sign
        cells.append({k: v for k, v in chain.items() if v})
    h1 = homology.first_homology(len(t.tets), dual_edges, cells)
    return FiberReport(len(t.tets), components, orientable, valences, links,
                       h1.rank, h1.torsion)


# -- text format -----------------------------------------------------------------

class TriangulationFormatError(ValueError):
    pass


def format_triangulation(t: FiberTriangulation):
    lines = [f"tets {len(t.tets)}"]
    for a in range(len(t.tets)):
        nbrs = " ".join(str(b) for b in t.neighbours[a])
        perms = " ".join("".join(str(x) for x in p) for p in t.perms[a])
        lines.append(f"{a} : {nbrs} : {perms}")
    lines.append("vertices:")
    for k, vc in enumerate(t.vertex_classes):
        corners = " ".join(f"{a}:{c}" for a, c in vc.corners)
        lines.append(f"{k} {vc.kind} : {corners}")
    return "\n".join(lines) + "\n"


def export_triangulation(t: FiberTriangulation, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_triangulation(t))


def parse_triangulation(text):
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("tets "):
        raise TriangulationFormatError("first line must be 'tets N'")
    n = int(lines[0].split()[1])
    neighbours, perms = [None] * n, [None] * n
    pos = 1
    for _ in range(n):
        try:
            idx, nb, pm = (part.strip() for part in lines[pos].split(":"))
            a = int(idx)
            neighbours[a] = [int(x) for x in nb.split()]
            perms[a] = [tuple(int(ch) for ch in word) for word in pm.split()]
        except (ValueError, IndexError, TypeError) as exc:
            raise TriangulationFormatError(f"bad tetrahedron record {lines[pos]!r}") from exc
        if len(neighbours[a]) != 4 or any(sorted(p) != [0, 1, 2, 3] for p in perms[a]):
            raise TriangulationFormatError(f"bad tetrahedron record {lines[pos]!r}")
        pos += 1
    classes = []
    if pos < len(lines) and lines[pos] == "vertices:":
        for line in lines[pos + 1:]:
            head, corners = line.split(":", 1)
            kind = head.split()[1]
            pairs = tuple(tuple(int(x) for x in item.split(":")) for item in corners.split())
            classes.append(VertexClass(kind, pairs))
    tets = [Tetrahedron(None, None, ()) for _ in range(n)]
    t = FiberTriangulation(tets, neighbours, perms, classes)
    if not t.check_involution():
        raise TriangulationFormatError("gluings are not an involution")
    return t


def import_triangulation(path):
    with open(path, encoding="utf-8") as fh:
        return parse_triangulation(fh.read())


def isomorphic(t1: FiberTriangulation, t2: FiberTriangulation):
    """Whether two connected-component-wise gluing tables are isomorphic.

    Tries every image of tetrahedron 0 and every corner relabelling of it,
    then propagates; each further component is matched the same way.
    """
    n = len(t1.tets)
    if n != len(t2.tets):
        return False
    mapping = [None] * n
    used = [False] * n
    for root in range(n):
        if mapping[root] is not None:
            continue
        for target in range(n):
            if used[target]:
                continue
            for sigma in permutations(range(4)):
                trial = _propagate(t1, t2, root, target, sigma, mapping, used)
                if trial is not None:
                    for a, (b, s) in trial.items():
                        mapping[a] = (b, s)
                        used[b] = True
                    break
            if mapping[root] is not None:
                break
        if mapping[root] is None:
            return False
    return True


def _propagate(t1, t2, root, target, sigma, mapping, used):
    trial = {root: (target, sigma)}
    taken = {target}
    stack = [root]
    while stack:
        a = stack.pop()
        b, s = trial[a]
        for f in range(4):
            a2, p1 = t1.neighbours[a][f], t1.perms[a][f]
            b2, p2 = t2.neighbours[b][s[f]], t2.perms[b][s[f]]
            # s2 must satisfy s2[p1[c]] = p2[s[c]]
            s2 = [None] * 4
            for c in range(4):
                s2[p1[c]] = p2[s[c]]
            s2 = tuple(s2)
            if a2 in trial:
                if trial[a2] != (b2, s2):
                    return None
            else:
                if b2 in taken or used[b2] or mapping[a2] is not None:
                    return None
                trial[a2] = (b2, s2)
                taken.add(b2)
                stack.append(a2)
    return trial
