"""Combinatorial right-angled polytopes and their colourings.

A polytope is stored as its explicit face lattice: every face is keyed by
the sorted tuple of facets that contain it.  Facet ``i`` is the face with
containing set ``(i,)`` and the polytope itself has the empty set.  Ideal
vertices are kept as dimension-0 faces flagged ``ideal``; they are not
faces of the manifold's decomposition and carry ``2(n-1)`` facets.

Colours are 0-based internally.  The text format stores them 1-based.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np

from . import quaternions as quat


class PolytopeError(ValueError):
    """A face lattice or colouring violates a structural invariant."""


class ParseError(ValueError):
    def __init__(self, lineno, msg):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True, order=True)
class Face:
    dim: int
    facets: tuple[int, ...]
    ideal: bool = False

    @property
    def finite(self):
        return not self.ideal


class Polytope:
    """Face lattice of a right-angled polytope of dimension 2..4."""

    def __init__(self, dim, facet_count, faces, name=""):
        if not 2 <= dim <= 4:
            raise PolytopeError(f"unsupported dimension {dim}")
        self.dim = dim
        self.facet_count = facet_count
        self.name = name
        lattice = {}
        for face in faces:
            key = tuple(sorted(face.facets))
            face = Face(face.dim, key, face.ideal)
            if key in lattice:
                if lattice[key] != face:
                    raise PolytopeError(f"conflicting faces with facets {key}")
                continue
            lattice[key] = face
        lattice.setdefault((), Face(dim, ()))
        for i in range(facet_count):
            lattice.setdefault((i,), Face(dim - 1, (i,)))
        self._lattice = lattice
        self.faces = tuple(sorted(lattice.values(), key=lambda f: (-f.dim, f.facets)))
        self._validate()

    # -- lookup -----------------------------------------------------------

    def face(self, facets):
        return self._lattice.get(tuple(sorted(facets)))

    def __contains__(self, facets):
        return tuple(sorted(facets)) in self._lattice

    def faces_of_dim(self, d):
        return [f for f in self.faces if f.dim == d]

    @cached_property
    def finite_faces(self):
        return [f for f in self.faces if not f.ideal]

    @cached_property
    def vertices(self):
        return self.faces_of_dim(0)

    @cached_property
    def ideal_vertices(self):
        return [f for f in self.vertices if f.ideal]

    @cached_property
    def finite_vertices(self):
        return [f for f in self.vertices if not f.ideal]

    @cached_property
    def adjacency(self):
        """Boolean matrix of facet adjacency (sharing a codimension-2 face)."""
        adj = np.zeros((self.facet_count, self.facet_count), dtype=bool)
        for f in self.faces_of_dim(self.dim - 2):
            a, b = f.facets
            adj[a, b] = adj[b, a] = True
        return adj

    @cached_property
    def neighbours(self):
        return [tuple(np.nonzero(row)[0].tolist()) for row in self.adjacency]

    def adjacent(self, a, b):
        return bool(self.adjacency[a, b])

    def f_vector(self):
        """Face counts by dimension 0..n-1 (ideal vertices excluded)."""
        return tuple(sum(1 for f in self.finite_faces if f.dim == d) for d in range(self.dim))

    def ideal_pairs(self, vertex):
        """Opposite facet pairs at an ideal vertex (its cube cross-section)."""
        fs = vertex.facets
        pairs = []
        for a, b in itertools.combinations(fs, 2):
            if not self.adjacency[a, b]:
                pairs.append((a, b))
        return pairs

    def faces_containing(self, face):
        """Faces incident to ``face`` (including itself), i.e. whose
        containing-facet set is a subset of ``face.facets``."""
        out = []
        fs = face.facets
        for r in range(len(fs) + 1):
            for sub in itertools.combinations(fs, r):
                g = self._lattice.get(sub)
                if g is not None:
                    out.append(g)
        return out

    # -- validation -------------------------------------------------------

    def _validate(self):
        n = self.dim
        for key, face in self._lattice.items():
            if any(not 0 <= i < self.facet_count for i in key):
                raise PolytopeError(f"face {key} refers to a missing facet")
            if face.dim == n:
                if key:
                    raise PolytopeError(f"face {key} has dimension {n} but nonempty facets")
                continue
            if not key:
                raise PolytopeError("a proper face has an empty containing-facet set")
            if face.ideal:
                if face.dim != 0:
                    raise PolytopeError(f"face {key}: only vertices can be ideal")
                if len(key) != 2 * (n - 1):
                    raise PolytopeError(
                        f"ideal vertex {key} lies in {len(key)} facets, expected {2 * (n - 1)}")
            elif len(key) != n - face.dim:
                raise PolytopeError(
                    f"face {key} of dimension {face.dim} lies in {len(key)} facets, "
                    f"expected {n - face.dim}")
        adj = self.adjacency
        for key, face in self._lattice.items():
            if face.ideal:
                self._check_ideal_vertex(face)
            else:
                for a, b in itertools.combinations(key, 2):
                    if not adj[a, b]:
                        raise PolytopeError(f"face {key}: facets {a} and {b} are not adjacent")
        self._check_graded()

    def _check_ideal_vertex(self, face):
        adj = self.adjacency
        for a in face.facets:
            others = [b for b in face.facets if b != a and not adj[a, b]]
            if len(others) != 1:
                raise PolytopeError(
                    f"ideal vertex {face.facets}: facet {a} does not have a unique opposite")

    def _check_graded(self):
        for key, face in self._lattice.items():
            if face.dim == self.dim:
                continue
            above = []
            for r in range(len(key)):
                for sub in itertools.combinations(key, r):
                    if sub in self._lattice:
                        above.append(sub)
            # covers of `face` have maximal proper containing sets
            covers = [t for t in above
                      if not any(set(t) < set(s) for s in above)]
            if not covers:
                raise PolytopeError(f"face {key} is not contained in any larger face")
            for t in covers:
                if self._lattice[t].dim != face.dim + 1:
                    raise PolytopeError(
                        f"face lattice is not graded at face {key}: covered by {t}")

    # -- misc -------------------------------------------------------------

    def __repr__(self):
        return (f"Polytope({self.name or 'unnamed'}, dim={self.dim}, "
                f"facets={self.facet_count}, f={self.f_vector()}, "
                f"ideal={len(self.ideal_vertices)})")


@dataclass(frozen=True)
class Colouring:
    """Proper facet colouring; ``colours[i]`` is the 0-based colour of facet i."""

    colours: tuple[int, ...]

    @property
    def c(self):
        return max(self.colours) + 1 if self.colours else 0

    def classes(self):
        out = [[] for _ in range(self.c)]
        for facet, col in enumerate(self.colours):
            out[col].append(facet)
        return out

    def __getitem__(self, facet):
        return self.colours[facet]

    def __len__(self):
        return len(self.colours)

    def face_colours(self, face):
        return tuple(sorted(self.colours[i] for i in face.facets))

    def relabel(self, perm):
        """Apply a colour permutation given as a sequence old -> new."""
        return Colouring(tuple(perm[c] for c in self.colours))

    def validate(self, p: Polytope):
        if len(self.colours) != p.facet_count:
            raise PolytopeError(
                f"colouring has {len(self.colours)} entries for {p.facet_count} facets")
        used = set(self.colours)
        if min(used) < 0 or used != set(range(self.c)):
            raise PolytopeError("colours must be exactly 1..c with every colour used")
        for a, b in itertools.combinations(range(p.facet_count), 2):
            if p.adjacency[a, b] and self.colours[a] == self.colours[b]:
                raise PolytopeError(
                    f"adjacent facets {a} and {b} share colour {self.colours[a] + 1}")
        return self


# -- text format ----------------------------------------------------------

def load_polytope(text, name=""):
    """Parse the polytope file format; returns ``(Polytope, Colouring)``."""
    dim = facet_count = colours = None
    faces = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if head == "dim":
                dim = int(rest)
            elif head == "facets":
                facet_count = int(rest)
            elif head == "colours":
                colours = tuple(int(t) - 1 for t in rest.split())
            elif head == "face":
                d, sep, tail = rest.partition(":")
                if not sep:
                    raise ParseError(lineno, "expected 'face d : i1 i2 ...'")
                toks = tail.split()
                ideal = bool(toks) and toks[-1] == "ideal"
                if ideal:
                    toks = toks[:-1]
                faces.append(Face(int(d), tuple(sorted(int(t) for t in toks)), ideal))
            else:
                raise ParseError(lineno, f"unknown keyword {head!r}")
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(lineno, str(exc)) from None
    if dim is None or facet_count is None or colours is None:
        raise ParseError(0, "missing 'dim', 'facets' or 'colours' line")
    p = Polytope(dim, facet_count, faces, name=name)
    col = Colouring(colours).validate(p)
    return p, col


def dump_polytope(p: Polytope, col: Colouring, comment=""):
    lines = []
    if comment:
        lines += [f"# {line}" for line in comment.splitlines()]
    lines.append(f"dim {p.dim}")
    lines.append(f"facets {p.facet_count}")
    lines.append("colours " + " ".join(str(c + 1) for c in col.colours))
    for f in p.faces:
        if f.dim >= p.dim - 1:
            continue
        tail = " ideal" if f.ideal else ""
        lines.append(f"face {f.dim} : " + " ".join(map(str, f.facets)) + tail)
    return "\n".join(lines) + "\n"


def data_dir():
    env = os.environ.get("MORSECUBE_DATA")
    if env:
        return Path(env)
    return Path(str(resources.files("morsecube") / "data"))


def load_bundled(name):
    """Load a bundled polytope file (``p4``, ``cell24``, ``cell120``, ``cube3``)."""
    path = data_dir() / f"{name}.poly"
    return load_polytope(path.read_text(encoding="utf-8"), name=name)


def read_polytope(path):
    path = Path(path)
    if not path.exists() and not path.suffix:
        return load_bundled(str(path))
    return load_polytope(path.read_text(encoding="utf-8"), name=path.stem)


# -- generators -----------------------------------------------------------

def generate_hypercube(n, colours=None):
    """The combinatorial n-cube; facet 2i is {x_i = 0}, facet 2i+1 is {x_i = 1}.

    By default opposite facets share a colour.
    """
    if not 2 <= n <= 4:
        raise PolytopeError(f"unsupported cube dimension {n}")
    faces = []
    for assignment in itertools.product((None, 0, 1), repeat=n):
        fixed = [2 * i + b for i, b in enumerate(assignment) if b is not None]
        faces.append(Face(n - len(fixed), tuple(fixed)))
    p = Polytope(n, 2 * n, faces, name=f"cube{n}")
    if colours is None:
        colours = [i // 2 for i in range(2 * n)]
    return p, Colouring(tuple(colours)).validate(p)


def orbifold_euler(p: Polytope):
    """Sum over finite faces (P included) of (-1)^dim / 2^codim."""
    total = Fraction(0)
    for f in p.finite_faces:
        total += Fraction((-1) ** f.dim, 2 ** (p.dim - f.dim))
    return total


def face_lattice_from_halfspaces(normals, offsets, adjacency=None, tol=1e-9, name=""):
    """Face lattice of {x : normals @ x <= offsets} in the Klein model.

    Vertices with |x| = 1 are ideal.  Candidate vertices come from facet
    subsets built on (n-1)-cliques of ``adjacency`` (all n-subsets if it is
    not given).
    """
    normals = np.asarray(normals, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    m, n = normals.shape

    def ambiguous(x):
        x = np.abs(np.asarray(x))
        return np.any((x > tol / 10) & (x < tol * 10))

    if adjacency is None:
        candidates = list(itertools.combinations(range(m), n))
    else:
        adjacency = np.asarray(adjacency, dtype=bool)
        nbrs = [set(np.nonzero(adjacency[i])[0].tolist()) for i in range(m)]
        candidates = set()
        for clique in _cliques(nbrs, n - 1):
            extra = set().union(*(nbrs[i] for i in clique)) - set(clique)
            for g in extra:
                candidates.add(tuple(sorted(clique + (g,))))
        candidates = sorted(candidates)
    if not candidates:
        raise PolytopeError("no candidate facet subsets")
    idx = np.array(candidates)
    A = normals[idx]
    b = offsets[idx]
    dets = np.linalg.det(A)
    ok = np.abs(dets) > 1e-12
    xs = np.linalg.solve(A[ok], b[ok][..., None])[..., 0]

    vertices = {}
    for x in xs:
        resid = offsets - normals @ x
        if np.any(resid < -tol * 10):
            continue
        if ambiguous(resid):
            raise PolytopeError(f"tolerance ambiguity in facet residuals at {x}")
        key = tuple(np.nonzero(np.abs(resid) <= tol)[0].tolist())
        norm_gap = abs(np.linalg.norm(x) - 1.0)
        if ambiguous([norm_gap]):
            raise PolytopeError(f"tolerance ambiguity in ideal test at {x}")
        if np.linalg.norm(x) > 1 + tol:
            raise PolytopeError(f"vertex {x} lies outside the closed unit ball")
        ideal = norm_gap <= tol
        if key in vertices:
            if np.linalg.norm(vertices[key][0] - x) > tol:
                raise PolytopeError(f"distinct vertices share the facet set {key}")
            continue
        for other, (y, _) in vertices.items():
            gap = np.linalg.norm(y - x)
            if gap <= 10 * tol:
                raise PolytopeError(f"vertices {key} and {other} coincide within tolerance")
        expected = 2 * (n - 1) if ideal else n
        if len(key) != expected:
            raise PolytopeError(
                f"vertex {key} is neither simple nor ideal-cubical ({len(key)} facets)")
        vertices[key] = (x, ideal)
    if not vertices:
        raise PolytopeError("degenerate system: no vertices found")

    # every face is the closure of a subset of some vertex's facets
    vkeys = list(vertices)
    vsets = [frozenset(k) for k in vkeys]
    coords = np.array([vertices[k][0] for k in vkeys])
    faces = {}
    for vset in vsets:
        for r in range(1, len(vset)):
            for sub in itertools.combinations(sorted(vset), r):
                sub = frozenset(sub)
                members = [i for i, s in enumerate(vsets) if sub <= s]
                closure = frozenset.intersection(*(vsets[i] for i in members))
                key = tuple(sorted(closure))
                if key in faces or len(members) < 2:
                    continue
                pts = coords[members]
                rank = np.linalg.matrix_rank(pts[1:] - pts[0], tol=1e-7)
                faces[key] = Face(int(rank), key)
    out = [Face(0, k, ideal) for k, (_, ideal) in vertices.items()]
    out += [f for k, f in faces.items() if k not in vertices]
    for i in range(m):
        out.append(Face(n - 1, (i,)))
    return Polytope(n, m, out, name=name)


def _cliques(nbrs, size):
    """All cliques of the given size, as sorted tuples."""
    def extend(clique, cands):
        if len(clique) == size:
            yield clique
            return
        for v in sorted(cands):
            if v > clique[-1]:
                yield from extend(clique + (v,), cands & nbrs[v])
    for v in range(len(nbrs)):
        yield from extend((v,), nbrs[v])


def quaternion_halfspaces(kind):
    """Facet normals and offsets of the right-angled 24-cell or 120-cell.

    Facets correspond to the elements of T*24 (resp. I*120).  Two facets
    whose normals have the largest sub-unit dot product are adjacent, and
    the common offset ``sqrt(that dot product)`` makes them meet at right
    angles in the Klein model.
    """
    if kind == "cell24":
        elems = quat.binary_tetrahedral()
    elif kind == "cell120":
        elems = quat.binary_icosahedral()
    else:
        raise ValueError(f"unknown quaternion polytope {kind!r}")
    dots = elems @ elems.T
    best = max(d for d in np.unique(np.round(dots, 9)) if d < 1 - 1e-9)
    adjacency = np.abs(dots - best) < 1e-9
    offsets = np.full(len(elems), np.sqrt(best))
    return elems, offsets, adjacency


def quaternion_colouring(kind):
    """Colours from the lateral classes: Q8 in T*24, or T*24 in I*120."""
    if kind == "cell24":
        group = quat.QuaternionGroup(quat.binary_tetrahedral())
        sub = group.subgroup_indices(quat.quaternion_group_q8())
    else:
        group = quat.QuaternionGroup(quat.binary_icosahedral())
        sub = group.subgroup_indices(quat.binary_tetrahedral())
    colours = [0] * len(group)
    for k, coset in enumerate(group.left_cosets(sub)):
        for g in coset:
            colours[g] = k
    return Colouring(tuple(colours))


def generate_quaternion_polytope(kind):
    """The ideal right-angled 24-cell (``cell24``) or compact 120-cell (``cell120``)."""
    normals, offsets, adjacency = quaternion_halfspaces(kind)
    p = face_lattice_from_halfspaces(normals, offsets, adjacency, name=kind)
    if not np.array_equal(p.adjacency, adjacency):
        raise PolytopeError("face lattice adjacency differs from the quaternion adjacency")
    return p, quaternion_colouring(kind).validate(p)


def generate_p4():
    """P4 from its facet combinatorics.

    Facets are the 2-subsets {a, b} of {0..4}; two facets are adjacent when
    they share exactly one element.  The finite vertex v_a is the star of
    facets through a, and the ideal vertex u_a consists of the six facets
    avoiding a.  Colour classes are a perfect matching of disjoint pairs:
    {i, i+1} with {i+2, i+4} (mod 5).
    """
    pairs = list(itertools.combinations(range(5), 2))
    index = {frozenset(pr): k for k, pr in enumerate(pairs)}

    def fid(a, b):
        return index[frozenset((a, b))]

    faces = []
    for a in range(5):
        others = [x for x in range(5) if x != a]
        faces.append(Face(0, tuple(sorted(fid(a, x) for x in others))))
        faces.append(Face(0, tuple(sorted(index[frozenset(pr)]
                                          for pr in itertools.combinations(others, 2))), True))
        for trio in itertools.combinations(others, 3):
            faces.append(Face(1, tuple(sorted(fid(a, x) for x in trio))))
    for a, b, c in itertools.combinations(range(5), 3):
        faces.append(Face(1, tuple(sorted((fid(a, b), fid(b, c), fid(a, c))))))
    for f, g in itertools.combinations(pairs, 2):
        if len(set(f) & set(g)) == 1:
            faces.append(Face(2, tuple(sorted((index[frozenset(f)], index[frozenset(g)])))))
    p = Polytope(4, 10, faces, name="p4")
    colours = [0] * 10
    for i in range(5):
        colours[fid(i, (i + 1) % 5)] = i
        colours[fid((i + 2) % 5, (i + 4) % 5)] = i
    return p, Colouring(tuple(colours)).validate(p)
