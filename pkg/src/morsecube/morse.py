"""Ascending and descending links of a state and the Morse verdict.

The link of every vertex of the cube complex is the simplicial complex
dual to the polytope, with a hole for each ideal vertex.  Its vertices
are facets.  At vertex ``v`` a facet ``F`` has status O when
``sign(s(F)) * (-1)**v[colour(F)]`` is positive and status I otherwise.
The ascending link is the full subcomplex on the O facets, the
descending link the full subcomplex on the I facets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import collapse as collapse_mod
from .collapse import CIRCLE, GRAPH, INCONCLUSIVE, OUTCOME_LETTERS, POINT, CollapseCertificate
from .homology import simplicial_betti
from .polytope import Colouring, Polytope

PERFECT = "perfect"
FIBRATION = "fibration"
REFUTED = "refuted"

STATUS_OUT = "O"
STATUS_IN = "I"


class VanishingStateError(ValueError):
    pass


class StateFormatError(ValueError):
    pass


# -- states ---------------------------------------------------------------------

@dataclass(frozen=True)
class RealState:
    """Rational value per facet."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(Fraction(x) for x in self.values))

    def __getitem__(self, facet):
        return self.values[facet]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @property
    def pm_one(self):
        return all(abs(x) == 1 for x in self.values)

    @property
    def nowhere_vanishing(self):
        return all(x != 0 for x in self.values)

    def signs(self):
        return tuple(1 if x > 0 else -1 if x < 0 else 0 for x in self.values)

    @classmethod
    def from_bits(cls, bits, facet_count, scale=1):
        """±scale state with ``+scale`` exactly on the facets whose bit is set."""
        scale = Fraction(scale)
        return cls(tuple(scale if bits >> i & 1 else -scale for i in range(facet_count)))

    def to_bits(self):
        if not self.nowhere_vanishing:
            raise VanishingStateError("state vanishes on some facet")
        return sum(1 << i for i, x in enumerate(self.values) if x > 0)

    def scaled(self, factor):
        return RealState(tuple(x * Fraction(factor) for x in self.values))

    def format(self):
        if self.pm_one:
            return f"bits {bin(self.to_bits())}\n"
        return "".join(f"{i} {x}\n" for i, x in enumerate(self.values))


def parse_state(text, facet_count):
    """Read ``facet value`` lines (rational values) or a single ``bits 0b...`` line."""
    values = {}
    bits = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "bits":
            if len(parts) != 2:
                raise StateFormatError(f"line {lineno}: expected 'bits <integer>'")
            try:
                bits = int(parts[1], 0)
            except ValueError as exc:
                raise StateFormatError(f"line {lineno}: bad bitmask {parts[1]!r}") from exc
            continue
        if len(parts) != 2:
            raise StateFormatError(f"line {lineno}: expected 'facet value'")
        try:
            facet, value = int(parts[0]), Fraction(parts[1])
        except (ValueError, ZeroDivisionError) as exc:
            raise StateFormatError(f"line {lineno}: {exc}") from exc
        if not 0 <= facet < facet_count:
            raise StateFormatError(f"line {lineno}: facet {facet} out of range")
        if facet in values:
            raise StateFormatError(f"line {lineno}: facet {facet} given twice")
        values[facet] = value
    if bits is not None:
        if values:
            raise StateFormatError("mixing 'bits' with per-facet values")
        if bits >> facet_count:
            raise StateFormatError(f"bitmask has bits beyond facet {facet_count - 1}")
        return RealState.from_bits(bits, facet_count)
    missing = [i for i in range(facet_count) if i not in values]
    if missing:
        raise StateFormatError(f"no value for facets {missing}")
    return RealState(tuple(values[i] for i in range(facet_count)))


def opposite_pair_state(col: Colouring, x, scale=Fraction(1, 2)):
    """``+x_i * scale`` and ``-x_i * scale`` on the two facets of colour i.

    Every colour class must have exactly two facets; the lower-indexed one
    gets the positive sign.
    """
    values = [Fraction(0)] * len(col)
    for i, cls in enumerate(col.classes()):
        if len(cls) != 2:
            raise ValueError(f"colour {i + 1} has {len(cls)} facets, expected 2")
        a, b = cls
        values[a] = Fraction(x[i]) * scale
        values[b] = -Fraction(x[i]) * scale
    return RealState(tuple(values))


@dataclass
class ClassComparison:
    balanced: RealState
    equal: bool | None  # None when no second state was given


def balanced(col: Colouring, s):
    values = list(Fraction(x) for x in s)
    for cls in col.classes():
        mean = sum(values[f] for f in cls) / len(cls)
        for f in cls:
            values[f] -= mean
    return RealState(tuple(values))


def normalize_class(col: Colouring, s, other=None):
    """Balanced representative of ``s``; with ``other``, whether the classes agree.

    Two states give the same class exactly when their difference is
    constant on each colour class.
    """
    equal = None
    if other is not None:
        equal = all(len({Fraction(s[f]) - Fraction(other[f]) for f in cls}) == 1
                    for cls in col.classes())
    return ClassComparison(balanced(col, s), equal)


# -- links ----------------------------------------------------------------------

@dataclass(frozen=True)
class LinkComplex:
    vertices: tuple[int, ...]
    simplices: frozenset  # sorted tuples, closed under nonempty subsets

    @cached_property
    def maximal(self):
        return sorted((s for s in self.simplices
                       if not any(len(t) == len(s) + 1 and set(s) <= set(t)
                                  for t in self.simplices)),
                      key=lambda s: (len(s), s))

    @property
    def dimension(self):
        return max((len(s) for s in self.simplices), default=0) - 1

    @property
    def empty(self):
        return not self.simplices

    def f_vector(self):
        out = [0] * (self.dimension + 1)
        for s in self.simplices:
            out[len(s) - 1] += 1
        return tuple(out)

    def full_subcomplex(self, keep):
        keep = frozenset(keep)
        return LinkComplex(tuple(v for v in self.vertices if v in keep),
                           frozenset(s for s in self.simplices if keep.issuperset(s)))

    @property
    def connected(self):
        return collapse_mod.is_connected(self.simplices)

    @cached_property
    def betti(self):
        return tuple(simplicial_betti(self.simplices))

    @property
    def b1(self):
        return self.betti[1] if len(self.betti) > 1 else 0

    def profile(self):
        """Facet counts of the maximal simplices by dimension, e.g. {2: 3}."""
        counts = {}
        for s in self.maximal:
            counts[len(s) - 1] = counts.get(len(s) - 1, 0) + 1
        return counts


def dual_link(p: Polytope):
    """Simplicial complex dual to ``p``; ideal vertices are left out as holes."""
    simplices = set()
    for face in p.finite_faces:
        if face.facets and len(face.facets) == p.dim - face.dim:
            simplices.add(face.facets)
    return LinkComplex(tuple(range(p.facet_count)),
                       frozenset(collapse_mod.closure(simplices)))


def status_vector(col: Colouring, s, v):
    """Status per facet at vertex ``v`` (bitmask over colours)."""
    out = []
    for f, x in enumerate(s):
        if x == 0:
            raise VanishingStateError(f"state vanishes on facet {f}")
        flipped = v >> col[f] & 1
        out.append(STATUS_OUT if (x > 0) != bool(flipped) else STATUS_IN)
    return tuple(out)


def directed_links(link: LinkComplex, col: Colouring, s, v):
    """``(ascending, descending)`` full subcomplexes at vertex ``v``."""
    status = status_vector(col, s, v)
    up = [f for f, st in enumerate(status) if st == STATUS_OUT]
    down = [f for f, st in enumerate(status) if st == STATUS_IN]
    return link.full_subcomplex(up), link.full_subcomplex(down)


# -- ideal vertices -------------------------------------------------------------

@dataclass
class IdealCriterion:
    passed: bool
    witnesses: dict  # ideal vertex index -> (facet, facet)
    failing: list  # ideal vertex indices without a witness


def ideal_criterion(p: Polytope, col: Colouring, s):
    """Each ideal vertex needs two same-coloured facets with opposite signs."""
    witnesses, failing = {}, []
    for k, u in enumerate(p.ideal_vertices):
        found = None
        for a, b in p.ideal_pairs(u):
            if col[a] == col[b] and (s[a] > 0) != (s[b] > 0):
                found = (a, b)
                break
        if found is None:
            failing.append(k)
        else:
            witnesses[k] = found
    return IdealCriterion(not failing, witnesses, failing)


# -- verdict --------------------------------------------------------------------

@dataclass
class VertexReport:
    vertex: int
    ascending: CollapseCertificate
    descending: CollapseCertificate
    ascending_connected: bool
    descending_connected: bool
    descending_b1: int

    @property
    def outcome_letters(self):
        return OUTCOME_LETTERS[self.ascending.outcome] + OUTCOME_LETTERS[self.descending.outcome]


@dataclass
class MorseVerdict:
    status: str
    critical_points: int | None
    ideal: IdealCriterion
    vertices: list[VertexReport] = field(default_factory=list)
    reason: str = ""

    @property
    def outcomes(self):
        return "|".join(r.outcome_letters for r in self.vertices)

    @property
    def all_circles(self):
        return bool(self.vertices) and all(
            r.ascending.outcome == CIRCLE and r.descending.outcome == CIRCLE
            for r in self.vertices)


def vertex_seed(seed, v, direction):
    return f"{seed}:{v}:{direction}"


def verify(p: Polytope, col: Colouring, s, restarts=32, seed=0, link=None):
    """Check the collapse hypotheses at every vertex of the cube complex."""
    s = s if isinstance(s, RealState) else RealState(tuple(s))
    if not s.nowhere_vanishing:
        raise VanishingStateError("verification needs a nowhere-vanishing state")
    link = link or dual_link(p)
    ideal = ideal_criterion(p, col, s)
    reports = []
    refuted = []
    if not ideal.passed:
        refuted.append(f"ideal vertices {ideal.failing} have no opposite same-colour pair")
    for v in range(1 << col.c):
        up, down = directed_links(link, col, s, v)
        certs = []
        for name, sub in (("asc", up), ("desc", down)):
            certs.append(collapse_mod.collapse(sub.simplices, restarts, vertex_seed(seed, v, name)))
            if sub.empty:
                refuted.append(f"{name} link at vertex {v} is empty")
            elif not sub.connected:
                refuted.append(f"{name} link at vertex {v} is disconnected")
        reports.append(VertexReport(v, certs[0], certs[1], up.connected, down.connected,
                                    down.b1 if not down.empty else 0))
    critical = sum(r.descending_b1 for r in reports)
    outcomes = [c.outcome for r in reports for c in (r.ascending, r.descending)]
    if refuted:
        status = REFUTED
    elif all(o == POINT for o in outcomes):
        status = FIBRATION
    elif all(o in (POINT, CIRCLE, GRAPH) for o in outcomes):
        status = PERFECT
    else:
        status = INCONCLUSIVE
    return MorseVerdict(status, critical, ideal, reports, "; ".join(refuted))
