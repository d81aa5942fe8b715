"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v``; the summary block at the end
lists every criterion with the measured values.
"""

import itertools
import time
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import record
from morsecube import collapse, cubecomplex, fiber, holonomy, morse, polytope, search

PROPERTY = settings(max_examples=10_000, derandomize=True, deadline=None, database=None,
                    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def check(number, ok, detail):
    record(number, bool(ok), detail)
    assert ok, detail


def _invariants(p, col):
    cx = cubecomplex.build_cube_complex(p, col)
    return cx.euler_characteristic(), cx.betti, cubecomplex.cusp_census(p, col).count


@pytest.mark.parametrize("number,name,expected,limit", [
    (1, "p4", (2, (1, 5, 10, 4, 0), 5), 5),
    (2, "cell24", (8, (1, 21, 51, 23, 0), 24), 5),
    (3, "cell120", (272, (1, 115, 500, 115, 1), 0), 300),
])
def test_invariants(number, name, expected, limit):
    (got, elapsed) = timed(lambda: _invariants(*polytope.load_bundled(name)))
    check(number, got == expected and elapsed < limit,
          f"{name} euler {got[0]} betti {got[1]} cusps {got[2]} in {elapsed:.2f}s (limit {limit}s)")


def _doubled_colour(p, col, vertex):
    counts = Counter(col[f] for f in p.ideal_vertices[vertex].facets)
    return next(c for c, n in counts.items() if n == 2)


def test_w_orthants(p4, complex_w):
    p, col = p4

    def run():
        verdicts = [morse.verify(p, col, morse.opposite_pair_state(col, x))
                    for x in itertools.product((1, -1), repeat=5)]
        census = cubecomplex.cusp_census(p, col)
        doubled = [_doubled_colour(p, col, c.vertex) for c in census.cusps]
        trivial_ok = True
        for i in range(5):
            for rest in itertools.product((1, -1), repeat=4):
                x = rest[:i] + (0,) + rest[i:]
                s = morse.opposite_pair_state(col, x)
                k = doubled.index(i)
                trivial_ok &= cubecomplex.cusp_restriction(complex_w, s, k, census) == "trivial"
        return verdicts, trivial_ok

    (verdicts, trivial_ok), elapsed = timed(run)
    perfect = sum(v.status == morse.PERFECT and v.critical_points == 2 for v in verdicts)
    check(4, perfect == 32 and trivial_ok and elapsed < 30,
          f"{perfect}/32 orthants perfect with 2 critical points; cusp i trivial when x_i=0: "
          f"{trivial_ok}; {elapsed:.2f}s")


def _shape(profile):
    if profile == {1: 5}:
        return "circle"
    return " + ".join(f"{n}x{d}-simplex" for d, n in sorted(profile.items(), reverse=True))


def test_w_descending_profiles(p4):
    p, col = p4
    expected = {"circle", "3x2-simplex", "2x2-simplex", "1x3-simplex + 1x2-simplex"}

    def run():
        s = morse.opposite_pair_state(col, (1, 1, 1, 1, 1))
        link = morse.dual_link(p)
        downs = [morse.directed_links(link, col, s, v)[1] for v in range(32)]
        return Counter(_shape(d.profile()) for d in downs), sum(d.b1 for d in downs)

    (shapes, total_b1), elapsed = timed(run)
    detail = (f"shapes {dict(sorted(shapes.items()))}, sum b1 {total_b1}, {elapsed:.2f}s; "
              f"expected shape set {sorted(expected)}")
    check(5, set(shapes) == expected and total_b1 == 2 and elapsed < 10, detail)


def test_cell24_census(cell24, census24, group24):
    census, elapsed = census24
    threaded = search.enumerate_states(*cell24, search.ALL_CIRCLES, threads=2, group=group24)
    same = threaded.lines(24) == census.lines(24)
    symmetric = group24.canonical(search.quaternion_orbit_state().to_bits())
    check(6, len(census.classes) == 63 and same and not census.partial and elapsed < 1800,
          f"{len(census.classes)} classes in {elapsed:.1f}s, threads=2 identical: {same}, "
          f"symmetric state class present: {symmetric in {c.mask for c in census.classes}}")


def _profile(report):
    return (report.tetrahedra, report.components, report.orientable, report.valences,
            report.kinds(), report.all_tori, report.h1_rank, tuple(report.h1_torsion))


def test_symmetric_fiber(cell24, complex_x, symmetric_state):
    geometry = fiber.TriangleGeometry(cell24[0])

    def run():
        return [fiber.fiber_report(fiber.build_fiber(*cell24, symmetric_state, level,
                                                     complex_x, geometry))
                for level in (0, Fraction(1, 2))]

    (zero, half), elapsed = timed(run)
    ok = (_profile(zero) == (192, 1, True, {6: 192}, {"apex": 4, "ideal": 24}, True, 28, ())
          and _profile(half) == _profile(zero) and elapsed < 60)
    check(7, ok, f"level 0 {_profile(zero)}; level 1/2 identical: "
                 f"{_profile(half) == _profile(zero)}; {elapsed:.2f}s")


def test_census_fibers(cell24, complex_x, census24, tmp_path):
    census, _ = census24
    geometry = fiber.TriangleGeometry(cell24[0])

    def run():
        good = 0
        for c in census.classes:
            s = morse.RealState.from_bits(c.mask, 24).scaled(Fraction(1, 2))
            tri = fiber.build_fiber(*cell24, s, 0, complex_x, geometry)
            fiber.export_triangulation(tri, tmp_path / f"fiber_{c.mask:#x}.tri")
            r = fiber.fiber_report(tri)
            good += (r.tetrahedra == 192 and r.vertex_count == 28 and r.all_tori
                     and r.h1_rank == 28 and not r.h1_torsion)
        return good

    good, elapsed = timed(run)
    files = len(list(tmp_path.glob("*.tri")))
    check(8, good == 63 and files == 63 and elapsed < 600,
          f"{good}/{len(census.classes)} fibers with 192 tets, 28 torus cusps, H1 Z^28; "
          f"{files} files; {elapsed:.1f}s")


def test_cell120_coset_search(cell120):
    base = search.quaternion_orbit_state().values
    result, elapsed = timed(lambda: search.coset_search(*cell120, base))
    v = result.verdict
    ok = v is not None and v.status == morse.PERFECT and v.critical_points == 272 and elapsed < 600
    check(9, ok, f"multipliers {result.multipliers}: "
                 f"{v.status if v else 'none'} with {v.critical_points if v else '-'} critical "
                 f"points after {result.examined} candidates, {elapsed:.2f}s")


def test_holonomy():
    report, elapsed = timed(holonomy.verify_holonomy)
    detail = "; ".join(d for _, _, d in report.checks())
    check(10, report.passed and report.form == holonomy.LORENTZ_FORM and elapsed < 1,
          f"{detail}; {elapsed:.3f}s")


# -- property suites -------------------------------------------------------------
# Each suite wraps a hypothesis property so the result can be recorded once.

rationals = st.fractions(min_value=-8, max_value=8, max_denominator=12)


def run_property(number, prop, detail):
    try:
        prop()
    except BaseException:
        record(number, False, detail)
        raise
    record(number, True, detail)


def test_cocycle_identity(complex_w, complex_x):
    @PROPERTY
    @given(data=st.data())
    def prop(data):
        for cx, n in ((complex_w, 10), (complex_x, 24)):
            s = data.draw(st.lists(rationals, min_size=n, max_size=n))
            assert not any(cx.cocycle_defects(s))

    run_property("11.1", prop, "cocycle identity on 10^4 random rational states of W and X")


def test_balanced_representative(p4):
    _, col = p4

    @PROPERTY
    @given(s=st.lists(rationals, min_size=10, max_size=10),
           t=st.lists(rationals, min_size=10, max_size=10),
           shift=st.lists(rationals, min_size=5, max_size=5))
    def prop(s, t, shift):
        b = morse.balanced(col, s)
        assert morse.balanced(col, b) == b
        assert all(sum(b[f] for f in cls) == 0 for cls in col.classes())
        moved = [x + shift[col[f]] for f, x in enumerate(s)]
        assert morse.balanced(col, moved) == b and morse.normalize_class(col, s, moved).equal
        assert (morse.balanced(col, t) == b) == morse.normalize_class(col, s, t).equal

    run_property("11.2", prop, "balanced representative idempotent and unique per class (10^4 cases)")


def test_canonical_form(group24):
    @PROPERTY
    @given(mask=st.integers(0, (1 << 24) - 1), pick=st.integers(0, group24.acting_order - 1))
    def prop(mask, pick):
        canon = group24.canonical(mask)
        assert group24.canonical(canon) == canon
        assert group24.canonical(int(group24.images(mask)[pick])) == canon

    run_property("11.3", prop, "canonical form idempotent and orbit-invariant on the 24-cell (10^4 cases)")


TRIANGLES = list(itertools.combinations(range(7), 3))


def test_certificate_replay():
    @PROPERTY
    @given(chosen=st.sets(st.sampled_from(TRIANGLES), min_size=1, max_size=12),
           seed=st.integers(0, 1000))
    def prop(chosen, seed):
        simplices = sorted(chosen)
        assert collapse.collapse(simplices, restarts=2, seed=seed).validate(simplices)

    run_property("11.4", prop, "collapse certificates replay on 10^4 random 2-complexes")


def test_fiber_gluing(cell24, complex_x):
    geometry = fiber.TriangleGeometry(cell24[0])

    @PROPERTY
    @given(bits=st.integers(0, (1 << 24) - 1), upper=st.booleans())
    def prop(bits, upper):
        s = morse.RealState.from_bits(bits, 24).scaled(Fraction(1, 2))
        level = Fraction(1, 2) if upper else 0
        assert fiber.build_fiber(*cell24, s, level, complex_x, geometry).check_involution()

    run_property("11.5", prop, "fiber face gluings form an involution on 10^4 random ±1/2 states")


def _cube_colouring(split):
    """Opposite facets of the cube share a colour unless the pair is split."""
    raw = [c for i, s in enumerate(split) for c in ((2 * i, 2 * i + 1) if s else (2 * i,) * 2)]
    order = {c: k for k, c in enumerate(dict.fromkeys(raw))}
    return [order[c] for c in raw]


def test_boundary_squared(complex_w, complex_x):
    @PROPERTY
    @given(data=st.data())
    def prop(data):
        n = data.draw(st.integers(2, 4))
        colours = _cube_colouring(data.draw(st.lists(st.booleans(), min_size=n, max_size=n)))
        perm = data.draw(st.permutations(range(max(colours) + 1)))
        p, col = polytope.generate_hypercube(n, [perm[c] for c in colours])
        assert cubecomplex.build_cube_complex(p, col).check_boundary_squared()

    def everything():
        prop()
        cx_z = cubecomplex.build_cube_complex(*polytope.load_bundled("cell120"))
        assert all(cx.check_boundary_squared() for cx in (complex_w, complex_x, cx_z))

    run_property("11.6", everything, "boundary squares to zero on W, X, Z and 10^4 coloured cubes")
