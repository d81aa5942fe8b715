import numpy as np
import pytest

from morsecube import morse, polytope, search
from morsecube.search import SymmetryGroup, TransversalError


def test_group_orders(group24, cube3):
    assert group24.order == 1152
    assert group24.acting_order == 1152 * 8
    g3 = search.automorphisms(*cube3)
    assert g3.order == 48 and g3.is_closed()


def test_cube_group_is_closed_under_inverse_and_compose(cube3):
    g = search.automorphisms(*cube3)
    a, b = g.elements[5], g.elements[17]
    ab = g.compose(a, b)
    assert g.compose(ab, g.inverse(ab)).facets == tuple(range(6))


def test_trivial_group(cube3):
    p, col = cube3
    ident = search.Symmetry(tuple(range(6)), tuple(range(3)))
    g = SymmetryGroup([ident], col)
    # only the colour flips act
    assert g.orbit_size(0b000001) == 8


def test_cube_fibration_census(cube3):
    census = search.enumerate_states(*cube3, "fibration")
    assert [(c.mask, c.orbit_size) for c in census.classes] == [(0x01, 24), (0x05, 24), (0x15, 8)]
    assert all(c.status == morse.FIBRATION for c in census.classes)
    assert not census.partial and census.group_order == 48


def test_canonicalization(group24):
    rng = np.random.default_rng(5)
    masks = rng.integers(0, 1 << 24, size=200, dtype=np.uint64)
    canon = group24.canonical_many(masks)
    assert np.array_equal(group24.canonical_many(canon), canon)
    for m, c in zip(masks[:20], canon[:20]):
        assert group24.canonical(int(m)) == int(c)
        assert int(c) in set(int(x) for x in group24.images(int(m)))


def test_orbit_stabilizer(group24):
    for m in (0x1, 0xde7b0, 0x123456, 0xfff000):
        assert group24.orbit_size(m) * group24.stabilizer_size(m) == group24.acting_order


def test_verdict_constant_on_orbit(cell24, group24):
    p, col = cell24
    base = search.quaternion_orbit_state().to_bits()
    images = sorted(set(int(x) for x in group24.images(base)))[:12]
    verdicts = {(v.status, v.critical_points)
                for v in (morse.verify(p, col, morse.RealState.from_bits(m, 24)) for m in images)}
    assert verdicts == {(morse.PERFECT, 8)}


def test_symmetric_state_class(group24):
    s = search.quaternion_orbit_state()
    assert s.to_bits() == 0b111000101100001101000111
    assert group24.canonical(s.to_bits()) == 0xde7b0
    assert group24.orbit_size(s.to_bits()) == 48


def test_budget_marks_partial(cell24, group24):
    census = search.enumerate_states(*cell24, budget=1 << 18, group=group24)
    assert census.partial and census.stats["examined"] == 1 << 18


def test_threads_match_sequential(cell24, group24):
    one = search.enumerate_states(*cell24, budget=1 << 21, group=group24)
    two = search.enumerate_states(*cell24, budget=1 << 21, threads=2, group=group24)
    assert one.lines(24) == two.lines(24) and one.stats == two.stats


def test_unknown_filter(cube3):
    with pytest.raises(ValueError):
        search.enumerate_states(*cube3, "nonsense")


def test_link_oracle_euler(cell24):
    oracle = search.LinkOracle(cell24[0])
    masks = [0x1, 0xde7b0, 0xfff000]
    assert list(oracle.euler(masks)) == [oracle.euler_int(m) for m in masks]
    assert oracle.euler_int(0x1) == 1


@pytest.fixture(scope="module")
def ico():
    from morsecube import quaternions as quat
    group = quat.QuaternionGroup(quat.binary_icosahedral())
    return group, group.subgroup_indices(quat.binary_tetrahedral())


def test_coset_state_split(ico):
    group, tet = ico
    base = search.quaternion_orbit_state().values
    s = search.coset_state_120((0, 1, 2, 3, 4), base, group, tet)
    assert sum(1 for x in s.values if x > 0) == 60
    with pytest.raises(TransversalError):
        search.coset_state_120((0, 0, 2, 3, 4), base, group, tet)


def test_coset_identity_restricts_to_base(ico):
    group, tet = ico
    base = search.quaternion_orbit_state().values
    cosets = group.left_cosets(tet)
    transversal = tuple(c[0] for c in cosets)
    s = search.coset_state_120(transversal, base, group, tet)
    first = next(c[0] for c in cosets if group.identity in c)
    for k, t in enumerate(tet):
        assert s.values[group.mul(first, t)] == base[k]


def test_cell120_facets_match_group(cell120):
    p, _ = cell120
    assert p.facet_count == 120 and polytope.orbifold_euler(p) > 0
