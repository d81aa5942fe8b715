from fractions import Fraction

import numpy as np
import pytest

from morsecube import polytope
from morsecube.polytope import Face, ParseError, Polytope, PolytopeError


def test_p4_counts(p4):
    p, col = p4
    assert p.facet_count == 10
    assert len(p.finite_vertices) == 5
    assert len(p.ideal_vertices) == 5
    assert col.c == 5


def test_p4_ideal_vertex_cube_colouring(p4):
    # every cube cross-section uses all five colours, one of them on an opposite pair
    p, col = p4
    for u in p.ideal_vertices:
        assert {col[f] for f in u.facets} == set(range(5))
        same = [(a, b) for a, b in p.ideal_pairs(u) if col[a] == col[b]]
        assert len(same) == 1


def test_orbifold_euler_values(p4, cell24, cell120, cube3):
    assert polytope.orbifold_euler(p4[0]) == Fraction(1, 16)
    assert polytope.orbifold_euler(cell24[0]) == 1
    assert polytope.orbifold_euler(cell120[0]) == Fraction(17, 2)
    assert polytope.orbifold_euler(cube3[0]) == 0


def test_cell24_bundled(cell24):
    p, col = cell24
    assert p.facet_count == 24
    assert len(p.ideal_vertices) == 24
    assert not p.finite_vertices
    assert len(p.faces_of_dim(2)) == 96
    assert {len(n) for n in p.neighbours} == {8}
    assert sorted(len(c) for c in col.classes()) == [8, 8, 8]


def test_cell120_bundled(cell120):
    p, col = cell120
    assert p.f_vector() == (600, 1200, 720, 120)
    assert {len(n) for n in p.neighbours} == {12}
    assert [len(c) for c in col.classes()] == [24] * 5


def test_generated_24cell_matches_bundled(cell24):
    p, col = polytope.generate_quaternion_polytope("cell24")
    q, qcol = cell24
    assert p.faces == q.faces
    assert col == qcol


@pytest.mark.parametrize("n,facets,edges,verts", [(2, 4, 4, 4), (3, 6, 12, 8), (4, 8, 32, 16)])
def test_hypercube(n, facets, edges, verts):
    p, col = polytope.generate_hypercube(n)
    assert p.facet_count == facets
    assert len(p.faces_of_dim(1)) == (edges if n > 2 else 4)
    assert len(p.finite_vertices) == verts
    assert col.c == n


def test_hypercube_rejects_dimension():
    with pytest.raises(PolytopeError):
        polytope.generate_hypercube(5)


def test_unit_cube_from_halfspaces():
    normals = np.array([[-1, 0, 0], [1, 0, 0], [0, -1, 0], [0, 1, 0], [0, 0, -1], [0, 0, 1]], float)
    p = polytope.face_lattice_from_halfspaces(normals, np.full(6, 0.5))
    assert len(p.finite_vertices) == 8
    assert not p.ideal_vertices
    assert p.f_vector() == (8, 12, 6)


def test_adjacency_matches_codim_two_faces(cell24):
    p, _ = cell24
    recomputed = np.zeros_like(p.adjacency)
    for f in p.faces_of_dim(p.dim - 2):
        a, b = f.facets
        recomputed[a, b] = recomputed[b, a] = True
    assert np.array_equal(recomputed, p.adjacency)


def test_round_trip(p4):
    p, col = p4
    text = polytope.dump_polytope(p, col)
    q, qcol = polytope.load_polytope(text)
    assert q.faces == p.faces and qcol == col


def test_colouring_conflict_rejected(cube3):
    p, col = cube3
    text = polytope.dump_polytope(p, col).replace("colours 1 1 2 2 3 3", "colours 1 1 1 2 3 3")
    with pytest.raises(PolytopeError, match="share colour"):
        polytope.load_polytope(text)


def test_parse_error_has_line_number():
    with pytest.raises(ParseError) as info:
        polytope.load_polytope("dim 3\nfacets 6\nbogus line\n")
    assert info.value.lineno == 3


def test_invalid_face_named():
    faces = [Face(1, (0, 1))]  # facets 0 and 1 of a square are not adjacent here
    with pytest.raises(PolytopeError):
        Polytope(2, 4, faces + [Face(0, (0, 1, 2))])


def test_data_dir_override(tmp_path, monkeypatch, cube3):
    p, col = cube3
    (tmp_path / "mine.poly").write_text(polytope.dump_polytope(p, col))
    monkeypatch.setenv("MORSECUBE_DATA", str(tmp_path))
    q, _ = polytope.load_bundled("mine")
    assert q.faces == p.faces


def test_colour_relabel_invariance(complex_w, p4):
    from morsecube import cubecomplex
    p, col = p4
    perm = [3, 0, 4, 1, 2]
    cx = cubecomplex.build_cube_complex(p, col.relabel(perm))
    assert cx.cell_counts() == complex_w.cell_counts()
    assert cx.betti == complex_w.betti
