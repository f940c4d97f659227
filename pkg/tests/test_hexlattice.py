"""Geometry tests for the hexagonal lattice and its domains."""

import pytest

from latticeflow.errors import EmptyDomain, NotSimplyConnected
from latticeflow.hexlattice import (HexDomain, SitePerc, edge_vertices,
                                    face_neighbors, face_up_vertices,
                                    hex_ball, hex_ball_faces, rhombus,
                                    triangle_edges, y_tri)


def bfs_ball(radius):
    """Independent BFS oracle for the face ball."""
    seen = {(0, 0)}
    frontier = [(0, 0)]
    for _ in range(radius):
        nxt = []
        for f in frontier:
            for g in face_neighbors(f):
                if g not in seen:
                    seen.add(g)
                    nxt.append(g)
        frontier = nxt
    return seen


@pytest.mark.parametrize("radius,expected", [(0, 1), (1, 7), (2, 19)])
def test_hex_ball_sizes(radius, expected):
    assert len(hex_ball(radius).faces) == expected


@pytest.mark.parametrize("radius", range(5))
def test_hex_ball_matches_bfs(radius):
    assert hex_ball_faces(radius) == bfs_ball(radius)


def test_face_adjacency_is_symmetric_and_six_fold():
    f = (3, -2)
    neigh = face_neighbors(f)
    assert len(set(neigh)) == 6
    for g in neigh:
        assert f in face_neighbors(g)


def test_y_vertex_faces_are_mutually_adjacent():
    for y in [(0, 0), (2, -1), (-3, 5)]:
        a, b, c = y_tri(y)
        assert b in face_neighbors(a)
        assert c in face_neighbors(a)
        assert c in face_neighbors(b)


def test_every_edge_has_one_endpoint_per_class():
    dom = hex_ball(2)
    for u, v in dom.interior_edges:
        y, d = edge_vertices(u, v)
        assert {u, v} <= set(y_tri(y))
        from latticeflow.hexlattice import down_tri
        assert {u, v} <= set(down_tri(d))


def test_interior_y_count_equals_fully_inside_triangles():
    dom = hex_ball(3)
    face_set = set(dom.faces)
    oracle = {y for f in face_set for y in face_up_vertices(f)
              if all(g in face_set for g in y_tri(y))}
    assert set(dom.y_vertices) == oracle
    assert not oracle & dom.boundary_y


def test_ball1_has_three_interior_y_vertices_and_center_hexagon():
    dom = hex_ball(1)
    assert dom.n_y == 3
    # the only loop-usable edges are the six sides of the centre hexagon
    assert len(dom.loop_edges) == 6
    for u, v in dom.loop_edges:
        assert (0, 0) in (u, v) or (0, 0) in face_neighbors(u)


def test_boundary_faces_touch_outside():
    dom = hex_ball(2)
    for f in dom.faces:
        outside = any(g not in dom.face_index for g in face_neighbors(f))
        assert (f in dom.boundary_faces) == outside


def test_triangle_edges_examples():
    dom = hex_ball(2)
    assert triangle_edges([], dom) == set()
    y = dom.y_vertices[0]
    edges = triangle_edges([y], dom)
    assert len(edges) == 3
    faces = set(y_tri(y))
    assert all(set(e) <= faces for e in edges)


def test_triangle_edges_adjacent_y_vertices_disjoint():
    dom = hex_ball(3)
    y1 = (0, 0)
    y2 = (1, 0)  # adjacent Y-vertices
    assert y1 in dom.y_index and y2 in dom.y_index
    edges = triangle_edges([y1, y2], dom)
    assert len(edges) == 6


def test_triangle_edges_cover_all_edges_with_interior_top_endpoint():
    dom = hex_ball(2)
    covered = triangle_edges(dom.y_vertices, dom)
    expected = {e for e in dom.interior_edges
                if edge_vertices(*e)[0] in dom.y_index}
    assert covered == expected


@pytest.mark.parametrize("m,count", [(0, 1), (1, 9), (2, 25)])
def test_rhombus_sizes(m, count):
    vertices, sides = rhombus(m)
    assert len(vertices) == count
    for side in sides.values():
        assert side <= vertices


def test_rhombus_sides():
    vertices, sides = rhombus(2)
    assert sides["left"] == {(-2, l) for l in range(-2, 3)}
    assert len(sides["left"]) == 5
    v0, s0 = rhombus(0)
    assert v0 == {(0, 0)}
    assert all(s == {(0, 0)} for s in s0.values())


def test_empty_domain_rejected():
    with pytest.raises(EmptyDomain):
        HexDomain([])


def test_domain_with_hole_rejected():
    ring = hex_ball_faces(2) - {(0, 0)}
    with pytest.raises(NotSimplyConnected):
        HexDomain(ring)


def test_json_round_trip():
    dom = hex_ball(2)
    again = HexDomain.from_json(dom.to_json())
    assert again.faces == dom.faces
    explicit = HexDomain(dom.faces)
    again2 = HexDomain.from_json(explicit.to_json())
    assert again2.faces == dom.faces


def test_site_perc_dual_is_complement():
    dom = hex_ball(2)
    xi = SitePerc(dom, dom.y_vertices[::2])
    dual = xi.dual()
    assert xi.open_sites | dual.open_sites == set(dom.y_vertices)
    assert not xi.open_sites & dual.open_sites
    assert dual.dual() == xi
