"""Hexagonal-lattice geometry: faces, Y-vertices, edges, domains.

Faces of the hexagonal lattice are centred at k + l*exp(i*pi/3) and are
indexed by the axial pair (k, l).  Face adjacency is the triangular lattice:
(k, l) touches (k+-1, l), (k, l+-1), (k+1, l-1), (k-1, l+1).

Every lattice vertex is the meeting point of three mutually adjacent faces,
so vertices are identified with dual triangles.  The two partite vertex
classes correspond to the two triangle orientations:

* Y-vertex (a, b)  <->  upward triangle {(a, b-1), (a+1, b-1), (a, b)};
  with this labelling the Y-vertices form the triangular lattice with the
  same six neighbour offsets as faces.
* down-vertex (a, b)  <->  downward triangle {(a, b), (a+1, b), (a+1, b-1)}.

An edge between adjacent faces u, v has exactly one endpoint in each class.
All structures here are immutable after construction and safe to share.
"""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np

from .errors import EmptyDomain, NotSimplyConnected

Face = tuple[int, int]
YVertex = tuple[int, int]
Edge = tuple[Face, Face]  # canonical: sorted pair of adjacent faces

#: Neighbour offsets of the face/triangular lattice (fixed order).
NEIGHBOR_OFFSETS: tuple[tuple[int, int], ...] = (
    (1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1),
)


def face_neighbors(face: Face) -> list[Face]:
    """The six faces adjacent to ``face``."""
    k, l = face
    return [(k + dk, l + dl) for dk, dl in NEIGHBOR_OFFSETS]


def y_tri(y: YVertex) -> tuple[Face, Face, Face]:
    """The three faces meeting at Y-vertex ``y``."""
    a, b = y
    return ((a, b - 1), (a + 1, b - 1), (a, b))


def down_tri(d: tuple[int, int]) -> tuple[Face, Face, Face]:
    """The three faces meeting at down-vertex ``d``."""
    a, b = d
    return ((a, b), (a + 1, b), (a + 1, b - 1))


def canonical_edge(u: Face, v: Face) -> Edge:
    return (u, v) if u <= v else (v, u)


def edge_vertices(u: Face, v: Face) -> tuple[YVertex, tuple[int, int]]:
    """The (Y-vertex, down-vertex) endpoints of the edge between faces u, v."""
    if (v[0] - u[0], v[1] - u[1]) not in ((1, 0), (0, 1), (1, -1)):
        u, v = v, u
    k, l = u
    d = (v[0] - k, v[1] - l)
    if d == (1, 0):
        return (k, l + 1), (k, l)
    if d == (0, 1):
        return (k, l + 1), (k - 1, l + 1)
    if d == (1, -1):
        return (k, l), (k, l)
    raise ValueError(f"faces {u} and {v} are not adjacent")


def face_up_vertices(face: Face) -> tuple[YVertex, YVertex, YVertex]:
    """The three Y-vertices incident to ``face``."""
    k, l = face
    return ((k, l), (k, l + 1), (k - 1, l + 1))


def hex_ball_faces(radius: int) -> set[Face]:
    """Faces within dual-graph distance ``radius`` of the origin face."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    return {(k, l)
            for k in range(-radius, radius + 1)
            for l in range(-radius, radius + 1)
            if abs(k + l) <= radius}


def _complement_connected(faces: set[Face]) -> bool:
    """Flood fill on the face-adjacency complement within a margin-2 box."""
    ks = [k for k, _ in faces]
    ls = [l for _, l in faces]
    k0, k1 = min(ks) - 2, max(ks) + 2
    l0, l1 = min(ls) - 2, max(ls) + 2
    outside = {(k, l)
               for k in range(k0, k1 + 1)
               for l in range(l0, l1 + 1)
               if (k, l) not in faces}
    if not outside:
        return True
    start = (k0, l0)
    seen = {start}
    stack = [start]
    while stack:
        f = stack.pop()
        for g in face_neighbors(f):
            if g in outside and g not in seen and k0 <= g[0] <= k1 and l0 <= g[1] <= l1:
                seen.add(g)
                stack.append(g)
    return len(seen) == len(outside)


class HexDomain:
    """A simply connected set of hexagonal faces with derived structures.

    Precomputes index arrays used by the vectorised samplers:

    * ``neighbors``      -- (nF, 6) face-index array, -1 where the neighbour
      is outside the domain (order follows :data:`NEIGHBOR_OFFSETS`);
    * ``y_tri_faces``    -- (nY, 3) face indices around each interior
      Y-vertex;
    * ``face_up_tris``   -- (nF, 3) indices into ``y_vertices`` of the
      interior Y-vertices incident to each face (-1 padding), and
      ``face_up_other`` -- (nF, 3, 2) the other two faces of those triangles.
    """

    def __init__(self, faces: Iterable[Face], radius: int | None = None):
        face_set = set(map(tuple, faces))
        if not face_set:
            raise EmptyDomain("a domain needs at least one face")
        if not _complement_connected(face_set):
            raise NotSimplyConnected("face set complement is disconnected")
        self.radius = radius
        self.faces: tuple[Face, ...] = tuple(sorted(face_set))
        self.face_index: dict[Face, int] = {f: i for i, f in enumerate(self.faces)}
        n = len(self.faces)

        self.neighbors = np.full((n, 6), -1, dtype=np.int32)
        boundary = []
        for i, f in enumerate(self.faces):
            for j, g in enumerate(face_neighbors(f)):
                if g in face_set:
                    self.neighbors[i, j] = self.face_index[g]
                else:
                    boundary.append(f)
        self.boundary_faces: frozenset[Face] = frozenset(boundary)
        self.boundary_mask = np.array(
            [f in self.boundary_faces for f in self.faces], dtype=bool)

        # Interior Y-vertices: all three faces inside; cycle vertices: some in,
        # some out.
        interior_y, boundary_y = [], []
        candidates = {y for f in face_set for y in face_up_vertices(f)}
        for y in sorted(candidates):
            inside = sum(f in face_set for f in y_tri(y))
            if inside == 3:
                interior_y.append(y)
            elif inside >= 1:
                boundary_y.append(y)
        self.y_vertices: tuple[YVertex, ...] = tuple(interior_y)
        self.y_index: dict[YVertex, int] = {y: i for i, y in enumerate(self.y_vertices)}
        self.boundary_y: frozenset[YVertex] = frozenset(boundary_y)

        nY = len(self.y_vertices)
        self.y_tri_faces = np.zeros((nY, 3), dtype=np.int32)
        for i, y in enumerate(self.y_vertices):
            self.y_tri_faces[i] = [self.face_index[f] for f in y_tri(y)]

        self.face_up_tris = np.full((n, 3), -1, dtype=np.int32)
        self.face_up_other = np.full((n, 3, 2), -1, dtype=np.int32)
        for i, f in enumerate(self.faces):
            slot = 0
            for y in face_up_vertices(f):
                yi = self.y_index.get(y)
                if yi is None:
                    continue
                others = [self.face_index[g] for g in y_tri(y) if g != f]
                self.face_up_tris[i, slot] = yi
                self.face_up_other[i, slot] = others
                slot += 1

        # Edges not on the boundary cycle (pairs of adjacent domain faces) and
        # the subset avoiding cycle vertices entirely (usable by loops).
        interior_edges: list[Edge] = []
        loop_edges: list[Edge] = []
        down_inside = {}
        for u in self.faces:
            for v in face_neighbors(u):
                if v in face_set and u < v:
                    e = (u, v)
                    interior_edges.append(e)
                    y, d = edge_vertices(u, v)
                    if d not in down_inside:
                        down_inside[d] = all(f in face_set for f in down_tri(d))
                    if y in self.y_index and down_inside[d]:
                        loop_edges.append(e)
        self.interior_edges: tuple[Edge, ...] = tuple(interior_edges)
        self.loop_edges: frozenset[Edge] = frozenset(loop_edges)
        self.interior_edge_idx = (
            np.array([[self.face_index[u], self.face_index[v]]
                      for u, v in interior_edges], dtype=np.int32)
            if interior_edges else np.zeros((0, 2), dtype=np.int32))

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_y(self) -> int:
        return len(self.y_vertices)

    def __contains__(self, face: Face) -> bool:
        return face in self.face_index

    def __repr__(self) -> str:
        return f"HexDomain({self.n_faces} faces, {self.n_y} Y-vertices)"

    def to_json(self) -> dict:
        if self.radius is not None:
            return {"type": "hex_ball", "radius": self.radius}
        return {"type": "hex_faces", "faces": [list(f) for f in self.faces]}

    @staticmethod
    def from_json(spec: dict) -> "HexDomain":
        if spec["type"] == "hex_ball":
            return hex_ball(spec["radius"])
        if spec["type"] == "hex_faces":
            return HexDomain(tuple(map(tuple, spec["faces"])))
        raise ValueError(f"unknown hex domain spec {spec['type']!r}")


def hex_ball(radius: int) -> HexDomain:
    """The domain of all faces within dual-graph distance ``radius`` of (0,0)."""
    return HexDomain(hex_ball_faces(radius), radius=radius)


class SitePerc:
    """A site percolation on the interior Y-vertices of a domain."""

    __slots__ = ("domain", "open_sites")

    def __init__(self, domain: HexDomain, open_sites: Iterable[YVertex]):
        self.domain = domain
        sites = frozenset(map(tuple, open_sites))
        unknown = sites - set(domain.y_vertices)
        if unknown:
            raise ValueError(f"sites not in Y(domain): {sorted(unknown)[:3]}")
        self.open_sites: frozenset[YVertex] = sites

    def dual(self) -> "SitePerc":
        """The exact complement within Y(domain)."""
        return SitePerc(self.domain, set(self.domain.y_vertices) - self.open_sites)

    def as_mask(self) -> np.ndarray:
        mask = np.zeros(self.domain.n_y, dtype=bool)
        for y in self.open_sites:
            mask[self.domain.y_index[y]] = True
        return mask

    @staticmethod
    def from_mask(domain: HexDomain, mask: np.ndarray) -> "SitePerc":
        return SitePerc(domain, [domain.y_vertices[i] for i in np.flatnonzero(mask)])

    def __eq__(self, other) -> bool:
        return (isinstance(other, SitePerc) and self.domain is other.domain
                and self.open_sites == other.open_sites)

    def __hash__(self) -> int:
        return hash(self.open_sites)

    def __repr__(self) -> str:
        return f"SitePerc({len(self.open_sites)}/{self.domain.n_y} open)"


def triangle_edges(open_sites: Iterable[YVertex], domain: HexDomain) -> set[Edge]:
    """Union of the three dual edges of each open Y-vertex, within E(domain*).

    Distinct Y-vertices contribute disjoint edge triplets (upward triangles
    share no edge), so the result has exactly 3 * #open edges when all sites
    are interior.
    """
    edges: set[Edge] = set()
    for y in open_sites:
        a, b, c = y_tri(y)
        for u, v in ((a, b), (b, c), (a, c)):
            if u in domain.face_index and v in domain.face_index:
                edges.add(canonical_edge(u, v))
    return edges


def rhombus(m: int) -> tuple[set[YVertex], dict[str, set[YVertex]]]:
    """The rhombus R_m of Y-vertices with its four labelled sides.

    R_m = {(k, l) : k, l in [-m, m]} in Y-vertex coordinates; the left,
    right, top and bottom sides are k = -m, k = m, l = m and l = -m.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    rng = range(-m, m + 1)
    vertices = {(k, l) for k in rng for l in rng}
    sides = {
        "left": {(-m, l) for l in rng},
        "right": {(m, l) for l in rng},
        "top": {(k, m) for k in rng},
        "bottom": {(k, -m) for k in rng},
    }
    return vertices, sides


def iter_loop_vertices(edges: Iterable[Edge]) -> Iterator[tuple[str, int, int]]:
    """All (class, a, b) vertex labels touched by the given edges."""
    for u, v in edges:
        y, d = edge_vertices(u, v)
        yield ("y", *y)
        yield ("d", *d)
