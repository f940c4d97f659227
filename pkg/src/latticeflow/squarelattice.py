"""Square-lattice geometry: checkerboard squares, diagonal graphs, domains.

Squares (faces) sit at integer coordinates; a square is black when its
coordinate sum is even.  Lattice vertices are corners, indexed by their
lower-left square: vertex (i, j) is the point (i+1/2, j+1/2) shared by the
squares (i, j), (i+1, j), (i, j+1), (i+1, j+1).

Each interior vertex x carries one black diagonal edge d_black(x) and one
white diagonal edge d_white(x) (the two same-colour pairs among its four
squares).  Diagonal edges parallel to exp(i*pi/4) form the class E_a, those
parallel to exp(3i*pi/4) the class E_b; at an even vertex the black diagonal
lies in E_a, at an odd vertex in E_b.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import EmptyDomain, NotSimplyConnected

Square = tuple[int, int]
Vertex = tuple[int, int]

AXIS_OFFSETS = ((1, 0), (-1, 0), (0, 1), (0, -1))
#: T-connectivity: the six same-colour neighbours used by the triangulation
#: argument.
T_OFFSETS = ((1, 1), (1, -1), (-1, 1), (-1, -1), (2, 0), (-2, 0))


def is_black(square: Square) -> bool:
    return (square[0] + square[1]) % 2 == 0


def square_neighbors(square: Square) -> list[Square]:
    i, j = square
    return [(i + di, j + dj) for di, dj in AXIS_OFFSETS]


def t_neighbors(square: Square) -> list[Square]:
    """The six T-connectivity neighbours (same colour class)."""
    i, j = square
    return [(i + di, j + dj) for di, dj in T_OFFSETS]


def vertex_squares(vertex: Vertex) -> tuple[Square, Square, Square, Square]:
    i, j = vertex
    return ((i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1))


def vertex_black_pair(vertex: Vertex) -> tuple[Square, Square]:
    """The black diagonal d_black(x): both black squares at the corner."""
    i, j = vertex
    if (i + j) % 2 == 0:
        return ((i, j), (i + 1, j + 1))
    return ((i + 1, j), (i, j + 1))


def vertex_white_pair(vertex: Vertex) -> tuple[Square, Square]:
    i, j = vertex
    if (i + j) % 2 == 0:
        return ((i + 1, j), (i, j + 1))
    return ((i, j), (i + 1, j + 1))


def vertex_black_in_a(vertex: Vertex) -> bool:
    """True when d_black(x) is parallel to exp(i*pi/4) (class E_a)."""
    return (vertex[0] + vertex[1]) % 2 == 0


def _complement_connected(squares: set[Square]) -> bool:
    xs = [i for i, _ in squares]
    ys = [j for _, j in squares]
    x0, x1 = min(xs) - 2, max(xs) + 2
    y0, y1 = min(ys) - 2, max(ys) + 2
    outside = {(i, j) for i in range(x0, x1 + 1) for j in range(y0, y1 + 1)
               if (i, j) not in squares}
    start = (x0, y0)
    seen = {start}
    stack = [start]
    while stack:
        s = stack.pop()
        for t in square_neighbors(s):
            if t in outside and t not in seen and x0 <= t[0] <= x1 and y0 <= t[1] <= y1:
                seen.add(t)
                stack.append(t)
    return len(seen) == len(outside)


class SquareDomain:
    """A simply connected set of squares with its diagonal-edge structures."""

    def __init__(self, squares: Iterable[Square]):
        square_set = set(map(tuple, squares))
        if not square_set:
            raise EmptyDomain("a domain needs at least one square")
        if not _complement_connected(square_set):
            raise NotSimplyConnected("square set complement is disconnected")
        self.squares: tuple[Square, ...] = tuple(sorted(square_set))
        self.square_index = {s: i for i, s in enumerate(self.squares)}
        n = len(self.squares)
        self.black_mask = np.array([is_black(s) for s in self.squares])
        self.black_squares = tuple(s for s in self.squares if is_black(s))
        self.white_squares = tuple(s for s in self.squares if not is_black(s))

        self.neighbors = np.full((n, 4), -1, dtype=np.int32)
        edge_boundary = []
        for i, s in enumerate(self.squares):
            for j, t in enumerate(square_neighbors(s)):
                if t in square_set:
                    self.neighbors[i, j] = self.square_index[t]
                else:
                    edge_boundary.append(s)
        self.edge_boundary: frozenset[Square] = frozenset(edge_boundary)
        self.even_domain: bool = all(is_black(s) for s in self.edge_boundary)

        # Interior vertices: all four squares inside.  Boundary faces share a
        # corner with the boundary cycle.
        candidates = {(s[0] + di, s[1] + dj)
                      for s in square_set for di in (-1, 0) for dj in (-1, 0)}
        interior = [v for v in sorted(candidates)
                    if all(sq in square_set for sq in vertex_squares(v))]
        self.interior_vertices: tuple[Vertex, ...] = tuple(interior)
        self.vertex_index = {v: i for i, v in enumerate(interior)}
        nv = len(interior)

        corner_count = np.zeros(n, dtype=np.int32)
        self.black_pairs = np.zeros((nv, 2), dtype=np.int32)
        self.white_pairs = np.zeros((nv, 2), dtype=np.int32)
        self.black_in_a = np.zeros(nv, dtype=bool)
        for k, v in enumerate(interior):
            b = vertex_black_pair(v)
            w = vertex_white_pair(v)
            self.black_pairs[k] = [self.square_index[b[0]], self.square_index[b[1]]]
            self.white_pairs[k] = [self.square_index[w[0]], self.square_index[w[1]]]
            self.black_in_a[k] = vertex_black_in_a(v)
            for sq in vertex_squares(v):
                corner_count[self.square_index[sq]] += 1
        # squares having a corner on the boundary cycle
        self.boundary_mask = corner_count < 4
        self.boundary_faces: frozenset[Square] = frozenset(
            s for i, s in enumerate(self.squares) if self.boundary_mask[i])
        self.boundary_black = frozenset(s for s in self.boundary_faces if is_black(s))
        self.boundary_white = frozenset(s for s in self.boundary_faces if not is_black(s))

        # per-square lists of incident interior vertices (for local updates)
        by_square: dict[int, list[int]] = {}
        for k, v in enumerate(interior):
            for sq in vertex_squares(v):
                by_square.setdefault(self.square_index[sq], []).append(k)
        self.square_vertices = np.full((n, 4), -1, dtype=np.int32)
        for i, ks in by_square.items():
            self.square_vertices[i, :len(ks)] = ks

    @property
    def n_squares(self) -> int:
        return len(self.squares)

    @property
    def n_vertices(self) -> int:
        return len(self.interior_vertices)

    def __contains__(self, square: Square) -> bool:
        return square in self.square_index

    def __repr__(self) -> str:
        flag = "even" if self.even_domain else "general"
        return (f"SquareDomain({self.n_squares} squares, "
                f"{self.n_vertices} interior vertices, {flag})")

    def to_json(self) -> dict:
        return {"type": "squares", "squares": [list(s) for s in self.squares]}

    @staticmethod
    def from_json(spec: dict) -> "SquareDomain":
        if spec["type"] == "squares":
            return SquareDomain(tuple(map(tuple, spec["squares"])))
        if spec["type"] == "square_block":
            return square_block(spec["width"], spec["height"],
                                tuple(spec.get("origin", (0, 0))))
        if spec["type"] == "even_diamond":
            return even_diamond(spec["radius"])
        raise ValueError(f"unknown square domain spec {spec['type']!r}")


def validate_even_domain(squares: Iterable[Square]) -> SquareDomain:
    """Build the domain and record whether it is an even domain."""
    return SquareDomain(squares)


def square_block(width: int, height: int, origin: Square = (0, 0)) -> SquareDomain:
    i0, j0 = origin
    return SquareDomain([(i0 + i, j0 + j)
                         for i in range(width) for j in range(height)])


def even_diamond(radius: int, center: Square = (0, 0)) -> SquareDomain:
    """The diamond |i| + |j| <= radius; an even domain when the extreme
    squares are black (radius + center parity even)."""
    c0, c1 = center
    return SquareDomain([(c0 + i, c1 + j)
                         for i in range(-radius, radius + 1)
                         for j in range(-radius, radius + 1)
                         if abs(i) + abs(j) <= radius])


class BondPerc:
    """A percolation on the diagonal edges of one colour class.

    Edges are indexed by their interior vertex through the bijection
    d_colour; the dual configuration lives on the other colour and opens
    exactly the complementary vertices.
    """

    __slots__ = ("domain", "color", "mask")

    def __init__(self, domain: SquareDomain, color: str, mask):
        if color not in ("black", "white"):
            raise ValueError("color must be 'black' or 'white'")
        self.domain = domain
        self.color = color
        self.mask = np.asarray(mask, dtype=bool).copy()
        if self.mask.shape != (domain.n_vertices,):
            raise ValueError("bond mask has the wrong length")
        self.mask.setflags(write=False)

    def dual(self) -> "BondPerc":
        other = "white" if self.color == "black" else "black"
        return BondPerc(self.domain, other, ~self.mask)

    def open_edges(self) -> set[tuple[Square, Square]]:
        pairs = (self.domain.black_pairs if self.color == "black"
                 else self.domain.white_pairs)
        squares = self.domain.squares
        return {(squares[pairs[k, 0]], squares[pairs[k, 1]])
                for k in np.flatnonzero(self.mask)}

    def __eq__(self, other) -> bool:
        return (isinstance(other, BondPerc) and self.domain is other.domain
                and self.color == other.color
                and np.array_equal(self.mask, other.mask))

    def __hash__(self) -> int:
        return hash((self.color, self.mask.tobytes()))

    def __repr__(self) -> str:
        return f"BondPerc({self.color}, {int(self.mask.sum())}/{len(self.mask)} open)"
