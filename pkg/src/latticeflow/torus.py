"""The 2n x 2n torus: faces, lattice edges, and interface loops.

Faces live at (i, j) mod 2n with the checkerboard parity; lattice vertices
(corners) are indexed by their lower-left face, so vertex (i, j) touches the
faces (i, j), (i+1, j), (i, j+1), (i+1, j+1).  Lattice edges are
("h", i, j) from vertex (i, j) to (i+1, j) and ("v", i, j) from (i, j) to
(i, j+1); there are 8 n^2 of them, each separating two faces.

A percolation on the black diagonal edges (indexed by vertices through the
d_black bijection) induces a partition of the lattice edges into interface
loops separating primal from dual clusters: at each vertex the two passing
arcs avoid crossing the open diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EdgeId = tuple[str, int, int]


class TorusLattice:
    """The square lattice modulo 2n in both directions."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("torus size n must be >= 1")
        self.n = n
        self.side = 2 * n
        side = self.side
        self.faces = [(i, j) for i in range(side) for j in range(side)]
        self.vertices = [(i, j) for i in range(side) for j in range(side)]
        self.edges: list[EdgeId] = (
            [("h", i, j) for i in range(side) for j in range(side)]
            + [("v", i, j) for i in range(side) for j in range(side)])
        self.vertex_index = {v: k for k, v in enumerate(self.vertices)}

    def wrap(self, i: int, j: int) -> tuple[int, int]:
        return (i % self.side, j % self.side)

    def is_black(self, face) -> bool:
        return (face[0] + face[1]) % 2 == 0

    @property
    def n_vertices(self) -> int:
        return self.side * self.side

    @property
    def n_faces(self) -> int:
        return self.side * self.side

    @property
    def n_edges(self) -> int:
        return 2 * self.side * self.side

    def black_pair(self, vertex) -> tuple[tuple[int, int], tuple[int, int]]:
        """The black diagonal edge d_black(vertex) as a pair of faces."""
        i, j = vertex
        if (i + j) % 2 == 0:
            return (self.wrap(i, j), self.wrap(i + 1, j + 1))
        return (self.wrap(i + 1, j), self.wrap(i, j + 1))

    def white_pair(self, vertex) -> tuple[tuple[int, int], tuple[int, int]]:
        i, j = vertex
        if (i + j) % 2 == 0:
            return (self.wrap(i + 1, j), self.wrap(i, j + 1))
        return (self.wrap(i, j), self.wrap(i + 1, j + 1))

    def black_in_a(self, vertex) -> bool:
        return (vertex[0] + vertex[1]) % 2 == 0

    def edge_faces(self, edge: EdgeId) -> tuple[tuple[int, int], tuple[int, int]]:
        """The two faces separated by a lattice edge."""
        kind, i, j = edge
        if kind == "h":
            return (self.wrap(i + 1, j), self.wrap(i + 1, j + 1))  # below, above
        return (self.wrap(i, j + 1), self.wrap(i + 1, j + 1))  # west, east

    def faces_between(self, u, v) -> EdgeId:
        """The lattice edge separating two adjacent faces."""
        ui, uj = u
        di = (v[0] - ui) % self.side
        dj = (v[1] - uj) % self.side
        if (di, dj) == (1, 0):
            return ("v", ui % self.side, (uj - 1) % self.side)
        if (di, dj) == (self.side - 1, 0):
            return self.faces_between(v, u)
        if (di, dj) == (0, 1):
            return ("h", (ui - 1) % self.side, uj % self.side)
        if (di, dj) == (0, self.side - 1):
            return self.faces_between(v, u)
        raise ValueError(f"faces {u} and {v} are not adjacent")


_TURN = {((1, 0), (0, 1)): 1, ((0, 1), (-1, 0)): 1,
         ((-1, 0), (0, -1)): 1, ((0, -1), (1, 0)): 1,
         ((1, 0), (0, -1)): -1, ((0, -1), (-1, 0)): -1,
         ((-1, 0), (0, 1)): -1, ((0, 1), (1, 0)): -1}


@dataclass
class TorusLoop:
    """One interface loop with its reference-orientation invariants.

    * ``turn_diff``  -- #left turns - #right turns (+-4 when contractible);
    * ``winding``    -- (wx, wy) homology class;
    * ``cross_h``    -- net signed crossings of the horizontal dual cycle;
    * ``cross_v``    -- net signed crossings of the vertical dual cycle;
    * ``cross_cols`` -- per-column signed crossings of the bottom dual row,
      so that sum(cross_cols[:2k]) is the signed crossing count of the walk
      p^k (2k steps east from the black square at the origin).
    """

    edges: frozenset
    steps: tuple
    turn_diff: int
    winding: tuple[int, int]
    cross_h: int
    cross_v: int
    cross_cols: np.ndarray

    @property
    def contractible(self) -> bool:
        return self.winding == (0, 0)

    def __len__(self) -> int:
        return len(self.edges)


class TorusLoopConfig:
    """A partition of the torus lattice edges into interface loops."""

    def __init__(self, torus: TorusLattice, loops: list[TorusLoop]):
        self.torus = torus
        self.loops = loops

    @property
    def contractible(self) -> list[TorusLoop]:
        return [l for l in self.loops if l.contractible]

    @property
    def non_contractible(self) -> list[TorusLoop]:
        return [l for l in self.loops if not l.contractible]

    def __len__(self) -> int:
        return len(self.loops)


def _slot_edges(torus: TorusLattice, vertex) -> dict[str, EdgeId]:
    i, j = vertex
    side = torus.side
    return {
        "right": ("h", i, j),
        "left": ("h", (i - 1) % side, j),
        "up": ("v", i, j),
        "down": ("v", i, (j - 1) % side),
    }


_PAIRING_A = {"up": "left", "left": "up", "down": "right", "right": "down"}
_PAIRING_B = {"down": "left", "left": "down", "up": "right", "right": "up"}

# Direction of travel when LEAVING a vertex through a slot, and the vertex a
# slot-edge leads to.
_SLOT_DIR = {"right": (1, 0), "left": (-1, 0), "up": (0, 1), "down": (0, -1)}
_DIR_SLOT = {d: s for s, d in _SLOT_DIR.items()}


def loops_from_fk(torus: TorusLattice, eta) -> TorusLoopConfig:
    """Interface loops of a black-edge percolation (vertex-indexed bits).

    At an even vertex with the black diagonal open (or an odd vertex with it
    closed) the arcs pair {up,left} and {down,right}; otherwise {down,left}
    and {up,right}.
    """
    eta = np.asarray(eta, dtype=bool)
    if eta.shape != (torus.n_vertices,):
        raise ValueError("eta must have one bit per torus vertex")
    side = torus.side

    def pairing_at(vertex):
        parity = (vertex[0] + vertex[1]) % 2
        open_black = bool(eta[torus.vertex_index[vertex]])
        return _PAIRING_A if (parity == 0) == open_black else _PAIRING_B

    # map (vertex, slot) -> (edge, other_vertex)
    unused: set[EdgeId] = set(torus.edges)
    loops: list[TorusLoop] = []
    while unused:
        start_edge = next(iter(unused))
        # traverse starting eastward/northward along the start edge
        kind, i, j = start_edge
        if kind == "h":
            at_vertex = ((i + 1) % side, j)  # arriving at the east endpoint
            direction = (1, 0)
        else:
            at_vertex = (i, (j + 1) % side)
            direction = (0, 1)
        edges = []
        steps = []
        turn = 0
        wx = wy = 0
        cross_h = cross_v = 0
        cross_cols = np.zeros(side, dtype=np.int64)
        edge = start_edge
        while True:
            edges.append(edge)
            steps.append((edge, direction))
            unused.discard(edge)
            kind, ei, ej = edge
            if kind == "v" and ej == side - 1:
                # crossing the bottom dual row (between faces (m,0) row and
                # the row below): sign +1 when travelling north
                sign = 1 if direction == (0, 1) else -1
                cross_h += sign
                cross_cols[ei] += sign
            if kind == "h" and ei == side - 1:
                sign = -1 if direction == (1, 0) else 1
                cross_v += sign
            wx += direction[0]
            wy += direction[1]
            # the slot we entered through points back along -direction
            slots = _slot_edges(torus, at_vertex)
            in_slot = _DIR_SLOT[(-direction[0], -direction[1])]
            out_slot = pairing_at(at_vertex)[in_slot]
            new_dir = _SLOT_DIR[out_slot]
            turn += _TURN[(direction, new_dir)]
            edge = slots[out_slot]
            direction = new_dir
            vi, vj = at_vertex
            at_vertex = ((vi + new_dir[0]) % side, (vj + new_dir[1]) % side)
            if edge == start_edge and edge not in unused:
                break
        loops.append(TorusLoop(
            edges=frozenset(edges), steps=tuple(steps), turn_diff=turn,
            winding=(wx // side, wy // side), cross_h=cross_h,
            cross_v=cross_v, cross_cols=cross_cols))
    return TorusLoopConfig(torus, loops)


def _lifted_vertical_steps(loop: TorusLoop) -> list[tuple[int, int, int]]:
    """Lift a contractible loop to the plane; return its vertical steps.

    Each item is (lx, ly, sign): a traversal of the vertical lattice segment
    at x = lx + 1/2 spanning y in (ly + 1/2, ly + 3/2), signed +1 northward.
    """
    edge, direction = loop.steps[0]
    kind, i, j = edge
    if kind == "h":
        lx, ly = (i, j) if direction == (1, 0) else (i + 1, j)
    else:
        lx, ly = (i, j) if direction == (0, 1) else (i, j + 1)
    steps = []
    for edge, direction in loop.steps:
        if edge[0] == "v":
            if direction == (0, 1):
                steps.append((lx, ly, 1))
            else:
                steps.append((lx, ly - 1, -1))
        lx += direction[0]
        ly += direction[1]
    return steps


def loop_surrounds(torus: TorusLattice, loop: TorusLoop, face) -> bool:
    """Whether a contractible loop strictly surrounds a face.

    Computed as a winding number of the lifted curve: the signed crossings of
    the eastward ray from the face centre.  Pinched interiors (curves that
    touch themselves at corners) are handled exactly.
    """
    if not loop.contractible:
        raise ValueError("surrounds is defined for contractible loops only")
    fi, fj = torus.wrap(*face)
    vsteps = _lifted_vertical_steps(loop)
    if not vsteps:
        return False
    side = torus.side
    xs = [lx for lx, _, _ in vsteps]
    ys = [ly for _, ly, _ in vsteps]
    # candidate lifted copies of the face within the curve's bounding box
    for sx in range((min(xs) - fi) // side - 1, (max(xs) - fi) // side + 2):
        fx = fi + sx * side
        if fx > max(xs):
            continue
        for sy in range((min(ys) - fj) // side - 1, (max(ys) - fj) // side + 2):
            fy = fj + sy * side
            winding = sum(sign for lx, ly, sign in vsteps
                          if lx >= fx and ly == fy - 1)
            if winding != 0:
                return True
    return False
