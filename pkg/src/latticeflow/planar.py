"""Planar enclosure and outermost-circuit detection.

Both percolation geometries used here draw their open connections as straight
segments between integer points.  Scaling coordinates so that every segment
passes only through lattice points turns "a closed circuit of open
connections separates p from infinity" into a 4-connected flood-fill
question, which scipy.ndimage resolves in C speed:

* diagonal bond circuits on the checkerboard: squares scaled by 2, an open
  diagonal edge covers its two endpoints and the crossing vertex;
* site circuits on the triangular lattice: sites (k, l) scaled by 3, an open
  adjacency covers the four points along the segment; face centres of the
  hexagonal lattice land at (3k-1, 3l+2), never on a segment.

A 45-degree (or 60-degree) wall of covered points blocks a 4-connected path
exactly where the segment runs, and non-closed structures never disconnect
the grid, so flood-fill reachability matches curve enclosure exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np
from scipy import ndimage

Point = tuple[int, int]

_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.int8)


class UnionFind:
    """Union-find with path halving and union by size."""

    def __init__(self, items: Iterable[Hashable] = ()):
        self.parent: dict = {}
        self.size: dict = {}
        for it in items:
            self.add(it)

    def add(self, item) -> None:
        if item not in self.parent:
            self.parent[item] = item
            self.size[item] = 1

    def find(self, item):
        parent = self.parent
        while parent[item] != item:
            parent[item] = parent[parent[item]]
            item = parent[item]
        return item

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def connected(self, a, b) -> bool:
        return self.find(a) == self.find(b)

    def n_components(self) -> int:
        return sum(1 for it in self.parent if self.parent[it] == it)


@dataclass
class Circuit:
    """An outermost circuit: its open connections, the nodes it visits,
    and the nodes strictly inside it."""

    edges: frozenset
    nodes: frozenset
    interior: frozenset
    through_target: bool


class _Grid:
    """A refined integer grid holding wall points."""

    def __init__(self, points: Sequence[Point], margin: int):
        pts = np.asarray(points, dtype=np.int64)
        self.x0 = int(pts[:, 0].min()) - margin
        self.y0 = int(pts[:, 1].min()) - margin
        nx = int(pts[:, 0].max()) + margin - self.x0 + 1
        ny = int(pts[:, 1].max()) + margin - self.y0 + 1
        self.walls = np.zeros((nx, ny), dtype=bool)

    def offset(self, p: Point) -> Point:
        return (p[0] - self.x0, p[1] - self.y0)

    def add_wall(self, p: Point) -> None:
        q = self.offset(p)
        self.walls[q[0], q[1]] = True

    def analyse(self):
        """Label free space; return (labels, outside_label_set)."""
        free = ~self.walls
        labels, _ = ndimage.label(free, structure=_CROSS)
        frame = np.concatenate([labels[0, :], labels[-1, :],
                                labels[:, 0], labels[:, -1]])
        outside = set(np.unique(frame[frame > 0]).tolist())
        return labels, outside


def _outside_mask(labels: np.ndarray, outside: set) -> np.ndarray:
    if not outside:
        return np.zeros_like(labels, dtype=bool)
    return np.isin(labels, sorted(outside))


def _has_outside_neighbor(mask: np.ndarray, p: Point) -> bool:
    x, y = p
    nx, ny = mask.shape
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        qx, qy = x + dx, y + dy
        if 0 <= qx < nx and 0 <= qy < ny and mask[qx, qy]:
            return True
    return False


def outermost_circuit(segments: dict, edge_nodes: dict, node_points: dict,
                      target) -> Circuit | None:
    """Find the outermost circuit of open segments around or through a node.

    ``segments`` maps an edge key to the refined grid points its drawing
    covers (the private crossing point last); ``edge_nodes`` maps an edge key
    to its two node keys; ``node_points`` maps node keys to refined centre
    points.  Returns None when no closed curve of open segments separates the
    target node from infinity.
    """
    target_point = node_points[target]
    all_points = [target_point]
    for pts in segments.values():
        all_points.extend(pts)
    grid = _Grid(all_points, margin=2)
    for pts in segments.values():
        for p in pts:
            grid.add_wall(p)

    labels, outside = grid.analyse()
    out_mask = _outside_mask(labels, outside)
    pu = grid.offset(target_point)
    if out_mask[pu[0], pu[1]]:
        return None

    notout_labels, _ = ndimage.label(~out_mask, structure=_CROSS)
    h_label = notout_labels[pu[0], pu[1]]
    in_h = notout_labels == h_label

    circuit_edges = set()
    for key, pts in segments.items():
        mid = grid.offset(pts[-1])  # crossing point, private to the edge
        if in_h[mid[0], mid[1]] and _has_outside_neighbor(out_mask, mid):
            circuit_edges.add(key)
    if not circuit_edges:
        return None

    circuit_nodes = set()
    for key in circuit_edges:
        circuit_nodes.update(edge_nodes[key])
    interior = set()
    nx, ny = in_h.shape
    for node, p in node_points.items():
        q = grid.offset(p)
        # nodes outside the walls' bounding box cannot be enclosed
        if not (0 <= q[0] < nx and 0 <= q[1] < ny):
            continue
        if in_h[q[0], q[1]] and node not in circuit_nodes:
            interior.add(node)
    return Circuit(edges=frozenset(circuit_edges),
                   nodes=frozenset(circuit_nodes),
                   interior=frozenset(interior),
                   through_target=target in circuit_nodes)


def square_center(square: Point) -> Point:
    return (2 * square[0], 2 * square[1])


# ---------------------------------------------------------------------------
# Triangular-lattice site circuits (refined x3)

_TRI_POS_DIRS = ((1, 0), (0, 1), (1, -1))


def triangular_enclosed(open_sites: set, allowed_sites: set,
                        probe_points: Sequence[Point],
                        require_single_pocket: bool = False) -> list[bool]:
    """Which probe points are enclosed by a circuit of open allowed sites.

    Probe points are given in refined x3 coordinates (a hexagonal face (k,l)
    sits at (3k-1, 3l+2)); site (k,l) sits at (3k, 3l).  With
    ``require_single_pocket`` all probes must additionally share one
    connected enclosed pocket (one common surrounding circuit).
    """
    usable = open_sites & allowed_sites
    pts: list[Point] = list(probe_points)
    walls: list[Point] = []
    for (k, l) in usable:
        for dk, dl in _TRI_POS_DIRS:
            if (k + dk, l + dl) in usable:
                for t in range(4):
                    walls.append((3 * k + t * dk, 3 * l + t * dl))
    if not walls:
        return [False] * len(pts)
    grid = _Grid(pts + walls, margin=2)
    for p in walls:
        grid.add_wall(p)
    labels, outside = grid.analyse()
    out_mask = _outside_mask(labels, outside)
    enclosed = []
    for p in pts:
        q = grid.offset(p)
        enclosed.append(not out_mask[q[0], q[1]])
    if require_single_pocket and all(enclosed) and pts:
        pockets, _ = ndimage.label(~out_mask, structure=_CROSS)
        first = pockets[grid.offset(pts[0])]
        for p in pts[1:]:
            q = grid.offset(p)
            if pockets[q[0], q[1]] != first:
                return [False] * len(pts)
    return enclosed


def face_probe_point(face: Point) -> Point:
    """Refined x3 position of a hexagonal face centre in Y coordinates."""
    k, l = face
    return (3 * k - 1, 3 * l + 2)


def site_probe_point(site: Point) -> Point:
    return (3 * site[0], 3 * site[1])
