"""Loop O(n) model, Lipschitz heights, two-spin representation, percolations.

The loop O(n) measure on a hexagonal domain weights a loop configuration
omega by n^{#loops} * x^{#edges}.  At n = 2 the loops are the level lines of
an integer Lipschitz height function on the faces, which in turn is encoded
by a pair of +-1 spin fields (sigma_black, sigma_white):

    sigma_black = +  on  {h in {0, 1} + 4Z},
    sigma_white = +  on  {h in {0, -1} + 4Z}.

The spin pair is weighted by (x^2)^{#Y-vertices incident to a domain wall}.
On top of the spins, uniform variables attached to the Y-vertices produce the
coupled black/white site percolations (xi_black, xi_white); for
1/sqrt(2) <= x <= 1 these cover every Y-vertex (super-duality).
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .bc import BoundaryCondition, FREE
from .errors import (IncompatibleInput, InconsistentPair, InvalidDegree,
                     NotRepresentable)
from .hexlattice import (Edge, Face, HexDomain, SitePerc, YVertex,
                         canonical_edge, edge_vertices, triangle_edges, y_tri)


class LoopParams:
    """Loop weight n and edge weight x, with the coupling-regime flags."""

    def __init__(self, n: float, x: float):
        if n <= 0 or x <= 0:
            raise ValueError("loop and edge weights must be positive")
        self.n = float(n)
        self.x = float(x)

    @property
    def fkg_regime(self) -> bool:
        return self.x <= 1.0

    @property
    def super_duality_regime(self) -> bool:
        return 1.0 / math.sqrt(2.0) <= self.x <= 1.0

    def __repr__(self) -> str:
        return f"LoopParams(n={self.n}, x={self.x})"


# ---------------------------------------------------------------------------
# Loop configurations


class LoopConfig:
    """A subset of loop-usable edges of a hexagonal domain."""

    __slots__ = ("domain", "edges")

    def __init__(self, domain: HexDomain, edges: Iterable[Edge]):
        self.domain = domain
        self.edges: frozenset[Edge] = frozenset(
            canonical_edge(*e) for e in edges)
        bad = self.edges - set(domain.interior_edges)
        if bad:
            raise InvalidDegree(f"edges outside the domain interior: {sorted(bad)[:3]}")

    def validate(self) -> None:
        """Raise InvalidDegree unless every vertex has degree 0 or 2 and no
        edge touches the boundary cycle."""
        touching = self.edges - self.domain.loop_edges
        if touching:
            raise InvalidDegree(
                f"edges incident to the boundary cycle: {sorted(touching)[:3]}")
        deg: dict[tuple, int] = {}
        for u, v in self.edges:
            y, d = edge_vertices(u, v)
            deg[("y", y)] = deg.get(("y", y), 0) + 1
            deg[("d", d)] = deg.get(("d", d), 0) + 1
        for vertex, k in deg.items():
            if k not in (0, 2):
                raise InvalidDegree(f"vertex {vertex} has degree {k}")

    def __len__(self) -> int:
        return len(self.edges)

    def __eq__(self, other) -> bool:
        return (isinstance(other, LoopConfig) and self.domain is other.domain
                and self.edges == other.edges)

    def __hash__(self) -> int:
        return hash(self.edges)

    def __repr__(self) -> str:
        return f"LoopConfig({len(self.edges)} edges)"


def decompose_loops(omega: LoopConfig) -> list[frozenset[Edge]]:
    """Partition the edges of a valid configuration into vertex-disjoint cycles."""
    omega.validate()
    adj: dict[tuple, list[Edge]] = {}
    for e in omega.edges:
        y, d = edge_vertices(*e)
        adj.setdefault(("y", y), []).append(e)
        adj.setdefault(("d", d), []).append(e)
    loops: list[frozenset[Edge]] = []
    unused = set(omega.edges)
    while unused:
        start = unused.pop()
        loop = {start}
        frontier = [start]
        while frontier:
            e = frontier.pop()
            y, d = edge_vertices(*e)
            for vertex in (("y", y), ("d", d)):
                for f in adj[vertex]:
                    if f in unused:
                        unused.discard(f)
                        loop.add(f)
                        frontier.append(f)
        loops.append(frozenset(loop))
    return loops


def loop_weight(omega: LoopConfig, params: LoopParams) -> float:
    """Unnormalised weight n^{#loops} * x^{#edges}."""
    loops = decompose_loops(omega)
    return params.n ** len(loops) * params.x ** len(omega.edges)


# ---------------------------------------------------------------------------
# Lipschitz heights and spins


class LipschitzFn:
    """An integer height on the faces changing by at most 1 across edges."""

    __slots__ = ("domain", "values")

    def __init__(self, domain: HexDomain, values):
        self.domain = domain
        if isinstance(values, Mapping):
            arr = np.array([values[f] for f in domain.faces], dtype=np.int64)
        else:
            arr = np.asarray(values, dtype=np.int64).copy()
            if arr.shape != (domain.n_faces,):
                raise ValueError("height vector has the wrong length")
        i, j = domain.interior_edge_idx.T if len(domain.interior_edges) else ((), ())
        if len(domain.interior_edges) and np.abs(arr[i] - arr[j]).max(initial=0) > 1:
            raise ValueError("not 1-Lipschitz across some edge")
        self.values = arr
        self.values.setflags(write=False)

    def __getitem__(self, face: Face) -> int:
        return int(self.values[self.domain.face_index[face]])

    def is_zero_boundary(self) -> bool:
        return not np.any(self.values[self.domain.boundary_mask])

    def as_dict(self) -> dict[Face, int]:
        return {f: int(v) for f, v in zip(self.domain.faces, self.values)}

    def __eq__(self, other) -> bool:
        return (isinstance(other, LipschitzFn) and self.domain is other.domain
                and np.array_equal(self.values, other.values))

    def __hash__(self) -> int:
        return hash(self.values.tobytes())


class SpinPair:
    """A pair of +-1 spin fields on the faces (black, white)."""

    __slots__ = ("domain", "sigma_black", "sigma_white")

    def __init__(self, domain: HexDomain, sigma_black, sigma_white):
        self.domain = domain
        self.sigma_black = _as_spins(domain, sigma_black)
        self.sigma_white = _as_spins(domain, sigma_white)

    def is_consistent(self) -> bool:
        """Either the black or the white spins agree across every edge."""
        idx = self.domain.interior_edge_idx
        if len(idx) == 0:
            return True
        i, j = idx.T
        bad_b = self.sigma_black[i] != self.sigma_black[j]
        bad_w = self.sigma_white[i] != self.sigma_white[j]
        return not np.any(bad_b & bad_w)

    def require_consistent(self) -> None:
        if not self.is_consistent():
            raise InconsistentPair("black and white domain walls intersect")

    def copy(self) -> "SpinPair":
        return SpinPair(self.domain, self.sigma_black.copy(), self.sigma_white.copy())

    def state_key(self) -> tuple[bytes, bytes]:
        return (self.sigma_black.tobytes(), self.sigma_white.tobytes())

    def __eq__(self, other) -> bool:
        return (isinstance(other, SpinPair) and self.domain is other.domain
                and np.array_equal(self.sigma_black, other.sigma_black)
                and np.array_equal(self.sigma_white, other.sigma_white))

    def __hash__(self) -> int:
        return hash(self.state_key())


def _as_spins(domain: HexDomain, values) -> np.ndarray:
    if isinstance(values, Mapping):
        arr = np.array([values[f] for f in domain.faces], dtype=np.int8)
    else:
        arr = np.asarray(values, dtype=np.int8).copy()
        if arr.shape != (domain.n_faces,):
            raise ValueError("spin vector has the wrong length")
    if not np.all(np.abs(arr) == 1):
        raise ValueError("spins must be +-1")
    return arr


def height_to_spins(h: LipschitzFn) -> SpinPair:
    """The spin representation: black + on {0,1}+4Z, white + on {0,-1}+4Z."""
    mod = np.mod(h.values, 4)
    sigma_black = np.where((mod == 0) | (mod == 1), 1, -1).astype(np.int8)
    sigma_white = np.where((mod == 0) | (mod == 3), 1, -1).astype(np.int8)
    return SpinPair(h.domain, sigma_black, sigma_white)


_MOD4_STEP = {0: 0, 1: 1, 3: -1}


def spins_to_height(pair: SpinPair) -> LipschitzFn:
    """Invert height_to_spins on the zero-boundary class.

    Requires a consistent pair with ++ boundary.  The increments determined
    by the mod-4 class are integrated over a spanning tree; any cycle or
    boundary mismatch raises NotRepresentable.  (For consistent pairs on a
    simply connected domain the integration always succeeds.)
    """
    pair.require_consistent()
    domain = pair.domain
    mod = _mod4_class(pair)
    if np.any(mod[domain.boundary_mask] != 0):
        raise NotRepresentable("boundary spins are not ++")
    h = np.zeros(domain.n_faces, dtype=np.int64)
    seen = np.zeros(domain.n_faces, dtype=bool)
    start = int(np.flatnonzero(domain.boundary_mask)[0])
    seen[start] = True
    stack = [start]
    while stack:
        i = stack.pop()
        for j in domain.neighbors[i]:
            if j < 0:
                continue
            step = (int(mod[j]) - int(mod[i])) % 4
            if step == 2:
                raise InconsistentPair("mod-4 classes jump by 2 across an edge")
            value = h[i] + _MOD4_STEP[step]
            if seen[j]:
                if h[j] != value:
                    raise NotRepresentable("increments are inconsistent around a cycle")
            else:
                h[j] = value
                seen[j] = True
                stack.append(j)
    if np.any(h[domain.boundary_mask] != 0):
        raise NotRepresentable("integrated height is nonzero on the boundary")
    return LipschitzFn(domain, h)


def _mod4_class(pair: SpinPair) -> np.ndarray:
    """0, 1, 2, 3 for spin pairs (+,+), (+,-), (-,-), (-,+)."""
    b_plus = pair.sigma_black > 0
    w_plus = pair.sigma_white > 0
    mod = np.empty(pair.domain.n_faces, dtype=np.int8)
    mod[b_plus & w_plus] = 0
    mod[b_plus & ~w_plus] = 1
    mod[~b_plus & ~w_plus] = 2
    mod[~b_plus & w_plus] = 3
    return mod


def domain_wall(domain: HexDomain, sigma: np.ndarray) -> frozenset[Edge]:
    """Disagreement edges of a single spin field among the interior edges."""
    idx = domain.interior_edge_idx
    if len(idx) == 0:
        return frozenset()
    i, j = idx.T
    disagree = np.flatnonzero(sigma[i] != sigma[j])
    return frozenset(domain.interior_edges[int(e)] for e in disagree)


def loops_of_spins(pair: SpinPair) -> LoopConfig:
    """The disjoint union of the black and white domain walls."""
    pair.require_consistent()
    edges = domain_wall(pair.domain, pair.sigma_black) | domain_wall(
        pair.domain, pair.sigma_white)
    omega = LoopConfig(pair.domain, edges)
    omega.validate()
    return omega


def _nonconstant_y(domain: HexDomain, sigma: np.ndarray) -> np.ndarray:
    """Boolean mask over Y(domain): sigma is not constant on the triangle."""
    t = domain.y_tri_faces
    if len(t) == 0:
        return np.zeros(0, dtype=bool)
    return (sigma[t[:, 0]] != sigma[t[:, 1]]) | (sigma[t[:, 1]] != sigma[t[:, 2]])


def spin_log_weight(pair: SpinPair, x: float) -> float:
    """log of (x^2)^{|Y[sigma_black] union Y[sigma_white]|}."""
    pair.require_consistent()
    nb = _nonconstant_y(pair.domain, pair.sigma_black)
    nw = _nonconstant_y(pair.domain, pair.sigma_white)
    count = int(np.count_nonzero(nb | nw))
    return 2.0 * count * math.log(x)


def spin_weight(pair: SpinPair, x: float) -> float:
    """Unnormalised spin weight (x^2)^{#Y-vertices touched by a domain wall}."""
    return math.exp(spin_log_weight(pair, x))


# ---------------------------------------------------------------------------
# Black and white percolations


class PercolationPair:
    """Coupled site percolations (xi_black, xi_white) with their +- splits."""

    __slots__ = ("domain", "black_mask", "white_mask", "black_sign", "white_sign")

    def __init__(self, domain: HexDomain, black_mask, white_mask,
                 black_sign, white_sign):
        self.domain = domain
        self.black_mask = np.asarray(black_mask, dtype=bool)
        self.white_mask = np.asarray(white_mask, dtype=bool)
        # sign of the (constant) spin around each open site; 0 if not constant
        self.black_sign = np.asarray(black_sign, dtype=np.int8)
        self.white_sign = np.asarray(white_sign, dtype=np.int8)

    @property
    def xi_black(self) -> SitePerc:
        return SitePerc.from_mask(self.domain, self.black_mask)

    @property
    def xi_white(self) -> SitePerc:
        return SitePerc.from_mask(self.domain, self.white_mask)

    def split(self, color: str, sign: int) -> SitePerc:
        """xi^{r+-} / xi^{w+-}: open sites whose spins around are all ``sign``."""
        if color == "black":
            mask = self.black_mask & (self.black_sign == sign)
        elif color == "white":
            mask = self.white_mask & (self.white_sign == sign)
        else:
            raise ValueError("color must be 'black' or 'white'")
        return SitePerc.from_mask(self.domain, mask)

    def covers_all(self) -> bool:
        """Super-duality: every Y-vertex is black-open or white-open."""
        return bool(np.all(self.black_mask | self.white_mask))


def sample_percolations(pair: SpinPair, u_values, x: float) -> PercolationPair:
    """Build (xi_black, xi_white) from the spins and uniforms on Y(domain).

    Per Y-vertex y: if the black spins disagree around y the site is
    white-open only; if the white spins disagree it is black-open only;
    otherwise xi_black(y) = [U_y <= x^2] and xi_white(y) = [U_y > 1 - x^2].
    """
    pair.require_consistent()
    domain = pair.domain
    if isinstance(u_values, Mapping):
        u = np.array([u_values[y] for y in domain.y_vertices], dtype=float)
    else:
        u = np.asarray(u_values, dtype=float)
        if u.shape != (domain.n_y,):
            raise ValueError("uniform vector has the wrong length")
    if len(u) and (u.min() < 0 or u.max() >= 1):
        raise ValueError("uniforms must lie in [0, 1)")

    nb = _nonconstant_y(domain, pair.sigma_black)
    nw = _nonconstant_y(domain, pair.sigma_white)
    x2 = x * x
    black = np.where(nb, False, np.where(nw, True, u <= x2))
    white = np.where(nb, True, np.where(nw, False, u > 1.0 - x2))
    t0 = domain.y_tri_faces[:, 0] if domain.n_y else np.zeros(0, dtype=np.int32)
    black_sign = np.where(nb, 0, pair.sigma_black[t0]).astype(np.int8)
    white_sign = np.where(nw, 0, pair.sigma_white[t0]).astype(np.int8)
    return PercolationPair(domain, black, white, black_sign, white_sign)


def agrees_on(domain: HexDomain, sigma: np.ndarray, mask: np.ndarray) -> bool:
    """sigma is constant on the triangle of every Y-vertex selected by mask."""
    return not np.any(_nonconstant_y(domain, sigma) & mask)


def joint_weight(pair: SpinPair, xi_black, x: float) -> float:
    """Unnormalised weight of the triple (sigma_black, sigma_white, xi_black).

    (x^2)^{|xi|} (1-x^2)^{|xi* \\ Y[sigma_black]|} (x^2)^{|Y[sigma_black]|}
    times the three compatibility indicators; incompatible triples get 0.
    """
    domain = pair.domain
    mask = xi_black.as_mask() if isinstance(xi_black, SitePerc) else np.asarray(
        xi_black, dtype=bool)
    nb = _nonconstant_y(domain, pair.sigma_black)
    nw = _nonconstant_y(domain, pair.sigma_white)
    if np.any(nb & mask) or np.any(nw & ~mask) or not pair.is_consistent():
        return 0.0
    x2 = x * x
    n_open = int(np.count_nonzero(mask))
    n_dual_quiet = int(np.count_nonzero(~mask & ~nb))
    n_black_wall = int(np.count_nonzero(nb))
    return x2 ** n_open * (1.0 - x2) ** n_dual_quiet * x2 ** n_black_wall


def _edge_triplet_components(domain: HexDomain, dual_mask: np.ndarray) -> tuple[np.ndarray, int]:
    """Connected components of the faces under the triangle edges of the
    selected Y-vertices.  Returns (labels over faces, #components)."""
    n = domain.n_faces
    sel = np.flatnonzero(dual_mask)
    if len(sel) == 0:
        return np.arange(n, dtype=np.int64), n
    t = domain.y_tri_faces[sel]
    rows = np.concatenate([t[:, 0], t[:, 1], t[:, 0]])
    cols = np.concatenate([t[:, 1], t[:, 2], t[:, 2]])
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    ncomp, labels = connected_components(graph, directed=False)
    return labels, ncomp


def resample_white_given_black(sigma_black: np.ndarray, xi_black,
                               rng: np.random.Generator,
                               bc: BoundaryCondition = FREE,
                               domain: HexDomain | None = None,
                               ) -> np.ndarray:
    """Resample the white spins given (sigma_black, xi_black).

    The white spins are constant on each connected component of the triangle
    edges of (xi_black)*, with independent fair coin values; under a pinned
    white boundary, components touching the boundary faces are forced to the
    pinned sign.  When at least one colour is pinned, the coin flips are
    automatically consistent with sigma_black; under fully free boundary
    conditions they are conditioned on consistency by rejection (the only
    possible clashes sit on edges incident to the boundary cycle).
    """
    if isinstance(xi_black, SitePerc):
        domain = xi_black.domain
        mask = xi_black.as_mask()
    else:
        if domain is None:
            raise ValueError("domain required when xi_black is a mask")
        mask = np.asarray(xi_black, dtype=bool)
    sigma_black = np.asarray(sigma_black, dtype=np.int8)
    if not agrees_on(domain, sigma_black, mask):
        raise IncompatibleInput("sigma_black disagrees at an open black site")

    labels, ncomp = _edge_triplet_components(domain, ~mask)
    boundary_labels = np.unique(labels[domain.boundary_mask])
    free_bc = bc.black is None and bc.white is None
    for _ in range(100000):
        coins = (rng.integers(0, 2, size=ncomp) * 2 - 1).astype(np.int8)
        if bc.white is not None:
            coins[boundary_labels] = bc.white
        sigma_white = coins[labels]
        if not free_bc or SpinPair(domain, sigma_black, sigma_white).is_consistent():
            return sigma_white
    raise IncompatibleInput("no consistent white spin assignment found")
