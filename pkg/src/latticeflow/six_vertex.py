"""Six-vertex model: graph homomorphisms, spins, bond percolations, circuits.

A graph homomorphism is an integer height on the squares changing by exactly
1 across every edge (black squares carry even heights, white squares odd).
Heights in the {0,1}-boundary class are encoded by the checkerboard spins

    sigma_black = +  on  {h in 4Z}        (black squares),
    sigma_white = +  on  {h in 4Z + 1}    (white squares),

subject to the ice rule: at every interior vertex the black spins agree on
the black diagonal or the white spins agree on the white diagonal.  The spin
weight (a/c)^{#domain-wall edges in E_a} * (b/c)^{#in E_b} matches the vertex
weight a^{n_1+n_2} b^{n_3+n_4} c^{n_5+n_6} of the height measure.
"""

from __future__ import annotations

import math
from typing import Mapping

import numpy as np

from .errors import IceRuleViolated, NotRepresentable
from .planar import Circuit, outermost_circuit, square_center
from .squarelattice import BondPerc, Square, SquareDomain, is_black


class SixVParams:
    """Vertex weights a, b, c with the coupling-regime flags."""

    def __init__(self, a: float, b: float, c: float):
        if min(a, b, c) <= 0:
            raise ValueError("vertex weights must be positive")
        self.a, self.b, self.c = float(a), float(b), float(c)

    @property
    def fkg_regime(self) -> bool:
        return max(self.a, self.b) <= self.c

    @property
    def super_duality_regime(self) -> bool:
        return max(self.a, self.b) <= self.c <= self.a + self.b

    def __repr__(self) -> str:
        return f"SixVParams(a={self.a}, b={self.b}, c={self.c})"


class GraphHom:
    """A parity-preserving height with |h(u) - h(v)| = 1 across edges."""

    __slots__ = ("domain", "values")

    def __init__(self, domain: SquareDomain, values):
        self.domain = domain
        if isinstance(values, Mapping):
            arr = np.array([values[s] for s in domain.squares], dtype=np.int64)
        else:
            arr = np.asarray(values, dtype=np.int64).copy()
            if arr.shape != (domain.n_squares,):
                raise ValueError("height vector has the wrong length")
        parity = np.array([(s[0] + s[1]) % 2 for s in domain.squares])
        if np.any(np.mod(arr, 2) != parity):
            raise ValueError("heights must have the parity of the coordinate sum")
        for axis in range(4):
            j = domain.neighbors[:, axis]
            ok = j >= 0
            if np.any(np.abs(arr[ok] - arr[j[ok]]) != 1):
                raise ValueError("height must change by exactly 1 across edges")
        self.values = arr
        self.values.setflags(write=False)

    def __getitem__(self, square: Square) -> int:
        return int(self.values[self.domain.square_index[square]])

    def in_01_boundary_class(self) -> bool:
        vals = self.values[self.domain.boundary_mask]
        return bool(np.all((vals == 0) | (vals == 1)))

    def as_dict(self) -> dict[Square, int]:
        return {s: int(v) for s, v in zip(self.domain.squares, self.values)}

    def __eq__(self, other) -> bool:
        return (isinstance(other, GraphHom) and self.domain is other.domain
                and np.array_equal(self.values, other.values))

    def __hash__(self) -> int:
        return hash(self.values.tobytes())


class SpinPair6V:
    """Checkerboard spins: sigma_black on black squares, sigma_white on white.

    Both arrays span all squares for vectorised access; entries on the
    opposite colour are fixed to +1 and carry no information.
    """

    __slots__ = ("domain", "sigma_black", "sigma_white")

    def __init__(self, domain: SquareDomain, sigma_black, sigma_white):
        self.domain = domain
        self.sigma_black = self._normalise(domain, sigma_black, black=True)
        self.sigma_white = self._normalise(domain, sigma_white, black=False)

    @staticmethod
    def _normalise(domain, values, black: bool) -> np.ndarray:
        own = domain.black_mask if black else ~domain.black_mask
        if isinstance(values, Mapping):
            arr = np.ones(domain.n_squares, dtype=np.int8)
            for s, v in values.items():
                arr[domain.square_index[s]] = v
        else:
            arr = np.asarray(values, dtype=np.int8).copy()
            if arr.shape != (domain.n_squares,):
                raise ValueError("spin vector has the wrong length")
        if not np.all(np.abs(arr[own]) == 1):
            raise ValueError("spins must be +-1")
        arr[~own] = 1
        return arr

    def black_disagrees(self) -> np.ndarray:
        p = self.domain.black_pairs
        return self.sigma_black[p[:, 0]] != self.sigma_black[p[:, 1]]

    def white_disagrees(self) -> np.ndarray:
        p = self.domain.white_pairs
        return self.sigma_white[p[:, 0]] != self.sigma_white[p[:, 1]]

    def satisfies_ice_rule(self) -> bool:
        return not np.any(self.black_disagrees() & self.white_disagrees())

    def require_ice_rule(self) -> None:
        if not self.satisfies_ice_rule():
            raise IceRuleViolated("both diagonals disagree at a vertex")

    def copy(self) -> "SpinPair6V":
        return SpinPair6V(self.domain, self.sigma_black.copy(),
                          self.sigma_white.copy())

    def state_key(self) -> tuple[bytes, bytes]:
        black = self.sigma_black[self.domain.black_mask]
        white = self.sigma_white[~self.domain.black_mask]
        return (black.tobytes(), white.tobytes())

    def __eq__(self, other) -> bool:
        return (isinstance(other, SpinPair6V) and self.domain is other.domain
                and self.state_key() == other.state_key())

    def __hash__(self) -> int:
        return hash(self.state_key())


def height_to_spins_6v(h: GraphHom) -> SpinPair6V:
    mod = np.mod(h.values, 4)
    black = np.where(mod == 0, 1, -1).astype(np.int8)
    white = np.where(mod == 1, 1, -1).astype(np.int8)
    return SpinPair6V(h.domain, black, white)


def spins_to_height_6v(pair: SpinPair6V) -> GraphHom:
    """Invert height_to_spins_6v on the {0,1}-boundary class.

    Requires the ice rule and ++ boundary spins; integration of the mod-4
    increments then reconstructs the height uniquely.
    """
    pair.require_ice_rule()
    domain = pair.domain
    mod = np.where(domain.black_mask,
                   np.where(pair.sigma_black > 0, 0, 2),
                   np.where(pair.sigma_white > 0, 1, 3)).astype(np.int8)
    expected = np.where(domain.black_mask, 0, 1)
    if np.any(mod[domain.boundary_mask] != expected[domain.boundary_mask]):
        raise NotRepresentable("boundary spins are not ++")

    h = np.zeros(domain.n_squares, dtype=np.int64)
    seen = np.zeros(domain.n_squares, dtype=bool)
    start = int(np.flatnonzero(domain.boundary_mask)[0])
    h[start] = expected[start]
    seen[start] = True
    stack = [start]
    while stack:
        i = stack.pop()
        for j in domain.neighbors[i]:
            if j < 0:
                continue
            step = 1 if (int(mod[j]) - int(mod[i])) % 4 == 1 else -1
            value = h[i] + step
            if seen[j]:
                if h[j] != value:
                    raise NotRepresentable("increments are inconsistent around a cycle")
            else:
                h[j] = value
                seen[j] = True
                stack.append(j)
    vals = h[domain.boundary_mask]
    if np.any((vals != 0) & (vals != 1)):
        raise NotRepresentable("integrated height leaves the {0,1} boundary class")
    return GraphHom(domain, h)


# ---------------------------------------------------------------------------
# Vertex types and weights

_TYPE_INDEX = {("a", 1): 1, ("a", -1): 2, ("b", 1): 3, ("b", -1): 4,
               ("c", 1): 5, ("c", -1): 6}


def vertex_type(h: GraphHom, vertex) -> tuple[str, int]:
    """Classify an interior vertex of a height function.

    Returns (letter, type_index): 'c' when the heights agree along both
    diagonals, otherwise 'a' or 'b' according to the direction of the
    domain-wall diagonal edge (parallel to exp(i*pi/4) for 'a').  The index
    within the class follows the sign of the spin that agrees on its
    diagonal.
    """
    domain = h.domain
    k = domain.vertex_index[tuple(vertex)]
    pair = height_to_spins_6v(h)
    b_dis = bool(pair.black_disagrees()[k])
    w_dis = bool(pair.white_disagrees()[k])
    if b_dis and w_dis:
        raise IceRuleViolated(f"both diagonals disagree at {vertex}")
    black_a = bool(domain.black_in_a[k])
    if not b_dis and not w_dis:
        letter = "c"
        sign = int(pair.sigma_black[domain.black_pairs[k, 0]])
    elif b_dis:
        letter = "a" if not black_a else "b"  # wall edge is the white diagonal
        sign = int(pair.sigma_white[domain.white_pairs[k, 0]])
    else:
        letter = "a" if black_a else "b"  # wall edge is the black diagonal
        sign = int(pair.sigma_black[domain.black_pairs[k, 0]])
    return letter, _TYPE_INDEX[(letter, sign)]


def type_counts(h: GraphHom) -> dict[int, int]:
    counts = {i: 0 for i in range(1, 7)}
    for v in h.domain.interior_vertices:
        counts[vertex_type(h, v)[1]] += 1
    return counts


def _wall_counts(pair: SpinPair6V) -> tuple[int, int]:
    """(#domain-wall edges in E_a, #in E_b)."""
    b_dis = pair.black_disagrees()
    w_dis = pair.white_disagrees()
    if np.any(b_dis & w_dis):
        raise IceRuleViolated("both diagonals disagree at a vertex")
    black_a = pair.domain.black_in_a
    n_a = int(np.count_nonzero((b_dis & ~black_a) | (w_dis & black_a)))
    n_b = int(np.count_nonzero((b_dis & black_a) | (w_dis & ~black_a)))
    return n_a, n_b


def hom_weight(h: GraphHom, params: SixVParams) -> float:
    """Unnormalised product weight over interior vertices."""
    pair = height_to_spins_6v(h)
    n_a, n_b = _wall_counts(pair)
    n_c = h.domain.n_vertices - n_a - n_b
    return params.a ** n_a * params.b ** n_b * params.c ** n_c


def spin_log_weight_6v(pair: SpinPair6V, params: SixVParams) -> float:
    n_a, n_b = _wall_counts(pair)
    return (n_a * math.log(params.a / params.c)
            + n_b * math.log(params.b / params.c))


def spin_weight_6v(pair: SpinPair6V, params: SixVParams) -> float:
    """(a/c)^{#wall edges in E_a} * (b/c)^{#wall edges in E_b}."""
    return math.exp(spin_log_weight_6v(pair, params))


# ---------------------------------------------------------------------------
# Bond percolations


class BondPercPair:
    """Coupled bond percolations (xi_black, xi_white), vertex-indexed."""

    __slots__ = ("domain", "black_mask", "white_mask", "black_sign", "white_sign")

    def __init__(self, domain: SquareDomain, black_mask, white_mask,
                 black_sign, white_sign):
        self.domain = domain
        self.black_mask = np.asarray(black_mask, dtype=bool)
        self.white_mask = np.asarray(white_mask, dtype=bool)
        self.black_sign = np.asarray(black_sign, dtype=np.int8)
        self.white_sign = np.asarray(white_sign, dtype=np.int8)

    @property
    def xi_black(self) -> BondPerc:
        return BondPerc(self.domain, "black", self.black_mask)

    @property
    def xi_white(self) -> BondPerc:
        return BondPerc(self.domain, "white", self.white_mask)

    def split(self, color: str, sign: int) -> BondPerc:
        if color == "black":
            return BondPerc(self.domain, "black",
                            self.black_mask & (self.black_sign == sign))
        return BondPerc(self.domain, "white",
                        self.white_mask & (self.white_sign == sign))

    def covers_all(self) -> bool:
        """Super-duality: d_black(x) open or d_white(x) open at every x."""
        return bool(np.all(self.black_mask | self.white_mask))


def sample_percolations_6v(pair: SpinPair6V, u_values,
                           params: SixVParams) -> BondPercPair:
    """Build (xi_black, xi_white) from the spins and uniforms on the vertices.

    Forced cases when a diagonal disagrees; otherwise the thresholds are
    (a/c, 1-b/c) when the black diagonal lies in E_a and (b/c, 1-a/c) when it
    lies in E_b.
    """
    pair.require_ice_rule()
    domain = pair.domain
    if isinstance(u_values, Mapping):
        u = np.array([u_values[v] for v in domain.interior_vertices], dtype=float)
    else:
        u = np.asarray(u_values, dtype=float)
        if u.shape != (domain.n_vertices,):
            raise ValueError("uniform vector has the wrong length")
    b_dis = pair.black_disagrees()
    w_dis = pair.white_disagrees()
    a_over_c = params.a / params.c
    b_over_c = params.b / params.c
    black_a = domain.black_in_a
    thr_black = np.where(black_a, a_over_c, b_over_c)
    thr_white = np.where(black_a, 1.0 - b_over_c, 1.0 - a_over_c)
    black = np.where(b_dis, False, np.where(w_dis, True, u <= thr_black))
    white = np.where(b_dis, True, np.where(w_dis, False, u > thr_white))
    black_sign = np.where(b_dis, 0, pair.sigma_black[domain.black_pairs[:, 0]])
    white_sign = np.where(w_dis, 0, pair.sigma_white[domain.white_pairs[:, 0]])
    return BondPercPair(domain, black, white,
                        black_sign.astype(np.int8), white_sign.astype(np.int8))


# ---------------------------------------------------------------------------
# Edge orientations

CornerEdge = tuple[tuple[int, int], tuple[int, int]]


def edge_orientation(h: GraphHom) -> dict[CornerEdge, int]:
    """Orient each interior lattice edge with the larger height on its right.

    Keys are corner pairs ((i,j), (i+1,j)) or ((i,j), (i,j+1)); the value is
    +1 when the edge is oriented from the first corner to the second.
    """
    domain = h.domain
    orientations: dict[CornerEdge, int] = {}
    # Enumerate interior edges via adjacent square pairs: the edge between
    # squares u (left/lower) and v is interior when both squares exist.
    for s, i in domain.square_index.items():
        si, sj = s
        j = domain.square_index.get((si + 1, sj))
        if j is not None:
            # vertical edge between corners (si, sj-1) and (si, sj)
            edge = ((si, sj - 1), (si, sj))
            east = int(h.values[j])
            west = int(h.values[i])
            orientations[edge] = 1 if east > west else -1
        j = domain.square_index.get((si, sj + 1))
        if j is not None:
            # horizontal edge between corners (si-1, sj) and (si, sj)
            edge = ((si - 1, sj), (si, sj))
            north = int(h.values[j])
            south = int(h.values[i])
            orientations[edge] = 1 if south > north else -1
    return orientations


# ---------------------------------------------------------------------------
# Alternating-circuit exploration


def _circuit_of(domain: SquareDomain, color: str, mask: np.ndarray,
                region: frozenset[Square], target: Square) -> Circuit | None:
    pairs = domain.black_pairs if color == "black" else domain.white_pairs
    squares = domain.squares
    segments = {}
    edge_nodes = {}
    for k in np.flatnonzero(mask):
        s1 = squares[pairs[k, 0]]
        s2 = squares[pairs[k, 1]]
        if s1 in region and s2 in region:
            segments[int(k)] = (square_center(s1), square_center(s2),
                                (s1[0] + s2[0], s1[1] + s2[1]))
            edge_nodes[int(k)] = (s1, s2)
    node_points = {s: square_center(s) for s in region}
    if target not in node_points:
        node_points[target] = square_center(target)
    if not segments:
        return None
    return outermost_circuit(segments, edge_nodes, node_points, target)


def explore_alternating_circuits(xi_black: BondPerc, xi_white: BondPerc,
                                 target: Square,
                                 ) -> tuple[int, list[tuple[str, Circuit | None]]]:
    """Alternating outermost-circuit exploration toward a target square.

    gamma_1 is the outermost white circuit going around or through the
    target; each following circuit is the outermost circuit of the other
    colour strictly inside the previous one.  Exploration stops at a circuit
    through the target, or with a degenerate single-face circuit (recorded as
    (colour, None)) when the target's own colour runs out of genuine circuits.
    Returns (N, [(colour, circuit), ...]).
    """
    domain = xi_black.domain
    target = tuple(target)
    target_color = "black" if is_black(target) else "white"
    masks = {"black": xi_black.mask, "white": xi_white.mask}
    region = frozenset(domain.squares)
    color = "white"
    found: list[tuple[str, Circuit | None]] = []
    while True:
        circuit = _circuit_of(domain, color, masks[color], region, target)
        if circuit is None:
            if color == target_color:
                found.append((color, None))  # degenerate circuit {target}
            break
        found.append((color, circuit))
        if circuit.through_target:
            break
        region = circuit.interior
        color = "white" if color == "black" else "black"
    return len(found), found
