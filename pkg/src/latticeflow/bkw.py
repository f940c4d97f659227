"""Oriented-loop torus machinery coupling the six-vertex and FK models.

An oriented loop configuration assigns an orientation to every interface
loop on the 2n x 2n torus.  With lambda in [0, pi/3] each configuration gets
the complex weight

    w = exp(i lambda/4 (#left turns - #right turns)) * H_8,

where H_8 restricts the signed crossing numbers of both fundamental dual
cycles to multiples of 8.  Two partition functions are studied: z_n (sum of
w) and z_{n,k} (sum of w times exp(i pi/8 * signed crossings of the walk p^k
making 2k steps east from the black origin square)).

Summing out orientations loop by loop gives the real expansion

    z_n = sum over unoriented configs of
          (sqrt q)^{#contractible} 2^{#non-contractible} p_8(#non-contractible)

with sqrt(q) = 2 cos(lambda), while forgetting the loop structure but keeping
edge orientations identifies z_{n,k} / z_n with a torus spin expectation at
vertex weights a = b = 1, c = 2 cos(lambda / 2).
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import OddStepCount, TooLarge
from .planar import UnionFind
from .torus import TorusLattice, TorusLoopConfig, loop_surrounds, loops_from_fk

DEFAULT_BUDGET = 1 << 26


class BKWParams:
    """The coupling angle lambda with its derived vertex/cluster weights."""

    def __init__(self, lam: float):
        if not 0.0 <= lam <= math.pi / 3 + 1e-12:
            raise ValueError("lambda must lie in [0, pi/3]")
        self.lam = float(lam)

    @property
    def c(self) -> float:
        return 2.0 * math.cos(self.lam / 2.0)

    @property
    def sqrt_q(self) -> float:
        return 2.0 * math.cos(self.lam)

    @property
    def q(self) -> float:
        return self.sqrt_q ** 2

    def __repr__(self) -> str:
        return f"BKWParams(lambda={self.lam})"


def p8(m: int) -> float:
    """Probability that an m-step simple random walk ends in 8Z.

    Discrete-Fourier closed form (1/8) sum_j cos(pi j / 4)^m over j = 0..7;
    defined here for even step counts only.
    """
    if m < 0:
        raise ValueError("step count must be nonnegative")
    if m % 2:
        raise OddStepCount(f"walk-return probability needs an even step count, got {m}")
    return sum(math.cos(math.pi * j / 4.0) ** m for j in range(8)) / 8.0


def w_prime(loops: TorusLoopConfig, q: float) -> float:
    """(sqrt q)^{#contractible} * 2^{#non-contractible} * p_8(#non-contractible)."""
    n_contr = len(loops.contractible)
    n_non = len(loops.non_contractible)
    return math.sqrt(q) ** n_contr * 2.0 ** n_non * p8(n_non)


def _loop_invariants(loops: TorusLoopConfig, k: int):
    """Per-loop reference-orientation data (turns, generator and p^k crossings)."""
    t = np.array([l.turn_diff for l in loops.loops], dtype=np.int64)
    ch = np.array([l.cross_h for l in loops.loops], dtype=np.int64)
    cv = np.array([l.cross_v for l in loops.loops], dtype=np.int64)
    ck = np.array([int(l.cross_cols[:2 * k].sum()) for l in loops.loops],
                  dtype=np.int64)
    return t, ch, cv, ck


def _orientation_signs(n_loops: int) -> np.ndarray:
    bits = np.arange(1 << n_loops, dtype=np.int64)
    signs = np.empty((1 << n_loops, n_loops), dtype=np.int64)
    for j in range(n_loops):
        signs[:, j] = np.where((bits >> j) & 1, 1, -1)
    return signs


def bkw_partition_functions(n: int, k: int, params: BKWParams,
                            budget: int = DEFAULT_BUDGET,
                            ) -> tuple[complex, complex]:
    """Exact (z_n, z_{n,k}) by exhaustive oriented-loop enumeration."""
    torus = TorusLattice(n)
    n_eta = torus.n_vertices
    # loose bound: every eta costs at most 2^{#edges/4} orientation vectors
    if (1 << n_eta) * (1 << (torus.n_edges // 4)) > budget:
        raise TooLarge(f"oriented enumeration for n={n} exceeds the budget")
    lam = params.lam
    z_n = 0.0 + 0.0j
    z_nk = 0.0 + 0.0j
    eta = np.zeros(n_eta, dtype=bool)
    for bits in range(1 << n_eta):
        for i in range(n_eta):
            eta[i] = (bits >> i) & 1
        loops = loops_from_fk(torus, eta)
        t, ch, cv, ck = _loop_invariants(loops, k)
        signs = _orientation_signs(len(loops.loops))
        h8 = ((signs @ ch) % 8 == 0) & ((signs @ cv) % 8 == 0)
        w = np.exp(1j * lam / 4.0 * (signs @ t)) * h8
        z_n += w.sum()
        z_nk += (w * np.exp(1j * math.pi / 8.0 * (signs @ ck))).sum()
    return z_n, z_nk


def loop_expansion_z(n: int, params: BKWParams,
                     budget: int = DEFAULT_BUDGET) -> float:
    """z_n via the unoriented expansion sum_L w'(L); an independent oracle."""
    torus = TorusLattice(n)
    n_eta = torus.n_vertices
    if (1 << n_eta) > budget:
        raise TooLarge(f"loop enumeration for n={n} exceeds the budget")
    q = params.q
    total = 0.0
    eta = np.zeros(n_eta, dtype=bool)
    for bits in range(1 << n_eta):
        for i in range(n_eta):
            eta[i] = (bits >> i) & 1
        total += w_prime(loops_from_fk(torus, eta), q)
    return total


def cos_product_observable(loops: TorusLoopConfig, k: int, lam: float) -> float:
    """Product over contractible loops of
    cos(lambda + pi/8 (1{(0,0) inside} - 1{(2k,0) inside})) / cos(lambda)."""
    if not 0.0 <= lam <= math.pi / 3 + 1e-12:
        raise ValueError("lambda must lie in [0, pi/3]")
    torus = loops.torus
    origin = (0, 0)
    far = torus.wrap(2 * k, 0)
    product = 1.0
    for loop in loops.contractible:
        ind = int(loop_surrounds(torus, loop, origin)) - int(
            loop_surrounds(torus, loop, far))
        if ind:
            product *= math.cos(lam + math.pi / 8.0 * ind) / math.cos(lam)
    return product


def torus_two_point_connected(torus: TorusLattice, eta, u, v) -> bool:
    """Whether two black squares are connected in the black percolation."""
    eta = np.asarray(eta, dtype=bool)
    u, v = torus.wrap(*u), torus.wrap(*v)
    for s in (u, v):
        if not torus.is_black(s):
            raise ValueError(f"{s} is not a black square")
    if u == v:
        return True
    uf = UnionFind([f for f in torus.faces if torus.is_black(f)])
    for idx in np.flatnonzero(eta):
        a, b = torus.black_pair(torus.vertices[idx])
        uf.union(a, b)
    return uf.connected(u, v)


# ---------------------------------------------------------------------------
# Torus spin measure


class TorusSpinMeasure:
    """Exact torus spin measure at a = b = 1, c = 2 cos(lambda/2), with the
    homotopy restriction H_8 on the two fundamental dual cycles."""

    def __init__(self, n: int, params: BKWParams, budget: int = DEFAULT_BUDGET):
        self.torus = TorusLattice(n)
        self.params = params
        side = self.torus.side
        faces = self.torus.faces
        self.face_index = {f: i for i, f in enumerate(faces)}
        self.blacks = [f for f in faces if self.torus.is_black(f)]
        self.whites = [f for f in faces if not self.torus.is_black(f)]
        if 1 << (len(self.blacks) + len(self.whites)) > budget:
            raise TooLarge(f"torus spin enumeration for n={n} exceeds the budget")
        # vertex pair index arrays for the ice rule and wall counts
        self.bp = np.array([[self.face_index[a], self.face_index[b]]
                            for v in self.torus.vertices
                            for (a, b) in [self.torus.black_pair(v)]])
        self.wp = np.array([[self.face_index[a], self.face_index[b]]
                            for v in self.torus.vertices
                            for (a, b) in [self.torus.white_pair(v)]])
        # the two fundamental dual cycles as face walks
        self.h_cycle = [(m, 0) for m in range(side)] + [(0, 0)]
        self.v_cycle = [(0, m) for m in range(side)] + [(0, 0)]

    def _integral(self, sb, sw, walk) -> int:
        total = 0
        for u, v in zip(walk, walk[1:]):
            iu, iv = self.face_index[u], self.face_index[v]
            if self.torus.is_black(u):
                total += int(sb[iu]) * int(sw[iv])
            else:
                total -= int(sb[iv]) * int(sw[iu])
        return total

    def states(self):
        """Yield (sigma_black, sigma_white, weight) over consistent pairs
        satisfying H_8."""
        c = self.params.c
        nb, nw = len(self.blacks), len(self.whites)
        black_idx = [self.face_index[f] for f in self.blacks]
        white_idx = [self.face_index[f] for f in self.whites]
        n_faces = self.torus.n_faces
        for bbits in range(1 << nb):
            sb = np.ones(n_faces, dtype=np.int8)
            for i, fi in enumerate(black_idx):
                if (bbits >> i) & 1:
                    sb[fi] = -1
            b_dis = sb[self.bp[:, 0]] != sb[self.bp[:, 1]]
            for wbits in range(1 << nw):
                sw = np.ones(n_faces, dtype=np.int8)
                for i, fi in enumerate(white_idx):
                    if (wbits >> i) & 1:
                        sw[fi] = -1
                w_dis = sw[self.wp[:, 0]] != sw[self.wp[:, 1]]
                if np.any(b_dis & w_dis):
                    continue
                if self._integral(sb, sw, self.h_cycle) % 8 != 0:
                    continue
                if self._integral(sb, sw, self.v_cycle) % 8 != 0:
                    continue
                walls = int(b_dis.sum()) + int(w_dis.sum())
                yield sb, sw, (1.0 / c) ** walls

    def expectation_pk_phase(self, k: int) -> complex:
        """E[exp(i pi/8 integral over p^k of h_gradient)]."""
        side = self.torus.side
        walk = [((m % side), 0) for m in range(2 * k + 1)]
        num = 0.0 + 0.0j
        den = 0.0
        for sb, sw, weight in self.states():
            phase = cmath.exp(1j * math.pi / 8.0 * self._integral(sb, sw, walk))
            num += weight * phase
            den += weight
        if den == 0:
            raise ZeroDivisionError("empty torus spin measure")
        return num / den


def torus_spin_observable(n: int, k: int, params: BKWParams,
                          budget: int = DEFAULT_BUDGET) -> complex:
    """Exact torus spin expectation of exp(i pi/8 * integral of h_gradient)."""
    return TorusSpinMeasure(n, params, budget=budget).expectation_pk_phase(k)


# ---------------------------------------------------------------------------
# The torus FK measure induced by the loop expansion


def torus_fk_distribution(n: int, q: float,
                          budget: int = DEFAULT_BUDGET) -> dict[tuple, float]:
    """Exact torus random-cluster law with config weight w'(loops(eta)).

    Keys are tuples of vertex-indexed black-edge bits.
    """
    torus = TorusLattice(n)
    n_eta = torus.n_vertices
    if 1 << n_eta > budget:
        raise TooLarge(f"torus FK enumeration for n={n} exceeds the budget")
    weights = {}
    eta = np.zeros(n_eta, dtype=bool)
    for bits in range(1 << n_eta):
        for i in range(n_eta):
            eta[i] = (bits >> i) & 1
        weights[tuple(int(b) for b in eta)] = w_prime(loops_from_fk(torus, eta), q)
    z = sum(weights.values())
    return {k: v / z for k, v in weights.items()}
