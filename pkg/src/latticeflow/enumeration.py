"""Exact enumeration of small state spaces, shared by oracles and the CLI.

Every enumerator normalises into an ExactDistribution whose state keys are
plain tuples, so that empirical Counter objects produced by the samplers can
be compared via total-variation distance.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping

import numpy as np

from .bc import BoundaryCondition, PLUS_PLUS
from .errors import EncodingMismatch, TooLarge
from .hexlattice import HexDomain, face_neighbors
from .loop_o2 import LipschitzFn, LoopParams, SpinPair, spin_weight
from .random_cluster import FKConfig, fk_weight
from .six_vertex import GraphHom, SpinPair6V, hom_weight, spin_weight_6v
from .squarelattice import SquareDomain

DEFAULT_BUDGET = 1 << 26


class ExactDistribution:
    """A finite distribution with canonical state keys."""

    def __init__(self, states: list, weights):
        weights = np.asarray(weights, dtype=float)
        if len(states) != len(weights) or len(states) == 0:
            raise ValueError("states and weights must align and be nonempty")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        self.states = list(states)
        self.Z = float(weights.sum())
        self.probs = weights / self.Z
        self.index = {s: i for i, s in enumerate(self.states)}

    def prob(self, state) -> float:
        return float(self.probs[self.index[state]])

    def __len__(self) -> int:
        return len(self.states)

    def expectation(self, fn) -> float:
        return float(sum(p * fn(s) for s, p in zip(self.states, self.probs)))


def tv_distance(empirical: Mapping, exact: ExactDistribution) -> float:
    """(1/2) sum |empirical - exact| over the exact support."""
    total = sum(empirical.values())
    if total <= 0:
        raise ValueError("empirical distribution is empty")
    unknown = [k for k in empirical if k not in exact.index]
    if unknown:
        raise EncodingMismatch(f"states outside the exact support: {unknown[:3]}")
    tv = 0.0
    for state, p in zip(exact.states, exact.probs):
        tv += abs(empirical.get(state, 0) / total - p)
    return 0.5 * tv


# ---------------------------------------------------------------------------
# State-space enumerators


def enumerate_lipschitz_zero(domain: HexDomain,
                             budget: int = DEFAULT_BUDGET) -> list[LipschitzFn]:
    """All zero-boundary Lipschitz functions, by constrained assignment."""
    faces = list(domain.faces)
    order = sorted(range(len(faces)),
                   key=lambda i: (not domain.boundary_mask[i], faces[i]))
    out: list[LipschitzFn] = []
    values: dict = {}

    def assign(pos: int) -> None:
        if len(out) > budget:
            raise TooLarge("Lipschitz enumeration exceeds the budget")
        if pos == len(order):
            out.append(LipschitzFn(domain, dict(values)))
            return
        f = faces[order[pos]]
        if domain.boundary_mask[order[pos]]:
            choices: Iterable[int] = (0,)
        else:
            lo, hi = -(1 << 30), 1 << 30
            for g in face_neighbors(f):
                if g in values:
                    lo = max(lo, values[g] - 1)
                    hi = min(hi, values[g] + 1)
            choices = range(lo, hi + 1)
        for v in choices:
            values[f] = v
            assign(pos + 1)
        del values[f]

    assign(0)
    return out


def enumerate_homs_01(domain: SquareDomain,
                      budget: int = DEFAULT_BUDGET) -> list[GraphHom]:
    """All graph homomorphisms in the {0,1} boundary class."""
    squares = list(domain.squares)
    order = sorted(range(len(squares)),
                   key=lambda i: (not domain.boundary_mask[i], squares[i]))
    out: list[GraphHom] = []
    values: dict = {}

    def assign(pos: int) -> None:
        if len(out) > budget:
            raise TooLarge("homomorphism enumeration exceeds the budget")
        if pos == len(order):
            out.append(GraphHom(domain, dict(values)))
            return
        s = squares[order[pos]]
        if domain.boundary_mask[order[pos]]:
            choices: Iterable[int] = ((s[0] + s[1]) % 2,)
        else:
            allowed = None
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                t = (s[0] + di, s[1] + dj)
                if t in values:
                    cand = {values[t] - 1, values[t] + 1}
                    allowed = cand if allowed is None else allowed & cand
            if allowed is None:
                p = (s[0] + s[1]) % 2
                allowed = {p - 2, p, p + 2}
            choices = sorted(allowed)
        for v in choices:
            values[s] = v
            assign(pos + 1)
        del values[s]

    assign(0)
    return out


def _spin_assignments(n_free: int, budget: int):
    if 1 << n_free > budget:
        raise TooLarge(f"spin enumeration over 2^{n_free} states exceeds the budget")
    return itertools.product((1, -1), repeat=n_free)


def enumerate_spin_pairs(domain: HexDomain, bc: BoundaryCondition = PLUS_PLUS,
                         budget: int = DEFAULT_BUDGET) -> list[SpinPair]:
    """All consistent hexagonal spin pairs compatible with the boundary."""
    n = domain.n_faces
    free_b = list(range(n)) if bc.black is None else [
        i for i in range(n) if not domain.boundary_mask[i]]
    free_w = list(range(n)) if bc.white is None else [
        i for i in range(n) if not domain.boundary_mask[i]]
    if 1 << (len(free_b) + len(free_w)) > budget:
        raise TooLarge("spin pair enumeration exceeds the budget")
    out = []
    base_b = np.full(n, bc.black if bc.black is not None else 1, dtype=np.int8)
    base_w = np.full(n, bc.white if bc.white is not None else 1, dtype=np.int8)
    for bvals in itertools.product((1, -1), repeat=len(free_b)):
        sb = base_b.copy()
        sb[free_b] = bvals
        for wvals in itertools.product((1, -1), repeat=len(free_w)):
            sw = base_w.copy()
            sw[free_w] = wvals
            pair = SpinPair(domain, sb, sw)
            if pair.is_consistent():
                out.append(pair)
    return out


def enumerate_spin_pairs_6v(domain: SquareDomain,
                            bc: BoundaryCondition = PLUS_PLUS,
                            budget: int = DEFAULT_BUDGET) -> list[SpinPair6V]:
    """All ice-consistent checkerboard pairs compatible with the boundary."""
    blacks = [domain.square_index[s] for s in domain.black_squares]
    whites = [domain.square_index[s] for s in domain.white_squares]
    free_b = blacks if bc.black is None else [
        i for i in blacks if not domain.boundary_mask[i]]
    free_w = whites if bc.white is None else [
        i for i in whites if not domain.boundary_mask[i]]
    if 1 << (len(free_b) + len(free_w)) > budget:
        raise TooLarge("spin pair enumeration exceeds the budget")
    out = []
    base_b = np.full(domain.n_squares, bc.black if bc.black is not None else 1,
                     dtype=np.int8)
    base_w = np.full(domain.n_squares, bc.white if bc.white is not None else 1,
                     dtype=np.int8)
    for bvals in itertools.product((1, -1), repeat=len(free_b)):
        sb = base_b.copy()
        sb[free_b] = bvals
        for wvals in itertools.product((1, -1), repeat=len(free_w)):
            sw = base_w.copy()
            sw[free_w] = wvals
            pair = SpinPair6V(domain, sb, sw)
            if pair.satisfies_ice_rule():
                out.append(pair)
    return out


def enumerate_fk_configs(domain: SquareDomain, boundary: str = "free",
                         budget: int = DEFAULT_BUDGET) -> list[FKConfig]:
    n = domain.n_vertices
    if 1 << n > budget:
        raise TooLarge("FK enumeration exceeds the budget")
    out = []
    for bits in range(1 << n):
        mask = np.array([(bits >> i) & 1 for i in range(n)], dtype=bool)
        out.append(FKConfig(domain, mask, boundary))
    return out


# ---------------------------------------------------------------------------
# Canonical state keys


def height_key(h: LipschitzFn | GraphHom) -> tuple:
    return tuple(int(v) for v in h.values)


def spin_key(pair: SpinPair) -> tuple:
    return (tuple(int(v) for v in pair.sigma_black),
            tuple(int(v) for v in pair.sigma_white))


def spin_key_6v(pair: SpinPair6V) -> tuple:
    dom = pair.domain
    return (tuple(int(v) for v in pair.sigma_black[dom.black_mask]),
            tuple(int(v) for v in pair.sigma_white[~dom.black_mask]))


def fk_key(eta: FKConfig) -> tuple:
    return tuple(int(b) for b in eta.mask)


# ---------------------------------------------------------------------------
# Model-level entry point


def enumerate_exact(model: str, domain, params, bc=PLUS_PLUS,
                    representation: str = "heights",
                    budget: int = DEFAULT_BUDGET) -> ExactDistribution:
    """Exact normalised distribution for one of the three models.

    * ``loop-o2``: zero-boundary Lipschitz heights (``heights``) or
      consistent spin pairs under ``bc`` (``spins``), weight from the spin
      measure;
    * ``six-vertex``: {0,1}-class heights or ice pairs under ``bc``;
    * ``fk``: subsets of the black diagonal edges, ``bc`` in {free, wired}.
    """
    if model == "loop-o2":
        x = params.x if isinstance(params, LoopParams) else float(params)
        if representation == "heights":
            states = enumerate_lipschitz_zero(domain, budget)
            i, j = (domain.interior_edge_idx.T if len(domain.interior_edges)
                    else ((), ()))
            weights = [x ** int(np.count_nonzero(h.values[i] != h.values[j]))
                       for h in states]
            return ExactDistribution([height_key(h) for h in states], weights)
        pairs = enumerate_spin_pairs(domain, bc, budget)
        weights = [spin_weight(p, x) for p in pairs]
        return ExactDistribution([spin_key(p) for p in pairs], weights)
    if model == "six-vertex":
        if representation == "heights":
            states = enumerate_homs_01(domain, budget)
            weights = [hom_weight(h, params) for h in states]
            return ExactDistribution([height_key(h) for h in states], weights)
        pairs = enumerate_spin_pairs_6v(domain, bc, budget)
        weights = [spin_weight_6v(p, params) for p in pairs]
        return ExactDistribution([spin_key_6v(p) for p in pairs], weights)
    if model == "fk":
        boundary = bc if isinstance(bc, str) else "free"
        configs = enumerate_fk_configs(domain, boundary, budget)
        weights = [fk_weight(c, params) for c in configs]
        return ExactDistribution([fk_key(c) for c in configs], weights)
    raise ValueError(f"unknown model {model!r}")


def marginal_distribution(states: list, weights, key_fn) -> dict:
    """Sum weights over a key function; unnormalised marginal."""
    out: dict = {}
    for s, w in zip(states, weights):
        k = key_fn(s)
        out[k] = out.get(k, 0.0) + w
    return out
