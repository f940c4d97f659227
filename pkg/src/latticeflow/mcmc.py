"""MCMC kernels: single-site Glauber, cluster sweeps, FK heat bath.

Each kernel is the exact conditional of its target measure, so any mixture
or composition preserves it.  The default sweep is one full Glauber pass
over both colours followed by one black and one white cluster sweep; the
single-site moves guard against reducibility of the cluster moves alone.

Glauber updates run on sublattice colour classes (3 for the triangular face
lattice, 2 per colour class on the checkerboard) so that each class updates
as one vectorised conditional draw.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .bc import BoundaryCondition, PLUS_PLUS
from .errors import RegimeWarning
from .hexlattice import HexDomain
from .loop_o2 import (LoopParams, SpinPair, _edge_triplet_components,
                      resample_white_given_black, sample_percolations)
from .random_cluster import FKConfig, FKParams, cluster_count
from .rng import make_rng
from .six_vertex import (SixVParams, SpinPair6V, sample_percolations_6v)
from .squarelattice import SquareDomain

from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


@dataclass
class ChainConfig:
    """Sweep schedule and reproducibility settings for one chain."""

    seed: int
    sweeps: int
    burn_in: int = 0
    thinning: int = 1
    glauber_passes: int = 1
    cluster_sweeps: int = 1
    stream: int = 0

    def __post_init__(self):
        if not (self.sweeps > self.burn_in >= 0):
            raise ValueError("need sweeps > burn_in >= 0")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")


def _warn_out_of_regime(condition: bool, message: str) -> None:
    if condition:
        warnings.warn(message, RegimeWarning, stacklevel=3)


# ---------------------------------------------------------------------------
# Loop O(2) chain


class LoopO2Chain:
    """Glauber + cluster dynamics for the hexagonal spin measure."""

    def __init__(self, domain: HexDomain, params: LoopParams,
                 bc: BoundaryCondition = PLUS_PLUS):
        _warn_out_of_regime(not params.fkg_regime,
                            "x > 1: FKG and super-duality guarantees do not apply")
        self.domain = domain
        self.params = params
        self.bc = bc
        # triangular face lattice is 3-colourable by (k - l) mod 3
        classes = [[], [], []]
        for i, (k, l) in enumerate(domain.faces):
            classes[(k - l) % 3].append(i)
        self.face_classes = [np.array(c, dtype=np.int64) for c in classes]
        self.state = self.initial_state()

    def initial_state(self) -> SpinPair:
        sb = np.full(self.domain.n_faces, self.bc.black or 1, dtype=np.int8)
        sw = np.full(self.domain.n_faces, self.bc.white or 1, dtype=np.int8)
        return SpinPair(self.domain, sb, sw)

    # -- single-site kernel -------------------------------------------------

    def site_distribution(self, pair: SpinPair, face, color: str
                          ) -> tuple[float, bool]:
        """(probability of +1, frozen) for the conditional spin at a face."""
        domain = self.domain
        i = domain.face_index[tuple(face)]
        pinned = self.bc.black if color == "black" else self.bc.white
        if pinned is not None and domain.boundary_mask[i]:
            return (1.0 if pinned > 0 else 0.0, True)
        own = pair.sigma_black if color == "black" else pair.sigma_white
        other = pair.sigma_white if color == "black" else pair.sigma_black
        neigh = domain.neighbors[i]
        for j in neigh:
            if j >= 0 and other[i] != other[j]:
                return (1.0 if own[i] > 0 else 0.0, True)
        x2 = self.params.x ** 2
        weights = {}
        for s in (1, -1):
            count = 0
            for slot in range(3):
                yi = domain.face_up_tris[i, slot]
                if yi < 0:
                    continue
                a, b = domain.face_up_other[i, slot]
                if own[a] != s or own[b] != s:
                    count += 1
            weights[s] = x2 ** count
        p_plus = weights[1] / (weights[1] + weights[-1])
        return (p_plus, False)

    def glauber_step(self, pair: SpinPair, face, color: str,
                     rng: np.random.Generator) -> SpinPair:
        """Resample one spin from its conditional law (in place)."""
        p_plus, frozen = self.site_distribution(pair, face, color)
        if frozen:
            return pair
        value = 1 if rng.random() < p_plus else -1
        i = self.domain.face_index[tuple(face)]
        if color == "black":
            pair.sigma_black[i] = value
        else:
            pair.sigma_white[i] = value
        return pair

    # -- vectorised passes ---------------------------------------------------

    def _class_update(self, pair: SpinPair, color: str, cls: np.ndarray,
                      rng: np.random.Generator) -> None:
        domain = self.domain
        own = pair.sigma_black if color == "black" else pair.sigma_white
        other = pair.sigma_white if color == "black" else pair.sigma_black
        pinned = self.bc.black if color == "black" else self.bc.white
        x2 = self.params.x ** 2

        neigh = domain.neighbors[cls]
        safe = np.where(neigh >= 0, neigh, cls[:, None])
        frozen = np.any(other[safe] != other[cls][:, None], axis=1)
        if pinned is not None:
            frozen |= domain.boundary_mask[cls]

        tris = domain.face_up_tris[cls]
        others = domain.face_up_other[cls]
        sa = own[np.where(others[:, :, 0] >= 0, others[:, :, 0], 0)]
        sb = own[np.where(others[:, :, 1] >= 0, others[:, :, 1], 0)]
        valid = tris >= 0
        non_plus = valid & ((sa != 1) | (sb != 1))
        non_minus = valid & ((sa != -1) | (sb != -1))
        w_plus = x2 ** non_plus.sum(axis=1)
        w_minus = x2 ** non_minus.sum(axis=1)
        p_plus = w_plus / (w_plus + w_minus)
        draws = np.where(rng.random(len(cls)) < p_plus, 1, -1).astype(np.int8)
        own[cls] = np.where(frozen, own[cls], draws)

    def glauber_pass(self, rng: np.random.Generator) -> None:
        for color in ("black", "white"):
            for c in rng.permutation(3):
                self._class_update(self.state, color, self.face_classes[c], rng)

    def cluster_sweep(self, color: str, rng: np.random.Generator) -> None:
        """Sample the colour's percolation, then resample the opposite spins."""
        pair = self.state
        perc = sample_percolations(pair, rng.random(self.domain.n_y),
                                   self.params.x)
        if color == "black":
            sigma_white = resample_white_given_black(
                pair.sigma_black, perc.black_mask, rng, self.bc,
                domain=self.domain)
            pair.sigma_white[:] = sigma_white
        else:
            sigma_black = _resample_opposite_hex(
                self.domain, pair.sigma_white, perc.white_mask, rng, self.bc)
            pair.sigma_black[:] = sigma_black

    def sweep(self, rng: np.random.Generator, config: ChainConfig) -> None:
        for _ in range(config.glauber_passes):
            self.glauber_pass(rng)
        for _ in range(config.cluster_sweeps):
            self.cluster_sweep("black", rng)
            self.cluster_sweep("white", rng)


def _resample_opposite_hex(domain: HexDomain, sigma_white, xi_white_mask,
                           rng: np.random.Generator,
                           bc: BoundaryCondition) -> np.ndarray:
    """Resample the black spins given (sigma_white, xi_white); mirror of
    resample_white_given_black with the colours swapped."""
    labels, ncomp = _edge_triplet_components(domain, ~np.asarray(xi_white_mask))
    boundary_labels = np.unique(labels[domain.boundary_mask])
    free_bc = bc.black is None and bc.white is None
    for _ in range(100000):
        coins = (rng.integers(0, 2, size=ncomp) * 2 - 1).astype(np.int8)
        if bc.black is not None:
            coins[boundary_labels] = bc.black
        sigma_black = coins[labels]
        if not free_bc or SpinPair(domain, sigma_black, sigma_white).is_consistent():
            return sigma_black
    raise RuntimeError("no consistent black spin assignment found")


# ---------------------------------------------------------------------------
# Six-vertex chain


class SixVertexChain:
    """Glauber + cluster dynamics for the checkerboard spin measure."""

    def __init__(self, domain: SquareDomain, params: SixVParams,
                 bc: BoundaryCondition = PLUS_PLUS):
        _warn_out_of_regime(not params.fkg_regime,
                            "c < max(a, b): FKG guarantees do not apply")
        self.domain = domain
        self.params = params
        self.bc = bc
        # per colour, split squares into two independent classes (i mod 2)
        self.classes = {"black": [[], []], "white": [[], []]}
        for i, s in enumerate(domain.squares):
            color = "black" if domain.black_mask[i] else "white"
            self.classes[color][s[0] % 2].append(i)
        for color in self.classes:
            self.classes[color] = [np.array(c, dtype=np.int64)
                                   for c in self.classes[color]]
        # square -> (vertex, partner square, wall-in-E_a flag) incidences
        n = domain.n_squares
        self.inc_vertex = np.full((n, 4), -1, dtype=np.int64)
        self.inc_partner = np.full((n, 4), -1, dtype=np.int64)
        self.inc_wall_a = np.zeros((n, 4), dtype=bool)
        counts = np.zeros(n, dtype=np.int64)
        for k in range(domain.n_vertices):
            # a disagreement on a diagonal puts the OTHER diagonal in the wall
            for pairs, wall_a in ((domain.black_pairs, not domain.black_in_a[k]),
                                  (domain.white_pairs, domain.black_in_a[k])):
                i, j = int(pairs[k, 0]), int(pairs[k, 1])
                for a, b in ((i, j), (j, i)):
                    slot = counts[a]
                    self.inc_vertex[a, slot] = k
                    self.inc_partner[a, slot] = b
                    self.inc_wall_a[a, slot] = wall_a
                    counts[a] += 1
        self.state = self.initial_state()

    def initial_state(self) -> SpinPair6V:
        sb = np.full(self.domain.n_squares, self.bc.black or 1, dtype=np.int8)
        sw = np.full(self.domain.n_squares, self.bc.white or 1, dtype=np.int8)
        return SpinPair6V(self.domain, sb, sw)

    def site_distribution(self, pair: SpinPair6V, square, color: str
                          ) -> tuple[float, bool]:
        domain = self.domain
        i = domain.square_index[tuple(square)]
        is_black_sq = bool(domain.black_mask[i])
        if (color == "black") != is_black_sq:
            raise ValueError(f"{square} is not a {color} square")
        pinned = self.bc.black if color == "black" else self.bc.white
        if pinned is not None and domain.boundary_mask[i]:
            return (1.0 if pinned > 0 else 0.0, True)
        own = pair.sigma_black if color == "black" else pair.sigma_white
        other = pair.sigma_white if color == "black" else pair.sigma_black
        other_pairs = (domain.white_pairs if color == "black"
                       else domain.black_pairs)
        # frozen when the opposite colour's diagonal disagrees at a corner
        for slot in range(4):
            k = self.inc_vertex[i, slot]
            if k < 0:
                continue
            if other[other_pairs[k, 0]] != other[other_pairs[k, 1]]:
                return (1.0 if own[i] > 0 else 0.0, True)
        a_over_c = self.params.a / self.params.c
        b_over_c = self.params.b / self.params.c
        weights = {}
        for s in (1, -1):
            w = 1.0
            for slot in range(4):
                k = self.inc_vertex[i, slot]
                if k < 0:
                    continue
                partner = self.inc_partner[i, slot]
                if own[partner] != s:
                    w *= a_over_c if self.inc_wall_a[i, slot] else b_over_c
            weights[s] = w
        p_plus = weights[1] / (weights[1] + weights[-1])
        return (p_plus, False)

    def glauber_step(self, pair: SpinPair6V, square, color: str,
                     rng: np.random.Generator) -> SpinPair6V:
        p_plus, frozen = self.site_distribution(pair, square, color)
        if frozen:
            return pair
        value = 1 if rng.random() < p_plus else -1
        i = self.domain.square_index[tuple(square)]
        if color == "black":
            pair.sigma_black[i] = value
        else:
            pair.sigma_white[i] = value
        return pair

    def _class_update(self, pair: SpinPair6V, color: str, cls: np.ndarray,
                      rng: np.random.Generator) -> None:
        domain = self.domain
        if len(cls) == 0:
            return
        own = pair.sigma_black if color == "black" else pair.sigma_white
        other = pair.sigma_white if color == "black" else pair.sigma_black
        other_pairs = (domain.white_pairs if color == "black"
                       else domain.black_pairs)
        pinned = self.bc.black if color == "black" else self.bc.white

        kk = self.inc_vertex[cls]
        valid = kk >= 0
        ksafe = np.where(valid, kk, 0)
        o0 = other[other_pairs[ksafe, 0]]
        o1 = other[other_pairs[ksafe, 1]]
        frozen = np.any(valid & (o0 != o1), axis=1)
        if pinned is not None:
            frozen |= domain.boundary_mask[cls]

        partner = np.where(valid, self.inc_partner[cls], 0)
        pvals = own[partner]
        a_over_c = self.params.a / self.params.c
        b_over_c = self.params.b / self.params.c
        factor = np.where(self.inc_wall_a[cls], a_over_c, b_over_c)
        ones = np.ones_like(factor)
        w_plus = np.prod(np.where(valid & (pvals != 1), factor, ones), axis=1)
        w_minus = np.prod(np.where(valid & (pvals != -1), factor, ones), axis=1)
        p_plus = w_plus / (w_plus + w_minus)
        draws = np.where(rng.random(len(cls)) < p_plus, 1, -1).astype(np.int8)
        own[cls] = np.where(frozen, own[cls], draws)

    def glauber_pass(self, rng: np.random.Generator) -> None:
        for color in ("black", "white"):
            for c in rng.permutation(2):
                self._class_update(self.state, color, self.classes[color][c], rng)

    def cluster_sweep(self, color: str, rng: np.random.Generator) -> None:
        pair = self.state
        domain = self.domain
        perc = sample_percolations_6v(pair, rng.random(domain.n_vertices),
                                      self.params)
        if color == "black":
            # resample white spins on components of (xi_black)*
            mask = perc.black_mask
            pairs = domain.white_pairs
            own_black = False
        else:
            mask = perc.white_mask
            pairs = domain.black_pairs
            own_black = True
        closed = np.flatnonzero(~mask)
        n = domain.n_squares
        if len(closed):
            rows = pairs[closed, 0]
            cols = pairs[closed, 1]
            graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)),
                               shape=(n, n))
            ncomp, labels = connected_components(graph, directed=False)
        else:
            ncomp, labels = n, np.arange(n)
        coins = (rng.integers(0, 2, size=ncomp) * 2 - 1).astype(np.int8)
        pinned = self.bc.black if own_black else self.bc.white
        if pinned is not None:
            own_mask = domain.black_mask if own_black else ~domain.black_mask
            boundary = domain.boundary_mask & own_mask
            coins[np.unique(labels[boundary])] = pinned
        values = coins[labels]
        if own_black:
            pair.sigma_black[:] = np.where(domain.black_mask, values, 1)
        else:
            pair.sigma_white[:] = np.where(~domain.black_mask, values, 1)

    def sweep(self, rng: np.random.Generator, config: ChainConfig) -> None:
        for _ in range(config.glauber_passes):
            self.glauber_pass(rng)
        for _ in range(config.cluster_sweeps):
            self.cluster_sweep("black", rng)
            self.cluster_sweep("white", rng)


# ---------------------------------------------------------------------------
# FK heat-bath chain


class FKChain:
    """Single-edge heat bath for the random-cluster model."""

    def __init__(self, domain: SquareDomain, params: FKParams,
                 boundary: str = "free"):
        _warn_out_of_regime(not params.fkg_regime,
                            "q < 1: FKG-based guarantees do not apply")
        self.domain = domain
        self.params = params
        self.boundary = boundary
        self.state = FKConfig(domain, np.zeros(domain.n_vertices, dtype=bool),
                              boundary)

    def edge_open_probability(self, eta: FKConfig, k: int) -> float:
        """Conditional probability that edge k is open given the rest."""
        domain = self.domain
        p = self.params.p_a if domain.black_in_a[k] else self.params.p_b
        rest = eta.mask.copy()
        rest[k] = False
        with_edge = rest.copy()
        with_edge[k] = True
        wired = self.boundary == "wired"
        delta = (cluster_count(domain, rest, wired)
                 - cluster_count(domain, with_edge, wired))
        return p / (p + (1 - p) * self.params.q ** delta)

    def heatbath_step(self, eta: FKConfig, k: int,
                      rng: np.random.Generator) -> FKConfig:
        p_open = self.edge_open_probability(eta, k)
        mask = eta.mask.copy()
        mask[k] = rng.random() < p_open
        return FKConfig(self.domain, mask, self.boundary)

    def sweep(self, rng: np.random.Generator, config: ChainConfig) -> None:
        for k in range(self.domain.n_vertices):
            self.state = self.heatbath_step(self.state, k, rng)


def fk_heatbath_step(eta: FKConfig, edge: int, rng: np.random.Generator,
                     params: FKParams) -> FKConfig:
    """One heat-bath update of a single edge (by vertex index)."""
    chain = FKChain(eta.domain, params, eta.boundary)
    return chain.heatbath_step(eta, edge, rng)


# ---------------------------------------------------------------------------
# Chain driver


@dataclass
class ChainRecord:
    sweep_index: int
    values: dict


def run_chain(chain, config: ChainConfig,
              observables: Mapping[str, Callable] | None = None,
              ) -> list[ChainRecord]:
    """Drive a chain; deterministic given (seed, stream, config).

    Emits one record per thinned post-burn-in sweep, applying each observable
    to the current state.
    """
    rng = make_rng(config.seed, config.stream)
    observables = dict(observables or {})
    records: list[ChainRecord] = []
    for sweep in range(config.sweeps):
        chain.sweep(rng, config)
        if sweep < config.burn_in:
            continue
        if (sweep - config.burn_in) % config.thinning:
            continue
        values = {name: fn(chain.state) for name, fn in observables.items()}
        records.append(ChainRecord(sweep_index=sweep, values=values))
    return records
