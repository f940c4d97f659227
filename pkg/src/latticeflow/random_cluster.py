"""Random-cluster (FK) model on the black diagonal graph, with duality.

A configuration is a subset of the black diagonal edges of a square domain
(edges indexed by interior vertices through the d_black bijection).  The
weight is

    p_a^{#open in E_a} p_b^{#open in E_b}
    (1-p_a)^{#closed in E_a} (1-p_b)^{#closed in E_b} q^{k(eta)},

with the cluster count taken after identifying all boundary black squares
under wired boundary conditions.  The dual configuration opens the white
diagonal at exactly the vertices whose black diagonal is closed; on the
self-dual line p_a/(1-p_a) * p_b/(1-p_b) = q the model is self-dual.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .planar import UnionFind
from .squarelattice import BondPerc, Square, SquareDomain


class FKParams:
    """Edge weights (p_a, p_b) and cluster weight q."""

    def __init__(self, p_a: float, p_b: float, q: float):
        if not (0.0 <= p_a <= 1.0 and 0.0 <= p_b <= 1.0):
            raise ValueError("edge weights must lie in [0, 1]")
        if q <= 0:
            raise ValueError("cluster weight must be positive")
        self.p_a, self.p_b, self.q = float(p_a), float(p_b), float(q)

    @classmethod
    def symmetric(cls, p: float, q: float) -> "FKParams":
        return cls(p, p, q)

    @property
    def fkg_regime(self) -> bool:
        return self.q >= 1.0

    @property
    def self_dual(self) -> bool:
        if self.p_a in (0.0, 1.0) or self.p_b in (0.0, 1.0):
            return False
        lhs = self.p_a / (1 - self.p_a) * self.p_b / (1 - self.p_b)
        return math.isclose(lhs, self.q, rel_tol=1e-12)

    def __repr__(self) -> str:
        return f"FKParams(p_a={self.p_a}, p_b={self.p_b}, q={self.q})"


def self_dual_p(q: float) -> float:
    """The symmetric self-dual edge weight sqrt(q) / (1 + sqrt(q))."""
    if q <= 0:
        raise ValueError("q must be positive")
    r = math.sqrt(q)
    return r / (1.0 + r)


class FKConfig:
    """A subset of the black edges plus free/wired boundary conditions."""

    __slots__ = ("domain", "mask", "boundary")

    def __init__(self, domain: SquareDomain, mask, boundary: str = "free"):
        if boundary not in ("free", "wired"):
            raise ValueError("boundary must be 'free' or 'wired'")
        self.domain = domain
        self.mask = np.asarray(mask, dtype=bool).copy()
        if self.mask.shape != (domain.n_vertices,):
            raise ValueError("edge mask has the wrong length")
        self.mask.setflags(write=False)
        self.boundary = boundary

    @property
    def eta(self) -> BondPerc:
        return BondPerc(self.domain, "black", self.mask)

    def state_key(self) -> bytes:
        return self.mask.tobytes()

    def __eq__(self, other) -> bool:
        return (isinstance(other, FKConfig) and self.domain is other.domain
                and self.boundary == other.boundary
                and np.array_equal(self.mask, other.mask))

    def __hash__(self) -> int:
        return hash((self.boundary, self.mask.tobytes()))


def cluster_count(domain: SquareDomain, mask, wired: bool = False) -> int:
    """Number of eta-clusters on the black graph (isolated squares count).

    Under wired counting, all boundary black squares are identified first.
    """
    mask = np.asarray(mask, dtype=bool)
    uf = UnionFind(domain.black_squares)
    if wired:
        boundary = [s for s in domain.black_squares if s in domain.boundary_black]
        for s in boundary[1:]:
            uf.union(boundary[0], s)
    squares = domain.squares
    for k in np.flatnonzero(mask):
        u = squares[domain.black_pairs[k, 0]]
        v = squares[domain.black_pairs[k, 1]]
        uf.union(u, v)
    return uf.n_components()


def fk_log_weight(eta: FKConfig, params: FKParams) -> float:
    domain = eta.domain
    a_mask = domain.black_in_a
    open_a = int(np.count_nonzero(eta.mask & a_mask))
    open_b = int(np.count_nonzero(eta.mask & ~a_mask))
    closed_a = int(np.count_nonzero(~eta.mask & a_mask))
    closed_b = int(np.count_nonzero(~eta.mask & ~a_mask))
    k = cluster_count(domain, eta.mask, wired=(eta.boundary == "wired"))

    def xlog(n, p):
        if n == 0:
            return 0.0
        if p == 0.0:
            return -math.inf
        return n * math.log(p)

    return (xlog(open_a, params.p_a) + xlog(open_b, params.p_b)
            + xlog(closed_a, 1 - params.p_a) + xlog(closed_b, 1 - params.p_b)
            + k * math.log(params.q))


def fk_weight(eta: FKConfig, params: FKParams) -> float:
    """Unnormalised random-cluster weight of a configuration."""
    return math.exp(fk_log_weight(eta, params))


def dual_config(eta: FKConfig) -> BondPerc:
    """The dual percolation on the white graph (open iff black closed)."""
    return eta.eta.dual()


def two_point_connected(eta: FKConfig, u: Square, v: Square) -> bool:
    """Whether two black squares lie in the same eta-cluster."""
    domain = eta.domain
    u, v = tuple(u), tuple(v)
    for s in (u, v):
        if s not in domain.square_index or not domain.black_mask[domain.square_index[s]]:
            raise ValueError(f"{s} is not a black square of the domain")
    if u == v:
        return True
    uf = UnionFind(domain.black_squares)
    squares = domain.squares
    for k in np.flatnonzero(eta.mask):
        uf.union(squares[domain.black_pairs[k, 0]], squares[domain.black_pairs[k, 1]])
    return uf.connected(u, v)
