"""Kernel exactness (matrix checks against enumeration) and chain contracts.

Every MCMC kernel is verified to preserve its exact target measure by
summing pi(s) K(s -> t) over the full enumerated state space.
"""

import itertools
import math
from collections import Counter

import numpy as np
import pytest

from latticeflow.bc import FREE, PLUS_PLUS, BoundaryCondition
from latticeflow.enumeration import (enumerate_exact, enumerate_fk_configs,
                                     enumerate_spin_pairs,
                                     enumerate_spin_pairs_6v, fk_key,
                                     height_key, spin_key, spin_key_6v,
                                     tv_distance)
from latticeflow.errors import EncodingMismatch, RegimeWarning
from latticeflow.hexlattice import hex_ball
from latticeflow.loop_o2 import (LoopParams, SpinPair,
                                 _edge_triplet_components, _nonconstant_y,
                                 spin_weight, spins_to_height)
from latticeflow.mcmc import (ChainConfig, FKChain, LoopO2Chain,
                              SixVertexChain, run_chain)
from latticeflow.random_cluster import FKParams, fk_weight
from latticeflow.rng import make_rng
from latticeflow.six_vertex import SixVParams, spin_weight_6v, spins_to_height_6v
from latticeflow.squarelattice import even_diamond, square_block


def hex_glauber_kernel(chain, pair, face, color):
    """Exact outcome distribution of one Glauber update."""
    p_plus, frozen = chain.site_distribution(pair, face, color)
    if frozen:
        return [(spin_key(pair), 1.0)]
    out = []
    for s, p in ((1, p_plus), (-1, 1 - p_plus)):
        q = pair.copy()
        i = chain.domain.face_index[face]
        (q.sigma_black if color == "black" else q.sigma_white)[i] = s
        out.append((spin_key(q), p))
    return out


def hex_cluster_kernel(chain, pair, color):
    """Exact outcome distribution of one cluster sweep of a colour."""
    domain = chain.domain
    x2 = chain.params.x ** 2
    own = pair.sigma_black if color == "black" else pair.sigma_white
    other = pair.sigma_white if color == "black" else pair.sigma_black
    nb = _nonconstant_y(domain, own)
    nw = _nonconstant_y(domain, other)
    pinned = (chain.bc.white if color == "black" else chain.bc.black)
    out = {}
    n_y = domain.n_y
    for bits in range(1 << n_y):
        mask = np.array([(bits >> i) & 1 for i in range(n_y)], dtype=bool)
        prob = 1.0
        for y in range(n_y):
            if nb[y]:
                p_open = 0.0
            elif nw[y]:
                p_open = 1.0
            else:
                p_open = x2
            prob *= p_open if mask[y] else 1 - p_open
        if prob == 0.0:
            continue
        labels, ncomp = _edge_triplet_components(domain, ~mask)
        forced = np.full(ncomp, 0, dtype=np.int8)
        if pinned is not None:
            forced[np.unique(labels[domain.boundary_mask])] = pinned
        free = np.flatnonzero(forced == 0)
        for coins in itertools.product((1, -1), repeat=len(free)):
            values = forced.copy()
            values[free] = coins
            sigma_new = values[labels].astype(np.int8)
            q = pair.copy()
            if color == "black":
                q.sigma_white[:] = sigma_new
            else:
                q.sigma_black[:] = sigma_new
            if chain.bc.black is None and chain.bc.white is None:
                if not q.is_consistent():
                    continue  # rejected and redrawn: renormalised below
            key = spin_key(q)
            out[key] = out.get(key, 0.0) + prob * 0.5 ** len(free)
    total = sum(out.values())
    return {k: v / total for k, v in out.items()}


@pytest.mark.parametrize("bc,x", [(PLUS_PLUS, 0.75), (BoundaryCondition(1, None), 1.0),
                                  (FREE, 1 / math.sqrt(2))])
def test_hex_glauber_preserves_measure(bc, x):
    domain = hex_ball(1)
    chain = LoopO2Chain(domain, LoopParams(2, x), bc)
    pairs = enumerate_spin_pairs(domain, bc)
    pi = np.array([spin_weight(p, x) for p in pairs])
    pi /= pi.sum()
    keys = {spin_key(p): i for i, p in enumerate(pairs)}
    for face in [(0, 0), (1, 0), (0, -1)]:
        for color in ("black", "white"):
            flow = np.zeros(len(pairs))
            for p, w in zip(pairs, pi):
                for key, prob in hex_glauber_kernel(chain, p, face, color):
                    flow[keys[key]] += w * prob
            assert np.allclose(flow, pi, atol=1e-12)


@pytest.mark.parametrize("bc,x", [(PLUS_PLUS, 0.75),
                                  (BoundaryCondition(1, None), 0.9)])
def test_hex_cluster_preserves_measure(bc, x):
    domain = hex_ball(1)
    chain = LoopO2Chain(domain, LoopParams(2, x), bc)
    pairs = enumerate_spin_pairs(domain, bc)
    pi = np.array([spin_weight(p, x) for p in pairs])
    pi /= pi.sum()
    keys = {spin_key(p): i for i, p in enumerate(pairs)}
    for color in ("black", "white"):
        flow = np.zeros(len(pairs))
        for p, w in zip(pairs, pi):
            for key, prob in hex_cluster_kernel(chain, p, color).items():
                flow[keys[key]] += w * prob
        assert np.allclose(flow, pi, atol=1e-12)


def test_hex_glauber_examples():
    domain = hex_ball(1)
    chain = LoopO2Chain(domain, LoopParams(2, 1.0), PLUS_PLUS)
    pair = chain.initial_state()
    # isolated flippable site at x = 1: uniform outcome
    p_plus, frozen = chain.site_distribution(pair, (0, 0), "black")
    assert not frozen
    assert p_plus == pytest.approx(0.5)
    # freeze: white domain wall at the centre blocks the black update
    bump = pair.copy()
    bump.sigma_white[domain.face_index[(0, 0)]] = -1
    _, frozen = chain.site_distribution(bump, (0, 0), "black")
    assert frozen


def test_hex_glauber_detailed_balance():
    domain = hex_ball(1)
    x = 0.8
    chain = LoopO2Chain(domain, LoopParams(2, x), PLUS_PLUS)
    plus = chain.initial_state()
    minus = plus.copy()
    minus.sigma_black[domain.face_index[(0, 0)]] = -1
    p_plus, _ = chain.site_distribution(plus, (0, 0), "black")
    # transition plus->minus = 1 - p_plus; minus->plus = p_plus (same cond.)
    ratio = (1 - p_plus) / p_plus
    assert ratio == pytest.approx(spin_weight(minus, x) / spin_weight(plus, x))


# ---------------------------------------------------------------------------
# Six-vertex kernels


def sixv_glauber_kernel(chain, pair, square, color):
    p_plus, frozen = chain.site_distribution(pair, square, color)
    if frozen:
        return [(spin_key_6v(pair), 1.0)]
    out = []
    for s, p in ((1, p_plus), (-1, 1 - p_plus)):
        q = pair.copy()
        i = chain.domain.square_index[square]
        (q.sigma_black if color == "black" else q.sigma_white)[i] = s
        out.append((spin_key_6v(q), p))
    return out


def sixv_cluster_kernel(chain, pair, color):
    domain = chain.domain
    params = chain.params
    b_dis = pair.black_disagrees()
    w_dis = pair.white_disagrees()
    a_over_c, b_over_c = params.a / params.c, params.b / params.c
    thr = np.where(domain.black_in_a, a_over_c, b_over_c)
    # open probability of the relevant colour's edges given the spins
    if color == "black":
        p_open = np.where(b_dis, 0.0, np.where(w_dis, 1.0, thr))
        pairs_for_comps = domain.white_pairs
        own_black = False
        pinned = chain.bc.white
    else:
        thr_w = np.where(domain.black_in_a, b_over_c, a_over_c)
        p_open = np.where(w_dis, 0.0, np.where(b_dis, 1.0, thr_w))
        pairs_for_comps = domain.black_pairs
        own_black = True
        pinned = chain.bc.black
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components
    n = domain.n_squares
    out = {}
    nv = domain.n_vertices
    for bits in range(1 << nv):
        mask = np.array([(bits >> i) & 1 for i in range(nv)], dtype=bool)
        prob = float(np.prod(np.where(mask, p_open, 1 - p_open)))
        if prob == 0.0:
            continue
        closed = np.flatnonzero(~mask)
        if len(closed):
            graph = coo_matrix((np.ones(len(closed)),
                                (pairs_for_comps[closed, 0],
                                 pairs_for_comps[closed, 1])), shape=(n, n))
            ncomp, labels = connected_components(graph, directed=False)
        else:
            ncomp, labels = n, np.arange(n)
        forced = np.zeros(ncomp, dtype=np.int8)
        if pinned is not None:
            own_mask = domain.black_mask if own_black else ~domain.black_mask
            forced[np.unique(labels[domain.boundary_mask & own_mask])] = pinned
        own_idx = np.flatnonzero(domain.black_mask if own_black
                                 else ~domain.black_mask)
        relevant = np.unique(labels[own_idx])
        free = [c for c in relevant if forced[c] == 0]
        for coins in itertools.product((1, -1), repeat=len(free)):
            values = forced.copy()
            for c, s in zip(free, coins):
                values[c] = s
            new = values[labels].astype(np.int8)
            q = pair.copy()
            if own_black:
                q.sigma_black[:] = np.where(domain.black_mask, new, 1)
            else:
                q.sigma_white[:] = np.where(~domain.black_mask, new, 1)
            key = spin_key_6v(q)
            out[key] = out.get(key, 0.0) + prob * 0.5 ** len(free)
    total = sum(out.values())
    return {k: v / total for k, v in out.items()}


def plus_domain():
    return even_diamond(1, center=(1, 0))


@pytest.mark.parametrize("bc", [PLUS_PLUS, FREE])
def test_sixv_glauber_preserves_measure(bc):
    domain = plus_domain()
    params = SixVParams(1.0, 0.8, 1.6)
    chain = SixVertexChain(domain, params, bc)
    pairs = enumerate_spin_pairs_6v(domain, bc)
    pi = np.array([spin_weight_6v(p, params) for p in pairs])
    pi /= pi.sum()
    keys = {spin_key_6v(p): i for i, p in enumerate(pairs)}
    for square in domain.squares:
        color = "black" if (square[0] + square[1]) % 2 == 0 else "white"
        flow = np.zeros(len(pairs))
        for p, w in zip(pairs, pi):
            for key, prob in sixv_glauber_kernel(chain, p, square, color):
                flow[keys[key]] += w * prob
        assert np.allclose(flow, pi, atol=1e-12)


@pytest.mark.parametrize("bc", [PLUS_PLUS, FREE])
def test_sixv_cluster_preserves_measure(bc):
    domain = plus_domain()
    params = SixVParams(1.0, 0.8, 1.6)
    chain = SixVertexChain(domain, params, bc)
    pairs = enumerate_spin_pairs_6v(domain, bc)
    pi = np.array([spin_weight_6v(p, params) for p in pairs])
    pi /= pi.sum()
    keys = {spin_key_6v(p): i for i, p in enumerate(pairs)}
    for color in ("black", "white"):
        flow = np.zeros(len(pairs))
        for p, w in zip(pairs, pi):
            for key, prob in sixv_cluster_kernel(chain, p, color).items():
                flow[keys[key]] += w * prob
        assert np.allclose(flow, pi, atol=1e-12)


# ---------------------------------------------------------------------------
# FK heat bath


@pytest.mark.parametrize("boundary", ["free", "wired"])
def test_fk_heatbath_preserves_measure(boundary):
    domain = even_diamond(2)
    params = FKParams(0.45, 0.6, 1.7)
    chain = FKChain(domain, params, boundary)
    configs = enumerate_fk_configs(domain, boundary)
    pi = np.array([fk_weight(c, params) for c in configs])
    pi /= pi.sum()
    keys = {fk_key(c): i for i, c in enumerate(configs)}
    for k in range(domain.n_vertices):
        flow = np.zeros(len(configs))
        for c, w in zip(configs, pi):
            p_open = chain.edge_open_probability(c, k)
            for bit, p in ((True, p_open), (False, 1 - p_open)):
                mask = c.mask.copy()
                mask[k] = bit
                flow[keys[tuple(int(b) for b in mask)]] += w * p
        assert np.allclose(flow, pi, atol=1e-12)


def test_fk_bridge_probability():
    # star domain: every edge is a bridge when the others are closed
    domain = even_diamond(2)
    params = FKParams(0.5, 0.5, 2.0)
    chain = FKChain(domain, params, "free")
    from latticeflow.random_cluster import FKConfig
    empty = FKConfig(domain, np.zeros(domain.n_vertices, dtype=bool))
    assert chain.edge_open_probability(empty, 0) == pytest.approx(1.0 / 3.0)
    full = FKConfig(domain, np.ones(domain.n_vertices, dtype=bool))
    # star: closing one edge disconnects its leaf, still a bridge
    assert chain.edge_open_probability(full, 0) == pytest.approx(1.0 / 3.0)


# ---------------------------------------------------------------------------
# Chain driver contracts


def test_run_chain_deterministic():
    domain = hex_ball(1)
    chain1 = LoopO2Chain(domain, LoopParams(2, 0.8), PLUS_PLUS)
    chain2 = LoopO2Chain(domain, LoopParams(2, 0.8), PLUS_PLUS)
    config = ChainConfig(seed=42, sweeps=50, burn_in=10, thinning=2)
    obs = {"state": lambda s: spin_key(s)}
    rec1 = run_chain(chain1, config, obs)
    rec2 = run_chain(chain2, config, obs)
    assert [r.values for r in rec1] == [r.values for r in rec2]
    assert [r.sweep_index for r in rec1] == list(range(10, 50, 2))


def test_run_chain_single_record():
    domain = hex_ball(1)
    chain = LoopO2Chain(domain, LoopParams(2, 0.8), PLUS_PLUS)
    config = ChainConfig(seed=1, sweeps=5, burn_in=4, thinning=1)
    records = run_chain(chain, config, {})
    assert len(records) == 1


def test_chain_config_validation():
    with pytest.raises(ValueError):
        ChainConfig(seed=1, sweeps=5, burn_in=5)
    with pytest.raises(ValueError):
        ChainConfig(seed=1, sweeps=5, burn_in=0, thinning=0)


def test_stationarity_smoke_loop_o2():
    """Short-run sanity check; the acceptance suite runs the long version."""
    domain = hex_ball(1)
    x = 1 / math.sqrt(2)
    chain = LoopO2Chain(domain, LoopParams(2, x), PLUS_PLUS)
    exact = enumerate_exact("loop-o2", domain, LoopParams(2, x))
    config = ChainConfig(seed=7, sweeps=4000, burn_in=100)
    records = run_chain(chain, config,
                        {"h": lambda s: height_key(spins_to_height(s))})
    counts = Counter(r.values["h"] for r in records)
    assert tv_distance(counts, exact) < 0.05


def test_stationarity_smoke_six_vertex():
    domain = square_block(3, 3, origin=(1, 0))
    params = SixVParams(1.0, 1.0, 2.0)
    chain = SixVertexChain(domain, params, PLUS_PLUS)
    exact = enumerate_exact("six-vertex", domain, params)
    config = ChainConfig(seed=8, sweeps=4000, burn_in=100)
    records = run_chain(chain, config,
                        {"h": lambda s: height_key(spins_to_height_6v(s))})
    counts = Counter(r.values["h"] for r in records)
    assert tv_distance(counts, exact) < 0.05


def test_tv_distance_contract():
    from latticeflow.enumeration import ExactDistribution
    exact = ExactDistribution(["a", "b"], [0.5, 0.5])
    assert tv_distance({"a": 6, "b": 4}, exact) == pytest.approx(0.1)
    assert tv_distance({"a": 5, "b": 5}, exact) == pytest.approx(0.0)
    with pytest.raises(EncodingMismatch):
        tv_distance({"c": 1}, exact)


def test_regime_warnings():
    with pytest.warns(RegimeWarning):
        LoopO2Chain(hex_ball(1), LoopParams(2, 1.2), PLUS_PLUS)
    with pytest.warns(RegimeWarning):
        SixVertexChain(plus_domain(), SixVParams(2.0, 1.0, 1.5), PLUS_PLUS)
    with pytest.warns(RegimeWarning):
        FKChain(even_diamond(2), FKParams(0.5, 0.5, 0.8), "free")
