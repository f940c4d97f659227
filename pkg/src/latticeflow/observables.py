"""Measurable quantities: nesting counts, crossings, circuits, variance fits.

Monte Carlo estimates carry jackknife standard errors computed over blocks
of consecutive (thinned) samples, which absorbs residual autocorrelation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (AnnulusOutOfDomain, InsufficientPoints,
                     InsufficientSamples, RhombusOutOfDomain)
from .hexlattice import (Face, HexDomain, SitePerc, YVertex, face_neighbors,
                         hex_ball_faces, y_tri)
from .loop_o2 import LoopConfig, decompose_loops
from .planar import face_probe_point, triangular_enclosed
from .squarelattice import BondPerc

DEFAULT_BLOCK = 100


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    n_samples: int

    def __post_init__(self):
        if self.n_samples < 1:
            raise InsufficientSamples("need at least one sample")
        if self.std_error < 0:
            raise ValueError("standard error must be nonnegative")

    def __str__(self) -> str:
        return f"{self.mean:.6g} +- {self.std_error:.2g} (n={self.n_samples})"


def _block_jackknife(values: np.ndarray, statistic,
                     block_size: int) -> Estimate:
    n = len(values)
    n_blocks = max(n // block_size, 1)
    if n_blocks < 2:
        return Estimate(float(statistic(values)), 0.0, n)
    usable = values[: n_blocks * block_size]
    full = float(statistic(usable))
    leave_out = []
    for b in range(n_blocks):
        rest = np.concatenate([usable[: b * block_size],
                               usable[(b + 1) * block_size:]])
        leave_out.append(float(statistic(rest)))
    leave_out = np.array(leave_out)
    se = math.sqrt((n_blocks - 1) / n_blocks
                   * float(((leave_out - leave_out.mean()) ** 2).sum()))
    return Estimate(full, se, n)


def mean_estimate(values: Iterable[float],
                  block_size: int = DEFAULT_BLOCK) -> Estimate:
    values = np.asarray(list(values), dtype=float)
    if len(values) < 1:
        raise InsufficientSamples("need at least one sample")
    return _block_jackknife(values, lambda v: v.mean(), block_size)


def height_variance(values: Iterable[float],
                    block_size: int = DEFAULT_BLOCK) -> Estimate:
    """Unbiased sample variance of h(u) with a block-jackknife error bar."""
    values = np.asarray(list(values), dtype=float)
    if len(values) < 2:
        raise InsufficientSamples("variance needs at least two samples")
    return _block_jackknife(values, lambda v: v.var(ddof=1), block_size)


# ---------------------------------------------------------------------------
# Loop nesting


def loops_around(omega: LoopConfig, u: Face) -> int:
    """Number of loops whose strict interior contains the face ``u``.

    Each loop is a simple cycle; the face is inside iff it cannot reach the
    bounding frame without crossing the loop.
    """
    u = tuple(u)
    count = 0
    for loop in decompose_loops(omega):
        faces_on_loop = {f for e in loop for f in e}
        ks = [k for k, _ in faces_on_loop]
        ls = [l for _, l in faces_on_loop]
        k0, k1 = min(ks) - 1, max(ks) + 1
        l0, l1 = min(ls) - 1, max(ls) + 1
        if not (k0 <= u[0] <= k1 and l0 <= u[1] <= l1):
            continue
        blocked = loop
        seen = {u}
        stack = [u]
        escaped = False
        while stack and not escaped:
            f = stack.pop()
            for g in face_neighbors(f):
                if g in seen:
                    continue
                e = (f, g) if f <= g else (g, f)
                if e in blocked:
                    continue
                if not (k0 <= g[0] <= k1 and l0 <= g[1] <= l1):
                    escaped = True
                    break
                seen.add(g)
                stack.append(g)
        if not escaped:
            count += 1
    return count


# ---------------------------------------------------------------------------
# Rhombus crossings

_Y_OFFSETS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))


def _site_crossing(open_sites: set, m: int, horizontal: bool) -> bool:
    rng = range(-m, m + 1)
    region = {(k, l) for k in rng for l in rng}
    inside = open_sites & region
    if horizontal:
        start = {(-m, l) for l in rng} & inside
        goal = {(m, l) for l in rng}
    else:
        start = {(k, -m) for k in rng} & inside
        goal = {(k, m) for k in rng}
    seen = set(start)
    stack = list(start)
    while stack:
        y = stack.pop()
        if y in goal:
            return True
        for dk, dl in _Y_OFFSETS:
            z = (y[0] + dk, y[1] + dl)
            if z in inside and z not in seen:
                seen.add(z)
                stack.append(z)
    return bool(seen & goal)


def crossing_h(xi, m: int) -> bool:
    """Left-right crossing of the rhombus R_m by open sites."""
    return _crossing(xi, m, horizontal=True)


def crossing_v(xi, m: int) -> bool:
    """Top-bottom crossing of the rhombus R_m by open sites."""
    return _crossing(xi, m, horizontal=False)


def _crossing(xi, m: int, horizontal: bool) -> bool:
    if isinstance(xi, SitePerc):
        rng = range(-m, m + 1)
        needed = {(k, l) for k in rng for l in rng}
        if not needed <= set(xi.domain.y_vertices):
            raise RhombusOutOfDomain(f"R_{m} is not contained in Y(domain)")
        open_sites = set(xi.open_sites)
    else:
        open_sites = set(map(tuple, xi))
    return _site_crossing(open_sites, m, horizontal)


# ---------------------------------------------------------------------------
# Circuits in annuli


def circuit_surrounds(xi, u) -> bool:
    """Whether the open sites/bonds contain a circuit strictly around ``u``."""
    if isinstance(xi, SitePerc):
        open_sites = set(xi.open_sites)
        allowed = set(xi.domain.y_vertices)
        probe = face_probe_point(tuple(u))
        return triangular_enclosed(open_sites, allowed, [probe])[0]
    if isinstance(xi, BondPerc):
        from .six_vertex import _circuit_of
        domain = xi.domain
        region = frozenset(domain.squares)
        circuit = _circuit_of(domain, xi.color, xi.mask, region, tuple(u))
        return circuit is not None and not circuit.through_target
    raise TypeError("xi must be a SitePerc or BondPerc")


def circ_event(xi, n: int, open_sites: set | None = None) -> bool:
    """A circuit of open sites within Lambda_{2n} surrounding Lambda_n.

    Implemented geometrically: every face of Lambda_n must be separated from
    infinity by the open adjacencies drawn inside Y(Lambda_{2n}), within a
    single enclosed pocket.  Cross-checked against a brute-force cycle search
    in the tests.
    """
    if isinstance(xi, SitePerc):
        open_sites = set(xi.open_sites)
        domain_sites = set(xi.domain.y_vertices)
    else:
        open_sites = set(map(tuple, xi))
        domain_sites = None
    inner_faces = hex_ball_faces(n)
    outer_faces = hex_ball_faces(2 * n)
    allowed = {y for y in _sites_of_faces(outer_faces)
               if all(f in outer_faces for f in y_tri(y))}
    if domain_sites is not None and not allowed <= domain_sites:
        raise AnnulusOutOfDomain(f"Y(Lambda_{2 * n}) is not inside the domain")
    probes = [face_probe_point(f) for f in sorted(inner_faces)]
    enclosed = triangular_enclosed(open_sites, allowed, probes,
                                   require_single_pocket=True)
    return all(enclosed)


def _sites_of_faces(faces: set) -> set:
    from .hexlattice import face_up_vertices
    return {y for f in faces for y in face_up_vertices(f)}


# ---------------------------------------------------------------------------
# Monte Carlo estimates of crossing and circuit probabilities


def crossing_probability(x: float, m: int, chain_config,
                         bc=None, radius: int | None = None,
                         block_size: int = DEFAULT_BLOCK) -> Estimate:
    """MC estimate of P(H_m(xi^{r+})) under r+ boundary conditions.

    The guarantee P >= 1/4 applies in the regime 1/sqrt2 <= x <= 1.
    """
    from .bc import BLACK_PLUS
    from .loop_o2 import LoopParams, sample_percolations
    from .mcmc import LoopO2Chain, run_chain
    from .rng import make_rng

    domain = _hex_ball_cached(4 * m if radius is None else radius)
    chain = LoopO2Chain(domain, LoopParams(2, x), bc or BLACK_PLUS)
    rng = make_rng(chain_config.seed, chain_config.stream + 1000)
    rhombus_sites = [(k, l) for k in range(-m, m + 1) for l in range(-m, m + 1)]
    if not set(rhombus_sites) <= set(domain.y_vertices):
        raise RhombusOutOfDomain(f"R_{m} is not contained in Y(domain)")

    def crossed(pair):
        perc = sample_percolations(pair, rng.random(domain.n_y), x)
        plus = perc.black_mask & (perc.black_sign == 1)
        open_sites = {y for y in rhombus_sites if plus[domain.y_index[y]]}
        return float(_site_crossing(open_sites, m, horizontal=True))

    records = run_chain(chain, chain_config, {"hit": crossed})
    return mean_estimate([r.values["hit"] for r in records], block_size)


def alpha_n(n: int, rho: float, x: float, chain_config,
            block_size: int = DEFAULT_BLOCK) -> Estimate:
    """MC estimate of the circuit probability mu^{r-}(Circ^{r+}(n, 2n)).

    The domain is the ball of radius ceil(rho * n) under r- boundary
    conditions; rho defaults to 4 in the CLI (any rho > 2 is meaningful).
    """
    from .bc import BLACK_MINUS
    from .loop_o2 import LoopParams, sample_percolations
    from .mcmc import LoopO2Chain, run_chain
    from .rng import make_rng

    if rho <= 2:
        raise ValueError("rho must exceed 2")
    domain = _hex_ball_cached(int(math.ceil(rho * n)))
    chain = LoopO2Chain(domain, LoopParams(2, x), BLACK_MINUS)
    rng = make_rng(chain_config.seed, chain_config.stream + 2000)

    def circ(pair):
        perc = sample_percolations(pair, rng.random(domain.n_y), x)
        plus = SitePerc.from_mask(domain, perc.black_mask & (perc.black_sign == 1))
        return float(circ_event(plus, n))

    records = run_chain(chain, chain_config, {"circ": circ})
    return mean_estimate([r.values["circ"] for r in records], block_size)


def _hex_ball_cached(radius: int) -> HexDomain:
    from .hexlattice import hex_ball
    return hex_ball(radius)


# ---------------------------------------------------------------------------
# Log fits


def fit_log_growth(points: Sequence[tuple[float, Estimate]]
                   ) -> tuple[float, float, tuple[float, float]]:
    """Weighted least squares of variance against log n.

    Returns (slope, intercept, 95% CI for the slope).  Weights are inverse
    squared standard errors (unweighted when any error bar vanishes).
    """
    if len({n for n, _ in points}) < 3:
        raise InsufficientPoints("need at least three distinct sizes")
    x = np.array([math.log(n) for n, _ in points])
    y = np.array([e.mean for _, e in points])
    se = np.array([e.std_error for _, e in points])
    w = np.ones_like(se) if np.any(se == 0) else 1.0 / se ** 2
    W = np.diag(w)
    X = np.column_stack([x, np.ones_like(x)])
    cov = np.linalg.inv(X.T @ W @ X)
    beta = cov @ X.T @ W @ y
    slope, intercept = float(beta[0]), float(beta[1])
    if np.any(se == 0):
        # fall back to residual-based errors for exact inputs
        resid = y - X @ beta
        dof = max(len(x) - 2, 1)
        sigma2 = float(resid @ resid) / dof
        slope_se = math.sqrt(sigma2 * cov[0, 0])
    else:
        slope_se = math.sqrt(cov[0, 0])
    ci = (slope - 1.96 * slope_se, slope + 1.96 * slope_se)
    return slope, intercept, ci
