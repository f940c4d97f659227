"""Observables: nesting counts, crossings, circuits, fits.

The circuit detector is validated against a brute-force simple-cycle search
with exact polygon containment (in an affine image of the lattice, which
preserves enclosure).
"""

import itertools
import math

import numpy as np
import pytest
from shapely.geometry import Point, Polygon

from latticeflow.enumeration import enumerate_exact, enumerate_lipschitz_zero
from latticeflow.errors import (InsufficientPoints, InsufficientSamples,
                                RhombusOutOfDomain)
from latticeflow.hexlattice import SitePerc, hex_ball, hex_ball_faces, y_tri
from latticeflow.loop_o2 import (LipschitzFn, LoopConfig, domain_wall,
                                 height_to_spins, loops_of_spins)
from latticeflow.observables import (Estimate, circ_event, circuit_surrounds,
                                     crossing_h, crossing_v, fit_log_growth,
                                     height_variance, loops_around,
                                     mean_estimate)
from latticeflow.planar import face_probe_point, site_probe_point
from latticeflow.rng import make_rng
from latticeflow.squarelattice import BondPerc, even_diamond

SQ2INV = 1.0 / math.sqrt(2)


def radial_height(domain, peak):
    return LipschitzFn(domain, {
        f: max(0, peak - max(abs(f[0]), abs(f[1]), abs(f[0] + f[1])))
        for f in domain.faces})


class TestLoopsAround:
    def test_empty(self):
        dom = hex_ball(2)
        assert loops_around(LoopConfig(dom, []), (0, 0)) == 0

    def test_single_hexagon(self):
        dom = hex_ball(2)
        omega = LoopConfig(dom, [e for e in dom.loop_edges if (0, 0) in e])
        assert loops_around(omega, (0, 0)) == 1
        # faces on the loop itself are not strictly inside
        assert loops_around(omega, (1, 0)) == 0
        assert loops_around(omega, (2, 0)) == 0

    def test_nested(self):
        dom = hex_ball(3)
        omega = loops_of_spins(height_to_spins(radial_height(dom, 2)))
        assert loops_around(omega, (0, 0)) == 2
        assert loops_around(omega, (1, 0)) == 1  # inside the outer loop only
        assert loops_around(omega, (2, 0)) == 0


class TestVarianceIdentity:
    @pytest.mark.parametrize("x", [0.6, SQ2INV, 1.0])
    def test_exact_variance_equals_loop_expectation(self, x):
        for radius in (1, 2):
            dom = hex_ball(radius)
            heights = enumerate_lipschitz_zero(dom)
            weights = np.array(
                [x ** len(domain_wall(dom, h.values)) for h in heights])
            probs = weights / weights.sum()
            center = dom.face_index[(0, 0)]
            values = np.array([h.values[center] for h in heights], dtype=float)
            var = float(probs @ values ** 2) - float(probs @ values) ** 2
            nesting = np.array([loops_around(
                loops_of_spins(height_to_spins(h)), (0, 0)) for h in heights])
            assert var == pytest.approx(float(probs @ nesting), abs=1e-12)
            if radius == 1:
                assert var == pytest.approx(2 * x ** 6 / (1 + 2 * x ** 6))

    def test_value_at_self_dual_point(self):
        dom = hex_ball(1)
        exact = enumerate_exact("loop-o2", dom, SQ2INV)
        center = dom.face_index[(0, 0)]
        mean = exact.expectation(lambda s: s[center])
        second = exact.expectation(lambda s: s[center] ** 2)
        assert second - mean ** 2 == pytest.approx(0.2)


class TestEstimates:
    def test_constant_samples(self):
        est = height_variance([3.0] * 50, block_size=10)
        assert est.mean == 0.0
        assert est.std_error == 0.0

    def test_mean_estimate_sanity(self):
        rng = make_rng(1)
        values = rng.normal(2.0, 1.0, size=4000)
        est = mean_estimate(values, block_size=100)
        assert abs(est.mean - 2.0) < 5 * est.std_error
        assert 0.005 < est.std_error < 0.05

    def test_insufficient(self):
        with pytest.raises(InsufficientSamples):
            height_variance([1.0])


class TestCrossings:
    def test_trivial_cases(self):
        dom = hex_ball(6)
        full = SitePerc(dom, [y for y in dom.y_vertices])
        assert crossing_h(full, 2)
        assert crossing_v(full, 2)
        empty = SitePerc(dom, [])
        assert not crossing_h(empty, 2)
        assert not crossing_v(empty, 2)

    def test_out_of_domain(self):
        dom = hex_ball(1)
        with pytest.raises(RhombusOutOfDomain):
            crossing_h(SitePerc(dom, []), 2)

    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
    def test_duality_xor(self, m):
        rng = make_rng(17 + m)
        sites = [(k, l) for k in range(-m, m + 1) for l in range(-m, m + 1)]
        for _ in range(200):
            mask = rng.random(len(sites)) < rng.random()
            xi = {s for s, b in zip(sites, mask) if b}
            dual = {s for s in sites if s not in xi}
            assert crossing_h(xi, m) != crossing_v(dual, m)


def site_position(y):
    return (3 * y[0], 3 * y[1])


def brute_force_circuit(open_sites, allowed, inner_faces):
    """Oracle: search simple cycles enclosing every inner face centre."""
    usable = sorted(open_sites & allowed)
    adj = {y: [z for dk, dl in ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))
               for z in [(y[0] + dk, y[1] + dl)] if z in set(usable)]
           for y in usable}
    probes = [Point(face_probe_point(f)) for f in sorted(inner_faces)]

    def encloses_all(cycle):
        poly = Polygon([site_position(y) for y in cycle])
        return all(poly.contains(p) for p in probes)

    sys_found = False
    for start in usable:
        stack = [(start, [start])]
        while stack:
            y, path = stack.pop()
            for z in adj[y]:
                if z == start and len(path) >= 3:
                    if encloses_all(path):
                        return True
                elif z not in path and z > start:
                    stack.append((z, path + [z]))
    return sys_found


class TestCircuits:
    def test_triangle_surrounds_face(self):
        dom = hex_ball(3)
        xi = SitePerc(dom, [(0, 0), (0, 1), (-1, 1)])
        assert circuit_surrounds(xi, (0, 0))
        assert not circuit_surrounds(xi, (1, 0))
        assert not circuit_surrounds(SitePerc(dom, []), (0, 0))

    def test_bond_circuit_surrounds(self):
        dom = even_diamond(3)
        mask = np.zeros(dom.n_vertices, dtype=bool)
        for v in [(0, 0), (-1, 0), (0, -1), (-1, -1)]:
            mask[dom.vertex_index[v]] = True
        xi = BondPerc(dom, "white", mask)
        assert circuit_surrounds(xi, (0, 0))
        assert not circuit_surrounds(xi, (2, 0))

    def test_full_and_empty(self):
        dom = hex_ball(5)
        full = SitePerc(dom, dom.y_vertices)
        assert circ_event(full, 1)
        empty = SitePerc(dom, [])
        assert not circ_event(empty, 1)

    @pytest.mark.parametrize("n,configs,density", [(1, 60, 0.55), (2, 12, 0.45)])
    def test_against_brute_force(self, n, configs, density):
        outer = hex_ball_faces(2 * n)
        inner = hex_ball_faces(n)
        from latticeflow.hexlattice import face_up_vertices
        allowed = {y for f in outer for y in face_up_vertices(f)
                   if all(g in outer for g in y_tri(y))}
        rng = make_rng(100 + n)
        agreements = 0
        for _ in range(configs):
            sites = sorted(allowed)
            mask = rng.random(len(sites)) < density
            xi = {s for s, b in zip(sites, mask) if b}
            fast = circ_event(xi, n)
            slow = brute_force_circuit(xi, allowed, inner)
            assert fast == slow
            agreements += 1
        assert agreements == configs


class TestLogFit:
    def test_exact_line(self):
        points = [(n, Estimate(2 * math.log(n), 0.0, 10)) for n in (4, 8, 16, 32)]
        slope, intercept, ci = fit_log_growth(points)
        assert slope == pytest.approx(2.0, abs=1e-12)
        assert intercept == pytest.approx(0.0, abs=1e-12)

    def test_constant_has_zero_in_ci(self):
        points = [(n, Estimate(1.0, 0.1, 10)) for n in (4, 8, 16, 32)]
        slope, _, (lo, hi) = fit_log_growth(points)
        assert lo <= 0.0 <= hi

    def test_insufficient_points(self):
        with pytest.raises(InsufficientPoints):
            fit_log_growth([(4, Estimate(1, 0.1, 5)), (8, Estimate(2, 0.1, 5))])
