"""Six-vertex model: heights, spins, weights, percolations, circuits.

Expected values for the 3x3 domain are frozen from the recursive height
enumeration oracle ``all_homs`` (two states: flat centre and flipped centre).
"""

import numpy as np
import pytest

from latticeflow.errors import IceRuleViolated, NotRepresentable
from latticeflow.rng import make_rng
from latticeflow.six_vertex import (GraphHom, SixVParams, SpinPair6V,
                                    edge_orientation,
                                    explore_alternating_circuits,
                                    height_to_spins_6v, hom_weight,
                                    sample_percolations_6v, spin_weight_6v,
                                    spins_to_height_6v, type_counts,
                                    vertex_type)
from latticeflow.squarelattice import (BondPerc, SquareDomain, even_diamond,
                                       is_black, square_block, t_neighbors)


def all_homs(domain):
    """Oracle: enumerate the {0,1}-boundary graph homomorphisms recursively."""
    squares = list(domain.squares)
    order = sorted(range(len(squares)),
                   key=lambda i: (not domain.boundary_mask[i], squares[i]))
    values = {}
    out = []

    def assign(pos):
        if pos == len(order):
            out.append(GraphHom(domain, dict(values)))
            return
        i = order[pos]
        s = squares[i]
        if domain.boundary_mask[i]:
            choices = [(s[0] + s[1]) % 2]
        else:
            allowed = None
            for t, v in values.items():
                if abs(t[0] - s[0]) + abs(t[1] - s[1]) == 1:
                    cand = {v - 1, v + 1}
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


def three_by_three():
    """3x3 block whose centre square is white (coordinate sum odd)."""
    return square_block(3, 3, origin=(1, 0))


class TestDomains:
    def test_three_by_three_structure(self):
        dom = three_by_three()
        assert dom.n_squares == 9
        assert dom.n_vertices == 4
        assert not is_black((2, 1))
        assert not dom.even_domain  # edge-boundary squares include white ones
        # only the centre square avoids the boundary cycle
        assert set(dom.boundary_faces) == set(dom.squares) - {(2, 1)}

    def test_bijections_d_black_d_white(self):
        dom = even_diamond(2)
        n = dom.n_vertices
        black_edges = {tuple(p) for p in dom.black_pairs.tolist()}
        white_edges = {tuple(p) for p in dom.white_pairs.tolist()}
        assert len(black_edges) == n
        assert len(white_edges) == n

    def test_even_domain_flag(self):
        assert even_diamond(2).even_domain
        assert not square_block(3, 3).even_domain
        # single black square: even domain with no interior vertices
        single = SquareDomain([(0, 0)])
        assert single.even_domain
        assert single.n_vertices == 0
        # diamond around a white square: 1 white + 4 black edge-neighbours
        plus = SquareDomain([(1, 0), (0, 0), (2, 0), (1, 1), (1, -1)])
        assert plus.even_domain

    def test_t_neighbors(self):
        assert set(t_neighbors((0, 0))) == {(1, 1), (1, -1), (-1, 1), (-1, -1),
                                            (2, 0), (-2, 0)}
        base = set(t_neighbors((0, 0)))
        assert set(t_neighbors((1, 0))) == {(1 + i, j) for i, j in base}
        for s in [(0, 0), (1, 0), (3, 2)]:
            assert all(is_black(t) == is_black(s) for t in t_neighbors(s))


class TestHeights:
    def test_three_by_three_enumeration(self):
        dom = three_by_three()
        homs = all_homs(dom)
        assert len(homs) == 2
        centers = sorted(h[(2, 1)] for h in homs)
        assert centers == [-1, 1]

    def test_vertex_types_flat_and_flipped(self):
        dom = three_by_three()
        flat = GraphHom(dom, {s: (s[0] + s[1]) % 2 for s in dom.squares})
        for v in dom.interior_vertices:
            assert vertex_type(flat, v)[0] == "c"
        flipped_vals = {s: (s[0] + s[1]) % 2 for s in dom.squares}
        flipped_vals[(2, 1)] = -1
        flipped = GraphHom(dom, flipped_vals)
        letters = sorted(vertex_type(flipped, v)[0] for v in dom.interior_vertices)
        assert letters == ["a", "a", "b", "b"]

    def test_type_counts_total(self):
        dom = even_diamond(2)
        for h in all_homs(dom):
            counts = type_counts(h)
            assert sum(counts.values()) == dom.n_vertices

    def test_hom_weight_examples(self):
        dom = three_by_three()
        a, b, c = 1.3, 0.8, 1.9
        params = SixVParams(a, b, c)
        flat, flipped = sorted(all_homs(dom), key=lambda h: -h[(2, 1)])
        assert hom_weight(flat, params) == pytest.approx(c ** 4)
        assert hom_weight(flipped, params) == pytest.approx(a * a * b * b)
        single = SquareDomain([(0, 0)])
        h0 = GraphHom(single, {(0, 0): 0})
        assert hom_weight(h0, params) == 1.0


class TestSpinMaps:
    def test_simple_classes(self):
        dom = three_by_three()
        h = GraphHom(dom, {s: (s[0] + s[1]) % 2 for s in dom.squares})
        pair = height_to_spins_6v(h)
        assert np.all(pair.sigma_black[dom.black_mask] == 1)
        assert np.all(pair.sigma_white[~dom.black_mask] == 1)

    def test_center_minus_one_is_white_minus(self):
        dom = three_by_three()
        vals = {s: (s[0] + s[1]) % 2 for s in dom.squares}
        vals[(2, 1)] = -1
        pair = height_to_spins_6v(GraphHom(dom, vals))
        assert pair.sigma_white[dom.square_index[(2, 1)]] == -1

    @pytest.mark.parametrize("builder", [three_by_three, lambda: even_diamond(2)])
    def test_round_trip(self, builder):
        dom = builder()
        for h in all_homs(dom):
            assert spins_to_height_6v(height_to_spins_6v(h)) == h

    def test_ice_rule_required(self):
        dom = three_by_three()
        black = np.ones(dom.n_squares, dtype=np.int8)
        white = np.ones(dom.n_squares, dtype=np.int8)
        # make both diagonals disagree at vertex (1, 0):
        # black pair {(2,0), (1,1)}, white pair {(1,0), (2,1)}
        black[dom.square_index[(2, 0)]] = -1
        white[dom.square_index[(1, 0)]] = -1
        pair = SpinPair6V(dom, black, white)
        assert not pair.satisfies_ice_rule()
        with pytest.raises(IceRuleViolated):
            spins_to_height_6v(pair)

    def test_non_plus_boundary_not_representable(self):
        dom = three_by_three()
        black = np.ones(dom.n_squares, dtype=np.int8)
        white = np.ones(dom.n_squares, dtype=np.int8)
        black[dom.square_index[(1, 1)]] = -1  # boundary black square
        pair = SpinPair6V(dom, black, white)
        assert pair.satisfies_ice_rule()
        with pytest.raises(NotRepresentable):
            spins_to_height_6v(pair)

    def test_weight_transport(self):
        dom = even_diamond(2)
        params = SixVParams(1.1, 0.9, 1.7)
        homs = all_homs(dom)
        weights_h = np.array([hom_weight(h, params) for h in homs])
        weights_s = np.array(
            [spin_weight_6v(height_to_spins_6v(h), params) for h in homs])
        # spin weight = hom weight / c^{#vertices}: identical ratios
        ratios = weights_h / weights_s
        assert np.allclose(ratios, ratios[0])
        # explicit ratio example on the 3x3 domain
        dom3 = three_by_three()
        flat, flipped = sorted(all_homs(dom3), key=lambda h: -h[(2, 1)])
        r = (spin_weight_6v(height_to_spins_6v(flipped), params)
             / spin_weight_6v(height_to_spins_6v(flat), params))
        a, b, c = params.a, params.b, params.c
        assert r == pytest.approx(a * a * b * b / c ** 4)


class TestPercolations:
    def test_forced_and_threshold_cases(self):
        dom = three_by_three()
        params = SixVParams(1.0, 1.4, 2.0)  # a/c = 0.5, b/c = 0.7
        vals = {s: (s[0] + s[1]) % 2 for s in dom.squares}
        flat = height_to_spins_6v(GraphHom(dom, vals))
        k = {v: i for i, v in enumerate(dom.interior_vertices)}
        u = np.full(dom.n_vertices, 0.4)
        perc = sample_percolations_6v(flat, u, params)
        # all four vertices agree-agree; u=0.4: E_a black: <= 0.5 opens black,
        # > 1-0.7 = 0.3 opens white (both open)
        for v, idx in k.items():
            if dom.black_in_a[idx]:
                assert perc.black_mask[idx] and perc.white_mask[idx]
            else:
                # E_b black: thresholds 0.7 and 1-0.5=0.5
                assert perc.black_mask[idx] and not perc.white_mask[idx]

        vals[(2, 1)] = -1
        flipped = height_to_spins_6v(GraphHom(dom, vals))
        perc2 = sample_percolations_6v(flipped, u, params)
        # white diagonal disagrees everywhere: black forced open
        assert np.all(perc2.black_mask)
        assert not np.any(perc2.white_mask)

    @pytest.mark.parametrize("params", [SixVParams(1, 1, 1.5),
                                        SixVParams(1, 0.8, 1.6),
                                        SixVParams(1, 1, 2.0)])
    def test_super_duality_in_regime(self, params):
        dom = even_diamond(2)
        rng = make_rng(21)
        for h in all_homs(dom)[::3]:
            pair = height_to_spins_6v(h)
            for _ in range(4):
                perc = sample_percolations_6v(pair, rng.random(dom.n_vertices),
                                              params)
                assert perc.covers_all()

    def test_super_duality_fails_when_c_large(self):
        dom = even_diamond(2)
        params = SixVParams(1, 1, 2.4)  # c = 1.2 (a+b)
        rng = make_rng(22)
        h = all_homs(dom)[0]
        pair = height_to_spins_6v(h)
        violations = 0
        for _ in range(200):
            perc = sample_percolations_6v(pair, rng.random(dom.n_vertices), params)
            violations += not perc.covers_all()
        assert violations > 0

    def test_duality_is_complement(self):
        dom = even_diamond(2)
        rng = make_rng(23)
        mask = rng.random(dom.n_vertices) < 0.5
        xi = BondPerc(dom, "black", mask)
        assert np.array_equal(xi.dual().mask, ~mask)
        assert xi.dual().dual() == xi


class TestOrientations:
    def test_flat_and_shift_invariance(self):
        dom = three_by_three()
        vals = {s: (s[0] + s[1]) % 2 for s in dom.squares}
        h = GraphHom(dom, vals)
        ori = edge_orientation(h)
        h2 = GraphHom(dom, {s: v + 2 for s, v in vals.items()})
        assert edge_orientation(h2) == ori

    def test_two_in_two_out(self):
        dom = even_diamond(2)
        for h in all_homs(dom):
            ori = edge_orientation(h)
            for v in dom.interior_vertices:
                i, j = v
                incident = []
                for p, q in [((i, j - 1), (i, j)), ((i, j), (i, j + 1)),
                             ((i - 1, j), (i, j)), ((i, j), (i + 1, j))]:
                    key = (p, q)
                    if key in ori:
                        # +1 means oriented p -> q; count arrows INTO v
                        into = (ori[key] == 1) == (q == v)
                        incident.append(into)
                assert len(incident) == 4
                assert sum(incident) == 2

    def test_orientation_determines_height_up_to_constant(self):
        dom = even_diamond(2)
        homs = all_homs(dom)
        seen = {}
        for h in homs:
            key = tuple(sorted(edge_orientation(h).items()))
            diffs = h.values - homs[0].values
            if key in seen:
                assert np.ptp(h.values - seen[key]) == 0
            seen[key] = h.values.copy()
        # distinct heights not differing by a constant give distinct maps
        normalized = {tuple((h.values - h.values[0]).tolist()) for h in homs}
        assert len(seen) == len(normalized)


class TestCircuits:
    def test_empty_percolations_no_circuit(self):
        dom = even_diamond(3)
        empty_b = BondPerc(dom, "black", np.zeros(dom.n_vertices, dtype=bool))
        empty_w = BondPerc(dom, "white", np.zeros(dom.n_vertices, dtype=bool))
        n, circuits = explore_alternating_circuits(empty_b, empty_w, (0, 0))
        # target (0,0) is black; white has no circuit, so exploration ends
        # immediately with no recorded circuit
        assert n == 0
        assert circuits == []

    def test_single_white_diamond_circuit(self):
        dom = even_diamond(3)
        # open the four white edges forming the diamond around (0, 0)
        mask = np.zeros(dom.n_vertices, dtype=bool)
        for v in [(0, 0), (-1, 0), (0, -1), (-1, -1)]:
            mask[dom.vertex_index[v]] = True
        xi_w = BondPerc(dom, "white", mask)
        xi_b = BondPerc(dom, "black", np.zeros(dom.n_vertices, dtype=bool))
        n, circuits = explore_alternating_circuits(xi_b, xi_w, (0, 0))
        assert n == 2
        color1, c1 = circuits[0]
        assert color1 == "white" and c1 is not None
        assert c1.nodes == {(1, 0), (-1, 0), (0, 1), (0, -1)}
        assert c1.interior == {(0, 0)}
        # black target inside: degenerate black circuit terminates
        assert circuits[1] == ("black", None)

    def test_circuit_through_target(self):
        dom = even_diamond(3)
        mask = np.zeros(dom.n_vertices, dtype=bool)
        for v in [(0, 0), (-1, 0), (0, -1), (-1, -1)]:
            mask[dom.vertex_index[v]] = True
        xi_w = BondPerc(dom, "white", mask)
        xi_b = BondPerc(dom, "black", np.zeros(dom.n_vertices, dtype=bool))
        n, circuits = explore_alternating_circuits(xi_b, xi_w, (1, 0))
        assert n == 1
        assert circuits[0][1].through_target
