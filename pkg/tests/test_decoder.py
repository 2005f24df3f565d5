import math
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from leakqec.code_sim import ChainLayout, NoiseParams, Schedule, run_experiment
from leakqec.correlation import detection_events
from leakqec.decoder import (
    MatchingGraph,
    build_graph,
    build_graph_analytic,
    decode_dataset,
    enumerate_placements,
    eps_from_p_logical,
    lambda_fit,
    logical_error_rate,
    mwpm,
    p_logical_from_eps,
    subsample,
)


def brute_force_weight(dist_to_bnd, dmat):
    """Exhaustive minimum over all pairings with optional boundary exits."""
    F = len(dist_to_bnd)

    @lru_cache(maxsize=None)
    def best(mask):
        if mask == 0:
            return 0.0
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        out = dist_to_bnd[i] + best(rest)
        mm = rest
        while mm:
            j = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            out = min(out, dmat[i][j] + best(rest & ~(1 << j)))
        return out

    return best((1 << F) - 1)


@pytest.fixture(scope="module")
def graph():
    layout = ChainLayout(9)
    noise = NoiseParams(
        p_flip_idle=0.01, p_flip_gate=0.004, p_relax=0.02,
        readout_confusion=((0.98, 0.02, 0), (0.02, 0.98, 0), (0, 0, 1)),
    )
    return build_graph_analytic(layout, 10, noise)


class TestGraphConstruction:
    def test_weight_formula(self):
        layout = ChainLayout(5)
        noise = NoiseParams(p_flip_idle=0.01)
        g = build_graph_analytic(layout, 4, noise)
        a, b = g.node_index((0, 2)), g.node_index((1, 2))
        w, label = g.edges[(min(a, b), max(a, b))]
        assert w == pytest.approx(-math.log(0.01 / 0.99), abs=1e-12)
        assert label == frozenset({1})

    def test_log_odds_value(self):
        layout = ChainLayout(5)
        g = build_graph_analytic(layout, 3, NoiseParams(p_flip_idle=0.01))
        # w(p=0.01) = ln(99)
        some_w = next(iter(g.edges.values()))[0]
        assert some_w == pytest.approx(math.log(99), abs=1e-12)

    def test_empty_graph_rejected(self):
        with pytest.raises(ValueError):
            build_graph_analytic(ChainLayout(5), 3, NoiseParams())

    def test_every_node_reaches_boundary(self, graph):
        B = graph.boundary_index
        for idx in range(graph.n_nodes):
            assert np.isfinite(graph.distance(idx, B))

    def test_pij_graph_keeps_only_local_edges_without_leakage(self):
        layout = ChainLayout(21)
        noise = NoiseParams(
            p_flip_idle=0.008, p_flip_gate=0.003,
            readout_confusion=((0.98, 0.02, 0), (0.02, 0.98, 0), (0, 0, 1)),
        )
        ds = run_experiment(layout, noise, Schedule(n_rounds=20), 10, 3000, 71)
        det = detection_events(ds)
        g = build_graph(det, layout, 20)
        for (a, b), _ in g.edges.items():
            (m_a, r_a), (m_b, r_b) = g.index_node(a), g.index_node(b)
            assert abs(m_a - m_b) <= 1
            assert abs(r_a - r_b) <= 1

    def test_terminal_flag_mismatch_rejected(self):
        layout = ChainLayout(9)
        ds = run_experiment(
            layout, NoiseParams(p_flip_idle=0.02), Schedule(n_rounds=5), 2, 50, 3
        )
        det = detection_events(ds, include_terminal=False)
        with pytest.raises(ValueError):
            build_graph(det, layout, 5, include_terminal=True)


class TestMwpm:
    def test_no_events_empty_outcome(self, graph):
        out = mwpm(np.zeros(graph.n_nodes, dtype=bool), graph)
        assert out.matched_pairs == ()
        assert out.weight == 0.0
        assert out.data_flips == frozenset()

    def test_adjacent_round_pair_matched_without_correction(self, graph):
        ev = np.zeros(graph.n_nodes, dtype=bool)
        a, b = graph.node_index((2, 4)), graph.node_index((2, 5))
        ev[[a, b]] = True
        out = mwpm(ev, graph)
        assert out.matched_pairs == ((a, b),)
        assert out.data_flips == frozenset()

    def test_same_round_pair_flips_spanned_data(self, graph):
        ev = np.zeros(graph.n_nodes, dtype=bool)
        a, b = graph.node_index((1, 4)), graph.node_index((2, 4))
        ev[[a, b]] = True
        out = mwpm(ev, graph)
        assert out.data_flips == frozenset({2})

    def test_matches_brute_force_on_random_instances(self, graph):
        rng = np.random.default_rng(2024)
        B = graph.boundary_index
        worst = 0.0
        for _ in range(1000):
            F = int(rng.integers(1, 11))
            flagged = rng.choice(graph.n_nodes, size=F, replace=False)
            ev = np.zeros(graph.n_nodes, dtype=bool)
            ev[flagged] = True
            out = mwpm(ev, graph)
            d_b = tuple(graph.distance(int(v), B) for v in flagged)
            dm = tuple(
                tuple(graph.distance(int(u), int(v)) for v in flagged)
                for u in flagged
            )
            worst = max(worst, abs(out.weight - brute_force_weight(d_b, dm)))
        assert worst < 1e-9

    def test_uniform_weight_shift_keeps_matching(self):
        # every matching covers all F flagged nodes exactly once, so adding
        # 2c to each pair cost and c to each boundary cost shifts every
        # matching's total by F*c and cannot change the argmin
        import leakqec.decoder as D

        rng = np.random.default_rng(5)
        for trial in range(50):
            F = int(rng.integers(3, 9))
            members = list(range(F))
            w = rng.uniform(1.0, 10.0, size=(F, F))
            dmat = (w + w.T) / 2
            np.fill_diagonal(dmat, 0.0)
            d_bnd = rng.uniform(0.5, 8.0, size=F)
            c = float(rng.uniform(0.1, 5.0))
            pairs_a, w_a = D._blossom_match(members, dmat, d_bnd)
            pairs_b, w_b = D._blossom_match(members, dmat + 2 * c, d_bnd + c)
            assert {frozenset(p) for p in pairs_a} == {
                frozenset(p) for p in pairs_b
            }
            assert w_b == pytest.approx(w_a + F * c, rel=1e-12)

    def test_wrong_event_vector_size(self, graph):
        with pytest.raises(ValueError):
            mwpm(np.zeros(7, dtype=bool), graph)


class TestEpsConversion:
    def test_endpoints(self):
        assert eps_from_p_logical(0.0, 30) == 0.0
        assert eps_from_p_logical(0.5, 30) == pytest.approx(0.5, abs=1e-12)

    def test_reference_value(self):
        assert eps_from_p_logical(0.1, 30) == pytest.approx(3.7053e-3, abs=1e-7)

    def test_above_half_is_nan(self):
        assert math.isnan(eps_from_p_logical(0.51, 10))

    @given(
        p=st.floats(0.0, 0.499),
        k=st.sampled_from([1, 5, 10, 30, 100]),
    )
    @settings(max_examples=200, deadline=None)
    def test_round_trip(self, p, k):
        eps = eps_from_p_logical(p, k)
        assert abs(p_logical_from_eps(eps, k) - p) < 1e-12

    def test_invalid_k(self):
        with pytest.raises(ValueError):
            eps_from_p_logical(0.1, 0)


class TestEndToEnd:
    def test_zero_noise_decodes_to_zero_errors(self):
        layout = ChainLayout(21)
        quiet = NoiseParams()
        graph_noise = NoiseParams(
            p_flip_idle=0.01,
            readout_confusion=((0.99, 0.01, 0), (0.01, 0.99, 0), (0, 0, 1)),
        )
        ds = run_experiment(layout, quiet, Schedule(n_rounds=10), 5, 40, 1)
        g = build_graph_analytic(layout, 10, graph_noise)
        p_l, eps = logical_error_rate(ds, g)
        assert p_l == 0.0
        assert eps == 0.0

    def test_monotone_suppression_without_leakage(self):
        layout = ChainLayout(21)
        noise = NoiseParams(
            p_flip_idle=0.015, p_flip_gate=0.005,
            readout_confusion=((0.97, 0.03, 0), (0.03, 0.97, 0), (0, 0, 1)),
        )
        ds = run_experiment(layout, noise, Schedule(n_rounds=10), 10, 1500, 12)
        eps_by = {}
        for size in (9, 13, 17, 21):
            sub = subsample(ds, 0, size)
            det = detection_events(sub)
            g = build_graph(det, sub.layout, 10)
            eps_by[size] = decode_dataset(sub, g, det).eps
        vals = [eps_by[s] for s in (9, 13, 17, 21)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


@pytest.fixture(scope="module")
def subsample_dataset():
    layout = ChainLayout(21)
    noise = NoiseParams(p_flip_idle=0.02)
    return run_experiment(layout, noise, Schedule(n_rounds=6), 4, 25, 31)


class TestSubsample:
    @pytest.fixture
    def dataset(self, subsample_dataset):
        return subsample_dataset

    def test_full_chain_is_identity(self, dataset):
        sub = subsample(dataset, 0, 21)
        assert np.array_equal(sub.outcomes, dataset.outcomes)
        assert np.array_equal(sub.initial_bits, dataset.initial_bits)
        assert sub.layout == dataset.layout

    def test_placement_counts(self):
        for size, expect in ((5, 5), (9, 4), (13, 3), (17, 2), (21, 1)):
            assert len(enumerate_placements(21, size)) == expect

    def test_columns_align_with_parent(self, dataset):
        sub = subsample(dataset, 4, 9)
        assert np.array_equal(sub.outcomes, dataset.outcomes[:, :, 2:6])
        assert np.array_equal(sub.initial_bits, dataset.initial_bits[:, 2:7])

    def test_invalid_geometry(self, dataset):
        with pytest.raises(ValueError):
            subsample(dataset, 1, 9)
        with pytest.raises(ValueError):
            subsample(dataset, 16, 9)
        with pytest.raises(ValueError):
            subsample(dataset, 0, 7)


class TestLambdaFit:
    def test_exact_exponential_recovered(self):
        eps = {s: 0.2 * 2.8 ** -((s - 1) / 4 + 1) for s in (5, 9, 13, 17, 21)}
        fit = lambda_fit(eps)
        assert fit.lam == pytest.approx(2.8, abs=1e-6)
        assert fit.excluded_sizes == (5,)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_two_point_fit_equals_ratio(self):
        eps = {9: 4e-3, 13: 1.6e-3}
        fit = lambda_fit(eps)
        assert fit.lam == pytest.approx(4e-3 / 1.6e-3, rel=1e-12)

    def test_five_qubit_point_never_fit(self):
        eps = {5: 0.5, 9: 4e-3, 13: 2e-3, 17: 1e-3}
        fit = lambda_fit(eps)
        assert 5 in fit.excluded_sizes
        assert fit.lam == pytest.approx(2.0, rel=0.2)

    def test_all_zero_eps_rejected(self):
        with pytest.raises(ValueError):
            lambda_fit({9: 0.0, 13: 0.0, 17: 0.0})
