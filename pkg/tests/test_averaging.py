"""Tests for gossip averaging and the girth-cost study."""

import numpy as np
import pytest

from sumrecon.averaging import (
    CONVERGE_CSV_HEADER,
    AveragingState,
    ConvergenceRecord,
    init_state,
    run_convergence_study,
    run_to_convergence,
    step,
    value_gap,
    write_converge_csv,
    write_plot_data,
)
from sumrecon.graphs import Graph, erdos_renyi


class FakeRng:
    """Deterministic stand-in that always wakes the same node."""

    def __init__(self, node):
        self.node = node

    def integers(self, n):
        assert self.node < n
        return self.node


def pair_state(a=0.0, b=50.0):
    return AveragingState(Graph(2, [(0, 1)]), [a, b])


def connected(graph):
    seen = {0}
    stack = [0]
    while stack:
        for w in graph.neighbours(stack.pop()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == graph.node_count


def naive_run(state, rng, threshold=1.0, cap=10**6):
    """Full-rescan reference for the incremental spread tracking."""
    count = 0
    while max(state.values) - min(state.values) > threshold:
        if count == cap:
            return None
        v = int(rng.integers(state.graph.node_count))
        nbrs = sorted(state.graph.neighbours(v))
        if nbrs:
            total = state.values[v] + sum(state.values[u] for u in nbrs)
            state.values[v] = total / (len(nbrs) + 1)
        state.rounds += 1
        count += 1
    return count


class TestState:
    def test_value_count_must_match(self):
        with pytest.raises(ValueError, match="3 values for 2 nodes"):
            AveragingState(Graph(2, [(0, 1)]), [1.0, 2.0, 3.0])

    def test_initial_values_are_integers_in_range(self):
        rng = np.random.default_rng(0)
        state = init_state(erdos_renyi(40, 0.2, rng), rng)
        assert len(state.values) == 40
        assert all(0 <= x <= 50 and x == int(x) for x in state.values)
        assert state.rounds == 0

    def test_seeded_determinism(self):
        g = Graph(10, [(i, i + 1) for i in range(9)])
        a = init_state(g, np.random.default_rng(4))
        b = init_state(g, np.random.default_rng(4))
        assert a.values == b.values

    def test_sample_mean_matches_the_uniform_distribution(self):
        # uniform on 0..50: mean 25, variance (51^2 - 1)/12
        g = Graph(50, [])
        draws = []
        for seed in range(1000):
            draws.extend(init_state(g, np.random.default_rng(seed)).values)
        sigma = np.sqrt((51**2 - 1) / 12 / len(draws))
        assert abs(np.mean(draws) - 25) < 5 * sigma


class TestStep:
    def test_star_centre_with_symmetric_values_stays_put(self):
        star = Graph(4, [(0, 1), (0, 2), (0, 3)])
        state = AveragingState(star, [25.0, 0.0, 50.0, 25.0])
        assert step(state, FakeRng(0)) == 0
        assert state.values == [25.0, 0.0, 50.0, 25.0]
        assert state.rounds == 1

    def test_either_end_of_an_edge_moves_to_the_midpoint(self):
        for node in (0, 1):
            state = pair_state()
            step(state, FakeRng(node))
            assert state.values[node] == 25.0
            assert state.values[1 - node] == (0.0, 50.0)[1 - node]

    def test_equal_values_are_a_fixed_point(self):
        rng = np.random.default_rng(2)
        state = AveragingState(erdos_renyi(9, 0.4, rng), [7.0] * 9)
        for _ in range(200):
            step(state, rng)
        assert state.values == [7.0] * 9
        assert state.rounds == 200

    def test_isolated_node_is_a_noop_but_still_counts(self):
        g = Graph(3, [(0, 1)])
        state = AveragingState(g, [0.0, 50.0, 13.0])
        step(state, FakeRng(2))
        assert state.values == [0.0, 50.0, 13.0]
        assert state.rounds == 1

    def test_extremes_contract(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            g = erdos_renyi(8, 0.45, rng)
            state = init_state(g, rng)
            for _ in range(100):
                lo, hi = min(state.values), max(state.values)
                step(state, rng)
                assert min(state.values) >= lo
                assert max(state.values) <= hi


class TestRunToConvergence:
    def test_already_converged_takes_no_rounds(self):
        state = AveragingState(Graph(3, [(0, 1), (1, 2)]), [5.0, 5.5, 5.0])
        assert run_to_convergence(state, np.random.default_rng(0)) == 0
        assert state.rounds == 0

    def test_single_edge_halves_the_gap_every_round(self):
        # every update moves one endpoint to the midpoint, so the gap
        # is 50/2^r after r rounds whatever the schedule; the first
        # value at most 1 is reached at r = 6
        gap, hand_count = 50.0, 0
        while gap > 1:
            gap /= 2
            hand_count += 1
        assert hand_count == 6
        for seed in range(5):
            state = pair_state()
            rounds = run_to_convergence(state, np.random.default_rng(seed))
            assert rounds == hand_count
            assert value_gap(state) == 50 / 2**6

    def test_threshold_is_honoured(self):
        state = pair_state()
        assert run_to_convergence(state, FakeRng(0), threshold=30.0) == 1

    def test_cap_must_be_positive(self):
        with pytest.raises(ValueError, match="cap"):
            run_to_convergence(pair_state(), FakeRng(0), cap=0)

    def test_unequal_disconnected_components_never_converge(self):
        state = AveragingState(Graph(2, []), [0.0, 50.0])
        assert run_to_convergence(state, np.random.default_rng(0), cap=500) is None
        assert state.rounds == 500

    def test_matches_the_full_rescan_reference(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            g = erdos_renyi(int(rng.integers(4, 11)), 0.5, rng)
            init = [float(x) for x in rng.integers(0, 51, size=g.node_count)]
            seed = int(rng.integers(2**32))
            fast = AveragingState(g, list(init))
            slow = AveragingState(g, list(init))
            got = run_to_convergence(fast, np.random.default_rng(seed), cap=3000)
            want = naive_run(slow, np.random.default_rng(seed), cap=3000)
            assert got == want
            assert fast.values == slow.values
            assert fast.rounds == slow.rounds

    def test_connected_graphs_converge(self):
        rng = np.random.default_rng(9)
        done = 0
        while done < 30:
            g = erdos_renyi(12, 0.3, rng)
            if not connected(g):
                continue
            state = init_state(g, rng)
            rounds = run_to_convergence(state, rng, cap=10**5)
            assert rounds is not None
            assert value_gap(state) <= 1
            done += 1


class TestRecord:
    def test_aggregates(self):
        rec = ConvergenceRecord(0.5, 7, rounds=(10, 20, None, 30), seed=3)
        assert rec.reps == 4
        assert rec.cap_exceeded == 1
        assert rec.mean_rounds == 20.0
        assert rec.stddev_rounds == 10.0

    def test_all_capped_has_no_mean(self):
        rec = ConvergenceRecord(0.5, 7, rounds=(None, None))
        assert rec.mean_rounds is None
        assert rec.stddev_rounds is None
        assert rec.cap_exceeded == 2


class TestStudy:
    def test_cells_cover_every_probability_and_girth(self):
        recs = run_convergence_study(
            node_count=10,
            edge_probabilities=(0.4, 0.7),
            girths=(4, 3),
            reps=3,
            cap=10**5,
            seed=5,
        )
        assert [(r.edge_probability, r.girth) for r in recs] == [
            (0.4, 3),
            (0.4, 4),
            (0.7, 3),
            (0.7, 4),
        ]
        for rec in recs:
            assert rec.reps == 3
            assert rec.cap_exceeded == 0
            assert rec.seed == 5

    def test_girth_targets_below_three_are_rejected(self):
        with pytest.raises(ValueError, match="girth"):
            run_convergence_study(node_count=6, girths=(2, 3), reps=1)

    def test_sparse_probabilities_report_their_redraws(self):
        recs = run_convergence_study(
            node_count=8,
            edge_probabilities=(0.08,),
            girths=(3,),
            reps=3,
            cap=10**4,
            seed=0,
        )
        assert recs[0].resamples > 0

    def test_worker_count_never_changes_the_output(self, tmp_path):
        kwargs = dict(
            node_count=10,
            edge_probabilities=(0.3, 0.6),
            girths=(3, 4),
            reps=3,
            cap=10**5,
            seed=2,
        )
        serial = run_convergence_study(workers=1, **kwargs)
        parallel = run_convergence_study(workers=2, **kwargs)
        assert serial == parallel
        write_converge_csv(serial, tmp_path / "a.csv")
        write_converge_csv(parallel, tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_tiny_cap_is_reported_not_averaged(self, tmp_path):
        recs = run_convergence_study(
            node_count=12,
            edge_probabilities=(0.4,),
            girths=(3,),
            reps=2,
            cap=5,
            seed=0,
        )
        assert recs[0].cap_exceeded == 2
        assert recs[0].mean_rounds is None
        write_converge_csv(recs, tmp_path / "c.csv")
        body = (tmp_path / "c.csv").read_text()
        assert "NA,NA,2,0" in body


class TestCsv:
    def test_header_and_layout(self, tmp_path):
        recs = [
            ConvergenceRecord(0.1, 3, rounds=(100, 110), seed=9),
            ConvergenceRecord(0.1, 7, rounds=(None, None), seed=9),
        ]
        path = tmp_path / "conv.csv"
        write_converge_csv(recs, path)
        lines = path.read_text().splitlines()
        assert lines[0] == CONVERGE_CSV_HEADER
        assert lines[1] == "0.1,3,2,105.0,7.0710678118654755,0,9"
        assert lines[2] == "0.1,7,2,NA,NA,2,9"
        assert path.read_bytes().endswith(b"\n")
        assert b"\r" not in path.read_bytes()

    def test_plot_data_is_girth_by_probability(self, tmp_path):
        recs = [
            ConvergenceRecord(0.1, 3, rounds=(100,)),
            ConvergenceRecord(0.1, 7, rounds=(200,)),
            ConvergenceRecord(0.9, 3, rounds=(50,)),
            ConvergenceRecord(0.9, 7, rounds=(None,)),
        ]
        path = tmp_path / "plot.csv"
        write_plot_data(recs, path)
        assert path.read_text() == (
            "girth,rounds_p0.1,rounds_p0.9\n3,100.0,50.0\n7,200.0,NA\n"
        )
