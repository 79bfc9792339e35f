"""Attack-experiment tests: rejection sampling and its filters, static
reconstruction counting against the exact oracle, the asynchronous
simulation, and grid orchestration with CSV output."""

import numpy as np
import pytest

from sumrecon.attacks import (
    GRID_CSV_HEADER,
    BipartiteParams,
    ExperimentRecord,
    NoValidGraphError,
    admissible_edge_range,
    marginal_distribution,
    reconstructed_count,
    rounds_until_success,
    run_fraction_grid,
    run_rounds_grid,
    sample_view,
    write_grid_csv,
    write_marginal_csv,
)
from sumrecon.graphs import AdversaryView
from sumrecon.knowledge import AdversarialKnowledge
from sumrecon.linalg import (
    IncrementalRref,
    RationalMatrix,
    partial_solutions,
    solvable_set_oracle,
)


def make_view(grid) -> AdversaryView:
    bi = np.array(grid, dtype=np.uint8)
    k, n = bi.shape
    return AdversaryView(
        adversary_count=k,
        neighbour_count=n,
        biadjacency=bi,
        adversary_labels=tuple(range(k)),
        neighbour_labels=tuple(range(k, k + n)),
    )


RING_VIEW = make_view([[1, 1, 0], [1, 0, 1], [0, 1, 1]])


def params(k, n, m, samples=1, seed=0):
    return BipartiteParams(k, n, m, samples, seed)


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            params(0, 3, 3)
        with pytest.raises(ValueError):
            params(3, 0, 3)
        with pytest.raises(ValueError):
            params(3, 3, -1)
        with pytest.raises(ValueError):
            BipartiteParams(3, 3, 3, 0, 0)
        with pytest.raises(ValueError):
            BipartiteParams(3, 3, 3, 1, -1)

    def test_admissible_window(self):
        assert not params(3, 3, 2).admissible
        assert params(3, 3, 3).admissible
        assert params(3, 3, 9).admissible
        assert not params(3, 3, 10).admissible
        assert list(admissible_edge_range(3, 3)) == list(range(3, 10))


class TestSampling:
    def test_complete_cell_has_one_graph(self):
        rng = np.random.default_rng(50001)
        for _ in range(5):
            view = sample_view(params(3, 3, 9), rng)
            assert view.biadjacency.tolist() == [[1] * 3] * 3

    def test_inadmissible_cell_rejected_up_front(self):
        with pytest.raises(ValueError):
            sample_view(params(3, 3, 2), np.random.default_rng(0))

    def test_unsampleable_cell_exhausts_budget(self):
        # a single neighbour forces every edge-bearing observer down to
        # one edge, which the filters never allow
        with pytest.raises(NoValidGraphError, match="no valid graph found"):
            sample_view(params(3, 1, 1), np.random.default_rng(0))

    def test_filters_hold_on_large_sample(self):
        rng = np.random.default_rng(50002)
        p = params(3, 5, 10)
        degree_sums = np.zeros(3)
        for _ in range(10_000):
            view = sample_view(p, rng)
            bi = view.biadjacency
            assert bi.shape == (3, 5)
            assert int(bi.sum()) == 10
            deg_adv = bi.sum(axis=1)
            deg_nbr = bi.sum(axis=0)
            assert not np.any(deg_adv == 1)
            assert np.all(deg_nbr >= 1)
            degree_sums += deg_adv
        # the filters treat observers symmetrically, so their mean
        # degrees must agree; 5 sigma of the per-observer mean
        assert np.all(np.abs(degree_sums / 10_000 - 10 / 3) < 0.06)

    def test_allowed_cases_do_occur(self):
        # with two observers and two neighbours the only valid two-edge
        # views give one observer everything: the other is isolated,
        # the view is disconnected, and each neighbour has one edge
        rng = np.random.default_rng(50003)
        seen = set()
        for _ in range(20):
            view = sample_view(params(2, 2, 2), rng)
            deg = view.biadjacency.sum(axis=1).tolist()
            assert sorted(deg) == [0, 2]
            assert view.biadjacency.sum(axis=0).tolist() == [1, 1]
            seen.add(tuple(view.biadjacency.ravel().tolist()))
        assert seen <= {(1, 1, 0, 0), (0, 0, 1, 1)}
        assert len(seen) == 2


class TestReconstructedCount:
    def test_complete_view_yields_nothing(self):
        assert reconstructed_count(make_view([[1, 1, 1]] * 3)) == 0

    def test_ring_view_yields_everything(self):
        assert reconstructed_count(RING_VIEW) == 3

    def test_lone_observer_yields_nothing(self):
        assert reconstructed_count(make_view([[1, 1, 0, 1]])) == 0

    def test_near_complete_view_always_yields_one(self):
        rng = np.random.default_rng(50004)
        for _ in range(50):
            assert reconstructed_count(sample_view(params(3, 3, 8), rng)) == 1

    def test_matches_exact_oracle_on_random_views(self):
        rng = np.random.default_rng(50005)
        for _ in range(400):
            k = int(rng.integers(1, 6))
            n = int(rng.integers(1, 7))
            bi = (rng.random((k, n)) < 0.5).astype(int)
            view = make_view(bi)
            matrix = RationalMatrix(bi.tolist())
            expect = len(solvable_set_oracle(matrix))
            assert reconstructed_count(view) == expect
            assert len(partial_solutions(matrix)) == expect


class TestSimulation:
    def test_three_prompt_observers_succeed_in_three_rounds(self):
        # seed 168 wakes the three observers first; their three sums
        # pin every neighbour value
        assert rounds_until_success(RING_VIEW, np.random.default_rng(168)) == 3

    def test_lone_observer_always_truncates(self):
        view = make_view([[1, 1, 1]])
        for seed in range(20):
            rng = np.random.default_rng(seed)
            assert rounds_until_success(view, rng, max_rounds=100) is None

    def test_deterministic_given_seed(self):
        results = {
            rounds_until_success(RING_VIEW, np.random.default_rng(7))
            for _ in range(3)
        }
        assert len(results) == 1

    def test_solvable_set_only_grows_along_trajectories(self):
        rng = np.random.default_rng(50006)
        for _ in range(100):
            view = sample_view(params(3, 4, int(rng.integers(5, 13))), rng)
            know = AdversarialKnowledge(view)
            tracker = IncrementalRref()
            solved = set()
            for w in rng.integers(0, 7, size=60):
                w = int(w)
                if w < 3:
                    if know.neighbours_of(w):
                        tracker.add_row(know.record_summation(w).terms)
                else:
                    know.record_update(w - 3)
                now = tracker.solved_keys()
                assert solved <= now
                solved = now

    def test_updates_never_beat_the_static_attack(self):
        # whatever neighbours an asynchronous run ever pins down must
        # also fall to the static attack on the same view
        rng = np.random.default_rng(50007)
        for _ in range(60):
            view = sample_view(params(3, 4, int(rng.integers(5, 13))), rng)
            static = solvable_set_oracle(RationalMatrix(view.biadjacency.tolist()))
            know = AdversarialKnowledge(view)
            tracker = IncrementalRref()
            for w in rng.integers(0, 7, size=120):
                w = int(w)
                if w < 3:
                    if know.neighbours_of(w):
                        tracker.add_row(know.record_summation(w).terms)
                else:
                    know.record_update(w - 3)
            touched = {nbr for nbr, _ in tracker.solved_keys()}
            assert touched <= static


class TestGrids:
    def test_fraction_grid_covers_all_cells(self):
        records = run_fraction_grid(2, [2, 3], samples=40, seed=11)
        cells = {(r.params.neighbours, r.params.edges) for r in records}
        assert cells == {(2, 2), (2, 3), (2, 4), (3, 3), (3, 4), (3, 5), (3, 6)}
        by_cell = {(r.params.neighbours, r.params.edges): r for r in records}
        assert not by_cell[(2, 3)].feasible
        for (n, m), rec in by_cell.items():
            if not rec.feasible:
                continue
            assert len(rec.counts) == 40
            if m == 2 * n:
                assert set(rec.counts) == {0}

    def test_aggregates_recompute_from_outcomes(self):
        records = run_fraction_grid(3, [3], samples=50, seed=3)
        for rec in records:
            if not rec.feasible:
                continue
            n = rec.params.neighbours
            assert rec.mean_fraction == sum(rec.counts) / (50 * n)
            assert rec.p_ge_1 == sum(c >= 1 for c in rec.counts) / 50
        assert any(rec.p_ge_1 > 0 for rec in records if rec.feasible)

    def test_grid_determinism_across_workers(self, tmp_path):
        solo = run_fraction_grid(2, [2, 3], samples=30, seed=5, workers=1)
        pair = run_fraction_grid(2, [2, 3], samples=30, seed=5, workers=2)
        assert solo == pair
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_grid_csv(solo, a)
        write_grid_csv(pair, b)
        assert a.read_bytes() == b.read_bytes()

    def test_grid_csv_format(self, tmp_path):
        records = [
            ExperimentRecord(params(2, 2, 2, samples=4, seed=9), counts=(0, 1, 2, 0)),
            ExperimentRecord(params(2, 2, 3, samples=4, seed=9), feasible=False),
        ]
        path = tmp_path / "grid.csv"
        write_grid_csv(records, path)
        data = path.read_bytes()
        assert data == (
            b"k,n,m,samples,mean_fraction,p_ge_1,mean_rounds,truncation_rate,seed\n"
            b"2,2,2,4,0.375,0.5,NA,NA,9\n"
            b"2,2,3,4,NA,NA,NA,NA,9\n"
        )

    def test_marginal_distribution_frozen_small_case(self):
        records = run_fraction_grid(2, [2], samples=25, seed=1)
        rows = marginal_distribution(records)
        assert rows == [(2, 2, 0, 1.0), (2, 2, 1, 0.0), (2, 2, 2, 0.0)]

    def test_marginal_probabilities_sum_to_one(self, tmp_path):
        records = run_fraction_grid(3, [3, 4], samples=30, seed=2)
        rows = marginal_distribution(records)
        for n in (3, 4):
            cohort = [p for (_, rn, _, p) in rows if rn == n]
            assert len(cohort) == min(3, n) + 1
            assert sum(cohort) == pytest.approx(1.0)
        path = tmp_path / "marginal.csv"
        write_marginal_csv(rows, path)
        text = path.read_text(encoding="utf-8")
        assert text.startswith("k,n,count_reconstructed,probability\n")
        assert text.endswith("\n") and "\r" not in text

    def test_marginal_rejects_mixed_adversary_counts(self):
        a = run_fraction_grid(2, [2], samples=5, seed=0)
        b = run_fraction_grid(3, [3], samples=5, seed=0, m_values=[9])
        with pytest.raises(ValueError):
            marginal_distribution(a + b)

    def test_rounds_grid_runs_on_solvable_views_only(self):
        records = run_rounds_grid(3, [3], samples=40, reps=4, seed=13)
        by_cell = {r.params.edges: r for r in records}
        for rec in records:
            if not rec.feasible:
                continue
            solvable = sum(c >= 1 for c in rec.counts)
            assert len(rec.rounds) == 4 * solvable
            assert len(rec.summations) == len(rec.rounds)
            for r, s in zip(rec.rounds, rec.summations):
                assert (r is None) == (s is None)
                if r is not None:
                    assert 1 <= s <= r <= 250
            if rec.rounds:
                assert 0.0 <= rec.truncation_rate <= 1.0
                if rec.mean_rounds is not None:
                    assert rec.mean_summations <= rec.mean_rounds
                    assert rec.summations_per_adversary == pytest.approx(
                        rec.mean_summations / 3
                    )
        complete = by_cell[9]
        assert complete.rounds == ()
        assert complete.mean_rounds is None

    def test_rounds_grid_deterministic(self):
        one = run_rounds_grid(3, [3], samples=25, reps=3, seed=21)
        two = run_rounds_grid(3, [3], samples=25, reps=3, seed=21)
        assert one == two

    def test_rounds_grid_shares_views_with_fraction_grid(self):
        frac = run_fraction_grid(3, [3], samples=30, seed=17)
        rnds = run_rounds_grid(3, [3], samples=30, seed=17, reps=2)
        assert [r.counts for r in frac] == [r.counts for r in rnds]

    def test_successes_show_up_somewhere(self):
        records = run_rounds_grid(3, [3], samples=40, reps=4, seed=13)
        assert any(r is not None for rec in records for r in rec.rounds)
