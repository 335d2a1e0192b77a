import numpy as np
import pytest

from mtmb import algorithms
from mtmb.algorithms import (ALGORITHMS, BudgetConfig, balanced_counts, grid_points,
                             grid_search, mtmb_map_elites, per_task_budget, random_search,
                             run_algorithm, taskwise_map_elites)
from mtmb.archive import dump_lines
from mtmb.domains import SimilarityParams, planted_disks_build
from mtmb.errors import ConfigError
from mtmb.variation import VariationConfig


class Counting:
    """Domain wrapper recording every call."""

    def __init__(self, inner):
        self.inner = inner
        self.calls: list[tuple[int, np.ndarray]] = []

    def __getattr__(self, name):
        return getattr(self.inner, name)

    def evaluate(self, task, command):
        self.calls.append((task, np.array(command)))
        return self.inner.evaluate(task, command)


def run(name, domain, B, seed=0, **kw):
    return run_algorithm(name, domain, BudgetConfig(B, **kw), VariationConfig(), seed)


@pytest.mark.parametrize("name", ALGORITHMS)
@pytest.mark.parametrize("B", [10, 137, 1000])
def test_budget_exact(name, B, small_domain):
    dom = Counting(small_domain)
    archive, snaps = run(name, dom, B, snapshot_every=50, init_target_elites=min(10, B // 2))
    assert len(dom.calls) == B == archive.eval_count
    assert snaps[-1].evaluations == B
    assert [s.evaluations for s in snaps] == sorted(set(list(range(50, B + 1, 50)) + [B]))


def test_main_loop_count_at_scale():
    dom = Counting(planted_disks_build(100, SimilarityParams(0.15, 3), seed=0))
    archive = mtmb_map_elites(dom, BudgetConfig(25_000, init_target_elites=200),
                              VariationConfig(), seed=1)
    assert dom.n_tasks == 200
    assert len(dom.calls) == 25_000 == archive.eval_count


@pytest.mark.parametrize("name", ALGORITHMS)
def test_deterministic(name, small_domain):
    a, sa = run(name, small_domain, 600, seed=4)
    b, sb = run(name, small_domain, 600, seed=4)
    assert list(dump_lines(a)) == list(dump_lines(b)) and sa == sb
    c, _ = run(name, small_domain, 600, seed=5)
    assert list(dump_lines(a)) != list(dump_lines(c))


@pytest.mark.parametrize("name", ALGORITHMS)
def test_backends_give_identical_runs(name, small_domain, monkeypatch):
    from mtmb import _backend
    from mtmb.domains import planted_disks
    from conftest import BACKENDS
    dumps = []
    for backend in BACKENDS:
        monkeypatch.setattr(planted_disks, "kernels", _backend.get_kernels(backend))
        dumps.append(list(dump_lines(run(name, small_domain, 800, seed=2)[0])))
    assert all(d == dumps[0] for d in dumps)


@pytest.mark.parametrize("name", ALGORITHMS)
def test_anytime_monotone_solved(name, small_domain):
    _, snaps = run(name, small_domain, 2000, snapshot_every=100)
    solved = [s.solved_fraction for s in snaps]
    elites = [s.total_elites for s in snaps]
    assert solved == sorted(solved) and elites == sorted(elites)


@pytest.mark.parametrize("name", ALGORITHMS)
def test_single_task(name):
    dom = planted_disks_build(1, SimilarityParams(0.1, 2), seed=0)
    dom.tasks = dom.tasks[:1]
    archive, _ = run(name, dom, 60, init_target_elites=1, init_cap=10)
    assert archive.eval_count == 60 and archive.occupied_tasks == [0]


class TestBudgetConfig:
    def test_defaults(self):
        assert BudgetConfig(100).resolve(10) == (10, 50)

    def test_default_target_above_default_cap(self):
        with pytest.raises(ConfigError):
            BudgetConfig(10).resolve(10)

    @pytest.mark.parametrize("kw", [dict(B=0), dict(B=10, snapshot_every=0)])
    def test_invalid(self, kw):
        with pytest.raises(ConfigError):
            BudgetConfig(**kw)

    @pytest.mark.parametrize("kw", [dict(init_target_elites=60, init_cap=50),
                                    dict(init_target_elites=0), dict(init_cap=100)])
    def test_invalid_init(self, kw):
        with pytest.raises(ConfigError):
            BudgetConfig(100, **kw).resolve(10)

    def test_zero_per_task(self):
        with pytest.raises(ConfigError):
            per_task_budget(BudgetConfig(5), 10)
        dom = planted_disks_build(5, SimilarityParams(0.1, 1), seed=0)
        with pytest.raises(ConfigError):
            grid_search(dom, BudgetConfig(9), 0)
        with pytest.raises(ConfigError):
            taskwise_map_elites(dom, BudgetConfig(9), VariationConfig(), 0)

    def test_unknown_algorithm(self, small_domain):
        with pytest.raises(ConfigError, match="unknown algorithm"):
            run("cmaes", small_domain, 10)


class TestMTMB:
    def test_init_stops_at_target(self, small_domain):
        dom = Counting(small_domain)
        seen = []
        budget = BudgetConfig(300, init_target_elites=7, init_cap=150, snapshot_every=1)
        mtmb_map_elites(dom, budget, VariationConfig(), 3, seen.append)
        first = next(i for i, s in enumerate(seen) if s.total_elites >= 7)
        # random init commands come straight from the init stream
        init = algorithms.stream(3, "init")
        for task, c in dom.calls[:first + 1]:
            assert task == int(init.integers(small_domain.n_tasks))
            assert np.array_equal(c, small_domain.random_command(init))

    def test_init_stops_at_cap(self, small_domain, monkeypatch):
        # a domain whose keys never change keeps the archive at one elite per task
        class OneCell:
            n_tasks = 3
            f_max = 10.0
            lower, upper = np.zeros(4), np.ones(4)

            def evaluate(self, task, command):
                return (0,), 1.0

            def random_command(self, rng):
                return rng.uniform(self.lower, self.upper)

        dom = Counting(OneCell())
        mtmb_map_elites(dom, BudgetConfig(40, init_target_elites=10, init_cap=10),
                        VariationConfig(), 0)
        init = algorithms.stream(0, "init")
        for task, c in dom.calls[:10]:
            assert task == int(init.integers(3))
            assert np.array_equal(c, dom.random_command(init))
        assert len(dom.calls) == 40

    def test_parents_are_current_elites(self, small_domain, monkeypatch):
        seen = []
        real = algorithms.random_elite_of_random_task

        def checked(archive, rng):
            task, e = real(archive, rng)
            assert archive.get(task, e.behavior) is e
            seen.append(e)
            return task, e

        monkeypatch.setattr(algorithms, "random_elite_of_random_task", checked)
        mtmb_map_elites(small_domain, BudgetConfig(500, init_target_elites=10),
                        VariationConfig(), 0)
        assert len(seen) >= 2 * (500 - 250)

    def test_children_in_bounds_and_tasks_uniform(self, small_domain):
        dom = Counting(small_domain)
        mtmb_map_elites(dom, BudgetConfig(6000, init_target_elites=10), VariationConfig(), 8)
        tasks = np.array([t for t, _ in dom.calls])
        cmds = np.array([c for _, c in dom.calls])
        assert cmds.min() >= 0.0 and cmds.max() <= 1.0
        counts = np.bincount(tasks, minlength=dom.n_tasks)
        expected = len(tasks) / dom.n_tasks
        assert ((counts - expected) ** 2 / expected).sum() < 27.88  # chi2(9), p = 0.999


class TestRandomSearch:
    def test_uniform_tasks_and_commands(self, small_domain):
        dom = Counting(small_domain)
        random_search(dom, BudgetConfig(20_000), seed=3)
        tasks = np.array([t for t, _ in dom.calls])
        counts = np.bincount(tasks, minlength=dom.n_tasks)
        chi2 = ((counts - 2000) ** 2 / 2000).sum()
        assert chi2 < 27.88  # chi2(9), p = 0.999
        cmds = np.array([c for _, c in dom.calls])
        hist = np.histogram(cmds[:, 0], bins=10, range=(0, 1))[0]
        assert ((hist - 2000) ** 2 / 2000).sum() < 27.88


class TestGrid:
    @pytest.mark.parametrize("P,dims,expect", [(25, 2, [5, 5]), (10, 4, [2, 2, 2, 1]),
                                               (1, 2, [1, 1]), (125, 2, [11, 11]),
                                               (7, 2, [3, 2])])
    def test_balanced_counts(self, P, dims, expect):
        assert balanced_counts(P, dims) == expect

    def test_points_with_endpoints(self):
        pts = grid_points(np.zeros(4), np.ones(4), (0, 1), [3, 2])
        got = sorted(tuple(p) for p in pts)
        assert got == sorted((x, y, 0.5, 0.5) for x in (0.0, 0.5, 1.0) for y in (0.0, 1.0))

    def test_single_point_is_midpoint(self):
        (p,) = grid_points(np.zeros(4), np.ones(4), (0, 1, 2, 3), [1, 1, 1, 1])
        assert np.array_equal(p, np.full(4, 0.5))

    def test_every_task_gets_its_grid(self, small_domain):
        dom = Counting(small_domain)
        grid_search(dom, BudgetConfig(253), seed=1)
        per_task = 25
        by_task = {}
        for t, c in dom.calls[:per_task * dom.n_tasks]:
            by_task.setdefault(t, []).append(c)
        assert sorted(by_task) == list(range(dom.n_tasks))
        for t, cs in by_task.items():
            assert len(cs) == per_task
            active = small_domain.active_dims(t)
            expect = grid_points(dom.lower, dom.upper, active, balanced_counts(per_task, len(active)))
            n_grid = len(expect)
            assert all(np.array_equal(a, b) for a, b in zip(cs[:n_grid], expect))
        # the remainder is random fill
        assert len(dom.calls) == 253

    def test_task_order_seeded(self, small_domain):
        a, b = Counting(small_domain), Counting(small_domain)
        grid_search(a, BudgetConfig(100), seed=1)
        grid_search(b, BudgetConfig(100), seed=2)
        order = lambda d: [t for t, _ in d.calls[::10]]
        assert sorted(order(a)) == sorted(order(b)) == list(range(10))
        assert order(a) != order(b)


class TestTaskwise:
    def test_tasks_are_contiguous_blocks(self, small_domain):
        dom = Counting(small_domain)
        taskwise_map_elites(dom, BudgetConfig(505), VariationConfig(), seed=0)
        tasks = [t for t, _ in dom.calls[:500]]
        blocks = [tasks[i:i + 50] for i in range(0, 500, 50)]
        assert all(len(set(b)) == 1 for b in blocks)
        assert sorted(b[0] for b in blocks) == list(range(10))

    def test_parents_from_own_task(self, small_domain, monkeypatch):
        real = algorithms.random_elite_of_task
        current = {}

        def checked(archive, task, rng):
            e = real(archive, task, rng)
            assert archive.get(task, e.behavior) is e
            current.setdefault(task, 0)
            current[task] += 1
            return e

        monkeypatch.setattr(algorithms, "random_elite_of_task", checked)
        taskwise_map_elites(small_domain, BudgetConfig(500), VariationConfig(), seed=0)
        assert sorted(current) == list(range(10))
