import math

import numpy as np
import pytest

from mtmb.domains import (DiskTask, Mode, PlantedDisks, SimilarityParams, analytic_cell_count,
                          in_general_position, planted_disks_build)
from mtmb.errors import ConfigError


def single_task(centers, r=0.1, lam=0.2, delta=0.05):
    return DiskTask(0, Mode.SINGLE, np.asarray(centers, float), np.zeros((0, 2)), r, lam, delta)


def dual_task(g1, g2, r=0.1, lam=0.2, delta=0.05):
    return DiskTask(0, Mode.DUAL, np.asarray(g1, float), np.asarray(g2, float), r, lam, delta)


class TestBuild:
    def test_full_scale_task_count(self):
        dom = planted_disks_build(100, SimilarityParams(0.15, 3), seed=0)
        assert dom.n_tasks == 200
        assert dom.dimension == 4 and dom.f_max == 10.0
        assert np.array_equal(dom.lower, np.zeros(4)) and np.array_equal(dom.upper, np.ones(4))

    def test_interleaved_modes_and_duplication(self):
        dom = planted_disks_build(7, SimilarityParams(0.2, 2), seed=1)
        for s in range(7):
            single, dual = dom.tasks[2 * s], dom.tasks[2 * s + 1]
            assert single.mode is Mode.SINGLE and dual.mode is Mode.DUAL
            assert single.situation_id == dual.situation_id == s
            assert np.array_equal(single.centers_g1, dual.centers_g1)
            assert single.centers_g2.shape == (0, 2) and dual.centers_g2.shape == (2, 2)

    def test_same_seed_identical(self):
        a = planted_disks_build(10, SimilarityParams(0.15, 3), seed=5)
        b = planted_disks_build(10, SimilarityParams(0.15, 3), seed=5)
        assert a.task_lines() == b.task_lines()
        assert a.fingerprint() == b.fingerprint()
        c = planted_disks_build(10, SimilarityParams(0.15, 3), seed=6)
        assert a.fingerprint() != c.fingerprint()

    def test_zero_dispersion_identical_situations(self):
        dom = planted_disks_build(6, SimilarityParams(0.0, 1), seed=2)
        for t in dom.tasks[2::2]:
            assert np.array_equal(t.centers_g1, dom.tasks[0].centers_g1)
        for t in dom.tasks[3::2]:
            assert np.array_equal(t.centers_g2, dom.tasks[1].centers_g2)

    def test_zero_dispersion_shared_solutions(self, rng):
        dom = planted_disks_build(6, SimilarityParams(0.0, 2), seed=4)
        hits = 0
        for _ in range(2000):
            c = rng.uniform(0, 1, 4)
            fits = [dom.evaluate(t, c)[1] for t in range(0, dom.n_tasks, 2)]
            if fits[0] == dom.f_max:
                hits += 1
                assert all(f == dom.f_max for f in fits)
        assert hits > 0

    def test_given_shared_centers(self):
        sim = SimilarityParams(0.0, 1, shared_centers=((0.47, 0.52),), shared_centers_g2=((0.29, 0.3),))
        dom = planted_disks_build(2, sim, r=0.05, h=0.2, seed=0)
        assert dom.tasks[0].centers_g1.tolist() == [[0.47, 0.52]]
        assert dom.tasks[1].centers_g2.tolist() == [[0.29, 0.3]]

    def test_centers_inside_unit_square(self):
        dom = planted_disks_build(30, SimilarityParams(0.5, 3), seed=8)
        for t in dom.tasks:
            assert np.all((t.centers_g1 >= 0) & (t.centers_g1 <= 1))

    def test_general_position(self):
        dom = planted_disks_build(20, SimilarityParams(0.15, 3), r=0.08, h=0.1, seed=0)
        for t in dom.tasks:
            assert in_general_position(t.centers_g1, t.radius, 0.1)

    @pytest.mark.parametrize("kw", [dict(n_situations=0), dict(r=0.0), dict(lam=-1.0),
                                    dict(delta=0.0), dict(h=0.0), dict(h=1.5)])
    def test_invalid(self, kw):
        args = dict(n_situations=2, sim=SimilarityParams(0.1, 1), r=0.1, lam=0.2, delta=0.05,
                    h=0.1, seed=0)
        args.update(kw)
        with pytest.raises(ConfigError):
            planted_disks_build(**args)

    def test_invalid_similarity(self):
        with pytest.raises(ConfigError):
            SimilarityParams(-0.1, 1)
        with pytest.raises(ConfigError):
            SimilarityParams(0.1, 0)
        with pytest.raises(ConfigError):
            SimilarityParams(0.1, 2, shared_centers=((0.1, 0.1),))


@pytest.mark.usefixtures("use_backend")
class TestEvaluate:
    def test_plateau_at_center(self):
        dom = PlantedDisks([single_task([[0.5, 0.5]])], 0.1)
        assert dom.evaluate(0, np.array([0.5, 0.5, 0.1, 0.9]))[1] == 10.0

    def test_decay_value(self):
        dom = PlantedDisks([single_task([[0.5, 0.5]], r=0.1, lam=0.2)], 0.1)
        key, fit = dom.evaluate(0, np.array([0.5, 0.75, 0.3, 0.3]))
        d = math.hypot(0.5 - 0.5, 0.75 - 0.5) - 0.1
        assert fit == pytest.approx(10.0 * (1 - d / 0.2), abs=1e-12)
        assert fit == pytest.approx(2.5, abs=1e-12)
        assert key == (5, 7)

    def test_far_is_zero(self):
        dom = PlantedDisks([single_task([[0.1, 0.1]], r=0.05, lam=0.2)], 0.1)
        assert dom.evaluate(0, np.array([0.9, 0.9, 0.0, 0.0]))[1] == 0.0

    def test_cell_index(self):
        dom = PlantedDisks([single_task([[0.5, 0.5]])], 0.2)
        assert dom.evaluate(0, np.array([0.31, 0.0, 0.0, 0.0]))[0][0] == 1

    def test_upper_edge_in_last_cell(self):
        dom = PlantedDisks([dual_task([[0.5, 0.5]], [[0.5, 0.5]])], 0.1)
        key, _ = dom.evaluate(0, np.array([1.0, 1.0, 0.0, 1.0]))
        assert key == (9, 9, 0, 9)

    def test_single_ignores_inactive_dims(self):
        dom = PlantedDisks([single_task([[0.3, 0.3]])], 0.1)
        a = dom.evaluate(0, np.array([0.32, 0.4, 0.0, 0.0]))
        b = dom.evaluate(0, np.array([0.32, 0.4, 1.0, 0.7]))
        assert a == b

    @pytest.mark.parametrize("p", [(0.5, 0.5), (0.0, 0.0), (0.31, 0.77)])
    def test_exclusion_band_same_point(self, p):
        # both hands on their disk centers, but at the same spot
        dom = PlantedDisks([dual_task([p], [p], r=0.3)], 0.1)
        assert dom.evaluate(0, np.array([*p, *p]))[1] == 0.0

    def test_dual_takes_worse_hand(self):
        dom = PlantedDisks([dual_task([[0.2, 0.2]], [[0.8, 0.8]], r=0.05, lam=0.2)], 0.1)
        _, both = dom.evaluate(0, np.array([0.2, 0.2, 0.8, 0.8]))
        _, one_off = dom.evaluate(0, np.array([0.2, 0.2, 0.8, 0.95]))
        assert both == 10.0
        assert one_off == pytest.approx(10.0 * (1 - 0.1 / 0.2))

    def test_out_of_bounds(self):
        dom = PlantedDisks([single_task([[0.5, 0.5]])], 0.1)
        with pytest.raises(ValueError):
            dom.evaluate(0, np.array([-0.01, 0.5, 0.5, 0.5]))

    def test_fitness_bounds(self, small_domain, rng):
        cs = rng.uniform(0, 1, (200_000, 4))
        ts = rng.integers(small_domain.n_tasks, size=200_000)
        fits = np.array([small_domain.evaluate(int(t), c)[1] for t, c in zip(ts, cs)])
        assert fits.min() >= 0.0 and fits.max() <= small_domain.f_max

    def test_plateau_soundness(self, small_domain, rng):
        for _ in range(20_000):
            t = int(rng.integers(small_domain.n_tasks))
            c = rng.uniform(0, 1, 4)
            task = small_domain.tasks[t]
            in1 = np.min(np.hypot(*(c[:2] - task.centers_g1).T)) <= task.radius
            if task.mode is Mode.SINGLE:
                expect = in1
            else:
                in2 = np.min(np.hypot(*(c[2:] - task.centers_g2).T)) <= task.radius
                expect = in1 and in2 and math.hypot(*(c[:2] - c[2:])) >= task.exclusion
            assert (small_domain.evaluate(t, c)[1] == small_domain.f_max) == expect

    def test_discretization_consistency(self, small_domain, rng):
        for _ in range(2000):
            c = rng.uniform(0, 1, 4)
            cells = np.floor(c / 0.1)
            d = (cells + rng.uniform(0.01, 0.99, 4)) * 0.1
            for t in (0, 1):
                assert small_domain.evaluate(t, c)[0] == small_domain.evaluate(t, d)[0]


class TestAnalyticCells:
    def test_disk_inside_one_cell(self):
        assert analytic_cell_count(np.array([[0.5, 0.5]]), 0.05, 0.2) == 1

    def test_disk_on_corner(self):
        assert analytic_cell_count(np.array([[0.4, 0.4]]), 0.1, 0.2) == 4

    def test_general_position_detects_sliver(self):
        # disk reaching 1e-4 into the neighbouring cell
        assert not in_general_position(np.array([[0.5, 0.5]]), 0.1001, 0.2)
        assert in_general_position(np.array([[0.5, 0.5]]), 0.05, 0.2)
