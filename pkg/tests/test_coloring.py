import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from app.geometry import bounds, rng
from app.geometry.battery import sweep_row
from app.geometry.coloring import (
    Color,
    ColoringConfig,
    build_coloring,
    color,
    exclusion_count,
    filter_s,
    red_arcs_1d,
    red_density,
    red_measure_1d,
    resample_s_frequency,
    s_inclusion_probability_exact,
    sample_q,
)
from app.geometry.torus import TorusPoint, TorusSpec
from app.geometry.voronoi import build_index

from tests.helpers import forced_coloring, hand_set


@pytest.fixture(scope="module")
def two_sites():
    """P = {0, 5} on the circle of length 10, S = {0}"""
    return forced_coloring(hand_set(1, 10.0, [[0.0], [5.0]]), [0])


class TestConfig:
    def test_defaults_to_twentieth_power(self):
        config = ColoringConfig(spec=TorusSpec(n=2, R=4.0))
        assert config.x == pytest.approx(20.0 ** -2)
        assert config.uses_standard_x
        assert config.exclusion_radius == pytest.approx(5.0 / 3.0)

    @pytest.mark.parametrize("x", [-0.1, 1.5])
    def test_rejects_probability_out_of_range(self, x):
        with pytest.raises(ValidationError):
            ColoringConfig(spec=TorusSpec(n=1, R=4.0), x=x)

    def test_rejects_negative_tie_tolerance(self):
        with pytest.raises(ValidationError):
            ColoringConfig(spec=TorusSpec(n=1, R=4.0), x=0.1, tie_tol=-1.0)


class TestRule:
    def test_hand_example(self, two_sites):
        assert two_sites.color([0.2]) == Color.RED
        assert two_sites.color([4.9]) == Color.BLUE
        assert two_sites.color([9.9]) == Color.RED

    def test_tie_goes_red(self, two_sites):
        assert two_sites.color([2.5]) == Color.RED
        assert two_sites.color([7.5]) == Color.RED
        assert two_sites.red_mask([[2.5], [7.5]]).all()

    def test_module_color_accepts_torus_points(self, two_sites):
        assert color(two_sites, TorusPoint((0.2,))) == Color.RED

    def test_red_arcs_of_hand_example(self, two_sites):
        assert red_arcs_1d(two_sites) == [(7.5, 12.5)]
        assert red_measure_1d(two_sites) == pytest.approx(0.5)

    def test_single_red_site_covers_the_circle(self):
        coloring = forced_coloring(hand_set(1, 4.0, [[1.0]]), [0])
        assert red_arcs_1d(coloring) == [(0.0, 4.0)]
        assert red_measure_1d(coloring) == 1.0

    def test_adjacent_red_cells_merge_across_the_wrap(self):
        coloring = forced_coloring(hand_set(1, 12.0, [[0.0], [4.0], [8.0]]), [0, 2])
        # cells of 8 and 0 meet at 10
        assert red_arcs_1d(coloring) == [(6.0, 14.0)]

    def test_empty_s_is_all_blue(self, coloring_2d):
        empty = forced_coloring(coloring_2d.separated, [])
        pts = np.random.default_rng(0).uniform(0, 4.0, size=(500, 2))
        assert not empty.red_mask(pts).any()
        assert empty.color([1.0, 1.0]) == Color.BLUE

    @given(
        x=st.floats(0.0, 4.0, exclude_max=True),
        y=st.floats(0.0, 4.0, exclude_max=True),
        shift=st.tuples(st.integers(-5, 5), st.integers(-5, 5)),
    )
    @settings(max_examples=150, deadline=None)
    def test_periodic(self, coloring_2d, x, y, shift):
        moved = [x + 4.0 * shift[0], y + 4.0 * shift[1]]
        assert coloring_2d.color([x, y]) == coloring_2d.color(moved)

    def test_batch_matches_single_point(self, coloring_2d):
        pts = np.random.default_rng(4).uniform(-8, 8, size=(2000, 2))
        mask = coloring_2d.red_mask(pts)
        singles = np.array([coloring_2d.color(p) == Color.RED for p in pts])
        assert np.array_equal(mask, singles)


class TestSampling:
    def test_filter_s_hand_case(self):
        sites = hand_set(1, 10.0, [[0.0], [0.4], [3.0], [5.0], [9.0]])
        q_bits = np.array([True, True, False, True, False])
        # 0 and 0.4 knock each other out; 5 is 4.6 from the nearest other Q member
        assert np.flatnonzero(filter_s(sites, q_bits)).tolist() == [3]

    def test_q_rate_over_seeds(self, coloring_2d):
        x, seeds = 0.1, 100
        size = len(coloring_2d.separated)
        rate = np.mean([sample_q(coloring_2d.separated, ColoringConfig(spec=coloring_2d.spec, x=x, seed=s)).mean()
                        for s in range(seeds)])
        assert abs(rate - x) <= 4 * math.sqrt(x * (1 - x) / (seeds * size))

    def test_zero_probability_gives_empty_q(self, coloring_2d):
        coloring = build_coloring(coloring_2d.separated, ColoringConfig(spec=coloring_2d.spec, x=0.0))
        assert coloring.q_ids == [] and coloring.s_ids == []

    def test_full_probability_empties_s(self, coloring_2d):
        # every site of a maximal set has a neighbour within 2t < 5/3
        coloring = build_coloring(coloring_2d.separated, ColoringConfig(spec=coloring_2d.spec, x=1.0))
        assert len(coloring.q_ids) == len(coloring_2d.separated)
        assert coloring.s_ids == []

    @pytest.mark.parametrize("fixture", ["coloring_1d", "coloring_2d", "standard_coloring_1d"])
    def test_s_is_a_sparse_subset_of_q(self, request, fixture):
        coloring = request.getfixturevalue(fixture)
        assert set(coloring.s_ids) <= set(coloring.q_ids)
        d = coloring.min_s_distance()
        assert d is None or d > coloring.config.exclusion_radius

    def test_deterministic_for_a_seed(self, coloring_1d):
        again = build_coloring(coloring_1d.separated, coloring_1d.config)
        assert again.q_ids == coloring_1d.q_ids
        assert again.s_ids == coloring_1d.s_ids

    def test_membership_draws_are_prefix_stable(self):
        assert np.array_equal(rng.member_uniforms(7, 100)[:50], rng.member_uniforms(7, 50))

    def test_seed_changes_q(self, coloring_1d):
        other = build_coloring(coloring_1d.separated, coloring_1d.config.model_copy(update={"seed": 99}))
        draws = rng.member_uniforms(99, len(coloring_1d.separated))
        assert other.q_ids == [int(i) for i in np.flatnonzero(draws < coloring_1d.config.x)]


class TestForcedRedSide:
    @pytest.mark.parametrize("fixture", ["red_coloring_2d", "red_coloring_3d"])
    def test_s_is_spread_and_non_trivial(self, request, fixture):
        coloring = request.getfixturevalue(fixture)
        assert len(coloring.s_ids) >= 2
        assert coloring.min_s_distance() > coloring.config.exclusion_radius

    @pytest.mark.parametrize("fixture", ["red_coloring_2d", "red_coloring_3d"])
    def test_s_sites_are_red(self, request, fixture):
        coloring = request.getfixturevalue(fixture)
        for p in coloring.s_ids:
            assert coloring.color(coloring.separated.coords[p]) == Color.RED

    @given(
        x=st.floats(0.0, 8.0, exclude_max=True),
        y=st.floats(0.0, 8.0, exclude_max=True),
        shift=st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
    )
    @settings(max_examples=150, deadline=None)
    def test_periodic(self, red_coloring_2d, x, y, shift):
        moved = [x + 8.0 * shift[0], y + 8.0 * shift[1]]
        assert red_coloring_2d.color([x, y]) == red_coloring_2d.color(moved)

    def test_periodic_in_three_dimensions(self, red_coloring_3d):
        gen = np.random.default_rng(8)
        pts = gen.uniform(0, 2.5, size=(500, 3))
        shifts = gen.integers(-3, 4, size=(500, 3)) * 2.5
        assert np.array_equal(red_coloring_3d.red_mask(pts), red_coloring_3d.red_mask(pts + shifts))

    @pytest.mark.parametrize("fixture", ["red_coloring_2d", "red_coloring_3d"])
    def test_batch_matches_single_point(self, request, fixture):
        coloring = request.getfixturevalue(fixture)
        R, n = coloring.spec.R, coloring.spec.n
        near_s = coloring.separated.coords[coloring.s_bits]
        pts = np.vstack([near_s, np.random.default_rng(6).uniform(-R, 2 * R, size=(2000, n))])
        mask = coloring.red_mask(pts)
        singles = np.array([coloring.color(p) == Color.RED for p in pts])
        assert mask.any() and not mask.all()
        assert np.array_equal(mask, singles)

    def test_density_is_positive(self, red_coloring_2d):
        assert 0 < red_density(red_coloring_2d, 20_000, seed=1) < 1


class TestProbabilities:
    def test_exact_inclusion_probability(self):
        # sites every 0.8 on a circle of length 8: four within 5/3 of site 0
        index = build_index(hand_set(1, 8.0, [[0.8 * i] for i in range(10)]))
        assert exclusion_count(index, 0) == 4
        assert s_inclusion_probability_exact(index, 0.05, 0) == pytest.approx(0.05 * 0.95 ** 4)
        assert s_inclusion_probability_exact(index, 0.05, 0) == pytest.approx(0.040725, abs=1e-6)

    def test_resampling_agrees_with_exact_value(self, coloring_1d):
        exact = s_inclusion_probability_exact(coloring_1d.index, coloring_1d.config.x, 0)
        trials = 40_000
        freq = resample_s_frequency(coloring_1d, 0, trials, seed=5)
        assert abs(freq - exact) <= 4 * math.sqrt(exact * (1 - exact) / trials) + 1e-9

    def test_resampling_rejects_zero_trials(self, coloring_1d):
        with pytest.raises(ValueError):
            resample_s_frequency(coloring_1d, 0, 0)

    def test_sweep_row_reports_the_least_likely_site(self, red_coloring_2d):
        row = sweep_row(red_coloring_2d, trials=50, seed=0, density_samples=1000, probability_trials=4000)
        index, x = red_coloring_2d.index, red_coloring_2d.config.x
        exact = [s_inclusion_probability_exact(index, x, p) for p in range(len(index))]
        assert row.s_prob_exact == pytest.approx(min(exact))
        assert exact[row.s_prob_site] == pytest.approx(min(exact))
        assert abs(row.s_prob_mc - row.s_prob_exact) <= 4 * math.sqrt(row.s_prob_exact * (1 - row.s_prob_exact) / 4000)

    def test_one_dimensional_probability_exceeds_half_x(self, standard_coloring_1d):
        x = standard_coloring_1d.config.x
        index = standard_coloring_1d.index
        worst = min(s_inclusion_probability_exact(index, x, p) for p in range(len(index)))
        assert worst > x / 2
        assert worst >= bounds.s_probability_lower_bound(1) - 1e-15

    def test_density_matches_exact_measure(self, coloring_1d):
        exact = red_measure_1d(coloring_1d)
        samples = 100_000
        density = red_density(coloring_1d, samples, seed=2)
        assert abs(density - exact) <= 4 * math.sqrt(max(exact * (1 - exact), 1e-12) / samples) + 1e-9

    def test_density_independent_of_workers(self, coloring_2d):
        assert red_density(coloring_2d, 30_000, seed=1, workers=1) == red_density(coloring_2d, 30_000, seed=1, workers=4)
