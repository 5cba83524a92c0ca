import numpy as np
import pytest
from scipy.spatial.distance import pdist

from app.errors import DimensionMismatchError, NotSeparatedError, PreconditionError
from app.geometry import rng
from app.geometry.adversary import (
    KSet,
    LineQuery,
    blue_line_search,
    blue_placement_search,
    blue_runs_from_arcs,
    exact_blue_runs_1d,
    longest_blue_run,
    red_pair_certificate,
    red_pair_search,
)
from app.geometry.battery import make_coloring
from app.geometry.coloring import Color
from app.geometry.separated import SeparatedSet, build_maximal_separated
from app.geometry.torus import TorusSpec

from tests.helpers import forced_coloring, hand_set

T = 1.0 / 3.0


def by_name(certificate):
    return {c.name: c for c in certificate.checks}


class TestRedPairCertificate:
    @pytest.mark.parametrize("fixture", ["coloring_1d", "coloring_2d", "standard_coloring_1d"])
    def test_passes_on_built_colorings(self, request, fixture):
        cert = red_pair_certificate(request.getfixturevalue(fixture))
        assert cert.passed
        assert [c.name for c in cert.checks] == ["cell-diameter", "s-separation", "period"]

    def test_close_s_pair_fails_with_witness(self):
        separated = hand_set(1, 8.0, [[0.0], [1.5], [3.0], [4.5], [6.0]])
        cert = red_pair_certificate(forced_coloring(separated, [0, 1]))
        check = by_name(cert)["s-separation"]
        assert not cert.passed
        assert not check.passed
        assert check.witness[:2] == [0, 1]
        assert check.witness[2] == pytest.approx(1.5)

    def test_short_period_fails(self):
        spec = TorusSpec(n=1, R=1.6, allow_small_R=True)
        separated = build_maximal_separated(spec, T, seed=0)
        cert = red_pair_certificate(forced_coloring(separated, [0]))
        checks = by_name(cert)
        assert not checks["period"].passed
        assert checks["cell-diameter"].passed
        assert checks["s-separation"].passed

    def test_uncertified_set_fails_unless_reverified(self, coloring_1d):
        bare = SeparatedSet(spec=coloring_1d.spec, t=coloring_1d.separated.t, coords=coloring_1d.separated.coords)
        coloring = forced_coloring(bare, coloring_1d.s_ids, x=coloring_1d.config.x)
        assert not by_name(red_pair_certificate(coloring))["cell-diameter"].passed
        assert red_pair_certificate(coloring, reverify=True).passed


class TestRedPairSearch:
    def test_finds_nothing_on_certified_colorings(self, coloring_1d, coloring_2d):
        assert red_pair_search(coloring_1d, 20_000, seed=0) is None
        assert red_pair_search(coloring_2d, 20_000, seed=0) is None

    def test_all_red_coloring_gives_a_witness(self, coloring_1d):
        all_red = forced_coloring(coloring_1d.separated, range(len(coloring_1d.separated)))
        hit = red_pair_search(all_red, 1000, seed=3)
        assert hit is not None
        assert hit.distance == pytest.approx(1.0, abs=1e-9)
        assert all_red.color(hit.first) == Color.RED
        assert all_red.color(hit.second) == Color.RED

    def test_empty_s_returns_none(self, coloring_2d):
        assert red_pair_search(forced_coloring(coloring_2d.separated, []), 100, seed=0) is None

    def test_same_hit_for_any_worker_count(self, coloring_2d):
        all_red = forced_coloring(coloring_2d.separated, range(len(coloring_2d.separated)))
        one = red_pair_search(all_red, 50_000, seed=9, workers=1)
        many = red_pair_search(all_red, 50_000, seed=9, workers=4)
        assert one == many

    @pytest.mark.parametrize("fixture", ["red_coloring_2d", "red_coloring_3d"])
    def test_spread_s_passes_and_resists_search(self, request, fixture):
        coloring = request.getfixturevalue(fixture)
        assert len(coloring.s_ids) >= 2
        assert red_pair_certificate(coloring).passed
        assert red_pair_search(coloring, 50_000, seed=2) is None

    def test_hit_survives_a_shorter_run(self, coloring_2d):
        all_red = forced_coloring(coloring_2d.separated, range(len(coloring_2d.separated)))
        hit = red_pair_search(all_red, 5000, seed=4)
        assert hit is not None
        assert red_pair_search(all_red, hit.trial + 1, seed=4) == hit
        assert red_pair_search(all_red, hit.trial + 7, seed=4) == hit

    def test_sliding_towards_a_close_partner_finds_the_pair(self):
        # red cells around 0 and 1 hold many pairs exactly one apart
        sites = hand_set(1, 8.0, [[i * 0.5] for i in range(16)])
        hit = red_pair_search(forced_coloring(sites, [0, 2]), 2000, seed=0)
        assert hit is not None
        assert hit.distance == pytest.approx(1.0, abs=1e-9)


class TestBlueLines:
    def test_empty_s_gives_an_immediate_blue_line(self, coloring_1d):
        empty = forced_coloring(coloring_1d.separated, [])
        line = blue_line_search(empty, 50, 10, seed=0)
        assert line is not None
        assert len(line.points) == 50
        assert all(empty.color(p) == Color.BLUE for p in line.points)

    def test_found_lines_are_blue_and_unit_spaced(self, coloring_2d):
        line = blue_line_search(coloring_2d, 3, 5000, seed=1)
        if line is None:
            pytest.skip("no blue l_3 in this coloring")
        steps = np.linalg.norm(np.diff(line.points, axis=0), axis=1)
        assert np.allclose(steps, 1.0)
        assert all(coloring_2d.color(p) == Color.BLUE for p in line.points)

    def test_line_query_needs_unit_direction(self):
        with pytest.raises(PreconditionError):
            LineQuery(np.zeros(2), np.array([1.0, 1.0]), 3)

    def test_first_trial_does_not_depend_on_the_total(self, coloring_1d):
        empty = forced_coloring(coloring_1d.separated, [])
        first = blue_line_search(empty, 1, 10, seed=0)
        again = blue_line_search(empty, 1, 11, seed=0)
        assert np.array_equal(first.base, again.base)
        assert np.array_equal(first.direction, again.direction)

    @pytest.mark.parametrize("m", [4, 8, 16, 25])
    def test_hit_at_t_trials_is_a_hit_at_t_plus_one(self, red_coloring_2d, m):
        for trials in range(1, 40):
            line = blue_line_search(red_coloring_2d, m, trials, seed=3)
            if line is None:
                continue
            longer = blue_line_search(red_coloring_2d, m, trials + 1, seed=3)
            assert longer is not None
            assert np.array_equal(line.base, longer.base)

    def test_longest_run_is_monotone_in_trials(self, red_coloring_2d):
        runs = [longest_blue_run(red_coloring_2d, trials, seed=1, m_max=64) for trials in (50, 51, 200)]
        assert runs == sorted(runs)

    def test_placement_does_not_depend_on_the_total(self, coloring_2d):
        empty = forced_coloring(coloring_2d.separated, [])
        K = KSet.from_points([[0.0, 0.0], [1.0, 0.0], [0.0, 1.5]])
        first = blue_placement_search(empty, K, 10, seed=2)
        again = blue_placement_search(empty, K, 11, seed=2)
        assert np.array_equal(first.rotation, again.rotation)
        assert np.array_equal(first.translation, again.translation)

    def test_longest_run_is_deterministic(self, coloring_1d):
        first = longest_blue_run(coloring_1d, 500, seed=4, m_max=64, workers=1)
        assert longest_blue_run(coloring_1d, 500, seed=4, m_max=64, workers=4) == first
        assert 0 <= first <= 64

    def test_longest_run_without_red_hits_the_cap(self, coloring_1d):
        empty = forced_coloring(coloring_1d.separated, [])
        assert longest_blue_run(empty, 10, seed=0, m_max=32) == 32


class TestExactRuns:
    @pytest.mark.parametrize("arcs,R,expected", [
        ([(0.0, 1.0)], 10.0, 9),
        ([(0.0, 0.5)], 10.0, None),
        ([(0.0, 1.0)], 2.5, 2),
        ([], 10.0, None),
    ])
    def test_oracle_values(self, arcs, R, expected):
        assert blue_runs_from_arcs(arcs, R, 1000) == expected

    def test_cap_gives_none(self):
        assert blue_runs_from_arcs([(0.0, 0.01)], 1000.5, 10) is None

    def test_needs_one_dimension(self, coloring_2d):
        with pytest.raises(DimensionMismatchError):
            exact_blue_runs_1d(coloring_2d)

    @pytest.mark.parametrize("seed", range(4))
    def test_exact_run_dominates_monte_carlo(self, seed):
        coloring = make_coloring(1, 8.5, seed=seed, x=0.4)
        exact = exact_blue_runs_1d(coloring)
        mc = longest_blue_run(coloring, 2000, seed=seed, m_max=64)
        if exact is not None:
            assert mc <= exact

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(20))
    def test_exact_run_dominates_monte_carlo_at_standard_x(self, seed):
        coloring = make_coloring(1, 40.5, seed=seed)
        exact = exact_blue_runs_1d(coloring)
        mc = longest_blue_run(coloring, 10_000, seed=seed, m_max=256)
        if exact is not None:
            assert mc <= exact


class TestPlacements:
    def test_kset_is_translated_to_the_origin(self):
        K = KSet.from_points([[2.0, 3.0], [3.0, 3.0], [2.0, 4.5]])
        assert np.allclose(K.points[0], 0.0)
        assert K.n == 2 and len(K) == 3
        assert K.separation == pytest.approx(1.0)

    def test_kset_rejects_close_points(self):
        with pytest.raises(NotSeparatedError):
            KSet.from_points([[0.0, 0.0], [0.5, 0.0]])

    def test_line_diameter(self):
        assert KSet.line(5, 3).diameter == pytest.approx(4.0)

    def test_placement_is_an_isometry(self, coloring_2d):
        empty = forced_coloring(coloring_2d.separated, [])
        K = KSet.from_points([[0.0, 0.0], [1.0, 0.0], [0.0, 1.5], [1.2, 1.7]])
        placement = blue_placement_search(empty, K, 10, seed=2)
        assert placement is not None
        rotation = placement.rotation
        assert np.allclose(rotation.T @ rotation, np.eye(2), atol=1e-10)
        assert np.allclose(pdist(placement.apply(K)), pdist(K.points), atol=1e-9)
        assert all(empty.color(p) == Color.BLUE for p in placement.apply(K))

    def test_placement_needs_matching_dimension(self, coloring_2d):
        with pytest.raises(DimensionMismatchError):
            blue_placement_search(coloring_2d, KSet.line(3, 1), 10, seed=0)

    def test_placement_rejects_wide_sets(self, coloring_2d):
        assert blue_placement_search(forced_coloring(coloring_2d.separated, []), KSet.line(4, 2), 5, seed=0)
        with pytest.raises(PreconditionError):
            blue_placement_search(coloring_2d, KSet.line(5, 2), 10, seed=0)


class TestChunking:
    def test_run_chunked_ignores_worker_count(self):
        def chunk(index, start, stop):
            return int(rng.stream(1, "test", index).integers(1000, size=stop - start).sum())

        assert rng.run_chunked(10_000, chunk, workers=1, chunk_size=128) == \
            rng.run_chunked(10_000, chunk, workers=6, chunk_size=128)

    @pytest.mark.parametrize("workers", [1, 2, 3, 8])
    def test_first_hit_returns_earliest_chunk(self, workers):
        def chunk(index, start, stop):
            return start if index in (3, 7) else None

        assert rng.first_hit(1000, chunk, workers=workers, chunk_size=100) == 300

    def test_member_draws_do_not_depend_on_count(self):
        assert rng.member_uniforms(3, 10)[4] == rng.member_uniforms(3, 1000)[4]
