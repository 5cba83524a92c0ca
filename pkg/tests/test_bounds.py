import math

import pytest

from app.errors import PreconditionError
from app.geometry import bounds


class TestSignPatterns:
    def test_known_value(self):
        assert bounds.sign_pattern_bound(4, 2, 1) == pytest.approx(10_000)
        assert bounds.log_sign_pattern_bound(4, 2, 1) == pytest.approx(math.log(10_000))

    @pytest.mark.parametrize("M,N,D", [(1, 2, 1), (4, 1, 1), (4, 2, 0)])
    def test_preconditions(self, M, N, D):
        with pytest.raises(PreconditionError):
            bounds.sign_pattern_bound(M, N, D)

    def test_response_carries_both_forms(self):
        response = bounds.sign_pattern_response(4, 2)
        assert response.bound == pytest.approx(10_000)
        assert response.log_bound == pytest.approx(math.log(10_000))


class TestCounts:
    def test_site_count_bound_known_value(self):
        assert bounds.lemma1_bound(1, 10).final == pytest.approx(40)

    @pytest.mark.parametrize("n", range(1, 8))
    @pytest.mark.parametrize("R", [2.5, 4.0, 100.0])
    def test_intermediate_is_below_final(self, n, R):
        count = bounds.lemma1_bound(n, R)
        assert bounds.volume_packing_count(n, R) <= count.intermediate < count.final

    @pytest.mark.parametrize("n", range(1, 21))
    def test_gamma_step(self, n):
        assert bounds.gamma_bound_holds(n)

    def test_kprime_is_a_ceiling(self):
        assert bounds.kprime_for(121, 2) == 1
        assert bounds.kprime_for(122, 2) == 2
        assert bounds.kprime_for(1, 3) == 1


class TestProbabilities:
    @pytest.mark.parametrize("n", range(1, 7))
    def test_s_probability_exceeds_half_x(self, n):
        x = bounds.standard_x(n)
        assert (1 - x) ** (11 ** n) > 0.5
        assert bounds.s_probability_lower_bound(n) > x / 2

    def test_independence_margins_are_positive(self):
        margins = bounds.independence_margins(4.0)
        assert margins.centre_gap == pytest.approx(1.0)
        assert margins.period_gap == pytest.approx(1.0 / 3.0)


class TestFeasibility:
    def test_plane_at_two_hundred_million(self):
        report = bounds.theorem_feasibility(2, 4.0, 200_000_000)
        assert report.kprime == math.ceil(200_000_000 / 121)
        assert report.margin_a > 0 and report.margin_b > 0
        assert report.feasible
        assert report.N == 6

    def test_small_sets_are_infeasible(self):
        assert not bounds.theorem_feasibility(2, 4.0, 1000).feasible

    def test_min_k_on_the_line(self):
        k = bounds.min_k_for_feasibility(1, 4.0)
        assert 15_000 <= k <= 30_000
        assert bounds.theorem_feasibility(1, 4.0, k).feasible
        assert not bounds.theorem_feasibility(1, 4.0, k - 1).feasible

    def test_min_k_response(self):
        response = bounds.min_k_response(1, 4.0)
        assert response.kprime == bounds.kprime_for(response.min_K, 1)
        assert response.ratio_to_threshold == pytest.approx(response.min_K / (10_000 * 2.0))

    @pytest.mark.parametrize("n", range(2, 11))
    def test_line_of_ten_to_the_five_n(self, n):
        report = bounds.ell_m_feasibility(n, 10 ** (5 * n))
        assert report.meets_threshold
        assert report.feasible

    def test_line_threshold_fails_on_the_line(self):
        assert not bounds.ell_m_feasibility(1, 10 ** 5).meets_threshold

    def test_rejects_short_period(self):
        with pytest.raises(PreconditionError):
            bounds.theorem_feasibility(1, 2.0, 100)

    def test_concrete_set_uses_its_span(self):
        report = bounds.set_feasibility([[float(i), 0.0] for i in range(11)], 20.0)
        assert report.kprime == 3
        assert report.d == 1
        assert report.N == 4
        assert report.K_size == 11
