"""Every counting and probability bound of the union-bound argument, in log space.

Natural logarithms everywhere except the |K| threshold 10^{4n} log2 R.
"""
import math
from typing import NamedTuple, Optional

import numpy as np
from scipy.special import gammaln

from app.errors import PreconditionError
from app.schemas.bounds import FeasibilityReport, CountBoundResponse, MinKResponse, SignPatternResponse

# K' is taken 5-separated, so a 1-separated K keeps one point in (2*5+1)^n
SUBSET_SEPARATION = 5.0
SITE_SEPARATION = 1.0 / 3.0
EXCLUSION_RADIUS = 5.0 / 3.0


class CountBound(NamedTuple):
    intermediate: float
    final: float


def standard_x(n: int) -> float:
    return 20.0 ** (-n)


def kprime_for(K_size: int, n: int) -> int:
    """ceil(|K| / 11^n), exact in integers"""
    block = 11 ** n
    return max(1, -(-int(K_size) // block))


def threshold_log2(n: int, R: float) -> float:
    return 10.0 ** (4 * n) * math.log2(R)


def log_sign_pattern_bound(M: float, N: int, D: int = 1) -> float:
    if not (M >= N >= 2 and D >= 1):
        raise PreconditionError(f"sign-pattern bound needs M >= N >= 2 and D >= 1 (M={M!r}, N={N}, D={D})")
    return N * math.log(50.0 * D * M / N)


def sign_pattern_bound(M: float, N: int, D: int = 1) -> float:
    """(50 D M / N)^N sign patterns of M degree-D polynomials in N variables"""
    if not (M >= N >= 2 and D >= 1):
        raise PreconditionError(f"sign-pattern bound needs M >= N >= 2 and D >= 1 (M={M!r}, N={N}, D={D})")
    return (50.0 * D * M / N) ** N


def log_polynomial_count(n: int, R: float, kprime: int) -> float:
    """ln M with M = 5^n |K'| 3^n (4 sqrt(n) R)^n"""
    return n * math.log(5) + math.log(kprime) + n * math.log(3) + n * math.log(4 * math.sqrt(n) * R)


class BadEventBound(NamedTuple):
    log_relaxed: float
    log_intermediate: Optional[float]
    log_M: float
    N: int


def bad_event_count_bound(n: int, R: float, kprime: int, d: Optional[int] = None) -> BadEventBound:
    """ln of the number of realizable bad events, relaxed and before relaxation."""
    d = n if d is None else d
    if kprime < 1 or not 0 <= d <= n:
        raise PreconditionError(f"need kprime >= 1 and 0 <= d <= n (kprime={kprime}, d={d})")
    log_relaxed = 2 * n ** 2 * math.log(50 * kprime) + 2 * n ** 3 * math.log(60 * math.sqrt(n) * R)
    log_M = log_polynomial_count(n, R, kprime)
    N = (d + 1) * n
    log_intermediate = None
    if N >= 2 and log_M >= math.log(N):
        log_intermediate = N * (math.log(50.0) + log_M - math.log(N))
    return BadEventBound(log_relaxed, log_intermediate, log_M, N)


def _report(n: int, R: float, K_size: int, kprime: int, d: int) -> FeasibilityReport:
    x = standard_x(n)
    events = bad_event_count_bound(n, R, kprime, d)
    log_single = -x * kprime / 2
    quarter = x * kprime / 4
    margin_a = quarter - 2 * n ** 2 * math.log(50 * kprime)
    margin_b = quarter - 2 * n ** 3 * math.log(60 * math.sqrt(n) * R)
    threshold = threshold_log2(n, R)
    return FeasibilityReport(
        n=n,
        R=R,
        K_size=K_size,
        x=x,
        kprime=kprime,
        d=d,
        M=math.exp(events.log_M) if events.log_M < 700 else math.inf,
        log_M=events.log_M,
        N=events.N,
        subset_separation=SUBSET_SEPARATION,
        log_event_count_bound=events.log_relaxed,
        log_event_count_intermediate=events.log_intermediate,
        log_single_event_bound=log_single,
        log_single_event_exact=kprime * math.log1p(-x / 2),
        union_log_margin=events.log_relaxed + log_single,
        margin_a=margin_a,
        margin_b=margin_b,
        feasible=margin_a > 0 and margin_b > 0,
        threshold_log2=threshold,
        meets_threshold=K_size > threshold,
    )


def theorem_feasibility(n: int, R: float, K_size: int, d: Optional[int] = None) -> FeasibilityReport:
    if n < 1 or not R > 2 or K_size < 1:
        raise PreconditionError(f"need n >= 1, R > 2 and |K| >= 1 (n={n}, R={R!r}, K={K_size})")
    return _report(n, float(R), int(K_size), kprime_for(K_size, n), n if d is None else d)


def _feasible_kprime(n: int, R: float, kprime: int) -> bool:
    quarter = standard_x(n) * kprime / 4
    return (quarter > 2 * n ** 2 * math.log(50 * kprime)
            and quarter > 2 * n ** 3 * math.log(60 * math.sqrt(n) * R))


def min_k_for_feasibility(n: int, R: float) -> int:
    """Smallest |K| for which theorem_feasibility reports feasible.

    Feasibility depends on |K| only through kprime and is an up-set in kprime
    (linear beats logarithm past the crossover), so doubling then bisection on
    kprime is exact.
    """
    if n < 1 or not R > 2:
        raise PreconditionError(f"need n >= 1 and R > 2 (n={n}, R={R!r})")
    hi = 1
    while not _feasible_kprime(n, R, hi):
        hi *= 2
    lo = hi // 2  # infeasible, or 0 when hi == 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _feasible_kprime(n, R, mid):
            hi = mid
        else:
            lo = mid
    return 11 ** n * (hi - 1) + 1


def ell_m_feasibility(n: int, m: int) -> FeasibilityReport:
    """K = l_m has diameter m - 1, so period R = m (R = 3 for m = 2, keeping R > 2).

    meets_threshold is the hypothesis m > 10^{4n} log2 m.
    """
    if m < 2:
        raise PreconditionError("l_m needs m >= 2")
    report = theorem_feasibility(n, float(max(m, 3)), m)
    threshold = threshold_log2(n, float(m))
    return report.model_copy(update={"threshold_log2": threshold, "meets_threshold": m > threshold})


def lemma1_bound(n: int, R: float) -> CountBound:
    """(36nR^2/pi)^{n/2} < (4 sqrt(n) R)^n"""
    if n < 1 or not R > 0:
        raise PreconditionError("need n >= 1 and R > 0")
    return CountBound((36 * n * R * R / math.pi) ** (n / 2), (4 * math.sqrt(n) * R) ** n)


def log_ball_volume(n: int, r: float) -> float:
    return n * math.log(r) + (n / 2) * math.log(math.pi) - float(gammaln(n / 2 + 1))


def volume_packing_count(n: int, R: float, t: float = SITE_SEPARATION) -> float:
    """R^n / vol(B(t/2)): the exact disjoint-ball count behind the site-count bound"""
    return math.exp(n * math.log(R) - log_ball_volume(n, t / 2))


def gamma_bound_holds(n: int) -> bool:
    """Gamma(n/2 + 1) <= n^{n/2}, the step from the exact count to (36nR^2/pi)^{n/2}"""
    return float(gammaln(n / 2 + 1)) <= (n / 2) * math.log(n) + 1e-12


def s_probability_lower_bound(n: int, x: Optional[float] = None) -> float:
    """x (1-x)^{11^n}; exceeds x/2 at x = 20^-n"""
    x = standard_x(n) if x is None else x
    return x * math.exp(11 ** n * math.log1p(-x)) if x < 1 else 0.0


class IndependenceMargins(NamedTuple):
    centre_gap: float  # 5 - 2/3 - 2*5/3, positive when cells of K' points cannot share S-neighbours
    period_gap: float  # R - (R - 1 + 2/3), positive when no two copies of one cell are used


def independence_margins(R: float) -> IndependenceMargins:
    centre = SUBSET_SEPARATION - 2 * SITE_SEPARATION - 2 * EXCLUSION_RADIUS
    return IndependenceMargins(centre, R - (R - 1 + 2 * SITE_SEPARATION))


def set_feasibility(K, R: float) -> FeasibilityReport:
    """Feasibility for a concrete K using its greedy 5-separated K' and its true span dimension"""
    from app.geometry.separated import greedy_separated_indices

    points = np.atleast_2d(np.asarray(K, dtype=float))
    n = points.shape[1]
    kept = points[greedy_separated_indices(points, SUBSET_SEPARATION)]
    d = int(np.linalg.matrix_rank(kept[1:] - kept[0])) if len(kept) > 1 else 0
    if not R > 2:
        raise PreconditionError(f"need R > 2 (R={R!r})")
    return _report(n, float(R), len(points), len(kept), d)


def min_k_response(n: int, R: float) -> MinKResponse:
    k = min_k_for_feasibility(n, R)
    threshold = threshold_log2(n, R)
    return MinKResponse(n=n, R=R, min_K=k, kprime=kprime_for(k, n), threshold_log2=threshold,
                        ratio_to_threshold=k / threshold)


def count_bound_response(n: int, R: float) -> CountBoundResponse:
    count_bound = lemma1_bound(n, R)
    return CountBoundResponse(n=n, R=R, intermediate=count_bound.intermediate, final=count_bound.final,
                          volume_count=volume_packing_count(n, R), gamma_bound_holds=gamma_bound_holds(n))


def sign_pattern_response(M: float, N: int, D: int = 1) -> SignPatternResponse:
    return SignPatternResponse(M=M, N=N, D=D, bound=sign_pattern_bound(M, N, D),
                               log_bound=log_sign_pattern_bound(M, N, D))
