"""Reports shared by the CLI and the HTTP service: build, verification battery, sweep rows."""
import logging
import time
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.config import SETTINGS
from app.errors import PreconditionError
from app.geometry import bounds
from app.geometry.adversary import (
    KSet,
    blue_line_search,
    blue_placement_search,
    exact_blue_runs_1d,
    longest_blue_run,
    red_pair_certificate,
    red_pair_search,
)
from app.geometry.coloring import (
    Coloring,
    ColoringConfig,
    build_coloring,
    red_density,
    resample_s_frequency,
    s_inclusion_probability_exact,
)
from app.geometry.separated import (
    Strategy,
    build_maximal_separated,
    packing_bound,
    verify_separation,
)
from app.geometry.torus import TorusSpec
from app.schemas.bounds import FeasibilityReport
from app.schemas.reports import (
    BlueRunReport,
    BuildReport,
    CheckResult,
    SearchReport,
    SweepRow,
    VerificationReport,
)

logger = logging.getLogger(__name__)


def make_coloring(n: int, R: float, seed: int, t: Optional[float] = None, x: Optional[float] = None,
                  strategy: Strategy = Strategy.RANDOM_DARTS, allow_small_R: bool = False,
                  max_darts: Optional[int] = None) -> Coloring:
    """Construct P, certify it and color it, all from one seed"""
    t = SETTINGS["construction"]["t"] if t is None else t
    if allow_small_R and not R > 1 + 2 * t:
        raise PreconditionError(f"R={R!r} must exceed 1 + 2t = {1 + 2 * t!r} even with allow_small_R")
    spec = TorusSpec(n=n, R=R, allow_small_R=allow_small_R)
    separated = build_maximal_separated(spec, t, seed, strategy, max_darts=max_darts)
    config = ColoringConfig(spec=spec, t=t, x=x, seed=seed, tie_tol=SETTINGS["construction"]["tie_tol"])
    return build_coloring(separated, config)


def build_report(coloring: Coloring) -> BuildReport:
    separated, config = coloring.separated, coloring.config
    count_bound = bounds.lemma1_bound(coloring.spec.n, coloring.spec.R)
    return BuildReport(
        n=coloring.spec.n,
        R=coloring.spec.R,
        t=separated.t,
        x=config.x,
        standard_x=config.uses_standard_x,
        seed=config.seed,
        strategy=separated.strategy.value if separated.strategy else "loaded",
        p_size=len(separated),
        count_bound_intermediate=count_bound.intermediate,
        count_bound_final=count_bound.final,
        covering=separated.certificate,
        q_size=int(coloring.q_bits.sum()),
        s_size=int(coloring.s_bits.sum()),
        min_s_distance=coloring.min_s_distance(),
    )


def _site_count_check(coloring: Coloring) -> CheckResult:
    n, R = coloring.spec.n, coloring.spec.R
    t = coloring.separated.t
    size = len(coloring.separated)
    exact = bounds.volume_packing_count(n, R, t)
    passed = size <= exact
    detail = f"|P|={size} <= R^n/vol(B(t/2))={exact:.6g}"
    if t >= bounds.SITE_SEPARATION - 1e-12:
        count_bound = bounds.lemma1_bound(n, R)
        passed = passed and size <= count_bound.intermediate < count_bound.final
        detail += f" <= {count_bound.intermediate:.6g} < {count_bound.final:.6g}"
    return CheckResult(name="site-count", passed=passed, detail=detail)


def _neighbour_count_check(coloring: Coloring) -> CheckResult:
    """Every site has at most 5^n - 1 other sites within 2t"""
    t = coloring.separated.t
    limit = packing_bound(t, 2 * t, coloring.spec.n) - 1
    counts = [len(coloring.index.neighbors_within(p, 2 * t)) for p in range(len(coloring.separated))]
    worst = int(np.argmax(counts))
    passed = counts[worst] <= limit + 1e-9
    return CheckResult(
        name="neighbour-count",
        passed=passed,
        detail=f"max neighbours within 2t: {counts[worst]} (limit {limit:.0f})",
        witness=None if passed else [worst, counts[worst]],
    )


def _covering_check(coloring: Coloring) -> CheckResult:
    cert = coloring.separated.certificate
    return CheckResult(
        name="covering",
        passed=coloring.separated.maximality_certified,
        detail=f"radius {cert.radius!r}, pitch {cert.grid_pitch!r}, depth {cert.refine_depth}, "
               f"{cert.uncovered} uncovered cells",
        witness=cert.witness,
    )


def _least_likely_site(coloring: Coloring) -> Tuple[int, float]:
    """Site with the smallest exact P(p in S), and that probability"""
    x, radius = coloring.config.x, coloring.config.exclusion_radius
    exact = [s_inclusion_probability_exact(coloring.index, x, p, radius) for p in range(len(coloring.separated))]
    worst = int(np.argmin(exact))
    return worst, exact[worst]


def _s_probability_check(coloring: Coloring) -> CheckResult:
    x = coloring.config.x
    worst, least = _least_likely_site(coloring)
    passed = least > x / 2
    return CheckResult(
        name="s-probability",
        passed=passed,
        detail=f"min exact P(p in S) = {least!r} against x/2 = {x / 2!r}",
        witness=None if passed else [worst, least],
    )


def verification_battery(coloring: Coloring, reverify: bool = False) -> VerificationReport:
    """Separation, covering, site and neighbour counts, S-structure and the red-pair certificate.

    Colorings read from disk carry no covering certificate; they are certified here.
    """
    if reverify or coloring.separated.certificate is None:
        coloring = coloring.recertified()
    checks = [
        verify_separation(coloring.separated),
        _covering_check(coloring),
        _site_count_check(coloring),
        _neighbour_count_check(coloring),
        CheckResult(name="s-subset", passed=bool(np.all(coloring.q_bits[coloring.s_bits])),
                    detail="every S member is in Q"),
    ]
    if coloring.config.uses_standard_x and abs(coloring.separated.t - bounds.SITE_SEPARATION) < 1e-12:
        checks.append(_s_probability_check(coloring))
    red_pair = red_pair_certificate(coloring)
    passed = all(c.passed for c in checks) and red_pair.passed
    logger.info("verification battery: %s", "PASS" if passed else "FAIL")
    return VerificationReport(passed=passed, checks=checks, red_pair=red_pair)


def sweep_row(coloring: Coloring, trials: int, seed: int, workers: Optional[int] = None,
              density_samples: Optional[int] = None, probability_trials: Optional[int] = None) -> SweepRow:
    search = SETTINGS["search"]
    build = build_report(coloring)
    battery = verification_battery(coloring)
    by_name = {c.name: c.passed for c in battery.checks}
    site, least = _least_likely_site(coloring)
    exact_run = exact_blue_runs_1d(coloring) if coloring.spec.n == 1 else None
    return SweepRow(
        **build.model_dump(exclude={"covering"}),
        red_density=red_density(coloring, density_samples or search["density_samples"], seed, workers),
        s_prob_site=site,
        s_prob_exact=least,
        s_prob_mc=resample_s_frequency(coloring, site, probability_trials or search["probability_trials"],
                                       seed, workers),
        longest_blue_run=longest_blue_run(coloring, trials, seed, workers=workers),
        exact_blue_run=exact_run,
        separation_pass=by_name["separation"],
        covering_pass=by_name["covering"],
        count_bound_pass=by_name["site-count"],
        neighbour_count_pass=by_name["neighbour-count"],
        red_pair_pass=battery.red_pair.passed,
    )


def bounds_rows(ns: Iterable[int], Rs: Iterable[float]) -> List[FeasibilityReport]:
    """Feasibility at the smallest feasible |K| for every (n, R) cell"""
    Rs = list(Rs)
    return [bounds.theorem_feasibility(n, R, bounds.min_k_for_feasibility(n, R)) for n in ns for R in Rs]


def _timed(fn, timing: bool):
    start = time.perf_counter()
    result = fn()
    return result, (time.perf_counter() - start) if timing else None


def red_search_report(coloring: Coloring, trials: int, seed: int, workers: Optional[int] = None,
                      timing: bool = False) -> SearchReport:
    hit, wall = _timed(lambda: red_pair_search(coloring, trials, seed, workers), timing)
    return SearchReport(
        kind="red-pair", found=hit is not None, trials=trials, seed=seed,
        points=[hit.first, hit.second] if hit else None,
        distance=hit.distance if hit else None, wall_time=wall,
    )


def blue_search_report(coloring: Coloring, m: int, trials: int, seed: int, workers: Optional[int] = None,
                       k_points: Optional[Sequence[Sequence[float]]] = None,
                       timing: bool = False) -> SearchReport:
    """Blue l_m search, or a blue placement of K when k_points is given"""
    if k_points:
        K = KSet.from_points(k_points)
        hit, wall = _timed(lambda: blue_placement_search(coloring, K, trials, seed, workers), timing)
        return SearchReport(
            kind="blue-placement", found=hit is not None, trials=trials, seed=seed,
            points=hit.apply(K).tolist() if hit else None,
            rotation=hit.rotation.tolist() if hit else None,
            translation=hit.translation.tolist() if hit else None, wall_time=wall,
        )
    hit, wall = _timed(lambda: blue_line_search(coloring, m, trials, seed, workers), timing)
    return SearchReport(
        kind="blue-line", found=hit is not None, trials=trials, seed=seed, m=m,
        points=hit.points.tolist() if hit else None,
        base=hit.base.tolist() if hit else None,
        direction=hit.direction.tolist() if hit else None, wall_time=wall,
    )


def blue_run_reports(coloring: Coloring, m_max: Optional[int] = None, trials: Optional[int] = None,
                     seed: int = 0, workers: Optional[int] = None) -> List[BlueRunReport]:
    """Exact 1-D run, followed by the Monte Carlo run when trials is given"""
    m_max = m_max or SETTINGS["search"]["exact_1d_m_max"]
    reports = [BlueRunReport(exact=True, longest=exact_blue_runs_1d(coloring, m_max), m_max=m_max)]
    if trials:
        cap = SETTINGS["search"]["m_max"]
        run = longest_blue_run(coloring, trials, seed, cap, workers)
        reports.append(BlueRunReport(exact=False, longest=run, m_max=cap, trials=trials, seed=seed))
    return reports
