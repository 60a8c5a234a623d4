"""Self-check suites: seeded, desk-scale versions of the library's core
properties.  Each suite returns a SuiteResult; run_suites collects them all.

These run in a few seconds and are wired to the `verify` CLI subcommand, so
an installation can certify itself without the development test tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .brenier import (
    MapSample,
    backward_map_from_duals,
    interpolate,
    inverse_roundtrip_check,
    monge_ampere_residual,
    potential_from_duals,
    transport_map_from_duals,
)
from .causality import CausalRelation, classify, tau, tau_partition_length
from .geodesics import GeodesicArc, exp_map, flow, log_map
from .heisenberg import (
    IDENTITY,
    FrameCovector,
    GroupPoint,
    energy,
    mul,
    sup_distance,
)
from .measures_io import sample_chronological_pair, sample_diamond
from .minkowski import (
    PlanarMeasure,
    right_translation_verdict,
    seeded_verdict_instance,
    solve_minkowski,
)
from .transport import (
    CostParams,
    DiscreteMeasure,
    brute_force_plan,
    check_cyclical_monotonicity,
    cost_matrix,
    duality_gap,
    solve_kantorovich,
    strengthen_duals,
)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str


def _timelike_covector(rng) -> FrameCovector:
    v = rng.uniform(-0.9, 0.9)
    u = -rng.uniform(abs(v) + 0.05, 2.0)
    w = rng.uniform(-1.5, 1.5)
    return FrameCovector(u, v, w)


def _rk4_flow(q0: GroupPoint, cov0: FrameCovector, t: float, steps: int):
    """Fixed-step fourth-order integration of the geodesic equations.

    Independent of the closed form in geodesics.flow; used to cross-check it.
    State (x, y, z, hX, hY), with hZ constant.
    """
    hz = cov0.hZ

    def rhs(s):
        x, y, z, hx, hy = s
        return np.array(
            [-hx, hy, 0.5 * (hx * y + hy * x), -hy * hz, -hx * hz]
        )

    s = np.array([q0.x, q0.y, q0.z, cov0.hX, cov0.hY])
    h = t / steps
    for _ in range(steps):
        k1 = rhs(s)
        k2 = rhs(s + 0.5 * h * k1)
        k3 = rhs(s + 0.5 * h * k2)
        k4 = rhs(s + h * k3)
        s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    x, y, z, hx, hy = s
    return GroupPoint(x, y, z), FrameCovector(hx, hy, hz)


def suite_exp_log_roundtrip(seed: int, n: int = 2000, tol: float = 1e-9) -> SuiteResult:
    rng = np.random.default_rng(seed)
    base = GroupPoint(0.3, -0.2, 0.1)
    apex = mul(base, GroupPoint(2.0, 0.0, 0.0))
    worst = 0.0
    for q in sample_diamond(base, apex, n, rng):
        back = exp_map(base, log_map(base, q))
        worst = max(worst, sup_distance(q, back))
    return SuiteResult(
        "exp-log-roundtrip", worst <= tol, f"sup deviation {worst:.3e} over {n} points"
    )


def suite_flow_vs_ode(seed: int, n: int = 60, tol: float = 1e-8) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        cov = FrameCovector(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-1.5, 1.5))
        t = rng.uniform(0.2, 2.0)
        exact = flow(IDENTITY, cov, t)
        approx_pt, approx_cov = _rk4_flow(IDENTITY, cov, t, steps=4000)
        worst = max(worst, sup_distance(exact.point, approx_pt))
        worst = max(
            worst,
            max(
                abs(exact.cov.hX - approx_cov.hX),
                abs(exact.cov.hY - approx_cov.hY),
            ),
        )
    return SuiteResult("flow-vs-ode", worst <= tol, f"sup deviation {worst:.3e} over {n} flows")


def suite_tau_consistency(seed: int, n: int = 500, tol: float = 1e-9) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        cov = _timelike_covector(rng)
        q = exp_map(IDENTITY, cov)
        worst = max(worst, abs(tau(IDENTITY, q) - math.sqrt(2.0 * energy(cov))))
    frozen = abs(tau(IDENTITY, GroupPoint(2.0, 1.0, 0.0)) - math.sqrt(3.0))
    ok = worst <= tol and frozen <= 1e-12
    return SuiteResult(
        "tau-consistency", ok, f"sup deviation {worst:.3e}; planar fixture {frozen:.3e}"
    )


def suite_reverse_triangle(seed: int, n: int = 2000, tol: float = 1e-10) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        a = GroupPoint(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-0.5, 0.5))
        b = mul(a, exp_map(IDENTITY, _timelike_covector(rng)))
        c = mul(b, exp_map(IDENTITY, _timelike_covector(rng)))
        worst = max(worst, tau(a, b) + tau(b, c) - tau(a, c))
    return SuiteResult(
        "reverse-triangle", worst <= tol, f"worst violation {worst:.3e} over {n} chains"
    )


def suite_planar_bound(seed: int, n: int = 2000, tol: float = 1e-10) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    checked = 0
    while checked < n:
        a = GroupPoint(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-0.5, 0.5))
        b = GroupPoint(rng.uniform(-1, 3), rng.uniform(-1, 1), rng.uniform(-0.5, 0.5))
        if classify(a, b) is not CausalRelation.CHRONOLOGICAL:
            continue
        checked += 1
        planar = math.sqrt(max((b.x - a.x) ** 2 - (b.y - a.y) ** 2, 0.0))
        worst = max(worst, tau(a, b) - planar)
    return SuiteResult(
        "planar-bound", worst <= tol, f"worst excess {worst:.3e} over {n} pairs"
    )


def suite_lp_duality(seed: int, instances: int = 20, tol: float = 1e-9) -> SuiteResult:
    rng = np.random.default_rng(seed)
    params = CostParams(0.5)
    worst_gap = 0.0
    worst_cm = 0.0
    worst_bf = 0.0
    for k in range(instances):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(2, 9))
        mu, nu = sample_chronological_pair(n, m, seed=int(rng.integers(1 << 30)), weights="random")
        plan, duals = solve_kantorovich(mu, nu, params)
        cm = cost_matrix(mu, nu, params)
        worst_gap = max(worst_gap, abs(duality_gap(plan, duals, mu, nu, cm)))
        report = check_cyclical_monotonicity(plan, cm, max_cycle=4)
        worst_cm = max(worst_cm, report.worst_violation)
        if n == m and n <= 5:
            uni, nun = sample_chronological_pair(n, n, seed=int(rng.integers(1 << 30)))
            p2, _ = solve_kantorovich(uni, nun, params)
            bf = brute_force_plan(uni, nun, params)
            worst_bf = max(worst_bf, abs(p2.value - bf.value))
    ok = worst_gap <= tol and worst_cm <= tol and worst_bf <= tol
    return SuiteResult(
        "lp-duality",
        ok,
        f"gap {worst_gap:.3e}; monotonicity violation {worst_cm:.3e}; brute-force diff {worst_bf:.3e}",
    )


def suite_brenier_roundtrip(seed: int, instances: int = 4, tol: float = 1e-6) -> SuiteResult:
    rng = np.random.default_rng(seed)
    params = CostParams(0.5)
    worst_target = 0.0
    worst_round = 0.0
    for _ in range(instances):
        n = int(rng.integers(4, 7))
        mu, nu = sample_chronological_pair(n, n, seed=int(rng.integers(1 << 30)))
        plan, duals0 = solve_kantorovich(mu, nu, params)
        cm = cost_matrix(mu, nu, params)
        duals = strengthen_duals(plan, cm)
        pot = potential_from_duals(duals, nu, params)
        fwd = transport_map_from_duals(mu, pot, method="analytic")
        assigned = {i: j for i, j in plan.support()}
        for i, s in zip(fwd.mapped, fwd.samples):
            worst_target = max(worst_target, sup_distance(s.image, nu.atoms[assigned[i]]))
        bwd = backward_map_from_duals(nu, duals.phi, mu.atoms, params)
        worst_round = max(worst_round, inverse_roundtrip_check(fwd, bwd))
    ok = worst_target <= tol and worst_round <= tol
    return SuiteResult(
        "brenier-roundtrip",
        ok,
        f"map-vs-plan {worst_target:.3e}; forward/backward {worst_round:.3e}",
    )


def suite_interpolation(seed: int, tol_point: float = 1e-9, tol_measure: float = 1e-6) -> SuiteResult:
    rng = np.random.default_rng(seed)
    params = CostParams(0.5)
    worst_point = 0.0
    for _ in range(200):
        cov = _timelike_covector(rng)
        q = GroupPoint(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-0.3, 0.3))
        sample = MapSample(q, exp_map(q, cov), cov, math.sqrt(2.0 * energy(cov)))
        s, t = sorted(rng.uniform(0.0, 1.0, 2))
        qs, qt = interpolate(sample, s), interpolate(sample, t)
        expect = (t - s) * tau(sample.source, sample.image)
        worst_point = max(worst_point, abs(tau(qs, qt) - expect))
    mu, nu = sample_chronological_pair(5, 5, seed=seed + 1)
    plan, _ = solve_kantorovich(mu, nu, params)
    cm = cost_matrix(mu, nu, params)
    duals = strengthen_duals(plan, cm)
    pot = potential_from_duals(duals, nu, params)
    fwd = transport_map_from_duals(mu, pot, method="analytic")
    worst_measure = 0.0
    if len(fwd.mapped) == len(mu.atoms):
        ell = (params.p * plan.value) ** (1.0 / params.p)
        for s, t in ((0.0, 0.5), (0.25, 0.75), (0.5, 1.0)):
            mus = DiscreteMeasure([interpolate(x, s) for x in fwd.samples], mu.weights)
            mut = DiscreteMeasure([interpolate(x, t) for x in fwd.samples], mu.weights)
            ps, _ = solve_kantorovich(mus, mut, params)
            ell_st = (params.p * ps.value) ** (1.0 / params.p)
            worst_measure = max(worst_measure, abs(ell_st - (t - s) * ell))
    ok = worst_point <= tol_point and worst_measure <= tol_measure
    return SuiteResult(
        "displacement-interpolation",
        ok,
        f"pointwise {worst_point:.3e}; measure-level {worst_measure:.3e}",
    )


def suite_right_translation(seed: int, instances: int = 20) -> SuiteResult:
    agreed = 0
    for k in range(instances):
        mu, q0 = seeded_verdict_instance(seed + k)
        verdict = right_translation_verdict(mu, q0, CostParams(0.5))
        if verdict.agrees:
            agreed += 1
    return SuiteResult(
        "right-translation", agreed == instances, f"predicate/LP agreement {agreed}/{instances}"
    )


def suite_monge_ampere(seed: int, tol: float = 1e-6) -> SuiteResult:
    rng = np.random.default_rng(seed)
    params = CostParams(0.5)
    q0 = GroupPoint(1.0, 0.5, 0.0)
    t0 = tau(IDENTITY, q0)
    scale = t0 ** (params.p - 2.0)
    lam = log_map(IDENTITY, q0)

    # constant potential gradient whose Brenier map is q -> q * q0: the
    # frame components of the geodesic covector do not depend on the base
    def grad_translation(q: GroupPoint) -> FrameCovector:
        return FrameCovector(-scale * lam.hX, -scale * lam.hY, -scale * lam.hZ)

    def rho0(q: GroupPoint) -> float:
        return math.exp(-(q.x * q.x + q.y * q.y + q.z * q.z))

    t = 0.5
    shift = GroupPoint(-t * q0.x, -t * q0.y, 0.0)

    def rhot(q: GroupPoint) -> float:
        return rho0(mul(q, shift))

    sources = [
        GroupPoint(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3))
        for _ in range(12)
    ]
    report = monge_ampere_residual(grad_translation, sources, t, rho0, rhot, params)
    worst_det = max(abs(det - 1.0) for _, _, det, _ in report.points)
    ok = report.max_residual <= tol and worst_det <= tol
    return SuiteResult(
        "monge-ampere",
        ok,
        f"residual {report.max_residual:.3e}; |det - 1| {worst_det:.3e}",
    )


def suite_minkowski_lift(seed: int, instances: int = 10, tol: float = 1e-9) -> SuiteResult:
    rng = np.random.default_rng(seed)
    params = CostParams(0.5)
    worst = 0.0
    for _ in range(instances):
        slope = rng.uniform(-0.6, 0.6)
        n = int(rng.integers(2, 6))
        m = int(rng.integers(2, 6))
        ts = np.sort(rng.uniform(0.0, 1.0, n))
        ss = np.sort(rng.uniform(2.0, 3.5, m))
        wa = rng.random(n) + 0.1
        wa /= wa.sum()
        wb = rng.random(m) + 0.1
        wb /= wb.sum()
        planar_mu = PlanarMeasure([(t, t * slope) for t in ts], wa)
        planar_nu = PlanarMeasure([(s, s * slope) for s in ss], wb)
        native_mu = DiscreteMeasure([GroupPoint(t, t * slope, 0.0) for t in ts], wa)
        native_nu = DiscreteMeasure([GroupPoint(s, s * slope, 0.0) for s in ss], wb)
        sol = solve_minkowski(planar_mu, planar_nu, params)
        native, _ = solve_kantorovich(native_mu, native_nu, params)
        worst = max(worst, abs(sol.value - native.value))
    return SuiteResult(
        "minkowski-lift", worst <= tol, f"planar-vs-native value diff {worst:.3e}"
    )


def suite_partition_length(seed: int, tol: float = 1e-6) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(5):
        cov = _timelike_covector(rng)
        arc = GeodesicArc(IDENTITY, cov, 1.0)
        length = math.sqrt(2.0 * energy(cov))
        prev = math.inf
        monotone = True
        final = 0.0
        for k in (2, 8, 64, 1024):
            pts = [arc.point(j / k) for j in range(k + 1)]
            total = tau_partition_length(pts)
            if total > prev + 1e-12:
                monotone = False
            prev = total
            final = total
        worst = max(worst, abs(final - length))
        if not monotone:
            return SuiteResult("partition-length", False, "partition sums increased")
    return SuiteResult(
        "partition-length", worst <= tol, f"finest-partition length error {worst:.3e}"
    )


def run_suites(seed: int = 0):
    """All self-check suites at their default scales, seeded."""
    return [
        suite_exp_log_roundtrip(seed),
        suite_flow_vs_ode(seed + 1),
        suite_tau_consistency(seed + 2),
        suite_reverse_triangle(seed + 3),
        suite_planar_bound(seed + 4),
        suite_lp_duality(seed + 5),
        suite_brenier_roundtrip(seed + 6),
        suite_interpolation(seed + 7),
        suite_right_translation(2 * seed + 1),
        suite_monge_ampere(seed + 8),
        suite_minkowski_lift(seed + 9),
        suite_partition_length(seed + 10),
    ]
