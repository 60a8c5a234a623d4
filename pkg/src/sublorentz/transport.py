"""Causal optimal transport between discrete measures on the Heisenberg group.

The Kantorovich problem here is a maximization: couplings must respect the
causal order (mass moves only into the causal future, null boundary allowed
at zero gain), and the objective is

    maximize  sum_ij  pi_ij * tau(x_i, y_j)^p / p,    0 < p < 1.

The concave power makes the problem well posed; the associated cost of an
optimal plan defines the Lorentz-Wasserstein distance (p * value)^(1/p).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .causality import CausalRelation, classify, tau
from .errors import InfeasibleDuals, NoCausalCoupling, WeightError
from .heisenberg import GroupPoint
from .simplex import solve_max_transport

SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class CostParams:
    """Concavity exponent p of the gain tau^p / p, with 0 < p < 1 strict."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie strictly in (0, 1), got {self.p!r}")

    def gain(self, t: float) -> float:
        """tau^p / p; zero at tau = 0."""
        if t <= 0.0:
            return 0.0
        return t**self.p / self.p


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely many weighted atoms; weights nonnegative, summing to one."""

    atoms: tuple
    weights: np.ndarray

    def __post_init__(self):
        atoms = tuple(GroupPoint(*a) for a in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if len(atoms) != w.shape[0] or w.ndim != 1:
            raise ValueError("atoms and weights must have matching length")
        for a in atoms:
            if not all(math.isfinite(v) for v in a):
                raise ValueError(f"non-finite atom {a!r}")
        if not np.all(np.isfinite(w)):
            raise WeightError("non-finite weight")
        if np.any(w < 0.0):
            raise WeightError("negative weight")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise WeightError(f"weights sum to {float(w.sum())!r}, expected 1")

    def __len__(self):
        return len(self.atoms)


@dataclass(frozen=True)
class CostMatrix:
    """Pairwise gains and causal feasibility between two atom families.

    values[i, j] is tau(x_i, y_j)^p / p for chronological pairs, zero for
    null or unrelated ones; feasible[i, j] is True unless the pair is
    causally unrelated.
    """

    values: np.ndarray
    feasible: np.ndarray
    params: CostParams


def cost_matrix(mu: DiscreteMeasure, nu: DiscreteMeasure, params: CostParams) -> CostMatrix:
    n, m = len(mu), len(nu)
    values = np.zeros((n, m))
    feasible = np.zeros((n, m), dtype=bool)
    for i, x in enumerate(mu.atoms):
        for j, y in enumerate(nu.atoms):
            rel = classify(x, y)
            if rel is CausalRelation.UNRELATED:
                continue
            feasible[i, j] = True
            if rel is CausalRelation.CHRONOLOGICAL:
                values[i, j] = params.gain(tau(x, y))
    return CostMatrix(values, feasible, params)


@dataclass(frozen=True)
class TransportPlan:
    masses: np.ndarray
    value: float

    def support(self):
        """Index pairs carrying more than SUPPORT_TOL mass."""
        n, m = self.masses.shape
        return [
            (i, j) for i in range(n) for j in range(m) if self.masses[i, j] > SUPPORT_TOL
        ]


@dataclass(frozen=True)
class DualPotentials:
    phi: np.ndarray
    psi: np.ndarray


def solve_kantorovich(mu: DiscreteMeasure, nu: DiscreteMeasure, params: CostParams):
    """Exact optimal plan and dual potentials for the causal problem.

    Returns (TransportPlan, DualPotentials).  The duals satisfy
    psi[j] - phi[i] >= c[i,j] on every causally feasible pair, with equality
    on the support of the plan.  Raises NoCausalCoupling when the feasible
    pairs cannot carry the full mass.
    """
    cm = cost_matrix(mu, nu, params)
    masses, phi, psi = solve_max_transport(cm.values, cm.feasible, mu.weights, nu.weights)
    value = float(np.sum(masses * cm.values))
    return TransportPlan(masses, value), DualPotentials(phi, psi)


def strengthen_duals(plan: TransportPlan, cost: CostMatrix, margin_cap: float = 1e3) -> DualPotentials:
    """Move optimal duals into the interior of the dual optimal face.

    The simplex returns a vertex of the dual polytope, where constraints
    beyond the plan's support are tight (degenerate basic arcs).  Potential
    branches then tie at source atoms and gradient-based maps have to skip
    them.  This pass keeps the support equalities (so the pair stays optimal
    and the duality gap stays at roundoff) and pushes every off-support
    feasible slack up to roughly half the largest margin the face allows,
    found by binary search with a longest-path feasibility check.

    A margin of zero can be genuinely unimprovable (ties between optimal
    plans); the returned duals are then the minimal feasible ones.
    """
    n, m = plan.masses.shape
    support = plan.support()
    sup_set = set(support)
    edges_eq = []
    for i, j in support:
        c = cost.values[i, j]
        edges_eq.append((i, n + j, c))
        edges_eq.append((n + j, i, -c))
    slack_arcs = [
        (i, n + j, cost.values[i, j])
        for i in range(n)
        for j in range(m)
        if cost.feasible[i, j] and (i, j) not in sup_set
    ]
    n_nodes = n + m

    def solve_margin(margin):
        # least potentials with pi_v >= pi_u + w on all edges; None when the
        # constraints carry a positive cycle (margin too large).
        pi = [0.0] * n_nodes
        edges = edges_eq + [(u, v, w + margin) for (u, v, w) in slack_arcs]
        for _ in range(n_nodes + 1):
            changed = False
            for u, v, w in edges:
                need = pi[u] + w
                if need > pi[v] + 1e-13:
                    pi[v] = need
                    changed = True
            if not changed:
                return pi
        return None

    if solve_margin(0.0) is None:
        raise InfeasibleDuals("support equalities admit no feasible duals")
    lo, hi = 0.0, 1.0
    while solve_margin(hi) is not None:
        lo = hi
        hi *= 4.0
        if hi > margin_cap:
            break
    if solve_margin(hi) is None:
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if solve_margin(mid) is not None:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-9 + 1e-6 * lo:
                break
    pi = solve_margin(0.5 * lo)
    return DualPotentials(np.array(pi[:n]), np.array(pi[n:]))


def lorentz_wasserstein(mu: DiscreteMeasure, nu: DiscreteMeasure, params: CostParams) -> float:
    """(p * optimal value)^(1/p); -inf when no causal coupling exists."""
    try:
        plan, _ = solve_kantorovich(mu, nu, params)
    except NoCausalCoupling:
        return -math.inf
    return (params.p * plan.value) ** (1.0 / params.p)


def duality_gap(
    plan: TransportPlan,
    duals: DualPotentials,
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    cost: CostMatrix,
    feas_tol: float = 1e-9,
) -> float:
    """Dual objective minus primal value; near zero certifies optimality.

    Raises InfeasibleDuals when psi[j] - phi[i] >= c[i,j] fails by more than
    feas_tol on a causally feasible pair.
    """
    slack = duals.psi[None, :] - duals.phi[:, None] - cost.values
    worst = float(np.min(np.where(cost.feasible, slack, np.inf)))
    if worst < -feas_tol:
        raise InfeasibleDuals(f"dual constraint violated by {-worst:.3e}")
    dual_value = float(np.dot(duals.psi, nu.weights) - np.dot(duals.phi, mu.weights))
    return dual_value - plan.value


def brute_force_plan(mu: DiscreteMeasure, nu: DiscreteMeasure, params: CostParams) -> TransportPlan:
    """Exhaustive optimum over permutation couplings.

    Only valid for n == m <= 8 with uniform weights on both sides, where
    the optimal plan may be taken to be a permutation.  Ties resolve to the
    lexicographically smallest assignment, so results are deterministic.
    """
    n = len(mu)
    if len(nu) != n or n > 8 or n == 0:
        raise ValueError("brute force requires n == m <= 8")
    for w in (mu.weights, nu.weights):
        if np.max(np.abs(w - 1.0 / n)) > 1e-12:
            raise ValueError("brute force requires uniform weights")
    cm = cost_matrix(mu, nu, params)
    best_value = None
    best_perm = None
    for perm in itertools.permutations(range(n)):
        if not all(cm.feasible[i, perm[i]] for i in range(n)):
            continue
        value = sum(cm.values[i, perm[i]] for i in range(n)) / n
        if best_value is None or value > best_value:
            best_value = value
            best_perm = perm
    if best_perm is None:
        raise NoCausalCoupling("every permutation hits a non-causal pair")
    masses = np.zeros((n, n))
    for i, j in enumerate(best_perm):
        masses[i, j] = 1.0 / n
    return TransportPlan(masses, float(best_value))


@dataclass(frozen=True)
class MonotonicityReport:
    """Outcome of a cyclical monotonicity audit over a plan's support.

    worst_violation > 0 means a cycle of support pairs was found whose
    reassigned gains beat the original ones, which contradicts optimality.
    Reassignments that route mass through a causally unrelated pair are not
    admissible couplings at all, so such cycles can never witness a
    violation; advisory is True when the support rectangle contains
    unrelated pairs and some cycles were vacuous for that reason.
    """

    worst_violation: float
    worst_cycle: tuple = ()
    cycles_checked: int = 0
    exhaustive: bool = True
    advisory: bool = False


def check_cyclical_monotonicity(
    plan: TransportPlan,
    cost: CostMatrix,
    max_cycle: int = 6,
    seed: int = 0,
    samples_per_length: int = 2000,
) -> MonotonicityReport:
    """Search support cycles for gain-improving reassignments.

    Exhaustive over all cycles up to max_cycle when the support has at most
    12 pairs; otherwise a seeded random search, so repeated runs agree.
    """
    support = plan.support()
    rows = sorted({i for i, _ in support})
    cols = sorted({j for _, j in support})
    advisory = not all(cost.feasible[i, j] for i in rows for j in cols)

    vals = cost.values
    feas = cost.feasible
    worst = 0.0
    worst_cycle = ()
    checked = 0

    def violation(order):
        base = 0.0
        moved = 0.0
        k = len(order)
        for t in range(k):
            i_cur, j_cur = support[order[t]]
            i_next = support[order[(t + 1) % k]][0]
            if not feas[i_next, j_cur]:
                return -math.inf
            base += vals[i_cur, j_cur]
            moved += vals[i_next, j_cur]
        return moved - base

    exhaustive = len(support) <= 12
    if exhaustive:
        indices = range(len(support))
        for k in range(2, max_cycle + 1):
            for combo in itertools.combinations(indices, k):
                first = combo[0]
                for rest in itertools.permutations(combo[1:]):
                    order = (first,) + rest
                    checked += 1
                    v = violation(order)
                    if v > worst:
                        worst = v
                        worst_cycle = tuple(support[s] for s in order)
    else:
        rng = np.random.default_rng(seed)
        for k in range(2, min(max_cycle, len(support)) + 1):
            for _ in range(samples_per_length):
                order = tuple(rng.choice(len(support), size=k, replace=False))
                checked += 1
                v = violation(order)
                if v > worst:
                    worst = v
                    worst_cycle = tuple(support[s] for s in order)

    return MonotonicityReport(worst, worst_cycle, checked, exhaustive, advisory)
