"""Causal structure and time separation on the Heisenberg group.

After left-translating q0 to the identity, the causal future of the identity
is the set {x >= 0, -x^2 + y^2 + 4|z| <= 0} and its interior is the
chronological future.  The time separation tau(q0, q) (sup of lengths of
causal curves joining the points) has an explicit form built from the
inverse of

    alpha(t) = (sinh(2t) - 2t) / (8 sinh(t)^2),

an odd, strictly increasing bijection of the real line onto (-1/4, 1/4).
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

from .errors import NotCausalChain, NotChronological, OutOfDomain
from .heisenberg import GroupPoint, group_difference

DEFAULT_SLACK = 1e-12


class PlanarPoint(NamedTuple):
    x: float
    y: float


class CausalRelation(enum.Enum):
    CHRONOLOGICAL = "Chronological"
    CAUSAL_NULL = "CausalNull"
    UNRELATED = "Unrelated"


def classify(q0: GroupPoint, q: GroupPoint, slack: float = DEFAULT_SLACK) -> CausalRelation:
    """Causal relation of q relative to q0.

    Evaluates F = -x^2 + y^2 + 4|z| on the group difference q0^{-1} q.
    F < 0 with x > 0 is the open chronological future; F = 0 with x >= 0 is
    the null boundary (reachable, zero time separation).  The slack absorbs
    roundoff on points constructed to lie on the boundary; callers needing a
    different margin pass their own.
    """
    d = group_difference(q0, q)
    f = -d.x * d.x + d.y * d.y + 4.0 * abs(d.z)
    if f < -slack and d.x > 0.0:
        return CausalRelation.CHRONOLOGICAL
    if f <= slack and d.x >= -slack:
        return CausalRelation.CAUSAL_NULL
    return CausalRelation.UNRELATED


# Series branches: the closed forms for alpha and alpha' lose digits to
# cancellation near 0, so below the pinned thresholds we use the leading
# Taylor terms instead.  Three terms keep the error far below 1e-13 at the
# switch point.

_ALPHA_SERIES_CUT = 1e-3


def alpha(t: float) -> float:
    """(sinh(2t) - 2t) / (8 sinh(t)^2), extended by alpha(0) = 0.

    Odd and strictly increasing with range (-1/4, 1/4).
    """
    if abs(t) < _ALPHA_SERIES_CUT:
        t2 = t * t
        return t * (1.0 / 6.0 + t2 * (-1.0 / 45.0 + t2 / 315.0))
    sh = math.sinh(t)
    return (math.sinh(2.0 * t) - 2.0 * t) / (8.0 * sh * sh)


def alpha_prime(t: float) -> float:
    """Derivative of alpha; equals 1/2 - 2 alpha(t) coth(t) away from 0."""
    if abs(t) < _ALPHA_SERIES_CUT:
        t2 = t * t
        return 1.0 / 6.0 + t2 * (-1.0 / 15.0 + t2 / 63.0)
    return 0.5 - 2.0 * alpha(t) * (math.cosh(t) / math.sinh(t))


def beta(zeta: float, tol: float = 1e-13, max_iter: int = 200) -> float:
    """Inverse of alpha on (-1/4, 1/4).

    Safeguarded Newton iteration: steps that leave the current bracket fall
    back to bisection, so convergence is unconditional.  Raises OutOfDomain
    for |zeta| >= 1/4.
    """
    if not abs(zeta) < 0.25:
        raise OutOfDomain(f"beta requires |zeta| < 1/4, got {zeta!r}")
    if zeta == 0.0:
        return 0.0
    sign = 1.0 if zeta > 0.0 else -1.0
    target = abs(zeta)

    lo = 0.0
    hi = max(8.0 * target, 1e-8)
    while alpha(hi) < target:
        hi *= 2.0
        if hi > 64.0:
            # alpha(64) is within 1e-50 of 1/4; no double below 1/4 needs more.
            break

    b = min(8.0 * target, hi)
    for _ in range(max_iter):
        f = alpha(b) - target
        if abs(f) <= tol:
            break
        if f > 0.0:
            hi = b
        else:
            lo = b
        df = alpha_prime(b)
        nb = b - f / df if df > 0.0 else lo
        b = nb if lo < nb < hi else 0.5 * (lo + hi)
        if hi - lo <= 1e-16 * max(1.0, hi):
            break
    return sign * b


def tau(q0: GroupPoint, q: GroupPoint, slack: float = DEFAULT_SLACK) -> float:
    """Time separation between q0 and q.

    Zero unless q is in the open chronological future of q0; there, with
    (x, y, z) the group difference, m = x^2 - y^2 and b = beta(z / m),

        tau = sqrt(m) * b / sinh(b)      (= sqrt(m) at b = 0).
    """
    if classify(q0, q, slack) is not CausalRelation.CHRONOLOGICAL:
        return 0.0
    d = group_difference(q0, q)
    m = (d.x - d.y) * (d.x + d.y)
    b = beta(d.z / m)
    if b == 0.0:
        return math.sqrt(m)
    return math.sqrt(m) * b / math.sinh(b)


def minkowski_tau(u: PlanarPoint, v: PlanarPoint) -> float:
    """Time separation in the Minkowski plane with cone {dx >= |dy|}."""
    dx = v.x - u.x
    dy = v.y - u.y
    if dx < abs(dy):
        return 0.0
    return math.sqrt((dx - dy) * (dx + dy))


def causal_diamond_bbox(q0: GroupPoint, q1: GroupPoint):
    """Axis-aligned box containing the causal diamond J+(q0) n J-(q1).

    Returned in coordinates translated so q0 sits at the identity:
    ((0, x1), (-x1, x1), (-x1^2/4, x1^2/4)) with x1 the first coordinate of
    the group difference.  Requires q1 chronologically after q0.
    """
    if classify(q0, q1) is not CausalRelation.CHRONOLOGICAL:
        raise NotChronological(f"{q1!r} is not chronologically after {q0!r}")
    x1 = group_difference(q0, q1).x
    zmax = 0.25 * x1 * x1
    return ((0.0, x1), (-x1, x1), (-zmax, zmax))


def tau_partition_length(points) -> float:
    """Sum of tau over consecutive pairs of a causal chain.

    Raises NotCausalChain when some consecutive pair is unrelated.  On exact
    geodesic samples the sum is independent of the partition; on generic
    causal curves it decreases as the partition refines, approaching the
    curve's length from above.
    """
    total = 0.0
    for k in range(len(points) - 1):
        a, b = points[k], points[k + 1]
        if classify(a, b) is CausalRelation.UNRELATED:
            raise NotCausalChain(f"points {k} and {k + 1} are causally unrelated")
        total += tau(a, b)
    return total
