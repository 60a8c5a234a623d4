"""Measure files, plan/trajectory export, and seeded instance generators.

The measure format is line-oriented text with an explicit schema version,
so fixtures diff cleanly:

    sublorentz-measure v1
    atom 0 0 0 0.5
    atom 0.2 0 0 0.5

Floats serialize at 17 significant digits, which roundtrips doubles exactly.
Blank lines and lines starting with '#' are ignored.
"""

from __future__ import annotations

import math

import numpy as np

from .causality import DEFAULT_SLACK, CausalRelation, causal_diamond_bbox, classify
from .errors import GenerationFailure, ParseError, WeightError
from .heisenberg import GroupPoint, group_difference, mul
from .transport import CostMatrix, DiscreteMeasure, TransportPlan

HEADER = "sublorentz-measure v1"
WEIGHT_SUM_TOL = 1e-6


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def save_measure(measure: DiscreteMeasure, path) -> None:
    lines = [HEADER]
    for atom, w in zip(measure.atoms, measure.weights):
        lines.append(f"atom {_fmt(atom.x)} {_fmt(atom.y)} {_fmt(atom.z)} {_fmt(float(w))}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_measure(path) -> DiscreteMeasure:
    """Parse a measure file; weights off by at most 1e-6 are renormalized."""
    atoms = []
    weights = []
    seen_header = False
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if not seen_header:
                if line != HEADER:
                    raise ParseError(f"line {lineno}: expected header {HEADER!r}, got {line!r}")
                seen_header = True
                continue
            fields = line.split()
            if fields[0] != "atom":
                raise ParseError(f"line {lineno}: expected 'atom', got {fields[0]!r}")
            if len(fields) != 5:
                raise ParseError(f"line {lineno}: expected 4 numbers after 'atom', got {len(fields) - 1}")
            try:
                x, y, z, w = (float(f) for f in fields[1:])
            except ValueError as err:
                raise ParseError(f"line {lineno}: {err}") from None
            if not all(math.isfinite(v) for v in (x, y, z, w)):
                raise ParseError(f"line {lineno}: non-finite value")
            atoms.append(GroupPoint(x, y, z))
            weights.append(w)
    if not seen_header:
        raise ParseError("empty file: missing header")
    if not atoms:
        raise ParseError("no atoms: file has a header but no atom records")
    w = np.array(weights, dtype=float)
    if w.size and np.any(w < 0.0):
        bad = int(np.argmax(w < 0.0))
        raise WeightError(f"atom {bad}: negative weight {w[bad]!r}")
    total = float(w.sum())
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise WeightError(f"weights sum to {total!r}, expected 1 within {WEIGHT_SUM_TOL}")
    return DiscreteMeasure(tuple(atoms), w / total)


def save_plan(plan: TransportPlan, cost: CostMatrix, path) -> None:
    """Plan CSV: one row per support pair; cost column is the row's
    contribution mass * c[i,j], so the column sums to the plan value."""
    lines = ["i,j,mass,cost"]
    for i, j in plan.support():
        mass = float(plan.masses[i, j])
        lines.append(f"{i},{j},{_fmt(mass)},{_fmt(mass * float(cost.values[i, j]))}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def save_trajectory(rows, path) -> None:
    """Trajectory CSV with columns t,x,y,z; rows are (t, GroupPoint)."""
    lines = ["t,x,y,z"]
    for t, pt in rows:
        lines.append(f"{_fmt(t)},{_fmt(pt.x)},{_fmt(pt.y)},{_fmt(pt.z)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def sample_uniform_box(box, n: int, seed: int) -> DiscreteMeasure:
    """n uniform atoms in an axis-aligned box, uniform weights."""
    rng = np.random.default_rng(seed)
    (xlo, xhi), (ylo, yhi), (zlo, zhi) = box
    atoms = tuple(
        GroupPoint(rng.uniform(xlo, xhi), rng.uniform(ylo, yhi), rng.uniform(zlo, zhi))
        for _ in range(n)
    )
    return DiscreteMeasure(atoms, np.full(n, 1.0 / n))


def sample_diamond(q0: GroupPoint, q1: GroupPoint, n: int, rng, max_tries: int = 4_000_000):
    """n points strictly inside the causal diamond between q0 and q1.

    Vectorized rejection sampling from the diamond's bounding box; the accept
    predicate evaluates the same cone expressions as classify, so returned
    points are strictly chronological after q0 and strictly before q1.
    Acceptance rates hover around a percent for elongated diamonds, hence the
    generous try budget.  rng is a numpy Generator or a seed; max_tries
    counts raw box draws.
    """
    if not hasattr(rng, "uniform"):
        rng = np.random.default_rng(rng)
    box = causal_diamond_bbox(q0, q1)
    ax, ay, az = group_difference(q0, q1)
    lo = np.array([box[0][0], box[1][0], box[2][0]])
    hi = np.array([box[0][1], box[1][1], box[2][1]])
    out = []
    tries = 0
    while len(out) < n and tries < max_tries:
        chunk = int(min(max(4096, 150 * (n - len(out))), max_tries - tries))
        draws = rng.uniform(lo, hi, size=(chunk, 3))
        tries += chunk
        x, y, z = draws[:, 0], draws[:, 1], draws[:, 2]
        f0 = -x * x + y * y + 4.0 * np.abs(z)
        dx = ax - x
        dy = ay - y
        dz = (az - z) + 0.5 * (ax * y - x * ay)
        f1 = -dx * dx + dy * dy + 4.0 * np.abs(dz)
        keep = (f0 < -DEFAULT_SLACK) & (x > 0.0) & (f1 < -DEFAULT_SLACK) & (dx > 0.0)
        for row in draws[keep]:
            if len(out) == n:
                break
            out.append(mul(q0, GroupPoint(*row)))
    if len(out) < n:
        raise GenerationFailure(f"diamond sampling got {len(out)}/{n} points")
    return tuple(out)


def sample_chronological_pair(n: int, m: int, seed: int, weights: str = "uniform"):
    """Seeded instance pair (mu, nu) with every (x, y) strictly chronological.

    mu lives in the diamond from the identity to (2,0,0), nu in the diamond
    from (2,0,0) to (4,0,0); transitivity of the open causal order then makes
    the whole rectangle chronological, which is verified exhaustively before
    returning.  weights is "uniform" or "random".
    """
    rng = np.random.default_rng(seed)
    a = GroupPoint(2.0, 0.0, 0.0)
    b = GroupPoint(4.0, 0.0, 0.0)
    mu_atoms = sample_diamond(GroupPoint(0.0, 0.0, 0.0), a, n, rng)
    nu_atoms = sample_diamond(a, b, m, rng)
    for x in mu_atoms:
        for y in nu_atoms:
            if classify(x, y) is not CausalRelation.CHRONOLOGICAL:
                raise GenerationFailure(f"rectangle pair ({x!r}, {y!r}) not chronological")
    if weights == "uniform":
        wa = np.full(n, 1.0 / n)
        wb = np.full(m, 1.0 / m)
    elif weights == "random":
        wa = rng.random(n) + 0.1
        wa /= wa.sum()
        wb = rng.random(m) + 0.1
        wb /= wb.sum()
    else:
        raise ValueError(f"unknown weights mode {weights!r}")
    return DiscreteMeasure(mu_atoms, wa), DiscreteMeasure(nu_atoms, wb)


def histogram_density(data, box, bins=8):
    """Histogram density estimate over a box; returns a callable q -> float.

    data is a DiscreteMeasure or an iterable of points; bins is an int or a
    triple.  Bin mass is normalized per unit coordinate volume, so the
    callback integrates to the sampled mass fraction inside the box.  Points
    outside the box score zero.
    """
    if isinstance(data, DiscreteMeasure):
        pts = np.array([[a.x, a.y, a.z] for a in data.atoms])
        w = np.asarray(data.weights, float)
    else:
        pts = np.array([[p[0], p[1], p[2]] for p in data])
        w = np.full(len(pts), 1.0 / len(pts))
    if isinstance(bins, int):
        bins = (bins, bins, bins)
    if min(bins) < 2:
        raise ValueError("need at least 2 bins per axis")
    lows = np.array([lo for lo, _ in box])
    highs = np.array([hi for _, hi in box])
    hist, _ = np.histogramdd(pts, bins=bins, range=tuple(box), weights=w)
    widths = (highs - lows) / np.asarray(bins)
    volume = float(np.prod(widths))
    dens = hist / volume

    def density(q) -> float:
        v = np.array([q[0], q[1], q[2]])
        if np.any(v < lows) or np.any(v > highs):
            return 0.0
        idx = np.minimum(((v - lows) / widths).astype(int), np.asarray(bins) - 1)
        return float(dens[tuple(idx)])

    return density
