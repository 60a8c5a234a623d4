"""Measure file format, CSV writers, samplers, histogram densities."""

import math

import numpy as np
import pytest

from sublorentz.causality import CausalRelation, classify
from sublorentz.errors import GenerationFailure, ParseError, WeightError
from sublorentz.heisenberg import GroupPoint
from sublorentz.measures_io import (
    HEADER,
    histogram_density,
    load_measure,
    sample_chronological_pair,
    sample_diamond,
    sample_uniform_box,
    save_measure,
    save_plan,
    save_trajectory,
)
from sublorentz.transport import (
    CostParams,
    DiscreteMeasure,
    cost_matrix,
    solve_kantorovich,
)

P = CostParams(0.5)


def test_roundtrip_preserves_awkward_floats(tmp_path):
    atoms = (
        GroupPoint(0.30000000000000004, -1e-17, math.pi),
        GroupPoint(1.0, 2.0, -3.0),
    )
    mu = DiscreteMeasure(atoms, np.array([0.125, 0.875]))
    path = tmp_path / "m.txt"
    save_measure(mu, path)
    back = load_measure(path)
    assert back.atoms == atoms
    assert np.array_equal(back.weights, mu.weights)
    text = path.read_text()
    assert text.splitlines()[0] == HEADER
    assert text.count("atom ") == 2


def test_load_skips_comments_and_blanks(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text(
        f"{HEADER}\n\n# a comment\natom 0 0 0 0.5\n# another\natom 1 0 0 0.5\n"
    )
    mu = load_measure(path)
    assert len(mu.atoms) == 2


def test_load_renormalizes_small_drift(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text(f"{HEADER}\natom 0 0 0 0.5000001\natom 1 0 0 0.5\n")
    mu = load_measure(path)
    assert mu.weights.sum() == pytest.approx(1.0, abs=1e-15)


def test_load_rejects_large_weight_drift(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text(f"{HEADER}\natom 0 0 0 0.6\natom 1 0 0 0.5\n")
    with pytest.raises(WeightError):
        load_measure(path)


def test_load_rejects_negative_weight(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text(f"{HEADER}\natom 0 0 0 1.5\natom 1 0 0 -0.5\n")
    with pytest.raises(WeightError):
        load_measure(path)


@pytest.mark.parametrize(
    "body, needle",
    [
        ("wrong-header\natom 0 0 0 1\n", "line 1"),
        (f"{HEADER}\npoint 0 0 0 1\n", "line 2"),
        (f"{HEADER}\natom 0 0 1\n", "line 2"),
        (f"{HEADER}\natom 0 0 zero 1\n", "line 2"),
        (f"{HEADER}\natom 0 0 inf 1\n", "line 2"),
        ("", "empty"),
        (f"{HEADER}\n# nothing else\n", "no atoms"),
    ],
)
def test_parse_errors_carry_context(tmp_path, body, needle):
    path = tmp_path / "bad.txt"
    path.write_text(body)
    with pytest.raises(ParseError) as err:
        load_measure(path)
    assert needle in str(err.value)


def test_save_plan_cost_column_sums_to_value(tmp_path):
    mu = DiscreteMeasure(
        (GroupPoint(0, 0, 0), GroupPoint(0.2, 0, 0)), np.array([0.5, 0.5])
    )
    nu = DiscreteMeasure(
        (GroupPoint(2, 0, 0), GroupPoint(3, 0, 0)), np.array([0.5, 0.5])
    )
    plan, _ = solve_kantorovich(mu, nu, P)
    cm = cost_matrix(mu, nu, P)
    path = tmp_path / "plan.csv"
    save_plan(plan, cm, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "i,j,mass,cost"
    total_mass = total_cost = 0.0
    for row in lines[1:]:
        i, j, mass, cost = row.split(",")
        total_mass += float(mass)
        total_cost += float(cost)
    assert total_mass == pytest.approx(1.0, abs=1e-12)
    assert total_cost == pytest.approx(plan.value, abs=1e-12)


def test_save_trajectory(tmp_path):
    rows = [(0.0, GroupPoint(0, 0, 0)), (0.5, GroupPoint(0.1, 0.2, 0.3))]
    path = tmp_path / "tr.csv"
    save_trajectory(rows, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,x,y,z"
    assert lines[2].startswith("0.5,")
    assert len(lines) == 3


def test_sample_uniform_box_duplicates_are_deterministic():
    box = ((0, 1), (-1, 1), (0, 0.5))
    a = sample_uniform_box(box, 20, seed=5)
    b = sample_uniform_box(box, 20, seed=5)
    assert a.atoms == b.atoms
    assert np.allclose(a.weights, 0.05)
    for atom in a.atoms:
        assert 0 <= atom.x <= 1 and -1 <= atom.y <= 1 and 0 <= atom.z <= 0.5


def test_sample_diamond_lands_inside():
    q0 = GroupPoint(0.1, -0.1, 0.05)
    q1 = GroupPoint(2.1, -0.1, 0.05 + 0.1)
    pts = sample_diamond(q0, q1, 40, rng=3)
    assert len(pts) == 40
    for d in pts:
        assert classify(q0, d) is CausalRelation.CHRONOLOGICAL
        assert classify(d, q1) is CausalRelation.CHRONOLOGICAL


def test_sample_diamond_gives_up_gracefully():
    q0 = GroupPoint(0, 0, 0)
    q1 = GroupPoint(2, 0, 0)
    with pytest.raises(GenerationFailure):
        sample_diamond(q0, q1, 50, rng=0, max_tries=3)


def test_sample_chronological_pair_rectangle():
    mu, nu = sample_chronological_pair(4, 6, seed=8, weights="random")
    assert len(mu.atoms) == 4 and len(nu.atoms) == 6
    assert mu.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert nu.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert (mu.weights > 0).all() and (nu.weights > 0).all()
    for a in mu.atoms:
        for b in nu.atoms:
            assert classify(a, b) is CausalRelation.CHRONOLOGICAL


def test_histogram_density_uniform_box():
    box = ((0.0, 2.0), (0.0, 1.0), (0.0, 1.0))
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 1, size=(20000, 3))
    pts[:, 0] *= 2.0
    dens = histogram_density(pts, box, bins=4)
    # the box has volume 2, so a uniform cloud has density ~ 1/2
    probes = rng.uniform(0.05, 0.95, size=(50, 3))
    probes[:, 0] *= 2.0
    vals = [dens(GroupPoint(*p)) for p in probes]
    assert np.mean(vals) == pytest.approx(0.5, rel=0.05)
    assert dens(GroupPoint(5.0, 0.5, 0.5)) == 0.0


def test_histogram_density_concentrates_mass():
    box = ((0.0, 1.0), (0.0, 1.0), (0.0, 1.0))
    dens = histogram_density([(0.75, 0.75, 0.75)], box, bins=2)
    # all mass in one of eight cells of volume 1/8
    assert dens(GroupPoint(0.6, 0.6, 0.6)) == pytest.approx(8.0)
    assert dens(GroupPoint(0.2, 0.2, 0.2)) == 0.0
    with pytest.raises(ValueError):
        histogram_density([(0.5, 0.5, 0.5)], box, bins=1)
