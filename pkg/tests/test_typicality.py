import itertools
import math

import numpy as np
import pytest

from entlab import qcore, typicality


def test_deterministic_source_has_single_member():
    ts = typicality.typical_set([1.0, 0.0], n=8, delta=0.01)
    assert ts.cardinality == 1
    assert ts.total_probability == pytest.approx(1.0, abs=1e-12)
    assert list(ts.members()) == [(0,) * 8]


def test_uniform_source_every_string_is_typical():
    ts = typicality.typical_set([0.5, 0.5], n=6, delta=0.5)
    assert ts.cardinality == 64
    assert ts.total_probability == pytest.approx(1.0, abs=1e-12)


def test_biased_source_against_exhaustive_enumeration():
    p = np.array([0.9, 0.1])
    n, delta = 20, 0.05
    ts = typicality.typical_set(p, n, delta)
    # Brute force over all 2^20 strings via popcounts.
    ones = np.array([bin(k).count("1") for k in range(2**n)])
    typical = (np.abs(ones / n - p[1]) <= delta + 1e-12) & (np.abs((n - ones) / n - p[0]) <= delta + 1e-12)
    probs = p[1] ** ones * p[0] ** (n - ones)
    assert ts.cardinality == int(typical.sum())
    assert ts.total_probability == pytest.approx(float(probs[typical].sum()), abs=1e-12)
    assert ts.min_prob == pytest.approx(float(probs[typical].min()), abs=1e-15)
    h = qcore.shannon_entropy(p)
    c = typicality.typicality_constant(p)
    assert ts.max_prob <= 2 ** (-n * (h - c * delta)) * (1 + 1e-9)
    assert ts.min_prob >= 2 ** (-n * (h + c * delta)) * (1 - 1e-9)
    assert ts.cardinality <= 2 ** (n * (h + c * delta))
    assert ts.cardinality >= (1 - (1 - ts.total_probability)) * 2 ** (n * (h - c * delta)) * (1 - 1e-9)


def test_membership_probe():
    ts = typicality.typical_set([0.75, 0.25], n=8, delta=0.15)
    assert ts.contains([0] * 6 + [1] * 2)
    assert not ts.contains([1] * 8)


def test_projector_checks_on_biased_qubit():
    state = qcore.make_state([("A", 2)], np.diag([0.8, 0.2]).astype(complex))
    report = typicality.typical_projector_checks(state, n=10, delta=0.1)
    assert report.mass_ok
    assert report.eigenvalue_sandwich_ok
    assert report.cardinality_sandwich_ok
    assert report.purity_bound_ok
    assert report.gentle_ok
    assert report.gentle_lhs <= 2 * math.sqrt(report.epsilon) + 1e-12


def test_projector_checks_pure_state_trivial():
    state = qcore.make_state([("A", 2)], np.diag([1.0, 0.0]).astype(complex))
    report = typicality.typical_projector_checks(state, n=6, delta=0.05)
    assert report.epsilon == pytest.approx(0.0, abs=1e-12)
    assert report.gentle_lhs == pytest.approx(0.0, abs=1e-12)


def test_projector_cap_enforced():
    state = qcore.max_mixed(3)
    with pytest.raises(qcore.StateError):
        typicality.typical_projector_checks(state, n=9, delta=0.1)


def test_gentle_measurement_matrix_level():
    rng = np.random.default_rng(5)
    rho = qcore.random_density([4], rng)
    proj = np.zeros((4, 4))
    proj[:3, :3] = np.eye(3)
    lhs, rhs = typicality.gentle_measurement_defect(rho, proj)
    assert lhs <= rhs + 1e-12


def test_projector_union_bound_on_commuting_projectors():
    rng = np.random.default_rng(7)
    for _ in range(20):
        diags = [np.diag(rng.integers(0, 2, 8).astype(float)) for _ in range(3)]
        assert typicality.projector_union_bound_defect(diags) >= -1e-12


def test_hoeffding_floor_matches_direct_mass():
    p = np.array([0.7, 0.3])
    n, delta = 12, 0.2
    ts = typicality.typical_set(p, n, delta)
    assert ts.total_probability >= 1 - 2 * 2 * math.exp(-2 * n * delta**2) - 1e-12


def test_blocking_construction_bounds_evaluate():
    out = typicality.blocking_construction_bounds(
        s1=10**6, delta1=1e-2, delta2=1e-2, d1=2, d2=2, entropies=(1.5, 1.0, 1.0)
    )
    assert out["epsilon"] < 1e-9
    assert out["s2"] > out["n"] ** 0.0  # positive stage size
    assert out["nu"] < 1e-9
    assert out["joint_purity_exponent"] < 0


def test_multiparty_predicate_is_reported_not_asserted():
    report = typicality.multiparty_typicality_case(
        {},
        n=100,
        entropies={frozenset({"C1"}): 1.0, frozenset({"C1", "C2", "C3"}): 2.0},
        slack={frozenset({"C1"}): 0.1, frozenset({"C1", "C2", "C3"}): 0.1},
    )
    assert report[("C1",)]["proved"]
    assert not report[("C1", "C2", "C3")]["proved"]
