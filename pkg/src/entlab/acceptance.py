"""Acceptance suite: one callable per criterion, shared by ``entlab verify``
and the pytest wrapper.  Every tolerance is pinned here."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import assisted, decoupling, entropy, protocols, qcore, regions, typicality

ACCEPTANCE_SEED = qcore.DEFAULT_SEED


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    detail: str
    seconds: float


class _Checks:
    def __init__(self):
        self.failures: list[str] = []
        self.notes: list[str] = []

    def expect(self, ok: bool, message: str) -> None:
        if not ok:
            self.failures.append(message)

    def note(self, message: str) -> None:
        self.notes.append(message)

    def detail(self) -> str:
        if self.failures:
            return "; ".join(self.failures)
        return "; ".join(self.notes) if self.notes else "ok"


def criterion_twirl_identity(c: _Checks) -> None:
    """Sampled two-copy twirl matches r I + s F entrywise within 5e-3, under 30 s."""
    start = time.perf_counter()
    for d, rank in ((2, 1), (4, 2), (4, 3)):
        report = decoupling.twirl_average_check(d, rank, samples=20000, seed=ACCEPTANCE_SEED)
        expected_r = Fraction(rank * (d - rank), d * (d * d - 1))
        expected_s = Fraction(rank * (rank * d - 1), d * (d * d - 1))
        c.expect(report.r == expected_r and report.s == expected_s, f"(d={d},L={rank}) coefficient mismatch")
        c.expect(report.max_deviation <= 5e-3, f"(d={d},L={rank}) deviation {report.max_deviation:.2e} > 5e-3")
        c.note(f"d={d},L={rank}: dev={report.max_deviation:.2e}")
    elapsed = time.perf_counter() - start
    c.expect(elapsed < 30.0, f"twirl runtime {elapsed:.1f}s over the 30 s budget")


def _two_sender_state() -> qcore.LabeledState:
    parts = qcore.tensor(qcore.max_entangled(2, ("C1", "C2a")), qcore.max_entangled(2, ("C2b", "R")))
    return qcore.merge_systems(parts, {"C2": ["C2a", "C2b"]})


def criterion_decoupling_bound(c: _Checks) -> None:
    """Empirical mean + 2 stderr stays below the analytic bound on both benchmarks."""
    start = time.perf_counter()
    state = _two_sender_state()
    spec = decoupling.InstrumentSpec(
        senders=(decoupling.sender("C1", 2, ancilla=1, rank=1), decoupling.sender("C2", 4, ancilla=2, rank=1)),
        seed=ACCEPTANCE_SEED,
        samples=200,
    )
    result = decoupling.simulate_random_instrument(state, spec, ["R"])
    c.expect(
        result.empirical_q + 2 * result.stderr <= result.analytic_bound,
        f"two-sender: {result.empirical_q:.4f}+2*{result.stderr:.4f} > {result.analytic_bound:.4f}",
    )
    c.note(f"two-sender Q={result.empirical_q:.4f} bound={result.analytic_bound:.4f}")

    ch5 = qcore.permute_systems(qcore.example_ch5(), ["A", "B", "R", "C1", "C2"])
    merged = qcore.merge_systems(ch5, {"C": ["C1", "C2"]})
    spec1 = decoupling.InstrumentSpec(
        senders=(decoupling.sender("C", 4, ancilla=1, rank=1),), seed=ACCEPTANCE_SEED + 1, samples=200
    )
    single = decoupling.simulate_random_instrument(merged, spec1, ["A", "R"])
    c.expect(
        single.empirical_q + 2 * single.stderr <= single.analytic_bound,
        f"single-helper: {single.empirical_q:.4f}+2*{single.stderr:.4f} > {single.analytic_bound:.4f}",
    )
    c.note(f"single-helper Q={single.empirical_q:.4f} bound={single.analytic_bound:.4f}")
    elapsed = time.perf_counter() - start
    c.expect(elapsed < 120.0, f"decoupling runtime {elapsed:.1f}s over the 2 min budget")


def criterion_entropy_engine(c: _Checks) -> None:
    """Closed-form min-entropy identities and the classical-register zero case, at 1e-6."""
    lam1 = 0.75
    for d in (2, 4, 8):
        if d <= 4:
            state = qcore.example_4_1(d, [lam1, 1 - lam1])
            rho_c1r = qcore.partial_trace(state, ["C1", "R"])
            rho_c2r = qcore.partial_trace(state, ["C2", "R"])
            rho_c12r = qcore.partial_trace(state, ["C1", "C2", "R"])
            sigma = qcore.partial_trace(state, ["R"])
        else:
            # Same reduced operators, assembled directly: the full five-system
            # state at d = 8 would exceed the dimension cap.
            sigma = qcore.max_mixed(d, "R")
            rho_c1r = qcore.tensor(qcore.max_mixed(d, "C1"), sigma)
            theta_b = qcore.make_state([("C2b", 2)], np.diag([lam1, 1 - lam1]).astype(complex))
            rho_c2r = qcore.merge_systems(
                qcore.tensor(qcore.tensor(qcore.max_mixed(d, "C2a"), theta_b), sigma),
                {"C2": ["C2a", "C2b"]},
            )
            rho_c12r = qcore.merge_systems(
                qcore.tensor(qcore.tensor(qcore.max_entangled(d, ("C1", "C2a")), theta_b), sigma),
                {"C2": ["C2a", "C2b"]},
            )
        log_d = math.log2(d)
        vals = {
            "C1R": (entropy.min_entropy_relative(rho_c1r, sigma), log_d),
            "C2R": (entropy.min_entropy_relative(rho_c2r, sigma), log_d - math.log2(lam1)),
            "C1C2R": (entropy.min_entropy_relative(rho_c12r, sigma), -math.log2(lam1)),
        }
        for key, (got, want) in vals.items():
            c.expect(abs(got - want) <= 1e-6, f"d={d} H_min({key}|R): {got!r} != {want!r}")

    rng = np.random.default_rng(ACCEPTANCE_SEED)
    d = 8
    h_d = qcore.harmonic_number(d)
    kets = [np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))[0][:, 0] for _ in range(d)]
    m = np.zeros((d * d, d * d), dtype=complex)
    for j in range(d):
        weight = 1.0 / ((j + 1) * h_d)
        reg = np.zeros((d, d))
        reg[j, j] = 1.0
        m += weight * np.kron(np.outer(kets[j], kets[j].conj()), reg)
    cq = qcore.make_state([("A", d), ("B", d)], m)
    res = entropy.conditional_min_entropy(cq, ["B"])
    c.expect(abs(res.hmin_bits) <= 1e-6, f"cq H_min(A|B) = {res.hmin_bits!r} != 0")
    c.note(f"cq residual={res.residual:.1e}")


def criterion_worked_example_numbers(c: _Checks) -> None:
    """The five-party example's coherent informations, and their CNOT invariance."""
    state = qcore.example_ch5()
    i_acb = entropy.coherent_information(state, ["A", "C1", "C2"], ["B"])
    i_abc = entropy.coherent_information(state, ["A"], ["B", "C1", "C2"])
    i_ab = entropy.coherent_information(state, ["A"], ["B"])
    s_r = entropy.von_neumann(state, ["R"])
    c.expect(abs(i_acb - 0.399) <= 0.005, f"I(AC>B) = {i_acb!r}")
    c.expect(abs(i_abc - 0.811) <= 0.005, f"I(A>BC) = {i_abc!r}")
    c.expect(i_ab < 0, f"I(A>B) = {i_ab!r} not negative")
    c.expect(abs(s_r - 0.601) <= 0.002, f"S(R) = {s_r!r}")

    faulted = qcore.example_ch5_cnot()
    i_ac1 = entropy.coherent_information(faulted, ["A"], ["C1"])
    c.expect(abs(i_ac1) <= 1e-9, f"I(A>C1) after CNOT = {i_ac1!r}")
    c.expect(
        abs(entropy.coherent_information(faulted, ["A", "C1", "C2"], ["B"]) - i_acb) <= 1e-9,
        "I(AC>B) moved under the CNOT",
    )
    c.expect(
        abs(entropy.coherent_information(faulted, ["A"], ["B", "C1", "C2"]) - i_abc) <= 1e-9,
        "I(A>BC) moved under the CNOT",
    )

    link1 = qcore.pure_state([("A", 2), ("C1", 2)], np.array([0.5, 0, 0, math.sqrt(0.75)], dtype=complex))
    link2 = qcore.partial_trace(qcore.build_state({"state": {"name": "example_ch5"}}), ["C2", "B"])
    link2 = qcore.permute_systems(link2, ["C2", "B"])
    plain = assisted.hierarchical_vs_random([link1, link2], inject_cnot=False)
    faulty = assisted.hierarchical_vs_random([link1, link2], inject_cnot=True)
    c.expect(abs(plain.hierarchical_rate - plain.random_rate) <= 1e-9, "product-form chain rates differ")
    c.expect(abs(faulty.hierarchical_rate) <= 1e-9, f"hierarchical rate {faulty.hierarchical_rate!r} after CNOT")
    c.expect(abs(faulty.random_rate - plain.random_rate) <= 1e-9, "random-strategy rate moved under the CNOT")
    c.note(f"rates: plain={plain.random_rate:.4f} cnot_hier={faulty.hierarchical_rate:.1e}")


def criterion_regions(c: _Checks) -> None:
    """Exact two-sender region with membership verdicts, and the one-shot separation."""
    state = _two_sender_state()
    region = regions.merging_rate_region(state, ["C1", "C2"])
    expected = {("C1",): -1.0, ("C2",): 0.0, ("C1", "C2"): 1.0}
    for labels, want in expected.items():
        got = region.rhs_of(labels)
        c.expect(abs(got - want) <= 1e-9, f"rhs{labels} = {got!r} != {want}")
    for point, want in (((0.0, 1.0), "inside"), ((-1.0, 0.0), "boundary"), ((-2.0, 0.0), "outside")):
        verdict = regions.region_membership(region, point)
        c.expect(verdict.verdict == want, f"point {point}: {verdict.verdict} != {want}")
    verdict = regions.region_membership(region, (-2.0, 0.0))
    c.expect(region.mask_of(["C1"]) in verdict.violated, "outside point misses the R1 violation")

    eps = 0.1
    threshold = regions.compression_example_negative_pair(1.0, eps)["log2_d_threshold"]
    above = regions.compression_example_negative_pair(threshold + 1.0, eps)
    below = regions.compression_example_negative_pair(threshold - 5.0, eps)
    c.expect(above["admits_negative_pair"], "negative pair infeasible above the threshold")
    c.expect(not below["admits_negative_pair"], "negative pair feasible below the threshold")
    rhs12 = above["rhs"]["C1C2"]
    # The (E1, E2) face of the three-sender cost region, from the exact
    # closed-form subset min-entropies.
    hmin = regions.compression_example_hmin(threshold + 1.0, -eps * (threshold + 1.0))
    face = regions.RegionSpec(
        parties=("C1", "C2"),
        constraints=(
            (0b01, regions.one_shot_cost_rhs(hmin[frozenset({"C1"})], eps, 3)),
            (0b10, regions.one_shot_cost_rhs(hmin[frozenset({"C2"})], eps, 3)),
            (0b11, regions.one_shot_cost_rhs(hmin[frozenset({"C1", "C2"})], eps, 3)),
        ),
        kind="one_shot_cost",
    )
    verdict = regions.region_membership(face, (0.495 * rhs12, 0.495 * rhs12))
    c.expect(verdict.verdict == "inside" and rhs12 < 0, "negative-pair point not strictly inside")

    for log2_d in (threshold + 1.0, threshold + 50.0, 4.0):
        seq = regions.compression_example_sequential_bounds(log2_d, eps)
        c.expect(seq["first_mover_c2"] > 0, f"C2-first bound not positive at log d = {log2_d}")
        c.expect(seq["first_mover_c1"] > 0, f"C1-first bound not positive at log d = {log2_d}")
        c.expect(
            seq["first_mover_c2"] >= seq["first_mover_c2_printed"] - 1e-9,
            "composed C2 bound fell below its closed form",
        )
    for eps_probe in (0.05, 0.3, 0.6, 0.9):
        seq = regions.compression_example_sequential_bounds(threshold + 1.0, eps_probe)
        c.expect(seq["first_mover_c2"] > 0, f"C2-first bound not positive at eps = {eps_probe}")
    c.note(f"log2 d threshold at eps=0.1: {threshold:.2f}")


def criterion_gershgorin(c: _Checks) -> None:
    """Exact -H_min of the overlap family against the circle-theorem envelope."""
    rng = np.random.default_rng(ACCEPTANCE_SEED)
    for d in (8, 16, 32):
        for trial in range(20):
            kets = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))[0]
            kets = kets @ np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, d)))
            # Random non-orthogonal family: mix each column toward a common ray.
            bias = rng.uniform(0.0, 0.4)
            common = kets[:, 0]
            family = kets + bias * common[:, None]
            family /= np.linalg.norm(family, axis=0)
            gram = family.conj().T @ family
            alpha = float(np.max(np.abs(gram - np.diag(np.diag(gram)))))
            if alpha < 1.0 / (2 * d):
                continue
            h_d = qcore.harmonic_number(d)
            coeff = np.array([1.0 / math.sqrt((j + 1) * h_d) for j in range(d)])
            rho = np.einsum("i,j,ji->ij", coeff, coeff, gram)  # entries at |ii><jj|
            big = np.zeros((d * d, d * d), dtype=complex)
            idx = np.arange(d) * d + np.arange(d)
            big[np.ix_(idx, idx)] = rho
            joint = qcore.make_state([("C1", d), ("R", d)], big)
            sigma = qcore.make_state([("R", d)], np.diag(coeff**2).astype(complex))
            exact = -entropy.min_entropy_relative(joint, sigma)
            upper = math.log2(2 * alpha * d + 1)
            c.expect(exact <= upper + 1e-9, f"d={d} trial {trial}: exact {exact:.4f} > {upper:.4f}")
            c.expect(
                upper <= math.log2(alpha * d) + 2.0 + 1e-12,
                f"d={d} trial {trial}: envelope chain broke (alpha={alpha:.3f})",
            )


def criterion_swap(c: _Checks) -> None:
    """Exact rational singlet conversion probabilities and branch enumeration."""
    for lam2 in (Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)):
        lam1 = 1 - lam2
        trace = protocols.entanglement_swap(lam1, lam2)
        c.expect(trace.aggregate["scp"] == 2 * lam2, f"scp({lam2}) = {trace.aggregate['scp']}")
        probs = {o.label: o.probability for o in trace.outcomes}
        c.expect(probs["01"] == lam1 * lam2 and probs["11"] == lam1 * lam2, f"Bell branches wrong at {lam2}")
        c.expect(
            probs["00"] == (lam1**2 + lam2**2) / 2 and probs["10"] == (lam1**2 + lam2**2) / 2,
            f"partial branches wrong at {lam2}",
        )
        c.expect(sum(probs.values()) == 1, "branch probabilities do not sum to one")


def criterion_hashing(c: _Checks) -> None:
    """Decoy-elimination success rate and executed yield of the hashing run."""
    start = time.perf_counter()
    trace = protocols.hashing_simulation(
        (0.8, 0.1, 0.05, 0.05), n=2000, delta=0.05, trials=50, seed=ACCEPTANCE_SEED
    )
    agg = trace.aggregate
    c.expect(abs(agg["entropy_bits"] - 1.022) <= 0.001, f"S(AB) = {agg['entropy_bits']!r}")
    c.expect(agg["success_frequency"] >= 0.9, f"success frequency {agg['success_frequency']!r} < 0.9")
    target = 1.0 - agg["entropy_bits"]
    c.expect(abs(agg["yield"] - target) <= 0.1, f"yield {agg['yield']!r} not within 0.1 of {target!r}")
    elapsed = time.perf_counter() - start
    c.expect(elapsed < 60.0, f"hashing runtime {elapsed:.1f}s over the 1 min budget")
    c.note(
        f"success={agg['success_frequency']:.2f} yield={agg['yield']:.3f} "
        f"rounds={agg['rounds_run']}/{agg['nominal_rounds']} feasible={agg['feasible']}"
    )


def criterion_min_cut(c: _Checks) -> None:
    """Chain min-cuts equal the endpoint entropy; assisted values on random pure states."""
    lam = (0.7, 0.3)
    link_entropy = qcore.shannon_entropy(lam)
    for m in range(1, 11):
        nodes = ["A"] + [f"C{i}" for i in range(1, m + 1)] + ["B"]

        def chain_entropy(subset: frozenset) -> float:
            inside = [name in subset or name == "A" for name in nodes[:-1]] + [False]
            crossings = sum(1 for i in range(len(nodes) - 1) if inside[i] != inside[i + 1])
            return crossings * link_entropy

        value, cut = regions.min_cut_entanglement_oracle(chain_entropy, ["A"], nodes[1:-1])
        c.expect(abs(value - link_entropy) <= 1e-9, f"m={m}: min-cut {value!r} != {link_entropy!r}")
        c.expect(cut == (), f"m={m}: tie-break returned {cut!r}")

    # State-backed cross-check at m = 4 (helpers hold two registers each).
    m = 4
    links = [qcore.schmidt_pair(lam, (f"n{i}r", f"n{i + 1}l")) for i in range(m + 1)]
    state = qcore.tensor_all(links)
    helper_groups = [(f"n{i}r", f"n{i}l") for i in range(1, m + 1)]

    def grouped_entropy(cut: tuple[str, ...]) -> float:
        labels = ["n0r"] + [x for g in cut for x in g.split("+")]
        return entropy.von_neumann(state, labels)

    names = ["+".join(g) for g in helper_groups]
    value, cut = regions.min_over_cuts(names, lambda cc: grouped_entropy(cc))
    c.expect(abs(value - link_entropy) <= 1e-9, f"state path min-cut {value!r}")

    rng = np.random.default_rng(ACCEPTANCE_SEED)
    for i in range(20):
        dims = [("A", 2), ("B", 2), ("C", int(rng.integers(2, 4)))]
        psi = qcore.random_pure(dims, rng)
        asymptotic, one_shot = assisted.eoa_pure(psi, ["A"], ["B"], ["C"], grid=4, seed=int(rng.integers(1 << 31)))
        want = min(entropy.von_neumann(psi, "A"), entropy.von_neumann(psi, "B"))
        c.expect(abs(asymptotic - want) <= 1e-9, f"state {i}: assisted value {asymptotic!r} != {want!r}")
        c.expect(one_shot <= asymptotic + 1e-7, f"state {i}: search {one_shot!r} above the concavity cap")


def criterion_property_suites(c: _Checks) -> None:
    """Always-on randomized invariants, 100+ instances per family, zero violations."""
    rng = np.random.default_rng(ACCEPTANCE_SEED)

    for _ in range(100):  # state invariants + subadditivity + swap-trick purity
        dims = [("A", int(rng.integers(2, 4))), ("B", int(rng.integers(2, 4)))]
        state = qcore.random_state(dims, rng)
        mat = state.matrix
        c.expect(float(np.max(np.abs(mat - mat.conj().T))) <= 1e-10, "hermiticity defect")
        c.expect(float(np.min(np.linalg.eigvalsh(mat))) >= -1e-10, "negative eigenvalue")
        c.expect(abs(state.trace() - 1.0) <= 1e-10, "trace defect")
        gap = entropy.von_neumann(state, "A") + entropy.von_neumann(state, "B") - entropy.von_neumann(state)
        c.expect(gap >= -1e-9, f"subadditivity violated by {gap!r}")
        decoupling.purity(state, "A", check_swap_trick=True)

    for _ in range(100):  # strong subadditivity, both forms
        state = qcore.random_state([("A", 2), ("B", 2), ("C", 2)], rng)
        gap = entropy.coherent_information(state, "A", ["B", "C"]) - entropy.coherent_information(state, "A", "B")
        c.expect(gap >= -1e-9, f"coherent-information monotonicity violated by {gap!r}")
        joint = qcore.partial_trace(state, ["A", "B"])
        sigma = qcore.partial_trace(state, ["B"])
        hmin_pair = entropy.min_entropy_relative(joint, sigma)
        hmin_top = entropy.min_entropy_unconditioned(qcore.partial_trace(state, ["A"]))
        c.expect(hmin_pair <= hmin_top + 1e-8, f"min-entropy monotonicity violated: {hmin_pair!r} > {hmin_top!r}")

    for _ in range(100):  # H_min <= H_2 and additivity
        rho = qcore.random_state([("A", 2), ("B", 2)], rng)
        sigma = qcore.random_state([("B", 2)], rng)
        hmin = entropy.min_entropy_relative(rho, sigma)
        h2 = entropy.collision_entropy(rho, sigma)
        c.expect(hmin <= h2 + 1e-9, f"H_min {hmin!r} > H_2 {h2!r}")
        rho2 = qcore.random_state([("A2", 2), ("B2", 2)], rng)
        sigma2 = qcore.random_state([("B2", 2)], rng)
        joint = qcore.permute_systems(qcore.tensor(rho, rho2), ["A", "A2", "B", "B2"])
        both = qcore.tensor(sigma, sigma2)
        lhs = entropy.min_entropy_relative(joint, both)
        rhs = hmin + entropy.min_entropy_relative(rho2, sigma2)
        c.expect(abs(lhs - rhs) <= 1e-8, f"additivity defect {lhs - rhs!r}")

    for _ in range(100):  # distance sandwiches, normalized and subnormalized
        a = qcore.random_state([("A", 3)], rng)
        b = qcore.random_state([("A", 3)], rng)
        rep = qcore.distances(a, b)
        c.expect(1 - rep.fidelity <= rep.trace_distance + 1e-9, "lower sandwich")
        c.expect(rep.trace_distance <= math.sqrt(max(0.0, 1 - rep.fidelity**2)) + 1e-9, "upper sandwich")
        c.expect(rep.trace_distance <= rep.purified_distance + 1e-9, "purified lower")
        c.expect(rep.purified_distance <= 2 * math.sqrt(rep.trace_distance) + 1e-9, "purified upper")
        scale_a, scale_b = rng.uniform(0.4, 1.0, 2)
        sub_a = qcore.make_state(a.systems, a.matrix * scale_a, "subnormalized")
        sub_b = qcore.make_state(b.systems, b.matrix * scale_b, "subnormalized")
        rep_s = qcore.distances(sub_a, sub_b)
        c.expect(rep_s.trace_distance <= rep_s.purified_distance + 1e-9, "subnormalized purified lower")
        c.expect(
            rep_s.purified_distance <= 2 * math.sqrt(rep_s.trace_distance) + 1e-9,
            "subnormalized purified upper",
        )

    for _ in range(100):  # norm inequalities
        d = int(rng.integers(2, 6))
        x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        x = (x + x.conj().T) / 2
        c.expect(
            qcore.trace_norm(x) ** 2 <= d * float(np.real(np.trace(x @ x))) + 1e-9,
            "trace-norm vs Hilbert-Schmidt bound",
        )
        sigma = qcore.random_density([d], rng)
        root = qcore.psd_sqrt(qcore.psd_sqrt(np.linalg.inv(sigma)))
        conj = root @ x @ root
        rhs = math.sqrt(float(np.real(np.trace(sigma)))) * math.sqrt(float(np.real(np.trace(conj @ conj.conj().T))))
        c.expect(qcore.trace_norm(x) <= rhs + 1e-8, "weighted norm bound")

    for _ in range(100):  # gentle measurement
        rho = qcore.random_density([4], rng) * rng.uniform(0.6, 1.0)
        perturb = qcore.random_density([4], rng)
        x_op = np.eye(4) - rng.uniform(0.0, 0.3) * perturb
        lhs, rhs = typicality.gentle_measurement_defect(rho, x_op)
        c.expect(lhs <= rhs + 1e-9, f"gentle measurement violated: {lhs!r} > {rhs!r}")

    for i in range(100):  # typical projector sandwiches
        d = 2 if i % 2 == 0 else 3
        n = int(rng.integers(4, 8)) if d == 3 else int(rng.integers(6, 11))
        spectrum = rng.dirichlet(np.ones(d) * 2.0)
        state = qcore.make_state([("A", d)], np.diag(spectrum).astype(complex))
        # delta above the count-grid spacing keeps the typical set non-empty.
        delta = float(rng.uniform(1.0 / n + 0.02, 1.0 / n + 0.15))
        report = typicality.typical_projector_checks(state, n, delta=delta)
        for flag in ("mass_ok", "eigenvalue_sandwich_ok", "cardinality_sandwich_ok", "purity_bound_ok", "gentle_ok"):
            c.expect(getattr(report, flag), f"projector check {flag} failed (d={d}, n={n})")


CRITERIA: dict[str, tuple[str, Callable[[_Checks], None]]] = {
    "twirl-identity": ("two-copy twirl identity, 20000 samples, 5e-3", criterion_twirl_identity),
    "decoupling-bound": ("Monte Carlo decoupling error under the analytic bound", criterion_decoupling_bound),
    "entropy-engine": ("closed-form min-entropy identities at 1e-6", criterion_entropy_engine),
    "worked-example": ("five-party example numbers and CNOT fault tolerance", criterion_worked_example_numbers),
    "regions": ("two-sender region, membership, one-shot separation", criterion_regions),
    "gershgorin": ("overlap-family min-entropies under the circle bound", criterion_gershgorin),
    "swap": ("exact singlet conversion probabilities", criterion_swap),
    "hashing": ("hashing success frequency and yield", criterion_hashing),
    "min-cut": ("chain min-cuts and assisted values", criterion_min_cut),
    "properties": ("randomized invariant suites, 100+ instances each", criterion_property_suites),
}


def run_one(name: str) -> CriterionResult:
    _, fn = CRITERIA[name]
    checks = _Checks()
    start = time.perf_counter()
    try:
        fn(checks)
    except Exception as exc:  # a crash is a failure, not an abort
        checks.failures.append(f"exception: {exc!r}")
    elapsed = time.perf_counter() - start
    return CriterionResult(name=name, passed=not checks.failures, detail=checks.detail(), seconds=elapsed)


def run_all(only: str | None = None) -> list[CriterionResult]:
    names = [only] if only else list(CRITERIA)
    return [run_one(name) for name in names]
