"""Multipartite state algebra: labeled density operators, composition, reduction,
purification, Schmidt analysis, distance measures, and Haar-random unitaries."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

HERMITICITY_TOL = 1e-10
HERMITICITY_REJECT = 1e-8
EIGENVALUE_FLOOR = -1e-10
TRACE_TOL = 1e-10
MAX_TOTAL_DIM = 4096

DEFAULT_SEED = 0x51A7E


class StateError(ValueError):
    """Raised when an operator violates a density-operator contract."""


class LabelError(KeyError):
    """Raised on unknown or duplicated subsystem labels."""


def xlog2x(x: float) -> float:
    """x * log2(x) with the convention 0 * log2(0) = 0."""
    if x <= 0.0:
        return 0.0
    return x * math.log2(x)


def binary_entropy(x: float) -> float:
    """Shannon entropy of a (x, 1-x) coin, in bits."""
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -xlog2x(x) - xlog2x(1.0 - x)


def shannon_entropy(p: Sequence[float]) -> float:
    """Shannon entropy of a probability vector, in bits."""
    return -sum(xlog2x(float(x)) for x in p)


def clamped_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix with values in [EIGENVALUE_FLOOR, 0) set to 0."""
    eigs = np.linalg.eigvalsh(matrix)
    return np.where((eigs < 0) & (eigs >= EIGENVALUE_FLOOR), 0.0, eigs)


@dataclass(frozen=True)
class LabeledState:
    """A density operator carrying an ordered list of named subsystems.

    ``matrix`` is stored in the tensor-product order of ``systems``.  States are
    immutable after construction; every constructor validates Hermiticity,
    positivity, and the trace contract for ``norm_mode``.
    """

    systems: tuple[tuple[str, int], ...]
    matrix: np.ndarray
    is_pure: bool
    norm_mode: str

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.systems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.systems)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims)) if self.systems else 1

    def dim_of(self, label: str) -> int:
        for name, d in self.systems:
            if name == label:
                return d
        raise LabelError(f"unknown subsystem label {label!r}")

    def index_of(self, label: str) -> int:
        for i, (name, _) in enumerate(self.systems):
            if name == label:
                return i
        raise LabelError(f"unknown subsystem label {label!r}")

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def vector(self) -> np.ndarray:
        """State vector of a pure state (dominant eigenvector, unit phase fixed)."""
        if not self.is_pure:
            raise StateError("vector() requires a pure state")
        eigs, vecs = np.linalg.eigh(self.matrix)
        v = vecs[:, -1] * math.sqrt(max(eigs[-1], 0.0))
        k = int(np.argmax(np.abs(v)))
        phase = v[k] / abs(v[k]) if abs(v[k]) > 0 else 1.0
        return v / phase


def _normalize_labels(state: LabeledState, labels: Iterable[str] | str) -> tuple[str, ...]:
    """Validate labels against the state and return them in the state's system order."""
    if isinstance(labels, str):
        wanted = {labels}
    else:
        wanted = set(labels)
    known = set(state.labels)
    unknown = wanted - known
    if unknown:
        raise LabelError(f"unknown subsystem labels {sorted(unknown)!r}")
    return tuple(name for name in state.labels if name in wanted)


def make_state(
    systems: Sequence[tuple[str, int]],
    matrix: np.ndarray,
    norm_mode: str = "normalized",
) -> LabeledState:
    """Validate and wrap a density matrix as a LabeledState.

    The matrix is symmetrized to (M + M†)/2; a Hermiticity correction larger
    than 1e-8 is rejected rather than silently absorbed.
    """
    systems = tuple((str(name), int(d)) for name, d in systems)
    names = [name for name, _ in systems]
    if len(set(names)) != len(names):
        raise LabelError(f"duplicate subsystem labels in {names!r}")
    for name, d in systems:
        if d < 1:
            raise StateError(f"subsystem {name!r} has non-positive dimension {d}")
    side = int(np.prod([d for _, d in systems])) if systems else 1
    if side > MAX_TOTAL_DIM:
        raise StateError(f"total dimension {side} exceeds the cap {MAX_TOTAL_DIM}")

    m = np.asarray(matrix, dtype=complex)
    if m.shape != (side, side):
        raise StateError(f"matrix side {m.shape} does not match product dimension {side}")
    defect = float(np.max(np.abs(m - m.conj().T))) if side else 0.0
    if defect > HERMITICITY_REJECT:
        raise StateError(f"matrix is not Hermitian (max defect {defect:.3e} > {HERMITICITY_REJECT})")
    m = (m + m.conj().T) / 2.0

    eigs = np.linalg.eigvalsh(m)
    if eigs[0] < EIGENVALUE_FLOOR:
        raise StateError(f"matrix is not positive semidefinite (min eigenvalue {eigs[0]:.3e})")

    tr = float(np.real(np.trace(m)))
    if norm_mode == "normalized":
        if abs(tr - 1.0) > TRACE_TOL:
            raise StateError(f"trace {tr!r} is not 1 within {TRACE_TOL}")
    elif norm_mode == "subnormalized":
        if not (0.0 < tr <= 1.0 + TRACE_TOL):
            raise StateError(f"trace {tr!r} is not in (0, 1] within {TRACE_TOL}")
    else:
        raise StateError(f"unknown norm_mode {norm_mode!r}")

    purity = float(np.real(np.trace(m @ m)))
    is_pure = norm_mode == "normalized" and purity >= 1.0 - 1e-9
    m = m.copy()
    m.setflags(write=False)
    return LabeledState(systems=systems, matrix=m, is_pure=is_pure, norm_mode=norm_mode)


def pure_state(systems: Sequence[tuple[str, int]], amplitudes: np.ndarray) -> LabeledState:
    """Build a normalized pure LabeledState from an amplitude vector."""
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    norm = float(np.linalg.norm(v))
    if norm <= 0:
        raise StateError("amplitude vector has zero norm")
    v = v / norm
    return make_state(systems, np.outer(v, v.conj()))


def _axes_matrix(state: LabeledState) -> np.ndarray:
    dims = state.dims
    return state.matrix.reshape(dims + dims)


def tensor(a: LabeledState, b: LabeledState) -> LabeledState:
    """Tensor product of two states with disjoint label sets."""
    overlap = set(a.labels) & set(b.labels)
    if overlap:
        raise LabelError(f"duplicate labels {sorted(overlap)!r} in tensor product")
    if a.norm_mode != b.norm_mode:
        raise StateError("cannot tensor states with different norm modes")
    return make_state(a.systems + b.systems, np.kron(a.matrix, b.matrix), a.norm_mode)


def tensor_all(states: Sequence[LabeledState]) -> LabeledState:
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def partial_trace(state: LabeledState, keep: Iterable[str] | str) -> LabeledState:
    """Reduced operator on the kept subsystems, trace preserved."""
    kept = _normalize_labels(state, keep)
    if len(kept) == len(state.systems):
        return state
    n = len(state.systems)
    keep_idx = [state.index_of(name) for name in kept]
    t = _axes_matrix(state)
    # Contract each traced axis pair, back to front so axis numbers stay valid.
    for i in sorted(set(range(n)) - set(keep_idx), reverse=True):
        t = np.trace(t, axis1=i, axis2=i + t.ndim // 2)
    side = int(np.prod([state.dim_of(name) for name in kept])) if kept else 1
    reduced = t.reshape(side, side)
    new_systems = [(name, state.dim_of(name)) for name in kept]
    return make_state(new_systems, reduced, state.norm_mode)


def permute_systems(state: LabeledState, order: Sequence[str]) -> LabeledState:
    """The same state with its subsystems listed (and its matrix stored) in ``order``."""
    if sorted(order) != sorted(state.labels):
        raise LabelError(f"order {list(order)!r} is not a permutation of {list(state.labels)!r}")
    perm = [state.index_of(name) for name in order]
    n = len(perm)
    t = _axes_matrix(state).transpose(perm + [p + n for p in perm])
    side = state.total_dim
    new_systems = [(name, state.dim_of(name)) for name in order]
    return make_state(new_systems, t.reshape(side, side), state.norm_mode)


def apply_unitary(state: LabeledState, labels: Sequence[str], unitary: np.ndarray) -> LabeledState:
    """Conjugate the state by a unitary acting on the listed subsystems (in that order)."""
    labels = list(labels)
    rest = [name for name in state.labels if name not in labels]
    s = permute_systems(state, labels + rest)
    d_act = int(np.prod([state.dim_of(name) for name in labels]))
    d_rest = s.total_dim // d_act
    u = np.asarray(unitary, dtype=complex)
    if u.shape != (d_act, d_act):
        raise StateError(f"unitary shape {u.shape} does not match subsystem dimension {d_act}")
    full = np.kron(u, np.eye(d_rest))
    rotated = make_state(s.systems, full @ s.matrix @ full.conj().T, s.norm_mode)
    return permute_systems(rotated, state.labels)


def purify(state: LabeledState, ref_label: str = "R") -> LabeledState:
    """Rank-padded purification: pure state on systems + ref whose reduction recovers the input."""
    if state.norm_mode != "normalized":
        raise StateError("purification requires a normalized state")
    if ref_label in state.labels:
        raise LabelError(f"reference label {ref_label!r} collides with an existing system")
    eigs, vecs = np.linalg.eigh(state.matrix)
    keep = eigs > 1e-12
    lam = eigs[keep]
    v = vecs[:, keep]
    rank = int(lam.size)
    side = state.total_dim
    amplitudes = np.zeros(side * rank, dtype=complex)
    for k in range(rank):
        amplitudes += math.sqrt(lam[k]) * np.kron(v[:, k], _basis_vector(rank, k))
    return pure_state(list(state.systems) + [(ref_label, rank)], amplitudes)


def _basis_vector(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


@dataclass(frozen=True)
class SchmidtData:
    """Non-increasing Schmidt coefficients with orthonormal left/right vectors."""

    coefficients: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    @property
    def rank(self) -> int:
        return int(np.sum(self.coefficients > 1e-12))


def schmidt(state: LabeledState, left: Iterable[str] | str) -> SchmidtData:
    """Schmidt decomposition of a pure state across the (left | rest) bipartition."""
    if not state.is_pure:
        raise StateError("Schmidt decomposition requires a pure state")
    left_labels = _normalize_labels(state, left)
    right_labels = tuple(name for name in state.labels if name not in left_labels)
    if not left_labels or not right_labels:
        raise LabelError("Schmidt split needs non-empty sides")
    s = permute_systems(state, list(left_labels) + list(right_labels))
    d_left = int(np.prod([state.dim_of(name) for name in left_labels]))
    d_right = s.total_dim // d_left
    psi = s.vector().reshape(d_left, d_right)
    u, sv, vh = np.linalg.svd(psi)
    r = min(d_left, d_right)
    return SchmidtData(coefficients=sv[:r], left_vectors=u[:, :r], right_vectors=vh[:r].conj().T)


# ---------------------------------------------------------------------------
# Distance measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DistanceReport:
    fidelity: float
    generalized_fidelity: float
    trace_distance: float
    purified_distance: float


def psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    eigs, vecs = np.linalg.eigh(matrix)
    eigs = np.clip(eigs, 0.0, None)
    return (vecs * np.sqrt(eigs)) @ vecs.conj().T


def trace_norm(matrix: np.ndarray) -> float:
    """Sum of singular values; eigvalsh absolute sum for Hermitian input."""
    if np.allclose(matrix, matrix.conj().T, atol=1e-12):
        return float(np.sum(np.abs(np.linalg.eigvalsh(matrix))))
    return float(np.sum(np.linalg.svd(matrix, compute_uv=False)))


def fidelity_ops(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Tr sqrt(sqrt(rho) sigma sqrt(rho)) for PSD operators."""
    root = psd_sqrt(rho)
    inner = root @ sigma @ root
    eigs = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(np.sum(np.sqrt(eigs)))


def distances(a: LabeledState, b: LabeledState) -> DistanceReport:
    """Fidelity, generalized fidelity, trace distance, and purified distance."""
    if a.systems != b.systems:
        raise StateError("distance measures need identical label sets and dimensions")
    f = fidelity_ops(a.matrix, b.matrix)
    gap_a = max(0.0, 1.0 - a.trace())
    gap_b = max(0.0, 1.0 - b.trace())
    f_bar = f + math.sqrt(gap_a * gap_b)
    d = 0.5 * trace_norm(a.matrix - b.matrix)
    p = math.sqrt(max(0.0, 1.0 - min(f_bar, 1.0) ** 2))
    return DistanceReport(
        fidelity=f,
        generalized_fidelity=f_bar,
        trace_distance=d,
        purified_distance=p,
    )


# ---------------------------------------------------------------------------
# Haar-random unitaries and RNG streams
# ---------------------------------------------------------------------------


def spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """Deterministic per-task RNG streams derived from one root seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """One Haar-distributed unitary via QR of a complex Ginibre matrix."""
    return haar_unitaries(dim, 1, rng)[0]


def haar_unitaries(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of ``count`` Haar unitaries; QR phases fixed by diag(r_ii/|r_ii|)."""
    if dim < 1:
        raise StateError("unitary dimension must be >= 1")
    z = rng.standard_normal((count, dim, dim)) + 1j * rng.standard_normal((count, dim, dim))
    z /= math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[:, np.newaxis, :]


# ---------------------------------------------------------------------------
# Named constructors
# ---------------------------------------------------------------------------


_BELL_AMPLITUDES = {
    "phi_plus": np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2),
    "phi_minus": np.array([1, 0, 0, -1], dtype=complex) / math.sqrt(2),
    "psi_plus": np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2),
    "psi_minus": np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2),
}

BELL_BIT_CODES = {"phi_plus": "00", "psi_plus": "01", "phi_minus": "10", "psi_minus": "11"}


def bell(kind: str = "phi_plus", labels: Sequence[str] = ("A", "B")) -> LabeledState:
    if kind not in _BELL_AMPLITUDES:
        raise StateError(f"unknown Bell state {kind!r}; pick one of {sorted(_BELL_AMPLITUDES)}")
    return pure_state([(labels[0], 2), (labels[1], 2)], _BELL_AMPLITUDES[kind])


def ghz(n: int = 3, labels: Sequence[str] | None = None) -> LabeledState:
    if labels is None:
        labels = [chr(ord("A") + i) for i in range(n)]
    amplitudes = np.zeros(2**n, dtype=complex)
    amplitudes[0] = amplitudes[-1] = 1 / math.sqrt(2)
    return pure_state([(name, 2) for name in labels], amplitudes)


def werner(f: float, labels: Sequence[str] = ("A", "B")) -> LabeledState:
    """Mixture of the singlet (weight F) with the three other Bell states."""
    if not 0.0 <= f <= 1.0:
        raise StateError(f"Werner parameter {f!r} outside [0, 1]")
    m = f * _bell_projector("psi_minus")
    for kind in ("phi_plus", "phi_minus", "psi_plus"):
        m = m + (1.0 - f) / 3.0 * _bell_projector(kind)
    return make_state([(labels[0], 2), (labels[1], 2)], m)


def _bell_projector(kind: str) -> np.ndarray:
    v = _BELL_AMPLITUDES[kind]
    return np.outer(v, v.conj())


def max_entangled(d: int, labels: Sequence[str] = ("A", "B")) -> LabeledState:
    amplitudes = np.eye(d, dtype=complex).reshape(-1) / math.sqrt(d)
    return pure_state([(labels[0], d), (labels[1], d)], amplitudes)


def max_mixed(d: int, label: str = "A") -> LabeledState:
    return make_state([(label, d)], np.eye(d, dtype=complex) / d)


def harmonic_number(d: int) -> float:
    return float(sum(Fraction(1, j) for j in range(1, d + 1)))


def embezzle(d: int, labels: Sequence[str] = ("A", "B")) -> LabeledState:
    """The d-level embezzling pair with amplitudes 1/sqrt(j H_d) on |jj>."""
    h = harmonic_number(d)
    lam = np.array([1.0 / (j * h) for j in range(1, d + 1)])
    return schmidt_pair(lam, labels)


def schmidt_pair(lambdas: Sequence[float], labels: Sequence[str] = ("A", "B")) -> LabeledState:
    """Bipartite pure state sum_i sqrt(lambda_i)|ii> for a probability vector lambda."""
    lam = np.asarray(lambdas, dtype=float)
    if np.any(lam < -1e-12) or abs(lam.sum() - 1.0) > 1e-9:
        raise StateError("Schmidt weights must be a probability vector")
    d = lam.size
    amplitudes = np.zeros(d * d, dtype=complex)
    for i in range(d):
        amplitudes[i * d + i] = math.sqrt(max(lam[i], 0.0))
    return pure_state([(labels[0], d), (labels[1], d)], amplitudes)


def example_ch5() -> LabeledState:
    """Five-party pure state: a noiseless A-C1 pair next to a leaky B-C2-R branch.

    Systems (A, C1, B, C2, R), all qubits.  C1 and C2 belong to the helper.
    """
    psi_ac1 = pure_state(
        [("A", 2), ("C1", 2)],
        np.array([0.5, 0, 0, math.sqrt(0.75)], dtype=complex),
    )
    amp = np.zeros(8, dtype=complex)
    amp[0b000] = 1 / math.sqrt(2)
    amp[0b110] = 0.5
    amp[0b111] = 0.5
    psi_bc2r = pure_state([("B", 2), ("C2", 2), ("R", 2)], amp)
    return tensor(psi_ac1, psi_bc2r)


CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    dtype=complex,
)


def example_ch5_cnot() -> LabeledState:
    """The example_ch5 state after a CNOT (control C1, target C2) at the helper."""
    return apply_unitary(example_ch5(), ["C1", "C2"], CNOT)


def example_4_1(d: int, theta: Sequence[float] | str) -> LabeledState:
    """Four-party state: two d-level maximally entangled pairs plus a theta pair.

    Systems C1 (dim d), C2 (dim d*d1), C3 (dim d*d1), R (dim d), with
    C2 = C2a x C2b and C3 = C3a x C3b, where C1-C2a and C3a-R are maximally
    entangled and C2b-C3b carries the theta pair.  ``theta`` is either a
    Schmidt-weight vector or the string ``"embezzle:<d1>"``.
    """
    if isinstance(theta, str):
        kind, _, arg = theta.partition(":")
        if kind != "embezzle":
            raise StateError(f"unknown theta spec {theta!r}")
        th = embezzle(int(arg), ("C2b", "C3b"))
    else:
        th = schmidt_pair(theta, ("C2b", "C3b"))
    parts = tensor_all(
        [
            max_entangled(d, ("C1", "C2a")),
            max_entangled(d, ("C3a", "R")),
            th,
        ]
    )
    return merge_systems(
        permute_systems(parts, ["C1", "C2a", "C2b", "C3a", "C3b", "R"]),
        {"C2": ["C2a", "C2b"], "C3": ["C3a", "C3b"]},
    )


def merge_systems(state: LabeledState, groups: dict[str, Sequence[str]]) -> LabeledState:
    """Fuse adjacent subsystems into single labels (dimension = product)."""
    grouped: dict[str, str] = {}
    for new, members in groups.items():
        idx = [state.index_of(m) for m in members]
        if idx != list(range(idx[0], idx[0] + len(idx))):
            raise LabelError(f"systems {list(members)!r} are not adjacent; permute first")
        for m in members:
            grouped[m] = new
    new_systems: list[tuple[str, int]] = []
    for name, dim in state.systems:
        target = grouped.get(name)
        if target is None:
            new_systems.append((name, dim))
        elif new_systems and new_systems[-1][0] == target:
            new_systems[-1] = (target, new_systems[-1][1] * dim)
        else:
            new_systems.append((target, dim))
    return make_state(new_systems, state.matrix, state.norm_mode)


CONSTRUCTORS = {
    "bell_phi_plus": lambda params: bell("phi_plus", **params),
    "bell_phi_minus": lambda params: bell("phi_minus", **params),
    "bell_psi_plus": lambda params: bell("psi_plus", **params),
    "bell_psi_minus": lambda params: bell("psi_minus", **params),
    "ghz": lambda params: ghz(**params),
    "werner": lambda params: werner(**params),
    "max_entangled": lambda params: max_entangled(**params),
    "max_mixed": lambda params: max_mixed(**params),
    "embezzle": lambda params: embezzle(**params),
    "schmidt_pair": lambda params: schmidt_pair(**params),
    "example_ch5": lambda params: example_ch5(**params),
    "example_ch5_cnot": lambda params: example_ch5_cnot(**params),
    "example_4_1": lambda params: example_4_1(**params),
}


def build_state(spec: dict) -> LabeledState:
    """Build a LabeledState from a StateSpec mapping (see the CLI file schema)."""
    body = spec.get("state", spec)
    kind = body.get("kind", "constructor")
    if kind == "constructor":
        name = body.get("name")
        if name not in CONSTRUCTORS:
            raise StateError(f"unknown constructor {name!r}; known: {sorted(CONSTRUCTORS)}")
        return CONSTRUCTORS[name](dict(body.get("params") or {}))
    systems = [(entry["label"], int(entry["dim"])) for entry in spec["systems"]]
    if kind == "pure":
        amplitudes = np.array([complex(re, im) for re, im in body["amplitudes"]])
        return pure_state(systems, amplitudes)
    if kind == "mixed":
        rows = body["matrix"]
        matrix = np.array([[complex(re, im) for re, im in row] for row in rows])
        return make_state(systems, matrix, body.get("norm_mode", "normalized"))
    raise StateError(f"unknown state kind {kind!r}")


def random_density(dims: Sequence[int], rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a normalized Ginibre factor (full rank by default)."""
    side = int(np.prod(dims))
    r = side if rank is None else rank
    g = rng.standard_normal((side, r)) + 1j * rng.standard_normal((side, r))
    m = g @ g.conj().T
    return m / np.real(np.trace(m))


def random_state(systems: Sequence[tuple[str, int]], rng: np.random.Generator, rank: int | None = None) -> LabeledState:
    return make_state(systems, random_density([d for _, d in systems], rng, rank))


def random_pure(systems: Sequence[tuple[str, int]], rng: np.random.Generator) -> LabeledState:
    side = int(np.prod([d for _, d in systems]))
    v = rng.standard_normal(side) + 1j * rng.standard_normal(side)
    return pure_state(systems, v)
