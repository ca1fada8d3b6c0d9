"""Dense complex linear algebra for few-qubit states, channels and measurements.

Everything here is a thin layer over numpy arrays: density operators,
pure states, POVMs, Pauli strings, Kraus channels, the BB84 encoding
states, the per-qubit depolarizing channel, Pauli twirling, and exact
enumeration of the 1- and 2-qubit Clifford groups.  Registers are capped
at 12 qubits; all validity checks use an absolute tolerance of 1e-9.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

TOL = 1e-9
MAX_QUBITS = 12

# Single-qubit constants.
ID2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PHASE_S = np.array([[1, 0], [0, 1j]], dtype=complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


class LinalgError(ValueError):
    """Raised when a state, POVM or channel fails its validity checks."""


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {a.shape}")
    return a


def _num_qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if 2**n != dim:
        raise LinalgError(f"dimension {dim} is not a power of two")
    if n > MAX_QUBITS:
        raise LinalgError(f"register of {n} qubits exceeds cap of {MAX_QUBITS}")
    return n


@dataclass(frozen=True)
class DensityOperator:
    """Trace-one positive Hermitian matrix on a register of n qubits."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_matrix(self.matrix)
        _num_qubits(m.shape[0])
        if np.abs(m - m.conj().T).max() > TOL:
            raise LinalgError("density operator is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TOL:
            raise LinalgError(f"density operator has trace {tr}, expected 1")
        if np.linalg.eigvalsh(m).min() < -TOL:
            raise LinalgError("density operator has a negative eigenvalue")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return _num_qubits(self.dim)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DensityOperator)
            and self.dim == other.dim
            and np.abs(self.matrix - other.matrix).max() <= TOL
        )


@dataclass(frozen=True)
class PureState:
    """Unit-norm amplitude vector; promotes to a DensityOperator."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        _num_qubits(v.shape[0])
        if abs(np.linalg.norm(v) - 1.0) > TOL:
            raise LinalgError("state vector is not normalized")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def to_density(self) -> DensityOperator:
        v = self.amplitudes
        return DensityOperator(np.outer(v, v.conj()))


@dataclass(frozen=True, eq=False)
class Povm:
    """A list of positive operators summing to the identity."""

    elements: tuple

    def __init__(self, elements):
        ops = tuple(_as_matrix(e) for e in elements)
        if not ops:
            raise LinalgError("POVM needs at least one element")
        dim = ops[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for op in ops:
            if op.shape[0] != dim:
                raise LinalgError("POVM elements have mismatched dimensions")
            ev = np.linalg.eigvalsh(op)
            if ev.min() < -TOL or ev.max() > 1 + TOL:
                raise LinalgError("POVM element not between 0 and identity")
            total += op
        if np.abs(total - np.eye(dim)).max() > TOL:
            raise LinalgError("POVM elements do not sum to the identity")
        object.__setattr__(self, "elements", ops)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class PauliIndex:
    """Bit/phase-flip mask pair (x, z) selecting the operator Z^z X^x."""

    x: tuple
    z: tuple

    def __init__(self, x, z):
        x = tuple(int(b) & 1 for b in x)
        z = tuple(int(b) & 1 for b in z)
        if len(x) != len(z):
            raise LinalgError("x and z masks must have equal length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    @property
    def n_qubits(self) -> int:
        return len(self.x)

    def matrix(self) -> np.ndarray:
        """Z^z X^x without the i^{z.x} phase."""
        out = np.array([[1.0 + 0j]])
        for xb, zb in zip(self.x, self.z):
            one = ID2
            if xb:
                one = PAULI_X @ one
            if zb:
                one = PAULI_Z @ one
            out = np.kron(out, one)
        return out


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """CPTP map given by Kraus operators."""

    kraus: tuple

    def __init__(self, kraus):
        ops = tuple(_as_matrix(k) for k in kraus)
        if not ops:
            raise LinalgError("channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for k in ops:
            if k.shape[0] != dim:
                raise LinalgError("Kraus operators have mismatched dimensions")
            total += k.conj().T @ k
        if np.abs(total - np.eye(dim)).max() > TOL:
            raise LinalgError("channel is not trace preserving")
        object.__setattr__(self, "kraus", ops)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def apply(self, rho: DensityOperator) -> DensityOperator:
        if rho.dim != self.dim:
            raise LinalgError("channel/state dimension mismatch")
        out = sum(k @ rho.matrix @ k.conj().T for k in self.kraus)
        return DensityOperator(out)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def ket(bits) -> PureState:
    """Computational basis state |b_1 ... b_n>."""
    bits = [int(b) for b in bits]
    dim = 2 ** len(bits)
    v = np.zeros(dim, dtype=complex)
    idx = 0
    for b in bits:
        idx = (idx << 1) | b
    v[idx] = 1.0
    return PureState(v)


def fully_mixed(n_qubits: int) -> DensityOperator:
    dim = 2**n_qubits
    return DensityOperator(np.eye(dim) / dim)


def bell_state() -> PureState:
    """(|00> + |11>)/sqrt(2)."""
    return PureState(np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2))


def bb84_state(x: int, b: int) -> PureState:
    """Encoding state: |x> in the computational basis (b=0), (|0>+(-1)^x|1>)/sqrt(2) in the diagonal basis (b=1)."""
    x, b = int(x), int(b)
    if x not in (0, 1) or b not in (0, 1):
        raise LinalgError("bb84_state arguments must be bits")
    if b == 0:
        return ket([x])
    return PureState(np.array([1, (-1) ** x], dtype=complex) / np.sqrt(2))


def basis_povm(b: int) -> Povm:
    """Projective measurement onto {phi_{0,b}, phi_{1,b}}."""
    p0 = bb84_state(0, b).to_density().matrix
    p1 = bb84_state(1, b).to_density().matrix
    return Povm([p0, p1])


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def tensor(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    return DensityOperator(np.kron(a.matrix, b.matrix))


def partial_trace(rho: DensityOperator, keep) -> DensityOperator:
    """Reduce to the qubits listed in `keep` (0-indexed, order preserved)."""
    n = rho.n_qubits
    keep = [int(q) for q in keep]
    if any(q < 0 or q >= n for q in keep) or len(set(keep)) != len(keep):
        raise LinalgError(f"keep mask {keep} inconsistent with {n} qubits")
    if not keep:
        raise LinalgError("cannot trace out every qubit")
    traced = sorted(set(range(n)) - set(keep), reverse=True)
    arr = rho.matrix.reshape([2] * (2 * n))
    dims = n
    for q in traced:
        arr = np.trace(arr, axis1=q, axis2=q + dims)
        dims -= 1
    d = 2**dims
    out = arr.reshape(d, d)
    if list(keep) != sorted(keep):
        perm = np.argsort(np.argsort(keep))
        axes = list(perm) + [p + dims for p in perm]
        out = out.reshape([2] * (2 * dims)).transpose(axes).reshape(d, d)
    return DensityOperator(out)


def born_probabilities(rho: DensityOperator, m: Povm) -> np.ndarray:
    """Exact outcome probabilities tr(Gamma_x rho)."""
    if rho.dim != m.dim:
        raise LinalgError("state/POVM dimension mismatch")
    p = np.array([np.trace(g @ rho.matrix).real for g in m.elements])
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def _operator_sqrt(op: np.ndarray) -> np.ndarray:
    ev, vec = np.linalg.eigh(op)
    return vec @ np.diag(np.sqrt(np.clip(ev, 0, None))) @ vec.conj().T


def measure(rho: DensityOperator, m: Povm, rng) -> tuple:
    """Sample an outcome with Born probabilities; return (index, post-state)."""
    p = born_probabilities(rho, m)
    outcome = int(rng.choice(len(p), p=p))
    root = _operator_sqrt(m.elements[outcome])
    post = root @ rho.matrix @ root.conj().T
    post = post / np.trace(post).real
    return outcome, DensityOperator(post)


def depolarizing_channel(q: float, n_qubits: int = 1) -> QuantumChannel:
    """i.i.d. per-qubit depolarizing: Kraus {sqrt(1-3q/4) I, sqrt(q/4) X, Y, Z}."""
    if not 0.0 <= q <= 1.0:
        raise LinalgError(f"depolarizing probability {q} out of range")
    one = [
        np.sqrt(1 - 3 * q / 4) * ID2,
        np.sqrt(q / 4) * PAULI_X,
        np.sqrt(q / 4) * PAULI_Y,
        np.sqrt(q / 4) * PAULI_Z,
    ]
    kraus = [np.array([[1.0 + 0j]])]
    for _ in range(n_qubits):
        kraus = [np.kron(a, b) for a in kraus for b in one]
    return QuantumChannel(kraus)


def depolarize(rho: DensityOperator, q: float) -> DensityOperator:
    """Each qubit independently replaced by the fully mixed state with probability q."""
    return depolarizing_channel(q, rho.n_qubits).apply(rho)


def pauli_apply(rho: DensityOperator, p: PauliIndex) -> DensityOperator:
    if p.n_qubits != rho.n_qubits:
        raise LinalgError("Pauli mask length does not match register")
    u = p.matrix()
    return DensityOperator(u @ rho.matrix @ u.conj().T)


def pauli_twirl(rho: DensityOperator, message_qubits) -> DensityOperator:
    """Uniform average over all 4^m Paulis on the message qubits.

    Equals tau_M (x) rho_R where R is the rest of the register.
    """
    n = rho.n_qubits
    message_qubits = sorted(int(q) for q in message_qubits)
    if any(q < 0 or q >= n for q in message_qubits):
        raise LinalgError("message mask out of range")
    m = len(message_qubits)
    acc = np.zeros_like(rho.matrix)
    for bits in itertools.product((0, 1), repeat=2 * m):
        x = [0] * n
        z = [0] * n
        for j, q in enumerate(message_qubits):
            x[q] = bits[2 * j]
            z[q] = bits[2 * j + 1]
        u = PauliIndex(x, z).matrix()
        acc += u @ rho.matrix @ u.conj().T
    return DensityOperator(acc / 4**m)


# ---------------------------------------------------------------------------
# Clifford group enumeration
# ---------------------------------------------------------------------------


def _canonical_phase(u: np.ndarray) -> np.ndarray:
    """Fix the global phase: first entry of largest magnitude made real positive."""
    flat = u.reshape(-1)
    idx = int(np.argmax(np.abs(flat) > 1e-6))
    return u / (flat[idx] / abs(flat[idx]))


def _matrix_key(u: np.ndarray) -> bytes:
    # +0.0 normalizes negative zeros so they key identically
    return (np.round(_canonical_phase(u), 9) + (0.0 + 0.0j)).tobytes()


@lru_cache(maxsize=None)
def clifford_group(n: int) -> tuple:
    """All n-qubit Clifford unitaries modulo global phase (n <= 2).

    Enumerated by closing {H, S} (n=1) or {H1, H2, S1, S2, CNOT} (n=2)
    under multiplication: 24 elements for n=1, 11520 for n=2.
    """
    if n == 1:
        gens = [HADAMARD, PHASE_S]
        dim = 2
    elif n == 2:
        gens = [
            np.kron(HADAMARD, ID2),
            np.kron(ID2, HADAMARD),
            np.kron(PHASE_S, ID2),
            np.kron(ID2, PHASE_S),
            CNOT,
        ]
        dim = 4
    else:
        raise LinalgError("Clifford enumeration supports n in {1, 2} only")
    seen = {}
    frontier = [np.eye(dim, dtype=complex)]
    seen[_matrix_key(frontier[0])] = _canonical_phase(frontier[0])
    while frontier:
        nxt = []
        for u in frontier:
            for g in gens:
                v = g @ u
                key = _matrix_key(v)
                if key not in seen:
                    canon = _canonical_phase(v)
                    seen[key] = canon
                    nxt.append(canon)
        frontier = nxt
    group = tuple(m for m in seen.values())
    for m in group:
        m.flags.writeable = False
    return group


def random_clifford(n: int, rng) -> np.ndarray:
    """Uniform element of the n-qubit Clifford group (n <= 2), from the full table."""
    group = clifford_group(n)
    return group[int(rng.integers(len(group)))]


def pauli_strings(n: int) -> list:
    """All 4^n Pauli matrices Z^z X^x (identity first)."""
    out = []
    for bits in itertools.product((0, 1), repeat=2 * n):
        x = bits[:n]
        z = bits[n:]
        out.append(PauliIndex(x, z).matrix())
    return out


def is_pauli_up_to_phase(u: np.ndarray, n: int) -> bool:
    """True when u equals some Pauli string times a unit phase."""
    for p in pauli_strings(n):
        c = (p.conj() * u).sum() / u.shape[0]
        if abs(abs(c) - 1.0) < 1e-6 and np.abs(u - c * p).max() < 1e-6:
            return True
    return False
