"""Dense statevector simulation for small registers.

Conventions, fixed across the whole package:
  - registers hold 1..8 qubits, amplitudes are a dense complex128 array
  - qubit 0 is the MOST significant index bit, so for a 3-qubit register
    the amplitude of |q0 q1 q2> sits at index 4*q0 + 2*q1 + q2
  - states are immutable; every operation returns a new StateVector
  - the only state-equality notion used for physics checks is the
    phase-invariant fidelity |<a|b>|^2
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 8
ATOL = 1e-12

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state of an n-qubit register."""

    n_qubits: int
    amps: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits}")
        amps = np.asarray(self.amps, dtype=complex)
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(
                f"amplitude vector must have length {2**self.n_qubits}, got shape {amps.shape}"
            )
        if not np.all(np.isfinite(amps.view(float))):
            raise ValueError("amplitudes must be finite")
        norm = float(np.real(np.vdot(amps, amps)))
        if abs(norm - 1.0) > ATOL:
            raise ValueError(f"state must be normalized, |norm^2 - 1| = {abs(norm - 1.0):.3e}")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


def _check_qubit(s: StateVector, q: int) -> None:
    if not 0 <= q < s.n_qubits:
        raise ValueError(f"qubit index {q} out of range for {s.n_qubits}-qubit register")


def basis_state(n_qubits: int, label: str) -> StateVector:
    """Computational basis state from a bit string, e.g. ``basis_state(3, "010")``."""
    if len(label) != n_qubits or any(c not in "01" for c in label):
        raise ValueError(f"label must be {n_qubits} chars of 0/1, got {label!r}")
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[int(label, 2)] = 1.0
    return StateVector(n_qubits, amps)


def bell_pair() -> StateVector:
    """The shared resource pair (|00> + |11>)/sqrt(2)."""
    return StateVector(2, np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2.0))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product; a's qubits become the most significant block."""
    n = a.n_qubits + b.n_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"tensor product would need {n} qubits, limit is {MAX_QUBITS}")
    return StateVector(n, np.kron(a.amps, b.amps))


def apply_unitary1(s: StateVector, q: int, m: np.ndarray) -> StateVector:
    """Apply a 2x2 unitary to one qubit."""
    _check_qubit(s, q)
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    t = s.amps.reshape([2] * s.n_qubits)
    t = np.moveaxis(np.tensordot(m, t, axes=([1], [q])), 0, q)
    return StateVector(s.n_qubits, t.reshape(-1))


def apply_h(s: StateVector, q: int) -> StateVector:
    return apply_unitary1(s, q, _H)


def apply_x(s: StateVector, q: int) -> StateVector:
    return apply_unitary1(s, q, _X)


def apply_z(s: StateVector, q: int) -> StateVector:
    return apply_unitary1(s, q, _Z)


def apply_cnot(s: StateVector, control: int, target: int) -> StateVector:
    """Controlled NOT; flips target where control is 1."""
    _check_qubit(s, control)
    _check_qubit(s, target)
    if control == target:
        raise ValueError("control and target must differ")
    t = s.amps.reshape([2] * s.n_qubits).copy()
    sel: list = [slice(None)] * s.n_qubits
    sel[control] = 1
    # with the control axis fixed, the target axis index shifts down past it
    t_ax = target if target < control else target - 1
    t[tuple(sel)] = np.flip(t[tuple(sel)], axis=t_ax)
    return StateVector(s.n_qubits, t.reshape(-1))


@dataclass(frozen=True)
class BranchOutcome:
    """One projective measurement branch.

    post_state is the FULL register with the measured qubits collapsed to
    their outcome values; nothing is traced out.
    """

    outcome_bits: str
    probability: float
    post_state: StateVector


def _validate_qubit_list(s: StateVector, qubits: tuple[int, ...] | list[int]) -> list[int]:
    qubits = list(qubits)
    if not qubits or len(set(qubits)) != len(qubits):
        raise ValueError(f"qubits must be a non-empty list of distinct indices, got {qubits}")
    for q in qubits:
        _check_qubit(s, q)
    return qubits


def _marginal_probs(s: StateVector, qubits: list[int]) -> np.ndarray:
    """Outcome probabilities for the listed qubits, indexed by their bit
    string in the given qubit order."""
    p = np.abs(s.amps.reshape([2] * s.n_qubits)) ** 2
    other = tuple(ax for ax in range(s.n_qubits) if ax not in qubits)
    m = p.sum(axis=other) if other else p
    # after the sum the axes are in ascending qubit order; restore caller order
    ascending = sorted(qubits)
    m = m.transpose([ascending.index(q) for q in qubits])
    return m.reshape(-1)


def _outcome_mask(n: int, qubits: list[int], bits: str) -> np.ndarray:
    mask = np.ones(2**n, dtype=bool)
    idx = np.arange(2**n)
    for q, b in zip(qubits, bits):
        mask &= ((idx >> (n - 1 - q)) & 1) == int(b)
    return mask


def _collapse(s: StateVector, qubits: list[int], bits: str, prob: float) -> StateVector:
    amps = np.where(_outcome_mask(s.n_qubits, qubits, bits), s.amps, 0.0)
    return StateVector(s.n_qubits, amps / np.sqrt(prob))


def measure_sample(
    s: StateVector, qubits: list[int] | tuple[int, ...], rng: np.random.Generator
) -> tuple[str, StateVector]:
    """Sample one computational-basis outcome for the listed qubits.

    Returns (outcome bit string in qubit-list order, collapsed full register).
    """
    qubits = _validate_qubit_list(s, qubits)
    probs = _marginal_probs(s, qubits)
    k = int(rng.choice(len(probs), p=probs / probs.sum()))
    bits = format(k, f"0{len(qubits)}b")
    return bits, _collapse(s, qubits, bits, float(probs[k]))


def enumerate_branches(
    s: StateVector, qubits: list[int] | tuple[int, ...]
) -> list[BranchOutcome]:
    """All measurement branches with nonzero probability, in lexicographic
    outcome order. Probabilities sum to 1."""
    qubits = _validate_qubit_list(s, qubits)
    probs = _marginal_probs(s, qubits)
    out = []
    for k, p in enumerate(probs):
        if p <= 0.0:
            continue
        bits = format(k, f"0{len(qubits)}b")
        out.append(BranchOutcome(bits, float(p), _collapse(s, qubits, bits, float(p))))
    return out


def collapse_residual(s: StateVector, qubits: list[int] | tuple[int, ...], bits: str) -> StateVector:
    """State of the remaining qubits given that `qubits` are collapsed to
    `bits`. The input must already have (near) zero amplitude outside that
    block; remaining qubits keep ascending-index order."""
    qubits = _validate_qubit_list(s, qubits)
    if len(bits) != len(qubits):
        raise ValueError("one bit per measured qubit required")
    mask = _outcome_mask(s.n_qubits, qubits, bits)
    off_block = float(np.sum(np.abs(s.amps[~mask]) ** 2))
    if off_block > 1e-9:
        raise ValueError(f"register is not collapsed onto outcome {bits}, leakage {off_block:.3e}")
    keep = [q for q in range(s.n_qubits) if q not in qubits]
    if not keep:
        raise ValueError("cannot drop every qubit of the register")
    t = s.amps.reshape([2] * s.n_qubits)
    sel: list = [slice(None)] * s.n_qubits
    for q, b in zip(qubits, bits):
        sel[q] = int(b)
    res = t[tuple(sel)].reshape(-1)
    return StateVector(len(keep), res / np.linalg.norm(res))


def fidelity_pure(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, the phase-invariant overlap of two pure states."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


def haar_amplitudes(rng: np.random.Generator) -> tuple[complex, complex]:
    """Haar-uniform single-qubit amplitudes from two angles: cos(theta)
    uniform on [-1, 1], phase uniform on [0, 2pi)."""
    theta = np.arccos(rng.uniform(-1.0, 1.0))
    phi = rng.uniform(0.0, 2.0 * np.pi)
    return complex(np.cos(theta / 2.0)), complex(np.exp(1j * phi) * np.sin(theta / 2.0))
