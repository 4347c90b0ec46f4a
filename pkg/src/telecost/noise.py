"""Mixed-state channels, noisy teleportation and recurrence distillation.

The resource pair is modeled as a Werner state: fidelity F on the
(|00>+|11>)/sqrt(2) projector and (1-F)/3 on each of the other three Bell
projectors. Teleporting through it yields an input-independent fidelity
(2F+1)/3 for both protocol families, which pins the two boundary cases
used as cross-checks: F=1 gives 1, the maximally mixed channel gives 1/2.

One distillation step takes two Werner pairs, applies a bilateral CNOT,
measures the target pair on both sides, keeps the source pair when the
announced outcomes agree (2 classical bits per attempt, tagged LOCC) and
re-twirls the kept pair to Werner form. For F > 1/2 the step strictly
improves fidelity; at F = 1/4 it is a fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cost import CostLedger
from .kinds import ALICE, BOB, ProtocolKind, Purpose
from .protocol import UnknownQubit, correction_for
from .statevector import StateVector, apply_cnot, apply_h, apply_x, apply_z, basis_state

MAX_DENSITY_QUBITS = 4
PSD_FLOOR = -1e-10

_SQRT2 = np.sqrt(2.0)
BELL_VECTORS = {
    "phi_plus": np.array([1, 0, 0, 1], dtype=complex) / _SQRT2,
    "phi_minus": np.array([1, 0, 0, -1], dtype=complex) / _SQRT2,
    "psi_plus": np.array([0, 1, 1, 0], dtype=complex) / _SQRT2,
    "psi_minus": np.array([0, 1, -1, 0], dtype=complex) / _SQRT2,
}

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class DensityMatrix:
    """Validated mixed state of up to 4 qubits."""

    n_qubits: int
    mat: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.n_qubits <= MAX_DENSITY_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_DENSITY_QUBITS}, got {self.n_qubits}")
        mat = np.asarray(self.mat, dtype=complex)
        dim = 2**self.n_qubits
        if mat.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got shape {mat.shape}")
        if not np.allclose(mat, mat.conj().T, atol=1e-12):
            raise ValueError("density matrix must be Hermitian")
        tr = float(np.real(np.trace(mat)))
        if abs(tr - 1.0) > 1e-12:
            raise ValueError(f"trace must be 1, got {tr}")
        min_eig = float(np.min(np.linalg.eigvalsh(mat)))
        if min_eig < PSD_FLOOR:
            raise ValueError(f"matrix is not positive semidefinite, min eigenvalue {min_eig:.3e}")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "mat", mat)


def density_from_pure(s: StateVector) -> DensityMatrix:
    return DensityMatrix(s.n_qubits, np.outer(s.amps, s.amps.conj()))


def density_tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    n = a.n_qubits + b.n_qubits
    if n > MAX_DENSITY_QUBITS:
        raise ValueError(f"product would need {n} qubits, limit is {MAX_DENSITY_QUBITS}")
    return DensityMatrix(n, np.kron(a.mat, b.mat))


def werner_state(f: float) -> DensityMatrix:
    """Werner pair with Bell fidelity f; f = 1/4 is the maximally mixed state."""
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"fidelity parameter must be in [0, 1], got {f}")
    rest = (1.0 - f) / 3.0
    mat = f * np.outer(BELL_VECTORS["phi_plus"], BELL_VECTORS["phi_plus"].conj())
    for name in ("phi_minus", "psi_plus", "psi_minus"):
        v = BELL_VECTORS[name]
        mat = mat + rest * np.outer(v, v.conj())
    return DensityMatrix(2, mat)


def _gate_unitary(n: int, gate: str, qubits: tuple[int, ...]) -> np.ndarray:
    """Full-register unitary, built column by column through the
    statevector engine so both simulation layers share one gate
    convention."""
    dim = 2**n
    cols = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        basis = basis_state(n, format(i, f"0{n}b"))
        if gate == "CNOT":
            out = apply_cnot(basis, qubits[0], qubits[1])
        else:
            out = {"H": apply_h, "X": apply_x, "Z": apply_z}[gate](basis, qubits[0])
        cols[:, i] = out.amps
    return cols


def apply_gate_density(rho: DensityMatrix, gate: str, qubits: tuple[int, ...]) -> DensityMatrix:
    u = _gate_unitary(rho.n_qubits, gate, qubits)
    return DensityMatrix(rho.n_qubits, u @ rho.mat @ u.conj().T)


def _correction_matrix(gates: tuple[str, ...]) -> np.ndarray:
    m = np.eye(2, dtype=complex)
    for g in gates:
        m = {"X": _X, "Z": _Z}[g] @ m  # listed order = application order
    return m


def teleport_fidelity_noisy(kind: ProtocolKind, psi: UnknownQubit, channel: DensityMatrix) -> float:
    """Fidelity <psi| rho_Bob |psi> of the protocol run through an
    arbitrary 2-qubit channel state, averaging Bob's corrected output
    over the four measurement outcomes with their Born weights."""
    if channel.n_qubits != 2:
        raise ValueError(f"channel must be a 2-qubit state, got {channel.n_qubits}")
    rho = density_tensor(density_from_pure(psi.to_statevector()), channel)
    rho = apply_gate_density(rho, "CNOT", (0, 1))
    if kind is ProtocolKind.KAK:
        rho = apply_gate_density(rho, "CNOT", (1, 2))
    rho = apply_gate_density(rho, "H", (0,))
    psi_vec = psi.to_statevector().amps
    acc = np.zeros((2, 2), dtype=complex)
    for m0 in (0, 1):
        for m1 in (0, 1):
            idx = [4 * m0 + 2 * m1, 4 * m0 + 2 * m1 + 1]
            block = rho.mat[np.ix_(idx, idx)]
            g = _correction_matrix(correction_for(kind, f"{m0}{m1}"))
            acc += g @ block @ g.conj().T
    return float(np.real(psi_vec.conj() @ acc @ psi_vec))


# ---------------------------------------------------------------------------
# recurrence distillation
# ---------------------------------------------------------------------------


def distill_step_map(f: float) -> tuple[float, float]:
    """Exact (success probability, output fidelity) of one recurrence
    step on two Werner pairs of fidelity f, by 4-qubit density-matrix
    evolution. Register order (A1, B1, A2, B2); pair 2 is measured."""
    pair = werner_state(f)
    rho = density_tensor(pair, pair)
    rho = apply_gate_density(rho, "CNOT", (0, 2))  # Alice's side
    rho = apply_gate_density(rho, "CNOT", (1, 3))  # Bob's side
    keep = np.zeros((4, 4), dtype=complex)
    p_succ = 0.0
    for a, b in ((0, 0), (1, 1)):
        idx = [8 * p0 + 4 * p1 + 2 * a + b for p0 in (0, 1) for p1 in (0, 1)]
        block = rho.mat[np.ix_(idx, idx)]
        p_succ += float(np.real(np.trace(block)))
        keep = keep + block
    phi = BELL_VECTORS["phi_plus"]
    f_out = float(np.real(phi.conj() @ keep @ phi)) / p_succ
    return p_succ, f_out


@dataclass(frozen=True)
class DistillStepOutcome:
    success: bool
    f_out: float
    locc_bits: int = 2


def distill_step(f_in: float, rng: np.random.Generator) -> DistillStepOutcome:
    """One sampled recurrence attempt. Success follows the exact density
    computation; on failure both pairs are lost and the surviving raw
    supply is still at f_in. Costs 2 LOCC bits either way."""
    p_succ, f_out = distill_step_map(f_in)
    success = bool(rng.random() < p_succ)
    return DistillStepOutcome(success, f_out if success else f_in)


@dataclass(frozen=True)
class DistillRun:
    rounds: int
    attempts: int
    locc_bits: int
    final_f: float


def distill_to_threshold(
    f_in: float, f_target: float, max_rounds: int, rng: np.random.Generator
) -> DistillRun:
    """Repeat distill_step until the fidelity reaches f_target or
    max_rounds successful levels are exhausted.

    rounds counts successes, attempts counts every invocation; failed
    attempts retry the current level on fresh pairs. LOCC bits are 2 per
    attempt. Inputs at or above target return immediately. Inputs at or
    below 1/2 are rejected: the recurrence cannot improve them.
    """
    if not 0.5 < f_in <= 1.0:
        raise ValueError(f"f_in must be in (1/2, 1], got {f_in}")
    if not 0.0 < f_target <= 1.0:
        raise ValueError(f"f_target must be in (0, 1], got {f_target}")
    if max_rounds < 1:
        raise ValueError(f"max_rounds must be >= 1, got {max_rounds}")
    f = f_in
    rounds = attempts = 0
    while f < f_target and rounds < max_rounds:
        out = distill_step(f, rng)
        attempts += 1
        if out.success:
            f = out.f_out
            rounds += 1
    return DistillRun(rounds, attempts, 2 * attempts, f)


def deterministic_rounds_to_target(f_in: float, f_target: float, max_rounds: int = 64) -> int:
    """Successful recurrence levels needed on the exact map, ignoring
    attempt failures; -1 if the target is out of reach within the cap."""
    if f_in >= f_target:
        return 0
    if f_in <= 0.5:
        return -1
    f, rounds = f_in, 0
    while f < f_target and rounds < max_rounds:
        f = distill_step_map(f)[1]
        rounds += 1
    return rounds if f >= f_target else -1


SWEEP_COLUMNS = [
    "F_in",
    "success_prob",
    "F_out",
    "rounds_to_target",
    "locc_bits",
    "total_bits_sqtp",
    "total_bits_kak",
]


def sweep_rows(f_grid: list[float], distill_target: float, max_rounds: int = 64) -> list[dict]:
    """Deterministic no-failure expectation per grid point: one-step
    success probability and output fidelity, rounds to reach the target,
    and the resulting per-qubit totals for both protocol families."""
    rows = []
    for f in f_grid:
        p_succ, f_out = distill_step_map(f)
        rounds = deterministic_rounds_to_target(f, distill_target, max_rounds)
        locc = 2 * rounds if rounds >= 0 else -1
        rows.append(
            {
                "F_in": round(f, 12),
                "success_prob": round(p_succ, 12),
                "F_out": round(f_out, 12),
                "rounds_to_target": rounds,
                "locc_bits": locc,
                "total_bits_sqtp": 2 + locc if locc >= 0 else -1,
                "total_bits_kak": 1 + locc if locc >= 0 else -1,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# noisy end-to-end run with cost and copy accounting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoisyTeleportReport:
    """Distill-then-teleport accounting for one unknown state.

    Under KAK scheduling the channel interacts with the payload before
    anything is shared, so every distillation attempt burns one fresh
    copy of the unknown state; standard scheduling distills the channel
    on its own and burns none.
    """

    kind: ProtocolKind
    f_initial: float
    f_final: float
    rounds: int
    attempts: int
    copies_consumed: int
    fidelity: float
    ledger: CostLedger


def run_noisy_teleport(
    kind: ProtocolKind,
    psi: UnknownQubit,
    channel_f: float,
    rng: np.random.Generator,
    distill_target: float | None = None,
    max_rounds: int = 32,
) -> NoisyTeleportReport:
    ledger = CostLedger()
    rounds = attempts = 0
    f_final = channel_f
    if distill_target is not None and channel_f < distill_target:
        run = distill_to_threshold(channel_f, distill_target, max_rounds, rng)
        rounds, attempts, f_final = run.rounds, run.attempts, run.final_f
        for _ in range(attempts):
            # both parties announce their target-pair outcome, 1 bit each
            ledger.add(ALICE, BOB, 1, Purpose.LOCC)
            ledger.add(BOB, ALICE, 1, Purpose.LOCC)
    fid = teleport_fidelity_noisy(kind, psi, werner_state(f_final))
    teleport_bits = 1 if kind is ProtocolKind.KAK else 2
    ledger.add(ALICE, BOB, teleport_bits, Purpose.TELEPORT)
    copies = attempts if kind is ProtocolKind.KAK else 0
    return NoisyTeleportReport(
        kind, channel_f, f_final, rounds, attempts, copies, fid, ledger
    )
