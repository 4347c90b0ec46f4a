"""Two-party teleportation engine with explicit ownership and traces.

Two protocols are implemented over the same machinery:

SQTP (standard): Alice and Bob pre-share (|00>+|11>)/sqrt(2); Alice
entangles her unknown qubit with her half (CNOT q0->q1), applies H to q0,
measures both of her qubits and sends Bob the two outcome bits; Bob fixes
his half with the four-row correction table (11 needs Z then X and leaves
a global phase of -1).

KAK (chained XOR): all three qubits start with Alice. She runs the XOR
chain q0->q1 then q1->q2, hands q2 to Bob, applies H to q0 and measures
q0 and q1. Only q0's bit is transmitted; Bob applies Z when it is 1. The
residual state never depends on q1's outcome, which is why one classical
bit suffices.

Every run is executed by a small state machine that tracks which party
owns which qubit. Gates can only be applied by the owner of every qubit
they touch, ownership changes only through transfer events, and classical
bits only move through send events, so ordering claims about the protocol
(no signaling before the message, channel interaction order) are enforced
structurally rather than by convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cost import CostLedger
from .kinds import ALICE, BOB, ProtocolKind, Purpose
from .statevector import (
    BranchOutcome,
    StateVector,
    apply_cnot,
    apply_h,
    apply_x,
    apply_z,
    bell_pair,
    collapse_residual,
    enumerate_branches,
    fidelity_pure,
    haar_amplitudes,
    measure_sample,
    tensor,
)

# Correction tables. Gate tuples are applied left to right, so the SQTP
# 11 row means "first Z, then X".
SQTP_CORRECTIONS: dict[str, tuple[str, ...]] = {
    "00": (),
    "01": ("X",),
    "10": ("Z",),
    "11": ("Z", "X"),
}
KAK_CORRECTIONS: dict[str, tuple[str, ...]] = {"0": (), "1": ("Z",)}


def correction_for(kind: ProtocolKind, outcome_bits: str) -> tuple[str, ...]:
    """Correction gate sequence for a full two-bit measurement outcome.

    KAK keys on the first (q0) bit only; the q1 outcome is irrelevant.
    """
    if kind is ProtocolKind.KAK:
        return KAK_CORRECTIONS[outcome_bits[0]]
    return SQTP_CORRECTIONS[outcome_bits]


@dataclass(frozen=True)
class UnknownQubit:
    """The state to be teleported, alpha|0> + beta|1>."""

    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"|alpha|^2 + |beta|^2 must be 1, got {norm}")

    @classmethod
    def haar(cls, rng: np.random.Generator) -> UnknownQubit:
        return cls(*haar_amplitudes(rng))

    def to_statevector(self) -> StateVector:
        return StateVector(1, np.array([self.alpha, self.beta], dtype=complex))


# ---------------------------------------------------------------------------
# trace events
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GateApplied:
    party: str
    gate: str
    qubits: tuple[int, ...]


@dataclass(frozen=True)
class QubitTransferred:
    src: str
    dst: str
    qubit: int


@dataclass(frozen=True)
class Measured:
    party: str
    qubits: tuple[int, ...]
    bits: str


@dataclass(frozen=True)
class MessageSent:
    src: str
    dst: str
    bits: str
    purpose: Purpose


@dataclass(frozen=True)
class CorrectionApplied:
    party: str
    qubit: int
    gates: tuple[str, ...]


TraceStep = GateApplied | QubitTransferred | Measured | MessageSent | CorrectionApplied


def step_to_json(step: TraceStep) -> dict:
    """Serialize one step with the stable field vocabulary
    {step_type, party, qubits, bits, purpose, gate_seq}. Two-party steps
    encode party as a [from, to] pair."""
    if isinstance(step, GateApplied):
        return {"step_type": "gate_applied", "party": step.party,
                "qubits": list(step.qubits), "gate_seq": [step.gate]}
    if isinstance(step, QubitTransferred):
        return {"step_type": "qubit_transferred", "party": [step.src, step.dst],
                "qubits": [step.qubit]}
    if isinstance(step, Measured):
        return {"step_type": "measured", "party": step.party,
                "qubits": list(step.qubits), "bits": step.bits}
    if isinstance(step, MessageSent):
        return {"step_type": "message_sent", "party": [step.src, step.dst],
                "bits": step.bits, "purpose": step.purpose.value}
    if isinstance(step, CorrectionApplied):
        return {"step_type": "correction_applied", "party": step.party,
                "qubits": [step.qubit], "gate_seq": list(step.gates)}
    raise TypeError(f"not a trace step: {step!r}")


@dataclass
class ProtocolTrace:
    """Complete record of one teleportation run."""

    kind: ProtocolKind
    steps: list[TraceStep]
    final_bob_state: StateVector
    fidelity_achieved: float
    ledger: CostLedger

    def replay_ledger(self) -> CostLedger:
        """Rebuild the cost ledger from the MessageSent steps alone."""
        ledger = CostLedger()
        for step in self.steps:
            if isinstance(step, MessageSent):
                ledger.add(step.src, step.dst, len(step.bits), step.purpose)
        return ledger

    def to_json_dict(self) -> dict:
        return {
            "protocol": self.kind.value,
            "steps": [step_to_json(s) for s in self.steps],
            "fidelity": round(self.fidelity_achieved, 12),
            "final_bob_state": [[float(a.real), float(a.imag)] for a in self.final_bob_state.amps],
        }


# ---------------------------------------------------------------------------
# two-party state machine
# ---------------------------------------------------------------------------


class ProtocolMachine:
    """Executes a schedule over a shared register while enforcing ownership.

    The machine refuses gates on qubits the acting party does not own and
    refuses transfers by non-owners, so any trace it emits is a physically
    schedulable sequence of local operations and classical messages.
    """

    _GATES_1Q = {"H": apply_h, "X": apply_x, "Z": apply_z}

    def __init__(self, state: StateVector, owners: dict[int, str]) -> None:
        if sorted(owners) != list(range(state.n_qubits)):
            raise ValueError("owners must cover every qubit index exactly once")
        self._state = state
        self._owners = dict(owners)
        self.steps: list[TraceStep] = []
        self.ledger = CostLedger()

    @property
    def state(self) -> StateVector:
        return self._state

    def owner(self, qubit: int) -> str:
        return self._owners[qubit]

    def _require_owner(self, party: str, qubits: tuple[int, ...]) -> None:
        for q in qubits:
            if self._owners.get(q) != party:
                raise ValueError(
                    f"{party} cannot act on qubit {q}, owned by {self._owners.get(q)!r}"
                )

    def apply(self, party: str, gate: str, *qubits: int) -> None:
        self._require_owner(party, qubits)
        if gate == "CNOT":
            if len(qubits) != 2:
                raise ValueError("CNOT takes control and target")
            self._state = apply_cnot(self._state, qubits[0], qubits[1])
        elif gate in self._GATES_1Q and len(qubits) == 1:
            self._state = self._GATES_1Q[gate](self._state, qubits[0])
        else:
            raise ValueError(f"unsupported gate {gate!r} on {len(qubits)} qubit(s)")
        self.steps.append(GateApplied(party, gate, tuple(qubits)))

    def transfer(self, qubit: int, src: str, dst: str) -> None:
        self._require_owner(src, (qubit,))
        if src == dst:
            raise ValueError("transfer must change ownership")
        self._owners[qubit] = dst
        self.steps.append(QubitTransferred(src, dst, qubit))

    def measure(self, party: str, qubits: tuple[int, ...], rng: np.random.Generator) -> str:
        self._require_owner(party, qubits)
        bits, self._state = measure_sample(self._state, list(qubits), rng)
        self.steps.append(Measured(party, tuple(qubits), bits))
        return bits

    def send(self, src: str, dst: str, bits: str, purpose: Purpose) -> None:
        if not bits or any(c not in "01" for c in bits):
            raise ValueError(f"bits must be a nonempty 0/1 string, got {bits!r}")
        self.steps.append(MessageSent(src, dst, bits, purpose))
        self.ledger.add(src, dst, len(bits), purpose)

    def apply_correction(self, party: str, qubit: int, gates: tuple[str, ...]) -> None:
        self._require_owner(party, (qubit,))
        for g in gates:
            self._state = self._GATES_1Q[g](self._state, qubit)
        self.steps.append(CorrectionApplied(party, qubit, tuple(gates)))


# ---------------------------------------------------------------------------
# protocol schedules
# ---------------------------------------------------------------------------


def _sqtp_prefix(psi: UnknownQubit) -> ProtocolMachine:
    """SQTP up to (not including) Alice's measurement."""
    m = ProtocolMachine(tensor(psi.to_statevector(), bell_pair()), {0: ALICE, 1: ALICE, 2: ALICE})
    m.transfer(2, ALICE, BOB)  # the pre-shared half of the resource pair
    m.apply(ALICE, "CNOT", 0, 1)
    m.apply(ALICE, "H", 0)
    return m


def _kak_prefix(psi: UnknownQubit) -> ProtocolMachine:
    """Chained-XOR protocol up to (not including) Alice's measurement.

    The unknown state takes part in the XOR chain before any qubit leaves
    Alice, so the channel cannot be established ahead of psi: the machine
    schedule itself fixes XOR, XOR, transfer, H in that order.
    """
    m = ProtocolMachine(tensor(psi.to_statevector(), bell_pair()), {0: ALICE, 1: ALICE, 2: ALICE})
    m.apply(ALICE, "CNOT", 0, 1)
    m.apply(ALICE, "CNOT", 1, 2)
    m.transfer(2, ALICE, BOB)
    m.apply(ALICE, "H", 0)
    return m


def _finish_run(
    kind: ProtocolKind, m: ProtocolMachine, psi: UnknownQubit, rng: np.random.Generator
) -> ProtocolTrace:
    bits = m.measure(ALICE, (0, 1), rng)
    sent = bits[0] if kind is ProtocolKind.KAK else bits
    m.send(ALICE, BOB, sent, Purpose.TELEPORT)
    m.apply_correction(BOB, 2, correction_for(kind, bits))
    bob = collapse_residual(m.state, (0, 1), bits)
    fid = fidelity_pure(bob, psi.to_statevector())
    return ProtocolTrace(kind, m.steps, bob, fid, m.ledger)


def run_sqtp(psi: UnknownQubit, rng: np.random.Generator) -> ProtocolTrace:
    """One sampled run of standard teleportation (2 classical bits)."""
    return _finish_run(ProtocolKind.SQTP, _sqtp_prefix(psi), psi, rng)


def run_kak(psi: UnknownQubit, rng: np.random.Generator) -> ProtocolTrace:
    """One sampled run of the chained-XOR protocol (1 classical bit)."""
    return _finish_run(ProtocolKind.KAK, _kak_prefix(psi), psi, rng)


def run_protocol(kind: ProtocolKind, psi: UnknownQubit, rng: np.random.Generator) -> ProtocolTrace:
    return run_kak(psi, rng) if kind is ProtocolKind.KAK else run_sqtp(psi, rng)


def sqtp_checkpoints(psi: UnknownQubit) -> dict[str, StateVector]:
    """Named register states at each step of the standard protocol."""
    initial = tensor(psi.to_statevector(), bell_pair())
    after_cnot = apply_cnot(initial, 0, 1)
    after_h = apply_h(after_cnot, 0)
    return {
        "epr_pair": bell_pair(),
        "sqtp_initial": initial,
        "sqtp_after_cnot": after_cnot,
        "sqtp_after_h": after_h,
        "sqtp_branch_form": after_h,
    }


def kak_checkpoints(psi: UnknownQubit) -> dict[str, StateVector]:
    """Named register states at each step of the chained-XOR protocol."""
    initial = tensor(psi.to_statevector(), bell_pair())
    after_xor1 = apply_cnot(initial, 0, 1)
    after_xor2 = apply_cnot(after_xor1, 1, 2)
    after_h = apply_h(after_xor2, 0)
    return {
        "kak_initial": initial,
        "kak_after_xor1": after_xor1,
        "kak_after_xor2": after_xor2,
        "kak_after_h": after_h,
        "kak_branch_form": after_h,
        "kak_two_class_form": after_h,
    }


@dataclass(frozen=True)
class ProtocolBranch:
    """One measurement branch of a protocol with Bob's corrected qubit."""

    outcome: BranchOutcome
    bob_state: StateVector
    fidelity: float


def enumerate_protocol(kind: ProtocolKind, psi: UnknownQubit) -> list[ProtocolBranch]:
    """All four measurement branches with corrections applied.

    For SQTP the four corrected residuals all recover psi (branch 11 up to
    a global -1). For KAK the uncorrected residuals come in exactly two
    classes keyed on the q0 bit.
    """
    m = _kak_prefix(psi) if kind is ProtocolKind.KAK else _sqtp_prefix(psi)
    target = psi.to_statevector()
    out = []
    for branch in enumerate_branches(m.state, (0, 1)):
        corrected = branch.post_state
        for g in correction_for(kind, branch.outcome_bits):
            corrected = {"X": apply_x, "Z": apply_z}[g](corrected, 2)
        bob = collapse_residual(corrected, (0, 1), branch.outcome_bits)
        out.append(ProtocolBranch(branch, bob, fidelity_pure(bob, target)))
    return out


# ---------------------------------------------------------------------------
# entangled-input probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EntangledBranch:
    outcome_bits: str
    probability: float
    fidelity_corrected: float
    fidelity_best: float


@dataclass(frozen=True)
class EntangledInputReport:
    """Per-branch outcome of feeding half of a 2-qubit state through KAK.

    fidelity_corrected uses the one-bit table as prescribed; fidelity_best
    takes the better of both one-bit corrections, which is the most
    charitable reading of what Bob could do with the transmitted bit.
    """

    joint_dim: int
    branches: tuple[EntangledBranch, ...]

    @property
    def min_branch_fidelity(self) -> float:
        return min(b.fidelity_best for b in self.branches)

    @property
    def max_branch_fidelity(self) -> float:
        return max(b.fidelity_best for b in self.branches)


def kak_entangled_input_demo(joint: StateVector) -> EntangledInputReport:
    """Feed the second qubit of `joint` through the chained-XOR protocol
    while holding the first back, and compare the resulting
    (holdout, Bob) joint state against the original on every branch.

    Register layout: q0 holdout, q1 fed qubit, q2 and q3 the resource
    pair; the XOR chain runs q1->q2->q3, q3 goes to Bob, Alice measures
    q1 and q2 and announces q1's bit.
    """
    if joint.n_qubits != 2:
        raise ValueError(f"joint input must be 2 qubits, got {joint.n_qubits}")
    state = tensor(joint, bell_pair())
    state = apply_cnot(state, 1, 2)
    state = apply_cnot(state, 2, 3)
    state = apply_h(state, 1)
    branches = []
    for branch in enumerate_branches(state, (1, 2)):
        residual = collapse_residual(branch.post_state, (1, 2), branch.outcome_bits)
        fid_none = fidelity_pure(residual, joint)
        fid_z = fidelity_pure(apply_z(residual, 1), joint)
        prescribed = fid_z if branch.outcome_bits[0] == "1" else fid_none
        branches.append(
            EntangledBranch(branch.outcome_bits, branch.probability, prescribed, max(fid_none, fid_z))
        )
    return EntangledInputReport(joint.dim, tuple(branches))


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloSummary:
    kind: ProtocolKind
    runs: int
    mean_fidelity: float
    min_fidelity: float
    teleport_bits_per_run: int


def monte_carlo(kind: ProtocolKind, n_runs: int, seed: int) -> MonteCarloSummary:
    """Seeded batch of runs over Haar-random inputs.

    Each run gets its own generator spawned from one SeedSequence, so run
    i's result does not depend on how many runs precede it.
    """
    if n_runs < 1:
        raise ValueError(f"n_runs must be >= 1, got {n_runs}")
    fids = []
    bit_counts = set()
    for child in np.random.SeedSequence(seed).spawn(n_runs):
        rng = np.random.default_rng(child)
        trace = run_protocol(kind, UnknownQubit.haar(rng), rng)
        fids.append(trace.fidelity_achieved)
        bit_counts.add(trace.ledger.total(Purpose.TELEPORT))
    if len(bit_counts) != 1:
        raise AssertionError(f"teleport bit count varied across runs: {sorted(bit_counts)}")
    return MonteCarloSummary(
        kind, n_runs, float(np.mean(fids)), float(min(fids)), bit_counts.pop()
    )
