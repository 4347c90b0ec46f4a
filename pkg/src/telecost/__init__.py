"""telecost: exact teleportation-protocol simulation with cost accounting."""

from .cost import (
    CostLedger,
    CostModel,
    LedgerEntry,
    ideal_bits,
    ledger_rows,
    total_cost,
    write_ledger_csv,
    write_ledger_json,
)
from .expansions import ALL_EXPANSIONS, Expansion, load_expansions
from .kinds import ALICE, BOB, ProtocolKind, Purpose
from .noise import (
    DensityMatrix,
    DistillRun,
    DistillStepOutcome,
    NoisyTeleportReport,
    density_from_pure,
    density_tensor,
    deterministic_rounds_to_target,
    distill_step,
    distill_step_map,
    distill_to_threshold,
    run_noisy_teleport,
    sweep_rows,
    teleport_fidelity_noisy,
    werner_state,
)
from .protocol import (
    EntangledInputReport,
    MonteCarloSummary,
    ProtocolBranch,
    ProtocolMachine,
    ProtocolTrace,
    UnknownQubit,
    enumerate_protocol,
    kak_checkpoints,
    kak_entangled_input_demo,
    monte_carlo,
    run_kak,
    run_protocol,
    run_sqtp,
    sqtp_checkpoints,
)
from .statevector import (
    BranchOutcome,
    StateVector,
    apply_cnot,
    apply_h,
    apply_x,
    apply_z,
    basis_state,
    bell_pair,
    collapse_residual,
    enumerate_branches,
    fidelity_pure,
    measure_sample,
    tensor,
)

__version__ = "0.1.0"
