"""Werner channels, noisy teleport fidelity, and recurrence
distillation, checked against the dense oracle and frozen goldens."""

import numpy as np
import pytest

import oracle_dense
from telecost.kinds import ProtocolKind, Purpose
from telecost.noise import (
    SWEEP_COLUMNS,
    DensityMatrix,
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
from telecost.protocol import UnknownQubit
from telecost.statevector import basis_state, bell_pair

F_GRID = [0.55, 0.65, 0.75, 0.85, 0.95]

# one recurrence step per input fidelity, frozen from tests/oracle_dense.py
# (run `python3 tests/oracle_dense.py` to regenerate the table)
DISTILL_GOLDENS = {
    0.25: (0.5, 0.25),
    0.55: (0.58, 0.560344827586207),
    0.65: (0.642222222222222, 0.679065743944637),
    0.75: (0.722222222222222, 0.788461538461538),
    0.85: (0.82, 0.884146341463414),
    0.95: (0.935555555555555, 0.964964370546318),
}

# deterministic ladder from 0.75 toward a 0.9 target, same oracle run
LADDER_075 = [
    0.788461538461538,
    0.827006507592191,
    0.863459406821828,
    0.895887054041566,
    0.923061003778285,
]


def haar(seed):
    return UnknownQubit.haar(np.random.default_rng(seed))


def test_werner_eigenvalues():
    w = werner_state(0.7)
    eigs = sorted(np.linalg.eigvalsh(w.mat))
    assert np.allclose(eigs, [0.1, 0.1, 0.1, 0.7], atol=1e-12)


def test_werner_quarter_is_maximally_mixed():
    w = werner_state(0.25)
    assert np.allclose(w.mat, np.eye(4) / 4.0, atol=1e-12)


@pytest.mark.parametrize("f", [-0.01, 1.01])
def test_werner_rejects_out_of_range(f):
    with pytest.raises(ValueError):
        werner_state(f)


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(1, np.array([[0.5, 0.5j], [0.5j, 0.5]]))  # not Hermitian
    with pytest.raises(ValueError):
        DensityMatrix(1, np.eye(2))  # trace 2
    with pytest.raises(ValueError):
        DensityMatrix(1, np.diag([1.5, -0.5]))  # negative eigenvalue
    with pytest.raises(ValueError):
        DensityMatrix(2, np.eye(2) / 2.0)  # wrong shape for 2 qubits
    with pytest.raises(ValueError):
        DensityMatrix(5, np.eye(32) / 32.0)  # over the size cap


def test_density_matrix_read_only():
    w = werner_state(0.8)
    with pytest.raises(ValueError):
        w.mat[0, 0] = 99.0


def test_density_tensor_size_cap():
    w = werner_state(0.8)
    rho4 = density_tensor(w, w)
    assert rho4.n_qubits == 4
    with pytest.raises(ValueError):
        density_tensor(rho4, density_from_pure(basis_state(1, "0")))


def test_perfect_channel_boundary():
    chan = density_from_pure(bell_pair())
    for kind in ProtocolKind:
        for seed in range(20):
            fid = teleport_fidelity_noisy(kind, haar(seed), chan)
            assert abs(fid - 1.0) < 1e-10


def test_maximally_mixed_channel_boundary():
    chan = werner_state(0.25)
    for kind in ProtocolKind:
        for seed in range(20):
            fid = teleport_fidelity_noisy(kind, haar(seed), chan)
            assert abs(fid - 0.5) < 1e-10


def test_werner_fidelity_linear_rule():
    # output fidelity is (2F + 1)/3 regardless of protocol or input
    for f in [0.0, 0.25, 0.4, 0.7, 0.85, 1.0]:
        chan = werner_state(f)
        expected = (2.0 * f + 1.0) / 3.0
        for kind in ProtocolKind:
            for seed in range(5):
                fid = teleport_fidelity_noisy(kind, haar(seed), chan)
                assert abs(fid - expected) < 1e-10


def test_frozen_working_point():
    chan = werner_state(0.85)
    fid = teleport_fidelity_noisy(ProtocolKind.SQTP, haar(0), chan)
    assert abs(fid - 0.9) < 1e-10


def test_fidelity_matches_dense_oracle():
    for f in F_GRID:
        chan = werner_state(f)
        oracle_chan = oracle_dense.werner_dm(f)
        for kind in ProtocolKind:
            for alpha, beta in oracle_dense.sphere_grid(4, 4):
                got = teleport_fidelity_noisy(kind, UnknownQubit(alpha, beta), chan)
                want = oracle_dense.oracle_teleport_fidelity(kind.value, alpha, beta, oracle_chan)
                assert abs(got - want) < 1e-9


def test_channel_size_validation():
    with pytest.raises(ValueError):
        teleport_fidelity_noisy(ProtocolKind.SQTP, haar(1), density_from_pure(basis_state(1, "0")))


def test_distill_map_frozen_goldens():
    for f, (p_want, f_want) in DISTILL_GOLDENS.items():
        p_got, f_got = distill_step_map(f)
        assert abs(p_got - p_want) < 1e-9
        assert abs(f_got - f_want) < 1e-9


def test_distill_map_matches_live_oracle():
    for f in F_GRID + [0.51, 0.6, 0.99]:
        got = distill_step_map(f)
        dense = oracle_dense.oracle_distill_map(f)
        closed = oracle_dense.closed_form_distill(f)
        assert abs(got[0] - dense[0]) < 1e-9 and abs(got[1] - dense[1]) < 1e-9
        assert abs(got[0] - closed[0]) < 1e-9 and abs(got[1] - closed[1]) < 1e-9


def test_distill_map_monotone_above_half():
    for f in np.linspace(0.52, 0.98, 24):
        _, f_out = distill_step_map(float(f))
        assert f_out > f + 1e-6


def test_distill_quarter_fixed_point():
    p, f_out = distill_step_map(0.25)
    assert abs(p - 0.5) < 1e-12
    assert abs(f_out - 0.25) < 1e-12


def test_distill_step_failure_keeps_input_fidelity():
    rng = np.random.default_rng(123)
    saw_failure = saw_success = False
    _, f_expected = distill_step_map(0.75)
    while not (saw_failure and saw_success):
        out = distill_step(0.75, rng)
        if out.success:
            saw_success = True
            assert abs(out.f_out - f_expected) < 1e-12
        else:
            saw_failure = True
            assert out.f_out == 0.75
        assert out.locc_bits == 2


def test_distill_step_success_frequency():
    rng = np.random.default_rng(7)
    n = 4000
    p, _ = distill_step_map(0.75)
    wins = sum(distill_step(0.75, rng).success for _ in range(n))
    sigma = np.sqrt(n * p * (1.0 - p))
    assert abs(wins - n * p) < 3.0 * sigma


def test_distill_to_threshold_already_there():
    run = distill_to_threshold(0.999, 0.99, 32, np.random.default_rng(0))
    assert run.rounds == 0 and run.attempts == 0
    assert run.locc_bits == 0
    assert run.final_f == 0.999


def test_distill_to_threshold_reaches_target():
    for seed in range(10):
        run = distill_to_threshold(0.75, 0.9, 64, np.random.default_rng(seed))
        assert run.final_f >= 0.9
        assert run.rounds == 5  # the deterministic ladder length
        assert run.attempts >= run.rounds
        assert run.locc_bits == 2 * run.attempts


def test_distill_to_threshold_validation():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        distill_to_threshold(0.5, 0.9, 32, rng)
    with pytest.raises(ValueError):
        distill_to_threshold(0.3, 0.9, 32, rng)
    with pytest.raises(ValueError):
        distill_to_threshold(0.75, 0.0, 32, rng)
    with pytest.raises(ValueError):
        distill_to_threshold(0.75, 1.5, 32, rng)
    with pytest.raises(ValueError):
        distill_to_threshold(0.75, 0.9, 0, rng)


def test_deterministic_ladder_from_075():
    f = 0.75
    for want in LADDER_075:
        f = distill_step_map(f)[1]
        assert abs(f - want) < 1e-9
    assert deterministic_rounds_to_target(0.75, 0.9) == 5


def test_deterministic_rounds_edge_cases():
    assert deterministic_rounds_to_target(0.95, 0.9) == 0
    assert deterministic_rounds_to_target(0.4, 0.9) == -1
    assert deterministic_rounds_to_target(0.75, 1.0) == -1  # cap hit


def test_sweep_rows_shape_and_coupling():
    rows = sweep_rows(F_GRID, 0.95)
    assert [r["F_in"] for r in rows] == F_GRID
    for row in rows:
        assert list(row) == SWEEP_COLUMNS
        assert row["locc_bits"] == 2 * row["rounds_to_target"]
        assert row["total_bits_sqtp"] - row["total_bits_kak"] == 1
        assert row["total_bits_kak"] == 1 + row["locc_bits"]
    f_outs = [r["F_out"] for r in rows]
    assert f_outs == sorted(f_outs)


def test_sweep_rows_unreachable_marker():
    row = sweep_rows([0.3], 0.95)[0]
    assert row["rounds_to_target"] == -1
    assert row["locc_bits"] == -1
    assert row["total_bits_sqtp"] == -1 and row["total_bits_kak"] == -1


def test_run_noisy_teleport_without_distillation():
    psi = haar(5)
    report = run_noisy_teleport(ProtocolKind.KAK, psi, 0.95, np.random.default_rng(5),
                                distill_target=0.9)
    assert report.rounds == 0 and report.attempts == 0
    assert report.f_final == 0.95
    assert report.ledger.total(Purpose.LOCC) == 0
    assert abs(report.fidelity - (2 * 0.95 + 1) / 3) < 1e-10


def test_run_noisy_teleport_distills_and_reports():
    psi = haar(6)
    report = run_noisy_teleport(ProtocolKind.SQTP, psi, 0.75, np.random.default_rng(6),
                                distill_target=0.9)
    assert report.f_initial == 0.75
    assert report.f_final >= 0.9
    assert abs(report.fidelity - (2 * report.f_final + 1) / 3) < 1e-10
    assert report.ledger.total(Purpose.TELEPORT) == 2


def test_run_noisy_teleport_seeded_repeatability():
    psi = haar(7)
    a = run_noisy_teleport(ProtocolKind.KAK, psi, 0.75, np.random.default_rng(9),
                           distill_target=0.9)
    b = run_noisy_teleport(ProtocolKind.KAK, psi, 0.75, np.random.default_rng(9),
                           distill_target=0.9)
    assert (a.rounds, a.attempts, a.f_final, a.fidelity) == (b.rounds, b.attempts, b.f_final, b.fidelity)
    assert a.ledger == b.ledger
