"""Command line front end.

Three subcommands:
  verify    check every shipped golden expansion and branch recovery
  compare   run both protocols and tabulate fidelity and classical cost
  sweep     CSV of the distillation economics over a channel-fidelity grid

All outputs are deterministic for a fixed seed: running a command twice
with the same arguments produces byte-identical reports.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass

import numpy as np

from .expansions import ALL_EXPANSIONS, load_expansions
from .kinds import ProtocolKind, Purpose
from .noise import run_noisy_teleport, sweep_rows, SWEEP_COLUMNS
from .protocol import (
    Measured,
    UnknownQubit,
    enumerate_protocol,
    kak_checkpoints,
    run_protocol,
    sqtp_checkpoints,
)

GOLDEN_ATOL = 1e-12


@dataclass(frozen=True)
class RunConfig:
    command: str
    protocol: str = "both"
    n_runs: int = 20
    seed: int = 0
    noise_f: float | None = None
    distill_target: float | None = None
    max_rounds: int = 32
    fmt: str = "text"
    out: str | None = None
    golden: str | None = None
    f_min: float = 0.55
    f_max: float = 0.95
    f_step: float = 0.1

    def __post_init__(self) -> None:
        if self.protocol not in ("sqtp", "kak", "both"):
            raise ValueError(f"protocol must be sqtp, kak or both, got {self.protocol!r}")
        if self.n_runs < 1:
            raise ValueError(f"--runs must be >= 1, got {self.n_runs}")
        if self.noise_f is not None and not 0.0 <= self.noise_f <= 1.0:
            raise ValueError(f"--noise-f must be in [0, 1], got {self.noise_f}")
        if self.distill_target is not None:
            if self.noise_f is None and self.command == "compare":
                raise ValueError("--distill-target requires --noise-f")
            if not 0.0 < self.distill_target <= 1.0:
                raise ValueError(f"--distill-target must be in (0, 1], got {self.distill_target}")
        if self.max_rounds < 1:
            raise ValueError(f"--max-rounds must be >= 1, got {self.max_rounds}")

    def kinds(self) -> list[ProtocolKind]:
        if self.protocol == "both":
            return [ProtocolKind.SQTP, ProtocolKind.KAK]
        return [ProtocolKind(self.protocol)]

    def public_dict(self) -> dict:
        # the destination path is plumbing, not part of the computation,
        # and keeping it out makes reports byte-identical across runs
        d = asdict(self)
        d.pop("out")
        return d


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            with open(out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise RuntimeError(f"cannot write report to {out}: {exc}") from exc


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _csv_text(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(cfg: RunConfig) -> int:
    """Instantiate every golden expansion with random amplitudes and
    compare the engine's registers componentwise; also require every
    corrected branch of both protocols to recover the input."""
    table = load_expansions(cfg.golden)
    rng = np.random.default_rng(cfg.seed)
    max_err = {name: 0.0 for name in ALL_EXPANSIONS}
    branch_err = {"sqtp_branch_recovery": 0.0, "kak_branch_recovery": 0.0}
    for _ in range(cfg.n_runs):
        psi = UnknownQubit.haar(rng)
        states = {**sqtp_checkpoints(psi), **kak_checkpoints(psi)}
        for name in ALL_EXPANSIONS:
            ref = table[name].instantiate(psi.alpha, psi.beta)
            err = float(np.max(np.abs(states[name].amps - ref)))
            max_err[name] = max(max_err[name], err)
        for key, kind in (("sqtp_branch_recovery", ProtocolKind.SQTP),
                          ("kak_branch_recovery", ProtocolKind.KAK)):
            worst = max(1.0 - b.fidelity for b in enumerate_protocol(kind, psi))
            branch_err[key] = max(branch_err[key], worst)

    checks = [
        {"name": name, "max_abs_err": max_err[name], "pass": max_err[name] <= GOLDEN_ATOL}
        for name in ALL_EXPANSIONS
    ] + [
        {"name": name, "max_abs_err": err, "pass": err <= GOLDEN_ATOL}
        for name, err in branch_err.items()
    ]
    all_pass = all(c["pass"] for c in checks)

    if cfg.fmt == "json":
        _emit(_json_text({"command": "verify", "config": cfg.public_dict(),
                          "checks": checks, "all_pass": all_pass}), cfg.out)
    else:
        lines = [f"{'check':24s} {'max_abs_err':>12s}  status"]
        for c in checks:
            status = "PASS" if c["pass"] else "FAIL"
            lines.append(f"{c['name']:24s} {c['max_abs_err']:>12.3e}  {status}")
        passed = sum(c["pass"] for c in checks)
        lines.append(f"overall: {'PASS' if all_pass else 'FAIL'} ({passed}/{len(checks)})")
        _emit("\n".join(lines) + "\n", cfg.out)

    if not all_pass:
        first = next(c["name"] for c in checks if not c["pass"])
        print(f"verify failed: first mismatch in {first}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------


def _compare_data(cfg: RunConfig) -> dict:
    per_run: list[dict] = []
    summary: dict[str, dict] = {}
    kinds = cfg.kinds()
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_runs)
    samples: dict[str, list[dict]] = {k.value: [] for k in kinds}
    for i, child in enumerate(children):
        subs = child.spawn(1 + len(kinds))
        psi = UnknownQubit.haar(np.random.default_rng(subs[0]))
        for k, kind in enumerate(kinds):
            rng = np.random.default_rng(subs[1 + k])
            if cfg.noise_f is None:
                trace = run_protocol(kind, psi, rng)
                digest = {
                    "run": i,
                    "protocol": kind.value,
                    "outcome_bits": next(
                        s.bits for s in trace.steps if isinstance(s, Measured)
                    ),
                    "fidelity": round(trace.fidelity_achieved, 12),
                    "teleport_bits": trace.ledger.total(Purpose.TELEPORT),
                    "locc_bits": trace.ledger.total(Purpose.LOCC),
                    "channel_f": None,
                }
            else:
                report = run_noisy_teleport(
                    kind, psi, cfg.noise_f, rng,
                    distill_target=cfg.distill_target, max_rounds=cfg.max_rounds,
                )
                digest = {
                    "run": i,
                    "protocol": kind.value,
                    "outcome_bits": None,
                    "fidelity": round(report.fidelity, 12),
                    "teleport_bits": report.ledger.total(Purpose.TELEPORT),
                    "locc_bits": report.ledger.total(Purpose.LOCC),
                    "channel_f": round(report.f_final, 12),
                }
            per_run.append(digest)
            samples[kind.value].append(digest)
    for kind in kinds:
        rows = samples[kind.value]
        teleport_bits = {r["teleport_bits"] for r in rows}
        if len(teleport_bits) != 1:
            raise AssertionError(f"teleport bits varied for {kind.value}: {teleport_bits}")
        t_bits = teleport_bits.pop()
        locc_mean = float(np.mean([r["locc_bits"] for r in rows]))
        summary[kind.value] = {
            "mean_fidelity": round(float(np.mean([r["fidelity"] for r in rows])), 12),
            "min_fidelity": round(min(r["fidelity"] for r in rows), 12),
            "teleport_bits": t_bits,
            "locc_bits": round(locc_mean, 12),
            "total_bits": round(t_bits + locc_mean, 12),
        }
    return {"command": "compare", "config": cfg.public_dict(),
            "per_run": per_run, "summary": summary}


_SUMMARY_COLUMNS = ["protocol", "mean_fidelity", "min_fidelity",
                    "teleport_bits", "locc_bits", "total_bits"]


def cmd_compare(cfg: RunConfig) -> int:
    data = _compare_data(cfg)
    if cfg.fmt == "json":
        _emit(_json_text(data), cfg.out)
        return 0
    rows = [{"protocol": name, **vals} for name, vals in data["summary"].items()]
    if cfg.fmt == "csv":
        _emit(_csv_text(_SUMMARY_COLUMNS, rows), cfg.out)
        return 0
    lines = [" ".join(f"{c:>14s}" for c in _SUMMARY_COLUMNS)]
    for r in rows:
        lines.append(" ".join(f"{str(r[c]):>14s}" for c in _SUMMARY_COLUMNS))
    _emit("\n".join(lines) + "\n", cfg.out)
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.f_step <= 0:
        print(f"sweep error: --f-step must be > 0, got {cfg.f_step}", file=sys.stderr)
        return 2
    grid = []
    f = cfg.f_min
    while f <= cfg.f_max + 1e-12:
        grid.append(round(f, 12))
        f += cfg.f_step
    if not grid:
        print(
            f"sweep error: empty grid, --f-min {cfg.f_min} exceeds --f-max {cfg.f_max}",
            file=sys.stderr,
        )
        return 2
    if grid[0] < 0.0 or grid[-1] > 1.0:
        print("sweep error: grid must stay inside [0, 1]", file=sys.stderr)
        return 2
    target = cfg.distill_target if cfg.distill_target is not None else 0.95
    rows = sweep_rows(grid, target, cfg.max_rounds)
    _emit(_csv_text(SWEEP_COLUMNS, rows), cfg.out)
    return 0


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="telecost",
        description="teleportation protocol simulator with classical-cost accounting",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--runs", type=int, default=20, dest="n_runs")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("json", "csv", "text"), default="text", dest="fmt")
        p.add_argument("--out", default=None)

    p_verify = sub.add_parser("verify", help="check golden expansions and branch recovery")
    common(p_verify)
    p_verify.add_argument("--golden", default=None, help="alternate golden expansion file")

    p_compare = sub.add_parser("compare", help="fidelity and classical cost per protocol")
    common(p_compare)
    p_compare.add_argument("--protocol", choices=("sqtp", "kak", "both"), default="both")
    p_compare.add_argument("--noise-f", type=float, default=None, dest="noise_f")
    p_compare.add_argument("--distill-target", type=float, default=None, dest="distill_target")
    p_compare.add_argument("--max-rounds", type=int, default=32, dest="max_rounds")

    p_sweep = sub.add_parser("sweep", help="distillation economics over a fidelity grid")
    p_sweep.add_argument("--f-min", type=float, default=0.55, dest="f_min")
    p_sweep.add_argument("--f-max", type=float, default=0.95, dest="f_max")
    p_sweep.add_argument("--f-step", type=float, default=0.1, dest="f_step")
    p_sweep.add_argument("--distill-target", type=float, default=0.95, dest="distill_target")
    p_sweep.add_argument("--max-rounds", type=int, default=64, dest="max_rounds")
    p_sweep.add_argument("--out", default=None)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    return RunConfig(**fields)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        handler = {"verify": cmd_verify, "compare": cmd_compare, "sweep": cmd_sweep}[cfg.command]
        return handler(cfg)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
