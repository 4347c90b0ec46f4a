"""Classical-communication bookkeeping.

Every classical message in a run lands here as a ledger entry. The ideal
protocol costs are fixed by the protocol family: teleporting a state of
dimension N takes 2*log2(N) classical bits the standard way and log2(N)
bits (one per qubit) the chained-XOR way. Anything a noisy run spends on
distillation is tagged LOCC and accounted on top.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .kinds import ProtocolKind, Purpose


@dataclass(frozen=True)
class LedgerEntry:
    sender: str
    receiver: str
    bits: int
    purpose: Purpose

    def __post_init__(self) -> None:
        if not isinstance(self.bits, int) or self.bits < 1:
            raise ValueError(f"bits must be a positive integer, got {self.bits!r}")
        if self.sender == self.receiver:
            raise ValueError("sender and receiver must differ")


class CostLedger:
    """Append-only list of classical messages with purpose totals."""

    def __init__(self) -> None:
        self._entries: list[LedgerEntry] = []

    def add(self, sender: str, receiver: str, bits: int, purpose: Purpose) -> LedgerEntry:
        entry = LedgerEntry(sender, receiver, bits, purpose)
        self._entries.append(entry)
        return entry

    @property
    def entries(self) -> tuple[LedgerEntry, ...]:
        return tuple(self._entries)

    def total(self, purpose: Purpose | None = None) -> int:
        return sum(e.bits for e in self._entries if purpose is None or e.purpose is purpose)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CostLedger):
            return NotImplemented
        return self._entries == other._entries

    def __len__(self) -> int:
        return len(self._entries)


@dataclass(frozen=True)
class CostModel:
    """Ideal cost model for teleporting one N-dimensional state."""

    dimension: int
    kind: ProtocolKind

    def __post_init__(self) -> None:
        n = self.dimension
        if not isinstance(n, int) or n < 2 or n & (n - 1):
            raise ValueError(f"dimension must be a power of two >= 2, got {n!r}")


def ideal_bits(model: CostModel) -> int:
    """Classical bits an ideal run of the protocol family transmits."""
    n_qubits = model.dimension.bit_length() - 1
    return n_qubits if model.kind is ProtocolKind.KAK else 2 * n_qubits


def total_cost(ledger: CostLedger, purpose: Purpose | None = None) -> int:
    return ledger.total(purpose)


def ledger_rows(run_id: str | int, ledger: CostLedger) -> list[dict]:
    """Flat export rows, one per message."""
    return [
        {
            "run_id": run_id,
            "from": e.sender,
            "to": e.receiver,
            "bits": e.bits,
            "purpose": e.purpose.value,
        }
        for e in ledger.entries
    ]


_LEDGER_COLUMNS = ["run_id", "from", "to", "bits", "purpose"]


def write_ledger_csv(path: str | Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_LEDGER_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def write_ledger_json(path: str | Path, rows: list[dict]) -> None:
    with open(path, "w") as fh:
        json.dump(rows, fh, indent=2, sort_keys=True)
        fh.write("\n")
