"""Golden register expansions for protocol verification.

The shipped data file holds, for each named checkpoint of both protocols,
the exact amplitude of every basis ket as a symbolic coefficient from
{+-1, +-1/sqrt2, +-1/2} times one of {alpha, beta, 1}. Instantiating the
table with concrete amplitudes gives reference vectors an engine run must
match componentwise. Eleven expansions are shipped: five for the standard
protocol (EPR pair, initial product, after CNOT, after H, branch form)
and six for the chained-XOR protocol (initial, after each XOR, after H,
branch form, two-class form).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

_COEFF_VALUES = {
    "1": 1.0,
    "-1": -1.0,
    "1/2": 0.5,
    "-1/2": -0.5,
    "1/sqrt2": 1.0 / np.sqrt(2.0),
    "-1/sqrt2": -1.0 / np.sqrt(2.0),
}

SQTP_EXPANSIONS = ("epr_pair", "sqtp_initial", "sqtp_after_cnot", "sqtp_after_h", "sqtp_branch_form")
KAK_EXPANSIONS = (
    "kak_initial",
    "kak_after_xor1",
    "kak_after_xor2",
    "kak_after_h",
    "kak_branch_form",
    "kak_two_class_form",
)
ALL_EXPANSIONS = SQTP_EXPANSIONS + KAK_EXPANSIONS


@dataclass(frozen=True)
class Expansion:
    name: str
    n_qubits: int
    terms: tuple[tuple[str, str, str], ...]  # (basis, coeff token, var)

    def instantiate(self, alpha: complex, beta: complex) -> np.ndarray:
        """Reference amplitude vector for concrete input amplitudes."""
        vec = np.zeros(2**self.n_qubits, dtype=complex)
        var_values = {"alpha": alpha, "beta": beta, "1": 1.0}
        for basis, coeff, var in self.terms:
            vec[int(basis, 2)] += _COEFF_VALUES[coeff] * var_values[var]
        return vec


def load_expansions(path: str | Path | None = None) -> dict[str, Expansion]:
    """Load the golden table, from `path` if given, else the shipped file."""
    if path is None:
        raw = resources.files("telecost").joinpath("data/expansions.json").read_text()
    else:
        raw = Path(path).read_text()
    data = json.loads(raw)
    table: dict[str, Expansion] = {}
    for name, entry in data.items():
        terms = []
        for t in entry["terms"]:
            if t["coeff"] not in _COEFF_VALUES:
                raise ValueError(f"{name}: unknown coefficient token {t['coeff']!r}")
            if t["var"] not in ("alpha", "beta", "1"):
                raise ValueError(f"{name}: unknown variable {t['var']!r}")
            if len(t["basis"]) != entry["n_qubits"] or any(c not in "01" for c in t["basis"]):
                raise ValueError(f"{name}: bad basis label {t['basis']!r}")
            terms.append((t["basis"], t["coeff"], t["var"]))
        table[name] = Expansion(name, int(entry["n_qubits"]), tuple(terms))
    missing = [n for n in ALL_EXPANSIONS if n not in table]
    if missing:
        raise ValueError(f"golden table is missing expansions: {missing}")
    return table
