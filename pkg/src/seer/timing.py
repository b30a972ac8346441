"""Calling-context symbols and their duration priors.

Each method-type / structural-operator symbol carries a relative duration,
expressed as a multiple of the baseline quantum tau. Only the ratios matter
downstream; overrides must preserve the empirically observed ordering
phi < T < Lambda < Omega < Gamma < Sigma < Xi.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping

from .errors import NonpositiveValueError, OrderingViolationError, SchemaError, UnknownContextError


class ContextSymbol(Enum):
    """Closed set of calling-context categories. Names are the ASCII aliases."""

    SIGMA = "Σ"     # constructor (alloc + init)
    PHI = "φ"       # getter or setter
    LAMBDA = "Λ"    # ordinary instance call
    OMEGA = "Ω"     # virtual / interface dispatch
    GAMMA = "Γ"     # general processing, nontrivial body
    T = "T"         # static method, direct call
    XI = "Ξ"        # cloning, deep copy semantics

    @classmethod
    def parse(cls, raw: str) -> "ContextSymbol":
        """Accept either the symbol ("Σ") or its ASCII alias ("SIGMA")."""
        for sym in cls:
            if raw == sym.value or raw == sym.name:
                return sym
        raise UnknownContextError(f"unknown context symbol {raw!r}", element=raw)


DEFAULT_MULTIPLIERS: Mapping[ContextSymbol, float] = MappingProxyType(
    {
        ContextSymbol.SIGMA: 2.50,
        ContextSymbol.PHI: 0.25,
        ContextSymbol.LAMBDA: 1.00,
        ContextSymbol.OMEGA: 1.20,
        ContextSymbol.GAMMA: 1.50,
        ContextSymbol.T: 0.50,
        ContextSymbol.XI: 4.00,
    }
)

#: required strict ordering of multipliers, slowest last
ORDERING: tuple[ContextSymbol, ...] = (
    ContextSymbol.PHI,
    ContextSymbol.T,
    ContextSymbol.LAMBDA,
    ContextSymbol.OMEGA,
    ContextSymbol.GAMMA,
    ContextSymbol.SIGMA,
    ContextSymbol.XI,
)


@dataclass(frozen=True)
class TimingTable:
    """Baseline quantum tau plus per-symbol multipliers."""

    tau: float = 1.0
    multipliers: Mapping[ContextSymbol, float] = field(default_factory=lambda: DEFAULT_MULTIPLIERS)

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "multipliers": {sym.name: float(self.multipliers[sym]) for sym in ContextSymbol},
        }


def validate_table(table: TimingTable) -> None:
    """Raise unless all values are positive and the ordering invariant holds."""
    if table.tau <= 0:
        raise NonpositiveValueError(f"tau must be positive, got {table.tau}", element="tau")
    missing = [sym.name for sym in ContextSymbol if sym not in table.multipliers]
    if missing:
        raise SchemaError(f"missing multipliers for {missing}", element=missing[0])
    for sym in ContextSymbol:
        if table.multipliers[sym] <= 0:
            raise NonpositiveValueError(
                f"multiplier for {sym.name} must be positive, got {table.multipliers[sym]}",
                element=sym.name,
            )
    for faster, slower in zip(ORDERING, ORDERING[1:]):
        if not table.multipliers[faster] < table.multipliers[slower]:
            raise OrderingViolationError(
                f"ordering violated: {faster.name} ({table.multipliers[faster]}) "
                f"must be < {slower.name} ({table.multipliers[slower]})",
                element=f"{faster.name},{slower.name}",
            )


def duration(sym: ContextSymbol, table: TimingTable | None = None) -> float:
    """Duration of one interaction: multiplier x tau. Linear in tau."""
    table = table if table is not None else TimingTable()
    return float(table.multipliers[sym]) * float(table.tau)


def timing_table_from_dict(doc: Mapping) -> TimingTable:
    """Build and validate a table from config JSON.

    Expected shape: {"tau": 1.0, "multipliers": {"SIGMA": 2.5, ...}} with
    ASCII aliases (or symbols) as keys; omitted symbols keep their defaults.
    """
    if not isinstance(doc, Mapping):
        raise SchemaError("timing config must be a JSON object")
    tau = doc.get("tau", 1.0)
    if not isinstance(tau, (int, float)) or isinstance(tau, bool):
        raise SchemaError(f"tau must be a number, got {tau!r}", element="tau")
    multipliers = dict(DEFAULT_MULTIPLIERS)
    for key, value in doc.get("multipliers", {}).items():
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(f"multiplier {key!r} must be a number", element=str(key))
        multipliers[ContextSymbol.parse(key)] = float(value)
    table = TimingTable(tau=float(tau), multipliers=MappingProxyType(multipliers))
    validate_table(table)
    return table


def load_timing_config(path: str) -> TimingTable:
    with open(path, "r", encoding="utf-8") as fh:
        return timing_table_from_dict(json.load(fh))
