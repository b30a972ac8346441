import json
from types import MappingProxyType

import pytest

from seer.errors import NonpositiveValueError, OrderingViolationError, SchemaError, UnknownContextError
from seer.timing import (
    DEFAULT_MULTIPLIERS,
    ContextSymbol,
    TimingTable,
    duration,
    load_timing_config,
    timing_table_from_dict,
    validate_table,
)

EXPECTED_DEFAULTS = {
    "SIGMA": 2.50,
    "PHI": 0.25,
    "LAMBDA": 1.00,
    "OMEGA": 1.20,
    "GAMMA": 1.50,
    "T": 0.50,
    "XI": 4.00,
}


def _override(**changes) -> TimingTable:
    multipliers = dict(DEFAULT_MULTIPLIERS)
    for name, value in changes.items():
        multipliers[ContextSymbol[name]] = value
    return TimingTable(multipliers=MappingProxyType(multipliers))


def test_defaults_match_baseline_table_exactly():
    table = TimingTable()
    for name, value in EXPECTED_DEFAULTS.items():
        assert table.multipliers[ContextSymbol[name]] == value
    assert table.tau == 1.0


def test_symbol_alias_bijection():
    symbols = [sym.value for sym in ContextSymbol]
    names = [sym.name for sym in ContextSymbol]
    assert len(set(symbols)) == len(symbols) == 7
    assert len(set(names)) == len(names) == 7
    for sym in ContextSymbol:
        assert ContextSymbol.parse(sym.value) is sym
        assert ContextSymbol.parse(sym.name) is sym
    with pytest.raises(UnknownContextError):
        ContextSymbol.parse("ZETA")


def test_duration_examples():
    assert duration(ContextSymbol.SIGMA) == 2.5
    assert duration(ContextSymbol.LAMBDA) == 1.0  # baseline identity
    assert duration(ContextSymbol.XI, TimingTable(tau=0.5)) == 2.0


def test_duration_linear_in_tau_exactly():
    for sym in ContextSymbol:
        for c in (0.25, 1.0, 3.0, 7.5):
            assert duration(sym, TimingTable(tau=c)) == c * duration(sym, TimingTable(tau=1.0))


def test_validate_defaults_ok():
    validate_table(TimingTable())


def test_ordering_violation_names_the_pair():
    with pytest.raises(OrderingViolationError) as exc:
        validate_table(_override(OMEGA=0.9))
    assert "LAMBDA" in str(exc.value) and "OMEGA" in str(exc.value)


def test_uniform_scaling_preserves_ordering():
    scaled = {sym.name: 3 * value for sym, value in DEFAULT_MULTIPLIERS.items()}
    validate_table(timing_table_from_dict({"multipliers": scaled}))


def test_nonpositive_values_rejected():
    with pytest.raises(NonpositiveValueError):
        validate_table(_override(PHI=0.0))
    with pytest.raises(NonpositiveValueError):
        validate_table(TimingTable(tau=-1.0))


def test_config_parsing(tmp_path):
    doc_path = tmp_path / "timing.json"
    doc_path.write_text(json.dumps({"tau": 2.0, "multipliers": {"SIGMA": 2.5, "PHI": 0.25}}))
    table = load_timing_config(str(doc_path))
    assert table.tau == 2.0
    assert duration(ContextSymbol.SIGMA, table) == 5.0
    # symbols accepted as keys too
    table2 = timing_table_from_dict({"multipliers": {"Σ": 3.0}})
    assert table2.multipliers[ContextSymbol.SIGMA] == 3.0


def test_config_rejects_bad_values():
    with pytest.raises(SchemaError):
        timing_table_from_dict({"tau": "fast"})
    with pytest.raises(SchemaError):
        timing_table_from_dict({"multipliers": {"SIGMA": "high"}})
    with pytest.raises(UnknownContextError):
        timing_table_from_dict({"multipliers": {"ZAP": 1.0}})
    with pytest.raises(OrderingViolationError):
        timing_table_from_dict({"multipliers": {"XI": 0.1}})
