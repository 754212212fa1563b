import dataclasses

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from twinledger.contracts.gas import GasSchedule, charge

DEFAULTS = GasSchedule()


def test_cited_base_costs():
    # The two public constants the whole cost model hangs off.
    assert DEFAULTS.log_base == 375
    assert DEFAULTS.tx_base == 21_000


def test_charge_examples():
    assert charge(DEFAULTS, "tx") == 21_000
    assert charge(DEFAULTS, "log", topics=0, data_bytes=0) == 375
    # 375 + 3*375 + 64*8 = 2012
    assert charge(DEFAULTS, "log", topics=3, data_bytes=64) == 2012
    # 375 + 3*375 + 128*8 = 2524; a full registration tx adds tx_base -> 23524
    assert DEFAULTS.tx_base + charge(DEFAULTS, "log", topics=3, data_bytes=128) == 23_524
    assert charge(DEFAULTS, "sstore_set", slots=6) == 120_000
    assert DEFAULTS.tx_base + charge(DEFAULTS, "sstore_set", slots=6) == 141_000
    assert charge(DEFAULTS, "sstore_update", slots=1) == 5_000
    # 32000 + 200*600 = 152000
    assert charge(DEFAULTS, "deploy", definition_bytes=600) == 152_000


def test_three_value_write_costs():
    # settlor hash + trustee hash + twin hash
    variables = DEFAULTS.tx_base + charge(DEFAULTS, "sstore_set", slots=3)
    logs = DEFAULTS.tx_base + charge(DEFAULTS, "log", topics=3, data_bytes=0)
    assert variables == 81_000
    assert logs == 22_500
    assert logs < variables


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        charge(DEFAULTS, "sload")


def test_schedule_entries_must_be_positive():
    with pytest.raises(ValueError):
        GasSchedule(log_topic=0)
    with pytest.raises(ValueError):
        GasSchedule(tx_base=-1)


def _scaled(default: int, factor: float) -> int:
    return max(1, int(default * factor))


@st.composite
def perturbed_schedules(draw):
    """Schedules scaled field-wise by 0.25x..4x around the defaults."""
    factors = {
        f.name: draw(st.floats(0.25, 4.0))
        for f in dataclasses.fields(GasSchedule)
    }
    return GasSchedule(**{
        name: _scaled(getattr(DEFAULTS, name), factor) for name, factor in factors.items()
    })


@settings(max_examples=200)
@given(perturbed_schedules())
def test_storage_write_ordering_under_perturbation(schedule):
    """For any schedule with sstore_set >= 10x log_topic, the three-value
    write is cheaper through logs than through state variables."""
    assume(schedule.sstore_set >= 10 * schedule.log_topic)
    variables = schedule.tx_base + charge(schedule, "sstore_set", slots=3)
    logs = schedule.tx_base + charge(schedule, "log", topics=3, data_bytes=0)
    assert logs < variables
