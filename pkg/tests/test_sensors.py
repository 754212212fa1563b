import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twinledger.sensors import (
    BadWindow,
    DuplicateId,
    ResourceSpec,
    SensorFleet,
    VirtualSensor,
    Waveform,
)


def spec(**overrides):
    base = dict(resource_id="r1", waveform=Waveform.CONSTANT, base=20.0,
                amplitude=5.0, tick_interval=10, seed=1)
    base.update(overrides)
    return ResourceSpec(**base)


def test_constant_waveform_reads_base_value():
    sensor = VirtualSensor(spec())
    samples = sensor.read_window(0, 100)
    assert all(s.value == 20.0 for s in samples)


def test_same_seed_same_stream():
    a = VirtualSensor(spec(waveform=Waveform.RANDOM_WALK, seed=42))
    b = VirtualSensor(spec(waveform=Waveform.RANDOM_WALK, seed=42))
    assert [s.value for s in a.read_window(0, 1000)] == [s.value for s in b.read_window(0, 1000)]
    c = VirtualSensor(spec(waveform=Waveform.RANDOM_WALK, seed=43))
    assert [s.value for s in a.read_window(0, 1000)] != [s.value for s in c.read_window(0, 1000)]


def test_duplicate_resource_id_rejected():
    fleet = SensorFleet()
    fleet.spawn(spec())
    with pytest.raises(DuplicateId):
        fleet.spawn(spec())


def test_window_zero_to_fifty_has_six_samples():
    # floor(50/10) + 1 ticks: 0, 10, 20, 30, 40, 50
    sensor = VirtualSensor(spec())
    samples = sensor.read_window(0, 50)
    assert [s.timestamp for s in samples] == [0, 10, 20, 30, 40, 50]


def test_point_window_on_tick_boundary():
    sensor = VirtualSensor(spec())
    assert len(sensor.read_window(30, 30)) == 1
    assert len(sensor.read_window(31, 39)) == 0


def test_inverted_window_rejected():
    with pytest.raises(BadWindow):
        VirtualSensor(spec()).read_window(10, 0)


@settings(max_examples=60)
@given(start=st.integers(0, 10_000), span=st.integers(0, 5_000), tick=st.integers(1, 600))
def test_spacing_and_monotonicity(start, span, tick):
    sensor = VirtualSensor(spec(tick_interval=tick, waveform=Waveform.SINUSOID))
    samples = sensor.read_window(start, start + span)
    times = [s.timestamp for s in samples]
    assert all(start <= t <= start + span for t in times)
    assert all(t % tick == 0 for t in times)
    assert all(b - a == tick for a, b in zip(times, times[1:]))


def test_random_walk_stays_finite_over_a_million_ticks():
    sensor = VirtualSensor(spec(waveform=Waveform.RANDOM_WALK, amplitude=3.0))
    last_tick = 1_000_000
    assert math.isfinite(sensor.value_at_tick(last_tick))
    assert math.isfinite(sensor.value_at_tick(last_tick // 2))


def test_sinusoid_bounded_by_amplitude():
    sensor = VirtualSensor(spec(waveform=Waveform.SINUSOID, base=10.0, amplitude=2.0))
    values = [sensor.value_at_tick(k) for k in range(500)]
    assert all(8.0 <= v <= 12.0 for v in values)
    assert max(values) > 11.0 and min(values) < 9.0


def test_fleet_from_config_file(tmp_path):
    import json

    path = tmp_path / "fleet.json"
    path.write_text(json.dumps({"resources": [spec(resource_id="meter01").to_json_dict()]}))
    fleet = SensorFleet.from_config_file(path)
    assert fleet.ids() == ["meter01"]
    assert fleet.get("meter01").spec.base == 20.0
    assert fleet.get("meter01").spec.waveform is Waveform.CONSTANT
