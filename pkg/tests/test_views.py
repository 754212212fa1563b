import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twinledger.contracts.model import DataView, ViewFormat
from twinledger.gateway.views import EmptyWindow, Window, filter_samples, parse_view, render_view
from twinledger.sensors import SensorSample


def make_samples(timestamps, value=1.5):
    return [SensorSample("r1", t, value + t * 0.001) for t in timestamps]


def test_default_format_is_json():
    assert DataView(60).view_format is ViewFormat.JSON
    body = render_view(make_samples([0, 60]), DataView(60), Window(0, 60), "twin001")
    assert body.startswith(b"{")


def test_inverted_window_raises():
    with pytest.raises(EmptyWindow):
        render_view([], DataView(60), Window(10, 5), "twin001")


def test_period_filter_matches_brute_force():
    # Samples every 10s over [0,180]: 19 candidates; period 60 keeps the
    # multiples of 60 only.
    samples = make_samples(range(0, 181, 10))
    window, period = Window(0, 180), 60
    brute = [s for s in samples if window.start <= s.timestamp <= window.end
             and (s.timestamp - window.start) % period == 0]
    assert [s.timestamp for s in brute] == [0, 60, 120, 180]
    kept = filter_samples(samples, window, period)
    assert kept == brute


def test_render_parse_round_trip_both_formats():
    samples = make_samples([0, 60, 120, 180])
    for fmt in ViewFormat:
        view = DataView(60, fmt)
        body = render_view(samples, view, Window(0, 180), "twin001")
        parsed = parse_view(body)
        assert parsed.twin_id == "twin001"
        assert parsed.view_format is fmt
        assert parsed.period == 60
        assert parsed.window == Window(0, 180)
        assert list(parsed.samples) == [(s.timestamp, s.value) for s in samples]


def test_render_bytes_are_stable():
    samples = make_samples([0, 60])
    view = DataView(60, ViewFormat.XML)
    assert render_view(samples, view, Window(0, 60), "t") == render_view(samples, view, Window(0, 60), "t")


@settings(max_examples=80)
@given(
    start=st.integers(0, 10_000),
    periods=st.integers(1, 30),
    period_ticks=st.integers(1, 5),
    fmt=st.sampled_from(list(ViewFormat)),
)
def test_window_soundness_and_round_trip(start, periods, period_ticks, fmt):
    tick = 10
    period = tick * period_ticks
    start = start - start % tick
    window = Window(start, start + periods * period)
    all_samples = make_samples(range(window.start, window.end + 1, tick))
    body = render_view(all_samples, DataView(period, fmt), window, "twinX")
    parsed = parse_view(body)
    times = [t for t, _ in parsed.samples]
    # No timestamp escapes the window; consecutive points sit exactly one
    # streaming period apart.
    assert all(window.start <= t <= window.end for t in times)
    assert all(b - a == period for a, b in zip(times, times[1:]))
    assert len(times) == periods + 1
    assert [v for _, v in parsed.samples] == [s.value for s in filter_samples(all_samples, window, period)]
