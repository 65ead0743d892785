import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from firmdyn.errors import ConfigError
from firmdyn.forcing import (
    CANONICAL_PERIODS,
    RISK_CATEGORIES,
    Calibration,
    CycleSpec,
    RiskProfile,
    canonical_cycles,
    drive,
    map_to_lambda,
    superpose,
    time_grid,
    total_risk,
    trace,
)

cycles_st = st.lists(
    st.builds(
        CycleSpec,
        name=st.just("c"),
        amplitude=st.floats(0, 10),
        period=st.floats(0.5, 100),
        phase=st.floats(-math.pi, math.pi),
    ),
    max_size=6,
)


def test_quarter_period_peak():
    assert superpose([CycleSpec("k", 1.0, 4.0)], 1.0) == pytest.approx(1.0, abs=1e-15)


def test_empty_superposition_is_zero():
    assert superpose([], 12.3) == 0.0


def test_canonical_cycles_vanish_at_origin():
    assert superpose(canonical_cycles(), 0.0) == 0.0


def test_canonical_periods_are_range_midpoints():
    assert CANONICAL_PERIODS == {"kitchin": 5.0, "juglar": 9.0, "kuznets": 20.0, "kondratieff": 52.5}
    assert all(c.phase == 0.0 for c in canonical_cycles())


@pytest.mark.parametrize("kwargs", [dict(period=0.0), dict(period=-1.0), dict(amplitude=-0.1)])
def test_cycle_invariants(kwargs):
    base = dict(name="c", amplitude=1.0, period=5.0)
    with pytest.raises(ConfigError):
        CycleSpec(**{**base, **kwargs})


def test_risk_aggregate_sums_amplitudes():
    assert RiskProfile.uniform(0.1).aggregate_amplitude() == pytest.approx(0.7, abs=1e-15)


@given(t=st.floats(-1e3, 1e3))
def test_zero_risk_is_zero(t):
    assert total_risk(RiskProfile.uniform(0.0), t) == 0.0


def test_single_risk_reduces_to_its_cycle():
    components = RiskProfile.uniform(0.0).components
    tax = CycleSpec("tax", 0.4, 3.0, 0.2)
    profile = RiskProfile({**components, "tax": tax})
    for t in (0.0, 0.7, 5.5):
        assert total_risk(profile, t) == superpose([tax], t)


def test_risk_profile_needs_exactly_seven_categories():
    components = dict(RiskProfile.uniform().components)
    del components["legal"]
    with pytest.raises(ConfigError):
        RiskProfile(components)
    components["legal"] = components["marketing"] = CycleSpec("x", 0.0, 1.0)
    with pytest.raises(ConfigError):
        RiskProfile(components)
    assert len(RISK_CATEGORIES) == 7


def test_risk_profile_orders_categories():
    shuffled = dict(reversed(list(RiskProfile.uniform().components.items())))
    assert tuple(RiskProfile(shuffled).components) == RISK_CATEGORIES


@settings(max_examples=200)
@given(cycles=cycles_st, t=st.floats(-1e3, 1e3))
def test_superposition_bounded_by_amplitudes(cycles, t):
    assert abs(superpose(cycles, t)) <= sum(c.amplitude for c in cycles) + 1e-9


@settings(max_examples=200)
@given(
    a=st.floats(0, 5),
    period=st.floats(0.5, 60),
    phase=st.floats(-math.pi, math.pi),
    t=st.floats(-1e3, 1e3),
)
def test_single_cycle_periodicity(a, period, phase, t):
    c = [CycleSpec("c", a, period, phase)]
    assert superpose(c, t + period) == pytest.approx(superpose(c, t), abs=1e-12 * max(1, a) * 1e3)


def test_calibration_boundaries_and_midpoint():
    cal = Calibration(0.2, 1.2, 2.8, 3.9)
    assert map_to_lambda(0.2, cal) == 2.8
    assert map_to_lambda(1.2, cal) == 3.9
    assert map_to_lambda(0.7, cal) == pytest.approx((2.8 + 3.9) / 2, abs=1e-15)
    assert map_to_lambda(-5.0, cal) == 2.8
    assert map_to_lambda(5.0, cal) == 3.9


def test_calibration_inverse():
    cal = Calibration()
    for lam in (2.5, 3.0, 3.5699, 4.0):
        assert map_to_lambda(cal.to_amplitude(lam), cal) == pytest.approx(lam, abs=1e-15)


@pytest.mark.parametrize(
    "args", [(1.0, 1.0, 2.5, 4.0), (1.0, 0.0, 2.5, 4.0), (0.0, 1.0, 3.0, 3.0), (0.0, 1.0, -1.0, 4.0), (0.0, 1.0, 2.0, 4.5)]
)
def test_calibration_invariants(args):
    with pytest.raises(ConfigError):
        Calibration(*args)


@settings(max_examples=1000)
@given(a=st.floats(-10, 10), b=st.floats(-10, 10))
def test_calibration_monotone(a, b):
    cal = Calibration()
    lo, hi = sorted((a, b))
    assert map_to_lambda(lo, cal) <= map_to_lambda(hi, cal)


def test_drive_constant_zero_amplitude():
    cal = Calibration()
    out = drive([CycleSpec("flat", 0.0, 5.0)], cal, [0.0, 1.0, 2.5])
    assert out == [(0.0, map_to_lambda(0, cal)), (1.0, map_to_lambda(0, cal)), (2.5, map_to_lambda(0, cal))]


def test_drive_single_time():
    assert len(drive(canonical_cycles(), Calibration(), [3.0])) == 1


def test_drive_rejects_empty_grid():
    with pytest.raises(ConfigError):
        drive(canonical_cycles(), Calibration(), [])


def test_drive_clamps_on_exceedance():
    cal = Calibration(0.0, 1.0, 2.5, 4.0)
    cycle = CycleSpec("strong", 1.5, 10.0)
    grid = [i * 0.1 for i in range(101)]
    out = drive([cycle], cal, grid)
    for t, lam in out:
        a = 1.5 * math.sin(2 * math.pi * t / 10.0)  # direct evaluation
        if a >= 1.0:
            assert lam == 4.0
        elif a <= 0.0:
            assert lam == 2.5
        else:
            assert lam == pytest.approx(2.5 + 1.5 * a, abs=1e-12)
    assert any(lam == 4.0 for _, lam in out)


def test_drive_accepts_risk_profile():
    profile = RiskProfile.uniform(0.1, period=2.0)
    grid = [0.0, 0.5, 1.0]
    assert drive(profile, Calibration(), grid) == drive(profile.cycles(), Calibration(), grid)


@settings(max_examples=100)
@given(cycles=cycles_st, t0=st.floats(-50, 50))
def test_drive_output_range(cycles, t0):
    cal = Calibration(-1.0, 1.0, 2.9, 3.8)
    for _, lam in drive(cycles, cal, [t0 + k for k in range(5)]):
        assert 2.9 <= lam <= 3.8


def test_trace_carries_amplitude():
    (t, a, lam), = trace([CycleSpec("k", 0.5, 4.0)], Calibration(), [1.0])
    assert (t, lam) == (1.0, 3.25)
    assert a == pytest.approx(0.5)


def test_time_grid():
    assert time_grid(1.0, 0.25) == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert time_grid(0.0, 1.0) == [0.0]
    with pytest.raises(ConfigError):
        time_grid(1.0, 0.0)
