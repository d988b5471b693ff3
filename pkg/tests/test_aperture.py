import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from aos_swarm import aperture
from aos_swarm.errors import UnsupportedSize


def test_worked_example():
    rep = aperture.sampling_loss(10, 35.0, 1.0, 50.0, 512 * 512, 0.05)
    assert rep.sl_dh == pytest.approx(1.28, abs=0.01)
    assert rep.sl_e == pytest.approx(6.57, abs=0.05)
    assert rep.sl == pytest.approx(8.4, abs=0.1)
    assert rep.c4 == pytest.approx(4.19, abs=0.01)


def test_worked_example_frozen_values():
    # independent evaluation of the loss ratios with the same inputs
    tan = math.tan(math.radians(25.0))
    r = 1.0 / 35.0
    sl_dh = 1 + r * r * (2 * 100 - 30 + 1) / 6 + 9 * r
    c_pxl = (70 * tan) ** 2 / 512 ** 2
    sl_e = 1 + (4 * 0.05 ** 2 + 4 * 0.05 * math.sqrt(c_pxl)) / c_pxl
    rep = aperture.sampling_loss(10, 35.0, 1.0)
    assert rep.sl_dh == pytest.approx(sl_dh, rel=1e-12)
    assert rep.sl_e == pytest.approx(sl_e, rel=1e-12)
    assert rep.c4 == pytest.approx(9 * tan, rel=1e-12)


def test_no_height_step_and_no_pose_error_give_unit_ratios():
    rep = aperture.sampling_loss(10, 35.0, 0.0, e=0.0)
    assert rep.sl_dh == 1.0
    assert rep.sl_e == 1.0
    assert rep.sl == 1.0


def test_single_drone_needs_no_spacing():
    assert aperture.sampling_loss(1, 35.0, 1.0).c4 == 0.0


@given(n=st.integers(1, 30), h_l=st.floats(5, 200), dh=st.floats(0, 5),
       fov=st.floats(10, 120), e=st.floats(0, 0.5))
def test_ratio_identities(n, h_l, dh, fov, e):
    rep = aperture.sampling_loss(n, h_l, dh, fov, 512 * 512, e)
    assert rep.sl == pytest.approx(rep.sl_e * rep.sl_dh, rel=1e-12)
    assert rep.sl_dh == pytest.approx(rep.c_avg / rep.c_l, rel=1e-9)
    assert rep.sl_dh >= 1.0 and rep.sl_e >= 1.0


@given(n=st.integers(1, 30), h_l=st.floats(5, 200), dh=st.floats(0, 5))
def test_average_coverage_matches_direct_mean(n, h_l, dh):
    rep = aperture.sampling_loss(n, h_l, dh)
    plan = aperture.assign_altitudes(n, h_l, dh)
    assert rep.c_avg == pytest.approx(aperture.mean_footprint_area(plan.altitudes, 50.0), rel=1e-9)


def test_altitudes_for_ten_drones():
    plan = aperture.assign_altitudes(10, 35.0, 1.0)
    assert plan.altitudes == tuple(float(a) for a in range(35, 45))
    assert sorted(plan.slots) == sorted(plan.altitudes)


def test_flat_plan():
    plan = aperture.assign_altitudes(4, 35.0, 0.0)
    assert set(plan.slots) == {35.0}


def test_alternating_slot_order():
    # highest, 3rd, 5th from the left, then 4th, 2nd towards the right end
    assert aperture.slot_ranks(5) == (1, 3, 5, 4, 2)
    plan = aperture.assign_altitudes(5, 10.0, 1.0)
    assert plan.slots == (14.0, 12.0, 10.0, 11.0, 13.0)
    assert plan.ranks == (1, 3, 5, 4, 2)


@given(st.integers(1, 40))
def test_every_altitude_used_once(n):
    plan = aperture.assign_altitudes(n, 20.0, 0.5)
    assert sorted(plan.slots) == list(plan.altitudes)


def test_aperture_example():
    assert aperture.aperture_diameter(10, 4.19) == pytest.approx(15.976, abs=0.01)
    assert aperture.packing_ratio(10) == pytest.approx(3.813, abs=1e-3)


def test_small_packing_ratios():
    assert aperture.packing_ratio(1) == pytest.approx(1.0)
    assert aperture.packing_ratio(2) == pytest.approx(2.0, abs=1e-9)
    assert aperture.packing_ratio(3) == pytest.approx(1 + 2 / math.sqrt(3), abs=1e-9)


@pytest.mark.parametrize("n", range(1, 21))
def test_packing_witness_is_feasible(n):
    pts = aperture.packing_witness(n)
    r = aperture.packing_ratio(n)
    assert len(pts) == n
    for a, b in itertools.combinations(pts, 2):
        assert np.hypot(*(a - b)) >= 1.0 - 1e-9
    # unit-diameter circles around the points fit in a circle of diameter r
    assert np.all(np.hypot(pts[:, 0], pts[:, 1]) + 0.5 <= r / 2 + 1e-9)


def test_packing_ratios_increase():
    ratios = [aperture.packing_ratio(n) for n in range(1, 21)]
    assert all(b >= a for a, b in zip(ratios, ratios[1:]))


@pytest.mark.parametrize("n", [0, 21])
def test_unsupported_sizes(n):
    with pytest.raises(UnsupportedSize):
        aperture.aperture_diameter(n, 4.19)
