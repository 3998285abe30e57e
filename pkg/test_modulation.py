#!/usr/bin/env python3
"""
Modulation tests
ell, the gap profile and the control function M
"""

import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

# Add the project directory to Python path
project_dir = Path(__file__).parent
sys.path.insert(0, str(project_dir))

from app.config import DEFAULT_CONTROL_DEPTH
from app.core.alpha import parse_alpha
from app.core.ball import BallReal
from app.core.circle import CirclePoint, doubling
from app.core.errors import DepthExceeded
from app.sturmian.gaps import get_gap_atlas, sample_sturmian
from app.sturmian.modulation import (
    ModulationContext,
    build_modulation,
    ell,
    integer_root,
    phi,
    psi,
)


@pytest.fixture(scope="module")
def modulation():
    return ModulationContext(get_gap_atlas(parse_alpha("gold2"), 128), epsilon=0.1, depth=24)


def test_integer_roots():
    assert integer_root(80, 4) == 2
    assert integer_root(81, 4) == 3
    assert integer_root(26, 3) == 2
    assert integer_root(27, 3) == 3
    assert integer_root(0, 5) == 0


@pytest.mark.parametrize("n,expected", [(0, 1), (13, 1), (14, 2), (78, 2), (79, 3), (253, 3), (254, 4)])
def test_ell(n, expected):
    assert ell(n) == expected


def test_ell_rejects_negative_indices():
    with pytest.raises(ValueError):
        ell(-1)


def test_profile_at_a_gap_midpoint(modulation):
    x = modulation.atlas.interval(14).midpoint()
    assert abs(float(phi(x, modulation)) - 1.0) < 1e-20
    assert abs(float(psi(x, modulation)) - 0.5) < 1e-20
    assert float(psi(x, modulation, truncate=10)) == 0.0


def test_profile_vanishes_on_k(modulation):
    x = sample_sturmian(Fraction(2, 7), modulation.atlas.staircase)
    assert float(phi(x, modulation)) == 0.0
    assert float(psi(x, modulation)) == 0.0


def test_control_values(modulation):
    for point in modulation.control_points:
        assert point.v == pytest.approx(0.1 * (point.n + 2) ** 0.25 / math.sqrt(2))
        assert point.t_float <= float(point.t.lower)
        assert modulation.M(point.t_float) <= point.v + 1e-15
        if not point.tied:
            assert modulation.M(point.t_float) == pytest.approx(point.v, abs=1e-14)


def test_M_is_zero_at_one_and_strictly_decreasing(modulation):
    assert modulation.M(1.0) == 0.0
    mesh = np.geomspace(1.0, modulation.t_min * (1 + 1e-9), 200)
    values = modulation.M_array(mesh)
    assert np.all(np.diff(values) > 0)
    assert values[5] == pytest.approx(modulation.M(float(mesh[5])))


def test_M_domain(modulation):
    with pytest.raises(DepthExceeded):
        modulation.M(modulation.t_min / 2)
    with pytest.raises(ValueError):
        modulation.M(1.5)
    with pytest.raises(DepthExceeded):
        modulation.M_array(np.array([0.5, modulation.t_min / 4]))


def test_M_on_balls_encloses_the_float_value(modulation):
    t = modulation.control_points[3].t_float
    enclosure = modulation.M(BallReal.exact(t, 64))
    assert enclosure.contains(Fraction(modulation.M(t)))


def test_extension_keeps_the_existing_nodes(modulation):
    longer = modulation.extended(48)
    assert len(longer.control_points) == 49
    assert [p.t_float for p in longer.control_points[:25]] == [p.t_float for p in modulation.control_points]
    assert longer.t_min <= modulation.t_min


def test_build_modulation_defaults():
    context = build_modulation(get_gap_atlas(parse_alpha("gold2"), 128), epsilon=0.05, depth=8)
    assert context.epsilon == 0.05
    assert len(context.control_points) == 9
    assert context.interpolation == "log-linear"


@pytest.mark.parametrize("n", [1, 4, 10])
def test_phi_is_constant_along_the_gap_tower(modulation, n):
    gap = modulation.atlas.interval(n)
    for k in range(1, 9):
        x = gap.point_at(Fraction(2 * k - 1, 16))
        value = phi(x, modulation)
        y = x
        for _ in range(n):
            y = doubling(y)
            assert phi(y, modulation).overlaps(value)


@pytest.mark.parametrize("n", [5, 14])
def test_truncated_psi_stays_within_one_over_ell(modulation, n):
    bound = 1 / ell(n)
    for i in range(512):
        x = CirclePoint(Fraction(2 * i + 1, 1024))
        gap = float(psi(x, modulation)) - float(psi(x, modulation, truncate=n))
        assert 0.0 <= gap <= bound + 1e-30


def test_default_depth_table_builds(modulation):
    context = ModulationContext(modulation.atlas, epsilon=0.1, depth=DEFAULT_CONTROL_DEPTH)
    assert len(context.control_points) == DEFAULT_CONTROL_DEPTH + 1
    assert all(point.t_float > 0 for point in context.control_points)
    assert all(point.t.lower > 0 for point in context.control_points)
    assert 0 < context.t_min < modulation.t_min
    assert 0 < context.M(context.t_min) <= context.control_points[-1].v + 1e-15
