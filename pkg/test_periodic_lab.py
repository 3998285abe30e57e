#!/usr/bin/env python3
"""
Periodic lab tests
Orbit enumeration, hitting decompositions, gap traversals and the sweep
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

from app.core.circle import CirclePoint, doubling
from app.core.errors import CapExceeded
from app.lab.hitting import decompose_hitting
from app.lab.orbits import (
    PeriodicOrbit,
    base_gap_frequency,
    enumerate_orbits,
    mechanical_orbit,
    mechanical_word,
    necklace_count,
    orbit_moments,
    sturmian_moments,
    weak_distance_proxy,
)
from app.lab.traversal import block_split, isolation_floor, verify_gap_traversal
from app.models import RunConfig
from app.services.laboratory import get_laboratory
from app.workers.sweep_worker import NU_ORBIT_ID, SweepWorker, sweep


@pytest.fixture(scope="module")
def stress_lab():
    return get_laboratory(RunConfig(family="stress", depth=24, period_max=4))


@pytest.fixture(scope="module")
def pure_lab():
    return get_laboratory(RunConfig(family="pure", depth=24, period_max=3))


def test_small_orbit_lists():
    assert [orbit.base for orbit in enumerate_orbits(1)] == [Fraction(0)]
    assert [orbit.base for orbit in enumerate_orbits(2)] == [Fraction(0), Fraction(1, 3)]
    assert [orbit.orbit_id for orbit in enumerate_orbits(3)] == ["1:0", "2:01", "3:001", "3:011"]


def test_orbit_counts_match_necklaces():
    assert necklace_count(4) == 3
    orbits = enumerate_orbits(10)
    for k in range(2, 11):
        assert sum(1 for orbit in orbits if orbit.period == k) == necklace_count(k)
    assert sum(1 for orbit in orbits if orbit.period == 1) == 1


def test_orbits_are_exact_cycles():
    for orbit in enumerate_orbits(6):
        point = CirclePoint(orbit.base)
        for _ in range(orbit.period):
            point = doubling(point)
        assert point == CirclePoint(orbit.base)
        assert len(orbit.points) == orbit.period


def test_enumeration_limits():
    with pytest.raises(CapExceeded):
        enumerate_orbits(17, cap=16)
    with pytest.raises(ValueError):
        enumerate_orbits(0)
    with pytest.raises(ValueError):
        PeriodicOrbit.from_word("012")


def test_mechanical_orbits():
    assert mechanical_word(1, 2) == "01"
    assert mechanical_word(2, 5) == "00101"
    orbit = mechanical_orbit(Fraction(1, 2))
    assert orbit.base == Fraction(1, 3)
    assert orbit.orbit_id == "mech:1/2"
    with pytest.raises(ValueError):
        mechanical_orbit(Fraction(3, 2))


def test_base_gap_frequencies(stress_lab):
    atlas = stress_lab.atlas
    assert base_gap_frequency(PeriodicOrbit.from_word("0"), atlas, 60) == 1
    assert base_gap_frequency(PeriodicOrbit.from_word("01"), atlas, 60) == Fraction(1, 2)


def test_weak_proxy(stress_lab):
    nu = sturmian_moments(stress_lab.staircase, samples=64)
    assert np.all(np.abs(nu) <= 1 + 1e-12)
    fixed = PeriodicOrbit.from_word("0")
    assert np.allclose(orbit_moments(fixed), np.ones(8))
    assert weak_distance_proxy(fixed, orbit_moments(fixed)) == 0.0
    assert weak_distance_proxy(mechanical_orbit(Fraction(5, 13)), nu) >= 0.0


def test_hitting_decomposition_holds(stress_lab):
    assembled = stress_lab.assembled()
    for orbit in enumerate_orbits(4):
        decomposition = decompose_hitting(assembled, orbit)
        assert decomposition.holds
        assert decomposition.frequency == base_gap_frequency(orbit, stress_lab.atlas, 60)
        assert all(hit < 3 * orbit.period for hit in decomposition.hitting_times)
    with pytest.raises(ValueError):
        decompose_hitting(assembled, PeriodicOrbit.from_word("0"), periods=1)


def test_block_split():
    assert block_split(0) == [(1, 0, 1)]
    assert block_split(14) == [(1, 0, 14), (2, 14, 15)]
    assert block_split(20) == [(1, 0, 14), (2, 14, 21)]


@pytest.mark.parametrize("n,m", [(0, 0), (3, 2), (6, 9)])
def test_gap_traversal_bound(stress_lab, n, m):
    report = verify_gap_traversal(stress_lab.assembled(), n, m, 4, np.random.default_rng(5))
    assert report.samples
    assert report.holds
    assert report.bound == pytest.approx(0.1 * math.sqrt((n + m + 2) / 2))
    assert report.isolation == isolation_floor(stress_lab.assembled(), m)
    assert report.isolation > 0


def test_pure_sweep_has_zero_exponents(pure_lab):
    summary = sweep(pure_lab, enumerate_orbits(3), chain=True)
    periodic = [record for record in summary.records if record.orbit_id != NU_ORBIT_ID]
    assert [record.orbit_id for record in periodic] == ["1:0", "2:01", "3:001", "3:011"]
    assert all(record.lambda1 == 0.0 for record in periodic)
    assert all(record.chain_ok for record in periodic)
    assert periodic[0].mu == 1
    assert summary.skipped == []


def test_stress_sweep_respects_the_isolation_bound(stress_lab):
    summary = sweep(stress_lab, enumerate_orbits(4))
    periodic = [record for record in summary.records if record.orbit_id != NU_ORBIT_ID]
    assert all(record.margin >= -1e-9 for record in periodic)
    assert all(record.bound == pytest.approx(0.1 * math.sqrt(record.mu)) for record in periodic)
    assert summary.worst_margin == min(record.margin for record in periodic)

    nu = summary.records[-1]
    assert nu.orbit_id == NU_ORBIT_ID
    assert nu.period == 0
    assert nu.mu == 0
    assert nu.lambda1 == pytest.approx(math.log(1.25))
    assert nu.margin == pytest.approx(-math.log(1.25))


def test_fixed_point_of_the_stress_cocycle(stress_lab):
    record = SweepWorker(stress_lab).evaluate(PeriodicOrbit.from_word("0"))
    assert record.mu == 1
    assert record.lambda1 == 0.0
    assert record.bound == pytest.approx(0.1)


@pytest.mark.slow
def test_sweep_is_independent_of_worker_count(stress_lab):
    orbits = enumerate_orbits(4)
    serial = sweep(stress_lab, orbits, workers=1)
    parallel = sweep(stress_lab, orbits, workers=2)
    assert [r.model_dump() for r in serial.records] == [r.model_dump() for r in parallel.records]
