"""
Sweep Worker
Evaluates mu(I_0), the exponent and the isolation bound on every periodic orbit, optionally across processes
"""

import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from app.cocycles.engine import periodic_exponent
from app.core.errors import LabError
from app.lab.hitting import decompose_hitting
from app.lab.orbits import PeriodicOrbit, base_gap_frequency, weak_distance_proxy
from app.models import RunConfig, SweepRecord, SweepSummary
from app.services.laboratory import Laboratory, get_laboratory

NU_ORBIT_ID = "nu"

OrbitResult = Tuple[int, str, Union[SweepRecord, str]]


class SweepWorker:
    """Evaluates periodic orbits against the isolation bound lambda_1 <= epsilon sqrt(mu(I_0))"""

    def __init__(self, lab: Laboratory, kind: Optional[str] = None, modulated: Optional[bool] = None,
                 chain: bool = True, nu_moments=None):
        self.lab = lab
        self.kind = kind
        self.modulated = modulated
        self.chain = chain
        self.nu_moments = nu_moments

    def evaluate(self, orbit: PeriodicOrbit) -> SweepRecord:
        """
        One sweep record for an orbit

        Raises:
            LabError: an orbit point could not be classified or evaluated
        """
        assembled = self.lab.assembled(self.kind, self.modulated)
        mu = base_gap_frequency(orbit, self.lab.atlas, assembled.modulation.classify_depth)
        lambda1 = periodic_exponent(assembled.spec, orbit.points)
        extra = {}
        if self.chain:
            extra["chain_ok"] = decompose_hitting(assembled, orbit).holds
        if self.nu_moments is not None:
            extra["weak_proxy"] = weak_distance_proxy(orbit, self.nu_moments)
        bound = assembled.modulation.epsilon * math.sqrt(mu)
        return SweepRecord.from_values(orbit.orbit_id, orbit.period, mu, lambda1, bound, **extra)

    def nu_record(self) -> SweepRecord:
        """The distinguished point (0, c) of the Sturmian measure"""
        return SweepRecord.from_values(NU_ORBIT_ID, 0, Fraction(0), self.lab.herman_params.c, 0.0)


# -- process pool plumbing --------------------------------------------------------

_worker: Optional[SweepWorker] = None


def _init_process(config_data: Dict, kind: Optional[str], modulated: Optional[bool], chain: bool, nu_moments):
    global _worker
    _worker = SweepWorker(get_laboratory(RunConfig(**config_data)), kind, modulated, chain, nu_moments)


def _run_one(task: Tuple[int, str, str]) -> OrbitResult:
    index, word, orbit_id = task
    orbit = PeriodicOrbit.from_word(word, orbit_id)
    try:
        return index, orbit.orbit_id, _worker.evaluate(orbit)
    except LabError as e:
        return index, orbit.orbit_id, f"{type(e).__name__}: {e}"


def sweep(lab: Laboratory, orbits: Sequence[PeriodicOrbit], kind: Optional[str] = None,
          modulated: Optional[bool] = None, workers: int = 1, chain: bool = True,
          nu_moments=None, include_nu: bool = True) -> SweepSummary:
    """
    Evaluate every orbit and merge records in the given (canonical) order

    Orbits whose points cannot be classified or evaluated are skipped with
    a log entry; the output does not depend on the worker count.

    Args:
        lab: Laboratory built from the run configuration
        orbits: Orbits in canonical order
        workers: Process count; 1 evaluates in-process

    Returns:
        SweepSummary with the records, the skipped orbit ids and the worst
        margin over periodic records
    """
    results: List[OrbitResult] = []
    if workers > 1:
        print(f"[Sweep] Evaluating {len(orbits)} orbits on {workers} processes", file=sys.stderr)
        tasks = [(i, orbit.word, orbit.orbit_id) for i, orbit in enumerate(orbits)]
        init_args = (lab.config.model_dump(), kind, modulated, chain, nu_moments)
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_process, initargs=init_args) as pool:
            results = list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    else:
        print(f"[Sweep] Evaluating {len(orbits)} orbits", file=sys.stderr)
        worker = SweepWorker(lab, kind, modulated, chain, nu_moments)
        for i, orbit in enumerate(orbits):
            try:
                results.append((i, orbit.orbit_id, worker.evaluate(orbit)))
            except LabError as e:
                results.append((i, orbit.orbit_id, f"{type(e).__name__}: {e}"))

    records: List[SweepRecord] = []
    skipped: List[str] = []
    for _, orbit_id, outcome in sorted(results, key=lambda item: item[0]):
        if isinstance(outcome, str):
            print(f"[Sweep] WARNING: skipped {orbit_id}: {outcome}", file=sys.stderr)
            skipped.append(orbit_id)
        else:
            records.append(outcome)

    worst = min((record.margin for record in records), default=math.inf)
    if include_nu:
        records.append(SweepWorker(lab, kind, modulated).nu_record())
    print(f"[Sweep] SUCCESS: {len(records)} records, {len(skipped)} skipped, worst margin {worst:.3e}", file=sys.stderr)
    return SweepSummary(records=records, skipped=skipped, worst_margin=worst)
