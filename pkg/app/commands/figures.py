"""
Figure Commands
Data behind the staircase, gap, gap-profile and control-point plots
"""

import argparse
from fractions import Fraction

from app.commands import CommandGroup, arg
from app.core.circle import CirclePoint
from app.models import RunConfig
from app.services.emitter import DataEmitter
from app.services.laboratory import Laboratory, get_laboratory
from app.sturmian.gaps import Verdict, classify
from app.sturmian.modulation import ell, phi_of_classification
from app.sturmian.staircase import staircase_inverse, staircase_pair

group = CommandGroup()


@group.command("staircase", help="The inverse staircase h~(y) on a uniform grid of [0, 1]",
               arguments=[arg("--forward", action="store_true", help="Emit F and f on a uniform x-grid instead")])
def staircase(config: RunConfig, args: argparse.Namespace) -> int:
    lab = get_laboratory(config)
    count = config.samples or 256
    rows = []
    for i in range(count + 1):
        value = Fraction(i, count)
        if args.forward:
            f_value, F_value = staircase_pair(value, lab.staircase)
            rows.append({"x": str(value), "F": float(F_value), "f": float(f_value), "radius": float(F_value.rad)})
        else:
            x = staircase_inverse(value, lab.staircase)
            rows.append({"y": str(value), "h": float(x), "radius": float(x.rad)})
    DataEmitter(config, "staircase").emit(rows, extra={"points": len(rows), "forward": args.forward})
    return 0


@group.command("gaps", help="Endpoints and lengths of I_0 .. I_(depth-1)")
def gaps(config: RunConfig, args: argparse.Namespace) -> int:
    lab = get_laboratory(config)
    rows = []
    for gap in lab.atlas.intervals(config.depth):
        rows.append({
            "n": gap.index,
            "left": float(gap.left_lift.frac()),
            "right": float(gap.right_lift.frac()),
            "length": float(gap.length),
            "exact_length": str(gap.exact_length),
            "length_error": float(abs(gap.length - gap.exact_length).upper),
        })
    DataEmitter(config, "gaps").emit(rows)
    return 0


def _profile_row(x: CirclePoint, label: str, lab: Laboratory) -> dict:
    result = classify(x, lab.atlas, lab.config.classify_depth)
    row = {"x": label, "verdict": result.verdict.value, "n": result.index, "phi": "", "psi": ""}
    if result.verdict is not Verdict.ON_BOUNDARY:
        value = float(phi_of_classification(result))
        row["phi"] = value
        row["psi"] = value / ell(result.index) if result.verdict is Verdict.IN_GAP else 0.0
    return row


@group.command("phi", help="Gap profile phi and damped profile psi on the first k gaps",
               arguments=[arg("--gaps", type=int, default=6, help="Restrict the grid to I_0 .. I_(k-1); 0 samples the whole circle")])
def phi(config: RunConfig, args: argparse.Namespace) -> int:
    lab = get_laboratory(config)
    rows = []
    if args.gaps > 0:
        per_gap = config.samples or 64
        for n in range(args.gaps):
            gap = lab.atlas.interval(n)
            for i in range(per_gap):
                x = gap.point_at(Fraction(2 * i + 1, 2 * per_gap))
                rows.append(_profile_row(x, repr(float(x)), lab))
    else:
        count = config.samples or 1024
        for i in range(count):
            x = Fraction(2 * i + 1, 2 * count)
            rows.append(_profile_row(CirclePoint(x), str(x), lab))
    DataEmitter(config, "phi").emit(rows, extra={"gaps": args.gaps})
    return 0


@group.command("control", help="Control points (t_n, v_n) of M and M on a log mesh",
               arguments=[arg("--mesh", type=int, default=0, help="Extra log-spaced mesh points")])
def control(config: RunConfig, args: argparse.Namespace) -> int:
    lab = get_laboratory(config)
    modulation = lab.modulation
    rows = [
        {"kind": "node", "n": point.n, "t": point.t_float, "v": point.v, "M": modulation.M(point.t_float),
         "tied": point.tied}
        for point in modulation.control_points
    ]
    for k in range(args.mesh):
        t = modulation.t_min ** (k / max(args.mesh - 1, 1))
        rows.append({"kind": "mesh", "n": "", "t": t, "v": "", "M": modulation.M(t), "tied": ""})
    DataEmitter(config, "control").emit(rows, extra={"interpolation": modulation.interpolation})
    return 0
