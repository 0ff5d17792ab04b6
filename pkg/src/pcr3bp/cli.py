"""Command-line front end.

Subcommands: example, verify, simulate, l4, lift.  Exit codes: 0 success,
1 bad input or schema error, 2 not periodic, 3 unclassifiable orbit,
4 region exits the Hill region, 5 quadrature failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import curvegeom, documents, dynamics, periodarea, plots
from .documents import OrbitDocument, dumps_json, to_jsonable
from .errors import (
    CriticalValueError,
    IrregularOrbitError,
    NotPeriodicError,
    Pcr3bpError,
    QuadratureError,
    RegionExitsHillRegionError,
    ReturnNotFoundError,
    SchemaError,
    UnclassifiableOrbitError,
)
from .integrate import IntegratorConfig, propagate
from .periodarea import QuadratureConfig, verify
from .periodicity import detect_period
from .reference_orbits import REFERENCE_ORBITS, SUN_JUPITER_MU

__all__ = ["main", "run_example"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); 2 is reserved for not-periodic
        raise ValueError(message)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _parse_ic(text: str) -> tuple[float, float, float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 4:
        raise ValueError("--ic expects four comma-separated numbers y1,y2,v1,v2")
    return tuple(parts)  # type: ignore[return-value]


def _parse_pair(text: str) -> tuple[float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 2:
        raise ValueError("expected two comma-separated numbers a,b")
    return parts[0], parts[1]


def _write_json(path: Path, payload) -> None:
    path.write_text(dumps_json(to_jsonable(payload)) + "\n")


def _print_report(report) -> None:
    case = report.case
    enclosed = ", ".join(f"{name} (x{mult})" for name, mult in case.enclosed_primaries) or "none"
    print(f"case            : {case.theorem_id} ({case.orientation}, n={case.covering_index}, k={case.k})")
    print(f"enclosed        : {enclosed}")
    print(f"period T        : {_fmt(report.period)}   (closure residual {_fmt(report.closure_residual)})")
    print(f"jacobi C        : {_fmt(report.jacobi)}")
    print(f"2T              : {_fmt(report.two_t)}")
    if report.boundary_only:
        print(f"quadrature      : FAILED ({report.quadrature_failure})")
        print(f"boundary side   : {_fmt(case.sign * (report.boundary_integral + report.singular_correction + report.k_pi_term))}")
        return
    print(f"area integral   : {_fmt(report.area_integral)}  (+/- {_fmt(report.area_error_estimate)})")
    print(f"sign*(k*pi + I) : {_fmt(case.sign * (report.k_pi_term + report.area_integral))}")
    print(f"identity resid  : {_fmt(report.residual_identity)}")
    print(f"stokes resid    : {_fmt(report.residual_stokes)}")


def run_example(example_id: int, outdir: Path | None = None, quad_cfg: QuadratureConfig | None = None):
    """Full pipeline on one of the four reference orbits; returns (report, orbit, files)."""
    ref = REFERENCE_ORBITS[example_id]
    orbit = detect_period(ref.initial_state, ref.mu, hint=ref.hint)
    report = verify(orbit, quad_cfg)

    files: dict[str, Path] = {}
    if outdir is not None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        stem = f"example{example_id}"
        doc = OrbitDocument.from_orbit(orbit, provenance=f"reference orbit {example_id}: {ref.label}")
        files["orbit"] = outdir / f"{stem}_orbit.json"
        doc.write(files["orbit"])
        files["report"] = outdir / f"{stem}_report.json"
        _write_json(files["report"], report)
        ts, states = orbit.sample(2048, endpoint=True)
        files["trajectory"] = outdir / f"{stem}_trajectory.csv"
        documents.write_trajectory_csv(files["trajectory"], ts, states)
        files["plot"] = outdir / f"{stem}.svg"
        if report.case.theorem_id.startswith("n-simple"):
            lifted = curvegeom.lift(
                curvegeom.polyline_from_orbit(orbit),
                report.case.center,
                report.case.covering_index,
            )
            plots.save_lift_svg(files["plot"], orbit, lifted, title=ref.label)
        else:
            plots.save_orbit_svg(files["plot"], orbit, title=ref.label)
    return report, orbit, files


def _cmd_example(args) -> int:
    report, orbit, files = run_example(args.id, Path(args.outdir), _quad_cfg(args))
    print(f"reference orbit {args.id}: {REFERENCE_ORBITS[args.id].label}")
    print(f"detected T      : {_fmt(orbit.period)}")
    _print_report(report)
    for kind, path in files.items():
        print(f"wrote {kind:<10}: {path}")
    return 5 if report.boundary_only else 0


def _quad_cfg(args) -> QuadratureConfig | None:
    if getattr(args, "cell_tolerance", None) is None:
        return None
    return QuadratureConfig(cell_tolerance=args.cell_tolerance)


def _cmd_verify(args) -> int:
    if (args.orbit is None) == (args.ic is None):
        raise ValueError("give exactly one of an orbit file or --ic with --mu")
    if args.orbit is not None:
        doc = OrbitDocument.read(args.orbit)
        s0 = doc.initial_state()
        mu = doc.mu
        hint = (0.8 * doc.period, 1.2 * doc.period)
        provenance = f"re-verified from {args.orbit}"
    else:
        if args.mu is None:
            raise ValueError("--ic requires --mu")
        s0 = dynamics.RotatingState(*_parse_ic(args.ic))
        mu = args.mu
        hint = _parse_pair(args.period_hint) if args.period_hint else None
        provenance = "from command-line initial condition"

    orbit = detect_period(s0, mu, hint=hint)
    report = verify(orbit, _quad_cfg(args))

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    doc_out = OrbitDocument.from_orbit(orbit, provenance=provenance)
    doc_out.write(outdir / "orbit.json")
    _write_json(outdir / "report.json", report)
    print(f"detected T      : {_fmt(orbit.period)}")
    _print_report(report)
    print(f"wrote {outdir / 'orbit.json'} and {outdir / 'report.json'}")
    if report.boundary_only:
        assert report.quadrature_failure is not None
        return 4 if "RegionExitsHillRegion" in report.quadrature_failure else 5
    return 0


def _cmd_simulate(args) -> int:
    if args.tmax <= 0.0:
        raise ValueError("--tmax must be positive (empty propagation interval)")
    s0 = dynamics.RotatingState(*_parse_ic(args.ic))
    cfg = IntegratorConfig(rel_tol=args.tol, abs_tol=args.tol)
    traj = propagate(s0, args.mu, args.tmax, cfg)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    documents.write_trajectory_csv(outdir / "trajectory.csv", traj.ts, traj.states)
    plots.save_states_svg(outdir / "trajectory.svg", args.mu, traj.c, traj.states)
    print(f"propagated to t = {_fmt(args.tmax)}; jacobi drift {_fmt(traj.jacobi_drift())}")
    print(f"wrote {outdir / 'trajectory.csv'} and {outdir / 'trajectory.svg'}")
    return 0


def _cmd_l4(args) -> int:
    radii = [float(r) for r in args.radii.split(",")] if args.radii else None
    analysis = periodarea.l4_direction_analysis(args.mu, args.jacobi, radii)
    for rep in (analysis.l4, analysis.l5):
        print(f"{rep.which}: regime {rep.regime}; c0 = {_fmt(rep.c0)}")
        if rep.delta_ln_f_center is not None:
            print(f"    lap(ln f) at the point = {_fmt(rep.delta_ln_f_center)}")
        if rep.chosen_radius is not None:
            print(f"    radius {_fmt(rep.chosen_radius)}: {rep.verdict}")
        else:
            print(f"    {rep.verdict}")
    if args.outdir:
        outdir = Path(args.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        _write_json(outdir / "l4_report.json", analysis)
        print(f"wrote {outdir / 'l4_report.json'}")
    return 0


def _cmd_lift(args) -> int:
    doc = OrbitDocument.read(args.orbit)
    samples = np.asarray(doc.samples, dtype=float)
    # drop the repeated closing sample if present
    pts = samples[:, 1:3]
    if np.linalg.norm(pts[-1] - pts[0]) < 1e-9 * max(1.0, np.max(np.abs(pts))):
        samples = samples[:-1]
    polyline = curvegeom.ClosedPolyline(samples[:, 1:3].copy(), samples[:, 0].copy())

    if args.center == "heavy":
        center = np.array([-doc.mu, 0.0])
    elif args.center == "light":
        center = np.array([1.0 - doc.mu, 0.0])
    else:
        center = np.asarray(_parse_pair(args.center))
    lifted = curvegeom.lift(polyline, center, args.n)

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    documents.write_polyline_csv(outdir / "lifting.csv", lifted.beta)
    print(f"lifted about ({_fmt(center[0])}, {_fmt(center[1])}) with n = {args.n}")
    print(f"roundtrip error : {_fmt(lifted.roundtrip_error)}")
    print(f"wrote {outdir / 'lifting.csv'}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="pcr3bp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_ex = sub.add_parser("example", help="reproduce one of the four reference orbits")
    p_ex.add_argument("id", type=int, choices=(1, 2, 3, 4))
    p_ex.add_argument("--outdir", default="out")
    p_ex.add_argument("--cell-tolerance", dest="cell_tolerance", type=float, default=None)
    p_ex.set_defaults(func=_cmd_example)

    p_ver = sub.add_parser("verify", help="detect a period and verify the period-area identity")
    p_ver.add_argument("orbit", nargs="?", default=None, help="orbit JSON document")
    p_ver.add_argument("--ic", default=None, help="y1,y2,v1,v2")
    p_ver.add_argument("--mu", type=float, default=None)
    p_ver.add_argument("--period-hint", dest="period_hint", default=None, help="a,b search window")
    p_ver.add_argument("--outdir", default="out")
    p_ver.add_argument("--cell-tolerance", dest="cell_tolerance", type=float, default=None)
    p_ver.set_defaults(func=_cmd_verify)

    p_sim = sub.add_parser("simulate", help="propagate an initial condition and dump the trajectory")
    p_sim.add_argument("--ic", required=True, help="y1,y2,v1,v2")
    p_sim.add_argument("--mu", type=float, required=True)
    p_sim.add_argument("--tmax", type=float, required=True)
    p_sim.add_argument("--tol", type=float, default=1e-12)
    p_sim.add_argument("--outdir", default="out")
    p_sim.set_defaults(func=_cmd_simulate)

    p_l4 = sub.add_parser("l4", help="direction analysis near the triangular points")
    p_l4.add_argument("--mu", type=float, default=SUN_JUPITER_MU)
    p_l4.add_argument("--jacobi", type=float, required=True)
    p_l4.add_argument("--radii", default=None, help="comma-separated disk radii")
    p_l4.add_argument("--outdir", default=None)
    p_l4.set_defaults(func=_cmd_l4)

    p_lift = sub.add_parser("lift", help="nth-root lifting of an orbit document")
    p_lift.add_argument("orbit", help="orbit JSON document")
    p_lift.add_argument("--center", required=True, help="'heavy', 'light', or u,v")
    p_lift.add_argument("--n", type=int, required=True)
    p_lift.add_argument("--outdir", default="out")
    p_lift.set_defaults(func=_cmd_lift)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (SchemaError, ValueError, OSError, CriticalValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NotPeriodicError, ReturnNotFoundError, IrregularOrbitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UnclassifiableOrbitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except RegionExitsHillRegionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except QuadratureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except Pcr3bpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
