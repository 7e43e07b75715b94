"""
Command-line entry point.

Usage:
    python -m app.cli find-curve --mu 0 --lambda 1 --p 1 --q 3
    python -m app.cli bounds --topology annulus --c0 1 --b -1
    python -m app.cli reproduce table

Exit codes: 0 success, 1 numerical failure, 2 usage or validation error.
"""

import argparse
import itertools
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence

from pydantic import ValidationError

from app.config.settings import Settings, get_settings
from app.core.exceptions import EXIT_NUMERICAL, EXIT_USAGE, EquilibriumError
from app.core.logging import generate_run_id, set_run_context, setup_logging
from app.schemas.geometry import GaussMapPath
from app.schemas.params import (
    C0Convention,
    CurveParams,
    EnergyParams,
    FlowConfig,
    SearchBox,
    StepMode,
)
from app.schemas.reports import Topology
from app.services.artifacts import ArtifactWriter, canonical_json, read_curve_csv, read_obj
from app.services.delaunay_surfaces import DelaunaySurfaceService
from app.services.elastica_curves import ElasticaCurveService
from app.services.energy_functional import EnergyFunctionalService
from app.services.plateau_flow import PlateauFlowService
from app.services.reproduction import TARGETS, ReproductionService

logger = logging.getLogger(__name__)

EXIT_OK = 0


def _emit(obj: Any) -> None:
    """Full-precision JSON on stdout."""
    sys.stdout.write(json.dumps(json.loads(canonical_json(obj)), indent=2) + "\n")


def _energy_params(args: argparse.Namespace) -> EnergyParams:
    return EnergyParams.from_convention(
        C0Convention(args.c0_convention), args.a, args.c0, args.b, args.alpha, args.beta
    )


def _writer(args: argparse.Namespace, settings: Settings) -> ArtifactWriter:
    return ArtifactWriter(args.output_dir, settings)


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------


def cmd_find_curve(args: argparse.Namespace, settings: Settings) -> int:
    service = ElasticaCurveService(settings)
    params = CurveParams(mu=args.mu, lam=args.lam)
    box = SearchBox(d_min=args.d_min, d_max=args.d_max, e_min=args.e_min, e_max=args.e_max)
    report, curve = service.solve_closed_curve(params, args.q, args.p, box)
    writer = _writer(args, settings)
    stem = f"curve_q{args.q}_p{args.p}"
    writer.curve(curve, stem)
    writer.json(report, f"{stem}.json")
    _emit(report)
    return EXIT_OK


def cmd_gen_delaunay(args: argparse.Namespace, settings: Settings) -> int:
    service = DelaunaySurfaceService(settings)
    path = GaussMapPath(args.phi_start, args.phi_end)
    profile = service.profile_from_flux(
        args.H, args.flux, path, args.samples, branch=args.branch, u_constant=args.u_constant
    )
    writer = _writer(args, settings)
    writer.profile(profile, "delaunay_profile.csv")
    writer.mesh(service.revolve(profile, args.segments), "delaunay.obj")
    _emit(
        {
            "kind": profile.kind.value,
            "H": args.H,
            "flux": args.flux,
            "total_curvature": path.total_curvature,
        }
    )
    return EXIT_OK


def cmd_domains(args: argparse.Namespace, settings: Settings) -> int:
    params = _energy_params(args)
    service = DelaunaySurfaceService(settings)
    energy = EnergyFunctionalService(settings, service.geometry)
    writer = _writer(args, settings)
    reports = []
    for domain in service.enumerate_domains(params, args.segments):
        label = domain.label.value
        mesh = service.revolve(domain.profile, args.segments)
        writer.mesh(mesh, f"{label}.obj")
        writer.profile(domain.profile, f"{label}_profile.csv")
        discrete = energy.evaluate_energy(mesh, params).total if args.discrete_energy else None
        report = service.domain_report(domain, params, args.segments, energy_discrete=discrete)
        writer.json(report, f"{label}.json")
        reports.append(report)
    _emit(reports)
    return EXIT_OK


def cmd_energy(args: argparse.Namespace, settings: Settings) -> int:
    params = _energy_params(args)
    mesh = read_obj(args.mesh)
    report = EnergyFunctionalService(settings).full_energy_report(mesh, params)
    _writer(args, settings).json(report, f"{Path(args.mesh).stem}_energy.json")
    _emit(report)
    return EXIT_OK


def _bound_payload(
    service: EnergyFunctionalService, params: EnergyParams, topology: Topology
) -> Dict[str, Any]:
    bound = service.lower_bound(params, topology)
    return {
        "topology": bound.topology.value,
        "bound": bound.bound,
        "case": bound.case_label,
        "attained": bound.attained.value,
        "witness": bound.witness,
        "bounded_below": bound.bounded_below,
        "e_underline": bound.e_underline,
    }


def cmd_bounds(args: argparse.Namespace, settings: Settings) -> int:
    service = EnergyFunctionalService(settings)
    if args.sweep:
        return _bounds_sweep(args, service, settings)
    _emit(_bound_payload(service, _energy_params(args), Topology(args.topology)))
    return EXIT_OK


def _bounds_sweep(
    args: argparse.Namespace, service: EnergyFunctionalService, settings: Settings
) -> int:
    """Grid over (a, c0, b, alpha, beta) read from a JSON sweep file."""
    config = json.loads(Path(args.sweep).read_text(encoding="utf-8"))
    grids = {k: config.get(k, [getattr(args, k)]) for k in ("a", "c0", "b", "alpha", "beta")}
    topology = Topology(str(config.get("topology", args.topology)).capitalize())
    rows = []
    convention = C0Convention(args.c0_convention)
    for a, c0, b, alpha, beta in itertools.product(*grids.values()):
        params = EnergyParams.from_convention(convention, a, c0, b, alpha, beta)
        row: Dict[str, Any] = {"a": a, "c0": params.c0, "b": b, "alpha": alpha, "beta": beta}
        try:
            row.update(_bound_payload(service, params, topology))
        except EquilibriumError as e:
            row.update({"error": e.error_code, "detail": e.detail})
        rows.append(row)
    _writer(args, settings).json(rows, "bounds_sweep.json")
    _emit(rows)
    return EXIT_OK


def cmd_flow(args: argparse.Namespace, settings: Settings) -> int:
    flow = PlateauFlowService(settings)
    curve = read_curve_csv(args.curve, args.boundary_samples)
    if args.curve2:
        second = read_curve_csv(args.curve2, args.boundary_samples)
        seed = flow.initial_annulus(curve, second, args.rings)
    else:
        seed = flow.initial_disc(curve, args.rings)
    config = FlowConfig(
        time_step=args.time_step,
        max_iters=args.max_iters or settings.flow_max_iters,
        h_tolerance=args.h_tolerance or settings.flow_h_tolerance,
        target_H=args.target_H,
        remesh_interval=args.remesh_interval,
        step_mode=StepMode(args.step_mode),
        snapshot_interval=args.snapshot_interval,
    )
    writer = _writer(args, settings)
    writer.mesh(seed, "flow_0000.obj")

    mesh = seed
    trace = None
    done = 0
    chunk = config.snapshot_interval or config.max_iters
    while done < config.max_iters:
        step = min(chunk, config.max_iters - done)
        mesh, part = flow.run_flow(mesh, config.model_copy(update={"max_iters": step}))
        trace = part if trace is None else _extend_trace(trace, part, done)
        done += step
        if config.snapshot_interval:
            writer.mesh(mesh, f"flow_{done:04d}.obj")
        if part.converged:
            break

    writer.mesh(mesh, "flow_final.obj")
    writer.trace(trace, "flow_trace.csv")
    writer.vertices(mesh, "flow_vertices.csv")
    summary: Dict[str, Any] = {
        "converged": trace.converged,
        "iterations": len(trace.iterations),
        "max_H": trace.max_h[-1] if trace.max_h else None,
        "area": trace.area[-1] if trace.area else None,
        "euler_characteristic": mesh.euler_characteristic,
    }
    if args.alpha is not None and args.beta is not None:
        report = flow.verify_equilibrium(mesh, _energy_params(args))
        summary["equilibrium"] = report
    writer.json(summary, "flow_summary.json")
    _emit(summary)
    return EXIT_OK


def _extend_trace(trace, part, offset: int):
    for i, h, d, a in zip(part.iterations, part.max_h, part.max_displacement, part.area):
        trace.record(i + offset, h, d, a)
    trace.converged = part.converged
    return trace


def cmd_instability(args: argparse.Namespace, settings: Settings) -> int:
    service = DelaunaySurfaceService(settings)
    report = service.instability_second_derivative(_energy_params(args), args.step)
    _emit(report)
    return EXIT_OK


def cmd_reproduce(args: argparse.Namespace, settings: Settings) -> int:
    out = Path(args.output_dir or settings.output_dir) / args.target
    writer = ArtifactWriter(out, settings)
    rows = ReproductionService(settings).run(args.target, writer, args.resolution)
    spec = {"target": args.target, "resolution": args.resolution or settings.mesh_resolution}
    path = writer.summary(args.target, rows, spec, settings.app_version)
    passed = all(r.passed for r in rows)
    _emit({"summary": str(path), "rows": len(rows), "passed": passed})
    return EXIT_OK if passed else EXIT_NUMERICAL


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------


def _add_energy_args(p: argparse.ArgumentParser, with_defaults: bool = True) -> None:
    p.add_argument("--a", type=float, default=1.0, help="bending rigidity")
    p.add_argument("--c0", type=float, default=0.0, help="spontaneous curvature")
    p.add_argument("--b", type=float, default=0.0, help="saddle-splay modulus")
    default = 1.0 if with_defaults else None
    p.add_argument("--alpha", type=float, default=default, help="boundary bending rigidity")
    p.add_argument("--beta", type=float, default=default, help="boundary line tension")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="JSON file whose keys override the flags")
    common.add_argument(
        "--output-dir", dest="output_dir", default=None, help="artifact directory (env OUTPUT_DIR)"
    )
    common.add_argument(
        "--c0-convention",
        dest="c0_convention",
        choices=[c.value for c in C0Convention],
        default=C0Convention.PAPER.value,
        help="'common' converts c0 = -c0_common / 2",
    )
    common.add_argument("--log-level", dest="log_level", default=None)
    common.add_argument("--json-logs", dest="json_logs", action="store_true")

    parser = argparse.ArgumentParser(
        prog="helfrich", description="Euler-Helfrich equilibrium toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("find-curve", parents=[common], help="closed (q, p) boundary elastica")
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    box = SearchBox()
    p.add_argument("--d-min", dest="d_min", type=float, default=box.d_min)
    p.add_argument("--d-max", dest="d_max", type=float, default=box.d_max)
    p.add_argument("--e-min", dest="e_min", type=float, default=box.e_min)
    p.add_argument("--e-max", dest="e_max", type=float, default=box.e_max)
    p.set_defaults(handler=cmd_find_curve)

    p = sub.add_parser("gen-delaunay", parents=[common], help="Delaunay meridian and revolved mesh")
    p.add_argument("--H", type=float, required=True)
    p.add_argument("--flux", type=float, required=True)
    p.add_argument("--phi-start", dest="phi_start", type=float, default=-math.pi / 2)
    p.add_argument("--phi-end", dest="phi_end", type=float, default=math.pi / 2)
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--segments", type=int, default=128)
    p.add_argument("--branch", type=int, choices=[1, -1], default=1)
    p.add_argument("--u-constant", dest="u_constant", action="store_true")
    p.set_defaults(handler=cmd_gen_delaunay)

    p = sub.add_parser("domains", parents=[common], help="the four critical nodoid domains")
    _add_energy_args(p)
    p.add_argument("--segments", type=int, default=128)
    p.add_argument("--discrete-energy", dest="discrete_energy", action="store_true")
    p.set_defaults(handler=cmd_domains)

    p = sub.add_parser("energy", parents=[common], help="energy report for an OBJ mesh")
    _add_energy_args(p)
    p.add_argument("--mesh", required=True)
    p.set_defaults(handler=cmd_energy)

    p = sub.add_parser("bounds", parents=[common], help="closed-form infimum classification")
    _add_energy_args(p)
    p.add_argument("--topology", choices=[t.value.lower() for t in Topology], default="annulus")
    p.add_argument("--sweep", help="JSON file with parameter grids")
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("flow", parents=[common], help="fixed-boundary mean curvature flow")
    _add_energy_args(p, with_defaults=False)
    p.add_argument("--curve", required=True, help="boundary curve CSV")
    p.add_argument("--curve2", help="second boundary curve CSV for annuli")
    p.add_argument("--boundary-samples", dest="boundary_samples", type=int, default=None)
    p.add_argument("--rings", type=int, default=12)
    p.add_argument("--time-step", dest="time_step", type=float, default=None)
    p.add_argument("--max-iters", dest="max_iters", type=int, default=None)
    p.add_argument("--h-tolerance", dest="h_tolerance", type=float, default=None)
    p.add_argument("--target-H", dest="target_H", type=float, default=0.0)
    p.add_argument("--remesh-interval", dest="remesh_interval", type=int, default=0)
    p.add_argument(
        "--step-mode",
        dest="step_mode",
        choices=[m.value for m in StepMode],
        default=StepMode.EXPLICIT.value,
    )
    p.add_argument("--snapshot-interval", dest="snapshot_interval", type=int, default=0)
    p.set_defaults(handler=cmd_flow)

    p = sub.add_parser("instability", parents=[common], help="second variation along Sigma_epsilon")
    _add_energy_args(p)
    p.add_argument("--step", type=float, default=1e-4)
    p.set_defaults(handler=cmd_instability)

    p = sub.add_parser("reproduce", parents=[common], help="figure and table reproduction")
    p.add_argument("target", choices=TARGETS)
    p.add_argument("--resolution", type=int, default=None)
    p.set_defaults(handler=cmd_reproduce)
    return parser


def _apply_spec(args: argparse.Namespace) -> argparse.Namespace:
    if not args.spec:
        return args
    overrides = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    for key, value in overrides.items():
        setattr(args, key.replace("-", "_"), value)
    return args


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = get_settings()
    setup_logging(args.log_level, True if args.json_logs else None)
    set_run_context(experiment_id=args.command, run_id=generate_run_id())

    handler: Callable[[argparse.Namespace, Settings], int] = args.handler
    try:
        args = _apply_spec(args)
        if getattr(args, "topology", None):
            args.topology = args.topology.capitalize()
        return handler(args, settings)
    except EquilibriumError as e:
        logger.error(f"{e.error_code}: {e.detail}")
        sys.stderr.write(f"error: {e.detail}\n")
        return e.exit_code
    except (ValidationError, ValueError, FileNotFoundError, json.JSONDecodeError) as e:
        logger.error(f"Invalid input: {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
