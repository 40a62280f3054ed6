"""Command-line entry point: ``coadj-utils <command> [options]``.

Every command resolves a ToolkitConfig from ``--config`` plus the global
flags, records it in the output header and writes JSON (default), CSV,
Parquet or plain text. Exit status is 0 on success, 1 when a check fails
or a computation raises, and 2 for configuration or input errors.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .checks import SUITES, run_checks, summary_table
from .circlefield import CircleDiffeo, CircleField, field_from_samples, grid
from .config import ToolkitConfig, load_config, log_level_from_env
from .dirac import CASES, custom_case
from .dynamics import (
    CLOSED_FORM_CASES,
    PhasePoint,
    ReducedSystem,
    e0_wavefunction,
    hamiltonian_drift,
    integrate_reduced,
    kdv_evolve,
    soliton_profile,
    verify_closed_form,
)
from .errors import CoadjError, ConfigurationError, ParseError
from .field_decoder import FieldDecoder
from .report_encoder import ReportEncoder, to_plain
from .schwarzian import IntervalMap, schwarzian_interval, schwarzian_report
from .transverse import (
    FIELDS,
    GAUGES,
    SIGNATURES,
    THEORIES,
    build_lagrangian,
    build_momentum_flat,
    field_equations,
    momentum_checks,
    precovariant_checks,
    printed_field_equation_checks,
)
from .wilson import (
    classify_orbit,
    first_type_closed_form,
    monodromy_hill,
    monodromy_nabla3,
    omega_sweep,
    orbit_stabilizer,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"
FORMATS = ("json", "csv", "parquet", "text")


class CommandFailed(Exception):
    """Raised by a command whose checks ran but did not pass."""


# ----------------------------------------------------------------------
# shared plumbing
# ----------------------------------------------------------------------
def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("global options")
    group.add_argument("--tol", type=float, default=None,
                       help="Pass/fail tolerance for commands that check a residual")
    group.add_argument("--bandlimit", type=int, default=None, help="Working bandlimit N")
    group.add_argument("--seed", type=int, default=None, help="Seed for randomized sweeps")
    group.add_argument("--out", type=Path, default=None,
                       help="Write the result to this file instead of stdout")
    group.add_argument("--format", choices=FORMATS, default=None,
                       help="Output format (default: from --out extension, else json)")
    group.add_argument("--config", type=Path, default=None,
                       help="JSON file of configuration overrides")
    group.add_argument("-v", "--verbose", action="count", default=0,
                       help="-v for INFO, -vv for DEBUG (overrides COADJ_LOG)")
    return common


def _resolve_config(args: argparse.Namespace) -> ToolkitConfig:
    return load_config(args.config, bandlimit=args.bandlimit, seed=args.seed)


def _read_field(path: Path, cfg: ToolkitConfig) -> Tuple[CircleField, Optional[float]]:
    """Field from a record or sample file, with the charge of a coadjoint record."""
    decoded = FieldDecoder(bandlimit=cfg.bandlimit).decode_file(path)
    if isinstance(decoded, CircleField):
        return decoded, None
    if hasattr(decoded, "u"):
        return decoded.u, decoded.charge
    raise ParseError(f"{path} holds a Kac-Moody record; this command needs a single field")


def _potential(args: argparse.Namespace, cfg: ToolkitConfig) -> Tuple[Any, float]:
    if (args.constant_D is None) == (args.input is None):
        raise ConfigurationError("give exactly one of --constant-D or --input")
    if args.input is not None:
        field, charge = _read_field(args.input, cfg)
        q = args.q if args.q is not None else charge
    else:
        field, q = args.constant_D, args.q
    if q is None:
        raise ConfigurationError("central charge --q is required")
    return field, float(q)


def _text_body(result: Any, indent: str = "") -> List[str]:
    lines = []
    if isinstance(result, dict):
        for key, value in result.items():
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{indent}{key}:")
                lines.extend(_text_body(value, indent + "  "))
            else:
                lines.append(f"{indent}{key}: {value}")
    elif isinstance(result, list):
        for item in result:
            if isinstance(item, dict):
                lines.append(f"{indent}- " + ", ".join(f"{k}={v}" for k, v in item.items()))
            else:
                lines.append(f"{indent}- {item}")
    else:
        lines.append(f"{indent}{result}")
    return lines


def _emit(
    args: argparse.Namespace,
    cfg: ToolkitConfig,
    result: Dict[str, Any],
    rows: Any = None,
    text: Optional[str] = None,
) -> None:
    """Write the result with its config header.

    ``rows`` is the tabular view used for CSV and Parquet (a DataFrame or
    a list of flat dicts); ``text`` overrides the generic text rendering.
    """
    encoder = ReportEncoder()
    payload = {
        "command": args.command,
        "version": __version__,
        "config": cfg.to_dict(),
        "result": result,
    }
    file_format = args.format
    if file_format is None:
        suffix = args.out.suffix.lower().lstrip(".") if args.out else ""
        file_format = suffix if suffix in FORMATS else "json"
    table = rows if rows is not None else result

    if file_format == "text":
        header = [f"# coadj-utils {__version__} {args.command}"]
        header.extend(f"# {k} = {v}" for k, v in cfg.to_dict().items())
        body = text if text is not None else "\n".join(_text_body(to_plain(result)))
        output = "\n".join(header) + "\n" + body + "\n"
        if args.out:
            args.out.parent.mkdir(parents=True, exist_ok=True)
            args.out.write_text(output, encoding="utf-8")
        else:
            sys.stdout.write(output)
        return

    if args.out:
        target = payload if file_format == "json" else table
        encoder.encode_to_file(target, args.out, file_format)
        logger.info("wrote %s output to %s", file_format, args.out)
        return
    if file_format == "json":
        sys.stdout.write(encoder.encode_to_string(payload) + "\n")
    elif file_format == "csv":
        sys.stdout.write(encoder.encode_to_csv_string(table))
    else:
        raise ConfigurationError("parquet output needs --out")


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------
def cmd_orbit(args: argparse.Namespace, cfg: ToolkitConfig) -> None:
    label = classify_orbit(args.constant_D, args.q)
    result: Dict[str, Any] = {
        "label": label.to_dict(),
        "stabilizer": orbit_stabilizer(label),
    }
    if label.branch == "real":
        result["closed_form_monodromy"] = first_type_closed_form(label.omega).to_dict()
    rows = None
    if args.sweep:
        start, stop, count = args.sweep
        rows = omega_sweep(np.linspace(start, stop, int(count)), args.q, cfg)
        result["sweep"] = rows
    _emit(args, cfg, result, rows=rows or [label.to_dict()])


def cmd_monodromy(args: argparse.Namespace, cfg: ToolkitConfig) -> None:
    potential, q = _potential(args, cfg)
    compute = monodromy_nabla3 if args.operator == "nabla3" else monodromy_hill
    monodromy = compute(potential, q, cfg, n_samples=args.samples)
    result = monodromy.to_dict()
    tol = args.tol if args.tol is not None else 1e-7
    result["is_identity"] = monodromy.is_identity(tol)
    if args.operator == "nabla3" and not isinstance(potential, CircleField) and potential * q > 0:
        omega = float(np.sqrt(2.0 * potential / q))
        result["omega"] = omega
        result["closed_form_distance"] = monodromy.distance(first_type_closed_form(omega))
    rows = None
    if monodromy.trajectory is not None:
        rows = [
            {"theta": float(th), **{f"y{i}": float(v) for i, v in enumerate(state)}}
            for th, state in zip(monodromy.theta, monodromy.trajectory)
        ]
    _emit(args, cfg, result, rows=rows or [{"row": i, **{f"col{j}": v for j, v in enumerate(r)}}
                                            for i, r in enumerate(monodromy.matrix.tolist())])


def cmd_constraints(args: argparse.Namespace, cfg: ToolkitConfig) -> None:
    if args.case_file is not None:
        import json

        try:
            record = json.loads(args.case_file.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read constraint case file {args.case_file}: {exc}") from exc
        case = custom_case(record)
    else:
        case = CASES[args.case]()
    report = case.run(cfg)
    result = {"case": case.name, "description": case.description, **report.to_dict()}
    lines = [f"case {case.name}: {case.description}"]
    for row in report.summary_rows():
        lines.append(f"  {row['name']:<6} {row['provenance']:<10} {row['class']:<7} {row['density']}")
    for condition in report.multiplier_conditions:
        lines.append(f"  multiplier condition: {condition}")
    _emit(args, cfg, result, rows=report.summary_rows(), text="\n".join(lines))


def cmd_transverse(args: argparse.Namespace, cfg: ToolkitConfig) -> None:
    if args.emit == "momentum":
        table = build_momentum_flat(args.gauge, args.signature)
        result = {"".join(map(str, k)): str(v) for k, v in sorted(table.items())}
    elif args.emit == "lagrangian":
        result = {"lagrangian": str(build_lagrangian(args.theory, args.gauge, args.signature))}
    elif args.emit == "field-equations":
        lagrangian = build_lagrangian(args.theory, signature=args.signature)
        equations = field_equations(lagrangian, FIELDS, args.gauge)
        result = {name: str(eq) for name, eq in equations.items()}
    else:
        checks = momentum_checks() + printed_field_equation_checks() + precovariant_checks()
        result = {"checks": [c.to_dict() for c in checks]}
        _emit(args, cfg, result, rows=[c.to_dict() for c in checks])
        failed = [c.name for c in checks if not c.holds]
        if failed:
            raise CommandFailed(f"transverse identities failed: {failed}")
        return
    result = {"theory": args.theory, "gauge": args.gauge, "signature": args.signature, **result}
    rows = [{"key": k, "expression": v} for k, v in result.items()]
    _emit(args, cfg, result, rows=rows)


def cmd_reduce(args: argparse.Namespace, cfg: ToolkitConfig) -> None:
    if args.wavefunction:
        q_values = np.linspace(args.q_min, args.q_max, args.points)
        wave = e0_wavefunction(q_values, args.c1, args.c2, args.power, cfg)
        result = {"base_point": wave.base_point, "power": wave.power, "residual": wave.residual,
                  "samples": wave.to_frame()}
        _emit(args, cfg, result, rows=wave.to_frame())
        return
    system = ReducedSystem(args.c, cfg)
    frame = integrate_reduced(PhasePoint(args.Q0, args.P0), system, args.t_end, args.dt)
    result = {"drift": hamiltonian_drift(frame), "trajectory": frame}
    _emit(args, cfg, result, rows=frame)


def cmd_kdv(args: argparse.Namespace, cfg: ToolkitConfig) -> None:
    if (args.soliton is None) == (args.input is None):
        raise ConfigurationError("give exactly one of --soliton SPEED or --input")
    if args.input is not None:
        d0, _ = _read_field(args.input, cfg)
    else:
        theta = grid(2 * (cfg.bandlimit + 1))
        d0 = field_from_samples(soliton_profile(theta, args.soliton), cfg.bandlimit)
    trajectory = kdv_evolve(d0, args.a, args.b, args.q, args.t_end, args.dt,
                            args.snapshots, config=cfg)
    result = {
        "coefficients": list(trajectory.coefficients),
        "times": trajectory.times,
        "means": trajectory.means(),
        "l2_norms": trajectory.l2_norms(),
        "final": trajectory.snapshot(-1),
    }
    _emit(args, cfg, result, rows=trajectory.to_frame())


def _parameters(items: Sequence[str]) -> Dict[str, float]:
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigurationError(f"parameter {item!r} must look like name=value")
        try:
            out[name.strip()] = float(value)
        except ValueError as exc:
            raise ConfigurationError(f"parameter {item!r} is not numeric") from exc
    return out


def cmd_verify(args: argparse.Namespace, cfg: ToolkitConfig) -> None:
    tol = args.tol if args.tol is not None else 1e-8
    cases = CLOSED_FORM_CASES if args.case == "all" else (args.case,)
    reports = [verify_closed_form(case, parameters=_parameters(args.param), tolerance=tol)
               for case in cases]
    result = {"reports": [r.to_dict() for r in reports]}
    rows = [{"case": r.case, "max_residual": r.max_residual, "passed": r.passed} for r in reports]
    _emit(args, cfg, result, rows=rows)
    failed = [r.case for r in reports if not r.passed]
    if failed:
        raise CommandFailed(f"closed-form residual above {tol:g} for {failed}")


def cmd_check_all(args: argparse.Namespace, cfg: ToolkitConfig) -> None:
    if args.format is None and args.out is None:
        args.format = "text"
    try:
        results = run_checks(cfg, args.only)
    except KeyError as exc:
        raise ConfigurationError(str(exc.args[0])) from exc
    rows = [r.to_dict() for r in results]
    _emit(args, cfg, {"checks": rows}, rows=rows, text=summary_table(results))
    failed = [f"{r.criterion}: {r.name}" for r in results if not r.passed]
    if failed:
        raise CommandFailed(f"{len(failed)} acceptance checks failed: {failed}")


def cmd_schwarzian(args: argparse.Namespace, cfg: ToolkitConfig) -> None:
    if (args.expr is None) == (args.input is None):
        raise ConfigurationError("give exactly one of --expr or --input")
    if args.expr is not None:
        f = IntervalMap.from_expr(args.expr, tuple(args.interval))
        samples = schwarzian_interval(f, args.points, cfg)
        result = {"points": samples.points, "values": samples.values}
        rows = [{"x": float(x), "S": float(s)} for x, s in zip(samples.points, samples.values)]
        _emit(args, cfg, result, rows=rows)
        return
    displacement, _ = _read_field(args.input, cfg)
    report = schwarzian_report(CircleDiffeo(displacement, config=cfg), config=cfg)
    result = {"schwarzian": report.value, "residuals": report.residuals}
    rows = [{"identity": k, "residual": v} for k, v in report.residuals.items()]
    _emit(args, cfg, result, rows=rows)


COMMANDS = {
    "orbit": cmd_orbit,
    "monodromy": cmd_monodromy,
    "constraints": cmd_constraints,
    "transverse": cmd_transverse,
    "reduce": cmd_reduce,
    "kdv": cmd_kdv,
    "verify": cmd_verify,
    "check-all": cmd_check_all,
    "schwarzian": cmd_schwarzian,
}


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="coadj-utils",
        description="Virasoro coadjoint orbits, diff-Wilson loops and Dirac constraint analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbit", parents=[common], help="Classify a constant coadjoint element")
    p.add_argument("--constant-D", type=float, required=True, dest="constant_D")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--sweep", type=float, nargs=3, metavar=("START", "STOP", "COUNT"),
                   help="Also compare closed form and integration along an omega sweep")

    p = sub.add_parser("monodromy", parents=[common], help="Diff-Wilson loop of a potential")
    p.add_argument("--operator", choices=("nabla3", "hill"), default="nabla3")
    p.add_argument("--constant-D", type=float, default=None, dest="constant_D")
    p.add_argument("--input", type=Path, default=None, help="Field record (.json) or samples (.csv)")
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--samples", type=int, default=0, help="Dense trajectory points to store")

    p = sub.add_parser("constraints", parents=[common], help="Dirac consistency chain")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--case", choices=sorted(CASES))
    group.add_argument("--case-file", type=Path, dest="case_file",
                       help="JSON {hamiltonian, pairs, primaries, multipliers}")

    p = sub.add_parser("transverse", parents=[common], help="Flat 2D transverse theory")
    p.add_argument("--theory", choices=THEORIES, default="full")
    p.add_argument("--gauge", choices=GAUGES, default="none")
    p.add_argument("--signature", choices=sorted(SIGNATURES), default="+-")
    p.add_argument("--emit", choices=("momentum", "lagrangian", "field-equations", "checks"),
                   default="lagrangian")

    p = sub.add_parser("reduce", parents=[common], help="Finite reduction in (Q, P)")
    p.add_argument("--Q0", type=float, default=2.0)
    p.add_argument("--P0", type=float, default=0.01)
    p.add_argument("--t-end", type=float, default=1.0, dest="t_end")
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--wavefunction", action="store_true", help="Sample the E = 0 wavefunction instead")
    p.add_argument("--q-min", type=float, default=1.2, dest="q_min")
    p.add_argument("--q-max", type=float, default=4.0, dest="q_max")
    p.add_argument("--points", type=int, default=30)
    p.add_argument("--power", type=int, choices=(1, 3), default=1)
    p.add_argument("--c1", type=float, default=0.0)
    p.add_argument("--c2", type=float, default=1.0)

    p = sub.add_parser("kdv", parents=[common], help="Pseudo-spectral D' = aD' + bDD' + qD'''")
    p.add_argument("--input", type=Path, default=None)
    p.add_argument("--soliton", type=float, default=None, metavar="SPEED")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=-6.0)
    p.add_argument("--q", type=float, default=-1.0)
    p.add_argument("--t-end", type=float, default=0.1, dest="t_end")
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--snapshots", type=int, default=11)

    p = sub.add_parser("verify", parents=[common], help="Closed-form solution residuals")
    p.add_argument("--case", choices=CLOSED_FORM_CASES + ("all",), default="all")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")

    p = sub.add_parser("check-all", parents=[common], help="Run the acceptance suites")
    p.add_argument("--only", nargs="+", default=None,
                   help=f"Criterion numbers or names: {', '.join(v[0] for v in SUITES.values())}")

    p = sub.add_parser("schwarzian", parents=[common], help="Schwarzian derivative and identities")
    p.add_argument("--expr", default=None, help="Interval map in x, e.g. 'tan(x)'")
    p.add_argument("--interval", type=float, nargs=2, default=(-1.0, 1.0))
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--input", type=Path, default=None, help="Displacement h of a circle map x + h(x)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)

    try:
        level = log_level_from_env()
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.verbose:
        level = logging.DEBUG if args.verbose > 1 else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT)

    try:
        cfg = _resolve_config(args)
        logger.info("coadj-utils %s %s (seed %d)", __version__, args.command, cfg.seed)
        COMMANDS[args.command](args, cfg)
    except (ConfigurationError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CommandFailed as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1
    except CoadjError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
