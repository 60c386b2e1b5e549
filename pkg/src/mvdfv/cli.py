"""Command-line entry point: ``mvdfv {mesh-info,validate,solve,convergence}``.

Exit status is 0 on success, 1 when an input fails validation and 2 when
the linear solver fails.
"""
import argparse
import logging
from pathlib import Path
import sys

from . import harness
from .dualmesh import build, count_identities
from .errors import BreakdownNonSpd, MvdError, NotConverged
from .meshio import load_msh, validate_acute

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2


def _add_common(p):
    p.add_argument("--allow-nonacute", action="store_true",
                   help="build the dual of a non-acute mesh with a warning instead of failing")
    p.add_argument("--tol", type=float, help="CG relative residual tolerance (overrides config)")
    p.add_argument("--reaction", type=float, help="constant reaction coefficient (overrides config)")
    p.add_argument("--threads", type=int, default=1,
                   help="worker count; results do not depend on it")
    p.add_argument("--no-timing", action="store_true",
                   help="write 0 in the seconds column so CSV output is reproducible")


def build_parser():
    parser = argparse.ArgumentParser(prog="mvdfv", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mesh-info", help="print quality report and dual counts of an MSH file")
    p.add_argument("file")
    _add_common(p)
    p = sub.add_parser("validate", help="check that an MSH file is a valid acute mesh")
    p.add_argument("file")
    _add_common(p)
    p = sub.add_parser("solve", help="run one manufactured-solution case")
    p.add_argument("config")
    p.add_argument("--out", help="CSV output path (overrides config)")
    _add_common(p)
    p = sub.add_parser("convergence", help="run a refinement study")
    p.add_argument("configs", nargs="+", help="a directory of *.cfg files or a list of config files")
    p.add_argument("--out", help="CSV output path (default: standard output)")
    _add_common(p)
    return parser


def _load_config(path, args):
    cfg = harness.load_config(path)
    if args.tol is not None:
        cfg.tol = args.tol
    if args.reaction is not None:
        cfg.reaction = args.reaction
    cfg.allow_nonacute = args.allow_nonacute
    # re-run validation on overridden values
    return harness.CaseConfig(cfg.mesh, cfg.h, cfg.tensor, cfg.reaction, cfg.tol, cfg.out,
                              cfg.allow_nonacute)


def _write(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_mesh_info(args):
    mesh = load_msh(args.file)
    q = validate_acute(mesh)
    print(f"nodes {mesh.num_nodes}  triangles {mesh.num_triangles}  "
          f"boundary nodes {len(mesh.boundary_nodes)}  edges {mesh.num_edges}")
    print(f"min angle {q.min_angle:.2f}  max angle {q.max_angle:.2f}  "
          f"non-acute {q.num_obtuse_or_right}  acute {q.is_acute}")
    mvd = build(mesh, allow_nonacute=args.allow_nonacute)
    print(f"M_D {mvd.M_D}  M_V {mvd.M_V}  M {mvd.M}")
    ok_v, ok_m = count_identities(mvd)
    print(f"M_V = T + B: {ok_v}  M = (3T + B)/2: {ok_m}")
    return EXIT_OK


def cmd_validate(args):
    mesh = load_msh(args.file)
    q = validate_acute(mesh)
    if not q.is_acute and not args.allow_nonacute:
        print(f"{args.file}: not acute ({q.num_obtuse_or_right} triangles, "
              f"max angle {q.max_angle:.4f})", file=sys.stderr)
        return EXIT_INVALID
    build(mesh, allow_nonacute=args.allow_nonacute)
    print(f"{args.file}: ok ({mesh.num_nodes} nodes, {mesh.num_triangles} triangles)")
    return EXIT_OK


def cmd_solve(args):
    cfg = _load_config(args.config, args)
    result = harness.run_case(cfg)
    result.level = 1
    for name in harness.COLUMNS[1:]:
        print(f"{name:9s} {getattr(result, name)}")
    out = args.out or cfg.out
    if out:
        _write(harness.emit_csv([result], timing=not args.no_timing), out)
    return EXIT_OK


def _config_paths(items):
    if len(items) == 1 and Path(items[0]).is_dir():
        return sorted(Path(items[0]).glob("*.cfg"))
    return [Path(p) for p in items]


def cmd_convergence(args):
    configs = [_load_config(p, args) for p in _config_paths(args.configs)]
    results, slopes = harness.convergence_study(configs)
    _write(harness.emit_csv(results, timing=not args.no_timing), args.out)
    stream = sys.stderr if not args.out else sys.stdout
    for name, s in slopes.items():
        print(f"slope {name} vs {harness.SLOPE_COUNTS[name]}: {s:.4f}", file=stream)
    return EXIT_OK


COMMANDS = {"mesh-info": cmd_mesh_info, "validate": cmd_validate,
            "solve": cmd_solve, "convergence": cmd_convergence}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("--threads must be at least 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        return COMMANDS[args.command](args)
    except (NotConverged, BreakdownNonSpd) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (MvdError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
