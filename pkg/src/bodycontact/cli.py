"""Command line interface: ``solve``, ``experiment`` and ``validate``."""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import yaml

from .experiments import CATALOG, run_experiment
from .geometry import GeometryError
from .kinematics import KinematicsError
from .optimizer import run
from .runlog import ALIASES, FORMATS, LogWriter, RunLog, normalize_format
from .scene import SceneError, build_problem, load_scene
from .tasks import TaskError

EXIT = {"converged": 0, "max-iterations": 2, "infeasible-qp": 3}
EXIT_INPUT = 4
INPUT_ERRORS = (SceneError, TaskError, KinematicsError, GeometryError, OSError,
                yaml.YAMLError, ValueError)


def _fmt_row(row):
    return "  ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                     for k, v in row.items())


def cmd_solve(args):
    path = Path(args.scene)
    desc = load_scene(path)
    problem, opts = build_problem(desc, path.parent)
    changes = {}
    if args.mode is not None:
        changes["mode"] = args.mode
    if args.max_iters is not None:
        changes["max_iters"] = args.max_iters
    if args.tol_pos is not None:
        changes["tol_pos"] = args.tol_pos
    if args.tol_nrm is not None:
        changes["tol_nrm_deg"] = args.tol_nrm
    opts = dataclasses.replace(opts, **changes)
    fmt = normalize_format(args.format)
    log = RunLog.for_problem(desc.name, problem, opts.mode)
    if args.log:
        with open(args.log, "w", encoding="utf-8", newline="\n") as f:
            writer = LogWriter(f, log, fmt)
            state = run(problem, opts, callback=writer.record)
            writer.finish(state.status, state.wall_time)
    else:
        state = run(problem, opts)
    print(f"{desc.name}: {state.status} after k={state.k} "
          f"({state.wall_time:.3f} s, |e|={state.task_vector.norm():.3e})")
    for task, m in state.task_vector.metrics.items():
        print(f"  {task}: " + _fmt_row(m))
    return EXIT[state.status]


def cmd_experiment(args):
    result = run_experiment(args.name, out_dir=args.out, fmt=args.format, workers=args.workers)
    for row in result.summary:
        print(_fmt_row(row))
    return 0


def cmd_validate(args):
    path = Path(args.scene)
    desc = load_scene(path)
    problem, _ = build_problem(desc, path.parent)
    problem.validate()
    print(f"{desc.name}: ok (T={desc.T}, {len(desc.bodies)} bodies, "
          f"{problem.model.dof} joints, {len(desc.tasks)} tasks, {desc.n_contacts} contacts)")
    return 0


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 4), not argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser():
    fmts = list(FORMATS) + sorted(ALIASES)
    p = _Parser(prog="bodycontact",
                description="Posture and contact point optimisation on body surfaces.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run the optimiser on a scene file")
    s.add_argument("scene", help="scene file (YAML)")
    s.add_argument("--mode", choices=("gradient", "baseline"), default=None)
    s.add_argument("--max-iters", type=int, default=None, help="iteration budget k_max")
    s.add_argument("--tol-pos", type=float, default=None, help="position tolerance [m]")
    s.add_argument("--tol-nrm", type=float, default=None, help="normal tolerance [deg]")
    s.add_argument("--log", default=None, help="write the iteration log to this file")
    s.add_argument("--format", choices=fmts, default="tabular-text", help="log format")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("experiment", help="run a catalog experiment",
                       description="catalog: " + ", ".join(CATALOG))
    e.add_argument("name")
    e.add_argument("--out", default=None, help="directory for logs and the summary table")
    e.add_argument("--format", choices=fmts, default="tabular-text", help="log format")
    e.add_argument("--workers", type=int, default=None,
                   help="processes for the grid study (default: CPU count)")
    e.set_defaults(func=cmd_experiment)

    v = sub.add_parser("validate", help="parse and check a scene file")
    v.add_argument("scene")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
