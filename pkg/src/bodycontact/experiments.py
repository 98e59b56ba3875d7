"""Catalog of the shipped numerical experiments.

Each experiment loads one or more scenes from the package ``scenes``
directory, runs the optimiser and returns the run logs together with one
summary row per run.  ``ik-grid-solvability`` instead sweeps a grid of
targets with and without the tip body and reports solved counts.
"""
from __future__ import annotations

import dataclasses
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .optimizer import Options, run
from .runlog import RunLog, emit_log, normalize_format
from .scene import SceneDescription, build_problem, load_scene
from .tasks import Side

SURFACE_SEARCH = ("surface-search-box", "surface-search-tetra", "surface-search-mesh",
                  "surface-search-offbody-w1", "surface-search-offbody-w10",
                  "surface-search-nosmoothing")
IK = ("ik-hemisphere", "ik-cube", "ik-prism")
CATALOG = SURFACE_SEARCH + IK + ("ik-grid-solvability", "ik-baseline-compare")

# grid study: a vertical slice through the workspace of the ik-hemisphere arm
GRID_SCENE = "ik-hemisphere"
GRID_X = (0.2, 0.4, 0.6, 0.8, 1.0)
GRID_Y = (0.0,)
GRID_Z = (-0.2, 0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2)
GRID_NORMALS = ((1.0, 0.0, 0.0), (-1.0, 0.0, 0.0), (0.0, 1.0, 0.0),
                (0.0, -1.0, 0.0), (0.0, 0.0, 1.0), (0.0, 0.0, -1.0))

SUMMARY_COLUMNS = ("experiment", "run", "mode", "status", "k", "pos", "nrm_deg",
                   "wall_time", "ms_per_iter")


class ExperimentError(ValueError):
    pass


def scene_dir() -> Path:
    return Path(str(resources.files("bodycontact") / "scenes"))


def scene_path(name) -> Path:
    return scene_dir() / f"{name}.yaml"


@dataclass
class ExperimentResult:
    name: str
    logs: dict = field(default_factory=dict)
    summary: list = field(default_factory=list)
    table: list = field(default_factory=list)

    def row(self, run_name):
        for r in self.summary:
            if r["run"] == run_name:
                return r
        raise KeyError(run_name)


def summary_row(experiment, run_name, log: RunLog):
    """Final errors of a run; ``pos``/``nrm_deg`` are the worst over its tasks."""
    metrics = log.final_metrics()
    pos = max((m.get("pos", 0.0) for m in metrics.values()), default=0.0)
    nrm = max((max(m.get("nrm_deg", 0.0), m.get("rot_deg", 0.0)) for m in metrics.values()),
              default=0.0)
    k = log.final_k
    return {"experiment": experiment, "run": run_name, "mode": log.mode, "status": log.status,
            "k": k, "pos": pos, "nrm_deg": nrm, "wall_time": log.wall_time,
            "ms_per_iter": 1000.0 * log.wall_time / max(k, 1)}


def run_scene(desc: SceneDescription, base_dir=None, options: Options = None, label=None):
    problem, opts = build_problem(desc, base_dir)
    if options is not None:
        opts = options
    state = run(problem, opts)
    return RunLog.from_state(label or desc.name, problem, state, opts.mode)


# ---------------------------------------------------------------------------
# grid study

def grid_targets():
    cells = [(x, y, z) for x in GRID_X for y in GRID_Y for z in GRID_Z]
    return [(c, n) for c in cells for n in GRID_NORMALS]


def point_tip_variant(desc: SceneDescription) -> SceneDescription:
    """Replace the hemisphere tip by a fixed point and normal at its apex."""
    task = desc.tasks[0]
    body = next(b for b in desc.bodies if b.name == task.side1.body)
    apex = np.asarray(body.pose.position) + np.array([0.0, 0.0, body.params["radius"]])
    side = Side(link=body.link, point=tuple(float(v) for v in apex), normal=(0.0, 0.0, 1.0))
    return dataclasses.replace(desc, bodies=[b for b in desc.bodies if b is not body],
                               tasks=[dataclasses.replace(task, side1=side)] + desc.tasks[1:])


def _with_target(desc: SceneDescription, point, normal):
    task = desc.tasks[0]
    side2 = dataclasses.replace(task.side2, point=tuple(point), normal=tuple(normal))
    return dataclasses.replace(desc, tasks=[dataclasses.replace(task, side2=side2)])


def _solve_cell(args):
    desc, base_dir, point, normal = args
    problem, opts = build_problem(_with_target(desc, point, normal), base_dir)
    st = run(problem, opts)
    return st.status, st.k


def grid_study(workers=None):
    """Solve every grid target with the tip body and with a tip point.

    Returns rows ``(variant, x, y, z, nx, ny, nz, status, k)``.
    """
    path = scene_path(GRID_SCENE)
    body = load_scene(path)
    variants = {"tip-body": body, "tip-point": point_tip_variant(body)}
    jobs, keys = [], []
    for name, desc in variants.items():
        for point, normal in grid_targets():
            jobs.append((desc, path.parent, point, normal))
            keys.append((name, *point, *normal))
    workers = os.cpu_count() if workers is None else workers
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_solve_cell, jobs, chunksize=8))
    else:
        results = [_solve_cell(j) for j in jobs]
    return [(*key, status, k) for key, (status, k) in zip(keys, results)]


def solved_counts(table):
    counts = {}
    for row in table:
        counts.setdefault(row[0], 0)
        counts[row[0]] += row[7] == "converged"
    return counts


# ---------------------------------------------------------------------------
# catalog entry point

def run_experiment(name, out_dir=None, fmt="tabular-text", workers=None) -> ExperimentResult:
    """Run one catalog experiment; with ``out_dir`` also write logs and a summary."""
    if name not in CATALOG:
        raise ExperimentError(f"unknown experiment {name!r}; catalog: {', '.join(CATALOG)}")
    result = ExperimentResult(name)
    if name == "ik-grid-solvability":
        result.table = grid_study(workers)
        n = len(grid_targets())
        for variant, count in solved_counts(result.table).items():
            result.summary.append({"experiment": name, "run": variant, "solved": count,
                                   "total": n})
    elif name == "ik-baseline-compare":
        path = scene_path(name)
        desc = load_scene(path)
        _, opts = build_problem(desc, path.parent)
        for mode in ("gradient", "baseline"):
            log = run_scene(desc, path.parent, dataclasses.replace(opts, mode=mode),
                            label=f"{name}-{mode}")
            result.logs[mode] = log
            result.summary.append(summary_row(name, mode, log))
    else:
        path = scene_path(name)
        log = run_scene(load_scene(path), path.parent)
        result.logs[name] = log
        result.summary.append(summary_row(name, name, log))
    if out_dir is not None:
        write_result(result, out_dir, fmt)
    return result


def write_result(result: ExperimentResult, out_dir, fmt="tabular-text"):
    fmt = normalize_format(fmt)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ext = ".tsv" if fmt == "tabular-text" else ".jsonl"
    paths = []
    for log in result.logs.values():
        paths.append(emit_log(log, out / f"{log.name}{ext}", fmt))
    if result.table:
        cols = ("variant", "x", "y", "z", "nx", "ny", "nz", "status", "k")
        lines = ["\t".join(cols)] + ["\t".join(str(v) for v in row) for row in result.table]
        p = out / f"{result.name}-cells.tsv"
        p.write_text("\n".join(lines) + "\n", encoding="utf-8")
        paths.append(p)
    cols = list(result.summary[0]) if result.summary else list(SUMMARY_COLUMNS)
    lines = ["\t".join(cols)] + ["\t".join(_cell(r[c]) for c in cols) for r in result.summary]
    p = out / f"{result.name}-summary.tsv"
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")
    paths.append(p)
    return paths


def _cell(v):
    return repr(float(v)) if isinstance(v, float) else str(v)
