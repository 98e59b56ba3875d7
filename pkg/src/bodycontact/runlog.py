"""Per-iteration run logs and their two on-disk formats.

``tabular-text`` is tab-separated: ``#`` metadata lines, one column header
line, one row per iteration and, once the run has finished, a ``# status``
trailer.  ``structured-records`` is one JSON object per line: a header
record, one iteration record per iteration and a final record.  Both are
written line by line and flushed, so an interrupted run leaves only
complete records behind.  Columns are described in ``docs/log-schema.md``.
"""
from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

from .optimizer import OptimizerState, Record

FORMATS = ("tabular-text", "structured-records")
ALIASES = {"tsv": "tabular-text", "text": "tabular-text",
           "jsonl": "structured-records", "json": "structured-records"}
LOG_VERSION = 1
TERMINAL = ("converged", "max-iterations", "infeasible-qp")
METRICS = {"pn": ("pos", "nrm_deg"), "position": ("pos",), "pose": ("pos", "rot_deg"),
           "equal": ("eq",)}


def normalize_format(fmt: str) -> str:
    fmt = ALIASES.get(fmt, fmt)
    if fmt not in FORMATS:
        raise ValueError(f"unknown log format {fmt!r}; expected one of {list(FORMATS)}")
    return fmt


@dataclass
class RunLog:
    """Iteration history of one optimisation run.

    ``tasks`` maps each task name to the metric keys it reports, ``contacts``
    lists the optimised contacts as ``<task>/<side>`` and ``joints`` names the
    joint columns repeated for each of the ``T`` postures.
    """

    name: str
    mode: str = "gradient"
    tasks: dict = field(default_factory=dict)
    contacts: list = field(default_factory=list)
    joints: list = field(default_factory=list)
    T: int = 1
    records: list = field(default_factory=list)
    status: str = "running"
    wall_time: float = 0.0

    @property
    def final_k(self) -> int:
        return self.records[-1].k if self.records else 0

    def final_metrics(self) -> dict:
        return self.records[-1].metrics if self.records else {}

    @classmethod
    def for_problem(cls, name, problem, mode="gradient"):
        """Empty log whose columns match ``problem``; records come later."""
        return cls(name, mode,
                   tasks={t.name: list(METRICS[t.kind]) for t in problem.tasks},
                   contacts=[f"{problem.tasks[i].name}/{s}" for i, s in problem.optimized_sides()],
                   joints=[j.name for j in problem.model.joints], T=problem.T)

    @classmethod
    def from_state(cls, name, problem, state: OptimizerState, mode="gradient"):
        log = cls.for_problem(name, problem, mode)
        log.records = list(state.history)
        log.status = state.status
        log.wall_time = state.wall_time
        return log

    # -- columns -----------------------------------------------------------

    def columns(self):
        cols = ["k", "e_norm", "qp_status"]
        for t, keys in self.tasks.items():
            cols += [f"{t}:{k}" for k in keys]
        for c in self.contacts:
            cols += [f"{c}:{a}" for a in "xyz"]
        for t in range(1, self.T + 1):
            cols += [f"theta{t}:{j}" for j in self.joints]
        return cols

    def row(self, rec: Record):
        vals = [str(rec.k), _num(rec.e_norm), rec.qp_status]
        for t, keys in self.tasks.items():
            vals += [_num(rec.metrics[t][k]) for k in keys]
        for c in self.contacts:
            vals += [_num(v) for v in rec.contacts[c]]
        for th in rec.thetas:
            vals += [_num(v) for v in th]
        return vals


def _num(x) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# writing

def _meta(log: RunLog):
    return {"log_version": LOG_VERSION, "name": log.name, "mode": log.mode,
            "tasks": log.tasks, "contacts": log.contacts, "joints": log.joints, "T": log.T}


def _header_lines(log: RunLog, fmt):
    if fmt == "tabular-text":
        meta = _meta(log)
        lines = [f"# {k}\t{json.dumps(v)}" for k, v in meta.items()]
        return lines + ["\t".join(log.columns())]
    return [json.dumps({"type": "header", **_meta(log)})]


def _record_line(log: RunLog, rec: Record, fmt):
    if fmt == "tabular-text":
        return "\t".join(log.row(rec))
    return json.dumps({"type": "iteration", "k": rec.k, "e_norm": rec.e_norm,
                       "qp_status": rec.qp_status, "metrics": rec.metrics,
                       "contacts": rec.contacts, "thetas": rec.thetas}, sort_keys=True)


def _final_line(log: RunLog, fmt):
    if fmt == "tabular-text":
        return f"# status\t{log.status}\t{_num(log.wall_time)}"
    return json.dumps({"type": "final", "status": log.status, "wall_time": log.wall_time},
                      sort_keys=True)


class LogWriter:
    """Append-only writer: header on open, one line per record, trailer on close."""

    def __init__(self, stream, log: RunLog, fmt="tabular-text"):
        self.stream = stream
        self.log = log
        self.fmt = normalize_format(fmt)
        self._write(_header_lines(log, self.fmt))

    def _write(self, lines):
        self.stream.write("".join(line + "\n" for line in lines))
        self.stream.flush()

    def record(self, rec: Record):
        self._write([_record_line(self.log, rec, self.fmt)])

    def finish(self, status, wall_time):
        self.log.status, self.log.wall_time = status, wall_time
        if status in TERMINAL:
            self._write([_final_line(self.log, self.fmt)])


def dumps_log(log: RunLog, fmt="tabular-text") -> str:
    fmt = normalize_format(fmt)
    buf = io.StringIO()
    w = LogWriter(buf, log, fmt)
    for rec in log.records:
        w.record(rec)
    w.finish(log.status, log.wall_time)
    return buf.getvalue()


def emit_log(log: RunLog, path, fmt="tabular-text"):
    """Write ``log`` to ``path``; identical logs give identical bytes."""
    text = dumps_log(log, fmt)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    return path


# ---------------------------------------------------------------------------
# reading

def loads_log(text: str) -> RunLog:
    """Parse either format (detected from the first character)."""
    lines = [l for l in text.splitlines() if l]
    if not lines:
        raise ValueError("empty log file")
    if lines[0].startswith("{"):
        return _load_records(lines)
    return _load_tabular(lines)


def read_log(path) -> RunLog:
    with open(path, encoding="utf-8") as f:
        return loads_log(f.read())


def _from_meta(meta):
    if meta.get("log_version") != LOG_VERSION:
        raise ValueError(f"unsupported log_version {meta.get('log_version')!r}")
    return RunLog(meta["name"], meta["mode"], meta["tasks"], meta["contacts"],
                  meta["joints"], meta["T"])


def _load_records(lines):
    objs = [json.loads(l) for l in lines]
    if objs[0].get("type") != "header":
        raise ValueError("structured log must start with a header record")
    log = _from_meta(objs[0])
    for o in objs[1:]:
        if o["type"] == "iteration":
            log.records.append(Record(o["k"], o["e_norm"], o["metrics"], o["contacts"],
                                      o["thetas"], o["qp_status"]))
        elif o["type"] == "final":
            log.status, log.wall_time = o["status"], o["wall_time"]
    return log


def _load_tabular(lines):
    meta, i = {}, 0
    while lines[i].startswith("# "):
        key, _, value = lines[i][2:].partition("\t")
        meta[key] = json.loads(value)
        i += 1
    log = _from_meta(meta)
    if lines[i].split("\t") != log.columns():
        raise ValueError("column header does not match the log metadata")
    M = len(log.joints)
    for line in lines[i + 1:]:
        if line.startswith("# status\t"):
            _, status, wall = line.split("\t")
            log.status, log.wall_time = status, float(wall)
            continue
        f = line.split("\t")
        k, e_norm, qp = int(f[0]), float(f[1]), f[2]
        pos = 3
        metrics = {}
        for t, keys in log.tasks.items():
            metrics[t] = {key: float(f[pos + n]) for n, key in enumerate(keys)}
            pos += len(keys)
        contacts = {}
        for c in log.contacts:
            contacts[c] = [float(v) for v in f[pos:pos + 3]]
            pos += 3
        thetas = []
        for _ in range(log.T):
            thetas.append([float(v) for v in f[pos:pos + M]])
            pos += M
        log.records.append(Record(k, e_norm, metrics, contacts, thetas, qp))
    return log
