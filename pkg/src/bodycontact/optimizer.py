"""Sequential quadratic programming over joints and surface contacts.

Each iteration linearises the stacked task residual and the inequality
constraints, solves

    min  1/2 dq^T (J^T J + lambda I) dq + e^T J dq
    s.t. A dq + b >= 0

adds the joint part of ``dq`` to the joint vectors and moves every
optimised contact by its 2-vector through the tangent-plane step and
projection.  The 2-vectors are then discarded; the new contact points are
the origins of the next linearisation.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import contact as C
from .geometry import pairwise_distance, project_point
from .kinematics import forward_kinematics, point_jacobian
from .qp import QPProblem, solve_qp
from .tasks import (Iterate, Layout, Problem, TaskVector, assemble, column_layout,
                    side_geometry)

STATUSES = ("running", "converged", "max-iterations", "infeasible-qp")


@dataclass(frozen=True)
class CollisionPair:
    bodies: tuple
    margin: float = 0.0


@dataclass
class ConstraintSet:
    """Bounds and collision pairs entering the linearised constraints."""

    lower: np.ndarray
    upper: np.ndarray
    collisions: list
    u_lim: dict

    @classmethod
    def from_problem(cls, problem: Problem, layout: Layout):
        u_lim = {}
        for key in layout.u:
            task = problem.tasks[key[0]]
            side = task.side1 if key[1] == 1 else task.side2
            u_lim[key] = (side.contact or C.ContactConfiguration()).u_lim
        return cls(problem.model.lower, problem.model.upper, list(problem.collisions), u_lim)


@dataclass(frozen=True)
class Options:
    mode: str = "gradient"
    max_iters: int = 200
    tol_pos: float = 1e-4
    tol_nrm_deg: float = 0.01
    tol_eq: float = 1e-10
    tol_task: float = 1e-12
    damping: float | None = None
    step_clip: float = 0.2

    def __post_init__(self):
        if self.mode not in ("gradient", "baseline"):
            raise ValueError(f"mode must be 'gradient' or 'baseline', got {self.mode!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        for name in ("tol_pos", "tol_nrm_deg", "tol_eq", "step_clip"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.tol_task < 0 or (self.damping is not None and self.damping < 0):
            raise ValueError("tol_task and damping must be non-negative")


@dataclass
class Record:
    k: int
    e_norm: float
    metrics: dict
    contacts: dict
    thetas: list
    qp_status: str


@dataclass
class OptimizerState:
    iterate: Iterate
    layout: Layout
    task_vector: TaskVector
    J: np.ndarray
    k: int = 1
    history: list = field(default_factory=list)
    damping: float = 0.0
    status: str = "running"
    wall_time: float = 0.0

    @property
    def thetas(self):
        return self.iterate.thetas()


# ---------------------------------------------------------------------------
# state handling

def _side(task, s):
    return task.side1 if s == 1 else task.side2


def _params(side):
    return side.contact or C.ContactConfiguration()


def _other_point(problem: Problem, it: Iterate, key):
    i, s = key
    task = problem.tasks[i]
    other = _side(task, 3 - s)
    model = it.models[task.time - 1]
    return side_geometry(problem, other, model, it.contacts.get((i, 3 - s)))[0]


def _target_points(problem: Problem, it: Iterate, key):
    """Closest-point anchors for a contact: the other side, or witnesses."""
    i, s = key
    task = problem.tasks[i]
    other = _side(task, 3 - s)
    model = it.models[task.time - 1]
    if other.optimize:
        me = problem.posed_body(_side(task, s).body, model, _side(task, s).region)
        them = problem.posed_body(other.body, model, other.region)
        _, pa, _ = pairwise_distance(me, them)
        return pa
    return _other_point(problem, it, key)


def initial_iterate(problem: Problem, mode="gradient") -> Iterate:
    models = []
    for _ in range(problem.T):
        m = problem.model.clone()
        forward_kinematics(m, problem.model.nominal)
        models.append(m)
    it = Iterate(models, {})
    keys = problem.optimized_sides()
    # fixed-target contacts first so body-body pairs can see them
    for key in sorted(keys, key=lambda k: _side(problem.tasks[k[0]], 3 - k[1]).optimize):
        i, s = key
        task = problem.tasks[i]
        side = _side(task, s)
        body = problem.posed_body(side.body, models[task.time - 1], side.region)
        params = _params(side)
        if mode == "baseline" or params.init == "target":
            target = _target_points(problem, it, key)
            it.contacts[key] = C.make_state(project_point(target, body), params)
        else:
            it.contacts[key] = C.initial_state(body, params)
    return it


def _reproject(problem: Problem, it: Iterate):
    for key in problem.optimized_sides():
        i, s = key
        task = problem.tasks[i]
        side = _side(task, s)
        body = problem.posed_body(side.body, it.models[task.time - 1], side.region)
        it.contacts[key] = C.make_state(project_point(_target_points(problem, it, key), body),
                                        _params(side))


def _record(problem, state: OptimizerState, qp_status):
    contacts = {f"{problem.tasks[i].name}/{s}": st.position.tolist()
                for (i, s), st in state.iterate.contacts.items()}
    return Record(state.k, state.task_vector.norm(), state.task_vector.metrics, contacts,
                  [t.tolist() for t in state.iterate.thetas()], qp_status)


def initialize(problem: Problem, options: Options = Options()) -> OptimizerState:
    problem.validate()
    it = initial_iterate(problem, options.mode)
    layout = column_layout(problem, with_u=options.mode == "gradient")
    tv, J = assemble(it, problem, layout)
    state = OptimizerState(it, layout, tv, J)
    state.history.append(_record(problem, state, "none"))
    return state


# ---------------------------------------------------------------------------
# QP pieces

def linearize_constraints(problem: Problem, it: Iterate, layout: Layout, cset: ConstraintSet = None):
    """Rows ``A dq + b >= 0`` for joint limits, collisions and contact steps."""
    if cset is None:
        cset = ConstraintSet.from_problem(problem, layout)
    rows, rhs = [], []
    n = layout.n
    for t, model in enumerate(it.models):
        cols = layout.theta[t]
        for j in range(model.dof):
            if np.isfinite(cset.upper[j]):
                a = np.zeros(n)
                a[cols.start + j] = -1.0
                rows.append(a)
                rhs.append(cset.upper[j] - model.theta[j])
            if np.isfinite(cset.lower[j]):
                a = np.zeros(n)
                a[cols.start + j] = 1.0
                rows.append(a)
                rhs.append(model.theta[j] - cset.lower[j])
        for pair in cset.collisions:
            a_name, b_name = pair.bodies
            A_body = problem.posed_body(a_name, model)
            B_body = problem.posed_body(b_name, model)
            d, pa, pb = pairwise_distance(A_body, B_body)
            if d > 1e-12:
                nvec = (pa - pb) / d
            else:
                nvec = A_body.to_world(A_body.centroid()) - B_body.to_world(B_body.centroid())
                nvec /= max(np.linalg.norm(nvec), 1e-300)
            grad = nvec @ (point_jacobian(model, problem.bodies[a_name].link, pa)
                           - point_jacobian(model, problem.bodies[b_name].link, pb))
            a = np.zeros(n)
            a[cols] = grad
            rows.append(a)
            rhs.append(d - pair.margin)
    for key, sl in layout.u.items():
        lim = cset.u_lim[key]
        for k in range(2):
            for sign in (-1.0, 1.0):
                a = np.zeros(n)
                a[sl.start + k] = sign
                rows.append(a)
                rhs.append(lim)
    return np.array(rows).reshape(-1, n), np.array(rhs, dtype=float)


def step_bounds(layout: Layout, clip):
    """Rows bounding every joint update to ``[-clip, clip]``."""
    rows, rhs = [], []
    for cols in layout.theta:
        for c in range(cols.start, cols.stop):
            for sign in (-1.0, 1.0):
                a = np.zeros(layout.n)
                a[c] = sign
                rows.append(a)
                rhs.append(clip)
    return np.array(rows).reshape(-1, layout.n), np.array(rhs, dtype=float)


def default_damping(J):
    n = J.shape[1]
    if n == 0:
        return 0.0
    return max(1e-6 * float(np.sum(J * J)) / n, 1e-12)


def build_qp(J, e, A, b, damping) -> QPProblem:
    n = J.shape[1]
    H = J.T @ J + damping * np.eye(n)
    return QPProblem(0.5 * (H + H.T), J.T @ e, A, b)


# ---------------------------------------------------------------------------
# iteration

def converged(tv: TaskVector, options: Options) -> bool:
    if tv.norm() < options.tol_task:
        return True
    for m in tv.metrics.values():
        if m.get("pos", 0.0) >= options.tol_pos:
            return False
        if max(m.get("nrm_deg", 0.0), m.get("rot_deg", 0.0)) >= options.tol_nrm_deg:
            return False
        if m.get("eq", 0.0) >= options.tol_eq:
            return False
    return True


def sqp_step(problem: Problem, state: OptimizerState, options: Options = Options()) -> OptimizerState:
    """One SQP iteration; returns the advanced state (the input is not modified)."""
    if state.status != "running":
        raise RuntimeError(f"cannot step a state with status {state.status!r}")
    layout = state.layout
    it = state.iterate
    A, b = linearize_constraints(problem, it, layout)
    As, bs = step_bounds(layout, options.step_clip)
    A, b = np.vstack([A, As]), np.concatenate([b, bs])
    lam = default_damping(state.J) if options.damping is None else options.damping
    res = solve_qp(build_qp(state.J, state.task_vector.values, A, b, lam))
    if res.status != "optimal":
        return OptimizerState(it, layout, state.task_vector, state.J, state.k,
                              state.history, lam, "infeasible-qp", state.wall_time)
    dq = res.x
    models = []
    for t, m in enumerate(it.models):
        new = m.clone()
        theta = np.clip(m.theta + dq[layout.theta[t]], problem.model.lower, problem.model.upper)
        forward_kinematics(new, theta)
        models.append(new)
    contacts = {}
    for key, st in it.contacts.items():
        if key in layout.u:
            st = C.contact_update(st, dq[layout.u[key]])
        task = problem.tasks[key[0]]
        side = _side(task, key[1])
        body = problem.posed_body(side.body, models[task.time - 1], side.region)
        contacts[key] = C.rebase(st, body)
    new_it = Iterate(models, contacts)
    if options.mode == "baseline":
        _reproject(problem, new_it)
    tv, J = assemble(new_it, problem, layout)
    new_state = OptimizerState(new_it, layout, tv, J, state.k + 1, list(state.history), lam,
                               "running", state.wall_time)
    new_state.history.append(_record(problem, new_state, res.status))
    return new_state


def run(problem: Problem, options: Options = Options(), callback=None) -> OptimizerState:
    """Iterate from the nominal posture until converged or ``k == max_iters``."""
    start = time.perf_counter()
    state = initialize(problem, options)
    if callback:
        callback(state.history[-1])
    while True:
        if converged(state.task_vector, options):
            state.status = "converged"
            break
        if state.k >= options.max_iters:
            state.status = "max-iterations"
            break
        state = sqp_step(problem, state, options)
        if state.status == "infeasible-qp":
            break
        if callback:
            callback(state.history[-1])
    state.wall_time = time.perf_counter() - start
    return state
