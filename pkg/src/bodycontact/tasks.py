"""Element task functions and their stacking into the global residual.

Residual conventions (every element is multiplied by its ``weight``):

* ``pn``: ``(p1 - p2, w_nrm * (xi1 . xi2 + 1))``, 4 rows
* ``position``: ``p1 - p2``, 3 rows
* ``pose``: ``(p1 - p2, log(R2 R1^T))``, 6 rows; side 2 is the target
* ``equal``: ``theta_ta[j] - theta_tb[j]`` for the listed joints
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .contact import ContactConfiguration, ContactPointState, pn_task_u_jacobian
from .geometry import ConvexBody
from .kinematics import (KinematicModel, angular_jacobian, direction_jacobian,
                         point_jacobian)
from .transforms import right_jacobian_inverse, rotation_log, rpy_matrix, transform

TASK_KINDS = ("pn", "position", "pose", "equal")
ROWS = {"pn": 4, "position": 3, "pose": 6}


class TaskError(ValueError):
    pass


@dataclass(frozen=True)
class Side:
    """One side of an element task.

    ``body`` names a body (surface contact when ``optimize`` is set, fixed
    point otherwise), ``link`` names a link frame, and neither means the
    world frame.  ``point``/``normal``/``rpy`` are expressed in that frame.
    """

    body: str | None = None
    link: str | None = None
    point: tuple = (0.0, 0.0, 0.0)
    normal: tuple | None = None
    rpy: tuple = (0.0, 0.0, 0.0)
    optimize: bool = False
    contact: ContactConfiguration | None = None
    region: tuple | None = None


@dataclass(frozen=True)
class TaskSpec:
    name: str
    kind: str
    time: int = 1
    side1: Side | None = None
    side2: Side | None = None
    w_nrm: float = 1.0
    weight: float = 1.0
    joints: tuple = ()
    times: tuple = ()

    @property
    def rows(self) -> int:
        if self.kind == "equal":
            return len(self.joints)
        return ROWS[self.kind]


@dataclass
class BodyBinding:
    """A body's local geometry and how it is placed in the world.

    With ``link`` set, the body frame is ``link_pose @ offset``; otherwise
    ``offset`` is the fixed world pose.
    """

    body: ConvexBody
    link: str | None = None
    offset: np.ndarray = field(default_factory=lambda: np.eye(4))


@dataclass
class Problem:
    bodies: dict
    model: KinematicModel
    tasks: list
    T: int = 1
    collisions: list = field(default_factory=list)

    def body_pose(self, name, model: KinematicModel):
        b = self.bodies[name]
        if b.link is None:
            return b.offset
        return model.world[b.link] @ b.offset

    def posed_body(self, name, model: KinematicModel, region=None) -> ConvexBody:
        body = self.bodies[name].body.moved(self.body_pose(name, model))
        return body if region is None else body.restricted(region)

    def side_link(self, side: Side):
        if side.body is not None:
            return self.bodies[side.body].link
        return side.link

    def side_frame(self, side: Side, model: KinematicModel):
        """World transform of the frame ``side`` is expressed in."""
        if side.body is not None:
            return self.body_pose(side.body, model)
        if side.link is not None:
            return model.world[side.link]
        return np.eye(4)

    def optimized_sides(self):
        """(task index, side number) of every optimised surface contact."""
        out = []
        for i, task in enumerate(self.tasks):
            for s, side in ((1, task.side1), (2, task.side2)):
                if side is not None and side.optimize:
                    out.append((i, s))
        return out

    def validate(self):
        if self.T < 1:
            raise TaskError("number of time indices must be at least 1")
        names = set()
        for i, task in enumerate(self.tasks):
            where = f"task {task.name or i!r}"
            if task.name in names:
                raise TaskError(f"{where}: duplicate task name")
            names.add(task.name)
            if task.kind not in TASK_KINDS:
                raise TaskError(f"{where}: unknown kind {task.kind!r}")
            if not task.weight > 0:
                raise TaskError(f"{where}: weight must be positive")
            if task.kind == "equal":
                if len(task.times) != 2 or not all(1 <= t <= self.T for t in task.times):
                    raise TaskError(f"{where}: needs two time indices in 1..{self.T}")
                for j in task.joints:
                    if j not in self.model.joint_index:
                        raise TaskError(f"{where}: unknown joint {j!r}")
                continue
            if not 1 <= task.time <= self.T:
                raise TaskError(f"{where}: time index {task.time} outside 1..{self.T}")
            if task.kind == "pn" and not task.w_nrm > 0:
                raise TaskError(f"{where}: w_nrm must be positive")
            for side in (task.side1, task.side2):
                if side is None:
                    raise TaskError(f"{where}: both sides are required")
                if side.body is not None and side.body not in self.bodies:
                    raise TaskError(f"{where}: unknown body {side.body!r}")
                if side.link is not None and side.link not in self.model.links:
                    raise TaskError(f"{where}: unknown link {side.link!r}")
                if side.optimize:
                    if task.kind != "pn":
                        raise TaskError(f"{where}: only pn tasks may optimise contact points")
                    if side.body is None:
                        raise TaskError(f"{where}: an optimised contact needs a body")
                elif task.kind == "pn" and side.normal is None:
                    raise TaskError(f"{where}: fixed pn side needs a normal")
                if side.region is not None and side.body is not None:
                    self.bodies[side.body].body.restricted(side.region)
            if (task.kind == "pn" and task.side1.body is not None
                    and task.side1.body == task.side2.body):
                raise TaskError(f"{where}: a contact pair needs two distinct bodies")
        for c in self.collisions:
            for b in c.bodies:
                if b not in self.bodies:
                    raise TaskError(f"collision pair references unknown body {b!r}")
            if c.margin < 0:
                raise TaskError("collision margin must be non-negative")
        return self


@dataclass
class Iterate:
    """Joint vectors (one model clone per time index) and contact states."""

    models: list
    contacts: dict

    def thetas(self):
        return [m.theta.copy() for m in self.models]


@dataclass
class Layout:
    """Column blocks of the stacked configuration update."""

    theta: list
    u: dict
    n: int


def column_layout(problem: Problem, with_u=True) -> Layout:
    M = problem.model.dof
    theta, u, col = [], {}, 0
    keys = problem.optimized_sides() if with_u else []
    for t in range(1, problem.T + 1):
        theta.append(slice(col, col + M))
        col += M
        for key in keys:
            if problem.tasks[key[0]].time == t:
                u[key] = slice(col, col + 2)
                col += 2
    return Layout(theta, u, col)


@dataclass
class TaskVector:
    values: np.ndarray
    blocks: dict
    metrics: dict

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


# ---------------------------------------------------------------------------
# element residuals

def pn_error(p1, p2, xi1, xi2, w_nrm=1.0):
    xi1, xi2 = np.asarray(xi1, float), np.asarray(xi2, float)
    for xi in (xi1, xi2):
        if abs(np.linalg.norm(xi) - 1.0) > 1e-6:
            raise TaskError(f"normal {xi} is not unit length")
    e = np.empty(4)
    e[:3] = np.asarray(p1, float) - np.asarray(p2, float)
    e[3] = w_nrm * (xi1 @ xi2 + 1.0)
    return e


def normal_error_deg(xi1, xi2) -> float:
    """Angle between ``xi1`` and ``-xi2`` in degrees."""
    return float(np.degrees(np.arccos(np.clip(-(xi1 @ xi2), -1.0, 1.0))))


def pose_error(current, target):
    current, target = np.asarray(current, float), np.asarray(target, float)
    e = np.empty(6)
    e[:3] = current[:3, 3] - target[:3, 3]
    e[3:] = rotation_log(target[:3, :3] @ current[:3, :3].T)
    return e


def pn_theta_jacobian(model, link1, p1, xi1, link2, p2, xi2, w_nrm=1.0):
    J = np.empty((4, model.dof))
    J[:3] = point_jacobian(model, link1, p1) - point_jacobian(model, link2, p2)
    J[3] = w_nrm * (xi1 @ direction_jacobian(model, link2, xi2)
                    + xi2 @ direction_jacobian(model, link1, xi1))
    return J


# ---------------------------------------------------------------------------
# assembly

def side_geometry(problem: Problem, side: Side, model, state: ContactPointState | None):
    if state is not None:
        return state.position, state.normal
    F = problem.side_frame(side, model)
    p = F[:3, :3] @ np.asarray(side.point, float) + F[:3, 3]
    xi = None if side.normal is None else F[:3, :3] @ np.asarray(side.normal, float)
    if xi is not None:
        xi = xi / np.linalg.norm(xi)
    return p, xi


def _side_pose(problem: Problem, side: Side, model):
    F = problem.side_frame(side, model)
    return F @ transform(rpy_matrix(side.rpy), side.point)


def assemble(it: Iterate, problem: Problem, layout: Layout):
    """Stacked residual and its Jacobian with respect to the layout columns."""
    rows = sum(t.rows for t in problem.tasks)
    e = np.zeros(rows)
    J = np.zeros((rows, layout.n))
    blocks, metrics = {}, {}
    r = 0
    for i, task in enumerate(problem.tasks):
        k = task.rows
        sl = slice(r, r + k)
        blocks[task.name] = (r, r + k)
        if task.kind == "equal":
            ta, tb = task.times
            ma, mb = it.models[ta - 1], it.models[tb - 1]
            idx = [problem.model.joint_index[j] for j in task.joints]
            e[sl] = ma.theta[idx] - mb.theta[idx]
            ca, cb = layout.theta[ta - 1], layout.theta[tb - 1]
            for row, j in enumerate(idx):
                J[r + row, ca.start + j] += 1.0
                J[r + row, cb.start + j] -= 1.0
            metrics[task.name] = {"eq": float(np.max(np.abs(e[sl]))) if k else 0.0}
        else:
            model = it.models[task.time - 1]
            cols = layout.theta[task.time - 1]
            link1, link2 = problem.side_link(task.side1), problem.side_link(task.side2)
            if task.kind == "pn":
                s1 = it.contacts.get((i, 1))
                s2 = it.contacts.get((i, 2))
                p1, xi1 = side_geometry(problem, task.side1, model, s1)
                p2, xi2 = side_geometry(problem, task.side2, model, s2)
                e[sl] = pn_error(p1, p2, xi1, xi2, task.w_nrm)
                J[sl, cols] = pn_theta_jacobian(model, link1, p1, xi1, link2, p2, xi2, task.w_nrm)
                if (i, 1) in layout.u:
                    J[sl, layout.u[(i, 1)]] = pn_task_u_jacobian(s1, xi2, task.w_nrm, side=1)
                if (i, 2) in layout.u:
                    J[sl, layout.u[(i, 2)]] = pn_task_u_jacobian(s2, xi1, task.w_nrm, side=2)
                metrics[task.name] = {"pos": float(np.linalg.norm(p1 - p2)),
                                      "nrm_deg": normal_error_deg(xi1, xi2)}
            elif task.kind == "position":
                p1, _ = side_geometry(problem, task.side1, model, None)
                p2, _ = side_geometry(problem, task.side2, model, None)
                e[sl] = p1 - p2
                J[sl, cols] = point_jacobian(model, link1, p1) - point_jacobian(model, link2, p2)
                metrics[task.name] = {"pos": float(np.linalg.norm(p1 - p2))}
            else:
                P1 = _side_pose(problem, task.side1, model)
                P2 = _side_pose(problem, task.side2, model)
                err = pose_error(P1, P2)
                e[sl] = err
                Jr = right_jacobian_inverse(err[3:])
                J[r:r + 3, cols] = (point_jacobian(model, link1, P1[:3, 3])
                                    - point_jacobian(model, link2, P2[:3, 3]))
                J[r + 3:r + 6, cols] = (-Jr @ angular_jacobian(model, link1)
                                        + Jr.T @ angular_jacobian(model, link2))
                metrics[task.name] = {"pos": float(np.linalg.norm(err[:3])),
                                      "rot_deg": float(np.degrees(np.linalg.norm(err[3:])))}
        e[sl] *= task.weight
        J[sl] *= task.weight
        r += k
    return TaskVector(e, blocks, metrics), J
