"""Articulated rigid-body model with forward kinematics and Jacobians."""
from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from .transforms import axis_angle, transform

JOINT_KINDS = ("revolute", "prismatic", "linear-virtual", "rotational-virtual")
ROTARY = frozenset({"revolute", "rotational-virtual"})


class KinematicsError(ValueError):
    pass


@dataclass
class Joint:
    """One degree of freedom between ``parent`` (None = world) and ``child``.

    ``origin`` places the joint frame in the parent link frame; ``axis`` is
    expressed in the joint frame.  ``position`` is the nominal value.
    """

    name: str
    kind: str
    parent: str | None
    child: str
    axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    origin: np.ndarray = field(default_factory=lambda: np.eye(4))
    limits: tuple = (-np.inf, np.inf)
    position: float = 0.0

    def __post_init__(self):
        if self.kind not in JOINT_KINDS:
            raise KinematicsError(f"joint {self.name!r}: unknown kind {self.kind!r}")
        self.axis = np.asarray(self.axis, float)
        n = np.linalg.norm(self.axis)
        if n == 0:
            raise KinematicsError(f"joint {self.name!r}: zero axis")
        self.axis = self.axis / n
        self.origin = np.asarray(self.origin, float)
        lo, hi = (float(v) for v in self.limits)
        if lo > hi:
            raise KinematicsError(f"joint {self.name!r}: lower limit above upper limit")
        self.limits = (lo, hi)

    @property
    def rotary(self) -> bool:
        return self.kind in ROTARY

    def motion(self, q):
        if self.rotary:
            return transform(rotation=axis_angle(self.axis, q))
        return transform(translation=self.axis * q)


@dataclass
class Link:
    name: str
    pose: np.ndarray = field(default_factory=lambda: np.eye(4))  # world pose of a root link


class KinematicModel:
    """Tree of links connected by single-DOF joints.

    Joints must be listed in topological order: a joint's parent link is
    either a root link (fixed in the world) or the child of an earlier joint.
    Each call of :func:`forward_kinematics` refreshes the cached world
    transforms of all links and the world axes/positions of all joints.
    """

    def __init__(self, links, joints):
        self.links = {l.name: l for l in links}
        if len(self.links) != len(links):
            raise KinematicsError("duplicate link names")
        self.joints = list(joints)
        names = [j.name for j in self.joints]
        if len(set(names)) != len(names):
            raise KinematicsError("duplicate joint names")
        self.joint_index = {n: i for i, n in enumerate(names)}
        self.parent_joint: dict[str, int] = {}
        known = {n for n in self.links if not any(j.child == n for j in self.joints)}
        for i, j in enumerate(self.joints):
            if j.child not in self.links:
                raise KinematicsError(f"joint {j.name!r}: unknown child link {j.child!r}")
            if j.parent is not None and j.parent not in known:
                raise KinematicsError(
                    f"joint {j.name!r}: parent link {j.parent!r} unknown or listed after its joint")
            if j.child in self.parent_joint:
                raise KinematicsError(f"link {j.child!r} has two parent joints")
            self.parent_joint[j.child] = i
            known.add(j.child)
        self.ancestors: dict[str, np.ndarray] = {}
        for name in self.links:
            chain, cur = [], name
            while cur in self.parent_joint:
                i = self.parent_joint[cur]
                chain.append(i)
                cur = self.joints[i].parent
            self.ancestors[name] = np.array(sorted(chain), dtype=int)
        self.rotary = np.array([j.rotary for j in self.joints], dtype=bool)
        self.lower = np.array([j.limits[0] for j in self.joints])
        self.upper = np.array([j.limits[1] for j in self.joints])
        self.theta = np.array([j.position for j in self.joints], dtype=float)
        self.world: dict[str, np.ndarray] = {}
        self.joint_axes = np.zeros((len(self.joints), 3))
        self.joint_positions = np.zeros((len(self.joints), 3))
        forward_kinematics(self, self.theta)

    @property
    def dof(self) -> int:
        return len(self.joints)

    @property
    def nominal(self):
        return np.array([j.position for j in self.joints], dtype=float)

    def clone(self) -> "KinematicModel":
        """Independent FK state sharing the immutable structure."""
        new = copy.copy(self)
        new.theta = self.theta.copy()
        new.world = {k: v.copy() for k, v in self.world.items()}
        new.joint_axes = self.joint_axes.copy()
        new.joint_positions = self.joint_positions.copy()
        return new

    def link_pose(self, link):
        try:
            return self.world[link]
        except KeyError:
            raise KinematicsError(f"link {link!r} not in model") from None


def forward_kinematics(model: KinematicModel, theta):
    """Update all link world transforms for joint vector ``theta``."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (model.dof,):
        raise KinematicsError(f"expected {model.dof} joint values, got shape {theta.shape}")
    model.theta = theta.copy()
    world = {n: l.pose for n, l in model.links.items() if n not in model.parent_joint}
    for i, j in enumerate(model.joints):
        parent = np.eye(4) if j.parent is None else world[j.parent]
        frame = parent @ j.origin
        model.joint_axes[i] = frame[:3, :3] @ j.axis
        model.joint_positions[i] = frame[:3, 3]
        world[j.child] = frame @ j.motion(theta[i])
    model.world = world
    return world


def point_jacobian(model: KinematicModel, link, p):
    """3 x M Jacobian of a world point rigidly attached to ``link``."""
    if link is None:
        return np.zeros((3, model.dof))
    if link not in model.ancestors:
        raise KinematicsError(f"link {link!r} not in model")
    J = np.zeros((3, model.dof))
    idx = model.ancestors[link]
    if len(idx):
        rot = model.rotary[idx]
        a = model.joint_axes[idx]
        cols = np.where(rot[:, None], np.cross(a, np.asarray(p) - model.joint_positions[idx]), a)
        J[:, idx] = cols.T
    return J


def direction_jacobian(model: KinematicModel, link, xi):
    """3 x M Jacobian of a world direction rigidly attached to ``link``."""
    if link is None:
        return np.zeros((3, model.dof))
    if link not in model.ancestors:
        raise KinematicsError(f"link {link!r} not in model")
    J = np.zeros((3, model.dof))
    idx = model.ancestors[link]
    idx = idx[model.rotary[idx]]
    if len(idx):
        J[:, idx] = np.cross(model.joint_axes[idx], np.asarray(xi)).T
    return J


def virtual_base_joints(child, prefix="base", parent=None):
    """Three linear then three rotational (x, y, z) virtual joints.

    Returns ``(links, joints)``; the intermediate links are massless helpers
    and the last joint moves ``child``.
    """
    axes = np.eye(3)
    kinds = ["linear-virtual"] * 3 + ["rotational-virtual"] * 3
    tags = ["x", "y", "z", "rx", "ry", "rz"]
    links, joints = [], []
    prev = parent
    for k, (kind, tag) in enumerate(zip(kinds, tags)):
        link = child if k == 5 else f"{prefix}_{tag}_link"
        if k < 5:
            links.append(Link(link))
        joints.append(Joint(f"{prefix}_{tag}", kind, prev, link, axis=axes[k % 3]))
        prev = link
    return links, joints


def virtual_base_values(T):
    """Virtual joint values reproducing the rigid transform ``T``."""
    T = np.asarray(T, float)
    angles = Rotation.from_matrix(T[:3, :3]).as_euler("XYZ")
    return np.concatenate([T[:3, 3], angles])


def angular_jacobian(model: KinematicModel, link):
    """3 x M map from joint rates to the world angular velocity of ``link``."""
    if link is None:
        return np.zeros((3, model.dof))
    if link not in model.ancestors:
        raise KinematicsError(f"link {link!r} not in model")
    J = np.zeros((3, model.dof))
    idx = model.ancestors[link]
    idx = idx[model.rotary[idx]]
    J[:, idx] = model.joint_axes[idx].T
    return J
