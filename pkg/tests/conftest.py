import sys

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from bodycontact.kinematics import Joint, KinematicModel, Link, forward_kinematics


def origin(xyz=(0.0, 0.0, 0.0), rotvec=(0.0, 0.0, 0.0)):
    T = np.eye(4)
    T[:3, :3] = Rotation.from_rotvec(rotvec).as_matrix()
    T[:3, 3] = xyz
    return T


def seven_dof_chain():
    """Serial chain with mixed axes, tilted joint frames and one prismatic joint."""
    links = [Link("base")] + [Link(f"l{i}") for i in range(1, 8)]
    spec = [
        ("revolute", (0, 0, 1), origin((0, 0, 0.1))),
        ("revolute", (0, 1, 0), origin((0, 0, 0.3), (0.1, 0, 0))),
        ("revolute", (1, 0, 0), origin((0.05, 0, 0.2))),
        ("prismatic", (0, 0, 1), origin((0, 0.02, 0.1))),
        ("revolute", (0, 1, 1), origin((0, 0, 0.25), (0, 0.2, 0))),
        ("revolute", (0, 1, 0), origin((0, 0, 0.2))),
        ("revolute", (1, 0, 0), origin((0.03, 0, 0.1), (0, 0, 0.3))),
    ]
    joints = [Joint(f"j{i + 1}", kind, links[i].name, links[i + 1].name, axis=np.array(axis, float),
                    origin=T, limits=(-3.0, 3.0))
              for i, (kind, axis, T) in enumerate(spec)]
    return KinematicModel(links, joints)


def chain_pose_oracle(model, theta, link):
    """Compose per-joint transforms directly (independent of the library FK)."""
    idx = model.joint_index
    path = []
    cur = link
    while cur in model.parent_joint:
        j = model.joints[model.parent_joint[cur]]
        path.append(j)
        cur = j.parent
    T = model.links[cur].pose.copy()
    for j in reversed(path):
        q = theta[idx[j.name]]
        M = np.eye(4)
        if j.kind in ("revolute", "rotational-virtual"):
            M[:3, :3] = Rotation.from_rotvec(j.axis * q).as_matrix()
        else:
            M[:3, 3] = j.axis * q
        T = T @ j.origin @ M
    return T


def fd(fun, x, h=1e-6):
    """Central-difference Jacobian of ``fun`` at ``x``."""
    x = np.asarray(x, float)
    f0 = np.asarray(fun(x))
    J = np.zeros((f0.size, x.size))
    for i in range(x.size):
        d = np.zeros_like(x)
        d[i] = h
        J[:, i] = (np.asarray(fun(x + d)) - np.asarray(fun(x - d))).ravel() / (2 * h)
    return J


@pytest.fixture
def chain():
    return seven_dof_chain()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def set_theta(model, theta):
    forward_kinematics(model, theta)
    return model


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
