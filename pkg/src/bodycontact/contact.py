"""Contact points that move on body surfaces.

A contact point is never given global surface coordinates.  At every
iterate it carries a tangent frame (built from the smoothed normal); the
optimiser picks a 2-vector ``u`` in that tangent plane, the tangent-plane
point is projected back onto the body, and the result becomes the origin of
the next linearisation.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .geometry import ConvexBody, SurfacePoint, TangentFrame, project_point, tangent_frame


@dataclass(frozen=True)
class ContactConfiguration:
    """Per-contact parameters.

    ``epsilon`` defaults to ``u_lim / 10``.  ``init`` selects the first
    contact point: ``"target"`` (closest to the opposite side), ``"origin"``
    (closest to the world origin) or an explicit world point.
    """

    u_lim: float = 0.02
    epsilon: float | None = None
    R: float = 0.03
    smoothing: bool = True
    init: object = "target"

    def __post_init__(self):
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", self.u_lim / 10.0)
        if not self.u_lim > 0:
            raise ValueError(f"u_lim must be positive, got {self.u_lim}")
        if not 0 < self.epsilon <= self.u_lim:
            raise ValueError(f"epsilon must lie in (0, u_lim], got {self.epsilon}")
        if not self.R > 0:
            raise ValueError(f"smoothing range R must be positive, got {self.R}")
        if not (self.init in ("target", "origin") or np.shape(self.init) == (3,)):
            raise ValueError(f"init must be 'target', 'origin' or a 3-vector, got {self.init!r}")


@dataclass(frozen=True)
class ContactPointState:
    surface_point: SurfacePoint
    frame: TangentFrame
    params: ContactConfiguration

    @property
    def body(self) -> ConvexBody:
        return self.surface_point.body

    @property
    def position(self):
        return self.surface_point.position

    @property
    def normal(self):
        return self.frame.xi


def make_state(sp: SurfacePoint, params: ContactConfiguration) -> ContactPointState:
    return ContactPointState(sp, tangent_frame(sp, params.R, params.smoothing), params)


def initial_state(body: ConvexBody, params: ContactConfiguration, target=None) -> ContactPointState:
    """First contact point according to ``params.init``."""
    if isinstance(params.init, str):
        if params.init == "target" and target is not None:
            anchor = target
        else:
            anchor = np.zeros(3)
    else:
        anchor = np.asarray(params.init, float)
    return make_state(project_point(anchor, body), params)


def rebase(state: ContactPointState, body: ConvexBody) -> ContactPointState:
    """Carry the contact along with its body to a new pose."""
    return make_state(state.surface_point.on(body), state.params)


def tangent_step(state: ContactPointState, u):
    """Point ``p + u1 zeta + u2 eta`` on the current tangent plane."""
    f = state.frame
    return state.position + u[0] * f.zeta + u[1] * f.eta


def contact_update(state: ContactPointState, u) -> ContactPointState:
    """Step on the tangent plane, then project back onto the body."""
    return make_state(project_point(tangent_step(state, u), state.body), state.params)


def contact_position_jacobian(state: ContactPointState):
    return np.column_stack([state.frame.zeta, state.frame.eta])


def contact_normal_jacobian(state: ContactPointState):
    """Central differences of the smoothed normal under projected +-epsilon steps."""
    eps = state.params.epsilon
    J = np.zeros((3, 2))
    for i in range(2):
        du = np.zeros(2)
        du[i] = eps
        plus = contact_update(state, du).normal
        minus = contact_update(state, -du).normal
        J[:, i] = (plus - minus) / (2.0 * eps)
    return J


def pn_task_u_jacobian(state: ContactPointState, xi_other, w_nrm, side=1):
    """4 x 2 Jacobian of the position-and-normal residual with respect to ``u``.

    For ``side=2`` the position rows change sign because the residual is
    ``p1 - p2``.
    """
    sign = 1.0 if side == 1 else -1.0
    J = np.empty((4, 2))
    J[:3] = sign * contact_position_jacobian(state)
    J[3] = w_nrm * (np.asarray(xi_other) @ contact_normal_jacobian(state))
    return J


def with_params(state: ContactPointState, **changes) -> ContactPointState:
    return make_state(state.surface_point, replace(state.params, **changes))
