"""Scene description files.

A scene is one YAML document::

    schema_version: 1
    name: surface-search-box
    T: 1
    bodies:
      - {name: box, shape: box, size: [2.0, 1.0, 1.0]}
    model: {links: [], joints: [], virtual_bases: []}
    tasks:
      - name: touch
        kind: pn
        side1: {body: box, optimize: true, contact: {u_lim: 0.02, R: 0.1}}
        side2: {point: [0.8, 0.0, 0.5], normal: [0.0, 0.0, -1.0]}
    collisions: []
    options: {max_iters: 200}

Units are meters and radians.  Angular fields (``rpy``, joint ``limits`` and
``position`` of rotary joints) may instead be given in degrees with a
``_deg`` suffix.  Every error names the offending line and field.
:func:`serialize` writes the fully defaulted description back out.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace

import numpy as np
import yaml

from . import geometry as G
from .contact import ContactConfiguration
from .kinematics import JOINT_KINDS, ROTARY, Joint, KinematicModel, Link, virtual_base_joints
from .optimizer import CollisionPair, Options
from .tasks import TASK_KINDS, BodyBinding, Problem, Side, TaskError, TaskSpec
from .transforms import rpy_matrix, transform

SCHEMA_VERSION = 1

SHAPES = {
    # shape: ordered (parameter, default) pairs; None means required
    "box": (("size", (1.0, 1.0, 1.0)),),
    "tetrahedron": (("circumradius", 1.0),),
    "prism": (("side", 0.1), ("length", 0.1)),
    "cylinder": (("radius", 0.05), ("height", 0.1), ("segments", 12)),
    "hemisphere": (("radius", 0.05), ("rings", 4), ("segments", 12)),
    "random": (("n", 50), ("radii", (1.0, 1.0, 1.0)), ("seed", 0)),
    "mesh": (("file", None),),
    "vertices": (("points", None),),
    "plane": (),
}


class SceneError(ValueError):
    pass


# ---------------------------------------------------------------------------
# line-aware YAML loading

class _Map(dict):
    line = 0
    key_lines: dict = {}


class _Loader(yaml.SafeLoader):
    pass


def _construct_map(loader, node):
    loader.flatten_mapping(node)
    m = _Map()
    m.line = node.start_mark.line + 1
    m.key_lines = {}
    for k_node, v_node in node.value:
        key = loader.construct_object(k_node, deep=True)
        if key in m:
            raise SceneError(f"line {k_node.start_mark.line + 1}: duplicate field {key!r}")
        m[key] = loader.construct_object(v_node, deep=True)
        m.key_lines[key] = k_node.start_mark.line + 1
    return m


_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_map)

_REQUIRED = object()


class _Reader:
    """Field access on one mapping that remembers what has been consumed."""

    def __init__(self, data, path, line=0):
        if not isinstance(data, dict):
            raise SceneError(f"line {line}: {path} must be a mapping")
        self.data, self.path = data, path
        self.line = getattr(data, "line", line)
        self.used = set()

    def loc(self, key=None):
        line = getattr(self.data, "key_lines", {}).get(key, self.line)
        name = self.path if key is None else f"{self.path}.{key}" if self.path else key
        return f"line {line}: field {name!r}"

    def fail(self, key, msg):
        raise SceneError(f"{self.loc(key)}: {msg}")

    def has(self, key):
        return key in self.data

    def get(self, key, conv=None, default=_REQUIRED):
        if key not in self.data:
            if default is _REQUIRED:
                self.fail(key, "is required")
            return default
        self.used.add(key)
        value = self.data[key]
        if conv is None:
            return value
        try:
            return conv(value)
        except (TypeError, ValueError) as exc:
            self.fail(key, str(exc))

    def angle(self, key, default=_REQUIRED, conv=None, rotary=True):
        """``key`` in radians or ``key_deg`` in degrees."""
        conv = conv or _float
        dkey = f"{key}_deg"
        if key in self.data and dkey in self.data:
            self.fail(dkey, f"give either {key!r} or {dkey!r}, not both")
        if dkey in self.data:
            if not rotary:
                self.fail(dkey, "degrees only apply to rotary quantities")
            value = self.get(dkey, conv)
            return _scale(value, np.pi / 180.0)
        return self.get(key, conv, default)

    def sub(self, key, default=None):
        if key not in self.data:
            return None if default is None else _Reader(default, self._child(key), self.line)
        self.used.add(key)
        return _Reader(self.data[key], self._child(key), getattr(self.data, "key_lines", {}).get(key, self.line))

    def items(self, key):
        if key not in self.data or self.data[key] is None:
            self.used.add(key)
            return []
        self.used.add(key)
        value = self.data[key]
        if not isinstance(value, list):
            self.fail(key, "must be a list")
        line = getattr(self.data, "key_lines", {}).get(key, self.line)
        return [_Reader(v, f"{self._child(key)}[{i}]", line) for i, v in enumerate(value)]

    def _child(self, key):
        return f"{self.path}.{key}" if self.path else key

    def finish(self):
        unknown = [k for k in self.data if k not in self.used]
        if unknown:
            self.fail(unknown[0], "unknown field")


def _scale(value, s):
    if isinstance(value, tuple):
        return tuple(v * s for v in value)
    return value * s


def _float(v):
    if isinstance(v, bool):
        raise ValueError("expected a number")
    return float(v)


def _positive(v):
    v = _float(v)
    if not v > 0:
        raise ValueError(f"must be positive, got {v}")
    return v


def _nonneg(v):
    v = _float(v)
    if v < 0:
        raise ValueError(f"must be non-negative, got {v}")
    return v


def _int(v):
    if isinstance(v, bool) or int(v) != v:
        raise ValueError(f"expected an integer, got {v!r}")
    return int(v)


def _bool(v):
    if not isinstance(v, bool):
        raise ValueError(f"expected true or false, got {v!r}")
    return v


def _str(v):
    if not isinstance(v, str) or not v:
        raise ValueError(f"expected a non-empty string, got {v!r}")
    return v


def _opt_str(v):
    return None if v is None else _str(v)


def _vec(n, conv=_float):
    def f(v):
        if not isinstance(v, (list, tuple)) or len(v) != n:
            raise ValueError(f"expected a list of {n} numbers, got {v!r}")
        return tuple(conv(x) for x in v)
    return f


def _unit(v):
    x = np.array(_vec(3)(v))
    n = np.linalg.norm(x)
    if n < 1e-12:
        raise ValueError("direction must be non-zero")
    if abs(n - 1.0) > 1e-12:  # keep unit input bit-exact so round trips are stable
        x = x / n
    return tuple(float(c) for c in x)


def _pair_range(v):
    lo, hi = _vec(2)(v)
    if lo > hi:
        raise ValueError(f"lower bound {lo} above upper bound {hi}")
    return lo, hi


# ---------------------------------------------------------------------------
# description types

@dataclass
class PoseDesc:
    position: tuple = (0.0, 0.0, 0.0)
    rpy: tuple = (0.0, 0.0, 0.0)

    def matrix(self):
        return transform(rpy_matrix(self.rpy), self.position)


@dataclass
class BodyDesc:
    name: str
    shape: str
    params: dict
    pose: PoseDesc = field(default_factory=PoseDesc)
    link: str | None = None


@dataclass
class LinkDesc:
    name: str
    pose: PoseDesc = field(default_factory=PoseDesc)


@dataclass
class JointDesc:
    name: str
    kind: str
    parent: str | None
    child: str
    axis: tuple = (0.0, 0.0, 1.0)
    origin: PoseDesc = field(default_factory=PoseDesc)
    limits: tuple = (-np.inf, np.inf)
    position: float = 0.0


@dataclass
class VirtualBaseDesc:
    child: str
    prefix: str = "base"
    parent: str | None = None


@dataclass
class SceneDescription:
    name: str
    T: int
    bodies: list
    links: list
    joints: list
    virtual_bases: list
    tasks: list
    collisions: list
    options: Options
    description: str = ""
    schema_version: int = SCHEMA_VERSION

    @property
    def n_contacts(self):
        return sum(1 for t in self.tasks if t.kind == "pn")

    def joint_names(self):
        names = []
        for vb in self.virtual_bases:
            names += [f"{vb.prefix}_{tag}" for tag in ("x", "y", "z", "rx", "ry", "rz")]
        return names + [j.name for j in self.joints]


# ---------------------------------------------------------------------------
# parsing

def _pose(r: _Reader | None) -> PoseDesc:
    if r is None:
        return PoseDesc()
    p = PoseDesc(r.get("position", _vec(3), (0.0, 0.0, 0.0)),
                 r.angle("rpy", (0.0, 0.0, 0.0), _vec(3)))
    r.finish()
    return p


def _body(r: _Reader) -> BodyDesc:
    name = r.get("name", _str)
    shape = r.get("shape", _str)
    if shape not in SHAPES:
        r.fail("shape", f"unknown shape {shape!r}; expected one of {sorted(SHAPES)}")
    params = {}
    for key, default in SHAPES[shape]:
        conv = {
            "size": _vec(3, _positive), "radii": _vec(3, _positive), "file": _str,
            "segments": _int, "rings": _int, "n": _int, "seed": _int,
            "points": lambda v: tuple(_vec(3)(p) for p in v),
        }.get(key, _positive)
        params[key] = r.get(key, conv, default)
    if shape in ("cylinder", "hemisphere") and params["segments"] < 3:
        r.fail("segments", "needs at least 3 segments")
    if shape == "hemisphere" and params["rings"] < 1:
        r.fail("rings", "needs at least 1 ring")
    if shape == "random" and params["n"] < 4:
        r.fail("n", "needs at least 4 points")
    if shape == "vertices" and len(params["points"]) < 4:
        r.fail("points", "needs at least 4 points")
    b = BodyDesc(name, shape, params, _pose(r.sub("pose")), r.get("link", _opt_str, None))
    r.finish()
    return b


def _joint(r: _Reader) -> JointDesc:
    name = r.get("name", _str)
    kind = r.get("kind", _str)
    if kind not in JOINT_KINDS:
        r.fail("kind", f"unknown joint kind {kind!r}; expected one of {list(JOINT_KINDS)}")
    rot = kind in ROTARY
    j = JointDesc(
        name, kind, r.get("parent", _opt_str, None), r.get("child", _str),
        r.get("axis", _unit, (0.0, 0.0, 1.0)), _pose(r.sub("origin")),
        r.angle("limits", (-np.inf, np.inf), _pair_range, rotary=rot),
        r.angle("position", 0.0, rotary=rot))
    if not j.limits[0] <= j.position <= j.limits[1]:
        r.fail("position", f"nominal value {j.position} outside limits {j.limits}")
    r.finish()
    return j


def _contact(r: _Reader | None):
    if r is None:
        return None
    init = r.get("init", None, "target")
    if not (init in ("target", "origin")):
        try:
            init = _vec(3)(init)
        except ValueError as exc:
            r.fail("init", f"expected 'target', 'origin' or a point: {exc}")
    kw = dict(u_lim=r.get("u_lim", _positive, 0.02), epsilon=r.get("epsilon", _positive, None),
              R=r.get("R", _positive, 0.03), smoothing=r.get("smoothing", _bool, True), init=init)
    try:
        c = ContactConfiguration(**kw)
    except ValueError as exc:
        raise SceneError(f"{r.loc()}: {exc}") from None
    r.finish()
    return c


def _side(r: _Reader) -> Side:
    s = Side(body=r.get("body", _opt_str, None), link=r.get("link", _opt_str, None),
             point=r.get("point", _vec(3), (0.0, 0.0, 0.0)),
             normal=r.get("normal", lambda v: None if v is None else _unit(v), None),
             rpy=r.angle("rpy", (0.0, 0.0, 0.0), _vec(3)),
             optimize=r.get("optimize", _bool, False), contact=_contact(r.sub("contact")),
             region=r.get("region", lambda v: None if v is None else tuple(_int(x) for x in v), None))
    if s.body is not None and s.link is not None:
        r.fail("link", "a side names either a body or a link, not both")
    if s.optimize and s.contact is None:
        s = replace(s, contact=ContactConfiguration())
    if not s.optimize and s.contact is not None:
        r.fail("contact", "contact parameters only apply to optimised sides")
    r.finish()
    return s


def _task(r: _Reader, T) -> TaskSpec:
    name = r.get("name", _str)
    kind = r.get("kind", _str)
    if kind not in TASK_KINDS:
        r.fail("kind", f"unknown task kind {kind!r}; expected one of {list(TASK_KINDS)}")
    weight = r.get("weight", _positive, 1.0)
    if kind == "equal":
        times = r.get("times", _vec(2, _int))
        for t in times:
            if not 1 <= t <= T:
                r.fail("times", f"time index {t} outside 1..{T}")
        joints = r.get("joints", lambda v: tuple(_str(x) for x in v))
        task = TaskSpec(name, kind, weight=weight, joints=joints, times=times)
    else:
        time = r.get("time", _int, 1)
        if not 1 <= time <= T:
            r.fail("time", f"time index {time} outside 1..{T}")
        w_nrm = r.get("w_nrm", _positive, 1.0) if kind == "pn" else 1.0
        task = TaskSpec(name, kind, time, _side(r.sub("side1", {})), _side(r.sub("side2", {})),
                        w_nrm=w_nrm, weight=weight)
    r.finish()
    return task


def _options(r: _Reader | None) -> Options:
    if r is None:
        return Options()
    d = Options()
    kw = dict(mode=r.get("mode", _str, d.mode), max_iters=r.get("max_iters", _int, d.max_iters),
              tol_pos=r.get("tol_pos", _positive, d.tol_pos),
              tol_nrm_deg=r.get("tol_nrm_deg", _positive, d.tol_nrm_deg),
              tol_eq=r.get("tol_eq", _positive, d.tol_eq),
              tol_task=r.get("tol_task", _nonneg, d.tol_task),
              damping=r.get("damping", lambda v: None if v is None else _nonneg(v), d.damping),
              step_clip=r.get("step_clip", _positive, d.step_clip))
    try:
        o = Options(**kw)
    except ValueError as exc:
        raise SceneError(f"{r.loc()}: {exc}") from None
    r.finish()
    return o


def _check_refs(desc: SceneDescription, readers):
    """Cross-reference checks with the location of the offending entry."""
    bodies = {}
    for b, rb in zip(desc.bodies, readers["bodies"]):
        if b.name in bodies:
            rb.fail("name", f"duplicate body name {b.name!r}")
        bodies[b.name] = b
    links = {}
    for l, rl in zip(desc.links, readers["links"]):
        if l.name in links:
            rl.fail("name", f"duplicate link name {l.name!r}")
        links[l.name] = l
    for vb, rv in zip(desc.virtual_bases, readers["virtual_bases"]):
        for n in (f"{vb.prefix}_{t}_link" for t in ("x", "y", "z", "rx", "ry")):
            links[n] = None
        if vb.child not in links:
            rv.fail("child", f"unknown link {vb.child!r}")
        if vb.parent is not None and vb.parent not in links:
            rv.fail("parent", f"unknown link {vb.parent!r}")
    for j, rj in zip(desc.joints, readers["joints"]):
        for key in ("parent", "child"):
            n = getattr(j, key)
            if n is not None and n not in links:
                rj.fail(key, f"unknown link {n!r}")
    joints = desc.joint_names()
    if len(set(joints)) != len(joints):
        raise SceneError("duplicate joint names (virtual bases expand to <prefix>_x ... <prefix>_rz)")
    for b, rb in zip(desc.bodies, readers["bodies"]):
        if b.link is not None and b.link not in links:
            rb.fail("link", f"unknown link {b.link!r}")
    names = set()
    for t, rt in zip(desc.tasks, readers["tasks"]):
        if t.name in names:
            rt.fail("name", f"duplicate task name {t.name!r}")
        names.add(t.name)
        if t.kind == "equal":
            for jn in t.joints:
                if jn not in joints:
                    rt.fail("joints", f"unknown joint {jn!r}")
            continue
        for key in ("side1", "side2"):
            side = getattr(t, key)
            where = f"{key}"
            if side.body is not None and side.body not in bodies:
                rt.fail(where, f"unknown body {side.body!r}")
            if side.link is not None and side.link not in links:
                rt.fail(where, f"unknown link {side.link!r}")
            if side.optimize:
                if t.kind != "pn":
                    rt.fail(where, "only pn tasks may optimise a contact point")
                if side.body is None:
                    rt.fail(where, "an optimised contact needs a body")
            elif t.kind == "pn" and side.normal is None:
                rt.fail(where, "a fixed pn side needs a normal")
            if side.region is not None:
                if side.body is None:
                    rt.fail(where, "a region needs a body")
        if t.kind == "pn" and t.side1.body is not None and t.side1.body == t.side2.body:
            rt.fail("side2", f"a contact pair needs two distinct bodies, both are {t.side1.body!r}")
    for c, rc in zip(desc.collisions, readers["collisions"]):
        for n in c.bodies:
            if n not in bodies:
                rc.fail("bodies", f"unknown body {n!r}")
        if c.bodies[0] == c.bodies[1]:
            rc.fail("bodies", "a collision pair needs two distinct bodies")


def parse_scene(text) -> SceneDescription:
    """Parse and validate a scene document; raises :class:`SceneError`."""
    try:
        data = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}: " if mark is not None else ""
        raise SceneError(f"{where}malformed scene document: {getattr(exc, 'problem', exc)}") from None
    if data is None:
        raise SceneError("line 1: empty scene document")
    r = _Reader(data, "", 1)
    version = r.get("schema_version", _int)
    if version != SCHEMA_VERSION:
        r.fail("schema_version", f"unsupported schema version {version}; expected {SCHEMA_VERSION}")
    name = r.get("name", _str, "scene")
    text_doc = r.get("description", str, "")
    T = r.get("T", _int, 1)
    if T < 1:
        r.fail("T", "must be at least 1")
    readers = {"bodies": r.items("bodies")}
    rm = r.sub("model", {})
    readers["links"] = rm.items("links")
    readers["joints"] = rm.items("joints")
    readers["virtual_bases"] = rm.items("virtual_bases")
    rm.finish()
    readers["tasks"] = r.items("tasks")
    readers["collisions"] = r.items("collisions")

    bodies = [_body(x) for x in readers["bodies"]]
    links = []
    for x in readers["links"]:
        links.append(LinkDesc(x.get("name", _str), _pose(x.sub("pose"))))
        x.finish()
    vbs = []
    for x in readers["virtual_bases"]:
        vbs.append(VirtualBaseDesc(x.get("child", _str), x.get("prefix", _str, "base"),
                                   x.get("parent", _opt_str, None)))
        x.finish()
    joints = [_joint(x) for x in readers["joints"]]
    tasks = [_task(x, T) for x in readers["tasks"]]
    if not tasks:
        r.fail("tasks", "a scene needs at least one task")
    collisions = []
    for x in readers["collisions"]:
        collisions.append(CollisionPair(x.get("bodies", _vec(2, _str)), x.get("margin", _nonneg, 0.0)))
        x.finish()
    options = _options(r.sub("options"))
    r.finish()
    desc = SceneDescription(name, T, bodies, links, joints, vbs, tasks, collisions, options,
                            text_doc, version)
    _check_refs(desc, readers)
    return desc


def load_scene(path) -> SceneDescription:
    with open(path) as fh:
        text = fh.read()
    try:
        return parse_scene(text)
    except SceneError as exc:
        raise SceneError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# serialization

def _num(x):
    x = float(x)
    if np.isinf(x):
        return ".inf" if x > 0 else "-.inf"
    return x


def _list(v):
    return [_num(x) for x in v]


def _pose_dict(p: PoseDesc):
    return {"position": _list(p.position), "rpy": _list(p.rpy)}


def _side_dict(s: Side):
    d = {"body": s.body, "link": s.link, "point": _list(s.point),
         "normal": None if s.normal is None else _list(s.normal), "rpy": _list(s.rpy),
         "optimize": s.optimize}
    if s.contact is not None:
        c = s.contact
        d["contact"] = {"u_lim": c.u_lim, "epsilon": c.epsilon, "R": c.R, "smoothing": c.smoothing,
                        "init": c.init if isinstance(c.init, str) else _list(c.init)}
    d["region"] = None if s.region is None else list(s.region)
    return d


def to_dict(desc: SceneDescription) -> dict:
    bodies = []
    for b in desc.bodies:
        d = {"name": b.name, "shape": b.shape}
        for k, v in b.params.items():
            if k == "points":
                d[k] = [_list(p) for p in v]
            elif isinstance(v, tuple):
                d[k] = _list(v)
            else:
                d[k] = v
        d["pose"] = _pose_dict(b.pose)
        d["link"] = b.link
        bodies.append(d)
    tasks = []
    for t in desc.tasks:
        if t.kind == "equal":
            tasks.append({"name": t.name, "kind": t.kind, "weight": t.weight,
                          "times": list(t.times), "joints": list(t.joints)})
        else:
            d = {"name": t.name, "kind": t.kind, "time": t.time, "weight": t.weight}
            if t.kind == "pn":
                d["w_nrm"] = t.w_nrm
            d["side1"] = _side_dict(t.side1)
            d["side2"] = _side_dict(t.side2)
            tasks.append(d)
    o = desc.options
    return {
        "schema_version": desc.schema_version,
        "name": desc.name,
        "description": desc.description,
        "T": desc.T,
        "bodies": bodies,
        "model": {
            "links": [{"name": l.name, "pose": _pose_dict(l.pose)} for l in desc.links],
            "virtual_bases": [{"child": v.child, "prefix": v.prefix, "parent": v.parent}
                              for v in desc.virtual_bases],
            "joints": [{"name": j.name, "kind": j.kind, "parent": j.parent, "child": j.child,
                        "axis": _list(j.axis), "origin": _pose_dict(j.origin),
                        "limits": _list(j.limits), "position": j.position}
                       for j in desc.joints],
        },
        "tasks": tasks,
        "collisions": [{"bodies": list(c.bodies), "margin": c.margin} for c in desc.collisions],
        "options": {f.name: getattr(o, f.name) for f in fields(o)},
    }


class _Dumper(yaml.SafeDumper):
    pass


def _represent_str(dumper, s):
    if s in (".inf", "-.inf"):
        return dumper.represent_scalar("tag:yaml.org,2002:float", s)
    return dumper.represent_str(s)


_Dumper.add_representer(str, _represent_str)


def serialize(desc: SceneDescription) -> str:
    """Fully defaulted YAML text; ``parse_scene(serialize(d)) == d``."""
    return yaml.dump(to_dict(desc), Dumper=_Dumper, sort_keys=False, default_flow_style=None)


# ---------------------------------------------------------------------------
# building

def build_body(b: BodyDesc, base_dir=None) -> G.ConvexBody:
    p = b.params
    if b.shape == "box":
        return G.box(p["size"], name=b.name)
    if b.shape == "tetrahedron":
        return G.tetrahedron(p["circumradius"], name=b.name)
    if b.shape == "prism":
        return G.triangular_prism(p["side"], p["length"], name=b.name)
    if b.shape == "cylinder":
        return G.cylinder(p["radius"], p["height"], p["segments"], name=b.name)
    if b.shape == "hemisphere":
        return G.hemisphere(p["radius"], p["rings"], p["segments"], name=b.name)
    if b.shape == "random":
        return G.random_convex(p["n"], p["radii"], p["seed"], name=b.name)
    if b.shape == "mesh":
        path = p["file"]
        if base_dir is not None and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        return G.load_mesh_body(path, name=b.name)
    if b.shape == "vertices":
        return G.build_convex_body(np.array(p["points"]), name=b.name)
    return G.plane_body(name=b.name)


def build_model(desc: SceneDescription) -> KinematicModel:
    links = [Link(l.name, l.pose.matrix()) for l in desc.links]
    joints = []
    for vb in desc.virtual_bases:
        l, j = virtual_base_joints(vb.child, vb.prefix, vb.parent)
        links += l
        joints += j
    for j in desc.joints:
        joints.append(Joint(j.name, j.kind, j.parent, j.child, np.array(j.axis), j.origin.matrix(),
                            j.limits, j.position))
    return KinematicModel(links, joints)


def build_problem(desc: SceneDescription, base_dir=None):
    """``(Problem, Options)`` ready for :func:`bodycontact.optimizer.run`."""
    try:
        model = build_model(desc)
        bodies = {b.name: BodyBinding(build_body(b, base_dir), b.link, b.pose.matrix())
                  for b in desc.bodies}
        problem = Problem(bodies, model, list(desc.tasks), desc.T, list(desc.collisions))
        problem.validate()
    except (G.GeometryError, TaskError, ValueError, OSError) as exc:
        raise SceneError(f"scene {desc.name!r}: {exc}") from None
    return problem, desc.options


def load_problem(path):
    desc = load_scene(path)
    problem, options = build_problem(desc, os.path.dirname(os.path.abspath(path)))
    return desc, problem, options
