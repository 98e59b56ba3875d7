"""Convex bodies and surface queries.

A :class:`ConvexBody` stores its geometry in a local frame together with a
pose (local to world).  Every query takes and returns world coordinates;
internally points are mapped to the local frame, where the precomputed face
and edge tables live.

Faces are polygons (coplanar hull triangles are merged), wound
counter-clockwise when seen from outside.  Two faces are adjacent when they
share an edge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial import ConvexHull

TOL = 1e-7
COPLANAR_ANGLE = 1e-6
_TIE = 1e-10


class GeometryError(ValueError):
    """Raised for degenerate or inconsistent geometric input."""


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """Convex polyhedron (or half-space plane) with a rigid pose.

    Attributes
    ----------
    vertices : array, shape (n, 3)
        Vertex positions in the local frame.
    faces : tuple of tuples
        Vertex-index loops, counter-clockwise seen from outside.
    face_normals : array, shape (F, 3)
        Outward unit normals in the local frame.
    face_offsets : array, shape (F,)
        Plane offsets, ``normal . x = offset`` on each face.
    adjacency : tuple of frozensets
        Edge-adjacent faces for every face.
    pose : array, shape (4, 4)
        Local to world transform.
    kind : {"polyhedron", "plane"}
    allowed : frozenset or None
        Optional subset of faces that projection may land on.
    """

    vertices: np.ndarray
    faces: tuple
    face_normals: np.ndarray
    face_offsets: np.ndarray
    adjacency: tuple
    pose: np.ndarray = field(default_factory=lambda: np.eye(4))
    kind: str = "polyhedron"
    allowed: frozenset | None = None
    name: str = ""
    _t: dict = field(default=None, repr=False)

    def __post_init__(self):
        if self._t is None:
            object.__setattr__(self, "_t", _tables(self))

    # -- pose handling -------------------------------------------------
    @property
    def rotation(self):
        return self.pose[:3, :3]

    @property
    def translation(self):
        return self.pose[:3, 3]

    def to_local(self, p):
        return self.rotation.T @ (np.asarray(p, float) - self.translation)

    def to_world(self, x):
        return self.rotation @ x + self.translation

    def moved(self, pose) -> "ConvexBody":
        """Same geometry at another pose (tables are shared)."""
        return replace(self, pose=np.asarray(pose, float), _t=self._t)

    def restricted(self, faces) -> "ConvexBody":
        """Same body whose projection only lands on ``faces``."""
        faces = frozenset(int(f) for f in faces)
        if not faces or any(f < 0 or f >= self.n_faces for f in faces):
            raise GeometryError(f"invalid face subset {sorted(faces)}")
        return replace(self, allowed=faces, _t=self._t)

    # -- derived data ----------------------------------------------------
    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def edges(self) -> np.ndarray:
        """Unique undirected edges as vertex index pairs."""
        return self._t["edges"]

    def world_vertices(self):
        return self.vertices @ self.rotation.T + self.translation

    def world_normal(self, face):
        return self.rotation @ self.face_normals[face]

    def centroid(self):
        return self.vertices.mean(axis=0) if len(self.vertices) else np.zeros(3)

    def face_centroid(self, face):
        return self.vertices[list(self.faces[face])].mean(axis=0)


@dataclass(frozen=True, eq=False)
class SurfacePoint:
    body: ConvexBody = field(repr=False)
    position: np.ndarray
    face: int
    local: np.ndarray

    @classmethod
    def from_local(cls, body, local, face):
        local = np.asarray(local, float)
        return cls(body, body.to_world(local), int(face), local)

    def on(self, body: ConvexBody) -> "SurfacePoint":
        """The same material point expressed on ``body`` (e.g. after it moved)."""
        return SurfacePoint.from_local(body, self.local, self.face)


@dataclass(frozen=True)
class TangentFrame:
    zeta: np.ndarray
    eta: np.ndarray
    xi: np.ndarray

    def matrix(self):
        return np.column_stack([self.zeta, self.eta, self.xi])


def _tables(body):
    t = {}
    if body.kind == "plane":
        t["edges"] = np.zeros((0, 2), dtype=int)
        t["nbr"] = [np.zeros(0, dtype=int)]
        t["nbr_a"] = [np.zeros((0, 3))]
        t["nbr_b"] = [np.zeros((0, 3))]
        return t
    V = body.vertices
    ea, eb, ef, starts = [], [], [], []
    for f, loop in enumerate(body.faces):
        starts.append(len(ea))
        for i, a in enumerate(loop):
            ea.append(V[a])
            eb.append(V[loop[(i + 1) % len(loop)]])
            ef.append(f)
    ea, eb, ef = np.array(ea), np.array(eb), np.array(ef)
    inward = np.cross(body.face_normals[ef], eb - ea)
    inward /= np.linalg.norm(inward, axis=1)[:, None]
    t.update(ea=ea, eb=eb, ef=ef, starts=np.array(starts), inward=inward,
             seg=eb - ea, seg2=np.einsum("ij,ij->i", eb - ea, eb - ea))
    undirected = set()
    for loop in body.faces:
        for i, a in enumerate(loop):
            b = loop[(i + 1) % len(loop)]
            undirected.add((min(a, b), max(a, b)))
    t["edges"] = np.array(sorted(undirected), dtype=int).reshape(-1, 2)
    nbr, nbr_a, nbr_b = [], [], []
    for f, adj in enumerate(body.adjacency):
        ids = np.array(sorted(adj), dtype=int)
        pa, pb = [], []
        for g in ids:
            a, b = shared_edge(body, f, int(g))
            pa.append(V[a])
            pb.append(V[b])
        nbr.append(ids)
        nbr_a.append(np.array(pa).reshape(-1, 3))
        nbr_b.append(np.array(pb).reshape(-1, 3))
    t.update(nbr=nbr, nbr_a=nbr_a, nbr_b=nbr_b)
    return t


def shared_edge(body, f, g):
    """Vertex indices of the edge shared by faces ``f`` and ``g``."""
    common = [v for v in body.faces[f] if v in set(body.faces[g])]
    if len(common) < 2:
        raise GeometryError(f"faces {f} and {g} are not adjacent")
    # on a convex polygon the shared vertices are consecutive; keep the
    # two extreme ones in case collinear vertices survived
    pts = body.vertices[common]
    d = np.linalg.norm(pts[:, None] - pts[None], axis=2)
    i, j = np.unravel_index(np.argmax(d), d.shape)
    return common[i], common[j]


# ---------------------------------------------------------------------------
# construction

def _order_polygon(V, idx, normal):
    """Counter-clockwise convex loop of the points ``idx`` (collinear dropped)."""
    pts = V[idx]
    c = pts.mean(axis=0)
    a = np.cross(normal, [1.0, 0.0, 0.0])
    if np.linalg.norm(a) < 0.5:
        a = np.cross(normal, [0.0, 1.0, 0.0])
    a /= np.linalg.norm(a)
    b = np.cross(normal, a)
    xy = np.column_stack([(pts - c) @ a, (pts - c) @ b])
    order = sorted(range(len(idx)), key=lambda i: (xy[i, 0], xy[i, 1]))
    scale = max(np.ptp(xy[:, 0]), np.ptp(xy[:, 1]), 1e-300)

    def cross(o, p, q):
        return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])

    hull = []
    for seq in (order, order[::-1]):
        part = []
        for i in seq:
            while len(part) >= 2 and cross(xy[part[-2]], xy[part[-1]], xy[i]) <= 1e-12 * scale**2:
                part.pop()
            part.append(i)
        hull.extend(part[:-1])
    return [idx[i] for i in hull]


def _newell(V, loop):
    n = np.zeros(3)
    for i, a in enumerate(loop):
        p, q = V[a], V[loop[(i + 1) % len(loop)]]
        n += np.cross(p, q)
    return n / np.linalg.norm(n)


def build_convex_body(vertices, pose=None, name="") -> ConvexBody:
    """Convex hull of ``vertices`` with merged planar faces and adjacency.

    Raises
    ------
    GeometryError
        If fewer than four points are given or all points are coplanar.
    """
    pts = np.asarray(vertices, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise GeometryError("vertices must be an (n, 3) array")
    if len(pts) < 4:
        raise GeometryError(f"need at least 4 vertices for a polyhedron, got {len(pts)}")
    if not np.all(np.isfinite(pts)):
        raise GeometryError("vertices contain non-finite values")
    centered = pts - pts.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv[2] <= 1e-9 * max(sv[0], 1e-300):
        rank = int(np.sum(sv > 1e-9 * max(sv[0], 1e-300)))
        raise GeometryError(
            f"degenerate vertex set: points span a {rank}-dimensional subspace "
            "(coplanar or collinear), cannot form a polyhedron")
    hull = ConvexHull(pts)

    groups: list[list[int]] = []
    gnormals: list[np.ndarray] = []
    cos_tol = math.cos(COPLANAR_ANGLE)
    for s, eq in enumerate(hull.equations):
        n = eq[:3] / np.linalg.norm(eq[:3])
        for g, gn in enumerate(gnormals):
            if n @ gn > cos_tol:
                groups[g].append(s)
                break
        else:
            groups.append([s])
            gnormals.append(n)

    raw_faces = []
    for g, simplices in enumerate(groups):
        idx = sorted({int(v) for s in simplices for v in hull.simplices[s]})
        loop = _order_polygon(pts, idx, gnormals[g])
        if _newell(pts, loop) @ gnormals[g] < 0:
            loop = loop[::-1]
        raw_faces.append(loop)

    used = sorted({v for loop in raw_faces for v in loop}, key=lambda i: tuple(pts[i]))
    remap = {old: new for new, old in enumerate(used)}
    V = pts[used]
    faces = []
    for loop in raw_faces:
        loop = [remap[v] for v in loop]
        k = loop.index(min(loop))
        faces.append(tuple(loop[k:] + loop[:k]))
    normals = np.array([_newell(V, loop) for loop in faces])
    key = [tuple(-np.round(n, 9)) for n in normals]
    order = sorted(range(len(faces)), key=lambda i: key[i])
    faces = [faces[i] for i in order]
    normals = normals[order]
    offsets = np.array([normals[f] @ V[list(loop)].mean(axis=0) for f, loop in enumerate(faces)])

    vsets = [set(loop) for loop in faces]
    adjacency = tuple(
        frozenset(g for g in range(len(faces)) if g != f and len(vsets[f] & vsets[g]) >= 2)
        for f in range(len(faces)))
    return ConvexBody(V, tuple(faces), normals, offsets, adjacency,
                      pose=np.eye(4) if pose is None else np.asarray(pose, float), name=name)


def plane_body(pose=None, name="") -> ConvexBody:
    """Half-space ``z <= 0`` in its local frame; the surface normal is +z."""
    return ConvexBody(np.zeros((0, 3)), ((),), np.array([[0.0, 0.0, 1.0]]), np.zeros(1),
                      (frozenset(),), pose=np.eye(4) if pose is None else np.asarray(pose, float),
                      kind="plane", name=name)


def check_body(body: ConvexBody, tol=TOL):
    """Assert the structural invariants of ``body``; returns it for chaining."""
    if not np.allclose(np.linalg.norm(body.face_normals, axis=1), 1.0, atol=1e-9):
        raise GeometryError("face normals are not unit length")
    for f, adj in enumerate(body.adjacency):
        for g in adj:
            if f not in body.adjacency[g]:
                raise GeometryError(f"adjacency not symmetric between {f} and {g}")
    if body.kind == "plane":
        return body
    c = body.centroid()
    for f in range(body.n_faces):
        if body.face_normals[f] @ (body.face_centroid(f) - c) <= 0:
            raise GeometryError(f"face {f} normal points inward")
    excess = body.vertices @ body.face_normals.T - body.face_offsets
    if excess.max() > tol:
        raise GeometryError(f"vertex outside face half-space by {excess.max():.3g}")
    return body


# ---------------------------------------------------------------------------
# projection

def _project_local(body, x):
    """Closest surface point to local point ``x``: (point, face)."""
    if body.kind == "plane":
        return np.array([x[0], x[1], 0.0]), 0
    t = body._t
    N, c = body.face_normals, body.face_offsets
    d = N @ x - c
    q = x - d[:, None] * N
    s = np.einsum("ij,ij->i", t["inward"], q[t["ef"]] - t["ea"])
    inside = np.minimum.reduceat(s, t["starts"]) >= -1e-12
    tt = np.clip(((x - t["ea"]) * t["seg"]).sum(axis=1) / t["seg2"], 0.0, 1.0)
    closest = t["ea"] + tt[:, None] * t["seg"]
    segd = np.linalg.norm(closest - x, axis=1)
    dist = np.where(inside, np.abs(d), np.minimum.reduceat(segd, t["starts"]))
    if body.allowed is not None:
        mask = np.full(len(dist), np.inf)
        mask[list(body.allowed)] = 0.0
        dist = dist + mask
    best = dist.min()
    f = int(np.flatnonzero(dist <= best + _TIE * max(1.0, best))[0])
    if inside[f]:
        return q[f], f
    lo = t["starts"][f]
    hi = t["starts"][f + 1] if f + 1 < len(t["starts"]) else len(segd)
    e = lo + int(np.argmin(segd[lo:hi]))
    return closest[e], f


def project_point(p, body: ConvexBody) -> SurfacePoint:
    """Closest point on the surface of ``body`` to the world point ``p``.

    Every (allowed) face is tested; the smallest distance wins and ties on
    shared edges or vertices go to the lowest face index.  Points inside the
    body map to their nearest surface point.
    """
    x, f = _project_local(body, body.to_local(p))
    return SurfacePoint.from_local(body, x, f)


def _segment_distance(x, a, b):
    ab = b - a
    t = np.clip(np.einsum("ij,ij->i", x - a, ab) / np.einsum("ij,ij->i", ab, ab), 0.0, 1.0)
    return np.linalg.norm(a + t[:, None] * ab - x, axis=1)


def surface_distance(p: SurfacePoint, adj_face: int) -> float:
    """In-plane distance from ``p`` to the edge its face shares with ``adj_face``."""
    body = p.body
    if adj_face not in body.adjacency[p.face]:
        raise GeometryError(f"face {adj_face} is not adjacent to face {p.face}")
    a, b = shared_edge(body, p.face, adj_face)
    V = body.vertices
    return float(_segment_distance(p.local[None], V[a][None], V[b][None])[0])


def smoothing_weight(x, R):
    """C1 falloff from 1 at ``x = 0`` to 0 at ``x >= R``."""
    if x < 0:
        raise ValueError(f"distance must be non-negative, got {x}")
    if R <= 0:
        raise ValueError(f"smoothing range must be positive, got {R}")
    r = x / R
    if r <= 0.5:
        return -2.0 * r * r + 1.0
    if r <= 1.0:
        return 2.0 * (r - 1.0) ** 2
    return 0.0


def smoothing_weight_derivative(x, R):
    r = x / R
    if r <= 0.5:
        return -4.0 * r / R
    if r <= 1.0:
        return 4.0 * (r - 1.0) / R
    return 0.0


def _weights(r):
    return np.where(r <= 0.5, 1.0 - 2.0 * r * r, np.where(r <= 1.0, 2.0 * (r - 1.0) ** 2, 0.0))


def smoothed_normal(p: SurfacePoint, R, smoothing=True):
    """Unit normal at ``p`` averaged with nearby adjacent-face normals.

    Adjacent faces closer than ``R`` (measured on the surface to the shared
    edge) contribute with weight :func:`smoothing_weight`; the own face has
    weight one.  With ``smoothing=False`` the raw face normal is returned.
    """
    body = p.body
    own = body.face_normals[p.face]
    if not smoothing or body.kind == "plane":
        return body.rotation @ own
    if R <= 0:
        raise ValueError(f"smoothing range must be positive, got {R}")
    t = body._t
    ids = t["nbr"][p.face]
    if len(ids) == 0:
        return body.rotation @ own
    x = _segment_distance(p.local[None], t["nbr_a"][p.face], t["nbr_b"][p.face])
    w = _weights(x / R)
    n = (own + w @ body.face_normals[ids]) / (1.0 + w.sum())
    n = n / np.linalg.norm(n)
    return body.rotation @ n


def complete_frame(xi) -> TangentFrame:
    """Right-handed frame around ``xi``.

    The world axis least aligned with ``xi`` (lowest index on ties) is
    orthogonalised against ``xi`` to give zeta; eta = xi x zeta.
    """
    xi = np.asarray(xi, float)
    a = np.zeros(3)
    a[int(np.argmin(np.abs(xi)))] = 1.0
    zeta = a - (a @ xi) * xi
    zeta /= np.linalg.norm(zeta)
    eta = np.cross(xi, zeta)
    return TangentFrame(zeta, eta, xi)


def tangent_frame(p: SurfacePoint, R, smoothing=True) -> TangentFrame:
    return complete_frame(smoothed_normal(p, R, smoothing))


# ---------------------------------------------------------------------------
# distance between bodies

def _segments_closest(p1, q1, p2, q2):
    """Vectorised closest points between segment sets (p1,q1) and (p2,q2)."""
    d1, d2, r = q1 - p1, q2 - p2, p1 - p2
    a = np.einsum("ij,ij->i", d1, d1)
    e = np.einsum("ij,ij->i", d2, d2)
    f = np.einsum("ij,ij->i", d2, r)
    c = np.einsum("ij,ij->i", d1, r)
    b = np.einsum("ij,ij->i", d1, d2)
    denom = a * e - b * b
    safe = denom > 1e-14 * a * e
    s = np.where(safe, np.clip((b * f - c * e) / np.where(safe, denom, 1.0), 0.0, 1.0), 0.0)
    t = (b * s + f) / e
    low, high = t < 0.0, t > 1.0
    s = np.where(low, np.clip(-c / a, 0.0, 1.0), np.where(high, np.clip((b - c) / a, 0.0, 1.0), s))
    t = np.clip(t, 0.0, 1.0)
    c1 = p1 + s[:, None] * d1
    c2 = p2 + t[:, None] * d2
    return np.linalg.norm(c1 - c2, axis=1), c1, c2


def _world_planes(body):
    N = body.face_normals @ body.rotation.T
    c = body.face_offsets + N @ body.translation
    return N, c


def _inside(points, body, tol=TOL):
    N, c = _world_planes(body)
    return np.all(points @ N.T - c <= tol, axis=1)


def _edge_face_crossing(A, B):
    """A point where an edge of ``A`` pierces a face of ``B``, or None."""
    VA = A.world_vertices()
    P, Q = VA[A.edges[:, 0]], VA[A.edges[:, 1]]
    N, c = _world_planes(B)
    dp = P @ N.T - c
    dq = Q @ N.T - c
    cross = (dp * dq) < 0.0
    for e, f in zip(*np.nonzero(cross)):
        lam = dp[e, f] / (dp[e, f] - dq[e, f])
        x = P[e] + lam * (Q[e] - P[e])
        if _inside(x[None], B)[0]:
            return x
    return None


def pairwise_distance(bodyA: ConvexBody, bodyB: ConvexBody):
    """Minimum distance between two convex bodies and a witness pair.

    Returns ``(distance, pA, pB)``.  Overlapping bodies give distance 0 and a
    common point for both witnesses.  Polyhedra are handled by enumerating
    vertex-face and edge-edge feature pairs.
    """
    if bodyA.kind == "plane" and bodyB.kind == "plane":
        raise GeometryError("distance between two planes is not supported")
    if bodyA.kind == "plane":
        d, pB, pA = pairwise_distance(bodyB, bodyA)
        return d, pA, pB
    VA = bodyA.world_vertices()
    if bodyB.kind == "plane":
        n = bodyB.world_normal(0)
        h = (VA - bodyB.translation) @ n
        i = int(np.argmin(h))
        if h[i] <= 0.0:
            return 0.0, VA[i].copy(), VA[i].copy()
        return float(h[i]), VA[i].copy(), VA[i] - h[i] * n
    VB = bodyB.world_vertices()
    for V, other in ((VA, bodyB), (VB, bodyA)):
        ins = np.flatnonzero(_inside(V, other))
        if len(ins):
            v = V[ins[0]].copy()
            return 0.0, v, v.copy()
    for X, Y in ((bodyA, bodyB), (bodyB, bodyA)):
        x = _edge_face_crossing(X, Y)
        if x is not None:
            return 0.0, x, x.copy()

    best = (np.inf, None, None)
    for v in VA:
        sp = project_point(v, replace(bodyB, allowed=None, _t=bodyB._t))
        d = np.linalg.norm(sp.position - v)
        if d < best[0]:
            best = (d, v.copy(), sp.position)
    for v in VB:
        sp = project_point(v, replace(bodyA, allowed=None, _t=bodyA._t))
        d = np.linalg.norm(sp.position - v)
        if d < best[0]:
            best = (d, sp.position, v.copy())
    EA, EB = bodyA.edges, bodyB.edges
    ia, ib = np.meshgrid(np.arange(len(EA)), np.arange(len(EB)), indexing="ij")
    ia, ib = ia.ravel(), ib.ravel()
    d, c1, c2 = _segments_closest(VA[EA[ia, 0]], VA[EA[ia, 1]], VB[EB[ib, 0]], VB[EB[ib, 1]])
    k = int(np.argmin(d))
    if d[k] < best[0]:
        best = (float(d[k]), c1[k], c2[k])
    return float(best[0]), best[1], best[2]


# ---------------------------------------------------------------------------
# primitives and mesh files

def box(size=(1.0, 1.0, 1.0), **kw) -> ConvexBody:
    """Axis-aligned box centred at the origin (8 vertices)."""
    hx, hy, hz = (0.5 * float(s) for s in size)
    pts = [(sx * hx, sy * hy, sz * hz) for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]
    return build_convex_body(pts, **kw)


def tetrahedron(circumradius=1.0, **kw) -> ConvexBody:
    """Regular tetrahedron centred at the origin (4 vertices)."""
    r = float(circumradius) / math.sqrt(3.0)
    pts = [(r, r, r), (r, -r, -r), (-r, r, -r), (-r, -r, r)]
    return build_convex_body(pts, **kw)


def triangular_prism(side=0.1, length=0.1, **kw) -> ConvexBody:
    """Equilateral prism along z, base centred at the origin (6 vertices)."""
    rc = float(side) / math.sqrt(3.0)
    pts = []
    for z in (-0.5 * length, 0.5 * length):
        for k in range(3):
            a = 2.0 * math.pi * k / 3.0
            pts.append((rc * math.cos(a), rc * math.sin(a), z))
    return build_convex_body(pts, **kw)


def cylinder(radius=0.05, height=0.1, segments=12, **kw) -> ConvexBody:
    """Prism approximation of a z-axis cylinder (``2 * segments`` vertices)."""
    pts = []
    for z in (-0.5 * height, 0.5 * height):
        for k in range(segments):
            a = 2.0 * math.pi * k / segments
            pts.append((radius * math.cos(a), radius * math.sin(a), z))
    return build_convex_body(pts, **kw)


def hemisphere(radius=0.05, rings=4, segments=12, **kw) -> ConvexBody:
    """Dome over the z = 0 disc, apex on +z.

    ``rings`` latitude rings (the first one is the equator) of ``segments``
    vertices each plus the apex: ``rings * segments + 1`` vertices.  The
    rings share their azimuths, so the facets between rings are quads.
    """
    pts = [(0.0, 0.0, float(radius))]
    for i in range(rings):
        lat = 0.5 * math.pi * i / rings
        for k in range(segments):
            a = 2.0 * math.pi * k / segments
            pts.append((radius * math.cos(lat) * math.cos(a),
                        radius * math.cos(lat) * math.sin(a), radius * math.sin(lat)))
    return build_convex_body(pts, **kw)


def random_convex(n=50, radii=(1.0, 1.0, 1.0), seed=0, **kw) -> ConvexBody:
    """Hull of ``n`` random points on an ellipsoid (all of them are vertices)."""
    rng = np.random.default_rng(seed)
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1)[:, None]
    return build_convex_body(d * np.asarray(radii, float), **kw)


def read_mesh(text):
    """Parse ``v x y z`` / ``f i j k ...`` lines (1-based face indices).

    Comment lines start with ``#``; other records are rejected.
    """
    vertices, faces = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split("#", 1)[0].split()
        if not parts:
            continue
        try:
            if parts[0] == "v":
                if len(parts) != 4:
                    raise ValueError("expected 3 coordinates")
                vertices.append(tuple(float(s) for s in parts[1:]))
            elif parts[0] == "f":
                idx = tuple(int(s.split("/")[0]) - 1 for s in parts[1:])
                if len(idx) < 3 or min(idx) < 0:
                    raise ValueError("expected at least 3 positive indices")
                faces.append(idx)
            else:
                raise ValueError(f"unknown record {parts[0]!r}")
        except ValueError as exc:
            raise GeometryError(f"mesh line {lineno}: {exc}") from None
    for f in faces:
        if max(f) >= len(vertices):
            raise GeometryError(f"face {f} references a missing vertex")
    return np.array(vertices, float).reshape(-1, 3), faces


def write_mesh(body: ConvexBody) -> str:
    lines = [f"v {float(x)!r} {float(y)!r} {float(z)!r}" for x, y, z in body.vertices]
    lines += ["f " + " ".join(str(i + 1) for i in loop) for loop in body.faces]
    return "\n".join(lines) + "\n"


def load_mesh_body(path, **kw) -> ConvexBody:
    """Convex body from a mesh file; faces in the file are not needed."""
    with open(path) as fh:
        vertices, _ = read_mesh(fh.read())
    return build_convex_body(vertices, **kw)
