import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.transform import Rotation

from bodycontact import geometry as G
from bodycontact.geometry import (GeometryError, SurfacePoint, build_convex_body, check_body,
                                  complete_frame, pairwise_distance, project_point,
                                  smoothed_normal, smoothing_weight, smoothing_weight_derivative,
                                  surface_distance, tangent_frame)


def posed(body, seed):
    T = np.eye(4)
    T[:3, :3] = Rotation.random(random_state=seed).as_matrix()
    T[:3, 3] = np.random.default_rng(seed).normal(size=3)
    return body.moved(T)


def sample_surface(body, n, rng):
    """Uniform random points on the surface (fan triangulation, area weighted)."""
    V = body.world_vertices()
    tris = [(loop[0], loop[i], loop[i + 1]) for loop in body.faces for i in range(1, len(loop) - 1)]
    tris = np.array(tris)
    a, b, c = V[tris[:, 0]], V[tris[:, 1]], V[tris[:, 2]]
    area = 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)
    k = rng.choice(len(tris), size=n, p=area / area.sum())
    r1, r2 = rng.random(n), rng.random(n)
    s = np.sqrt(r1)
    return (1 - s)[:, None] * a[k] + (s * (1 - r2))[:, None] * b[k] + (s * r2)[:, None] * c[k]


def on_face(sp: SurfacePoint, tol=1e-7):
    body = sp.body
    n, c = body.face_normals[sp.face], body.face_offsets[sp.face]
    if abs(n @ sp.local - c) > tol:
        return False
    loop = body.faces[sp.face]
    V = body.vertices
    for i, a in enumerate(loop):
        b = loop[(i + 1) % len(loop)]
        inward = np.cross(n, V[b] - V[a])
        if inward @ (sp.local - V[a]) / np.linalg.norm(inward) < -tol:
            return False
    return True


BODIES = {
    "cube": lambda: G.box((2.0, 2.0, 2.0)),
    "tetra": lambda: G.tetrahedron(1.5),
    "prism": lambda: G.triangular_prism(0.3, 0.5),
    "hemisphere": lambda: G.hemisphere(0.2, 4, 12),
    "mesh50": lambda: G.random_convex(50, (1.0, 0.8, 0.6), seed=3),
}


# ---------------------------------------------------------------------------
# construction

def test_cube_topology():
    b = G.box((1, 1, 1))
    assert b.n_faces == 6
    assert all(len(f) == 4 for f in b.faces)
    assert all(len(a) == 4 for a in b.adjacency)


def test_tetrahedron_topology():
    b = G.tetrahedron()
    assert b.n_faces == 4
    assert all(len(f) == 3 for f in b.faces)
    assert all(len(a) == 3 for a in b.adjacency)


def test_random_hull_euler_characteristic():
    b = G.random_convex(50, seed=7)
    V, E, F = len(b.vertices), len(b.edges), b.n_faces
    assert V - E + F == 2


@pytest.mark.parametrize("name", sorted(BODIES))
def test_bodies_satisfy_invariants(name):
    body = BODIES[name]()
    check_body(body)
    # every face winds counter-clockwise seen from outside
    for f, loop in enumerate(body.faces):
        V = body.vertices[list(loop)]
        area = sum(np.cross(V[i], V[(i + 1) % len(V)]) for i in range(len(V)))
        assert area @ body.face_normals[f] > 0


def test_primitive_vertex_counts():
    assert len(G.box().vertices) == 8
    assert len(G.tetrahedron().vertices) == 4
    assert len(G.triangular_prism().vertices) == 6
    assert len(G.cylinder(segments=10).vertices) == 20
    h = G.hemisphere(rings=4, segments=12)
    assert len(h.vertices) == 49
    # disc, 3 bands of quads and the apex fan
    assert h.n_faces == 1 + 3 * 12 + 12
    assert sorted(len(f) for f in h.faces).count(4) == 36


def test_coplanar_faces_are_merged():
    # a cube sampled with extra points on its faces still has 6 faces
    rng = np.random.default_rng(0)
    pts = [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
    pts += [(0.0, *rng.random(2)) for _ in range(5)] + [(*rng.random(2), 1.0) for _ in range(5)]
    assert build_convex_body(pts).n_faces == 6


@pytest.mark.parametrize("pts", [
    [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0), (0.5, 0.2, 0)],
    [(0, 0, 0), (1, 1, 1), (2, 2, 2), (3, 3, 3)],
    [(0, 0, 0), (1, 0, 0), (0, 1, 0)],
])
def test_degenerate_input_rejected(pts):
    with pytest.raises(GeometryError):
        build_convex_body(pts)


# ---------------------------------------------------------------------------
# projection

def test_projection_along_axis():
    cube = G.box((2, 2, 2))
    sp = project_point([2.0, 0.0, 0.0], cube)
    np.testing.assert_allclose(sp.position, [1, 0, 0], atol=1e-12)
    np.testing.assert_allclose(cube.face_normals[sp.face], [1, 0, 0], atol=1e-12)


def test_projection_onto_edge_takes_lowest_face():
    cube = G.box((2, 2, 2))
    sp = project_point([2.0, 2.0, 0.0], cube)
    np.testing.assert_allclose(sp.position, [1, 1, 0], atol=1e-12)
    candidates = [f for f in range(6) if cube.face_normals[f] @ [1, 1, 0] > 0.5]
    assert sp.face == min(candidates)


def test_interior_point_goes_to_nearest_face():
    tet = G.tetrahedron(1.0)
    c = tet.centroid() + np.array([0.01, 0.02, -0.015])
    sp = project_point(c, tet)
    samples = sample_surface(tet, 1_000_000, np.random.default_rng(1))
    best = np.min(np.linalg.norm(samples - c, axis=1))
    assert np.linalg.norm(sp.position - c) <= best + 1e-12
    assert on_face(sp)


@pytest.mark.parametrize("name", sorted(BODIES))
def test_projection_optimal_against_sampling(name):
    body = posed(BODIES[name](), 5)
    rng = np.random.default_rng(2)
    samples = sample_surface(body, 100_000, rng)
    scale = np.ptp(body.world_vertices(), axis=0).max()
    centre = body.world_vertices().mean(axis=0)
    for _ in range(100):
        d = rng.normal(size=3)
        p = centre + scale * (0.6 + rng.random()) * d / np.linalg.norm(d)
        sp = project_point(p, body)
        dist = np.linalg.norm(sp.position - p)
        assert dist <= np.min(np.linalg.norm(samples - p, axis=1)) + 1e-9
        assert on_face(sp)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(BODIES)),
       st.lists(st.floats(-3, 3, allow_nan=False), min_size=3, max_size=3))
def test_projection_idempotent(name, p):
    body = posed(BODIES[name](), 11)
    sp = project_point(np.array(p), body)
    again = project_point(sp.position, body)
    np.testing.assert_allclose(again.position, sp.position, atol=1e-9)


def test_region_mask_is_honoured():
    cube = G.box((2, 2, 2))
    lower = [f for f in range(6) if cube.face_normals[f][2] < 0.5]
    region = cube.restricted(lower)
    rng = np.random.default_rng(4)
    for p in rng.normal(scale=3, size=(200, 3)):
        assert project_point(p, region).face in lower
    with pytest.raises(GeometryError):
        cube.restricted([99])


def test_plane_projection():
    plane = G.plane_body()
    sp = project_point([0.3, -0.2, 1.5], plane)
    np.testing.assert_allclose(sp.position, [0.3, -0.2, 0.0])
    np.testing.assert_allclose(smoothed_normal(sp, 0.1), [0, 0, 1])


# ---------------------------------------------------------------------------
# surface distance and smoothing

def _top_point(cube, xy):
    sp = project_point([xy[0], xy[1], 5.0], cube)
    assert cube.face_normals[sp.face][2] > 0.99
    return sp


def test_surface_distance_face_centre():
    cube = G.box((1, 1, 1))
    sp = _top_point(cube, (0.0, 0.0))
    for g in cube.adjacency[sp.face]:
        assert surface_distance(sp, g) == pytest.approx(0.5, abs=1e-12)


def test_surface_distance_on_edge_is_zero():
    cube = G.box((1, 1, 1))
    top = next(f for f in range(6) if cube.face_normals[f][2] > 0.99)
    sp = SurfacePoint.from_local(cube, np.array([0.5, 0.1, 0.5]), top)
    side = next(g for g in cube.adjacency[sp.face] if cube.face_normals[g][0] > 0.99)
    assert surface_distance(sp, side) == pytest.approx(0.0, abs=1e-12)


def _point_segment_2d(p, a, b):
    p, a, b = map(np.asarray, (p, a, b))
    t = np.clip((p - a) @ (b - a) / ((b - a) @ (b - a)), 0, 1)
    return np.linalg.norm(a + t * (b - a) - p)


def test_surface_distance_matches_2d_oracle():
    cube = G.box((1, 1, 1))
    sp = _top_point(cube, (0.3, 0.1))
    edges = {(1, 0): ((0.5, -0.5), (0.5, 0.5)), (-1, 0): ((-0.5, -0.5), (-0.5, 0.5)),
             (0, 1): ((-0.5, 0.5), (0.5, 0.5)), (0, -1): ((-0.5, -0.5), (0.5, -0.5))}
    for g in cube.adjacency[sp.face]:
        n = cube.face_normals[g]
        a, b = edges[(round(n[0]), round(n[1]))]
        assert surface_distance(sp, g) == pytest.approx(_point_segment_2d((0.3, 0.1), a, b),
                                                        abs=1e-12)
    plus_x = next(g for g in cube.adjacency[sp.face] if cube.face_normals[g][0] > 0.99)
    assert surface_distance(sp, plus_x) == pytest.approx(0.2, abs=1e-12)


def test_surface_distance_rejects_non_adjacent_face():
    cube = G.box((1, 1, 1))
    sp = _top_point(cube, (0.0, 0.0))
    bottom = next(f for f in range(6) if cube.face_normals[f][2] < -0.99)
    with pytest.raises(GeometryError):
        surface_distance(sp, bottom)


def test_weight_endpoints_and_midpoint():
    R = 0.03
    assert smoothing_weight(0.0, R) == 1.0
    assert smoothing_weight(R, R) == 0.0
    assert smoothing_weight(2 * R, R) == 0.0
    r = 0.5
    assert -2 * r * r + 1 == pytest.approx(0.5)
    assert 2 * (r - 1) ** 2 == pytest.approx(0.5)
    assert smoothing_weight(R / 2, R) == pytest.approx(0.5)
    assert smoothing_weight_derivative(0.0, R) == 0.0
    assert smoothing_weight_derivative(R, R) == 0.0
    with pytest.raises(ValueError):
        smoothing_weight(-1e-3, R)
    with pytest.raises(ValueError):
        smoothing_weight(0.01, 0.0)


def test_weight_is_c1():
    R = 0.03
    h = 1e-7 * R
    for x in np.linspace(h, R - h, 301):
        num = (smoothing_weight(x + h, R) - smoothing_weight(x - h, R)) / (2 * h)
        assert num == pytest.approx(smoothing_weight_derivative(x, R), rel=1e-6, abs=1e-6 / R)


def test_weights_at_reported_mesh_distances():
    # reported (distance mm, weight) pairs for a 30 mm range
    reported = [(20.4, 0.162), (26.4, 0.002), (9.3, 0.707)]
    ours = [smoothing_weight(x, 30.0) for x, _ in reported]
    np.testing.assert_allclose(ours, [0.20480, 0.02880, 0.80780], atol=1e-5)
    # the formula does not reproduce the reported values; only the ordering agrees
    assert not np.allclose(ours, [w for _, w in reported], atol=1e-2)
    assert np.argsort(ours).tolist() == np.argsort([w for _, w in reported]).tolist()
    assert np.argmax(ours) == 2  # nearest face dominates


def test_smoothed_normal_reduces_to_face_normal():
    cube = G.box((1, 1, 1))
    sp = _top_point(cube, (0.1, -0.05))
    R = min(surface_distance(sp, g) for g in cube.adjacency[sp.face])
    np.testing.assert_array_equal(smoothed_normal(sp, R), cube.face_normals[sp.face])
    np.testing.assert_array_equal(smoothed_normal(sp, 0.5 * R), cube.face_normals[sp.face])


def test_smoothed_normal_on_edge_is_label_symmetric():
    cube = G.box((1, 1, 1))
    top = next(f for f in range(6) if cube.face_normals[f][2] > 0.99)
    side = next(f for f in range(6) if cube.face_normals[f][0] > 0.99)
    local = np.array([0.5, 0.0, 0.5])
    a = smoothed_normal(SurfacePoint.from_local(cube, local, top), 0.2)
    b = smoothed_normal(SurfacePoint.from_local(cube, local, side), 0.2)
    np.testing.assert_allclose(a, b, atol=1e-15)
    np.testing.assert_allclose(a, np.array([1, 0, 1]) / math.sqrt(2), atol=1e-15)


def test_smoothed_normal_without_smoothing_is_face_normal():
    cube = G.box((1, 1, 1))
    sp = _top_point(cube, (0.49, 0.0))
    np.testing.assert_array_equal(smoothed_normal(sp, 0.3, smoothing=False), [0, 0, 1])


def _edge_walk(body, f, g, R):
    """Surface points along the perpendicular through the midpoint of edge (f, g)."""
    a, b = G.shared_edge(body, f, g)
    V = body.vertices
    mid = 0.5 * (V[a] + V[b])
    e = (V[b] - V[a]) / np.linalg.norm(V[b] - V[a])
    pts = []
    for face, sign in ((f, -1.0), (g, 1.0)):
        n = body.face_normals[face]
        into = np.cross(n, e)
        into *= -1 if into @ (body.face_centroid(face) - mid) < 0 else 1
        for s in np.arange(0.0, R + 1e-12, R * 1e-4)[::-1 if sign < 0 else 1]:
            pts.append(SurfacePoint.from_local(body, mid + s * into, face))
    return pts


def _clearance(body, face, skip, x):
    """Distance from ``x`` to the edges of ``face`` other than the one shared with ``skip``."""
    V = body.vertices
    others = [shared_edge_pts(body, face, h) for h in body.adjacency[face] if h != skip]
    return min(_point_segment_3d(x, a, b) for a, b in others)


def shared_edge_pts(body, f, g):
    a, b = G.shared_edge(body, f, g)
    return body.vertices[a], body.vertices[b]


def _point_segment_3d(x, a, b):
    t = np.clip((x - a) @ (b - a) / ((b - a) @ (b - a)), 0, 1)
    return np.linalg.norm(a + t * (b - a) - x)


@pytest.mark.parametrize("name", ["cube", "tetra", "prism", "mesh50"])
def test_smoothed_normal_continuous_across_edges(name):
    body = BODIES[name]()
    V = body.vertices
    checked = 0
    assert body.n_faces > 1
    for f in range(body.n_faces):
        for g in body.adjacency[f]:
            if g < f:
                continue
            a, b = G.shared_edge(body, f, g)
            mid = 0.5 * (V[a] + V[b])
            # stay clear of the other edges of both faces so only this crossing matters
            clear = min(_clearance(body, h, o, mid) for h, o in ((f, g), (g, f)))
            R = 0.2 * clear
            walk = _edge_walk(body, f, g, R)
            normals = np.array([smoothed_normal(p, R) for p in walk])
            cosang = np.einsum("ij,ij->i", normals[1:], normals[:-1])
            assert np.degrees(np.arccos(np.clip(cosang.min(), -1, 1))) < 1.0
            np.testing.assert_allclose(np.linalg.norm(normals, axis=1), 1.0, atol=1e-12)
            checked += 1
            if checked >= 4:
                return


def test_tangent_frame_canonical():
    fr = complete_frame(np.array([0.0, 0.0, 1.0]))
    np.testing.assert_array_equal(fr.zeta, [1, 0, 0])
    np.testing.assert_array_equal(fr.eta, [0, 1, 0])


@pytest.mark.parametrize("name", ["mesh50", "hemisphere", "cube"])
def test_tangent_frames_orthonormal_and_deterministic(name):
    body = posed(BODIES[name](), 9)
    rng = np.random.default_rng(3)
    for p in rng.normal(scale=2.0, size=(1000 // 3 + 1, 3)):
        sp = project_point(p, body)
        fr = tangent_frame(sp, 0.1)
        M = fr.matrix()
        np.testing.assert_allclose(M.T @ M, np.eye(3), atol=1e-9)
        np.testing.assert_allclose(np.cross(fr.zeta, fr.eta), fr.xi, atol=1e-9)
        again = tangent_frame(project_point(p, body), 0.1)
        assert np.array_equal(again.matrix(), M)


# ---------------------------------------------------------------------------
# distance between bodies

def test_distance_axis_aligned_gap():
    a = G.box((2, 2, 2))
    b = G.box((2, 2, 2)).moved(G_translation((3, 0, 0)))
    d, pa, pb = pairwise_distance(a, b)
    assert d == pytest.approx(1.0)
    assert pa[0] == pytest.approx(1.0) and pb[0] == pytest.approx(2.0)
    assert abs(pa[1]) <= 1 and abs(pa[2]) <= 1
    np.testing.assert_allclose(pb - pa, [1, 0, 0], atol=1e-12)


def G_translation(t):
    T = np.eye(4)
    T[:3, 3] = t
    return T


def test_touching_and_overlapping_bodies():
    a = G.box((2, 2, 2))
    assert pairwise_distance(a, a.moved(G_translation((2, 0, 0))))[0] == pytest.approx(0.0, abs=1e-12)
    d, pa, pb = pairwise_distance(a, a.moved(G_translation((1, 0.5, 0))))
    assert d == 0.0
    np.testing.assert_array_equal(pa, pb)


def _qp_distance(A, B):
    import cvxpy as cp
    VA, VB = A.world_vertices(), B.world_vertices()
    la, lb = cp.Variable(len(VA)), cp.Variable(len(VB))
    prob = cp.Problem(cp.Minimize(cp.sum_squares(VA.T @ la - VB.T @ lb)),
                      [la >= 0, lb >= 0, cp.sum(la) == 1, cp.sum(lb) == 1])
    prob.solve(solver="CLARABEL", tol_gap_abs=1e-14, tol_gap_rel=1e-14, tol_feas=1e-14)
    return math.sqrt(max(prob.value, 0.0))


def test_distance_matches_convex_combination_oracle():
    rng = np.random.default_rng(8)
    for trial in range(25):
        A = posed(G.random_convex(12, tuple(0.3 + rng.random(3)), seed=trial), 100 + trial)
        B = posed(G.random_convex(12, tuple(0.3 + rng.random(3)), seed=50 + trial), 200 + trial)
        B = B.moved(G_translation(B.translation + 2.5 * rng.normal(size=3)))
        d, pa, pb = pairwise_distance(A, B)
        assert d == pytest.approx(_qp_distance(A, B), abs=1e-7)
        assert np.linalg.norm(pa - pb) == pytest.approx(d, abs=1e-12)


def test_distance_to_plane():
    plane = G.plane_body()
    cube = G.box((1, 1, 1)).moved(G_translation((0, 0, 2)))
    d, pa, pb = pairwise_distance(cube, plane)
    assert d == pytest.approx(1.5)
    assert pb[2] == pytest.approx(0.0)
    with pytest.raises(GeometryError):
        pairwise_distance(plane, plane)


# ---------------------------------------------------------------------------
# mesh files

def test_mesh_round_trip():
    body = G.random_convex(30, seed=1)
    verts, faces = G.read_mesh(G.write_mesh(body))
    np.testing.assert_array_equal(verts, body.vertices)
    assert [tuple(f) for f in faces] == list(body.faces)
    assert "np." not in G.write_mesh(body)


def test_mesh_parse_errors():
    with pytest.raises(GeometryError, match="line 2"):
        G.read_mesh("v 0 0 0\nv 1 2\n")
    with pytest.raises(GeometryError, match="unknown record"):
        G.read_mesh("vt 0 0\n")
    with pytest.raises(GeometryError, match="missing vertex"):
        G.read_mesh("v 0 0 0\nf 1 2 3\n")
    verts, _ = G.read_mesh("# comment\nv 1 2 3  # trailing\n")
    np.testing.assert_array_equal(verts, [[1, 2, 3]])
