"""Polyhedral domain ingestion and per-edge/per-vertex geometry.

A domain is a closed polyhedral solid given by vertices and oriented face
loops (counterclockwise seen from outside the solid).  The flow domain is
either the interior of the solid or, with ``complement=True``, its exterior;
in the latter case every edge angle is 2*pi minus the solid's interior
dihedral angle and no further mesh data is needed.

Angles are always reported as measured inside the fluid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml
from scipy.optimize import linprog

__all__ = [
    "MeshError",
    "DomainFileError",
    "BC_INDEX",
    "BC_NAMES",
    "Edge",
    "VertexCone",
    "BoundaryAssignment",
    "VertexBound",
    "Polyhedron",
    "load_polyhedron",
    "loads_polyhedron",
]


class MeshError(ValueError):
    """Invalid mesh topology or geometry."""


class DomainFileError(ValueError):
    """Domain file does not conform to the schema."""


# boundary condition tags, in the order of the condition index d
BC_INDEX = {
    "dirichlet": 0,
    "tangential-velocity": 1,
    "slip": 2,
    "neumann": 3,
}
BC_NAMES = {v: k for k, v in BC_INDEX.items()}


@dataclass(frozen=True)
class Edge:
    """A mesh edge with its two adjacent faces and the fluid-side angle.

    ``theta`` is the dihedral angle inside the fluid domain, in (0, 2*pi).
    ``k_plus`` is the face whose loop traverses the edge from ``endpoints[0]``
    to ``endpoints[1]``; ``k_minus`` traverses it the other way.
    """

    id: int
    endpoints: Tuple[int, int]
    adjacent_faces: Tuple[int, int]  # (k_plus, k_minus)
    theta: float


@dataclass(frozen=True)
class VertexCone:
    """Predicates of the fluid cone at a vertex.

    The half-space predicate is decided for the fluid side (interior samples
    obtained by winding-number tests).  The enclosing aperture is the smallest
    spherical cap covering the face/edge direction samples of the vertex
    figure; for complement domains this caps the shared boundary figure, so
    it must not be used as a containment bound for the reflex fluid cone
    (the user bound table is the injection point for such comparisons).
    """

    vertex: int
    normals: np.ndarray  # outward unit normals of the incident faces
    edge_rays: np.ndarray  # unit directions of incident edges, away from v
    contained_in_half_space: bool
    enclosing_circular_cone_aperture: Optional[float]  # radians, or None
    is_convex_corner: bool


@dataclass(frozen=True)
class VertexBound:
    """User-supplied lower bound for the vertex spectrum, with provenance."""

    bound: float
    note: str = ""

    def __post_init__(self):
        if not self.bound > -0.5:
            raise ValueError("vertex bound must exceed -1/2, got %r" % (self.bound,))


@dataclass(frozen=True)
class BoundaryAssignment:
    """Per-face boundary condition index d in {0, 1, 2, 3}."""

    d: Tuple[int, ...]

    def __post_init__(self):
        for k, dk in enumerate(self.d):
            if dk not in (0, 1, 2, 3):
                raise ValueError("face %d has invalid condition index %r" % (k, dk))

    def pair(self, edge: Edge) -> Tuple[int, int]:
        """Condition indices (d_plus, d_minus) on the faces adjoining an edge."""
        kp, km = edge.adjacent_faces
        return self.d[kp], self.d[km]

    def values(self) -> Tuple[int, ...]:
        return self.d


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n == 0:
        raise MeshError("zero-length vector")
    return v / n


def _newell_normal(pts: np.ndarray) -> np.ndarray:
    """Area-weighted face normal (Newell's method); robust for any planar loop."""
    nrm = np.zeros(3)
    for i in range(len(pts)):
        a = pts[i]
        b = pts[(i + 1) % len(pts)]
        nrm += np.cross(a, b)
    return 0.5 * nrm


class Polyhedron:
    """A validated closed polyhedral boundary with derived edge data.

    Parameters
    ----------
    vertices : (n, 3) array of points.
    faces : vertex-index loops, counterclockwise seen from outside the solid.
    complement : if True the fluid fills the exterior of the solid.
    name : optional label.
    tol : relative tolerance for planarity/degeneracy checks.
    """

    def __init__(self, vertices, faces, complement: bool = False,
                 name: Optional[str] = None, tol: float = 1e-9):
        self.vertices = np.asarray(vertices, dtype=float)
        self.faces = tuple(tuple(int(i) for i in loop) for loop in faces)
        self.complement = bool(complement)
        self.name = name
        self.tol = float(tol)
        self._validate_basic()
        self.face_normals, self.face_areas = self._face_planes()
        self.edges = self._derive_edges()
        self._validate_global()
        self._cone_cache: Dict[int, VertexCone] = {}

    # -- construction checks -------------------------------------------------

    def _validate_basic(self):
        V = self.vertices
        if V.ndim != 2 or V.shape[1] != 3:
            raise MeshError("vertices must be an (n, 3) array")
        if not np.all(np.isfinite(V)):
            raise MeshError("non-finite vertex coordinates")
        if len(self.faces) < 4:
            raise MeshError("a closed polyhedron needs at least 4 faces")
        n = len(V)
        for k, loop in enumerate(self.faces):
            if len(loop) < 3:
                raise MeshError("face %d is degenerate: loop of %d vertices" % (k, len(loop)))
            if len(set(loop)) != len(loop):
                raise MeshError("face %d repeats a vertex" % k)
            if any(i < 0 or i >= n for i in loop):
                raise MeshError("face %d references an unknown vertex" % k)

    @property
    def _diag(self) -> float:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return float(np.linalg.norm(hi - lo))

    def _face_planes(self):
        diag = self._diag
        if diag == 0:
            raise MeshError("degenerate mesh: zero bounding box")
        normals = np.zeros((len(self.faces), 3))
        areas = np.zeros(len(self.faces))
        for k, loop in enumerate(self.faces):
            pts = self.vertices[list(loop)]
            nrm = _newell_normal(pts)
            area = np.linalg.norm(nrm)
            if area <= self.tol * diag ** 2:
                raise MeshError("face %d has zero area" % k)
            normals[k] = nrm / area
            areas[k] = area
            # planarity: every vertex close to the face plane
            center = pts.mean(axis=0)
            dist = np.abs((pts - center) @ normals[k])
            if dist.max() > self.tol * diag:
                raise MeshError("face %d is not planar within tolerance" % k)
            for i in range(len(loop)):
                a = pts[i]
                b = pts[(i + 1) % len(loop)]
                if np.linalg.norm(b - a) <= self.tol * diag:
                    raise MeshError("face %d contains a zero-length edge" % k)
        return normals, areas

    def _derive_edges(self) -> Tuple[Edge, ...]:
        directed: Dict[Tuple[int, int], List[int]] = {}
        for k, loop in enumerate(self.faces):
            for i in range(len(loop)):
                a, b = loop[i], loop[(i + 1) % len(loop)]
                directed.setdefault((a, b), []).append(k)
        edges = []
        seen = set()
        for (a, b), ks in directed.items():
            if len(ks) != 1:
                raise MeshError("directed edge %r used by %d faces; mesh is not an oriented manifold" % ((a, b), len(ks)))
            if (a, b) in seen or (b, a) in seen:
                continue
            if (b, a) not in directed:
                raise MeshError("edge %r is not shared by exactly two faces" % ((a, b),))
            seen.add((a, b))
            k_plus = ks[0]
            k_minus = directed[(b, a)][0]
            theta_solid = self._solid_dihedral(a, b, k_plus, k_minus)
            theta = 2 * math.pi - theta_solid if self.complement else theta_solid
            edges.append(Edge(len(edges), (a, b), (k_plus, k_minus), theta))
        return tuple(edges)

    def _solid_dihedral(self, a: int, b: int, k_plus: int, k_minus: int) -> float:
        """Interior dihedral angle of the solid along edge (a, b)."""
        e = _unit(self.vertices[b] - self.vertices[a])
        n1 = self.face_normals[k_plus]
        n2 = self.face_normals[k_minus]
        s = float(np.dot(np.cross(n1, n2), e))
        c = float(-np.dot(n1, n2))
        theta = math.atan2(s, c) % (2 * math.pi)
        if theta <= 0 or theta >= 2 * math.pi:
            raise MeshError("edge (%d, %d) has a degenerate dihedral angle" % (a, b))
        return theta

    def _validate_global(self):
        V, E, F = len(self.vertices), len(self.edges), len(self.faces)
        if V - E + F != 2:
            raise MeshError("Euler characteristic V-E+F = %d != 2" % (V - E + F))
        # divergence-theorem closure: area vectors of a closed surface sum to zero
        total = (self.face_normals * self.face_areas[:, None]).sum(axis=0)
        if np.linalg.norm(total) > 1e-9 * self.face_areas.sum():
            raise MeshError("face area vectors do not close; mesh is not watertight")
        if self.signed_volume() <= 0:
            raise MeshError("negative enclosed volume; face loops are not oriented outward")

    # -- derived quantities ---------------------------------------------------

    def signed_volume(self) -> float:
        vol = 0.0
        for loop in self.faces:
            pts = self.vertices[list(loop)]
            for i in range(1, len(loop) - 1):
                vol += np.dot(pts[0], np.cross(pts[i], pts[i + 1])) / 6.0
        return float(vol)

    def dihedral_angle(self, edge: Edge) -> float:
        """Angle at an edge measured inside the fluid, in (0, 2*pi)."""
        if edge is not self.edges[edge.id] and edge != self.edges[edge.id]:
            raise MeshError("edge does not belong to this polyhedron")
        return edge.theta

    def is_convex(self) -> bool:
        """True iff the solid is convex and the fluid is its interior.

        Exterior (complement) domains are never reported convex.
        """
        if self.complement:
            return False
        return all(e.theta < math.pi - 1e-12 for e in self.edges)

    def incident_faces(self, vertex: int) -> Tuple[int, ...]:
        return tuple(k for k, loop in enumerate(self.faces) if vertex in loop)

    def incident_edges(self, vertex: int) -> Tuple[Edge, ...]:
        return tuple(e for e in self.edges if vertex in e.endpoints)

    # -- vertex cones -----------------------------------------------------------

    def vertex_cone(self, vertex: int) -> VertexCone:
        if vertex in self._cone_cache:
            return self._cone_cache[vertex]
        faces = self.incident_faces(vertex)
        if len(faces) < 3:
            raise MeshError("vertex %d has fewer than 3 incident faces" % vertex)
        normals = self.face_normals[list(faces)]
        rays = self._edge_rays(vertex)
        boundary = np.vstack([rays, self._wedge_samples(vertex, faces)])
        interior = self._domain_direction_samples(vertex)
        samples = np.vstack([boundary, interior]) if len(interior) else boundary
        contained = _half_space_feasible(samples)
        # cap of the vertex-figure boundary (face/edge directions); for
        # complement cones this bounds the boundary figure, not the open cone
        aperture = _enclosing_cap_aperture(boundary, boundary)
        convex_corner = all(e.theta < math.pi - 1e-12 for e in self.incident_edges(vertex))
        cone = VertexCone(vertex, normals, rays, contained, aperture, convex_corner)
        self._cone_cache[vertex] = cone
        return cone

    def _edge_rays(self, vertex: int) -> np.ndarray:
        v = self.vertices[vertex]
        rays = []
        for e in self.incident_edges(vertex):
            other = e.endpoints[1] if e.endpoints[0] == vertex else e.endpoints[0]
            rays.append(_unit(self.vertices[other] - v))
        return np.array(rays)

    def _wedge_samples(self, vertex: int, faces: Sequence[int], per_wedge: int = 9) -> np.ndarray:
        """Directions along each incident face wedge, swept through the face corner."""
        v = self.vertices[vertex]
        out = []
        for k in faces:
            loop = self.faces[k]
            i = loop.index(vertex)
            a = _unit(self.vertices[loop[(i + 1) % len(loop)]] - v)
            b = _unit(self.vertices[loop[(i - 1) % len(loop)]] - v)
            nf = self.face_normals[k]
            # interior corner angle of the face at v, in (0, 2*pi)
            ang = math.atan2(float(np.dot(np.cross(a, b), nf)), float(np.dot(a, b))) % (2 * math.pi)
            u = np.cross(nf, a)
            for t in np.linspace(0.0, 1.0, per_wedge):
                w = math.cos(t * ang) * a + math.sin(t * ang) * u
                out.append(w)
        return np.array(out)

    def _domain_direction_samples(self, vertex: int, n: int = 350) -> np.ndarray:
        """Unit directions d with v + eps*d inside the fluid (winding-number test)."""
        v = self.vertices[vertex]
        eps = 1e-4 * self._diag
        dirs = _fibonacci_sphere(n)
        pts = v[None, :] + eps * dirs
        wind = self._winding(pts)
        inside = wind > 0.5
        if self.complement:
            inside = ~inside
        return dirs[inside]

    def _winding(self, pts: np.ndarray) -> np.ndarray:
        """Generalized winding number of the closed surface at each point."""
        total = np.zeros(len(pts))
        for loop in self.faces:
            poly = self.vertices[list(loop)]
            for i in range(1, len(loop) - 1):
                total += _triangle_solid_angle(poly[0], poly[i], poly[i + 1], pts)
        return total / (4 * math.pi)

    def __repr__(self):
        return "Polyhedron(name=%r, V=%d, E=%d, F=%d, complement=%r)" % (
            self.name, len(self.vertices), len(self.edges), len(self.faces), self.complement)


def _fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _triangle_solid_angle(a, b, c, pts: np.ndarray) -> np.ndarray:
    """Signed solid angle of triangle (a, b, c) seen from each point."""
    ra = a[None, :] - pts
    rb = b[None, :] - pts
    rc = c[None, :] - pts
    la = np.linalg.norm(ra, axis=1)
    lb = np.linalg.norm(rb, axis=1)
    lc = np.linalg.norm(rc, axis=1)
    num = np.einsum("ij,ij->i", ra, np.cross(rb, rc))
    den = (la * lb * lc + np.einsum("ij,ij->i", ra, rb) * lc
           + np.einsum("ij,ij->i", ra, rc) * lb
           + np.einsum("ij,ij->i", rb, rc) * la)
    return 2.0 * np.arctan2(num, den)


def graph_direction_feasible(normals: np.ndarray, tol: float = 1e-9) -> bool:
    """Heuristic for the Lipschitz-graph property at a vertex: the cone
    boundary is a graph over some plane when a direction has strictly
    positive dot product with every incident outward face normal."""
    m = len(normals)
    if m == 0:
        return False
    c = np.array([0.0, 0.0, 0.0, -1.0])
    A_ub = np.hstack([-np.asarray(normals, dtype=float), np.ones((m, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(m),
                  bounds=[(-1, 1)] * 3 + [(-2, 2)], method="highs")
    return bool(res.success and res.x[3] > tol)


def _half_space_feasible(dirs: np.ndarray, tol: float = 1e-9) -> bool:
    """Is there a direction w with w . d >= 0 for every sampled direction d?

    Solved as a linear program maximizing the worst margin; containment needs
    the optimum to be nonnegative (a supporting plane through the vertex is
    allowed).
    """
    m = len(dirs)
    if m == 0:
        return False
    # variables (w1, w2, w3, t); maximize t subject to d.w >= t, |w_i| <= 1
    c = np.array([0.0, 0.0, 0.0, -1.0])
    A_ub = np.hstack([-dirs, np.ones((m, 1))])
    b_ub = np.zeros(m)
    bounds = [(-1, 1), (-1, 1), (-1, 1), (-2, 2)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        return False
    t = res.x[3]
    if np.linalg.norm(res.x[:3]) < 1e-12:
        return False
    return bool(t >= -tol)


def _cap_candidate_axes(pts: np.ndarray) -> np.ndarray:
    """Candidate cap axes from single points, pairs and triples of samples.

    The smallest enclosing cap is supported by at most three directions: its
    axis is one sample, the bisector of two, or equidistant from three (the
    normal of their affine plane, either sign).
    """
    n = len(pts)
    axes = [pts]
    if n >= 2:
        i, j = np.triu_indices(n, 1)
        axes.append(pts[i] + pts[j])
    if n >= 3:
        import itertools
        combos = np.array(list(itertools.combinations(range(n), 3)))
        d1 = pts[combos[:, 0]] - pts[combos[:, 1]]
        d2 = pts[combos[:, 0]] - pts[combos[:, 2]]
        w = np.cross(d1, d2)
        axes.append(w)
        axes.append(-w)
    cand = np.vstack(axes)
    norms = np.linalg.norm(cand, axis=1)
    cand = cand[norms > 1e-12] / norms[norms > 1e-12, None]
    return cand


def _enclosing_cap_aperture(support_pts: np.ndarray, cover_pts: np.ndarray,
                            tol: float = 1e-9) -> Optional[float]:
    """Aperture (2x angular radius) of the smallest cap covering the samples.

    Candidate axes come from the boundary (face/edge) samples; the cap must
    cover every sampled domain direction.  Exact when the optimum is supported
    by at most 3 points.  Returns None when no proper cap exists.
    """
    pts = np.asarray(support_pts)
    if len(pts) > 40:  # thin out for the cubic candidate sweep
        idx = np.linspace(0, len(pts) - 1, 40).astype(int)
        pts = pts[idx]
    cand = _cap_candidate_axes(pts)
    if not len(cand):
        return None
    margins = (np.asarray(cover_pts) @ cand.T).min(axis=0)
    best = int(np.argmax(margins))
    cosr, axis = float(margins[best]), cand[best]
    if cosr <= -1 + 1e-9:
        return None
    # certification: every sampled direction inside the cap
    if float(np.min(cover_pts @ axis)) < cosr - tol:
        return None
    radius = math.acos(max(-1.0, min(1.0, cosr)))
    return 2.0 * radius


# -- domain files ---------------------------------------------------------------

_BC_HELP = ", ".join(sorted(BC_INDEX))


def loads_polyhedron(text: str, tol: float = 1e-9):
    """Parse a domain document; returns (Polyhedron, BoundaryAssignment, bounds).

    ``bounds`` maps vertex index -> VertexBound (user-supplied spectral bounds).
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise DomainFileError("unparsable domain file: %s" % exc) from exc
    if not isinstance(doc, dict):
        raise DomainFileError("domain file must be a mapping")
    for key in ("vertices", "faces"):
        if key not in doc:
            raise DomainFileError("missing required field %r" % key)
    vertices = doc["vertices"]
    if not isinstance(vertices, list) or any(
            not isinstance(p, list) or len(p) != 3 for p in vertices):
        raise DomainFileError("'vertices' must be a list of [x, y, z] triples")
    loops = []
    ds = []
    if not isinstance(doc["faces"], list):
        raise DomainFileError("'faces' must be a list")
    for k, f in enumerate(doc["faces"]):
        if not isinstance(f, dict) or "loop" not in f or "bc" not in f:
            raise DomainFileError("face %d must carry 'loop' and 'bc'" % k)
        if f["bc"] not in BC_INDEX:
            raise DomainFileError("face %d: unknown boundary tag %r (expected one of: %s)"
                                  % (k, f["bc"], _BC_HELP))
        loops.append(f["loop"])
        ds.append(BC_INDEX[f["bc"]])
    try:
        poly = Polyhedron(vertices, loops,
                          complement=bool(doc.get("complement", False)),
                          name=doc.get("name"), tol=tol)
    except MeshError:
        raise
    bounds: Dict[int, VertexBound] = {}
    raw = doc.get("vertex_bounds") or {}
    if not isinstance(raw, dict):
        raise DomainFileError("'vertex_bounds' must be a mapping vertex -> {bound, note}")
    for v, entry in raw.items():
        iv = int(v)
        if iv < 0 or iv >= len(poly.vertices):
            raise DomainFileError("vertex_bounds references unknown vertex %r" % v)
        if not isinstance(entry, dict) or "bound" not in entry:
            raise DomainFileError("vertex_bounds[%r] must carry 'bound'" % v)
        bounds[iv] = VertexBound(float(entry["bound"]), str(entry.get("note", "")))
    return poly, BoundaryAssignment(tuple(ds)), bounds


def load_polyhedron(path, tol: float = 1e-9):
    """Load a domain file from disk; see :func:`loads_polyhedron`."""
    with open(path, "r", encoding="utf-8") as fh:
        return loads_polyhedron(fh.read(), tol=tol)
