"""Mechanical evaluation of the regularity and small-data existence results.

Each check is a conjunction of decidable conditions: per-edge inequalities on
the edge exponents, per-vertex eigenvalue-free-strip containments, explicit
integrability floors, and data-class assumption flags (which are echoed, never
inferred).  Verdicts are three-valued: ``holds`` when everything is certified,
``fails`` when a condition is violated outright (including a guaranteed
eigenvalue sitting inside a required strip), ``unknown`` when certification is
out of reach (e.g. no vertex rule applies).

``max_s`` scans the admissible nonweighted integrability interval and names
the binding constraint.  ``decision_table`` reproduces the worked-example
class results (classes of domains and condition patterns, with exact rational
interval endpoints); checks fall back to a matching table row when the
per-vertex rules alone cannot certify a nonweighted query.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple, Union

from .edge_pencil import (MuValue, lambda1_of_edge, mu_k, mu_lower_bound,
                          mu_real_root, MU_THRESHOLD_TWO_THIRDS)
from .geometry import (BoundaryAssignment, Edge, Polyhedron, VertexBound,
                       graph_direction_feasible)
from .spaces import Eps, as_eps
from .vertex_pencil import Strip, StripFinding, eigenfree_strip, known_exceptional, \
    strip_condition_holds

__all__ = [
    "DataFlags",
    "ProblemSpec",
    "RegularityQuery",
    "RegularityReport",
    "Interval",
    "check",
    "max_s",
    "DecisionRow",
    "decision_table",
    "matching_rows",
    "sharpness_flags",
]

TARGETS = ("W1", "W2", "C1", "C2", "EXIST")

_INF = Fraction(10 ** 9)  # sentinel for an unbounded endpoint


def _q(x) -> Union[Fraction, float]:
    """Exact rational when possible, float otherwise."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return float(x)


@dataclass(frozen=True)
class Interval:
    """An s-interval with endpoint openness; endpoints rational when exact."""

    lo: Union[Fraction, float]
    hi: Union[Fraction, float]
    lo_closed: bool = False
    hi_closed: bool = False

    def is_empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and not (self.lo_closed and self.hi_closed)

    def contains(self, s) -> bool:
        if s < self.lo or s > self.hi:
            return False
        if s == self.lo and not self.lo_closed:
            return False
        if s == self.hi and not self.hi_closed:
            return False
        return True

    def intersect(self, other: "Interval") -> "Interval":
        if other.lo > self.lo or (other.lo == self.lo and not other.lo_closed):
            lo, lo_c = other.lo, other.lo_closed
        else:
            lo, lo_c = self.lo, self.lo_closed
        if other.hi < self.hi or (other.hi == self.hi and not other.hi_closed):
            hi, hi_c = other.hi, other.hi_closed
        else:
            hi, hi_c = self.hi, self.hi_closed
        return Interval(lo, hi, lo_c, hi_c)

    def __str__(self):
        def fmt(x):
            if isinstance(x, Fraction):
                if x >= _INF:
                    return "inf"
                return str(x) if x.denominator > 1 else str(x.numerator)
            return "%.6g" % x
        return "%s%s, %s%s" % ("[" if self.lo_closed else "(", fmt(self.lo),
                               fmt(self.hi), "]" if self.hi_closed else ")")

    def to_dict(self):
        def enc(x):
            if isinstance(x, Fraction):
                return [x.numerator, x.denominator]
            return float(x)
        return {"lo": enc(self.lo), "hi": enc(self.hi),
                "lo_closed": self.lo_closed, "hi_closed": self.hi_closed}

    @staticmethod
    def from_dict(d):
        def dec(x):
            if isinstance(x, list):
                return Fraction(x[0], x[1])
            return float(x)
        return Interval(dec(d["lo"]), dec(d["hi"]), d["lo_closed"], d["hi_closed"])


_EVERYTHING = Interval(Fraction(1), _INF, False, True)


@dataclass(frozen=True)
class DataFlags:
    """Assumptions on the problem data; explicit, never inferred."""

    data_in_required_spaces: bool = False
    compatibility_conditions_hold: bool = False
    L_V_trivial: bool = False
    small_data: bool = False
    lipschitz_graph: bool = False


@dataclass(frozen=True)
class ProblemSpec:
    poly: Polyhedron
    bc: BoundaryAssignment
    flags: DataFlags = DataFlags()
    kind: str = "navier-stokes"  # or "stokes"
    vertex_bounds: Dict[int, VertexBound] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("navier-stokes", "stokes"):
            raise ValueError("problem kind must be 'navier-stokes' or 'stokes'")
        if len(self.bc.d) != len(self.poly.faces):
            raise ValueError("boundary assignment does not match the face count")


@dataclass(frozen=True)
class RegularityQuery:
    """A single target with its integrability/Holder exponent and weights.

    ``beta``/``delta`` may be scalars (broadcast) or per-vertex/per-edge
    tuples; entries may carry a symbolic epsilon.
    """

    target: str
    s: Optional[Union[float, Fraction]] = None
    sigma: Optional[Union[float, Fraction]] = None
    beta: Union[float, Fraction, Eps, Tuple] = 0
    delta: Union[float, Fraction, Eps, Tuple] = 0

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError("target must be one of %s" % (TARGETS,))
        if self.target in ("W1", "W2", "EXIST"):
            if self.s is None or not self.s > 1:
                raise ValueError("Sobolev targets need s > 1")
        else:
            if self.sigma is None or not 0 < self.sigma < 1:
                raise ValueError("Holder targets need sigma in (0, 1)")

    def betas(self, n: int) -> Tuple[Eps, ...]:
        b = self.beta if isinstance(self.beta, (tuple, list)) else (self.beta,) * n
        if len(b) != n:
            raise ValueError("beta must have one entry per vertex")
        return tuple(as_eps(x) for x in b)

    def deltas(self, m: int) -> Tuple[Eps, ...]:
        d = self.delta if isinstance(self.delta, (tuple, list)) else (self.delta,) * m
        if len(d) != m:
            raise ValueError("delta must have one entry per edge")
        return tuple(as_eps(x) for x in d)

    def is_nonweighted(self) -> bool:
        bs = self.beta if isinstance(self.beta, (tuple, list)) else (self.beta,)
        ds = self.delta if isinstance(self.delta, (tuple, list)) else (self.delta,)
        return all(as_eps(x) == 0 for x in bs) and all(as_eps(x) == 0 for x in ds)


@dataclass(frozen=True)
class EdgeCheck:
    edge: int
    theta: float
    mu: float
    mu_provenance: str
    requirement: str
    satisfied: bool


@dataclass(frozen=True)
class VertexCheck:
    vertex: int
    finding: str
    requirement: str
    satisfied: bool
    justification: str


@dataclass
class RegularityReport:
    target: str
    verdict: str  # 'holds' | 'fails' | 'unknown'
    s: Optional[float] = None
    sigma: Optional[float] = None
    edges: List[EdgeCheck] = field(default_factory=list)
    vertices: List[VertexCheck] = field(default_factory=list)
    s_interval: Optional[Interval] = None
    binding: str = ""
    sharp: List[str] = field(default_factory=list)
    assumptions: List[str] = field(default_factory=list)
    citations: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "verdict": self.verdict,
            "s": None if self.s is None else float(self.s),
            "sigma": None if self.sigma is None else float(self.sigma),
            "edges": [{"edge": e.edge, "theta": e.theta, "mu": e.mu,
                       "mu_provenance": e.mu_provenance,
                       "requirement": e.requirement, "satisfied": e.satisfied}
                      for e in self.edges],
            "vertices": [{"vertex": v.vertex, "finding": v.finding,
                          "requirement": v.requirement, "satisfied": v.satisfied,
                          "justification": v.justification}
                         for v in self.vertices],
            "s_interval": None if self.s_interval is None else self.s_interval.to_dict(),
            "binding": self.binding,
            "sharp": list(self.sharp),
            "assumptions": list(self.assumptions),
            "citations": list(self.citations),
            "notes": list(self.notes),
        }

    @staticmethod
    def from_dict(d: dict) -> "RegularityReport":
        rep = RegularityReport(d["target"], d["verdict"], d.get("s"), d.get("sigma"))
        rep.edges = [EdgeCheck(e["edge"], e["theta"], e["mu"], e["mu_provenance"],
                               e["requirement"], e["satisfied"]) for e in d["edges"]]
        rep.vertices = [VertexCheck(v["vertex"], v["finding"], v["requirement"],
                                    v["satisfied"], v["justification"])
                        for v in d["vertices"]]
        if d.get("s_interval") is not None:
            rep.s_interval = Interval.from_dict(d["s_interval"])
        rep.binding = d.get("binding", "")
        rep.sharp = list(d.get("sharp", []))
        rep.assumptions = list(d.get("assumptions", []))
        rep.citations = list(d.get("citations", []))
        rep.notes = list(d.get("notes", []))
        return rep


# -- shared helpers ---------------------------------------------------------------

def _slip_class(spec: ProblemSpec) -> bool:
    """Exactly one slip face in an otherwise velocity-prescribed convex solid,
    with every edge of the slip face opening below pi/2 (the R5 configuration)."""
    ds = spec.bc.values()
    slip_faces = [k for k, d in enumerate(ds) if d == 2]
    if len(slip_faces) != 1 or any(d not in (0, 2) for d in ds):
        return False
    if not spec.poly.is_convex():
        return False
    k = slip_faces[0]
    return all(e.theta < 0.5 * math.pi - 1e-12
               for e in spec.poly.edges if k in e.adjacent_faces)


def vertex_findings(spec: ProblemSpec) -> Dict[int, StripFinding]:
    convex = spec.poly.is_convex()
    slip_class = _slip_class(spec)
    findings = {}
    for v in range(len(spec.poly.vertices)):
        cone = spec.poly.vertex_cone(v)
        incident = [spec.bc.d[k] for k in spec.poly.incident_faces(v)]
        pairs = [spec.bc.pair(e) for e in spec.poly.incident_edges(v)]
        finding = eigenfree_strip(
            cone, incident, pairs, spec.vertex_bounds.get(v),
            convex=convex, lipschitz_graph=spec.flags.lipschitz_graph,
            slip_class=slip_class)
        if spec.flags.lipschitz_graph and "R3" in finding.rules and \
                not graph_direction_feasible(cone.normals):
            # the flag is honored (it is an assumption, never tested by the
            # source results) but the heuristic disagreement is surfaced
            finding = StripFinding(finding.vertex, finding.free, finding.exceptional,
                                   finding.rules, finding.assumptions +
                                   ("graph-direction heuristic could not confirm the "
                                    "Lipschitz assumption at this vertex",))
        findings[v] = finding
    return findings


def _edge_mu(spec: ProblemSpec, edge: Edge, numeric_n: int = 32) -> MuValue:
    """Exact exponent for the equal-condition pairs, guaranteed bound for the
    mixed pairs covered by one, numeric solve otherwise."""
    d_plus, d_minus = spec.bc.pair(edge)
    pair = tuple(sorted((d_plus, d_minus)))
    if pair in ((0, 0), (3, 3)):
        return mu_k(spec.poly, spec.bc, edge)
    bound = mu_lower_bound(d_plus, d_minus, edge.theta)
    if bound is not None:
        return bound
    return mu_k(spec.poly, spec.bc, edge, method="numeric", n=numeric_n)


def _edge_inequality(mu: MuValue, lower_gap: Eps, weighted: Eps, upper: Eps
                     ) -> Tuple[MuValue, bool]:
    """Test max(gap - mu, 0) < weighted < upper.

    The guaranteed class bounds are strict (mu exceeds them), so gap - bound
    <= weighted already implies the strict inequality for the exponent itself.
    Bounds are deliberately not refined numerically here: point checks and the
    interval scan must agree, and the scan's exact rational endpoints come
    from the bounds.  Callers wanting sharper mixed-edge values request the
    numeric exponent explicitly.
    """
    if not weighted < upper:
        return mu, False
    if not as_eps(0) < weighted:
        return mu, False
    need = lower_gap - mu.value
    passes = need <= weighted if mu.is_lower_bound else need < weighted
    return mu, passes


def _strip_for(level: Eps, lo_anchor=Fraction(-1, 2), lo_closed=True,
               hi_closed=True) -> Strip:
    """Strip between the anchor line and the level line, whichever order."""
    anchor = as_eps(lo_anchor)
    if level >= anchor:
        return Strip(anchor, level, lo_closed, hi_closed)
    return Strip(level, anchor, hi_closed, lo_closed)


def _aggregate(ok_edges: bool, ok_vertices: bool, definite_fail: bool,
               unknowns: bool) -> str:
    if definite_fail or not ok_edges:
        return "fails"
    if unknowns:
        return "unknown"
    return "holds" if ok_vertices else "fails"


# -- the theorem checks -------------------------------------------------------------

def check(spec: ProblemSpec, query: RegularityQuery, numeric_n: int = 32) -> RegularityReport:
    if query.target == "W1":
        return _check_sobolev(spec, query, order=1, numeric_n=numeric_n)
    if query.target == "W2":
        return _check_sobolev(spec, query, order=2, numeric_n=numeric_n)
    if query.target in ("C1", "C2"):
        return _check_holder(spec, query, order=int(query.target[1]), numeric_n=numeric_n)
    return _check_existence(spec, query, numeric_n=numeric_n)


def _flag_requirements(spec: ProblemSpec, query: RegularityQuery) -> Tuple[List[str], List[str]]:
    """(assumption echoes, missing assumption names)."""
    echoes, missing = [], []
    def need(flag: bool, name: str):
        echoes.append("%s: %s" % (name, "asserted" if flag else "NOT asserted"))
        if not flag:
            missing.append(name)
    need(spec.flags.data_in_required_spaces, "data in the required spaces")
    if query.target in ("W2", "C1", "C2"):
        need(spec.flags.compatibility_conditions_hold,
             "edge compatibility conditions (existence of a lifting)")
    if query.target == "EXIST":
        need(spec.flags.small_data, "data norm sufficiently small")
        if set(spec.bc.values()) <= {0, 2}:
            need(spec.flags.compatibility_conditions_hold,
                 "flux compatibility for the velocity/slip-only configuration")
    return echoes, missing


def _check_sobolev(spec: ProblemSpec, query: RegularityQuery, order: int,
                   numeric_n: int) -> RegularityReport:
    s = query.s
    rep = RegularityReport(query.target, "unknown", s=float(s))
    echoes, missing = _flag_requirements(spec, query)
    rep.assumptions = echoes
    two_s = as_eps(2 * _frac_inv(s))
    three_s = as_eps(3 * _frac_inv(s))
    gap = as_eps(order)
    definite_fail = False
    floors_ok = True
    if order == 1 and spec.kind == "navier-stokes" and not s > Fraction(6, 5):
        floors_ok = False
        rep.notes.append("nonlinear first-order result needs s > 6/5")
    betas = query.betas(len(spec.poly.vertices))
    deltas = query.deltas(len(spec.poly.edges))
    if order == 2 and spec.kind == "navier-stokes":
        # the weight floor of the second-order nonlinear result; vacuous when
        # the iteration starts at the target weights (beta_j >= 2 - 3/s)
        for j, b in enumerate(betas):
            if b < as_eps(2) - three_s and not b + three_s < as_eps(Fraction(5, 2)):
                floors_ok = False
                rep.notes.append("vertex %d: weight floor beta + 3/s < 5/2 violated" % j)
    # edges: max(order - mu, 0) < delta + 2/s < order
    edges_ok = True
    for e, dk in zip(spec.poly.edges, deltas):
        mu = _edge_mu(spec, e, numeric_n)
        weighted = dk + two_s
        mu, ok = _edge_inequality(mu, gap, weighted, gap)
        req = "max(%d-mu, 0) < delta+2/s=%s < %d" % (order, weighted, order)
        rep.edges.append(EdgeCheck(e.id, e.theta, mu.value, mu.provenance, req, ok))
        if not ok and mu.is_lower_bound:
            rep.notes.append("edge %d: the guaranteed exponent bound could not certify "
                             "the condition; a numeric pencil solve may sharpen it" % e.id)
        edges_ok = edges_ok and ok
    # vertices: no eigenvalues in the closed strip between -1/2 and order-beta-3/s
    findings = vertex_findings(spec)
    guaranteed = known_exceptional(spec.bc.values())
    vertices_ok = True
    any_unknown = False
    for v, b in enumerate(betas):
        level = as_eps(order) - b - three_s
        target = _strip_for(level)
        ok, why = strip_condition_holds(findings[v], target)
        if not ok and query.is_nonweighted():
            row = _row_fallback(spec, query.target, s)
            if row is not None:
                ok, why = True, "class result %s: admissible interval %s" % (row.row_id, row.interval)
                rep.citations.append("class:%s" % row.row_id)
        if not ok and any(target.contains_value(g) for g in guaranteed):
            definite_fail = True
            why += "; a guaranteed eigenvalue of this configuration lies in the strip"
        elif not ok and findings[v].unknown:
            any_unknown = True
        rep.vertices.append(VertexCheck(v, findings[v].describe(), str(target), ok, why))
        vertices_ok = vertices_ok and ok
        rep.citations.extend("vertex-rule:%s" % r for r in findings[v].rules)
    rep.citations = sorted(set(rep.citations))
    if missing:
        any_unknown = True
        rep.notes.extend("assumption not asserted: %s" % m for m in missing)
    verdict = _aggregate(edges_ok and floors_ok, vertices_ok, definite_fail, any_unknown)
    rep.verdict = verdict
    return sharpness_flags(rep)


def _check_holder(spec: ProblemSpec, query: RegularityQuery, order: int,
                  numeric_n: int) -> RegularityReport:
    sigma = as_eps(query.sigma)
    rep = RegularityReport(query.target, "unknown", sigma=float(query.sigma))
    echoes, missing = _flag_requirements(spec, query)
    rep.assumptions = echoes
    betas = query.betas(len(spec.poly.vertices))
    deltas = query.deltas(len(spec.poly.edges))
    definite_fail = False
    floors_ok = True
    cap = as_eps(Fraction(1, 2) + order)  # 3/2 for first order, 5/2 for second
    for j, b in enumerate(betas):
        if not b - sigma < cap:
            floors_ok = False
            rep.notes.append("vertex %d: beta - sigma must stay below %s" % (j, cap))
    gap = as_eps(order)
    edges_ok = True
    for e, dk in zip(spec.poly.edges, deltas):
        if dk < 0:
            rep.edges.append(EdgeCheck(e.id, e.theta, 0.0, "-",
                                       "edge weights must be nonnegative", False))
            edges_ok = False
            continue
        if dk == sigma or (order == 2 and dk == as_eps(1) + sigma):
            rep.edges.append(EdgeCheck(e.id, e.theta, 0.0, "-",
                                       "delta equals an excluded resonance value", False))
            edges_ok = False
            continue
        mu = _edge_mu(spec, e, numeric_n)
        centered = dk - sigma
        # order - mu < delta - sigma < order (no positive-part clamp here)
        ok_hi = centered < gap
        need = gap - mu.value
        ok_lo = need <= centered if mu.is_lower_bound else need < centered
        ok = ok_hi and ok_lo
        req = "%d-mu < delta-sigma=%s < %d" % (order, centered, order)
        rep.edges.append(EdgeCheck(e.id, e.theta, mu.value, mu.provenance, req, ok))
        edges_ok = edges_ok and ok
    findings = vertex_findings(spec)
    guaranteed = known_exceptional(spec.bc.values())
    vertices_ok = True
    any_unknown = False
    for v, b in enumerate(betas):
        level = as_eps(order) + sigma - b
        # open at the energy line, closed at the level line
        target = Strip(as_eps(Fraction(-1, 2)), level, False, True) if level >= as_eps(Fraction(-1, 2)) \
            else Strip(level, as_eps(Fraction(-1, 2)), True, False)
        ok, why = strip_condition_holds(findings[v], target)
        if not ok and any(target.contains_value(g) for g in guaranteed):
            definite_fail = True
            why += "; a guaranteed eigenvalue of this configuration lies in the strip"
        elif not ok and findings[v].unknown:
            any_unknown = True
        rep.vertices.append(VertexCheck(v, findings[v].describe(), str(target), ok, why))
        vertices_ok = vertices_ok and ok
        rep.citations.extend("vertex-rule:%s" % r for r in findings[v].rules)
    rep.citations = sorted(set(rep.citations))
    if missing:
        any_unknown = True
        rep.notes.extend("assumption not asserted: %s" % m for m in missing)
    rep.verdict = _aggregate(edges_ok and floors_ok, vertices_ok, definite_fail, any_unknown)
    return sharpness_flags(rep)


def _check_existence(spec: ProblemSpec, query: RegularityQuery,
                     numeric_n: int) -> RegularityReport:
    s = query.s
    rep = RegularityReport("EXIST", "unknown", s=float(s))
    for e in spec.poly.edges:
        if 0 not in spec.bc.pair(e):
            raise ValueError(
                "edge %d has no velocity-prescribed adjoining face; the small-data "
                "existence result requires one on every edge" % e.id)
    echoes, missing = _flag_requirements(spec, query)
    rep.assumptions = echoes
    betas = query.betas(len(spec.poly.vertices))
    deltas = query.deltas(len(spec.poly.edges))
    three_s = as_eps(3 * _frac_inv(s))
    two_s = as_eps(2 * _frac_inv(s))
    floors_ok = True
    if not s > Fraction(3, 2):
        floors_ok = False
        rep.notes.append("existence result needs s > 3/2")
    for j, b in enumerate(betas):
        if not b + three_s <= as_eps(2):
            floors_ok = False
            rep.notes.append("vertex %d: beta + 3/s must not exceed 2" % j)
    for k, dk in enumerate(deltas):
        if not dk + three_s <= as_eps(2):
            floors_ok = False
            rep.notes.append("edge %d: delta + 3/s must not exceed 2" % k)
    # weight window around the first edge eigenvalue
    edges_ok = True
    for e, dk in zip(spec.poly.edges, deltas):
        d_plus, d_minus = spec.bc.pair(e)
        lam1 = lambda1_of_edge(d_plus, d_minus, e.theta, n=numeric_n)
        weighted = dk + two_s
        ok = as_eps(1 - lam1.value) < weighted and weighted < as_eps(1 + lam1.value)
        req = "1-Re(lambda1) < delta+2/s=%s < 1+Re(lambda1)" % weighted
        rep.edges.append(EdgeCheck(e.id, e.theta, lam1.value, lam1.provenance, req, ok))
        edges_ok = edges_ok and ok
    findings = vertex_findings(spec)
    guaranteed = known_exceptional(spec.bc.values())
    vertices_ok = True
    any_unknown = False
    definite_fail = False
    for v, b in enumerate(betas):
        level = as_eps(1) - b - three_s
        target = _strip_for(level)
        ok, why = strip_condition_holds(findings[v], target)
        if not ok and query.is_nonweighted():
            row = _row_fallback(spec, "EXIST", s)
            if row is not None:
                ok, why = True, "class result %s: admissible interval %s" % (row.row_id, row.interval)
                rep.citations.append("class:%s" % row.row_id)
        if not ok and any(target.contains_value(g) for g in guaranteed):
            definite_fail = True
        elif not ok and findings[v].unknown:
            any_unknown = True
        rep.vertices.append(VertexCheck(v, findings[v].describe(), str(target), ok, why))
        vertices_ok = vertices_ok and ok
        rep.citations.extend("vertex-rule:%s" % r for r in findings[v].rules)
    rep.citations = sorted(set(rep.citations))
    if missing:
        any_unknown = True
        rep.notes.extend("assumption not asserted: %s" % m for m in missing)
    rep.verdict = _aggregate(edges_ok and floors_ok, vertices_ok, definite_fail, any_unknown)
    return rep


def _frac_inv(s):
    if isinstance(s, (int, Fraction)):
        return Fraction(1, 1) / Fraction(s)
    return 1.0 / s


# -- admissible interval scan ----------------------------------------------------

@dataclass
class _Constraint:
    interval: Interval
    label: str


def _vertex_interval(finding: StripFinding, order: int, label: str) -> Optional[_Constraint]:
    """Admissible s-range from one vertex strip at zero weights.

    The required strip runs between -1/2 and L(s) = order - 3/s.
    """
    if finding.unknown:
        return None
    free = finding.free
    lo_s: Tuple[Union[Fraction, float], bool] = (Fraction(1), False)
    hi_s: Tuple[Union[Fraction, float], bool] = (_INF, True)
    # upper side: L(s) must stay within the free strip's upper end
    hi_end = free.hi
    if as_eps(hi_end) < as_eps(order):
        bound = _solve_level(order, hi_end)
        hi_s = _tighter_hi(hi_s, (bound, free.hi_closed))
    for value, _note in finding.exceptional:
        if as_eps(Fraction(-1, 2)) < as_eps(value) < as_eps(order):
            bound = _solve_level(order, value)
            hi_s = _tighter_hi(hi_s, (bound, False))
    # lower side: L(s) below -1/2 must still be covered
    lo_end = free.lo
    if as_eps(lo_end) > as_eps(order - 3):  # otherwise every s > 1 is covered below
        bound = _solve_level(order, lo_end)
        lo_s = _tighter_lo(lo_s, (bound, free.lo_closed))
    for value, _note in finding.exceptional:
        if as_eps(value) < as_eps(Fraction(-1, 2)):
            bound = _solve_level(order, value)
            lo_s = _tighter_lo(lo_s, (bound, False))
    return _Constraint(Interval(lo_s[0], hi_s[0], lo_s[1], hi_s[1]),
                       "%s strip %s" % (label, finding.free))


def _solve_level(order: int, level) -> Union[Fraction, float]:
    """Solve order - 3/s = level for s (epsilon parts of rule strips are zero)."""
    diff = as_eps(order) - as_eps(level)
    val = diff.val
    if isinstance(val, (int, Fraction)):
        return Fraction(3) / Fraction(val)
    return 3.0 / float(val)


def _tighter_hi(cur, cand):
    if cand[0] < cur[0] or (cand[0] == cur[0] and not cand[1] and cur[1]):
        return cand
    return cur


def _tighter_lo(cur, cand):
    if cand[0] > cur[0] or (cand[0] == cur[0] and not cand[1] and cur[1]):
        return cand
    return cur


def max_s(spec: ProblemSpec, target: str, numeric_n: int = 32) -> RegularityReport:
    """Admissible nonweighted s-interval for a first/second-order or existence
    target, with the binding constraint named.

    Equal-condition edges use the exact exponent; changed-condition edges use
    the guaranteed class bounds so the interval endpoints stay exact rationals
    where the worked examples state them.
    """
    if target not in ("W1", "W2", "EXIST"):
        raise ValueError("max_s supports W1, W2 and EXIST")
    rep = RegularityReport(target, "holds")
    constraints: List[_Constraint] = []
    conditional = False
    if target == "W1":
        base = Interval(Fraction(2), _INF, False, True)
        constraints.append(_Constraint(base, "edge weight window delta+2/s < 1 at zero weights"))
        if spec.kind == "navier-stokes":
            rep.notes.append("nonlinear floor s > 6/5 subsumed by s > 2")
        order = 1
    elif target == "W2":
        base = Interval(Fraction(1), _INF, False, True)
        constraints.append(_Constraint(base, "edge weight window delta+2/s < 2 at zero weights"))
        if spec.kind == "navier-stokes":
            constraints.append(_Constraint(Interval(Fraction(6, 5), _INF, False, True),
                                           "nonlinear weight floor at zero weights"))
        order = 2
    else:
        for e in spec.poly.edges:
            if 0 not in spec.bc.pair(e):
                raise ValueError("edge %d has no velocity-prescribed adjoining face" % e.id)
        constraints.append(_Constraint(Interval(Fraction(3, 2), _INF, False, True),
                                       "existence needs s > 3/2"))
        order = 1
    # edges
    for e in spec.poly.edges:
        if target == "EXIST":
            lam1 = lambda1_of_edge(*spec.bc.pair(e), e.theta, n=numeric_n)
            v = lam1.value
            if lam1.is_lower_bound:
                # the first-eigenvalue bounds may be attained, so the weight
                # window stays strict at both ends
                b = _q_bound(lam1)
                hi = Fraction(2) / (1 - b) if b < 1 else _INF
                iv = Interval(Fraction(2) / (1 + b), hi, False, b >= 1)
            else:
                hi = _q(2) / _q(1 - v) if v < 1 else _INF
                iv = Interval(_q(2) / _q(1 + v), hi, False, v >= 1)
            rep.edges.append(EdgeCheck(e.id, e.theta, v, lam1.provenance,
                                       "weight window around the first eigenvalue", True))
            constraints.append(_Constraint(iv, "edge %d (theta=%.6g)" % (e.id, e.theta)))
            continue
        mu = _edge_mu(spec, e, numeric_n)
        rep.edges.append(EdgeCheck(e.id, e.theta, mu.value, mu.provenance,
                                   "s below 2/(%d - mu) when mu < %d" % (order, order), True))
        if mu.is_lower_bound:
            b = _q_bound(mu)
            if b < order:
                constraints.append(_Constraint(
                    Interval(Fraction(1), Fraction(2) / (order - b), False, True),
                    "edge %d via guaranteed bound mu > %s" % (e.id, b)))
        else:
            if mu.value < order:
                constraints.append(_Constraint(
                    Interval(Fraction(1), 2.0 / (order - mu.value), False, False),
                    "edge %d (theta=%.6g)" % (e.id, e.theta)))
    # vertices; a matching class row widens what the per-vertex rules certify
    findings = vertex_findings(spec)
    row = _row_fallback(spec, target, None)
    for v, f in findings.items():
        c = _vertex_interval(f, order, "vertex %d" % v)
        if c is not None and row is not None:
            merged = _union(c.interval, row.interval)
            if merged is not None:
                c = _Constraint(merged, c.label + " widened by class result %s" % row.row_id)
                rep.citations.append("class:%s" % row.row_id)
        if c is None:
            if row is not None:
                constraints.append(_Constraint(row.interval,
                                               "vertex %d via class result %s" % (v, row.row_id)))
                rep.citations.append("class:%s" % row.row_id)
                rep.vertices.append(VertexCheck(v, f.describe(), "class fallback", True,
                                                "class result %s" % row.row_id))
            else:
                conditional = True
                rep.vertices.append(VertexCheck(v, f.describe(), "-", False,
                                                "no rule; interval conditional on overrides"))
            continue
        rep.vertices.append(VertexCheck(v, f.describe(), str(c.interval), True, c.label))
        constraints.append(c)
    result = _EVERYTHING
    binding_lo = binding_hi = "none"
    for c in constraints:
        before = result
        result = result.intersect(c.interval)
        if result.hi != before.hi or result.hi_closed != before.hi_closed:
            binding_hi = c.label
        if result.lo != before.lo or result.lo_closed != before.lo_closed:
            binding_lo = c.label
    rep.s_interval = result
    rep.binding = "upper: %s; lower: %s" % (binding_hi, binding_lo)
    rep.verdict = "unknown" if conditional or result.is_empty() else "holds"
    if conditional:
        rep.notes.append("some vertex strips are uncertified; supply override bounds")
    rep.notes.append(
        "monotone closure: on a bounded domain the conclusion spaces include one "
        "another as s decreases, so the stated conclusions persist below the "
        "reported interval; the reported endpoints are the theorem-exact ones")
    rep.citations = sorted(set(rep.citations))
    return sharpness_flags(rep) if target in ("W1", "W2") else rep


def _q_bound(mu: MuValue) -> Fraction:
    """Recover the exact rational behind a guaranteed bound value."""
    return Fraction(mu.value).limit_denominator(1000)


# -- decision table ---------------------------------------------------------------

@dataclass(frozen=True)
class DecisionRow:
    """One class-level worked-example result with exact rational endpoints."""

    row_id: str
    target: str
    description: str
    interval: Interval
    matches: Callable[[ProblemSpec], bool]
    derivation: str

    def to_dict(self):
        return {"row_id": self.row_id, "target": self.target,
                "description": self.description,
                "interval": self.interval.to_dict(), "derivation": self.derivation}


def _all_d(spec: ProblemSpec, *allowed) -> bool:
    return set(spec.bc.values()) <= set(allowed)


def _changed_edges(spec: ProblemSpec):
    return [e for e in spec.poly.edges
            if spec.bc.pair(e)[0] != spec.bc.pair(e)[1]]


def _dirichlet_adjacent(spec: ProblemSpec) -> bool:
    return all(0 in spec.bc.pair(e) for e in spec.poly.edges)


def decision_table() -> Tuple[DecisionRow, ...]:
    F = Fraction
    rows = [
        DecisionRow(
            "velocity-any-W1", "W1",
            "velocity prescribed everywhere, arbitrary polyhedron",
            Interval(F(2), F(3), False, True),
            lambda sp: _all_d(sp, 0),
            "edge exponents exceed 1/2 (upper edge limit 4); the generic vertex "
            "strip [-1/2, 0] caps 1-3/s at 0, closed endpoint s = 3"),
        DecisionRow(
            "velocity-convex-W1", "W1",
            "velocity prescribed everywhere, convex polyhedron",
            Interval(F(2), _INF, False, True),
            lambda sp: _all_d(sp, 0) and sp.poly.is_convex(),
            "edge exponents exceed 1; half-space vertex strip [-1/2, 1) never "
            "caps 1-3/s; only the weight window s > 2 remains"),
        DecisionRow(
            "velocity-any-W2", "W2",
            "velocity prescribed everywhere, arbitrary polyhedron",
            Interval(F(1), F(4, 3), False, True),
            lambda sp: _all_d(sp, 0),
            "edge exponents exceed 1/2: 2/s must reach 3/2, closed endpoint 4/3"),
        DecisionRow(
            "velocity-any-W2-narrow", "W2",
            "velocity prescribed everywhere, edge openings below the 2/3-threshold angle",
            Interval(F(1), F(3, 2), False, True),
            lambda sp: _all_d(sp, 0) and all(
                e.theta < MU_THRESHOLD_TWO_THIRDS for e in sp.poly.edges),
            "edge exponents exceed 2/3: closed endpoint 3/2"),
        DecisionRow(
            "velocity-convex-W2", "W2",
            "velocity prescribed everywhere, convex polyhedron",
            Interval(F(1), F(2), False, True),
            lambda sp: _all_d(sp, 0) and sp.poly.is_convex(),
            "edge exponents exceed 1: closed endpoint 2; the half-space vertex "
            "strip allows s < 3, not binding"),
        DecisionRow(
            "velocity-convex-W2-narrow", "W2",
            "velocity prescribed everywhere, convex, edge openings below 3*pi/4",
            Interval(F(1), F(3), False, False),
            lambda sp: _all_d(sp, 0) and sp.poly.is_convex() and all(
                e.theta < 0.75 * math.pi for e in sp.poly.edges),
            "edge exponents exceed 4/3 (edge endpoint 3, closed); the constant-"
            "pressure vertex eigenvalue at 1 makes 2-3/s = 1 inadmissible: open 3"),
        DecisionRow(
            "stress-lipschitz-W1", "W1",
            "stress prescribed everywhere, Lipschitz-graph polyhedron",
            Interval(F(2), F(3), False, False),
            lambda sp: _all_d(sp, 3) and sp.flags.lipschitz_graph,
            "vertex strip [-1, 0] contains the exceptional eigenvalue 0, so "
            "1-3/s = 0 is inadmissible: open endpoint 3"),
        DecisionRow(
            "stress-lipschitz-W2", "W2",
            "stress prescribed everywhere, Lipschitz-graph polyhedron",
            Interval(F(1), F(4, 3), False, True),
            lambda sp: _all_d(sp, 3) and sp.flags.lipschitz_graph,
            "edge exponents exceed 1/2: closed endpoint 4/3 (vertex cap 3/2 "
            "open from the exceptional eigenvalue 0 is not binding)"),
        DecisionRow(
            "stress-lipschitz-W2-narrow", "W2",
            "stress everywhere, edge openings below the 2/3-threshold angle",
            Interval(F(1), F(3, 2), False, False),
            lambda sp: _all_d(sp, 3) and sp.flags.lipschitz_graph and all(
                e.theta < MU_THRESHOLD_TWO_THIRDS for e in sp.poly.edges),
            "edge endpoint 3/2 closed meets the open vertex cap 3/2 at the "
            "exceptional eigenvalue 0: open endpoint 3/2"),
        DecisionRow(
            "velocity-stress-W2", "W2",
            "velocity or stress on each face, both present",
            Interval(F(1), F(8, 7), False, True),
            lambda sp: _all_d(sp, 0, 3) and len(set(sp.bc.values())) == 2,
            "changed edges carry exponent above 1/4: 2/s must reach 7/4, "
            "closed endpoint 8/7"),
        DecisionRow(
            "no-stress-mixed-W1", "W1",
            "conditions of index <= 2, velocity on one side of every edge",
            Interval(F(2), F(8, 3), False, True),
            lambda sp: _all_d(sp, 0, 1, 2) and len(set(sp.bc.values())) >= 2
            and _dirichlet_adjacent(sp),
            "changed edges carry exponent above 1/4: 2/s must reach 3/4, closed "
            "endpoint 8/3; vertex strip [-1, 0] caps at 3, not binding"),
        DecisionRow(
            "no-stress-mixed-W1-narrow", "W1",
            "as above with changed edges opening below 3*pi/2",
            Interval(F(2), F(3), False, True),
            lambda sp: _all_d(sp, 0, 1, 2) and len(set(sp.bc.values())) >= 2
            and _dirichlet_adjacent(sp) and all(
                e.theta < 1.5 * math.pi for e in _changed_edges(sp)),
            "changed edges carry exponent above 1/3: edge endpoint 3 closed, "
            "agreeing with the vertex cap 3"),
        DecisionRow(
            "no-stress-mixed-W2", "W2",
            "conditions of index <= 2, velocity on one side of every edge",
            Interval(F(1), F(8, 7), False, True),
            lambda sp: _all_d(sp, 0, 1, 2) and len(set(sp.bc.values())) >= 2
            and _dirichlet_adjacent(sp),
            "changed edges carry exponent above 1/4: closed endpoint 8/7"),
        DecisionRow(
            "no-stress-mixed-W2-narrow", "W2",
            "as above with the angle conditions that push every exponent above 2/3",
            Interval(F(1), F(3, 2), False, True),
            lambda sp: _all_d(sp, 0, 1, 2) and len(set(sp.bc.values())) >= 2
            and _dirichlet_adjacent(sp) and _narrow_mixed_angles(sp),
            "every edge exponent exceeds 2/3: closed endpoint 3/2"),
        DecisionRow(
            "slip-one-face-W2", "W2",
            "convex, velocity everywhere except one slip face with edges below pi/2",
            Interval(F(1), F(2), False, True),
            lambda sp: _slip_class(sp),
            "every edge exponent exceeds 1: closed endpoint 2; the vertex strip "
            "[-1/2, 1] minus the simple eigenvalue 1 is not binding"),
        DecisionRow(
            "slip-one-face-W2-narrow", "W2",
            "as above with slip edges below 3*pi/8 and the rest below 3*pi/4",
            Interval(F(1), F(3), False, False),
            lambda sp: _slip_class(sp) and _narrow_slip_angles(sp),
            "every edge exponent exceeds 4/3 (edge endpoint 3 closed); the "
            "simple vertex eigenvalue at 1 makes 2-3/s = 1 inadmissible: open 3"),
        DecisionRow(
            "existence-velocity", "EXIST",
            "velocity prescribed everywhere, arbitrary polyhedron",
            Interval(F(3, 2), F(3), False, False),
            lambda sp: _all_d(sp, 0),
            "first edge eigenvalues are bounded below by 1/3 (class bound, "
            "attainable in the limit): strict window 3/2 < s < 3; the mixed "
            "vertex strip [-1, 0] gives the same closed range [3/2, 3]"),
        DecisionRow(
            "existence-no-stress-mixed", "EXIST",
            "conditions of index <= 2, velocity on one side of every edge, "
            "changed edges opening at most 3*pi/2",
            Interval(F(3, 2), F(3), False, False),
            lambda sp: _all_d(sp, 0, 1, 2) and _dirichlet_adjacent(sp) and all(
                e.theta <= 1.5 * math.pi + 1e-12 for e in _changed_edges(sp)),
            "first edge eigenvalues are bounded below by 1/3 with equality "
            "approachable at opening 3*pi/2: strict window 3/2 < s < 3"),
    ]
    return tuple(rows)


def _narrow_mixed_angles(sp: ProblemSpec) -> bool:
    for e in sp.poly.edges:
        pair = tuple(sorted(sp.bc.pair(e)))
        if pair == (0, 0) and not e.theta < MU_THRESHOLD_TWO_THIRDS:
            return False
        if pair == (0, 1) and not e.theta < 0.5 * MU_THRESHOLD_TWO_THIRDS:
            return False
        if pair == (0, 2) and not e.theta < 0.75 * math.pi:
            return False
    return True


def _narrow_slip_angles(sp: ProblemSpec) -> bool:
    for e in sp.poly.edges:
        pair = tuple(sorted(sp.bc.pair(e)))
        lim = 0.375 * math.pi if pair == (0, 2) else 0.75 * math.pi
        if not e.theta < lim:
            return False
    return True


def matching_rows(spec: ProblemSpec, target: Optional[str] = None) -> Tuple[DecisionRow, ...]:
    return tuple(r for r in decision_table()
                 if (target is None or r.target == target) and r.matches(spec))


def _row_fallback(spec: ProblemSpec, target: str, s) -> Optional[DecisionRow]:
    best = None
    for row in matching_rows(spec, target):
        if s is not None and not row.interval.contains(s):
            continue
        if best is None or _iv_wider(row.interval, best.interval):
            best = row
    return best


def _iv_wider(a: Interval, b: Interval) -> bool:
    return (a.hi, a.hi_closed) > (b.hi, b.hi_closed)


def _union(a: Interval, b: Interval) -> Optional[Interval]:
    """Union of two overlapping intervals; None when they are disjoint."""
    if a.lo > b.hi or b.lo > a.hi:
        return None
    if b.lo < a.lo or (b.lo == a.lo and b.lo_closed):
        lo, lo_c = b.lo, b.lo_closed or (b.lo == a.lo and a.lo_closed)
    else:
        lo, lo_c = a.lo, a.lo_closed
    if b.hi > a.hi or (b.hi == a.hi and b.hi_closed):
        hi, hi_c = b.hi, b.hi_closed or (b.hi == a.hi and a.hi_closed)
    else:
        hi, hi_c = a.hi, a.hi_closed
    return Interval(lo, hi, lo_c, hi_c)


# -- sharpness annotations -----------------------------------------------------------

def sharpness_flags(report: RegularityReport) -> RegularityReport:
    """Mark the weight-window lower boundaries that cannot be weakened."""
    if report.target == "W2":
        report.sharp = [
            "edge condition: the lower bound delta_k + 2/s > 2 - mu_k cannot be weakened",
            "vertex condition: the lower bound beta_j + 3/s > 2 - Re(smallest "
            "eigenvalue above -1/2) cannot be weakened",
        ]
    elif report.target in ("W1", "C1", "C2"):
        report.sharp = [
            "weight-window lower bounds are sharp by the same counterexample "
            "construction (stated for the first-order and Holder results)",
        ]
    else:
        report.sharp = []
    return report
