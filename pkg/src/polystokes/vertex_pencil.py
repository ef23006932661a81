"""Eigenvalue-free strips for the vertex pencils, by rule catalogue.

The vertex pencils act on the spherical cross-section of each corner cone;
their eigenvalues are not computed here.  Instead a catalogue of guaranteed
eigenvalue-free strips (with explicitly listed exceptional eigenvalues) is
applied, keyed on the boundary-condition pattern and cone predicates, plus a
user-supplied numeric-bound escape hatch justified by the monotonicity of the
eigenvalues with respect to cone inclusion.

Rules (applied by specificity; compatible findings are merged into one strip):

R1  velocity prescribed on every incident face: [-1/2, 0] free.
R2  as R1, cone contained in a half-space: [-1/2, 1) free; the simple
    eigenvalue 1 (constant-pressure eigenvector, no generalized ones) sits at
    the open end.
R3  stress prescribed on every incident face, Lipschitz-graph polyhedron:
    [-1, 0] with the exceptional eigenvalues 0 and 1 as stated (1 lies
    outside the quoted strip; kept verbatim and flagged in reports).
R4  conditions of index <= 2 only, at least two distinct indices, and the
    velocity prescribed on one side of every incident edge: [-1, 0] free.
R5  convex polyhedron, velocity everywhere except one slip face whose edges
    open below pi/2: [-1/2, 1] containing only the simple eigenvalue 1.
R6  user bound b > -1/2 on the smallest eigenvalue: extend the strip to
    [-1/2, b).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .geometry import VertexBound, VertexCone

__all__ = [
    "Strip",
    "StripFinding",
    "eigenfree_strip",
    "strip_condition_holds",
    "known_exceptional",
]


@dataclass(frozen=True)
class Strip:
    """An interval of real parts with endpoint openness flags."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty strip: lo > hi")

    def contains_value(self, x: float) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def contains_strip(self, other: "Strip") -> bool:
        lo_ok = other.lo > self.lo or (other.lo == self.lo
                                       and (self.lo_closed or not other.lo_closed))
        hi_ok = other.hi < self.hi or (other.hi == self.hi
                                       and (self.hi_closed or not other.hi_closed))
        return lo_ok and hi_ok

    def __str__(self):
        def fmt(x):
            try:
                return "%g" % x
            except TypeError:
                return str(x)
        return "%s%s, %s%s" % ("[" if self.lo_closed else "(", fmt(self.lo),
                               fmt(self.hi), "]" if self.hi_closed else ")")


@dataclass(frozen=True)
class StripFinding:
    """Certified eigenvalue-free strip at one vertex, or an explicit unknown."""

    vertex: int
    free: Optional[Strip]
    exceptional: Tuple[Tuple[float, str], ...] = ()
    rules: Tuple[str, ...] = ()
    assumptions: Tuple[str, ...] = ()

    @property
    def unknown(self) -> bool:
        return self.free is None

    def describe(self) -> str:
        if self.unknown:
            return "no applicable rule (%s)" % "; ".join(self.assumptions) if self.assumptions \
                else "no applicable rule"
        parts = ["free strip %s via %s" % (self.free, "+".join(self.rules))]
        if self.exceptional:
            parts.append("exceptional: " + ", ".join(
                "%g (%s)" % (v, note) for v, note in self.exceptional))
        return "; ".join(parts)


def _merge(base: Strip, extra: Strip) -> Strip:
    """Union of two overlapping freeness intervals."""
    if extra.lo > base.hi or base.lo > extra.hi:
        return base  # disjoint; keep the primary interval
    if extra.lo < base.lo or (extra.lo == base.lo and extra.lo_closed):
        lo, lo_closed = extra.lo, extra.lo_closed if extra.lo < base.lo else (extra.lo_closed or base.lo_closed)
    else:
        lo, lo_closed = base.lo, base.lo_closed
    if extra.hi > base.hi or (extra.hi == base.hi and extra.hi_closed):
        hi, hi_closed = extra.hi, extra.hi_closed if extra.hi > base.hi else (extra.hi_closed or base.hi_closed)
    else:
        hi, hi_closed = base.hi, base.hi_closed
    return Strip(lo, hi, lo_closed, hi_closed)


def eigenfree_strip(cone: VertexCone, incident_d: Sequence[int],
                    edge_pairs: Sequence[Tuple[int, int]],
                    override: Optional[VertexBound] = None, *,
                    convex: bool = False,
                    lipschitz_graph: Optional[bool] = None,
                    slip_class: bool = False) -> StripFinding:
    """Apply the rule catalogue at one vertex.

    ``incident_d`` are the condition indices of the faces meeting the vertex,
    ``edge_pairs`` the index pairs across its incident edges.  ``slip_class``
    asserts the R5 configuration (checked by the caller on the whole domain).
    Rules are tried from the most specific; every applicable strip is merged.
    """
    ds = set(incident_d)
    candidates: List[Tuple[str, Strip, Tuple[Tuple[float, str], ...], Tuple[str, ...]]] = []
    notes: List[str] = []
    if ds == {0}:
        if cone.contained_in_half_space:
            candidates.append(("R2", Strip(-0.5, 1.0, True, False),
                               ((1.0, "constant-pressure eigenvector, no generalized eigenvectors"),),
                               ("cone contained in a half-space",)))
        else:
            candidates.append(("R1", Strip(-0.5, 0.0), (), ()))
    elif ds == {3}:
        if lipschitz_graph:
            candidates.append(("R3", Strip(-1.0, 0.0),
                               ((0.0, "rigid motion"),
                                (1.0, "listed by the quoted statement although outside its strip")),
                               ("Lipschitz-graph polyhedron",)))
        else:
            notes.append("all-stress vertex needs the Lipschitz-graph assumption; refusing to guess")
    if slip_class and ds <= {0, 2} and 2 in ds:
        candidates.append(("R5", Strip(-0.5, 1.0, True, True),
                           ((1.0, "simple eigenvalue"),),
                           ("convex polyhedron", "single slip face with edge openings below pi/2")))
    if max(ds) <= 2 and len(ds) >= 2 and all(0 in pair for pair in edge_pairs):
        candidates.append(("R4", Strip(-1.0, 0.0), (), ()))
    if override is not None:
        candidates.append(("R6", Strip(-0.5, override.bound, True, False), (),
                           ("user bound via monotonicity over the enclosing circular cone: "
                            + (override.note or "unattributed"),)))
    if not candidates:
        return StripFinding(cone.vertex, None, (), (), tuple(notes))
    # order by catalogue number, merge all strips, keep every exceptional value
    candidates.sort(key=lambda c: c[0])
    free = candidates[0][1]
    for _, strip, _, _ in candidates[1:]:
        free = _merge(free, strip)
    exceptional: List[Tuple[float, str]] = []
    for _, _, exc, _ in candidates:
        for v, note in exc:
            if all(abs(v - w) > 1e-12 for w, _ in exceptional):
                exceptional.append((v, note))
    rules = tuple(c[0] for c in candidates)
    assumptions = tuple(dict.fromkeys(a for c in candidates for a in c[3])) + tuple(notes)
    return StripFinding(cone.vertex, free, tuple(sorted(exceptional)), rules, assumptions)


def strip_condition_holds(finding: StripFinding, target: Strip) -> Tuple[bool, str]:
    """Is the target strip certified free of eigenvalues?

    Endpoint openness is respected on both sides: an exceptional eigenvalue
    at an open target endpoint does not block, at a closed one it does.
    """
    if finding.unknown:
        return False, "vertex %d: %s" % (finding.vertex, finding.describe())
    if not finding.free.contains_strip(target):
        return False, ("vertex %d: required %s not inside certified %s"
                       % (finding.vertex, target, finding.free))
    for value, note in finding.exceptional:
        if target.contains_value(value):
            return False, ("vertex %d: exceptional eigenvalue %g (%s) lies in required %s"
                           % (finding.vertex, value, note, target))
    return True, ("vertex %d: %s covered by %s via %s"
                  % (finding.vertex, target, finding.free, "+".join(finding.rules)))


def known_exceptional(all_d: Sequence[int]) -> Tuple[float, ...]:
    """Eigenvalues every vertex pencil of the configuration must contain.

    With only velocity/slip conditions (indices 0 and 2) the spectra contain
    1 (eigenvector: zero velocity, constant pressure) and -2; with stress
    conditions everywhere they contain 0 and 1.  Nothing is guaranteed once a
    tangential-velocity face is present.
    """
    ds = set(all_d)
    if ds <= {0, 2}:
        return (1.0, -2.0)
    if ds == {3}:
        return (0.0, 1.0)
    return ()
