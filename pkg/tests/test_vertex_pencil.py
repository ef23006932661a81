import pytest

from polystokes import fixtures as fx
from polystokes.geometry import VertexBound
from polystokes.vertex_pencil import (Strip, StripFinding, eigenfree_strip,
                                      known_exceptional, strip_condition_holds)


def _finding(poly, bc, v, override=None, **kw):
    cone = poly.vertex_cone(v)
    incident = [bc.d[k] for k in poly.incident_faces(v)]
    pairs = [bc.pair(e) for e in poly.incident_edges(v)]
    return eigenfree_strip(cone, incident, pairs, override, **kw)


def test_cube_corner_all_dirichlet(cube):
    f = _finding(cube, fx.with_conditions(cube, 0), 0)
    assert "R2" in f.rules
    assert f.free.lo == -0.5 and f.free.hi == 1.0 and not f.free.hi_closed
    assert any(v == 1.0 for v, _ in f.exceptional)


def test_exterior_corner_falls_back_to_generic():
    ext = fx.cube(complement=True)
    f = _finding(ext, fx.with_conditions(ext, 0), 0)
    assert f.rules == ("R1",)
    assert (f.free.lo, f.free.hi) == (-0.5, 0.0)


def test_dirichlet_neumann_vertex_unknown(cube):
    bc = fx.with_conditions(cube, 0, {fx.top_face(cube): 3})
    top = [v for v in range(8) if fx.top_face(cube) in cube.incident_faces(v)]
    f = _finding(cube, bc, top[0])
    assert f.unknown


def test_all_neumann_needs_lipschitz(cube):
    bc = fx.with_conditions(cube, 3)
    f = _finding(cube, bc, 0)
    assert f.unknown
    assert any("Lipschitz" in a for a in f.assumptions)
    f = _finding(cube, bc, 0, lipschitz_graph=True)
    assert f.rules == ("R3",)
    assert (f.free.lo, f.free.hi) == (-1.0, 0.0)
    assert {v for v, _ in f.exceptional} == {0.0, 1.0}


def test_mixed_no_stress_gets_wide_strip(cube):
    bc = fx.with_conditions(cube, 0, {fx.top_face(cube): 2})
    top = [v for v in range(8) if fx.top_face(cube) in cube.incident_faces(v)]
    f = _finding(cube, bc, top[0])
    assert "R4" in f.rules
    assert f.free.lo == -1.0


def test_override_extends_strip(cube):
    ext = fx.cube(complement=True)
    f = _finding(ext, fx.with_conditions(ext, 0), 0,
                 override=VertexBound(0.317, "external table"))
    assert "R6" in f.rules
    assert f.free.hi == pytest.approx(0.317)
    assert not f.free.hi_closed


def test_override_must_exceed_energy_line():
    with pytest.raises(ValueError):
        VertexBound(-0.6)


def test_slip_class_rule():
    fr = fx.slip_frustum()
    bc = fx.with_conditions(fr, 0, {fx.top_face(fr): 2})
    top_vertices = [v for v in range(len(fr.vertices))
                    if fx.top_face(fr) in fr.incident_faces(v)]
    f = _finding(fr, bc, top_vertices[0], slip_class=True)
    assert "R5" in f.rules
    assert f.free.hi == 1.0 and f.free.hi_closed
    assert any(v == 1.0 for v, _ in f.exceptional)


# -- strip containment ------------------------------------------------------------

def test_strip_condition_examples(cube):
    r2 = _finding(cube, fx.with_conditions(cube, 0), 0)
    ok, _ = strip_condition_holds(r2, Strip(-0.5, 1 - 3 / 4))  # any s > 0 keeps 1-3/s < 1
    assert ok
    r1 = StripFinding(0, Strip(-0.5, 0.0))
    ok, _ = strip_condition_holds(r1, Strip(-0.5, -0.25))
    assert ok
    ok, why = strip_condition_holds(r1, Strip(-0.5, 0.5))
    assert not ok and "not inside" in why


def test_exceptional_blocks_closed_endpoint(cube):
    r2 = _finding(cube, fx.with_conditions(cube, 0), 0)
    ok, _ = strip_condition_holds(r2, Strip(-0.5, 1.0))
    assert not ok  # the eigenvalue at 1 is excluded only at an open endpoint
    f = StripFinding(0, Strip(-0.5, 1.0, True, True), ((1.0, "simple"),))
    ok, why = strip_condition_holds(f, Strip(-0.5, 1.0))
    assert not ok and "exceptional" in why
    ok, _ = strip_condition_holds(f, Strip(-0.5, 0.99))
    assert ok


def test_unknown_finding_never_holds():
    f = StripFinding(3, None)
    ok, why = strip_condition_holds(f, Strip(-0.5, 0.0))
    assert not ok and "no applicable rule" in why


def test_rule_monotone_in_assumptions(cube):
    # adding the half-space predicate never shrinks the generic strip
    r2 = _finding(cube, fx.with_conditions(cube, 0), 0)
    assert r2.free.contains_strip(Strip(-0.5, 0.0))


def test_condition_monotone_in_target(cube):
    import numpy as np
    rng = np.random.default_rng(11)
    f = _finding(cube, fx.with_conditions(cube, 0), 0)
    for _ in range(50):
        a = rng.uniform(-0.5, 0.9)
        b = rng.uniform(a, 0.99)
        a2 = rng.uniform(a, b)
        b2 = rng.uniform(a2, b)
        big, _ = strip_condition_holds(f, Strip(a, b))
        small, _ = strip_condition_holds(f, Strip(a2, b2))
        if big:
            assert small


def test_known_exceptional_catalogue():
    assert known_exceptional([0, 0, 2, 0]) == (1.0, -2.0)
    assert known_exceptional([3, 3, 3]) == (0.0, 1.0)
    assert known_exceptional([0, 1, 0]) == ()
