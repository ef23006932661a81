import json
import math
from fractions import Fraction as F

import numpy as np
import pytest

from polystokes import fixtures as fx
from polystokes.edge_pencil import MuValue
from polystokes.regularity import (DataFlags, Interval, ProblemSpec,
                                   RegularityQuery, RegularityReport, check,
                                   decision_table, matching_rows, max_s)
from polystokes.spaces import Eps

from conftest import ALL_FLAGS


@pytest.fixture(scope="module")
def step_slip(step):
    # slip on the wall that carries the reentrant 3*pi/2 edge, velocity elsewhere
    bc_values = {}
    reentrant = [e for e in step.edges if e.theta > math.pi][0]
    slip_face = reentrant.adjacent_faces[0]
    return ProblemSpec(step, fx.with_conditions(step, 0, {slip_face: 2}), ALL_FLAGS)


# -- first-order checks --------------------------------------------------------------

def test_step_first_order_point_checks(step_dirichlet):
    assert check(step_dirichlet, RegularityQuery("W1", s=F(4))).verdict == "holds"
    assert check(step_dirichlet, RegularityQuery("W1", s=F(9, 2))).verdict == "fails"
    assert check(step_dirichlet, RegularityQuery("W1", s=F(6, 5))).verdict == "fails"


def test_report_records_every_edge_and_vertex(step_dirichlet, step):
    rep = check(step_dirichlet, RegularityQuery("W1", s=F(4)))
    assert len(rep.edges) == len(step.edges)
    assert len(rep.vertices) == len(step.vertices)
    assert all(e.satisfied for e in rep.edges)
    assert all(v.satisfied for v in rep.vertices)


def test_missing_data_flag_gives_unknown(step):
    spec = ProblemSpec(step, fx.with_conditions(step, 0), DataFlags())
    rep = check(spec, RegularityQuery("W1", s=F(4)))
    assert rep.verdict == "unknown"
    assert any("not asserted" in n for n in rep.notes)


# -- second-order checks -------------------------------------------------------------

def test_step_second_order_thresholds(step_dirichlet):
    assert check(step_dirichlet, RegularityQuery("W2", s=F(137, 100))).verdict == "holds"
    assert check(step_dirichlet, RegularityQuery("W2", s=F(139, 100))).verdict == "fails"


def test_convex_second_order(cube_dirichlet):
    assert check(cube_dirichlet, RegularityQuery("W2", s=F(2))).verdict == "holds"
    # at s = 3 the required strip reaches the guaranteed eigenvalue at 1
    rep = check(cube_dirichlet, RegularityQuery("W2", s=F(3)))
    assert rep.verdict == "fails"


def test_mixed_velocity_stress_second_order(cube_neumann_top):
    assert check(cube_neumann_top, RegularityQuery("W2", s=F(8, 7))).verdict == "holds"
    rep = check(cube_neumann_top, RegularityQuery("W2", s=F(5, 4)))
    assert rep.verdict == "fails"
    assert any("numeric pencil solve may sharpen" in n for n in rep.notes)


# -- Holder checks ---------------------------------------------------------------

def test_holder_first_order_weighted(cube_dirichlet):
    sigma = F(1, 4)
    q = RegularityQuery("C1", sigma=sigma, beta=Eps(sigma, 1), delta=0)
    assert check(cube_dirichlet, q).verdict == "holds"
    # zero weights cannot work: the strip up to 1 + sigma reaches the
    # guaranteed constant-pressure eigenvalue
    assert check(cube_dirichlet, RegularityQuery("C1", sigma=sigma)).verdict == "fails"


def test_holder_sigma_capped_by_edge_exponent():
    # convex frustum with largest opening 3*pi/4: exponents reach down to 4/3,
    # so the Holder exponent must stay below 1/3
    fr = fx.slip_frustum()
    spec = ProblemSpec(fr, fx.with_conditions(fr, 0), ALL_FLAGS)
    good = RegularityQuery("C1", sigma=F(3, 10), beta=Eps(F(3, 10), 1), delta=0)
    bad = RegularityQuery("C1", sigma=F(2, 5), beta=Eps(F(2, 5), 1), delta=0)
    assert check(spec, good).verdict == "holds"
    assert check(spec, bad).verdict == "fails"


def test_holder_excluded_resonance(cube_dirichlet):
    sigma = F(1, 4)
    q = RegularityQuery("C1", sigma=sigma, beta=Eps(sigma, 1), delta=sigma)
    assert check(cube_dirichlet, q).verdict == "fails"


def test_holder_sigma_must_be_fractional(cube_dirichlet):
    with pytest.raises(ValueError):
        RegularityQuery("C1", sigma=1.0)


def test_holder_second_order(cube_dirichlet):
    sigma = F(1, 4)
    q = RegularityQuery("C2", sigma=sigma, beta=Eps(sigma, 1), delta=F(3, 2))
    # edges: 2 - mu = 0 < delta - sigma = 5/4 < 2, resonances avoided,
    # vertices: strip up to 2 + sigma - beta = 2 - eps needs more than R2 gives
    rep = check(cube_dirichlet, q)
    assert rep.verdict == "fails"
    q = RegularityQuery("C2", sigma=sigma, beta=Eps(F(5, 4), 1), delta=F(3, 2))
    assert check(cube_dirichlet, q).verdict == "holds"


# -- existence ------------------------------------------------------------------

def test_existence_velocity_everywhere(cube_dirichlet):
    assert check(cube_dirichlet, RegularityQuery("EXIST", s=F(5, 2))).verdict == "holds"
    assert check(cube_dirichlet, RegularityQuery("EXIST", s=F(7, 5))).verdict == "fails"


def test_existence_mixed_fails_at_three(step_slip):
    assert check(step_slip, RegularityQuery("EXIST", s=F(29, 10))).verdict == "holds"
    rep = check(step_slip, RegularityQuery("EXIST", s=F(3)))
    assert rep.verdict == "fails"
    bad = [e for e in rep.edges if not e.satisfied]
    assert bad and all(abs(e.mu - 1 / 3) < 1e-12 for e in bad)


def test_existence_requires_velocity_adjacency(cube):
    spec = ProblemSpec(cube, fx.with_conditions(cube, 3), ALL_FLAGS)
    with pytest.raises(ValueError, match="adjoining face"):
        check(spec, RegularityQuery("EXIST", s=F(2)))


# -- interval scans --------------------------------------------------------------

def test_step_scan_bounds(step_dirichlet):
    w1 = max_s(step_dirichlet, "W1")
    mu = 0.54448373
    assert float(w1.s_interval.hi) == pytest.approx(2 / (1 - mu), abs=1e-4)
    assert w1.s_interval.lo == F(2) and not w1.s_interval.lo_closed
    w2 = max_s(step_dirichlet, "W2")
    assert float(w2.s_interval.hi) == pytest.approx(2 / (2 - mu), abs=1e-4)
    assert float(w2.s_interval.hi) == pytest.approx(1.3740, abs=1e-4)
    assert "edge" in w1.binding


def test_convex_scan_unbounded(cube_dirichlet):
    w1 = max_s(cube_dirichlet, "W1")
    assert w1.s_interval.hi >= 10 ** 6  # no upper constraint
    w2 = max_s(cube_dirichlet, "W2")
    assert w2.s_interval.hi == F(3) and not w2.s_interval.hi_closed


def test_convex_scan_linear_kind(cube):
    spec = ProblemSpec(cube, fx.with_conditions(cube, 0), ALL_FLAGS, kind="stokes")
    w2 = max_s(spec, "W2")
    assert w2.s_interval.lo == F(1) and w2.s_interval.hi == F(3)


def test_mixed_scan_hits_eight_thirds(step_slip):
    w1 = max_s(step_slip, "W1")
    assert w1.s_interval.hi == F(8, 3) and w1.s_interval.hi_closed


def test_mixed_existence_window(step_slip):
    ex = max_s(step_slip, "EXIST")
    assert ex.s_interval == Interval(F(3, 2), F(3), False, False)


def test_exterior_cube_generic_vertex_cap():
    # no vertex cone of an exterior domain fits a half-space, so the
    # generic strip caps the first-order scan at the closed endpoint 3
    ext = fx.cube(complement=True)
    spec = ProblemSpec(ext, fx.with_conditions(ext, 0), ALL_FLAGS)
    w1 = max_s(spec, "W1")
    assert w1.s_interval.hi == F(3) and w1.s_interval.hi_closed
    assert "vertex" in w1.binding
    assert check(spec, RegularityQuery("W1", s=F(3))).verdict == "holds"
    assert check(spec, RegularityQuery("W1", s=F(16, 5))).verdict == "fails"


def test_scan_matches_point_checks(step_dirichlet, step_slip):
    rng = np.random.default_rng(3)
    for spec, target in ((step_dirichlet, "W1"), (step_dirichlet, "W2"),
                         (step_slip, "W1"), (step_slip, "EXIST")):
        iv = max_s(spec, target).s_interval
        lo, hi = float(iv.lo), float(iv.hi)
        inside = rng.uniform(lo + 1e-3, hi - 1e-3, size=10)
        above = rng.uniform(hi + 1e-3, hi + 1.0, size=10)
        for s in inside:
            assert check(spec, RegularityQuery(target, s=s)).verdict == "holds", (target, s)
        for s in above:
            assert check(spec, RegularityQuery(target, s=s)).verdict == "fails", (target, s)


def test_verdict_monotone_in_mu(step_dirichlet, monkeypatch):
    import polystokes.regularity as reg
    rng = np.random.default_rng(17)
    base_mu = reg._edge_mu
    flips = []
    for _ in range(50):
        s = F(int(rng.integers(21, 44)), 10)
        q = RegularityQuery("W1", s=s)
        monkeypatch.setattr(reg, "_edge_mu", base_mu)
        before = check(step_dirichlet, q).verdict
        bump = float(rng.uniform(0.01, 0.8))

        def inflated(spec, edge, numeric_n=32, _b=bump):
            mv = base_mu(spec, edge, numeric_n)
            return MuValue(mv.value + _b, mv.provenance, mv.role, False, mv.note)

        monkeypatch.setattr(reg, "_edge_mu", inflated)
        after = check(step_dirichlet, q).verdict
        if before == "holds":
            flips.append(after != "holds")
    monkeypatch.setattr(reg, "_edge_mu", base_mu)
    assert not any(flips)


# -- the class table ------------------------------------------------------------

PINNED = {
    "velocity-any-W1": Interval(F(2), F(3), False, True),
    "velocity-convex-W2": Interval(F(1), F(2), False, True),
    "velocity-convex-W2-narrow": Interval(F(1), F(3), False, False),
    "velocity-stress-W2": Interval(F(1), F(8, 7), False, True),
    "no-stress-mixed-W1": Interval(F(2), F(8, 3), False, True),
    "existence-velocity": Interval(F(3, 2), F(3), False, False),
}


def test_table_pinned_intervals():
    table = {r.row_id: r for r in decision_table()}
    for row_id, iv in PINNED.items():
        assert table[row_id].interval == iv, row_id


def test_table_upper_endpoints_rederived():
    # independent class-bound arithmetic: the edge constraint 2/s >= order - b
    # (closed, since the exponents strictly exceed the class bound b) against
    # the vertex cap 3/(order - strip_top)
    def edge_hi(order, b):
        return F(2) / (order - b)

    table = {r.row_id: r for r in decision_table()}
    assert table["velocity-any-W1"].interval.hi == min(edge_hi(1, F(1, 2)), F(3))
    assert table["velocity-any-W2"].interval.hi == edge_hi(2, F(1, 2))
    assert table["velocity-convex-W2"].interval.hi == edge_hi(2, F(1))
    assert table["velocity-stress-W2"].interval.hi == edge_hi(2, F(1, 4))
    assert table["no-stress-mixed-W1"].interval.hi == edge_hi(1, F(1, 4))
    assert table["no-stress-mixed-W2"].interval.hi == edge_hi(2, F(1, 4))
    # convex narrow: the edge cap 2/(2-4/3) = 3 is closed, but the vertex
    # eigenvalue at 1 caps 2 - 3/s strictly below 1: open endpoint 3
    assert table["velocity-convex-W2-narrow"].interval == Interval(F(1), F(3), False, False)
    # existence: the window around the first eigenvalue with the attainable
    # class bound 1/3 must stay strict on both sides
    b = F(1, 3)
    assert table["existence-velocity"].interval == \
        Interval(F(2) / (1 + b), F(2) / (1 - b), False, False)


def test_matching_rows(cube_dirichlet, step_dirichlet, cube_neumann_top):
    ids = {r.row_id for r in matching_rows(cube_dirichlet)}
    assert {"velocity-any-W1", "velocity-convex-W1", "velocity-convex-W2",
            "velocity-convex-W2-narrow", "existence-velocity"} <= ids
    ids = {r.row_id for r in matching_rows(step_dirichlet)}
    assert "velocity-convex-W2" not in ids
    assert "velocity-any-W1" in ids
    ids = {r.row_id for r in matching_rows(cube_neumann_top)}
    assert "velocity-stress-W2" in ids


def test_slip_class_rows():
    fr = fx.slip_frustum()
    spec = ProblemSpec(fr, fx.with_conditions(fr, 0, {fx.top_face(fr): 2}), ALL_FLAGS)
    ids = {r.row_id for r in matching_rows(spec)}
    assert "slip-one-face-W2" in ids
    assert check(spec, RegularityQuery("W2", s=F(2))).verdict == "holds"


# -- report plumbing ------------------------------------------------------------

def test_report_roundtrip(step_dirichlet):
    rep = max_s(step_dirichlet, "W1")
    blob = json.dumps(rep.to_dict(), sort_keys=True)
    back = RegularityReport.from_dict(json.loads(blob))
    assert back.to_dict() == rep.to_dict()


def test_reports_deterministic(step_dirichlet):
    a = json.dumps(check(step_dirichlet, RegularityQuery("W1", s=F(4))).to_dict(), sort_keys=True)
    b = json.dumps(check(step_dirichlet, RegularityQuery("W1", s=F(4))).to_dict(), sort_keys=True)
    assert a == b


def test_sharpness_annotations(step_dirichlet, cube_dirichlet):
    w2 = check(step_dirichlet, RegularityQuery("W2", s=F(137, 100)))
    assert any("cannot be weakened" in s for s in w2.sharp)
    w1 = check(step_dirichlet, RegularityQuery("W1", s=F(4)))
    assert any("sharp" in s for s in w1.sharp)
    ex = check(cube_dirichlet, RegularityQuery("EXIST", s=F(5, 2)))
    assert ex.sharp == []
