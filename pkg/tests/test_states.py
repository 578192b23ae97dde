import random
from fractions import Fraction

import pytest

from ample import groupoid as gpd
from ample import paradox as px
from ample import states as st
from ample import typesemigroup as ts
from ample.groupoid import cuntz, odometer, pair_groupoid, rotation
from ample.stone import clopen, whole


C2 = cuntz(2)
ODO = odometer()
ROT = rotation(3)


def test_cuntz_depth_one_system_shape():
    cs = st.build_constraints(C2, 1)
    assert cs.cells == ("1", "2")
    assert len(cs.equalities) == 2
    assert not cs.partial


def test_cuntz_depth_one_infeasible():
    cs = st.build_constraints(C2, 1)
    out = st.solve_state(cs)
    assert isinstance(out, st.FarkasCertificate)
    assert st.verify_farkas(cs, out)


def test_rotation_uniform_state():
    cs = st.build_constraints(ROT, 0)
    out = st.solve_state(cs)
    assert isinstance(out, st.StateVector)
    assert out.values == (Fraction(1, 3),) * 3
    assert st.verify_state(cs, out)


def test_pair_uniform_state():
    cs = st.build_constraints(pair_groupoid(2), 0)
    out = st.solve_state(cs)
    assert out.values == (Fraction(1, 2),) * 2


def test_odometer_product_measure_all_depths():
    for depth in range(4):
        cs = st.build_constraints(ODO, depth)
        out = st.solve_state(cs)
        assert isinstance(out, st.StateVector)
        assert all(v == Fraction(1, 2 ** depth) for v in out.values)
        assert st.verify_state(cs, out)
    assert st.build_constraints(ODO, 1).partial  # deep carry pieces skipped
    assert not st.build_constraints(ODO, 3).partial


def test_depth_monotone_infeasibility_on_cuntz():
    for depth in (1, 2, 3):
        out = st.solve_state(st.build_constraints(C2, depth))
        assert isinstance(out, st.FarkasCertificate)


def test_evaluate_examples():
    cs = st.build_constraints(ROT, 0)
    sv = st.solve_state(cs)
    f = ts.family_of(clopen(ROT.space, [0, 1]))
    assert st.evaluate(sv, f) == Fraction(2, 3)

    cso = st.build_constraints(ODO, 3)
    svo = st.solve_state(cso)
    fam = ts.normalize(
        ODO.space, [(clopen(ODO.space, ["12"]), 1), (clopen(ODO.space, ["21"]), 2)]
    )
    assert st.evaluate(svo, fam) == Fraction(1, 2)
    assert st.evaluate(svo, ts.LabeledFamily(ODO.space, ())) == 0


def test_evaluate_depth_guard():
    sv = st.solve_state(st.build_constraints(ODO, 1))
    with pytest.raises(st.DepthError):
        sv.evaluate_clopen(clopen(ODO.space, ["11"]))


def test_tarski_cuntz_paradox_at_depth_one():
    rep = st.tarski_report(C2, whole(C2.space), 1)
    assert rep.outcome == "paradox"
    assert (rep.witness.k, rep.witness.l) == (2, 1)
    assert px.verify_witness(C2, rep.witness).ok
    assert rep.farkas is not None


def test_tarski_rotation_state():
    rep = st.tarski_report(ROT, whole(ROT.space), 0)
    assert rep.outcome == "state"
    assert rep.state.values == (Fraction(1, 3),) * 3
    assert rep.scale == 1


def test_tarski_odometer_rescales_on_cylinder():
    a = clopen(ODO.space, ["1"])
    rep = st.tarski_report(ODO, a, 3, budget=20000)
    assert rep.outcome == "state"
    assert rep.scale == 2
    assert rep.state.evaluate_clopen(a) == 1


def test_tarski_rejects_empty_set():
    with pytest.raises(ValueError):
        st.tarski_report(C2, clopen(C2.space, []), 1)


def test_state_evaluation_invariant_under_certificates():
    sv = st.solve_state(st.build_constraints(ODO, 3))
    f = ts.family_of(clopen(ODO.space, ["1"]))
    g = ts.family_of(clopen(ODO.space, ["2"]))
    out = ts.search_equiv(ODO, f, g, 1, budget=50000)
    assert out.status == "found"
    assert st.evaluate(sv, f) == st.evaluate(sv, g)

    rng = random.Random(53)
    enum = gpd.enumerate_bisections(ODO, 2).bisections
    for _ in range(30):
        b = rng.choice(enum)
        dom, ran = b.dom(), b.ran()
        if dom.max_depth() > 3 or ran.max_depth() > 3 or dom.is_empty:
            continue
        cert = ts.EquivCertificate(((b, 1, 1),))
        fd, fr = ts.family_of(dom), ts.family_of(ran)
        assert ts.verify_equiv(ODO, fd, fr, cert).ok
        assert st.evaluate(sv, fd) == st.evaluate(sv, fr)


def test_probe_order_unit_on_cuntz():
    rep = st.probes(C2, 2, 12, seed=1, budget=20000)
    assert rep.depth == 2 and rep.seed == 1
    bounded = [r for r in rep.order_unit if r["bound"] is not None]
    assert bounded, "expected at least one certified order-unit bound"
    for r in bounded:
        assert r["bound"]["certified"]


def test_probe_specific_order_unit_pair():
    f_small = ts.family_of(clopen(C2.space, ["11"]))
    f_big = ts.family_of(clopen(C2.space, ["2"]))
    out = ts.search_leq(C2, f_small, f_big, 3, budget=50000)
    assert out.status == "found"
    assert ts.verify_leq(C2, f_small, f_big, out.certificate).ok


def test_probe_pair_groupoid_point_to_point():
    p3 = pair_groupoid(3)
    f0 = ts.family_of(clopen(p3.space, [0]))
    f1 = ts.family_of(clopen(p3.space, [1]))
    out = ts.search_leq(p3, f0, f1, 2, budget=20000)
    assert out.status == "found"
    assert out.certificate.remainder.is_empty


def test_probe_no_unperforation_counterexample_on_cuntz():
    rep = st.probes(C2, 2, 200, seed=7, budget=4000)
    assert rep.almost_unperforation is None


def test_farkas_file_constraints_travel():
    cs = st.build_constraints(C2, 1)
    assert all(note for _, note in cs.equalities)
