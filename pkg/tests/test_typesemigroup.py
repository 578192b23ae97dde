import random

import pytest

from ample import groupoid as gpd
from ample import stone
from ample import typesemigroup as ts
from ample.groupoid import cuntz, enumerate_bisections, from_word, identity_bisection, pair_groupoid
from ample.stone import clopen, whole


C2 = cuntz(2)
X = whole(C2.space)
U1 = from_word(C2, ((0, 1),))
U2 = from_word(C2, ((1, 1),))


def fam(space, *pairs):
    return ts.normalize(space, list(pairs))


def test_add_shifts_labels():
    a = clopen(C2.space, ["1"])
    b = clopen(C2.space, ["2"])
    out = ts.add(fam(C2.space, (a, 1)), fam(C2.space, (b, 1)))
    assert out.entries == (a, b)


def test_normalize_drops_empty_and_compresses():
    a = clopen(C2.space, ["1"])
    out = ts.normalize(C2.space, [(clopen(C2.space, []), 1), (a, 5)])
    assert out.entries == (a,)


def test_add_neutral_element():
    f = fam(C2.space, (X, 1))
    assert ts.add(f, ts.LabeledFamily(C2.space, ())) == f


def test_normalize_merges_equal_labels():
    out = ts.normalize(C2.space, [(clopen(C2.space, ["1"]), 2), (clopen(C2.space, ["2"]), 2)])
    assert out.entries == (X,)


def test_verify_reflexive_identity():
    f = fam(C2.space, (clopen(C2.space, ["1"]), 1))
    cert = ts.EquivCertificate(((identity_bisection(C2, clopen(C2.space, ["1"])), 1, 1),))
    assert ts.verify_equiv(C2, f, f, cert).ok


def test_verify_cuntz_doubling_certificate():
    f1 = fam(C2.space, (X, 1), (X, 2))
    f2 = fam(C2.space, (X, 1))
    cert = ts.EquivCertificate(((U1, 1, 1), (U2, 2, 1)))
    assert ts.verify_equiv(C2, f1, f2, cert).ok


def test_verify_rejects_overlapping_ranges():
    f1 = fam(C2.space, (X, 1), (X, 2))
    f2 = fam(C2.space, (X, 1))
    cert = ts.EquivCertificate(((U1, 1, 1), (U1, 2, 1)))
    res = ts.verify_equiv(C2, f1, f2, cert)
    assert not res.ok
    assert "overlap" in res.reason


def test_verify_rejects_wrong_union():
    f1 = fam(C2.space, (X, 1))
    f2 = fam(C2.space, (X, 1))
    cert = ts.EquivCertificate(((from_word(C2, ((0, 1),), domain=clopen(C2.space, ["1"])), 1, 1),))
    res = ts.verify_equiv(C2, f1, f2, cert)
    assert not res.ok


def test_certificate_algebra_symmetric():
    f1 = fam(C2.space, (X, 1), (X, 2))
    f2 = fam(C2.space, (X, 1))
    cert = ts.EquivCertificate(((U1, 1, 1), (U2, 2, 1)))
    back = ts.symmetric_cert(cert)
    assert ts.verify_equiv(C2, f2, f1, back).ok


def test_certificate_algebra_transitive_of_reflexives():
    f = fam(C2.space, (X, 1))
    r = ts.reflexive_cert(C2, f)
    out = ts.transitive_cert(C2, f, f, f, r, r)
    assert ts.verify_equiv(C2, f, f, out).ok


def test_transitive_of_cuntz_certificates():
    # X + X ~ X and X ~ (1X split with 2X) composed through the middle
    f1 = fam(C2.space, (X, 1), (X, 2))
    f2 = fam(C2.space, (X, 1))
    f3 = fam(C2.space, (clopen(C2.space, ["1"]), 1), (clopen(C2.space, ["2"]), 2))
    c1 = ts.EquivCertificate(((U1, 1, 1), (U2, 2, 1)))
    c2 = ts.EquivCertificate(
        ((identity_bisection(C2, clopen(C2.space, ["1"])), 1, 1),
         (identity_bisection(C2, clopen(C2.space, ["2"])), 1, 2))
    )
    assert ts.verify_equiv(C2, f2, f3, c2).ok
    out = ts.transitive_cert(C2, f1, f2, f3, c1, c2)
    assert ts.verify_equiv(C2, f1, f3, out).ok


def test_sum_certificates():
    a = clopen(C2.space, ["1"])
    fa = fam(C2.space, (a, 1))
    c = ts.sum_cert(C2, fa, fa, fa, fa, ts.reflexive_cert(C2, fa), ts.reflexive_cert(C2, fa))
    assert ts.verify_equiv(C2, ts.add(fa, fa), ts.add(fa, fa), c).ok


def test_certificate_algebra_rejects_bad_inputs():
    f1 = fam(C2.space, (X, 1))
    bad = ts.EquivCertificate(((U1, 1, 1),))
    with pytest.raises(ts.FamilyError):
        ts.transitive_cert(C2, f1, f1, f1, bad, bad)


def test_search_reflexive_at_depth_zero():
    f = fam(C2.space, (clopen(C2.space, ["1"]), 1))
    out = ts.search_equiv(C2, f, f, 0)
    assert out.status == "found"
    assert ts.verify_equiv(C2, f, f, out.certificate).ok


def test_search_cuntz_doubling():
    f1 = fam(C2.space, (X, 1), (X, 2))
    f2 = fam(C2.space, (X, 1))
    out = ts.search_equiv(C2, f1, f2, 1)
    assert out.status == "found"
    assert ts.verify_equiv(C2, f1, f2, out.certificate).ok


def test_search_pair_transposition():
    p2 = pair_groupoid(2)
    f0 = ts.family_of(clopen(p2.space, [0]))
    f1 = ts.family_of(clopen(p2.space, [1]))
    out = ts.search_equiv(p2, f0, f1, 1)
    assert out.status == "found"
    assert ts.verify_equiv(p2, f0, f1, out.certificate).ok


def test_search_budget_exhaustion_is_not_a_verdict():
    f1 = fam(C2.space, (X, 1), (X, 2))
    f2 = fam(C2.space, (X, 1))
    out = ts.search_equiv(C2, f1, f2, 1, budget=1)
    assert out.status == "budget"
    assert out.certificate is None


def test_search_is_deterministic():
    f1 = fam(C2.space, (X, 1), (X, 2))
    f2 = fam(C2.space, (X, 1))
    a = ts.search_equiv(C2, f1, f2, 1)
    b = ts.search_equiv(C2, f1, f2, 1)
    assert a.certificate.triples == b.certificate.triples


def test_subset_cert_examples():
    a = clopen(C2.space, ["11"])
    b = clopen(C2.space, ["1"])
    cert = ts.subset_cert(C2, a, b)
    assert cert.remainder.entries == (clopen(C2.space, ["12"]),)
    assert ts.verify_leq(C2, ts.family_of(a), ts.family_of(b), cert).ok

    same = ts.subset_cert(C2, a, a)
    assert same.remainder.is_empty
    assert ts.verify_leq(C2, ts.family_of(a), ts.family_of(a), same).ok

    with pytest.raises(ts.FamilyError):
        ts.subset_cert(C2, b, a)


def test_verify_leq_rejects_corrupted_remainder():
    a = clopen(C2.space, ["11"])
    b = clopen(C2.space, ["1"])
    good = ts.subset_cert(C2, a, b)
    # corrupt: make the remainder overlap the embedded copy of A
    bad = ts.LeqCertificate(ts.family_of(a), good.equivalence)
    assert not ts.verify_leq(C2, ts.family_of(a), ts.family_of(b), bad).ok


def _random_family(rng, space, max_labels=2):
    pairs = []
    for label in range(1, rng.randint(1, max_labels) + 1):
        cells = [c for c in space.cells_at_depth(2 if space.kind == stone.SHIFT else 0) if rng.random() < 0.4]
        pairs.append((clopen(space, cells), label))
    return ts.normalize(space, pairs)


def test_add_commutative_up_to_equivalence():
    rng = random.Random(23)
    for _ in range(50):
        f = _random_family(rng, C2.space)
        g = _random_family(rng, C2.space)
        left, right = ts.add(f, g), ts.add(g, f)
        a, b = len(f.entries), len(g.entries)
        triples = [
            (identity_bisection(C2, f.entry(i)), i, b + i) for i in f.labels
        ] + [
            (identity_bisection(C2, g.entry(j)), a + j, j) for j in g.labels
        ]
        cert = ts.EquivCertificate(tuple(triples))
        assert ts.verify_equiv(C2, left, right, cert).ok
        # associativity is structural on canonical families
        h = _random_family(rng, C2.space)
        assert ts.add(ts.add(f, g), h) == ts.add(f, ts.add(g, h))


def test_search_soundness_fuzz():
    presentations = [pair_groupoid(2), pair_groupoid(3), C2]
    rng = random.Random(29)
    found = 0
    for i in range(500):
        pres = presentations[i % len(presentations)]
        f = _random_family(rng, pres.space)
        g = _random_family(rng, pres.space)
        out = ts.search_equiv(pres, f, g, 1, budget=3000)
        if out.status == "found":
            found += 1
            assert ts.verify_equiv(pres, f, g, out.certificate).ok
    assert found > 50  # the fuzz does exercise the positive path


# -- integer functions and the level-set homomorphism -------------------------


def test_int_function_canonical_merge():
    f = ts.int_function(C2.space, [("11", 2), ("12", 2), ("2", 1)])
    assert f.pieces == (("1", 2), ("2", 1))
    assert f.value_at("12") == 2
    assert f.value_at("22") == 1


def test_int_function_rejects_overlap():
    with pytest.raises(ts.FamilyError):
        ts.int_function(C2.space, [("1", 1), ("11", 2)])


def test_add_functions():
    one_x = ts.indicator(X)
    one_1 = ts.indicator(clopen(C2.space, ["1"]))
    f = ts.add_functions(one_x, one_1)
    assert f.pieces == (("1", 2), ("2", 1))
    assert f.levels() == [X, clopen(C2.space, ["1"])]


def test_rho_of_unit_is_whole_family():
    f = ts.indicator(X)
    assert ts.rho(C2, f) == ts.family_of(X)


def test_rho_faithful():
    rng = random.Random(31)
    assert ts.rho(C2, ts.zero_function(C2.space)).is_empty
    for _ in range(50):
        cells = [c for c in C2.space.cells_at_depth(2) if rng.random() < 0.3]
        vals = [(c, rng.randint(1, 3)) for c in cells]
        f = ts.int_function(C2.space, vals)
        assert ts.rho(C2, f).is_empty == f.is_zero


def test_rho_welldef_certificate_example():
    one = clopen(C2.space, ["1"])
    two = clopen(C2.space, ["2"])
    d1 = [X, one]
    d2 = [one, one, two]
    cert = ts.rho_welldef_cert(C2, d1, d2)
    f1 = ts.family_from_decomposition(C2, d1)
    f2 = ts.family_from_decomposition(C2, d2)
    assert ts.verify_equiv(C2, f1, f2, cert).ok


def test_rho_welldef_rejects_unequal_sums():
    with pytest.raises(ts.FamilyError):
        ts.rho_welldef_cert(C2, [X], [X, X])


def test_rho_invariance_certificate():
    f = ts.indicator(clopen(C2.space, ["1"]))
    cert = ts.rho_invariance_cert(C2, U1, f)
    pulled = ts.compose_with_bisection(f, U1)
    assert pulled == ts.indicator(X)
    assert ts.verify_equiv(C2, ts.rho(C2, f), ts.rho(C2, pulled), cert).ok


def test_rho_additivity_random():
    rng = random.Random(37)
    for _ in range(40):
        cells = C2.space.cells_at_depth(2)
        f = ts.int_function(C2.space, [(c, rng.randint(0, 2)) for c in cells if rng.random() < 0.5])
        g = ts.int_function(C2.space, [(c, rng.randint(0, 2)) for c in cells if rng.random() < 0.5])
        cert = ts.rho_additivity_cert(C2, f, g)
        total = ts.add_functions(f, g)
        assert ts.verify_equiv(
            C2,
            ts.rho(C2, total),
            ts.add(ts.rho(C2, f), ts.rho(C2, g)),
            cert,
        ).ok
