import random

import pytest

from ample import stone
from ample.stone import UnitSpace, clopen, common_refinement, compare, whole

S2 = UnitSpace.shift(2)
S3 = UnitSpace.shift(3)
F3 = UnitSpace.finite(3)
F4 = UnitSpace.finite(4)


def test_canonicalize_merges_full_sibling_sets():
    assert clopen(S2, ["1", "2"]).cells == ("",)


def test_canonicalize_absorbs_subcylinders():
    assert clopen(S2, ["11", "12", "1"]).cells == ("1",)


def test_canonicalize_finite_dedups_and_sorts():
    assert clopen(F4, [2, 0, 2]).cells == (0, 2)


def test_canonicalize_idempotent_random():
    rng = random.Random(7)
    for _ in range(300):
        cells = []
        for _ in range(rng.randint(0, 6)):
            depth = rng.randint(0, 4)
            cells.append("".join(rng.choice("12") for _ in range(depth)))
        a = clopen(S2, cells)
        assert clopen(S2, list(a.cells)).cells == a.cells
    for _ in range(100):
        pts = [rng.randrange(4) for _ in range(rng.randint(0, 6))]
        a = clopen(F4, pts)
        assert clopen(F4, list(a.cells)).cells == a.cells


def test_intersect_prefix_containment():
    assert clopen(S2, ["1"]).intersect(clopen(S2, ["12"])).cells == ("12",)


def test_complement_of_cylinder():
    assert clopen(S2, ["1"]).complement().cells == ("2",)


def test_difference_finite():
    a = clopen(F4, [0, 1, 2])
    b = clopen(F4, [2, 3])
    assert a.difference(b).cells == (0, 1)


def test_boolean_dispatch_and_errors():
    a = clopen(S2, ["1"])
    assert stone.boolean("union", a, a.complement()).is_whole
    with pytest.raises(ValueError):
        stone.boolean("complement", a, a)
    with pytest.raises(stone.SpaceMismatch):
        stone.boolean("union", a, clopen(S3, ["1"]))
    with pytest.raises(stone.CellError):
        clopen(S2, ["13"])
    with pytest.raises(stone.CellError):
        clopen(F3, [3])


def _random_clopen(rng, space):
    if space.kind == stone.FINITE:
        return clopen(space, [p for p in range(space.size) if rng.random() < 0.5])
    cells = []
    for _ in range(rng.randint(0, 5)):
        depth = rng.randint(0, 3)
        cells.append("".join(rng.choice(space.letters) for _ in range(depth)))
    return clopen(space, cells)


@pytest.mark.parametrize("space", [S2, S3, F4])
def test_boolean_laws_random(space):
    rng = random.Random(11)
    for _ in range(500):
        a = _random_clopen(rng, space)
        b = _random_clopen(rng, space)
        c = _random_clopen(rng, space)
        assert a.union(b) == b.union(a)
        assert a.intersect(b.union(c)) == a.intersect(b).union(a.intersect(c))
        assert a.complement().complement() == a
        assert a.difference(b) == a.intersect(b.complement())
        assert a.union(a.complement()).is_whole


def test_membership_agrees_with_bruteforce_expansion():
    rng = random.Random(3)
    for _ in range(60):
        a = _random_clopen(rng, S2)
        for depth in range(1, 5):
            deep = max(depth, a.max_depth())
            leaves = set(a.expand(deep)) if not a.is_empty else set()
            for word in S2.cells_at_depth(depth):
                # the cylinder of `word` sits inside A exactly when every
                # depth-`deep` extension of `word` is a leaf of A
                extensions = [word + tail for tail in S2.cells_at_depth(deep - depth)]
                brute = all(x in leaves for x in extensions)
                assert a.contains_cell(word) == brute


def test_compare_examples():
    assert compare(clopen(S2, ["11"]), clopen(S2, ["1"])).relation == "subset"
    assert compare(clopen(S2, ["1"]), clopen(S2, ["2"])).relation == "disjoint"
    assert compare(clopen(F3, [0, 1]), clopen(F3, [1, 2])).relation == "overlapping"
    assert compare(clopen(S2, ["1"]), clopen(S2, ["11", "12"])).relation == "equal"
    res = compare(clopen(S2, []), clopen(S2, ["1"]))
    assert res.left_empty and not res.right_empty


def test_common_refinement_shift_example():
    cells, assign = common_refinement([[clopen(S2, ["1"])], [clopen(S2, ["12"])]])
    assert cells == ["11", "12", "2"]
    assert assign[0][0] == ["11", "12"]
    assert assign[1][0] == ["12"]


def test_common_refinement_finite_example():
    cells, assign = common_refinement([[clopen(F3, [0, 1]), clopen(F3, [1, 2])]])
    assert cells == [0, 1, 2]
    assert assign[0][0] == [0, 1]
    assert assign[0][1] == [1, 2]


def test_common_refinement_two_decompositions_of_one_function():
    # 1_{1X} + 1_X split two ways refines to the depth-1 cells
    fam1 = [whole(S2), clopen(S2, ["1"])]
    fam2 = [clopen(S2, ["1"]), clopen(S2, ["1"]), clopen(S2, ["2"])]
    cells, _ = common_refinement([fam1, fam2])
    assert cells == ["1", "2"]


def test_common_refinement_is_partition():
    rng = random.Random(5)
    for space in (S2, F4):
        for _ in range(50):
            fams = [[_random_clopen(rng, space) for _ in range(rng.randint(1, 3))]]
            cells, assigns = common_refinement(fams)
            parts = [clopen(space, [c]) for c in cells]
            for i in range(len(parts)):
                for j in range(i + 1, len(parts)):
                    assert parts[i].disjoint_from(parts[j])
            total = clopen(space, cells)
            assert total.is_whole
            for fam, fam_assign in zip(fams, assigns):
                for clop, owned in zip(fam, fam_assign):
                    assert clopen(space, owned) == clop
