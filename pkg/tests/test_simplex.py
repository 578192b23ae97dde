import itertools
import random
from fractions import Fraction

from ample import simplex as sx


def test_unique_solution():
    rows = [[1, -1, 0], [0, 1, -1], [1, 1, 1]]
    rhs = [0, 0, 1]
    res = sx.solve_feasibility(rows, rhs)
    assert isinstance(res, sx.Feasible)
    assert res.x == (Fraction(1, 3),) * 3
    assert sx.verify_solution(rows, rhs, res.x)


def test_infeasible_with_farkas():
    # x2 = 0, x1 = 0, x1 + x2 = 1
    rows = [[0, 1], [1, 0], [1, 1]]
    rhs = [0, 0, 1]
    res = sx.solve_feasibility(rows, rhs)
    assert isinstance(res, sx.Infeasible)
    assert sx.verify_farkas(rows, rhs, res.y)


def test_negative_rhs_rows_are_handled():
    rows = [[-1, -1]]
    rhs = [-1]
    res = sx.solve_feasibility(rows, rhs)
    assert isinstance(res, sx.Feasible)
    assert sx.verify_solution(rows, rhs, res.x)


def test_redundant_rows():
    res = sx.solve_feasibility([[1, 1], [2, 2]], [1, 2])
    assert isinstance(res, sx.Feasible)
    assert sx.verify_solution([[1, 1], [2, 2]], [1, 2], res.x)


def test_maximize_simple():
    res = sx.maximize([[1, 1]], [1], [1, 0])
    assert isinstance(res, sx.Optimal)
    assert res.value == 1
    assert res.x == (Fraction(1), Fraction(0))


def test_maximize_respects_equalities():
    # x0 = x1 and x0 + x1 = 1 forces the half-half point
    res = sx.maximize([[1, -1], [1, 1]], [0, 1], [1, 0])
    assert res.value == Fraction(1, 2)


def test_maximize_detects_infeasible():
    res = sx.maximize([[0, 1], [1, 0], [1, 1]], [0, 0, 1], [1, 1])
    assert isinstance(res, sx.Infeasible)


def test_maximize_unbounded():
    res = sx.maximize([[1, -1]], [0], [1, 0])
    assert isinstance(res, sx.Unbounded)


def _brute_force_feasible(rows, rhs, n):
    """Independent oracle: basic solutions by Gaussian elimination over all
    column subsets, plus a rational interior grid for tiny systems."""
    m = len(rows)
    for size in range(0, min(n, m) + 1):
        for cols in itertools.combinations(range(n), size):
            # solve the square-ish system restricted to the chosen columns
            a = [[Fraction(rows[i][j]) for j in cols] for i in range(m)]
            b = [Fraction(rhs[i]) for i in range(m)]
            # gaussian elimination with partial pivoting over fractions
            mat = [row[:] + [b[i]] for i, row in enumerate(a)]
            rank = 0
            for col in range(size):
                piv = None
                for r in range(rank, m):
                    if mat[r][col] != 0:
                        piv = r
                        break
                if piv is None:
                    continue
                mat[rank], mat[piv] = mat[piv], mat[rank]
                mat[rank] = [v / mat[rank][col] for v in mat[rank]]
                for r in range(m):
                    if r != rank and mat[r][col] != 0:
                        f = mat[r][col]
                        mat[r] = [v - f * w for v, w in zip(mat[r], mat[rank])]
                rank += 1
            if any(all(v == 0 for v in row[:-1]) and row[-1] != 0 for row in mat):
                continue
            # read off one solution of the reduced system
            sol = [Fraction(0)] * size
            used = set()
            for row in mat:
                lead = next((j for j in range(size) if row[j] != 0), None)
                if lead is not None and lead not in used:
                    sol[lead] = row[-1]
                    used.add(lead)
            if any(v < 0 for v in sol):
                continue
            full = [Fraction(0)] * n
            for idx, j in enumerate(cols):
                full[j] = sol[idx]
            if sx.verify_solution(rows, rhs, full):
                return True
    return False


def test_fuzz_against_bruteforce_oracle():
    rng = random.Random(47)
    agree_feasible = agree_infeasible = 0
    for _ in range(150):
        n = rng.randint(1, 3)
        m = rng.randint(1, 3)
        rows = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(m)]
        rhs = [rng.randint(-2, 2) for _ in range(m)]
        res = sx.solve_feasibility(rows, rhs)
        brute = _brute_force_feasible(rows, rhs, n)
        if isinstance(res, sx.Feasible):
            assert sx.verify_solution(rows, rhs, res.x)
            assert brute
            agree_feasible += 1
        else:
            assert sx.verify_farkas(rows, rhs, res.y)
            assert not brute
            agree_infeasible += 1
    assert agree_feasible > 10 and agree_infeasible > 10


def test_determinism():
    rows = [[1, 2, -1], [0, 1, 1]]
    rhs = [1, 1]
    a = sx.solve_feasibility(rows, rhs)
    b = sx.solve_feasibility(rows, rhs)
    assert a == b
