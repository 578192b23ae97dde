"""Exact rational linear programming for equality systems A x = b, x >= 0.

Two-phase simplex over fractions with Bland's rule, so runs are
deterministic and never cycle.  Phase one either produces a basic feasible
point or certifies infeasibility with Farkas multipliers y read off the
terminal dictionary: y.A <= 0 componentwise while y.b > 0, which no
nonnegative x can satisfy.  Phase two maximizes a linear objective from a
feasible basis.

No floating point enters anywhere; certificates re-verify by independent
recomputation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class Feasible:
    x: tuple


@dataclass(frozen=True)
class Infeasible:
    y: tuple  # one multiplier per input row


@dataclass(frozen=True)
class Optimal:
    x: tuple
    value: Fraction


@dataclass(frozen=True)
class Unbounded:
    pass


def _as_fractions(rows, rhs):
    a = [[Fraction(v) for v in row] for row in rows]
    b = [Fraction(v) for v in rhs]
    if any(len(row) != len(a[0]) for row in a):
        raise ValueError("ragged constraint matrix")
    if len(b) != len(a):
        raise ValueError("rhs length mismatch")
    return a, b


class _Tableau:
    def __init__(self, a, b, n):
        self.n = n
        self.m = len(a)
        # columns: n originals, m artificials, then the rhs
        self.rows = []
        for i in range(self.m):
            row = list(a[i]) + [Fraction(0)] * self.m + [b[i]]
            row[n + i] = Fraction(1)
            self.rows.append(row)
        self.basis = [n + i for i in range(self.m)]
        # phase-one reduced costs: c_j - sum of column entries (all cB = 1)
        width = n + self.m + 1
        self.obj = [Fraction(0)] * width
        for j in range(width):
            col = sum(row[j] for row in self.rows)
            cj = Fraction(1) if n <= j < n + self.m else Fraction(0)
            if j == width - 1:
                self.obj[j] = -col  # rhs slot carries minus the objective
            else:
                self.obj[j] = cj - col

    def pivot(self, i, j):
        piv = self.rows[i][j]
        self.rows[i] = [v / piv for v in self.rows[i]]
        for r in range(self.m):
            if r != i and self.rows[r][j] != 0:
                f = self.rows[r][j]
                self.rows[r] = [v - f * w for v, w in zip(self.rows[r], self.rows[i])]
        if self.obj[j] != 0:
            f = self.obj[j]
            self.obj = [v - f * w for v, w in zip(self.obj, self.rows[i])]
        self.basis[i] = j

    def bland_min(self, allowed):
        """Run Bland's rule to optimality over the allowed columns."""
        while True:
            enter = None
            for j in allowed:
                if self.obj[j] < 0:
                    enter = j
                    break
            if enter is None:
                return "optimal"
            leave = None
            best = None
            for i in range(self.m):
                coef = self.rows[i][enter]
                if coef > 0:
                    ratio = self.rows[i][-1] / coef
                    key = (ratio, self.basis[i])
                    if best is None or key < best:
                        best = key
                        leave = i
            if leave is None:
                return "unbounded"
            self.pivot(leave, enter)

    def objective(self):
        return -self.obj[-1]

    def solution(self):
        x = [Fraction(0)] * self.n
        for i, j in enumerate(self.basis):
            if j < self.n:
                x[j] = self.rows[i][-1]
        return tuple(x)


def _phase_one(rows, rhs):
    a, b = _as_fractions(rows, rhs)
    n = len(a[0]) if a else 0
    signs = []
    for i in range(len(a)):
        if b[i] < 0:
            a[i] = [-v for v in a[i]]
            b[i] = -b[i]
            signs.append(Fraction(-1))
        else:
            signs.append(Fraction(1))
    t = _Tableau(a, b, n)
    status = t.bland_min(range(n + t.m))
    assert status == "optimal", "phase one is bounded below by zero"
    if t.objective() > 0:
        # reduced cost of the i-th artificial is 1 - y_i
        y = tuple(signs[i] * (Fraction(1) - t.obj[n + i]) for i in range(t.m))
        return Infeasible(y), None
    _drive_out_artificials(t)
    return Feasible(t.solution()), t


def _drive_out_artificials(t):
    for i in range(t.m):
        if t.basis[i] >= t.n:
            for j in range(t.n):
                if t.rows[i][j] != 0:
                    t.pivot(i, j)
                    break


def solve_feasibility(rows, rhs):
    """A basic feasible point of {Ax = b, x >= 0}, or Farkas multipliers."""
    outcome, _ = _phase_one(rows, rhs)
    return outcome


def maximize(rows, rhs, objective):
    """Maximize c.x over {Ax = b, x >= 0}; assumes rational data throughout."""
    res, t = _phase_one(rows, rhs)
    if isinstance(res, Infeasible):
        return res
    n = t.n
    cost = [-Fraction(v) for v in objective]  # minimize the negation
    width = n + t.m + 1
    obj = [Fraction(0)] * width
    cb = [cost[j] if j < n else Fraction(0) for j in t.basis]
    for j in range(width):
        col = sum(cb[i] * t.rows[i][j] for i in range(t.m))
        if j == width - 1:
            obj[j] = -col
        elif j < n:
            obj[j] = cost[j] - col
        else:
            obj[j] = Fraction(0)  # artificials are frozen out of phase two
    t.obj = obj
    status = t.bland_min(range(n))
    if status == "unbounded":
        return Unbounded()
    x = t.solution()
    value = sum(Fraction(objective[j]) * x[j] for j in range(n))
    return Optimal(x, value)


def verify_solution(rows, rhs, x):
    a, b = _as_fractions(rows, rhs)
    xs = [Fraction(v) for v in x]
    if any(v < 0 for v in xs):
        return False
    for i in range(len(a)):
        if sum(a[i][j] * xs[j] for j in range(len(xs))) != b[i]:
            return False
    return True


def verify_farkas(rows, rhs, y):
    """Recompute the combination: y.A <= 0 in every column and y.b > 0."""
    a, b = _as_fractions(rows, rhs)
    ys = [Fraction(v) for v in y]
    if len(ys) != len(a):
        return False
    n = len(a[0]) if a else 0
    for j in range(n):
        if sum(ys[i] * a[i][j] for i in range(len(a))) > 0:
            return False
    return sum(ys[i] * b[i] for i in range(len(a))) > 0
