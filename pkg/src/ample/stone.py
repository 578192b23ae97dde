"""Boolean algebra of compact open subsets of the two supported unit spaces.

A unit space is either a finite discrete set {0, ..., n-1} or the full
one-sided shift over the alphabet {1, ..., k}.  A compact open subset
("clopen") of the shift is a finite union of cylinder sets, stored as a
prefix antichain that is maximally merged: no stored word is a prefix of
another, and never are all k one-letter extensions of a common word stored
(they merge into the word itself).  With cells sorted, equal sets have
identical representations, so equality is structural.

All values are immutable; every operation is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass


FINITE = "finite"
SHIFT = "shift"

# serialization writes shift letters as single digits, which caps k at 9
MAX_ALPHABET = 9


class SpaceMismatch(ValueError):
    """Operands live over different unit spaces."""


class CellError(ValueError):
    """A cell does not belong to the given unit space."""


@dataclass(frozen=True)
class UnitSpace:
    kind: str
    size: int

    def __post_init__(self):
        if self.kind == FINITE:
            if self.size < 1:
                raise ValueError("finite space needs at least one point")
        elif self.kind == SHIFT:
            if not 2 <= self.size <= MAX_ALPHABET:
                raise ValueError(
                    "shift alphabet size must be between 2 and %d" % MAX_ALPHABET
                )
        else:
            raise ValueError("unknown space kind %r" % (self.kind,))

    @classmethod
    def finite(cls, n):
        return cls(FINITE, n)

    @classmethod
    def shift(cls, k):
        return cls(SHIFT, k)

    @property
    def letters(self):
        """The alphabet of the shift as single-character strings."""
        return [str(i) for i in range(1, self.size + 1)]

    def check_cell(self, cell):
        if self.kind == FINITE:
            if not isinstance(cell, int) or isinstance(cell, bool):
                raise CellError("finite cell must be an int, got %r" % (cell,))
            if not 0 <= cell < self.size:
                raise CellError("point %d out of range for Finite(%d)" % (cell, self.size))
        else:
            if not isinstance(cell, str):
                raise CellError("shift cell must be a word string, got %r" % (cell,))
            for ch in cell:
                if not ("1" <= ch <= str(self.size)):
                    raise CellError("letter %r out of range for Shift(%d)" % (ch, self.size))
        return cell

    def cells_at_depth(self, depth):
        """All cells of the given depth, sorted.

        For a finite space the depth is irrelevant and the points are
        returned; for the shift these are the k^depth words of that length.
        """
        if self.kind == FINITE:
            return list(range(self.size))
        words = [""]
        for _ in range(depth):
            words = [w + a for w in words for a in self.letters]
        return words


def _is_prefix(u, v):
    """True when cylinder(v) is contained in cylinder(u)."""
    return v.startswith(u)


def _canon_shift_cells(cells, k):
    letters = [str(i) for i in range(1, k + 1)]
    s = set(cells)
    if "" in s:
        return ("",)
    # absorption: a word with a proper prefix present is redundant
    s = {w for w in s if not any(_is_prefix(p, w) for p in s if p != w)}
    # merge: whenever all k children of a word are present, keep the word
    changed = True
    while changed:
        changed = False
        parents = {w[:-1] for w in s if w}
        for p in sorted(parents, key=len, reverse=True):
            if all(p + a in s for a in letters):
                s.difference_update(p + a for a in letters)
                s.add(p)
                changed = True
        if "" in s:
            return ("",)
    return tuple(sorted(s))


@dataclass(frozen=True)
class Clopen:
    """A canonical compact open subset of a unit space."""

    space: UnitSpace
    cells: tuple

    def __post_init__(self):
        for c in self.cells:
            self.space.check_cell(c)

    # -- basic predicates -------------------------------------------------

    @property
    def is_empty(self):
        return not self.cells

    @property
    def is_whole(self):
        if self.space.kind == FINITE:
            return len(self.cells) == self.space.size
        return self.cells == ("",)

    def max_depth(self):
        if self.space.kind == FINITE or not self.cells:
            return 0
        return max(len(w) for w in self.cells)

    def contains_cell(self, cell):
        """Whether the cylinder (or point) `cell` is contained in this set."""
        self.space.check_cell(cell)
        if self.space.kind == FINITE:
            return cell in self.cells
        return _covered(cell, self.cells, self.space.letters)

    def meets_cell(self, cell):
        self.space.check_cell(cell)
        if self.space.kind == FINITE:
            return cell in self.cells
        return any(_is_prefix(c, cell) or _is_prefix(cell, c) for c in self.cells)

    # -- boolean operations ------------------------------------------------

    def union(self, other):
        _same_space(self, other)
        return clopen(self.space, list(self.cells) + list(other.cells))

    def intersect(self, other):
        _same_space(self, other)
        if self.space.kind == FINITE:
            return clopen(self.space, sorted(set(self.cells) & set(other.cells)))
        out = []
        for a in self.cells:
            for b in other.cells:
                if _is_prefix(a, b):
                    out.append(b)
                elif _is_prefix(b, a):
                    out.append(a)
        return clopen(self.space, out)

    def difference(self, other):
        _same_space(self, other)
        if self.space.kind == FINITE:
            return clopen(self.space, sorted(set(self.cells) - set(other.cells)))
        out = []
        for a in self.cells:
            out.extend(_cell_minus(a, other.cells, self.space.letters))
        return clopen(self.space, out)

    def complement(self):
        return whole(self.space).difference(self)

    def subset_of(self, other):
        return self.difference(other).is_empty

    def disjoint_from(self, other):
        return self.intersect(other).is_empty

    def expand(self, depth):
        """The cells of this set refined to uniform `depth` (shift only).

        Finite spaces ignore the depth and return the points.
        """
        if self.space.kind == FINITE:
            return list(self.cells)
        out = []
        for c in self.cells:
            if len(c) > depth:
                raise ValueError("cell %r deeper than %d" % (c, depth))
            tails = [""]
            for _ in range(depth - len(c)):
                tails = [t + a for t in tails for a in self.space.letters]
            out.extend(c + t for t in tails)
        return sorted(out)

    def __or__(self, other):
        return self.union(other)

    def __and__(self, other):
        return self.intersect(other)

    def __sub__(self, other):
        return self.difference(other)

    def __repr__(self):
        return "Clopen(%s)" % (list(self.cells),)


def _same_space(a, b):
    if a.space != b.space:
        raise SpaceMismatch("operands over different spaces: %s vs %s" % (a.space, b.space))


def _covered(word, cells, letters):
    """cylinder(word) contained in the union of the antichain `cells`."""
    for c in cells:
        if _is_prefix(c, word):
            return True
    below = [c for c in cells if _is_prefix(word, c) and c != word]
    if not below:
        return False
    return all(_covered(word + a, below, letters) for a in letters)


def _cell_minus(word, cells, letters):
    """cylinder(word) minus the union of `cells`, as a list of words."""
    for c in cells:
        if _is_prefix(c, word):
            return []
    below = [c for c in cells if _is_prefix(word, c)]
    if not below:
        return [word]
    out = []
    for a in letters:
        out.extend(_cell_minus(word + a, below, letters))
    return out


def clopen(space, cells):
    """Canonicalize a list of cells into a Clopen. Idempotent."""
    cells = [space.check_cell(c) for c in cells]
    if space.kind == FINITE:
        return Clopen(space, tuple(sorted(set(cells))))
    return Clopen(space, _canon_shift_cells(cells, space.size))


def canonicalize(cells, space):
    return clopen(space, cells)


def empty(space):
    return Clopen(space, ())


def whole(space):
    if space.kind == FINITE:
        return Clopen(space, tuple(range(space.size)))
    return Clopen(space, ("",))


def boolean(op, a, b=None):
    """Dispatch a set operation by name: union, intersect, difference, complement."""
    if op == "complement":
        if b is not None:
            raise ValueError("complement is unary")
        return a.complement()
    if b is None:
        raise ValueError("%s needs two operands" % op)
    if op == "union":
        return a.union(b)
    if op == "intersect":
        return a.intersect(b)
    if op == "difference":
        return a.difference(b)
    raise ValueError("unknown boolean op %r" % op)


@dataclass(frozen=True)
class Comparison:
    relation: str  # equal | subset | superset | disjoint | overlapping
    left_empty: bool
    right_empty: bool


def compare(a, b):
    _same_space(a, b)
    if a.cells == b.cells:
        rel = "equal"
    else:
        meet = a.intersect(b)
        if meet.is_empty:
            rel = "disjoint"
        elif meet.cells == a.cells:
            rel = "subset"
        elif meet.cells == b.cells:
            rel = "superset"
        else:
            rel = "overlapping"
    return Comparison(rel, a.is_empty, b.is_empty)


def common_refinement(families):
    """Partition the whole space so that every input clopen is a union of cells.

    `families` is a list of lists of Clopen over one space.  Returns
    (cells, assignments) where `cells` partitions the whole space and
    `assignments` mirrors the nesting of the input with, for each clopen,
    the sublist of cells covering it.  In the shift case no cell is deeper
    than the deepest input cell.
    """
    all_clopens = [c for fam in families for c in fam]
    if not all_clopens:
        raise ValueError("need at least one clopen")
    space = all_clopens[0].space
    for c in all_clopens:
        if c.space != space:
            raise SpaceMismatch("refinement inputs over different spaces")

    if space.kind == FINITE:
        cells = list(range(space.size))
    else:
        cells = []

        def emit(word):
            split = False
            for c in all_clopens:
                inside = c.contains_cell(word)
                if not inside and c.meets_cell(word):
                    split = True
                    break
            if split:
                for a in space.letters:
                    emit(word + a)
            else:
                cells.append(word)

        emit("")
        cells.sort()

    assignments = [
        [[cell for cell in cells if c.contains_cell(cell)] for c in fam]
        for fam in families
    ]
    return cells, assignments
