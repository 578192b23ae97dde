"""The rational convolution algebra of a presentation.

An element is a finite rational combination of canonical arrow terms: an
arrow key (reduced word, table element, or source-target pair, depending
on the isotropy model) together with a single cell of the key's domain.
Convolution multiplies arrows pairwise; the star swaps an arrow for its
inverse; the conditional expectation keeps the terms whose arrows are
units.  Coefficients are plain fractions, so every identity checked here
is exact and involution needs no conjugation.

Indicator elements of bisections multiply like the bisections themselves,
which is what makes the isometry constructions purely combinatorial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import stone
from .stone import clopen
from .groupoid import (
    action_apply,
    action_domain,
    invert_action,
    invert_word,
    reduce_word,
)
from . import paradox as px


DEPTH_CAP = 12


class DepthOverflow(ValueError):
    """A product would need cells deeper than the configured cap."""


class AlgebraError(ValueError):
    pass


def _canon_cylinder_map(space, pairs):
    """Collapse possibly overlapping (cell, coefficient) pairs canonically."""
    if space.kind == stone.FINITE:
        vals = {}
        for c, q in pairs:
            vals[c] = vals.get(c, Fraction(0)) + q
        return {c: q for c, q in vals.items() if q != 0}

    out = {}

    def emit(cell, rel):
        const = sum((q for c, q in rel if cell.startswith(c)), Fraction(0))
        deeper = [(c, q) for c, q in rel if c.startswith(cell) and c != cell]
        if not deeper:
            if const != 0:
                out[cell] = const
            return
        for a in space.letters:
            emit(cell + a, [(c, q) for c, q in rel if c.startswith(cell + a) or (cell + a).startswith(c)])

    emit("", list(pairs))
    # merge equal-valued siblings back up
    changed = True
    while changed:
        changed = False
        parents = {c[:-1] for c in out if c}
        for p in sorted(parents, key=len, reverse=True):
            kids = [p + a for a in space.letters]
            if all(k in out for k in kids) and len({out[k] for k in kids}) == 1:
                v = out[kids[0]]
                for k in kids:
                    del out[k]
                out[p] = v
                changed = True
    return out


class ConvElement:
    """Canonical form: per arrow key, a merged cylinder map of coefficients."""

    def __init__(self, pres, raw_terms):
        self.pres = pres
        by_key = {}
        for key, cell, coef in raw_terms:
            coef = Fraction(coef)
            if coef == 0:
                continue
            by_key.setdefault(key, []).append((cell, coef))
        terms = {}
        for key, pairs in by_key.items():
            cyl = _canon_cylinder_map(pres.space, pairs)
            act_dom = action_domain(pres.space, pres.key_action(key))
            for cell in cyl:
                if not act_dom.contains_cell(cell):
                    raise AlgebraError("term cell %r escapes the arrow domain" % (cell,))
            if cyl:
                terms[key] = dict(sorted(cyl.items()))
        self.terms = terms

    def items(self):
        for key in sorted(self.terms):
            for cell, coef in self.terms[key].items():
                yield key, cell, coef

    @property
    def is_zero(self):
        return not self.terms

    def max_depth(self):
        if self.pres.space.kind == stone.FINITE:
            return 0
        return max((len(c) for cyl in self.terms.values() for c in cyl), default=0)

    def coefficient(self, key, point):
        """The value on the arrow with the given key and source point."""
        cyl = self.terms.get(key)
        if not cyl:
            return Fraction(0)
        if self.pres.space.kind == stone.FINITE:
            return cyl.get(point, Fraction(0))
        for cell, coef in cyl.items():
            if point.startswith(cell):
                return coef
        return Fraction(0)

    def __eq__(self, other):
        return (
            isinstance(other, ConvElement)
            and self.pres == other.pres
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash(tuple((k, tuple(v.items())) for k, v in sorted(self.terms.items())))

    def __repr__(self):
        bits = ["%s.1[%s|%s]" % (coef, key, cell) for key, cell, coef in self.items()]
        return " + ".join(bits) if bits else "0"


def zero(pres):
    return ConvElement(pres, [])


def _unit_terms(pres, clop):
    if pres.isotropy == "principal":
        return [(("p", (x, x)), x, Fraction(1)) for x in clop.cells]
    key = pres.piece_key(())
    return [(key, cell, Fraction(1)) for cell in clop.cells]


def unit_indicator(pres, clop):
    """The characteristic function of a clopen subset of the unit space."""
    if clop.is_empty:
        return zero(pres)
    return ConvElement(pres, _unit_terms(pres, clop))


def bisection_indicator(pres, bis):
    terms = []
    for key, piece, _ in bis.pieces:
        for cell in piece.domain.cells:
            terms.append((key, cell, Fraction(1)))
    return ConvElement(pres, terms)


def from_terms(pres, triples):
    """Build an element from (word, cell, coefficient) triples."""
    terms = []
    for word, cell, coef in triples:
        if pres.space.kind == stone.FINITE:
            key = pres.piece_key(tuple(word), cell)
        else:
            key = pres.piece_key(tuple(word))
        terms.append((key, cell, Fraction(coef)))
    return ConvElement(pres, terms)


def add(a, b):
    if a.pres != b.pres:
        raise AlgebraError("elements over different presentations")
    return ConvElement(a.pres, list(a.items()) + list(b.items()))


def scale(a, q):
    q = Fraction(q)
    return ConvElement(a.pres, [(k, c, q * v) for k, c, v in a.items()])


def sub(a, b):
    return add(a, scale(b, -1))


def _key_product(pres, k1, k2):
    if k1[0] == "w":
        return ("w", reduce_word(tuple(k1[1]) + tuple(k2[1])))
    if k1[0] == "e":
        return ("e", pres.isotropy.products[k1[1]][k2[1]])
    (s1, t1), (s2, t2) = k1[1], k2[1]
    if t2 != s1:
        return None
    return ("p", (s2, t1))


def _key_inverse(pres, key):
    if key[0] == "w":
        return ("w", invert_word(key[1]))
    if key[0] == "e":
        return ("e", pres.isotropy.inverse(key[1]))
    s, t = key[1]
    return ("p", (t, s))


def conv(a, b, depth_cap=DEPTH_CAP):
    """The convolution product: arrows compose pairwise, t acting first."""
    if a.pres != b.pres:
        raise AlgebraError("elements over different presentations")
    pres = a.pres
    space = pres.space
    terms = []
    for k1, c1, q1 in a.items():
        act1 = pres.key_action(k1)
        dom1 = clopen(space, [c1])
        for k2, c2, q2 in b.items():
            key = _key_product(pres, k1, k2)
            if key is None:
                continue
            act2 = pres.key_action(k2)
            image = action_apply(space, act2, clopen(space, [c2])).intersect(dom1)
            if image.is_empty:
                continue
            dom = action_apply(space, invert_action(space, act2), image)
            for cell in dom.cells:
                terms.append((key, cell, q1 * q2))
    out = ConvElement(pres, terms)
    if space.kind == stone.SHIFT and out.max_depth() > depth_cap:
        raise DepthOverflow("product needs cells deeper than %d" % depth_cap)
    return out


def star(a):
    """The involution: each arrow is replaced by its inverse."""
    pres = a.pres
    space = pres.space
    terms = []
    for key, cell, coef in a.items():
        act = pres.key_action(key)
        image = action_apply(space, act, clopen(space, [cell]))
        ikey = _key_inverse(pres, key)
        for icell in image.cells:
            terms.append((ikey, icell, coef))
    return ConvElement(pres, terms)


def expectation(a):
    """Restriction to the unit arrows, as a unit-supported element."""
    pres = a.pres
    return ConvElement(pres, [(k, c, v) for k, c, v in a.items() if pres.is_unit_key(k)])


def unit_function(a):
    """The (cell -> coefficient) map of a unit-supported element."""
    out = {}
    for key, cell, coef in a.items():
        if not a.pres.is_unit_key(key):
            raise AlgebraError("element is not supported on the unit space")
        out[cell] = coef
    return out


def is_unit_projection(a):
    return all(a.pres.is_unit_key(k) and v == 1 for k, _, v in a.items())


def unit_proj_leq(p, q):
    """p <= q for commuting unit projections: q - p is {0,1}-valued on units."""
    diff = sub(q, p)
    return all(diff.pres.is_unit_key(k) and v == 1 for k, _, v in diff.items())


def algebra_ops(op, a, b=None):
    if op == "conv":
        return conv(a, b)
    if op == "star":
        return star(a)
    if op == "add":
        return add(a, b)
    if op == "expectation":
        return expectation(a)
    raise ValueError("unknown algebra op %r" % op)


# ---------------------------------------------------------------------------
# isometries from paradoxical witnesses


def isometries_from_witness(pres, witness):
    """The pair f, g with f*f = g*g = 1_A and ff* + gg* <= 1_A, checked exactly."""
    res = px.verify_witness(pres, witness)
    if not res:
        raise AlgebraError("witness does not verify: %s" % res.reason)
    if (witness.k, witness.l) != (2, 1):
        raise AlgebraError("the two-isometry construction needs a (2,1) witness")
    if not px.rows_disjoint(witness):
        raise AlgebraError("rows are not disjoint; apply disjointify first")
    one_a = unit_indicator(pres, witness.a)
    elems = []
    for row in witness.rows:
        f = zero(pres)
        for bis, _ in row:
            f = add(f, bisection_indicator(pres, bis))
        elems.append(f)
    f, g = elems
    report = {
        "f_star_f_is_unit": conv(star(f), f) == one_a,
        "g_star_g_is_unit": conv(star(g), g) == one_a,
        "range_projections_dominated": unit_proj_leq(
            add(conv(f, star(f)), conv(g, star(g))), one_a
        ),
    }
    return f, g, report


@dataclass(frozen=True)
class MatConvElement:
    size: int
    entries: tuple  # size x size of ConvElement

    def __add__(self, other):
        return MatConvElement(
            self.size,
            tuple(
                tuple(add(self.entries[i][j], other.entries[i][j]) for j in range(self.size))
                for i in range(self.size)
            ),
        )

    def conv(self, other):
        k = self.size
        rows = []
        for i in range(k):
            row = []
            for j in range(k):
                acc = zero(self.entries[0][0].pres)
                for t in range(k):
                    acc = add(acc, conv(self.entries[i][t], other.entries[t][j]))
                row.append(acc)
            rows.append(tuple(row))
        return MatConvElement(k, tuple(rows))

    def star(self):
        k = self.size
        return MatConvElement(
            k, tuple(tuple(star(self.entries[j][i]) for j in range(k)) for i in range(k))
        )

    def __eq__(self, other):
        return (
            isinstance(other, MatConvElement)
            and self.size == other.size
            and self.entries == other.entries
        )

    @property
    def is_zero(self):
        return all(e.is_zero for row in self.entries for e in row)


def mat_zero(pres, k):
    z = zero(pres)
    return MatConvElement(k, tuple(tuple(z for _ in range(k)) for _ in range(k)))


def mat_unit(pres, k, i, j, elem):
    rows = [[zero(pres)] * k for _ in range(k)]
    rows[i][j] = elem
    return MatConvElement(k, tuple(tuple(r) for r in rows))


def mat_diag_units(pres, k, clop, upto):
    """1_upto tensor 1_A inside the k by k matrices."""
    one = unit_indicator(pres, clop)
    rows = [[zero(pres)] * k for _ in range(k)]
    for r in range(upto):
        rows[r][r] = one
    return MatConvElement(k, tuple(tuple(r) for r in rows))


def matrix_isometries(pres, witness):
    """The matrix partial isometries of a (k,l) witness, verified exactly.

    Builds one matrix per witness piece, with the piece indicator in row
    m and column i, and checks that the domain projections tile the full
    k-fold diagonal while the range projections stay under the l-fold one.
    """
    res = px.verify_witness(pres, witness)
    if not res:
        raise AlgebraError("witness does not verify: %s" % res.reason)
    w = px.disjointify(pres, witness)
    k, l = w.k, w.l
    mats = []
    for i, row in enumerate(w.rows):
        for bis, m in row:
            mats.append(mat_unit(pres, k, m - 1, i, bisection_indicator(pres, bis)))
    sum_dom = mat_zero(pres, k)
    sum_ran = mat_zero(pres, k)
    orthogonal = True
    for idx, mat in enumerate(mats):
        for jdx, other in enumerate(mats):
            prod = mat.star().conv(other)
            if idx == jdx:
                sum_dom = sum_dom + prod
            elif not prod.is_zero:
                orthogonal = False
        sum_ran = sum_ran + mat.conv(mat.star())
    full = mat_diag_units(pres, k, w.a, k)
    cap = mat_diag_units(pres, k, w.a, l)
    dominated = True
    for i in range(k):
        for j in range(k):
            if i != j:
                if not sum_ran.entries[i][j].is_zero:
                    dominated = False
            else:
                if not unit_proj_leq(sum_ran.entries[i][i], cap.entries[i][i]):
                    dominated = False
    report = {
        "pairwise_orthogonal": orthogonal,
        "domains_tile_full_diagonal": sum_dom == full,
        "ranges_under_l_diagonal": dominated,
    }
    return mats, report


# ---------------------------------------------------------------------------
# finite regular representations


@dataclass(frozen=True)
class RegularRep:
    pres: object
    point: object
    arrows: tuple  # (key, target) with source the base point
    truncated: bool

    def index(self, key, target):
        return self.arrows.index((key, target))

    def unit_index(self):
        for i, (key, _) in enumerate(self.arrows):
            if self.pres.is_unit_key(key):
                return i
        raise AlgebraError("no unit arrow at the base point")

    def matrix(self, elem):
        """The matrix of left convolution on the arrows at the base point."""
        n = len(self.arrows)
        out = [[Fraction(0)] * n for _ in range(n)]
        pres = self.pres
        for col, (gkey, gtarget) in enumerate(self.arrows):
            for hkey in elem.terms:
                coef = elem.coefficient(hkey, gtarget)
                if coef == 0:
                    continue
                pkey = _key_product(pres, hkey, gkey)
                if pkey is None:
                    continue
                act = pres.key_action(pkey)
                tgt = dict(act).get(self.point)
                if tgt is None:
                    continue
                try:
                    row = self.index(pkey, tgt)
                except ValueError:
                    raise AlgebraError(
                        "arrow set truncated: product escapes the enumerated arrows"
                    ) from None
                out[row][col] += coef
        return tuple(tuple(r) for r in out)


def regular_rep(pres, point, word_cap=6):
    """The arrows with source `point`, for matrices of the representation.

    Finite spaces only.  Under the table or principal models the arrow set
    is genuinely finite; under free words it is enumerated up to a word
    length cap and flagged as truncated when the cap bites.
    """
    if pres.space.kind != stone.FINITE:
        raise AlgebraError("regular representations are computed on finite spaces only")
    space = pres.space
    arrows = []
    truncated = False
    if pres.isotropy == "principal":
        seen = {point}
        frontier = [point]
        while frontier:
            x = frontier.pop(0)
            for gi in range(len(pres.generators)):
                for act in (pres.gen_actions[gi], invert_action(space, pres.gen_actions[gi])):
                    y = dict(act).get(x)
                    if y is not None and y not in seen:
                        seen.add(y)
                        frontier.append(y)
        arrows = [(("p", (point, v)), v) for v in sorted(seen)]
    elif pres.isotropy == "free":
        from .groupoid import enumerate_words

        seen = set()
        for w in enumerate_words(pres, word_cap):
            key = ("w", reduce_word(w))
            if key in seen:
                continue
            tgt = dict(pres.word_action(w)).get(point)
            if tgt is None:
                continue
            seen.add(key)
            arrows.append((key, tgt))
        truncated = bool(pres.generators)
    else:
        table = pres.isotropy
        for e in range(table.size):
            tgt = dict(pres.element_action(e)).get(point)
            if tgt is not None:
                arrows.append((("e", e), tgt))
    return RegularRep(pres, point, tuple(arrows), truncated)


class TraceFunctional:
    """tau(a) = sum over cells of mu(cell) times E(a) on that cell."""

    def __init__(self, state):
        self.state = state

    def __call__(self, elem):
        total = Fraction(0)
        for cell, coef in unit_function(expectation(elem)).items():
            part = self.state.evaluate_clopen(clopen(elem.pres.space, [cell]))
            total += coef * part
        return total
