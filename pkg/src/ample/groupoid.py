"""Groupoid presentations by generating compact open bisections.

A presentation is a unit space, a list of generators (prefix maps on the
shift, partial injections on finite spaces, or labeled group elements),
and an isotropy model that fixes when two words name the same arrow:

  free       arrows are (freely reduced word, source point)
  table      arrows are (group element resolved through a multiplication
             table, source point); finite spaces only
  principal  arrows are (source, target) pairs, so all isotropy collapses;
             finite spaces only

A bisection is a finite list of arrow pieces (word, clopen domain) with
pairwise disjoint domains and pairwise disjoint ranges.  On finite spaces
canonical pieces carry singleton domains; on the shift a canonical piece
carries the merged maximal domain per word.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import stone
from .stone import Clopen, UnitSpace, clopen, empty, whole


class PresentationError(ValueError):
    """Malformed generator or inconsistent presentation data."""


class PresentationMismatch(ValueError):
    """Operands built over different presentations."""


# ---------------------------------------------------------------------------
# partial actions
#
# A shift action is a tuple of (strip, add) pieces: x = strip+y maps to
# add+y.  A finite action is a tuple of (src, tgt) pairs.  Both kinds are
# partial bijections; domains of distinct pieces are disjoint, as are the
# ranges.


def identity_action(space):
    if space.kind == stone.FINITE:
        return tuple((i, i) for i in range(space.size))
    return (("", ""),)


def invert_action(space, act):
    if space.kind == stone.FINITE:
        return tuple(sorted((t, s) for s, t in act))
    return tuple(sorted((a, s) for s, a in act))


def compose_actions(space, f, g):
    """The composite f after g, as a partial action."""
    if space.kind == stone.FINITE:
        gmap = dict(g)
        fmap = dict(f)
        return tuple(sorted((x, fmap[gmap[x]]) for x in gmap if gmap[x] in fmap))
    out = []
    for s_g, a_g in g:
        for s_f, a_f in f:
            if a_g.startswith(s_f):
                out.append((s_g, a_f + a_g[len(s_f):]))
            elif s_f.startswith(a_g):
                out.append((s_g + s_f[len(a_g):], a_f))
    return tuple(sorted(out))


def action_domain(space, act):
    if space.kind == stone.FINITE:
        return clopen(space, [s for s, _ in act])
    return clopen(space, [s for s, _ in act])


def action_range(space, act):
    if space.kind == stone.FINITE:
        return clopen(space, [t for _, t in act])
    return clopen(space, [a for _, a in act])


def action_apply(space, act, cells_or_clopen):
    """Image of (clopen intersect action domain) under the action."""
    if isinstance(cells_or_clopen, Clopen):
        cells = cells_or_clopen.cells
    else:
        cells = cells_or_clopen
    if space.kind == stone.FINITE:
        amap = dict(act)
        return clopen(space, [amap[x] for x in cells if x in amap])
    out = []
    for s, a in act:
        for c in cells:
            if c.startswith(s):
                out.append(a + c[len(s):])
            elif s.startswith(c):
                out.append(a)
    return clopen(space, out)


def action_point(space, act, point):
    """Apply a finite action to one point (None when undefined)."""
    return dict(act).get(point)


def _join_actions(space, acts):
    """Union of compatible partial actions; None on conflict."""
    if space.kind == stone.FINITE:
        srcs = {}
        tgts = {}
        for act in acts:
            for s, t in act:
                if srcs.get(s, t) != t or tgts.get(t, s) != s:
                    return None
                srcs[s] = t
                tgts[t] = s
        return tuple(sorted(srcs.items()))
    raise PresentationError("action joins are only defined on finite spaces")


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class PrefixMap:
    """Sends alpha+w to beta+w; domain the cylinder of alpha."""

    alpha: str
    beta: str


@dataclass(frozen=True)
class PartialInjection:
    pairs: tuple  # ((src, tgt), ...)


@dataclass(frozen=True)
class GroupElement:
    """A labeled generator acting by finitely many disjoint pieces."""

    label: str
    pieces: tuple  # (strip, add) pairs on the shift, (src, tgt) on finite


def _generator_action(gen, space):
    if isinstance(gen, PrefixMap):
        if space.kind != stone.SHIFT:
            raise PresentationError("prefix map generator on a finite space")
        for ch in gen.alpha + gen.beta:
            space.check_cell(ch)
        return ((gen.alpha, gen.beta),)
    if isinstance(gen, PartialInjection):
        if space.kind != stone.FINITE:
            raise PresentationError("partial injection generator on the shift")
        srcs = [s for s, _ in gen.pairs]
        tgts = [t for _, t in gen.pairs]
        for x in srcs + tgts:
            space.check_cell(x)
        if len(set(srcs)) != len(srcs) or len(set(tgts)) != len(tgts):
            raise PresentationError("partial injection with repeated source or target")
        return tuple(sorted(gen.pairs))
    if isinstance(gen, GroupElement):
        pieces = tuple(gen.pieces)
        if space.kind == stone.SHIFT:
            for s, a in pieces:
                for ch in s + a:
                    space.check_cell(ch)
            doms = [clopen(space, [s]) for s, _ in pieces]
            rans = [clopen(space, [a]) for _, a in pieces]
        else:
            for s, t in pieces:
                space.check_cell(s)
                space.check_cell(t)
            doms = [clopen(space, [s]) for s, _ in pieces]
            rans = [clopen(space, [t]) for _, t in pieces]
        for i in range(len(pieces)):
            for j in range(i + 1, len(pieces)):
                if not doms[i].disjoint_from(doms[j]):
                    raise PresentationError(
                        "overlapping domains in generator %r" % (gen.label,)
                    )
                if not rans[i].disjoint_from(rans[j]):
                    raise PresentationError(
                        "overlapping ranges in generator %r" % (gen.label,)
                    )
        return tuple(sorted(pieces))
    raise PresentationError("unknown generator %r" % (gen,))


# ---------------------------------------------------------------------------
# isotropy models


FREE = "free"
PRINCIPAL = "principal"


@dataclass(frozen=True)
class Table:
    """A finite group multiplication table plus the generator images.

    products[a][b] is the element acting like a-after-b; gen_elements maps
    each generator index to its element.
    """

    products: tuple
    gen_elements: tuple

    @property
    def size(self):
        return len(self.products)

    def identity(self):
        for e in range(self.size):
            if all(self.products[e][x] == x == self.products[x][e] for x in range(self.size)):
                return e
        raise PresentationError("multiplication table has no identity")

    def inverse(self, e):
        ident = self.identity()
        for j in range(self.size):
            if self.products[e][j] == ident and self.products[j][e] == ident:
                return j
        raise PresentationError("element %d has no inverse in the table" % e)

    def validate(self):
        m = self.size
        for row in self.products:
            if len(row) != m or any(not 0 <= x < m for x in row):
                raise PresentationError("multiplication table is not square over 0..%d" % (m - 1))
        if m <= 24:
            for a in range(m):
                for b in range(m):
                    for c in range(m):
                        if self.products[self.products[a][b]][c] != self.products[a][self.products[b][c]]:
                            raise PresentationError("multiplication table is not associative")
        self.identity()
        for e in range(m):
            self.inverse(e)


# ---------------------------------------------------------------------------
# words: tuples of (generator index, +1 or -1), applied rightmost first


def reduce_word(word):
    out = []
    for sym in word:
        if out and out[-1][0] == sym[0] and out[-1][1] == -sym[1]:
            out.pop()
        else:
            out.append(sym)
    return tuple(out)


def invert_word(word):
    return tuple((g, -e) for g, e in reversed(word))


def word_str(word, labels=None):
    if not word:
        return "1"
    parts = []
    for g, e in word:
        name = labels[g] if labels else "g%d" % (g + 1)
        parts.append(name if e == 1 else name + "^-1")
    return "*".join(parts)


def _symbol_key(sym):
    g, e = sym
    return (0 if e == 1 else 1, g)


def word_sort_key(word):
    return (len(word), tuple(_symbol_key(s) for s in word))


# ---------------------------------------------------------------------------
# presentation


class Presentation:
    def __init__(self, space, generators, isotropy=FREE):
        self.space = space
        self.generators = tuple(generators)
        self.isotropy = isotropy
        self.gen_actions = tuple(_generator_action(g, space) for g in self.generators)
        if isotropy == PRINCIPAL or isinstance(isotropy, Table):
            if space.kind != stone.FINITE:
                raise PresentationError(
                    "the %s isotropy model is only supported on finite spaces"
                    % ("principal" if isotropy == PRINCIPAL else "table",)
                )
        if isinstance(isotropy, Table):
            isotropy.validate()
            if len(isotropy.gen_elements) != len(self.generators):
                raise PresentationError("table must assign an element to every generator")
            self._element_actions, self._element_words = self._close_table(isotropy)
        self._action_cache = {(): identity_action(space)}

    def _defining_data(self):
        return (self.space, self.generators, self.isotropy)

    def __eq__(self, other):
        return isinstance(other, Presentation) and self._defining_data() == other._defining_data()

    def __hash__(self):
        return hash(self._defining_data())

    def __repr__(self):
        return "Presentation(%r, %d generators, %s)" % (
            self.space,
            len(self.generators),
            "table" if isinstance(self.isotropy, Table) else self.isotropy,
        )

    @property
    def gen_labels(self):
        out = []
        for i, g in enumerate(self.generators):
            out.append(g.label if isinstance(g, GroupElement) else "g%d" % (i + 1))
        return out

    def _close_table(self, table):
        """Element actions as the join closure of all generator words."""
        ident = table.identity()
        actions = {ident: identity_action(self.space)}
        words = {ident: ()}
        frontier = [ident]
        steps = [(table.gen_elements[i], self.gen_actions[i], ((i, 1),)) for i in range(len(self.generators))]
        steps += [
            (table.inverse(table.gen_elements[i]), invert_action(self.space, self.gen_actions[i]), ((i, -1),))
            for i in range(len(self.generators))
        ]
        while frontier:
            e = frontier.pop(0)
            for ge, gact, gword in steps:
                p = table.products[ge][e]
                new = compose_actions(self.space, gact, actions[e])
                if p in actions:
                    joined = _join_actions(self.space, [actions[p], new])
                    if joined is None:
                        raise PresentationError("table products conflict with generator actions")
                    if joined != actions[p]:
                        actions[p] = joined
                        frontier.append(p)
                else:
                    actions[p] = new
                    words[p] = gword + words[e]
                    frontier.append(p)
        return actions, words

    # -- word machinery ----------------------------------------------------

    def word_action(self, word):
        """The composite partial action of a word (rightmost applied first)."""
        word = tuple(word)
        cached = self._action_cache.get(word)
        if cached is not None:
            return cached
        head, tail = word[:-1], word[-1]
        g, e = tail
        gact = self.gen_actions[g] if e == 1 else invert_action(self.space, self.gen_actions[g])
        act = compose_actions(self.space, self.word_action(head), gact)
        self._action_cache[word] = act
        return act

    def table_element(self, word):
        table = self.isotropy
        e = table.identity()
        for g, exp in word:
            ge = table.gen_elements[g] if exp == 1 else table.inverse(table.gen_elements[g])
            e = table.products[ge][e]
        return e

    def element_action(self, e):
        return self._element_actions[e]

    def element_word(self, e):
        return self._element_words[e]

    def piece_key(self, word, src=None):
        """Arrow identity key of a word under the isotropy model."""
        if self.isotropy == FREE:
            return ("w", reduce_word(word))
        if isinstance(self.isotropy, Table):
            return ("e", self.table_element(word))
        # principal: the arrow is its (source, target) pair
        tgt = action_point(self.space, self.word_action(word), src)
        return ("p", (src, tgt))

    def key_action(self, key):
        """The partial action the canonical piece acts by."""
        if key[0] == "w":
            return self.word_action(key[1])
        if key[0] == "e":
            return self.element_action(key[1])
        src, tgt = key[1]
        return ((src, tgt),)

    def is_unit_key(self, key):
        if key[0] == "w":
            return key[1] == ()
        if key[0] == "e":
            return key[1] == self.isotropy.identity()
        return key[1][0] == key[1][1]

    def principal_word(self, src, tgt):
        """The breadth-first least word whose action sends src to tgt."""
        if src == tgt:
            return ()
        syms = []
        for gi in range(len(self.generators)):
            syms.append(((gi, 1), self.gen_actions[gi]))
            syms.append(((gi, -1), invert_action(self.space, self.gen_actions[gi])))
        syms.sort(key=lambda p: _symbol_key(p[0]))
        frontier = [(src, ())]
        seen = {src}
        while frontier:
            nxt = []
            for x, w in frontier:
                for sym, act in syms:
                    y = dict(act).get(x)
                    if y is None or y in seen:
                        continue
                    w2 = (sym,) + w  # the new step applies last
                    if y == tgt:
                        return w2
                    seen.add(y)
                    nxt.append((y, w2))
            frontier = nxt
        raise PresentationError("no word connects %r to %r" % (src, tgt))

    def canonical_word(self, key):
        """A deterministic word representing the arrow key in serialized form."""
        if key[0] == "w":
            return key[1]
        if key[0] == "e":
            return self.element_word(key[1])
        src, tgt = key[1]
        return self.principal_word(src, tgt)


def _check_same(a, b):
    if a != b:
        raise PresentationMismatch("operands over different presentations")


# ---------------------------------------------------------------------------
# bisections


@dataclass(frozen=True)
class ArrowPiece:
    word: tuple
    domain: Clopen


class Bisection:
    """A compact open bisection: disjoint arrow pieces with disjoint ranges."""

    def __init__(self, pres, pieces):
        self.pres = pres
        self.pieces = self._canonicalize(pres, pieces)

    @staticmethod
    def _canonicalize(pres, pieces):
        space = pres.space
        merged = {}
        for p in pieces:
            if isinstance(p, ArrowPiece):
                word, dom = p.word, p.domain
            else:
                word, dom = p
            word = tuple(word)
            if dom.space != space:
                raise PresentationMismatch("piece domain over the wrong space")
            if dom.is_empty:
                continue
            act = pres.word_action(word)
            if not dom.subset_of(action_domain(space, act)):
                raise PresentationError(
                    "piece domain %r escapes the partial map of its word" % (list(dom.cells),)
                )
            if space.kind == stone.FINITE:
                for x in dom.cells:
                    key = pres.piece_key(word, x)
                    cell = clopen(space, [x])
                    prev = merged.get(key)
                    if prev is None:
                        merged[key] = (reduce_word(word), cell)
                    else:
                        w0, d0 = prev
                        merged[key] = (min(w0, reduce_word(word), key=word_sort_key), d0.union(cell))
            else:
                key = pres.piece_key(word)
                prev = merged.get(key)
                if prev is None:
                    merged[key] = (reduce_word(word), dom)
                else:
                    w0, d0 = prev
                    merged[key] = (w0, d0.union(dom))
        out = []
        for key, (word, dom) in merged.items():
            act = pres.key_action(key)
            out.append((key, ArrowPiece(pres.canonical_word(key), dom), act))
        out.sort(key=lambda t: (t[0], t[1].domain.cells))
        # bisection invariants: disjoint domains, disjoint ranges
        for i in range(len(out)):
            for j in range(i + 1, len(out)):
                if not out[i][1].domain.disjoint_from(out[j][1].domain):
                    raise PresentationError("bisection pieces with overlapping domains")
                ri = action_apply(space, out[i][2], out[i][1].domain)
                rj = action_apply(space, out[j][2], out[j][1].domain)
                if not ri.disjoint_from(rj):
                    raise PresentationError("bisection pieces with overlapping ranges")
        return tuple(out)

    # -- structure ----------------------------------------------------------

    def identity_key(self):
        return tuple((key, piece.domain.cells) for key, piece, _ in self.pieces)

    def __eq__(self, other):
        return (
            isinstance(other, Bisection)
            and self.pres == other.pres
            and self.identity_key() == other.identity_key()
        )

    def __hash__(self):
        return hash(self.identity_key())

    def __repr__(self):
        bits = [
            "%s on %s" % (word_str(piece.word), list(piece.domain.cells))
            for _, piece, _ in self.pieces
        ]
        return "Bisection[%s]" % "; ".join(bits) if bits else "Bisection[empty]"

    @property
    def arrow_pieces(self):
        return tuple(piece for _, piece, _ in self.pieces)

    @property
    def is_empty(self):
        return not self.pieces

    def is_identity_on_units(self):
        return all(self.pres.is_unit_key(key) for key, _, _ in self.pieces)

    # -- calculus -----------------------------------------------------------

    def dom(self):
        out = empty(self.pres.space)
        for _, piece, _ in self.pieces:
            out = out.union(piece.domain)
        return out

    def ran(self):
        out = empty(self.pres.space)
        for _, piece, act in self.pieces:
            out = out.union(action_apply(self.pres.space, act, piece.domain))
        return out

    def inverse(self):
        pieces = []
        for _, piece, act in self.pieces:
            ran = action_apply(self.pres.space, act, piece.domain)
            pieces.append((invert_word(piece.word), ran))
        return Bisection(self.pres, pieces)

    def compose(self, other):
        """All products st with s from self and t from other (t acts first)."""
        _check_same(self.pres, other.pres)
        space = self.pres.space
        pieces = []
        for _, ps, _ in self.pieces:
            for _, pt, act_t in other.pieces:
                image = action_apply(space, act_t, pt.domain).intersect(ps.domain)
                if image.is_empty:
                    continue
                dom = action_apply(space, invert_action(space, act_t), image)
                pieces.append((tuple(ps.word) + tuple(pt.word), dom))
        return Bisection(self.pres, pieces)

    def restrict(self, dom_part):
        pieces = []
        for _, piece, _ in self.pieces:
            pieces.append((piece.word, piece.domain.intersect(dom_part)))
        return Bisection(self.pres, pieces)

    def restrict_range(self, ran_part):
        return self.inverse().restrict(ran_part).inverse()

    def apply(self, part):
        """The image of a clopen contained in the domain."""
        if not part.subset_of(self.dom()):
            raise ValueError("clopen is not contained in the domain of the bisection")
        space = self.pres.space
        out = empty(space)
        for _, piece, act in self.pieces:
            out = out.union(action_apply(space, act, part.intersect(piece.domain)))
        return out

    def preimage(self, part):
        return self.inverse().apply(part)


def identity_bisection(pres, dom=None):
    if dom is None:
        dom = whole(pres.space)
    return Bisection(pres, [((), dom)])


def from_word(pres, word, domain=None):
    """The single-piece bisection of a word on its maximal (or given) domain."""
    act = pres.word_action(word)
    maxdom = action_domain(pres.space, act)
    if domain is None:
        domain = maxdom
    return Bisection(pres, [(tuple(word), domain)])


def bisection_calculus(op, s, other=None):
    if op == "inverse":
        return s.inverse()
    if op == "compose":
        return s.compose(other)
    if op == "restrict":
        return s.restrict(other)
    if op == "dom":
        return s.dom()
    if op == "ran":
        return s.ran()
    raise ValueError("unknown bisection op %r" % op)


def apply_clopen(s, part):
    return s.apply(part)


# ---------------------------------------------------------------------------
# enumeration and saturation


@dataclass(frozen=True)
class Enumeration:
    bisections: tuple
    complete: bool


def enumerate_words(pres, depth):
    """Freely reduced words of length at most depth, by (length, symbols)."""
    syms = sorted(
        [(g, 1) for g in range(len(pres.generators))]
        + [(g, -1) for g in range(len(pres.generators))],
        key=_symbol_key,
    )
    level = [()]
    yield ()
    for _ in range(depth):
        nxt = []
        for w in level:
            for s in syms:
                if w and w[-1][0] == s[0] and w[-1][1] == -s[1]:
                    continue
                nxt.append(w + (s,))
        for w in nxt:
            yield w
        level = nxt


def enumerate_bisections(pres, depth, max_count=None):
    """All nonempty single-piece bisections of words up to the depth.

    Deterministic and duplicate-free; the empty word contributes the
    identity.  When max_count is hit the list is truncated and flagged.
    """
    seen = set()
    out = []
    complete = True
    for w in enumerate_words(pres, depth):
        act = pres.word_action(w)
        if not act:
            continue
        b = from_word(pres, w)
        ident = b.identity_key()
        if ident in seen:
            continue
        if max_count is not None and len(out) >= max_count:
            complete = False
            break
        seen.add(ident)
        out.append(b)
    return Enumeration(tuple(out), complete)


def saturate(pres, part, depth):
    """The union of all word images of the clopen, over words up to depth."""
    out = part
    for w in enumerate_words(pres, depth):
        act = pres.word_action(w)
        if act:
            out = out.union(action_apply(pres.space, act, part))
    return out


def is_minimal(pres, depth):
    """'yes' when every depth-cell saturates to the whole space, else 'unknown'."""
    full = whole(pres.space)
    for cell in pres.space.cells_at_depth(depth):
        if saturate(pres, clopen(pres.space, [cell]), depth) != full:
            return "unknown"
    return "yes"


# ---------------------------------------------------------------------------
# builtin presentations


def cuntz(n):
    if n < 2:
        raise PresentationError("the Cuntz groupoid needs an alphabet of size at least 2")
    space = UnitSpace.shift(n)
    gens = [PrefixMap("", str(i)) for i in range(1, n + 1)]
    return Presentation(space, gens, FREE)


def pair_groupoid(n):
    space = UnitSpace.finite(n)
    gens = [PartialInjection(((i, i + 1),)) for i in range(n - 1)]
    return Presentation(space, gens, PRINCIPAL)


def rotation(n, with_table=False):
    space = UnitSpace.finite(n)
    gen = PartialInjection(tuple((i, (i + 1) % n) for i in range(n)))
    if with_table:
        table = Table(
            products=tuple(tuple((a + b) % n for b in range(n)) for a in range(n)),
            gen_elements=(1 % n,),
        )
        return Presentation(space, [gen], table)
    return Presentation(space, [gen], FREE)


def odometer(carries=3):
    """The binary adding machine truncated to finitely many carry pieces.

    Piece j sends 2^j 1 w to 1^j 2 w; with three pieces these are 1->2,
    21->12 and 221->112.
    """
    if carries < 1:
        raise PresentationError("need at least one carry piece")
    pieces = tuple(("2" * j + "1", "1" * j + "2") for j in range(carries))
    gen = GroupElement("odo", pieces)
    return Presentation(UnitSpace.shift(2), [gen], FREE)


def finite_groupoid(n, injections, isotropy=PRINCIPAL):
    space = UnitSpace.finite(n)
    gens = [PartialInjection(tuple(p)) for p in injections]
    return Presentation(space, gens, isotropy)


def transformation(space, generators, isotropy=FREE):
    return Presentation(space, generators, isotropy)


def trivial(n):
    return Presentation(UnitSpace.finite(n), [], PRINCIPAL)


def make_presentation(kind, *args, **kwargs):
    """Uniform constructor dispatch over the builtin presentation kinds."""
    makers = {
        "cuntz": cuntz,
        "pair_groupoid": pair_groupoid,
        "rotation": rotation,
        "odometer": odometer,
        "finite_groupoid": finite_groupoid,
        "transformation": transformation,
        "trivial": trivial,
    }
    if kind not in makers:
        raise PresentationError("unknown presentation kind %r" % kind)
    return makers[kind](*args, **kwargs)


def builtin(alias):
    """Resolve aliases like cuntz:2, pair:3, rotation:3, odometer, trivial:2."""
    parts = alias.split(":")
    name = parts[0]
    args = parts[1:]
    try:
        if name == "cuntz":
            return cuntz(int(args[0]))
        if name == "pair":
            return pair_groupoid(int(args[0]))
        if name == "rotation":
            if len(args) > 1 and args[1] == "table":
                return rotation(int(args[0]), with_table=True)
            return rotation(int(args[0]))
        if name == "odometer":
            return odometer(int(args[0]) if args else 3)
        if name == "trivial":
            return trivial(int(args[0]))
    except (IndexError, ValueError) as exc:
        raise PresentationError("bad builtin alias %r: %s" % (alias, exc)) from exc
    raise PresentationError("unknown builtin alias %r" % alias)
