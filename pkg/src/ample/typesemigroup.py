"""The type semigroup of a presentation, with machine-checkable certificates.

An element is represented by a labeled family: for each label i a clopen
A_i, standing for the disjoint union of the A_i x {i}.  Two families are
equivalent when finitely many bisections W_k match a disjoint labeled
tiling of one family onto a disjoint labeled tiling of the other; that
matching is the EquivCertificate and is verified independently of however
it was found.  The algebraic preorder x <= y is witnessed by a remainder z
together with an equivalence certificate for x + z ~ y.

Search and verification are strictly separated: anything a search returns
passes the verifier, and a failed search is never evidence of
inequivalence.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import stone
from .stone import clopen, empty
from .groupoid import Bisection, identity_bisection, enumerate_bisections


class FamilyError(ValueError):
    pass


# ---------------------------------------------------------------------------
# labeled families


@dataclass(frozen=True)
class LabeledFamily:
    """Canonical form: nonempty clopens only, labels 1..m, sorted by label."""

    space: stone.UnitSpace
    entries: tuple  # entries[i] is the clopen labeled i+1

    @property
    def labels(self):
        return range(1, len(self.entries) + 1)

    def entry(self, label):
        if 1 <= label <= len(self.entries):
            return self.entries[label - 1]
        return empty(self.space)

    @property
    def is_empty(self):
        return not self.entries

    def __repr__(self):
        return "LabeledFamily(%s)" % (
            ", ".join("%s x {%d}" % (list(c.cells), i + 1) for i, c in enumerate(self.entries)),
        )


def normalize_with_map(space, pairs):
    """Canonicalize (clopen, label) pairs; also return original->new labels."""
    by_label = {}
    order = []
    for c, label in pairs:
        if c.space != space:
            raise stone.SpaceMismatch("family entry over the wrong space")
        if not isinstance(label, int) or label < 1:
            raise FamilyError("labels must be positive integers, got %r" % (label,))
        if label not in by_label:
            by_label[label] = empty(space)
            order.append(label)
        by_label[label] = by_label[label].union(c)
    entries = []
    label_map = {}
    for label in order:
        if by_label[label].is_empty:
            continue
        entries.append(by_label[label])
        label_map[label] = len(entries)
    return LabeledFamily(space, tuple(entries)), label_map


def normalize(space, pairs):
    fam, _ = normalize_with_map(space, pairs)
    return fam


def family_of(clop, label=1):
    return normalize(clop.space, [(clop, label)])


def add(f1, f2):
    if f1.space != f2.space:
        raise stone.SpaceMismatch("adding families over different spaces")
    return LabeledFamily(f1.space, f1.entries + f2.entries)


def multiple(f, n):
    out = LabeledFamily(f.space, ())
    for _ in range(n):
        out = add(out, f)
    return out


# ---------------------------------------------------------------------------
# equivalence certificates


@dataclass(frozen=True)
class EquivCertificate:
    triples: tuple  # ((Bisection, n, m), ...)


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok


def _tiling_matches(family, parts, side):
    """Check that labeled clopens tile the family exactly and disjointly."""
    seen = {}
    for idx, (c, label) in enumerate(parts):
        if c.is_empty:
            continue
        have = seen.get(label, empty(family.space))
        if not have.disjoint_from(c):
            return VerifyResult(False, "%s pieces overlap at label %d (triple %d)" % (side, label, idx + 1))
        seen[label] = have.union(c)
    for label, got in sorted(seen.items()):
        if got != family.entry(label):
            return VerifyResult(
                False,
                "%s union at label %d is %s, expected %s"
                % (side, label, list(got.cells), list(family.entry(label).cells)),
            )
    for label in family.labels:
        if label not in seen and not family.entry(label).is_empty:
            return VerifyResult(False, "%s label %d is not covered" % (side, label))
    return VerifyResult(True)


def verify_equiv(pres, f1, f2, cert):
    """Accept iff the certificate's disjoint unions reproduce both families."""
    if f1.space != pres.space or f2.space != pres.space:
        return VerifyResult(False, "families over the wrong space")
    for idx, (w, n, m) in enumerate(cert.triples):
        if not isinstance(w, Bisection) or w.pres != pres:
            return VerifyResult(False, "triple %d is not a bisection over this presentation" % (idx + 1,))
        if not (isinstance(n, int) and n >= 1 and isinstance(m, int) and m >= 1):
            return VerifyResult(False, "triple %d has bad labels" % (idx + 1,))
    doms = [(w.dom(), n) for w, n, _ in cert.triples]
    rans = [(w.ran(), m) for w, _, m in cert.triples]
    res = _tiling_matches(f1, doms, "domain")
    if not res:
        return res
    return _tiling_matches(f2, rans, "range")


def reflexive_cert(pres, fam):
    triples = [(identity_bisection(pres, fam.entry(i)), i, i) for i in fam.labels]
    return EquivCertificate(tuple(triples))


def symmetric_cert(cert):
    return EquivCertificate(tuple((w.inverse(), m, n) for w, n, m in cert.triples))


def transitive_cert(pres, f1, f2, f3, c1, c2):
    """Compose certificates for f1 ~ f2 and f2 ~ f3 via common refinement."""
    r1 = verify_equiv(pres, f1, f2, c1)
    if not r1:
        raise FamilyError("left certificate does not verify: %s" % r1.reason)
    r2 = verify_equiv(pres, f2, f3, c2)
    if not r2:
        raise FamilyError("right certificate does not verify: %s" % r2.reason)
    triples = []
    for w1, n1, m1 in c1.triples:
        for w2, n2, m2 in c2.triples:
            if m1 != n2:
                continue
            middle = w1.ran().intersect(w2.dom())
            if middle.is_empty:
                continue
            w = w2.restrict(middle).compose(w1.restrict_range(middle))
            triples.append((w, n1, m2))
    return EquivCertificate(tuple(triples))


def sum_cert(pres, fa, fb, fc, fd, c1, c2):
    """From fa ~ fb and fc ~ fd, a certificate for fa+fc ~ fb+fd."""
    r1 = verify_equiv(pres, fa, fb, c1)
    if not r1:
        raise FamilyError("left certificate does not verify: %s" % r1.reason)
    r2 = verify_equiv(pres, fc, fd, c2)
    if not r2:
        raise FamilyError("right certificate does not verify: %s" % r2.reason)
    shift_n = len(fa.entries)
    shift_m = len(fb.entries)
    triples = list(c1.triples) + [(w, n + shift_n, m + shift_m) for w, n, m in c2.triples]
    return EquivCertificate(tuple(triples))


def certificate_algebra(op, pres, *args):
    if op == "reflexive":
        return reflexive_cert(pres, *args)
    if op == "symmetric":
        return symmetric_cert(*args)
    if op == "transitive":
        return transitive_cert(pres, *args)
    if op == "sum":
        return sum_cert(pres, *args)
    raise ValueError("unknown certificate op %r" % op)


# ---------------------------------------------------------------------------
# the preorder


@dataclass(frozen=True)
class LeqCertificate:
    remainder: LabeledFamily
    equivalence: EquivCertificate


def verify_leq(pres, f1, f2, cert):
    return verify_equiv(pres, add(f1, cert.remainder), f2, cert.equivalence)


def subset_cert(pres, a, b):
    """The inclusion certificate [A] <= [B] for A a subset of B."""
    if not a.subset_of(b):
        raise FamilyError("subset_cert needs A contained in B")
    rest = b.difference(a)
    fa = family_of(a)
    remainder = normalize(pres.space, [(rest, 1)])
    triples = []
    if not a.is_empty:
        triples.append((identity_bisection(pres, a), 1, 1))
    if not rest.is_empty:
        triples.append((identity_bisection(pres, rest), len(fa.entries) + 1, 1))
    return LeqCertificate(remainder, EquivCertificate(tuple(triples)))


def leq_padding(pres, f, extra):
    """f <= f + extra, witnessed by the extra itself."""
    return LeqCertificate(extra, reflexive_cert(pres, add(f, extra)))


def leq_add(pres, fa, fb, c1, fc, fd, c2):
    """From fa <= fb and fc <= fd, a certificate for fa+fc <= fb+fd."""
    a, c = len(fa.entries), len(fc.entries)
    b, d = len(fb.entries), len(fd.entries)
    r1len = len(c1.remainder.entries)
    remainder = add(c1.remainder, c2.remainder)

    def left_label_1(n):
        return n if n <= a else n + c

    def left_label_2(n):
        return a + n if n <= c else a + c + r1len + (n - c)

    triples = [(w, left_label_1(n), m) for w, n, m in c1.equivalence.triples]
    triples += [(w, left_label_2(n), b + m) for w, n, m in c2.equivalence.triples]
    return LeqCertificate(remainder, EquivCertificate(tuple(triples)))


def leq_transitive(pres, fx, fy, fz, c1, c2):
    """From fx <= fy and fy <= fz, a certificate for fx <= fz."""
    r1, r2 = c1.remainder, c2.remainder
    left = add(add(fx, r1), r2)  # same entries as add(fx, add(r1, r2))
    step1 = sum_cert(pres, add(fx, r1), fy, r2, r2, c1.equivalence, reflexive_cert(pres, r2))
    chain = transitive_cert(pres, left, add(fy, r2), fz, step1, c2.equivalence)
    return LeqCertificate(add(r1, r2), chain)


# ---------------------------------------------------------------------------
# searches


@dataclass
class SearchBudget:
    limit: int
    used: int = 0

    def spend(self):
        self.used += 1
        return self.used <= self.limit


@dataclass(frozen=True)
class SearchOutcome:
    certificate: object  # EquivCertificate, LeqCertificate, or None
    status: str  # found | exhausted | budget


def _slot_cells(pres, families, enum, extra=()):
    """Cells tiling the family entries, fine enough for all piece domains."""
    space = pres.space
    if space.kind == stone.FINITE:
        depth = 0
    else:
        depth = 0
        for fam in families:
            for c in fam.entries:
                depth = max(depth, c.max_depth())
        for b in enum:
            depth = max(depth, b.dom().max_depth())
        for c in extra:
            depth = max(depth, c.max_depth())
    return depth


def _family_slots(fam, depth):
    slots = []
    for label in fam.labels:
        for cell in fam.entry(label).expand(depth):
            slots.append((label, cell))
    return slots


def _search_tiling(pres, f1, f2, depth, budget, exact):
    """Backtracking tiling of f1 cells into f2 capacity via enumerated pieces.

    With exact=True the capacity must be consumed entirely (equivalence);
    otherwise leftovers become the remainder of a <= certificate.
    """
    enum = enumerate_bisections(pres, depth).bisections
    cell_depth = _slot_cells(pres, [f1, f2], enum)
    slots = _family_slots(f1, cell_depth)
    space = pres.space

    candidates = {}
    for label, cell in slots:
        cc = clopen(space, [cell])
        opts = []
        for bi, b in enumerate(enum):
            if not cc.subset_of(b.dom()):
                continue
            image = b.apply(cc)
            for m in f2.labels:
                opts.append((bi, m, b.restrict(cc), image))
        candidates[(label, cell)] = opts

    remaining = {m: f2.entry(m) for m in f2.labels}
    chosen = []
    tracker = SearchBudget(budget)
    blown = []

    def backtrack(i):
        if i == len(slots):
            if exact and any(not r.is_empty for r in remaining.values()):
                return False
            return True
        slot = slots[i]
        for bi, m, piece, image in candidates[slot]:
            if not tracker.spend():
                blown.append(True)
                return False
            if not image.subset_of(remaining[m]):
                continue
            remaining[m] = remaining[m].difference(image)
            chosen.append((piece, slot[0], m))
            if backtrack(i + 1):
                return True
            if blown:
                return False
            chosen.pop()
            remaining[m] = remaining[m].union(image)
        return False

    found = backtrack(0)
    if not found:
        return SearchOutcome(None, "budget" if blown else "exhausted"), None
    return SearchOutcome(EquivCertificate(tuple(chosen)), "found"), dict(remaining)


def search_equiv(pres, f1, f2, depth, budget=100000):
    """Search an equivalence certificate over pieces of words up to depth.

    Deterministic; any hit verifies.  A miss is never a proof of
    inequivalence.
    """
    outcome, _ = _search_tiling(pres, f1, f2, depth, budget, exact=True)
    return outcome


def search_leq(pres, f1, f2, depth, budget=100000):
    """Search a certificate for f1 <= f2; leftovers become the remainder."""
    outcome, remaining = _search_tiling(pres, f1, f2, depth, budget, exact=False)
    if outcome.status != "found":
        return outcome
    pairs = [(remaining[m], m) for m in sorted(remaining)]
    remainder, _ = normalize_with_map(pres.space, pairs)
    shift = len(f1.entries)
    triples = list(outcome.certificate.triples)
    rank = 0
    for m in sorted(remaining):
        if remaining[m].is_empty:
            continue
        rank += 1
        triples.append((identity_bisection(pres, remaining[m]), shift + rank, m))
    return SearchOutcome(LeqCertificate(remainder, EquivCertificate(tuple(triples))), "found")


# ---------------------------------------------------------------------------
# nonnegative integer functions and the homomorphism onto the semigroup


@dataclass(frozen=True)
class IntFunction:
    """A locally constant function to the nonnegative integers.

    Stored as (cell, value) pieces with positive values; unlisted cells are
    zero.  Sibling cells sharing a value are merged, so the representation
    is canonical.
    """

    space: stone.UnitSpace
    pieces: tuple

    @property
    def is_zero(self):
        return not self.pieces

    def max_value(self):
        return max((v for _, v in self.pieces), default=0)

    def value_at(self, cell):
        """The value on a cell that does not straddle pieces."""
        if self.space.kind == stone.FINITE:
            for c, v in self.pieces:
                if c == cell:
                    return v
            return 0
        for c, v in self.pieces:
            if cell.startswith(c):
                return v
        for c, _ in self.pieces:
            if c.startswith(cell):
                raise FamilyError("function is not constant on cell %r" % (cell,))
        return 0

    def support(self):
        return clopen(self.space, [c for c, _ in self.pieces])

    def level(self, i):
        return clopen(self.space, [c for c, v in self.pieces if v >= i])

    def levels(self):
        return [self.level(i) for i in range(1, self.max_value() + 1)]

    def __repr__(self):
        return "IntFunction(%s)" % (dict(self.pieces),)


def int_function(space, pairs):
    """Canonicalize (cell, value) pairs; cells must be pairwise disjoint."""
    pairs = [(space.check_cell(c), v) for c, v in pairs if v != 0]
    for _, v in pairs:
        if not isinstance(v, int) or v < 0:
            raise FamilyError("values must be nonnegative integers")
    cells = [c for c, _ in pairs]
    if space.kind == stone.FINITE:
        if len(set(cells)) != len(cells):
            raise FamilyError("duplicate point in function pieces")
        return IntFunction(space, tuple(sorted(pairs)))
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            if cells[i].startswith(cells[j]) or cells[j].startswith(cells[i]):
                raise FamilyError("function pieces overlap: %r, %r" % (cells[i], cells[j]))
    vals = dict(pairs)
    letters = space.letters
    changed = True
    while changed:
        changed = False
        parents = {c[:-1] for c in vals if c}
        for p in sorted(parents, key=len, reverse=True):
            kids = [p + a for a in letters]
            if all(k in vals for k in kids) and len({vals[k] for k in kids}) == 1:
                v = vals[kids[0]]
                for k in kids:
                    del vals[k]
                vals[p] = v
                changed = True
    return IntFunction(space, tuple(sorted(vals.items())))


def zero_function(space):
    return IntFunction(space, ())


def indicator(clop):
    return int_function(clop.space, [(c, 1) for c in clop.cells])


def add_functions(f, g):
    if f.space != g.space:
        raise stone.SpaceMismatch("adding functions over different spaces")
    space = f.space
    if space.kind == stone.FINITE:
        vals = dict(f.pieces)
        for c, v in g.pieces:
            vals[c] = vals.get(c, 0) + v
        return int_function(space, list(vals.items()))

    out = []

    def emit(cell, fs, gs):
        f_here = [(c, v) for c, v in fs if c.startswith(cell) or cell.startswith(c)]
        g_here = [(c, v) for c, v in gs if c.startswith(cell) or cell.startswith(c)]
        f_const = all(cell.startswith(c) for c, _ in f_here)
        g_const = all(cell.startswith(c) for c, _ in g_here)
        if f_const and g_const:
            v = (f_here[0][1] if f_here else 0) + (g_here[0][1] if g_here else 0)
            if v:
                out.append((cell, v))
            return
        for a in space.letters:
            emit(cell + a, f_here, g_here)

    emit("", list(f.pieces), list(g.pieces))
    return int_function(space, out)


def sum_of_indicators(space, clopens):
    f = zero_function(space)
    for c in clopens:
        f = add_functions(f, indicator(c))
    return f


def compose_with_bisection(f, bis):
    """The pullback f o alpha_S for supp(f) inside ran(S)."""
    if not f.support().subset_of(bis.ran()):
        raise FamilyError("function support escapes the range of the bisection")
    space = f.space
    pairs = []
    for c, v in f.pieces:
        pre = bis.preimage(clopen(space, [c]))
        pairs.extend((cell, v) for cell in pre.cells)
    return int_function(space, pairs)


def rho(pres, f):
    """The canonical family of a function, via its level sets."""
    return normalize(pres.space, [(lvl, i + 1) for i, lvl in enumerate(f.levels())])


def family_from_decomposition(pres, clopens):
    return normalize(pres.space, [(c, i + 1) for i, c in enumerate(clopens)])


def rho_welldef_cert(pres, decomp1, decomp2):
    """Certificate that two decompositions of one function are equivalent.

    Follows the common refinement construction: on each refinement cell the
    multiplicities agree, and identity bisections with a label shuffle match
    both families to the level family of the function.
    """
    space = pres.space
    if sum_of_indicators(space, decomp1) != sum_of_indicators(space, decomp2):
        raise FamilyError("decompositions do not sum to the same function")
    f = sum_of_indicators(space, decomp1)
    if f.is_zero:
        return EquivCertificate(())
    fam_mid = rho(pres, f)
    fam1, map1 = normalize_with_map(space, [(c, i + 1) for i, c in enumerate(decomp1)])
    fam2, map2 = normalize_with_map(space, [(c, i + 1) for i, c in enumerate(decomp2)])

    def half_cert(decomp, label_map):
        # cells refined against this decomposition AND the level sets, so
        # every triple domain sits inside a single level cell
        cells, assigns = stone.common_refinement([list(decomp) + f.levels()])
        inside = assigns[0][: len(decomp)]
        triples = []
        for j, cell in enumerate(cells):
            owners = [i for i in range(len(decomp)) if cell in inside[i]]
            cc = clopen(space, [cell])
            for t, i in enumerate(sorted(owners), start=1):
                triples.append((identity_bisection(pres, cc), label_map[i + 1], t))
        return EquivCertificate(tuple(triples))

    c1 = half_cert(decomp1, map1)
    c2 = half_cert(decomp2, map2)
    return transitive_cert(pres, fam1, fam_mid, fam2, c1, symmetric_cert(c2))


def rho_invariance_cert(pres, bis, f):
    """Certificate for rho(f) ~ rho(f o alpha_S) when supp(f) is in ran(S)."""
    if not f.support().subset_of(bis.ran()):
        raise FamilyError("function support escapes the range of the bisection")
    triples = []
    for i, lvl in enumerate(f.levels(), start=1):
        s_i = bis.restrict_range(lvl)
        triples.append((s_i.inverse(), i, i))
    return EquivCertificate(tuple(triples))


def rho_additivity_cert(pres, f, g):
    """Certificate for rho(f+g) ~ rho(f) + rho(g)."""
    total = add_functions(f, g)
    return rho_welldef_cert(pres, total.levels(), f.levels() + g.levels())
