"""Paradoxical decompositions of clopen sets and their certificates.

A (k,l) witness for a clopen A consists of k rows of bisection pieces: the
domains in each row cover A, and the ranges, each tagged with a label
below l, sit pairwise disjointly inside A x {1..l}.  Witnesses convert to
and from certificates of k[A] <= l[A] in the type semigroup, can be
weakened to other (k',l') shapes, and are searched for by backtracking
over enumerated pieces.

A failed search is reported as none-within-budget and never as a proof of
non-paradoxicality; definitive non-paradoxicality only ever comes from a
state certificate on the states side.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import stone
from .stone import clopen, empty
from .groupoid import Bisection, identity_bisection, from_word, enumerate_bisections
from . import typesemigroup as ts
from .typesemigroup import (
    EquivCertificate,
    LeqCertificate,
    SearchBudget,
    SearchOutcome,
    VerifyResult,
    family_of,
    multiple,
    normalize_with_map,
)


class WitnessError(ValueError):
    pass


@dataclass(frozen=True)
class ParadoxWitness:
    a: stone.Clopen
    k: int
    l: int
    rows: tuple  # k tuples of (Bisection, label in 1..l)

    def presentation(self):
        for row in self.rows:
            for bis, _ in row:
                return bis.pres
        raise WitnessError("witness has no pieces")


def verify_witness(pres, w):
    """Check both defining conditions exactly; rejection carries a reason."""
    if not (isinstance(w.k, int) and isinstance(w.l, int) and w.k > w.l >= 1):
        return VerifyResult(False, "need k > l >= 1, got (%r, %r)" % (w.k, w.l))
    if w.a.space != pres.space:
        return VerifyResult(False, "witness set over the wrong space")
    if w.a.is_empty:
        return VerifyResult(False, "the decomposed set must be nonempty")
    if len(w.rows) != w.k:
        return VerifyResult(False, "expected %d rows, got %d" % (w.k, len(w.rows)))
    for i, row in enumerate(w.rows, start=1):
        for bis, m in row:
            if not isinstance(bis, Bisection) or bis.pres != pres:
                return VerifyResult(False, "row %d has a piece over another presentation" % i)
            if not (isinstance(m, int) and 1 <= m <= w.l):
                return VerifyResult(False, "row %d has target label %r outside 1..%d" % (i, m, w.l))
    for i, row in enumerate(w.rows, start=1):
        covered = empty(pres.space)
        for bis, _ in row:
            covered = covered.union(bis.dom())
        if covered != w.a:
            return VerifyResult(False, "row %d domains cover %s, not A" % (i, list(covered.cells)))
    taken = {m: empty(pres.space) for m in range(1, w.l + 1)}
    for i, row in enumerate(w.rows, start=1):
        for j, (bis, m) in enumerate(row, start=1):
            ran = bis.ran()
            if not ran.subset_of(w.a):
                return VerifyResult(False, "range of piece (%d,%d) escapes A" % (i, j))
            if not ran.disjoint_from(taken[m]):
                return VerifyResult(False, "ranges overlap at label %d (piece (%d,%d))" % (m, i, j))
            taken[m] = taken[m].union(ran)
    return VerifyResult(True)


def disjointify(pres, w):
    """Make each row's domains pairwise disjoint by trimming later pieces."""
    rows = []
    for row in w.rows:
        seen = empty(pres.space)
        out = []
        for bis, m in row:
            cut = bis.restrict(bis.dom().difference(seen))
            seen = seen.union(bis.dom())
            if not cut.is_empty:
                out.append((cut, m))
        rows.append(tuple(out))
    return ParadoxWitness(w.a, w.k, w.l, tuple(rows))


def rows_disjoint(w):
    for row in w.rows:
        seen = None
        for bis, _ in row:
            d = bis.dom()
            if seen is not None and not seen.disjoint_from(d):
                return False
            seen = d if seen is None else seen.union(d)
    return True


def witness_to_leq(pres, w):
    """The certificate k[A] <= l[A] read off a verifying witness."""
    res = verify_witness(pres, w)
    if not res:
        raise WitnessError("witness does not verify: %s" % res.reason)
    w = disjointify(pres, w)
    fam_a = family_of(w.a)
    taken = {m: empty(pres.space) for m in range(1, w.l + 1)}
    triples = []
    for i, row in enumerate(w.rows, start=1):
        for bis, m in row:
            triples.append((bis, i, m))
            taken[m] = taken[m].union(bis.ran())
    pairs = [(w.a.difference(taken[m]), m) for m in range(1, w.l + 1)]
    remainder, rmap = normalize_with_map(pres.space, pairs)
    for m in range(1, w.l + 1):
        rest = w.a.difference(taken[m])
        if not rest.is_empty:
            triples.append((identity_bisection(pres, rest), w.k + rmap[m], m))
    cert = LeqCertificate(remainder, EquivCertificate(tuple(triples)))
    check = ts.verify_leq(pres, multiple(fam_a, w.k), multiple(fam_a, w.l), cert)
    if not check:
        raise WitnessError("internal: constructed certificate fails: %s" % check.reason)
    return cert


def leq_to_witness(pres, a, k, l, cert):
    """Rebuild a witness from a verifying certificate of k[A] <= l[A]."""
    if not (k > l >= 1):
        raise WitnessError("k <= l rejected: a paradox needs a genuine drop")
    fam_a = family_of(a)
    res = ts.verify_leq(pres, multiple(fam_a, k), multiple(fam_a, l), cert)
    if not res:
        raise WitnessError("certificate does not verify: %s" % res.reason)
    rows = [[] for _ in range(k)]
    for bis, n, m in cert.equivalence.triples:
        if bis.is_empty:
            continue
        if n <= k:
            rows[n - 1].append((bis, m))
    w = ParadoxWitness(a, k, l, tuple(tuple(r) for r in rows))
    check = verify_witness(pres, w)
    if not check:
        raise WitnessError("internal: rebuilt witness fails: %s" % check.reason)
    return w


def _leq_identity(pres, fam):
    return LeqCertificate(ts.LabeledFamily(pres.space, ()), ts.reflexive_cert(pres, fam))


def weaken(pres, w, k2, l2):
    """A (k2,l2) witness from a (k,l) one, for any k2 > l2 >= l.

    Runs the inequality chain in the type semigroup: iterate k[A] <= l[A]
    to push the left side arbitrarily high, pad both sides, and read the
    resulting certificate back as a witness.
    """
    if not (k2 > l2 >= w.l):
        raise WitnessError("invalid weakening targets (%r, %r)" % (k2, l2))
    k, l = w.k, w.l
    fam_a = family_of(w.a)
    base = witness_to_leq(pres, w)

    m = k2 - (l2 - l)
    cur_k = k
    cert = base  # cur_k [A] <= l [A]
    while cur_k < m:
        pad = multiple(fam_a, k - l)
        widened = ts.leq_add(pres, multiple(fam_a, cur_k), multiple(fam_a, l), cert,
                             pad, pad, _leq_identity(pres, pad))
        # (cur_k + k - l)[A] <= k[A] <= l[A]
        cert = ts.leq_transitive(pres, multiple(fam_a, cur_k + k - l),
                                 multiple(fam_a, k), multiple(fam_a, l), widened, base)
        cur_k += k - l
    if cur_k > m:
        drop = ts.leq_padding(pres, multiple(fam_a, m), multiple(fam_a, cur_k - m))
        cert = ts.leq_transitive(pres, multiple(fam_a, m), multiple(fam_a, cur_k),
                                 multiple(fam_a, l), drop, cert)
    if l2 > l:
        pad = multiple(fam_a, l2 - l)
        cert = ts.leq_add(pres, multiple(fam_a, m), multiple(fam_a, l), cert,
                          pad, pad, _leq_identity(pres, pad))
    return leq_to_witness(pres, w.a, k2, l2, cert)


def transform(pres, w, op, *args):
    if op == "weaken":
        return weaken(pres, w, *args)
    if op == "disjointify":
        return disjointify(pres, w)
    raise ValueError("unknown transform %r" % op)


def merge_to_pseudopair(pres, w):
    """Merge the two rows of a disjoint (2,1) witness into one bisection each."""
    res = verify_witness(pres, w)
    if not res:
        raise WitnessError("witness does not verify: %s" % res.reason)
    if (w.k, w.l) != (2, 1):
        raise WitnessError("pseudogroup merge needs a (2,1) witness")
    if not rows_disjoint(w):
        raise WitnessError("rows are not disjoint; apply disjointify first")
    merged = []
    for row in w.rows:
        pieces = []
        for bis, _ in row:
            pieces.extend((p.word, p.domain) for p in bis.arrow_pieces)
        merged.append(Bisection(pres, pieces))
    s1, s2 = merged
    if s1.dom() != w.a or s2.dom() != w.a or not s1.ran().disjoint_from(s2.ran()):
        raise WitnessError("internal: merged pair is not weakly paradoxical")
    return s1, s2


def search_witness(pres, a, k, l, depth, budget=100000):
    """Backtracking search for a (k,l) witness over enumerated pieces.

    Each row is tiled by refinement cells of A; candidate pieces are the
    depth-bounded words restricted to one cell with range inside A.  Slots
    are filled fewest-candidates-first with lexicographic tie-breaking, so
    the outcome is deterministic.  None-within-budget is not a proof.
    """
    if not (k > l >= 1):
        raise WitnessError("need k > l >= 1")
    if a.is_empty:
        raise WitnessError("the decomposed set must be nonempty")
    space = pres.space
    enum = enumerate_bisections(pres, depth).bisections
    if space.kind == stone.FINITE:
        cell_depth = 0
    else:
        cell_depth = a.max_depth()
        for b in enum:
            cell_depth = max(cell_depth, b.dom().max_depth())
    cells = a.expand(cell_depth)

    base_candidates = {}
    for cell in cells:
        cc = clopen(space, [cell])
        opts = []
        for bi, b in enumerate(enum):
            if not cc.subset_of(b.dom()):
                continue
            image = b.apply(cc)
            if not image.subset_of(a):
                continue
            for m in range(1, l + 1):
                opts.append((bi, m, b.restrict(cc), image))
        base_candidates[cell] = opts

    slots = [(i, cell) for i in range(k) for cell in cells]
    assigned = {}
    remaining = {m: a for m in range(1, l + 1)}
    tracker = SearchBudget(budget)
    blown = []

    def feasible(slot):
        out = []
        for cand in base_candidates[slot[1]]:
            if cand[3].subset_of(remaining[cand[1]]):
                out.append(cand)
        return out

    def backtrack():
        if len(assigned) == len(slots):
            return True
        best = None
        best_opts = None
        for slot in slots:
            if slot in assigned:
                continue
            opts = feasible(slot)
            if best is None or len(opts) < len(best_opts):
                best, best_opts = slot, opts
                if not opts:
                    break
        if not best_opts:
            return False
        for bi, m, piece, image in best_opts:
            if not tracker.spend():
                blown.append(True)
                return False
            assigned[best] = (piece, m)
            remaining[m] = remaining[m].difference(image)
            if backtrack():
                return True
            if blown:
                return False
            del assigned[best]
            remaining[m] = remaining[m].union(image)
        return False

    if not backtrack():
        return SearchOutcome(None, "budget" if blown else "exhausted")
    rows = []
    for i in range(k):
        row = [assigned[(i, cell)] for cell in cells]
        rows.append(tuple(row))
    w = ParadoxWitness(a, k, l, tuple(rows))
    res = verify_witness(pres, w)
    if not res:
        raise WitnessError("internal: search produced a non-verifying witness: %s" % res.reason)
    return SearchOutcome(w, "found")


def cuntz_witness(pres, alpha, k=2):
    """The standard witness on a cylinder: route alpha-X onto alpha-i-X.

    Row i uses the single bisection sending alpha+w to alpha+i+w, whose
    domain is the cylinder of alpha and whose range is the cylinder of
    alpha+i; the ranges are pairwise disjoint inside the cylinder.
    """
    n = pres.space.size
    if pres.space.kind != stone.SHIFT or k > n:
        raise WitnessError("need a shift presentation with alphabet size >= k")
    a = clopen(pres.space, [alpha])
    rows = []
    for i in range(1, k + 1):
        beta = alpha + str(i)
        word = tuple((int(ch) - 1, 1) for ch in beta) + tuple(
            (int(ch) - 1, -1) for ch in reversed(alpha)
        )
        bis = from_word(pres, word, domain=a)
        rows.append(((bis, 1),))
    return ParadoxWitness(a, k, 1, tuple(rows))
