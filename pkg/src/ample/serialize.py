"""JSON encoding of presentations, certificates, witnesses, and states.

Every file carries a schema_version tag.  Decoders validate as they walk
the data and report the JSON path of the first offending field, so a CLI
error names the exact location.  Encoders always emit canonical forms;
parse-serialize-parse is the identity on every supported object.

Rationals are written as {"num": "...", "den": "..."} decimal strings to
keep arbitrary precision out of JSON number territory.
"""

from __future__ import annotations

import json
from fractions import Fraction

from . import stone
from .stone import UnitSpace, clopen
from . import groupoid as gpd
from .groupoid import (
    Bisection,
    GroupElement,
    PartialInjection,
    PrefixMap,
    Presentation,
    Table,
)
from . import typesemigroup as ts
from .typesemigroup import EquivCertificate, LeqCertificate
from .paradox import ParadoxWitness
from .states import FarkasCertificate, StateVector
from .convalg import from_terms

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    def __init__(self, path, message):
        self.path = path
        super().__init__("%s: %s" % (path, message))


def _need(data, key, path):
    if not isinstance(data, dict):
        raise SchemaError(path, "expected an object")
    if key not in data:
        raise SchemaError(path, "missing field %r" % key)
    return data[key]


# -- rationals ---------------------------------------------------------------


def encode_rational(q):
    q = Fraction(q)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def decode_rational(data, path="rational"):
    num = _need(data, "num", path)
    den = _need(data, "den", path)
    try:
        return Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(path, "bad rational: %s" % exc) from exc


# -- spaces and clopens -------------------------------------------------------


def encode_space(space):
    if space.kind == stone.FINITE:
        return {"kind": "finite", "n": space.size}
    return {"kind": "shift", "k": space.size}


def decode_space(data, path="space"):
    kind = _need(data, "kind", path)
    if kind == "finite":
        return UnitSpace.finite(int(_need(data, "n", path)))
    if kind == "shift":
        return UnitSpace.shift(int(_need(data, "k", path)))
    raise SchemaError(path, "unknown space kind %r" % kind)


def encode_clopen(clop):
    return {"space": encode_space(clop.space), "cells": list(clop.cells)}


def decode_clopen(data, path="clopen", space=None):
    found = decode_space(_need(data, "space", path), path + ".space")
    if space is not None and found != space:
        raise SchemaError(path + ".space", "clopen over the wrong space")
    cells = _need(data, "cells", path)
    if not isinstance(cells, list):
        raise SchemaError(path + ".cells", "expected a list")
    try:
        return clopen(found, cells)
    except (stone.CellError, ValueError) as exc:
        raise SchemaError(path + ".cells", str(exc)) from exc


# -- presentations ------------------------------------------------------------


def encode_generator(gen):
    if isinstance(gen, PrefixMap):
        return {"kind": "prefix_map", "alpha": gen.alpha, "beta": gen.beta}
    if isinstance(gen, PartialInjection):
        return {"kind": "partial_injection", "pairs": [list(p) for p in gen.pairs]}
    return {
        "kind": "group_element",
        "label": gen.label,
        "pieces": [list(p) for p in gen.pieces],
    }


def decode_generator(data, path):
    kind = _need(data, "kind", path)
    if kind == "prefix_map":
        return PrefixMap(str(_need(data, "alpha", path)), str(_need(data, "beta", path)))
    if kind == "partial_injection":
        pairs = _need(data, "pairs", path)
        return PartialInjection(tuple((int(s), int(t)) for s, t in pairs))
    if kind == "group_element":
        pieces = _need(data, "pieces", path)
        return GroupElement(
            str(_need(data, "label", path)), tuple(tuple(p) for p in pieces)
        )
    raise SchemaError(path, "unknown generator kind %r" % kind)


def encode_presentation(pres):
    if isinstance(pres.isotropy, Table):
        iso = {
            "table": [list(r) for r in pres.isotropy.products],
            "gen_elements": list(pres.isotropy.gen_elements),
        }
    else:
        iso = pres.isotropy
    return {
        "schema_version": SCHEMA_VERSION,
        "space": encode_space(pres.space),
        "generators": [encode_generator(g) for g in pres.generators],
        "isotropy": iso,
    }


def decode_presentation(data, path="presentation"):
    space = decode_space(_need(data, "space", path), path + ".space")
    gens_data = _need(data, "generators", path)
    gens = [
        decode_generator(g, "%s.generators[%d]" % (path, i))
        for i, g in enumerate(gens_data)
    ]
    iso = data.get("isotropy", "free")
    if isinstance(iso, dict):
        table = Table(
            products=tuple(tuple(int(x) for x in row) for row in _need(iso, "table", path + ".isotropy")),
            gen_elements=tuple(int(x) for x in _need(iso, "gen_elements", path + ".isotropy")),
        )
        iso = table
    elif iso not in (gpd.FREE, gpd.PRINCIPAL):
        raise SchemaError(path + ".isotropy", "unknown isotropy model %r" % iso)
    try:
        return Presentation(space, gens, iso)
    except gpd.PresentationError as exc:
        raise SchemaError(path, str(exc)) from exc


# -- words and bisections -------------------------------------------------------


def encode_word(word):
    return [["g%d" % (g + 1), e] for g, e in word]


def decode_word(data, pres, path="word"):
    out = []
    for i, pair in enumerate(data):
        here = "%s[%d]" % (path, i)
        if not (isinstance(pair, list) and len(pair) == 2):
            raise SchemaError(here, "expected [symbol, exponent]")
        sym, exp = pair
        if not (isinstance(sym, str) and sym.startswith("g")):
            raise SchemaError(here, "bad generator symbol %r" % sym)
        try:
            gi = int(sym[1:]) - 1
        except ValueError as exc:
            raise SchemaError(here, "bad generator symbol %r" % sym) from exc
        if not 0 <= gi < len(pres.generators):
            raise SchemaError(here, "generator %r not in the presentation" % sym)
        if exp not in (1, -1):
            raise SchemaError(here, "exponent must be 1 or -1")
        out.append((gi, exp))
    return tuple(out)


def encode_bisection(bis):
    return {
        "pieces": [
            {"word": encode_word(p.word), "domain": encode_clopen(p.domain)}
            for p in bis.arrow_pieces
        ]
    }


def decode_bisection(data, pres, path="bisection"):
    pieces_data = _need(data, "pieces", path)
    pieces = []
    for i, pd in enumerate(pieces_data):
        here = "%s.pieces[%d]" % (path, i)
        word = decode_word(_need(pd, "word", here), pres, here + ".word")
        dom = decode_clopen(_need(pd, "domain", here), here + ".domain", pres.space)
        pieces.append((word, dom))
    try:
        return Bisection(pres, pieces)
    except gpd.PresentationError as exc:
        raise SchemaError(path, str(exc)) from exc


# -- families and certificates ---------------------------------------------------


def encode_family(fam):
    return {
        "schema_version": SCHEMA_VERSION,
        "entries": [
            {"set": encode_clopen(c), "label": i + 1} for i, c in enumerate(fam.entries)
        ],
    }


def decode_family(data, pres, path="family"):
    entries = _need(data, "entries", path)
    pairs = []
    for i, e in enumerate(entries):
        here = "%s.entries[%d]" % (path, i)
        c = decode_clopen(_need(e, "set", here), here + ".set", pres.space)
        pairs.append((c, int(_need(e, "label", here))))
    return ts.normalize(pres.space, pairs)


def encode_equiv_certificate(cert):
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "equivalence",
        "triples": [
            {"bisection": encode_bisection(w), "n": n, "m": m}
            for w, n, m in cert.triples
        ],
    }


def decode_equiv_certificate(data, pres, path="certificate"):
    triples = []
    for i, t in enumerate(_need(data, "triples", path)):
        here = "%s.triples[%d]" % (path, i)
        w = decode_bisection(_need(t, "bisection", here), pres, here + ".bisection")
        triples.append((w, int(_need(t, "n", here)), int(_need(t, "m", here))))
    return EquivCertificate(tuple(triples))


def encode_leq_certificate(cert):
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "leq",
        "remainder": encode_family(cert.remainder),
        "equivalence": encode_equiv_certificate(cert.equivalence),
    }


def decode_leq_certificate(data, pres, path="certificate"):
    remainder = decode_family(_need(data, "remainder", path), pres, path + ".remainder")
    equiv = decode_equiv_certificate(
        _need(data, "equivalence", path), pres, path + ".equivalence"
    )
    return LeqCertificate(remainder, equiv)


def decode_certificate(data, pres, path="certificate"):
    kind = data.get("kind", "equivalence")
    if kind == "equivalence":
        return decode_equiv_certificate(data, pres, path)
    if kind == "leq":
        return decode_leq_certificate(data, pres, path)
    raise SchemaError(path + ".kind", "unknown certificate kind %r" % kind)


# -- witnesses -------------------------------------------------------------------


def encode_witness(w):
    return {
        "schema_version": SCHEMA_VERSION,
        "A": encode_clopen(w.a),
        "k": w.k,
        "l": w.l,
        "rows": [
            [{"bisection": encode_bisection(b), "m": m} for b, m in row]
            for row in w.rows
        ],
    }


def decode_witness(data, pres, path="witness"):
    a = decode_clopen(_need(data, "A", path), path + ".A", pres.space)
    k = int(_need(data, "k", path))
    l = int(_need(data, "l", path))
    rows = []
    for i, row in enumerate(_need(data, "rows", path)):
        here = "%s.rows[%d]" % (path, i)
        out = []
        for j, entry in enumerate(row):
            b = decode_bisection(
                _need(entry, "bisection", here), pres, "%s[%d].bisection" % (here, j)
            )
            out.append((b, int(_need(entry, "m", here))))
        rows.append(tuple(out))
    return ParadoxWitness(a, k, l, tuple(rows))


# -- states ----------------------------------------------------------------------


def encode_state(sv):
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "state",
        "depth": sv.depth,
        "values": [[c, encode_rational(v)] for c, v in zip(sv.cells, sv.values)],
    }


def decode_state(data, path="state"):
    depth = int(_need(data, "depth", path))
    values = _need(data, "values", path)
    cells = []
    vals = []
    for i, pair in enumerate(values):
        here = "%s.values[%d]" % (path, i)
        if not (isinstance(pair, list) and len(pair) == 2):
            raise SchemaError(here, "expected [cell, rational]")
        cells.append(pair[0])
        vals.append(decode_rational(pair[1], here))
    return StateVector(depth, tuple(cells), tuple(vals))


def encode_farkas(fc, depth, notes=()):
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "farkas",
        "depth": depth,
        "equality_multipliers": [encode_rational(v) for v in fc.equality_multipliers],
        "normalization_multiplier": encode_rational(fc.normalization_multiplier),
        "constraints": list(notes),
    }


def decode_farkas(data, path="farkas"):
    eq = [
        decode_rational(v, "%s.equality_multipliers[%d]" % (path, i))
        for i, v in enumerate(_need(data, "equality_multipliers", path))
    ]
    norm = decode_rational(_need(data, "normalization_multiplier", path), path)
    return FarkasCertificate(tuple(eq), norm), int(_need(data, "depth", path))


# -- convolution elements ----------------------------------------------------------


def encode_element(elem):
    out = []
    for key, cell, coef in elem.items():
        word = elem.pres.canonical_word(key)
        out.append(
            {"word": encode_word(word), "cell": cell, "coef": encode_rational(coef)}
        )
    return {"schema_version": SCHEMA_VERSION, "kind": "element", "terms": out}


def decode_element(data, pres, path="element"):
    triples = []
    for i, t in enumerate(_need(data, "terms", path)):
        here = "%s.terms[%d]" % (path, i)
        word = decode_word(_need(t, "word", here), pres, here + ".word")
        cell = _need(t, "cell", here)
        coef = decode_rational(_need(t, "coef", here), here + ".coef")
        triples.append((word, cell, coef))
    return from_terms(pres, triples)


# -- file helpers ------------------------------------------------------------------


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(path, "cannot read: %s" % exc) from exc
    except json.JSONDecodeError as exc:
        raise SchemaError("%s:%d" % (path, exc.lineno), exc.msg) from exc


def parse_presentation_arg(spec):
    """A builtin alias like cuntz:2, or a path to a presentation file."""
    if ":" in spec or spec in ("odometer",):
        try:
            return gpd.builtin(spec)
        except gpd.PresentationError:
            pass
    if spec.endswith(".json"):
        return decode_presentation(load_json(spec))
    try:
        return gpd.builtin(spec)
    except gpd.PresentationError:
        return decode_presentation(load_json(spec))
