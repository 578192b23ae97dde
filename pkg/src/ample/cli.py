"""Command line surface: parse inputs, dispatch, emit deterministic reports.

Exit codes: 0 verified or found, 1 rejected or refuted, 2 inconclusive
within budget, 3 input error.  Reports are JSON on stdout (stable key
order, no timestamps); --human switches to prose.  All randomness flows
from --seed, and the default search budget can be set through the
AMPLE_BUDGET environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import convalg, orbits, paradox, serialize, states, stone
from . import groupoid as gpd
from . import typesemigroup as ts

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT = 3


def default_budget():
    return int(os.environ.get("AMPLE_BUDGET", "100000"))


def _emit(args, report, human_lines):
    if args.human:
        for line in human_lines:
            print(line)
    else:
        sys.stdout.write(serialize.dumps(report))


def _write_out(args, payload):
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(serialize.dumps(payload))


def _parse_set(pres, spec):
    if spec == "whole":
        return stone.whole(pres.space)
    cells = []
    for part in spec.split(","):
        part = part.strip()
        cells.append(int(part) if pres.space.kind == stone.FINITE else part)
    return stone.clopen(pres.space, cells)


def _rational_str(q):
    q = Fraction(q)
    return "%d/%d" % (q.numerator, q.denominator) if q.denominator != 1 else str(q.numerator)


def cmd_verify_witness(args):
    pres = serialize.parse_presentation_arg(args.presentation)
    w = serialize.decode_witness(serialize.load_json(args.witness), pres)
    res = paradox.verify_witness(pres, w)
    report = {"command": "verify-witness", "accepted": res.ok, "reason": res.reason}
    _emit(args, report, ["accepted" if res.ok else "rejected: %s" % res.reason])
    return EXIT_OK if res.ok else EXIT_REJECTED


def cmd_find_witness(args):
    pres = serialize.parse_presentation_arg(args.presentation)
    a = _parse_set(pres, args.set)
    out = paradox.search_witness(pres, a, args.k, args.l, args.depth, args.budget)
    report = {
        "command": "find-witness",
        "status": out.status,
        "k": args.k,
        "l": args.l,
        "depth": args.depth,
    }
    if out.status == "found":
        payload = serialize.encode_witness(out.certificate)
        report["witness"] = payload
        _write_out(args, payload)
        _emit(args, report, ["found a (%d,%d) witness" % (args.k, args.l)])
        return EXIT_OK
    _emit(args, report, ["none within budget (not a proof of non-paradoxicality)"])
    return EXIT_INCONCLUSIVE


def cmd_type_eq(args):
    pres = serialize.parse_presentation_arg(args.presentation)
    f1 = serialize.decode_family(serialize.load_json(args.left), pres)
    f2 = serialize.decode_family(serialize.load_json(args.right), pres)
    out = ts.search_equiv(pres, f1, f2, args.depth, args.budget)
    report = {"command": "type-eq", "status": out.status, "depth": args.depth}
    if out.status == "found":
        payload = serialize.encode_equiv_certificate(out.certificate)
        report["certificate"] = payload
        _write_out(args, payload)
        _emit(args, report, ["equivalent: certificate found"])
        return EXIT_OK
    _emit(args, report, ["none within budget (not a proof of inequivalence)"])
    return EXIT_INCONCLUSIVE


def cmd_verify_cert(args):
    pres = serialize.parse_presentation_arg(args.presentation)
    f1 = serialize.decode_family(serialize.load_json(args.left), pres)
    f2 = serialize.decode_family(serialize.load_json(args.right), pres)
    cert = serialize.decode_certificate(serialize.load_json(args.cert), pres)
    if isinstance(cert, ts.LeqCertificate):
        res = ts.verify_leq(pres, f1, f2, cert)
    else:
        res = ts.verify_equiv(pres, f1, f2, cert)
    report = {"command": "verify-cert", "accepted": res.ok, "reason": res.reason}
    _emit(args, report, ["accepted" if res.ok else "rejected: %s" % res.reason])
    return EXIT_OK if res.ok else EXIT_REJECTED


def cmd_state(args):
    pres = serialize.parse_presentation_arg(args.presentation)
    cs = states.build_constraints(pres, args.depth)
    outcome = states.solve_state(cs)
    if isinstance(outcome, states.StateVector):
        payload = serialize.encode_state(outcome)
        report = {
            "command": "state",
            "outcome": "state",
            "depth": cs.depth,
            "partial": cs.partial,
            "state": payload,
        }
        _write_out(args, payload)
        _emit(
            args,
            report,
            ["state at depth %d:" % cs.depth]
            + ["  mu(%s) = %s" % (c, _rational_str(v)) for c, v in zip(outcome.cells, outcome.values)],
        )
        return EXIT_OK
    notes = [note for _, note in cs.equalities]
    payload = serialize.encode_farkas(outcome, cs.depth, notes)
    report = {
        "command": "state",
        "outcome": "infeasible",
        "depth": cs.depth,
        "partial": cs.partial,
        "farkas": payload,
    }
    _write_out(args, payload)
    _emit(args, report, ["no invariant state at depth %d; Farkas certificate emitted" % cs.depth])
    return EXIT_REJECTED


def cmd_tarski(args):
    pres = serialize.parse_presentation_arg(args.presentation)
    a = _parse_set(pres, args.set)
    rep = states.tarski_report(pres, a, args.depth, args.budget)
    report = {
        "command": "tarski",
        "outcome": rep.outcome,
        "depth": rep.depth,
        "partial": rep.partial,
        "note": rep.note,
    }
    lines = ["outcome: %s (depth %d)" % (rep.outcome, rep.depth)]
    if rep.outcome == "state":
        payload = serialize.encode_state(rep.state)
        report["state"] = payload
        report["scale"] = serialize.encode_rational(rep.scale)
        _write_out(args, payload)
        lines.append("state normalized on the set; scale %s" % _rational_str(rep.scale))
        return _emit(args, report, lines) or EXIT_OK
    if rep.outcome == "paradox":
        payload = serialize.encode_witness(rep.witness)
        report["witness"] = payload
        report["shape"] = [rep.witness.k, rep.witness.l]
        _write_out(args, payload)
        lines.append("paradoxical: (%d,%d) witness" % (rep.witness.k, rep.witness.l))
        return _emit(args, report, lines) or EXIT_OK
    _emit(args, report, lines + [rep.note])
    return EXIT_INCONCLUSIVE


def cmd_dichotomy(args):
    pres = serialize.parse_presentation_arg(args.presentation)
    full = stone.whole(pres.space)
    rep = states.tarski_report(pres, full, args.depth, args.budget)
    probe = states.probes(pres, args.depth, args.samples, args.seed, budget=args.budget)
    report = {
        "command": "dichotomy",
        "depth": args.depth,
        "minimal": gpd.is_minimal(pres, args.depth),
        "whole_space": rep.outcome,
        "note": rep.note,
        "almost_unperforation_counterexample": probe.almost_unperforation,
    }
    lines = ["minimal: %s" % report["minimal"]]
    if rep.outcome == "state":
        report["side"] = "stably finite at this depth: faithful trace candidate exists"
        report["state"] = serialize.encode_state(rep.state)
        lines.append("whole space admits an invariant state: stably finite side")
    elif rep.outcome == "paradox":
        report["side"] = "purely infinite at this depth: unit space is paradoxical"
        report["witness"] = serialize.encode_witness(rep.witness)
        lines.append("whole space is paradoxical: purely infinite side")
    else:
        report["side"] = "inconclusive"
        lines.append("inconclusive at this depth")
    _emit(args, report, lines)
    return EXIT_OK if rep.outcome in ("state", "paradox") else EXIT_INCONCLUSIVE


def cmd_orbits(args):
    pres = serialize.parse_presentation_arg(args.presentation)
    part, block_of = orbits.quasi_orbits(pres)
    lattice = orbits.invariant_lattice(pres)
    report = {
        "command": "orbits",
        "orbits": [list(b) for b in part.blocks],
        "quasi_orbit_map": list(block_of),
        "invariant_subsets": [list(s) for s in lattice.subsets],
    }
    _emit(
        args,
        report,
        ["%d orbit(s): %s" % (part.count, [list(b) for b in part.blocks]),
         "%d invariant subset(s)" % lattice.size],
    )
    return EXIT_OK


def cmd_ideal_check(args):
    pres = serialize.parse_presentation_arg(args.presentation)
    rep = orbits.ideal_lattice_check(pres)
    rep["command"] = "ideal-check"
    _emit(
        args,
        rep,
        ["ideal lattice check: %s" % ("passed" if rep["passed"] else "FAILED"),
         "orbits: %d, ideals: %d, primes: %d" % (rep["orbit_count"], rep["ideal_count"], rep["prime_count"])],
    )
    return EXIT_OK if rep["passed"] else EXIT_REJECTED


def cmd_isometries(args):
    pres = serialize.parse_presentation_arg(args.presentation)
    w = serialize.decode_witness(serialize.load_json(args.witness), pres)
    if args.matrix:
        mats, rep = convalg.matrix_isometries(pres, w)
        ok = all(rep.values())
        report = {"command": "isometries", "mode": "matrix", "checks": rep, "count": len(mats)}
        _emit(args, report, ["matrix isometries: %s" % rep])
        return EXIT_OK if ok else EXIT_REJECTED
    w = paradox.disjointify(pres, w)
    f, g, rep = convalg.isometries_from_witness(pres, w)
    ok = all(rep.values())
    payload = {
        "f": serialize.encode_element(f),
        "g": serialize.encode_element(g),
        "checks": rep,
    }
    report = {"command": "isometries", "mode": "pair", "checks": rep}
    _write_out(args, payload)
    _emit(args, report, ["isometry relations: %s" % rep])
    return EXIT_OK if ok else EXIT_REJECTED


def cmd_probe(args):
    pres = serialize.parse_presentation_arg(args.presentation)
    rep = states.probes(pres, args.depth, args.samples, args.seed, budget=args.budget)
    report = {
        "command": "probe",
        "depth": rep.depth,
        "seed": rep.seed,
        "order_unit": list(rep.order_unit),
        "almost_unperforation_counterexample": rep.almost_unperforation,
    }
    lines = ["order-unit probes: %d" % len(rep.order_unit)]
    if rep.almost_unperforation is None:
        lines.append("no almost-unperforation counterexample found")
    else:
        lines.append("budget-relative counterexample: %s" % rep.almost_unperforation)
    _emit(args, report, lines)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ample",
        description="exact computation with ample groupoid presentations",
    )
    parser.add_argument("--human", action="store_true", help="prose output instead of JSON")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_depth=True, with_budget=True, with_output=True):
        p.add_argument("presentation", help="builtin alias (cuntz:2, pair:3, rotation:3, rotation:3:table, odometer, trivial:2) or a presentation file")
        if with_depth:
            p.add_argument("--depth", type=int, default=1)
        if with_budget:
            p.add_argument("--budget", type=int, default=default_budget())
        if with_output:
            p.add_argument("-o", "--output", help="write the emitted certificate here")

    p = sub.add_parser("verify-witness", help="check a paradoxical decomposition file")
    common(p, with_depth=False, with_budget=False, with_output=False)
    p.add_argument("--witness", required=True)
    p.set_defaults(func=cmd_verify_witness)

    p = sub.add_parser("find-witness", help="search a (k,l) witness for a clopen set")
    common(p)
    p.add_argument("--set", default="whole")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--l", type=int, default=1)
    p.set_defaults(func=cmd_find_witness)

    p = sub.add_parser("type-eq", help="search an equivalence certificate between families")
    common(p)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.set_defaults(func=cmd_type_eq)

    p = sub.add_parser("verify-cert", help="check an equivalence or leq certificate")
    common(p, with_depth=False, with_budget=False, with_output=False)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--cert", required=True)
    p.set_defaults(func=cmd_verify_cert)

    p = sub.add_parser("state", help="solve the invariant-state system at a depth")
    common(p, with_budget=False)
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("tarski", help="state versus paradox for a clopen set")
    common(p)
    p.add_argument("--set", default="whole")
    p.set_defaults(func=cmd_tarski)

    p = sub.add_parser("dichotomy", help="desk-scale dichotomy report for the unit space")
    common(p, with_output=False)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_dichotomy)

    p = sub.add_parser("orbits", help="orbits, quasi-orbits, and invariant subsets")
    common(p, with_depth=False, with_budget=False, with_output=False)
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("ideal-check", help="verify the ideal correspondence on a finite model")
    common(p, with_depth=False, with_budget=False, with_output=False)
    p.set_defaults(func=cmd_ideal_check)

    p = sub.add_parser("isometries", help="build and verify isometries from a witness")
    common(p, with_depth=False, with_budget=False)
    p.add_argument("--witness", required=True)
    p.add_argument("--matrix", action="store_true", help="matrix amplification checks")
    p.set_defaults(func=cmd_isometries)

    p = sub.add_parser("probe", help="order-unit and almost-unperforation probes")
    common(p, with_output=False)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_probe)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except serialize.SchemaError as exc:
        print("input error at %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except (gpd.PresentationError, gpd.PresentationMismatch) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except (orbits.NotFiniteError, orbits.PrincipalityError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except (paradox.WitnessError, ts.FamilyError, convalg.AlgebraError, states.DepthError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except (stone.SpaceMismatch, stone.CellError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
