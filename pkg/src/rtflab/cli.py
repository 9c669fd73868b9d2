"""Command line front end.

Every verification subcommand prints either a table (default) or a JSON
report (``--json``).  Exit status: 0 when every case passes, 2 on a
mismatch, 1 on a configuration or engine error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

from .engine import EvalContext, eval_orbital_G, eval_orbital_S, eval_orbital_split, orbital_profile
from .errors import AxiomFailure, GridEmpty, RtfLabError
from .fields import residue_field
from .laurent import parse_local
from .quad_ext import QuadExt
from .suites import (VerificationReport, XGrid, bad_det_candidate, parse_window, unramified_candidate,
                     verify_AFL, verify_FL, verify_gauss_laws, verify_metric_at_infinity, verify_combination_matching,
                     verify_properties, verify_smooth_examples, verify_special_multiplicity_axioms,
                     verify_split_matching, zero_candidate)
from .testfns import Cm, IntegralDetM, IntegralDetMG, KcapS, KepsM, KepsMZ

EXIT_OK, EXIT_ERROR, EXIT_MISMATCH = 0, 1, 2

TEST_FUNCTIONS = {
    "KcapS": lambda: KcapS(),
    "IntegralDetM": IntegralDetM,
    "IntegralDetM_G": IntegralDetMG,
    "IntegralDetMG": IntegralDetMG,
    "Cm": Cm,
    "K1": lambda: Cm(0),
    "KepsM": KepsM,
    "KepsMZ": KepsMZ,
}


LITERAL_HELP = ("element of F_q((t)) written as a sum of terms c*t^k; c is an integer read mod p or a power "
                "g^j of the fixed generator of F_q^x; a trailing O(t^N) sets the precision. "
                'Examples: "t^2", "1 + g^2*t^3 - t^-1", "2*t + O(t^6)"')


class UsageError(RtfLabError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as a mismatch
    def error(self, message):
        raise UsageError(message)


def parse_test_function(text):
    m = re.fullmatch(r"\s*(\w+)\s*(?:\(\s*(-?\d+)?\s*\))?\s*", text)
    if not m or m.group(1) not in TEST_FUNCTIONS:
        raise UsageError(f"unknown test function {text!r}; known: {', '.join(sorted(TEST_FUNCTIONS))}")
    name, arg = m.group(1), m.group(2)
    ctor = TEST_FUNCTIONS[name]
    try:
        return ctor(int(arg)) if arg is not None else ctor()
    except TypeError:
        raise UsageError(f"{name} takes {'no' if arg is not None else 'an integer'} argument") from None


def int_list(text):
    return parse_window(text)


# ------------------------------------------------------------------ output

def _default_conventions(q):
    ctx = EvalContext(QuadExt(q))
    d = ctx.describe()
    return {"measure": {"vol_OF": d["vol_OF"], "extension": d["extension"]},
            "omega_convention": d["omega_convention"]}


def _merge(reports, suite, params, q):
    out = VerificationReport(suite, params)
    for r in reports:
        out.extend(r)
    if reports:
        out.seed = reports[0].seed
        out.depth = reports[0].depth
        out.psi_conductor = reports[0].psi_conductor
        out.conventions = dict(reports[0].conventions)
    for k, v in _default_conventions(q).items():
        out.conventions.setdefault(k, v)
    return out


def render_table(report):
    d = report.to_dict()
    rows = [("pass", "case", "v(x)", "unit part", "lhs", "rhs")]
    for c in d["cases"]:
        x = c["x"]
        rows.append(("PASS" if c["pass"] else "FAIL", c["label"], "" if x["valuation"] is None else str(x["valuation"]),
                     str(x["unit_repr"]), c["lhs"], c["rhs"]))
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    lines = [f"suite {d['suite']}  {json.dumps(d['params'], sort_keys=True)}",
             f"provenance {json.dumps(d['provenance'], sort_keys=True)}"]
    lines += ["  ".join(r[i].ljust(widths[i]) for i in range(5)) + "  " + r[5] for r in rows]
    lines += [f"note: {n}" for n in d["notes"]]
    lines.append(f"passed {d['summary']['passed']}/{d['summary']['total']}")
    return "\n".join(lines) + "\n"


def emit_report(report, fmt="table", path=None, out=None):
    """Write the report as a table or as JSON, to ``path`` or to ``out``."""
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n" if fmt == "json" else render_table(report)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        (out or sys.stdout).write(text)


def emit(report, args, out):
    emit_report(report, "json" if args.json else "table", getattr(args, "output", None), out)


def _status(report):
    return EXIT_OK if report.passed else EXIT_MISMATCH


def _empty(suite, params, q, args, out, why):
    sys.stderr.write(f"warning: empty grid ({why}); nothing to check\n")
    rep = VerificationReport(suite, params, seed=getattr(args, "seed", 0))
    rep.conventions = _default_conventions(q)
    emit(rep, args, out)
    return EXIT_OK


# ------------------------------------------------------------------ subcommands

def cmd_fl(args, out):
    m_list, vx = int_list(args.m), int_list(args.vx)
    params = {"q": args.q, "m": list(m_list), "vx": list(vx), "samples": args.samples}
    if not m_list or not vx or args.samples <= 0:
        return _empty("fl", params, args.q, args, out, "no m, valuation or sample")
    rep = verify_FL(args.q, None, m_list, XGrid(vx, args.samples, args.seed), cross_check=args.cross_check,
                    depth=args.depth, check_stability=args.check_stability, seed=args.seed)
    emit(rep, args, out)
    return _status(rep)


def cmd_afl(args, out):
    m_list, vx = int_list(args.m), int_list(args.vx)
    params = {"q": args.q, "m": list(m_list), "vx": list(vx), "samples": args.samples}
    if not m_list or not vx or args.samples <= 0:
        return _empty("afl", params, args.q, args, out, "no m, valuation or sample")
    rep = verify_AFL(args.q, m_list, XGrid(vx, args.samples, args.seed), seed=args.seed)
    emit(rep, args, out)
    return _status(rep)


def cmd_match(args, out):
    if args.flavor == "split":
        qs = int_list(args.q)
        if not qs or args.pairs <= 0:
            return _empty("match", {"q": list(qs), "flavor": "split"}, 3, args, out, "no pairs")
        rep = verify_split_matching(qs, args.pairs, args.seed)
        rep.conventions.update(_default_conventions(qs[0]))
        emit(rep, args, out)
        return _status(rep)
    qs = int_list(args.q)
    m_list = int_list(args.m)
    if not qs:
        return _empty("match", {"q": [], "flavor": args.flavor}, 3, args, out, "no q")
    reports = []
    for q in qs:
        if args.kind in ("combination", "all") and m_list:
            reports.append(verify_combination_matching(q, args.flavor, m_list, args.seed))
        if args.kind in ("examples", "all"):
            reports.append(verify_smooth_examples(q, args.flavor, args.seed))
    rep = _merge(reports, "match", {"q": list(qs), "flavor": args.flavor, "kind": args.kind,
                                    "m": list(m_list)}, qs[0])
    if not rep.cases:
        return _empty("match", rep.params, qs[0], args, out, "no m")
    emit(rep, args, out)
    return _status(rep)


def cmd_gauss(args, out):
    qs, ns = int_list(args.q), int_list(args.n)
    if not qs or not ns:
        return _empty("gauss", {"q": list(qs), "n": list(ns)}, 3, args, out, "no q or n")
    rep = verify_gauss_laws(qs, ns, args.max_conductor, args.seed, constructions=not args.laws_only)
    rep.conventions.setdefault("omega_convention", "restriction")
    emit(rep, args, out)
    return _status(rep)


def cmd_minf(args, out):
    qs = int_list(args.q)
    if not qs or args.samples <= 0:
        return _empty("minf", {"q": list(qs), "samples": args.samples}, 3, args, out, "no samples")
    rep = verify_metric_at_infinity(qs, args.samples, args.seed)
    rep.conventions = _default_conventions(qs[0])
    emit(rep, args, out)
    return _status(rep)


CANDIDATES = {"unramified": unramified_candidate, "zero": zero_candidate, "bad-det": bad_det_candidate}


def cmd_axioms(args, out):
    E = QuadExt(args.q)
    cand = CANDIDATES[args.candidate](E)
    rep = verify_special_multiplicity_axioms(cand, args.level, args.samples, args.seed, raise_on_failure=False)
    rep.conventions = _default_conventions(args.q)
    emit(rep, args, out)
    if not rep.passed:
        clause = rep.failures()[0].label.strip("()")
        sys.stderr.write(f"axiom ({clause}) fails for the {args.candidate} candidate\n")
    return _status(rep)


def cmd_properties(args, out):
    rep = verify_properties(args.seed)
    rep.conventions = _default_conventions(3)
    emit(rep, args, out)
    return _status(rep)


def _orbital_ctx(args):
    E = QuadExt(args.q, args.flavor)
    return EvalContext(E, c_psi=args.c_psi, strategy=args.strategy, depth=args.depth,
                       check_stability=args.check_stability)


def cmd_orbital_eval(args, out):
    ctx = _orbital_ctx(args)
    F = ctx.E.F
    fn = parse_test_function(args.phi)
    x = parse_local(F, args.x)
    if args.flavor == "split":
        val = eval_orbital_split(fn.side, fn, x, ctx)
    elif fn.side == "G":
        eps = parse_local(F, args.eps) if args.eps else None
        val = eval_orbital_G(fn, x, ctx, eps=eps)
    else:
        val = eval_orbital_S(fn, x, ctx)
        if not args.series:
            val = val.at_T1()
    if args.json:
        out.write(json.dumps({"phi": fn.label(), "x": {"valuation": x.val, "unit_repr": x.unit_part().render()},
                              "value": val.render(), "provenance": {"depth": args.depth or "adaptive",
                                                                    **ctx.describe()}},
                             indent=2, sort_keys=True) + "\n")
    else:
        out.write(val.render() + "\n")
    return EXIT_OK


def cmd_orbital_profile(args, out):
    ctx = _orbital_ctx(args)
    fn = parse_test_function(args.phi)
    prof = orbital_profile(fn, int_list(args.vx), ctx, samples=args.samples, seed=args.seed)
    prof["table"] = {str(k): v for k, v in prof["table"].items()}
    out.write(json.dumps(prof, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


COMMANDS = {
    "fl": cmd_fl,
    "afl": cmd_afl,
    "match": cmd_match,
    "gauss": cmd_gauss,
    "minf": cmd_minf,
    "axioms": cmd_axioms,
    "properties": cmd_properties,
    "orbital eval": cmd_orbital_eval,
    "orbital profile": cmd_orbital_profile,
}


def build_parser():
    p = _Parser(prog="rtflab", description="Exact orbital integrals over F_q((t)) and matching checks.")
    p.add_argument("--threads", type=int, help="worker cap (same as RTF_LAB_THREADS)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True):
        sp.add_argument("--json", action="store_true", help="print the JSON report")
        sp.add_argument("--output", help="write the report to this file instead of stdout")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("fl", help="Hermitian side against the Hecke side")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--m", default="0,2,4")
    sp.add_argument("--vx", default="-6..6")
    sp.add_argument("--samples", type=int, default=3)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--cross-check", action="store_true", help="also enumerate element-wise")
    sp.add_argument("--check-stability", action="store_true")
    common(sp)

    sp = sub.add_parser("afl", help="intersection numbers against the derivative")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--m", default="0,2")
    sp.add_argument("--vx", default="-3,-1,1,3,5")
    sp.add_argument("--samples", type=int, default=3)
    common(sp)

    sp = sub.add_parser("match", help="smooth matching checks")
    sp.add_argument("--q", default="3")
    sp.add_argument("--flavor", choices=["unramified", "ramified", "split"], default="unramified")
    sp.add_argument("--kind", choices=["combination", "examples", "all"], default="all")
    sp.add_argument("--m", default="1,2")
    sp.add_argument("--pairs", type=int, default=100)
    common(sp)

    sp = sub.add_parser("gauss", help="Gauss-sum laws")
    sp.add_argument("--q", default="3,5,9")
    sp.add_argument("--n", default="-5..5")
    sp.add_argument("--max-conductor", type=int, default=2)
    sp.add_argument("--laws-only", action="store_true", help="skip the eta-integral constructions")
    common(sp)

    sp = sub.add_parser("minf", help="metric at infinity against inv'")
    sp.add_argument("--q", default="2,3")
    sp.add_argument("--samples", type=int, default=200)
    common(sp)

    sp = sub.add_parser("axioms", help="special multiplicity axioms for a candidate")
    sp.add_argument("--q", type=int, default=3)
    sp.add_argument("--candidate", choices=sorted(CANDIDATES), default="unramified")
    sp.add_argument("--level", type=int, default=0)
    sp.add_argument("--samples", type=int, default=40)
    common(sp)

    sp = sub.add_parser("properties", help="sampled algebraic and stability laws")
    common(sp)

    sp = sub.add_parser("orbital", help="evaluate a single orbital integral")
    osub = sp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name in ("eval", "profile"):
        op = osub.add_parser(name)
        op.add_argument("--phi", required=True, help="e.g. KcapS, IntegralDetM(2), Cm(0)")
        op.add_argument("--q", type=int, required=True)
        op.add_argument("--flavor", choices=["unramified", "ramified", "split"], default="unramified")
        op.add_argument("--c-psi", type=int, default=0)
        op.add_argument("--strategy", choices=["auto", "fast", "brute"], default="auto")
        op.add_argument("--depth", type=int)
        op.add_argument("--check-stability", action="store_true")
        if name == "eval":
            op.add_argument("--x", required=True, help=LITERAL_HELP)
            op.add_argument("--eps", help="quaternion-side eps, same syntax as --x (default 1)")
            op.add_argument("--series", action="store_true", help="print the T-polynomial, not its value at s = 0")
            common(op, seed=False)
        else:
            op.add_argument("--vx", default="-4..4")
            op.add_argument("--samples", type=int, default=2)
            op.add_argument("--seed", type=int, default=0)
    return p


def _glue_negative_values(argv):
    """Turn "--vx -4..4" into "--vx=-4..4"; argparse would read -4..4 as an option."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and re.match(r"-\d", argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None, out=None):
    out = out or sys.stdout
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = build_parser().parse_args(argv)
        if args.threads is not None:
            os.environ["RTF_LAB_THREADS"] = str(args.threads)
        key = args.command if args.command != "orbital" else f"orbital {args.action}"
        if args.command in ("fl", "afl") or (args.command == "orbital"):
            residue_field(args.q)
        return COMMANDS[key](args, out)
    except GridEmpty as exc:
        sys.stderr.write(f"warning: {exc}\n")
        return EXIT_OK
    except AxiomFailure as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_MISMATCH
    except (RtfLabError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    except SystemExit as exc:
        # --help
        return EXIT_OK if not exc.code else EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
