"""Command line entry point.

    voganish [--bundle ID|PATH|all] [--seed N] [--format md|csv] [--strict] COMMAND ...

Exit status: 0 when every check passes, 1 when a check fails (or, with
--strict, warns), 2 for load or usage errors.  VOGANISH_SEED, when set,
overrides --seed.
"""

import argparse
import os
import sys

from . import packets as pk
from . import report
from .datasets import bundle_ids, load_bundle
from .endoscopy import check_embedding
from .errors import BundleError, InvariantError, VoganishError
from .runner import SECTIONS, verify_all

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _global_flags(parser, top):
    # the sub-parsers use SUPPRESS so a flag given before the command is not reset
    d = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    parser.add_argument("--bundle", default=d(None),
                        help="bundle id (e.g. so7), path to a JSON bundle, or 'all'")
    parser.add_argument("--seed", type=int, default=d(0), help="seed for random choices in the geometry")
    parser.add_argument("--format", choices=("md", "csv"), default=d("md"), help="table format")
    parser.add_argument("--strict", action="store_true", default=d(False), help="treat warnings as failures")


def build_parser():
    p = argparse.ArgumentParser(prog="voganish", description="Vogan variety examples: tables and checks.",
                                allow_abbrev=False)
    _global_flags(p, True)
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, help_):
        sp = sub.add_parser(name, help=help_, allow_abbrev=False)
        _global_flags(sp, False)
        return sp

    add("orbits", "orbits with base points, dimensions and eccentricities")
    sp = add("dual", "dual stratum of each (or one) stratum, recomputed from the covector")
    sp.add_argument("stratum", nargs="?")
    sp = add("closure", "closure order: Hasse diagram, or a single comparison")
    sp.add_argument("lower", nargs="?")
    sp.add_argument("upper", nargs="?")
    add("packets", "ABV packets, Arthur sheaves and the comparison with Arthur packets")
    sp = add("eta", "eta^NEvs and eta Arthur for one parameter")
    sp.add_argument("--psi", help="Arthur parameter name (default: all)")
    sp.add_argument("--s", help="element of A^mic as comma separated exponents (default: all)")
    sp = add("verify", "run every consistency check")
    sp.add_argument("--section", action="append", choices=SECTIONS, help="restrict to a section (repeatable)")
    sp = add("report", "print all tables")
    sp.add_argument("--tables", help=f"comma separated subset of {','.join(report.TABLES)}")
    sp.add_argument("-o", "--output", help="write to a file instead of stdout")
    add("endoscopy", "endoscopic trace identity tables")
    return p


def _seed(args):
    env = os.environ.get("VOGANISH_SEED")
    if env is None or env == "":
        return args.seed
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"VOGANISH_SEED must be an integer, got {env!r}") from None


def _bundles(args, seed):
    if not args.bundle:
        raise UsageError("no bundle given; use --bundle ID (one of: " + ", ".join(bundle_ids()) + ") or --bundle all")
    refs = bundle_ids() if args.bundle == "all" else [args.bundle]
    return [load_bundle(r, seed=seed) for r in refs]


def _one(args, seed):
    if args.bundle == "all":
        raise UsageError(f"'{args.command}' works on one bundle at a time")
    return _bundles(args, seed)[0]


def _emit(tables, args, out):
    out.write(report.render(tables, args.format))


# ---------------------------------------------------------------------------
# commands

def cmd_orbits(args, b, out):
    _emit([report.orbits_table(b)], args, out)
    findings = verify_all(b, ["geometry"]).findings
    for f in findings:
        print(f, file=sys.stderr)
    return EXIT_CHECK if findings else EXIT_OK


def cmd_dual(args, b, out):
    V = b.variety
    labels = {V.rank_label(b.base_pair(c)[0]): c for c in b.strata_raw}
    names = [args.stratum] if args.stratum else list(b.strata_raw)
    rows, bad = [], 0
    for c in names:
        if c not in b.strata_raw:
            raise UsageError(f"unknown stratum {c!r}")
        st = b.strata_raw[c]
        got = labels.get(V.dual_rank_label(b.base_pair(c)[1]), "?")
        ecc = int(st["dim"]) + int(b.strata_raw[st["dual"]]["dim"]) - V.dim_V
        ok = got == st["dual"] and ecc == st["eccentricity"]
        bad += not ok
        rows.append([c, st["dual"], got, ecc, "ok" if ok else "MISMATCH"])
    _emit([report.Table(f"dual-{b.name}", ["stratum", "recorded dual", "computed dual", "ecc", ""], rows)],
          args, out)
    return EXIT_CHECK if bad else EXIT_OK


def cmd_closure(args, b, out):
    if args.lower or args.upper:
        if not (args.lower and args.upper):
            raise UsageError("closure takes two strata or none")
        for c in (args.lower, args.upper):
            if c not in b.strata_raw:
                raise UsageError(f"unknown stratum {c!r}")
        V = b.variety
        la_, lb = (V.rank_label(b.base_pair(c)[0]) for c in (args.lower, args.upper))
        geo, rec = la_.leq(lb), b.leq(args.lower, args.upper)
        rows = [[args.lower, args.upper, "yes" if geo else "no", "yes" if rec else "no"]]
        _emit([report.Table(f"closure-{b.name}", ["C", "D", "C in closure of D", "recorded"], rows)], args, out)
        return EXIT_OK if geo == rec else EXIT_CHECK
    rows = [[c, " ".join(d for d in b.strata_raw if d != c and b.leq(c, d))] for c in b.strata_raw]
    t = report.Table(f"closure-{b.name}", ["C", "strata whose closure contains C"], rows,
                     "covers: " + ", ".join(f"{a}<{c}" for a, c in b.raw.get("covers", [])))
    _emit([t], args, out)
    findings = [f for f in verify_all(b, ["geometry"]).findings if f.law == "Hasse diagram"]
    for f in findings:
        print(f, file=sys.stderr)
    return EXIT_CHECK if findings else EXIT_OK


def cmd_packets(args, b, out):
    rows, bad = pk.compare_arthur(b)
    cmp = report.Table(f"packets-{b.name}", ["stratum", "psi", "status", "detail"],
                       [[r.stratum, r.param, r.status, r.detail] for r in rows])
    _emit([report.abv_table(b), report.arthur_sheaf_table(b), cmp], args, out)
    bad += pk.check_arthur_sheaves(b) + pk.check_arthur_sheaf_fourier(b) + pk.check_abv_packets(b)
    for v in bad:
        print(f"FAIL {v}", file=sys.stderr)
    return EXIT_CHECK if bad else EXIT_OK


def _parse_s(text):
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--s must be comma separated integers, got {text!r}") from None


def cmd_eta(args, b, out):
    params = [p for p in b.arthur if not p.pseudo and (args.psi is None or p.name == args.psi)]
    if args.psi and not params:
        names = ", ".join(p.name for p in b.arthur if not p.pseudo)
        raise UsageError(f"unknown Arthur parameter {args.psi!r} (have: {names})")
    rows, bad = [], 0
    for prm in params:
        g = b.evs.strata[prm.stratum].a_mic
        elems = [_parse_s(args.s)] if args.s else g.elements()
        for s in elems:
            try:
                a = pk.eta_arthur(b, prm, s)
                n = pk.eta_nevs(b, prm.stratum, s)
            except InvariantError as e:
                raise UsageError(str(e)) from None
            ok = a == n
            bad += not ok
            rows.append([prm.name, prm.stratum, "".join(str(v) for v in g.normalize(s)), repr(a), repr(n),
                         "ok" if ok else "MISMATCH"])
    _emit([report.Table(f"eta-{b.name}", ["psi", "stratum", "s", "eta Arthur", "eta NEvs", ""], rows)], args, out)
    return EXIT_CHECK if bad else EXIT_OK


def cmd_verify(args, bundles, out):
    status = EXIT_OK
    for b in bundles:
        rep = verify_all(b, args.section)
        ok = rep.ok(args.strict)
        out.write(f"{b.id} ({b.name}): {'PASS' if ok else 'FAIL'}"
                  f" - {len(rep.failures)} failure(s), {len(rep.warnings)} warning(s)\n")
        for f in rep.findings:
            out.write(f"  {f}\n")
        if not ok:
            status = EXIT_CHECK
    return status


def cmd_report(args, bundles, out):
    which = None
    if args.tables:
        which = [t.strip() for t in args.tables.split(",") if t.strip()]
        unknown = [t for t in which if t not in report.TABLES]
        if unknown:
            raise UsageError(f"unknown tables {unknown}; choose from {', '.join(report.TABLES)}")
    tables = []
    for b in bundles:
        tables += report.build(b, which)
    text = report.render(tables, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_endoscopy(args, b, out):
    if not b.endoscopy:
        raise UsageError(f"bundle {b.id} has no endoscopic data")
    _emit(report.endoscopy_tables(b), args, out)
    status = EXIT_OK
    for emb in b.endoscopy:
        bad, warn = check_embedding(emb)
        for v in bad:
            print(f"FAIL {v}", file=sys.stderr)
        for v in warn:
            print(f"warn {v}", file=sys.stderr)
        if bad or (args.strict and warn):
            status = EXIT_CHECK
    return status


SINGLE = {"orbits": cmd_orbits, "dual": cmd_dual, "closure": cmd_closure, "packets": cmd_packets,
          "eta": cmd_eta, "endoscopy": cmd_endoscopy}
MULTI = {"verify": cmd_verify, "report": cmd_report}


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        seed = _seed(args)
        if args.command in MULTI:
            return MULTI[args.command](args, _bundles(args, seed), out)
        return SINGLE[args.command](args, _one(args, seed), out)
    except (UsageError, BundleError) as e:
        print(f"voganish: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except VoganishError as e:
        print(f"voganish: check failed: {e}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
