"""gwpt command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import sys

from . import acceptance, descend, fock
from .algebra import AlgebraError, preset, validate
from .parsing import ParseError
from .rewrite import compat, derivation, prefactors, reduction, rules
from .rewrite.derivation import Derivation, ReplayError
from .rewrite.geometry import GeometryError
from .rewrite.terms import BracketError, Expression, parse_bracket
from .series import (UNDETERMINED, TruncationError, format_rational, fmt_series, detect_rational,
                     p_to_z, parse_rational, read_series_file)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class Out:
    def __init__(self, fmt, quiet=False):
        self.fmt = fmt
        self.quiet = quiet

    def human(self, text):
        if not self.quiet and self.fmt == "human":
            print(text)

    def record(self, tag, /, **fields):
        if not self.quiet and self.fmt == "records":
            body = " ".join(f"{k}={v}" for k, v in fields.items())
            print(f"{tag} {body}".rstrip())

    def both(self, text, tag, /, **fields):
        self.human(text)
        self.record(tag, **fields)

    def derivation(self, d: Derivation):
        if self.quiet:
            return
        if self.fmt == "records":
            print(str(d))
            return
        print(f"start  {d.root}")
        for n, s in enumerate(d.steps, 1):
            print(f"{n:>4}.  {s.rule} at {s.at()}")
            print(f"       = {s.output}")


# --- subcommands --------------------------------------------------------------------

def cmd_validate_algebra(a, out):
    names = [a.preset] if a.preset else ["toy", "K3-truncation", "P2", "elliptic-even"]
    ok = True
    for name in names:
        rep = validate(preset(name))
        ok &= rep.ok
        out.both(f"{name}: {'ok' if rep.ok else 'INVALID'}", "algebra", name=name, ok=rep.ok)
        for v in rep.violations:
            out.both(f"  {v}", "violation", name=name, detail=str(v).replace(" ", "_"))
    return 0 if ok else 1


def cmd_hilb_diagonal(a, out):
    terms = fock.hilb_diagonal(a.n, preset(a.preset))
    for t in terms:
        out.human(f"[{t.coeff}] {fock.render_state(t.left)} (x) {fock.render_state(t.right)}")
        out.record("term", mu=str(t.mu), coeff=t.coeff)
    out.both(f"{len(terms)} summands", "count", n=len(terms))
    return 0


def cmd_verify_projector(a, out):
    ns = [a.n] if a.n is not None else [1, 2, 3, 4]
    ok = True
    for n in ns:
        rep = fock.verify_projector(n, preset(a.preset))
        ok &= rep.ok
        out.both(f"n={n} {a.preset}: {rep.checked} partitions, "
                 f"{'identity' if rep.ok else f'{len(rep.failures)} failures'}",
                 "projector", n=n, preset=a.preset, checked=rep.checked, ok=rep.ok)
    return 0 if ok else 1


def cmd_transform(a, out):
    m = descend.parse_monomial(a.monomial)
    s = descend.transform_general(m, context=a.context, excess=a.excess)
    out.both(str(s), "sum", value=str(s).replace(" ", ""))
    return 0


def cmd_invert(a, out):
    s = descend.parse_sum(a.sum, context=a.context)
    r = descend.invert(s, context=a.context)
    out.both(str(r), "sum", value=str(r).replace(" ", ""))
    return 0


def _single(rule_id, text, out):
    d = Derivation(Expression.of(parse_bracket(text)))
    d.apply(rule_id, (0, 0))
    out.derivation(d)
    return 0


def cmd_degenerate(a, out):
    t = parse_bracket(a.bracket)
    if a.kunneth == "symbolic":
        e = rules.degenerate(t, a.split, kunneth_mode="symbolic")
        out.both(str(e), "expr", value=str(e))
        return 0
    return _single(f"degenerate:{a.split}", a.bracket, out)


def cmd_split_diagonal(a, out):
    return _single("split-diagonal", a.bracket, out)


def cmd_reduce_to_cap(a, out):
    if a.replay:
        return cmd_replay(argparse.Namespace(file=a.replay), out)
    _, d = reduction.reduce_to_cap(parse_bracket(a.bracket))
    out.derivation(d)
    return 0


def cmd_replay(a, out):
    with open(a.file) as fh:
        text = fh.read()
    try:
        d = derivation.replay(text)
    except ReplayError as exc:
        print(f"replay failed: {exc}", file=sys.stderr)
        return 1
    out.both(f"replayed {len(d.steps)} steps: {d.result}", "replay", steps=len(d.steps), ok=True)
    return 0


def cmd_mcf(a, out):
    if a.compat:
        rep = compat.verify_mcf_compat(a.div)
        out.derivation(rep.derivation)
        for k, ok in rep.series_checks:
            out.both(f"commuting square k={k}: {'exact' if ok else 'MISMATCH'}", "square", k=k, ok=ok)
        return 0 if rep.ok else 1
    theory = a.theory.upper()
    t = parse_bracket(a.bracket) if a.bracket else compat.mcf_fixture(a.div, theory)
    return _single(f"mcf-{a.theory}", str(t), out)


def cmd_detect_rational(a, out):
    with open(a.infile) as fh:
        s = read_series_file(fh.read())
    rf = detect_rational(s, a.max_deg)
    if rf == UNDETERMINED:
        out.both(f"no rational function of degree <= {a.max_deg} fits", "rational", value="undetermined")
        return 1
    out.both(format_rational(rf), "rational", value=format_rational(rf).replace(" ", ""))
    return 0


def cmd_p_to_z(a, out):
    if a.infile:
        with open(a.infile) as fh:
            src = read_series_file(fh.read())
    elif a.rational:
        src = parse_rational(a.rational)
    else:
        raise UsageError("p-to-z: give --in FILE or --rational EXPR")
    s = p_to_z(src, a.order)
    out.both(fmt_series(s), "series", value=fmt_series(s).replace(" ", ""))
    return 0


def cmd_check_prefactors(a, out):
    rep = prefactors.check_prefactors(a.samples, a.seed)
    for kind, n in sorted(rep.checks.items()):
        out.both(f"{kind}: {n} checked", "checked", kind=kind, n=n)
    for m in rep.mismatches[:10]:
        out.both(f"MISMATCH {m}", "mismatch", detail=str(m).replace(" ", ""))
    out.both(f"{len(rep.mismatches)} mismatches", "summary", mismatches=len(rep.mismatches))
    return 0 if rep.ok else 1


def cmd_suite(a, out):
    if a.name != "acceptance":
        raise UsageError(f"unknown suite {a.name!r} (available: acceptance)")
    results = acceptance.run_all(jobs=a.jobs)
    for o in results:
        out.human(o.line())
        out.record("criterion", n=o.number, ok=o.ok, seconds=f"{o.seconds:.2f}")
    failed = [o.number for o in results if not o.ok]
    out.both(f"{len(results) - len(failed)}/{len(results)} criteria pass", "summary",
             passed=len(results) - len(failed), failed=",".join(map(str, failed)) or "-")
    return 1 if failed else 0


# --- argument parsing -------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="gwpt", description="Symbolic GW/PT partition-function calculator.")
    p.add_argument("--format", choices=["human", "records"], default="human")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["human", "records"], default=argparse.SUPPRESS)

    def add(name):
        return sub.add_parser(name, parents=[common])

    s = add("validate-algebra")
    s.add_argument("--preset")
    s.set_defaults(fn=cmd_validate_algebra)

    s = add("hilb-diagonal")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--preset", default="toy")
    s.set_defaults(fn=cmd_hilb_diagonal)

    s = add("verify-projector")
    s.add_argument("--n", type=int)
    s.add_argument("--preset", default="toy")
    s.set_defaults(fn=cmd_verify_projector)

    s = add("transform")
    s.add_argument("monomial")
    s.add_argument("--context", choices=["absolute", "log"], default="absolute")
    s.add_argument("--excess", choices=["raise", "euler"], default="raise")
    s.set_defaults(fn=cmd_transform)

    s = add("invert")
    s.add_argument("sum")
    s.add_argument("--context", choices=["absolute", "log"], default="absolute")
    s.set_defaults(fn=cmd_invert)

    s = add("degenerate")
    s.add_argument("bracket")
    s.add_argument("--split", required=True)
    s.add_argument("--kunneth", choices=["eager", "symbolic"], default="eager")
    s.set_defaults(fn=cmd_degenerate)

    s = add("split-diagonal")
    s.add_argument("bracket")
    s.set_defaults(fn=cmd_split_diagonal)

    s = add("reduce-to-cap")
    s.add_argument("bracket", nargs="?")
    s.add_argument("--replay", metavar="FILE")
    s.set_defaults(fn=cmd_reduce_to_cap)

    s = add("replay")
    s.add_argument("file")
    s.set_defaults(fn=cmd_replay)

    s = add("mcf")
    s.add_argument("--theory", choices=["gw", "pt"], default="pt")
    s.add_argument("--div", type=int, default=2)
    s.add_argument("--bracket")
    s.add_argument("--compat", action="store_true")
    s.set_defaults(fn=cmd_mcf)

    s = add("detect-rational")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--max-deg", type=int, default=6)
    s.set_defaults(fn=cmd_detect_rational)

    s = add("p-to-z")
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--in", dest="infile")
    s.add_argument("--rational")
    s.set_defaults(fn=cmd_p_to_z)

    s = add("check-prefactors")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_check_prefactors)

    s = add("suite")
    s.add_argument("name")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(fn=cmd_suite)
    return p


def run(argv, quiet=False) -> int:
    try:
        a = build_parser().parse_args(argv)
        if a.command == "reduce-to-cap" and not (a.bracket or a.replay):
            raise UsageError("reduce-to-cap: give a bracket or --replay FILE")
        return a.fn(a, Out(a.format, quiet))
    except ParseError as exc:
        if not quiet:
            print(exc.caret(), file=sys.stderr)
        return 2
    except (UsageError, AlgebraError, GeometryError, BracketError, rules.RuleError,
            descend.ExcessIntersectionError, TruncationError, KeyError, OSError) as exc:
        if not quiet:
            msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
            print(f"error: {msg}", file=sys.stderr)
        return 2


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
