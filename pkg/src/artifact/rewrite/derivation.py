"""Rule registry, derivation traces and replay.

A trace is line oriented:

    root: <expression>
    step 1: rule=<id> at=<term>.<factor> -> <expression>
    step 2: rule=<id> at=* -> <expression>

`at=*` marks a rule acting on the whole expression.  Rule ids may carry an argument
after a colon, e.g. `degenerate:selfnode`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import rules
from .terms import Bracket, Expression, parse_expr


class ReplayError(ValueError):
    pass


# id -> (scope, fn); local fns take (bracket, step, arg), global fns take (expr, step, arg)
RULES = {}


def register(name, scope="local"):
    def deco(fn):
        RULES[name] = (scope, fn)
        return fn
    return deco


def split_id(rule_id):
    name, _, arg = rule_id.partition(":")
    if name not in RULES:
        raise KeyError(f"unknown rule {name!r}")
    return name, arg or None


def apply_rule(expr: Expression, rule_id, path, step) -> Expression:
    name, arg = split_id(rule_id)
    scope, fn = RULES[name]
    if scope == "global":
        if path is not None:
            raise ValueError(f"rule {name} acts on the whole expression")
        return fn(expr, step, arg)
    if path is None:
        raise ValueError(f"rule {name} needs a factor position")
    b = expr.factor_at(path)
    if not isinstance(b, Bracket):
        raise ValueError(f"factor at {path} is not a bracket")
    return expr.replace_at(path, fn(b, step, arg))


@dataclass(frozen=True)
class Step:
    rule: str
    path: object  # (term, factor) or None
    output: Expression

    def at(self):
        return "*" if self.path is None else f"{self.path[0]}.{self.path[1]}"


@dataclass
class Derivation:
    root: Expression
    steps: list = field(default_factory=list)

    @property
    def result(self):
        return self.steps[-1].output if self.steps else self.root

    def apply(self, rule_id, path=None):
        out = apply_rule(self.result, rule_id, path, len(self.steps) + 1)
        self.steps.append(Step(rule_id, path, out))
        return out

    def records(self):
        lines = [f"root: {self.root}"]
        for n, s in enumerate(self.steps, 1):
            lines.append(f"step {n}: rule={s.rule} at={s.at()} -> {s.output}")
        return lines

    def __str__(self):
        return "\n".join(self.records())


_STEP = re.compile(r"step (\d+): rule=(\S+) at=(\*|\d+\.\d+) -> (.*)$")


def read_derivation(text: str):
    """(root expression, [(rule id, path, printed output)]) from a trace."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("root: "):
        raise ReplayError("trace must start with 'root: '")
    root = parse_expr(lines[0][len("root: "):])
    steps = []
    for n, ln in enumerate(lines[1:], 1):
        m = _STEP.match(ln)
        if not m or int(m.group(1)) != n:
            raise ReplayError(f"malformed step record on line {n + 1}: {ln!r}")
        at = m.group(3)
        path = None if at == "*" else tuple(int(x) for x in at.split("."))
        steps.append((m.group(2), path, m.group(4)))
    return root, steps


def replay(trace) -> Derivation:
    """Re-run every step from the root; any difference in the printed result is an error."""
    if isinstance(trace, Derivation):
        root = trace.root
        steps = [(s.rule, s.path, str(s.output)) for s in trace.steps]
    else:
        root, steps = read_derivation(trace)
    d = Derivation(root)
    for n, (rule_id, path, printed) in enumerate(steps, 1):
        try:
            out = d.apply(rule_id, path)
        except (KeyError, ValueError, IndexError) as exc:
            raise ReplayError(f"step {n}: {exc}") from None
        if str(out) != printed:
            raise ReplayError(f"step {n}: replay gives {out} instead of {printed}")
    return d


# --- registered rules ------------------------------------------------------------------

@register("degenerate")
def _degenerate(b, step, arg):
    return rules.degenerate(b, arg or "trivial")


@register("split-diagonal")
def _split(b, step, arg):
    return rules.split_diagonal(b, tag=f"j{step}")


@register("rigidify")
def _rigidify(b, step, arg):
    return Expression.of(rules.rigidify(b))


@register("comparison")
def _comparison(b, step, arg):
    return Expression.of(rules.comparison_simplify(b, inverse=(arg == "inverse")))


@register("transform")
def _transform(b, step, arg):
    return rules.transform_bracket(b, context=arg)


@register("mcf-pt")
def _mcf_pt(b, step, arg):
    return rules.mcf_pt(b)


@register("mcf-gw")
def _mcf_gw(b, step, arg):
    return rules.mcf_gw(b)


@register("gwpt-primitive")
def _primitive(b, step, arg):
    out = rules.gwpt_primitive(Expression.of(b))
    if out == Expression.of(b):
        raise ValueError("primitive correspondence does not apply here")
    return out


@register("degenerate-all", "global")
def _degenerate_all(e, step, arg):
    return rules.map_brackets(e, lambda b: rules.degenerate(b, arg or "trivial"))


@register("epsilon-vir", "global")
def _eps_vir(e, step, arg):
    return rules.epsilon_split(e)[0]


@register("epsilon-red", "global")
def _eps_red(e, step, arg):
    return rules.epsilon_split(e)[1]


def first_path(expr: Expression, pred):
    for t, (factors, _) in enumerate(expr.terms):
        for f, x in enumerate(factors):
            if isinstance(x, Bracket) and pred(x):
                return (t, f)
    return None


def run_to_fixpoint(d: Derivation, plan):
    """plan: [(rule id, predicate)]; apply the first applicable rule until none applies."""
    while True:
        for rule_id, pred in plan:
            path = first_path(d.result, pred)
            if path is not None:
                d.apply(rule_id, path)
                break
        else:
            return d
