"""Checking and measuring Resolution (res) and syntactic PCR refutation traces.

A trace is a sequence of steps acting on a memory configuration, which is a
set of clauses (res) or polynomials (pcr) and starts empty.  Steps name
elements of the previous configuration by their position in its canonical
ordering:

* clauses by (width, literals sorted by (variable, negated));
* polynomials by (number of terms, sorted terms).

Step schema (one JSON object per line)::

    {"op": "download", "idx": k}
    {"op": "res", "a": i, "b": j, "pivot": v}              res only
    {"op": "lin", "a": i, "b": j, "alpha": "p/q", "beta": "p/q"}   pcr only
    {"op": "mul", "a": i, "var": "x3" | "~x3"}             pcr only
    {"op": "erase", "keep": [i, ...]}

Inference steps may carry an optional ``"result"`` (a literal list, or a
polynomial in JSON form); when present it must equal the derived element.
A trace may start with a header line ``{"system": "res" | "pcr"}``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .cnf import Cnf, Polynomial, parse_twin

Clause = frozenset  # frozenset of literals
BOTTOM: Clause = frozenset()
POLY_ONE = Polynomial.constant(1)


class TraceError(ValueError):
    """Malformed trace text."""


def _literal_key(l: int):
    return (abs(l), l < 0)


def clause_key(c: Clause):
    return (len(c), sorted(_literal_key(l) for l in c))


def poly_key(p: Polynomial):
    return (len(p.terms), p.terms)


def canonical(system: str, config: Iterable) -> list:
    return sorted(config, key=clause_key if system == "res" else poly_key)


def _clause_json(c: Clause) -> list[int]:
    return sorted(c, key=_literal_key)


# parsing --------------------------------------------------------------------------


def parse_trace(text: str) -> tuple[str | None, list[dict]]:
    system = None
    steps = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceError(f"line {lineno}: {exc}") from None
        if not isinstance(obj, dict):
            raise TraceError(f"line {lineno}: expected a JSON object")
        if "system" in obj and "op" not in obj:
            if steps or system is not None:
                raise TraceError(f"line {lineno}: header must come first")
            system = obj["system"]
            continue
        steps.append(obj)
    return system, steps


def write_trace(system: str, steps: Iterable[dict], meta: dict | None = None) -> str:
    """JSON lines: a header naming the system (plus ``meta``), then one step per line."""
    lines = [json.dumps({"system": system, **(meta or {})}, sort_keys=True)]
    lines += [json.dumps(s, sort_keys=True) for s in steps]
    return "\n".join(lines) + "\n"


# measures -------------------------------------------------------------------------


@dataclass
class SpaceReport:
    system: str
    steps: int = 0
    total_space: int | None = None
    max_width: int | None = None
    clause_space: int | None = None
    best_profile: tuple[int, int] | None = None
    monomial_space: int | None = None

    def to_json(self) -> dict:
        out = {"system": self.system, "steps": self.steps}
        if self.system == "res":
            out.update(
                total_space=self.total_space,
                max_width=self.max_width,
                clause_space=self.clause_space,
                best_profile={"clauses": self.best_profile[0], "min_width": self.best_profile[1]},
            )
        else:
            out["monomial_space"] = self.monomial_space
        return out


def clause_profile(config: Iterable[Clause]) -> tuple[int, int]:
    """(c, w) maximising min(c, w) such that c clauses have width >= w."""
    widths = sorted((len(c) for c in config), reverse=True)
    best = (0, 0)
    for i, w in enumerate(widths):
        cand = (i + 1, w)
        if (min(cand), cand) > (min(best), best):
            best = cand
    return best


def monomial_count(config: Iterable[Polynomial]) -> int:
    seen = set()
    for p in config:
        seen |= p.monomials()
    return len(seen)


def _measure(report: SpaceReport, config: set) -> None:
    if report.system == "res":
        report.total_space = max(report.total_space or 0, sum(len(c) for c in config))
        report.max_width = max(report.max_width or 0, max((len(c) for c in config), default=0))
        report.clause_space = max(report.clause_space or 0, len(config))
        prof = clause_profile(config)
        old = report.best_profile or (0, 0)
        if (min(prof), prof) > (min(old), old):
            old = prof
        report.best_profile = old
    else:
        report.monomial_space = max(report.monomial_space or 0, monomial_count(config))


# checking ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    ok: bool
    report: SpaceReport
    step: int | None = None
    rule: str | None = None
    message: str = ""
    configurations: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        out = {"ok": self.ok, "report": self.report.to_json()}
        if not self.ok:
            out["violation"] = {"step": self.step, "rule": self.rule, "message": self.message}
        return out


class _Violation(Exception):
    def __init__(self, rule, message):
        super().__init__(message)
        self.rule = rule
        self.message = message


def _ref(ordered: list, step: dict, name: str):
    i = step.get(name)
    if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < len(ordered):
        raise _Violation("bad reference", f"'{name}'={i!r} is not an index of the previous configuration")
    return ordered[i]


def _rational(step: dict, name: str) -> Fraction:
    raw = step.get(name)
    if not isinstance(raw, (str, int)) or isinstance(raw, bool) or (isinstance(raw, str) and any(ch in raw for ch in ".eE")):
        raise _Violation("bad coefficient", f"'{name}' must be a p/q string")
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise _Violation("bad coefficient", f"'{name}'={raw!r} is not a rational") from None


def _resolve(a: Clause, b: Clause, pivot) -> Clause:
    if not isinstance(pivot, int) or isinstance(pivot, bool) or pivot <= 0:
        raise _Violation("pivot missing", f"pivot {pivot!r} is not a variable")
    if pivot in a and -pivot in b:
        return (a - {pivot}) | (b - {-pivot})
    if -pivot in a and pivot in b:
        return (a - {-pivot}) | (b - {pivot})
    raise _Violation("pivot missing", f"x{pivot} does not occur with opposite signs in the premises")


def _derive(system: str, inputs: list, ordered: list, step: dict):
    op = step.get("op")
    if op == "download":
        idx = step.get("idx")
        if not isinstance(idx, int) or isinstance(idx, bool) or not 0 <= idx < len(inputs):
            raise _Violation("axiom index", f"no input {idx!r}")
        return inputs[idx]
    if system == "res" and op == "res":
        return _resolve(_ref(ordered, step, "a"), _ref(ordered, step, "b"), step.get("pivot"))
    if system == "pcr" and op == "lin":
        p, q = _ref(ordered, step, "a"), _ref(ordered, step, "b")
        return p.scale(_rational(step, "alpha")) + q.scale(_rational(step, "beta"))
    if system == "pcr" and op == "mul":
        p = _ref(ordered, step, "a")
        try:
            v, barred = parse_twin(str(step.get("var")))
        except ValueError:
            raise _Violation("bad variable", f"bad variable {step.get('var')!r}") from None
        return p.times_var(v, barred)
    raise _Violation("unknown op", f"operation {op!r} is not a {system} rule")


def _claimed(system: str, raw):
    try:
        if system == "res":
            return frozenset(int(l) for l in raw)
        return Polynomial.from_json(raw)
    except (TypeError, ValueError, KeyError):
        raise _Violation("result mismatch", f"unreadable result {raw!r}") from None


def _show(system: str, x) -> str:
    if system == "res":
        return "⊥" if not x else "(" + " ∨ ".join(map(str, _clause_json(x))) + ")"
    return str(x)


def check_trace(system: str, inputs: list, steps: Iterable[dict], *, keep_configs: bool = False) -> CheckResult:
    """Replay ``steps`` from the empty configuration, validating every rule."""
    if system not in ("res", "pcr"):
        raise ValueError("system must be 'res' or 'pcr'")
    report = SpaceReport(system)
    config: set = set()
    configs = []
    _measure(report, config)
    for i, step in enumerate(steps):
        report.steps = i + 1
        ordered = canonical(system, config)
        try:
            if not isinstance(step, dict):
                raise _Violation("unknown op", "step is not an object")
            if step.get("op") == "erase":
                keep = step.get("keep")
                if not isinstance(keep, list) or any(
                    not isinstance(k, int) or isinstance(k, bool) or not 0 <= k < len(ordered) for k in keep
                ):
                    raise _Violation("erasure not ⊆", "kept elements are not a subset of the previous configuration")
                config = {ordered[k] for k in keep}
            else:
                new = _derive(system, inputs, ordered, step)
                if "result" in step and step["op"] != "download":
                    claim = _claimed(system, step["result"])
                    if claim != new:
                        raise _Violation(
                            "result mismatch",
                            f"claimed {_show(system, claim)}, derived {_show(system, new)}",
                        )
                config = config | {new}
        except _Violation as v:
            return CheckResult(False, report, i, v.rule, v.message, configs)
        _measure(report, config)
        if keep_configs:
            configs.append(frozenset(config))
    goal = BOTTOM if system == "res" else POLY_ONE
    if goal not in config:
        rule = "final configuration lacks ⊥" if system == "res" else "final configuration lacks 1"
        return CheckResult(False, report, report.steps, rule, rule, configs)
    return CheckResult(True, report, configurations=configs)


def res_inputs(phi: Cnf) -> list[Clause]:
    return [frozenset(c) for c in phi.clauses]


def check_res_trace(phi: Cnf, steps: Iterable[dict], **kw) -> CheckResult:
    return check_trace("res", res_inputs(phi), steps, **kw)


def check_pcr_trace(polys: list[Polynomial], steps: Iterable[dict], **kw) -> CheckResult:
    return check_trace("pcr", list(polys), steps, **kw)


# object-level rewriting ---------------------------------------------------------------


def _replay_objects(system: str, inputs: list, steps: list[dict]) -> list[tuple]:
    """Translate index-based steps of a valid trace into element-level operations."""
    ops = []
    config: set = set()
    for step in steps:
        ordered = canonical(system, config)
        op = step["op"]
        if op == "erase":
            kept = frozenset(ordered[k] for k in step["keep"])
            ops.append(("erase", kept))
            config = set(kept)
            continue
        new = _derive(system, inputs, ordered, step)
        premises = tuple(ordered[step[n]] for n in ("a", "b") if n in step)
        ops.append((op, step, premises, new))
        config.add(new)
    return ops


def _encode(system: str, ops: list[tuple]) -> list[dict]:
    steps = []
    config: set = set()
    for op in ops:
        ordered = canonical(system, config)
        pos = {x: i for i, x in enumerate(ordered)}
        if op[0] == "erase":
            kept = [x for x in op[1] if x in config]
            steps.append({"op": "erase", "keep": sorted(pos[x] for x in kept)})
            config = set(kept)
            continue
        _, step, premises, new = op
        step = dict(step)
        for name, prem in zip(("a", "b"), premises):
            step[name] = pos[prem]
        steps.append(step)
        config.add(new)
    return steps


def strip_erasures(system: str, inputs: list, steps: list[dict]) -> list[dict]:
    """The same derivation with every erasure removed, indices rewritten."""
    ops = [op for op in _replay_objects(system, inputs, steps) if op[0] != "erase"]
    return _encode(system, ops)


def erase_dead(system: str, inputs: list, steps: list[dict]) -> list[dict]:
    """Insert an erasure after each step, dropping elements never used again
    (the final goal is always kept)."""
    ops = [op for op in _replay_objects(system, inputs, steps) if op[0] != "erase"]
    goal = BOTTOM if system == "res" else POLY_ONE
    last_use: dict = {}
    for t, op in enumerate(ops):
        for prem in op[2]:
            last_use[prem] = t
    out = []
    live: set = set()
    for t, op in enumerate(ops):
        out.append(op)
        live.add(op[3])
        keep = frozenset(x for x in live if x == goal or last_use.get(x, -1) > t)
        if keep != live:
            out.append(("erase", keep))
            live = set(keep)
    return _encode(system, out)


# naive refuter --------------------------------------------------------------------------


class RefutationNotFound(Exception):
    """The formula is satisfiable, so no refutation exists."""


def naive_res_refuter(phi: Cnf, cap: int = 16) -> list[dict]:
    """Tree-like refutation read off a DPLL search; never erases.

    Every inference step carries its result.  Raises RefutationNotFound for
    satisfiable input and ValueError beyond ``cap`` variables.
    """
    if phi.variable_count > cap:
        raise ValueError(f"{phi.variable_count} variables exceed cap {cap}")
    inputs = res_inputs(phi)
    steps: list[dict] = []
    config: set = set()
    variables = phi.variables()

    def emit(step: dict, new: Clause):
        steps.append(step)
        config.add(new)

    def falsified(rho: dict[int, int]) -> int | None:
        for i, c in enumerate(inputs):
            if all(abs(l) in rho and rho[abs(l)] == (0 if l > 0 else 1) for l in c):
                return i
        return None

    def derive(rho: dict[int, int]) -> Clause | None:
        hit = falsified(rho)
        if hit is not None:
            c = inputs[hit]
            if c not in config:
                emit({"op": "download", "idx": hit}, c)
            return c
        free = [v for v in variables if v not in rho]
        if not free:
            return None
        x = free[0]
        c0 = derive({**rho, x: 0})
        if c0 is None:
            return None
        if x not in c0:
            return c0
        c1 = derive({**rho, x: 1})
        if c1 is None:
            return None
        if -x not in c1:
            return c1
        ordered = canonical("res", config)
        pos = {c: i for i, c in enumerate(ordered)}
        new = (c0 - {x}) | (c1 - {-x})
        emit({"op": "res", "a": pos[c0], "b": pos[c1], "pivot": x, "result": _clause_json(new)}, new)
        return new

    if derive({}) is None:
        raise RefutationNotFound("formula is satisfiable")
    return steps


# mutations ------------------------------------------------------------------------------

MUTATIONS = ("pivot", "result", "coefficient", "erase", "var")


def applicable_mutations(step: dict) -> list[str]:
    op = step.get("op")
    out = []
    if op == "res":
        out.append("pivot")
    if op == "lin":
        out.append("coefficient")
    if op == "mul" and "result" in step:
        out.append("var")
    if op in ("res", "lin", "mul") and "result" in step:
        out.append("result")
    if op == "erase":
        out.append("erase")
    return out


def mutate(system: str, inputs: list, steps: list[dict], index: int, kind: str, rng: random.Random) -> list[dict]:
    """Copy of ``steps`` with step ``index`` altered so that it no longer holds.

    Inference steps are expected to carry results (pivot and variable changes
    are caught through them).
    """
    steps = [dict(s) for s in steps]
    step = steps[index]
    if kind == "pivot":
        step["pivot"] = step["pivot"] + 1 + rng.randrange(3)
    elif kind == "result":
        if system == "res":
            lits = list(step["result"])
            if lits and rng.randrange(2):
                lits.pop(rng.randrange(len(lits)))
            else:
                lits.append(10**6 + rng.randrange(100))
            step["result"] = lits
        else:
            claim = Polynomial.from_json(step["result"]) + Polynomial.constant(1 + rng.randrange(5))
            step["result"] = claim.to_json()
    elif kind == "coefficient":
        if "result" not in step:
            raise ValueError("coefficient mutation needs a result claim")
        ordered = canonical(system, _replay_config(system, inputs, steps[:index]))
        names = [n for n, ref in (("alpha", "a"), ("beta", "b")) if not ordered[step[ref]].is_zero()]
        if not names:
            raise ValueError("both premises are zero")
        name = rng.choice(names)
        step[name] = str(Fraction(step[name]) + 1 + rng.randrange(5))
    elif kind == "var":
        ordered = canonical(system, _replay_config(system, inputs, steps[:index]))
        if ordered[step["a"]].is_zero():
            raise ValueError("x*0 = ~x*0: the premise is zero")
        v, barred = parse_twin(step["var"])
        step["var"] = f"x{v}" if barred else f"~x{v}"
    elif kind == "erase":
        size = len(_replay_config(system, inputs, steps[:index]))
        step["keep"] = sorted(set(step["keep"]) | {size + rng.randrange(3)})
    else:
        raise ValueError(f"unknown mutation {kind!r}")
    return steps


def _replay_config(system: str, inputs: list, steps: list[dict]) -> set:
    res = check_trace(system, inputs, steps, keep_configs=True)
    return set(res.configurations[-1]) if res.configurations else set()
