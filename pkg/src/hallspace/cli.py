"""Command-line entry point.

Exit codes: 0 success, 1 a property or check failed, 2 usage or input error.
Rationals are written p/q (or as integers); floats are rejected.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import kernels
from .certify import certify_counterexample
from .cnf import CnfError, Polynomial, dimacs_read, dimacs_write, random_3cnf, adjacency_graph, tr_encode
from .covergame import (
    GameParams,
    GreedyAdversary,
    RandomAdversary,
    ScriptedAdversary,
    play,
    smallest_s,
    theorem_preconditions,
)
from .graphs import (
    DEFAULT_SUBSET_CAP,
    CapExceeded,
    GraphError,
    format_bipartite,
    format_hypergraph,
    is_expander,
    parse_bipartite,
    parse_hypergraph,
)
from .matchings import counterexample, find_cover_matching, two_path_cover, validate_matching
from .proofspace import (
    RefutationNotFound,
    TraceError,
    check_pcr_trace,
    check_res_trace,
    naive_res_refuter,
    parse_trace,
    write_trace,
)
from .strategies import (
    StrategyError,
    free_family_from_strategy,
    lower_bound_report,
    verify_free_family,
    verify_winning_strategy,
    winning_strategy_from_game,
)
from .sweep import hall_sweep

OK, VIOLATION, USAGE = 0, 1, 2


def rational(text: str) -> Fraction:
    if any(c in text for c in ".eE") or text.strip() != text:
        raise argparse.ArgumentTypeError(f"{text!r}: write rationals as p/q")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational p/q") from None


def int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated index list") from None


@dataclass
class RunConfig:
    command: str
    seed: int | None = None
    epsilon: str = "1/24"
    caps: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    backend: str = kernels.BACKEND


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


def _emit(args, payload: dict, text: str | None = None) -> None:
    if args.json or text is None:
        out = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        out = text
    _write(args, out)


def _write(args, out: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)


def _config(args, **extra) -> dict:
    cfg = RunConfig(
        command=args.command,
        seed=getattr(args, "seed", None),
        epsilon=str(getattr(args, "epsilon", Fraction(1, 24))),
        caps={"subset_cap": getattr(args, "cap", DEFAULT_SUBSET_CAP)},
        outputs={"out": getattr(args, "out", None)},
    )
    cfg.inputs.update(extra)
    return asdict(cfg)


def _read_cnf(path: str):
    return dimacs_read(Path(path).read_text())


def _game_params(args, g) -> GameParams:
    d = args.d if args.d is not None else max(1, g.max_right_degree())
    s = args.s if args.s is not None else smallest_s(args.epsilon, d, args.mu_target)
    return GameParams(args.epsilon, s, d)


# commands --------------------------------------------------------------------------


def cmd_gen_cnf(args):
    phi = random_3cnf(args.n, args.delta, args.seed)
    head = f"c hallspace gen-cnf n={args.n} delta={args.delta} seed={args.seed}\n"
    _write(args, head + dimacs_write(phi))
    return OK


def cmd_adj_graph(args):
    phi = _read_cnf(args.cnf)
    _write(args, f"# adjacency graph of {args.cnf}\n" + format_bipartite(adjacency_graph(phi).graph))
    return OK


def cmd_check_expansion(args):
    g = parse_bipartite(Path(args.graph).read_text())
    res = is_expander(g, args.s, args.delta, cap=args.cap, force=args.force)
    payload = {
        "config": _config(args, graph=args.graph, s=args.s, delta=str(args.delta)),
        "certified": res.certified,
        "violation": None if res.violation is None else list(res.violation),
    }
    text = "certified\n" if res else f"violation: {list(res.violation)}\n"
    _emit(args, payload, text)
    return OK if res else VIOLATION


def cmd_find_matching(args):
    g = parse_bipartite(Path(args.graph).read_text())
    left = args.left if args.left is not None else list(range(g.left_count))
    if len(args.hk) != 2:
        raise _Usage("-hk takes two integers h,k")
    h, k = args.hk
    res = find_cover_matching(g, left, h, k)
    payload = {"config": _config(args, graph=args.graph, left=left, h=h, k=k)}
    if not res:
        payload.update(matching=None, reason=res.reason)
        _emit(args, payload, f"none: {res.reason}\n")
        return VIOLATION
    problems = validate_matching(g, res.matching)
    payload.update(matching=res.matching.to_json(), valid=not problems)
    _emit(args, payload, json.dumps(res.matching.to_json()) + "\n")
    return VIOLATION if problems else OK


def cmd_two_path_cover(args):
    hg = parse_hypergraph(Path(args.hypergraph).read_text())
    cover = two_path_cover(hg, args.edges)
    payload = {"config": _config(args, hypergraph=args.hypergraph, edges=args.edges)}
    payload["cover"] = None if cover is None else cover.to_json()
    _emit(args, payload, "none\n" if cover is None else json.dumps(cover.to_json()) + "\n")
    return OK if cover is not None else VIOLATION


def cmd_counterexample(args):
    hg = counterexample(args.epsilon)
    cert = certify_counterexample(hg, args.epsilon, jobs=args.jobs)
    cert["config"] = _config(args)
    header = f"# counterexample epsilon={args.epsilon}: {hg.vertex_count} vertices, {len(hg.edges)} edges\n"
    _write(args, header + format_hypergraph(hg))
    log = json.dumps(cert, indent=2, sort_keys=True) + "\n"
    if args.certificate:
        Path(args.certificate).write_text(log)
    else:
        sys.stderr.write(log)
    return OK if cert["ok"] else VIOLATION


def cmd_verify_hall(args):
    report = hall_sweep(args.max_left, args.max_right, args.epsilon, args.mode, tuple(args.degrees))
    body = report.to_json()
    seconds = body.pop("seconds")
    payload = {"config": _config(args, max_left=args.max_left, max_right=args.max_right, mode=args.mode), **body}
    text = (
        f"{args.mode} sweep, eps={args.epsilon}, |L|<={args.max_left}, |R|={args.max_right}: "
        f"generated {sum(report.generated.values())}, hypotheses met {sum(report.hypotheses_met.values())}, "
        f"counterexamples {len(report.counterexamples)}, errors {len(report.errors)}\n"
    )
    text += "".join(report.counterexamples) + "".join(e + "\n" for e in report.errors)
    _emit(args, payload, text)
    sys.stderr.write(f"sweep took {seconds:.2f}s\n")
    return OK if report.ok else VIOLATION


def cmd_play_covergame(args):
    g = parse_bipartite(Path(args.graph).read_text())
    params = _game_params(args, g)
    if args.adversary == "random":
        if args.seed is None:
            raise _Usage("the random adversary needs -seed")
        adv = RandomAdversary(args.seed)
    elif args.adversary == "greedy":
        adv = GreedyAdversary()
    else:
        if not args.script:
            raise _Usage("the scripted adversary needs -script")
        adv = ScriptedAdversary.from_json(json.loads(Path(args.script).read_text()))
    pre = theorem_preconditions(g, params, cap=args.cap, force=args.force)
    collector: list = []
    tr = play(g, params, adv, max_moves=args.moves, max_components=args.max_components,
              check=not args.no_check, cap=args.cap, force=args.force, collector=collector)
    head = {"config": _config(args, graph=args.graph, params=params.to_json(),
                              adversary=args.adversary, max_components=args.max_components),
            "theorem_preconditions": pre or "all hold"}
    _write(args, json.dumps(head, sort_keys=True) + "\n" + tr.to_jsonl())
    bad = [r for r in tr.records if r.get("invariant_ok") is False]
    small_c = all(len(c.counterexample) < 2 / params.epsilon * len(c.b) for c in collector)
    sys.stderr.write(
        f"stopped: {tr.stopped}; invariant failures: {len(bad)}; "
        f"robustness counterexamples: {len(collector)}, small-C bound holds: {small_c}\n"
    )
    return VIOLATION if tr.cover_lost or bad or not small_c else OK


def _strategy(args):
    phi = _read_cnf(args.cnf)
    g = adjacency_graph(phi).graph
    params = _game_params(args, g)
    strat = winning_strategy_from_game(phi, params, args.max_components, force=args.force)
    return phi, params, strat


def cmd_build_strategy(args):
    phi, params, strat = _strategy(args)
    ex = strat.explicit(cap=args.positions)
    payload = {"config": _config(args, cnf=args.cnf, params=params.to_json(), max_components=args.max_components),
               "k": strat.k, "positions": ex.positions, "families": ex.to_json()}
    _emit(args, payload)
    return OK


def cmd_verify_strategy(args):
    phi, params, strat = _strategy(args)
    k = args.k if args.k is not None else strat.k
    ex = strat.explicit(cap=args.positions)
    rep = verify_winning_strategy(ex, tr_encode(phi), k)
    payload = {"config": _config(args, cnf=args.cnf, params=params.to_json(), k=k), **rep.to_json()}
    _emit(args, payload, f"k={k}: {'ok' if rep.ok else 'violation: ' + rep.violation}\n")
    return OK if rep.ok else VIOLATION


def cmd_free_family(args):
    phi, params, strat = _strategy(args)
    k = args.k if args.k is not None else strat.k
    ex = strat.explicit(cap=args.positions)
    rep = verify_free_family(free_family_from_strategy(ex, k), phi, k - 1)
    payload = {"config": _config(args, cnf=args.cnf, params=params.to_json(), k=k), **rep.to_json()}
    _emit(args, payload, f"r={k - 1}: {'ok' if rep.ok else 'violation: ' + rep.violation}\n")
    return OK if rep.ok else VIOLATION


def cmd_bound_report(args):
    phi = _read_cnf(args.cnf)
    if args.verify:
        _, params, strat = _strategy(args)
        ex = strat.explicit(cap=args.positions)
        rep = verify_winning_strategy(ex, tr_encode(phi), strat.k)
        if not rep.ok:
            sys.stderr.write(f"strategy verification failed: {rep.violation}\n")
            return VIOLATION
        report = lower_bound_report(phi, strat.k, "verified",
                                    f"{strat.k}-winning strategy checked over {len(ex.families)} families")
    else:
        if args.mu is None:
            raise _Usage("give -mu, or -verify to derive it")
        report = lower_bound_report(phi, args.mu, "claim")
    payload = {"config": _config(args, cnf=args.cnf), **report.to_json()}
    _emit(args, payload, report.text())
    return OK


def cmd_check_trace(args):
    header, steps = parse_trace(Path(args.trace).read_text())
    system = args.system or header
    if system not in ("res", "pcr"):
        raise _Usage("trace system unknown: give -system res|pcr")
    if system == "res":
        if not args.cnf:
            raise _Usage("res traces need -cnf")
        res = check_res_trace(_read_cnf(args.cnf), steps)
        source = {"cnf": args.cnf}
    else:
        if args.polys:
            polys = [Polynomial.from_json(p) for p in json.loads(Path(args.polys).read_text())]
            source = {"polys": args.polys}
        elif args.cnf:
            polys = tr_encode(_read_cnf(args.cnf))
            source = {"cnf": args.cnf, "encoding": "tr"}
        else:
            raise _Usage("pcr traces need -polys or -cnf")
        res = check_pcr_trace(polys, steps)
    payload = {"config": _config(args, trace=args.trace, system=system, **source), **res.to_json()}
    if res.ok:
        text = json.dumps(res.report.to_json(), sort_keys=True) + "\n"
    else:
        why = res.message if res.message.startswith(res.rule) else f"{res.rule}: {res.message}"
        text = f"violation at step {res.step}: {why}\n"
    _emit(args, payload, text)
    return OK if res.ok else VIOLATION


def cmd_refute_naive(args):
    phi = _read_cnf(args.cnf)
    try:
        steps = naive_res_refuter(phi, cap=args.max_vars)
    except RefutationNotFound:
        sys.stderr.write("no refutation: the formula is satisfiable\n")
        return VIOLATION
    _write(args, write_trace("res", steps, {"config": _config(args, cnf=args.cnf)}))
    return OK


class _Usage(Exception):
    pass


# parser --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hallspace", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, func, help_text):
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.set_defaults(func=func)
        sp.add_argument("-json", action="store_true", help="machine-readable report")
        sp.add_argument("-out", help="write the artifact here instead of stdout")
        return sp

    def caps(sp):
        sp.add_argument("-cap", type=int, default=DEFAULT_SUBSET_CAP, help="enumeration cap")
        sp.add_argument("-force", action="store_true", help="exceed the enumeration cap")

    def game(sp, need_graph=True):
        sp.add_argument("-epsilon", type=rational, default=Fraction(1, 24))
        sp.add_argument("-s", type=int, help="expansion size (default: least s reaching -mu-target)")
        sp.add_argument("-d", type=int, help="right degree bound (default: actual maximum)")
        sp.add_argument("-mu-target", dest="mu_target", type=rational, default=Fraction(2))
        sp.add_argument("-max-components", "--max-components", dest="max_components", type=int,
                        help="fixed component budget (experiment mode, no guarantee)")
        caps(sp)

    sp = command("gen-cnf", cmd_gen_cnf, "random 3-CNF in DIMACS")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("-delta", type=rational, default=Fraction(6))
    sp.add_argument("-seed", type=int, required=True)

    sp = command("adj-graph", cmd_adj_graph, "clause/variable adjacency graph")
    sp.add_argument("-cnf", required=True)

    sp = command("check-expansion", cmd_check_expansion, "certify (s, delta)-expansion")
    sp.add_argument("-graph", required=True)
    sp.add_argument("-s", type=int, required=True)
    sp.add_argument("-delta", type=rational, required=True)
    caps(sp)

    sp = command("find-matching", cmd_find_matching, "exact (h,k)-matching search")
    sp.add_argument("-graph", required=True)
    sp.add_argument("-left", type=int_list, help="left vertices to cover (default: all)")
    sp.add_argument("-hk", type=int_list, default=[2, 4], help="matching shape h,k (default 2,4)")

    sp = command("two-path-cover", cmd_two_path_cover, "exact 2-path cover search")
    sp.add_argument("-hypergraph", required=True)
    sp.add_argument("-edges", type=int_list, help="edge subset (default: all)")

    sp = command("counterexample", cmd_counterexample, "counterexample hypergraph for epsilon > 1/3")
    sp.add_argument("-epsilon", type=rational, required=True)
    sp.add_argument("-certificate", help="write the brute-force certificate here (default: stderr)")
    sp.add_argument("-jobs", type=int, default=1, help="worker processes for subset checks")

    sp = command("verify-hall", cmd_verify_hall, "exhaustive small-graph sweep")
    sp.add_argument("-max-left", dest="max_left", type=int, default=5)
    sp.add_argument("-max-right", dest="max_right", type=int, default=7)
    sp.add_argument("-epsilon", type=rational, default=Fraction(1, 24))
    sp.add_argument("-mode", choices=["hall1", "hall2"], default="hall1")
    sp.add_argument("-degrees", type=int_list, default=[2, 3])

    sp = command("play-covergame", cmd_play_covergame, "play the cover game, JSON-lines transcript")
    sp.add_argument("-graph", required=True)
    sp.add_argument("-adversary", choices=["random", "greedy", "script"], default="random")
    sp.add_argument("-script", help="JSON move list for the scripted adversary")
    sp.add_argument("-seed", type=int)
    sp.add_argument("-moves", type=int, default=500)
    sp.add_argument("-no-check", dest="no_check", action="store_true", help="skip exhaustive re-checks")
    game(sp)

    for name, func, text in (
        ("build-strategy", cmd_build_strategy, "enumerate the game-derived strategy"),
        ("verify-strategy", cmd_verify_strategy, "check the k-winning strategy conditions"),
        ("free-family", cmd_free_family, "check the derived (k-1)-free family"),
        ("bound-report", cmd_bound_report, "space lower bounds from mu"),
    ):
        sp = command(name, func, text)
        sp.add_argument("-cnf", required=True)
        sp.add_argument("-positions", type=int, default=20000, help="cap on game positions")
        if name in ("verify-strategy", "free-family"):
            sp.add_argument("-k", type=int, help="override k (default: ceil of the budget)")
        if name == "bound-report":
            sp.add_argument("-mu", type=rational, help="claimed mu")
            sp.add_argument("-verify", action="store_true", help="derive mu from a verified strategy")
        game(sp)

    sp = command("check-trace", cmd_check_trace, "validate and measure a refutation trace")
    sp.add_argument("-trace", required=True)
    sp.add_argument("-system", choices=["res", "pcr"])
    sp.add_argument("-cnf")
    sp.add_argument("-polys", help="JSON list of polynomials (pcr)")

    sp = command("refute-naive", cmd_refute_naive, "tree-like resolution refutation of a small CNF")
    sp.add_argument("-cnf", required=True)
    sp.add_argument("-max-vars", dest="max_vars", type=int, default=16)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"hallspace: error: {exc}\n")
        return USAGE
    except (OSError, GraphError, CnfError, TraceError, CapExceeded, StrategyError,
            ValueError, TypeError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"hallspace: error: {exc}\n")
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
