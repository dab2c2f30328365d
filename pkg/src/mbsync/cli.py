"""Command-line front end.

Exit codes: 0 yes/holds, 1 no/violated, 2 input or usage error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .automata.nfa import parse_nfa
from .commgraph import comm_graph, comm_graph_to_dot
from .decide import Budget, Verdict, check_ksync, check_mbsim, check_sync, gen_benchmark, infer_k, model_check, reachable
from .model import MB, P2P, Action, BudgetExceeded, Cfm, ModelError, enabled, initial_configuration, parse_cfm, parse_trace, render_cfm
from .msc import msc_of, msc_to_dot

EXIT_YES, EXIT_NO, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror or e}") from None


def load_cfm(path: str) -> Cfm:
    return parse_cfm(_read(path), source=path)


def parse_trace_file(text: str, source: Optional[str] = None) -> Tuple[Action, ...]:
    """One action per line; errors carry the file name and line number."""
    try:
        return parse_trace(text)
    except ModelError as e:
        raise ModelError(str(e).split(": ", 1)[-1] if e.line else str(e), e.line, source) from None


def parse_goal(text: str, cfm: Cfm) -> Tuple[str, ...]:
    want = {}
    for part in text.split(","):
        if "=" not in part:
            raise InputError(f"goal entry {part!r} is not of the form p=state")
        p, s = (x.strip() for x in part.split("=", 1))
        if p not in cfm.processes:
            raise InputError(f"goal names unknown process {p!r}")
        if s not in cfm.proc(p).states:
            raise InputError(f"process {p} has no state {s!r}")
        want[p] = s
    missing = [p for p in cfm.processes if p not in want]
    if missing:
        raise InputError(f"goal must give a state for every process; missing {', '.join(missing)}")
    return tuple(want[p] for p in cfm.processes)


def _budget(args) -> Optional[Budget]:
    if args.budget is None and args.timeout is None:
        return None
    return Budget(states=args.budget, seconds=args.timeout)


def _report(v: Verdict, args, out) -> int:
    if args.json:
        data = v.to_json()
        if v.detail:
            data["detail"] = v.detail
        out.write(json.dumps(data) + "\n")
    else:
        line = f"{v.command}: {'yes' if v.answer else 'no'}"
        if v.k is not None:
            line += f" (k={v.k})"
        reason = v.detail.get("reason") if v.detail else None
        if reason:
            line += f" [{reason}]"
        out.write(line + "\n")
        if v.witness is not None:
            for a in v.witness:
                out.write(f"{a}\n")
    return EXIT_YES if v.answer else EXIT_NO


# -- commands --------------------------------------------------------------


def cmd_check(args, out) -> int:
    cfm = load_cfm(args.file)
    budget = _budget(args)
    if args.what == "sync":
        v = check_sync(cfm, engine=args.engine, max_exchange=args.max_exchange, max_sends=args.max_sends, budget=budget)
    elif args.what == "ksync":
        if args.k is None:
            raise InputError("check ksync needs --k")
        if args.k < 1:
            raise InputError("--k must be at least 1")
        v = check_ksync(cfm, args.k, budget=budget)
    else:
        v = check_mbsim(cfm, budget=budget)
    return _report(v, args, out)


def cmd_reach(args, out) -> int:
    cfm = load_cfm(args.file)
    goal = parse_goal(args.goal, cfm)
    budget = _budget(args)
    if args.verify_sync:
        s = check_sync(cfm, budget=budget)
        if not s.answer:
            s.command = "reach"
            s.detail = dict(s.detail, reason="not mb-synchronizable; reachability undetermined")
            return _report(s, args, out)
    return _report(reachable(cfm, goal, budget=budget), args, out)


def cmd_infer_k(args, out) -> int:
    return _report(infer_k(load_cfm(args.file), budget=_budget(args)), args, out)


def cmd_model_check(args, out) -> int:
    cfm = load_cfm(args.file)
    prop = parse_nfa(_read(args.property), source=args.property)
    try:
        v = model_check(cfm, prop, budget=_budget(args))
    except ValueError as e:
        raise InputError(f"{args.property}: {e}") from None
    return _report(v, args, out)


def cmd_simulate(args, out) -> int:
    cfm = load_cfm(args.file)
    net = MB if args.semantics == "mb" else P2P
    rng = random.Random(args.seed)
    conf = initial_configuration(cfm)
    trace: List[Action] = []
    for _ in range(args.max_len):
        moves = sorted(enabled(cfm, net, conf), key=lambda x: (str(x[0]), repr(x[1])))
        if not moves:
            break
        a, conf = rng.choice(moves)
        trace.append(a)
    if args.json:
        data = {
            "command": "simulate",
            "semantics": args.semantics,
            "trace": [str(a) for a in trace],
            "states": dict(zip(cfm.processes, conf.states)),
        }
        out.write(json.dumps(data) + "\n")
    else:
        for a in trace:
            out.write(f"{a}\n")
    return EXIT_YES


def cmd_export(args, out) -> int:
    trace = parse_trace_file(_read(args.trace), source=args.trace)
    cfm = load_cfm(args.file)
    if args.graph == "msc":
        text = msc_to_dot(msc_of(trace), cfm.processes, name=cfm.name)
    else:
        text = comm_graph_to_dot(comm_graph(trace, MB), name=cfm.name, condensed=args.graph == "scc")
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return EXIT_YES


def cmd_gen(args, out) -> int:
    nfas = [parse_nfa(_read(p), source=p) for p in args.nfas]
    try:
        cfm = gen_benchmark(nfas, gadget=args.gadget, name=args.name)
    except ValueError as e:
        raise InputError(str(e)) from None
    text = render_cfm(cfm)
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return EXIT_YES


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def flags(default):
        # global flags work before or after the subcommand; only the top level sets defaults
        parser = argparse.ArgumentParser(add_help=False)
        parser.add_argument("--json", action="store_true", default=default(False), help="print a JSON report")
        parser.add_argument("--budget", type=int, default=default(None), metavar="N", help="give up after N explored states (exit 3)")
        parser.add_argument("--timeout", type=float, default=default(None), metavar="SEC", help="give up after SEC seconds (exit 3)")
        return parser

    common = flags(lambda _: argparse.SUPPRESS)
    ap = argparse.ArgumentParser(
        prog="mbsync", description="Synchronizability checks for mailbox CFMs.", parents=[flags(lambda x: x)]
    )
    sub = ap.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="sync / ksync / mbsim")
    csub = check.add_subparsers(dest="what", required=True)
    p = csub.add_parser("sync", parents=[common], help="is every mb-trace synchronizable?")
    p.add_argument("file")
    p.add_argument("--engine", choices=["exact", "bounded"], default="exact")
    p.add_argument("--max-exchange", type=int, default=4, metavar="N", help="bounded engine: sends per exchange")
    p.add_argument("--max-sends", type=int, default=8, metavar="N", help="bounded engine: sends in total")
    p.set_defaults(func=cmd_check)
    p = csub.add_parser("ksync", parents=[common], help="are atomic exchanges bounded by k sends?")
    p.add_argument("file")
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=cmd_check)
    p = csub.add_parser("mbsim", parents=[common], help="is every p2p trace equivalent to a mailbox trace?")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reach", parents=[common], help="global-state reachability")
    p.add_argument("file")
    p.add_argument("--goal", required=True, help="p=state,q=state,...")
    p.add_argument("--verify-sync", action="store_true", help="check synchronizability first")
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("infer-k", parents=[common], help="smallest k for k-synchronizability")
    p.add_argument("file")
    p.set_defaults(func=cmd_infer_k)

    p = sub.add_parser("model-check", parents=[common], help="check an R-closed property on synchronous traces")
    p.add_argument("file")
    p.add_argument("--property", required=True, metavar="NFAFILE")
    p.set_defaults(func=cmd_model_check)

    p = sub.add_parser("simulate", parents=[common], help="random run")
    p.add_argument("file")
    p.add_argument("--semantics", choices=["mb", "p2p"], default="mb")
    p.add_argument("--max-len", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export", parents=[common], help="DOT rendering of a trace")
    p.add_argument("file")
    p.add_argument("--trace", required=True, metavar="TRACEFILE")
    p.add_argument("--format", choices=["dot"], default="dot")
    p.add_argument("--graph", choices=["msc", "comm", "scc"], default="msc")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_export)

    gen = sub.add_parser("gen", help="benchmark generators")
    gsub = gen.add_subparsers(dest="family", required=True)
    p = gsub.add_parser("intersection", parents=[common], help="ring CFM for the intersection of NFAs")
    p.add_argument("nfas", nargs="+", metavar="NFA")
    p.add_argument("--gadget", choices=["none", "nonsync", "nonsim"], default="none")
    p.add_argument("--name", default="intersection")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_YES if e.code == 0 else EXIT_INPUT
    try:
        return args.func(args, out)
    except (ModelError, InputError) as e:
        err.write(f"mbsync: error: {e}\n")
        return EXIT_INPUT
    except BudgetExceeded as e:
        if getattr(args, "json", False):
            out.write(json.dumps({"command": args.command, "verdict": "budget", "stats": {"states": e.explored}}) + "\n")
        err.write(f"mbsync: budget exceeded: {e}\n")
        return EXIT_BUDGET


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
