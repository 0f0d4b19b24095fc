"""Command-line front end.

Exit codes: 0 success (and decision "yes"), 1 decision "no", 2 usage
error, 3 syntax/validation error, 4 size limit exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .cover import minimum_random_game_cover
from .engine import (
    IncompleteRound,
    UnknownWinner,
    advance_round,
    current_pairings,
    monte_carlo_win_estimate,
)
from .forge import (
    BadParameter,
    mcc_to_instance,
    parse_cnf,
    parse_colored_graph,
    parse_qbf,
    qbf_to_instance,
    sat_to_first_round_instance,
    trim_to_generalized,
)
from .model import (
    InstanceSyntaxError,
    Leaf,
    MissingRoleAnnotations,
    SizeLimitExceeded,
    ValidationError,
    format_rational,
    parse_instance,
    serialize_instance,
)
from .oracle import oracle_adaptive, oracle_nonadaptive
from .solver import Mode, best_response, best_response_for, solve

EXIT_OK = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_SIZE = 4

# serializing a dense matrix beyond this many players is unreasonable
SERIALIZE_CAP = 4096

_MODES = {"full": Mode.FULL, "reachable": Mode.REACHABLE, "lowmem": Mode.LOW_MEMORY}


def _load(path: str):
    return parse_instance(Path(path).read_text())


def _cmd_solve(args) -> int:
    result = solve(_load(args.instance), _MODES[args.mode])
    print(format_rational(result.t_opt))
    return EXIT_OK


def _cmd_decide(args) -> int:
    inst = _load(args.instance)
    verdict = solve(inst, _MODES[args.mode]).t_opt >= inst.threshold
    print("yes" if verdict else "no")
    return EXIT_OK if verdict else EXIT_NO


def _cmd_respond(args) -> int:
    inst = _load(args.instance)
    response = best_response(inst)
    for name, action in sorted(
        (inst.name_of(p), a) for p, a in response.profile.actions
    ):
        print(f"{name}={action.value}")
    print(f"value {format_rational(response.value)}")
    return EXIT_OK


def _cmd_cover(args) -> int:
    inst = _load(args.instance)
    for player in sorted(minimum_random_game_cover(inst)):
        print(inst.name_of(player))
    return EXIT_OK


def _cmd_oracle(args) -> int:
    inst = _load(args.instance)
    value = oracle_nonadaptive(inst) if args.nonadaptive else oracle_adaptive(inst)
    print(format_rational(value))
    return EXIT_OK


def _print_instance(inst) -> int:
    if inst.n > SERIALIZE_CAP:
        raise SizeLimitExceeded(
            f"refusing to serialize a {inst.n}-player dense matrix; "
            "use --trim for a generalized instance"
        )
    print(serialize_instance(inst))
    return EXIT_OK


def _cmd_gen_qbf(args) -> int:
    inst = qbf_to_instance(parse_qbf(Path(args.formula).read_text()))
    if args.trim:
        inst = trim_to_generalized(inst)
    return _print_instance(inst)


def _cmd_gen_sat(args) -> int:
    return _print_instance(
        sat_to_first_round_instance(parse_cnf(Path(args.formula).read_text()))
    )


def _cmd_gen_mcc(args) -> int:
    return _print_instance(
        mcc_to_instance(parse_colored_graph(Path(args.graph).read_text()))
    )


def _cmd_mc(args) -> int:
    estimate = monte_carlo_win_estimate(_load(args.instance), args.trials, args.seed)
    print(f"estimate {estimate.estimate:.6f}")
    print(f"std_error {estimate.std_error:.6f}")
    return EXIT_OK


def _cmd_advise(args, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    inst = _load(args.instance)
    tree = inst.tree
    round_number = 1
    while not isinstance(tree, Leaf):
        games = current_pairings(tree)
        response = best_response_for(tree, inst.matrix, inst.coalition, inst.favorite)
        print(f"round {round_number}", file=stdout)
        print(
            "pairings: "
            + ", ".join(
                f"{inst.name_of(g.player_a)} vs {inst.name_of(g.player_b)}"
                for g in games
            ),
            file=stdout,
        )
        rec = ", ".join(
            f"{name}={action.value}"
            for name, action in sorted(
                (inst.name_of(p), a) for p, a in response.profile.actions
            )
        )
        print(f"recommendation: {rec or 'none'}", file=stdout)
        print(f"value {format_rational(response.value)}", file=stdout)
        while True:
            print("winners? ", end="", file=stdout, flush=True)
            line = stdin.readline()
            if not line:
                return EXIT_USAGE  # input ended mid-tournament
            names = [t.strip() for t in line.strip().split(",") if t.strip()]
            try:
                winners = {i: inst.id_of(name) for i, name in enumerate(names)}
                if len(names) != len(games):
                    raise IncompleteRound(
                        f"expected {len(games)} winners, got {len(names)}"
                    )
                tree = advance_round(tree, winners)
                break
            except (KeyError, UnknownWinner, IncompleteRound) as exc:
                print(f"error: {exc}", file=sys.stderr)
        round_number += 1
    print(f"winner {inst.name_of(tree.player)}", file=stdout)
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cupfix",
        description="Exact coalition-play solver for knockout tournaments.",
    )
    parser.add_argument("--version", action="version", version=f"cupfix {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def instance_cmd(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("-i", "--instance", required=True, help="instance file")
        p.set_defaults(func=fn)
        return p

    p = instance_cmd("solve", _cmd_solve, "print the optimal winning probability")
    p.add_argument("--mode", choices=sorted(_MODES), default="reachable")
    p = instance_cmd("decide", _cmd_decide, "compare the optimum to the threshold")
    p.add_argument("--mode", choices=sorted(_MODES), default="reachable")
    instance_cmd("respond", _cmd_respond, "print the first-round best response")
    instance_cmd("cover", _cmd_cover, "print a minimum random game cover")
    p = instance_cmd("oracle", _cmd_oracle, "brute-force value (small instances)")
    p.add_argument("--nonadaptive", action="store_true")
    p = instance_cmd("mc", _cmd_mc, "Monte-Carlo estimate under best-response play")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    instance_cmd("advise", _cmd_advise, "interactive round-by-round advisor")

    gen = sub.add_parser("gen", help="generate instances with known answers")
    gen_sub = gen.add_subparsers(dest="generator", required=True)
    p = gen_sub.add_parser("qbf", help="quantified 3-CNF reduction")
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("--trim", action="store_true", help="trim to a generalized tree")
    p.set_defaults(func=_cmd_gen_qbf)
    p = gen_sub.add_parser("sat", help="3-SAT first-round reduction")
    p.add_argument("-f", "--formula", required=True)
    p.set_defaults(func=_cmd_gen_sat)
    p = gen_sub.add_parser("mcc", help="multicolored clique reduction")
    p.add_argument("-g", "--graph", required=True)
    p.set_defaults(func=_cmd_gen_mcc)

    p = sub.add_parser("serve", help="run the advisor HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (
        InstanceSyntaxError,
        ValidationError,
        BadParameter,
        MissingRoleAnnotations,
        UnknownWinner,
        IncompleteRound,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SizeLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
