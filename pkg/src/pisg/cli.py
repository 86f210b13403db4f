"""Command-line interface.

Every command prints one JSON document with sorted keys.  Numbers appear as
``{"exact": ..., "decimal": ...}``; the decimal is a 12-place rendering and
never feeds back into any computation.

Exit codes: 0 success, 1 a negative domain answer (invalid game, failed
certificate, odd cycle, equal radical sum, ...), 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import purecircuit as pc
from . import reduction as red
from . import sqrtsum as sq
from .equilibrium import best_response, evaluate_payoffs, verify_epsilon_nash
from .game import (
    GameFormatError,
    dumps,
    game_from_json,
    game_to_json,
    profile_from_json,
    profile_to_json,
    validate_game,
    validate_profile,
)
from .numeric import QuadExt, decimal_str, format_rational, parse_rational
from .solver2p import SolverConfig, solve2p

OK, NEGATIVE, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def num(x) -> dict:
    exact = str(x) if isinstance(x, QuadExt) else format_rational(x)
    return {"exact": exact, "decimal": decimal_str(x)}


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _write(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _int_list(text: str) -> tuple:
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("entries must be positive integers")
    return vals


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def parse_game_file(path: str):
    """Parse and validate; validation failures are input errors here."""
    game = game_from_json(path)
    report = validate_game(game)
    if not report.ok:
        raise GameFormatError("invalid game: " + "; ".join(report.violations))
    return game


def _load_profile(game, path: str):
    profile = profile_from_json(game, path)
    issues = validate_profile(game, profile)
    if issues:
        raise GameFormatError("invalid profile: " + "; ".join(issues))
    return profile


def _by_state(game, rows) -> dict:
    return {f"player{i + 1}": {s.id: num(v) for s, v in zip(game.states, row)} for i, row in enumerate(rows)}


# ---------------------------------------------------------------------------
# Game-core commands


def cmd_validate(args) -> int:
    game = game_from_json(args.game)
    report = validate_game(game)
    _emit({
        "ok": report.ok,
        "alternating": report.alternating,
        "rewardsInUnitInterval": report.rewards_in_unit_interval,
        "violations": report.violations,
    })
    return OK if report.ok else NEGATIVE


def cmd_eval(args) -> int:
    game = parse_game_file(args.game)
    profile = _load_profile(game, args.profile)
    _emit({"payoffs": _by_state(game, evaluate_payoffs(game, profile))})
    return OK


def cmd_best_response(args) -> int:
    game = parse_game_file(args.game)
    profile = _load_profile(game, args.profile)
    if not 1 <= args.player <= game.num_players:
        raise UsageError(f"--player must lie in 1..{game.num_players}")
    br = best_response(game, profile, args.player - 1)
    payoffs = evaluate_payoffs(game, profile)[args.player - 1]
    _emit({
        "player": args.player,
        "choices": {game.states[k].id: game.states[k].actions[a].label for k, a in sorted(br.choices.items())},
        "values": {s.id: num(v) for s, v in zip(game.states, br.values)},
        "gaps": {s.id: num(b - v) for s, b, v in zip(game.states, br.values, payoffs)},
    })
    return OK


def cmd_verify_nash(args) -> int:
    game = parse_game_file(args.game)
    profile = _load_profile(game, args.profile)
    report = verify_epsilon_nash(game, profile, args.eps)
    _emit({
        "ok": report.ok,
        "eps": num(args.eps),
        "maxGap": num(report.max_gap),
        "gaps": _by_state(game, report.gaps),
        "payoffs": _by_state(game, report.payoffs),
    })
    return OK if report.ok else NEGATIVE


def cmd_solve2p(args) -> int:
    game = parse_game_file(args.game)
    if game.num_players != 2:
        raise UsageError("solve2p needs a two-player game")
    cfg = SolverConfig(
        damping=args.damping, max_iters=args.max_iters, residual_target=args.residual,
        argmax_tol=args.delta, rationalize_denom_bound=args.denom_bound,
    )
    res = solve2p(game, cfg)
    profile_json = profile_to_json(game, res.profile)
    if args.out:
        _write(args.out, profile_json)
    _emit({
        "exact": res.exact,
        "certifiedEps": num(res.certified_eps),
        "method": res.method,
        "iterations": res.iterations,
        "profile": profile_json,
        "valuation": _by_state(game, res.valuation),
    })
    return OK


# ---------------------------------------------------------------------------
# Pure-Circuit and the reduction


def _assignment_json(x: dict) -> dict:
    return dict(sorted(x.items()))


def cmd_pc_check(args) -> int:
    inst = pc.circuit_from_json(args.circuit)
    x = pc.assignment_from_json(inst, args.assignment)
    bad = pc.check_assignment(inst, x)
    _emit({"ok": not bad, "violated": [str(g) for g in bad]})
    return NEGATIVE if bad else OK


def cmd_pc_solve(args) -> int:
    inst = pc.circuit_from_json(args.circuit)
    try:
        x = pc.brute_force_solve(inst, args.cap)
    except pc.CapExceeded as exc:
        raise UsageError(str(exc)) from None
    _emit({"assignment": _assignment_json(x)})
    return OK


def cmd_pc_compile(args) -> int:
    inst = pc.circuit_from_json(args.circuit)
    try:
        params = red.default_params(args.eps)
        compiled = red.compile_circuit(inst, params)
    except pc.NotBipartite as exc:
        _emit({"error": "NOT_BIPARTITE", "witness": exc.witness})
        return NEGATIVE
    except red.EmptyWindow as exc:
        _emit({"error": "EMPTY_WINDOW", "message": str(exc)})
        return NEGATIVE
    _write(args.out, game_to_json(compiled.game))
    if args.emit_params:
        _write(args.emit_params, red.params_to_json(params, compiled.node_state))
    _emit({
        "states": len(compiled.game.states),
        "sides": dict(sorted(compiled.sides.items())),
        "rewards": {k: num(v) for k, v in sorted(params.rewards.items())},
        "eps": num(params.eps),
    })
    return OK


def cmd_pc_decode(args) -> int:
    game = parse_game_file(args.game)
    profile = _load_profile(game, args.profile)
    with open(args.params, encoding="utf-8") as fh:
        params, node_state = red.params_from_json(json.load(fh))
    if node_state is None:
        node_state = {s.id: s.id for s in game.states if not s.id.startswith("#")}
    x = red.decode_profile(game, profile, node_state, params)
    probs = {u: num(red.action1_probability(game, profile, sid)) for u, sid in sorted(node_state.items())}
    _emit({"assignment": _assignment_json(x), "probabilities": probs})
    return OK


def cmd_windows(args) -> int:
    bounds = red.window_bounds(args.eps)
    out = {}
    for kind, (lo, hi) in bounds.items():
        out[kind] = {"lo": num(lo), "hi": num(hi), "nonempty": hi > lo}
    try:
        chosen = red.compute_reward_windows(args.eps)
    except red.EmptyWindow:
        chosen = None
    if chosen is not None:
        for kind, w in chosen.items():
            out[kind]["reward"] = num(w.choice)
    _emit({"eps": num(args.eps), "windows": out, "ok": chosen is not None})
    return OK if chosen is not None else NEGATIVE


def cmd_epsilon_bound(args) -> int:
    r = red.verify_epsilon_bound(args.grid)
    ok = r["closed_form_ok"] and r["threshold_ok"] and r["grid_ok"]
    _emit({
        "closedForm": num(r["closed_form"]),
        "closedFormCheck": "PASS" if r["closed_form_ok"] else "FAIL",
        "threshold": num(r["threshold"]),
        "thresholdCheck": "PASS" if r["threshold_ok"] else "FAIL",
        "gridStep": format_rational(r["grid_step"]),
        "gridMax": num(r["grid_max"]),
        "gridArgmax": [format_rational(x) for x in r["grid_argmax"]],
        "gridCheck": "PASS" if r["grid_ok"] else "FAIL",
        "l": num(red.L_STAR),
        "r": num(red.R_STAR),
    })
    return OK if ok else NEGATIVE


# ---------------------------------------------------------------------------
# Square-root family


def cmd_ga_build(args) -> int:
    g = sq.build_Ga(args.a, player4=args.player4, negated=args.negated)
    _write(args.out, game_to_json(g.game))
    _emit({"a": args.a, "L": num(g.L), "H": num(g.H), "states": len(g.game.states)})
    return OK


def cmd_ga_solve(args) -> int:
    g = sq.build_Ga(args.a)
    cert = sq.closed_form_equilibrium(g)
    nash = verify_epsilon_nash(g.game, g.profile(), 0)
    rejected = sq.check_no_pure_equilibrium(g)
    _emit({
        "a": args.a,
        "xStar": num(cert.x_star),
        "discriminant": num(cert.discriminant),
        "certificate": {
            "indifference": cert.indifference,
            "inUnitInterval": cert.in_unit_interval,
            "discriminantIs81a": cert.discriminant_ok,
            "companionRootOutside": cert.companion_outside,
            "nash": nash.ok,
            "pureProfilesRejected": len(rejected),
        },
    })
    return OK if cert.ok and nash.ok else NEGATIVE


def _instance(args) -> sq.SqrtSumInstance:
    return sq.SqrtSumInstance(args.a, args.t)


def cmd_sqrtsum_build(args) -> int:
    try:
        sg = sq.build_sqrtsum_game(_instance(args))
    except sq.EqualInstance as exc:
        _emit({"error": "EQUAL_INSTANCE", "message": str(exc)})
        return NEGATIVE
    _write(args.out, game_to_json(sg.game))
    _emit({
        "c": [num(c) for c in sg.c],
        "r0": num(sg.r0),
        "gadgets": [
            {"a": a, "p": num(p), "q": num(q), "negated": neg}
            for a, (p, q, neg) in zip(args.a, sg.per_gadget)
        ],
        "states": len(sg.game.states),
    })
    return OK


def cmd_sqrtsum_decide(args) -> int:
    try:
        d = sq.decide_sqrtsum(_instance(args))
    except sq.EqualInstance as exc:
        _emit({"result": "EQUAL", "error": "EQUAL_INSTANCE", "message": str(exc)})
        return NEGATIVE
    _emit({
        "result": d.result.value,
        "witnessAction": d.witness_action,
        "V1": num(d.v1),
        "identity": d.identity_ok,
        "intervalAgrees": d.interval_agrees,
        "gadgetsCertified": d.gadgets_certified,
    })
    return OK if d.identity_ok and d.interval_agrees and d.gadgets_certified else NEGATIVE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pisg", description="Perfect-information stochastic games, exactly.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.set_defaults(fn=fn)
        return p

    p = add("validate", cmd_validate, "check a game file")
    p.add_argument("game")

    for name, fn, text in (
        ("eval", cmd_eval, "normalized payoffs of a profile from every state"),
        ("best-response", cmd_best_response, "optimal deviation of one player"),
        ("verify-nash", cmd_verify_nash, "exact epsilon-Nash certificate"),
    ):
        p = add(name, fn, text)
        p.add_argument("--game", required=True)
        p.add_argument("--profile", required=True)
        if name == "best-response":
            p.add_argument("--player", type=int, required=True, help="1-based player index")
        if name == "verify-nash":
            p.add_argument("--eps", type=_rational_arg, default=Fraction(0))

    d = SolverConfig()
    p = add("solve2p", cmd_solve2p, "stationary equilibrium of a two-player game")
    p.add_argument("--game", required=True)
    p.add_argument("--out", help="write the profile here")
    p.add_argument("--damping", type=_rational_arg, default=d.damping)
    p.add_argument("--max-iters", type=_positive_int, default=d.max_iters)
    p.add_argument("--residual", type=_rational_arg, default=d.residual_target)
    p.add_argument("--delta", type=_rational_arg, default=d.argmax_tol)
    p.add_argument("--denom-bound", type=_positive_int, default=d.rationalize_denom_bound)

    p = add("pc-check", cmd_pc_check, "check an assignment against a circuit")
    p.add_argument("--circuit", required=True)
    p.add_argument("--assignment", required=True)

    p = add("pc-solve", cmd_pc_solve, "brute-force a small circuit")
    p.add_argument("--circuit", required=True)
    p.add_argument("--cap", type=_positive_int, default=12)

    p = add("pc-compile", cmd_pc_compile, "compile a circuit into a two-player game")
    p.add_argument("--circuit", required=True)
    p.add_argument("--eps", type=_rational_arg, default=red.DEFAULT_EPS)
    p.add_argument("--out", required=True)
    p.add_argument("--emit-params")

    p = add("pc-decode", cmd_pc_decode, "read a circuit assignment off a profile")
    p.add_argument("--game", required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--params", required=True)

    p = add("windows", cmd_windows, "auxiliary reward windows for a given eps")
    p.add_argument("--eps", type=_rational_arg, default=red.DEFAULT_EPS)

    p = add("epsilon-bound", cmd_epsilon_bound, "verify the optimal eps constant")
    p.add_argument("--grid", type=_positive_int, default=200)

    p = add("ga-build", cmd_ga_build, "write the game G(a)")
    p.add_argument("--a", type=_positive_int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--player4", action="store_true", help="add player 4 with stop rewards 1, 2, 4")
    p.add_argument("--negated", action="store_true", help="negate player 4's rewards")

    p = add("ga-solve", cmd_ga_solve, "closed-form equilibrium of G(a) with certificate")
    p.add_argument("--a", type=_positive_int, required=True)

    for name, fn, text in (
        ("sqrtsum-build", cmd_sqrtsum_build, "write the four-player SqrtSum game"),
        ("sqrtsum-decide", cmd_sqrtsum_decide, "compare sum of sqrt(a_i) with t"),
    ):
        p = add(name, fn, text)
        p.add_argument("--a", type=_int_list, required=True, help="comma-separated radicands")
        p.add_argument("--t", type=_positive_int, required=True)
        if name == "sqrtsum-build":
            p.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (GameFormatError, UsageError, OSError, ValueError) as exc:
        print(f"pisg {args.command}: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
