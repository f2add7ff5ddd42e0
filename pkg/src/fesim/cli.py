"""Command-line driver: ``fesim <subcommand> ...``.

Exit status is 0 for success, Win, Winnable or Pass; 1 for Lose,
NotWinnable or Fail; 2 for usage, format and geometry errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import gadgets
from .compiler import check_cycle_free, compile_instance, layout_report, synthesize_witness
from .engine import EngineError, apply_player_action, end_player_turn, replay, run_enemy_turn
from .formats import FormatError, StageInvalid, emit_stage, emit_trace, format_enemy_log, parse_stage, parse_trace
from .model import GameState, Outcome, validate_stage
from .render import render
from .sat import (
    EmbeddingError,
    brute_force_sat,
    is_bounded,
    parse_cnf,
    reduce_degree,
    spread_assignment,
)
from .solver import Decision, Limits, solve_bounded, solve_unbounded

OK, NO, ERR = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: Optional[str], text: str, out) -> None:
    if path is None:
        out.write(text)
    else:
        Path(path).write_text(text)


def _limits(args) -> Limits:
    return Limits(max_nodes=args.node_cap, max_seconds=args.time_cap)


def cmd_simulate(args, out) -> int:
    spec = parse_stage(_read(args.stage))
    script = parse_trace(_read(args.trace))
    res = replay(spec, script)
    out.write(emit_trace(script, res.enemy_logs))
    out.write(f"outcome: {res.outcome.value} after round {res.final.round}\n")
    return OK if res.outcome is Outcome.WIN else NO


def cmd_solve(args, out) -> int:
    spec = parse_stage(_read(args.stage))
    if args.unbounded:
        res = solve_unbounded(spec, _limits(args))
    else:
        res = solve_bounded(spec, args.max_rounds, _limits(args))
    out.write(f"{res.decision.value}\n")
    out.write(f"# nodes={res.stats.nodes} states={res.stats.states} rounds={res.stats.rounds}\n")
    if res.witness is not None:
        out.write(emit_trace(res.witness))
    if res.decision is Decision.RESOURCE_EXCEEDED:
        return ERR
    return OK if res.decision is Decision.WINNABLE else NO


def cmd_reduce(args, out) -> int:
    inst = parse_cnf(_read(args.cnfp))
    bounded = inst if is_bounded(inst) else reduce_degree(inst)
    spec, layout = compile_instance(bounded, counter_attacks=not args.no_counter)
    _write(args.out, emit_stage(spec), out)
    sys.stderr.write(layout_report(layout))
    if args.witness is None:
        return OK
    answer = brute_force_sat(inst, max_vars=None)
    if answer is None:
        sys.stderr.write("formula is unsatisfiable; no witness written\n")
        return NO
    if bounded is not inst:
        answer = spread_assignment(bounded.mapping, answer)
    script = synthesize_witness(bounded, spec, layout, answer)
    Path(args.witness).write_text(emit_trace(script))
    return OK


def cmd_sat(args, out) -> int:
    inst = parse_cnf(_read(args.cnfp))
    answer = brute_force_sat(inst, max_vars=None)
    if answer is None:
        out.write("UNSAT\n")
        return NO
    out.write("SAT\n")
    out.write(" ".join(f"{v}={'1' if answer[v] else '0'}" for v in inst.variables) + "\n")
    return OK


def cmd_verify_gadget(args, out) -> int:
    d = args.d
    if args.kind == "door":
        harnesses = [gadgets.build_door_harness(d)]
    elif args.kind == "oneway":
        harnesses = [gadgets.build_oneway_harness(d)]
    elif args.kind == "crossover":
        harnesses = [gadgets.build_crossover_harness(d, args.s1, args.s2)]
    else:
        kinds = [args.turn] if args.turn else list(gadgets.TURN_KINDS)
        harnesses = [gadgets.build_turn_harness(k, d, args.s1, args.s2) for k in kinds]
    worst = OK
    for h in harnesses:
        for c in h.contracts:
            v = gadgets.verify_contract(h, c, _limits(args))
            out.write(f"{v.status:16} {h.name}: {c.name} ({v.detail})\n")
            if v.status == "ResourceExceeded":
                worst = ERR
            elif not v.passed and worst == OK:
                worst = NO
    return worst


def cmd_check(args, out) -> int:
    spec = parse_stage(_read(args.stage), validate=False)
    problems = validate_stage(spec)
    for p in problems:
        out.write(f"invalid: {p.code}: {p.detail}\n")
    ok, cycle = check_cycle_free(spec.grid)
    out.write(f"valid: {'no' if problems else 'yes'}\n")
    out.write(f"cycle-free: {'yes' if ok else 'no'}\n")
    if cycle:
        out.write("cycle: " + " ".join(f"({p.x},{p.y})" for p in cycle) + "\n")
    return OK if ok and not problems else NO


def cmd_render(args, out) -> int:
    spec = parse_stage(_read(args.stage))
    out.write(render(spec, args.format, ranges=args.ranges))
    return OK


def cmd_play(args, out, inp) -> int:
    """Read trace-style action lines; END runs the enemy turn, QUIT stops.

    A MOVE line is held until the ATTACK/HEAL/WAIT line that completes it.
    """
    spec = parse_stage(_read(args.stage))
    state = GameState.initial(spec)
    out.write(render(state))
    pending = ""
    while state.outcome is Outcome.ONGOING:
        out.write(f"round {state.round}> ")
        out.flush()
        line = inp.readline()
        if not line or line.strip() == "QUIT":
            out.write("\n")
            break
        line = line.strip()
        if not line:
            continue
        if line.startswith("MOVE") and not pending:
            pending = line
            continue
        if pending:
            line, pending = pending + "\n" + line, ""
        if line == "END":
            state, log = run_enemy_turn(end_player_turn(state))
            out.write("\n".join(format_enemy_log(log)) + "\n")
            out.write(render(state))
            continue
        try:
            (acts,) = parse_trace(f"ROUND 1\n{line}\nEND\n")
            for act in acts:
                state, rep = apply_player_action(state, act)
                if rep is not None:
                    out.write(f"{rep}\n")
        except (FormatError, EngineError, ValueError) as exc:
            out.write(f"rejected: {exc}\n")
            continue
        out.write(render(state))
    out.write(f"outcome: {state.outcome.value}\n")
    return OK if state.outcome is Outcome.WIN else NO


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fesim", description="Tactics-game engine, solver and hardness gadgets.")
    sub = p.add_subparsers(dest="command", required=True)

    def limits(sp):
        sp.add_argument("--node-cap", type=int, default=10_000_000)
        sp.add_argument("--time-cap", type=float, default=None)

    s = sub.add_parser("simulate", help="replay a trace against a stage")
    s.add_argument("stage")
    s.add_argument("trace")

    s = sub.add_parser("solve", help="decide winnability")
    s.add_argument("stage")
    s.add_argument("--max-rounds", type=int, default=10)
    s.add_argument("--unbounded", action="store_true")
    limits(s)

    s = sub.add_parser("reduce", help="compile a .cnfp formula into a stage")
    s.add_argument("cnfp")
    s.add_argument("--no-counter", action="store_true")
    s.add_argument("--out")
    s.add_argument("--witness")

    s = sub.add_parser("sat", help="brute-force satisfiability oracle")
    s.add_argument("cnfp")

    s = sub.add_parser("verify-gadget", help="check a harness against its contracts")
    s.add_argument("kind", choices=["door", "crossover", "turning", "oneway"])
    s.add_argument("--d", type=int, default=6)
    s.add_argument("--s1", type=int, default=1)
    s.add_argument("--s2", type=int, default=3)
    s.add_argument("--turn", choices=sorted(gadgets.TURN_KINDS))
    limits(s)

    s = sub.add_parser("check", help="validate a stage and test it for cycles")
    s.add_argument("stage")

    s = sub.add_parser("render", help="draw a stage")
    s.add_argument("stage")
    s.add_argument("--format", choices=["ascii", "svg"], default="ascii")
    s.add_argument("--ranges", action="store_true")

    s = sub.add_parser("play", help="step through a stage interactively")
    s.add_argument("stage")
    return p


def main(argv: Optional[Sequence[str]] = None, out=None, inp=None) -> int:
    out = sys.stdout if out is None else out
    inp = sys.stdin if inp is None else inp
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERR if exc.code else OK
    handlers = {
        "simulate": cmd_simulate,
        "solve": cmd_solve,
        "reduce": cmd_reduce,
        "sat": cmd_sat,
        "verify-gadget": cmd_verify_gadget,
        "check": cmd_check,
        "render": cmd_render,
    }
    try:
        if args.command == "play":
            return cmd_play(args, out, inp)
        return handlers[args.command](args, out)
    except (UsageError, FormatError, StageInvalid, EmbeddingError, EngineError,
            gadgets.BadOffsets, gadgets.GeometryFailure, ValueError) as exc:
        sys.stderr.write(f"fesim: error: {exc}\n")
        return ERR


if __name__ == "__main__":
    sys.exit(main())
