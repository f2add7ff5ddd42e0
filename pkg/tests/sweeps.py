"""Exhaustive instance generators and per-chunk workers for the big sweeps.

Workers are module-level so a process pool can pickle them.
"""

from __future__ import annotations

import itertools

from fesim.compiler import check_cycle_free, check_layout, compile_instance, synthesize_witness
from fesim.engine import replay
from fesim.model import Outcome
from fesim.sat import (
    Clause,
    assign_levels,
    brute_force_sat,
    evaluate,
    is_bounded,
    reduce_degree,
    validate_embedding,
)

SETTINGS = ((True, None), (False, None), (True, 4), (False, 4))


def clause_menu(n: int) -> tuple[tuple[str, ...], list[Clause]]:
    vs = tuple(f"v{i}" for i in range(1, n + 1))
    menu = []
    for sign in (True, False):
        for k in (1, 2, 3):
            for sub in itertools.combinations(vs, k):
                menu.append(Clause(tuple((v, sign) for v in sub)))
    return vs, menu


def embedded_instances(n: int, max_clauses: int, first: int = None):
    """Every embeddable set of distinct monotone clauses over v1..vn.

    With ``first`` set, only sets whose lowest clause index is ``first``.
    """
    vs, menu = clause_menu(n)
    if first is None:
        heads = range(-1, len(menu))
    else:
        heads = [first]
    for h in heads:
        if h == -1:
            yield assign_levels(vs, ())
            continue
        rest = menu[h + 1 :]
        for m in range(0, max_clauses):
            for tail in itertools.combinations(rest, m):
                inst = assign_levels(vs, (menu[h],) + tail)
                if not validate_embedding(inst):
                    yield inst


def degree_chunk(job: tuple[int, int, int]) -> tuple[int, list[str]]:
    """Criterion 3 worker: (n, max_clauses, head clause) -> (count, problems)."""
    n, max_clauses, head = job
    count, bad = 0, []
    for inst in embedded_instances(n, max_clauses, head):
        count += 1
        before = brute_force_sat(inst)
        red = reduce_degree(inst)
        after = brute_force_sat(red, max_vars=None)
        if (before is None) != (after is None):
            bad.append(f"satisfiability changed: {inst}")
        if not is_bounded(red):
            bad.append(f"not 3-bounded: {inst}")
    return count, bad


def all_models(inst):
    vs = inst.variables
    for bits in itertools.product((False, True), repeat=len(vs)):
        a = dict(zip(vs, bits))
        if evaluate(inst, a):
            yield a


def soundness_chunk(job: tuple[int, int]) -> tuple[int, list[str], int]:
    """Criterion 4 worker: (n, head clause) -> (runs, problems, max strikes per unit)."""
    n, head = job
    runs, bad, strikes = 0, [], 0
    for inst in embedded_instances(n, 3, head):
        if not is_bounded(inst):
            continue
        for ca, dur in SETTINGS:
            spec, layout = compile_instance(inst, ca, dur)
            problems = check_layout(spec, layout)
            if problems:
                bad.append(f"layout {inst} counters={ca} dur={dur}: {problems[0]}")
            if not check_cycle_free(spec.grid)[0]:
                bad.append(f"cycle in {inst}")
            for a in all_models(inst):
                runs += 1
                script = synthesize_witness(inst, spec, layout, a)
                res = replay(spec, script)
                if res.outcome is not Outcome.WIN:
                    bad.append(f"{inst} {a} counters={ca} dur={dur}: {res.outcome.value}")
                if len(script) > spec.round_budget:
                    bad.append(f"{inst}: {len(script)} rounds over budget {spec.round_budget}")
                reps = list(res.reports) + [e.report for log in res.enemy_logs for e in log if e.report]
                used: dict[str, int] = {}
                for rep in reps:
                    used[rep.attacker] = used.get(rep.attacker, 0) + 1
                    if rep.countered:
                        used[rep.defender] = used.get(rep.defender, 0) + 1
                strikes = max([strikes, *used.values()])
    return runs, bad, strikes


def jobs_for(n_max: int, max_clauses: int, per_n: bool = False):
    for n in range(1, n_max + 1):
        _, menu = clause_menu(n)
        for h in range(-1, len(menu)):
            yield (n, h) if per_n else (n, max_clauses, h)
