"""Monotone CNF with a line embedding, degree reduction and a brute-force oracle.

Clauses live on one of two sides of the variable line: all-positive clauses
above, all-negative below. ``level`` is the nesting depth on that side
(0 is outermost, larger levels sit closer to the line).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional, Sequence

POS, NEG = "POS", "NEG"


@dataclass(frozen=True)
class Clause:
    literals: tuple[tuple[str, bool], ...]  # (variable, is_positive)
    level: int = 0

    @classmethod
    def pos(cls, *names: str, level: int = 0) -> "Clause":
        return cls(tuple((n, True) for n in names), level)

    @classmethod
    def neg(cls, *names: str, level: int = 0) -> "Clause":
        return cls(tuple((n, False) for n in names), level)

    @cached_property
    def sign(self) -> Optional[str]:
        signs = {s for _, s in self.literals}
        if signs == {True}:
            return POS
        if signs == {False}:
            return NEG
        return None

    @cached_property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.literals)

    def __str__(self) -> str:
        lits = " v ".join(v if s else "~" + v for v, s in self.literals)
        return f"({lits})"


@dataclass(frozen=True)
class CnfInstance:
    variables: tuple[str, ...]
    clauses: tuple[Clause, ...]

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.variables)}

    def span(self, clause: Clause) -> tuple[int, int]:
        idx = self.index
        pos = [idx[v] for v in clause.variables]
        return min(pos), max(pos)

    def __str__(self) -> str:
        return " & ".join(str(c) for c in self.clauses)


@dataclass(frozen=True)
class BoundedInstance(CnfInstance):
    mapping: dict = field(default_factory=dict, compare=False, hash=False)


class EmbeddingViolation(NamedTuple):
    clause: int
    code: str
    detail: str


class TooLarge(ValueError):
    pass


class InconsistentChain(ValueError):
    pass


class EmbeddingError(ValueError):
    def __init__(self, violations):
        super().__init__("; ".join(f"clause {v.clause}: {v.code} ({v.detail})" for v in violations))
        self.violations = violations


def validate_embedding(inst: CnfInstance) -> list[EmbeddingViolation]:
    out = []
    idx = inst.index
    if len(idx) != len(inst.variables):
        out.append(EmbeddingViolation(-1, "duplicate variable", "variable names must be unique"))
    good = []
    for i, c in enumerate(inst.clauses):
        ok = True
        if not 1 <= len(c.literals) <= 3:
            out.append(EmbeddingViolation(i, "literal count", f"{len(c.literals)} literals"))
            ok = False
        if c.sign is None and c.literals:
            out.append(EmbeddingViolation(i, "not monotone", str(c)))
            ok = False
        missing = [v for v in c.variables if v not in idx]
        if missing:
            out.append(EmbeddingViolation(i, "unknown variable", ",".join(missing)))
            ok = False
        if len(set(c.variables)) != len(c.variables):
            out.append(EmbeddingViolation(i, "duplicate literal", str(c)))
            ok = False
        if c.level < 0:
            out.append(EmbeddingViolation(i, "bad level", str(c.level)))
            ok = False
        if ok:
            good.append(i)
    facts = []
    for i in good:
        c = inst.clauses[i]
        pos = [idx[v] for v in c.variables]
        facts.append((i, c.sign, c.level, min(pos), max(pos), pos))
    for ai, (a, sa, la, lo_a, hi_a, pa) in enumerate(facts):
        for b, sb, lb, lo_b, hi_b, pb in facts[ai + 1 :]:
            if sa != sb:
                continue
            # same level: interiors disjoint; else no outer variable strictly inside the inner span
            if la == lb:
                cross = not (hi_a <= lo_b or hi_b <= lo_a)
            elif la < lb:
                cross = any(lo_b < p < hi_b for p in pa)
            else:
                cross = any(lo_a < p < hi_a for p in pb)
            if cross:
                ca, cb = inst.clauses[a], inst.clauses[b]
                out.append(EmbeddingViolation(b, "crossing", f"{ca} and {cb} cannot both be drawn on the {sa} side"))
    return out


def occurrence_counts(inst: CnfInstance) -> dict[str, tuple[int, int]]:
    counts = {v: [0, 0] for v in inst.variables}
    for c in inst.clauses:
        for v, s in c.literals:
            counts[v][0 if s else 1] += 1
    return {v: (p, n) for v, (p, n) in counts.items()}


def is_bounded(inst: CnfInstance, bound: int = 3) -> bool:
    return all(p <= bound and n <= bound for p, n in occurrence_counts(inst).values())


def assign_levels(variables: Sequence[str], clauses: Sequence[Clause]) -> CnfInstance:
    """Give each clause its nesting depth on its side (ignores given levels)."""
    base = CnfInstance(tuple(variables), tuple(clauses))
    spans = [base.span(c) for c in clauses]
    out = []
    for i, c in enumerate(clauses):
        lo, hi = spans[i]
        depth = 0
        for j, d in enumerate(clauses):
            if j == i or d.sign != c.sign:
                continue
            dl, dh = spans[j]
            if dl <= lo and hi <= dh and ((dl, dh) != (lo, hi) or j < i):
                depth += 1
        out.append(Clause(c.literals, depth))
    return CnfInstance(tuple(variables), tuple(out))


def slot_order(inst: CnfInstance, var: str, sign: str) -> list[int]:
    """Clause indices touching ``var`` on one side, in left-to-right leg order."""
    idx = inst.index
    p = idx[var]
    left, middle, right = [], [], []
    for i, c in enumerate(inst.clauses):
        if c.sign != sign or var not in c.variables:
            continue
        lo, hi = inst.span(c)
        if lo == hi or lo < p < hi:
            middle.append(i)
        elif p == hi:
            left.append(i)
        else:
            right.append(i)
    left.sort(key=lambda i: (-inst.clauses[i].level, i))
    middle.sort(key=lambda i: (inst.clauses[i].level, i))
    right.sort(key=lambda i: (inst.clauses[i].level, i))
    return left + middle + right


def reduce_degree(inst: CnfInstance) -> BoundedInstance:
    """Replace every variable by an alternating inequality chain.

    A variable with k occurrences becomes x_1T, x_1F, ..., x_kT, x_kF with
    x_iT != x_iF and x_iF != x_(i+1)T, each inequality written as one
    positive and one negative 2-clause. Occurrence i uses x_iT with the
    original clause's sign.
    """
    problems = validate_embedding(inst)
    if problems:
        raise EmbeddingError(problems)
    new_lits: list[list] = [list(c.literals) for c in inst.clauses]
    mapping: dict[str, tuple[str, ...]] = {}
    chain_vars: list[str] = []
    bind: list[tuple[str, str]] = []
    for x in inst.variables:
        occ = slot_order(inst, x, POS) + slot_order(inst, x, NEG)
        k = max(1, len(occ))
        chain = []
        for i in range(1, k + 1):
            chain += [f"{x}_{i}T", f"{x}_{i}F"]
        mapping[x] = tuple(chain)
        chain_vars += chain
        for a, b in zip(chain, chain[1:]):
            bind.append((a, b))
        for i, ci in enumerate(occ):
            lits = new_lits[ci]
            j = next(n for n, (v, _) in enumerate(lits) if v == x)
            lits[j] = (f"{x}_{i + 1}T", lits[j][1])
    depth = 1 + max((c.level for c in inst.clauses), default=-1)
    clauses = [Clause(tuple(l), c.level) for l, c in zip(new_lits, inst.clauses)]
    for a, b in bind:
        clauses.append(Clause.pos(a, b, level=depth))
        clauses.append(Clause.neg(a, b, level=depth))
    return BoundedInstance(tuple(chain_vars), tuple(clauses), mapping)


def evaluate(inst: CnfInstance, assignment: dict[str, bool]) -> bool:
    return all(any(assignment[v] == s for v, s in c.literals) for c in inst.clauses)


def brute_force_sat(inst: CnfInstance, max_vars: Optional[int] = 24) -> Optional[dict[str, bool]]:
    """Lexicographically first satisfying assignment (False < True), else None.

    Exhaustive depth-first enumeration in variable order; a branch is cut
    only once some clause has all of its variables assigned and is false.
    """
    n = len(inst.variables)
    if max_vars is not None and n > max_vars:
        raise TooLarge(f"{n} variables exceeds cap {max_vars}")
    idx = inst.index
    # clauses become checkable once their last variable is assigned
    due: list[list[tuple]] = [[] for _ in range(n)]
    for c in inst.clauses:
        last = max(idx[v] for v in c.variables)
        due[last].append(tuple((idx[v], s) for v, s in c.literals))
    values = [False] * n

    def go(i: int) -> bool:
        if i == n:
            return True
        for val in (False, True):
            values[i] = val
            if all(any(values[j] == s for j, s in lits) for lits in due[i]) and go(i + 1):
                return True
        return False

    if not all(c.literals for c in inst.clauses):
        return None
    if go(0):
        return dict(zip(inst.variables, values))
    return None


def lift_assignment(mapping: dict[str, tuple[str, ...]], assignment: dict[str, bool]) -> dict[str, bool]:
    out = {}
    for x, chain in mapping.items():
        trues = {assignment[v] for v in chain[0::2]}
        if len(trues) != 1:
            raise InconsistentChain(f"{x}: replacement variables disagree")
        out[x] = trues.pop()
    return out


def spread_assignment(mapping: dict[str, tuple[str, ...]], assignment: dict[str, bool]) -> dict[str, bool]:
    """Inverse of :func:`lift_assignment`: x_iT copies x, x_iF negates it."""
    out = {}
    for x, chain in mapping.items():
        for i, v in enumerate(chain):
            out[v] = assignment[x] if i % 2 == 0 else not assignment[x]
    return out


def worked_phi() -> CnfInstance:
    """The seven-clause worked example over v1..v7."""
    v = [f"v{i}" for i in range(1, 8)]
    return CnfInstance(
        tuple(v),
        (
            Clause.pos("v1", "v2", "v4", level=1),
            Clause.pos("v4", "v6", "v7", level=1),
            Clause.pos("v1", "v4", "v7", level=0),
            Clause.neg("v1", "v6", "v7", level=0),
            Clause.neg("v1", "v2", "v6", level=1),
            Clause.neg("v2", "v3", "v5", level=2),
            Clause.neg("v3", "v4", "v5", level=3),
        ),
    )


# -- .cnfp text format -------------------------------------------------------

def emit_cnf(inst: CnfInstance) -> str:
    lines = [f"CNFP 1 {len(inst.variables)}", " ".join(inst.variables)]
    for c in inst.clauses:
        lines.append(f"{c.sign} level={c.level} " + " ".join(c.variables))
    return "\n".join(lines) + "\n"


def parse_cnf(text: str) -> CnfInstance:
    from .formats import FormatError

    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError("empty cnf file", 1)
    head = lines[0].split(" ")
    if len(head) != 3 or head[0] != "CNFP" or head[1] != "1" or not head[2].isdigit():
        raise FormatError("header must be 'CNFP 1 <num_vars>'", 1)
    if len(lines) < 2:
        raise FormatError("missing variable order line", 2)
    names = tuple(lines[1].split(" ")) if lines[1] else ()
    if len(names) != int(head[2]):
        raise FormatError(f"expected {head[2]} variables, found {len(names)}", 2)
    clauses = []
    for n, line in enumerate(lines[2:], start=3):
        tok = line.split(" ")
        if len(tok) < 3 or tok[0] not in (POS, NEG) or not tok[1].startswith("level="):
            raise FormatError("clause line must be '<POS|NEG> level=<n> <var> ...'", n)
        try:
            level = int(tok[1][len("level="):])
        except ValueError:
            raise FormatError(f"bad level {tok[1]!r}", n) from None
        positive = tok[0] == POS
        clauses.append(Clause(tuple((v, positive) for v in tok[2:]), level))
    return CnfInstance(names, tuple(clauses))
