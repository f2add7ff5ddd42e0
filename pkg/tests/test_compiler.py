import pytest

from fesim.compiler import (
    AssignmentUnsatisfying,
    check_cycle_free,
    check_layout,
    compile_instance,
    layout_report,
    stat_table,
    synthesize_witness,
)
from fesim.engine import replay
from fesim.model import GridMap, Outcome
from fesim.sat import Clause, CnfInstance, EmbeddingError, reduce_degree, worked_phi


def single(sign=True):
    return CnfInstance(("v1",), ((Clause.pos if sign else Clause.neg)("v1"),))


def test_single_clause_stage():
    spec, layout = compile_instance(single())
    g = layout.variables["v1"]
    assert len(g.snipers) == 11
    assert check_layout(spec, layout) == []
    clause = next(t for t in spec.roster if t.uid == layout.clauses[0].unit)
    assert clause.start_hp == 1
    assert spec.grid.throne == layout.throne


def test_stats_depend_on_counters():
    on, off = stat_table(True), stat_table(False)
    assert (on.variable.hp_max, on.sniper.atk) == (4, 5)
    assert (off.variable.hp_max, off.sniper.atk) == (7, 8)
    assert on.clause == off.clause and on.literal == off.literal
    assert stat_table(durability=4).lord.durability == 4


@pytest.mark.parametrize("sign, value", [(True, True), (False, False)])
@pytest.mark.parametrize("counters", [True, False])
def test_witness_wins(sign, value, counters):
    inst = single(sign)
    spec, layout = compile_instance(inst, counters)
    script = synthesize_witness(inst, spec, layout, {"v1": value})
    res = replay(spec, script)
    assert res.outcome is Outcome.WIN
    assert spec.round_budget is None or res.final.round <= spec.round_budget


def test_unsatisfying_assignment_rejected():
    inst = single(True)
    spec, layout = compile_instance(inst)
    with pytest.raises(AssignmentUnsatisfying):
        synthesize_witness(inst, spec, layout, {"v1": False})
    with pytest.raises(AssignmentUnsatisfying):
        synthesize_witness(inst, spec, layout, {})


def test_unbounded_instance_rejected():
    with pytest.raises(ValueError):
        compile_instance(CnfInstance(("x",), tuple(Clause.pos("x", level=i) for i in range(4))))
    with pytest.raises(EmbeddingError):
        compile_instance(CnfInstance(("a", "b", "c", "d"), (Clause.pos("a", "c"), Clause.pos("b", "d"))))


def test_reduced_worked_example():
    red = reduce_degree(worked_phi())
    spec, layout = compile_instance(red)
    assert check_layout(spec, layout) == []
    ok, cycle = check_cycle_free(spec.grid)
    assert ok and cycle is None
    assert "v1_1T" in layout_report(layout)


def test_cycle_detection():
    assert check_cycle_free(GridMap((".....",))) == (True, None)
    ok, cycle = check_cycle_free(GridMap(("..", "..")))
    assert not ok and len(cycle) == 4
    assert check_cycle_free(GridMap(("...", ".#.", "...")))[0] is False
