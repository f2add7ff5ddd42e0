import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fesim.engine import (
    IllegalMove,
    NoWeapon,
    OutOfRange,
    TargetInvalid,
    WrongPhase,
    apply_player_action,
    end_player_turn,
    replay,
    resolve_combat,
    run_enemy_turn,
)
from fesim.model import Action, Behavior, GameState, Heal, Outcome, Phase, Position
from fesim.solver import unit_actions
from helpers import E, P, lord, stage, start, unit


def test_lord_on_throne_wins():
    s = start("...", lord(0, 0), throne=(2, 0))
    s2, _ = apply_player_action(s, Action("Lord", (Position(1, 0), Position(2, 0))))
    assert s2.outcome is Outcome.WIN


def test_move_longer_than_mov():
    s = start("." * 9, lord(0, 0))
    with pytest.raises(IllegalMove):
        apply_player_action(s, Action("Lord", tuple(Position(x, 0) for x in range(1, 8))))


def test_bad_steps():
    s = start("..#\n...", lord(0, 0), unit("G", E, 0, 1))
    with pytest.raises(IllegalMove):
        apply_player_action(s, Action("Lord", (Position(2, 0),)))
    with pytest.raises(IllegalMove):
        apply_player_action(s, Action("Lord", (Position(1, 0), Position(2, 0))))
    with pytest.raises(IllegalMove):
        apply_player_action(s, Action("Lord", (Position(0, 1),)))


def test_cleric_heal():
    s = start("....", lord(0, 0, start_hp=1), unit("C", P, 2, 0, hp=1, rng=None, heal=Heal(2, 10, 2)))
    s2, _ = apply_player_action(s, Action("C", (), "heal", "Lord"))
    assert s2.by_id["Lord"].hp == 3
    with pytest.raises(OutOfRange):
        apply_player_action(s, Action("C", (Position(1, 0),), "heal", "Lord"))


def test_cleric_cannot_attack():
    s = start("...", lord(0, 0), unit("C", P, 1, 0, rng=None, heal=Heal(1, 1, 1)), unit("G", E, 2, 0))
    with pytest.raises(NoWeapon):
        apply_player_action(s, Action("C", (), "attack", "G"))


def test_double_action_and_phase_errors():
    s = start("...", lord(0, 0))
    s2, _ = apply_player_action(s, Action("Lord"))
    with pytest.raises(Exception):
        apply_player_action(s2, Action("Lord"))
    e = end_player_turn(s)
    assert e.phase is Phase.ENEMY
    with pytest.raises(WrongPhase):
        end_player_turn(e)
    with pytest.raises(WrongPhase):
        run_enemy_turn(s)


def test_literal_against_clause_unit():
    s = start(
        "...",
        unit("C", P, 0, 0, hp=3, atk=2, df=1, rng=(1, 2)),
        unit("L", E, 2, 0, hp=2, atk=2, df=1, rng=(1, 2)),
    )
    s2, rep = resolve_combat(s, "L", "C")
    assert (rep.damage_dealt, rep.countered, rep.counter_damage) == (1, True, 1)
    assert s2.by_id["C"].hp == 2 and s2.by_id["L"].hp == 1
    assert s2.by_id["L"].impatient


def test_no_counter_out_of_range_or_when_disabled():
    s = start("...", unit("A", P, 0, 0, atk=3, rng=(1, 2)), unit("B", E, 2, 0, hp=9, atk=3, rng=(1, 1)))
    _, rep = resolve_combat(s, "A", "B")
    assert not rep.countered
    s = start("..", unit("A", P, 0, 0, atk=3), unit("B", E, 1, 0, hp=9, atk=3), counters=False)
    _, rep = resolve_combat(s, "A", "B")
    assert not rep.countered


def test_durability_spent_on_strikes_and_counters():
    s = start("..", unit("A", P, 0, 0, hp=9, atk=2, dur=1), unit("B", E, 1, 0, hp=9, atk=2, dur=2))
    s2, rep = resolve_combat(s, "A", "B")
    assert rep.countered
    assert s2.by_id["A"].durability_left == 0 and s2.by_id["B"].durability_left == 1
    with pytest.raises(NoWeapon):
        resolve_combat(s2, "A", "B")


def test_attack_ally_rejected():
    s = start("..", lord(0, 0), unit("A", P, 1, 0))
    with pytest.raises(TargetInvalid):
        resolve_combat(s, "Lord", "A")


def test_patient_enemy_out_of_reach_stays():
    # mov 2 + range 2 = 4, player at distance 5
    s = start("." * 6, unit("S", E, 0, 0, mov=2, rng=(1, 2)), lord(5, 0))
    s2, log = run_enemy_turn(end_player_turn(s))
    assert log[0].kind == "stay" and s2.by_id["S"].pos == Position(0, 0)


def test_impatient_enemy_advances_exactly_mov():
    s = start("." * 11, unit("D", E, 0, 0, mov=6, beh=Behavior.IMPATIENT), lord(10, 0))
    s2, log = run_enemy_turn(end_player_turn(s))
    assert log[0].kind == "move" and s2.by_id["D"].pos == Position(6, 0)


def test_enemy_attacks_lowest_defense():
    s = start(
        ".....",
        unit("A", P, 0, 0, df=2),
        unit("S", E, 2, 0, mov=0, rng=(1, 2), atk=5),
        lord(4, 0, df=1, hp=9),
    )
    _, log = run_enemy_turn(end_player_turn(s))
    assert log[0].target == "Lord"


def test_enemy_prefers_cheapest_endpoint():
    s = start("......", lord(0, 0, hp=9), unit("G", E, 5, 0, mov=6, rng=(1, 2)))
    s2, log = run_enemy_turn(end_player_turn(s))
    assert log[0].path[-1] == Position(2, 0) and s2.by_id["G"].pos == Position(2, 0)


def test_clause_battle_script():
    spec = stage(
        "...",
        lord(0, 1 - 1, hp=9, df=9),
        unit("C", P, 1, 0, hp=3, atk=2, df=1, rng=(1, 2)),
        unit("L", E, 2, 0, hp=2, atk=2, df=1, rng=(1, 2), beh=Behavior.PATIENT),
    )
    s = GameState.initial(spec)
    s, _ = apply_player_action(s, Action("C", (), "attack", "L"))
    assert (s.by_id["C"].hp, s.by_id["L"].hp) == (2, 1)
    s, _ = run_enemy_turn(end_player_turn(s))
    # enemy strikes the lowest-defense unit (C) and dies to the counter
    assert "L" not in s.by_id and s.by_id["C"].hp == 1


def test_empty_replay():
    spec = stage("....", lord(0, 0), unit("G", E, 3, 0, mov=0), throne=(1, 0))
    res = replay(spec, ())
    assert res.outcome is Outcome.ONGOING and res.final.round == 1


def test_budget_exhaustion_loses():
    spec = stage("....", lord(0, 0), throne=(3, 0), budget=1)
    res = replay(spec, ((Action("Lord"),),))
    assert res.outcome is Outcome.LOSE


def test_lord_death_loses():
    spec = stage("..", lord(0, 0, hp=1), unit("G", E, 1, 0, atk=5), throne=(1, 0))
    res = replay(spec, ((Action("Lord"),),))
    assert res.outcome is Outcome.LOSE


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_random_play_invariants(seed):
    import random

    from stagegen import random_stage

    rnd = random.Random(seed)
    spec = random_stage(rnd)
    s = GameState.initial(spec)
    for _ in range(4):
        if s.outcome is not Outcome.ONGOING:
            break
        before = {u.uid: u for u in s.units}
        for u in list(s.units):
            if s.side(u.uid) is not P or u.uid not in s.by_id or s.outcome is not Outcome.ONGOING:
                continue
            acts = unit_actions(s, u.uid, skip_idle=False)
            s, _ = apply_player_action(s, rnd.choice(acts))
        if s.outcome is Outcome.ONGOING:
            s, _ = run_enemy_turn(end_player_turn(s))
        for u in s.units:
            tpl = spec.templates[u.uid]
            assert 0 < u.hp <= tpl.attrs.hp_max
            if before.get(u.uid) is not None and before[u.uid].impatient:
                assert u.impatient
            if u.durability_left is not None:
                assert 0 <= u.durability_left <= tpl.attrs.durability
        assert len({u.pos for u in s.units}) == len(s.units)
