from fesim.model import Attributes, Behavior, GameState, GridMap, Position, Side, StageSpec, UnitTemplate

P, E = Side.PLAYER, Side.ENEMY


def unit(uid, side, x, y, hp=3, atk=1, df=1, mov=6, rng=(1, 1), heal=None, dur=None,
         beh=None, lord=False, start_hp=None):
    if beh is None:
        beh = Behavior.PLAYER if side is P else Behavior.PATIENT
    return UnitTemplate(uid, side, Attributes(hp, atk, df, mov, rng, heal, dur), beh, Position(x, y), lord, start_hp)


def lord(x, y, **kw):
    return unit("Lord", P, x, y, lord=True, **kw)


def stage(rows, *units, throne=None, budget=None, counters=True):
    if isinstance(rows, str):
        rows = tuple(rows.strip().split("\n"))
    t = Position(*throne) if throne is not None else None
    return StageSpec(GridMap(tuple(rows), t), tuple(units), budget, counters)


def start(*args, **kw) -> GameState:
    return GameState.initial(stage(*args, **kw))
