"""Perfect-information discounted stochastic games and their file format.

Players are indexed ``0..n-1`` in Python; the JSON format numbers the
controller ``1..n``.  A stationary profile is a tuple with one entry per
state, each entry the tuple of probabilities over that state's actions.
A valuation is indexed ``[player][state]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .numeric import format_rational, parse_rational, scalar_from_json, scalar_to_json

Profile = tuple  # tuple[tuple[Scalar, ...], ...], indexed [state][action]
Valuation = tuple  # tuple[tuple[Scalar, ...], ...], indexed [player][state]


class GameFormatError(ValueError):
    """Malformed game, profile or circuit document."""


@dataclass(frozen=True)
class Action:
    label: str
    rewards: tuple[Fraction, ...]
    transitions: tuple[tuple[str, Fraction], ...]


@dataclass(frozen=True)
class State:
    id: str
    controller: int
    actions: tuple[Action, ...]


@dataclass(frozen=True)
class StochasticGame:
    num_players: int
    discount: Fraction
    states: tuple[State, ...]

    @cached_property
    def index(self) -> dict[str, int]:
        return {s.id: k for k, s in enumerate(self.states)}

    @cached_property
    def successors(self) -> tuple[tuple[tuple[tuple[int, Fraction], ...], ...], ...]:
        """Transitions by state index: ``successors[k][a] = ((l, p), ...)``."""
        return tuple(
            tuple(tuple((self.index[t], p) for t, p in act.transitions) for act in s.actions)
            for s in self.states
        )

    @property
    def rewards_in_unit_interval(self) -> bool:
        return all(0 <= r <= 1 for s in self.states for act in s.actions for r in act.rewards)

    def states_of(self, player: int) -> list[int]:
        return [k for k, s in enumerate(self.states) if s.controller == player]

    def state(self, state_id: str) -> State:
        return self.states[self.index[state_id]]


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    alternating: bool = False
    rewards_in_unit_interval: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_game(game: StochasticGame) -> ValidationReport:
    """Check the structural invariants; problems are returned, never raised."""
    out: list[str] = []
    n = game.num_players
    if n < 1:
        out.append(f"number of players must be >= 1, got {n}")
    if not 0 <= game.discount < 1:
        out.append(f"discount must lie in [0,1), got {format_rational(game.discount)}")
    ids = [s.id for s in game.states]
    if not ids:
        out.append("game has no states")
    seen = set()
    for sid in ids:
        if sid in seen:
            out.append(f"duplicate state id {sid!r}")
        seen.add(sid)
    for s in game.states:
        if not 0 <= s.controller < n:
            out.append(f"state {s.id!r}: controller {s.controller + 1} not in 1..{n}")
        if not s.actions:
            out.append(f"state {s.id!r}: no actions")
        labels = [a.label for a in s.actions]
        if len(set(labels)) != len(labels):
            out.append(f"state {s.id!r}: duplicate action labels")
        for act in s.actions:
            where = f"state {s.id!r} action {act.label!r}"
            if len(act.rewards) != n:
                out.append(f"{where}: {len(act.rewards)} rewards for {n} players")
            mass = Fraction(0)
            for target, p in act.transitions:
                if target not in seen:
                    out.append(f"{where}: unknown transition target {target!r}")
                if p < 0:
                    out.append(f"{where}: negative probability {format_rational(p)}")
                mass += p
            if mass != 1:
                out.append(f"{where}: transition mass {format_rational(mass)} != 1")
    alternating = n == 2 and not out and all(
        game.states[game.index[t]].controller != s.controller
        for s in game.states for act in s.actions for t, p in act.transitions if p > 0
    )
    return ValidationReport(out, alternating, game.rewards_in_unit_interval)


# ---------------------------------------------------------------------------
# Profiles


def validate_profile(game: StochasticGame, profile: Profile) -> list[str]:
    out = []
    if len(profile) != len(game.states):
        return [f"profile covers {len(profile)} states, game has {len(game.states)}"]
    for s, dist in zip(game.states, profile):
        if len(dist) != len(s.actions):
            out.append(f"state {s.id!r}: {len(dist)} probabilities for {len(s.actions)} actions")
            continue
        if any(x < 0 for x in dist):
            out.append(f"state {s.id!r}: negative probability")
        if sum(dist) != 1:
            out.append(f"state {s.id!r}: probabilities do not sum to 1")
    return out


def pure_profile(game: StochasticGame, choice: Sequence[int] | Mapping[int, int] = ()) -> Profile:
    """Pure profile; ``choice`` maps state index to action index (default 0)."""
    if not isinstance(choice, Mapping):
        choice = dict(enumerate(choice))
    rows = []
    for k, s in enumerate(game.states):
        a = choice.get(k, 0)
        rows.append(tuple(Fraction(int(b == a)) for b in range(len(s.actions))))
    return tuple(rows)


# ---------------------------------------------------------------------------
# JSON


def _load(path_or_obj):
    if isinstance(path_or_obj, (dict, list)):
        return path_or_obj
    with open(path_or_obj, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise GameFormatError(f"{path_or_obj}: line {exc.lineno}: {exc.msg}") from None


def _rational_field(obj, where: str) -> Fraction:
    try:
        return parse_rational(obj)
    except (ValueError, ZeroDivisionError) as exc:
        raise GameFormatError(f"{where}: {exc}") from None


def game_from_json(obj) -> StochasticGame:
    """Build a game from a parsed JSON document (no validation)."""
    obj = _load(obj)
    try:
        n = obj["players"]
        gamma = _rational_field(obj["gamma"], "gamma")
        raw_states = obj["states"]
    except (KeyError, TypeError) as exc:
        raise GameFormatError(f"missing top-level field {exc}") from None
    if not isinstance(n, int) or isinstance(n, bool):
        raise GameFormatError("players: expected an integer")
    states = []
    for i, st in enumerate(raw_states):
        where = f"states[{i}]"
        try:
            sid, ctrl, raw_actions = str(st["id"]), st["controller"], st["actions"]
        except (KeyError, TypeError) as exc:
            raise GameFormatError(f"{where}: missing field {exc}") from None
        if not isinstance(ctrl, int) or isinstance(ctrl, bool):
            raise GameFormatError(f"{where}.controller: expected an integer")
        actions = []
        for j, act in enumerate(raw_actions):
            aw = f"{where}.actions[{j}]"
            try:
                rewards = tuple(_rational_field(r, f"{aw}.rewards") for r in act["rewards"])
                trans = tuple(
                    (str(t), _rational_field(p, f"{aw}.transitions[{t!r}]"))
                    for t, p in act["transitions"].items()
                )
                label = str(act.get("label", j))
            except (KeyError, TypeError, AttributeError) as exc:
                raise GameFormatError(f"{aw}: malformed action ({exc})") from None
            actions.append(Action(label, rewards, tuple(sorted(trans))))
        states.append(State(sid, ctrl - 1, tuple(actions)))
    return StochasticGame(n, gamma, tuple(states))


def game_to_json(game: StochasticGame) -> dict:
    return {
        "players": game.num_players,
        "gamma": format_rational(game.discount),
        "states": [
            {
                "id": s.id,
                "controller": s.controller + 1,
                "actions": [
                    {
                        "label": a.label,
                        "rewards": [format_rational(r) for r in a.rewards],
                        "transitions": {t: format_rational(p) for t, p in a.transitions},
                    }
                    for a in s.actions
                ],
            }
            for s in game.states
        ],
    }


def profile_from_json(game: StochasticGame, obj) -> Profile:
    """Parse ``{"stateId": {"label": "num/den"}}``; single-action states may be omitted."""
    obj = _load(obj)
    if not isinstance(obj, dict):
        raise GameFormatError("profile must be a JSON object")
    unknown = set(obj) - set(game.index)
    if unknown:
        raise GameFormatError(f"profile names unknown states {sorted(unknown)}")
    rows = []
    for s in game.states:
        entry = obj.get(s.id)
        if entry is None:
            if len(s.actions) != 1:
                raise GameFormatError(f"profile misses state {s.id!r}")
            rows.append((Fraction(1),))
            continue
        labels = [a.label for a in s.actions]
        bad = set(entry) - set(labels)
        if bad:
            raise GameFormatError(f"state {s.id!r}: unknown action labels {sorted(bad)}")
        try:
            rows.append(tuple(scalar_from_json(entry.get(lab, "0/1")) for lab in labels))
        except (ValueError, ZeroDivisionError) as exc:
            raise GameFormatError(f"state {s.id!r}: {exc}") from None
    return tuple(rows)


def profile_to_json(game: StochasticGame, profile: Profile) -> dict:
    return {
        s.id: {a.label: scalar_to_json(x) for a, x in zip(s.actions, dist)}
        for s, dist in zip(game.states, profile)
    }


def dumps(obj) -> str:
    """Byte-deterministic JSON rendering used for every file we write."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
