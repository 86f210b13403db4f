"""Shared builders for tests."""

import random
from fractions import Fraction

from pisg.game import Action, State, StochasticGame

F = Fraction


def rand_fraction(rng: random.Random, den: int = 12, lo: int = 0, hi: int = 1) -> Fraction:
    return F(rng.randint(lo * den, hi * den), den)


def rand_distribution(rng: random.Random, k: int, den: int = 12) -> tuple:
    cuts = sorted(rng.randint(0, den) for _ in range(k - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return tuple(F(p, den) for p in parts)


def random_game(rng: random.Random, players: int = 2, states: int = 4, max_actions: int = 3,
                gamma: Fraction = F(1, 2)) -> StochasticGame:
    ids = [f"s{k}" for k in range(states)]
    out = []
    for k in range(states):
        actions = []
        for a in range(rng.randint(1, max_actions)):
            targets = rng.sample(ids, rng.randint(1, min(3, states)))
            probs = rand_distribution(rng, len(targets))
            trans = tuple(sorted((t, p) for t, p in zip(targets, probs) if p > 0))
            rewards = tuple(rand_fraction(rng) for _ in range(players))
            actions.append(Action(str(a), rewards, trans))
        out.append(State(ids[k], rng.randrange(players), tuple(actions)))
    return StochasticGame(players, gamma, tuple(out))


def random_profile(rng: random.Random, game: StochasticGame) -> tuple:
    return tuple(rand_distribution(rng, len(s.actions)) for s in game.states)


def random_valuation(rng: random.Random, game: StochasticGame) -> tuple:
    return tuple(tuple(rand_fraction(rng, 7, -2, 2) for _ in game.states) for _ in range(game.num_players))


def absorbing_cycle(players: int = 2) -> StochasticGame:
    zero = (F(0),) * players
    return StochasticGame(players, F(1, 2), (
        State("c1", 0, (Action("0", zero, (("c2", F(1)),)),)),
        State("c2", 1, (Action("0", zero, (("c1", F(1)),)),)),
    ))


def self_loop(reward=1, gamma=F(1, 2)) -> StochasticGame:
    return StochasticGame(1, gamma, (State("s", 0, (Action("0", (F(reward),), (("s", F(1)),)),)),))
