"""Valuations, best responses and exact Nash certificates.

Valuations here are unnormalized: the induced valuation of a profile solves
``v = r_x + gamma * P_x v``.  Payoffs carry the ``(1 - gamma)`` factor, so
``evaluate_payoffs == (1 - gamma) * induced_valuation``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .game import Profile, StochasticGame, Valuation
from .linalg import solve
from .numeric import Scalar


class Infeasible(ValueError):
    """The valuation is not the valuation of a stationary Nash equilibrium."""


def _averaged_system(game: StochasticGame, profile: Profile):
    """Profile-averaged reward rows ``r[k][i]`` and the matrix ``I - gamma*P``."""
    n, size, gamma = game.num_players, len(game.states), game.discount
    lhs = [[Fraction(int(k == l)) for l in range(size)] for k in range(size)]
    rhs = []
    for k, s in enumerate(game.states):
        row = [Fraction(0)] * n
        for a, (act, x) in enumerate(zip(s.actions, profile[k])):
            if x == 0:
                continue
            for i in range(n):
                row[i] = row[i] + x * act.rewards[i]
            for l, p in game.successors[k][a]:
                lhs[k][l] = lhs[k][l] - gamma * x * p
        rhs.append(row)
    return lhs, rhs


def induced_valuation(game: StochasticGame, profile: Profile) -> Valuation:
    """The unique valuation that is its own update under ``profile``."""
    lhs, rhs = _averaged_system(game, profile)
    sol = solve(lhs, rhs)
    return tuple(tuple(sol[k][i] for k in range(len(game.states))) for i in range(game.num_players))


def evaluate_payoffs(game: StochasticGame, profile: Profile) -> Valuation:
    """Normalized discounted payoff of every player from every start state."""
    scale = 1 - game.discount
    return tuple(tuple(scale * v for v in row) for row in induced_valuation(game, profile))


def action_valuations(game: StochasticGame, valuation: Valuation) -> list[list[tuple]]:
    """``out[k][a][i] = r^i_{ka} + gamma * sum_l p^{kl}_a v^i_l``."""
    gamma, n = game.discount, game.num_players
    out = []
    for k, s in enumerate(game.states):
        per_action = []
        for a, act in enumerate(s.actions):
            vals = []
            for i in range(n):
                cont = sum((p * valuation[i][l] for l, p in game.successors[k][a]), Fraction(0))
                vals.append(act.rewards[i] + gamma * cont)
            per_action.append(tuple(vals))
        out.append(per_action)
    return out


def updated_valuation(game: StochasticGame, valuation: Valuation, profile: Profile) -> Valuation:
    """Controller rows take the max action valuation, other rows the profile average."""
    av = action_valuations(game, valuation)
    n = game.num_players
    rows = [[None] * len(game.states) for _ in range(n)]
    for k, s in enumerate(game.states):
        for i in range(n):
            if i == s.controller:
                rows[i][k] = max(v[i] for v in av[k])
            else:
                rows[i][k] = sum((x * v[i] for x, v in zip(profile[k], av[k]) if x != 0), Fraction(0))
    return tuple(tuple(r) for r in rows)


@dataclass(frozen=True)
class BestResponse:
    player: int
    values: tuple  # normalized optimal payoff per start state
    choices: dict  # state index -> action index, over the player's own states


def best_response(game: StochasticGame, profile: Profile, player: int) -> BestResponse:
    """Optimal pure stationary deviation of ``player`` against ``profile``.

    Policy iteration on the induced MDP: exact evaluation by a linear solve,
    switching only on strict improvement (lowest index among the maximizers),
    so the loop terminates after finitely many policies.
    """
    own = game.states_of(player)
    choices = {k: max(range(len(game.states[k].actions)), key=lambda a: profile[k][a]) for k in own}
    while True:
        trial = list(profile)
        for k, a in choices.items():
            trial[k] = tuple(Fraction(int(b == a)) for b in range(len(game.states[k].actions)))
        lhs, rhs = _averaged_system(game, tuple(trial))
        v = [row[0] for row in solve(lhs, [[r[player]] for r in rhs])]
        changed = False
        for k in own:
            q = []
            for a, act in enumerate(game.states[k].actions):
                cont = sum((p * v[l] for l, p in game.successors[k][a]), Fraction(0))
                q.append(act.rewards[player] + game.discount * cont)
            best = max(q)
            if q[choices[k]] < best:
                choices[k] = next(a for a, val in enumerate(q) if val == best)
                changed = True
        if not changed:
            scale = 1 - game.discount
            return BestResponse(player, tuple(scale * x for x in v), dict(choices))


@dataclass(frozen=True)
class NashReport:
    gaps: tuple  # gaps[i][s] = best-response payoff - profile payoff
    max_gap: Scalar
    best_responses: tuple
    payoffs: Valuation
    eps: Scalar
    ok: bool


def verify_epsilon_nash(game: StochasticGame, profile: Profile, eps: Scalar = 0) -> NashReport:
    """Exact deviation gaps for every player and every start state."""
    payoffs = evaluate_payoffs(game, profile)
    brs, gaps = [], []
    for i in range(game.num_players):
        br = best_response(game, profile, i)
        brs.append(br)
        gaps.append(tuple(b - v for b, v in zip(br.values, payoffs[i])))
    max_gap = max((g for row in gaps for g in row), default=Fraction(0))
    return NashReport(tuple(gaps), max_gap, tuple(brs), payoffs, eps, max_gap <= eps)


def one_step_optimal_check(game: StochasticGame, valuation: Valuation, profile: Profile):
    """Return ``(ok, violations)``; a violation is a played non-maximizing (state, action)."""
    av = action_valuations(game, valuation)
    bad = []
    for k, s in enumerate(game.states):
        c = s.controller
        best = max(v[c] for v in av[k])
        for a, x in enumerate(profile[k]):
            if x > 0 and av[k][a][c] != best:
                bad.append((k, a))
    return not bad, bad


def recover_profile(game: StochasticGame, valuation: Valuation, tol: Scalar = 0) -> Profile:
    """Two-player profile inducing ``valuation`` and one-step optimal for it.

    Per state the controller mixes the two extreme actions (w.r.t. the
    opponent's action valuations) of its argmax set.  ``tol`` widens the
    argmax set and the feasibility checks; with ``tol == 0`` everything is
    exact.  Raises :class:`Infeasible` if no such profile exists.
    """
    if game.num_players != 2:
        raise ValueError("profile recovery is defined for two-player games")
    av = action_valuations(game, valuation)
    rows = []
    for k, s in enumerate(game.states):
        c, o = s.controller, 1 - s.controller
        own = [v[c] for v in av[k]]
        best = max(own)
        if abs(valuation[c][k] - best) > tol:
            raise Infeasible(f"state {s.id!r}: controller value is not the max action valuation")
        support = [a for a, v in enumerate(own) if v >= best - tol]
        lo = min(support, key=lambda a: av[k][a][o])
        hi = max(support, key=lambda a: av[k][a][o])
        lo_v, hi_v, target = av[k][lo][o], av[k][hi][o], valuation[o][k]
        if target < lo_v - tol or target > hi_v + tol:
            raise Infeasible(f"state {s.id!r}: opponent value outside the argmax range")
        dist = [Fraction(0)] * len(s.actions)
        if hi_v == lo_v or target <= lo_v:
            dist[lo] = Fraction(1)
        elif target >= hi_v:
            dist[hi] = Fraction(1)
        else:
            w = (target - lo_v) / (hi_v - lo_v)
            dist[hi], dist[lo] = w, 1 - w
        rows.append(tuple(dist))
    return tuple(rows)
