"""Two-player stationary equilibria via the valuation correspondence.

The correspondence maps a valuation to updated valuations: each controller
row takes its max action valuation, and each opponent row picks a value in
the range of the opponent's action valuations over the controller's argmax
set.  Its fixed points are Nash valuations, from which a profile is read off
in closed form.

The pipeline is heuristic in its search and exact in its verdict:

1. damped iteration ``v <- (1 - alpha) v + alpha G(v)`` in binary floating
   point, with the opponent rows realized by the continuous pair step;
2. snapping to nearby simple rationals and recovering a profile;
3. if that profile is not exactly optimal, solving the linear system of the
   support pattern read off the iterate, then (for small games) of every
   pattern;
4. certifying the returned profile by exact best responses.
"""

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .equilibrium import (
    Infeasible,
    action_valuations,
    induced_valuation,
    recover_profile,
    verify_epsilon_nash,
)
from .game import Profile, StochasticGame, Valuation
from .linalg import SingularMatrix, solve_vector
from .numeric import simplest_between
from .selection import select_n, select_pair_step

log = logging.getLogger(__name__)


class NoConvergence(RuntimeError):
    def __init__(self, residual, valuation, iterations):
        super().__init__(f"no convergence after {iterations} iterations (residual {residual:.3e})")
        self.residual = residual
        self.valuation = valuation
        self.iterations = iterations


@dataclass(frozen=True)
class SolverConfig:
    damping: Fraction = Fraction(1, 4)
    max_iters: int = 10**6
    residual_target: Fraction = Fraction(1, 10**9)
    argmax_tol: Fraction = Fraction(1, 10**9)
    rationalize_denom_bound: int = 10**12
    pattern_budget: int = 20000

    def __post_init__(self):
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.argmax_tol < 0 or self.residual_target <= 0:
            raise ValueError("need argmax_tol >= 0 and residual_target > 0")
        if self.pattern_budget < 0:
            raise ValueError("pattern_budget must be non-negative")


@dataclass(frozen=True)
class SolveResult:
    profile: Profile
    valuation: Valuation
    certified_eps: Fraction
    exact: bool
    method: str = ""
    residual: Optional[float] = None
    iterations: int = 0


def _require_two_players(game: StochasticGame):
    if game.num_players != 2:
        raise ValueError("the solver handles two-player games only")


def correspondence_G(game: StochasticGame, valuation: Valuation) -> Valuation:
    """One point of the correspondence, chosen with the keep-earlier tie rule."""
    _require_two_players(game)
    av = action_valuations(game, valuation)
    rows = [[None] * len(game.states) for _ in range(2)]
    for k, s in enumerate(game.states):
        c, o = s.controller, 1 - s.controller
        own = [v[c] for v in av[k]]
        rows[c][k] = max(own)
        rows[o][k] = select_n(own, [v[o] for v in av[k]])
    return tuple(tuple(r) for r in rows)


# ---------------------------------------------------------------------------
# Floating-point iteration


class _FloatGame:
    def __init__(self, game: StochasticGame):
        self.gamma = float(game.discount)
        self.states = []
        for k, s in enumerate(game.states):
            acts = [
                (tuple(float(r) for r in act.rewards), tuple((l, float(p)) for l, p in game.successors[k][a]))
                for a, act in enumerate(s.actions)
            ]
            self.states.append((s.controller, acts))

    def step(self, v, tol):
        """Continuous selection step and the sup-norm residual.

        Opponent rows move by the piecewise-linear pair step between the two
        best actions, anchored at their current value, so mixed equilibria
        are fixed points of a continuous map rather than chattering
        discontinuities.  Actions within ``tol`` of each other count as tied.
        """
        g = self.gamma
        new = [list(v[0]), list(v[1])]
        res = 0.0
        for k, (c, acts) in enumerate(self.states):
            o = 1 - c
            vc, vo = v[c], v[o]
            own, opp = [], []
            for rewards, succ in acts:
                own.append(rewards[c] + g * sum(p * vc[l] for l, p in succ))
                opp.append(rewards[o] + g * sum(p * vo[l] for l, p in succ))
            best = max(own)
            if len(acts) == 1:
                sel = opp[0]
            else:
                a, b = sorted(sorted(range(len(acts)), key=lambda j: (-own[j], j))[:2])
                if abs(own[a] - own[b]) <= tol:
                    sel = min(max(vo[k], min(opp[a], opp[b])), max(opp[a], opp[b]))
                else:
                    sel = select_pair_step(own[a], own[b], opp[a], opp[b], vo[k])
            new[c][k], new[o][k] = best, sel
            res = max(res, abs(best - vc[k]), abs(sel - vo[k]))
        return new, res


def iterate(game: StochasticGame, cfg: SolverConfig = SolverConfig(), start: Optional[Valuation] = None):
    """Damped fixed-point iteration from ``start`` (default zero).

    Returns ``(valuation, residual, iterations)`` with float entries, or
    raises :class:`NoConvergence` after ``cfg.max_iters`` steps.
    """
    _require_two_players(game)
    fg = _FloatGame(game)
    size = len(game.states)
    v = [[0.0] * size, [0.0] * size] if start is None else [[float(x) for x in row] for row in start]
    alpha, target, tol = float(cfg.damping), float(cfg.residual_target), float(cfg.argmax_tol)
    res = float("inf")
    for it in range(1, cfg.max_iters + 1):
        g, res = fg.step(v, tol)
        if res <= target:
            return (tuple(v[0]), tuple(v[1])), res, it
        v = [[(1 - alpha) * x + alpha * y for x, y in zip(v[i], g[i])] for i in range(2)]
    raise NoConvergence(res, (tuple(v[0]), tuple(v[1])), cfg.max_iters)


# ---------------------------------------------------------------------------
# Exact refinement by support patterns


def pattern_options(game: StochasticGame) -> list[list[tuple]]:
    """Per state: each pure action ``(a,)`` and each unordered pair ``(a, b)``."""
    opts = []
    for s in game.states:
        m = len(s.actions)
        opts.append([(a,) for a in range(m)] + list(itertools.combinations(range(m), 2)))
    return opts


def pattern_from_valuation(game: StochasticGame, valuation: Valuation, tol) -> tuple:
    av = action_valuations(game, valuation)
    pattern = []
    for k, s in enumerate(game.states):
        c, o = s.controller, 1 - s.controller
        own = [v[c] for v in av[k]]
        best = max(own)
        support = [a for a, x in enumerate(own) if x >= best - tol]
        lo = min(support, key=lambda a: av[k][a][o])
        hi = max(support, key=lambda a: av[k][a][o])
        target = valuation[o][k]
        if abs(target - av[k][lo][o]) <= tol:
            pattern.append((lo,))
        elif abs(target - av[k][hi][o]) <= tol:
            pattern.append((hi,))
        elif lo == hi:
            pattern.append((lo,))
        else:
            pattern.append(tuple(sorted((lo, hi))))
    return tuple(pattern)


def pattern_neighbours(options: list[list[tuple]], pattern: tuple):
    """Patterns differing from ``pattern`` at exactly one state."""
    for k, opts in enumerate(options):
        for alt in opts:
            if alt != pattern[k]:
                yield pattern[:k] + (alt,) + pattern[k + 1:]


def solve_pattern(game: StochasticGame, pattern) -> Optional[Valuation]:
    """Exact Nash valuation consistent with ``pattern``, or ``None``.

    A pure entry fixes both players' values at the state to that action's
    valuation.  A pair entry makes the controller indifferent between the two
    actions and leaves the opponent's value free within their range.
    """
    _require_two_players(game)
    size, gamma = len(game.states), game.discount
    n_unknowns = 2 * size

    def idx(i, k):
        return i * size + k

    rows, rhs = [], []
    for k, s in enumerate(game.states):
        c, o = s.controller, 1 - s.controller
        a = pattern[k][0]
        for i in ((c, o) if len(pattern[k]) == 1 else (c,)):
            row = [Fraction(0)] * n_unknowns
            row[idx(i, k)] += 1
            for l, p in game.successors[k][a]:
                row[idx(i, l)] -= gamma * p
            rows.append(row)
            rhs.append(s.actions[a].rewards[i])
        if len(pattern[k]) == 2:
            b = pattern[k][1]
            row = [Fraction(0)] * n_unknowns
            for l, p in game.successors[k][a]:
                row[idx(c, l)] += gamma * p
            for l, p in game.successors[k][b]:
                row[idx(c, l)] -= gamma * p
            rows.append(row)
            rhs.append(s.actions[b].rewards[c] - s.actions[a].rewards[c])
    try:
        x = solve_vector(rows, rhs)
    except SingularMatrix:
        return None
    val = (tuple(x[:size]), tuple(x[size:]))
    av = action_valuations(game, val)
    for k, s in enumerate(game.states):
        c, o = s.controller, 1 - s.controller
        if val[c][k] != max(v[c] for v in av[k]):
            return None
        if len(pattern[k]) == 2:
            ya, yb = av[k][pattern[k][0]][o], av[k][pattern[k][1]][o]
            if not min(ya, yb) <= val[o][k] <= max(ya, yb):
                return None
    return val


# ---------------------------------------------------------------------------
# Snapping and certification


def _rationalize(x, tau: Fraction, bound: int) -> Fraction:
    if isinstance(x, Fraction):
        return x
    fx = Fraction(x)
    r = simplest_between(fx - tau, fx + tau)
    if r.denominator > bound:
        r = fx.limit_denominator(bound)
    return r


_GUESS_TOLS = (Fraction(1, 10**6), Fraction(1, 10**4), Fraction(1, 10**3), Fraction(1, 100), Fraction(1, 20))


def _certify(game, profile, method) -> SolveResult:
    report = verify_epsilon_nash(game, profile, 0)
    return SolveResult(profile, induced_valuation(game, profile), report.max_gap, report.max_gap == 0, method)


def _extreme_pair_profile(game: StochasticGame, valuation, tol) -> Profile:
    """Recovery that clamps the opponent target instead of failing."""
    av = action_valuations(game, valuation)
    rows = []
    for k, s in enumerate(game.states):
        c, o = s.controller, 1 - s.controller
        own = [v[c] for v in av[k]]
        best = max(own)
        support = [a for a, x in enumerate(own) if x >= best - tol]
        lo = min(support, key=lambda a: av[k][a][o])
        hi = max(support, key=lambda a: av[k][a][o])
        lo_v, hi_v = av[k][lo][o], av[k][hi][o]
        dist = [Fraction(0)] * len(s.actions)
        if hi_v == lo_v:
            dist[lo] = Fraction(1)
        else:
            w = min(max((valuation[o][k] - lo_v) / (hi_v - lo_v), Fraction(0)), Fraction(1))
            dist[hi] += w
            dist[lo] += 1 - w
        rows.append(tuple(dist))
    return tuple(rows)


def snap_and_certify(game: StochasticGame, valuation: Valuation, cfg: SolverConfig = SolverConfig(),
                     residual: Optional[float] = None) -> SolveResult:
    """Turn an (approximate) valuation into a profile with an exact certificate.

    Always returns a profile; ``exact`` is true iff its certified maximum
    deviation gain is exactly zero.
    """
    _require_two_players(game)
    if residual is None:
        residual = _FloatGame(game).step([[float(x) for x in row] for row in valuation], 0.0)[1]
    tau = Fraction(max(8 * residual / float(cfg.damping * (1 - game.discount)), 1e-12))
    snapped = tuple(tuple(_rationalize(x, tau, cfg.rationalize_denom_bound) for x in row) for row in valuation)
    candidates = []

    try:
        result = _certify(game, recover_profile(game, snapped, cfg.argmax_tol), "snap")
        if result.exact:
            return result
        candidates.append(result)
    except Infeasible as exc:
        log.debug("snapped valuation not recoverable: %s", exc)

    # Breadth-first search over support patterns, seeded by guesses read off
    # the snapped valuation at a ladder of tolerances.  Exhaustive whenever
    # the pattern space fits in the budget.
    options = pattern_options(game)
    queue, seen = deque(), set()
    for tol in sorted({cfg.argmax_tol, *_GUESS_TOLS}):
        guess = pattern_from_valuation(game, snapped, tol)
        if guess not in seen:
            seen.add(guess)
            queue.append((guess, 0))
    solves = 0
    while queue and solves < cfg.pattern_budget:
        pattern, depth = queue.popleft()
        solves += 1
        exact_val = solve_pattern(game, pattern)
        if exact_val is not None:
            result = _certify(game, recover_profile(game, exact_val), "pattern" if depth == 0 else "search")
            if result.exact:
                return result
            candidates.append(result)
        for nb in pattern_neighbours(options, pattern):
            if nb not in seen:
                seen.add(nb)
                queue.append((nb, depth + 1))
    if queue:
        log.info("pattern search stopped after %d solves", solves)

    exact_in = tuple(tuple(Fraction(x) for x in row) for row in valuation)
    candidates.append(_certify(game, _extreme_pair_profile(game, exact_in, cfg.argmax_tol), "fallback"))
    return min(candidates, key=lambda r: r.certified_eps)


def solve2p(game: StochasticGame, cfg: SolverConfig = SolverConfig(),
            start: Optional[Valuation] = None) -> SolveResult:
    """Iterate, then snap and certify.  Non-convergence is not fatal."""
    try:
        valuation, residual, iters = iterate(game, cfg, start)
    except NoConvergence as exc:
        log.info("%s; certifying the last iterate", exc)
        valuation, residual, iters = exc.valuation, exc.residual, exc.iterations
    result = snap_and_certify(game, valuation, cfg, residual)
    return SolveResult(result.profile, result.valuation, result.certified_eps, result.exact,
                       result.method, residual, iters)
