import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import CORPUS
from helpers import absorbing_cycle, random_game, random_valuation
from pisg.equilibrium import (
    action_valuations,
    induced_valuation,
    one_step_optimal_check,
    verify_epsilon_nash,
)
from pisg.game import Action, State, StochasticGame, pure_profile
from pisg.reduction import EPS_THRESHOLD, compile_circuit
from pisg.selection import selection_interval
from pisg.solver2p import (
    NoConvergence,
    SolverConfig,
    correspondence_G,
    iterate,
    pattern_from_valuation,
    pattern_neighbours,
    pattern_options,
    snap_and_certify,
    solve2p,
    solve_pattern,
)

F = Fraction
seeds = st.integers(0, 2**32 - 1)


def strict_game():
    """Player 1 strictly prefers stopping; player 2 strictly prefers continuing."""
    zero = (F(0), F(0))
    return StochasticGame(2, F(1, 2), (
        State("a", 0, (Action("go", zero, (("b", F(1)),)), Action("stop", (F(1), F(0)), (("c1", F(1)),)))),
        State("b", 1, (Action("go", (F(0), F(1)), (("a", F(1)),)), Action("stop", zero, (("c2", F(1)),)))),
    ) + absorbing_cycle().states)


def pennies():
    """A two-state cycle whose unique equilibrium mixes with rational weights."""
    return compile_circuit(CORPUS["NOT-NOT cycle"]).game


def test_fixed_point_of_pure_equilibrium():
    g = strict_game()
    x = pure_profile(g, [1, 0])
    assert verify_epsilon_nash(g, x).ok
    v = induced_valuation(g, x)
    assert correspondence_G(g, v) == v


def test_zero_on_absorbing_cycle():
    g = absorbing_cycle()
    zero = ((F(0), F(0)), (F(0), F(0)))
    assert correspondence_G(g, zero) == zero
    val, res, it = iterate(g)
    assert it == 1 and res == 0


def test_first_step_on_not_gadget():
    g = compile_circuit(CORPUS["single NOT"]).game
    zero = tuple(tuple(F(0) for _ in g.states) for _ in range(2))
    out = correspondence_G(g, zero)
    for k, s in enumerate(g.states):
        c = s.controller
        assert out[c][k] == max(a.rewards[c] for a in s.actions)
    aux = g.index["#aux-NOT-1"]
    assert out[1][aux] == F(2, 3)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_correspondence_rows(seed):
    rng = random.Random(seed)
    g = random_game(rng, states=rng.randint(1, 5))
    v = random_valuation(rng, g)
    out = correspondence_G(g, v)
    av = action_valuations(g, v)
    for k, s in enumerate(g.states):
        c, o = s.controller, 1 - s.controller
        assert out[c][k] == max(a[c] for a in av[k])
        lo, hi = selection_interval([a[c] for a in av[k]], [a[o] for a in av[k]])
        assert lo <= out[o][k] <= hi


def test_strict_game_converges():
    g = strict_game()
    val, res, it = iterate(g)
    assert res <= 1e-9
    exact = induced_valuation(g, pure_profile(g, [1, 0]))
    for row, erow in zip(val, exact):
        for a, b in zip(row, erow):
            assert a == pytest.approx(float(b), abs=1e-8)


def test_not_not_residual():
    val, res, it = iterate(pennies(), SolverConfig(damping=F(1, 4), max_iters=10**5, residual_target=F(1, 10**6)))
    assert res <= 1e-6


def test_no_convergence_reported():
    with pytest.raises(NoConvergence) as info:
        iterate(pennies(), SolverConfig(max_iters=3))
    assert info.value.iterations == 3 and info.value.residual > 0


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(damping=F(0))
    with pytest.raises(ValueError):
        SolverConfig(damping=F(3, 2))
    with pytest.raises(ValueError):
        SolverConfig(residual_target=F(0))


def test_exact_valuation_in_exact_out():
    g = strict_game()
    v = induced_valuation(g, pure_profile(g, [1, 0]))
    res = snap_and_certify(g, v)
    assert res.exact and res.certified_eps == 0


def test_mixed_rational_equilibrium():
    g = pennies()
    res = solve2p(g)
    assert res.exact
    probs = {g.states[k].id: res.profile[k] for k in range(2)}
    # the symmetric equilibrium plays action 1 with probability 3/5 at both nodes
    assert probs == {"u": (F(2, 5), F(3, 5)), "v": (F(2, 5), F(3, 5))}


def test_not_not_loose_target_certified_below_threshold():
    g = pennies()
    cfg = SolverConfig(residual_target=F(1, 10**6))
    val, res, _ = iterate(g, cfg)
    out = snap_and_certify(g, val, cfg)
    assert out.certified_eps < EPS_THRESHOLD


def test_solve_pattern_matches_mixed():
    g = pennies()
    pattern = ((0, 1), (0, 1)) + ((0,),) * 4
    v = solve_pattern(g, pattern)
    assert v is not None
    assert v[0][g.index["u"]] == F(1, 3)
    # a pattern that cannot be an equilibrium (both pure 0) is rejected
    assert solve_pattern(g, ((0,), (0,)) + ((0,),) * 4) is None


def test_pattern_from_valuation():
    g = pennies()
    v = induced_valuation(g, solve2p(g).profile)
    assert pattern_from_valuation(g, v, F(0))[:2] == ((0, 1), (0, 1))


def test_two_player_only():
    from pisg.sqrtsum import build_Ga

    with pytest.raises(ValueError):
        solve2p(build_Ga(1).game)


def test_warm_start():
    g = pennies()
    cold = solve2p(g)
    warm = solve2p(g, start=cold.valuation)
    assert warm.exact and warm.iterations <= 2


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_certificates_reverify(seed):
    rng = random.Random(seed)
    g = random_game(rng, states=rng.randint(1, 5))
    res = solve2p(g, SolverConfig(max_iters=20000))
    report = verify_epsilon_nash(g, res.profile, res.certified_eps)
    assert report.ok and report.max_gap == res.certified_eps
    assert res.exact == (res.certified_eps == 0)
    assert res.exact
    v = induced_valuation(g, res.profile)
    assert one_step_optimal_check(g, v, res.profile)[0]
    av = action_valuations(g, v)
    for k, s in enumerate(g.states):
        c, o = s.controller, 1 - s.controller
        lo, hi = selection_interval([a[c] for a in av[k]], [a[o] for a in av[k]])
        assert lo <= v[o][k] <= hi


def stalled_game():
    rng = random.Random(531)
    return random_game(rng, states=rng.randint(2, 7), max_actions=rng.randint(2, 4))


def test_neighbourhood_search_recovers_stalled_iteration():
    # the float iteration stalls here, and the guessed pattern is one state off
    res = solve2p(stalled_game(), SolverConfig(max_iters=20000))
    assert res.exact and res.method == "search"
    assert verify_epsilon_nash(stalled_game(), res.profile).ok


def test_zero_budget_falls_back():
    game = stalled_game()
    res = solve2p(game, SolverConfig(max_iters=20000, pattern_budget=0))
    assert res.method in ("snap", "fallback")
    assert verify_epsilon_nash(game, res.profile).max_gap == res.certified_eps


def test_neighbours_differ_in_one_state():
    game = stalled_game()
    opts = pattern_options(game)
    base = tuple(o[0] for o in opts)
    nbs = list(pattern_neighbours(opts, base))
    assert len(nbs) == sum(len(o) - 1 for o in opts) == len(set(nbs))
    assert all(sum(a != b for a, b in zip(nb, base)) == 1 for nb in nbs)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([F(0), F(1, 10**6), F(1, 20)]))
def test_guessed_patterns_are_well_formed(seed, tol):
    rng = random.Random(seed)
    game = random_game(rng, states=rng.randint(1, 5))
    pattern = pattern_from_valuation(game, random_valuation(rng, game), tol)
    for entry, opts in zip(pattern, pattern_options(game)):
        assert entry in opts
