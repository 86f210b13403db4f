import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pisg.equilibrium import evaluate_payoffs, verify_epsilon_nash
from pisg.game import validate_game
from pisg.numeric import QuadExt, Sign
from pisg.sqrtsum import (
    ABSORB,
    Comparison,
    EqualInstance,
    SqrtSumInstance,
    build_Ga,
    build_sqrtsum_game,
    check_no_pure_equilibrium,
    closed_form_equilibrium,
    decide_sqrtsum,
    ga_constants,
    merge_radicals,
    player4_payoff,
    player4_valuation,
    radical_sum_compare,
    sign_of_radical_sum,
    stop_value,
)

F = Fraction
A_RANGE = range(1, 11)


def float_payoffs(game, x: float, rounds: int = 400):
    """Plain value iteration in floats for the stationary 'continue w.p. x' profile."""
    gamma = float(game.discount)
    v = {s.id: [0.0] * game.num_players for s in game.states}
    for _ in range(rounds):
        new = {}
        for s in game.states:
            mix = [(x, s.actions[0]), (1 - x, s.actions[1])] if len(s.actions) == 2 else [(1.0, s.actions[0])]
            acc = [0.0] * game.num_players
            for w, act in mix:
                for i in range(game.num_players):
                    acc[i] += w * (float(act.rewards[i]) + gamma * sum(float(p) * v[t][i] for t, p in act.transitions))
            new[s.id] = acc
        v = new
    return {k: [(1 - gamma) * y for y in row] for k, row in v.items()}


def test_constants_a1():
    low, high = ga_constants(1)
    assert (low, high) == (F(-8, 7), F(71, 7))
    assert build_Ga(1).x_star == QuadExt(1, F(64, 71))


def test_a2_closed_form():
    assert build_Ga(2).x_star == QuadExt(2, F(1612, 1367), F(-252, 1367))


@pytest.mark.parametrize("a", A_RANGE)
def test_certificate(a):
    g = build_Ga(a)
    assert validate_game(g.game).ok
    cert = closed_form_equilibrium(g)
    assert cert.ok
    assert cert.discriminant == 81 * a
    assert verify_epsilon_nash(g.game, g.profile(), 0).ok


@pytest.mark.parametrize("a", A_RANGE)
def test_float_oracle_indifference(a):
    g = build_Ga(a)
    x = float(g.x_star)
    low, high = (float(c) for c in ga_constants(a))
    root = (35 - 324 * a / 7 + 9 * math.sqrt(a)) / (2 * (low - 1 / 8))
    assert x == pytest.approx(root, abs=1e-12)
    pay = float_payoffs(g.game, x)
    # each controller is indifferent: stopping pays (1 - gamma) * 1 = 1/2
    for j in range(3):
        assert pay[f"s{j + 1}"][j] == pytest.approx(0.5, abs=1e-9)


@pytest.mark.parametrize("a", A_RANGE)
def test_pure_profiles_rejected(a):
    rejections = check_no_pure_equilibrium(build_Ga(a))
    assert len(rejections) == 8
    assert len({r.choice for r in rejections}) == 8
    assert all(r.gain > 0 for r in rejections)


@pytest.mark.parametrize("a", [1, 2, 3, 4, 8, 9])
def test_player4_payoff_matches_evaluation(a):
    p, q, neg = player4_payoff(a)
    assert q > 0
    g = build_Ga(a, player4=True, negated=neg)
    pay = evaluate_payoffs(g.game, g.profile())[3][0]
    assert pay == QuadExt(a, p, q) / 2
    oracle = float_payoffs(g.game, float(g.x_star))["s1"][3]
    assert float(QuadExt(a, p, q) / 2) == pytest.approx(oracle, abs=1e-9)


def test_player4_a1_value():
    p, q, neg = player4_payoff(1)
    assert (p, q, neg) == (0, F(13681, 46449), False)


def test_a8_rebase_to_sqrt2():
    # redo the closed form directly in Q(sqrt 2) with sqrt 8 = 2 sqrt 2
    low, _ = ga_constants(8)
    x = QuadExt(2, 35 - F(324, 7) * 8, 18) / (2 * (low - F(1, 8)))
    v = (8 - 8 * x**3) / (8 - x**3)
    p, q, neg = player4_payoff(8)
    sign = -1 if neg else 1
    assert (sign * p, sign * q * 2) == (v.p, v.q)
    assert player4_valuation(8).p == v.p


def test_negated_path_flips_rewards():
    p, q, neg = player4_payoff(2)
    plain = build_Ga(2, player4=True, negated=False)
    flipped = build_Ga(2, player4=True, negated=True)
    a = evaluate_payoffs(plain.game, plain.profile())[3][0]
    b = evaluate_payoffs(flipped.game, flipped.profile())[3][0]
    assert a == -b
    assert (b if neg else a) == QuadExt(2, p, q) / 2


def test_merge_radicals():
    assert merge_radicals([(2, 1), (8, 1)]) == [(2, F(3))]
    assert merge_radicals([(3, 1), (12, -2), (5, 1)]) == [(3, F(-3)), (5, F(1))]
    assert merge_radicals([(1, 4), (9, -1)]) == [(1, F(1))]


def test_sign_of_radical_sum():
    assert sign_of_radical_sum([(2, 1), (8, 1), (1, -4)]) is Sign.POS
    assert sign_of_radical_sum([(2, 1), (8, -1), (2, 1)]) is Sign.ZERO
    # sqrt 10 + sqrt 11 - sqrt 42 is tiny but negative
    assert sign_of_radical_sum([(10, 1), (11, 1), (42, -1)]) is Sign.NEG


@pytest.mark.parametrize("a,t,expected,witness", [
    ((2, 8), 4, Comparison.GREATER, "0"),
    ((2, 3), 4, Comparison.LESS, "1"),
    ((9,), 2, Comparison.GREATER, "0"),
])
def test_fixed_decisions(a, t, expected, witness):
    inst = SqrtSumInstance(a, t)
    d = decide_sqrtsum(inst)
    assert d.result is expected is radical_sum_compare(inst)
    assert d.witness_action == witness
    assert d.identity_ok and d.interval_agrees and d.gadgets_certified


def test_equal_instance_rejected():
    inst = SqrtSumInstance((1, 4), 3)
    assert radical_sum_compare(inst) is Comparison.EQUAL
    with pytest.raises(EqualInstance):
        decide_sqrtsum(inst)


def test_instance_validation():
    for a, t in (((), 1), ((0,), 1), ((2,), 0), ((F(1, 2),), 1)):
        with pytest.raises(ValueError):
            SqrtSumInstance(a, t)


def test_game_shape():
    sg = build_sqrtsum_game(SqrtSumInstance((2,), 1))
    assert len(sg.game.states) == 5
    assert sg.game.states[0].id == sg.hub and sg.game.states[0].controller == 3
    assert sg.game.states[-1].id == ABSORB
    assert validate_game(sg.game).ok


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 50), min_size=1, max_size=4), st.integers(1, 30))
def test_hub_coefficients(a, t):
    inst = SqrtSumInstance(tuple(a), t)
    if radical_sum_compare(inst) is Comparison.EQUAL:
        return
    sg = build_sqrtsum_game(inst)
    assert sum(sg.c) == 1
    assert all(0 < c < 1 for c in sg.c) or len(sg.c) == 1
    assert stop_value(sg) == sg.r0 / 2


def test_random_instances_agree():
    rng = random.Random(2024)
    done = 0
    while done < 200:
        inst = SqrtSumInstance(tuple(rng.randint(1, 50) for _ in range(rng.randint(1, 4))), rng.randint(1, 30))
        if radical_sum_compare(inst) is Comparison.EQUAL:
            continue
        d = decide_sqrtsum(inst, certify=False)
        oracle = sum(math.sqrt(x) for x in inst.a) - inst.t
        if abs(oracle) > 1e-9:
            assert (d.result is Comparison.GREATER) == (oracle > 0)
        assert d.identity_ok and d.interval_agrees
        assert d.witness_action == ("0" if d.result is Comparison.GREATER else "1")
        done += 1
