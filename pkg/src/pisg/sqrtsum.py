"""Three-player cyclic games with irrational equilibria, and SqrtSum.

``G(a)`` is a cycle ``s1 -> s2 -> s3 -> s1``; in ``s_j`` player ``j`` either
continues (action ``0``) or stops (action ``1``), which ends play in a
zero-reward absorbing state after paying the stop rewards.  Its unique
stationary equilibrium continues with probability ``xStar`` in ``Q(sqrt a)``.

Adding a fourth player who collects 1, 2 or 4 on the three stop actions,
and a hub state where that player picks between entering a weighted mix of
gadgets and a fixed reward ``r0``, turns the comparison of a sum of square
roots with an integer into player 4's equilibrium choice.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .equilibrium import evaluate_payoffs, verify_epsilon_nash
from .game import Action, State, StochasticGame
from .numeric import QuadExt, RationalInterval, Sign, is_perfect_square, quad_sign, sqrt_enclosure

GAMMA = Fraction(1, 2)
PLAYER4_REWARDS = (Fraction(1), Fraction(2), Fraction(4))
ABSORB = "absorb"


class Comparison(enum.Enum):
    LESS = "LESS"
    EQUAL = "EQUAL"
    GREATER = "GREATER"


class EqualInstance(ValueError):
    """The radical sum equals ``t`` exactly; the reduction does not apply."""


# ---------------------------------------------------------------------------
# The gadget G(a)


def ga_constants(a: int) -> tuple[Fraction, Fraction]:
    if a < 1:
        raise ValueError("a must be a positive integer")
    k = Fraction(162, 7) * a
    return 22 - k, k - 13


def stop_rewards(j: int, low, high) -> list:
    """Reward vector (players 1..3) when player ``j`` (0-based) stops."""
    out = [None] * 3
    out[j] = Fraction(1)
    out[(j + 1) % 3] = 4 * low
    out[(j + 2) % 3] = 2 * high
    return out


def _gadget_states(a: int, prefix: str, players: int, p4_sign: int) -> list[State]:
    low, high = ga_constants(a)
    ids = [f"{prefix}s{j + 1}" for j in range(3)]
    states = []
    for j in range(3):
        rewards = stop_rewards(j, low, high)
        if players == 4:
            rewards.append(p4_sign * PLAYER4_REWARDS[j])
        cont = Action("0", (Fraction(0),) * players, ((ids[(j + 1) % 3], Fraction(1)),))
        stop = Action("1", tuple(rewards), ((ABSORB, Fraction(1)),))
        states.append(State(ids[j], j, (cont, stop)))
    return states


def _absorbing(players: int) -> State:
    return State(ABSORB, 0, (Action("0", (Fraction(0),) * players, ((ABSORB, Fraction(1)),)),))


def closed_form_x(a: int) -> QuadExt:
    """Equilibrium probability of continuing, as an element of ``Q(sqrt a)``."""
    low, _ = ga_constants(a)
    x = QuadExt(a, 35 - Fraction(324, 7) * a, 9) / (2 * (low - Fraction(1, 8)))
    return QuadExt(a, x.rational_value()) if x.is_rational() else x


@dataclass(frozen=True)
class GaGadget:
    a: int
    L: Fraction
    H: Fraction
    game: StochasticGame
    x_star: QuadExt

    def profile(self, x=None):
        """Stationary profile continuing with probability ``x`` at every ``s_j``."""
        x = self.x_star if x is None else x
        rows = [(x, 1 - x) for _ in range(3)]
        rows += [(Fraction(1),)] * (len(self.game.states) - 3)
        return tuple(rows)


def build_Ga(a: int, player4: bool = False, negated: bool = False) -> GaGadget:
    """``G(a)``; with ``player4`` the four-player variant (rewards 1, 2, 4)."""
    low, high = ga_constants(a)
    players = 4 if player4 else 3
    states = _gadget_states(a, "", players, -1 if negated else 1) + [_absorbing(players)]
    return GaGadget(a, low, high, StochasticGame(players, GAMMA, tuple(states)), closed_form_x(a))


@dataclass(frozen=True)
class GaCertificate:
    x_star: QuadExt
    indifference: bool
    in_unit_interval: bool
    discriminant: Fraction
    discriminant_ok: bool
    companion_root: QuadExt
    companion_outside: bool
    quadratic_root: bool
    g0_negative: bool
    g1_positive: bool

    @property
    def ok(self) -> bool:
        return all((self.indifference, self.in_unit_interval, self.discriminant_ok, self.companion_outside,
                    self.quadratic_root, self.g0_negative, self.g1_positive))


def _quadratic(g: GaGadget):
    """Coefficients of ``(L - 1/8) x^2 + (H - L) x + (1 - H)``."""
    return g.L - Fraction(1, 8), g.H - g.L, 1 - g.H


def closed_form_equilibrium(g: GaGadget) -> GaCertificate:
    x = g.x_star
    qa, qb, qc = _quadratic(g)
    disc = qb * qb - 4 * qa * qc
    lhs = 1 - Fraction(1, 8) * x * x
    rhs = (1 - x) * g.H + x * (1 - x) * g.L
    companion = QuadExt(g.a, 35 - Fraction(324, 7) * g.a, -9) / (2 * qa)
    return GaCertificate(
        x_star=x,
        indifference=lhs == rhs,
        in_unit_interval=quad_sign(x) is Sign.POS and quad_sign(1 - x) is Sign.POS,
        discriminant=disc,
        discriminant_ok=disc == 81 * g.a,
        companion_root=companion,
        companion_outside=not (0 < companion < 1),
        quadratic_root=quad_sign(qa * x * x + qb * x + qc) is Sign.ZERO,
        g0_negative=qc < 0,
        g1_positive=qa + qb + qc > 0,
    )


@dataclass(frozen=True)
class PureRejection:
    choice: tuple  # action per s1, s2, s3
    player: int  # 0-based player with a profitable deviation
    state: int
    gain: Fraction


def check_no_pure_equilibrium(g: GaGadget) -> list[PureRejection]:
    """For each of the 8 pure profiles, a player with a strictly positive gain.

    Raises ``AssertionError`` if some pure profile turns out to be Nash.
    """
    out = []
    for choice in itertools.product((0, 1), repeat=3):
        rows = [tuple(Fraction(int(b == c)) for b in (0, 1)) for c in choice]
        rows += [(Fraction(1),)] * (len(g.game.states) - 3)
        report = verify_epsilon_nash(g.game, tuple(rows), 0)
        if report.ok:
            raise AssertionError(f"pure profile {choice} is an equilibrium of G({g.a})")
        player, state = max(
            ((i, s) for i in range(len(report.gaps)) for s in range(len(report.gaps[i]))),
            key=lambda ps: report.gaps[ps[0]][ps[1]],
        )
        out.append(PureRejection(choice, player, state, report.gaps[player][state]))
    return out


# ---------------------------------------------------------------------------
# Player 4


def player4_valuation(a: int) -> QuadExt:
    x = closed_form_x(a)
    x3 = x**3
    return (8 - 8 * x3) / (8 - x3)


def player4_payoff(a: int) -> tuple[Fraction, Fraction, bool]:
    """``(p, q, negated)`` with ``q > 0``.

    Player 4's payoff from ``s1`` is ``(p + q sqrt a) / 2`` in the gadget,
    with player 4's rewards negated when ``negated`` is true.
    """
    v = player4_valuation(a)
    if is_perfect_square(a):
        p, q = Fraction(0), v.rational_value() / math.isqrt(a)
    else:
        # arithmetic already runs in Q(sqrt a); for a = b^2 d this is the
        # Q(sqrt d) coordinate q' rescaled to q'/b
        p, q = v.p, v.q
    if q == 0:
        raise AssertionError(f"player 4 payoff for a={a} has no radical part")
    if q < 0:
        return -p, -q, True
    return p, q, False


# ---------------------------------------------------------------------------
# Sum of square roots


@dataclass(frozen=True)
class SqrtSumInstance:
    a: tuple
    t: int

    def __post_init__(self):
        if not self.a:
            raise ValueError("need at least one radicand")
        if any(int(x) != x or x < 1 for x in self.a) or int(self.t) != self.t or self.t < 1:
            raise ValueError("radicands and t must be positive integers")


def merge_radicals(terms: Sequence[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    """Combine ``c_i sqrt(r_i) + c_j sqrt(r_j)`` while some ``r_i r_j`` is a square.

    The result has pairwise independent radicals over the rationals.
    """
    terms = [(int(r), Fraction(c)) for r, c in terms]
    merged = True
    while merged:
        merged = False
        for i, j in itertools.combinations(range(len(terms)), 2):
            (ri, ci), (rj, cj) = terms[i], terms[j]
            if is_perfect_square(ri * rj):
                terms[i] = (ri, ci + math.isqrt(ri * rj) * cj / ri)
                del terms[j]
                merged = True
                break
    return terms


def _radical_interval(terms, eps: Fraction) -> RationalInterval:
    total = RationalInterval.point(0)
    for r, c in terms:
        if c:
            total = total + sqrt_enclosure(r, eps / (abs(c) * len(terms))).scale(c)
    return total


def sign_of_radical_sum(terms) -> Sign:
    """Exact sign of ``sum c_i sqrt(r_i)``."""
    merged = merge_radicals(terms)
    if all(c == 0 for _, c in merged):
        return Sign.ZERO
    eps = Fraction(1, 1024)
    while True:
        s = _radical_interval(merged, eps).sign()
        if s is not None and s is not Sign.ZERO:
            return s
        eps /= 2


_BY_SIGN = {Sign.NEG: Comparison.LESS, Sign.ZERO: Comparison.EQUAL, Sign.POS: Comparison.GREATER}


def radical_sum_compare(inst: SqrtSumInstance) -> Comparison:
    """Compare ``sum sqrt(a_i)`` with ``t``."""
    return _BY_SIGN[sign_of_radical_sum([(x, 1) for x in inst.a] + [(1, -inst.t)])]


@dataclass(frozen=True)
class SqrtSumGame:
    instance: SqrtSumInstance
    game: StochasticGame
    per_gadget: tuple  # (p_i, q_i, negated_i)
    c: tuple
    r0: Fraction
    C: Fraction
    D: Fraction

    @property
    def hub(self) -> str:
        return "s4"


def gadget_prefix(i: int) -> str:
    return f"g{i + 1}."


def build_sqrtsum_game(inst: SqrtSumInstance) -> SqrtSumGame:
    if radical_sum_compare(inst) is Comparison.EQUAL:
        raise EqualInstance(f"sum of sqrt{list(inst.a)} equals {inst.t}")
    per = tuple(player4_payoff(x) for x in inst.a)
    big_c = math.prod((q for _, q, _ in per), start=Fraction(1))
    d = [big_c / q for _, q, _ in per]
    big_d = sum(d)
    c = tuple(di / big_d for di in d)
    r0 = sum((ci * p for ci, (p, _, _) in zip(c, per)), Fraction(0)) / 2 + big_c / big_d * inst.t / 2

    zero = (Fraction(0),) * 4
    entry = {}
    for i, ci in enumerate(c):
        key = gadget_prefix(i) + "s1"
        entry[key] = entry.get(key, Fraction(0)) + ci
    hub = State("s4", 3, (
        Action("0", zero, tuple(sorted(entry.items()))),
        Action("1", (Fraction(0),) * 3 + (r0,), ((ABSORB, Fraction(1)),)),
    ))
    states = [hub]
    for i, (x, (_, _, neg)) in enumerate(zip(inst.a, per)):
        states += _gadget_states(x, gadget_prefix(i), 4, -1 if neg else 1)
    states.append(_absorbing(4))
    game = StochasticGame(4, GAMMA, tuple(states))
    return SqrtSumGame(inst, game, per, c, r0, big_c, big_d)


def stop_value(sg: SqrtSumGame) -> Fraction:
    """``V1``: player 4's payoff from the hub when stopping there."""
    rows = [(Fraction(0), Fraction(1))] + [(Fraction(1), Fraction(0))] * (len(sg.game.states) - 2)
    rows.append((Fraction(1),))
    return evaluate_payoffs(sg.game, tuple(rows))[3][0]


@dataclass(frozen=True)
class SqrtSumDecision:
    result: Comparison
    witness_action: str  # player 4's equilibrium action at the hub
    v1: Fraction
    v0_rational: Fraction
    v0_radicals: tuple  # (a_i, coefficient of sqrt(a_i)) in V0
    identity_ok: bool  # V0 - V1 = (C/D)/4 * (sum sqrt(a_i) - t)
    interval_agrees: bool
    gadgets_certified: bool


def certify_gadget(a: int, negated: bool, p: Fraction, q: Fraction) -> bool:
    """Player 4's exact payoff from ``s1`` in the gadget equals ``(p + q sqrt a)/2``."""
    g = build_Ga(a, player4=True, negated=negated)
    pay = evaluate_payoffs(g.game, g.profile())[3][0]
    return pay == QuadExt(a, p, q) / 2


def decide_sqrtsum(inst: SqrtSumInstance, certify: bool = True) -> SqrtSumDecision:
    """Decide ``sum sqrt(a_i)`` vs ``t`` through player 4's choice at the hub."""
    sg = build_sqrtsum_game(inst)
    v1 = stop_value(sg)
    v0_rat = sum((ci * p for ci, (p, _, _) in zip(sg.c, sg.per_gadget)), Fraction(0)) / 4
    v0_rad = tuple((x, ci * q / 4) for x, ci, (_, q, _) in zip(inst.a, sg.c, sg.per_gadget))
    k = sg.C / sg.D / 4
    identity_ok = (
        v1 == sg.r0 / 2
        and v0_rat - v1 == -k * inst.t
        and all(coef == k for _, coef in v0_rad)
    )
    diff_sign = sign_of_radical_sum(list(v0_rad) + [(1, v0_rat - v1)])
    result = radical_sum_compare(inst)
    gadgets_ok = True
    if certify:
        gadgets_ok = all(certify_gadget(x, neg, p, q) for x, (p, q, neg) in zip(inst.a, sg.per_gadget))
    return SqrtSumDecision(
        result=result,
        witness_action="0" if diff_sign is Sign.POS else "1",
        v1=v1,
        v0_rational=v0_rat,
        v0_radicals=v0_rad,
        identity_ok=identity_ok,
        interval_agrees=_BY_SIGN[diff_sign] is result,
        gadgets_certified=gadgets_ok,
    )
