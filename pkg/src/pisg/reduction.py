"""Pure-Circuit to two-player 1/2-discounted alternating games.

Every node becomes a two-action state of the player given by the
bipartition; the controller's action 1 pays the opponent 1.  Gate outputs
route action 0 / action 1 to the gate inputs or to a shared auxiliary state
whose single action pays the opponent a fixed rational reward and then
falls into a zero-reward two-cycle.  A stationary profile is decoded by
thresholding each node's action-1 probability against ``l`` and ``r``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .game import Action, GameFormatError, State, StochasticGame, pure_profile
from .numeric import QuadExt, Scalar, Sign, decimal_str, quad_sign, scalar_from_json, scalar_to_json
from .purecircuit import BOT, PureCircuitInstance, check_assignment, check_bipartite

L_STAR = QuadExt(2, Fraction(1, 6), Fraction(-1, 12))  # (2 - sqrt2)/12
R_STAR = QuadExt(2, Fraction(7, 6), Fraction(-1, 6))  # (7 - sqrt2)/6
M_STAR = (L_STAR + R_STAR) / 2
EPS_THRESHOLD = QuadExt(2, Fraction(3, 288), Fraction(-2, 288))  # (3 - 2 sqrt2)/288
F_MAX = 2 * EPS_THRESHOLD  # (3 - 2 sqrt2)/144

DEFAULT_EPS = Fraction(1, 2048)
KINDS = ("NOT", "OR", "P0", "P1")
DEFAULT_REWARDS = {
    "NOT": Fraction(2, 3),
    "OR": Fraction(43, 100),
    "P0": Fraction(22, 25),
    "P1": Fraction(11, 25),
}
GAMMA = Fraction(1, 2)


class EmptyWindow(ValueError):
    pass


class SolverEpsTooLarge(RuntimeError):
    def __init__(self, certified, target):
        super().__init__(f"certified eps {certified} exceeds target {target}")
        self.certified = certified
        self.target = target


@dataclass(frozen=True)
class Window:
    kind: str
    lo: Scalar
    hi: Scalar
    choice: Fraction

    def contains_strictly(self, x) -> bool:
        return quad_sign(x - self.lo) is Sign.POS and quad_sign(self.hi - x) is Sign.POS


def window_bounds(eps, l=L_STAR, r=R_STAR, m=None) -> dict:
    """Exact endpoints of the admissible auxiliary-reward interval per gate output."""
    m = (l + r) / 2 if m is None else m
    third = Fraction(1, 3)
    by_one_minus_r = 4 * eps / (1 - r)
    by_l = 4 * eps / l
    return {
        "NOT": (l + third + by_one_minus_r, r - by_l),
        "OR": (l + third + by_l, r / 2 - by_one_minus_r),
        "P0": (m + third + by_l, r - by_one_minus_r),
        "P1": (l + third + by_l, m - by_one_minus_r),
    }


def _decimal_pick(lo, hi) -> Fraction:
    mid = (lo + hi) / 2
    scale = 1
    while True:
        num = _round_half_up(mid * scale)
        cand = Fraction(num, scale)
        if quad_sign(cand - lo) is Sign.POS and quad_sign(hi - cand) is Sign.POS:
            return cand
        scale *= 10


def _round_half_up(x) -> int:
    # floor(x + 1/2) for rational or quadratic x
    y = x + Fraction(1, 2)
    n = int(float(y)) - 2
    while quad_sign(y - (n + 1)) is not Sign.NEG:
        n += 1
    return n


def compute_reward_windows(eps=DEFAULT_EPS, l=L_STAR, r=R_STAR, m=None,
                           preferred: Optional[Mapping[str, Fraction]] = None) -> dict[str, Window]:
    """Windows for every auxiliary reward, each with a rational strictly inside.

    The chosen reward is the preferred constant when it lies strictly inside
    the window, else the decimal rounding of the midpoint with the fewest
    digits that does.  Raises :class:`EmptyWindow` when some window has no
    interior, which happens exactly when ``eps`` is too large.
    """
    if quad_sign(eps) is Sign.NEG:
        raise ValueError("eps must be nonnegative")
    preferred = DEFAULT_REWARDS if preferred is None else preferred
    out = {}
    for kind, (lo, hi) in window_bounds(eps, l, r, m).items():
        if quad_sign(hi - lo) is not Sign.POS:
            raise EmptyWindow(f"{kind} window [{lo}, {hi}] has empty interior at eps = {eps}")
        w = Window(kind, lo, hi, Fraction(0))
        pick = preferred.get(kind)
        if pick is None or not w.contains_strictly(pick):
            pick = _decimal_pick(lo, hi)
        out[kind] = Window(kind, lo, hi, Fraction(pick))
    return out


def bound_margin_form(eps, l=L_STAR, r=R_STAR, m=None) -> dict:
    """``rhs - lhs`` of the four sufficient conditions; all positive iff the windows are nonempty."""
    m = (l + r) / 2 if m is None else m
    lhs = (1 / (1 - r) + 1 / l) * 2 * eps
    sixth = Fraction(1, 6)
    return {
        "NOT": r / 2 - l / 2 - sixth - lhs,
        "OR": r / 4 - l / 2 - sixth - lhs,
        "P0": r / 2 - m / 2 - sixth - lhs,
        "P1": m / 2 - l / 2 - sixth - lhs,
    }


def epsilon_objective(l, r):
    """``l(1-r)/(l+1-r) * (r/4 - l/2 - 1/6)``: twice the largest admissible eps for given l, r."""
    return l * (1 - r) / (l + 1 - r) * (r / 4 - l / 2 - Fraction(1, 6))


def verify_epsilon_bound(grid: int = 200) -> dict:
    """Check the closed-form optimum exactly and against a rational grid search."""
    at_opt = epsilon_objective(L_STAR, R_STAR)
    best, arg = None, None
    for i in range(1, grid):
        l = Fraction(i, grid)
        for j in range(i + 1, grid):
            r = Fraction(j, grid)
            val = epsilon_objective(l, r)
            if best is None or val > best:
                best, arg = val, (l, r)
    m = M_STAR
    three = (
        R_STAR / 2 - m / 2 - Fraction(1, 6),
        m / 2 - L_STAR / 2 - Fraction(1, 6),
        R_STAR / 4 - L_STAR / 2 - Fraction(1, 6),
    )
    return {
        "closed_form": F_MAX,
        "objective_at_optimum": at_opt,
        "closed_form_ok": at_opt == F_MAX,
        "threshold": EPS_THRESHOLD,
        "threshold_ok": F_MAX / 2 == EPS_THRESHOLD,
        "grid_step": Fraction(1, grid),
        "grid_max": best,
        "grid_argmax": arg,
        "grid_ok": quad_sign(F_MAX - best) is not Sign.NEG,
        "first_two_equal": three[0] == three[1],
        "min_of_three": min(three),
    }


@dataclass(frozen=True)
class ReductionParams:
    l: QuadExt = L_STAR
    r: QuadExt = R_STAR
    m: QuadExt = M_STAR
    eps: Fraction = DEFAULT_EPS
    rewards: Mapping = field(default_factory=lambda: dict(DEFAULT_REWARDS))

    def reward(self, side: int, kind: str) -> Fraction:
        """Reward paid by an auxiliary state whose gate outputs sit on ``side``."""
        return Fraction(self.rewards.get((side, kind), self.rewards.get(kind)))

    def problems(self) -> list[str]:
        out = []
        if not (quad_sign(self.l) is Sign.POS and self.l < self.m < self.r < 1):
            out.append("need 0 < l < m < r < 1")
        if quad_sign(self.eps) is Sign.NEG or not self.eps < EPS_THRESHOLD:
            out.append("need 0 <= eps < (3-2*sqrt(2))/288")
        bounds = window_bounds(self.eps, self.l, self.r, self.m)
        for side in (1, 2):
            for kind in KINDS:
                lo, hi = bounds[kind]
                x = self.reward(side, kind)
                if not (quad_sign(x - lo) is Sign.POS and quad_sign(hi - x) is Sign.POS):
                    out.append(f"side {side} {kind} reward {x} not strictly inside ({lo}, {hi})")
        return out


def default_params(eps=DEFAULT_EPS) -> ReductionParams:
    windows = compute_reward_windows(eps)
    return ReductionParams(eps=Fraction(eps), rewards={k: w.choice for k, w in windows.items()})


def params_to_json(params: ReductionParams, node_state: Optional[Mapping] = None) -> dict:
    rewards = {}
    for key, val in params.rewards.items():
        name = key if isinstance(key, str) else f"{key[1]}@{key[0]}"
        rewards[name] = scalar_to_json(val)
    out = {
        "eps": scalar_to_json(params.eps),
        "l": scalar_to_json(params.l),
        "r": scalar_to_json(params.r),
        "m": scalar_to_json(params.m),
        "rewards": rewards,
    }
    if node_state is not None:
        out["nodeStates"] = dict(node_state)
    return out


def params_from_json(obj) -> tuple[ReductionParams, Optional[dict]]:
    try:
        rewards = {}
        for name, val in obj["rewards"].items():
            if "@" in name:
                kind, side = name.split("@")
                rewards[(int(side), kind)] = scalar_from_json(val)
            else:
                rewards[name] = scalar_from_json(val)
        params = ReductionParams(
            l=scalar_from_json(obj["l"]), r=scalar_from_json(obj["r"]), m=scalar_from_json(obj["m"]),
            eps=scalar_from_json(obj["eps"]), rewards=rewards,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise GameFormatError(f"malformed reduction parameters ({exc})") from None
    return params, obj.get("nodeStates")


# ---------------------------------------------------------------------------
# Compilation and decoding


@dataclass(frozen=True)
class CompiledGame:
    game: StochasticGame
    node_state: dict  # node id -> state id
    params: ReductionParams
    sides: dict  # node id -> 1 | 2


def _aux_id(kind: str, player_side: int) -> str:
    return f"#aux-{kind}-{player_side}"


def _cycle_id(side: int) -> str:
    return f"#cycle-{side}"


def compile_circuit(instance: PureCircuitInstance, params: Optional[ReductionParams] = None) -> CompiledGame:
    """Build the two-player game for ``instance`` (bipartite interaction graph required)."""
    params = default_params() if params is None else params
    issues = instance.problems()
    if issues:
        raise ValueError("; ".join(issues))
    sides = dict(instance.bipartition) if instance.bipartition is not None else check_bipartite(instance)
    for u in instance.nodes:
        if u.startswith("#"):
            raise ValueError(f"node id {u!r} collides with reserved auxiliary ids")
        if sides.get(u) not in (1, 2):
            raise ValueError(f"node {u!r} has no side in the bipartition")

    def reward(to_side: int, amount) -> tuple:
        vec = [Fraction(0), Fraction(0)]
        vec[to_side - 1] = Fraction(amount)
        return tuple(vec)

    zero = (Fraction(0), Fraction(0))
    one = Fraction(1)
    driver = {v: (g, idx) for g in instance.gates for idx, v in enumerate(g.outputs)}
    aux_needed: dict[str, tuple[str, int]] = {}
    states = []
    for u in instance.nodes:
        side, opp = sides[u], 3 - sides[u]
        if u not in driver:
            succ0 = succ1 = ((_cycle_id(opp), one),)
        else:
            g, idx = driver[u]
            if g.kind == "NOT":
                kind = "NOT"
                succ0 = ((g.inputs[0], one),)
                succ1 = None
            elif g.kind == "OR":
                kind = "OR"
                succ0 = None
                half = Fraction(1, 2)
                if g.inputs[0] == g.inputs[1]:
                    succ1 = ((g.inputs[0], one),)
                else:
                    succ1 = tuple(sorted(((g.inputs[0], half), (g.inputs[1], half))))
            else:
                kind = "P0" if idx == 0 else "P1"
                succ0 = None
                succ1 = ((g.inputs[0], one),)
            aux = _aux_id(kind, opp)
            aux_needed[aux] = (kind, side)
            if succ0 is None:
                succ0 = ((aux, one),)
            else:
                succ1 = ((aux, one),)
        states.append(State(u, side - 1, (
            Action("0", zero, succ0),
            Action("1", reward(opp, 1), succ1),
        )))
    for aux in sorted(aux_needed):
        kind, out_side = aux_needed[aux]
        aux_side = 3 - out_side
        states.append(State(aux, aux_side - 1, (
            Action("1", reward(out_side, params.reward(out_side, kind)), ((_cycle_id(out_side), one),)),
        )))
    for side in (1, 2):
        states.append(State(_cycle_id(side), side - 1, (
            Action("0", zero, ((_cycle_id(3 - side), one),)),
        )))
    game = StochasticGame(2, GAMMA, tuple(states))
    return CompiledGame(game, {u: u for u in instance.nodes}, params, sides)


def action1_probability(game: StochasticGame, profile, state_id: str):
    k = game.index[state_id]
    labels = [a.label for a in game.states[k].actions]
    return profile[k][labels.index("1")]


def decode_value(p, l=L_STAR, r=R_STAR):
    if quad_sign(p - l) is not Sign.POS:
        return 0
    if quad_sign(p - r) is not Sign.NEG:
        return 1
    return BOT


def decode(compiled: CompiledGame, profile) -> dict:
    """Threshold each node's action-1 probability: ``<= l`` -> 0, ``>= r`` -> 1, else BOT."""
    return decode_profile(compiled.game, profile, compiled.node_state, compiled.params)


def decode_profile(game: StochasticGame, profile, node_state: Mapping, params: ReductionParams) -> dict:
    return {
        u: decode_value(action1_probability(game, profile, sid), params.l, params.r)
        for u, sid in node_state.items()
    }


def node_profile(compiled: CompiledGame, probs: Mapping[str, Fraction]):
    """Profile with action-1 probability ``probs[u]`` at node ``u`` (default 0)."""
    game = compiled.game
    rows = list(pure_profile(game))
    for u, sid in compiled.node_state.items():
        p = probs.get(u, Fraction(0))
        rows[game.index[sid]] = (1 - p, p)
    return tuple(rows)


@dataclass
class SoundnessReport:
    certified_eps: Scalar
    exact: bool
    assignment: dict
    violations: list
    probabilities: dict
    margins: dict

    @property
    def ok(self) -> bool:
        return not self.violations


def soundness_check(instance: PureCircuitInstance, params: Optional[ReductionParams] = None,
                    cfg=None) -> SoundnessReport:
    """Compile, solve, certify against ``params.eps``, decode, and check the gates."""
    from .solver2p import SolverConfig, solve2p

    params = default_params() if params is None else params
    compiled = compile_circuit(instance, params)
    result = solve2p(compiled.game, cfg or SolverConfig())
    if not result.certified_eps <= params.eps:
        raise SolverEpsTooLarge(result.certified_eps, params.eps)
    x = decode(compiled, result.profile)
    probs = {u: action1_probability(compiled.game, result.profile, sid) for u, sid in compiled.node_state.items()}
    margins = {
        u: decimal_str(min(abs(p - params.l), abs(p - params.r)), 6) for u, p in probs.items()
    }
    return SoundnessReport(result.certified_eps, result.exact, x, check_assignment(instance, x), probs, margins)

