"""Pure-Circuit instances over {0, 1, BOT} with NOT / OR / PURIFY gates.

Assignments map node ids to ``0``, ``1`` or ``None`` (the undefined value,
written ``null`` in JSON).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Optional

from .game import GameFormatError, _load

BOT = None
VALUES = (0, 1, BOT)
ARITY = {"NOT": (1, 1), "OR": (2, 1), "PURIFY": (1, 2)}


class NotBipartite(ValueError):
    def __init__(self, witness: list):
        super().__init__(f"interaction graph has an odd cycle: {' - '.join(map(str, witness))}")
        self.witness = witness


class CapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    inputs: tuple
    outputs: tuple

    def __str__(self):
        return f"{self.kind}({', '.join(self.inputs)} -> {', '.join(self.outputs)})"


@dataclass(frozen=True)
class PureCircuitInstance:
    nodes: tuple
    gates: tuple
    bipartition: Optional[Mapping[str, int]] = None

    def problems(self) -> list[str]:
        out = []
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            out.append("duplicate node ids")
        driven: dict[str, Gate] = {}
        for g in self.gates:
            if g.kind not in ARITY:
                out.append(f"unknown gate type {g.kind!r}")
                continue
            if (len(g.inputs), len(g.outputs)) != ARITY[g.kind]:
                out.append(f"{g}: wrong arity for {g.kind}")
            for u in g.inputs + g.outputs:
                if u not in known:
                    out.append(f"{g}: unknown node {u!r}")
            for v in g.outputs:
                if v in driven:
                    out.append(f"node {v!r} is the output of more than one gate")
                driven[v] = g
        if self.bipartition is not None:
            for g in self.gates:
                for u in g.inputs:
                    for v in g.outputs:
                        if self.bipartition.get(u) == self.bipartition.get(v):
                            out.append(f"{g}: {u!r} and {v!r} lie on the same side")
        return out

    def edges(self) -> list[tuple[str, str]]:
        return [(u, v) for g in self.gates for u in g.inputs for v in g.outputs]


def _satisfied(g: Gate, x: Mapping) -> bool:
    if g.kind == "NOT":
        u, v = x[g.inputs[0]], x[g.outputs[0]]
        return not (u == 0 and v != 1) and not (u == 1 and v != 0)
    if g.kind == "OR":
        u, v, w = x[g.inputs[0]], x[g.inputs[1]], x[g.outputs[0]]
        if u == 0 and v == 0 and w != 0:
            return False
        return not ((u == 1 or v == 1) and w != 1)
    if g.kind == "PURIFY":
        u, v, w = x[g.inputs[0]], x[g.outputs[0]], x[g.outputs[1]]
        if v is BOT and w is BOT:
            return False
        return u is BOT or (v == u and w == u)
    raise ValueError(f"unknown gate type {g.kind!r}")


def check_assignment(instance: PureCircuitInstance, x: Mapping) -> list[Gate]:
    missing = [u for u in instance.nodes if u not in x]
    if missing:
        raise ValueError(f"assignment misses nodes {missing}")
    return [g for g in instance.gates if not _satisfied(g, x)]


def brute_force_solve(instance: PureCircuitInstance, cap: int = 12) -> dict:
    """First satisfying assignment in lexicographic order with 0 < 1 < BOT."""
    if len(instance.nodes) > cap:
        raise CapExceeded(f"{len(instance.nodes)} nodes exceeds the brute-force cap of {cap}")
    for values in itertools.product(VALUES, repeat=len(instance.nodes)):
        x = dict(zip(instance.nodes, values))
        if not check_assignment(instance, x):
            return x
    raise AssertionError("no satisfying assignment; Pure-Circuit is total")


def all_solutions(instance: PureCircuitInstance, cap: int = 12) -> list[dict]:
    if len(instance.nodes) > cap:
        raise CapExceeded(f"{len(instance.nodes)} nodes exceeds the brute-force cap of {cap}")
    sols = []
    for values in itertools.product(VALUES, repeat=len(instance.nodes)):
        x = dict(zip(instance.nodes, values))
        if not check_assignment(instance, x):
            sols.append(x)
    return sols


def check_bipartite(instance: PureCircuitInstance) -> dict[str, int]:
    """BFS two-coloring of the undirected interaction graph, sides ``1`` and ``2``."""
    adj: dict[str, list[str]] = {u: [] for u in instance.nodes}
    for u, v in instance.edges():
        adj[u].append(v)
        adj[v].append(u)
    side: dict[str, int] = {}
    parent: dict[str, Optional[str]] = {}
    for root in instance.nodes:
        if root in side:
            continue
        side[root], parent[root] = 1, None
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in side:
                    side[w], parent[w] = 3 - side[u], u
                    queue.append(w)
                elif side[w] == side[u]:
                    raise NotBipartite(_odd_cycle(parent, u, w))
    return side


def _odd_cycle(parent, u, w) -> list:
    def chain(x):
        out = []
        while x is not None:
            out.append(x)
            x = parent[x]
        return out

    pu, pw = chain(u), chain(w)
    on_w = set(pw)
    lca = next(x for x in pu if x in on_w)
    left = pu[: pu.index(lca) + 1]
    right = pw[: pw.index(lca)]
    return left + right[::-1] if u != w else [u]


# ---------------------------------------------------------------------------
# JSON


def circuit_from_json(obj) -> PureCircuitInstance:
    obj = _load(obj)
    try:
        nodes = tuple(str(u) for u in obj["nodes"])
        gates = tuple(
            Gate(str(g["type"]).upper(), tuple(map(str, g["in"])), tuple(map(str, g["out"])))
            for g in obj["gates"]
        )
    except (KeyError, TypeError) as exc:
        raise GameFormatError(f"malformed circuit ({exc})") from None
    bip = obj.get("bipartition")
    if bip is not None:
        bip = {str(k): int(v) for k, v in bip.items()}
    inst = PureCircuitInstance(nodes, gates, bip)
    issues = inst.problems()
    if issues:
        raise GameFormatError("; ".join(issues))
    return inst


def circuit_to_json(inst: PureCircuitInstance) -> dict:
    out = {
        "nodes": list(inst.nodes),
        "gates": [{"type": g.kind, "in": list(g.inputs), "out": list(g.outputs)} for g in inst.gates],
    }
    if inst.bipartition is not None:
        out["bipartition"] = dict(inst.bipartition)
    return out


def assignment_from_json(inst: PureCircuitInstance, obj) -> dict:
    obj = _load(obj)
    x = {}
    for u in inst.nodes:
        if u not in obj:
            raise GameFormatError(f"assignment misses node {u!r}")
        val = obj[u]
        if val not in (0, 1, None) or isinstance(val, bool):
            raise GameFormatError(f"node {u!r}: value must be 0, 1 or null")
        x[u] = val
    return x
