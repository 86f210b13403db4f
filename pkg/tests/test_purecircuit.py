import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pisg.game import GameFormatError
from pisg.purecircuit import (
    BOT,
    CapExceeded,
    Gate,
    NotBipartite,
    PureCircuitInstance,
    all_solutions,
    assignment_from_json,
    brute_force_solve,
    check_assignment,
    check_bipartite,
    circuit_from_json,
    circuit_to_json,
)

NOT = PureCircuitInstance(("u", "v"), (Gate("NOT", ("u",), ("v",)),))
NOTNOT = PureCircuitInstance(("u", "v"), (Gate("NOT", ("u",), ("v",)), Gate("NOT", ("v",), ("u",))))
OR = PureCircuitInstance(("u", "v", "w"), (Gate("OR", ("u", "v"), ("w",)),))
PURIFY = PureCircuitInstance(("u", "v", "w"), (Gate("PURIFY", ("u",), ("v", "w")),))


def test_gate_examples():
    assert check_assignment(NOT, {"u": 0, "v": 1}) == []
    assert check_assignment(PURIFY, {"u": 1, "v": BOT, "w": BOT}) == list(PURIFY.gates)
    assert check_assignment(OR, {"u": 1, "v": BOT, "w": 0}) == list(OR.gates)


def test_gate_truth_tables():
    vals = (0, 1, BOT)
    for u, v in itertools.product(vals, repeat=2):
        ok = not check_assignment(NOT, {"u": u, "v": v})
        assert ok == (u is BOT or v == 1 - u)
    for u, v, w in itertools.product(vals, repeat=3):
        ok = not check_assignment(OR, {"u": u, "v": v, "w": w})
        expect = True
        if u == 0 and v == 0:
            expect = w == 0
        if u == 1 or v == 1:
            expect = w == 1
        assert ok == expect
        ok = not check_assignment(PURIFY, {"u": u, "v": v, "w": w})
        expect = (v is not BOT or w is not BOT) and (u is BOT or (v == u and w == u))
        assert ok == expect


def test_brute_force_examples():
    assert brute_force_solve(NOT) == {"u": 0, "v": 1}
    sols = {(x["u"], x["v"]) for x in all_solutions(NOTNOT)}
    assert sols == {(0, 1), (1, 0), (BOT, BOT)}
    free = PureCircuitInstance(("a", "b"), ())
    assert brute_force_solve(free) == {"a": 0, "b": 0}
    big = PureCircuitInstance(tuple(f"n{i}" for i in range(13)), ())
    with pytest.raises(CapExceeded):
        brute_force_solve(big)


def test_bipartite():
    assert check_bipartite(NOTNOT) == {"u": 1, "v": 2}
    tri = PureCircuitInstance(("u", "v", "w"), (
        Gate("NOT", ("u",), ("v",)), Gate("NOT", ("v",), ("w",)), Gate("NOT", ("w",), ("u",))))
    with pytest.raises(NotBipartite) as info:
        check_bipartite(tri)
    assert len(info.value.witness) == 3
    mixed = PureCircuitInstance(("u", "v", "w"), (
        Gate("PURIFY", ("u",), ("v", "w")), Gate("OR", ("v", "w"), ("u",))))
    side = check_bipartite(mixed)
    assert side["v"] == side["w"] != side["u"]


def test_problems_detected():
    with pytest.raises(GameFormatError):
        circuit_from_json({"nodes": ["u", "v"], "gates": [
            {"type": "NOT", "in": ["u"], "out": ["v"]}, {"type": "NOT", "in": ["u"], "out": ["v"]}]})
    with pytest.raises(GameFormatError):
        circuit_from_json({"nodes": ["u", "v"], "gates": [{"type": "OR", "in": ["u"], "out": ["v"]}]})
    with pytest.raises(GameFormatError):
        circuit_from_json({"nodes": ["u", "v"], "gates": [{"type": "NOT", "in": ["u"], "out": ["v"]}],
                           "bipartition": {"u": 1, "v": 1}})


def test_json_roundtrip():
    doc = circuit_to_json(OR)
    assert circuit_from_json(doc) == OR
    x = assignment_from_json(OR, {"u": 0, "v": None, "w": 1})
    assert x == {"u": 0, "v": BOT, "w": 1}
    with pytest.raises(GameFormatError):
        assignment_from_json(OR, {"u": 0, "v": 2, "w": 1})


@st.composite
def circuits(draw):
    n = draw(st.integers(2, 5))
    nodes = tuple(f"n{i}" for i in range(n))
    free = list(nodes)
    gates = []
    for _ in range(draw(st.integers(0, 3))):
        kind = draw(st.sampled_from(["NOT", "OR", "PURIFY"]))
        n_out = 2 if kind == "PURIFY" else 1
        if len(free) < n_out:
            break
        outs = draw(st.permutations(free))[:n_out]
        for o in outs:
            free.remove(o)
        ins = tuple(draw(st.sampled_from(nodes)) for _ in range(2 if kind == "OR" else 1))
        gates.append(Gate(kind, ins, tuple(outs)))
    return PureCircuitInstance(nodes, tuple(gates))


@settings(max_examples=100, deadline=None)
@given(circuits(), st.data())
def test_bot_monotone_on_inputs(inst, data):
    x = {u: data.draw(st.sampled_from([0, 1, BOT])) for u in inst.nodes}
    target = data.draw(st.sampled_from(inst.nodes))
    y = dict(x, **{target: BOT})
    before, after = set(check_assignment(inst, x)), set(check_assignment(inst, y))
    for g in after - before:
        # only gates that have ``target`` as an output can break
        assert target in g.outputs


def test_purify_output_bot_can_break():
    x = {"u": BOT, "v": 0, "w": BOT}
    assert not check_assignment(PURIFY, x)
    assert check_assignment(PURIFY, dict(x, v=BOT))


@settings(max_examples=100, deadline=None)
@given(circuits())
def test_solutions_and_coloring(inst):
    assert not check_assignment(inst, brute_force_solve(inst))
    try:
        side = check_bipartite(inst)
    except NotBipartite as exc:
        w = exc.witness
        assert len(w) % 2 == 1
        edges = {frozenset(e) for e in inst.edges()}
        assert all(frozenset((w[i], w[(i + 1) % len(w)])) in edges for i in range(len(w)))
        return
    for u, v in inst.edges():
        assert side[u] != side[v]
