"""Seeded random generators for formulas and models.

Everything takes an explicit ``random.Random`` so identical seeds give
identical corpora across the verification suites, the CLI and the tests.
"""

from __future__ import annotations

import itertools
import random

from .cgs import ConcurrentGameModel
from .kripke import KripkeModel
from .syntax import (
    AgentSet,
    Coalition,
    Formula,
    Next,
    Until,
    Var,
    af,
    ag,
    au,
    ax,
    conj,
    disj,
    ef,
    eg,
    eu,
    eventually,
    ex,
    exists_paths,
    always_derived,
    Always,
    ForAllPaths,
    Implies,
    neg,
    top,
    FALSE,
)


def random_ctl_formula(rng: random.Random, n_vars: int, depth: int,
                       allow_false: bool = True, positive_bias: float = 0.0) -> Formula:
    """Random CTL-fragment formula over p1..p_{n_vars}.

    ``positive_bias`` in [0,1] shifts weight away from negation-heavy
    connectives, which raises the satisfiable fraction of the corpus.
    """
    def atom() -> Formula:
        choices = [Var(rng.randint(1, n_vars))]
        if allow_false:
            choices += [FALSE, top()]
        return rng.choice(choices)

    def go(d: int) -> Formula:
        if d <= 0:
            return atom()
        roll = rng.random()
        if roll < 0.18:
            return atom()
        ops = ["not", "and", "or", "imp", "ax", "ex", "au", "eu", "af", "ef", "ag", "eg"]
        weights = [1.2 - positive_bias, 1.6, 1.4, 1.0 - 0.5 * positive_bias,
                   1.0, 1.0, 1.0, 1.0, 0.8, 0.8, 0.8, 0.8]
        op = rng.choices(ops, weights)[0]
        if op == "not":
            return neg(go(d - 1))
        if op in ("and", "or", "imp"):
            a, b = go(d - 1), go(d - 1)
            return {"and": conj, "or": disj, "imp": Implies}[op](a, b)
        if op in ("ax", "ex", "af", "ef", "ag", "eg"):
            return {"ax": ax, "ex": ex, "af": af, "ef": ef, "ag": ag, "eg": eg}[op](go(d - 1))
        a, b = go(d - 1), go(d - 1)
        return au(a, b) if op == "au" else eu(a, b)

    return go(depth)


def random_ctlstar_formula(rng: random.Random, n_vars: int, depth: int) -> Formula:
    """Random CTL* state formula; path structure mixes freely under quantifiers."""

    def state(d: int) -> Formula:
        if d <= 0 or rng.random() < 0.2:
            return rng.choice([Var(rng.randint(1, n_vars)), FALSE, top()])
        op = rng.choices(["not", "and", "or", "imp", "forall", "exists"],
                         [1.1, 1.4, 1.2, 0.9, 1.2, 1.2])[0]
        if op == "not":
            return neg(state(d - 1))
        if op == "forall":
            return ForAllPaths(path(d - 1))
        if op == "exists":
            return exists_paths(path(d - 1))
        a, b = state(d - 1), state(d - 1)
        return {"and": conj, "or": disj, "imp": Implies}[op](a, b)

    def path(d: int) -> Formula:
        if d <= 0 or rng.random() < 0.25:
            return state(0)
        op = rng.choices(["state", "not", "and", "imp", "next", "until", "box", "diamond"],
                         [0.8, 0.9, 1.0, 0.7, 1.2, 1.2, 0.9, 0.9])[0]
        if op == "state":
            return state(d - 1)
        if op == "not":
            return neg(path(d - 1))
        if op == "next":
            return Next(path(d - 1))
        if op == "until":
            return Until(path(d - 1), path(d - 1))
        if op == "box":
            return always_derived(path(d - 1))
        if op == "diamond":
            return eventually(path(d - 1))
        a, b = path(d - 1), path(d - 1)
        return conj(a, b) if op == "and" else Implies(a, b)

    return state(depth)


def random_atl_formula(rng: random.Random, n_vars: int, depth: int, agents: AgentSet,
                       positive_bias: float = 0.0) -> Formula:
    def random_coalition() -> frozenset[int]:
        return frozenset(a for a in agents.members if rng.random() < 0.5)

    def atom() -> Formula:
        return rng.choice([Var(rng.randint(1, n_vars)), FALSE, top()])

    def go(d: int) -> Formula:
        if d <= 0 or rng.random() < 0.18:
            return atom()
        op = rng.choices(["not", "and", "or", "imp", "next", "always", "until", "eventually"],
                         [1.0 - positive_bias, 1.5, 1.3, 0.9 - 0.4 * positive_bias,
                          1.2, 1.0, 1.2, 1.0])[0]
        if op == "not":
            return neg(go(d - 1))
        if op in ("and", "or", "imp"):
            a, b = go(d - 1), go(d - 1)
            return {"and": conj, "or": disj, "imp": Implies}[op](a, b)
        c = random_coalition()
        if op == "next":
            return Coalition(c, Next(go(d - 1)))
        if op == "always":
            return Coalition(c, Always(go(d - 1)))
        if op == "eventually":
            return Coalition(c, Until(top(), go(d - 1)))
        return Coalition(c, Until(go(d - 1), go(d - 1)))

    return go(depth)


def random_serial_kripke(rng: random.Random, n_states: int, variables: tuple[int, ...],
                         edge_prob: float = 0.35) -> KripkeModel:
    edges = set()
    for i in range(n_states):
        for j in range(n_states):
            if rng.random() < edge_prob:
                edges.add((i, j))
        if not any(x == i for x, _ in edges):
            edges.add((i, rng.randrange(n_states)))
    val = {
        v: frozenset(s for s in range(n_states) if rng.random() < 0.5)
        for v in variables
    }
    return KripkeModel(n_states, frozenset(edges), val)


def random_cgs(rng: random.Random, agents: AgentSet, n_states: int, n_actions: int,
               variables: tuple[int, ...]) -> ConcurrentGameModel:
    k = agents.k
    actions = tuple(chr(ord("a") + i) for i in range(n_actions))
    available = {}
    for a in range(1, k + 1):
        for s in range(n_states):
            size = rng.randint(1, n_actions)
            available[(a, s)] = tuple(sorted(rng.sample(range(n_actions), size)))
    delta = {}
    for s in range(n_states):
        for profile in itertools.product(*(available[(a, s)] for a in range(1, k + 1))):
            delta[(s, profile)] = rng.randrange(n_states)
    val = {
        v: frozenset(s for s in range(n_states) if rng.random() < 0.5)
        for v in variables
    }
    return ConcurrentGameModel(k, n_states, actions, available, delta, val)


def with_global_guard(m: KripkeModel, guard: int) -> KripkeModel:
    val = dict(m.valuation)
    val[guard] = frozenset(range(m.n_states))
    return KripkeModel(m.n_states, m.edges, val, m.names)


def cgs_with_global_guard(m: ConcurrentGameModel, guard: int) -> ConcurrentGameModel:
    val = dict(m.valuation)
    val[guard] = frozenset(range(m.n_states))
    return ConcurrentGameModel(m.agents, m.n_states, m.actions, dict(m.available),
                               dict(m.delta), val, m.names)
