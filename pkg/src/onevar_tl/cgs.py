"""Concurrent game models, ATL model checking, and a strategy-enumeration
oracle used to cross-validate the fixpoint checker.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .kripke import KripkeModel, ModelError, _bits
from .syntax import (
    Always,
    Coalition,
    Falsum,
    Formula,
    FragmentError,
    Implies,
    Next,
    Until,
    Var,
    is_atl_formula,
)


class EnumerationBudgetExceeded(RuntimeError):
    """The memoryless strategy space is too large for exhaustive search."""


@dataclass
class ConcurrentGameModel:
    """Agents 1..k choose simultaneously; delta is total on available profiles.

    ``available`` maps (agent, state) to a non-empty tuple of action indices;
    ``delta`` maps (state, profile) to a state for every profile drawn from
    the available sets, profiles ordered by agent number.
    """

    agents: int
    n_states: int
    actions: tuple[str, ...]
    available: dict[tuple[int, int], tuple[int, ...]]
    delta: dict[tuple[int, tuple[int, ...]], int]
    valuation: dict[int, frozenset[int]]
    names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.agents < 1:
            raise ModelError("a game model needs at least one agent")
        if self.n_states < 1:
            raise ModelError("a game model needs at least one state")
        if not self.actions:
            raise ModelError("empty action alphabet")

    def profiles(self, s: int) -> list[tuple[int, ...]]:
        return list(itertools.product(
            *(self.available[(a, s)] for a in range(1, self.agents + 1))
        ))

    @cached_property
    def succ_masks(self) -> tuple[int, ...]:
        """Successor bitmasks of the induced graph (any profile)."""
        masks = [0] * self.n_states
        for (s, _profile), t in self.delta.items():
            masks[s] |= 1 << t
        return tuple(masks)

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.n_states) - 1

    def var_mask(self, var: int) -> int:
        mask = 0
        for s in self.valuation.get(var, frozenset()):
            mask |= 1 << s
        return mask

    def state_name(self, s: int) -> str:
        return self.names[s] if self.names else str(s)


@dataclass(frozen=True)
class CAction:
    """A choice of actions for the agents of one coalition."""

    coalition: frozenset[int]
    choice: dict[int, int]  # agent -> action index

    def __post_init__(self) -> None:
        if set(self.choice) != set(self.coalition):
            raise ValueError("choice must cover exactly the coalition")

    def __hash__(self) -> int:
        return hash((self.coalition, tuple(sorted(self.choice.items()))))


@dataclass(frozen=True)
class CgsValidationReport:
    ok: bool
    problems: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def validate_cgs(m: ConcurrentGameModel) -> CgsValidationReport:
    """Check availability non-emptiness, delta totality and ranges."""
    problems: list[str] = []
    for a in range(1, m.agents + 1):
        for s in range(m.n_states):
            avail = m.available.get((a, s))
            if not avail:
                problems.append(f"agent {a} has no available action at state {s}")
            elif any(not 0 <= act < len(m.actions) for act in avail):
                problems.append(f"agent {a} has an out-of-range action at state {s}")
    for s in range(m.n_states):
        for profile in m.profiles(s):
            if (s, profile) not in m.delta:
                problems.append(f"delta undefined at state {s}, profile {profile}")
    for (s, profile), t in m.delta.items():
        if not 0 <= t < m.n_states:
            problems.append(f"delta({s},{profile}) out of range")
        avail_ok = all(
            profile[a - 1] in m.available.get((a, s), ())
            for a in range(1, m.agents + 1)
        )
        if not avail_ok:
            problems.append(f"delta defined on unavailable profile {profile} at {s}")
    for var, states in m.valuation.items():
        if any(not 0 <= s < m.n_states for s in states):
            problems.append(f"valuation of p{var} out of range")
    return CgsValidationReport(not problems, tuple(problems))


def outcomes(m: ConcurrentGameModel, s: int, ca: CAction) -> frozenset[int]:
    """Delta images over all completions of the coalition's action choice."""
    for a, act in ca.choice.items():
        if act not in m.available[(a, s)]:
            raise ModelError(f"action {act} unavailable to agent {a} at state {s}")
    out = set()
    for profile in m.profiles(s):
        if all(profile[a - 1] == act for a, act in ca.choice.items()):
            out.add(m.delta[(s, profile)])
    return frozenset(out)


def _coalition_choices(m: ConcurrentGameModel, coalition: frozenset[int], s: int):
    members = sorted(coalition)
    for combo in itertools.product(*(m.available[(a, s)] for a in members)):
        yield dict(zip(members, combo))


def pre_mask(m: ConcurrentGameModel, coalition: frozenset[int], x_mask: int) -> int:
    """States where some coalition action forces every outcome into ``x_mask``."""
    out = 0
    for s in range(m.n_states):
        profiles = m.profiles(s)
        for choice in _coalition_choices(m, coalition, s):
            ok = True
            for profile in profiles:
                if all(profile[a - 1] == act for a, act in choice.items()):
                    if not x_mask >> m.delta[(s, profile)] & 1:
                        ok = False
                        break
            if ok:
                out |= 1 << s
                break
    return out


def pre(m: ConcurrentGameModel, coalition: frozenset[int], x: frozenset[int]) -> frozenset[int]:
    return frozenset(_bits(pre_mask(m, coalition, _mask(x))))


def _mask(states) -> int:
    out = 0
    for s in states:
        out |= 1 << s
    return out


# ---------------------------------------------------------------------------
# ATL model checking by the standard fixpoint characterizations.

def mc_atl_mask(m: ConcurrentGameModel, f: Formula,
                memo: dict[Formula, int] | None = None) -> int:
    full = m.full_mask
    memo = {} if memo is None else memo

    def go(g: Formula) -> int:
        hit = memo.get(g)
        if hit is not None:
            return hit
        match g:
            case Var(i):
                out = m.var_mask(i)
            case Falsum():
                out = 0
            case Implies(a, b):
                out = (full & ~go(a)) | go(b)
            case Coalition(c, Next(a)):
                out = pre_mask(m, c, go(a))
            case Coalition(c, Always(a)):
                phi = go(a)
                z = phi
                while True:
                    nz = phi & pre_mask(m, c, z)
                    if nz == z:
                        break
                    z = nz
                out = z
            case Coalition(c, Until(a, b)):
                phi, psi = go(a), go(b)
                z = psi
                while True:
                    nz = z | (phi & pre_mask(m, c, z))
                    if nz == z:
                        break
                    z = nz
                out = z
            case _:
                raise FragmentError(f"not an ATL shape: {g}")
        memo[g] = out
        return out

    return go(f)


def mc_atl(m: ConcurrentGameModel, f: Formula) -> frozenset[int]:
    """States satisfying an ATL formula (paired coalition fragment)."""
    if not is_atl_formula(f):
        raise FragmentError("mc_atl requires an ATL-fragment formula")
    return frozenset(_bits(mc_atl_mask(m, f)))


# ---------------------------------------------------------------------------
# Strategy-enumeration oracle.  Decides coalition modalities by exhausting
# memoryless strategy profiles and analysing the pruned successor graph,
# an independent route from the fixpoint checker above.

def _reachable_mask(succ: list[int], start: int) -> int:
    seen = 1 << start
    frontier = [start]
    while frontier:
        x = frontier.pop()
        new = succ[x] & ~seen
        seen |= new
        for y in _bits(new):
            frontier.append(y)
    return seen


def _all_paths_until(succ: list[int], start: int, phi: int, psi: int) -> bool:
    """Every infinite path from start satisfies phi U psi, on a graph where
    every state has a successor.  A violation is a path reaching a state
    outside both sets before psi, or avoiding psi forever (a cycle in the
    psi-free region)."""
    if psi >> start & 1:
        return True
    if not phi >> start & 1:
        return False
    # Explore the psi-free region reachable from start.
    seen = 1 << start
    frontier = [start]
    region = [start]
    while frontier:
        x = frontier.pop()
        for y in _bits(succ[x] & ~psi):
            if not phi >> y & 1:
                return False
            if not seen >> y & 1:
                seen |= 1 << y
                frontier.append(y)
                region.append(y)
    # Any cycle inside the psi-free region is a psi-avoiding path; the
    # restricted graph has a cycle iff it cannot be topologically ordered.
    region_mask = seen
    indeg = {x: 0 for x in region}
    for x in region:
        for y in _bits(succ[x] & region_mask):
            indeg[y] += 1
    queue = [x for x in region if indeg[x] == 0]
    removed = 0
    while queue:
        x = queue.pop()
        removed += 1
        for y in _bits(succ[x] & region_mask):
            indeg[y] -= 1
            if indeg[y] == 0:
                queue.append(y)
    return removed == len(region)


def _strategy_space(m: ConcurrentGameModel, coalition: frozenset[int]) -> int:
    total = 1
    for a in sorted(coalition):
        for s in range(m.n_states):
            total *= len(m.available[(a, s)])
    return total


def oracle_states_mask(m: ConcurrentGameModel, f: Formula, budget: int = 200_000) -> int:
    """Satisfying states computed by strategy enumeration, as a bitmask."""
    full = m.full_mask
    memo: dict[Formula, int] = {}

    def go(g: Formula) -> int:
        hit = memo.get(g)
        if hit is not None:
            return hit
        match g:
            case Var(i):
                out = m.var_mask(i)
            case Falsum():
                out = 0
            case Implies(a, b):
                out = (full & ~go(a)) | go(b)
            case Coalition(c, body):
                out = coalition_mask(c, body)
            case _:
                raise FragmentError(f"not an ATL shape: {g}")
        memo[g] = out
        return out

    def coalition_mask(c: frozenset[int], body: Formula) -> int:
        match body:
            case Next(a):
                objective = ("next", go(a), 0)
            case Always(a):
                objective = ("always", go(a), 0)
            case Until(a, b):
                objective = ("until", go(a), go(b))
            case _:
                raise FragmentError(f"not an ATL path shape: {body}")
        if _strategy_space(m, c) > budget:
            raise EnumerationBudgetExceeded(
                f"{_strategy_space(m, c)} memoryless strategies exceed budget {budget}")
        members = sorted(c)
        per_state_choices = [
            list(itertools.product(*(m.available[(a, s)] for a in members)))
            for s in range(m.n_states)
        ]
        result = 0
        for assignment in itertools.product(*per_state_choices):
            # assignment[s] fixes the coalition's actions at state s; prune
            # the transition graph to the profiles that extend it.
            succ = [0] * m.n_states
            for s in range(m.n_states):
                fixed = dict(zip(members, assignment[s]))
                for profile in m.profiles(s):
                    if all(profile[a - 1] == act for a, act in fixed.items()):
                        succ[s] |= 1 << m.delta[(s, profile)]
            kind, x, y = objective
            for s in range(m.n_states):
                if result >> s & 1:
                    continue
                if kind == "next":
                    if succ[s] and succ[s] & ~x == 0:
                        result |= 1 << s
                elif kind == "always":
                    if _reachable_mask(succ, s) & ~x == 0:
                        result |= 1 << s
                else:
                    if _all_paths_until(succ, s, x, y):
                        result |= 1 << s
            if result == full:
                break
        return result

    return go(f)


def strategy_oracle(m: ConcurrentGameModel, s: int, f: Formula, budget: int = 200_000) -> bool:
    """True iff some memoryless strategy of the formula's root coalition
    forces its objective from ``s``; operands are evaluated the same way."""
    if not isinstance(f, Coalition):
        raise FragmentError("strategy_oracle expects a coalition-rooted formula")
    if not is_atl_formula(f):
        raise FragmentError("strategy_oracle requires an ATL-fragment formula")
    return bool(oracle_states_mask(m, f, budget) >> s & 1)


# ---------------------------------------------------------------------------
# Kripke -> one-agent game model.

def cgs_from_kripke(m: KripkeModel) -> ConcurrentGameModel:
    """One agent whose actions pick among the state's successors."""
    succ_lists = [sorted(_bits(mask)) for mask in m.succ_masks]
    max_deg = max((len(xs) for xs in succ_lists), default=1)
    if any(not xs for xs in succ_lists):
        raise ModelError("model must be serial")
    actions = tuple(f"a{k}" for k in range(max_deg))
    available = {(1, s): tuple(range(len(succ_lists[s]))) for s in range(m.n_states)}
    delta = {
        (s, (k,)): succ_lists[s][k]
        for s in range(m.n_states)
        for k in range(len(succ_lists[s]))
    }
    return ConcurrentGameModel(
        agents=1,
        n_states=m.n_states,
        actions=actions,
        available=available,
        delta=delta,
        valuation=dict(m.valuation),
        names=m.names,
    )


# ---------------------------------------------------------------------------
# Serialization.

def cgs_to_json(m: ConcurrentGameModel) -> dict:
    out = {
        "agents": m.agents,
        "states": m.n_states,
        "actions": list(m.actions),
        "available": {
            f"{a},{s}": [m.actions[i] for i in m.available[(a, s)]]
            for a in range(1, m.agents + 1)
            for s in range(m.n_states)
        },
        "delta": {
            f"{s}|{','.join(m.actions[i] for i in profile)}": t
            for (s, profile), t in sorted(m.delta.items())
        },
        "val": {str(var): sorted(states) for var, states in sorted(m.valuation.items()) if states},
    }
    if m.names:
        out["names"] = list(m.names)
    return out


def cgs_from_json(data: dict) -> ConcurrentGameModel:
    try:
        agents = int(data["agents"])
        n = int(data["states"])
        actions = tuple(data["actions"])
        action_index = {name: i for i, name in enumerate(actions)}
        available = {}
        for key, names in data["available"].items():
            a, s = key.split(",")
            available[(int(a), int(s))] = tuple(action_index[name] for name in names)
        delta = {}
        for key, t in data["delta"].items():
            s, profile = key.split("|")
            acts = tuple(action_index[name] for name in profile.split(","))
            delta[(int(s), acts)] = int(t)
        val = {int(v): frozenset(int(s) for s in states) for v, states in data.get("val", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"malformed CGS JSON: {exc}") from exc
    names = tuple(data["names"]) if "names" in data else None
    return ConcurrentGameModel(agents, n, actions, available, delta, val, names)


def cgs_to_dot(m: ConcurrentGameModel, designated: int | None = None) -> str:
    lines = ["digraph cgs {"]
    for s in range(m.n_states):
        true_vars = sorted(var for var, states in m.valuation.items() if s in states)
        label = m.state_name(s)
        if true_vars:
            label += "\\n" + " ".join(f"p{v}" for v in true_vars)
        shape = "doublecircle" if s == designated else "circle"
        lines.append(f'  s{s} [label="{label}", shape={shape}];')
    seen = set()
    for (s, _profile), t in sorted(m.delta.items()):
        if (s, t) not in seen:
            seen.add((s, t))
            lines.append(f"  s{s} -> s{t};")
    lines.append("}")
    return "\n".join(lines)
