"""Translations of the four logics into their single-variable fragments,
with the gadget formulas, gadget models and witness-model constructions
that make the translations checkable on finite models.

The output formula is built in three steps: a guarded relativization of the
source (``prime``), a guard formula pinning the fresh variable's behaviour
(``theta``), and a substitution replacing every variable by a single-variable
formula that detects an attached gadget model (``var_marker``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

from .cgs import ConcurrentGameModel, validate_cgs
from .kripke import KripkeModel, ModelError, reachable_submodel, validate, _bits
from .syntax import (
    FALSE,
    AgentSet,
    Always,
    Coalition,
    Falsum,
    ForAllPaths,
    Formula,
    FragmentError,
    Implies,
    LogicId,
    Next,
    Until,
    Var,
    ag,
    always_derived,
    ax,
    conj,
    disj,
    ex,
    iff,
    in_logic,
    neg,
    size_of,
    substitute,
    substitute_all,
    top,
    variables_of,
)


class Flavor(Enum):
    BRANCHING = "branching"
    ALTERNATING = "alternating"


def flavor_of(logic: LogicId) -> Flavor:
    return Flavor.ALTERNATING if logic.alternating else Flavor.BRANCHING


# ---------------------------------------------------------------------------
# Guarded relativization.

def prime(f: Formula, logic: LogicId, guard: int) -> Formula:
    """Relativize path quantification to the region marked by the guard
    variable, structurally per logic.

    The branching-time until clause and the empty-coalition clauses carry an
    escape disjunct / antecedent so that paths leaving the guarded region
    satisfy the translated obligation vacuously; without it the witness-model
    construction below is unsound (see the shipped regression tests).
    """
    if guard in variables_of(f):
        raise ValueError(f"guard variable p{guard} occurs in the formula")
    if not in_logic(f, logic):
        raise FragmentError(f"formula is not in the {logic.value} fragment")
    g = Var(guard)

    if logic is LogicId.CTLSTAR:
        boxg = always_derived(g)

        def go(h: Formula) -> Formula:
            match h:
                case Var() | Falsum():
                    return h
                case Implies(a, b):
                    return Implies(go(a), go(b))
                case ForAllPaths(a):
                    return ForAllPaths(Implies(boxg, go(a)))
                case Next(a):
                    return Next(go(a))
                case Until(a, b):
                    return Until(go(a), go(b))
            raise FragmentError(f"not a CTL* shape: {h}")

        return go(f)

    if logic is LogicId.CTL:

        def go(h: Formula) -> Formula:
            match h:
                case Var() | Falsum():
                    return h
                case ForAllPaths(Next(a)):
                    return ax(Implies(g, go(a)))
                case ForAllPaths(Until(a, b)):
                    # escape disjunct: leaving the guarded region fulfils the
                    # universal until
                    return ForAllPaths(Until(go(a), disj(neg(g), conj(g, go(b)))))
                case ForAllPaths(Implies(Until(a, b), Falsum())):
                    return ForAllPaths(Implies(Until(go(a), conj(g, go(b))), FALSE))
                case Implies(a, b):
                    return Implies(go(a), go(b))
            raise FragmentError(f"not a CTL shape: {h}")

        return go(f)

    if logic is LogicId.ATLSTAR:

        def go(h: Formula) -> Formula:
            match h:
                case Var() | Falsum():
                    return h
                case Implies(a, b):
                    return Implies(go(a), go(b))
                case Coalition(c, a) if not c:
                    # the empty coalition quantifies over all paths and gets
                    # the antecedent form, mirroring the branching-time clause
                    return Coalition(c, Implies(Always(g), go(a)))
                case Coalition(c, a):
                    return Coalition(c, conj(Always(g), go(a)))
                case Next(a):
                    return Next(go(a))
                case Always(a):
                    return Always(go(a))
                case Until(a, b):
                    return Until(go(a), go(b))
            raise FragmentError(f"not an ATL* shape: {h}")

        return go(f)

    def go(h: Formula) -> Formula:  # ATL
        match h:
            case Var() | Falsum():
                return h
            case Coalition(c, Next(a)):
                return Coalition(c, Next(Implies(g, go(a))))
            case Coalition(c, Always(a)):
                return Coalition(c, Always(Implies(g, go(a))))
            case Coalition(c, Until(a, b)) if not c:
                return Coalition(c, Until(go(a), disj(neg(g), conj(g, go(b)))))
            case Coalition(c, Until(a, b)):
                return Coalition(c, Until(go(a), conj(g, go(b))))
            case Implies(a, b):
                return Implies(go(a), go(b))
        raise FragmentError(f"not an ATL shape: {h}")

    return go(f)


def theta(logic: LogicId, guard: int, agents: AgentSet | None = None) -> Formula:
    """The guard formula: the fresh variable holds here and, everywhere
    reachable, it holds exactly at states with a successor inside its region."""
    g = Var(guard)
    if not logic.alternating:
        return conj(g, ag(iff(ex(g), g)))
    if agents is None:
        raise ValueError("alternating-time theta needs an agent set")
    grand = agents.members
    step = Coalition(grand, Next(g))
    return conj(g, Coalition(frozenset(), Always(iff(step, g))))


# ---------------------------------------------------------------------------
# Gadget formulas.

def chi(k: int, flavor: Flavor, var: int = 1, agents: AgentSet | None = None) -> Formula:
    """Alternation counter: k strict p / not-p alternations ending in an
    always-p tail."""
    if k < 0:
        raise ValueError("k must be non-negative")
    p = Var(var)
    if flavor is Flavor.BRANCHING:
        out = ag(p)
        for _ in range(k):
            out = conj(p, ex(conj(neg(p), ex(out))))
        return out
    if agents is None:
        raise ValueError("alternating-time chi needs an agent set")
    grand = agents.members
    out = Coalition(frozenset(), Always(p))
    for _ in range(k):
        out = conj(p, Coalition(grand, Next(conj(neg(p), Coalition(grand, Next(out))))))
    return out


def gadget_formula(m: int, flavor: Flavor, var: int = 1,
                   agents: AgentSet | None = None) -> Formula:
    """Formula that is true exactly at the root of the m-th gadget model."""
    if m < 1:
        raise ValueError("gadget index starts at 1")
    p = Var(var)
    if flavor is Flavor.BRANCHING:
        return conj(chi(m, flavor, var), ex(ag(neg(p))))
    if agents is None:
        raise ValueError("alternating-time gadget formula needs an agent set")
    grand = agents.members
    sink = Coalition(grand, Next(Coalition(frozenset(), Always(neg(p)))))
    return conj(chi(m, flavor, var, agents), sink)


def var_marker(m: int, flavor: Flavor, var: int = 1,
               agents: AgentSet | None = None) -> Formula:
    """Single-variable stand-in for p_m: true where the m-th gadget root is
    one step away."""
    root = gadget_formula(m, flavor, var, agents)
    if flavor is Flavor.BRANCHING:
        return ex(root)
    grand = agents.members
    return Coalition(grand, Next(root))


# ---------------------------------------------------------------------------
# Gadget models.

def gadget_model_kripke(m: int, root_loop: bool = True) -> KripkeModel:
    """Root, sink and a chain of 2m states alternating the single variable.

    ``root_loop=False`` drops the root's self-loop; the witness construction
    attaches that variant so no appended state satisfies a one-step marker it
    should not.
    """
    if m < 1:
        raise ValueError("gadget index starts at 1")
    n = 2 * m + 2  # r, b, a_1..a_{2m}
    edges = {(0, 1), (0, 2)}
    for i in range(1, 2 * m):
        edges.add((1 + i, 2 + i))
    for s in range(n):
        if s == 0 and not root_loop:
            continue
        edges.add((s, s))
    val = {1: frozenset({0}) | frozenset(1 + 2 * k for k in range(1, m + 1))}
    names = tuple([f"r_{m}", f"b_{m}"] + [f"a_{i}_{m}" for i in range(1, 2 * m + 1)])
    return KripkeModel(n, frozenset(edges), val, names)


def gadget_model_cgs(m: int, agents: AgentSet,
                     action_pool: tuple[str, ...] = ("a",)) -> ConcurrentGameModel:
    """Game-model gadget over the same states and valuation as the Kripke
    gadget.  Delta is total: at the root, profiles where agent 1 plays the
    designated action go to the sink and all others enter the chain; chain
    profiles advance; terminal states loop."""
    if m < 1:
        raise ValueError("gadget index starts at 1")
    if not action_pool:
        raise ValueError("empty action pool")
    base = gadget_model_kripke(m)
    designated = "d"
    while designated in action_pool:
        designated += "_"
    actions = tuple(action_pool) + (designated,)
    d_idx = len(actions) - 1
    k = agents.k
    available = {(a, s): tuple(range(len(actions)))
                 for a in range(1, k + 1) for s in range(base.n_states)}
    delta: dict[tuple[int, tuple[int, ...]], int] = {}
    terminal = base.n_states - 1
    for s in range(base.n_states):
        for profile in itertools.product(range(len(actions)), repeat=k):
            if s == 0:
                t = 1 if profile[0] == d_idx else 2
            elif s == 1 or s == terminal:
                t = s
            else:
                t = s + 1
            delta[(s, profile)] = t
    return ConcurrentGameModel(k, base.n_states, actions, available, delta,
                               dict(base.valuation), base.names)


# ---------------------------------------------------------------------------
# The full translation.

def canonicalize_variables(f: Formula) -> tuple[Formula, dict[int, int]]:
    """Rename occurring variables to 1..n in first-occurrence (pre-order)
    order; returns the renamed formula and the original -> new map."""
    order: list[int] = []
    seen: set[int] = set()

    def walk(g: Formula) -> None:
        match g:
            case Var(i):
                if i not in seen:
                    seen.add(i)
                    order.append(i)
            case Implies(a, b) | Until(a, b):
                walk(a)
                walk(b)
            case ForAllPaths(b) | Coalition(_, b) | Next(b) | Always(b):
                walk(b)

    walk(f)
    mapping = {orig: k + 1 for k, orig in enumerate(order)}
    if all(orig == new for orig, new in mapping.items()):
        return f, mapping
    renamed = substitute_all(f, {orig: Var(new) for orig, new in mapping.items()})
    return renamed, mapping


@dataclass
class TranslationResult:
    source: Formula
    source_canonical: Formula
    logic: LogicId
    agents: AgentSet | None
    n: int
    guard: int
    primed: Formula
    theta: Formula
    hat: Formula
    sigma: dict[int, Formula]
    star: Formula
    out_var: int
    var_map: dict[int, int]  # original index -> canonical index


def embed(f: Formula, logic: LogicId, agents: AgentSet | None = None) -> TranslationResult:
    """Translate a formula into the single-variable fragment of its logic."""
    if logic.alternating and agents is None:
        k = max((max(c) for c in _coalitions(f) if c), default=1)
        agents = AgentSet(max(k, 1))
    if not in_logic(f, logic):
        raise FragmentError(f"formula is not in the {logic.value} fragment")
    canonical, var_map = canonicalize_variables(f)
    n = len(var_map)
    guard = n + 1
    primed = prime(canonical, logic, guard)
    th = theta(logic, guard, agents)
    hat = conj(th, primed)
    flavor = flavor_of(logic)
    sigma = {i: var_marker(i, flavor, 1, agents) for i in range(1, n + 2)}
    star = substitute_all(hat, sigma)
    return TranslationResult(
        source=f,
        source_canonical=canonical,
        logic=logic,
        agents=agents,
        n=n,
        guard=guard,
        primed=primed,
        theta=th,
        hat=hat,
        sigma=sigma,
        star=star,
        out_var=1,
        var_map=var_map,
    )


def _coalitions(f: Formula):
    match f:
        case Coalition(c, b):
            yield c
            yield from _coalitions(b)
        case Implies(a, b) | Until(a, b):
            yield from _coalitions(a)
            yield from _coalitions(b)
        case ForAllPaths(b) | Next(b) | Always(b):
            yield from _coalitions(b)
        case _:
            return


def hat_top_collapse(tr: TranslationResult) -> Formula:
    """Substitute truth for the guard in the guarded conjunction; the result
    is equivalent to the source, with original variable names restored."""
    collapsed = substitute(tr.hat, tr.guard, top())
    inverse = {canon: Var(orig) for orig, canon in tr.var_map.items() if canon != orig}
    if inverse:
        collapsed = substitute_all(collapsed, inverse)
    return collapsed


# ---------------------------------------------------------------------------
# Witness models.

def witness_model_forward(m: KripkeModel, tr: TranslationResult,
                          designated: int) -> tuple[KripkeModel, int]:
    """Attach one gadget per variable to a model of the guarded translation
    (guard true everywhere, valuation over the canonical variables) and link
    each state to the roots of the gadgets of its true variables.

    Returns the combined model and the designated state's new index.
    """
    if tr.logic.alternating:
        raise FragmentError("use witness_model_cgs for alternating-time results")
    guard_states = m.valuation.get(tr.guard, frozenset())
    if len(guard_states) != m.n_states:
        raise ModelError(f"guard variable p{tr.guard} must hold at every state")
    m, remap = reachable_submodel(m, designated)
    designated = remap[designated]

    edges = set(m.edges)
    val_p: set[int] = set()
    names = list(m.names or (str(s) for s in range(m.n_states)))
    offset = m.n_states
    for i in range(1, tr.n + 2):
        gadget = gadget_model_kripke(i, root_loop=False)
        root = offset
        for x, y in gadget.edges:
            edges.add((x + offset, y + offset))
        for s in gadget.valuation[1]:
            val_p.add(s + offset)
        names.extend(gadget.names)
        for x in m.valuation.get(i, frozenset()):
            edges.add((x, root))
        offset += gadget.n_states

    combined = KripkeModel(offset, frozenset(edges), {tr.out_var: frozenset(val_p)},
                           tuple(names))
    report = validate(combined)
    if not report.ok:
        raise ModelError(f"internal error: witness model invalid: {report}")
    return combined, designated


def _cgs_reachable(m: ConcurrentGameModel, s0: int) -> tuple[ConcurrentGameModel, dict[int, int]]:
    keep = [s0]
    seen = {s0}
    frontier = [s0]
    while frontier:
        x = frontier.pop()
        for y in _bits(m.succ_masks[x]):
            if y not in seen:
                seen.add(y)
                keep.append(y)
                frontier.append(y)
    keep.sort()
    remap = {old: new for new, old in enumerate(keep)}
    available = {
        (a, remap[s]): m.available[(a, s)]
        for a in range(1, m.agents + 1) for s in keep
    }
    delta = {
        (remap[s], profile): remap[t]
        for (s, profile), t in m.delta.items() if s in remap
    }
    val = {var: frozenset(remap[s] for s in states if s in remap)
           for var, states in m.valuation.items()}
    names = tuple(m.state_name(s) for s in keep) if m.names else None
    return ConcurrentGameModel(m.agents, len(keep), m.actions, available, delta,
                               val, names), remap


def witness_model_cgs(m: ConcurrentGameModel, tr: TranslationResult,
                      designated: int) -> tuple[ConcurrentGameModel, int]:
    """Game-model analogue of the forward witness: gadgets are appended, and
    per linked gadget every agent gains one extra action whose unanimous
    profile jumps to that gadget's root.

    Profiles mixing extra actions with anything else fall back to the
    original transition with each extra action replaced by the agent's first
    available one, keeping delta total without adding strategic power.
    """
    if not tr.logic.alternating:
        raise FragmentError("use witness_model_forward for branching-time results")
    if tr.agents is None or tr.agents.k != m.agents:
        raise ModelError("agent sets of the model and the translation differ")
    guard_states = m.valuation.get(tr.guard, frozenset())
    if len(guard_states) != m.n_states:
        raise ModelError(f"guard variable p{tr.guard} must hold at every state")
    m, remap = _cgs_reachable(m, designated)
    designated = remap[designated]

    k = m.agents
    n_orig = m.n_states
    base_actions = list(m.actions)
    d_index: dict[tuple[int, int], int] = {}  # (gadget i, agent) -> action index
    for i in range(1, tr.n + 2):
        for a in range(1, k + 1):
            d_index[(i, a)] = len(base_actions)
            base_actions.append(f"d{i}_{a}")
    actions = tuple(base_actions)
    all_action_ids = tuple(range(len(actions)))

    gadgets = [gadget_model_kripke(i) for i in range(1, tr.n + 2)]
    offsets = []
    total = n_orig
    for gadget in gadgets:
        offsets.append(total)
        total += gadget.n_states

    available: dict[tuple[int, int], tuple[int, ...]] = {}
    for a in range(1, k + 1):
        for s in range(n_orig):
            extra = tuple(d_index[(i, a)] for i in range(1, tr.n + 2)
                          if s in m.valuation.get(i, frozenset()))
            available[(a, s)] = m.available[(a, s)] + extra
        for s in range(n_orig, total):
            available[(a, s)] = all_action_ids

    delta: dict[tuple[int, tuple[int, ...]], int] = dict(m.delta)
    # original states: unanimous extra-action profiles jump to gadget roots;
    # any other profile with an extra action downgrades to original actions
    for s in range(n_orig):
        avail_per_agent = [available[(a, s)] for a in range(1, k + 1)]
        for profile in itertools.product(*avail_per_agent):
            if (s, profile) in delta:
                continue
            jump = None
            for i in range(1, tr.n + 2):
                if all(profile[a - 1] == d_index[(i, a)] for a in range(1, k + 1)):
                    jump = offsets[i - 1]
                    break
            if jump is not None:
                delta[(s, profile)] = jump
            else:
                downgraded = tuple(
                    act if act in m.available[(a, s)] else m.available[(a, s)][0]
                    for a, act in zip(range(1, k + 1), profile)
                )
                delta[(s, profile)] = delta[(s, downgraded)]

    # gadget states: root splits on agent 1's designated action (index 0 is
    # always an original action), chain advances, sinks loop
    designated_idx = 0
    names = list(m.names or (str(s) for s in range(n_orig)))
    val_p: set[int] = set()
    for gi, gadget in enumerate(gadgets):
        off = offsets[gi]
        terminal = gadget.n_states - 1
        for s_local in range(gadget.n_states):
            s = off + s_local
            for profile in itertools.product(all_action_ids, repeat=k):
                if s_local == 0:
                    t_local = 1 if profile[0] == designated_idx else 2
                elif s_local == 1 or s_local == terminal:
                    t_local = s_local
                else:
                    t_local = s_local + 1
                delta[(s, profile)] = off + t_local
        for s_local in gadget.valuation[1]:
            val_p.add(off + s_local)
        names.extend(gadget.names)

    combined = ConcurrentGameModel(k, total, actions, available, delta,
                                   {tr.out_var: frozenset(val_p)}, tuple(names))
    report = validate_cgs(combined)
    if not report.ok:
        raise ModelError(f"internal error: witness model invalid: {report.problems[:3]}")
    return combined, designated


# ---------------------------------------------------------------------------
# Serialization for the service layer.

def translation_to_json(tr: TranslationResult) -> dict:
    from .syntax import format_formula
    return {
        "logic": tr.logic.value,
        "agents": tr.agents.k if tr.agents else None,
        "source": format_formula(tr.source),
        "primed": format_formula(tr.primed),
        "theta": format_formula(tr.theta),
        "hat": format_formula(tr.hat),
        "star": format_formula(tr.star),
        "sigma": {f"p{i}": format_formula(g) for i, g in sorted(tr.sigma.items())},
        "n": tr.n,
        "guard": tr.guard,
        "out_var": tr.out_var,
        "var_map": {f"p{o}": f"p{c}" for o, c in sorted(tr.var_map.items())},
        "sizes": {"source": size_of(tr.source), "star": size_of(tr.star)},
    }
