"""Finite serial Kripke models and model checking for CTL and CTL*.

State sets are frozensets at the API surface and int bitmasks internally;
the bitmask entry points are shared with the bounded-satisfiability search,
which checks millions of candidate models.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

from .syntax import (
    Always,
    Coalition,
    Falsum,
    ForAllPaths,
    Formula,
    FragmentError,
    Implies,
    Next,
    SortError,
    Until,
    Var,
    is_ctl_formula,
    is_state_formula,
    neg,
    sort_of,
    Sort,
    top,
    variables_of,
)


class ModelError(ValueError):
    pass


@dataclass
class KripkeModel:
    """States 0..n-1, a serial edge relation and a per-variable valuation."""

    n_states: int
    edges: frozenset[tuple[int, int]]
    valuation: dict[int, frozenset[int]]
    names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.n_states < 1:
            raise ModelError("a model needs at least one state")
        for i, j in self.edges:
            if not (0 <= i < self.n_states and 0 <= j < self.n_states):
                raise ModelError(f"edge ({i},{j}) out of range")
        for var, states in self.valuation.items():
            if var < 1:
                raise ModelError("variable indices start at 1")
            if any(not 0 <= s < self.n_states for s in states):
                raise ModelError(f"valuation of p{var} out of range")
        if self.names is not None and len(self.names) != self.n_states:
            raise ModelError("names must cover every state")

    @cached_property
    def succ_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n_states
        for i, j in self.edges:
            masks[i] |= 1 << j
        return tuple(masks)

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.n_states) - 1

    def var_mask(self, var: int) -> int:
        mask = 0
        for s in self.valuation.get(var, frozenset()):
            mask |= 1 << s
        return mask

    def successors(self, s: int) -> frozenset[int]:
        return frozenset(_bits(self.succ_masks[s]))

    def state_name(self, s: int) -> str:
        return self.names[s] if self.names else str(s)


def _bits(mask: int) -> Iterator[int]:
    s = 0
    while mask:
        if mask & 1:
            yield s
        mask >>= 1
        s += 1


def _mask_of(states: Iterable[int]) -> int:
    out = 0
    for s in states:
        out |= 1 << s
    return out


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    non_serial_states: tuple[int, ...] = ()
    bad_valuation_vars: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def validate(m: KripkeModel) -> ValidationReport:
    """Check seriality and valuation ranges; violations are reported, not raised."""
    non_serial = tuple(s for s in range(m.n_states) if m.succ_masks[s] == 0)
    bad_vars = tuple(
        var for var, states in m.valuation.items()
        if any(not 0 <= s < m.n_states for s in states)
    )
    return ValidationReport(not non_serial and not bad_vars, non_serial, bad_vars)


# ---------------------------------------------------------------------------
# CTL model checking: bottom-up fixpoint labeling over bitmasks.

def _ax_pre(succ: tuple[int, ...], z: int) -> int:
    out = 0
    for s, mask in enumerate(succ):
        if mask and (mask & ~z) == 0:
            out |= 1 << s
    return out


def _ex_pre(succ: tuple[int, ...], z: int) -> int:
    out = 0
    for s, mask in enumerate(succ):
        if mask & z:
            out |= 1 << s
    return out


def _eu_fix(succ: tuple[int, ...], a: int, b: int) -> int:
    z = b
    while True:
        nz = z | (a & _ex_pre(succ, z))
        if nz == z:
            return z
        z = nz


def _au_fix(succ: tuple[int, ...], a: int, b: int) -> int:
    z = b
    while True:
        nz = z | (a & _ax_pre(succ, z))
        if nz == z:
            return z
        z = nz


def mc_ctl_mask(n: int, succ: tuple[int, ...], var_mask, f: Formula,
                memo: dict[Formula, int] | None = None) -> int:
    """Satisfying states of a CTL-fragment formula, as a bitmask.

    ``var_mask`` maps a variable index to the bitmask of states where it holds.
    """
    full = (1 << n) - 1
    memo = {} if memo is None else memo

    def go(g: Formula) -> int:
        hit = memo.get(g)
        if hit is not None:
            return hit
        match g:
            case Var(i):
                out = var_mask(i)
            case Falsum():
                out = 0
            case ForAllPaths(Next(a)):
                out = _ax_pre(succ, go(a))
            case ForAllPaths(Until(a, b)):
                out = _au_fix(succ, go(a), go(b))
            case ForAllPaths(Implies(Until(a, b), Falsum())):
                out = full & ~_eu_fix(succ, go(a), go(b))
            case Implies(a, b):
                out = (full & ~go(a)) | go(b)
            case _:
                raise FragmentError(f"not a CTL shape: {g}")
        memo[g] = out
        return out

    return go(f)


def mc_ctl(m: KripkeModel, f: Formula) -> frozenset[int]:
    """States satisfying a CTL formula (coalition-free, paired fragment)."""
    if not is_ctl_formula(f):
        raise FragmentError("mc_ctl requires a CTL-fragment formula")
    mask = mc_ctl_mask(m.n_states, m.succ_masks, m.var_mask, f)
    return frozenset(_bits(mask))


# ---------------------------------------------------------------------------
# Existential path checking: product of the model with a tableau automaton
# built from the path formula, searched for a reachable fair cycle.

def _normalize_box(f: Formula) -> Formula:
    """Rewrite the primitive box through until so the tableau only needs
    one kind of eventuality bookkeeping."""
    match f:
        case Always(b):
            return neg(Until(top(), neg(_normalize_box(b))))
        case Implies(a, b):
            return Implies(_normalize_box(a), _normalize_box(b))
        case Next(b):
            return Next(_normalize_box(b))
        case Until(a, b):
            return Until(_normalize_box(a), _normalize_box(b))
        case _:
            return f


def _path_subformulas(f: Formula) -> list[Formula]:
    """Subformulas of a path formula over atoms, in bottom-up order."""
    order: list[Formula] = []
    seen: set[Formula] = set()

    def go(g: Formula) -> None:
        if g in seen:
            return
        match g:
            case Var() | Falsum():
                pass
            case Implies(a, b) | Until(a, b):
                go(a)
                go(b)
            case Next(b):
                go(b)
            case _:
                raise SortError(f"unlabeled subformula in path check: {g}")
        seen.add(g)
        order.append(g)

    go(f)
    return order


def exists_path_states_mask(n: int, succ: tuple[int, ...], var_mask,
                            theta: Formula) -> int:
    """States from which some infinite path satisfies ``theta``.

    ``theta`` must be a path formula whose state subformulas are variables
    already labeled on the model (atoms).
    """
    theta = _normalize_box(theta)
    subs = _path_subformulas(theta)
    index = {g: k for k, g in enumerate(subs)}
    temporals = [g for g in subs if isinstance(g, (Next, Until))]
    untils = [g for g in subs if isinstance(g, Until)]
    atom_masks = {g: var_mask(g.index) for g in subs if isinstance(g, Var)}

    # A tableau node is a truth assignment to every subformula: atoms are
    # fixed by the model state, boolean nodes are derived, temporal nodes
    # take free bits constrained locally and across transitions.
    def assignments(state: int) -> list[dict[Formula, bool]]:
        out: list[dict[Formula, bool]] = []
        for bits in range(1 << len(temporals)):
            val: dict[Formula, bool] = {}
            free = {g: bool(bits >> k & 1) for k, g in enumerate(temporals)}
            ok = True
            for g in subs:
                match g:
                    case Var():
                        val[g] = bool(atom_masks[g] >> state & 1)
                    case Falsum():
                        val[g] = False
                    case Implies(a, b):
                        val[g] = (not val[a]) or val[b]
                    case Next():
                        val[g] = free[g]
                    case Until(a, b):
                        v = free[g]
                        # local consistency of the expansion U = b | (a & X U)
                        if val[b] and not v:
                            ok = False
                            break
                        if v and not val[b] and not val[a]:
                            ok = False
                            break
                        val[g] = v
            if ok:
                out.append(val)
        return out

    node_vals: list[dict[Formula, bool]] = []
    node_key: dict[tuple[int, int], int] = {}
    node_state: list[int] = []

    def val_bits(val: dict[Formula, bool]) -> int:
        bits = 0
        for k, g in enumerate(subs):
            if val[g]:
                bits |= 1 << k
        return bits

    for s in range(n):
        for val in assignments(s):
            node_key[(s, val_bits(val))] = len(node_vals)
            node_vals.append(val)
            node_state.append(s)

    nodes = len(node_vals)
    adj: list[list[int]] = [[] for _ in range(nodes)]
    by_state: dict[int, list[int]] = {}
    for u in range(nodes):
        by_state.setdefault(node_state[u], []).append(u)

    def step_ok(a_val: dict[Formula, bool], b_val: dict[Formula, bool]) -> bool:
        for g in temporals:
            if isinstance(g, Next):
                if a_val[g] != b_val[g.body]:
                    return False
            else:  # Until
                want = a_val[g.rhs] or (a_val[g.lhs] and b_val[g])
                if a_val[g] != want:
                    return False
        return True

    for u in range(nodes):
        s = node_state[u]
        mask = succ[s]
        for t in _bits(mask):
            for v in by_state.get(t, ()):
                if step_ok(node_vals[u], node_vals[v]):
                    adj[u].append(v)

    # Tarjan SCC, iterative.
    sccs: list[list[int]] = []
    indexv = [-1] * nodes
    low = [0] * nodes
    onstack = [False] * nodes
    stack: list[int] = []
    counter = 0
    for root in range(nodes):
        if indexv[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            u, pi = work[-1]
            if pi == 0:
                indexv[u] = low[u] = counter
                counter += 1
                stack.append(u)
                onstack[u] = True
            advanced = False
            while pi < len(adj[u]):
                v = adj[u][pi]
                pi += 1
                if indexv[v] == -1:
                    work[-1] = (u, pi)
                    work.append((v, 0))
                    advanced = True
                    break
                if onstack[v]:
                    low[u] = min(low[u], indexv[v])
            if advanced:
                continue
            work.pop()
            if low[u] == indexv[u]:
                comp = []
                while True:
                    w = stack.pop()
                    onstack[w] = False
                    comp.append(w)
                    if w == u:
                        break
                sccs.append(comp)
            if work:
                p, _ = work[-1]
                low[p] = min(low[p], low[u])

    scc_id = [0] * nodes
    for k, comp in enumerate(sccs):
        for u in comp:
            scc_id[u] = k

    fair = [False] * len(sccs)
    for k, comp in enumerate(sccs):
        if len(comp) == 1 and comp[0] not in adj[comp[0]]:
            continue  # trivial SCC, hosts no cycle
        if all(
            any(not node_vals[u][g] or node_vals[u][g.rhs] for u in comp)
            for g in untils
        ):
            fair[k] = True

    # SCCs that can reach a fair SCC; Tarjan emits sinks first, so successor
    # components are always computed before their predecessors.
    scc_good = list(fair)
    for k, comp in enumerate(sccs):
        if scc_good[k]:
            continue
        scc_good[k] = any(
            scc_id[v] != k and scc_good[scc_id[v]] for u in comp for v in adj[u]
        )

    result = 0
    for s in range(n):
        for u in by_state.get(s, ()):
            if node_vals[u].get(theta, False) and scc_good[scc_id[u]]:
                result |= 1 << s
                break
    return result


def exists_path_check(m: KripkeModel, s: int, theta: Formula) -> bool:
    """True iff some infinite path from ``s`` satisfies the path formula,
    whose state subformulas must be plain atoms labeled on the model."""
    if not 0 <= s < m.n_states:
        raise ModelError(f"state {s} out of range")
    mask = exists_path_states_mask(m.n_states, m.succ_masks, m.var_mask, theta)
    return bool(mask >> s & 1)


# ---------------------------------------------------------------------------
# CTL* model checking: recursive labeling, with maximal proper state
# subformulas replaced by fresh atoms before each existential path query.

def mc_ctlstar_mask(n: int, succ: tuple[int, ...], var_mask, f: Formula,
                    memo: dict[Formula, int] | None = None) -> int:
    full = (1 << n) - 1
    memo = {} if memo is None else memo

    def eval_state(g: Formula) -> int:
        hit = memo.get(g)
        if hit is not None:
            return hit
        match g:
            case Var(i):
                out = var_mask(i)
            case Falsum():
                out = 0
            case Implies(a, b) if sort_of(g) is Sort.STATE:
                out = (full & ~eval_state(a)) | eval_state(b)
            case ForAllPaths(body):
                out = full & ~exists_mask(neg(body))
            case Coalition():
                raise FragmentError("coalition operator is not CTL*")
            case _:
                raise SortError(f"path formula in state position: {g}")
        memo[g] = out
        return out

    def exists_mask(theta: Formula) -> int:
        labels: dict[Formula, int] = {}
        next_free = max(variables_of(theta), default=0) + 1

        def abstract(g: Formula) -> Formula:
            nonlocal next_free
            if sort_of(g) is Sort.STATE:
                if isinstance(g, (Var, Falsum)):
                    return g
                known = labels.get(g)
                if known is None:
                    labels[g] = next_free
                    next_free += 1
                return Var(labels[g])
            match g:
                case Implies(a, b):
                    return Implies(abstract(a), abstract(b))
                case Next(b):
                    return Next(abstract(b))
                case Until(a, b):
                    return Until(abstract(a), abstract(b))
                case Always(b):
                    return Always(abstract(b))
            raise AssertionError(g)

        theta_abs = abstract(theta)
        fresh_masks = {idx: eval_state(g) for g, idx in labels.items()}

        def atom_mask(i: int) -> int:
            if i in fresh_masks:
                return fresh_masks[i]
            return var_mask(i)

        return exists_path_states_mask(n, succ, atom_mask, theta_abs)

    return eval_state(f)


def mc_ctlstar(m: KripkeModel, f: Formula) -> frozenset[int]:
    """States satisfying a CTL* state formula (no coalition quantifiers)."""
    if not is_state_formula(f):
        raise SortError("mc_ctlstar requires a state formula")
    mask = mc_ctlstar_mask(m.n_states, m.succ_masks, m.var_mask, f)
    return frozenset(_bits(mask))


# ---------------------------------------------------------------------------
# Submodels.

def restrict_submodel(m: KripkeModel, s0: int, guard: int) -> tuple[KripkeModel, dict[int, int]]:
    """Smallest submodel containing ``s0`` and closed under successors where
    the guard variable holds.  Raises if the result is not serial, which
    signals that the model does not satisfy the guard condition at ``s0``.

    Returns the submodel and the old-state -> new-state index map.
    """
    if not 0 <= s0 < m.n_states:
        raise ModelError(f"state {s0} out of range")
    guard_mask = m.var_mask(guard)
    keep: list[int] = [s0]
    seen = {s0}
    frontier = [s0]
    while frontier:
        x = frontier.pop()
        for y in _bits(m.succ_masks[x] & guard_mask):
            if y not in seen:
                seen.add(y)
                keep.append(y)
                frontier.append(y)
    keep.sort()
    remap = {old: new for new, old in enumerate(keep)}
    edges = frozenset(
        (remap[i], remap[j]) for i, j in m.edges if i in remap and j in remap
    )
    val = {
        var: frozenset(remap[s] for s in states if s in remap)
        for var, states in m.valuation.items()
    }
    names = tuple(m.state_name(old) for old in keep) if m.names else None
    sub = KripkeModel(len(keep), edges, val, names)
    report = validate(sub)
    if not report.ok:
        raise ModelError(
            "restriction is not serial; the model does not satisfy the guard "
            f"condition at state {s0} (stuck states: {report.non_serial_states})"
        )
    return sub, remap


def reachable_submodel(m: KripkeModel, s0: int) -> tuple[KripkeModel, dict[int, int]]:
    """Restriction of the model to the part reachable from ``s0``."""
    keep: list[int] = [s0]
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
    edges = frozenset((remap[i], remap[j]) for i, j in m.edges if i in remap and j in remap)
    val = {
        var: frozenset(remap[s] for s in states if s in remap)
        for var, states in m.valuation.items()
    }
    names = tuple(m.state_name(old) for old in keep) if m.names else None
    return KripkeModel(len(keep), edges, val, names), remap


# ---------------------------------------------------------------------------
# Serialization.

def kripke_to_json(m: KripkeModel) -> dict:
    out = {
        "states": m.n_states,
        "edges": sorted([i, j] for i, j in m.edges),
        "val": {str(var): sorted(states) for var, states in sorted(m.valuation.items()) if states},
    }
    if m.names:
        out["names"] = list(m.names)
    return out


def kripke_from_json(data: dict) -> KripkeModel:
    try:
        n = int(data["states"])
        edges = frozenset((int(i), int(j)) for i, j in data["edges"])
        val = {int(v): frozenset(int(s) for s in states) for v, states in data.get("val", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"malformed Kripke model JSON: {exc}") from exc
    names = tuple(data["names"]) if "names" in data else None
    return KripkeModel(n, edges, val, names)


def kripke_to_dot(m: KripkeModel, designated: int | None = None) -> str:
    lines = ["digraph kripke {"]
    for s in range(m.n_states):
        true_vars = sorted(var for var, states in m.valuation.items() if s in states)
        label = m.state_name(s)
        if true_vars:
            label += "\\n" + " ".join(f"p{v}" for v in true_vars)
        shape = "doublecircle" if s == designated else "circle"
        lines.append(f'  s{s} [label="{label}", shape={shape}];')
    for i, j in sorted(m.edges):
        lines.append(f"  s{i} -> s{j};")
    lines.append("}")
    return "\n".join(lines)
