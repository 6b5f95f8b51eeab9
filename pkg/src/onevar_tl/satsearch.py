"""Bounded brute-force satisfiability over serial Kripke models and small
concurrent game models.

A SAT verdict carries a witness that re-checks under the corresponding model
checker; absence of a witness within the bound proves nothing, so the other
verdict is UNKNOWN, never UNSAT.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

from .cgs import ConcurrentGameModel, mc_atl_mask
from .kripke import KripkeModel, mc_ctl_mask, mc_ctlstar_mask
from .syntax import (
    AgentSet,
    Formula,
    FragmentError,
    LogicId,
    is_atl_formula,
    is_ctl_formula,
    is_ctlstar_formula,
    variables_of,
)


class SearchBudgetExceeded(RuntimeError):
    """Enumeration stopped before the bound was exhausted."""


@dataclass
class SatVerdict:
    status: str  # "SAT" | "UNKNOWN"
    witness: tuple[KripkeModel | ConcurrentGameModel, int] | None
    models_examined: int
    bound: dict[str, int]
    elapsed_s: float = 0.0

    @property
    def is_sat(self) -> bool:
        return self.status == "SAT"


# ---------------------------------------------------------------------------
# Relation enumeration.  A relation on n states is a tuple of successor
# bitmasks; seriality means every mask is non-zero.  Canonical pruning keeps
# one representative per relabeling orbit (valuations still range freely,
# which preserves completeness of the search).

_relation_cache: dict[tuple[int, bool], list[tuple[int, ...]]] = {}


def _permute_relation(rel: tuple[int, ...], perm: tuple[int, ...]) -> tuple[int, ...]:
    n = len(rel)
    out = [0] * n
    for i in range(n):
        mask = rel[i]
        new_mask = 0
        for j in range(n):
            if mask >> j & 1:
                new_mask |= 1 << perm[j]
        out[perm[i]] = new_mask
    return tuple(out)


def serial_relations(n: int, canonical_only: bool = False) -> list[tuple[int, ...]]:
    key = (n, canonical_only)
    cached = _relation_cache.get(key)
    if cached is not None:
        return cached
    full = (1 << n) - 1
    rels = list(itertools.product(range(1, full + 1), repeat=n))
    if canonical_only and n > 1:
        perms = list(itertools.permutations(range(n)))[1:]
        keep = []
        for rel in rels:
            if all(rel <= _permute_relation(rel, p) for p in perms):
                keep.append(rel)
        rels = keep
    _relation_cache[key] = rels
    return rels


def enumerate_kripke(n_states: int, variables: frozenset[int] | tuple[int, ...],
                     canonical_only: bool = False) -> Iterator[KripkeModel]:
    """All serial models on exactly ``n_states`` states over the given
    variables, relations in lexicographic successor-mask order, valuations
    innermost."""
    if n_states < 1:
        raise ValueError("need at least one state")
    var_list = sorted(variables)
    full = (1 << n_states) - 1
    for rel in serial_relations(n_states, canonical_only):
        edges = frozenset(
            (i, j) for i in range(n_states) for j in range(n_states) if rel[i] >> j & 1
        )
        for assignment in itertools.product(range(full + 1), repeat=len(var_list)):
            val = {
                v: frozenset(s for s in range(n_states) if mask >> s & 1)
                for v, mask in zip(var_list, assignment)
            }
            yield KripkeModel(n_states, edges, val)


def _first_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def _search_relation_block(args) -> tuple[int, int, tuple[int, ...], int, int] | tuple[int, None]:
    """Scan one relation with all valuations; returns the first hit."""
    rel, n, var_list, checker, f = args
    examined = 0
    full = (1 << n) - 1
    for assignment in itertools.product(range(full + 1), repeat=len(var_list)):
        examined += 1
        masks = dict(zip(var_list, assignment))
        sat_mask = checker(n, rel, lambda i: masks.get(i, 0), f)
        if sat_mask:
            return examined, (rel, assignment, _first_bit(sat_mask))
    return examined, None


def bounded_sat(f: Formula, logic: LogicId, max_states: int,
                canonical_only: bool = True, jobs: int = 1) -> SatVerdict:
    """Search all serial models with up to ``max_states`` states for one
    satisfying ``f`` at some state."""
    if logic not in (LogicId.CTL, LogicId.CTLSTAR):
        raise FragmentError("bounded_sat handles ctl and ctlstar; use bounded_sat_cgs")
    if logic is LogicId.CTL:
        if not is_ctl_formula(f):
            raise FragmentError("formula is not in the CTL fragment")
        checker = mc_ctl_mask
    else:
        if not is_ctlstar_formula(f):
            raise FragmentError("formula is not a CTL* state formula")
        checker = mc_ctlstar_mask
    var_list = tuple(sorted(variables_of(f)))
    examined = 0
    t0 = time.perf_counter()
    for n in range(1, max_states + 1):
        rels = serial_relations(n, canonical_only and n > 1)
        blocks = ((rel, n, var_list, checker, f) for rel in rels)
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = pool.map(_search_relation_block, blocks, chunksize=64)
                for count, hit in results:
                    examined += count
                    if hit is not None:
                        model, state = _build_witness(n, var_list, hit)
                        return SatVerdict("SAT", (model, state), examined,
                                          {"max_states": max_states},
                                          time.perf_counter() - t0)
        else:
            for block in blocks:
                count, hit = _search_relation_block(block)
                examined += count
                if hit is not None:
                    model, state = _build_witness(n, var_list, hit)
                    return SatVerdict("SAT", (model, state), examined,
                                      {"max_states": max_states},
                                      time.perf_counter() - t0)
    return SatVerdict("UNKNOWN", None, examined, {"max_states": max_states},
                      time.perf_counter() - t0)


def _build_witness(n: int, var_list: tuple[int, ...], hit) -> tuple[KripkeModel, int]:
    rel, assignment, state = hit
    edges = frozenset((i, j) for i in range(n) for j in range(n) if rel[i] >> j & 1)
    val = {
        v: frozenset(s for s in range(n) if mask >> s & 1)
        for v, mask in zip(var_list, assignment)
    }
    return KripkeModel(n, edges, val), state


# ---------------------------------------------------------------------------
# Concurrent game model enumeration.
#
# Availability is kept full for every agent: duplicating actions never
# changes what coalitions can force, so restricting availability cannot make
# more formulas satisfiable within the same state/action bounds.

def enumerate_cgs(agents: AgentSet, n_states: int, n_actions: int,
                  variables: frozenset[int] | tuple[int, ...]) -> Iterator[ConcurrentGameModel]:
    if n_states < 1 or n_actions < 1:
        raise ValueError("need at least one state and one action")
    k = agents.k
    actions = tuple(chr(ord("a") + i) for i in range(n_actions))
    available = {(a, s): tuple(range(n_actions))
                 for a in range(1, k + 1) for s in range(n_states)}
    profiles = list(itertools.product(range(n_actions), repeat=k))
    var_list = sorted(variables)
    full = (1 << n_states) - 1
    keys = [(s, p) for s in range(n_states) for p in profiles]
    for images in itertools.product(range(n_states), repeat=len(keys)):
        delta = {key: image for key, image in zip(keys, images)}
        for assignment in itertools.product(range(full + 1), repeat=len(var_list)):
            val = {
                v: frozenset(s for s in range(n_states) if mask >> s & 1)
                for v, mask in zip(var_list, assignment)
            }
            yield ConcurrentGameModel(k, n_states, actions, dict(available), delta, val)


def bounded_sat_cgs(f: Formula, agents: AgentSet, max_states: int, max_actions: int,
                    budget: int | None = None) -> SatVerdict:
    """Search small game models (sizes laddered, action counts inner) for a
    state satisfying the ATL formula.  ``budget`` caps examined models; when
    it trips, the search raises instead of answering UNKNOWN."""
    if not is_atl_formula(f):
        raise FragmentError("bounded_sat_cgs requires an ATL-fragment formula")
    var_list = tuple(sorted(variables_of(f)))
    examined = 0
    t0 = time.perf_counter()
    bound = {"max_states": max_states, "max_actions": max_actions}
    for n in range(1, max_states + 1):
        for n_act in range(1, max_actions + 1):
            for m in enumerate_cgs(agents, n, n_act, var_list):
                examined += 1
                if budget is not None and examined > budget:
                    raise SearchBudgetExceeded(
                        f"examined {examined - 1} models without exhausting the bound")
                mask = mc_atl_mask(m, f)
                if mask:
                    return SatVerdict("SAT", (m, _first_bit(mask)), examined, bound,
                                      time.perf_counter() - t0)
    return SatVerdict("UNKNOWN", None, examined, bound, time.perf_counter() - t0)
