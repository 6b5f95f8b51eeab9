import pytest

from onevar_tl.cgs import mc_atl, validate_cgs
from onevar_tl.embedding import (
    Flavor,
    canonicalize_variables,
    chi,
    embed,
    gadget_formula,
    gadget_model_cgs,
    gadget_model_kripke,
    hat_top_collapse,
    prime,
    theta,
    translation_to_json,
    var_marker,
    witness_model_cgs,
    witness_model_forward,
)
from onevar_tl.generators import (
    cgs_with_global_guard,
    random_atl_formula,
    random_ctl_formula,
    random_serial_kripke,
    with_global_guard,
)
from onevar_tl.kripke import KripkeModel, ModelError, mc_ctl, mc_ctlstar, validate
from onevar_tl.satsearch import bounded_sat
from onevar_tl.syntax import (
    AgentSet,
    Always,
    Coalition,
    ForAllPaths,
    FragmentError,
    Implies,
    LogicId,
    Next,
    Until,
    Var,
    always_derived,
    ag,
    ax,
    classify,
    conj,
    ex,
    iff,
    neg,
    parse,
    size_of,
    substitute_all,
    variables_of,
)

AG2 = AgentSet(2)


class TestPrime:
    def test_ctlstar_forall_gets_box_guard_antecedent(self):
        f = ForAllPaths(Next(Var(1)))
        got = prime(f, LogicId.CTLSTAR, 2)
        assert got == ForAllPaths(Implies(always_derived(Var(2)), Next(Var(1))))

    def test_ctl_next_gets_state_guard(self):
        got = prime(ax(Var(1)), LogicId.CTL, 2)
        assert got == ax(Implies(Var(2), Var(1)))

    def test_variable_unchanged(self):
        for logic in (LogicId.CTL, LogicId.CTLSTAR, LogicId.ATL, LogicId.ATLSTAR):
            assert prime(Var(1), logic, 2) == Var(1)

    def test_ctl_existential_until_guards_the_goal(self):
        f = parse("E (p1 U p2)", LogicId.CTL)
        got = prime(f, LogicId.CTL, 3)
        want = neg(ForAllPaths(neg(Until(Var(1), conj(Var(3), Var(2))))))
        assert got == want

    def test_atlstar_nonempty_coalition_conjunct(self):
        f = Coalition(frozenset({1}), Next(Var(1)))
        got = prime(f, LogicId.ATLSTAR, 2)
        assert got == Coalition(frozenset({1}),
                                conj(Always(Var(2)), Next(Var(1))))

    def test_atlstar_empty_coalition_antecedent(self):
        f = Coalition(frozenset(), Next(Var(1)))
        got = prime(f, LogicId.ATLSTAR, 2)
        assert got == Coalition(frozenset(),
                                Implies(Always(Var(2)), Next(Var(1))))

    def test_guard_occurring_raises(self):
        with pytest.raises(ValueError):
            prime(Var(2), LogicId.CTL, 2)

    def test_logic_mismatch_raises(self):
        with pytest.raises(FragmentError):
            prime(parse("<<>> X p1", LogicId.ATL, AG2), LogicId.CTL, 2)


class TestTheta:
    def test_branching_shape(self):
        g = Var(2)
        assert theta(LogicId.CTL, 2) == conj(g, ag(iff(ex(g), g)))
        assert theta(LogicId.CTLSTAR, 2) == theta(LogicId.CTL, 2)

    def test_alternating_shape(self):
        g = Var(2)
        step = Coalition(frozenset({1, 2}), Next(g))
        want = conj(g, Coalition(frozenset(), Always(iff(step, g))))
        assert theta(LogicId.ATL, 2, AG2) == want

    def test_single_variable(self):
        assert classify(theta(LogicId.CTL, 7)).variables == frozenset({7})
        assert classify(theta(LogicId.ATL, 3, AG2)).variables == frozenset({3})

    def test_theta_is_inside_its_fragment(self):
        assert classify(theta(LogicId.CTL, 2)).is_ctl
        assert classify(theta(LogicId.ATL, 2, AG2)).is_atl


class TestChi:
    def test_base_case(self):
        assert chi(0, Flavor.BRANCHING) == ag(Var(1))
        assert chi(0, Flavor.ALTERNATING, agents=AG2) == Coalition(
            frozenset(), Always(Var(1)))

    def test_inductive_step(self):
        p = Var(1)
        assert chi(1, Flavor.BRANCHING) == conj(p, ex(conj(neg(p), ex(ag(p)))))

    def test_size_linear(self):
        sizes = [size_of(chi(k, Flavor.BRANCHING)) for k in range(1, 7)]
        deltas = {sizes[i + 1] - sizes[i] for i in range(len(sizes) - 1)}
        assert len(deltas) == 1  # constant increment per level


class TestGadgetFormula:
    def test_branching_structure(self):
        p = Var(1)
        want = conj(chi(1, Flavor.BRANCHING), ex(ag(neg(p))))
        assert gadget_formula(1, Flavor.BRANCHING) == want

    def test_markers_wrap_the_root_formula(self):
        assert var_marker(2, Flavor.BRANCHING) == ex(gadget_formula(2, Flavor.BRANCHING))
        grand = frozenset({1, 2})
        assert var_marker(2, Flavor.ALTERNATING, agents=AG2) == Coalition(
            grand, Next(gadget_formula(2, Flavor.ALTERNATING, agents=AG2)))

    def test_these_are_single_variable_formulas(self):
        for m in (1, 3):
            assert classify(gadget_formula(m, Flavor.BRANCHING)).variables == frozenset({1})


def _independent_chi1_states(m: KripkeModel) -> frozenset[int]:
    """chi_1 = p and EX(not p and EX AG p), decided by plain graph search."""
    p = m.valuation.get(1, frozenset())

    def reachable(s):
        seen = {s}
        stack = [s]
        while stack:
            x = stack.pop()
            for y in m.successors(x):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    ag_p = {s for s in range(m.n_states) if reachable(s) <= p}
    ex_ag_p = {s for s in range(m.n_states) if m.successors(s) & ag_p}
    inner = {s for s in ex_ag_p if s not in p}
    return frozenset(s for s in p if m.successors(s) & inner)


class TestGadgetModelKripke:
    def test_shape_m1(self):
        g = gadget_model_kripke(1)
        assert g.n_states == 4
        assert len(g.edges) == 7  # 2 tree + 1 chain + 4 loops
        assert g.valuation[1] == frozenset({0, 3})

    def test_serial_for_all_m(self):
        for m in (1, 2, 3, 5):
            assert validate(gadget_model_kripke(m)).ok
            assert validate(gadget_model_kripke(m, root_loop=False)).ok

    def test_root_characterization(self):
        for k in range(1, 6):
            gk = gadget_model_kripke(k)
            for m in range(1, 6):
                got = mc_ctl(gk, gadget_formula(m, Flavor.BRANCHING))
                assert got == (frozenset({0}) if k == m else frozenset()), (k, m)

    def test_chi1_against_independent_graph_oracle(self):
        for k in (1, 2, 3):
            g = gadget_model_kripke(k)
            f = chi(1, Flavor.BRANCHING)
            assert mc_ctlstar(g, f) == _independent_chi1_states(g)
            assert mc_ctl(g, f) == _independent_chi1_states(g)


class TestGadgetModelCgs:
    def test_root_characterization(self):
        for k in range(1, 5):
            gk = gadget_model_cgs(k, AG2)
            for m in range(1, 5):
                got = mc_atl(gk, gadget_formula(m, Flavor.ALTERNATING, agents=AG2))
                assert got == (frozenset({0}) if k == m else frozenset()), (k, m)

    def test_sink_traps_all_paths(self):
        g = gadget_model_cgs(1, AG2)
        f = Coalition(frozenset(), Always(neg(Var(1))))
        assert 1 in mc_atl(g, f)

    def test_delta_total(self):
        assert validate_cgs(gadget_model_cgs(3, AG2)).ok

    def test_empty_action_pool_rejected(self):
        with pytest.raises(ValueError):
            gadget_model_cgs(1, AG2, ())


class TestCanonicalize:
    def test_first_occurrence_order(self):
        f = Implies(Var(4), Var(2))
        g, mapping = canonicalize_variables(f)
        assert mapping == {4: 1, 2: 2}
        assert g == Implies(Var(1), Var(2))

    def test_identity_when_already_canonical(self):
        f = Implies(Var(1), Var(2))
        g, mapping = canonicalize_variables(f)
        assert g is f and mapping == {1: 1, 2: 2}


class TestEmbed:
    def test_single_variable_source(self):
        tr = embed(Var(1), LogicId.CTL)
        assert tr.n == 1 and tr.guard == 2
        assert tr.hat == conj(tr.theta, Var(1))
        assert tr.sigma[1] == var_marker(1, Flavor.BRANCHING)
        assert tr.sigma[2] == var_marker(2, Flavor.BRANCHING)
        assert classify(tr.star).variables == frozenset({1})

    def test_star_is_sigma_of_hat(self, rng):
        for _ in range(20):
            f = random_ctl_formula(rng, 3, 3)
            tr = embed(f, LogicId.CTL)
            assert tr.star == substitute_all(tr.hat, tr.sigma)
            assert classify(tr.star).variables == frozenset({tr.out_var})

    def test_star_stays_in_fragment(self, rng):
        for _ in range(10):
            tr = embed(random_ctl_formula(rng, 2, 3), LogicId.CTL)
            assert classify(tr.star).is_ctl
            tr2 = embed(random_atl_formula(rng, 2, 3, AG2), LogicId.ATL, AG2)
            assert classify(tr2.star).is_atl

    def test_contradiction_star_has_no_small_model(self):
        tr = embed(conj(Var(1), neg(Var(1))), LogicId.CTL)
        verdict = bounded_sat(tr.star, LogicId.CTL, 3)
        assert verdict.status == "UNKNOWN"

    def test_json_serialization(self):
        tr = embed(Var(1), LogicId.CTL)
        data = translation_to_json(tr)
        assert data["n"] == 1 and data["guard"] == 2
        assert set(data["sigma"]) == {"p1", "p2"}
        assert data["sizes"]["star"] >= data["sizes"]["source"]


class TestHatTopCollapse:
    def test_guard_absent(self, rng):
        f = random_ctl_formula(rng, 2, 3)
        tr = embed(f, LogicId.CTL)
        assert tr.guard not in variables_of(hat_top_collapse(tr))

    def test_equivalent_to_source_for_bare_variable(self):
        tr = embed(Var(1), LogicId.CTL)
        collapsed = hat_top_collapse(tr)
        for m in _exhaustive_models_3(1):
            assert mc_ctl(m, collapsed) == mc_ctl(m, Var(1))

    def test_restores_original_variable_indices(self):
        f = Implies(Var(5), Var(3))
        tr = embed(f, LogicId.CTL)
        assert variables_of(hat_top_collapse(tr)) == frozenset({5, 3})


def _exhaustive_models_3(n_vars):
    from onevar_tl.satsearch import enumerate_kripke
    for n in (1, 2, 3):
        yield from enumerate_kripke(n, tuple(range(1, n_vars + 1)))


class TestWitnessForward:
    def test_explicit_single_state_construction(self):
        tr = embed(Var(1), LogicId.CTL)
        m = KripkeModel(1, frozenset({(0, 0)}),
                        {1: frozenset({0}), 2: frozenset({0})})
        w, d = witness_model_forward(m, tr, 0)
        # original state plus gadgets of sizes 4 and 6
        assert w.n_states == 1 + 4 + 6
        assert (0, 1) in w.edges and (0, 5) in w.edges  # links to both roots
        assert d == 0
        assert d in mc_ctl(w, tr.star)

    def test_markers_recover_the_original_valuation(self, rng):
        for _ in range(10):
            f = conj(Var(1), Var(2)) if rng.random() < 0.5 else Implies(Var(1), Var(2))
            tr = embed(f, LogicId.CTL)
            m = with_global_guard(
                random_serial_kripke(rng, rng.randint(1, 4), (1, 2)), tr.guard)
            w, d = witness_model_forward(m, tr, 0)
            reach, remap = None, None
            from onevar_tl.kripke import reachable_submodel
            sub, remap = reachable_submodel(m, 0)
            for i in (1, 2):
                marker_states = mc_ctl(w, tr.sigma[i])
                originals = frozenset(s for s in marker_states if s < sub.n_states)
                assert originals == sub.valuation.get(i, frozenset())

    def test_requires_global_guard(self):
        tr = embed(Var(1), LogicId.CTL)
        m = KripkeModel(2, frozenset({(0, 1), (1, 1)}),
                        {1: frozenset({0}), 2: frozenset({0})})
        with pytest.raises(ModelError):
            witness_model_forward(m, tr, 0)

    def test_next_under_quantifier_regression(self):
        # a witness whose universal next obligation must survive the
        # appended guard gadget
        f = parse("A X p1", LogicId.CTL)
        tr = embed(f, LogicId.CTL)
        m = KripkeModel(1, frozenset({(0, 0)}),
                        {1: frozenset({0}), 2: frozenset({0})})
        w, d = witness_model_forward(m, tr, 0)
        assert d in mc_ctl(w, tr.star)

    def test_deferred_universal_until_regression(self):
        # the until fires one step in; escape paths into the gadgets must
        # not refute it
        f = parse("A (true U p1)", LogicId.CTL)
        tr = embed(f, LogicId.CTL)
        m = KripkeModel(2, frozenset({(0, 1), (1, 1)}),
                        {1: frozenset({1}), 2: frozenset({0, 1})})
        w, d = witness_model_forward(m, tr, 0)
        assert d in mc_ctl(w, tr.star)

    def test_ctlstar_witness(self):
        f = parse("A X p1", LogicId.CTLSTAR)
        tr = embed(f, LogicId.CTLSTAR)
        m = KripkeModel(1, frozenset({(0, 0)}),
                        {1: frozenset({0}), 2: frozenset({0})})
        w, d = witness_model_forward(m, tr, 0)
        assert d in mc_ctlstar(w, tr.star)


class TestWitnessCgs:
    def test_unanimous_extra_action_reaches_the_root(self):
        tr = embed(Var(1), LogicId.ATL, AG2)
        m = cgs_with_global_guard(
            gadget_to_trivial_cgs(), tr.guard)
        w, d = witness_model_cgs(m, tr, 0)
        assert validate_cgs(w).ok
        # the designated state can force the variable marker of p1
        assert d in mc_atl(w, tr.sigma[1])
        assert d in mc_atl(w, tr.star)

    def test_requires_matching_agents(self):
        tr = embed(Var(1), LogicId.ATL, AG2)
        one_agent = gadget_to_trivial_cgs(agents=1)
        with pytest.raises(ModelError):
            witness_model_cgs(cgs_with_global_guard(one_agent, tr.guard), tr, 0)

    def test_empty_coalition_until_regression(self):
        # all-paths until with the goal one step away; the unanimous jump
        # actions must not provide counterexample paths
        from onevar_tl.cgs import ConcurrentGameModel
        f = parse("<<>> (true U p1)", LogicId.ATL, AG2)
        tr = embed(f, LogicId.ATL, AG2)
        avail = {(a, s): (0,) for a in (1, 2) for s in (0, 1)}
        delta = {(0, (0, 0)): 1, (1, (0, 0)): 1}
        m = cgs_with_global_guard(
            ConcurrentGameModel(2, 2, ("a",), avail, delta, {1: frozenset({1})}),
            tr.guard)
        assert 0 in mc_atl(m, tr.hat)
        w, d = witness_model_cgs(m, tr, 0)
        assert d in mc_atl(w, tr.star)


def gadget_to_trivial_cgs(agents: int = 2):
    from onevar_tl.cgs import ConcurrentGameModel
    avail = {(a, 0): (0,) for a in range(1, agents + 1)}
    delta = {(0, tuple(0 for _ in range(agents))): 0}
    return ConcurrentGameModel(agents, 1, ("a",), avail, delta, {1: frozenset({0})})
