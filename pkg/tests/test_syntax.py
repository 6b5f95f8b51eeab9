import pytest
from hypothesis import given, settings, strategies as st

from onevar_tl.syntax import (
    FALSE,
    AgentSet,
    Always,
    Coalition,
    ForAllPaths,
    FragmentError,
    Implies,
    LogicId,
    Next,
    ParseError,
    SortError,
    Until,
    Var,
    af,
    ag,
    au,
    ax,
    classify,
    conj,
    ctl_to_atl,
    disj,
    eu,
    ex,
    expand_derived,
    fold_variable_free,
    format_formula,
    is_ctl_formula,
    neg,
    parse,
    substitute,
    substitute_all,
    top,
    variables_of,
)

CTL = LogicId.CTL
CTLSTAR = LogicId.CTLSTAR
ATL = LogicId.ATL
ATLSTAR = LogicId.ATLSTAR


class TestParse:
    def test_implication(self):
        assert parse("p1 -> p2", CTLSTAR) == Implies(Var(1), Var(2))

    def test_ag_expands_through_negated_existential_until(self):
        got = parse("A G p1", CTL)
        # not E(true U not p1), with E itself a negated universal
        ef_not_p1 = neg(ForAllPaths(neg(Until(top(), neg(Var(1))))))
        assert got == neg(ef_not_p1)

    def test_coalition_next(self):
        got = parse("<<1,2>> X p1", ATL, AgentSet(2))
        assert got == Coalition(frozenset({1, 2}), Next(Var(1)))

    def test_empty_and_grand_coalition(self):
        assert parse("<<>> G p1", ATL, AgentSet(3)) == Coalition(frozenset(), Always(Var(1)))
        assert parse("<<*>> X p1", ATL, AgentSet(3)) == Coalition(
            frozenset({1, 2, 3}), Next(Var(1)))

    def test_agent_out_of_range(self):
        with pytest.raises(FragmentError):
            parse("<<3>> X p1", ATL, AgentSet(2))

    def test_unpaired_quantifier_rejected_in_ctl(self):
        with pytest.raises(SortError):
            parse("A (X p1 -> p2)", CTL)
        with pytest.raises(SortError):
            parse("A p1", CTL)

    def test_path_formula_rejected_at_top_level(self):
        with pytest.raises(SortError):
            parse("X p1", CTLSTAR)

    def test_coalition_rejected_in_branching_logics(self):
        with pytest.raises(FragmentError):
            parse("<<1>> X p1", CTL)

    def test_syntax_error_carries_position(self):
        with pytest.raises(ParseError) as err:
            parse("p1 -> ->", CTLSTAR)
        assert err.value.position == 6

    def test_star_quantifier_over_mixed_path_formula(self):
        got = parse("A (X p1 -> p2)", CTLSTAR)
        assert got == ForAllPaths(Implies(Next(Var(1)), Var(2)))

    def test_precedence(self):
        assert parse("p1 | p2 & p3", CTLSTAR) == disj(Var(1), conj(Var(2), Var(3)))
        assert parse("p1 -> p2 -> p3", CTLSTAR) == Implies(Var(1), Implies(Var(2), Var(3)))
        assert parse("!p1 & p2", CTLSTAR) == conj(neg(Var(1)), Var(2))


class TestPrint:
    def test_falsum(self):
        assert format_formula(FALSE) == "false"

    def test_coalition_always(self):
        assert format_formula(Coalition(frozenset(), Always(Var(1)))) == "<<>> G p1"

    def test_negation_prints_as_core_implication(self):
        assert format_formula(Implies(Var(1), FALSE)) == "p1 -> false"

    @pytest.mark.parametrize("text,logic", [
        ("A (p1 U p2)", CTL),
        ("E (p1 U p2)", CTL),
        ("A G (p1 -> E X p2)", CTL),
        ("E (p1 U X (p2 -> G p1))", CTLSTAR),
        ("<<1>> ((p1 | p2) U p2) & <<>> G p1", ATL),
        ("<<1,2>> (X p1 U <<2>> G p2)", ATLSTAR),
    ])
    def test_round_trip_examples(self, text, logic):
        f = parse(text, logic, AgentSet(2))
        assert parse(format_formula(f), logic, AgentSet(2)) == f


@st.composite
def ctl_formulas(draw, max_depth=4):
    depth = draw(st.integers(0, max_depth))

    def go(d):
        if d == 0:
            return draw(st.sampled_from([Var(1), Var(2), Var(3), FALSE, top()]))
        op = draw(st.sampled_from(
            ["not", "and", "or", "imp", "ax", "ex", "au", "eu", "af", "ag"]))
        if op == "not":
            return neg(go(d - 1))
        if op in ("and", "or", "imp"):
            return {"and": conj, "or": disj, "imp": Implies}[op](go(d - 1), go(d - 1))
        if op in ("ax", "ex", "af", "ag"):
            return {"ax": ax, "ex": ex, "af": af, "ag": ag}[op](go(d - 1))
        return (au if op == "au" else eu)(go(d - 1), go(d - 1))

    return go(depth)


class TestProperties:
    @given(ctl_formulas())
    @settings(max_examples=120, deadline=None)
    def test_round_trip(self, f):
        assert parse(format_formula(f), CTL) == f

    @given(ctl_formulas(), st.integers(1, 3))
    @settings(max_examples=80, deadline=None)
    def test_substitute_absent_variable_is_identity(self, f, v):
        if v not in variables_of(f):
            assert substitute(f, v, top()) == f

    @given(ctl_formulas())
    @settings(max_examples=80, deadline=None)
    def test_substitution_composition(self, f):
        # g contains neither p1 nor p2, so the two substitutions commute
        g = ax(FALSE)
        one_then_two = substitute(substitute(f, 1, g), 2, g)
        both = substitute_all(f, {1: g, 2: g})
        assert one_then_two == both

    @given(ctl_formulas())
    @settings(max_examples=100, deadline=None)
    def test_classify_size_positive(self, f):
        c = classify(f)
        assert c.size >= 1
        assert c.is_ctl


class TestSubstitute:
    def test_basic(self):
        assert substitute(Implies(Var(1), Var(2)), 1, top()) == Implies(top(), Var(2))

    def test_absent(self):
        assert substitute(Var(1), 2, FALSE) == Var(1)

    def test_under_quantifier(self):
        f = ag(Var(1))
        got = substitute(f, 1, ex(Var(1)))
        assert got == ag(ex(Var(1)))

    def test_rejects_path_replacement(self):
        with pytest.raises(SortError):
            substitute(Var(1), 1, Next(Var(1)))


class TestExpandDerived:
    def test_not(self):
        assert expand_derived("not", Var(1)) == Implies(Var(1), FALSE)

    def test_top(self):
        assert expand_derived("top") == Implies(FALSE, FALSE)

    def test_ex_is_negated_universal_next(self):
        assert expand_derived("ex", Var(1)) == neg(ForAllPaths(Next(neg(Var(1)))))

    def test_always_is_primitive_only_in_alternating_logics(self):
        assert expand_derived("always", Var(1), logic=ATL) == Always(Var(1))
        branching = expand_derived("always", Var(1), logic=CTLSTAR)
        assert branching == neg(Until(top(), neg(Var(1))))

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            expand_derived("sometimes", Var(1))


class TestClassify:
    def test_variable(self):
        c = classify(Var(1))
        assert c.variables == frozenset({1}) and c.is_ctl and c.size == 1

    def test_paired_until_is_ctl(self):
        assert classify(parse("A (p1 U p2)", CTL)).is_ctl

    def test_lone_next_under_quantifier_is_ctl(self):
        assert is_ctl_formula(parse("A X p1", CTLSTAR))
        assert not is_ctl_formula(parse("A (X p1 -> p2)", CTLSTAR))

    def test_atl_formula(self):
        c = classify(parse("<<1>> G p1", ATL, AgentSet(2)))
        assert c.is_atl and not c.is_ctl


class TestFoldVariableFree:
    def test_falsum(self):
        assert fold_variable_free(FALSE) is False

    def test_top(self):
        assert fold_variable_free(parse("false -> false", CTLSTAR)) is True

    def test_always_true(self):
        assert fold_variable_free(parse("A G true", CTLSTAR)) is True

    def test_rejects_variables(self):
        with pytest.raises(ValueError):
            fold_variable_free(Var(1))


class TestCtlToAtl:
    def test_ax(self):
        got = ctl_to_atl(parse("A X p1", CTL), AgentSet(2))
        assert got == Coalition(frozenset(), Next(Var(1)))

    def test_exists_until_maps_to_grand_coalition(self):
        got = ctl_to_atl(parse("E (true U p1)", CTL), AgentSet(2))
        assert got == Coalition(frozenset({1, 2}), Until(top(), Var(1)))

    def test_variable_unchanged(self):
        assert ctl_to_atl(Var(1), AgentSet(1)) == Var(1)

    def test_rejects_non_ctl(self):
        with pytest.raises(FragmentError):
            ctl_to_atl(parse("<<>> X p1", ATL, AgentSet(1)), AgentSet(1))
