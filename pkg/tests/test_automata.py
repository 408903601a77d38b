"""Core data model and language machinery tests."""

import pytest

from opacheck import (
    Automaton,
    Event,
    ObserverBlowup,
    PreconditionViolated,
    classify,
    inclusion_modulo_projection,
    intersection_nonempty_modulo_projection,
    observer,
    product,
    project,
    project_string,
    realize_observation,
    trim,
    unobservable_reach,
)
from opacheck.oracles import enum_languages_projected, observation_feasible

from helpers import ALPHABET_2OBS_1UO, make_rng, rand_automaton


def aut(states, alphabet, transitions, initial, marked=()):
    return Automaton(tuple(states), alphabet, set(transitions), set(initial), set(marked))


AB = (Event("a"), Event("b"))
A_UO = (Event("a", observable=False),)


class TestValidation:
    def test_event_name_must_be_nonempty(self):
        with pytest.raises(ValueError):
            Event("")

    def test_duplicate_states_rejected(self):
        with pytest.raises(ValueError):
            aut(["p", "p"], AB, [], ["p"])

    def test_duplicate_event_names_rejected(self):
        with pytest.raises(ValueError):
            aut(["p"], (Event("a"), Event("a", observable=False)), [], ["p"])

    def test_undeclared_transition_state_rejected(self):
        with pytest.raises(ValueError):
            aut(["p"], AB, [("p", "a", "q")], ["p"])

    def test_undeclared_transition_event_rejected(self):
        with pytest.raises(ValueError):
            aut(["p"], AB, [("p", "c", "p")], ["p"])

    def test_initial_outside_states_rejected(self):
        with pytest.raises(ValueError):
            aut(["p"], AB, [], ["q"])


class TestUnobservableReach:
    def test_all_observable_is_identity(self):
        a = aut(["p", "q"], AB, [("p", "a", "q")], ["p"])
        assert unobservable_reach(a, {"p"}) == {"p"}

    def test_transitive_closure_of_chain(self):
        a = aut(["q1", "q2", "q3"], A_UO, [("q1", "a", "q2"), ("q2", "a", "q3")], ["q1"])
        assert unobservable_reach(a, {"q1"}) == {"q1", "q2", "q3"}

    def test_chained_initial_states_close_to_whole_set(self):
        # a chain of unobservable transitions over former initial states makes
        # the closure of the first one cover them all
        states = [f"q{i}" for i in range(1, 5)]
        alphabet = (Event("x"), Event("a", observable=False))
        chain = {(f"q{i}", "a", f"q{i + 1}") for i in range(1, 4)}
        a = aut(states, alphabet, chain, ["q1"])
        assert unobservable_reach(a, {"q1"}) >= set(states)

    def test_undeclared_seed_rejected(self):
        a = aut(["p"], AB, [], ["p"])
        with pytest.raises(PreconditionViolated):
            unobservable_reach(a, {"zz"})


class TestProject:
    def test_fully_observable_keeps_structure(self):
        a = aut(["p", "q"], AB, [("p", "a", "q"), ("q", "b", "p")], ["p"], ["q"])
        p = project(a)
        assert p.transitions == a.transitions
        assert p.alphabet == a.alphabet

    def test_unobservable_transition_is_erased(self):
        alphabet = (Event("a"), Event("b", observable=False))
        a = aut(["t", "t2"], alphabet, [("t", "b", "t2")], ["t"])
        p = project(a)
        assert ("t", "", "t2") in p.transitions
        assert [e.name for e in p.alphabet] == ["a"]

    def test_projected_membership_drops_unobservable(self):
        # string a.b.a with b unobservable looks like "aa"
        alphabet = (Event("a"), Event("b", observable=False))
        a = aut(
            ["0", "1", "2", "3"],
            alphabet,
            [("0", "a", "1"), ("1", "b", "2"), ("2", "a", "3")],
            ["0"],
            ["3"],
        )
        assert project_string(a, ("a", "b", "a")) == ("a", "a")
        assert observation_feasible(a, {"3"}, ("a", "a"))
        assert not observation_feasible(a, {"3"}, ("a", "b", "a"))

    def test_projection_is_a_morphism(self):
        rng = make_rng("projection-morphism")
        a = rand_automaton(rng, ALPHABET_2OBS_1UO, max_states=4)
        names = [e.name for e in a.alphabet]
        for _ in range(200):
            u = tuple(rng.choice(names) for _ in range(rng.randint(0, 6)))
            v = tuple(rng.choice(names) for _ in range(rng.randint(0, 6)))
            assert project_string(a, u + v) == project_string(a, u) + project_string(a, v)


class TestObserver:
    def test_deterministic_fully_observable_is_isomorphic(self):
        a = aut(
            ["p", "q", "r"],
            AB,
            [("p", "a", "q"), ("q", "b", "r"), ("r", "a", "r")],
            ["p"],
            ["r"],
        )
        obs = observer(a, a.marked)
        rename = {s: "{" + s + "}" for s in a.states}
        assert set(obs.states) == set(rename.values())
        assert obs.transitions == {(rename[p], e, rename[q]) for (p, e, q) in a.transitions}
        assert obs.marked == {rename["r"]}

    def test_estimate_after_nondeterministic_step(self):
        a = aut(
            ["p", "q", "r"],
            (Event("x"),),
            [("p", "x", "q"), ("p", "x", "r")],
            ["p"],
        )
        obs = observer(a, set())
        assert "{q,r}" in obs.states
        assert ("{p}", "x", "{q,r}") in obs.transitions

    def test_unobservable_chain_matches_multi_initial(self):
        # chaining initial states with an unobservable event leaves the
        # observer's initial estimate unchanged
        alphabet = (Event("x"), Event("a", observable=False))
        multi = aut(["q1", "q2"], alphabet, [("q1", "x", "q1"), ("q2", "x", "q2")],
                    ["q1", "q2"])
        chained = aut(
            ["q1", "q2"],
            alphabet,
            [("q1", "x", "q1"), ("q2", "x", "q2"), ("q1", "a", "q2")],
            ["q1"],
        )
        assert unobservable_reach(chained, chained.initial) == multi.initial
        assert set(observer(multi, set()).states) == set(observer(chained, set()).states)

    def test_cap_exceeded_raises(self):
        rng = make_rng("observer-cap")
        a = rand_automaton(rng, ALPHABET_2OBS_1UO, max_states=7)
        with pytest.raises(ObserverBlowup) as err:
            observer(a, a.marked, cap=1)
        assert err.value.cap == 1

    def test_estimates_are_sound_and_complete(self):
        # the estimate reached by an observation equals the set of states some
        # string with that projection can reach, as decided by the independent
        # membership oracle
        import itertools

        rng = make_rng("observer-soundness")
        for _ in range(25):
            a = rand_automaton(rng, ALPHABET_2OBS_1UO, max_states=5)
            observable = a.observable_events
            for length in range(4):
                for obs in itertools.product(observable, repeat=length):
                    expected = {q for q in a.states if observation_feasible(a, {q}, obs)}
                    estimate = unobservable_reach(a, a.initial)
                    for e in obs:
                        estimate = unobservable_reach(a, a.move(estimate, e))
                    assert set(estimate) == expected


class TestProduct:
    def test_empty_language_factor_gives_empty_intersection(self):
        a1 = project(aut(["p"], AB, [("p", "a", "p")], ["p"], ["p"]))
        a2 = project(aut(["q"], AB, [("q", "a", "q")], ["q"], []))
        prod = product(a1, a2)
        assert prod.marked == frozenset()

    def test_idempotent_on_same_automaton(self):
        a = project(
            aut(["p", "q", "r"], AB, [("p", "a", "q"), ("q", "b", "r")], ["p"], ["q", "r"])
        )
        prod = product(a, a)
        assert enum_languages_projected_safe(prod) == enum_languages_projected_safe(a)

    def test_marked_pair_reachable_iff_target_reachable(self):
        alphabet = (Event("a"), Event("b", observable=False))
        base = dict(
            states=("s", "m", "t", "t'"),
            alphabet=alphabet,
            transitions={("s", "a", "m"), ("m", "a", "t"), ("t", "b", "t'")},
            initial={"s"},
        )
        secret = project(Automaton(**base, marked={"t"}))
        nonsecret = project(Automaton(**base, marked={"t'"}))
        prod = product(secret, nonsecret)
        assert prod.marked  # reachable target: some pair marked
        v = intersection_nonempty_modulo_projection(
            Automaton(**base, marked={"t"}), {"t"}, Automaton(**base, marked={"t'"}), {"t'"}
        )
        assert v.holds and v.witness.observation == ("a", "a")

    def test_language_is_intersection_on_acyclic_inputs(self):
        rng = make_rng("product-language")
        for _ in range(40):
            a1 = rand_automaton(rng, ALPHABET_2OBS_1UO, max_states=5, structure="acyclic")
            a2 = rand_automaton(rng, ALPHABET_2OBS_1UO, max_states=5, structure="acyclic")
            prod = product(project(a1), project(a2))
            left = enum_languages_projected(a1, a1.marked)
            right = enum_languages_projected(a2, a2.marked)
            assert enum_languages_projected(prod, prod.marked) == (left & right)


def enum_languages_projected_safe(a):
    return enum_languages_projected(a, a.marked)


class TestInclusion:
    def test_reflexive(self):
        rng = make_rng("inclusion-reflexive")
        for _ in range(20):
            a = rand_automaton(rng, ALPHABET_2OBS_1UO, max_states=6)
            assert inclusion_modulo_projection(a, a.marked, a, a.marked).holds

    def test_empty_left_language_included(self):
        a = aut(["p"], AB, [("p", "a", "p")], ["p"], ["p"])
        assert inclusion_modulo_projection(a, set(), a, set()).holds

    def test_two_clause_instance_difference_witness(self):
        # clause paths accept 000 and 100; the all-strings path accepts {0,1}^3;
        # the smallest observation in the difference is 001
        from opacheck import CnfFormula, gen_cnf_cso

        inst = gen_cnf_cso(CnfFormula(3, (frozenset({1, 2, 3}), frozenset({-1, 2, 3}))))
        a = inst.automaton
        assert enum_languages_projected(a, inst.nonsecret) == {
            ("0", "0", "0"),
            ("1", "0", "0"),
        }
        assert enum_languages_projected(a, inst.secret) == {
            tuple(f"{k:03b}") for k in range(8)
        }
        v = inclusion_modulo_projection(a, inst.secret, a, inst.nonsecret)
        assert not v.holds
        assert v.witness.observation == ("0", "0", "1")

    def test_agrees_with_enumeration_on_acyclic_instances(self):
        rng = make_rng("inclusion-enumeration")
        for _ in range(60):
            a1 = rand_automaton(rng, ALPHABET_2OBS_1UO, max_states=5, structure="acyclic")
            a2 = rand_automaton(rng, ALPHABET_2OBS_1UO, max_states=5, structure="acyclic")
            verdict = inclusion_modulo_projection(a1, a1.marked, a2, a2.marked)
            left = enum_languages_projected(a1, a1.marked)
            right = enum_languages_projected(a2, a2.marked)
            assert verdict.holds == (left <= right)
            if not verdict.holds:
                assert verdict.witness.observation in left - right


class TestIntersection:
    def test_empty_left_language(self):
        a = aut(["p"], AB, [("p", "a", "p")], ["p"], ["p"])
        assert not intersection_nonempty_modulo_projection(a, set(), a, a.marked).holds

    def test_same_nonempty_language(self):
        a = aut(["p", "q"], AB, [("p", "a", "q")], ["p"], ["q"])
        v = intersection_nonempty_modulo_projection(a, a.marked, a, a.marked)
        assert v.holds and v.witness.observation == ("a",)


class TestClassify:
    def test_self_loop_counts_as_cycle_but_not_order_violation(self):
        a = aut(["p"], AB, [("p", "a", "p")], ["p"])
        report = classify(a)
        assert report.deterministic
        assert not report.acyclic
        assert report.partially_ordered

    def test_two_state_cycle_breaks_partial_order(self):
        a = aut(["p", "q"], AB, [("p", "a", "q"), ("q", "a", "p")], ["p"])
        assert not classify(a).partially_ordered

    def test_acyclic_implies_partially_ordered(self):
        rng = make_rng("classify-invariant")
        for _ in range(50):
            a = rand_automaton(rng, ALPHABET_2OBS_1UO, max_states=6)
            report = classify(a)
            if report.acyclic:
                assert report.partially_ordered
            if report.deterministic:
                assert len(a.initial) == 1

    def test_event_counts(self):
        a = aut(["p"], ALPHABET_2OBS_1UO, [], ["p"])
        report = classify(a)
        assert (report.observable_event_count, report.unobservable_event_count) == (2, 1)


class TestTrim:
    def test_already_trim_is_identity(self):
        a = aut(["p", "q"], AB, [("p", "a", "q")], ["p"], ["q"])
        assert trim(a) == a

    def test_unreachable_marked_state_removed(self):
        a = aut(["p", "q", "z"], AB, [("p", "a", "q")], ["p"], ["q", "z"])
        t = trim(a)
        assert "z" not in t.states and t.marked == {"q"}

    def test_no_marked_states_trims_to_empty(self):
        a = aut(["p", "q"], AB, [("p", "a", "q")], ["p"])
        t = trim(a)
        assert t.states == () and t.initial == frozenset()

    def test_trim_preserves_marked_language_and_creates_no_cycles(self):
        rng = make_rng("trim-language")
        for _ in range(40):
            a = rand_automaton(rng, ALPHABET_2OBS_1UO, max_states=5, structure="acyclic")
            t = trim(a)
            assert enum_languages_projected(a, a.marked) == enum_languages_projected(t, t.marked)
            assert classify(t).acyclic

    def test_trim_acyclicity_matches_restricted_subgraph(self):
        # trim never creates cycles: its acyclicity equals that of the original
        # digraph restricted to the kept states (checked with a local search)
        def has_cycle(states, edges):
            adjacency = {}
            for (u, v) in edges:
                adjacency.setdefault(u, []).append(v)
            color = {}
            for root in states:
                if color.get(root):
                    continue
                stack = [(root, iter(adjacency.get(root, ())))]
                color[root] = 1
                while stack:
                    node, it = stack[-1]
                    child = next(it, None)
                    if child is None:
                        color[node] = 2
                        stack.pop()
                    elif color.get(child, 0) == 1:
                        return True
                    elif color.get(child, 0) == 0:
                        color[child] = 1
                        stack.append((child, iter(adjacency.get(child, ()))))
            return False

        rng = make_rng("trim-subgraph")
        for _ in range(40):
            a = rand_automaton(rng, ALPHABET_2OBS_1UO, max_states=6)
            t = trim(a)
            kept = set(t.states)
            restricted = {(p, q) for (p, _, q) in a.transitions if p in kept and q in kept}
            assert classify(t).acyclic == (not has_cycle(t.states, restricted))


class TestRealizeObservation:
    def test_shortest_string_through_unobservables(self):
        alphabet = (Event("a"), Event("u", observable=False))
        a = aut(
            ["0", "1", "2"],
            alphabet,
            [("0", "u", "1"), ("1", "a", "2"), ("0", "a", "2")],
            ["0"],
            ["2"],
        )
        assert realize_observation(a, {"2"}, ("a",)) == ("a",)

    def test_unrealizable_observation_raises(self):
        a = aut(["p"], AB, [], ["p"])
        with pytest.raises(ValueError):
            realize_observation(a, {"p"}, ("a",))
