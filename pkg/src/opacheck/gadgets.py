"""Instance generators and notion-to-notion transformations.

The generators turn classic hard problems (CNF satisfiability, DAG
reachability, DFA-union universality) into opacity instances whose verdict
mirrors the source problem, which makes them both stress-test inputs and
cross-checkable benchmarks.  The transformations move instances between
opacity notions while preserving the verdict exactly.

Fresh names introduced by a construction start from a reserved base ("a", "@",
"x'", ...) and get a numeric suffix until collision-free; every choice is
recorded in the returned metadata so outputs are reproducible.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

from .automata import (
    Automaton,
    Event,
    classify,
    topological_order,
    trim,
)
from .errors import InputNotDeterministic, MalformedFormula, PreconditionViolated
from .opacity import CsoInstance, IsoInstance, LboInstance


def _fresh_name(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    for k in itertools.count(1):
        candidate = f"{base}{k}"
        if candidate not in taken:
            return candidate
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class CnfFormula:
    """A CNF formula as clause sets of signed variable indices (DIMACS convention).

    A clause may not contain a variable in both polarities; such input is
    rejected rather than silently simplified.
    """

    variable_count: int
    clauses: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "clauses", tuple(frozenset(int(x) for x in c) for c in self.clauses)
        )
        if self.variable_count < 0:
            raise MalformedFormula("variable count must be non-negative")
        for clause in self.clauses:
            for lit in clause:
                if lit == 0 or abs(lit) > self.variable_count:
                    raise MalformedFormula(f"literal {lit} is out of range")
            for lit in clause:
                if -lit in clause:
                    raise MalformedFormula(
                        f"clause {sorted(clause)} contains a variable in both polarities"
                    )


@dataclass(frozen=True)
class Dag:
    """A directed acyclic graph over vertices ``0 .. vertex_count-1`` with two
    distinguished vertices (``source`` may equal ``target``)."""

    vertex_count: int
    edges: frozenset[tuple[int, int]]
    source: int
    target: int

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "edges", frozenset((int(u), int(v)) for (u, v) in self.edges)
        )
        if self.vertex_count < 1:
            raise ValueError("a DAG needs at least one vertex")
        vertices = range(self.vertex_count)
        for (u, v) in self.edges:
            if u not in vertices or v not in vertices:
                raise ValueError(f"edge ({u}, {v}) is out of range")
        if self.source not in vertices or self.target not in vertices:
            raise ValueError("source and target must be vertices")
        names = [str(v) for v in vertices]
        if topological_order(names, {(str(u), str(v)) for (u, v) in self.edges}) is None:
            raise ValueError("edge relation must be acyclic")


def gen_cnf_cso(formula: CnfFormula) -> CsoInstance:
    """Current-state opacity instance that is opaque iff the formula is unsatisfiable.

    One path per clause over the observable alphabet {0, 1}: step j reads 0
    when variable j occurs positively in the clause, 1 when negatively, and
    either bit otherwise, so the path accepts exactly the assignments
    falsifying its clause.  A separate path accepting every assignment ends in
    the sole secret state; the clause path ends are the non-secret states.
    The instance has exactly (clauses + 1) * (variables + 1) states.
    """
    n = formula.variable_count
    events = (Event("0"), Event("1"))
    states = [f"a{j}" for j in range(n + 1)]
    transitions = {(f"a{j}", bit, f"a{j + 1}") for j in range(n) for bit in "01"}
    initial = {"a0"}
    nonsecret: set[str] = set()
    for i, clause in enumerate(formula.clauses, start=1):
        previous = f"c{i}_0"
        states.append(previous)
        initial.add(previous)
        for j in range(1, n + 1):
            current = f"c{i}_{j}"
            states.append(current)
            if j in clause:
                labels = ("0",)
            elif -j in clause:
                labels = ("1",)
            else:
                labels = ("0", "1")
            transitions.update((previous, bit, current) for bit in labels)
            previous = current
        nonsecret.add(previous)
    automaton = Automaton(tuple(states), events, transitions, initial)
    return CsoInstance(automaton, frozenset({f"a{n}"}), frozenset(nonsecret))


def _vertex_automaton_parts(g: Dag, observable_event: str):
    states = [str(v) for v in range(g.vertex_count)]
    transitions = {(str(u), observable_event, str(v)) for (u, v) in g.edges}
    return states, transitions


def gen_dag_weak_lbo(g: Dag) -> LboInstance:
    """Weak-opacity instance that is weakly opaque iff the target is reachable.

    Every edge becomes an observable a-transition; an unobservable b-transition
    leads from the target into a fresh state.  The secret language marks the
    target, the non-secret language marks the fresh state, so the projected
    languages intersect exactly on the paths into the target.
    """
    states, transitions = _vertex_automaton_parts(g, "a")
    sink = f"{g.target}'"
    states.append(sink)
    transitions.add((str(g.target), "b", sink))
    events = (Event("a"), Event("b", observable=False))
    common = dict(
        states=tuple(states),
        alphabet=events,
        transitions=transitions,
        initial=frozenset({str(g.source)}),
    )
    return LboInstance(
        Automaton(**common, marked=frozenset({str(g.target)})),
        Automaton(**common, marked=frozenset({sink})),
    )


def gen_dag_cso_unary(g: Dag) -> CsoInstance:
    """Unary acyclic current-state opacity instance, opaque iff the target is
    unreachable: the target is the sole secret state and nothing is non-secret."""
    states, transitions = _vertex_automaton_parts(g, "a")
    automaton = Automaton(
        tuple(states), (Event("a"),), transitions, frozenset({str(g.source)})
    )
    return CsoInstance(automaton, frozenset({str(g.target)}), frozenset())


@dataclass(frozen=True)
class UnionUniversalityCso:
    """Output of :func:`gen_union_universality_cso` with its freshness metadata."""

    instance: CsoInstance
    chain_event: Optional[str]
    component_initials: tuple[str, ...]
    completed_components: tuple[int, ...]
    copied_components: tuple[int, ...]

    def metadata(self) -> dict:
        return {
            "chain_event": self.chain_event,
            "component_initials": list(self.component_initials),
            "completed_components": list(self.completed_components),
            "copied_components": list(self.copied_components),
        }


def gen_union_universality_cso(components: Sequence[Automaton]) -> UnionUniversalityCso:
    """Deterministic instance that is opaque iff the union language is universal.

    Each input must be a single-initial DFA over one fully observable alphabet.
    Inputs are completed with a dead state where needed (marked languages are
    unchanged, but universality then coincides with opacity even for partial
    transition functions).  An initial state with any incoming transition gets
    a fresh copy so that no effective initial state can be re-entered; the
    copies are then chained by a fresh unobservable event, making the first one
    the sole initial state without changing the observer.  Secret states are
    the unmarked ones, non-secret states the marked ones.
    """
    if not components:
        raise PreconditionViolated("at least one component automaton is required")
    reference = components[0].alphabet
    signature = {(e.name, e.observable) for e in reference}
    if not all(e.observable for e in reference):
        raise PreconditionViolated("component alphabets must be fully observable")
    event_names = [e.name for e in reference]

    states: list[str] = []
    transitions: set[tuple[str, str, str]] = set()
    marked: set[str] = set()
    component_initials: list[str] = []
    completed: list[int] = []
    copied: list[int] = []

    for k, component in enumerate(components, start=1):
        if {(e.name, e.observable) for e in component.alphabet} != signature:
            raise PreconditionViolated("all components must share one alphabet")
        if not classify(component).deterministic:
            raise InputNotDeterministic(f"component {k} is not a single-initial DFA")
        prefix = f"c{k}."
        local_states = [prefix + s for s in component.states]
        local_transitions = {
            (prefix + p, e, prefix + q) for (p, e, q) in component.transitions
        }
        local_marked = {prefix + s for s in component.marked}
        (init,) = {prefix + s for s in component.initial}

        defined = {(p, e) for (p, e, _) in local_transitions}
        missing = [
            (s, e) for s in local_states for e in event_names if (s, e) not in defined
        ]
        if missing:
            completed.append(k)
            dead = _fresh_name(prefix + "dead", set(local_states))
            local_states.append(dead)
            local_transitions.update((s, e, dead) for (s, e) in missing)
            local_transitions.update((dead, e, dead) for e in event_names)

        if any(q == init for (_, _, q) in local_transitions):
            copied.append(k)
            copy = _fresh_name(init + "'", set(local_states))
            local_states.append(copy)
            outgoing = [(e, q) for (p, e, q) in local_transitions if p == init]
            local_transitions.update((copy, e, q) for (e, q) in outgoing)
            if init in local_marked:
                local_marked.add(copy)
            init = copy

        states.extend(local_states)
        transitions.update(local_transitions)
        marked.update(local_marked)
        component_initials.append(init)

    chain_event: Optional[str] = None
    alphabet = tuple(reference)
    if len(components) > 1:
        chain_event = _fresh_name("a", {e.name for e in reference})
        alphabet = alphabet + (Event(chain_event, observable=False),)
        transitions.update(
            (component_initials[i], chain_event, component_initials[i + 1])
            for i in range(len(component_initials) - 1)
        )

    automaton = Automaton(
        tuple(states), alphabet, transitions, frozenset({component_initials[0]}), marked
    )
    instance = CsoInstance(automaton, frozenset(states) - frozenset(marked), frozenset(marked))
    return UnionUniversalityCso(
        instance,
        chain_event,
        tuple(component_initials),
        tuple(completed),
        tuple(copied),
    )


@dataclass(frozen=True)
class Split:
    """One eliminated nondeterministic transition: (source, event, target) was
    rerouted through ``detour_state`` under the transient ``fresh_event``."""

    fresh_event: str
    source: str
    event: str
    target: str
    detour_state: str


@dataclass(frozen=True)
class PoDeterminization:
    """Output of :func:`po_determinize` with its freshness metadata.

    ``splits`` is in creation order; the code of the k-th split event is k, so
    its detour is entered after k unobservable steps.
    """

    automaton: Automaton
    unobservable_event: Optional[str]
    splits: tuple[Split, ...]
    initial_chain: tuple[str, ...]

    def metadata(self) -> dict:
        return {
            "unobservable_event": self.unobservable_event,
            "encoding": [
                {
                    "event": s.fresh_event,
                    "code": code,
                    "source": s.source,
                    "on": s.event,
                    "target": s.target,
                    "detour_state": s.detour_state,
                }
                for code, s in enumerate(self.splits, start=1)
            ],
            "initial_chain": list(self.initial_chain),
        }


def po_determinize(a: Automaton, chain_event: str) -> PoDeterminization:
    """Determinize a partially ordered automaton with one fresh unobservable event.

    Three stages.  Split: whenever a state has several same-event transitions
    to distinct targets, one target (a self-loop if present, otherwise the
    lexicographically greatest) keeps the direct edge and every other target is
    rerouted through a fresh state under a transient fresh event.  Encode: the
    k-th fresh event created is replaced by a chain of k transitions on a fresh
    unobservable event; chains leaving the same state are merged into a single
    path with exits at the detour states.  Single initial: several initial
    states are folded into a chain of fresh states connected by the
    unobservable event, each exiting on ``chain_event`` to one original
    initial state.

    Added states carry no secret status, so for any secret/non-secret sets
    over the original states the current-state opacity verdict is preserved.
    The output is deterministic and partially ordered.
    """
    if not classify(a).partially_ordered:
        raise PreconditionViolated("po_determinize requires a partially ordered automaton")
    if any(not e for (_, e, _) in a.transitions):
        raise PreconditionViolated("po_determinize does not accept projected automata")
    chain = a.events_by_name.get(chain_event)
    if chain is None or not chain.observable:
        raise PreconditionViolated(
            f"chain event {chain_event!r} must be an observable event of the automaton"
        )

    taken_states = set(a.states)
    taken_events = {e.name for e in a.alphabet}
    out_states = list(a.states)
    transitions = set(a.transitions)

    splits: list[Split] = []
    for p in sorted(a.states):
        for x in (e.name for e in a.alphabet):
            targets = a.successors(p, x)
            if len(targets) <= 1:
                continue
            keep = p if p in targets else targets[-1]
            for q in targets:
                if q == keep:
                    continue
                fresh_event = _fresh_name("x'", taken_events)
                taken_events.add(fresh_event)
                detour = _fresh_name(f"{p}'", taken_states)
                taken_states.add(detour)
                out_states.append(detour)
                transitions.remove((p, x, q))
                splits.append(Split(fresh_event, p, x, q, detour))

    added_event: Optional[str] = None
    if splits or len(a.initial) > 1:
        added_event = _fresh_name("a", taken_events)
        taken_events.add(added_event)

    by_source: dict[str, list[tuple[int, Split]]] = {}
    for code, split in enumerate(splits, start=1):
        by_source.setdefault(split.source, []).append((code, split))
    for p in sorted(by_source):
        coded = sorted(by_source[p])
        detour_at = {code: split.detour_state for code, split in coded}
        previous = p
        for position in range(1, coded[-1][0] + 1):
            node = detour_at.get(position)
            if node is None:
                node = _fresh_name(f"{p}'", taken_states)
                taken_states.add(node)
                out_states.append(node)
            transitions.add((previous, added_event, node))
            previous = node
    for split in splits:
        transitions.add((split.detour_state, split.event, split.target))

    initial = set(a.initial)
    initial_chain: list[str] = []
    if len(initial) > 1:
        originals = sorted(initial)
        previous = _fresh_name("q'0", taken_states)
        taken_states.add(previous)
        out_states.append(previous)
        initial_chain.append(previous)
        for k, q in enumerate(originals, start=1):
            node = _fresh_name(f"q'{k}", taken_states)
            taken_states.add(node)
            out_states.append(node)
            initial_chain.append(node)
            transitions.add((previous, added_event, node))
            transitions.add((node, chain_event, q))
            previous = node
        initial = {initial_chain[0]}

    alphabet = a.alphabet
    if added_event is not None:
        alphabet = alphabet + (Event(added_event, observable=False),)
    automaton = Automaton(tuple(out_states), alphabet, transitions, initial, a.marked)
    return PoDeterminization(automaton, added_event, tuple(splits), tuple(initial_chain))


def cso_to_lbo(inst: CsoInstance) -> LboInstance:
    """Recast current-state opacity as language inclusion: the secret language
    marks the secret states, the non-secret language the non-secret states."""
    return LboInstance(
        inst.automaton.with_marked(inst.secret),
        inst.automaton.with_marked(inst.nonsecret),
    )


@dataclass(frozen=True)
class IsoReduction:
    """Output of :func:`lbo_to_iso` with its freshness metadata."""

    instance: IsoInstance
    query_event: str
    secret_sink: str
    nonsecret_sink: str
    trimmed: bool

    def metadata(self) -> dict:
        return {
            "query_event": self.query_event,
            "secret_sink": self.secret_sink,
            "nonsecret_sink": self.nonsecret_sink,
            "trimmed": self.trimmed,
        }


def lbo_to_iso(inst: LboInstance) -> IsoReduction:
    """Reduce language-based opacity to initial-state opacity.

    Both automata are trimmed to nonblocking form first (a warning is emitted
    when that changes anything).  A fresh observable query event leads from
    every marked state into a per-side sink, so the generated language of each
    side becomes the prefixes of its marked language plus the marked language
    followed by the query.  The two sides are combined into one automaton whose
    secret (resp. non-secret) initial states are those of the secret (resp.
    non-secret) side.
    """
    secret = trim(inst.secret_automaton)
    nonsecret = trim(inst.nonsecret_automaton)
    trimmed = secret != inst.secret_automaton or nonsecret != inst.nonsecret_automaton
    if trimmed:
        warnings.warn(
            "language-based opacity inputs were blocking; trimmed automatically",
            stacklevel=2,
        )

    states = [f"s:{s}" for s in secret.states] + [f"ns:{s}" for s in nonsecret.states]
    taken = set(states)
    secret_sink = _fresh_name("x_s", taken)
    taken.add(secret_sink)
    nonsecret_sink = _fresh_name("x_ns", taken)
    taken.add(nonsecret_sink)
    states.extend((secret_sink, nonsecret_sink))

    query = _fresh_name("@", {e.name for e in inst.secret_automaton.alphabet})
    transitions = {(f"s:{p}", e, f"s:{q}") for (p, e, q) in secret.transitions}
    transitions |= {(f"ns:{p}", e, f"ns:{q}") for (p, e, q) in nonsecret.transitions}
    transitions |= {(f"s:{r}", query, secret_sink) for r in secret.marked}
    transitions |= {(f"ns:{r}", query, nonsecret_sink) for r in nonsecret.marked}

    secret_initial = {f"s:{s}" for s in secret.initial}
    nonsecret_initial = {f"ns:{s}" for s in nonsecret.initial}
    combined = Automaton(
        tuple(states),
        inst.secret_automaton.alphabet + (Event(query),),
        transitions,
        secret_initial | nonsecret_initial,
    )
    instance = IsoInstance(combined, frozenset(secret_initial), frozenset(nonsecret_initial))
    return IsoReduction(instance, query, secret_sink, nonsecret_sink, trimmed)
