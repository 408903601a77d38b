"""Finite automata under partial observation and the language machinery on top of them.

The alphabet of an automaton is partitioned into observable and unobservable
events; the intruder sees a string only through the projection that erases the
unobservable ones.  Everything downstream (projection, observer construction,
product, inclusion checking) is expressed over this single data model.

All values are immutable after construction and every operation is a pure
function of its inputs, so values can be shared freely across threads.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .errors import ObserverBlowup, PreconditionViolated

# Internal label for transitions whose event was erased by projection.  Event
# names must be non-empty, so this can never clash with a declared event.
EPSILON = ""

DEFAULT_OBSERVER_CAP = 2**20

Observation = tuple[str, ...]
Transition = tuple[str, str, str]


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise PreconditionViolated(message)


@dataclass(frozen=True)
class Event:
    name: str
    observable: bool = True

    def __post_init__(self) -> None:
        if not isinstance(self.name, str) or not self.name:
            raise ValueError("event name must be a non-empty string")


@dataclass(frozen=True)
class Automaton:
    """A nondeterministic finite automaton with a partitioned alphabet.

    ``states`` keeps declaration order; ``alphabet`` order is semantically
    meaningful because witness ties are broken by it.  Transitions may carry
    the internal :data:`EPSILON` label (produced by :func:`project`); declared
    events must be referenced by name.
    """

    states: tuple[str, ...]
    alphabet: tuple[Event, ...]
    transitions: frozenset[Transition]
    initial: frozenset[str]
    marked: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(
            self, "transitions", frozenset((p, e, q) for (p, e, q) in self.transitions)
        )
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "marked", frozenset(self.marked))
        self._validate()

    def _validate(self) -> None:
        if len(set(self.states)) != len(self.states):
            raise ValueError("state names must be unique")
        names = [e.name for e in self.alphabet]
        if len(set(names)) != len(names):
            raise ValueError("event names must be unique within one alphabet")
        declared = set(self.states)
        events = set(names)
        for (p, e, q) in self.transitions:
            if p not in declared or q not in declared:
                raise ValueError(f"transition ({p!r}, {e!r}, {q!r}) uses an undeclared state")
            if e != EPSILON and e not in events:
                raise ValueError(f"transition ({p!r}, {e!r}, {q!r}) uses an undeclared event")
        for s in self.initial | self.marked:
            if s not in declared:
                raise ValueError(f"{s!r} is not a declared state")

    @cached_property
    def events_by_name(self) -> dict[str, Event]:
        return {e.name: e for e in self.alphabet}

    @cached_property
    def observable_events(self) -> tuple[str, ...]:
        """Observable event names in declaration order (the witness tie-break order)."""
        return tuple(e.name for e in self.alphabet if e.observable)

    @cached_property
    def _delta(self) -> dict[tuple[str, str], tuple[str, ...]]:
        table: dict[tuple[str, str], list[str]] = {}
        for (p, e, q) in self.transitions:
            table.setdefault((p, e), []).append(q)
        return {key: tuple(sorted(targets)) for key, targets in table.items()}

    @cached_property
    def _unobservable_edges(self) -> dict[str, tuple[str, ...]]:
        adj: dict[str, set[str]] = {}
        for (p, e, q) in self.transitions:
            if not self.is_observable(e):
                adj.setdefault(p, set()).add(q)
        return {p: tuple(sorted(qs)) for p, qs in adj.items()}

    def is_observable(self, event: str) -> bool:
        if event == EPSILON:
            return False
        return self.events_by_name[event].observable

    def successors(self, state: str, event: str) -> tuple[str, ...]:
        return self._delta.get((state, event), ())

    def move(self, states: Iterable[str], event: str) -> frozenset[str]:
        out: set[str] = set()
        for p in states:
            out.update(self._delta.get((p, event), ()))
        return frozenset(out)

    def with_initial(self, initial: Iterable[str]) -> "Automaton":
        return replace(self, initial=frozenset(initial))

    def with_marked(self, marked: Iterable[str]) -> "Automaton":
        return replace(self, marked=frozenset(marked))


@dataclass(frozen=True)
class StructureReport:
    deterministic: bool
    acyclic: bool
    partially_ordered: bool
    observable_event_count: int
    unobservable_event_count: int


@dataclass(frozen=True)
class Witness:
    """A violating (or, for weak opacity, confirming) observation plus a replayable run.

    ``secret_run`` is a full event string over the automaton's alphabet whose
    projection equals ``observation``.
    """

    observation: Observation
    secret_run: tuple[str, ...]


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: Optional[Witness] = None


def topological_order(
    nodes: Sequence[str], edges: Iterable[tuple[str, str]]
) -> Optional[list[str]]:
    """Kahn's algorithm; returns None when the edge relation has a cycle."""
    indegree = {n: 0 for n in nodes}
    out: dict[str, list[str]] = {n: [] for n in nodes}
    for (u, v) in set(edges):
        out[u].append(v)
        indegree[v] += 1
    ready = deque(n for n in nodes if indegree[n] == 0)
    order = []
    while ready:
        u = ready.popleft()
        order.append(u)
        for v in out[u]:
            indegree[v] -= 1
            if indegree[v] == 0:
                ready.append(v)
    return order if len(order) == len(nodes) else None


def classify(a: Automaton) -> StructureReport:
    """Structural report: determinism, acyclicity, partial order, event counts.

    Self-loops count as cycles for acyclicity but are permitted in partially
    ordered automata (every nontrivial strongly connected component breaks the
    partial order).
    """
    edges = {(p, q) for (p, _, q) in a.transitions}
    acyclic = topological_order(a.states, edges) is not None
    po = topological_order(a.states, {(p, q) for (p, q) in edges if p != q}) is not None
    deterministic = (
        len(a.initial) == 1
        and all(e != EPSILON for (_, e, _) in a.transitions)
        and all(len(targets) <= 1 for targets in a._delta.values())
    )
    observable = sum(1 for e in a.alphabet if e.observable)
    return StructureReport(deterministic, acyclic, po, observable, len(a.alphabet) - observable)


def unobservable_reach(a: Automaton, states: Iterable[str]) -> frozenset[str]:
    """Least superset of ``states`` closed under unobservable (and erased) transitions."""
    seen = set(states)
    _require(seen <= set(a.states), "unobservable_reach: states must be declared")
    todo = list(seen)
    while todo:
        p = todo.pop()
        for q in a._unobservable_edges.get(p, ()):
            if q not in seen:
                seen.add(q)
                todo.append(q)
    return frozenset(seen)


def project(a: Automaton) -> Automaton:
    """Erase unobservable events: relabel their transitions with the internal marker.

    The result is an automaton over the observable alphabet whose generated and
    marked languages are the projections of the originals.  State identity is
    preserved so witnesses remain replayable.
    """
    alphabet = tuple(e for e in a.alphabet if e.observable)
    transitions = {
        (p, e if a.is_observable(e) else EPSILON, q) for (p, e, q) in a.transitions
    }
    return Automaton(a.states, alphabet, transitions, a.initial, a.marked)


def project_string(a: Automaton, string: Iterable[str]) -> Observation:
    """Apply the observation projection to a full event string."""
    return tuple(e for e in string if a.is_observable(e))


def _subset_states(a: Automaton, *, cap: int, complete: bool):
    """Breadth-first subset construction over unobservable closures.

    Returns ``(subsets, transition table on indices, initial index)``.  With
    ``complete=True`` the empty estimate is materialized as an ordinary subset
    and acts as the rejecting sink, making the transition table total;
    otherwise empty successors are skipped and only nonempty reachable
    estimates exist.
    """
    events = a.observable_events
    start = unobservable_reach(a, a.initial)
    if not start and not complete:
        return [], {}, None
    subsets: list[frozenset[str]] = [start]
    index: dict[frozenset[str], int] = {start: 0}
    trans: dict[tuple[int, str], int] = {}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for e in events:
            y = unobservable_reach(a, a.move(subsets[i], e))
            if not y and not complete:
                continue
            j = index.get(y)
            if j is None:
                if len(subsets) >= cap:
                    raise ObserverBlowup(cap)
                j = len(subsets)
                index[y] = j
                subsets.append(y)
                queue.append(j)
            trans[(i, e)] = j
    return subsets, trans, 0


def subset_name(x: frozenset[str]) -> str:
    return "{" + ",".join(sorted(x)) + "}"


def observer(
    a: Automaton,
    marking: Iterable[str] | None = None,
    *,
    cap: int = DEFAULT_OBSERVER_CAP,
) -> Automaton:
    """Subset-construction determinization of ``project(a)``.

    States are the intruder's estimates, starting from the unobservable reach
    of the initial set; an estimate is marked when it meets ``marking``
    (default: the marked states of ``a``).  Only reachable estimates are
    materialized; exceeding ``cap`` raises :class:`ObserverBlowup` rather than
    truncating silently.
    """
    marking = frozenset(a.marked if marking is None else marking)
    _require(marking <= set(a.states), "observer: marking must be declared states")
    subsets, trans, init = _subset_states(a, cap=cap, complete=False)
    names = [subset_name(x) for x in subsets]
    alphabet = tuple(Event(e) for e in a.observable_events)
    transitions = {(names[i], e, names[j]) for ((i, e), j) in trans.items()}
    initial = {names[init]} if init is not None else frozenset()
    marked = {names[i] for i, x in enumerate(subsets) if x & marking}
    return Automaton(tuple(names), alphabet, transitions, initial, marked)


def _unique_pair_names(pairs: Sequence[tuple[str, str]]) -> dict[tuple[str, str], str]:
    names: dict[tuple[str, str], str] = {}
    used: set[str] = set()
    for pair in pairs:
        base = f"({pair[0]},{pair[1]})"
        name, k = base, 2
        while name in used:
            name = f"{base}#{k}"
            k += 1
        used.add(name)
        names[pair] = name
    return names


def _check_projected(a: Automaton, role: str) -> None:
    _require(
        all(e.observable for e in a.alphabet),
        f"product: {role} must be a projected automaton (observable alphabet only)",
    )


def product(a1: Automaton, a2: Automaton) -> Automaton:
    """Synchronous product of two projected automata over the same observable alphabet.

    Observable events move both factors in lockstep while erased transitions
    of either factor interleave asynchronously; a pair state is marked iff both
    components are marked, so the marked language is the intersection of the
    two projected languages.  Only reachable pairs are materialized.
    """
    _check_projected(a1, "first input")
    _check_projected(a2, "second input")
    _require(
        set(a1.observable_events) == set(a2.observable_events),
        "product: inputs must share one observable alphabet",
    )
    events = a1.observable_events
    start_pairs = [(x, y) for x in sorted(a1.initial) for y in sorted(a2.initial)]
    seen: dict[tuple[str, str], None] = dict.fromkeys(start_pairs)
    queue = deque(start_pairs)
    edges: list[tuple[tuple[str, str], str, tuple[str, str]]] = []
    while queue:
        x, y = queue.popleft()
        successors: list[tuple[str, tuple[str, str]]] = []
        for e in events:
            for x2 in a1.successors(x, e):
                for y2 in a2.successors(y, e):
                    successors.append((e, (x2, y2)))
        for x2 in a1.successors(x, EPSILON):
            successors.append((EPSILON, (x2, y)))
        for y2 in a2.successors(y, EPSILON):
            successors.append((EPSILON, (x, y2)))
        for e, pair in successors:
            edges.append(((x, y), e, pair))
            if pair not in seen:
                seen[pair] = None
                queue.append(pair)
    name = _unique_pair_names(list(seen))
    return Automaton(
        tuple(name[p] for p in seen),
        tuple(Event(e) for e in events),
        {(name[s], e, name[t]) for (s, e, t) in edges},
        {name[p] for p in start_pairs},
        {name[(x, y)] for (x, y) in seen if x in a1.marked and y in a2.marked},
    )


def trim(a: Automaton) -> Automaton:
    """Restrict to states reachable from the initial set and co-reachable to a marked state.

    The marked language is unchanged; an automaton with no marked state trims
    to the empty automaton.
    """
    forward: dict[str, set[str]] = {}
    backward: dict[str, set[str]] = {}
    for (p, _, q) in a.transitions:
        forward.setdefault(p, set()).add(q)
        backward.setdefault(q, set()).add(p)

    def closure(seeds: Iterable[str], adj: dict[str, set[str]]) -> set[str]:
        seen = set(seeds)
        todo = list(seen)
        while todo:
            u = todo.pop()
            for v in adj.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
        return seen

    keep = closure(a.initial, forward) & closure(a.marked, backward)
    return Automaton(
        tuple(s for s in a.states if s in keep),
        a.alphabet,
        {(p, e, q) for (p, e, q) in a.transitions if p in keep and q in keep},
        a.initial & keep,
        a.marked & keep,
    )


def realize_observation(
    a: Automaton, targets: Iterable[str], observation: Observation
) -> tuple[str, ...]:
    """Shortest full event string projecting to ``observation`` that reaches ``targets``.

    Ties among shortest strings are broken by alphabet declaration order.
    Raises ValueError when no run of ``a`` produces the observation and ends in
    a target state.
    """
    targets = frozenset(targets)
    _require(targets <= set(a.states), "realize_observation: targets must be declared states")
    n = len(observation)
    event_names = tuple(e.name for e in a.alphabet)

    def step(node, e):
        q, k = node
        if a.is_observable(e):
            if k >= n or e != observation[k]:
                return ()
            nk = k + 1
        else:
            nk = k
        return [(q2, nk) for q2 in a.successors(q, e)]

    def is_goal(node) -> bool:
        q, k = node
        return k == n and q in targets

    starts = [(q, 0) for q in sorted(a.initial)]
    run = _lex_shortest_to_goal(starts, event_names, step, is_goal)
    if run is None:
        raise ValueError("observation is not realizable by any run into the target set")
    return run


def _lex_shortest_to_goal(starts, events, step, is_goal) -> Observation | None:
    """Minimal-length, then lexicographically minimal observation whose frontier
    meets the goal.

    The frontier after an observation is the set of every node reachable from
    the start set along it, and the goal test is satisfied by any frontier
    member.  A plain node-BFS would return the right length but may break the
    lexicographic tie among same-length observations when several frontier
    nodes share a prefix, so the walk is reconstructed afterwards: backward
    layers record from which nodes the goal is reachable in exactly k steps,
    and a greedy pass picks the smallest viable event at each position.
    """
    starts = list(dict.fromkeys(starts))
    if any(is_goal(p) for p in starts):
        return ()
    dist = {p: 0 for p in starts}
    queue = deque(starts)
    adjacency: dict = {}
    goal_dist = None
    while queue:
        p = queue.popleft()
        if goal_dist is not None and dist[p] >= goal_dist:
            continue
        successors = {}
        for e in events:
            targets = tuple(step(p, e))
            successors[e] = targets
            for q in targets:
                if q not in dist:
                    dist[q] = dist[p] + 1
                    if goal_dist is None and is_goal(q):
                        goal_dist = dist[q]
                    queue.append(q)
        adjacency[p] = successors
    if goal_dist is None:
        return None

    layers = [{p for p in dist if is_goal(p) and dist[p] <= goal_dist}]
    for k in range(1, goal_dist + 1):
        previous = layers[-1]
        layers.append(
            {
                p
                for p, successors in adjacency.items()
                if dist[p] <= goal_dist - k
                and any(q in previous for targets in successors.values() for q in targets)
            }
        )
    frontier = set(starts)
    observation: list[str] = []
    for k in range(goal_dist, 0, -1):
        for e in events:
            advanced = {q for p in frontier for q in adjacency[p][e]}
            if advanced & layers[k - 1]:
                observation.append(e)
                frontier = advanced
                break
        else:
            raise AssertionError("witness reconstruction lost the goal frontier")
    return tuple(observation)


def _check_language_args(a1: Automaton, m1: frozenset[str], a2: Automaton, m2: frozenset[str]):
    _require(m1 <= set(a1.states), "marked set of the first automaton must be declared states")
    _require(m2 <= set(a2.states), "marked set of the second automaton must be declared states")
    _require(
        set(a1.observable_events) == set(a2.observable_events),
        "both automata must share one observable alphabet",
    )


def inclusion_modulo_projection(
    a1: Automaton,
    m1: Iterable[str],
    a2: Automaton,
    m2: Iterable[str],
    *,
    cap: int = DEFAULT_OBSERVER_CAP,
) -> Verdict:
    """Decide ``P(L_m(a1, m1)) subseteq P(L_m(a2, m2))``.

    The right side is determinized (complete, with the empty estimate as
    rejecting sink) and paired against the left automaton; a reachable pair
    (state in ``m1``, estimate missing ``m2``) refutes the inclusion.  On
    failure the witness carries the shortest observation in the difference
    (ties broken by a1's alphabet declaration order) and a string of ``a1``
    realizing it.
    """
    m1, m2 = frozenset(m1), frozenset(m2)
    _check_language_args(a1, m1, a2, m2)
    events = a1.observable_events
    subsets, trans, init = _subset_states(a2, cap=cap, complete=True)

    def step(node, e):
        x, i = node
        j = trans[(i, e)]
        return [(x2, j) for x2 in sorted(unobservable_reach(a1, a1.move((x,), e)))]

    def is_goal(node) -> bool:
        x, i = node
        return x in m1 and not (subsets[i] & m2)

    starts = [(x, init) for x in sorted(unobservable_reach(a1, a1.initial))]
    obs = _lex_shortest_to_goal(starts, events, step, is_goal)
    if obs is None:
        return Verdict(True)
    return Verdict(False, Witness(obs, realize_observation(a1, m1, obs)))


def intersection_nonempty_modulo_projection(
    a1: Automaton, m1: Iterable[str], a2: Automaton, m2: Iterable[str]
) -> Verdict:
    """Decide ``P(L_m(a1, m1)) intersect P(L_m(a2, m2)) != empty``.

    Breadth-first search for a reachable marked pair of the projected product;
    when nonempty the verdict holds and the witness is the shortest common
    observation together with a string of ``a1`` realizing it.
    """
    m1, m2 = frozenset(m1), frozenset(m2)
    _check_language_args(a1, m1, a2, m2)
    events = a1.observable_events

    def step(node, e):
        x, y = node
        xs = sorted(unobservable_reach(a1, a1.move((x,), e)))
        ys = sorted(unobservable_reach(a2, a2.move((y,), e)))
        return [(x2, y2) for x2 in xs for y2 in ys]

    def is_goal(node) -> bool:
        x, y = node
        return x in m1 and y in m2

    starts = [
        (x, y)
        for x in sorted(unobservable_reach(a1, a1.initial))
        for y in sorted(unobservable_reach(a2, a2.initial))
    ]
    obs = _lex_shortest_to_goal(starts, events, step, is_goal)
    if obs is None:
        return Verdict(False)
    return Verdict(True, Witness(obs, realize_observation(a1, m1, obs)))
