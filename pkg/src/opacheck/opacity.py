"""Decision procedures for the five opacity notions.

Current-state opacity comes in two general algorithms (observer traversal and
language inclusion, which always agree) plus two structural fast paths for
systems with a single observable event: one for acyclic automata and one for
partially ordered automata, both working on sets of observation lengths.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .automata import (
    DEFAULT_OBSERVER_CAP,
    Automaton,
    Verdict,
    Witness,
    classify,
    inclusion_modulo_projection,
    intersection_nonempty_modulo_projection,
    realize_observation,
    topological_order,
    unobservable_reach,
)
from .errors import ObserverBlowup, PreconditionViolated

CSO_ALGORITHMS = ("auto", "observer", "inclusion", "unary-acyclic", "unary-po")


@dataclass(frozen=True)
class CsoInstance:
    """Current-state opacity instance: which current states are secret/non-secret.

    The two sets may overlap, and states in neither set carry no status at all;
    such states never create or discharge a violation.
    """

    automaton: Automaton
    secret: frozenset[str]
    nonsecret: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "secret", frozenset(self.secret))
        object.__setattr__(self, "nonsecret", frozenset(self.nonsecret))
        declared = set(self.automaton.states)
        if not self.secret <= declared or not self.nonsecret <= declared:
            raise ValueError("secret and non-secret sets must be declared states")


@dataclass(frozen=True)
class LboInstance:
    """Language-based opacity instance: the secret and non-secret marked languages."""

    secret_automaton: Automaton
    nonsecret_automaton: Automaton

    def __post_init__(self) -> None:
        if self.secret_automaton.alphabet != self.nonsecret_automaton.alphabet:
            raise ValueError("both automata must declare the identical alphabet")


@dataclass(frozen=True)
class IsoInstance:
    """Initial-state opacity instance over subsets of the initial states."""

    automaton: Automaton
    secret_initial: frozenset[str]
    nonsecret_initial: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "secret_initial", frozenset(self.secret_initial))
        object.__setattr__(self, "nonsecret_initial", frozenset(self.nonsecret_initial))
        if not self.secret_initial <= self.automaton.initial:
            raise ValueError("secret initial states must be initial states")
        if not self.nonsecret_initial <= self.automaton.initial:
            raise ValueError("non-secret initial states must be initial states")


@dataclass(frozen=True)
class IfsoInstance:
    """Initial-and-final-state opacity instance: the secret is an (initial, marked) pair."""

    automaton: Automaton
    secret_pairs: frozenset[tuple[str, str]]
    nonsecret_pairs: frozenset[tuple[str, str]]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "secret_pairs", frozenset((i, f) for (i, f) in self.secret_pairs)
        )
        object.__setattr__(
            self, "nonsecret_pairs", frozenset((i, f) for (i, f) in self.nonsecret_pairs)
        )
        declared = set(self.automaton.states)
        for (i, f) in self.secret_pairs | self.nonsecret_pairs:
            if i not in declared or f not in declared:
                raise ValueError(f"pair ({i!r}, {f!r}) uses an undeclared state")
            if i not in self.automaton.initial:
                raise ValueError(f"pair ({i!r}, {f!r}) must start in an initial state")


@dataclass(frozen=True)
class LengthSet:
    """Semilinear set of observation lengths: a finite part plus at most one ray.

    The denoted set is ``finite union [ray_start, infinity)``; finite points at
    or beyond the ray are dropped on construction since they are redundant.
    """

    finite: frozenset[int]
    ray_start: Optional[int] = None

    def __post_init__(self) -> None:
        fin = frozenset(int(k) for k in self.finite)
        if any(k < 0 for k in fin) or (self.ray_start is not None and self.ray_start < 0):
            raise ValueError("observation lengths are non-negative")
        if self.ray_start is not None:
            fin = frozenset(k for k in fin if k < self.ray_start)
        object.__setattr__(self, "finite", fin)

    def __contains__(self, k: int) -> bool:
        return k in self.finite or (self.ray_start is not None and k >= self.ray_start)

    def issubset(self, other: "LengthSet") -> bool:
        # A ray can only be covered by a ray starting no later; finite points
        # may be covered by finite points or by the ray.
        if self.ray_start is not None and (
            other.ray_start is None or other.ray_start > self.ray_start
        ):
            return False
        return all(k in other for k in self.finite)

    def min_uncovered(self, other: "LengthSet") -> Optional[int]:
        """Smallest length denoted here but missing from ``other`` (None if covered)."""
        bound = 0
        for v in (*self.finite, *other.finite, self.ray_start, other.ray_start):
            if v is not None:
                bound = max(bound, v + 1)
        for k in range(bound + 1):
            if k in self and k not in other:
                return k
        return None


def verify_cso_observer(inst: CsoInstance, *, cap: int = DEFAULT_OBSERVER_CAP) -> Verdict:
    """Current-state opacity via the reachable estimates of the observer.

    Opaque iff every reachable estimate meeting the secret set also meets the
    non-secret set.  The witness is the shortest observation (ties broken by
    alphabet declaration order) reaching a violating estimate.
    """
    a = inst.automaton
    events = a.observable_events

    def violating(x: frozenset[str]) -> bool:
        return bool(x & inst.secret) and not (x & inst.nonsecret)

    def refute(obs: tuple[str, ...]) -> Verdict:
        return Verdict(False, Witness(obs, realize_observation(a, inst.secret, obs)))

    start = unobservable_reach(a, a.initial)
    if not start:
        return Verdict(True)
    if violating(start):
        return refute(())
    pred: dict[frozenset[str], tuple[frozenset[str], str] | None] = {start: None}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for e in events:
            y = unobservable_reach(a, a.move(x, e))
            if not y or y in pred:
                continue
            if len(pred) >= cap:
                raise ObserverBlowup(cap)
            pred[y] = (x, e)
            if violating(y):
                obs: list[str] = []
                node = y
                while pred[node] is not None:
                    node, e2 = pred[node]  # type: ignore[misc]
                    obs.append(e2)
                return refute(tuple(reversed(obs)))
            queue.append(y)
    return Verdict(True)


def verify_cso_inclusion(inst: CsoInstance, *, cap: int = DEFAULT_OBSERVER_CAP) -> Verdict:
    """Current-state opacity as projected language inclusion.

    The automaton marked by the secret set must be included, modulo projection,
    in the automaton marked by the non-secret set.  Agrees with
    :func:`verify_cso_observer` on every instance, witness included.
    """
    a = inst.automaton
    return inclusion_modulo_projection(a, inst.secret, a, inst.nonsecret, cap=cap)


def _sole_observable_event(a: Automaton) -> Optional[str]:
    events = a.observable_events
    return events[0] if len(events) == 1 else None


def _run_lengths(
    a: Automaton, transitions: Iterable[tuple[str, str, str]]
) -> dict[str, set[int]]:
    """Observable-edge counts of runs from the initial set, per end state.

    The given transition subset must be acyclic; states are processed in
    topological order so each state's length set is complete before use.
    """
    transitions = list(transitions)
    order = topological_order(a.states, [(p, q) for (p, _, q) in transitions])
    assert order is not None, "length computation requires an acyclic edge set"
    outgoing: dict[str, list[tuple[int, str]]] = {}
    for (p, e, q) in transitions:
        outgoing.setdefault(p, []).append((1 if a.is_observable(e) else 0, q))
    lengths: dict[str, set[int]] = {s: set() for s in a.states}
    for i in a.initial:
        lengths[i].add(0)
    for p in order:
        if not lengths[p]:
            continue
        for (w, q) in outgoing.get(p, ()):
            lengths[q].update(d + w for d in lengths[p])
    return lengths


def _target_lengths(lengths: dict[str, set[int]], targets: frozenset[str]) -> set[int]:
    out: set[int] = set()
    for t in targets:
        out |= lengths[t]
    return out


def verify_cso_unary_acyclic(inst: CsoInstance) -> Verdict:
    """Fast path for acyclic automata with a single observable event.

    Computes the observation lengths reaching the secret and the non-secret
    sets by dynamic programming over the acyclic graph; opaque iff the former
    is contained in the latter.  The witness repeats the observable event for
    the smallest uncovered length.
    """
    a = inst.automaton
    event = _sole_observable_event(a)
    if event is None or not classify(a).acyclic:
        raise PreconditionViolated(
            "unary-acyclic requires an acyclic automaton with exactly one observable event"
        )
    lengths = _run_lengths(a, a.transitions)
    secret_lengths = _target_lengths(lengths, inst.secret)
    nonsecret_lengths = _target_lengths(lengths, inst.nonsecret)
    if secret_lengths <= nonsecret_lengths:
        return Verdict(True)
    obs = (event,) * min(secret_lengths - nonsecret_lengths)
    return Verdict(False, Witness(obs, realize_observation(a, inst.secret, obs)))


def _min_observable_distances(
    a: Automaton, seeds: Iterable[str], *, reverse: bool
) -> dict[str, int]:
    """0/1 breadth-first distances counting observable edges; self-loops skipped."""
    adj: dict[str, list[tuple[int, str]]] = {}
    for (p, e, q) in a.transitions:
        if p == q:
            continue
        u, v = (q, p) if reverse else (p, q)
        adj.setdefault(u, []).append((1 if a.is_observable(e) else 0, v))
    dist = {s: 0 for s in seeds}
    queue = deque(sorted(dist))
    while queue:
        u = queue.popleft()
        for (w, v) in adj.get(u, ()):
            d = dist[u] + w
            if v not in dist or d < dist[v]:
                dist[v] = d
                if w == 0:
                    queue.appendleft(v)
                else:
                    queue.append(v)
    return dist


def observation_length_set(a: Automaton, targets: Iterable[str]) -> LengthSet:
    """Observation lengths of runs into ``targets`` for a unary partially ordered automaton.

    The finite part collects runs that use no observable self-loop (dynamic
    programming over the self-loop-free residue, which is acyclic; unobservable
    self-loops contribute nothing).  A single ray starts at the cheapest way to
    route through any observable self-loop, since that loop can be pumped.
    """
    targets = frozenset(targets)
    loop_free = [(p, e, q) for (p, e, q) in a.transitions if p != q]
    finite = _target_lengths(_run_lengths(a, loop_free), targets)
    from_initial = _min_observable_distances(a, a.initial, reverse=False)
    to_target = _min_observable_distances(a, targets, reverse=True)
    ray: Optional[int] = None
    for (p, e, q) in a.transitions:
        if p == q and a.is_observable(e) and p in from_initial and p in to_target:
            candidate = from_initial[p] + to_target[p]
            ray = candidate if ray is None else min(ray, candidate)
    return LengthSet(frozenset(finite), ray)


def verify_cso_unary_po(inst: CsoInstance) -> Verdict:
    """Fast path for partially ordered automata with a single observable event.

    Opaque iff the semilinear length set of the secret runs is contained in
    that of the non-secret runs (a ray is covered only by a ray starting no
    later).  The witness repeats the observable event for the smallest
    uncovered length.
    """
    a = inst.automaton
    event = _sole_observable_event(a)
    if event is None or not classify(a).partially_ordered:
        raise PreconditionViolated(
            "unary-po requires a partially ordered automaton with exactly one observable event"
        )
    secret_set = observation_length_set(a, inst.secret)
    nonsecret_set = observation_length_set(a, inst.nonsecret)
    k = secret_set.min_uncovered(nonsecret_set)
    if k is None:
        return Verdict(True)
    obs = (event,) * k
    return Verdict(False, Witness(obs, realize_observation(a, inst.secret, obs)))


def select_cso_algorithm(inst: CsoInstance) -> str:
    """Routing used by ``verify_cso(..., "auto")``: unary-acyclic, unary-po, observer."""
    a = inst.automaton
    if _sole_observable_event(a) is not None:
        report = classify(a)
        if report.acyclic:
            return "unary-acyclic"
        if report.partially_ordered:
            return "unary-po"
    return "observer"


def verify_cso(
    inst: CsoInstance, algorithm: str = "auto", *, cap: int = DEFAULT_OBSERVER_CAP
) -> Verdict:
    """Current-state opacity with selectable algorithm.

    ``auto`` routes to the structurally cheapest applicable algorithm; forcing
    an inapplicable one raises :class:`PreconditionViolated`.  All applicable
    choices return the same verdict and witness.
    """
    if algorithm not in CSO_ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}, expected one of {CSO_ALGORITHMS}")
    if algorithm == "auto":
        algorithm = select_cso_algorithm(inst)
    if algorithm == "observer":
        return verify_cso_observer(inst, cap=cap)
    if algorithm == "inclusion":
        return verify_cso_inclusion(inst, cap=cap)
    if algorithm == "unary-acyclic":
        return verify_cso_unary_acyclic(inst)
    return verify_cso_unary_po(inst)


def verify_lbo(inst: LboInstance, *, cap: int = DEFAULT_OBSERVER_CAP) -> Verdict:
    """Language-based opacity: the projected secret language is contained in the
    projected non-secret language."""
    return inclusion_modulo_projection(
        inst.secret_automaton,
        inst.secret_automaton.marked,
        inst.nonsecret_automaton,
        inst.nonsecret_automaton.marked,
        cap=cap,
    )


def verify_lbo_weak(inst: LboInstance) -> Verdict:
    """Language-based weak opacity: some secret string is confused with some
    non-secret string, i.e. the projected languages intersect.  The witness (on
    a holding verdict) is the shortest common observation."""
    return intersection_nonempty_modulo_projection(
        inst.secret_automaton,
        inst.secret_automaton.marked,
        inst.nonsecret_automaton,
        inst.nonsecret_automaton.marked,
    )


def verify_iso(inst: IsoInstance, *, cap: int = DEFAULT_OBSERVER_CAP) -> Verdict:
    """Initial-state opacity over generated languages.

    For every secret initial state, everything observable from it must also be
    observable from the non-secret initial set; generated languages are used,
    so every state counts as marked.
    """
    a = inst.automaton
    all_states = frozenset(a.states)
    restarted_nonsecret = a.with_initial(inst.nonsecret_initial)
    for i in sorted(inst.secret_initial):
        verdict = inclusion_modulo_projection(
            a.with_initial({i}), all_states, restarted_nonsecret, all_states, cap=cap
        )
        if not verdict.holds:
            return verdict
    return Verdict(True)


def _pair_language_automaton(
    a: Automaton, pairs: frozenset[tuple[str, str]]
) -> tuple[Automaton, frozenset[str]]:
    """Disjoint union of one single-initial copy of ``a`` per (initial, marked) pair."""
    states: list[str] = []
    transitions: set[tuple[str, str, str]] = set()
    initial: set[str] = set()
    marked: set[str] = set()
    for k, (i, f) in enumerate(sorted(pairs)):
        prefix = f"{k}:"
        states.extend(prefix + s for s in a.states)
        transitions.update((prefix + p, e, prefix + q) for (p, e, q) in a.transitions)
        initial.add(prefix + i)
        marked.add(prefix + f)
    return (
        Automaton(tuple(states), a.alphabet, transitions, initial, marked),
        frozenset(marked),
    )


def verify_ifso(inst: IfsoInstance, *, cap: int = DEFAULT_OBSERVER_CAP) -> Verdict:
    """Initial-and-final-state opacity.

    Each pair (i, f) contributes the language of the automaton restarted in i
    and marked at f; the union of the secret pair languages must be included,
    modulo projection, in the union of the non-secret pair languages.  One
    copy of the automaton is materialized per pair.
    """
    a = inst.automaton
    secret_auto, secret_marked = _pair_language_automaton(a, inst.secret_pairs)
    nonsecret_auto, nonsecret_marked = _pair_language_automaton(a, inst.nonsecret_pairs)
    return inclusion_modulo_projection(
        secret_auto, secret_marked, nonsecret_auto, nonsecret_marked, cap=cap
    )
