"""Independent brute-force reference implementations, used for testing only.

Nothing here shares traversal code with the main algorithms: this module sees
only the parsed data model and re-derives everything by exhaustive search, so
the two sides can cross-check each other.  Performance is explicitly not a
goal; inputs beyond desk scale are rejected or simply slow.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .automata import EPSILON, Automaton, Observation, Verdict, Witness
from .errors import PreconditionViolated, TooLarge
from .gadgets import CnfFormula, Dag
from .opacity import CsoInstance

MAX_SAT_VARIABLES = 24

Assignment = tuple[bool, ...]


def brute_sat(formula: CnfFormula) -> Optional[Assignment]:
    """Exhaustive satisfiability check; the lexicographically first satisfying
    assignment (False before True, first variable most significant) or None."""
    n = formula.variable_count
    if n > MAX_SAT_VARIABLES:
        raise TooLarge(f"brute_sat handles at most {MAX_SAT_VARIABLES} variables, got {n}")
    positive = []
    negative = []
    for clause in formula.clauses:
        positive.append(sum(1 << (n - lit) for lit in clause if lit > 0))
        negative.append(sum(1 << (n + lit) for lit in clause if lit < 0))
    full = (1 << n) - 1
    for mask in range(1 << n):
        if all(mask & p or (full ^ mask) & m for p, m in zip(positive, negative)):
            return tuple(bool((mask >> (n - j)) & 1) for j in range(1, n + 1))
    return None


def satisfies(formula: CnfFormula, assignment: Assignment) -> bool:
    if len(assignment) != formula.variable_count:
        raise ValueError("assignment length must equal the variable count")
    return all(
        any(assignment[abs(lit) - 1] == (lit > 0) for lit in clause)
        for clause in formula.clauses
    )


def dag_reachable(g: Dag) -> bool:
    """Depth-first search answer to whether the target is reachable from the source."""
    adjacency: dict[int, list[int]] = {}
    for (u, v) in g.edges:
        adjacency.setdefault(u, []).append(v)
    stack = [g.source]
    seen = {g.source}
    while stack:
        u = stack.pop()
        if u == g.target:
            return True
        for v in adjacency.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return False


def _is_unobservable(a: Automaton, event: str) -> bool:
    return event == EPSILON or not a.events_by_name[event].observable


def _assert_acyclic(a: Automaton) -> None:
    # Local cycle check (colored depth-first search); deliberately not the
    # classification code of the main algorithms.
    adjacency: dict[str, list[str]] = {}
    for (p, _, q) in a.transitions:
        adjacency.setdefault(p, []).append(q)
    color: dict[str, int] = {}
    for root in a.states:
        if color.get(root):
            continue
        stack = [(root, iter(adjacency.get(root, ())))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
            elif color.get(nxt, 0) == 1:
                raise PreconditionViolated("enumeration oracles require an acyclic automaton")
            elif color.get(nxt, 0) == 0:
                color[nxt] = 1
                stack.append((nxt, iter(adjacency.get(nxt, ()))))


def _walks(a: Automaton):
    """Yield every (event string, end state) walk from the initial states.

    Assumes acyclicity; the empty walk from each initial state is included.
    """
    adjacency: dict[str, list[tuple[str, str]]] = {}
    for (p, e, q) in sorted(a.transitions):
        adjacency.setdefault(p, []).append((e, q))
    stack = [((), q) for q in sorted(a.initial, reverse=True)]
    while stack:
        string, q = stack.pop()
        yield string, q
        for (e, target) in adjacency.get(q, ()):
            stack.append((string + (e,), target))


def _project(a: Automaton, string: Iterable[str]) -> Observation:
    return tuple(e for e in string if not _is_unobservable(a, e))


def enum_cso_acyclic(inst: CsoInstance) -> Verdict:
    """Definitional current-state opacity check by full language enumeration.

    Groups all strings of the (finite) generated language by their projection;
    opaque iff every observation consistent with a secret end state is also
    consistent with a non-secret one.  Witnesses are minimal: shortest, then
    lexicographic by alphabet declaration order, for both the observation and
    the replay string.
    """
    a = inst.automaton
    _assert_acyclic(a)
    rank = {e.name: k for k, e in enumerate(a.alphabet)}

    def key(string):
        return len(string), tuple(rank[e] for e in string)

    secret_strings: dict[Observation, tuple[str, ...]] = {}
    nonsecret_obs: set[Observation] = set()
    for string, end in _walks(a):
        obs = _project(a, string)
        if end in inst.secret:
            best = secret_strings.get(obs)
            if best is None or key(string) < key(best):
                secret_strings[obs] = string
        if end in inst.nonsecret:
            nonsecret_obs.add(obs)
    violating = set(secret_strings) - nonsecret_obs
    if not violating:
        return Verdict(True)
    observation = min(violating, key=key)
    return Verdict(False, Witness(observation, secret_strings[observation]))


def enum_languages_projected(a: Automaton, marking: Iterable[str]) -> set[Observation]:
    """The exact, finite set of projected strings reaching ``marking``."""
    marking = frozenset(marking)
    _assert_acyclic(a)
    return {_project(a, string) for string, end in _walks(a) if end in marking}


def observation_feasible(a: Automaton, targets: Iterable[str], observation: Observation) -> bool:
    """Membership query: does some string with this projection reach ``targets``?

    Used to replay emitted witnesses independently of the algorithm that
    produced them.
    """
    targets = frozenset(targets)
    adjacency: dict[str, list[tuple[str, str]]] = {}
    for (p, e, q) in a.transitions:
        adjacency.setdefault(p, []).append((e, q))
    n = len(observation)
    stack = [(q, 0) for q in a.initial]
    seen = set(stack)
    while stack:
        q, k = stack.pop()
        if k == n and q in targets:
            return True
        for (e, target) in adjacency.get(q, ()):
            if _is_unobservable(a, e):
                nxt = (target, k)
            elif k < n and e == observation[k]:
                nxt = (target, k + 1)
            else:
                continue
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return False


def string_reaches(a: Automaton, targets: Iterable[str], string: Iterable[str]) -> bool:
    """Membership query: does this full event string have a run into ``targets``?"""
    targets = frozenset(targets)
    current = set(a.initial)
    for e in string:
        current = {q for (p, e2, q) in a.transitions if p in current and e2 == e}
        if not current:
            return False
    return bool(current & targets)
