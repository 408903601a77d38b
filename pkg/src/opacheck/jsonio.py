"""Canonical JSON and DIMACS parsing/serialization.

Serialization is canonical so that round-trips are byte-stable: object keys
are sorted, state and transition lists are sorted lexicographically, and the
alphabet keeps its declaration order because witness tie-breaking depends on
it.  Unknown keys are rejected.
"""

from __future__ import annotations

import json
from typing import Any

from .automata import Automaton, Event
from .errors import ParseError
from .gadgets import CnfFormula, Dag
from .opacity import CsoInstance, IfsoInstance, IsoInstance, LboInstance

NOTIONS = ("cso", "iso", "ifso", "lbo", "lbo-weak")

_AUTOMATON_KEYS = {"alphabet", "states", "initial", "marked", "transitions"}
_INSTANCE_KEYS = {
    "cso": {"automaton", "secret", "nonsecret"},
    "iso": {"automaton", "secret_initial", "nonsecret_initial"},
    "ifso": {"automaton", "secret_pairs", "nonsecret_pairs"},
    "lbo": {"secret_automaton", "nonsecret_automaton"},
}


def _check_keys(d: dict, required: set[str], what: str, optional: set[str] = frozenset()):
    if not isinstance(d, dict):
        raise ParseError(f"{what} must be a JSON object")
    unknown = set(d) - required - optional
    if unknown:
        raise ParseError(f"{what} has unknown keys: {sorted(unknown)}")
    missing = required - set(d)
    if missing:
        raise ParseError(f"{what} is missing keys: {sorted(missing)}")


def _string_list(value: Any, what: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(s, str) for s in value):
        raise ParseError(f"{what} must be an array of strings")
    return value


def automaton_from_dict(d: dict) -> Automaton:
    _check_keys(d, _AUTOMATON_KEYS, "automaton")
    alphabet = []
    if not isinstance(d["alphabet"], list):
        raise ParseError("alphabet must be an array")
    for entry in d["alphabet"]:
        _check_keys(entry, {"name", "observable"}, "alphabet entry")
        name, observable = entry["name"], entry["observable"]
        if not isinstance(name, str) or not name:
            raise ParseError("event names must be non-empty strings")
        if not isinstance(observable, bool):
            raise ParseError("event observability must be a boolean")
        alphabet.append(Event(name, observable))
    states = _string_list(d["states"], "states")
    initial = _string_list(d["initial"], "initial")
    marked = _string_list(d["marked"], "marked")
    if not initial:
        raise ParseError("initial state set must not be empty")
    transitions = []
    if not isinstance(d["transitions"], list):
        raise ParseError("transitions must be an array")
    for t in d["transitions"]:
        if not (isinstance(t, list) and len(t) == 3 and all(isinstance(x, str) for x in t)):
            raise ParseError("each transition must be a [source, event, target] triple")
        if not t[1]:
            raise ParseError("transition events must be declared, non-empty names")
        transitions.append(tuple(t))
    try:
        return Automaton(tuple(states), tuple(alphabet), transitions, initial, marked)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def automaton_to_dict(a: Automaton) -> dict:
    if any(not e for (_, e, _) in a.transitions):
        raise ValueError("cannot serialize an automaton with erased transitions")
    return {
        "alphabet": [{"name": e.name, "observable": e.observable} for e in a.alphabet],
        "states": sorted(a.states),
        "initial": sorted(a.initial),
        "marked": sorted(a.marked),
        "transitions": sorted([p, e, q] for (p, e, q) in a.transitions),
    }


def _pair_list(value: Any, what: str) -> list[tuple[str, str]]:
    if not isinstance(value, list):
        raise ParseError(f"{what} must be an array of [initial, marked] pairs")
    pairs = []
    for p in value:
        if not (isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p)):
            raise ParseError(f"{what} must contain [initial, marked] string pairs")
        pairs.append((p[0], p[1]))
    return pairs


def instance_from_dict(d: dict, notion: str):
    """Parse the instance JSON for a notion ("lbo-weak" shares the "lbo" format)."""
    if notion not in NOTIONS:
        raise ParseError(f"unknown notion {notion!r}")
    kind = "lbo" if notion == "lbo-weak" else notion
    _check_keys(d, _INSTANCE_KEYS[kind], f"{notion} instance", optional={"metadata"})
    try:
        if kind == "cso":
            return CsoInstance(
                automaton_from_dict(d["automaton"]),
                frozenset(_string_list(d["secret"], "secret")),
                frozenset(_string_list(d["nonsecret"], "nonsecret")),
            )
        if kind == "iso":
            return IsoInstance(
                automaton_from_dict(d["automaton"]),
                frozenset(_string_list(d["secret_initial"], "secret_initial")),
                frozenset(_string_list(d["nonsecret_initial"], "nonsecret_initial")),
            )
        if kind == "ifso":
            return IfsoInstance(
                automaton_from_dict(d["automaton"]),
                frozenset(_pair_list(d["secret_pairs"], "secret_pairs")),
                frozenset(_pair_list(d["nonsecret_pairs"], "nonsecret_pairs")),
            )
        return LboInstance(
            automaton_from_dict(d["secret_automaton"]),
            automaton_from_dict(d["nonsecret_automaton"]),
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def instance_to_dict(instance, metadata: dict | None = None) -> dict:
    if isinstance(instance, CsoInstance):
        out = {
            "automaton": automaton_to_dict(instance.automaton),
            "secret": sorted(instance.secret),
            "nonsecret": sorted(instance.nonsecret),
        }
    elif isinstance(instance, IsoInstance):
        out = {
            "automaton": automaton_to_dict(instance.automaton),
            "secret_initial": sorted(instance.secret_initial),
            "nonsecret_initial": sorted(instance.nonsecret_initial),
        }
    elif isinstance(instance, IfsoInstance):
        out = {
            "automaton": automaton_to_dict(instance.automaton),
            "secret_pairs": sorted([i, f] for (i, f) in instance.secret_pairs),
            "nonsecret_pairs": sorted([i, f] for (i, f) in instance.nonsecret_pairs),
        }
    elif isinstance(instance, LboInstance):
        out = {
            "secret_automaton": automaton_to_dict(instance.secret_automaton),
            "nonsecret_automaton": automaton_to_dict(instance.nonsecret_automaton),
        }
    else:
        raise TypeError(f"cannot serialize {type(instance).__name__}")
    if metadata is not None:
        out["metadata"] = metadata
    return out


def dumps(payload: dict) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load_json_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top-level JSON value must be an object")
    return data


def dag_from_dict(d: dict) -> Dag:
    _check_keys(d, {"vertices", "edges", "s", "t"}, "DAG")
    if not isinstance(d["vertices"], int):
        raise ParseError("vertices must be an integer count")
    if not isinstance(d["edges"], list):
        raise ParseError("edges must be an array")
    edges = []
    for e in d["edges"]:
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            raise ParseError("each edge must be an [int, int] pair")
        edges.append((e[0], e[1]))
    if not isinstance(d["s"], int) or not isinstance(d["t"], int):
        raise ParseError("s and t must be vertex indices")
    try:
        return Dag(d["vertices"], frozenset(edges), d["s"], d["t"])
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF: a ``p cnf <vars> <clauses>`` header, comment lines
    starting with ``c``, and zero-terminated clauses (which may span lines)."""
    header: tuple[int, int] | None = None
    tokens: list[str] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise ParseError("duplicate DIMACS header")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"malformed DIMACS header: {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError as exc:
                raise ParseError(f"malformed DIMACS header: {line!r}") from exc
            continue
        if header is None:
            raise ParseError("clause data before the DIMACS header")
        tokens.extend(line.split())
    if header is None:
        raise ParseError("missing DIMACS header")
    clauses: list[frozenset[int]] = []
    current: set[int] = set()
    for token in tokens:
        try:
            literal = int(token)
        except ValueError as exc:
            raise ParseError(f"malformed DIMACS literal: {token!r}") from exc
        if literal == 0:
            clauses.append(frozenset(current))
            current = set()
        else:
            current.add(literal)
    if current:
        raise ParseError("last clause is not zero-terminated")
    n, m = header
    if len(clauses) != m:
        raise ParseError(f"header announces {m} clauses but {len(clauses)} were given")
    return CnfFormula(n, tuple(clauses))
