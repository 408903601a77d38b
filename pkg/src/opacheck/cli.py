"""Command-line front end.

Exit codes are scriptable: 0 when the checked property holds (or a gen/classify
run succeeded), 1 when the property is violated, 2 on any input or usage error.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import asdict, dataclass

from . import gadgets, jsonio, oracles
from .automata import DEFAULT_OBSERVER_CAP, Automaton, Verdict, classify
from .errors import OpacheckError
from .opacity import (
    CSO_ALGORITHMS,
    CsoInstance,
    LboInstance,
    select_cso_algorithm,
    verify_cso,
    verify_ifso,
    verify_iso,
    verify_lbo,
    verify_lbo_weak,
)

NOTION_TITLES = {
    "cso": "current-state opacity",
    "iso": "initial-state opacity",
    "ifso": "initial-and-final-state opacity",
    "lbo": "language-based opacity",
    "lbo-weak": "language-based weak opacity",
}


@dataclass(frozen=True)
class RunConfig:
    notion: str
    algorithm: str
    witness: bool
    observer_cap: int
    output: str

    def __post_init__(self) -> None:
        if self.notion != "cso" and self.algorithm != "auto":
            raise ValueError("--algorithm can only be chosen for --notion cso")
        if self.observer_cap < 1:
            raise ValueError("--observer-cap must be positive")


def _render_string(alphabet_names, string) -> str:
    if not string:
        return "ε"
    if all(len(name) == 1 for name in alphabet_names):
        return "".join(string)
    return ".".join(string)


def _witness_json(verdict: Verdict):
    if verdict.witness is None:
        return None
    return {
        "observation": list(verdict.witness.observation),
        "secret_run": list(verdict.witness.secret_run),
    }


def _run_verification(config: RunConfig, instance):
    if config.notion == "cso":
        algorithm = (
            select_cso_algorithm(instance) if config.algorithm == "auto" else config.algorithm
        )
        return verify_cso(instance, algorithm, cap=config.observer_cap), algorithm
    if config.notion == "iso":
        return verify_iso(instance, cap=config.observer_cap), "inclusion"
    if config.notion == "ifso":
        return verify_ifso(instance, cap=config.observer_cap), "inclusion"
    if config.notion == "lbo":
        return verify_lbo(instance, cap=config.observer_cap), "inclusion"
    return verify_lbo_weak(instance), "product"


def _classification_json(instance) -> dict:
    if isinstance(instance, LboInstance):
        return {
            "secret_automaton": asdict(classify(instance.secret_automaton)),
            "nonsecret_automaton": asdict(classify(instance.nonsecret_automaton)),
        }
    return asdict(classify(instance.automaton))


def _cmd_verify(args) -> int:
    config = RunConfig(args.notion, args.algorithm, args.witness, args.observer_cap, args.output)
    reports = []
    codes = []
    for path in args.files:
        try:
            instance = jsonio.instance_from_dict(jsonio.load_json_file(path), config.notion)
            if isinstance(instance, CsoInstance):
                overlap = instance.secret & instance.nonsecret
                if overlap:
                    print(
                        f"warning: {len(overlap)} state(s) are both secret and non-secret",
                        file=sys.stderr,
                    )
            started = time.perf_counter()
            verdict, algorithm = _run_verification(config, instance)
            elapsed = time.perf_counter() - started
        except OpacheckError as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            codes.append(2)
            continue
        codes.append(0 if verdict.holds else 1)
        if config.output == "json":
            reports.append(
                {
                    "file": path,
                    "notion": config.notion,
                    "algorithm": algorithm,
                    "holds": verdict.holds,
                    "witness": _witness_json(verdict),
                    "classification": _classification_json(instance),
                    "time_seconds": round(elapsed, 6),
                }
            )
        else:
            prefix = f"{path}: " if len(args.files) > 1 else ""
            status = "holds" if verdict.holds else "violated"
            print(f"{prefix}{NOTION_TITLES[config.notion]}: {status}")
            if config.witness and verdict.witness is not None:
                if isinstance(instance, LboInstance):
                    names = [e.name for e in instance.secret_automaton.alphabet]
                else:
                    names = [e.name for e in instance.automaton.alphabet]
                print(f"{prefix}witness observation: "
                      f"{_render_string(names, verdict.witness.observation)}")
                print(f"{prefix}witness string: "
                      f"{_render_string(names, verdict.witness.secret_run)}")
    if config.output == "json":
        payload = reports[0] if len(reports) == 1 and len(args.files) == 1 else reports
        print(jsonio.dumps(payload) if isinstance(payload, dict)
              else jsonio.dumps({"results": payload}), end="")
    return max(codes) if codes else 2


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _emit(payload: dict) -> int:
    sys.stdout.write(jsonio.dumps(payload))
    return 0


def _cmd_gen_cnf(args) -> int:
    formula = jsonio.parse_dimacs(_read_text(args.file))
    return _emit(jsonio.instance_to_dict(gadgets.gen_cnf_cso(formula)))


def _cmd_gen_dag_weak_lbo(args) -> int:
    dag = jsonio.dag_from_dict(jsonio.load_json_file(args.file))
    return _emit(jsonio.instance_to_dict(gadgets.gen_dag_weak_lbo(dag)))


def _cmd_gen_dag_unary_cso(args) -> int:
    dag = jsonio.dag_from_dict(jsonio.load_json_file(args.file))
    return _emit(jsonio.instance_to_dict(gadgets.gen_dag_cso_unary(dag)))


def _cmd_gen_union(args) -> int:
    components = [jsonio.automaton_from_dict(jsonio.load_json_file(p)) for p in args.files]
    result = gadgets.gen_union_universality_cso(components)
    return _emit(jsonio.instance_to_dict(result.instance, metadata=result.metadata()))


def _cmd_gen_po_det(args) -> int:
    data = jsonio.load_json_file(args.file)
    if "secret" in data:
        instance = jsonio.instance_from_dict(data, "cso")
        result = gadgets.po_determinize(instance.automaton, args.chain_event)
        transformed = CsoInstance(result.automaton, instance.secret, instance.nonsecret)
        return _emit(jsonio.instance_to_dict(transformed, metadata=result.metadata()))
    automaton = jsonio.automaton_from_dict(data)
    result = gadgets.po_determinize(automaton, args.chain_event)
    return _emit(
        {"automaton": jsonio.automaton_to_dict(result.automaton), "metadata": result.metadata()}
    )


def _cmd_gen_cso2lbo(args) -> int:
    instance = jsonio.instance_from_dict(jsonio.load_json_file(args.file), "cso")
    return _emit(jsonio.instance_to_dict(gadgets.cso_to_lbo(instance)))


def _cmd_gen_lbo2iso(args) -> int:
    instance = jsonio.instance_from_dict(jsonio.load_json_file(args.file), "lbo")
    result = gadgets.lbo_to_iso(instance)
    return _emit(jsonio.instance_to_dict(result.instance, metadata=result.metadata()))


def _automata_in_file(data: dict) -> list[tuple[str, Automaton]]:
    if "states" in data:
        return [("automaton", jsonio.automaton_from_dict(data))]
    if "secret_automaton" in data:
        return [
            ("secret_automaton", jsonio.automaton_from_dict(data["secret_automaton"])),
            ("nonsecret_automaton", jsonio.automaton_from_dict(data["nonsecret_automaton"])),
        ]
    if "automaton" in data:
        return [("automaton", jsonio.automaton_from_dict(data["automaton"]))]
    raise jsonio.ParseError("file contains neither an automaton nor an instance")


def _cmd_classify(args) -> int:
    data = jsonio.load_json_file(args.file)
    found = _automata_in_file(data)
    if args.output == "json":
        return _emit({role: asdict(classify(a)) for role, a in found})
    for role, automaton in found:
        report = classify(automaton)
        prefix = f"{role}: " if len(found) > 1 else ""
        print(f"{prefix}deterministic: {report.deterministic}")
        print(f"{prefix}acyclic: {report.acyclic}")
        print(f"{prefix}partially_ordered: {report.partially_ordered}")
        print(f"{prefix}observable_events: {report.observable_event_count}")
        print(f"{prefix}unobservable_events: {report.unobservable_event_count}")
    return 0


def _cmd_oracle_sat(args) -> int:
    formula = jsonio.parse_dimacs(_read_text(args.file))
    assignment = oracles.brute_sat(formula)
    if assignment is None:
        print("UNSAT")
        return 1
    bits = "".join("1" if value else "0" for value in assignment)
    print(f"SAT {bits}")
    return 0


def _cmd_oracle_dag_reach(args) -> int:
    dag = jsonio.dag_from_dict(jsonio.load_json_file(args.file))
    reachable = oracles.dag_reachable(dag)
    print("reachable" if reachable else "unreachable")
    return 0 if reachable else 1


def _cmd_oracle_enum_cso(args) -> int:
    instance = jsonio.instance_from_dict(jsonio.load_json_file(args.file), "cso")
    verdict = oracles.enum_cso_acyclic(instance)
    print(f"{NOTION_TITLES['cso']}: {'holds' if verdict.holds else 'violated'}")
    if args.witness and verdict.witness is not None:
        names = [e.name for e in instance.automaton.alphabet]
        print(f"witness observation: {_render_string(names, verdict.witness.observation)}")
        print(f"witness string: {_render_string(names, verdict.witness.secret_run)}")
    return 0 if verdict.holds else 1


def _cmd_dot(args) -> int:
    data = jsonio.load_json_file(args.file)
    lines = ["digraph {", "  rankdir=LR;"]
    for role, a in _automata_in_file(data):
        cluster = role.replace("automaton", "").strip("_") or None
        for s in sorted(a.states):
            shape = "doublecircle" if s in a.marked else "circle"
            name = f"{cluster}:{s}" if cluster else s
            lines.append(f'  "{name}" [shape={shape}];')
        for k, s in enumerate(sorted(a.initial)):
            name = f"{cluster}:{s}" if cluster else s
            lines.append(f'  "__start_{cluster or ""}{k}" [shape=point];')
            lines.append(f'  "__start_{cluster or ""}{k}" -> "{name}";')
        for (p, e, q) in sorted(a.transitions):
            style = "" if a.is_observable(e) else " style=dashed"
            src = f"{cluster}:{p}" if cluster else p
            dst = f"{cluster}:{q}" if cluster else q
            lines.append(f'  "{src}" -> "{dst}" [label="{e}"{style}];')
    lines.append("}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opacheck",
        description="Verify opacity of partially observed discrete-event systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="decide an opacity notion on instance files")
    verify.add_argument("--notion", required=True, choices=sorted(NOTION_TITLES))
    verify.add_argument("--algorithm", default="auto", choices=CSO_ALGORITHMS)
    verify.add_argument("--witness", action="store_true", help="print the witness, if any")
    verify.add_argument("--observer-cap", type=int, default=DEFAULT_OBSERVER_CAP)
    verify.add_argument("--output", default="text", choices=("text", "json"))
    verify.add_argument("files", nargs="+")
    verify.set_defaults(func=_cmd_verify)

    gen = sub.add_parser("gen", help="generate instances from classic hard problems")
    gen_sub = gen.add_subparsers(dest="kind", required=True)
    for kind, func, help_text in (
        ("cnf", _cmd_gen_cnf, "DIMACS file to a CSO instance (opaque iff unsatisfiable)"),
        ("dag-weak-lbo", _cmd_gen_dag_weak_lbo, "DAG to a weak-opacity instance"),
        ("dag-unary-cso", _cmd_gen_dag_unary_cso, "DAG to a unary acyclic CSO instance"),
        ("cso2lbo", _cmd_gen_cso2lbo, "CSO instance to an equivalent LBO instance"),
        ("lbo2iso", _cmd_gen_lbo2iso, "LBO instance to an equivalent ISO instance"),
    ):
        p = gen_sub.add_parser(kind, help=help_text)
        p.add_argument("file")
        p.set_defaults(func=func)
    union = gen_sub.add_parser("union", help="DFA files to a CSO instance (opaque iff union universal)")
    union.add_argument("files", nargs="+")
    union.set_defaults(func=_cmd_gen_union)
    po_det = gen_sub.add_parser("po-det", help="determinize a partially ordered automaton or CSO instance")
    po_det.add_argument("file")
    po_det.add_argument("--chain-event", required=True,
                        help="observable event used to exit the initial chain")
    po_det.set_defaults(func=_cmd_gen_po_det)

    cls = sub.add_parser("classify", help="report structure of an automaton or instance file")
    cls.add_argument("file")
    cls.add_argument("--output", default="text", choices=("text", "json"))
    cls.set_defaults(func=_cmd_classify)

    oracle = sub.add_parser("oracle", help="brute-force reference checks (debugging)")
    oracle_sub = oracle.add_subparsers(dest="oracle_kind", required=True)
    sat = oracle_sub.add_parser("sat", help="exhaustive DIMACS satisfiability")
    sat.add_argument("file")
    sat.set_defaults(func=_cmd_oracle_sat)
    reach = oracle_sub.add_parser("dag-reach", help="DAG reachability")
    reach.add_argument("file")
    reach.set_defaults(func=_cmd_oracle_dag_reach)
    enum = oracle_sub.add_parser("enum-cso", help="definitional CSO check on acyclic instances")
    enum.add_argument("file")
    enum.add_argument("--witness", action="store_true")
    enum.set_defaults(func=_cmd_oracle_enum_cso)

    dot = sub.add_parser("dot", help="DOT export of an automaton or instance file")
    dot.add_argument("file")
    dot.add_argument("-o", "--out", default=None)
    dot.set_defaults(func=_cmd_dot)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OpacheckError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
