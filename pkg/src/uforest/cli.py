"""Command-line front end.

Exit codes: 0 when every checked property holds, 1 on a property violation,
2 on unreadable or invalid input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from types import SimpleNamespace

from . import fixtures
from .algebra import Morphism, eval_morphism, morphism_from_json, semigroup_from_json
from .automaton import (OrderedAutomaton, accepting_runs_finite, automaton_from_json,
                        verify_goodness)
from .errors import InputError, MissingBuildReport, SizeOverflow, UForestError
from .gen import DEFAULT_CAP, random_morphism, sweep_instances
from .pipeline import PipelineConfig, check_instance
from .ramsey import (default_heights, optimized_heights, split_word, tree_from_split,
                     verify_fact_tree)
from .rexpr import (RExpr, count_omega_parses, count_parses, eliminate, finite_expressions,
                    from_dag_json, from_text, omega_branch_matches, omega_expression,
                    parse_to_fact_tree, parse_unique, to_dag_json, to_text)
from .synthesis import build_report
from .words import UPWord, words_up_to

TEXT_TREE_LIMIT = 20000


# ---------------------------------------------------------------- file formats


def read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def morphism_to_json(phi: Morphism) -> dict:
    return {"semigroup": phi.semigroup.to_json(), **phi.to_json()}


def morphism_from_data(data: dict, base: Path | None = None) -> Morphism:
    sg = data.get("semigroup")
    if isinstance(sg, str):
        sg = read_json(str((base or Path(".")) / sg))
    if not isinstance(sg, dict):
        raise InputError("morphism file needs a 'semigroup' object or path")
    for key in ("alphabet", "map"):
        if key not in data:
            raise InputError(f"morphism file lacks {key!r}")
    return morphism_from_json(data, semigroup_from_json(sg))


def load_morphism(source: str) -> Morphism:
    """A morphism file, or ``fixture:NAME`` for a built-in one."""
    if source.startswith("fixture:"):
        name = source.split(":", 1)[1]
        if name not in fixtures.FIXTURES:
            raise InputError(f"unknown fixture {name!r}; known: {', '.join(fixtures.FIXTURES)}")
        return fixtures.FIXTURES[name]()
    return morphism_from_data(read_json(source), Path(source).parent)


def load_automaton(path: str) -> OrderedAutomaton:
    data = read_json(path)
    try:
        return automaton_from_json(data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path} is not an automaton file ({exc})") from None


def expr_to_json(E: RExpr, names, limit: int = TEXT_TREE_LIMIT):
    if E.tree_size <= limit:
        return to_text(E, names)
    return to_dag_json(E, names)


def expr_from_json(data, names) -> RExpr:
    if isinstance(data, str):
        return from_text(data, names)
    if isinstance(data, dict):
        return from_dag_json(data, names)
    raise InputError("expression must be text or a node list")


def expressions_to_json(phi: Morphism, F: dict[int, RExpr], G: RExpr, limit: int = TEXT_TREE_LIMIT) -> dict:
    names = phi.semigroup.names
    return {
        "morphism": morphism_to_json(phi),
        "finite": {names[s]: expr_to_json(E, names, limit) for s, E in F.items()},
        "omega": expr_to_json(G, names, limit),
    }


def expressions_from_json(data: dict):
    if "morphism" not in data:
        raise InputError("expression file lacks the morphism")
    phi = morphism_from_data(data["morphism"])
    names = phi.semigroup.names
    index = phi.semigroup.index
    F = {}
    for name, E in data.get("finite", {}).items():
        if name not in index:
            raise InputError(f"unknown element {name!r}")
        F[index[name]] = expr_from_json(E, names)
    G = expr_from_json(data["omega"], names) if data.get("omega") is not None else None
    return phi, F, G


def parse_word(text: str):
    """``abba`` is a finite word, ``ab(ba)^w`` an ultimately periodic one."""
    text = text.strip()
    if text.endswith("^w"):
        return UPWord.parse(text)
    if not text:
        raise InputError("words must be nonempty")
    return tuple(text)


def word_arg(args) -> tuple | UPWord:
    if args.word is not None:
        return parse_word(args.word)
    if args.word_file is not None:
        try:
            return parse_word(Path(args.word_file).read_text(encoding="utf-8"))
        except OSError as exc:
            raise InputError(f"cannot read {args.word_file}: {exc.strerror}") from None
    raise InputError("give a word with --word or --word-file")


def check_letters(phi: Morphism, w) -> None:
    letters = set(w.prefix + w.period) if isinstance(w, UPWord) else set(w)
    unknown = letters - set(phi.alphabet)
    if unknown:
        raise InputError(f"letter {sorted(unknown)[0]!r} is not in the alphabet")


# ---------------------------------------------------------------- output


def emit(args, payload, text: str | None = None, dot: str | None = None, name: str = "out") -> None:
    fmt = args.format
    if fmt == "dot" and dot is not None:
        body, ext = dot, "dot"
    elif fmt == "text" and text is not None:
        body, ext = text if text.endswith("\n") else text + "\n", "txt"
    else:
        body, ext = json.dumps(payload, indent=2, ensure_ascii=False) + "\n", "json"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.{ext}").write_text(body, encoding="utf-8")
    else:
        sys.stdout.write(body)


def _report_text(tree: dict, indent: int = 0) -> str:
    pad = "  " * indent
    line = f"{pad}{tree['case']}: |S|={tree['semigroup_size']} states={tree['reduced_states']} H={tree['height']}"
    if "profile" in tree:
        line += " profile=({},{},{})".format(*tree["profile"])
    lines = [line]
    for key, child in tree.get("children", {}).items():
        lines.append(f"{pad}  {key}:")
        lines.append(_report_text(child, indent + 2))
    return "\n".join(lines)


# ---------------------------------------------------------------- commands


def cmd_build(args) -> int:
    phi = load_morphism(args.morphism)
    node = build_report(phi)
    A = node.automaton
    report = {"report": node.to_json(), "heights": node.heights}
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "automaton.json").write_text(json.dumps(A.to_json(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        (out / "automaton.dot").write_text(A.to_dot(), encoding="utf-8")
        (out / "report.json").write_text(json.dumps(report, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        print(_report_text(report["report"]))
        return 0
    if args.format == "dot":
        sys.stdout.write(A.to_dot())
    elif args.format == "text":
        print(_report_text(report["report"]))
    else:
        print(json.dumps({"automaton": A.to_json(), **report}, indent=2, ensure_ascii=False))
    return 0


def cmd_verify(args) -> int:
    A = load_automaton(args.automaton)
    phi = load_morphism(args.morphism)
    rep = verify_goodness(A, phi, up_bound=tuple(args.up_bound))
    payload = rep.to_json()
    # brute-force cross-check of the exact finite verdicts
    bad = None
    if rep.g1:
        for w in words_up_to(phi.alphabet, args.max_len):
            n = len(accepting_runs_finite(A, w))
            if n != 1:
                bad = {"word": "".join(w), "runs": n}
                break
    payload["bounded_runs"] = {"max_len": args.max_len, "counterexample": bad}
    ok = rep.good and bad is None
    lines = [f"verdict: {rep.verdict}"]
    for g in ("g1", "g2", "g3", "g4"):
        lines.append(f"{g.upper()}: {'ok' if getattr(rep, g) else 'FAIL'}")
    if not ok:
        lines.append(f"witness: {json.dumps(payload['witness'] or bad, ensure_ascii=False)}")
    emit(args, payload, "\n".join(lines), name="verify")
    return 0 if ok else 1


def _heights(args, phi: Morphism, A: OrderedAutomaton | None):
    """The automaton to run and its height assignment."""
    if A is None:
        node = build_report(phi)
        A = node.automaton
        return A, optimized_heights(node, A) if args.optimize_heights else default_heights(A)
    if not args.optimize_heights:
        return A, default_heights(A)
    report = SimpleNamespace(heights=read_json(args.report)["heights"]) if args.report else None
    return A, optimized_heights(report, A)


def cmd_split(args) -> int:
    phi = load_morphism(args.morphism)
    A = load_automaton(args.automaton) if args.automaton else None
    A, h = _heights(args, phi, A)
    w = word_arg(args)
    check_letters(phi, w)
    sp = split_word(A, h, w)
    payload = sp.to_json()
    emit(args, payload, json.dumps(payload), name="split")
    return 0


def cmd_tree(args) -> int:
    phi = load_morphism(args.morphism)
    A = load_automaton(args.automaton) if args.automaton else None
    A, h = _heights(args, phi, A)
    w = word_arg(args)
    if isinstance(w, UPWord):
        raise InputError("factorization trees are built for finite words")
    check_letters(phi, w)
    tree = tree_from_split(w, split_word(A, h, w), phi)
    verdict = verify_fact_tree(tree, phi, w)
    names = phi.semigroup.names
    emit(args, tree.to_json(names), json.dumps(tree.to_json(names), ensure_ascii=False), tree.to_dot(names), name="tree")
    return 0 if verdict.ok else 1


def cmd_expr(args) -> int:
    phi = load_morphism(args.morphism)
    A = load_automaton(args.automaton) if args.automaton else build_report(phi).automaton
    T = eliminate(A, phi)
    F = finite_expressions(A, phi, T)
    G = omega_expression(A, phi, T)
    payload = expressions_to_json(phi, F, G, args.text_limit)
    names = phi.semigroup.names
    lines = []
    for s, E in F.items():
        shown = payload["finite"][names[s]]
        lines.append(f"F_{names[s]} = {shown if isinstance(shown, str) else f'<{E.dag_size} shared nodes>'}")
    shown = payload["omega"]
    lines.append(f"G = {shown if isinstance(shown, str) else f'<{G.dag_size} shared nodes>'}")
    emit(args, payload, "\n".join(lines), name="expr")
    return 0


def cmd_parse(args) -> int:
    phi, F, G = expressions_from_json(read_json(args.expr))
    w = word_arg(args)
    check_letters(phi, w)
    names = phi.semigroup.names
    if isinstance(w, UPWord):
        if G is None:
            raise InputError("expression file has no omega expression")
        counts = omega_branch_matches(G, w)
        total = count_omega_parses(G, w)
        payload = {"word": str(w), "parses": total, "branch_parses": counts,
                   "branch": counts.index(1) if total == 1 else None}
        emit(args, payload, f"{w}: {total} parse(s), branch {payload['branch']}", name="parse")
        return 0 if total == 1 else 1
    counts = {s: count_parses(E, w) for s, E in F.items()}
    hits = [s for s, n in counts.items() if n]
    payload = {"word": "".join(w), "parses": {names[s]: n for s, n in counts.items() if n}}
    if len(hits) != 1 or counts[hits[0]] != 1:
        emit(args, payload, f"{''.join(w)}: parses {payload['parses']}", name="parse")
        return 1
    s = hits[0]
    tree = parse_to_fact_tree(parse_unique(F[s], w), phi, w)
    verdict = verify_fact_tree(tree, phi, w)
    payload.update(element=names[s], image=names[eval_morphism(phi, w)], tree=tree.to_json(names),
                   tree_ok=verdict.ok)
    emit(args, payload, f"{''.join(w)} in F_{names[s]}\n{json.dumps(tree.to_json(names), ensure_ascii=False)}",
         tree.to_dot(names), name="parse")
    return 0 if verdict.ok and s == eval_morphism(phi, w) else 1


def cmd_gen(args) -> int:
    seed = args.seed if args.seed is not None else 0
    print(f"seed={seed}", file=sys.stderr)
    phi = random_morphism(args.points, args.gens, seed=seed, cap=args.cap)
    emit(args, morphism_to_json(phi), name="morphism")
    return 0


def cmd_sweep(args) -> int:
    seed = args.seed if args.seed is not None else 0
    print(f"seed={seed}", file=sys.stderr)
    cfg = PipelineConfig(len_bound=args.max_len, up_bound=tuple(args.up_bound),
                         n_words=args.words, seed=seed)
    instances = sweep_instances(args.count, seed, max_size=args.max_size)
    jobs = [(phi, cfg, f"#{i}") for i, phi in enumerate(instances)]
    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(j) for j in jobs]
    failed = [r for r in results if not r.ok]
    lines = [f"{r.name}: {'ok' if r.ok else 'FAIL ' + '; '.join(r.failures[:2])} "
             f"({r.stats.get('case')}, {r.stats.get('states')} states)" for r in results]
    lines.append(f"{len(results) - len(failed)}/{len(results)} instances passed")
    payload = {"seed": seed, "passed": len(results) - len(failed), "total": len(results),
               "instances": [r.to_json() for r in results]}
    emit(args, payload, "\n".join(lines), name="sweep")
    return 1 if failed else 0


def _sweep_one(job):
    phi, cfg, name = job
    return check_instance(phi, cfg, name)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-len", type=int, default=8, help="bound for finite word enumeration")
    common.add_argument("--up-bound", type=int, nargs=2, default=[3, 3], metavar=("U", "V"),
                        help="bounds on |u| and |v| for words u(v)^w")
    common.add_argument("--optimize-heights", action="store_true", help="use the shared-level height assignment")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", metavar="DIR", help="write artifacts into DIR instead of stdout")
    common.add_argument("--format", choices=("json", "dot", "text"), default="json")

    p = argparse.ArgumentParser(prog="uforest", description="Good automata, Ramsey splits and good expressions for semigroup morphisms.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", parents=[common], help="synthesize a good automaton")
    b.add_argument("morphism")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", parents=[common], help="check the goodness axioms")
    v.add_argument("automaton")
    v.add_argument("morphism")
    v.set_defaults(func=cmd_verify)

    for name, func, hlp in (("split", cmd_split, "Ramsey split of a word"),
                            ("tree", cmd_tree, "factorization tree of a finite word")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("morphism")
        s.add_argument("--automaton", help="automaton file (default: synthesize one)")
        s.add_argument("--report", help="report.json from build, needed for --optimize-heights with --automaton")
        s.add_argument("--word")
        s.add_argument("--word-file")
        s.set_defaults(func=func)

    e = sub.add_parser("expr", parents=[common], help="good expressions by state elimination")
    e.add_argument("morphism")
    e.add_argument("--automaton")
    e.add_argument("--text-limit", type=int, default=TEXT_TREE_LIMIT,
                   help="largest tree size written as text; bigger expressions use the node-list form")
    e.set_defaults(func=cmd_expr)

    pa = sub.add_parser("parse", parents=[common], help="parse a word with an expression file")
    pa.add_argument("expr")
    pa.add_argument("--word")
    pa.add_argument("--word-file")
    pa.set_defaults(func=cmd_parse)

    g = sub.add_parser("gen", parents=[common], help="random morphism into a transformation semigroup")
    g.add_argument("--points", type=int, required=True)
    g.add_argument("--gens", type=int, required=True)
    g.add_argument("--cap", type=int, default=DEFAULT_CAP)
    g.set_defaults(func=cmd_gen)

    sw = sub.add_parser("sweep", parents=[common], help="full pipeline over random morphisms")
    sw.add_argument("--count", type=int, default=50)
    sw.add_argument("--max-size", type=int, default=6)
    sw.add_argument("--words", type=int, default=100, help="random words per instance")
    sw.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    sw.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, MissingBuildReport, SizeOverflow) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UForestError as exc:
        # no accepting run, not Ramsey, not good, ambiguous: the input violates a property
        print(f"violation: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

if __name__ == "__main__":
    sys.exit(main())
