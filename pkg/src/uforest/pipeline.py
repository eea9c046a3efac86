"""End-to-end check of one morphism: synthesis, goodness, splits, trees, expressions."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .algebra import Morphism, eval_morphism
from .automaton import verify_goodness
from .ramsey import (default_heights, optimized_heights, split_word, tree_from_split,
                     tree_height_bound, verify_fact_tree, verify_ramsey)
from .rexpr import (check_good_expression, count_omega_parses_many, count_parses, eliminate,
                    finite_expressions, omega_branches, omega_expression, parse_to_fact_tree,
                    parse_unique)
from .synthesis import build_report
from .words import random_words, up_words, words_up_to


@dataclass
class PipelineConfig:
    len_bound: int = 6
    up_bound: tuple[int, int] = (2, 2)
    n_words: int = 100
    max_word_len: int = 60
    seed: int = 0


@dataclass
class InstanceResult:
    name: str
    ok: bool = True
    failures: list[str] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def fail(self, msg: str) -> None:
        self.ok = False
        self.failures.append(msg)

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "failures": self.failures, "stats": self.stats}


def check_instance(phi: Morphism, cfg: PipelineConfig | None = None, name: str = "phi") -> InstanceResult:
    """Run every stage and collect failures instead of stopping at the first one."""
    cfg = cfg or PipelineConfig()
    res = InstanceResult(name)
    t0 = time.perf_counter()
    node = build_report(phi)
    A = node.automaton
    S = phi.semigroup
    res.stats.update(states=len(A), case=node.label, semigroup_size=len(S))

    rep = verify_goodness(A, phi, up_bound=cfg.up_bound)
    if not rep.good:
        res.fail(f"automaton not good: {rep.first_witness}")
        return res

    # splits and trees
    rng = random.Random(cfg.seed)
    hd = default_heights(A)
    ho = optimized_heights(node, A)
    if not ho.is_monotone(A):
        res.fail("optimized heights are not monotone")
    if node.children:
        bound = node.children["A1"].H + node.children["A2"].H + 2
        if ho.height > bound:
            res.fail(f"optimized height {ho.height} exceeds {bound}")
    res.stats["height_default"] = hd.height
    res.stats["height_optimized"] = ho.height
    corpus = random_words(phi.alphabet, cfg.n_words, cfg.max_word_len, rng)
    for w in corpus:
        for h in (hd, ho):
            sp = split_word(A, h, w)
            if sp.height > len(A):
                res.fail(f"split of {''.join(w)} exceeds |Q|")
            if not verify_ramsey(sp, phi, w).ok:
                res.fail(f"split of {''.join(w)} not Ramsey")
                continue
            t = tree_from_split(w, sp, phi)
            if not verify_fact_tree(t, phi, w).ok or t.height > tree_height_bound(sp):
                res.fail(f"tree of {''.join(w)} invalid")
    for w in up_words(phi.alphabet, *cfg.up_bound):
        for h in (hd, ho):
            if not verify_ramsey(split_word(A, h, w), phi, w).ok:
                res.fail(f"split of {w} not Ramsey")

    # expressions
    T = eliminate(A, phi)
    F = finite_expressions(A, phi, T)
    for w in words_up_to(phi.alphabet, cfg.len_bound):
        s = eval_morphism(phi, w)
        counts = {x: count_parses(E, w) for x, E in F.items()}
        if counts.get(s) != 1 or sum(counts.values()) != 1:
            res.fail(f"{''.join(w)} not parsed exactly once by F_{S.names[s]}: {counts}")
            break
    for s, E in F.items():
        r = check_good_expression(E, phi, cfg.len_bound)
        if not r.ok:
            res.fail(f"F_{S.names[s]} not good: {r.problems or r.ambiguity_witness}")
    for w in corpus[: max(1, len(corpus) // 10)]:
        s = eval_morphism(phi, w)
        tree = parse_to_fact_tree(parse_unique(F[s], w), phi, w)
        if not verify_fact_tree(tree, phi, w).ok:
            res.fail(f"parse tree of {''.join(w)} invalid")
    G = omega_expression(A, phi, T)
    good_g = check_good_expression(G, phi, up_bound=None)
    if not good_g.images_ok:
        res.fail(f"omega expression not good: {good_g.problems}")
    res.stats["omega_branches"] = len(omega_branches(G))
    ups = list(up_words(phi.alphabet, *cfg.up_bound))
    for w, n in zip(ups, count_omega_parses_many(G, ups)):
        if n != 1:
            res.fail(f"{w} has {n} omega parses")
            break
    res.stats["seconds"] = round(time.perf_counter() - t0, 3)
    return res
