"""Named morphisms and hand-drawn automata used in tests, docs and the CLI."""
from __future__ import annotations

from .algebra import FiniteSemigroup, Morphism, validate_semigroup
from .automaton import OrderedAutomaton


def ra2_semigroup() -> FiniteSemigroup:
    """Two-element left-zero semigroup: xy = x."""
    return validate_semigroup([[0, 0], [1, 1]], ["α", "β"])


def psi6_semigroup() -> FiniteSemigroup:
    """Words over {α, β} of length 1 or 2; product concatenates and keeps the first two letters."""
    words = ["α", "β", "αα", "αβ", "βα", "ββ"]
    idx = {w: i for i, w in enumerate(words)}
    table = [[idx[(x + y)[:2]] for y in words] for x in words]
    return validate_semigroup(table, words)


def pow4_semigroup() -> FiniteSemigroup:
    """Cyclic semigroup {s, s2, s3, s4} with s^5 = s^3."""
    def reduce_exp(m):
        return m if m <= 4 else 3 + (m - 3) % 2

    names = ["s", "s2", "s3", "s4"]
    table = [[reduce_exp(i + j) - 1 for j in range(1, 5)] for i in range(1, 5)]
    return validate_semigroup(table, names)


def klein_semigroup() -> FiniteSemigroup:
    """The Klein four-group (Z/2Z)^2 under addition."""
    elems = [(0, 0), (1, 0), (0, 1), (1, 1)]
    idx = {e: i for i, e in enumerate(elems)}
    table = [[idx[((x[0] + y[0]) % 2, (x[1] + y[1]) % 2)] for y in elems] for x in elems]
    return validate_semigroup(table, [f"({x},{y})" for x, y in elems])


def cyclic_group(n: int) -> FiniteSemigroup:
    return validate_semigroup([[(i + j) % n for j in range(n)] for i in range(n)],
                              [f"g{i}" for i in range(n)])


def _morphism(S: FiniteSemigroup, mapping: dict[str, str]) -> Morphism:
    return Morphism(tuple(mapping), S, {a: S.index[x] for a, x in mapping.items()})


def ra2() -> Morphism:
    return _morphism(ra2_semigroup(), {"a": "α", "b": "β"})


def psi6() -> Morphism:
    return _morphism(psi6_semigroup(), {"a": "α", "b": "β"})


def pow4() -> Morphism:
    return _morphism(pow4_semigroup(), {"a": "s", "b": "s2"})


def pow4_single() -> Morphism:
    return _morphism(pow4_semigroup(), {"a": "s", "b": "s"})


def klein() -> Morphism:
    return _morphism(klein_semigroup(), {"a": "(1,0)", "b": "(0,1)"})


FIXTURES = {"ra2": ra2, "psi6": psi6, "pow4": pow4, "klein": klein}


def _automaton(order, trans, finals, buchi, alphabet=("a", "b")) -> OrderedAutomaton:
    rank = {q: i for i, q in enumerate(order)}
    return OrderedAutomaton(tuple(order), rank, alphabet, frozenset(trans),
                            order[-1], frozenset(finals), frozenset(buchi))


def ra2_good_automaton() -> OrderedAutomaton:
    """Hand-drawn good automaton for ra2: state n_x is left only by reading x."""
    targets = ("n_a", "n_b", "f")
    trans = {("ι", x, t) for x in "ab" for t in targets}
    trans |= {("n_a", "a", t) for t in targets} | {("n_b", "b", t) for t in targets}
    return _automaton(["n_b", "n_a", "f", "ι"], trans, {"f"}, {"n_a", "n_b"})


PSI6_REPEATED = {"n_aa", "n_ab", "n_bb", "n_ba"}


def psi6_good_automaton() -> OrderedAutomaton:
    """Hand-drawn good automaton for psi6: n_xy remembers the first two letters."""
    order = ["n'_bb", "n_bb", "n_ab", "n_ba", "n'_aa", "n_aa", "f", "ι"]
    return _automaton(order, _psi6_edges(merge=False), {"f"}, PSI6_REPEATED)


def psi6_merged_automaton() -> OrderedAutomaton:
    """psi6 automaton with n_aa and n'_aa merged; violates the idempotent-loop axiom."""
    order = ["n'_bb", "n_bb", "n_ab", "n_ba", "n_aa", "f", "ι"]
    return _automaton(order, _psi6_edges(merge=True), {"f"}, PSI6_REPEATED)


def _psi6_edges(merge: bool):
    aa2 = "n_aa" if merge else "n'_aa"
    trans = set()
    for x in "ab":
        for tgt in ("n_aa", "n_ba", "n_ab", "n_bb", "f"):
            trans.add(("ι", x, tgt))
    trans |= {("n_aa", "a", "n_ab"), ("n_aa", "a", aa2), (aa2, "a", "n_aa"), (aa2, "a", "n_ab"),
              ("n_ab", "a", "n_bb"), ("n_ab", "a", "n_ba"), ("n_ab", "a", "f"),
              ("n_bb", "b", "n'_bb"), ("n_bb", "b", "n_ba"), ("n_bb", "b", "f"),
              ("n'_bb", "b", "n_bb"), ("n'_bb", "b", "n_ba"), ("n'_bb", "b", "f"),
              ("n_ba", "b", "n_ab"), ("n_ba", "b", "n_aa")}
    return trans
