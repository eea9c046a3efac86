import random

import pytest
from hypothesis import given, settings, strategies as st

from uforest import fixtures
from uforest.algebra import Morphism, eval_morphism
from uforest.automaton import OrderedAutomaton
from uforest.errors import Ambiguous, InputError, NoParse, NotReduced
from uforest.ramsey import verify_fact_tree
from uforest.rexpr import (EMPTY, check_good_expression, concat, count_omega_parses,
                           count_omega_parses_many, count_parses, count_parses_matrix, eliminate,
                           empty, epsilon, finite_expressions, from_dag_json, from_text, image_sets,
                           letter, omega, omega_branch_matches, omega_branches, omega_expression,
                           parse_to_fact_tree, parse_unique, plus, same_expression, simplify_empty,
                           to_dag_json, to_text, union)
from uforest.words import UPWord, random_words, up_words, words_up_to

import oracles
from conftest import SMALL


# ---------------------------------------------------------------- simplification


def test_simplify_rules():
    a = letter("a")
    assert simplify_empty(union(empty(), a)) is a
    assert simplify_empty(union(a, empty())) is a
    assert simplify_empty(plus(empty())).kind == EMPTY
    assert simplify_empty(concat(a, empty())).kind == EMPTY
    assert simplify_empty(concat(empty(), a)).kind == EMPTY
    E = concat(a, plus(union(a, letter("b"))))
    assert simplify_empty(E) is E


def test_simplify_nested():
    a, b = letter("a"), letter("b")
    E = union(concat(a, plus(concat(empty(), b))), union(empty(), b))
    out = simplify_empty(E)
    assert all(n.kind != EMPTY for n in out.nodes())
    assert to_text(out) == "b"


# ---------------------------------------------------------------- serialization


def test_text_round_trip_fixed():
    S = fixtures.ra2_semigroup()
    text = "((a:{α}.((a|b))+:{α}):{α}|b:{β})"
    E = from_text(text, S.names)
    assert to_text(E, S.names) == text
    assert to_text(from_text("(a)^w")) == "(a)^w"


def test_text_errors():
    with pytest.raises(InputError):
        from_text("(a.b")
    with pytest.raises(InputError):
        from_text("a:{γ}", ["α"])
    with pytest.raises(InputError):
        from_text("a b")


def test_quoted_letters():
    E = concat(letter("s2"), letter("("))
    assert same_expression(from_text(to_text(E)), E)


@pytest.mark.parametrize("name", SMALL)
def test_generated_expressions_round_trip(phis, finite_exprs, omega_exprs, name):
    names = phis[name].semigroup.names
    for E in list(finite_exprs[name].values()) + [omega_exprs[name]]:
        assert same_expression(from_text(to_text(E, names), names), E)
        assert same_expression(from_dag_json(to_dag_json(E, names), names), E)


def test_dag_json_validation():
    with pytest.raises(InputError):
        from_dag_json({"nodes": [{"kind": "concat", "children": [0, 0]}]})
    with pytest.raises(InputError):
        from_dag_json({"nodes": [{"kind": "star"}]})
    with pytest.raises(InputError):
        from_dag_json({"nodes": []})
    a = letter("a")
    shared = concat(a, a)
    data = to_dag_json(shared)
    assert len(data["nodes"]) == 2


# ---------------------------------------------------------------- elimination


def test_single_transition_automaton():
    S = fixtures.cyclic_group(1)
    phi = Morphism(("a",), S, {"a": 0})
    A = OrderedAutomaton(("f", "ι"), {"f": 0, "ι": 1}, ("a",), frozenset({("ι", "a", "f")}), "ι",
                         frozenset({"f"}), frozenset())
    F = finite_expressions(A, phi)
    assert list(F) == [0] and F[0].kind == "letter" and F[0].letter == "a"


def test_elimination_needs_reduced():
    A = fixtures.ra2_good_automaton()
    A = A.replace(states=A.states + ("dead",), rank={**A.rank, "dead": -1})
    with pytest.raises(NotReduced):
        eliminate(A, fixtures.ra2())


def test_ra2_hand_expressions():
    phi = fixtures.ra2()
    A = fixtures.ra2_good_automaton()
    T = eliminate(A, phi)
    F = finite_expressions(A, phi, T)
    alpha, beta = phi.image("a"), phi.image("b")
    for w in words_up_to("ab", 3):
        assert (count_parses(F[alpha], w) == 1) == (w[0] == "a")
        assert (count_parses(F[beta], w) == 1) == (w[0] == "b")
    e, body = T.loop["n_b"]
    assert e == beta
    for w in words_up_to("ab", 4):
        assert count_parses(plus(body), w) == (1 if set(w) == {"b"} else 0)


def _elimination_entries(T):
    A = T.automaton
    for r, preds in T.into.items():
        X = A.below(r)
        for p, entry in preds.items():
            yield p, X, r, entry
        if r in T.loop:
            e, body = T.loop[r]
            yield r, X, r, {e: body}
    (f,) = A.finals
    X = set(A.states) - {A.initial, f}
    yield A.initial, X, f, T.final[A.initial][f]


@pytest.mark.parametrize("name", SMALL)
def test_elimination_soundness(phis, reports, tables, name):
    phi, A, T = phis[name], reports[name].automaton, tables[name]
    words = list(words_up_to(phi.alphabet, 6))
    for p, X, q, entry in _elimination_entries(T):
        for w in words:
            s = eval_morphism(phi, w)
            path = oracles.path_through(A, p, X, q, w)
            for t, E in entry.items():
                assert (count_parses(E, w) == 1) == (path and s == t), (p, q, w)


@pytest.mark.parametrize("name", SMALL)
def test_partition_and_unique_parses(phis, finite_exprs, name):
    phi, F = phis[name], finite_exprs[name]
    for w in words_up_to(phi.alphabet, 7):
        owners = [s for s, E in F.items() if count_parses(E, w)]
        assert owners == [eval_morphism(phi, w)]
        assert count_parses(F[owners[0]], w) == 1


def test_ra2_partition(phis, finite_exprs):
    phi, F = phis["ra2"], finite_exprs["ra2"]
    for w in words_up_to("ab", 8):
        s = phi.image("a") if w[0] == "a" else phi.image("b")
        assert count_parses(F[s], w) == 1


def test_single_element_semigroup():
    from uforest.synthesis import build_good
    phi = Morphism(("a",), fixtures.cyclic_group(1), {"a": 0})
    F = finite_expressions(build_good(phi), phi)
    assert list(F) == [0]
    assert all(count_parses(F[0], w) == 1 for w in words_up_to("a", 6))


@pytest.mark.parametrize("name", ["ra2", "pow4", "klein", "psi6"])
def test_images_are_exact(phis, finite_exprs, omega_exprs, name):
    phi = phis[name]
    S = phi.semigroup
    for s, E in finite_exprs[name].items():
        images = image_sets(E, phi)
        assert images[id(E)] == {s}
        for n, _ in E.plan:
            if n.elem is not None and images[id(n)]:
                assert images[id(n)] == {n.elem}
            if n.kind == "plus":
                (e,) = images[id(n.children[0])]
                assert S.is_idempotent(e)
    G = omega_exprs[name]
    for b in omega_branches(G):
        omega_node = b.children[1]
        assert omega_node.kind == "omega" and S.is_idempotent(omega_node.elem)


# ---------------------------------------------------------------- goodness checks


@pytest.mark.parametrize("name", SMALL)
def test_generated_expressions_are_good(phis, finite_exprs, name):
    for E in finite_exprs[name].values():
        rep = check_good_expression(E, phis[name], len_bound=7)
        assert rep.ok, rep.problems


def test_duplicate_union_is_ambiguous():
    phi = fixtures.ra2()
    a = phi.image("a")
    rep = check_good_expression(union(letter("a", a), letter("a", a), a), phi)
    assert not rep.ok and rep.images_ok and rep.ambiguity_witness == ("a",)


def test_plus_of_non_idempotent_fails():
    phi = fixtures.pow4()
    S = phi.semigroup
    E = plus(letter("a", S.index["s"]), S.index["s"])
    rep = check_good_expression(E, phi, len_bound=4)
    assert not rep.images_ok
    assert image_sets(E, phi)[id(E)] == {S.index[x] for x in ("s", "s2", "s3", "s4")}
    assert any("idempotent" in p for p in rep.problems)


def test_epsilon_is_rejected():
    phi = fixtures.ra2()
    rep = check_good_expression(union(epsilon(), letter("a")), phi, len_bound=2)
    assert not rep.images_ok


# ---------------------------------------------------------------- parsing


def test_parse_counts():
    a = letter("a")
    assert count_parses(a, "a") == 1 and count_parses(a, "b") == 0
    amb = union(concat(a, plus(a)), concat(plus(a), a))
    assert count_parses(amb, "aaa") == 2
    assert count_parses_matrix(amb, "aaa") == 2
    with pytest.raises(Ambiguous):
        parse_unique(amb, "aaa")
    with pytest.raises(NoParse):
        parse_unique(a, "b")
    with pytest.raises(InputError):
        count_parses(a, "")


def test_ra2_parse_ab(phis, finite_exprs):
    F = finite_exprs["ra2"][phis["ra2"].image("a")]
    assert count_parses(F, "ab") == 1


exprs = st.deferred(lambda: st.one_of(
    st.sampled_from("ab").map(letter),
    st.tuples(exprs, exprs).map(lambda t: union(*t)),
    st.tuples(exprs, exprs).map(lambda t: concat(*t)),
    exprs.map(plus),
))


@settings(max_examples=80, deadline=None)
@given(exprs)
def test_parse_counting_agrees_with_oracles(E):
    counts = oracles.language_counts(E, "ab", 5)
    for w in words_up_to("ab", 5):
        n = counts.get(w, 0)
        assert count_parses(E, w) == n
        assert count_parses_matrix(E, w) == min(n, 2)


def test_abbb_parse_tree():
    phi = fixtures.ra2()
    F = finite_expressions(fixtures.ra2_good_automaton(), phi)[phi.image("a")]
    beta = phi.image("b")
    tree = parse_to_fact_tree(parse_unique(F, "abbb"), phi)
    assert verify_fact_tree(tree, phi, "abbb").ok
    # n_b returns to itself twice on abbb: the plus node has two iterations
    loops = [n for n in _tree_nodes(tree) if n.leaves() == ("b", "b") and n.label == beta]
    assert len(loops) == 1
    tree = parse_to_fact_tree(parse_unique(F, "abbbb"), phi)
    wide = [n for n in _tree_nodes(tree) if len(n.children) == 3]
    assert len(wide) == 1 and wide[0].label == beta and wide[0].leaves() == ("b",) * 3


def _tree_nodes(t):
    yield t
    for c in t.children:
        yield from _tree_nodes(c)


def test_single_letter_parse_tree(phis, finite_exprs):
    phi = phis["ra2"]
    tree = parse_to_fact_tree(parse_unique(finite_exprs["ra2"][phi.image("b")], "b"), phi)
    assert tree.is_leaf and tree.letter == "b"


@pytest.mark.parametrize("name", ["ra2", "pow4", "klein", "psi6"])
def test_parse_trees_on_random_words(phis, finite_exprs, name):
    phi = phis[name]
    rng = random.Random(11)
    for w in random_words(phi.alphabet, 100, 40, rng):
        tree = parse_to_fact_tree(parse_unique(finite_exprs[name][eval_morphism(phi, w)], w), phi)
        assert verify_fact_tree(tree, phi, w).ok


# ---------------------------------------------------------------- omega expressions


def test_ra2_hand_omega_branches():
    phi = fixtures.ra2()
    A = fixtures.ra2_good_automaton()
    G = omega_expression(A, phi)
    branches = omega_branches(G)
    assert len(branches) == 2
    assert sorted(count_omega_parses(b, UPWord((), ("b",))) for b in branches) == [0, 1]
    assert sum(omega_branch_matches(G, UPWord(("b",), ("a",)))) == 1


def test_single_repeated_state():
    phi = fixtures.pow4_single()
    from uforest.synthesis import build_good
    A = build_good(phi.restrict_alphabet(["a"]))
    G = omega_expression(A, phi.restrict_alphabet(["a"]))
    # only the top of the cycle sees every other cycle state below it
    assert len(omega_branches(G)) == 1


@pytest.mark.parametrize("name", SMALL)
def test_every_up_word_has_one_parse(phis, omega_exprs, name):
    G = omega_exprs[name]
    ups = list(up_words(phis[name].alphabet, 3, 3))
    assert count_omega_parses_many(G, ups) == [1] * len(ups)
    for w in ups[:: max(1, len(ups) // 40)]:
        assert sum(omega_branch_matches(G, w)) == 1


def test_ba_b_omega_is_covered():
    phi = fixtures.ra2()
    G = omega_expression(fixtures.ra2_good_automaton(), phi)
    assert count_omega_parses(G, UPWord(("b", "a"), ("b",))) == 1


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.text("ab", max_size=3), st.text("ab", min_size=1, max_size=3)),
                min_size=1, max_size=6))
def test_batched_omega_counting_matches_single(pairs):
    G = omega_expression(fixtures.ra2_good_automaton(), fixtures.ra2())
    words = [UPWord(tuple(u), tuple(v)) for u, v in pairs]
    assert count_omega_parses_many(G, words) == [count_omega_parses(G, w) for w in words]


def test_ambiguous_omega_expression_is_detected():
    a, b = letter("a"), letter("b")
    body = union(a, b)
    G = union(concat(a, omega(plus(body))), concat(plus(a), omega(plus(body))))
    assert count_omega_parses(G, UPWord(("a",), ("b",))) == 2
    assert count_omega_parses_many(G, [UPWord(("a",), ("b",))]) == [2]
