import random

import pytest
from hypothesis import given, settings, strategies as st

from uforest import fixtures
from uforest.algebra import eval_morphism
from uforest.automaton import (OrderedAutomaton, accepting_runs_finite, accepting_runs_up,
                               automaton_from_json, check_g2, check_unambiguous_finite,
                               check_unambiguous_omega, check_universal_finite,
                               check_universal_up_bounded, image_of_restricted_language,
                               is_reduced, reduce, verify_goodness, weakly_good_to_good)
from uforest.errors import InputError, UnknownLetter
from uforest.synthesis import build_base_group, build_base_single_image, build_inductive_right
from uforest.words import UPWord, random_words, up_words, words_up_to

import oracles


def make(order, trans, finals, buchi=(), initial=None, alphabet=("a", "b")):
    return OrderedAutomaton(tuple(order), {q: i for i, q in enumerate(order)}, alphabet,
                            frozenset(trans), initial or order[-1], frozenset(finals), frozenset(buchi))


@st.composite
def automata(draw, max_states=6, alphabet=("a", "b")):
    n = draw(st.integers(1, max_states))
    states = [f"q{i}" for i in range(n)]
    trans = draw(st.sets(st.tuples(st.sampled_from(states), st.sampled_from(alphabet), st.sampled_from(states)),
                         max_size=3 * n))
    finals = draw(st.sets(st.sampled_from(states)))
    buchi = draw(st.sets(st.sampled_from(states)))
    return make(states, trans, finals, buchi, initial=states[0], alphabet=alphabet)


FIG1 = fixtures.ra2_good_automaton


# ---------------------------------------------------------------- construction


def test_validation():
    with pytest.raises(InputError):
        make(["p", "p"], [], [])
    with pytest.raises(InputError):
        OrderedAutomaton(("p", "q"), {"p": 0, "q": 0}, ("a",), frozenset(), "p", frozenset())
    with pytest.raises(InputError):
        make(["p"], [("p", "a", "z")], [])
    with pytest.raises(UnknownLetter):
        make(["p"], [("p", "c", "p")], [])


def test_json_round_trip_and_dot():
    for A in (FIG1(), fixtures.psi6_good_automaton(), fixtures.psi6_merged_automaton()):
        assert automaton_from_json(A.to_json()) == A
    dot = FIG1().to_dot()
    assert '"n_b:0"' in dot and "doublecircle" in dot and "lightgrey" in dot


# ---------------------------------------------------------------- finite runs


def test_fig1_run_on_abbb():
    runs = accepting_runs_finite(FIG1(), "abbb")
    assert [r.stem for r in runs] == [("ι", "n_b", "n_b", "n_b", "f")]


def test_no_transitions_no_runs():
    A = make(["f", "i"], [], ["f"])
    assert accepting_runs_finite(A, "ab") == []


def test_pow4_run_is_unique(reports):
    A = reports["pow4"].automaton
    runs = accepting_runs_finite(A, "aabbaaabab")
    assert len(runs) == 1 and runs[0].stem[-1] in A.finals


def test_unknown_letter_in_run():
    with pytest.raises(UnknownLetter):
        accepting_runs_finite(FIG1(), "abc")


@settings(max_examples=80, deadline=None)
@given(automata(4), st.text("ab", min_size=1, max_size=6))
def test_runs_match_path_enumeration(A, w):
    runs = accepting_runs_finite(A, w)
    assert len(runs) == oracles.count_runs(A, w)
    keys = [[A.index[q] for q in r.stem] for r in runs]
    assert keys == sorted(keys)
    for r in runs:
        assert r.stem[0] == A.initial and r.stem[-1] in A.finals
        assert all((r.stem[i], w[i], r.stem[i + 1]) in A.transitions for i in range(len(w)))


# ---------------------------------------------------------------- ultimately periodic runs


def test_fig1_alternating_word():
    count, run = accepting_runs_up(FIG1(), UPWord((), ("a", "b")), "unique")
    assert count == 1
    assert set(run.cycle) == {"n_a", "n_b"}


def test_no_buchi_states_rejects_everything():
    A = FIG1().replace(buchi=frozenset())
    assert all(accepting_runs_up(A, w)[0] == 0 for w in up_words("ab", 2, 2))
    ok, w, _ = check_universal_up_bounded(A, 2, 2)
    assert not ok and w == UPWord((), ("a",))


def duplicated():
    # two disjoint a-loops reachable from the initial state
    return make(["x", "y", "i"], [("i", "a", "x"), ("i", "a", "y"), ("x", "a", "x"), ("y", "a", "y")],
                [], ["x", "y"], alphabet=("a",))


def test_duplicated_paths_are_ambiguous():
    assert accepting_runs_up(duplicated(), UPWord((), ("a",)), "unique")[0] == 2
    ok, w = check_unambiguous_omega(duplicated())
    assert not ok and accepting_runs_up(duplicated(), w, "unique")[0] == 2


@settings(max_examples=60, deadline=None)
@given(automata(4))
def test_up_acceptance_matches_naive_search(A):
    for w in up_words("ab", 1, 2):
        count, run = accepting_runs_up(A, w, "exists")
        assert bool(count) == oracles.accepts_up(A, w.prefix, w.period)
        if count:
            assert run.state_at(0) == A.initial and any(q in A.buchi for q in run.cycle)


def test_bounded_universality_examples(reports):
    assert check_universal_up_bounded(FIG1(), 2, 2, unique=True)[0]
    weak = reports["ra2"].weak
    assert check_universal_up_bounded(weak, 2, 2, unique=True)[0]


# ---------------------------------------------------------------- restricted languages


def test_return_language_images():
    A, phi = FIG1(), fixtures.ra2()
    S = phi.semigroup
    assert image_of_restricted_language(A, phi, "n_a", A.below("n_a"), "n_a") == {S.index["α"]}
    assert image_of_restricted_language(A, phi, "ι", A.below("ι"), "ι") == frozenset()
    direct = image_of_restricted_language(A, phi, "ι", set(), "f")
    assert direct == {phi.image("a"), phi.image("b")}


@pytest.mark.parametrize("name", ["ra2", "pow4", "klein"])
def test_return_images_against_enumeration(name, reports, phis):
    A, phi = reports[name].automaton, phis[name]
    S = phi.semigroup
    images = {a: phi.image(a) for a in phi.alphabet}
    bound = len(A) * len(S) + 1
    for q in A.ordered[:: max(1, len(A) // 12)]:
        below = A.below(q)
        exact = image_of_restricted_language(A, phi, q, below, q)
        assert exact == oracles.restricted_images(A, S.table, images, q, below, q, bound)
        assert len(exact) <= 1 and all(S.is_idempotent(e) for e in exact)


# ---------------------------------------------------------------- ambiguity and universality


def test_unambiguity_examples():
    assert check_unambiguous_finite(FIG1())[0]
    loop = make(["p"], [("p", "a", "p")], ["p"], alphabet=("a",))
    assert check_unambiguous_finite(loop)[0]
    par = make(["f", "g", "i"], [("i", "a", "f"), ("i", "a", "g")], ["f", "g"], alphabet=("a",))
    ok, w = check_unambiguous_finite(par)
    assert not ok and w == ("a",)


def test_universality_examples():
    assert check_universal_finite(FIG1())[0]
    assert check_universal_finite(fixtures.psi6_good_automaton())[0]
    A = FIG1()
    no_b = A.replace(transitions=frozenset(t for t in A.transitions if not (t[0] == "ι" and t[1] == "b")))
    ok, w = check_universal_finite(no_b)
    assert not ok and w == ("b",)


@settings(max_examples=100, deadline=None)
@given(automata(6))
def test_unambiguity_matches_brute_force(A):
    ok, w = check_unambiguous_finite(A)
    brute = all(oracles.count_runs(A, u) <= 1 for u in words_up_to("ab", 6))
    if ok:
        assert brute
    else:
        assert oracles.count_runs(A, w) >= 2
        assert all(oracles.count_runs(A, u) <= 1 for u in words_up_to("ab", len(w) - 1))


@settings(max_examples=100, deadline=None)
@given(automata(5))
def test_universality_witness_is_shortest(A):
    ok, w = check_universal_finite(A)
    if ok:
        assert all(oracles.count_runs(A, u) >= 1 for u in words_up_to("ab", 6))
    else:
        assert oracles.count_runs(A, w) == 0
        assert all(oracles.count_runs(A, u) >= 1 for u in words_up_to("ab", len(w) - 1))


# ---------------------------------------------------------------- goodness


def test_fig1_is_good():
    rep = verify_goodness(FIG1(), fixtures.ra2())
    assert rep.good and rep.verdict == "good"
    assert rep.idempotents["n_a"] == "α" and rep.idempotents["n_b"] == "β"


def test_psi6_hand_automaton_is_good():
    assert verify_goodness(fixtures.psi6_good_automaton(), fixtures.psi6()).good


def test_merged_state_breaks_g2():
    rep = verify_goodness(fixtures.psi6_merged_automaton(), fixtures.psi6())
    assert rep.g1 and rep.g3 and rep.g4 and not rep.g2
    v = rep.g2_violations["n_aa"]
    assert v["word"] == ("a",) and v["image"] == "α"
    assert rep.first_witness[0] == "g2"


def test_initial_incoming_edge_breaks_g3():
    A = FIG1()
    bad = A.replace(transitions=A.transitions | {("n_a", "a", "ι")})
    rep = verify_goodness(bad, fixtures.ra2())
    assert not rep.g3 and rep.details["g3_problem"]


def test_base_group_is_only_weakly_good():
    phi = fixtures.klein()
    rep = verify_goodness(build_base_group(phi), phi)
    assert rep.verdict == "weakly-good" and not rep.g4


def test_alphabet_mismatch():
    with pytest.raises(InputError):
        verify_goodness(FIG1(), fixtures.pow4().restrict_alphabet(["a"]))


def test_g2_exact_on_builds(reports, phis):
    for name, node in reports.items():
        S = phis[name].semigroup
        es, violations = check_g2(node.automaton, phis[name])
        assert not violations
        assert all(e is None or S.is_idempotent(S.index[e]) for e in es.values())


# ---------------------------------------------------------------- transformations


def test_weakly_good_to_good_sizes():
    phi = fixtures.klein()
    G = weakly_good_to_good(build_base_group(phi))
    assert len(G) == 6
    (f,) = G.finals
    assert not any(p == f for p, _, _ in G.transitions)
    assert verify_goodness(G, phi).good
    single = weakly_good_to_good(build_base_single_image(fixtures.pow4_single()))
    assert len(single) == 8


def test_fresh_final_even_with_existing_sink():
    A = FIG1()
    G = weakly_good_to_good(A)
    assert len(G) == len(A) + 1 and G.finals == {"f'"}


def _accepts(A, w):
    return bool(accepting_runs_finite(A, w))


@pytest.mark.parametrize("make_weak", [lambda: build_base_group(fixtures.klein()),
                                       lambda: build_base_single_image(fixtures.pow4_single())])
def test_weakly_good_to_good_preserves_languages(make_weak):
    A = make_weak()
    G = weakly_good_to_good(A)
    for w in random_words(A.alphabet, 500, 12, random.Random(5)):
        assert _accepts(A, w) == _accepts(G, w)
    for w in up_words(A.alphabet, 2, 2):
        assert bool(accepting_runs_up(A, w)[0]) == bool(accepting_runs_up(G, w)[0])


def test_reduce_full_grid_matches_reachable_build():
    phi = fixtures.ra2()
    c = phi.semigroup.index["α"]
    grid = build_inductive_right(phi, c, full_grid=True)
    core = build_inductive_right(phi, c)
    reduced = reduce(grid)
    assert len(grid) > len(reduced)
    assert set(reduced.states) == set(reduce(core).states)
    assert is_reduced(reduced)


def test_reduce_keeps_reduced_and_drops_unreachable():
    A = FIG1()
    assert reduce(A) is A
    clique = {("c1", "a", "c2"), ("c2", "b", "c1"), ("c1", "b", "f")}
    B = make(["c1", "c2"] + list(A.ordered), A.transitions | clique, A.finals, A.buchi | {"c1"})
    R = reduce(B)
    assert set(R.states) == set(A.states)
    for w in random_words("ab", 100, 10, random.Random(9)):
        assert _accepts(B, w) == _accepts(R, w)


def test_reduced_states_lie_on_accepting_runs(reports):
    A = reports["ra2"].automaton
    seen = set()
    for w in words_up_to(A.alphabet, 8):
        for r in accepting_runs_finite(A, w):
            seen.update(r.stem)
    # the states behind the child's final sink need a prefix of length 4, e.g. aaba(b)^w
    for w in up_words(A.alphabet, 4, 2):
        _, run = accepting_runs_up(A, w)
        seen.update(run.stem + run.cycle)
    assert seen == set(A.states)


@pytest.mark.parametrize("name", ["ra2", "pow4", "klein"])
def test_good_builds_have_unique_runs(name, reports, phis):
    A, phi = reports[name].automaton, phis[name]
    for w in words_up_to(A.alphabet, 7):
        runs = accepting_runs_finite(A, w)
        assert len(runs) == 1
    for w in up_words(A.alphabet, 2, 2):
        assert accepting_runs_up(A, w, "unique")[0] == 1
    assert eval_morphism(phi, "ab") is not None
