"""Inductive synthesis of good automata for a semigroup morphism.

The recursion is on ``(|S|, |phi(Sigma)|)``.  Two base cases (group image,
single letter image) and two inductive cases (a letter image ``c`` with
``Sc`` or ``cS`` a proper subset of ``S``) each produce a weakly-good
automaton, which is then reduced and completed with a fresh final sink.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .algebra import Morphism, PowerProfile, derived_alphabet, split_alphabet
from .automaton import OrderedAutomaton, fresh_name, reduce, weakly_good_to_good
from .errors import MultipleImages, NotAGroup

BOT = None  # the bottom element of Q2, S and Q1 in the right-ideal construction
BOT_NAME = "⊥"

GROUP, SINGLE, LEFT, RIGHT = "Group", "SingleImage", "LeftIdeal", "RightIdeal"


@dataclass(frozen=True)
class CaseDecision:
    tag: str
    c: int | None = None
    sigma1: tuple[str, ...] = ()
    sigma2: tuple[str, ...] = ()

    def label(self, phi: Morphism) -> str:
        return self.tag if self.c is None else f"{self.tag}({phi.name(self.c)})"


@dataclass(eq=False)
class BuildNode:
    """One level of the synthesis: the case taken, children, and resulting automata.

    ``parts`` maps each state of the good automaton to its structural origin:
    ``("iota",)``, ``("f",)``, ``("elem", s)`` for group bases, ``("pos", i)``
    for single-image bases, ``("Q2", q)`` / ``("T", q, s, p)`` for the left
    case and ``("R", q, s, p)`` for the right case (``None`` is bottom).
    """

    phi: Morphism
    decision: CaseDecision
    weak: OrderedAutomaton
    automaton: OrderedAutomaton
    parts: dict[str, tuple]
    children: dict[str, BuildNode] = field(default_factory=dict)
    profile: PowerProfile | None = None
    heights: dict[str, int] = field(default_factory=dict)

    @property
    def H(self) -> int:
        return max(self.heights.values())

    @property
    def label(self) -> str:
        return self.decision.label(self.phi)

    def walk(self):
        yield self
        for child in self.children.values():
            yield from child.walk()

    def to_json(self) -> dict:
        out = {
            "case": self.label,
            "semigroup_size": len(self.phi.semigroup),
            "alphabet": list(self.phi.alphabet),
            "images": sorted({self.phi.name(s) for s in self.phi.letter_images()}),
            "weak_states": len(self.weak),
            "reduced_states": len(self.automaton),
            "height": self.H,
        }
        if self.profile is not None:
            out["profile"] = [self.profile.k, self.profile.ell, self.profile.n]
        if self.children:
            out["children"] = {k: v.to_json() for k, v in self.children.items()}
        return out


def choose_case(phi: Morphism) -> CaseDecision:
    phi = phi.restrict_to_image()
    S = phi.semigroup
    images = sorted(phi.letter_images())
    if len(images) == 1:
        return CaseDecision(SINGLE, images[0])
    for tag, ideal in ((LEFT, S.left_ideal), (RIGHT, S.right_ideal)):
        sizes = [(len(ideal(c)), c) for c in images if len(ideal(c)) < len(S)]
        if sizes:
            c = min(sizes)[1]
            sigma1, sigma2 = split_alphabet(phi, c)
            return CaseDecision(tag, c, sigma1, sigma2)
    return CaseDecision(GROUP)


def _finish(weak: OrderedAutomaton, parts: dict[str, tuple]):
    good = reduce(weakly_good_to_good(reduce(weak)))
    (f,) = good.finals
    parts = {q: parts[q] for q in good.states if q != f}
    parts[f] = ("f",)
    return good, parts


def _bijection(A: OrderedAutomaton) -> dict[str, int]:
    return {q: i + 1 for i, q in enumerate(A.ordered)}


def _ranked(keys: dict[str, tuple]) -> dict[str, int]:
    return {q: i for i, q in enumerate(sorted(keys, key=keys.__getitem__))}


def build_base_group(phi: Morphism) -> OrderedAutomaton:
    return _base_group(phi)[0]


def _base_group(phi: Morphism):
    phi = phi.restrict_to_image()
    S = phi.semigroup
    if not S.is_group():
        raise NotAGroup("the image semigroup is not a group")
    iota = fresh_name("ι", S.names)
    states = (iota,) + S.names
    trans = set()
    for a in phi.alphabet:
        x = phi.image(a)
        trans.add((iota, a, S.names[x]))
        for s in S.elements:
            trans.add((S.names[s], a, S.names[S.mul(s, x)]))
    rank = {S.names[s]: s for s in S.elements}
    rank[iota] = len(S)
    parts = {S.names[s]: ("elem", s) for s in S.elements}
    parts[iota] = ("iota",)
    A = OrderedAutomaton(states, rank, phi.alphabet, frozenset(trans), iota,
                         frozenset(S.names), frozenset(S.names))
    return A, parts


def build_base_single_image(phi: Morphism) -> OrderedAutomaton:
    return _base_single(phi)[0]


def _base_single(phi: Morphism):
    images = phi.letter_images()
    if len(images) != 1:
        raise MultipleImages(f"{len(images)} distinct letter images")
    (s,) = images
    prof = phi.semigroup.power_profile(s)
    size = prof.k + prof.n
    names = tuple(str(i) for i in range(size))
    trans = set()
    for i in range(size):
        j = i + 1 if i + 1 < size else prof.k
        for a in phi.alphabet:
            trans.add((names[i], a, names[j]))
    rank = {names[i]: i for i in range(1, size)}
    rank[names[0]] = size
    parts = {names[i]: ("pos", i) for i in range(size)}
    A = OrderedAutomaton(names, rank, phi.alphabet, frozenset(trans), names[0],
                         frozenset(names), frozenset(names))
    return A, parts, prof


def _derived_morphism(phi: Morphism, c: int, side: str) -> Morphism:
    B = derived_alphabet(phi, c, side)
    letters = sorted(B)
    return Morphism(tuple(phi.name(b) for b in letters), phi.semigroup,
                    {phi.name(b): b for b in letters})


def _measure(phi: Morphism) -> tuple[int, int]:
    phi = phi.restrict_to_image()
    return len(phi.semigroup), len(phi.letter_images())


def _explore(initial, succ: Callable, full: list | None = None):
    """BFS over structured states; returns (states in discovery order, transitions)."""
    seen = {initial}
    order = [initial]
    queue = deque([initial])
    if full is not None:
        for x in full:
            if x not in seen:
                seen.add(x)
                order.append(x)
                queue.append(x)
    trans = []
    while queue:
        x = queue.popleft()
        for a, y in succ(x):
            trans.append((x, a, y))
            if y not in seen:
                seen.add(y)
                order.append(y)
                queue.append(y)
    return order, trans


def _assemble(order, trans, name, initial, finals, buchi, key, alphabet, tag):
    names: dict = {}
    taken: set[str] = set()
    for x in order:
        # child names may already look like triples, so disambiguate with primes
        nm = fresh_name(name(x), taken)
        taken.add(nm)
        names[x] = nm
    keys = {names[x]: key(x) for x in order}
    A = OrderedAutomaton(
        tuple(names[x] for x in order), _ranked(keys), alphabet,
        frozenset((names[x], a, names[y]) for x, a, y in trans), names[initial],
        frozenset(names[x] for x in order if finals(x)),
        frozenset(names[x] for x in order if buchi(x)))
    parts = {names[x]: (tag,) + (x if isinstance(x, tuple) else (x,)) for x in order}
    return A, parts


def _block_succ(A2: OrderedAutomaton, q: str, b: str) -> tuple[str, ...]:
    # values outside B only show up on unreachable grid states
    if b not in A2.letter_index:
        return ()
    return A2.succ(q, b)


def build_inductive_left(phi: Morphism, c: int, full_grid: bool = False) -> OrderedAutomaton:
    return _left(phi, c, full_grid)[0]


def _left(phi: Morphism, c: int, full_grid: bool = False):
    phi = phi.restrict_to_image()
    S = phi.semigroup
    sigma1, sigma2 = split_alphabet(phi, c)
    phi1 = phi.restrict_alphabet(sigma1)
    psi = _derived_morphism(phi, c, "left")
    assert _measure(phi1) < _measure(phi) and _measure(psi) < _measure(phi), "recursion must decrease"
    n1, n2 = build_report(phi1), build_report(psi)
    A1, A2 = n1.automaton, n2.automaton
    i1, i2 = A1.initial, A2.initial
    F1, F2 = A1.finals, A2.finals
    in2 = set(sigma2)

    # Q2 states are plain names, triples are tuples (q, s, p)
    def succ(x):
        out = []
        if isinstance(x, str):
            for a in phi.alphabet:
                out.append((a, (x, phi.image(a), i1)))
            return out
        q, s, p = x
        for a in phi.alphabet:
            if a in in2:
                if p in F1 or p == i1:
                    for q2 in _block_succ(A2, q, S.names[S.mul(s, c)]):
                        out.append((a, q2))
            else:
                s2 = S.mul(s, phi.image(a))
                for p2 in A1.succ(p, a):
                    out.append((a, (q, s2, p2)))
        return out

    full = None
    if full_grid:
        full = list(A2.states) + [(q, s, p) for q in A2.states for s in S.elements for p in A1.states]
    order, trans = _explore(i2, succ, full)

    def name(x):
        if isinstance(x, str):
            return x
        q, s, p = x
        return f"({q},{S.names[s]},{p})"

    def key(x):
        if isinstance(x, str):
            return (1, A2.rank[x])
        q, s, p = x
        return (0, A1.rank[p], A2.rank[q], s)

    def final(x):
        if isinstance(x, str):
            return x in F2
        q, _, p = x
        return (q in F2 or q == i2) and (p in F1 or p == i1)

    def rep(x):
        if isinstance(x, str):
            return x in A2.buchi
        q, _, p = x
        return (q in F2 or q == i2) and p in A1.buchi

    A, parts = _assemble(order, trans, name, i2, final, rep, key, phi.alphabet, "T")
    parts = {k: (("Q2", v[1]) if len(v) == 2 else v) for k, v in parts.items()}
    return A, parts, n1, n2


def build_inductive_right(phi: Morphism, c: int, full_grid: bool = False) -> OrderedAutomaton:
    return _right(phi, c, full_grid)[0]


def _right(phi: Morphism, c: int, full_grid: bool = False):
    phi = phi.restrict_to_image()
    S = phi.semigroup
    sigma1, sigma2 = split_alphabet(phi, c)
    phi1 = phi.restrict_alphabet(sigma1)
    psi = _derived_morphism(phi, c, "right")
    assert _measure(phi1) < _measure(phi) and _measure(psi) < _measure(phi), "recursion must decrease"
    n1, n2 = build_report(phi1), build_report(psi)
    A1, A2 = n1.automaton, n2.automaton
    i1, i2 = A1.initial, A2.initial
    F1, F2 = A1.finals, A2.finals
    in1 = set(sigma1)
    iota = (BOT, BOT, BOT)

    def succ(x):
        q, s, p = x
        out = []
        if x == iota:
            for a in phi.alphabet:
                out.append((a, (BOT, phi.image(a), i1)))   # 1(a)
                out.append((a, (i2, BOT, BOT)))             # 1(b)
        elif s is BOT:
            for a in sigma2:
                out.append((a, (q, c, BOT)))                # 2
        elif p is BOT:
            for a in phi.alphabet:
                cs = S.mul(c, phi.image(a))
                out.append((a, (q, cs, i1)))                # 3(a)
                for q2 in _block_succ(A2, q, S.names[cs]):
                    out.append((a, (q2, BOT, BOT)))         # 3(b)
        else:
            for a in phi.alphabet:
                if a not in in1:
                    continue
                s2 = S.mul(s, phi.image(a))
                for p2 in A1.succ(p, a):
                    if p2 not in F1:
                        out.append((a, (q, s2, p2)))        # 4
                    elif q is BOT:
                        out.append((a, (i2, BOT, BOT)))     # 5, first block
                    else:
                        for q2 in _block_succ(A2, q, S.names[s2]):
                            out.append((a, (q2, BOT, BOT)))  # 5
        return out

    full = None
    if full_grid:
        q2s = [BOT] + list(A2.states)
        full = [(q, BOT, BOT) for q in A2.states] + [(q, c, BOT) for q in A2.states]
        full += [(q, s, p) for q in q2s for s in S.elements for p in A1.states]
    order, trans = _explore(iota, succ, full)

    def name(x):
        q, s, p = x
        return "(" + ",".join([BOT_NAME if q is BOT else q,
                               BOT_NAME if s is BOT else S.names[s],
                               BOT_NAME if p is BOT else p]) + ")"

    def key(x):
        q, s, p = x
        if x == iota:
            return (3,)
        if s is BOT:
            return (2, A2.rank[q])
        if p is BOT:
            return (0, A2.rank[q])
        return (1, A1.rank[p], -1 if q is BOT else A2.rank[q], s)

    def final(x):
        q, s, p = x
        return q is not BOT and (q in F2 or q == i2) and (s is BOT or s == c) and p is BOT and x != iota

    def rep(x):
        q, s, p = x
        if s is BOT and p is BOT:
            return q is not BOT and q in A2.buchi
        if p is BOT:
            return False
        return (q is BOT or q in F2 or q == i2) and p in A1.buchi

    A, parts = _assemble(order, trans, name, iota, final, rep, key, phi.alphabet, "R")
    return A, parts, n1, n2


# ---------------------------------------------------------------- driver

_MEMO: dict = {}


def build_report(phi: Morphism) -> BuildNode:
    """Synthesize a good automaton for ``phi`` together with its case tree."""
    phi = phi.restrict_to_image()
    if phi.key in _MEMO:
        return _MEMO[phi.key]
    decision = choose_case(phi)
    children = {}
    profile = None
    if decision.tag == SINGLE:
        weak, parts, profile = _base_single(phi)
    elif decision.tag == GROUP:
        weak, parts = _base_group(phi)
    elif decision.tag == LEFT:
        weak, parts, n1, n2 = _left(phi, decision.c)
        children = {"A1": n1, "A2": n2}
    else:
        weak, parts, n1, n2 = _right(phi, decision.c)
        children = {"A1": n1, "A2": n2}
    good, parts = _finish(weak, parts)
    node = BuildNode(phi, decision, weak, good, parts, children, profile)
    node.heights = _optimized_levels(node)
    _MEMO[phi.key] = node
    return node


def build_good(phi: Morphism) -> OrderedAutomaton:
    return build_report(phi).automaton


def clear_cache() -> None:
    _MEMO.clear()


def _optimized_levels(node: BuildNode) -> dict[str, int]:
    A = node.automaton
    if node.decision.tag in (GROUP, SINGLE):
        return _bijection(A)
    n1, n2 = node.children["A1"], node.children["A2"]
    h1, h2 = n1.heights, n2.heights
    H1 = n1.H
    f = next(iter(A.finals))
    level: dict[str, int] = {}
    for q, part in node.parts.items():
        if q in (f, A.initial):
            continue
        if part[0] == "Q2":
            level[q] = H1 + h2[part[1]]
        elif part[0] == "T":
            level[q] = h1[part[3]]
        else:
            _, q2, s, p = part
            if s is BOT:
                level[q] = H1 + h2[q2]
            elif p is BOT:
                level[q] = 1
            else:
                # f1 never occurs in a triple, so i1 can take its slot
                level[q] = 1 + (H1 - 1 if p == n1.automaton.initial else h1[p])
    top = max(level.values(), default=0)
    level[f] = top + 1
    level[A.initial] = top + 2
    return level
