"""Ordered Büchi/finite automata and exact checks of the goodness axioms.

An :class:`OrderedAutomaton` accepts a finite word when some run ends in a
final state, and an infinite word when some run visits a Büchi ("repeated")
state infinitely often.  Infinite inputs are always ultimately periodic
(:class:`~uforest.words.UPWord`).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .algebra import Morphism
from .errors import InputError, UnknownLetter
from .graphs import reachable, sccs
from .words import UPWord, Word, up_words


@dataclass(frozen=True, eq=False)
class OrderedAutomaton:
    states: tuple[str, ...]
    rank: Mapping[str, int]
    alphabet: tuple[str, ...]
    transitions: frozenset[tuple[str, str, str]]
    initial: str
    finals: frozenset[str]
    buchi: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "transitions", frozenset(map(tuple, self.transitions)))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "buchi", frozenset(self.buchi))
        object.__setattr__(self, "rank", dict(self.rank))
        names = set(self.states)
        if len(names) != len(self.states):
            raise InputError("state names must be distinct")
        if set(self.rank) != names:
            raise InputError("every state needs exactly one rank")
        if len(set(self.rank.values())) != len(self.states):
            raise InputError("ranks must be pairwise distinct (total order)")
        if self.initial not in names:
            raise InputError(f"initial state {self.initial!r} is not a state")
        if not (self.finals | self.buchi) <= names:
            raise InputError("final and Büchi states must be states")
        letters = set(self.alphabet)
        for p, a, q in self.transitions:
            if p not in names or q not in names:
                raise InputError(f"transition ({p}, {a}, {q}) uses an unknown state")
            if a not in letters:
                raise UnknownLetter(a)

    def __eq__(self, other):
        if not isinstance(other, OrderedAutomaton):
            return NotImplemented
        return (set(self.states) == set(other.states) and self.rank == other.rank
                and set(self.alphabet) == set(other.alphabet)
                and self.transitions == other.transitions and self.initial == other.initial
                and self.finals == other.finals and self.buchi == other.buchi)

    __hash__ = object.__hash__

    def __len__(self):
        return len(self.states)

    def __repr__(self):
        return (f"OrderedAutomaton({len(self.states)} states, {len(self.transitions)} transitions, "
                f"initial={self.initial!r})")

    @cached_property
    def index(self) -> dict[str, int]:
        return {q: i for i, q in enumerate(self.states)}

    @cached_property
    def letter_index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.alphabet)}

    @cached_property
    def delta(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """``delta[i][a]``: sorted target indices from state ``i`` on letter index ``a``."""
        out = [[[] for _ in self.alphabet] for _ in self.states]
        for p, a, q in self.transitions:
            out[self.index[p]][self.letter_index[a]].append(self.index[q])
        return tuple(tuple(tuple(sorted(ts)) for ts in row) for row in out)

    @cached_property
    def ordered(self) -> tuple[str, ...]:
        """States from lowest to highest rank."""
        return tuple(sorted(self.states, key=self.rank.__getitem__))

    def succ(self, q: str, a: str) -> tuple[str, ...]:
        return tuple(self.states[j] for j in self.delta[self.index[q]][self.letter_index[a]])

    def below(self, q: str) -> frozenset[str]:
        r = self.rank[q]
        return frozenset(p for p in self.states if self.rank[p] < r)

    def letter_ids(self, word: Sequence[str]) -> list[int]:
        try:
            return [self.letter_index[a] for a in word]
        except KeyError as exc:
            raise UnknownLetter(exc.args[0]) from None

    def is_deterministic(self) -> bool:
        return all(len(ts) <= 1 for row in self.delta for ts in row)

    def is_complete(self) -> bool:
        return all(len(ts) >= 1 for row in self.delta for ts in row)

    def accepts(self, word: Sequence[str]) -> bool:
        cur = {self.index[self.initial]}
        for a in self.letter_ids(word):
            cur = {t for i in cur for t in self.delta[i][a]}
        return any(self.states[i] in self.finals for i in cur)

    def replace(self, **changes) -> OrderedAutomaton:
        fields = dict(states=self.states, rank=self.rank, alphabet=self.alphabet,
                      transitions=self.transitions, initial=self.initial,
                      finals=self.finals, buchi=self.buchi)
        fields.update(changes)
        return OrderedAutomaton(**fields)

    def to_json(self) -> dict:
        return {
            "states": [{"name": q, "rank": self.rank[q]} for q in self.ordered],
            "alphabet": list(self.alphabet),
            "initial": self.initial,
            "finals": sorted(self.finals, key=self.rank.__getitem__),
            "buchi": sorted(self.buchi, key=self.rank.__getitem__),
            "transitions": [list(t) for t in sorted(
                self.transitions, key=lambda t: (self.rank[t[0]], self.alphabet.index(t[1]), self.rank[t[2]]))],
        }

    def to_dot(self, name: str = "A") -> str:
        def q(s):
            return '"' + str(s).replace('"', r'\"') + '"'

        lines = [f"digraph {q(name)} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
        for s in self.ordered:
            attrs = [f'label={q(f"{s}:{self.rank[s]}")}',
                     "shape=doublecircle" if s in self.finals else "shape=circle"]
            if s in self.buchi:
                attrs.append('style=filled, fillcolor="lightgrey"')
            lines.append(f"  {q(s)} [{', '.join(attrs)}];")
        lines.append(f"  __start -> {q(self.initial)};")
        grouped: dict[tuple[str, str], list[str]] = {}
        for p, a, t in self.transitions:
            grouped.setdefault((p, t), []).append(a)
        for (p, t), letters in sorted(grouped.items(), key=lambda kv: (self.rank[kv[0][0]], self.rank[kv[0][1]])):
            letters.sort(key=self.alphabet.index)
            lines.append(f"  {q(p)} -> {q(t)} [label={q(','.join(letters))}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def automaton_from_json(data: Mapping) -> OrderedAutomaton:
    states = [s["name"] for s in data["states"]]
    rank = {s["name"]: int(s["rank"]) for s in data["states"]}
    transitions = [tuple(t) for t in data["transitions"]]
    alphabet = data.get("alphabet")
    if alphabet is None:
        alphabet = sorted({t[1] for t in transitions})
    return OrderedAutomaton(states, rank, tuple(alphabet), frozenset(transitions),
                            data["initial"], frozenset(data["finals"]), frozenset(data.get("buchi", ())))


@dataclass(frozen=True)
class RunTrace:
    """A run as its state sequence.

    For a finite word of length m, ``stem`` holds the m+1 states at positions
    0..m.  For an ultimately periodic word the run is ``stem . cycle^omega``.
    """

    stem: tuple[str, ...]
    cycle: tuple[str, ...] = ()
    accepted: bool = True

    def state_at(self, i: int) -> str:
        if i < len(self.stem):
            return self.stem[i]
        if not self.cycle:
            raise IndexError(i)
        return self.cycle[(i - len(self.stem)) % len(self.cycle)]

    @property
    def is_lasso(self) -> bool:
        return bool(self.cycle)


# ---------------------------------------------------------------- runs


def accepting_runs_finite(A: OrderedAutomaton, word: Sequence[str]) -> list[RunTrace]:
    """All accepting runs on a finite word, lexicographic in state indices."""
    ids = A.letter_ids(word)
    if not ids:
        raise InputError("runs are only considered on nonempty words")
    m = len(ids)
    final = {A.index[f] for f in A.finals}
    start = A.index[A.initial]
    fwd = [{start}]
    for a in ids:
        fwd.append({t for p in fwd[-1] for t in A.delta[p][a]})
    # alive[i]: states at position i on some run that ends in a final state
    alive = [set() for _ in range(m + 1)]
    alive[m] = fwd[m] & final
    for i in range(m - 1, -1, -1):
        nxt = alive[i + 1]
        alive[i] = {p for p in fwd[i] if any(t in nxt for t in A.delta[p][ids[i]])}
    if start not in alive[0]:
        return []
    runs = []

    def extend(path):
        i = len(path) - 1
        if i == m:
            runs.append(RunTrace(tuple(A.states[j] for j in path)))
            return
        for t in A.delta[path[-1]][ids[i]]:
            if t in alive[i + 1]:
                path.append(t)
                extend(path)
                path.pop()

    extend([start])
    return runs


def _product_graph(A: OrderedAutomaton, w: UPWord):
    ids = A.letter_ids(w.prefix + w.period)
    start = (A.index[A.initial], 0)

    def succ(node):
        p, pos = node
        nxt = w.next_pos(pos)
        return [(t, nxt) for t in A.delta[p][ids[pos]]]

    return start, succ


def _accepting_sccs(nodes, succ, is_accepting_sets):
    """SCCs that are nontrivial and meet every predicate in ``is_accepting_sets``."""
    good = []
    for comp in sccs(nodes, succ):
        cs = set(comp)
        if len(comp) == 1 and comp[0] not in succ(comp[0]):
            continue
        if all(any(pred(x) for x in comp) for pred in is_accepting_sets):
            good.append(cs)
    return good


def _bfs_path(start, targets, succ, allowed=None):
    """Shortest path from start to a node in ``targets`` (excluding start itself unless a loop)."""
    parent = {}
    queue = deque([start])
    seen = {start}
    first = True
    while queue:
        x = queue.popleft()
        for y in succ(x):
            if allowed is not None and y not in allowed:
                continue
            if y in targets:
                path = [y, x]
                while path[-1] != start or (first and len(path) == 1):
                    path.append(parent[path[-1]])
                    if path[-1] == start:
                        break
                return path[::-1]
            if y not in seen:
                seen.add(y)
                parent[y] = x
                queue.append(y)
    return None


def _lasso(start, succ, comp, accepting):
    """Stem path start..x and cycle x..x inside ``comp`` through an accepting node x."""
    reach_order = []
    parent = {start: None}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        reach_order.append(x)
        for y in succ(x):
            if y not in parent:
                parent[y] = x
                queue.append(y)
    x = next(n for n in reach_order if n in comp and accepting(n))
    stem = []
    n = x
    while n is not None:
        stem.append(n)
        n = parent[n]
    stem.reverse()
    cycle = _bfs_path(x, {x}, succ, allowed=comp)
    return stem[:-1], cycle[:-1]


def accepting_runs_up(A: OrderedAutomaton, w: UPWord, mode: str = "exists") -> tuple[int, RunTrace | None]:
    """Decide acceptance of ``w`` and, in ``unique`` mode, count runs as 0, 1 or 2 (meaning >= 2).

    Returns ``(count, lasso)`` where ``lasso`` is one accepting run when any exists.
    Exists mode reports 1 for "at least one".
    """
    if mode not in ("exists", "unique"):
        raise ValueError(mode)
    start, succ = _product_graph(A, w)
    nodes = reachable([start], succ)
    buchi = {A.index[r] for r in A.buchi}
    good = _accepting_sccs(nodes, succ, [lambda x: x[0] in buchi])
    if not good:
        return 0, None
    comp = set().union(*good)
    stem, cycle = _lasso(start, succ, comp, lambda x: x[0] in buchi)
    trace = RunTrace(tuple(A.states[p] for p, _ in stem), tuple(A.states[p] for p, _ in cycle))
    if mode == "exists":
        return 1, trace
    # nodes that lie on some accepting run
    rev: dict = {}
    for x in nodes:
        for y in succ(x):
            rev.setdefault(y, []).append(x)
    useful = reachable(comp, lambda y: rev.get(y, ()))

    def succ2(node):
        p1, p2, pos, d = node
        out = []
        for y1 in succ((p1, pos)):
            if y1 not in useful:
                continue
            for y2 in succ((p2, pos)):
                if y2 not in useful:
                    continue
                out.append((y1[0], y2[0], y1[1], 1 if d or y1[0] != y2[0] else 0))
        return out

    start2 = (start[0], start[0], 0, 0)
    nodes2 = [n for n in reachable([start2], succ2) if n[3] == 1]
    diverged = set(nodes2)

    def succ_d(n):
        return [y for y in succ2(n) if y in diverged]

    twins = _accepting_sccs(nodes2, succ_d, [lambda x: x[0] in buchi, lambda x: x[1] in buchi])
    return (2 if twins else 1), trace


# ---------------------------------------------------------------- languages


def image_of_restricted_language(A: OrderedAutomaton, phi: Morphism, p: str, X: Iterable[str], q: str,
                                 with_witness: bool = False):
    """Exact set of phi-images of L_{p,X,q}: nonempty words from p to q through X.

    With ``with_witness`` returns a dict element -> shortlex-least word.
    """
    table = phi.semigroup.table
    inside = _index_set(A, X)
    target = A.index[q]
    img = [phi.image(a) for a in A.alphabet]
    result: dict[int, Word] = {}
    seen: dict[tuple[int, int], Word] = {}
    queue = deque()

    def visit(state, s, word):
        if state == target and s not in result:
            result[s] = word
        if state in inside and (state, s) not in seen:
            seen[(state, s)] = word
            queue.append((state, s))

    src = A.index[p]
    for a, letter in enumerate(A.alphabet):
        for t in A.delta[src][a]:
            visit(t, img[a], (letter,))
    while queue:
        state, s = queue.popleft()
        word = seen[(state, s)]
        for a, letter in enumerate(A.alphabet):
            s2 = table[s][img[a]]
            for t in A.delta[state][a]:
                visit(t, s2, word + (letter,))
    if with_witness:
        return result
    return frozenset(result)


class _Below:
    """Membership in the strict down-set of a rank without materializing it."""

    def __init__(self, A: OrderedAutomaton, q: str, ranks: list[int] | None = None):
        self.ranks = ranks if ranks is not None else [A.rank[x] for x in A.states]
        self.bound = A.rank[q]

    def __contains__(self, i: int) -> bool:
        return self.ranks[i] < self.bound


def _index_set(A: OrderedAutomaton, X):
    if isinstance(X, _Below):
        return X
    return {A.index[x] for x in X}


def below_set(A: OrderedAutomaton, q: str) -> _Below:
    """The states below ``q``, usable as ``X`` in :func:`image_of_restricted_language`."""
    return _Below(A, q)


def _useful_finite(A: OrderedAutomaton) -> set[int]:
    start = A.index[A.initial]
    fwd = reachable([start], lambda i: [t for row in [A.delta[i]] for ts in row for t in ts])
    rev: dict[int, list[int]] = {}
    for i in range(len(A.states)):
        for ts in A.delta[i]:
            for t in ts:
                rev.setdefault(t, []).append(i)
    back = reachable([A.index[f] for f in A.finals], lambda i: rev.get(i, ()))
    return fwd & back


def check_unambiguous_finite(A: OrderedAutomaton) -> tuple[bool, Word | None]:
    """Exact: is there a nonempty finite word with two accepting runs?  Witness is shortlex-least."""
    useful = _useful_finite(A)
    start = A.index[A.initial]
    if start not in useful:
        return True, None
    final = {A.index[f] for f in A.finals}
    begin = (start, start, 0)
    parent = {begin: None}
    queue = deque([begin])
    while queue:
        node = queue.popleft()
        p1, p2, d = node
        for a, letter in enumerate(A.alphabet):
            for t1 in A.delta[p1][a]:
                if t1 not in useful:
                    continue
                for t2 in A.delta[p2][a]:
                    if t2 not in useful:
                        continue
                    nxt = (t1, t2, 1 if d or t1 != t2 else 0)
                    if nxt in parent:
                        continue
                    parent[nxt] = (node, letter)
                    if nxt[2] and t1 in final and t2 in final:
                        word = []
                        n = nxt
                        while parent[n] is not None:
                            n, letter_ = parent[n]
                            word.append(letter_)
                        return False, tuple(reversed(word))
                    queue.append(nxt)
    return True, None


def check_universal_finite(A: OrderedAutomaton) -> tuple[bool, Word | None]:
    """Exact subset construction: does every nonempty word reach a final state?"""
    final = {A.index[f] for f in A.finals}
    begin = frozenset([A.index[A.initial]])
    # only subsets reached by a nonempty word are recorded; the start set may recur
    word_of: dict[frozenset, Word] = {}
    queue = deque([(begin, ())])
    while queue:
        cur, word = queue.popleft()
        for a, letter in enumerate(A.alphabet):
            nxt = frozenset(t for i in cur for t in A.delta[i][a])
            if nxt in word_of:
                continue
            word_of[nxt] = word + (letter,)
            if not nxt & final:
                return False, word_of[nxt]
            queue.append((nxt, word_of[nxt]))
    return True, None


def check_unambiguous_omega(A: OrderedAutomaton) -> tuple[bool, UPWord | None]:
    """Exact over all infinite words: can two distinct runs both be Büchi-accepting?"""
    start = A.index[A.initial]
    buchi = {A.index[r] for r in A.buchi}

    def succ1(i):
        return [t for ts in A.delta[i] for t in ts]

    fwd = reachable([start], succ1)
    good = _accepting_sccs(fwd, succ1, [lambda i: i in buchi])
    if not good:
        return True, None
    rev: dict[int, list[int]] = {}
    for i in fwd:
        for t in succ1(i):
            rev.setdefault(t, []).append(i)
    useful = reachable(set().union(*good), lambda i: rev.get(i, ()))

    def succ2(node):
        p1, p2, d = node
        out = []
        for a in range(len(A.alphabet)):
            for t1 in A.delta[p1][a]:
                if t1 in useful:
                    for t2 in A.delta[p2][a]:
                        if t2 in useful:
                            out.append((t1, t2, 1 if d or t1 != t2 else 0))
        return out

    begin = (start, start, 0)
    div = {n for n in reachable([begin], succ2) if n[2]}

    def succ_d(n):
        return [y for y in succ2(n) if y in div]

    twins = _accepting_sccs(div, succ_d, [lambda x: x[0] in buchi, lambda x: x[1] in buchi])
    if not twins:
        return True, None
    comp = twins[0]

    def lsucc(node):
        p1, p2, d = node
        out = []
        for a in range(len(A.alphabet)):
            for t1 in A.delta[p1][a]:
                if t1 in useful:
                    for t2 in A.delta[p2][a]:
                        if t2 in useful:
                            out.append(((t1, t2, 1 if d or t1 != t2 else 0), a))
        return out

    return False, _witness_lasso(begin, lsucc, comp, A.alphabet, buchi)


def _witness_lasso(begin, lsucc, comp, alphabet, buchi) -> UPWord:
    def path(src, dst_pred, allowed):
        parent = {src: None}
        queue = deque([src])
        while queue:
            x = queue.popleft()
            for y, a in lsucc(x):
                if allowed is not None and y not in allowed:
                    continue
                if dst_pred(y):
                    word = [alphabet[a]]
                    n = x
                    while parent[n] is not None:
                        n, b = parent[n]
                        word.append(alphabet[b])
                    return tuple(reversed(word)), y
                if y not in parent:
                    parent[y] = (x, a)
                    queue.append(y)
        return None

    x = next(n for n in sorted(comp) if n[0] in buchi)
    if begin == x:
        u = ()
    else:
        u, _ = path(begin, lambda n: n == x, None)
    y = next(n for n in sorted(comp) if n[1] in buchi)
    v1, _ = path(x, lambda n: n == y, comp) if x != y else ((), x)
    v2, _ = path(y, lambda n: n == x, comp)
    return UPWord(u, v1 + v2)


def check_universal_up_bounded(A: OrderedAutomaton, max_u: int, max_v: int,
                               unique: bool = False) -> tuple[bool, UPWord | None, int]:
    """Every UP word within bounds has an accepting run (exactly one if ``unique``).

    Returns (ok, first failing word, run count for that word).
    """
    mode = "unique" if unique else "exists"
    for w in up_words(A.alphabet, max_u, max_v):
        count, _ = accepting_runs_up(A, w, mode)
        if count == 0 or (unique and count != 1):
            return False, w, count
    return True, None, 1


# ---------------------------------------------------------------- goodness


@dataclass
class GoodnessReport:
    g1: bool
    g2: bool
    g3: bool
    g4: bool
    details: dict = field(default_factory=dict)
    idempotents: dict[str, str | None] = field(default_factory=dict)
    g2_violations: dict[str, dict] = field(default_factory=dict)

    @property
    def good(self) -> bool:
        return self.g1 and self.g2 and self.g3 and self.g4

    @property
    def weakly_good(self) -> bool:
        return self.g1 and self.g2 and self.g3

    @property
    def verdict(self) -> str:
        if self.good:
            return "good"
        if self.weakly_good:
            return "weakly-good"
        return "not good"

    @property
    def first_witness(self):
        for key in ("finite_ambiguity_witness", "finite_universality_witness",
                    "omega_ambiguity_witness", "up_failure"):
            if self.details.get(key) is not None:
                return key, self.details[key]
        for q, v in self.g2_violations.items():
            return "g2", {"state": q, **v}
        for key in ("g3_problem", "g4_problem"):
            if self.details.get(key):
                return key, self.details[key]
        return None

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "G1": self.g1, "G2": self.g2, "G3": self.g3, "G4": self.g4,
                "details": _jsonable(self.details), "idempotents": self.idempotents,
                "g2_violations": _jsonable(self.g2_violations),
                "witness": _jsonable(self.first_witness)}


def _jsonable(x):
    if isinstance(x, UPWord):
        return str(x)
    if isinstance(x, tuple) and all(isinstance(a, str) for a in x):
        return "".join(x) if all(len(a) == 1 for a in x) else list(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in x]
    return x


def check_g2(A: OrderedAutomaton, phi: Morphism):
    """Per-state idempotent e_q (None when L_q is empty) and violations with witnesses."""
    S = phi.semigroup
    es: dict[str, str | None] = {}
    violations: dict[str, dict] = {}
    ranks = [A.rank[x] for x in A.states]
    for q in A.ordered:
        images = image_of_restricted_language(A, phi, q, _Below(A, q, ranks), q, with_witness=True)
        ordered = sorted(images.items(), key=lambda kv: (len(kv[1]), kv[1]))
        if not ordered:
            es[q] = None
            continue
        bad = [(s, w) for s, w in ordered if not S.is_idempotent(s)]
        if bad:
            s, w = bad[0]
            violations[q] = {"reason": "not idempotent", "word": w, "image": S.names[s]}
        elif len(ordered) > 1:
            (s1, w1), (s2, w2) = ordered[:2]
            violations[q] = {"reason": "several images", "words": [w1, w2],
                             "images": [S.names[s1], S.names[s2]]}
        es[q] = S.names[ordered[0][0]] if len(ordered) == 1 and not bad else None
    return es, violations


def check_g3(A: OrderedAutomaton) -> str | None:
    if any(t == A.initial for _, _, t in A.transitions):
        return "initial state has incoming transitions"
    if any(A.rank[q] > A.rank[A.initial] for q in A.states):
        return "initial state is not maximal"
    return None


def check_g4(A: OrderedAutomaton) -> str | None:
    if len(A.finals) != 1:
        return f"{len(A.finals)} final states, expected exactly one"
    (f,) = A.finals
    if any(p == f for p, _, _ in A.transitions):
        return "final state has outgoing transitions"
    if f == A.initial:
        return "final state equals initial state"
    rf = A.rank[f]
    if any(A.rank[q] > rf for q in A.states if q not in (f, A.initial)):
        return "final state is not above all non-initial states"
    if A.rank[A.initial] < rf:
        return "final state is above the initial state"
    return None


def verify_goodness(A: OrderedAutomaton, phi: Morphism, up_bound: tuple[int, int] = (3, 3),
                    check_up: bool = True) -> GoodnessReport:
    if set(A.alphabet) != set(phi.alphabet):
        raise InputError("automaton and morphism alphabets differ")
    details: dict = {}
    unamb, w_amb = check_unambiguous_finite(A)
    univ, w_univ = check_universal_finite(A)
    o_unamb, w_oamb = check_unambiguous_omega(A)
    details.update(finite_unambiguous=unamb, finite_ambiguity_witness=w_amb,
                   finite_universal=univ, finite_universality_witness=w_univ,
                   omega_unambiguous=o_unamb, omega_ambiguity_witness=w_oamb)
    up_ok = True
    if check_up:
        up_ok, w_up, count = check_universal_up_bounded(A, *up_bound, unique=True)
        details.update(up_bound=list(up_bound), up_ok=up_ok, up_failure=w_up,
                       up_failure_runs=None if up_ok else count)
    g1 = unamb and univ and o_unamb and up_ok
    es, violations = check_g2(A, phi)
    g3 = check_g3(A)
    g4 = check_g4(A)
    details.update(g3_problem=g3, g4_problem=g4)
    return GoodnessReport(g1, not violations, g3 is None, g4 is None, details, es, violations)


# ---------------------------------------------------------------- transformations


def fresh_name(base: str, taken: Iterable[str]) -> str:
    if not isinstance(taken, (set, frozenset)):
        taken = set(taken)
    name = base
    while name in taken:
        name += "'"
    return name


def weakly_good_to_good(A: OrderedAutomaton, final_name: str = "f") -> OrderedAutomaton:
    """Add a fresh final sink f: (q,a,f) for every (q,a,q') with q' final; order Q-{i} < f < i."""
    f = fresh_name(final_name, A.states)
    extra = {(p, a, f) for p, a, t in A.transitions if t in A.finals}
    others = [q for q in A.ordered if q != A.initial]
    order = others + [f, A.initial]
    rank = {q: i for i, q in enumerate(order)}
    return OrderedAutomaton(A.states + (f,), rank, A.alphabet, A.transitions | extra,
                            A.initial, frozenset([f]), A.buchi)


def reduce(A: OrderedAutomaton) -> OrderedAutomaton:
    """Keep only states that lie on some accepting (finite or Büchi) run."""
    start = A.index[A.initial]

    def succ(i):
        return [t for ts in A.delta[i] for t in ts]

    fwd = reachable([start], succ)
    buchi = {A.index[r] for r in A.buchi}
    live = set()
    for comp in _accepting_sccs(fwd, succ, [lambda i: i in buchi]):
        live |= comp
    rev: dict[int, list[int]] = {}
    for i in fwd:
        for t in succ(i):
            rev.setdefault(t, []).append(i)
    seeds = live | {A.index[f] for f in A.finals if A.index[f] in fwd}
    back = reachable(seeds, lambda i: rev.get(i, ()))
    keep_idx = (fwd & back) | {start}
    if len(keep_idx) == len(A.states):
        return A
    keep = [q for i, q in enumerate(A.states) if i in keep_idx]
    ks = set(keep)
    return OrderedAutomaton(
        tuple(keep), {q: A.rank[q] for q in keep}, A.alphabet,
        frozenset(t for t in A.transitions if t[0] in ks and t[2] in ks),
        A.initial, A.finals & ks, A.buchi & ks)


def is_reduced(A: OrderedAutomaton) -> bool:
    return len(reduce(A)) == len(A)
