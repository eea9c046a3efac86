"""Good rational and omega-rational expressions by state elimination.

Expressions are immutable DAGs of :class:`RExpr` nodes; shared subterms are
stored once.  Every node produced by elimination carries the semigroup
element that all words of its language map to (``elem``).
"""
from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .algebra import Morphism
from .automaton import OrderedAutomaton, is_reduced
from .errors import Ambiguous, InputError, NoParse, NotGood, NotReduced
from .words import UPWord

EMPTY, EPS, LETTER, UNION, CONCAT, PLUS, OMEGA = "0", "eps", "letter", "union", "concat", "plus", "omega"


@dataclass(frozen=True, eq=False)
class RExpr:
    kind: str
    children: tuple[RExpr, ...] = ()
    letter: str | None = None
    elem: int | None = None

    # ---- structural measures (computed once per node, shared across the DAG)

    @cached_property
    def min_len(self) -> float:
        """Length of a shortest word (inf for the empty language)."""
        k = self.kind
        if k == EMPTY:
            return float("inf")
        if k == EPS:
            return 0
        if k == LETTER:
            return 1
        if k == UNION:
            return min(c.min_len for c in self.children)
        if k == CONCAT:
            return sum(c.min_len for c in self.children)
        if k == PLUS:
            return self.children[0].min_len
        return float("inf")  # omega: no finite words

    @cached_property
    def first(self) -> frozenset[str]:
        """Letters that can start a nonempty word of the language."""
        k = self.kind
        if k == LETTER:
            return frozenset([self.letter])
        if k == UNION:
            return frozenset().union(*(c.first for c in self.children))
        if k == CONCAT:
            l, r = self.children
            return l.first | r.first if l.min_len == 0 else l.first
        if k in (PLUS, OMEGA):
            return self.children[0].first
        return frozenset()

    @cached_property
    def last(self) -> frozenset[str]:
        k = self.kind
        if k == LETTER:
            return frozenset([self.letter])
        if k == UNION:
            return frozenset().union(*(c.last for c in self.children))
        if k == CONCAT:
            l, r = self.children
            return l.last | r.last if r.min_len == 0 else r.last
        if k == PLUS:
            return self.children[0].last
        return frozenset()

    @cached_property
    def tree_size(self) -> int:
        """Number of nodes in the tree unfolding."""
        return 1 + sum(c.tree_size for c in self.children)

    def nodes(self) -> list[RExpr]:
        """Distinct DAG nodes, children before parents."""
        out, seen = [], set()
        stack = [(self, False)]
        while stack:
            n, done = stack.pop()
            if done:
                out.append(n)
                continue
            if id(n) in seen:
                continue
            seen.add(id(n))
            stack.append((n, True))
            for c in n.children:
                if id(c) not in seen:
                    stack.append((c, False))
        return out

    @cached_property
    def plan(self) -> tuple[tuple[RExpr, tuple[int, ...]], ...]:
        """Topologically ordered nodes with their children as indices into the plan."""
        order = self.nodes()
        pos = {id(n): i for i, n in enumerate(order)}
        return tuple((n, tuple(pos[id(c)] for c in n.children)) for n in order)

    @property
    def dag_size(self) -> int:
        return len(self.plan)

    def union_branches(self) -> list[RExpr]:
        """Operands of the maximal union chain sharing this node's annotation, left to right."""
        out, stack = [], [self]
        while stack:
            n = stack.pop()
            if n.kind == UNION and n.elem == self.elem:
                stack.extend(reversed(n.children))
            else:
                out.append(n)
        return out

    def __repr__(self):
        return f"RExpr({self.kind}, dag={self.dag_size}, elem={self.elem})"


def empty() -> RExpr:
    return RExpr(EMPTY)


def epsilon() -> RExpr:
    return RExpr(EPS)


def letter(a: str, elem: int | None = None) -> RExpr:
    return RExpr(LETTER, letter=a, elem=elem)


def union(l: RExpr, r: RExpr, elem: int | None = None) -> RExpr:
    return RExpr(UNION, (l, r), elem=elem)


def concat(l: RExpr, r: RExpr, elem: int | None = None) -> RExpr:
    return RExpr(CONCAT, (l, r), elem=elem)


def plus(e: RExpr, elem: int | None = None) -> RExpr:
    return RExpr(PLUS, (e,), elem=elem)


def omega(e: RExpr, elem: int | None = None) -> RExpr:
    return RExpr(OMEGA, (e,), elem=elem)


def union_all(parts: Sequence[RExpr], elem: int | None = None) -> RExpr:
    if not parts:
        return empty()
    acc = parts[0]
    for p in parts[1:]:
        acc = union(acc, p, elem)
    return acc


def simplify_empty(E: RExpr) -> RExpr:
    """Remove Empty leaves with the usual rewrite rules; returns Empty or an Empty-free term."""
    memo: dict[int, RExpr] = {}
    for n in E.nodes():
        k = n.kind
        if not n.children:
            memo[id(n)] = n
            continue
        kids = [memo[id(c)] for c in n.children]
        if k == UNION:
            l, r = kids
            if l.kind == EMPTY:
                out = r
            elif r.kind == EMPTY:
                out = l
            else:
                out = n if all(a is b for a, b in zip(kids, n.children)) else RExpr(k, (l, r), elem=n.elem)
        elif any(c.kind == EMPTY for c in kids):
            out = empty()
        elif all(a is b for a, b in zip(kids, n.children)):
            out = n
        else:
            out = RExpr(k, tuple(kids), n.letter, n.elem)
        memo[id(n)] = out
    return memo[id(E)]


# ---------------------------------------------------------------- text form

def to_text(E: RExpr, names: Sequence[str] | None = None, annotate: bool = True) -> str:
    """Serialize as a tree; unions are flattened to n-ary ``(E|E|...)``."""
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 100000))
    parts: list[str] = []

    def ann(n):
        if annotate and n.elem is not None and names is not None:
            parts.append(":{" + names[n.elem] + "}")

    def go(n):
        k = n.kind
        if k == EMPTY:
            parts.append("0")
        elif k == EPS:
            parts.append("1")
        elif k == LETTER:
            parts.append(_quote_letter(n.letter))
        elif k == UNION:
            parts.append("(")
            for i, b in enumerate(n.union_branches()):
                if i:
                    parts.append("|")
                go(b)
            parts.append(")")
        elif k == CONCAT:
            parts.append("(")
            go(n.children[0])
            parts.append(".")
            go(n.children[1])
            parts.append(")")
        elif k == PLUS:
            parts.append("(")
            go(n.children[0])
            parts.append(")+")
        else:
            parts.append("(")
            go(n.children[0])
            parts.append(")^w")
        ann(n)

    go(E)
    return "".join(parts)


_SPECIAL = set("()|.+^:{}01 \t\n'")


def _quote_letter(a: str) -> str:
    if len(a) == 1 and a not in _SPECIAL:
        return a
    return "'" + a.replace("\\", "\\\\").replace("'", "\\'") + "'"


_TOKEN = re.compile(r"\s*(?:(\^w)|(:\{[^}]*\})|('(?:[^'\\]|\\.)*')|(.))", re.S)


def from_text(text: str, names: Sequence[str] | None = None) -> RExpr:
    """Parse the text form produced by :func:`to_text`."""
    index = {n: i for i, n in enumerate(names)} if names is not None else {}
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        pos = m.end()
        if m.group(1):
            tokens.append(("^w", None))
        elif m.group(2):
            tokens.append(("ann", m.group(2)[2:-1]))
        elif m.group(3):
            body = m.group(3)[1:-1]
            tokens.append(("letter", re.sub(r"\\(.)", r"\1", body)))
        else:
            ch = m.group(4)
            if ch.isspace():
                continue
            tokens.append((ch, None) if ch in "()|.+01" else ("letter", ch))
    tokens.append(("end", None))
    i = 0

    def peek():
        return tokens[i][0]

    def take(kind):
        nonlocal i
        if tokens[i][0] != kind:
            raise InputError(f"expected {kind!r} in expression, got {tokens[i][0]!r}")
        i += 1
        return tokens[i - 1][1]

    def annotation():
        if peek() == "ann":
            name = take("ann")
            if name not in index:
                raise InputError(f"unknown element annotation {name!r}")
            return index[name]
        return None

    def with_elem(n, e):
        return n if e is None else RExpr(n.kind, n.children, n.letter, e)

    def atom():
        k = peek()
        if k == "0":
            take("0")
            return with_elem(empty(), annotation())
        if k == "1":
            take("1")
            return with_elem(epsilon(), annotation())
        if k == "letter":
            a = take("letter")
            return letter(a, annotation())
        take("(")
        first = atom()
        if peek() == "|":
            parts = [first]
            while peek() == "|":
                take("|")
                parts.append(atom())
            take(")")
            e = annotation()
            return union_all(parts, e)
        if peek() == ".":
            take(".")
            second = atom()
            take(")")
            return concat(first, second, annotation())
        take(")")
        if peek() == "+":
            take("+")
            return plus(first, annotation())
        if peek() == "^w":
            take("^w")
            return omega(first, annotation())
        return first

    out = atom()
    if peek() != "end":
        raise InputError(f"trailing input in expression at token {tokens[i]!r}")
    return out


def to_dag_json(E: RExpr, names: Sequence[str] | None = None) -> dict:
    """Shared-node form: a topologically ordered node list, children as indices."""
    nodes = []
    for n, kids in E.plan:
        d: dict = {"kind": n.kind}
        if kids:
            d["children"] = list(kids)
        if n.letter is not None:
            d["letter"] = n.letter
        if n.elem is not None:
            d["elem"] = names[n.elem] if names is not None else n.elem
        nodes.append(d)
    return {"root": len(nodes) - 1, "nodes": nodes}


_KINDS = {EMPTY, EPS, LETTER, UNION, CONCAT, PLUS, OMEGA}
_ARITY = {EMPTY: 0, EPS: 0, LETTER: 0, UNION: 2, CONCAT: 2, PLUS: 1, OMEGA: 1}


def from_dag_json(data: Mapping, names: Sequence[str] | None = None) -> RExpr:
    index = {n: i for i, n in enumerate(names)} if names is not None else None
    built: list[RExpr] = []
    for k, d in enumerate(data["nodes"]):
        kind = d.get("kind")
        if kind not in _KINDS:
            raise InputError(f"unknown expression node kind {kind!r}")
        kids = tuple(d.get("children", ()))
        if len(kids) != _ARITY[kind] or any(not 0 <= c < k for c in kids):
            raise InputError(f"bad children for expression node {k}")
        if (kind == LETTER) != ("letter" in d):
            raise InputError(f"letter field misplaced on expression node {k}")
        elem = d.get("elem")
        if elem is not None and index is not None:
            if elem not in index:
                raise InputError(f"unknown element annotation {elem!r}")
            elem = index[elem]
        built.append(RExpr(kind, tuple(built[c] for c in kids), d.get("letter"), elem))
    root = data.get("root", len(built) - 1)
    if not built or not 0 <= root < len(built):
        raise InputError("expression has no root")
    return built[root]


def same_expression(E1: RExpr, E2: RExpr) -> bool:
    """Structural equality of the tree unfoldings, compared on the DAG."""
    memo: dict[tuple[int, int], bool] = {}
    stack = [(E1, E2)]
    while stack:
        x, y = stack.pop()
        key = (id(x), id(y))
        if key in memo:
            continue
        memo[key] = True
        if (x.kind, x.letter, x.elem, len(x.children)) != (y.kind, y.letter, y.elem, len(y.children)):
            return False
        stack.extend(zip(x.children, y.children))
    return True


# ---------------------------------------------------------------- elimination

Entry = dict[int, RExpr]  # element -> expression


@dataclass
class ElimTable:
    """Expressions saved while eliminating states in increasing rank order.

    ``into[r][p][s]`` is F^s_{p, below(r), r} for every surviving p above r,
    ``loop[r]`` is ``(e_r, F^{e_r}_{r, below(r), r})`` when that language is
    nonempty, and ``final[p][q][s]`` is F^s_{p, X, q} with X every state other
    than the initial and final ones.
    """

    automaton: OrderedAutomaton
    phi: Morphism
    into: dict[str, dict[str, Entry]] = field(default_factory=dict)
    loop: dict[str, tuple[int, RExpr]] = field(default_factory=dict)
    final: dict[str, dict[str, Entry]] = field(default_factory=dict)

    def entry(self, p: str, r: str) -> Entry:
        """F_{p, below(r), r} by element (p must rank above r, or equal it for the loop)."""
        if p == r:
            return dict([self.loop[r]]) if r in self.loop else {}
        return self.into.get(r, {}).get(p, {})


def _add(entry: Entry, s: int, E: RExpr) -> None:
    old = entry.get(s)
    entry[s] = E if old is None else union(old, E, s)


def eliminate(A: OrderedAutomaton, phi: Morphism, check: bool = True) -> ElimTable:
    """Compute F^s_{p,Y,q} bottom-up over the rank order.

    Every state except the initial and final ones is eliminated, lowest first.
    """
    S = phi.semigroup
    table = S.table
    if check and not is_reduced(A):
        raise NotReduced("state elimination needs a reduced automaton")
    if len(A.finals) != 1:
        raise NotGood("state elimination needs exactly one final state")
    (f,) = A.finals
    out: dict[str, dict[str, Entry]] = {q: {} for q in A.states}
    inc: dict[str, set[str]] = {q: set() for q in A.states}
    letters = {a: letter(a, phi.image(a)) for a in A.alphabet}
    for p, a, q in sorted(A.transitions, key=lambda t: (A.rank[t[0]], A.alphabet.index(t[1]), A.rank[t[2]])):
        _add(out[p].setdefault(q, {}), phi.image(a), letters[a])
        inc[q].add(p)
    T = ElimTable(A, phi)
    for r in A.ordered:
        if r in (A.initial, f):
            continue
        self_entry = out[r].pop(r, {})
        inc[r].discard(r)
        star = None
        if self_entry:
            if len(self_entry) != 1:
                raise NotGood(f"state {r} loops on several semigroup elements")
            ((e, body),) = self_entry.items()
            if table[e][e] != e:
                raise NotGood(f"state {r} loops on a non-idempotent element")
            T.loop[r] = (e, body)
            star = plus(body, e)
        preds = sorted(inc[r], key=A.rank.__getitem__)
        succs = sorted(out[r], key=A.rank.__getitem__)
        T.into[r] = {p: out[p][r] for p in preds}
        for p in preds:
            ent_in = out[p].pop(r)
            for q in succs:
                ent_out = out[r][q]
                target = out[p].setdefault(q, {})
                for s1, E1 in ent_in.items():
                    left = E1
                    if star is not None:
                        looped = concat(E1, star, table[s1][e])
                    for s2, E2 in ent_out.items():
                        _add(target, table[s1][s2], concat(left, E2, table[s1][s2]))
                        if star is not None:
                            s = table[table[s1][e]][s2]
                            _add(target, s, concat(looped, E2, s))
                inc[q].add(p)
        for q in succs:
            inc[q].discard(r)
        del out[r]
        inc[r] = set()
    T.final = {p: dict(qs) for p, qs in out.items()}
    return T


def finite_expressions(A: OrderedAutomaton, phi: Morphism, table: ElimTable | None = None) -> dict[int, RExpr]:
    """F_s for every element s with a nonempty preimage: all nonempty words w with phi(w) = s."""
    T = table or eliminate(A, phi)
    (f,) = A.finals
    return dict(sorted(T.final.get(A.initial, {}).get(f, {}).items()))


def _prefix_expressions(T: ElimTable) -> dict[str, Entry]:
    """Pre^s(t): words leading from the initial state to the first visit of t after
    which the run stays at or below t.

    The prefix ends with a factor from the last higher state t' down to t, and
    before that any run from the initial state to t' (its own Pre followed by
    zero or more t'-loops).
    """
    A = T.automaton
    table = T.phi.semigroup.table
    (f,) = A.finals
    inner = [q for q in reversed(A.ordered) if q not in (A.initial, f)]
    pre: dict[str, Entry] = {}
    reach: dict[str, Entry] = {}  # Pre(t') and Pre(t') . (L_t')+
    for t in inner:
        entry: Entry = {}
        for s, E in T.entry(A.initial, t).items():
            _add(entry, s, E)
        for t2, down in sorted(T.into.get(t, {}).items(), key=lambda kv: -A.rank[kv[0]]):
            if t2 not in reach:
                continue
            for s1, E1 in reach[t2].items():
                for s2, E2 in down.items():
                    s = table[s1][s2]
                    _add(entry, s, concat(E1, E2, s))
        pre[t] = entry
        if entry:
            full: Entry = dict(entry)
            if t in T.loop:
                e, body = T.loop[t]
                star = plus(body, e)
                for s1, E1 in entry.items():
                    s = table[s1][e]
                    _add(full, s, concat(E1, star, s))
            reach[t] = full
    return pre


def omega_expression(A: OrderedAutomaton, phi: Morphism, table: ElimTable | None = None) -> RExpr:
    """Union over repeated states r of Pre(r) . (F^{e_r}_{r, below(r), r})^omega."""
    T = table or eliminate(A, phi)
    pre = _prefix_expressions(T)
    branches = []
    for r in reversed(A.ordered):
        if r not in A.buchi or r not in T.loop or not pre.get(r):
            continue
        e, body = T.loop[r]
        prefix = union_all([E for _, E in sorted(pre[r].items())])
        if len(pre[r]) == 1:
            prefix = next(iter(pre[r].values()))
        branches.append(concat(prefix, omega(body, e)))
    return union_all(branches)


def omega_branches(G: RExpr) -> list[RExpr]:
    return G.union_branches() if G.kind == UNION else [G]


# ---------------------------------------------------------------- images and goodness


def image_sets(E: RExpr, phi: Morphism) -> dict[int, frozenset[int]]:
    """Exact set of images of every DAG node (by ``id``); omega nodes get their body's image."""
    S = phi.semigroup
    out: dict[int, frozenset[int]] = {}
    for n, _ in E.plan:
        k = n.kind
        if k in (EMPTY, EPS):
            img = frozenset()
        elif k == LETTER:
            img = frozenset([phi.image(n.letter)])
        elif k == UNION:
            img = out[id(n.children[0])] | out[id(n.children[1])]
        elif k == CONCAT:
            l, r = (out[id(c)] for c in n.children)
            img = frozenset(S.mul(x, y) for x in l for y in r)
        elif k == PLUS:
            body = out[id(n.children[0])]
            img = S.generated(body) if body else frozenset()
        else:
            img = out[id(n.children[0])]
        out[id(n)] = img
    return out


@dataclass
class ExpressionReport:
    ok: bool
    images_ok: bool
    unambiguous: bool
    problems: list[str] = field(default_factory=list)
    ambiguity_witness: tuple | None = None
    words_checked: int = 0


def check_good_expression(E: RExpr, phi: Morphism, len_bound: int = 8,
                          up_bound: tuple[int, int] | None = None) -> ExpressionReport:
    """Image conditions exactly; unambiguity by parse counting on bounded words."""
    from .words import up_words, words_up_to

    S = phi.semigroup
    images = image_sets(E, phi)
    problems = []
    for n, _ in E.plan:
        img = images[id(n)]
        if n.kind == EPS:
            problems.append("expression contains the empty word")
        if n.elem is not None and img and img != frozenset([n.elem]):
            problems.append(f"{n.kind} node annotated {S.names[n.elem]} has images "
                            f"{sorted(S.names[x] for x in img)}")
        if n.kind in (PLUS, OMEGA):
            body = images[id(n.children[0])]
            if len(body) != 1 or not S.is_idempotent(next(iter(body))):
                problems.append(f"{n.kind} body images {sorted(S.names[x] for x in body)} "
                                "are not a single idempotent")
    unamb, witness, checked = True, None, 0
    if E.kind == OMEGA or _has_omega(E):
        if up_bound is not None:
            ups = list(up_words(phi.alphabet, *up_bound))
            checked = len(ups)
            for w, n in zip(ups, count_omega_parses_many(E, ups)):
                if n > 1:
                    unamb, witness = False, w
                    break
    else:
        for w in words_up_to(phi.alphabet, len_bound):
            checked += 1
            if count_parses(E, w) > 1:
                unamb, witness = False, w
                break
    images_ok = not problems
    return ExpressionReport(images_ok and unamb, images_ok, unamb, problems, witness, checked)


def _has_omega(E: RExpr) -> bool:
    return any(n.kind == OMEGA for n, _ in E.plan)


# ---------------------------------------------------------------- finite parsing


class _Spans:
    """Parse counting over one word by forward end-position tables.

    ``ends(n, i)`` maps every ``j`` such that ``n`` derives ``w[i:j]`` to the
    number of derivations; it is memoized per ``(node, i)`` so each split of
    a concatenation is visited once.
    """

    def __init__(self, w: Sequence[str]):
        self.w = tuple(w)
        self.memo: dict[tuple[int, int], dict[int, int]] = {}
        self.plus_memo: dict[tuple[int, int], dict[int, int]] = {}

    def ends(self, n: RExpr, i: int) -> dict[int, int]:
        key = (id(n), i)
        got = self.memo.get(key)
        if got is not None:
            return got
        w = self.w
        k = n.kind
        out: dict[int, int] = {}
        if k == EPS:
            out = {i: 1}
        elif n.min_len == 0 or (i < len(w) and w[i] in n.first):
            if k == LETTER:
                out = {i + 1: 1}
            elif k == UNION:
                out = dict(self.ends(n.children[0], i))
                for j, c in self.ends(n.children[1], i).items():
                    out[j] = out.get(j, 0) + c
            elif k == CONCAT:
                l, r = n.children
                for m, c1 in self.ends(l, i).items():
                    for j, c2 in self.ends(r, m).items():
                        out[j] = out.get(j, 0) + c1 * c2
            elif k == PLUS:
                out = self.plus_ends(n.children[0], i)
        self.memo[key] = out
        return out

    def plus_ends(self, body: RExpr, i: int) -> dict[int, int]:
        """Ends of one or more nonempty body factors starting at ``i``."""
        key = (id(body), i)
        got = self.plus_memo.get(key)
        if got is not None:
            return got
        out: dict[int, int] = {}
        for m, c1 in self.ends(body, i).items():
            if m == i:
                continue
            out[m] = out.get(m, 0) + c1
            for j, c2 in self.plus_ends(body, m).items():
                out[j] = out.get(j, 0) + c1 * c2
        self.plus_memo[key] = out
        return out

    def count(self, n: RExpr, i: int, j: int) -> int:
        return self.ends(n, i).get(j, 0)

    def iterations(self, body: RExpr, i: int, j: int) -> int:
        """Ways to split (i, j] into one or more nonempty body factors."""
        return self.plus_ends(body, i).get(j, 0)


def count_parses(E: RExpr, w: Sequence[str]) -> int:
    w = tuple(w)
    if not w:
        raise InputError("parses are only counted on nonempty words")
    _deep_recursion()
    return _Spans(w).count(E, 0, len(w))


@dataclass(frozen=True)
class Parse:
    """A derivation: ``node`` matched ``w[start:end]``.

    ``branch`` is the chosen operand for unions; ``parts`` holds the two
    factors of a concatenation or the iterations of a plus.
    """

    node: RExpr
    start: int
    end: int
    parts: tuple[Parse, ...] = ()
    branch: int | None = None


def parse_unique(E: RExpr, w: Sequence[str]) -> Parse:
    w = tuple(w)
    _deep_recursion()
    sp = _Spans(w)
    total = sp.count(E, 0, len(w)) if w else 0
    if total == 0:
        raise NoParse(f"no parse of {''.join(w)}")
    if total > 1:
        raise Ambiguous(total)

    def build(n: RExpr, i: int, j: int) -> Parse:
        k = n.kind
        if k in (LETTER, EPS):
            return Parse(n, i, j)
        if k == UNION:
            for b, c in enumerate(n.children):
                if sp.count(c, i, j):
                    return Parse(n, i, j, (build(c, i, j),), b)
        if k == CONCAT:
            l, r = n.children
            for m in range(i, j + 1):
                if sp.count(l, i, m) and sp.count(r, m, j):
                    return Parse(n, i, j, (build(l, i, m), build(r, m, j)))
        if k == PLUS:
            body = n.children[0]
            parts = []
            a = i
            while a < j:
                for m in range(a + 1, j + 1):
                    if sp.count(body, a, m) and (m == j or sp.iterations(body, m, j)):
                        parts.append(build(body, a, m))
                        a = m
                        break
            return Parse(n, i, j, tuple(parts))
        raise AssertionError(k)

    return build(E, 0, len(w))


def parse_to_fact_tree(parse: Parse, phi: Morphism, w: Sequence[str] | None = None):
    """Concatenations become binary nodes, plus with k >= 2 iterations a k-ary node.

    ``w`` is accepted for symmetry with the other tree builders; the parse
    already determines the yield.
    """
    from .ramsey import FactTree

    S = phi.semigroup

    def conv(p: Parse) -> FactTree:
        n = p.node
        if n.kind == LETTER:
            return FactTree(phi.image(n.letter), (), n.letter)
        if n.kind == UNION:
            return conv(p.parts[0])
        kids = [conv(c) for c in p.parts]
        if len(kids) == 1:
            return kids[0]
        return FactTree(S.product(k.label for k in kids), tuple(kids))

    return conv(parse)


def _deep_recursion():
    if sys.getrecursionlimit() < 100000:
        sys.setrecursionlimit(100000)


# ---------------------------------------------------------------- omega matching
#
# An ultimately periodic word u v^w is folded into its lasso-shaped position
# graph (nodes 0..|u|+|v|-1).  Every factor x[i, j) of the infinite word is a
# walk in that graph, so for each expression node we record, for every pair of
# graph nodes (a, b), how many (factor, parse) pairs lead from a to b.  Counts
# saturate at 2, which stands for "two or more, possibly infinitely many".

def _sat(x: int) -> int:
    return 2 if x > 2 else x


def _mat_add(m1, m2):
    out = dict(m1)
    for k, v in m2.items():
        out[k] = _sat(out.get(k, 0) + v)
    return out


def _mat_mul(m1, m2):
    rows: dict[int, list[tuple[int, int]]] = {}
    for (k, b), v in m2.items():
        rows.setdefault(k, []).append((b, v))
    out: dict[tuple[int, int], int] = {}
    for (a, k), v1 in m1.items():
        for b, v2 in rows.get(k, ()):
            out[(a, b)] = _sat(out.get((a, b), 0) + v1 * v2)
    return out


def _mat_plus(m):
    acc = dict(m)
    while True:
        nxt = _mat_add(m, _mat_mul(acc, m))
        if nxt == acc:
            return acc
        acc = nxt


def _position_matrices(E: RExpr, w) -> tuple[list, list]:
    """Finite-part matrices of every plan node, and omega count vectors of omega-typed nodes."""
    word = w.prefix + w.period
    total = len(word)
    start = len(w.prefix)
    step = {a: (a + 1 if a + 1 < total else start) for a in range(total)}
    plan = E.plan
    mats: list = [None] * len(plan)
    vecs: list = [None] * len(plan)
    for i, (n, kids) in enumerate(plan):
        k = n.kind
        if k == LETTER:
            mats[i] = {(a, step[a]): 1 for a in range(total) if word[a] == n.letter}
        elif k == EPS:
            mats[i] = {(a, a): 1 for a in range(total)}
        elif k == EMPTY:
            mats[i] = {}
        elif k == UNION:
            l, r = kids
            if vecs[l] is not None or vecs[r] is not None:
                vecs[i] = _mat_add(vecs[l] or {}, vecs[r] or {})
            else:
                mats[i] = _mat_add(mats[l], mats[r])
        elif k == CONCAT:
            l, r = kids
            if vecs[l] is not None:
                raise InputError("an omega factor must come last in a concatenation")
            if vecs[r] is not None:
                vec: dict[int, int] = {}
                for (a, b), v in mats[l].items():
                    got = vecs[r].get(b, 0)
                    if got:
                        vec[a] = _sat(vec.get(a, 0) + v * got)
                vecs[i] = vec
            else:
                ml, mr = mats[l], mats[r]
                mats[i] = _mat_mul(ml, mr) if ml and mr else {}
        elif k == PLUS:
            mats[i] = _mat_plus(mats[kids[0]]) if mats[kids[0]] else {}
        else:
            vecs[i] = _infinite_walks(mats[kids[0]], total)
    return mats, vecs


def _infinite_walks(m, total: int) -> dict[int, int]:
    """Saturated number of infinite walks from each node in the weighted graph ``m``."""
    from .graphs import reachable, sccs

    succ: dict[int, list[int]] = {a: [] for a in range(total)}
    for (a, b), v in m.items():
        if v:
            succ[a].append(b)
    cyclic = set()
    for comp in sccs(range(total), lambda a: succ[a]):
        if len(comp) > 1 or comp[0] in succ[comp[0]]:
            cyclic.update(comp)
    pred: dict[int, list[int]] = {a: [] for a in range(total)}
    for a, bs in succ.items():
        for b in bs:
            pred[b].append(a)
    productive = reachable(cyclic, lambda b: pred[b])
    out = {}
    for a in productive:
        count = 1
        for x in reachable([a], lambda y: [b for b in succ[y] if b in productive]):
            weight = sum(m[(x, b)] for b in succ[x] if b in productive)
            if weight > 1:
                count = 2
                break
        out[a] = count
    return out


def count_omega_parses_many(E: RExpr, words: Sequence[UPWord]) -> list[int]:
    """:func:`count_omega_parses` for many words in one pass over the DAG.

    Only letter leaves depend on the word, so all words are padded to the same
    number of positions and every node carries a stack of saturated matrices,
    one per word.  Matrices are dropped after their last use.
    """
    import numpy as np

    words = list(words)
    if not words:
        return []
    W = len(words)
    n = max(len(w) for w in words)
    dtype = np.int8 if n <= 30 else np.int32
    letters = sorted({a for w in words for a in w.prefix + w.period})
    leaf = {a: np.zeros((W, n, n), dtype) for a in letters}
    for k, w in enumerate(words):
        for pos in range(len(w)):
            leaf[w.letter(pos)][k, pos, w.next_pos(pos)] = 1
    zero = np.zeros((W, n, n), dtype)
    eye = np.broadcast_to(np.eye(n, dtype=dtype), (W, n, n))

    def sat(x):
        return np.minimum(x, 2, out=x)

    def mul(x, y):
        return sat(np.matmul(x, y))

    def closure(m):
        acc = m.copy()
        while True:
            nxt = sat(m + mul(acc, m))
            if np.array_equal(nxt, acc):
                return acc
            acc = nxt

    def walks(m):
        # saturated count of infinite walks from each position
        reach = closure((m > 0).astype(dtype)) > 0
        cyclic = np.diagonal(reach, axis1=1, axis2=2)
        refl = reach | eye.astype(bool)
        productive = (refl & cyclic[:, None, :]).any(axis=2)
        mp = m * productive[:, None, :] * productive[:, :, None]
        branching = mp.sum(axis=2, dtype=np.int32) > 1
        inner = closure((mp > 0).astype(dtype)) > 0
        ahead = (inner | eye.astype(bool)) & branching[:, None, :]
        return np.where(productive, np.where(ahead.any(axis=2), 2, 1), 0).astype(dtype)

    plan = E.plan
    last_use = list(range(len(plan)))
    for i, (_, kids) in enumerate(plan):
        for c in kids:
            last_use[c] = i
    mats: dict[int, object] = {}
    vecs: dict[int, object] = {}
    for i, (node, kids) in enumerate(plan):
        k = node.kind
        if k == LETTER:
            mats[i] = leaf.get(node.letter, zero)
        elif k == EPS:
            mats[i] = eye
        elif k == EMPTY:
            mats[i] = zero
        elif k == UNION:
            l, r = kids
            if l in vecs or r in vecs:
                vecs[i] = sat(vecs.get(l, 0) + vecs.get(r, 0))
            else:
                mats[i] = sat(mats[l] + mats[r])
        elif k == CONCAT:
            l, r = kids
            if l in vecs:
                raise InputError("an omega factor must come last in a concatenation")
            if r in vecs:
                vecs[i] = sat(np.matmul(mats[l], vecs[r][:, :, None])[:, :, 0])
            else:
                mats[i] = mul(mats[l], mats[r])
        elif k == PLUS:
            mats[i] = closure(mats[kids[0]])
        else:
            vecs[i] = walks(mats[kids[0]])
        for c in set(kids):
            if last_use[c] == i:
                mats.pop(c, None)
                vecs.pop(c, None)
    root = len(plan) - 1
    if root not in vecs:
        raise InputError("expression has no omega part")
    return [int(x) for x in vecs[root][:, 0]]


def count_omega_parses(E: RExpr, w, cap: int = 2) -> int:
    """Number of parses of the ultimately periodic word ``w``: 0, 1, or ``cap`` for more."""
    _, vecs = _position_matrices(E, w)
    if vecs[-1] is None:
        raise InputError("expression has no omega part")
    got = vecs[-1].get(0, 0)
    return cap if got > 1 else got


def count_parses_matrix(E: RExpr, w: Sequence[str]) -> int:
    """Saturated parse count of a finite word via position matrices (oracle for the span DP)."""
    w = tuple(w)
    total = len(w) + 1
    mats: dict[int, dict] = {}
    for n, _ in E.plan:
        k = n.kind
        if k == LETTER:
            mats[id(n)] = {(a, a + 1): 1 for a in range(len(w)) if w[a] == n.letter}
        elif k == EPS:
            mats[id(n)] = {(a, a): 1 for a in range(total)}
        elif k == EMPTY or k == OMEGA:
            mats[id(n)] = {}
        elif k == UNION:
            mats[id(n)] = _mat_add(*(mats[id(c)] for c in n.children))
        elif k == CONCAT:
            mats[id(n)] = _mat_mul(*(mats[id(c)] for c in n.children))
        else:
            mats[id(n)] = _mat_plus(mats[id(n.children[0])])
    return mats[id(E)].get((0, len(w)), 0)


def omega_branch_matches(G: RExpr, w) -> list[int]:
    """Parse count of ``w`` in each top-level branch."""
    return [count_omega_parses(b, w) for b in omega_branches(G)]
