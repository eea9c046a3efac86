"""Ramsey splits read off accepting runs, and Simon factorization trees."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .algebra import Morphism
from .automaton import OrderedAutomaton, accepting_runs_finite, accepting_runs_up
from .errors import MissingBuildReport, NoAcceptingRun, NotRamsey
from .words import UPWord, Word


@dataclass(frozen=True)
class HeightAssignment:
    h: Mapping[str, int]

    @property
    def height(self) -> int:
        return max(self.h.values())

    def __getitem__(self, q: str) -> int:
        return self.h[q]

    def is_monotone(self, A: OrderedAutomaton) -> bool:
        order = A.ordered
        return all(self.h[p] <= self.h[q] for p, q in zip(order, order[1:]))


def default_heights(A: OrderedAutomaton) -> HeightAssignment:
    return HeightAssignment({q: i + 1 for i, q in enumerate(A.ordered)})


def optimized_heights(report, A: OrderedAutomaton | None = None) -> HeightAssignment:
    """Levels that share slots between sub-automata; ``report`` is the synthesis case tree."""
    if report is None or not getattr(report, "heights", None):
        raise MissingBuildReport("optimized heights need the build report of the automaton")
    if A is not None and set(A.states) != set(report.heights):
        raise MissingBuildReport("build report does not describe this automaton")
    return HeightAssignment(dict(report.heights))


@dataclass(frozen=True)
class Split:
    """Levels of positions 0..|w| (finite) or of ``stem + cycle^omega`` (infinite)."""

    levels: tuple[int, ...]
    cycle: tuple[int, ...] = ()

    @property
    def height(self) -> int:
        return max(self.levels + self.cycle)

    def level(self, i: int) -> int:
        if i < len(self.levels):
            return self.levels[i]
        return self.cycle[(i - len(self.levels)) % len(self.cycle)]

    def unrolled(self, n: int) -> tuple[int, ...]:
        return tuple(self.level(i) for i in range(n))

    def to_json(self):
        if self.cycle:
            return {"stem": list(self.levels), "cycle": list(self.cycle)}
        return list(self.levels)


def split_word(A: OrderedAutomaton, h: HeightAssignment, w: Sequence[str] | UPWord) -> Split:
    if isinstance(w, UPWord):
        count, run = accepting_runs_up(A, w, "exists")
        if not count:
            raise NoAcceptingRun(f"no accepting run on {w}")
        return Split(tuple(h[q] for q in run.stem), tuple(h[q] for q in run.cycle))
    runs = accepting_runs_finite(A, tuple(w))
    if not runs:
        raise NoAcceptingRun(f"no accepting run on {''.join(w)}")
    return Split(tuple(h[q] for q in runs[0].stem))


def equivalence_classes(levels: Sequence[int]) -> list[list[int]]:
    """Classes of i ~ j: equal level and nothing higher in between (singletons omitted)."""
    classes: list[list[int]] = []
    open_: dict[int, list[int]] = {}
    for i, lv in enumerate(levels):
        for k in [k for k in open_ if k < lv]:
            cls = open_.pop(k)
            if len(cls) > 1:
                classes.append(cls)
        if lv in open_:
            open_[lv].append(i)
        else:
            open_[lv] = [i]
    classes.extend(c for c in open_.values() if len(c) > 1)
    classes.sort()
    return classes


@dataclass
class RamseyVerdict:
    ok: bool
    witness: dict | None = None


def verify_ramsey(split: Split, phi: Morphism, w: Sequence[str] | UPWord) -> RamseyVerdict:
    """Every class maps all gaps between consecutive members to one idempotent.

    Gaps between non-consecutive members are products of consecutive ones,
    so they agree as soon as the common value is idempotent.
    """
    if isinstance(w, UPWord):
        n = len(split.levels) + 2 * len(split.cycle)
        n = max(n, len(w.prefix) + 2 * len(w.period)) + 1
        levels = split.unrolled(n)
        letters = w.unroll(n - 1)
    else:
        levels = split.levels
        letters = tuple(w)
        if len(levels) != len(letters) + 1:
            return RamseyVerdict(False, {"reason": "split length does not match word"})
    S = phi.semigroup
    for cls in equivalence_classes(levels):
        e = None
        for i, j in zip(cls, cls[1:]):
            s = _segment(phi, letters, i, j)
            if e is None:
                e = s
                if not S.is_idempotent(e):
                    return RamseyVerdict(False, {"pair": [i, j], "image": S.names[e], "reason": "not idempotent"})
            elif s != e:
                return RamseyVerdict(False, {"pair": [i, j], "image": S.names[s], "expected": S.names[e],
                                             "reason": "class maps to several elements"})
    return RamseyVerdict(True)


def _segment(phi: Morphism, letters, i: int, j: int) -> int:
    S = phi.semigroup
    acc = phi.image(letters[i])
    for a in letters[i + 1:j]:
        acc = S.mul(acc, phi.image(a))
    return acc


# ---------------------------------------------------------------- factorization trees


@dataclass(frozen=True)
class FactTree:
    label: int
    children: tuple[FactTree, ...] = ()
    letter: str | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def height(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(c.height for c in self.children)

    def leaves(self) -> Word:
        out = []
        stack = [self]
        while stack:
            n = stack.pop()
            if n.is_leaf:
                out.append(n.letter)
            else:
                stack.extend(reversed(n.children))
        return tuple(out)

    def to_json(self, names: Sequence[str] | None = None):
        lab = names[self.label] if names else self.label
        if self.is_leaf:
            return {"letter": self.letter, "label": lab}
        return {"label": lab, "children": [c.to_json(names) for c in self.children]}

    def to_dot(self, names: Sequence[str] | None = None) -> str:
        lines = ["digraph T {", "  node [shape=box];"]
        counter = [0]

        def go(n):
            k = counter[0]
            counter[0] += 1
            lab = names[n.label] if names else str(n.label)
            text = f"{n.letter} : {lab}" if n.is_leaf else lab
            lines.append(f'  n{k} [label="{text}"];')
            for c in n.children:
                lines.append(f"  n{k} -> n{go(c)};")
            return k

        go(self)
        lines.append("}")
        return "\n".join(lines) + "\n"


def leaf(phi: Morphism, a: str) -> FactTree:
    return FactTree(phi.image(a), (), a)


def node(phi: Morphism, children: Sequence[FactTree]) -> FactTree:
    return FactTree(phi.semigroup.product(c.label for c in children), tuple(children))


@dataclass
class TreeVerdict:
    ok: bool
    reason: str | None = None
    path: tuple[int, ...] | None = None


def verify_fact_tree(tree: FactTree, phi: Morphism, w: Sequence[str]) -> TreeVerdict:
    if tree.leaves() != tuple(w):
        return TreeVerdict(False, "yield differs from the word", ())
    S = phi.semigroup
    stack = [(tree, ())]
    while stack:
        t, path = stack.pop()
        if t.is_leaf:
            if t.letter is None or phi.image(t.letter) != t.label:
                return TreeVerdict(False, "leaf label is not the image of its letter", path)
            continue
        if len(t.children) < 2:
            return TreeVerdict(False, "internal node of arity below 2", path)
        if S.product(c.label for c in t.children) != t.label:
            return TreeVerdict(False, "label differs from the image of the yield", path)
        if len(t.children) > 2:
            labels = {c.label for c in t.children}
            if len(labels) != 1 or not S.is_idempotent(next(iter(labels))):
                return TreeVerdict(False, "wide node without one idempotent child label", path)
        for i, c in enumerate(t.children):
            stack.append((c, path + (i,)))
    return TreeVerdict(True)


def tree_from_split(w: Sequence[str], split: Split, phi: Morphism) -> FactTree:
    """Factorization tree whose idempotent nodes are the classes of the split.

    Work on the interval (i, j] of positions: the interior positions of
    maximal level cut it into segments; the segments strictly between
    consecutive cuts share one idempotent image (Ramsey), so they form one
    wide node.  Outer segments join it when they map to the same idempotent
    and are otherwise combed into binary nodes.
    """
    w = tuple(w)
    if not w:
        raise NotRamsey("factorization trees need a nonempty word")
    levels = split.levels
    if len(levels) != len(w) + 1:
        raise NotRamsey("split length does not match word")
    verdict = verify_ramsey(split, phi, w)
    if not verdict.ok:
        raise NotRamsey(str(verdict.witness))

    def build(i: int, j: int) -> FactTree:
        if j - i == 1:
            return leaf(phi, w[i])
        interior = range(i + 1, j)
        top = max(levels[k] for k in interior)
        cuts = [k for k in interior if levels[k] == top]
        bounds = [i] + cuts + [j]
        pieces = [build(a, b) for a, b in zip(bounds, bounds[1:])]
        if len(pieces) == 2:
            return node(phi, pieces)
        first, middle, last = pieces[0], pieces[1:-1], pieces[-1]
        e = middle[0].label
        # outer segments mapping to the class idempotent join the wide node
        if last.label == e:
            middle, last = middle + [last], None
        if first.label == e:
            middle, first = [first] + middle, None
        core = middle[0] if len(middle) == 1 else node(phi, middle)
        if last is not None:
            core = node(phi, [core, last])
        return core if first is None else node(phi, [first, core])

    return build(0, len(w))


def tree_height_bound(split: Split) -> int:
    return 2 * len(set(split.levels)) + 1
