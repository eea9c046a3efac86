"""Finite semigroups given by multiplication tables, and morphisms into them.

Elements are dense integer indices ``0..n-1``; names are only used for
presentation and serialization.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, Sequence

from .errors import DegenerateSplit, InputError, NonAssociative, OutOfRange, UnknownLetter


@dataclass(frozen=True)
class PowerProfile:
    """Exponents describing the cyclic subsemigroup generated by one element.

    ``k`` and ``ell`` are lexicographically least with ``s^k = s^(k+ell)``;
    ``n`` is the least exponent making ``s^n`` idempotent.
    """

    k: int
    ell: int
    n: int


@dataclass(frozen=True, eq=False)
class FiniteSemigroup:
    names: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]

    def __eq__(self, other):
        if not isinstance(other, FiniteSemigroup):
            return NotImplemented
        return self.names == other.names and self.table == other.table

    def __hash__(self):
        return hash((self.names, self.table))

    def __len__(self):
        return len(self.names)

    @property
    def elements(self) -> range:
        return range(len(self.names))

    @cached_property
    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def product(self, xs: Iterable[int]) -> int:
        it = iter(xs)
        acc = next(it)
        for x in it:
            acc = self.table[acc][x]
        return acc

    def power(self, s: int, m: int) -> int:
        acc = s
        for _ in range(m - 1):
            acc = self.table[acc][s]
        return acc

    def is_idempotent(self, e: int) -> bool:
        return self.table[e][e] == e

    def idempotents(self) -> frozenset[int]:
        return frozenset(e for e in self.elements if self.table[e][e] == e)

    def power_profile(self, s: int) -> PowerProfile:
        seen = {}
        acc, m = s, 1
        while acc not in seen:
            seen[acc] = m
            acc = self.table[acc][s]
            m += 1
        k = seen[acc]
        ell = m - k
        n = next(i for i in range(1, m) if self.is_idempotent(self.power(s, i)))
        return PowerProfile(k, ell, n)

    def left_ideal(self, c: int) -> frozenset[int]:
        """The set ``S c``."""
        return frozenset(self.table[x][c] for x in self.elements)

    def right_ideal(self, c: int) -> frozenset[int]:
        """The set ``c S``."""
        return frozenset(self.table[c][x] for x in self.elements)

    def is_group(self) -> bool:
        full = frozenset(self.elements)
        return all(self.left_ideal(s) == full and self.right_ideal(s) == full
                   for s in self.elements)

    def unit(self) -> int | None:
        for e in self.elements:
            if all(self.table[e][x] == x == self.table[x][e] for x in self.elements):
                return e
        return None

    def is_group_by_inverses(self) -> bool:
        """Group test via an explicit two-sided unit and inverses."""
        e = self.unit()
        if e is None:
            return False
        return all(any(self.table[s][t] == e == self.table[t][s] for t in self.elements)
                   for s in self.elements)

    def generated(self, generators: Iterable[int]) -> frozenset[int]:
        gens = sorted(set(generators))
        if not gens:
            raise InputError("generated_subsemigroup needs at least one generator")
        closure = set(gens)
        queue = deque(gens)
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.table[x][g]
                if y not in closure:
                    closure.add(y)
                    queue.append(y)
        return frozenset(closure)

    def restrict(self, subset: Iterable[int]) -> tuple[FiniteSemigroup, dict[int, int]]:
        """Sub-semigroup on ``subset`` (must be closed); returns it and old->new indices."""
        keep = sorted(set(subset))
        remap = {old: new for new, old in enumerate(keep)}
        try:
            table = tuple(tuple(remap[self.table[x][y]] for y in keep) for x in keep)
        except KeyError:
            raise InputError("subset is not closed under the product") from None
        return FiniteSemigroup(tuple(self.names[x] for x in keep), table), remap

    def to_json(self) -> dict:
        return {"elements": list(self.names), "table": [list(r) for r in self.table]}


def validate_semigroup(table: Sequence[Sequence[int]], names: Sequence[str] | None = None) -> FiniteSemigroup:
    n = len(table)
    if n == 0:
        raise InputError("a semigroup needs at least one element")
    if names is None:
        names = [f"e{i}" for i in range(n)]
    names = tuple(str(x) for x in names)
    if len(names) != n or len(set(names)) != n:
        raise InputError("element names must be distinct and match the table size")
    rows = []
    for i, row in enumerate(table):
        if len(row) != n:
            raise InputError(f"row {i} has length {len(row)}, expected {n}")
        for j, v in enumerate(row):
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < n:
                raise OutOfRange(i, j, v)
        rows.append(tuple(row))
    t = tuple(rows)
    for i, j, k in product(range(n), repeat=3):
        if t[t[i][j]][k] != t[i][t[j][k]]:
            raise NonAssociative(i, j, k, names)
    return FiniteSemigroup(names, t)


def semigroup_from_json(data: Mapping) -> FiniteSemigroup:
    return validate_semigroup(data["table"], data["elements"])


@dataclass(frozen=True, eq=False)
class Morphism:
    """A map from letters to semigroup elements, extended to nonempty words."""

    alphabet: tuple[str, ...]
    semigroup: FiniteSemigroup
    letter_map: Mapping[str, int] = field(hash=False)

    def __post_init__(self):
        if not self.alphabet:
            raise InputError("alphabet must be nonempty")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise InputError("alphabet letters must be distinct")
        if set(self.letter_map) != set(self.alphabet):
            raise InputError("every letter needs exactly one image")
        for a, s in self.letter_map.items():
            if not 0 <= s < len(self.semigroup):
                raise OutOfRange(a, "image", s)
        object.__setattr__(self, "letter_map", dict(self.letter_map))

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @cached_property
    def key(self):
        return (self.alphabet, self.semigroup.names, self.semigroup.table,
                tuple(self.letter_map[a] for a in self.alphabet))

    @property
    def S(self) -> FiniteSemigroup:
        return self.semigroup

    def image(self, a: str) -> int:
        try:
            return self.letter_map[a]
        except KeyError:
            raise UnknownLetter(a) from None

    def __call__(self, word: Sequence[str]) -> int:
        return eval_morphism(self, word)

    def letter_images(self) -> frozenset[int]:
        return frozenset(self.letter_map.values())

    def name(self, s: int) -> str:
        return self.semigroup.names[s]

    def restrict_alphabet(self, letters: Iterable[str]) -> Morphism:
        keep = tuple(a for a in self.alphabet if a in set(letters))
        return Morphism(keep, self.semigroup, {a: self.letter_map[a] for a in keep})

    def restrict_to_image(self) -> Morphism:
        """Same morphism with S replaced by the sub-semigroup phi(Sigma+)."""
        sub = self.semigroup.generated(self.letter_images())
        if len(sub) == len(self.semigroup):
            return self
        S, remap = self.semigroup.restrict(sub)
        return Morphism(self.alphabet, S, {a: remap[s] for a, s in self.letter_map.items()})

    def to_json(self) -> dict:
        return {"alphabet": list(self.alphabet),
                "map": {a: self.semigroup.names[self.letter_map[a]] for a in self.alphabet}}


def eval_morphism(phi: Morphism, word: Sequence[str]) -> int:
    if len(word) == 0:
        raise InputError("morphisms are only defined on nonempty words")
    table = phi.semigroup.table
    acc = phi.image(word[0])
    for a in word[1:]:
        acc = table[acc][phi.image(a)]
    return acc


def morphism_from_json(data: Mapping, semigroup: FiniteSemigroup) -> Morphism:
    alphabet = tuple(data["alphabet"])
    mapping = data["map"]
    letter_map = {}
    for a in alphabet:
        if a not in mapping:
            raise InputError(f"letter {a!r} has no image")
        try:
            letter_map[a] = semigroup.index[mapping[a]]
        except KeyError:
            raise InputError(f"unknown element {mapping[a]!r} for letter {a!r}") from None
    extra = set(mapping) - set(alphabet)
    if extra:
        raise UnknownLetter(sorted(extra)[0])
    return Morphism(alphabet, semigroup, letter_map)


def idempotents(S: FiniteSemigroup) -> frozenset[int]:
    return S.idempotents()


def power_profile(S: FiniteSemigroup, s: int) -> PowerProfile:
    return S.power_profile(s)


def left_ideal(S: FiniteSemigroup, c: int) -> frozenset[int]:
    return S.left_ideal(c)


def right_ideal(S: FiniteSemigroup, c: int) -> frozenset[int]:
    return S.right_ideal(c)


def is_group(S: FiniteSemigroup) -> bool:
    return S.is_group()


def generated_subsemigroup(S: FiniteSemigroup, generators: Iterable[int]) -> frozenset[int]:
    return S.generated(generators)


def split_alphabet(phi: Morphism, c: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Return (Sigma_1, Sigma_2) where Sigma_2 is the preimage of ``c`` among letters."""
    sigma2 = tuple(a for a in phi.alphabet if phi.letter_map[a] == c)
    sigma1 = tuple(a for a in phi.alphabet if phi.letter_map[a] != c)
    if not sigma1 or not sigma2:
        raise DegenerateSplit(f"split on {phi.name(c)} leaves an empty side")
    return sigma1, sigma2


def _closure_right(phi: Morphism, seeds: list[tuple[int, tuple[str, ...]]],
                   letters: Sequence[str]) -> dict[int, tuple[str, ...]]:
    # BFS in shortlex order: the first witness recorded per element is shortlex-least.
    table = phi.semigroup.table
    witness: dict[int, tuple[str, ...]] = {}
    queue = deque()
    for s, w in seeds:
        if s not in witness:
            witness[s] = w
            queue.append(s)
    while queue:
        s = queue.popleft()
        for a in letters:
            t = table[s][phi.letter_map[a]]
            if t not in witness:
                witness[t] = witness[s] + (a,)
                queue.append(t)
    return witness


def derived_alphabet(phi: Morphism, c: int, side: str) -> dict[int, tuple[str, ...]]:
    """Block alphabet B with one shortest witness word per element.

    ``side="left"`` gives phi(Sigma Sigma_1* Sigma_2), a subset of S c;
    ``side="right"`` gives phi(Sigma_2 Sigma Sigma_1*), a subset of c S.
    """
    sigma1, sigma2 = split_alphabet(phi, c)
    table = phi.semigroup.table
    c_letter = sigma2[0]
    if side == "left":
        seeds = [(phi.letter_map[a], (a,)) for a in phi.alphabet]
        prefixes = _closure_right(phi, seeds, sigma1)
        ordered = sorted(prefixes.items(), key=lambda kv: (len(kv[1]), [phi.alphabet.index(x) for x in kv[1]]))
        out: dict[int, tuple[str, ...]] = {}
        for s, w in ordered:
            out.setdefault(table[s][c], w + (c_letter,))
        return out
    if side == "right":
        seeds = [(table[c][phi.letter_map[a]], (c_letter, a)) for a in phi.alphabet]
        return _closure_right(phi, seeds, sigma1)
    raise ValueError(f"side must be 'left' or 'right', not {side!r}")
