"""Finite words, ultimately periodic words, and bounded enumeration."""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

from .errors import InputError

Word = tuple[str, ...]


def as_word(w: Sequence[str] | str) -> Word:
    return tuple(w)


def words_up_to(alphabet: Sequence[str], max_len: int, min_len: int = 1) -> Iterator[Word]:
    """All words with ``min_len <= |w| <= max_len`` in shortlex order."""
    for n in range(min_len, max_len + 1):
        yield from product(alphabet, repeat=n)


@dataclass(frozen=True)
class UPWord:
    """The infinite word ``prefix . period^omega``."""

    prefix: Word
    period: Word

    def __post_init__(self):
        if not self.period:
            raise InputError("the period of an ultimately periodic word must be nonempty")
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "period", tuple(self.period))

    def __len__(self):
        # size of the folded position graph
        return len(self.prefix) + len(self.period)

    def letter(self, i: int) -> str:
        """Letter at absolute position ``i`` (0-based)."""
        p = len(self.prefix)
        if i < p:
            return self.prefix[i]
        return self.period[(i - p) % len(self.period)]

    def next_pos(self, pos: int) -> int:
        """Successor in the folded position graph."""
        return pos + 1 if pos + 1 < len(self) else len(self.prefix)

    def unroll(self, n: int) -> Word:
        return tuple(self.letter(i) for i in range(n))

    def __str__(self):
        return "".join(self.prefix) + "(" + "".join(self.period) + ")^w"

    @classmethod
    def parse(cls, text: str) -> UPWord:
        m = re.fullmatch(r"\s*([^()]*)\(([^()]+)\)\^w\s*", text)
        if not m:
            raise InputError(f"cannot parse ultimately periodic word {text!r}; expected u(v)^w")
        return cls(tuple(m.group(1)), tuple(m.group(2)))


def up_words(alphabet: Sequence[str], max_u: int, max_v: int) -> Iterator[UPWord]:
    for nu in range(0, max_u + 1):
        for u in product(alphabet, repeat=nu):
            for nv in range(1, max_v + 1):
                for v in product(alphabet, repeat=nv):
                    yield UPWord(u, v)


def random_words(alphabet: Sequence[str], count: int, max_len: int, rng: random.Random,
                 min_len: int = 1) -> list[Word]:
    """``count`` words with lengths uniform in ``[min_len, max_len]``."""
    return [tuple(rng.choices(alphabet, k=rng.randint(min_len, max_len))) for _ in range(count)]
