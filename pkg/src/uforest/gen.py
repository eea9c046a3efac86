"""Random morphisms into transformation semigroups.

Random multiplication tables are almost never associative, so instances are
generated as closures of random self-maps of a small set under composition.
"""
from __future__ import annotations

import random
import string
from collections import deque

from .algebra import FiniteSemigroup, Morphism, validate_semigroup
from .errors import InputError, SizeOverflow

DEFAULT_CAP = 64


def compose(x: tuple[int, ...], y: tuple[int, ...]) -> tuple[int, ...]:
    """x . y = x after y, i.e. apply y first; constant maps then form a left-zero semigroup."""
    return tuple(x[i] for i in y)


def transformation_semigroup(maps: list[tuple[int, ...]], cap: int = DEFAULT_CAP) -> tuple[FiniteSemigroup, list[int]]:
    """Closure of ``maps`` under composition; returns it and the index of each generator."""
    elems = []
    index: dict[tuple[int, ...], int] = {}
    queue = deque()
    for g in maps:
        if g not in index:
            index[g] = len(elems)
            elems.append(g)
            queue.append(g)
    gens = list(dict.fromkeys(maps))
    while queue:
        x = queue.popleft()
        for g in gens:
            y = compose(x, g)
            if y not in index:
                if len(elems) >= cap:
                    raise SizeOverflow(f"closure exceeds {cap} elements")
                index[y] = len(elems)
                elems.append(y)
                queue.append(y)
    table = [[index[compose(x, y)] for y in elems] for x in elems]
    names = ["t" + "".join(map(str, e)) if len(e) <= 10 else "t" + "_".join(map(str, e)) for e in elems]
    return validate_semigroup(table, names), [index[g] for g in maps]


def random_morphism(points: int, gens: int, seed: int | None = None, cap: int = DEFAULT_CAP,
                    rng: random.Random | None = None) -> Morphism:
    if points < 1 or gens < 1:
        raise InputError("points and gens must be at least 1")
    if gens > 26:
        raise InputError("at most 26 generators (one letter each)")
    rng = rng or random.Random(seed)
    maps = [tuple(rng.randrange(points) for _ in range(points)) for _ in range(gens)]
    S, gen_idx = transformation_semigroup(maps, cap)
    letters = tuple(string.ascii_lowercase[:gens])
    return Morphism(letters, S, dict(zip(letters, gen_idx)))


def sweep_instances(count: int, seed: int, max_size: int = 6, max_letters: int = 3,
                    max_points: int = 3) -> list[Morphism]:
    """``count`` distinct random morphisms whose image semigroup has at most ``max_size`` elements."""
    rng = random.Random(seed)
    out, seen = [], set()
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 1000 * count:
            raise SizeOverflow("could not find enough small instances")
        m = rng.randint(1, max_points)
        g = rng.randint(1, max_letters)
        try:
            phi = random_morphism(m, g, rng=rng, cap=max_size)
        except SizeOverflow:
            continue
        if phi.key in seen:
            continue
        seen.add(phi.key)
        out.append(phi)
    return out
