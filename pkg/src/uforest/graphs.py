"""Small graph utilities over implicit successor functions."""
from __future__ import annotations

from collections import deque
from typing import Callable, Hashable, Iterable

Node = Hashable


def reachable(starts: Iterable[Node], succ: Callable[[Node], Iterable[Node]]) -> set:
    seen = set(starts)
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for y in succ(x):
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def sccs(nodes: Iterable[Node], succ: Callable[[Node], Iterable[Node]]) -> list[list]:
    """Tarjan's algorithm, iterative; only edges into ``nodes`` are followed."""
    nodes = list(nodes)
    universe = set(nodes)
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list[list] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter([y for y in succ(root) if y in universe]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter([y for y in succ(w) if y in universe])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out
