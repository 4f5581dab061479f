"""Shared test helpers: independent brute-force oracles and generators.

Everything here recomputes results from first principles so the tests
never trust the code paths they are checking.
"""

from __future__ import annotations

import itertools
import random

from circflow import multigraph as mg


def edge_list(G: mg.Multigraph) -> list[tuple[int, int]]:
    """Expand every class into individual copies."""
    out = []
    for (u, v), mult in G.items():
        out.extend([(u, v)] * mult)
    return out


def brute_cut(G: mg.Multigraph, X) -> int:
    inside = set(X)
    return sum(1 for u, v in edge_list(G) if (u in inside) != (v in inside))


def brute_min_cut(G: mg.Multigraph) -> int:
    best = None
    for r in range(1, G.n):
        for X in itertools.combinations(range(G.n), r):
            c = brute_cut(G, X)
            if best is None or c < best:
                best = c
    return best if best is not None else 0


def brute_achievable(G: mg.Multigraph, values, m: int) -> bool:
    """Exhaustive product over legal class nets, no pruning anywhere."""
    pairs = list(G.pairs())
    mults = [G.mult(u, v) for u, v in pairs]
    for nets in itertools.product(*[range(-mu, mu + 1, 2) for mu in mults]):
        residue = [0] * G.n
        for (u, v), o in zip(pairs, nets):
            residue[u] += o
            residue[v] -= o
        if all(residue[v] % m == values[v] % m for v in range(G.n)):
            return True
    return False


def random_multigraph(rng: random.Random, n: int, max_mult: int = 4,
                      edge_prob: float = 0.7) -> mg.Multigraph:
    classes = {}
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < edge_prob:
                classes[(u, v)] = rng.randint(1, max_mult)
    return mg.Multigraph(n, classes)


def random_connected_multigraph(rng: random.Random, n: int, max_mult: int = 4,
                                edge_prob: float = 0.7) -> mg.Multigraph:
    while True:
        G = random_multigraph(rng, n, max_mult, edge_prob)
        if n <= 1 or mg.is_connected(G):
            return G


def random_boundary_values(rng: random.Random, n: int, m: int) -> tuple[int, ...]:
    head = [rng.randrange(m) for _ in range(n - 1)]
    return tuple(head) + ((-sum(head)) % m,)


def all_multigraphs(n: int, max_edges: int):
    """Every labeled loop-free multigraph on n vertices with at most
    max_edges edges (skips the edgeless ones for n > 1)."""
    pairs = list(itertools.combinations(range(n), 2))
    if not pairs:
        yield mg.Multigraph(n, {})
        return
    for mults in itertools.product(range(max_edges + 1), repeat=len(pairs)):
        if sum(mults) > max_edges:
            continue
        yield mg.Multigraph(n, {p: m for p, m in zip(pairs, mults) if m})


def random_partition_blocks(rng: random.Random, n: int) -> list[list[int]]:
    blocks: list[list[int]] = []
    for v in range(n):
        if blocks and rng.random() < 0.6:
            rng.choice(blocks).append(v)
        else:
            blocks.append([v])
    return blocks
