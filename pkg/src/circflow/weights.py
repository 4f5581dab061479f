"""Partition weights and the obstruction-partition scan.

For a partition P = {P_1..P_t} of the vertex set, the two weights are

    w(P)   = sum d(P_i) - 11 t + 19
    rho(P) = sum d(P_i) - 17 t + 31

where d(P_i) counts edges leaving block i.  Both are exact integers;
w(G) / rho(G) minimise over all partitions.  Refining one block by a
partition Q of the induced subgraph H shifts the weight by a constant:

    w_G(refinement) = w_H(Q) + w_G(P) - 8
    rho_G(refinement) = rho_H(Q) + rho_G(P) - 14

and refinement_weight asserts that identity on every call.

Partitions are enumerated as restricted growth strings (digit i is the
block id of vertex i, each digit at most one more than the running
maximum), which gives a canonical, repeatable order for tie-breaking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from . import multigraph as mg
from .guards import CapExceeded, PARTITION_VERTEX_CAP

_PARAMS = {"w": (11, 19), "rho": (17, 31)}
REFINEMENT_OFFSET = {"w": 8, "rho": 14}


def _params(which: str) -> tuple[int, int]:
    if which not in _PARAMS:
        raise ValueError(f"weight selector must be 'w' or 'rho', got {which!r}")
    return _PARAMS[which]


@dataclass(frozen=True)
class Partition:
    """Set partition of 0..n-1 into blocks ordered by smallest element."""

    n: int
    blocks: tuple[frozenset[int], ...]

    @staticmethod
    def from_blocks(n: int, blocks: Sequence[Sequence[int]]) -> "Partition":
        seen: set[int] = set()
        for blk in blocks:
            if not blk:
                raise ValueError("empty block")
            for v in blk:
                if not 0 <= v < n:
                    raise ValueError(f"vertex {v} out of range")
                if v in seen:
                    raise ValueError(f"vertex {v} in two blocks")
                seen.add(v)
        if len(seen) != n:
            raise ValueError("blocks do not cover the vertex set")
        ordered = tuple(sorted((frozenset(b) for b in blocks), key=min))
        return Partition(n, ordered)

    @staticmethod
    def from_rgs(rgs: Sequence[int]) -> "Partition":
        blocks: dict[int, list[int]] = {}
        top = -1
        for v, d in enumerate(rgs):
            if d > top + 1:
                raise ValueError("not a restricted growth string")
            top = max(top, d)
            blocks.setdefault(d, []).append(v)
        return Partition.from_blocks(len(rgs), [blocks[i] for i in range(len(blocks))])

    def to_rgs(self) -> tuple[int, ...]:
        rgs = [0] * self.n
        for i, blk in enumerate(self.blocks):
            for v in blk:
                rgs[v] = i
        return tuple(rgs)

    @property
    def t(self) -> int:
        return len(self.blocks)

    def is_trivial(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)

    def is_almost_trivial(self) -> bool:
        return (
            self.t == self.n - 1
            and sorted(len(b) for b in self.blocks) == [1] * (self.n - 2) + [2]
        )

    def is_whole(self) -> bool:
        return self.t == 1

    @property
    def classification(self) -> str:
        """One of trivial / almost-trivial / whole / normal.

        For tiny graphs the categories overlap (the one-vertex whole
        partition is also trivial); precedence is trivial, then
        almost-trivial, then whole.
        """
        if self.is_trivial():
            return "trivial"
        if self.is_almost_trivial():
            return "almost-trivial"
        if self.is_whole():
            return "whole"
        return "normal"

    def __str__(self) -> str:
        return "|".join(",".join(map(str, sorted(b))) for b in self.blocks)


def trivial_partition(n: int) -> Partition:
    return Partition.from_blocks(n, [[v] for v in range(n)])


def whole_partition(n: int) -> Partition:
    return Partition.from_blocks(n, [list(range(n))])


def restricted_growth_strings(n: int, max_blocks: int | None = None) -> Iterator[tuple[int, ...]]:
    """All RGS of length n in lexicographic order, optionally block-capped."""
    if n == 0:
        yield ()
        return
    rgs = [0] * n

    def rec(i: int, top: int) -> Iterator[tuple[int, ...]]:
        if i == n:
            yield tuple(rgs)
            return
        limit = top + 1
        if max_blocks is not None:
            limit = min(limit, max_blocks - 1)
        for d in range(limit + 1):
            rgs[i] = d
            yield from rec(i + 1, max(top, d))

    yield from rec(1, 0)


def block_boundaries(G: mg.Multigraph, P: Partition) -> list[int]:
    """d(P_i) for each block, i.e. edges leaving the block."""
    block_of = [0] * G.n
    for i, blk in enumerate(P.blocks):
        for v in blk:
            block_of[v] = i
    d = [0] * P.t
    for (u, v), mult in G.items():
        a, b = block_of[u], block_of[v]
        if a != b:
            d[a] += mult
            d[b] += mult
    return d


def weight(G: mg.Multigraph, P: Partition, which: str) -> int:
    """Exact weight of a partition under the chosen parameters."""
    coef, const = _params(which)
    if P.n != G.n:
        raise ValueError("partition size does not match graph")
    return sum(block_boundaries(G, P)) - coef * P.t + const


def min_weight(
    G: mg.Multigraph, which: str, *, vertex_cap: int = PARTITION_VERTEX_CAP
) -> tuple[int, Partition]:
    """Minimum weight over all partitions with its first canonical argmin.

    Exhaustive over restricted growth strings; ties go to the
    lexicographically least string, i.e. the first one enumerated.
    """
    coef, const = _params(which)
    if G.n > vertex_cap:
        raise CapExceeded(
            f"partition minimisation capped at {vertex_cap} vertices (graph has {G.n})"
        )
    if G.n == 0:
        raise ValueError("graph must have at least one vertex")
    items = list(G.items())
    best: int | None = None
    best_rgs: tuple[int, ...] | None = None
    for rgs in restricted_growth_strings(G.n):
        t = max(rgs) + 1
        total = 0
        for (u, v), mult in items:
            if rgs[u] != rgs[v]:
                total += 2 * mult
        value = total - coef * t + const
        if best is None or value < best:
            best = value
            best_rgs = rgs
    assert best is not None and best_rgs is not None
    return best, Partition.from_rgs(best_rgs)


def refinement_weight(
    G: mg.Multigraph, P: Partition, block_index: int, Q_blocks: Sequence[Sequence[int]], which: str
) -> int:
    """Weight of the refinement splitting one block by Q.

    Q_blocks partitions the chosen block (vertices named as in G).  The
    result is also recomputed through the induced-subgraph identity; a
    mismatch would mean a bookkeeping bug, so it raises RuntimeError.
    """
    if not 0 <= block_index < P.t:
        raise ValueError("block index out of range")
    target = P.blocks[block_index]
    if len(target) <= 1:
        raise ValueError("refined block must have at least 2 vertices")
    flat = sorted(v for blk in Q_blocks for v in blk)
    if flat != sorted(target):
        raise ValueError("Q does not partition the chosen block")
    new_blocks = [sorted(b) for i, b in enumerate(P.blocks) if i != block_index]
    new_blocks.extend(sorted(b) for b in Q_blocks)
    refined = Partition.from_blocks(G.n, new_blocks)
    value = weight(G, refined, which)

    H, verts = mg.induced(G, target)
    pos = {v: i for i, v in enumerate(verts)}
    Q_local = Partition.from_blocks(H.n, [[pos[v] for v in blk] for blk in Q_blocks])
    expected = weight(H, Q_local, which) + weight(G, P, which) - REFINEMENT_OFFSET[which]
    if value != expected:
        raise RuntimeError(
            f"refinement identity violated: direct {value} vs decomposed {expected}"
        )
    return value


# -- obstruction partitions -----------------------------------------------


def troublesome_family() -> list[mg.CatalogLabel]:
    """Contractions that block boundary achievability at modulus 5."""
    return [
        mg.CatalogLabel("aK2", (2,)),
        mg.CatalogLabel("aK2", (3,)),
        mg.CatalogLabel("T", (2, 2, 3)),
        mg.CatalogLabel("T", (1, 3, 3)),
    ]


def problematic_family() -> list[mg.CatalogLabel]:
    """Contractions that block boundary achievability at modulus 7.

    The parallel classes aK2 for 2 <= a <= 5, plus every triangle with
    total multiplicity 10 or 11 whose minimum degree is at least 6.
    """
    labels = [mg.CatalogLabel("aK2", (a,)) for a in range(2, 6)]
    for total in (10, 11):
        for a in range(1, total + 1):
            for b in range(a, (total - a) // 2 + 1):
                c = total - a - b
                if c < b:
                    continue
                if a + b >= 6:  # smallest degree of the triangle
                    labels.append(mg.CatalogLabel("T", (a, b, c)))
    return labels


def _in_family(label: mg.CatalogLabel, quotient_graph: mg.Multigraph, mode: str) -> bool:
    if mode == "troublesome":
        return label in troublesome_family()
    if mode == "problematic":
        if label.family == "aK2":
            return 2 <= label.params[0] <= 5
        if label.family == "T":
            total = sum(label.params)
            return 10 <= total <= 11 and mg.edge_connectivity(quotient_graph) >= 6
        return False
    raise ValueError(f"mode must be 'troublesome' or 'problematic', got {mode!r}")


def find_special_partition(
    G: mg.Multigraph, mode: str, *, vertex_cap: int = PARTITION_VERTEX_CAP
) -> tuple[Partition, mg.CatalogLabel] | None:
    """First partition (canonical order) whose contraction hits the family.

    Only partitions into 2 or 3 blocks are enumerated, because every
    family member has at most 3 vertices.
    """
    if mode not in ("troublesome", "problematic"):
        raise ValueError(f"mode must be 'troublesome' or 'problematic', got {mode!r}")
    if G.n > vertex_cap:
        raise CapExceeded(
            f"partition scan capped at {vertex_cap} vertices (graph has {G.n})"
        )
    for rgs in restricted_growth_strings(G.n, max_blocks=3):
        t = max(rgs) + 1
        if t < 2:
            continue
        P = Partition.from_rgs(rgs)
        Q = mg.quotient(G, [sorted(b) for b in P.blocks])
        label = mg.catalog_match(Q)
        if label is not None and _in_family(label, Q, mode):
            return P, label
    return None


# -- text format ------------------------------------------------------------


def partition_to_text(P: Partition) -> str:
    return f"part {P.n}: " + " ".join(map(str, P.to_rgs())) + "\n"


def partition_from_text(text: str) -> Partition:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not line.startswith("part"):
            raise ValueError(f"line {lineno}: expected 'part <n>: <rgs...>'")
        head, _, tail = line.partition(":")
        fields = head.split()
        if len(fields) != 2 or fields[0] != "part":
            raise ValueError(f"line {lineno}: expected 'part <n>: <rgs...>'")
        n = int(fields[1])
        rgs = [int(x) for x in tail.split()]
        if len(rgs) != n:
            raise ValueError(f"line {lineno}: expected {n} block ids, got {len(rgs)}")
        return Partition.from_rgs(rgs)
    raise ValueError("missing part record")
