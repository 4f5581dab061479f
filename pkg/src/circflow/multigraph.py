"""Loop-free multigraphs stored as parallel-edge classes.

Vertices are the integers ``0..n-1``.  All parallel edges between one
pair of vertices form a single *class* with a multiplicity; cut sizes,
degrees and orientation counts only ever depend on the class counts, so
individual edge copies are never materialised here.  (Plane embeddings
do need to tell copies apart; module :mod:`circflow.planar` indexes the
copies of a class ``0..mult-1`` for that purpose.)

The module also carries the catalog of named small multigraphs used by
the reduction machinery (``aK2``, triangles ``T(a,b,c)``, replicated
``K4``/``C4`` and a handful of subdivided variants) together with exact
isomorphism matching against that catalog.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

Pair = tuple[int, int]


def _key(u: int, v: int) -> Pair:
    return (u, v) if u < v else (v, u)


class Multigraph:
    """Immutable loop-free multigraph on vertices ``0..n-1``.

    ``classes`` maps unordered pairs ``(u, v)`` with ``u < v`` to a
    multiplicity ``>= 1``.  Absent pairs have multiplicity 0.
    """

    __slots__ = ("n", "_classes", "_degrees", "_size")

    def __init__(self, n: int, classes: Mapping[Pair, int]):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        canon: dict[Pair, int] = {}
        for (u, v), mult in classes.items():
            if u == v:
                raise ValueError(f"loop at vertex {u} is not allowed")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"class {(u, v)} out of range for n={n}")
            k = _key(u, v)
            if k in canon:
                raise ValueError(f"duplicate class {k}")
            if mult < 1:
                raise ValueError(f"class {k} has multiplicity {mult} < 1")
            canon[k] = mult
        self.n = n
        self._classes = dict(sorted(canon.items()))
        degrees = [0] * n
        size = 0
        for (u, v), mult in self._classes.items():
            degrees[u] += mult
            degrees[v] += mult
            size += mult
        self._degrees = degrees
        self._size = size

    # -- basic accessors -------------------------------------------------

    @property
    def size(self) -> int:
        """Number of edges counted with multiplicity."""
        return self._size

    @property
    def classes(self) -> dict[Pair, int]:
        return dict(self._classes)

    def pairs(self) -> Iterator[Pair]:
        return iter(self._classes)

    def items(self) -> Iterator[tuple[Pair, int]]:
        return iter(self._classes.items())

    def mult(self, u: int, v: int) -> int:
        if u == v:
            return 0
        return self._classes.get(_key(u, v), 0)

    def degree(self, v: int) -> int:
        return self._degrees[v]

    def degrees(self) -> list[int]:
        return list(self._degrees)

    def min_degree(self) -> int:
        return min(self._degrees) if self.n else 0

    def max_multiplicity(self) -> int:
        return max(self._classes.values(), default=0)

    def neighbors(self, v: int) -> list[int]:
        out = []
        for u, w in self._classes:
            if u == v:
                out.append(w)
            elif w == v:
                out.append(u)
        return sorted(out)

    def encoding(self) -> tuple:
        return (self.n, tuple(self._classes.items()))

    def __eq__(self, other) -> bool:
        return isinstance(other, Multigraph) and self.encoding() == other.encoding()

    def __hash__(self) -> int:
        return hash(self.encoding())

    def __repr__(self) -> str:
        body = ", ".join(f"{u}-{v}:{m}" for (u, v), m in self._classes.items())
        return f"Multigraph(n={self.n}, {{{body}}})"


# -- connectivity and cuts ----------------------------------------------


def components(G: Multigraph) -> list[list[int]]:
    """Connected components as sorted vertex lists, in order of smallest vertex."""
    seen = [False] * G.n
    adj: list[list[int]] = [[] for _ in range(G.n)]
    for u, v in G.pairs():
        adj[u].append(v)
        adj[v].append(u)
    out = []
    for s in range(G.n):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    stack.append(y)
        out.append(sorted(comp))
    return out


def is_connected(G: Multigraph) -> bool:
    return len(components(G)) <= 1


def boundary_size(G: Multigraph, X: Iterable[int]) -> int:
    """Edges with exactly one endpoint in X (X may be empty or all of V)."""
    inside = set(X)
    total = 0
    for (u, v), mult in G.items():
        if (u in inside) != (v in inside):
            total += mult
    return total


def cut_size(G: Multigraph, X: Iterable[int]) -> int:
    """Size of the edge cut between X and its complement.

    X must be a proper nonempty subset of the vertex set.
    """
    inside = set(X)
    if not inside or len(inside) >= G.n:
        raise ValueError("cut requires a proper nonempty vertex subset")
    if not all(0 <= v < G.n for v in inside):
        raise ValueError("cut set contains out-of-range vertices")
    return boundary_size(G, inside)


def _proper_subsets_with_vertex0(n: int) -> Iterator[set[int]]:
    # every unordered bipartition exactly once: fix vertex 0 on the X side
    rest = list(range(1, n))
    for r in range(0, n - 1):
        for extra in itertools.combinations(rest, r):
            yield {0, *extra}


def edge_connectivity(G: Multigraph) -> int:
    """Minimum cut size over all proper nonempty vertex subsets.

    Returns 0 for disconnected (or trivial) graphs.  Exhaustive over
    bipartitions, so intended for small n.
    """
    if G.n <= 1 or not is_connected(G):
        return 0
    return min(boundary_size(G, X) for X in _proper_subsets_with_vertex0(G.n))


def odd_edge_connectivity(G: Multigraph) -> float:
    """Size of the smallest odd edge cut, or +inf when every cut is even."""
    if G.n <= 1 or not is_connected(G):
        return 0
    best = float("inf")
    for X in _proper_subsets_with_vertex0(G.n):
        d = boundary_size(G, X)
        if d % 2 == 1 and d < best:
            best = d
    return best


# -- structural operations ------------------------------------------------


def contract(G: Multigraph, S: Iterable[int]) -> tuple[Multigraph, tuple[int, ...]]:
    """Identify the vertices of S into one vertex and drop interior edges.

    S need not induce a connected subgraph; the operation is plain set
    identification.  Returns the new graph and the surjection old->new,
    with vertex ids assigned in increasing order of old ids (the merged
    vertex takes the slot of min(S)).
    """
    inside = set(S)
    if not inside:
        raise ValueError("contraction set must be nonempty")
    if not all(0 <= v < G.n for v in inside):
        raise ValueError("contraction set contains out-of-range vertices")
    mapping = [0] * G.n
    nxt = 0
    merged = -1
    for v in range(G.n):
        if v in inside:
            if merged < 0:
                merged = nxt
                nxt += 1
            mapping[v] = merged
        else:
            mapping[v] = nxt
            nxt += 1
    classes: dict[Pair, int] = {}
    for (u, v), mult in G.items():
        a, b = mapping[u], mapping[v]
        if a == b:
            continue
        k = _key(a, b)
        classes[k] = classes.get(k, 0) + mult
    return Multigraph(nxt, classes), tuple(mapping)


def quotient(G: Multigraph, blocks: Sequence[Iterable[int]]) -> Multigraph:
    """Contract every block of a partition simultaneously.

    Block i of the result is the block containing the i-th smallest
    block minimum, matching the canonical block order used by
    :mod:`circflow.weights`.
    """
    cover: dict[int, int] = {}
    order = sorted(range(len(blocks)), key=lambda i: min(blocks[i]))
    for new_id, i in enumerate(order):
        for v in blocks[i]:
            if v in cover:
                raise ValueError(f"vertex {v} appears in two blocks")
            cover[v] = new_id
    if len(cover) != G.n or set(cover) != set(range(G.n)):
        raise ValueError("blocks do not partition the vertex set")
    classes: dict[Pair, int] = {}
    for (u, v), mult in G.items():
        a, b = cover[u], cover[v]
        if a == b:
            continue
        k = _key(a, b)
        classes[k] = classes.get(k, 0) + mult
    return Multigraph(len(blocks), classes)


def lift(G: Multigraph, v: int, w1: int, w2: int) -> Multigraph:
    """Replace one copy of w1-v and one of v-w2 by a new copy of w1-w2."""
    if w1 == w2:
        raise ValueError("lifting both copies to the same endpoint would create a loop")
    if G.mult(w1, v) < 1:
        raise ValueError(f"no edge {w1}-{v} to lift")
    if G.mult(v, w2) < 1:
        raise ValueError(f"no edge {v}-{w2} to lift")
    classes = G.classes
    for pair in (_key(w1, v), _key(v, w2)):
        classes[pair] -= 1
        if classes[pair] == 0:
            del classes[pair]
    k = _key(w1, w2)
    classes[k] = classes.get(k, 0) + 1
    return Multigraph(G.n, classes)


def subdivide(G: Multigraph, pair: Pair) -> Multigraph:
    """Replace one copy of the named class by a path of length 2.

    The new midpoint becomes vertex n of the result.
    """
    u, v = _key(*pair)
    if G.mult(u, v) < 1:
        raise ValueError(f"no class {u}-{v} to subdivide")
    classes = G.classes
    classes[(u, v)] -= 1
    if classes[(u, v)] == 0:
        del classes[(u, v)]
    w = G.n
    classes[(u, w)] = 1
    classes[(v, w)] = 1
    return Multigraph(G.n + 1, classes)


def subdivide_max(G: Multigraph, pair: Pair | None = None) -> Multigraph:
    """Subdivide one copy of a class of maximum multiplicity.

    With no pair given, the lexicographically least class attaining the
    maximum is used, which fixes the result when several classes tie.
    """
    top = G.max_multiplicity()
    if top == 0:
        raise ValueError("graph has no edges to subdivide")
    if pair is None:
        pair = min(k for k, m in G.items() if m == top)
    elif G.mult(*pair) != top:
        raise ValueError(f"class {pair} does not attain the maximum multiplicity {top}")
    return subdivide(G, pair)


def induced(G: Multigraph, S: Iterable[int]) -> tuple[Multigraph, tuple[int, ...]]:
    """Induced subgraph on S, re-indexed; returns (graph, sorted old ids)."""
    verts = sorted(set(S))
    if not all(0 <= v < G.n for v in verts):
        raise ValueError("subset contains out-of-range vertices")
    pos = {v: i for i, v in enumerate(verts)}
    classes = {}
    for (u, v), mult in G.items():
        if u in pos and v in pos:
            classes[(pos[u], pos[v])] = mult
    return Multigraph(len(verts), classes), tuple(verts)


def relabel(G: Multigraph, perm: Sequence[int]) -> Multigraph:
    """Apply the vertex bijection old -> perm[old]."""
    if sorted(perm) != list(range(G.n)):
        raise ValueError("perm is not a bijection on the vertex set")
    return Multigraph(G.n, {_key(perm[u], perm[v]): m for (u, v), m in G.items()})


def add_parallel(G: Multigraph, pair: Pair, extra: int = 1) -> Multigraph:
    """Add extra parallel copies to a (possibly absent) class."""
    u, v = _key(*pair)
    if u == v:
        raise ValueError("cannot add a loop")
    classes = G.classes
    classes[(u, v)] = classes.get((u, v), 0) + extra
    return Multigraph(G.n, classes)


# -- isomorphism and the catalog ------------------------------------------

_ISO_VERTEX_CAP = 8


def canonical_form(G: Multigraph) -> tuple:
    """Lexicographically least class encoding over all vertex bijections."""
    if G.n > _ISO_VERTEX_CAP:
        raise ValueError(f"canonical form supported only up to {_ISO_VERTEX_CAP} vertices")
    best = None
    for perm in itertools.permutations(range(G.n)):
        enc = tuple(sorted((_key(perm[u], perm[v]), m) for (u, v), m in G.items()))
        if best is None or enc < best:
            best = enc
    return (G.n, best)


def isomorphic(G: Multigraph, H: Multigraph) -> bool:
    if G.n != H.n or G.size != H.size:
        return False
    if sorted(G.degrees()) != sorted(H.degrees()):
        return False
    return canonical_form(G) == canonical_form(H)


@dataclass(frozen=True)
class CatalogLabel:
    """Name of a catalog graph: a family tag plus numeric parameters."""

    family: str
    params: tuple[int, ...] = ()

    def __str__(self) -> str:
        if self.family == "aK2":
            return f"{self.params[0]}K2"
        if self.family == "T":
            return "T(" + ",".join(map(str, self.params)) + ")"
        if self.family == "kK4":
            return f"{self.params[0]}K4"
        if self.family == "kC4":
            return f"{self.params[0]}C4"
        if self.params:
            return self.family + "[" + ",".join(map(str, self.params)) + "]"
        return self.family


def a_k2(a: int) -> Multigraph:
    """a parallel edges on two vertices."""
    return Multigraph(2, {(0, 1): a})


def triangle(a: int, b: int, c: int) -> Multigraph:
    """Triangle with class multiplicities a, b, c.

    Classes are placed so that vertex degrees come out ascending when
    a <= b <= c: mult(0,1)=a, mult(0,2)=b, mult(1,2)=c.
    """
    return Multigraph(3, {(0, 1): a, (0, 2): b, (1, 2): c})


def k_k4(k: int) -> Multigraph:
    """K4 with every class replicated k times."""
    return Multigraph(4, {p: k for p in itertools.combinations(range(4), 2)})


def k_c4(k: int) -> Multigraph:
    """4-cycle 0-1-2-3 with every class replicated k times."""
    return Multigraph(4, {(0, 1): k, (1, 2): k, (2, 3): k, (0, 3): k})


def cycle(n: int, k: int = 1) -> Multigraph:
    """Cycle 0-1-...-(n-1)-0 with k parallel copies per class (n >= 3)."""
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    classes = {(i, i + 1): k for i in range(n - 1)}
    classes[(0, n - 1)] = k
    return Multigraph(n, classes)


def three_k4_plus() -> Multigraph:
    """3K4 with one extra parallel copy on one class."""
    return add_parallel(k_k4(3), (2, 3))


def five_c4_matching_deleted() -> Multigraph:
    """5C4 minus a perfect matching: cyclic multiplicities (4, 5, 4, 5).

    A perfect matching of 5C4 consists of one copy from each of two
    opposite classes, so the two reduced classes face each other and
    vertices 0 and 2 keep neighbourhoods {1, 3}.
    """
    return Multigraph(4, {(0, 1): 4, (1, 2): 5, (2, 3): 4, (0, 3): 5})


def five_c4_edge_deleted() -> Multigraph:
    """5C4 minus a single edge copy: cyclic multiplicities (4, 5, 5, 5)."""
    return Multigraph(4, {(0, 1): 4, (1, 2): 5, (2, 3): 5, (0, 3): 5})


def _t115_unit_subdivided() -> Multigraph:
    # T(1,1,5) with one multiplicity-1 class subdivided: 4-cycle (5,1,1,1)
    return Multigraph(4, {(0, 1): 5, (1, 2): 1, (2, 3): 1, (0, 3): 1})


def _five_c4_md_twice_subdivided() -> Multigraph:
    return subdivide_max(subdivide_max(five_c4_matching_deleted()))


def _five_c4_md_twice_subdivided_identified() -> Multigraph:
    H = _five_c4_md_twice_subdivided()
    Q, _ = contract(H, (4, 5))
    return Q


_SPECIALS: dict[tuple, CatalogLabel] | None = None


def _specials() -> dict[tuple, CatalogLabel]:
    global _SPECIALS
    if _SPECIALS is None:
        named = {
            "3K4+": three_k4_plus(),
            "5C4=": five_c4_matching_deleted(),
            "5C4-": five_c4_edge_deleted(),
            "3C4_o": subdivide_max(k_c4(3)),
            "T233_oo": subdivide_max(subdivide_max(triangle(2, 3, 3))),
            "T115_o": subdivide_max(triangle(1, 1, 5)),
            "T115_dot": _t115_unit_subdivided(),
            "5C4=_oo": _five_c4_md_twice_subdivided(),
            "5C4=_oo_id": _five_c4_md_twice_subdivided_identified(),
            "T444_ooo": subdivide_max(subdivide_max(subdivide_max(triangle(4, 4, 4)))),
        }
        _SPECIALS = {canonical_form(g): CatalogLabel(name) for name, g in named.items()}
    return _SPECIALS


def build_catalog(label: CatalogLabel | str) -> Multigraph:
    """Construct the catalog graph named by a label (or its str form)."""
    if isinstance(label, str):
        label = parse_label(label)
    fam, params = label.family, label.params
    if fam == "aK2":
        return a_k2(params[0])
    if fam == "T":
        return triangle(*params)
    if fam == "kK4":
        return k_k4(params[0])
    if fam == "kC4":
        return k_c4(params[0])
    builders = {
        "3K4+": three_k4_plus,
        "5C4=": five_c4_matching_deleted,
        "5C4-": five_c4_edge_deleted,
        "3C4_o": lambda: subdivide_max(k_c4(3)),
        "T233_oo": lambda: subdivide_max(subdivide_max(triangle(2, 3, 3))),
        "T115_o": lambda: subdivide_max(triangle(1, 1, 5)),
        "T115_dot": _t115_unit_subdivided,
        "5C4=_oo": _five_c4_md_twice_subdivided,
        "5C4=_oo_id": _five_c4_md_twice_subdivided_identified,
        "T444_ooo": lambda: subdivide_max(subdivide_max(subdivide_max(triangle(4, 4, 4)))),
    }
    if fam in builders:
        return builders[fam]()
    raise ValueError(f"unknown catalog label {label}")


def parse_label(text: str) -> CatalogLabel:
    """Parse label spellings like 4K2, T2,3,3, 2K4, 3C4, 3K4+, 5C4=."""
    t = text.strip()
    if t in ("3K4+", "5C4=", "5C4-", "3C4_o", "T233_oo", "T115_o",
             "T115_dot", "5C4=_oo", "5C4=_oo_id", "T444_ooo"):
        return CatalogLabel(t)
    if t.startswith("T"):
        body = t[1:].lstrip("_(").rstrip(")")
        parts = tuple(int(x) for x in body.replace("_", ",").split(","))
        if len(parts) != 3 or min(parts) < 1:
            raise ValueError(f"bad triangle label {text!r}")
        return CatalogLabel("T", tuple(sorted(parts)))
    for suffix, fam in (("K2", "aK2"), ("K4", "kK4"), ("C4", "kC4")):
        if t.endswith(suffix):
            head = t[: -len(suffix)] or "1"
            return CatalogLabel(fam, (int(head),))
    raise ValueError(f"unknown catalog label {text!r}")


def catalog_match(G: Multigraph) -> CatalogLabel | None:
    """Exact-isomorphism label of G within the catalog, if any."""
    n = G.n
    cls = G.classes
    if n == 2 and len(cls) == 1:
        return CatalogLabel("aK2", (G.mult(0, 1),))
    if n == 3 and len(cls) == 3:
        return CatalogLabel("T", tuple(sorted(cls.values())))
    if n == 4:
        mults = set(cls.values())
        if len(cls) == 6 and len(mults) == 1:
            return CatalogLabel("kK4", (mults.pop(),))
        if len(cls) == 4 and len(mults) == 1:
            # 4 equal classes: a 4-cycle iff every vertex lies on exactly 2 of them
            count = [0, 0, 0, 0]
            for u, v in cls:
                count[u] += 1
                count[v] += 1
            if count == [2, 2, 2, 2] and is_connected(G):
                return CatalogLabel("kC4", (next(iter(mults)),))
    if 4 <= n <= 6:
        label = _specials().get(canonical_form(G))
        if label is not None:
            return label
    return None


# -- text format -----------------------------------------------------------


def to_text(G: Multigraph) -> str:
    lines = [f"mg {G.n}"]
    for (u, v), mult in G.items():
        lines.append(f"c {u} {v} {mult}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Multigraph:
    """Parse the one-graph text format; raises ValueError with line numbers."""
    n = None
    classes: dict[Pair, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "mg":
            if n is not None:
                raise ValueError(f"line {lineno}: repeated mg header")
            if len(fields) != 2:
                raise ValueError(f"line {lineno}: expected 'mg <n>'")
            n = int(fields[1])
        elif fields[0] == "c":
            if n is None:
                raise ValueError(f"line {lineno}: class before mg header")
            if len(fields) != 4:
                raise ValueError(f"line {lineno}: expected 'c <u> <v> <mult>'")
            u, v, mult = int(fields[1]), int(fields[2]), int(fields[3])
            if not (0 <= u < v < n):
                raise ValueError(f"line {lineno}: require 0 <= u < v < n")
            if (u, v) in classes:
                raise ValueError(f"line {lineno}: duplicate class {u}-{v}")
            if mult < 1:
                raise ValueError(f"line {lineno}: multiplicity must be >= 1")
            classes[(u, v)] = mult
        else:
            raise ValueError(f"line {lineno}: unknown record {fields[0]!r}")
    if n is None:
        raise ValueError("missing mg header")
    return Multigraph(n, classes)
