"""Boundaries, orientation certificates, and the exhaustive searches.

An orientation of a multigraph assigns a direction to every edge copy.
For an odd modulus m = 2p+1, an orientation *achieves* a boundary
``beta`` when at every vertex the out-degree minus the in-degree is
congruent to ``beta(v)`` mod m.  Reversing one u->v copy against one
v->u copy of the same class changes nothing observable mod m, so the
search works with per-class *nets*: for a class of multiplicity mu the
net (copies towards the larger endpoint subtracted from copies towards
the smaller) ranges over -mu, -mu+2, ..., mu.  That collapses the space
from 2^(edges) to the product of (mu + 1) over the classes.

The search is depth-first over classes in sorted order, pruned at both
endpoints of the class just decided: a vertex with residual incident
multiplicity r and running net c stays feasible iff some x with
|x| <= r, x = r (mod 2) has c + x = beta(v) (mod m).  A failed search is
reported as a :class:`Refutation` carrying the full search-space size so
callers can assert the search really was exhaustive.

A refutation is a verdict.  Guard-triggered refusals are raised as
:class:`circflow.guards.CapExceeded` instead and never masquerade as
refutations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from . import multigraph as mg
from .guards import CapExceeded, STRONG_CONNECTIVITY_VERTEX_CAP, CIRCULAR_FLOW_EDGE_CAP

Pair = tuple[int, int]


def _check_modulus(modulus: int) -> None:
    if modulus < 3 or modulus % 2 == 0:
        raise ValueError(f"modulus must be odd and >= 3, got {modulus}")


@dataclass(frozen=True)
class Boundary:
    """Vertex residues mod an odd modulus, summing to zero."""

    modulus: int
    values: tuple[int, ...]

    def __post_init__(self):
        _check_modulus(self.modulus)
        if any(not (0 <= x < self.modulus) for x in self.values):
            raise ValueError("boundary values must be reduced residues")
        if sum(self.values) % self.modulus != 0:
            raise ValueError("boundary values must sum to 0 mod the modulus")

    def negated(self) -> "Boundary":
        m = self.modulus
        return Boundary(m, tuple((-x) % m for x in self.values))


def zero_boundary(n: int, modulus: int) -> Boundary:
    return Boundary(modulus, (0,) * n)


@dataclass
class OrientationCertificate:
    """Per-class net orientation counts realising some boundary.

    ``nets[(u, v)]`` with u < v is (copies directed u->v) minus (copies
    directed v->u); it has the parity of the class multiplicity and
    absolute value at most that multiplicity.
    """

    modulus: int
    nets: dict[Pair, int]

    def net(self, u: int, v: int) -> int:
        if u < v:
            return self.nets.get((u, v), 0)
        return -self.nets.get((v, u), 0)

    def out_copies(self, u: int, v: int, mult: int) -> int:
        """Copies directed u->v given the class multiplicity."""
        return (mult + self.net(u, v)) // 2


@dataclass(frozen=True)
class Refutation:
    """Outcome of an exhausted orientation search with no solution."""

    modulus: int
    search_space: int


@dataclass(frozen=True)
class FlowRefutation:
    """Outcome of an exhausted integer-flow search with no solution."""

    search_space: int


def realized_boundary(G: mg.Multigraph, cert: OrientationCertificate) -> Boundary:
    """Recompute the boundary a certificate realises (checker-side)."""
    m = cert.modulus
    net = [0] * G.n
    for (u, v), _ in G.items():
        o = cert.nets[(u, v)]
        net[u] += o
        net[v] -= o
    return Boundary(m, tuple(x % m for x in net))


def verify_certificate(G: mg.Multigraph, beta: Boundary, cert: OrientationCertificate) -> bool:
    """Independent check that cert is a beta-orientation of G."""
    if cert.modulus != beta.modulus or len(beta.values) != G.n:
        return False
    if set(cert.nets) != set(G.pairs()):
        return False
    for (u, v), mult in G.items():
        o = cert.nets[(u, v)]
        if abs(o) > mult or (o - mult) % 2 != 0:
            return False
    return realized_boundary(G, cert).values == beta.values


class _OrientationSearch:
    """Reusable pruned depth-first search over class nets of one graph."""

    def __init__(self, G: mg.Multigraph, modulus: int):
        _check_modulus(modulus)
        self.G = G
        self.m = modulus
        self.pairs: list[Pair] = sorted(G.pairs())
        self.mults = [G.mult(u, v) for u, v in self.pairs]
        # nets tried small-magnitude first: balanced orientations are the
        # common case, so solutions tend to sit early in this order
        self.options = [
            sorted(range(-mu, mu + 1, 2), key=lambda o: (abs(o), -o)) for mu in self.mults
        ]
        space = 1
        for mu in self.mults:
            space *= mu + 1
        self.search_space = space

    def solve(self, beta: Sequence[int]) -> dict[Pair, int] | None:
        m = self.m
        pairs = self.pairs
        mults = self.mults
        options = self.options
        cur = [0] * self.G.n
        rem = self.G.degrees()
        chosen: dict[Pair, int] = {}

        def feasible(v: int) -> bool:
            r = (beta[v] - cur[v]) % m
            rv = rem[v]
            x0 = r if (r & 1) == (rv & 1) else r + m
            x0 %= 2 * m
            return x0 <= rv or 2 * m - x0 <= rv

        for v in range(self.G.n):
            if not feasible(v):
                return None

        def dfs(i: int) -> bool:
            if i == len(pairs):
                return True
            u, v = pairs[i]
            mu = mults[i]
            rem[u] -= mu
            rem[v] -= mu
            for o in options[i]:
                cur[u] += o
                cur[v] -= o
                if feasible(u) and feasible(v):
                    chosen[(u, v)] = o
                    if dfs(i + 1):
                        cur[u] -= o
                        cur[v] += o
                        rem[u] += mu
                        rem[v] += mu
                        return True
                cur[u] -= o
                cur[v] += o
            rem[u] += mu
            rem[v] += mu
            return False

        if dfs(0):
            return dict(chosen)
        return None


def beta_orientation(G: mg.Multigraph, beta: Boundary) -> OrientationCertificate | Refutation:
    """Find an orientation achieving beta, or refute by exhaustion."""
    if len(beta.values) != G.n:
        raise ValueError("boundary length does not match vertex count")
    search = _OrientationSearch(G, beta.modulus)
    nets = search.solve(beta.values)
    if nets is None:
        return Refutation(beta.modulus, search.search_space)
    return OrientationCertificate(beta.modulus, nets)


def mod_orientation(G: mg.Multigraph, p: int) -> OrientationCertificate | Refutation:
    """Orientation with all vertex nets divisible by 2p+1 (zero boundary)."""
    if p < 1:
        raise ValueError("p must be at least 1")
    return beta_orientation(G, zero_boundary(G.n, 2 * p + 1))


@dataclass
class StrongResult:
    """Verdict of the all-boundaries check at one modulus."""

    modulus: int
    is_strong: bool
    witness: Boundary | None
    boundaries_checked: int
    certificates: dict[tuple[int, ...], OrientationCertificate] | None = None


def iter_boundaries(n: int, modulus: int) -> Iterator[tuple[int, ...]]:
    """All zero-sum residue vectors, lexicographic, last coordinate forced."""
    if n == 0:
        yield ()
        return
    m = modulus
    head = [0] * (n - 1)
    while True:
        yield tuple(head) + ((-sum(head)) % m,)
        i = n - 2
        while i >= 0 and head[i] == m - 1:
            head[i] = 0
            i -= 1
        if i < 0:
            return
        head[i] += 1


def strongly_connected(
    G: mg.Multigraph,
    modulus: int,
    *,
    vertex_cap: int = STRONG_CONNECTIVITY_VERTEX_CAP,
    collect: bool = False,
) -> StrongResult:
    """Decide whether every boundary is achievable.

    Scans boundaries in lexicographic order (last residue forced by the
    zero-sum condition) and stops at the first failure, so a negative
    answer always reports the lexicographically least failing boundary.
    """
    _check_modulus(modulus)
    if G.n < 1:
        raise ValueError("graph must have at least one vertex")
    if G.n > vertex_cap:
        raise CapExceeded(
            f"strong connectivity check capped at {vertex_cap} vertices (graph has {G.n})"
        )
    if not mg.is_connected(G) and G.n > 1:
        comp = mg.components(G)
        values = [0] * G.n
        values[comp[0][0]] = 1
        values[comp[1][0]] = modulus - 1
        return StrongResult(modulus, False, Boundary(modulus, tuple(values)), 0)
    search = _OrientationSearch(G, modulus)
    certs: dict[tuple[int, ...], OrientationCertificate] | None = {} if collect else None
    checked = 0
    for values in iter_boundaries(G.n, modulus):
        checked += 1
        nets = search.solve(values)
        if nets is None:
            return StrongResult(modulus, False, Boundary(modulus, values), checked, certs)
        if certs is not None:
            certs[values] = OrientationCertificate(modulus, nets)
    return StrongResult(modulus, True, None, checked, certs)


# -- contraction-extension ---------------------------------------------------


class ExtensionError(ValueError):
    """Extension failed; carries the residual boundary the subgraph missed."""

    def __init__(self, message: str, residual: Boundary | None = None):
        super().__init__(message)
        self.residual = residual


def contracted_boundary(G: mg.Multigraph, S: Sequence[int], beta: Boundary,
                        mapping: Sequence[int], n_new: int) -> Boundary:
    """Boundary induced on G/S: the merged vertex absorbs the sum over S."""
    m = beta.modulus
    values = [0] * n_new
    for v in range(G.n):
        values[mapping[v]] = (values[mapping[v]] + beta.values[v]) % m
    return Boundary(m, tuple(values))


def _split_merged_net(total: int, mults: Sequence[int]) -> list[int]:
    # distribute a merged net over the original classes, greedily from the top
    out = []
    rem_total = sum(mults)
    o = total
    for mu in mults:
        rem_total -= mu
        hi = min(mu, o + rem_total)
        lo = max(-mu, o - rem_total)
        if lo > hi:
            raise ValueError("merged net exceeds available multiplicity")
        out.append(hi)
        o -= hi
    if o != 0:
        raise ValueError("net distribution failed to balance")
    return out


def extend_orientation(
    G: mg.Multigraph,
    h_vertices: Sequence[int],
    h_classes: Mapping[Pair, int],
    cert_contracted: OrientationCertificate,
    beta: Boundary,
) -> OrientationCertificate:
    """Extend an orientation of G/S to a beta-orientation of G.

    ``h_vertices``/``h_classes`` describe a spanning-enough subgraph H on
    S (class multiplicities at most G's) that can absorb any residual
    boundary.  The contracted certificate is copied onto the classes
    outside S, classes inside S but not in H are oriented towards the
    larger endpoint, and H is solved for whatever residues remain.
    """
    m = beta.modulus
    if cert_contracted.modulus != m:
        raise ValueError("certificate and boundary moduli differ")
    S = sorted(set(h_vertices))
    if not S:
        raise ValueError("subgraph vertex set must be nonempty")
    inside = set(S)
    for (u, v), mult in h_classes.items():
        if u not in inside or v not in inside:
            raise ValueError(f"subgraph class {u}-{v} leaves the vertex set")
        if mult > G.mult(u, v):
            raise ValueError(f"subgraph class {u}-{v} exceeds multiplicity in G")
    GS, mapping = mg.contract(G, S)
    beta_contracted = contracted_boundary(G, S, beta, mapping, GS.n)
    if not verify_certificate(GS, beta_contracted, cert_contracted):
        raise ValueError("certificate does not achieve the contracted boundary")

    w = mapping[S[0]]
    nets: dict[Pair, int] = {}
    net_at = [0] * G.n

    def record(u: int, v: int, o: int) -> None:
        # o is the net directed u -> v
        k = mg._key(u, v)
        nets[k] = o if u < v else -o
        net_at[u] += o
        net_at[v] -= o

    # classes of G/S between two old outside vertices copy over unchanged;
    # classes at the merged vertex are split over the crossing G-classes
    for (a, b), _ in GS.items():
        o_ab = cert_contracted.nets[(a, b)]
        if a != w and b != w:
            inv_a = next(v for v in range(G.n) if mapping[v] == a)
            inv_b = next(v for v in range(G.n) if mapping[v] == b)
            record(inv_a, inv_b, o_ab if inv_a < inv_b else -o_ab)
            continue
        x = next(v for v in range(G.n) if v not in inside and mapping[v] == (b if a == w else a))
        crossing = sorted(
            (h, x) for h in S if G.mult(h, x) > 0
        )
        total_out_of_S = o_ab if a == w else -o_ab
        parts = _split_merged_net(total_out_of_S, [G.mult(h, x) for h, x in crossing])
        for (h, _), o in zip(crossing, parts):
            record(h, x, o)

    # leftover copies inside S beyond H get a fixed direction
    h_canon = {mg._key(u, v): mult for (u, v), mult in h_classes.items()}
    for (u, v), mult in G.items():
        if u in inside and v in inside:
            extra = mult - h_canon.get((u, v), 0)
            if extra < 0:
                raise ValueError("subgraph multiplicities exceed G")
            record(u, v, extra)

    H, _ = _h_graph(S, h_classes)
    residual = Boundary(m, tuple((beta.values[v] - net_at[v]) % m for v in S))
    sub = beta_orientation(H, residual)
    if isinstance(sub, Refutation):
        raise ExtensionError(
            "subgraph cannot absorb the residual boundary", residual
        )
    pos = {v: i for i, v in enumerate(S)}
    for (u, v), mult in h_canon.items():
        o = sub.nets[(pos[u], pos[v])]
        k = (u, v)
        nets[k] = nets.get(k, 0) + o
        net_at[u] += o
        net_at[v] -= o

    cert = OrientationCertificate(m, nets)
    if not verify_certificate(G, beta, cert):
        raise AssertionError("internal error: extended certificate failed verification")
    return cert


def _h_graph(S: Sequence[int], h_classes: Mapping[Pair, int]) -> tuple[mg.Multigraph, tuple[int, ...]]:
    pos = {v: i for i, v in enumerate(S)}
    classes = {}
    for (u, v), mult in h_classes.items():
        a, b = pos[u], pos[v]
        classes[mg._key(a, b)] = mult
    return mg.Multigraph(len(S), classes), tuple(S)


# -- flows -------------------------------------------------------------------


@dataclass
class ZFlow:
    """Nowhere-zero flow with values mod an odd modulus.

    ``values[(u, v, i)] = (value, direction)`` for copy i of class (u, v)
    with u < v; direction is "uv" or "vu" and the value lies in 1..m-1.
    """

    modulus: int
    values: dict[tuple[int, int, int], tuple[int, str]]


def orientation_to_zflow(G: mg.Multigraph, cert: OrientationCertificate) -> ZFlow:
    """Value p on every copy in certificate direction, m = 2p+1.

    Requires the certificate to realise the zero boundary: then at every
    vertex p*(out - in) = 0 mod m.
    """
    m = cert.modulus
    p = (m - 1) // 2
    if not verify_certificate(G, zero_boundary(G.n, m), cert):
        raise ValueError("certificate is not a modulo orientation of this graph")
    values: dict[tuple[int, int, int], tuple[int, str]] = {}
    for (u, v), mult in G.items():
        forward = cert.out_copies(u, v, mult)
        for i in range(mult):
            values[(u, v, i)] = (p, "uv" if i < forward else "vu")
    return ZFlow(m, values)


def verify_zflow(G: mg.Multigraph, flow: ZFlow) -> bool:
    """Nowhere-zero and conserved mod m at every vertex, copies all present."""
    m = flow.modulus
    expected = {(u, v, i) for (u, v), mult in G.items() for i in range(mult)}
    if set(flow.values) != expected:
        return False
    net = [0] * G.n
    for (u, v, _), (value, direction) in flow.values.items():
        if not 1 <= value <= m - 1:
            return False
        if direction not in ("uv", "vu"):
            return False
        src, dst = (u, v) if direction == "uv" else (v, u)
        net[src] += value
        net[dst] -= value
    return all(x % m == 0 for x in net)


def is_antisymmetric(flow: ZFlow) -> bool:
    """No two distinct edge copies carry values summing to 0 mod m."""
    m = flow.modulus
    counts: dict[int, int] = {}
    for value, _ in flow.values.values():
        counts[value] = counts.get(value, 0) + 1
    for value, cnt in counts.items():
        partner = (-value) % m
        if partner == value:
            if cnt >= 2:
                return False
        elif counts.get(partner, 0) > 0:
            return False
    return True


@dataclass
class IntegerFlow:
    """Integer circulation: per-copy direction and positive value."""

    a: int
    b: int
    values: dict[tuple[int, int, int], tuple[int, str]]


def find_circular_flow(
    G: mg.Multigraph, a: int, b: int, *, edge_cap: int = CIRCULAR_FLOW_EDGE_CAP
) -> IntegerFlow | FlowRefutation:
    """Exhaustive search for an integer flow with values in {+-b..+-(a-b)}.

    Oriented form: each copy gets a direction and a value in b..a-b with
    exact conservation at every vertex.  Within a parallel class the
    per-copy choices are forced non-decreasing, which removes the copy
    permutation symmetry without losing any solution.
    """
    if not (a >= 2 * b > 0):
        raise ValueError("need a >= 2b > 0")
    if G.size > edge_cap:
        raise CapExceeded(f"circular flow oracle capped at {edge_cap} edges (graph has {G.size})")

    copies: list[tuple[int, int, int]] = []
    for (u, v), mult in G.items():
        for i in range(mult):
            copies.append((u, v, i))
    vals = list(range(b, a - b + 1))
    # choice c encodes (direction, value): first the u->v values, then v->u
    choice_effects = [(val, +1) for val in vals] + [(val, -1) for val in vals]
    imbalance = [0] * G.n
    rem = G.degrees()
    top = a - b
    assignment: dict[tuple[int, int, int], tuple[int, str]] = {}

    def ok(v: int) -> bool:
        if rem[v] == 0:
            return imbalance[v] == 0
        return abs(imbalance[v]) <= top * rem[v]

    def dfs(i: int, min_choice: int) -> bool:
        if i == len(copies):
            return True
        u, v, idx = copies[i]
        rem[u] -= 1
        rem[v] -= 1
        start = min_choice if idx > 0 else 0
        for c in range(start, len(choice_effects)):
            val, sign = choice_effects[c]
            imbalance[u] += sign * val
            imbalance[v] -= sign * val
            if ok(u) and ok(v):
                assignment[(u, v, idx)] = (val, "uv" if sign > 0 else "vu")
                if dfs(i + 1, c):
                    imbalance[u] -= sign * val
                    imbalance[v] += sign * val
                    rem[u] += 1
                    rem[v] += 1
                    return True
            imbalance[u] -= sign * val
            imbalance[v] += sign * val
        rem[u] += 1
        rem[v] += 1
        return False

    if dfs(0, 0):
        return IntegerFlow(a, b, dict(assignment))
    space = 1
    for _, mult in G.items():
        # multisets of size mult over the per-copy choices
        space *= math.comb(mult + len(choice_effects) - 1, mult)
    return FlowRefutation(space)


def verify_circular_flow(G: mg.Multigraph, flow: IntegerFlow) -> bool:
    expected = {(u, v, i) for (u, v), mult in G.items() for i in range(mult)}
    if set(flow.values) != expected:
        return False
    net = [0] * G.n
    for (u, v, _), (value, direction) in flow.values.items():
        if not flow.b <= value <= flow.a - flow.b:
            return False
        src, dst = (u, v) if direction == "uv" else (v, u)
        net[src] += value
        net[dst] -= value
    return all(x == 0 for x in net)


# -- text formats --------------------------------------------------------------


def certificate_to_text(cert: OrientationCertificate) -> str:
    lines = [f"orient {cert.modulus}"]
    for (u, v), o in sorted(cert.nets.items()):
        lines.append(f"net {u} {v} {o}")
    return "\n".join(lines) + "\n"


def certificate_from_text(text: str) -> OrientationCertificate:
    modulus = None
    nets: dict[Pair, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "orient":
            if modulus is not None:
                raise ValueError(f"line {lineno}: repeated orient header")
            if len(fields) != 2:
                raise ValueError(f"line {lineno}: expected 'orient <modulus>'")
            modulus = int(fields[1])
            _check_modulus(modulus)
        elif fields[0] == "net":
            if modulus is None:
                raise ValueError(f"line {lineno}: net before orient header")
            if len(fields) != 4:
                raise ValueError(f"line {lineno}: expected 'net <u> <v> <o>'")
            u, v, o = int(fields[1]), int(fields[2]), int(fields[3])
            if not u < v:
                raise ValueError(f"line {lineno}: require u < v")
            if (u, v) in nets:
                raise ValueError(f"line {lineno}: duplicate net {u}-{v}")
            nets[(u, v)] = o
        else:
            raise ValueError(f"line {lineno}: unknown record {fields[0]!r}")
    if modulus is None:
        raise ValueError("missing orient header")
    return OrientationCertificate(modulus, nets)


def zflow_to_text(flow: ZFlow) -> str:
    lines = [f"flow {flow.modulus}"]
    for (u, v, i), (value, direction) in sorted(flow.values.items()):
        lines.append(f"val {u} {v} {i} {value} {direction}")
    return "\n".join(lines) + "\n"


def zflow_from_text(text: str) -> ZFlow:
    modulus = None
    values: dict[tuple[int, int, int], tuple[int, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "flow":
            if modulus is not None:
                raise ValueError(f"line {lineno}: repeated flow header")
            if len(fields) != 2:
                raise ValueError(f"line {lineno}: expected 'flow <modulus>'")
            modulus = int(fields[1])
            _check_modulus(modulus)
        elif fields[0] == "val":
            if modulus is None:
                raise ValueError(f"line {lineno}: val before flow header")
            if len(fields) != 6:
                raise ValueError(f"line {lineno}: expected 'val <u> <v> <copy> <value> <dir>'")
            u, v, i, value = (int(x) for x in fields[1:5])
            direction = fields[5]
            if direction not in ("uv", "vu"):
                raise ValueError(f"line {lineno}: direction must be uv or vu")
            key = (u, v, i)
            if key in values:
                raise ValueError(f"line {lineno}: duplicate copy {key}")
            values[key] = (value, direction)
        else:
            raise ValueError(f"line {lineno}: unknown record {fields[0]!r}")
    if modulus is None:
        raise ValueError("missing flow header")
    return ZFlow(modulus, values)
