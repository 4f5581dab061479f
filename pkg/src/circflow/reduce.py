"""Reduction engine: contractible catalogs, lifting reductions, solver.

The solver looks for an orientation whose vertex nets all vanish mod
2p+1.  Its pipeline, applied recursively:

1. small graphs are solved by the exhaustive net search;
2. otherwise, a subgraph matching a member of the verified
   strongly-connected catalog is contracted and the smaller instance is
   solved, after which the orientation is pulled back through the
   contraction (contract-extension);
3. otherwise, when a plane rotation is supplied, a pair of edges
   consecutive around some vertex of suitable degree is lifted if that
   keeps the odd edge-connectivity at the working threshold, and the
   solver recurses on the lifted graph (solutions route back through the
   lifted vertex; a refutation of the lifted graph proves nothing about
   the original, so that branch can only produce success or a refusal);
4. otherwise a direct search runs if the net-choice space fits under the
   size guard, and the solver refuses when it does not.

Refutations propagate soundly through step 2: any orientation of the
original graph induces one on the contraction, so an exhausted
contraction refutes the original as well.

Every reduction is recorded as a replayable :class:`ReductionStep`, and
every success is re-checked by the independent certificate verifier.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from . import multigraph as mg
from . import orient
from .guards import SOLVE_BASE_VERTICES, SOLVE_SEARCH_CAP

Pair = tuple[int, int]


# -- verified contraction catalog -------------------------------------------


def dense_four_vertex_family() -> list[mg.Multigraph]:
    """All 4-vertex multigraphs with 19 edges, max multiplicity 5 and
    minimum degree 8, up to isomorphism, in canonical order."""
    pairs = list(itertools.combinations(range(4), 2))
    seen: dict[tuple, mg.Multigraph] = {}
    for mults in itertools.product(range(6), repeat=6):
        if sum(mults) != 19:
            continue
        deg = [0, 0, 0, 0]
        for (u, v), m in zip(pairs, mults):
            deg[u] += m
            deg[v] += m
        if min(deg) < 8:
            continue
        G = mg.Multigraph(4, {p: m for p, m in zip(pairs, mults) if m})
        key = mg.canonical_form(G)
        if key not in seen:
            seen[key] = G
    return [seen[k] for k in sorted(seen)]


@dataclass
class CatalogEntry:
    label: mg.CatalogLabel
    graph: mg.Multigraph
    strong: orient.StrongResult


_CATALOG_CACHE: dict[int, list[CatalogEntry]] = {}

_NAMED_MEMBERS = {
    5: ["4K2", "T2,3,3", "2K4", "3C4"],
    7: ["6K2", "3K4+", "T2,5,5", "T3,4,5", "T4,4,4", "5C4="],
}


def strong_catalog(modulus: int) -> list[CatalogEntry]:
    """The verified strongly-connected catalog for modulus 5 or 7.

    Members are certified by the all-boundaries check on first use and
    cached with their certificate sets.  At modulus 7 the list also
    carries every 4-vertex graph with 19 edges, multiplicity at most 5
    and minimum degree at least 8 (deduplicated against the named
    members).
    """
    if modulus not in _NAMED_MEMBERS:
        raise ValueError(f"no catalog at modulus {modulus} (expected 5 or 7)")
    if modulus in _CATALOG_CACHE:
        return _CATALOG_CACHE[modulus]
    entries: list[CatalogEntry] = []
    seen_forms: set[tuple] = set()
    graphs: list[tuple[mg.CatalogLabel, mg.Multigraph]] = []
    for name in _NAMED_MEMBERS[modulus]:
        label = mg.parse_label(name)
        graphs.append((label, mg.build_catalog(label)))
    if modulus == 7:
        for idx, G in enumerate(dense_four_vertex_family()):
            label = mg.catalog_match(G) or mg.CatalogLabel("dense4", (idx,))
            graphs.append((label, G))
    for label, G in graphs:
        form = mg.canonical_form(G)
        if form in seen_forms:
            continue
        seen_forms.add(form)
        strong = orient.strongly_connected(G, modulus, collect=True)
        if not strong.is_strong:
            raise RuntimeError(
                f"catalog member {label} failed certification at modulus {modulus}: "
                f"witness {strong.witness}"
            )
        entries.append(CatalogEntry(label, G, strong))
    _CATALOG_CACHE[modulus] = entries
    return entries


# -- subgraph embedding ------------------------------------------------------


def _embedding_order(pattern: mg.Multigraph) -> list[int]:
    # place high-degree vertices first, then grow along pattern classes
    order = [max(range(pattern.n), key=lambda v: (pattern.degree(v), -v))]
    placed = set(order)
    while len(order) < pattern.n:
        nxt = max(
            (v for v in range(pattern.n) if v not in placed),
            key=lambda v: (sum(pattern.mult(v, u) for u in placed), pattern.degree(v), -v),
        )
        order.append(nxt)
        placed.add(nxt)
    return order


def _embeddings(
    G: mg.Multigraph, pattern: mg.Multigraph, *, image: Sequence[int] | None = None
) -> Iterator[dict[int, int]]:
    """Injective maps pattern -> G with every class multiplicity covered.

    ``image`` restricts the map to a fixed vertex subset (used when a
    reduction names its contraction target).  Candidate images are tried
    in ascending vertex order, so the first embedding is canonical.
    """
    order = _embedding_order(pattern)
    pool = sorted(image) if image is not None else list(range(G.n))
    if len(pool) < pattern.n:
        return
    assign: dict[int, int] = {}
    used: set[int] = set()

    def rec(i: int) -> Iterator[dict[int, int]]:
        if i == pattern.n:
            yield dict(assign)
            return
        pv = order[i]
        needs = [(assign[q], pattern.mult(pv, q)) for q in order[:i] if pattern.mult(pv, q) > 0]
        for g in pool:
            if g in used:
                continue
            if any(G.mult(g, gq) < need for gq, need in needs):
                continue
            assign[pv] = g
            used.add(g)
            yield from rec(i + 1)
            used.remove(g)
            del assign[pv]

    yield from rec(0)


@dataclass
class SubgraphHit:
    """A catalog pattern found inside a graph, mapped to G coordinates."""

    vertices: tuple[int, ...]
    label: mg.CatalogLabel
    classes: dict[Pair, int]


def _hit_from_assignment(pattern: mg.Multigraph, label: mg.CatalogLabel,
                         assignment: Mapping[int, int]) -> SubgraphHit:
    classes: dict[Pair, int] = {}
    for (u, v), mult in pattern.items():
        a, b = assignment[u], assignment[v]
        classes[mg._key(a, b)] = mult
    return SubgraphHit(tuple(sorted(assignment.values())), label, classes)


def find_strong_subgraph(G: mg.Multigraph, modulus: int) -> SubgraphHit | None:
    """First catalog member embedded in G (catalog order, then vertex order)."""
    for entry in strong_catalog(modulus):
        if entry.graph.n > G.n:
            continue
        for assignment in _embeddings(G, entry.graph):
            return _hit_from_assignment(entry.graph, entry.label, assignment)
    return None


# -- forbidden configurations -------------------------------------------------


@dataclass(frozen=True)
class ConfigReport:
    """One occurrence of a forbidden configuration."""

    rule: str
    label: str
    vertices: tuple[int, ...]


def _forbidden_patterns(mode: str) -> list[tuple[str, mg.CatalogLabel]]:
    if mode == "z5":
        return [
            ("F5-1", mg.CatalogLabel("T", (1, 1, 3))),
            ("F5-2", mg.CatalogLabel("3C4_o")),
            ("F5-3", mg.CatalogLabel("T233_oo")),
        ]
    if mode == "z7":
        return [
            ("F7-1", mg.CatalogLabel("T", (1, 1, 5))),
            ("F7-2", mg.CatalogLabel("T115_o")),
            ("F7-3", mg.CatalogLabel("T115_dot")),
            ("F7-4", mg.CatalogLabel("T", (2, 2, 4))),
            ("F7-5", mg.CatalogLabel("5C4=_oo")),
            ("F7-6", mg.CatalogLabel("5C4=_oo_id")),
            ("F7-7", mg.CatalogLabel("T444_ooo")),
        ]
    raise ValueError(f"mode must be 'z5' or 'z7', got {mode!r}")


def forbidden_scan(G: mg.Multigraph, mode: str) -> list[ConfigReport]:
    """Every containment of a mode-appropriate forbidden configuration.

    Containment means an injective vertex map under which every pattern
    class has at least its multiplicity in G.  Occurrences are reported
    once per (rule, vertex set).
    """
    reports: list[ConfigReport] = []
    for rule, label in _forbidden_patterns(mode):
        pattern = mg.build_catalog(label)
        if pattern.n > G.n:
            continue
        found: set[tuple[int, ...]] = set()
        for assignment in _embeddings(G, pattern):
            verts = tuple(sorted(assignment.values()))
            if verts not in found:
                found.add(verts)
                reports.append(ConfigReport(rule, str(label), verts))
    return reports


# -- reduction steps ----------------------------------------------------------


@dataclass
class ReductionStep:
    """One replayable transformation applied by a reduction.

    ``kind`` is one of contract-strong-subgraph, lift-first-type,
    lift-second-type, split-lift, exhaustive-base.  ``before``/``after``
    are the graphs around the step; replaying the recorded parameters on
    ``before`` reproduces ``after``.
    """

    kind: str
    before: mg.Multigraph
    after: mg.Multigraph
    vertices: tuple[int, ...] = ()
    label: str = ""
    pattern: dict[Pair, int] = field(default_factory=dict)
    lifts: tuple[tuple[int, int, int], ...] = ()
    oriented: tuple[tuple[int, int], ...] = ()
    deleted_vertex: int | None = None
    note: str = ""

    def to_line(self) -> str:
        bits = [self.kind, f"n={self.before.n}->{self.after.n}",
                f"m={self.before.size}->{self.after.size}"]
        if self.vertices:
            bits.append("target=" + ",".join(map(str, self.vertices)))
        if self.label:
            bits.append(f"label={self.label}")
        if self.lifts:
            bits.append("lifts=" + ";".join(f"{v}:{w1}:{w2}" for v, w1, w2 in self.lifts))
        if self.oriented:
            bits.append("oriented=" + ";".join(f"{w}:{s:+d}" for w, s in self.oriented))
        if self.deleted_vertex is not None:
            bits.append(f"deleted={self.deleted_vertex}")
        if self.note:
            bits.append(f"note={self.note}")
        return " ".join(bits)


def _net_add(nets: dict[Pair, int], u: int, v: int, delta: int) -> None:
    # delta copies directed u -> v
    k = mg._key(u, v)
    nets[k] = nets.get(k, 0) + (delta if u < v else -delta)


def _unlift_certificate(
    after: mg.Multigraph, cert: orient.OrientationCertificate, v: int, w1: int, w2: int
) -> orient.OrientationCertificate:
    """Reverse one lift: route one w1-w2 copy back through v."""
    nets = dict(cert.nets)
    k = mg._key(w1, w2)
    mult = after.mult(w1, w2)
    o = cert.net(w1, w2)
    d = 1 if (mult + o) // 2 >= 1 else -1
    _net_add(nets, w1, w2, -d)
    if mult - 1 == 0:
        if nets.get(k, 0) != 0:
            raise AssertionError("internal error: net left on a vanishing class")
        nets.pop(k, None)
    _net_add(nets, w1, v, d)
    _net_add(nets, v, w2, d)
    return orient.OrientationCertificate(cert.modulus, nets)


def lift_first_type(
    G: mg.Multigraph,
    lifts: Sequence[tuple[int, int, int]],
    target: Sequence[int],
    modulus: int,
) -> ReductionStep:
    """Lift the listed pairs, then contract a catalog subgraph on target.

    Each lift (v, w1, w2) requires the class w1-w2 to exist already at
    lift time; that keeps plane graphs plane.  After all lifts, the
    target set must carry a strong-catalog member spanning it.
    """
    work = G
    for v, w1, w2 in lifts:
        if work.mult(w1, w2) < 1:
            raise ValueError(
                f"lift {v}:{w1}:{w2} requires an existing {w1}-{w2} edge"
            )
        work = mg.lift(work, v, w1, w2)
    tgt = tuple(sorted(set(target)))
    hit = None
    for entry in strong_catalog(modulus):
        if entry.graph.n != len(tgt):
            continue
        for assignment in _embeddings(work, entry.graph, image=tgt):
            hit = _hit_from_assignment(entry.graph, entry.label, assignment)
            break
        if hit:
            break
    if hit is None:
        raise ValueError("target set carries no strong-catalog member after lifting")
    after, _ = mg.contract(work, tgt)
    return ReductionStep(
        kind="lift-first-type",
        before=G,
        after=after,
        vertices=tgt,
        label=str(hit.label),
        pattern=hit.classes,
        lifts=tuple(lifts),
    )


def pullback_first_type(
    step: ReductionStep, cert_after: orient.OrientationCertificate, beta: orient.Boundary
) -> orient.OrientationCertificate:
    """Pull an orientation of the reduced graph back through a first-type step."""
    lifted = step.before
    for v, w1, w2 in step.lifts:
        lifted = mg.lift(lifted, v, w1, w2)
    cert = orient.extend_orientation(lifted, step.vertices, step.pattern, cert_after, beta)
    work = lifted
    for v, w1, w2 in reversed(step.lifts):
        cert = _unlift_certificate(work, cert, v, w1, w2)
        # rebuild the pre-lift graph for the next unlift
        classes = work.classes
        k = mg._key(w1, w2)
        classes[k] -= 1
        if classes[k] == 0:
            del classes[k]
        for pair in (mg._key(w1, v), mg._key(v, w2)):
            classes[pair] = classes.get(pair, 0) + 1
        work = mg.Multigraph(work.n, classes)
    if not orient.verify_certificate(step.before, beta, cert):
        raise AssertionError("internal error: first-type pullback failed verification")
    return cert


def lift_second_type(
    G: mg.Multigraph,
    beta: orient.Boundary,
    v: int,
    oriented: Sequence[tuple[int, int]],
    lifts: Sequence[tuple[int, int]],
) -> tuple[mg.Multigraph, orient.Boundary, ReductionStep]:
    """Fix the boundary at v by orienting part of its edges, then delete v.

    ``oriented`` lists (w, sign) per fixed copy, sign +1 for v->w.  The
    remaining copies at v are lifted in the listed (w1, w2) pairs.  All
    copies at v must be covered, and the oriented net must equal beta(v)
    mod m.  Any orientation of the result achieving the adjusted
    boundary pulls back to one of G achieving beta.
    """
    m = beta.modulus
    if not 0 <= v < G.n:
        raise ValueError("vertex out of range")
    use: dict[int, int] = {}
    for w, sign in oriented:
        if sign not in (1, -1):
            raise ValueError("oriented entries need sign +1 or -1")
        use[w] = use.get(w, 0) + 1
    for w1, w2 in lifts:
        if w1 == w2:
            raise ValueError("lift endpoints must differ")
        use[w1] = use.get(w1, 0) + 1
        use[w2] = use.get(w2, 0) + 1
    for w, cnt in use.items():
        if cnt > G.mult(v, w):
            raise ValueError(f"{cnt} copies of {v}-{w} used but only {G.mult(v, w)} exist")
    if sum(use.values()) != G.degree(v):
        raise ValueError("oriented plus lifted copies must cover every edge at v")
    net = sum(sign for _, sign in oriented)
    if net % m != beta.values[v] % m:
        raise ValueError("oriented net does not meet the boundary value at v")

    classes: dict[Pair, int] = {}

    def old_to_new(x: int) -> int:
        return x if x < v else x - 1

    for (a, b), mult in G.items():
        if v in (a, b):
            continue
        classes[mg._key(old_to_new(a), old_to_new(b))] = mult
    for w1, w2 in lifts:
        k = mg._key(old_to_new(w1), old_to_new(w2))
        classes[k] = classes.get(k, 0) + 1
    after = mg.Multigraph(G.n - 1, classes)

    values = [0] * (G.n - 1)
    for x in range(G.n):
        if x != v:
            values[old_to_new(x)] = beta.values[x]
    for w, sign in oriented:
        # a copy fixed v->w sinks one unit at w, so the rest must supply one more
        values[old_to_new(w)] = (values[old_to_new(w)] + sign) % m
    beta_after = orient.Boundary(m, tuple(values))

    step = ReductionStep(
        kind="lift-second-type",
        before=G,
        after=after,
        lifts=tuple((v, w1, w2) for w1, w2 in lifts),
        oriented=tuple(oriented),
        deleted_vertex=v,
    )
    return after, beta_after, step


def pullback_second_type(
    step: ReductionStep, cert_after: orient.OrientationCertificate, beta: orient.Boundary
) -> orient.OrientationCertificate:
    """Pull an orientation back through a second-type step."""
    v = step.deleted_vertex
    assert v is not None
    m = cert_after.modulus

    def new_to_old(x: int) -> int:
        return x if x < v else x + 1

    nets: dict[Pair, int] = {}
    for (a, b), o in cert_after.nets.items():
        nets[mg._key(new_to_old(a), new_to_old(b))] = o

    # peel the lifted copies off in reverse, rebuilding intermediate graphs
    work_classes: dict[Pair, int] = {}
    for (a, b), mult in step.after.items():
        work_classes[mg._key(new_to_old(a), new_to_old(b))] = mult
    work = mg.Multigraph(step.before.n, work_classes)
    cert = orient.OrientationCertificate(m, nets)
    for lv, w1, w2 in reversed(step.lifts):
        cert = _unlift_certificate(work, cert, lv, w1, w2)
        classes = work.classes
        k = mg._key(w1, w2)
        classes[k] -= 1
        if classes[k] == 0:
            del classes[k]
        for pair in (mg._key(w1, lv), mg._key(lv, w2)):
            classes[pair] = classes.get(pair, 0) + 1
        work = mg.Multigraph(work.n, classes)

    nets = dict(cert.nets)
    for w, sign in step.oriented:
        _net_add(nets, v, w, sign)
    cert = orient.OrientationCertificate(m, nets)
    if not orient.verify_certificate(step.before, beta, cert):
        raise AssertionError("internal error: second-type pullback failed verification")
    return cert


# -- the solver ---------------------------------------------------------------


@dataclass
class SolveResult:
    """Outcome of the recursive pipeline with its replayable trace."""

    status: str  # "orientation" | "refuted" | "refused"
    certificate: orient.OrientationCertificate | None
    refutation: orient.Refutation | None
    steps: tuple[ReductionStep, ...]
    reason: str = ""
    anomalies: tuple[str, ...] = ()


def _search_space(G: mg.Multigraph) -> int:
    space = 1
    for _, mult in G.items():
        space *= mult + 1
    return space


def _rotation_lift_candidates(G, rotation, threshold: int):
    """Consecutive rotation pairs at vertices of degree outside {2, threshold}
    whose lift keeps the odd edge-connectivity at or above the threshold."""
    for v in range(G.n):
        d = G.degree(v)
        if d in (2, threshold) or d == 0:
            continue
        darts = rotation.rotation(v)
        k = len(darts)
        for i in range(k):
            (w1, c1) = darts[i]
            (w2, c2) = darts[(i + 1) % k]
            if w1 == w2:
                continue
            lifted = mg.lift(G, v, w1, w2)
            if mg.odd_edge_connectivity(lifted) >= threshold:
                yield v, i, (w1, c1), (w2, c2), lifted


def solve_planar(
    G: mg.Multigraph,
    p: int,
    *,
    rotation=None,
    base_n: int = SOLVE_BASE_VERTICES,
    search_cap: int = SOLVE_SEARCH_CAP,
) -> SolveResult:
    """Recursive pipeline for orientations with all nets 0 mod 2p+1.

    The caller asserts planarity; a rotation system, when given, is only
    used to search for connectivity-preserving consecutive lifts.  The
    result is exactly one of: a verified certificate, a refutation
    backed by exhausted searches, or a refusal when the guards blocked a
    verdict.
    """
    if p not in (2, 3):
        raise ValueError("solver supports p in {2, 3}")
    m = 2 * p + 1
    threshold = 2 * m + 1  # odd edge-connectivity target for splitting lifts
    steps: list[ReductionStep] = []
    anomalies: list[str] = []

    def rec(H: mg.Multigraph, rot) -> tuple[str, object]:
        if H.n <= base_n:
            res = orient.mod_orientation(H, p)
            steps.append(
                ReductionStep("exhaustive-base", H, H, note=f"space={_search_space(H)}")
            )
            if isinstance(res, orient.Refutation):
                return "refuted", res
            return "orientation", res
        hit = find_strong_subgraph(H, m)
        if hit is not None:
            after, _ = mg.contract(H, hit.vertices)
            steps.append(
                ReductionStep(
                    "contract-strong-subgraph",
                    H,
                    after,
                    vertices=hit.vertices,
                    label=str(hit.label),
                    pattern=hit.classes,
                )
            )
            status, payload = rec(after, None)
            if status != "orientation":
                return status, payload
            cert = orient.extend_orientation(
                H, hit.vertices, hit.classes, payload, orient.zero_boundary(H.n, m)
            )
            return "orientation", cert
        if rot is not None and mg.odd_edge_connectivity(H) >= threshold:
            eligible = [v for v in range(H.n) if H.degree(v) not in (0, 2, threshold)]
            took = False
            for v, i, (w1, c1), (w2, c2), lifted in _rotation_lift_candidates(H, rot, threshold):
                rot2 = rot.after_lift(v, i)
                steps.append(
                    ReductionStep(
                        "split-lift",
                        H,
                        lifted,
                        lifts=((v, w1, w2),),
                        note=f"rotation-slot={i}",
                    )
                )
                took = True
                status, payload = rec(lifted, rot2)
                if status == "orientation":
                    cert = _unlift_certificate(lifted, payload, v, w1, w2)
                    if not orient.verify_certificate(
                        H, orient.zero_boundary(H.n, m), cert
                    ):
                        raise AssertionError("internal error: split-lift pullback failed")
                    return "orientation", cert
                if status == "refuted":
                    # a lift is one-directional: the original stays open
                    return (
                        "refused",
                        "lifted graph was refuted; no conclusion for the original",
                    )
                return status, payload
            if eligible and not took:
                anomalies.append(
                    f"no consecutive lift at eligible vertices {eligible} preserves "
                    f"odd-{threshold}-edge-connectivity"
                )
        space = _search_space(H)
        if space <= search_cap:
            res = orient.mod_orientation(H, p)
            steps.append(ReductionStep("exhaustive-base", H, H, note=f"space={space}"))
            if isinstance(res, orient.Refutation):
                return "refuted", res
            return "orientation", res
        return "refused", f"net-choice space {space} exceeds guard {search_cap}"

    status, payload = rec(G, rotation)
    if status == "orientation":
        cert = payload
        if not orient.verify_certificate(G, orient.zero_boundary(G.n, m), cert):
            raise AssertionError("internal error: final certificate failed verification")
        return SolveResult("orientation", cert, None, tuple(steps), anomalies=tuple(anomalies))
    if status == "refuted":
        return SolveResult("refuted", None, payload, tuple(steps), anomalies=tuple(anomalies))
    return SolveResult("refused", None, None, tuple(steps), reason=str(payload),
                       anomalies=tuple(anomalies))
