"""Plane embeddings, face tracing, strings, and charge accounting.

An embedding is a rotation system: a clockwise cyclic order of edge
copies around each vertex, with the copies of one parallel class
embedded consecutively at both endpoints.  Faces are traced by the
standard rule (the dart following u->v is the successor, in the
rotation at v, of the reverse dart v->u), and the trace is accepted only
when Euler's relation n - m + f = 2 holds for the connected graph.

A maximal chain of 2-faces is a *string*; it lives inside one parallel
class and its two boundary edges touch faces of length at least 3.  Two
long faces are weakly adjacent once per shared edge and once per string
joining them, and a k-face is profiled by the chain lengths behind its k
boundary edges (length 1 for an edge with a long face directly behind
it).

Charges start at the face length and move by local rules, in rule order
with each rule acting simultaneously from the pre-rule state.  All
amounts are exact fractions; the ledger records every transfer and the
totals are asserted conserved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import multigraph as mg
from . import weights

Pair = tuple[int, int]
CopyRef = tuple[int, int, int]  # (u, v, copy) with u < v
Dart = tuple[int, int]  # (vertex, slot in its rotation)


class InvalidEmbedding(ValueError):
    """The rotation data does not describe a plane embedding."""


class PreconditionError(ValueError):
    """A stated precondition of the requested check does not hold."""


class RotationSystem:
    """Clockwise cyclic edge-copy orders per vertex.

    ``rotations[v]`` is a sequence of ``(neighbor, copy_index)`` pairs.
    Strict construction enforces that every copy appears exactly once at
    each endpoint and that parallel copies are consecutive; reductions
    that lift edges internally may relax the consecutive rule.
    """

    __slots__ = ("graph", "_rot")

    def __init__(self, graph: mg.Multigraph, rotations: Sequence[Sequence[tuple[int, int]]],
                 *, strict: bool = True):
        if len(rotations) != graph.n:
            raise InvalidEmbedding("rotation count does not match vertex count")
        rot = tuple(tuple((int(w), int(c)) for w, c in r) for r in rotations)
        for v in range(graph.n):
            expected = sorted(
                (w, c)
                for w in range(graph.n)
                if graph.mult(v, w) > 0
                for c in range(graph.mult(v, w))
            )
            if sorted(rot[v]) != expected:
                raise InvalidEmbedding(f"rotation at vertex {v} does not list each copy once")
            if strict:
                k = len(rot[v])
                for w in set(x for x, _ in rot[v]):
                    slots = sorted(i for i, (x, _) in enumerate(rot[v]) if x == w)
                    if len(slots) <= 1 or len(slots) == k:
                        continue
                    if not _is_cyclic_arc(slots, k):
                        raise InvalidEmbedding(
                            f"parallel copies of {v}-{w} are not consecutive at {v}"
                        )
        self.graph = graph
        self._rot = rot

    def rotation(self, v: int) -> tuple[tuple[int, int], ...]:
        return self._rot[v]

    def after_lift(self, v: int, slot: int) -> "RotationSystem":
        """Rotation of the graph after lifting the consecutive pair at slot.

        The pair is (rotation[v][slot], rotation[v][slot+1]); the new
        edge takes over the rotation positions the old copies held at
        their far endpoints, which keeps the embedding plane.
        """
        darts = self._rot[v]
        k = len(darts)
        if k < 2:
            raise ValueError("vertex has no pair to lift")
        w1, c1 = darts[slot]
        w2, c2 = darts[(slot + 1) % k]
        if w1 == w2:
            raise ValueError("consecutive pair lies in one class; lifting would loop")
        G = self.graph
        new_idx = G.mult(w1, w2)
        lifted = mg.lift(G, v, w1, w2)

        def fix(x: int, y: int, c: int) -> int:
            if {x, y} == {v, w1} and c > c1:
                return c - 1
            if {x, y} == {v, w2} and c > c2:
                return c - 1
            return c

        new_rot: list[list[tuple[int, int]]] = []
        drop = {slot, (slot + 1) % k}
        for x in range(G.n):
            row: list[tuple[int, int]] = []
            for i, (y, c) in enumerate(self._rot[x]):
                if x == v and i in drop:
                    continue
                if x == w1 and y == v and c == c1:
                    row.append((w2, new_idx))
                elif x == w2 and y == v and c == c2:
                    row.append((w1, new_idx))
                else:
                    row.append((y, fix(x, y, c)))
            new_rot.append(row)
        return RotationSystem(lifted, new_rot, strict=False)


def _is_cyclic_arc(slots: list[int], k: int) -> bool:
    # positions form one run modulo k
    present = set(slots)
    runs = sum(1 for s in slots if (s - 1) % k not in present)
    return runs == 1


def rotation_from_neighbor_order(
    G: mg.Multigraph, orders: Sequence[Sequence[int]]
) -> RotationSystem:
    """Expand per-vertex neighbor orders into copy-level rotations.

    Copies of a class run ascending at the smaller endpoint and
    descending at the larger, which makes the copy-to-copy faces close
    into 2-faces under the tracing rule.
    """
    rotations = []
    for v, order in enumerate(orders):
        row: list[tuple[int, int]] = []
        for w in order:
            mu = G.mult(v, w)
            if mu == 0:
                raise ValueError(f"order at {v} names non-neighbor {w}")
            rng = range(mu) if v < w else range(mu - 1, -1, -1)
            row.extend((w, c) for c in rng)
        rotations.append(row)
    return RotationSystem(G, rotations)


@dataclass
class Face:
    """A traced face: its darts in order and its length."""

    id: int
    darts: tuple[tuple[int, int, int], ...]  # (tail, head, copy)

    @property
    def length(self) -> int:
        return len(self.darts)

    def copies(self) -> list[CopyRef]:
        return [(min(a, b), max(a, b), c) for a, b, c in self.darts]


def trace_faces(R: RotationSystem) -> list[Face]:
    """All faces of the embedding; raises InvalidEmbedding on Euler failure."""
    G = R.graph
    if G.n == 0 or (G.n > 1 and not mg.is_connected(G)):
        raise InvalidEmbedding("face tracing requires a connected graph")
    slot_of: list[dict[tuple[int, int], int]] = []
    for v in range(G.n):
        slot_of.append({wc: i for i, wc in enumerate(R.rotation(v))})

    def next_dart(d: Dart) -> Dart:
        v, i = d
        w, c = R.rotation(v)[i]
        rev = slot_of[w][(v, c)]
        return (w, (rev + 1) % len(R.rotation(w)))

    seen: set[Dart] = set()
    faces: list[Face] = []
    for v in range(G.n):
        for i in range(len(R.rotation(v))):
            start = (v, i)
            if start in seen:
                continue
            walk: list[tuple[int, int, int]] = []
            d = start
            while d not in seen:
                seen.add(d)
                x, j = d
                y, c = R.rotation(x)[j]
                walk.append((x, y, c))
                d = next_dart(d)
            faces.append(Face(len(faces), tuple(walk)))
    if G.n - G.size + len(faces) != 2:
        raise InvalidEmbedding(
            f"Euler check failed: {G.n} - {G.size} + {len(faces)} != 2"
        )
    return faces


@dataclass
class StringRecord:
    """Maximal chain of 2-faces; ``ends`` are its flanking long faces."""

    id: int
    face_ids: tuple[int, ...]
    ends: tuple[int, int] | None  # None for a closed chain with no long face
    boundary_copies: tuple[CopyRef, CopyRef] | None

    @property
    def chain_length(self) -> int:
        # one more than the number of 2-faces, so a single parallel copy
        # behind an edge gives that edge length 2
        return len(self.face_ids) + 1


@dataclass
class Link:
    """One unit of weak adjacency between two long faces."""

    a: int
    b: int
    kind: str  # "edge" | "string"
    mult: int  # multiplicity of the parallel class carrying the link
    ref: int  # copy ordinal or string id


@dataclass
class FaceStructure:
    faces: list[Face]
    strings: list[StringRecord]
    links: list[Link]
    profiles: dict[int, tuple[int, ...]]  # long-face id -> sorted chain lengths
    string_of_face: dict[int, int]  # 2-face id -> string id


def analyze_faces(R: RotationSystem) -> FaceStructure:
    """Faces plus strings, weak-adjacency links, and face profiles."""
    faces = trace_faces(R)
    face_of_dart: dict[tuple[int, int, int], int] = {}
    for f in faces:
        for d in f.darts:
            face_of_dart[d] = f.id
    sides: dict[CopyRef, list[int]] = {}
    for f in faces:
        for a, b, c in f.darts:
            key = (min(a, b), max(a, b), c)
            sides.setdefault(key, []).append(f.id)
    for key, fs in sides.items():
        if len(fs) != 2:
            raise InvalidEmbedding(f"copy {key} does not separate two face sides")

    is_two = {f.id: f.length == 2 for f in faces}
    copies_of_face: dict[int, list[CopyRef]] = {
        f.id: sorted(set(f.copies())) for f in faces
    }

    string_of_face: dict[int, int] = {}
    strings: list[StringRecord] = []

    def other_side(copy: CopyRef, fid: int) -> int:
        a, b = sides[copy]
        if a == fid and b == fid:
            return fid
        return b if a == fid else a

    # open strings first: walk inward from every long-face boundary
    for copy in sorted(sides):
        f1, f2 = sides[copy]
        starts = []
        if not is_two[f1] and is_two[f2]:
            starts.append((f1, f2))
        elif not is_two[f2] and is_two[f1]:
            starts.append((f2, f1))
        for start_long, first_two in starts:
            if first_two in string_of_face:
                continue
            chain = []
            entry = copy
            cur = first_two
            while True:
                chain.append(cur)
                cs = copies_of_face[cur]
                nxt_copy = cs[0] if len(cs) == 1 else (cs[1] if cs[0] == entry else cs[0])
                nf = other_side(nxt_copy, cur)
                if not is_two[nf]:
                    rec = StringRecord(
                        len(strings), tuple(chain), (start_long, nf), (copy, nxt_copy)
                    )
                    strings.append(rec)
                    for fid in chain:
                        string_of_face[fid] = rec.id
                    break
                entry, cur = nxt_copy, nf

    # leftover 2-faces sit on closed chains with no long face anywhere
    for f in faces:
        if f.length != 2 or f.id in string_of_face:
            continue
        chain = []
        cur = f.id
        entry = None
        while cur not in string_of_face:
            string_of_face[cur] = len(strings)
            chain.append(cur)
            cs = copies_of_face[cur]
            nxt_copy = cs[0] if len(cs) == 1 else (cs[1] if cs[0] == entry else cs[0])
            nf = other_side(nxt_copy, cur)
            entry, cur = nxt_copy, nf
        strings.append(StringRecord(len(strings), tuple(chain), None, None))

    G = R.graph
    links: list[Link] = []
    for ordinal, copy in enumerate(sorted(sides)):
        f1, f2 = sides[copy]
        if not is_two[f1] and not is_two[f2]:
            links.append(Link(f1, f2, "edge", G.mult(copy[0], copy[1]), ordinal))
    for rec in strings:
        if rec.ends is not None:
            assert rec.boundary_copies is not None
            e = rec.boundary_copies[0]
            links.append(Link(rec.ends[0], rec.ends[1], "string", G.mult(e[0], e[1]), rec.id))

    profiles: dict[int, tuple[int, ...]] = {}
    for f in faces:
        if f.length == 2:
            continue
        ts = []
        for a, b, c in f.darts:
            copy = (min(a, b), max(a, b), c)
            g = other_side(copy, f.id)
            if g != f.id and is_two[g]:
                ts.append(strings[string_of_face[g]].chain_length)
            else:
                ts.append(1)
        profiles[f.id] = tuple(sorted(ts, reverse=True))
    return FaceStructure(faces, strings, links, profiles, string_of_face)


# -- discharging ---------------------------------------------------------------


@dataclass
class Transfer:
    rule: str
    source: int
    sink: int
    amount: Fraction


@dataclass
class ChargeLedger:
    """Exact per-face charges with the full transfer log."""

    initial: dict[int, Fraction]
    transfers: list[Transfer] = field(default_factory=list)

    def final(self) -> dict[int, Fraction]:
        out = dict(self.initial)
        for t in self.transfers:
            out[t.source] -= t.amount
            out[t.sink] += t.amount
        return out


@dataclass
class DischargeReport:
    ruleset: str
    structure: FaceStructure
    ledger: ChargeLedger
    target: Fraction
    min_charge: Fraction
    offenders: tuple[int, ...]  # faces finishing below the target


_RULESETS = {"z5": Fraction(22, 9), "z7": Fraction(34, 15)}


def discharge(R: RotationSystem, ruleset: str) -> DischargeReport:
    """Apply the three-rule charge redistribution and report final charges.

    Rules run in order, each as a simultaneous pass over the pre-rule
    state.  Negative or below-target final charges are reported, never
    raised: the caller decides what a deficit means.
    """
    if ruleset not in _RULESETS:
        raise ValueError(f"ruleset must be 'z5' or 'z7', got {ruleset!r}")
    target = _RULESETS[ruleset]
    S = analyze_faces(R)
    ledger = ChargeLedger({f.id: Fraction(f.length) for f in S.faces})
    length = {f.id: f.length for f in S.faces}

    def profile(fid: int) -> tuple[int, ...]:
        return S.profiles.get(fid, ())

    # rule 1: every 2-face draws from the long faces at its string ends
    r1 = Fraction(2, 9) if ruleset == "z5" else Fraction(2, 15)
    for rec in S.strings:
        if rec.ends is None:
            continue
        for g in rec.face_ids:
            for end in rec.ends:
                ledger.transfers.append(Transfer("R1", end, g, r1))

    if ruleset == "z5":
        # rule 2: (2,2,2)-faces draw 1/9 per link from 4+-faces and (2,1,1)-faces
        for link in S.links:
            for recv, give in ((link.a, link.b), (link.b, link.a)):
                if recv == give:
                    continue
                if length[recv] == 3 and profile(recv) == (2, 2, 2):
                    if length[give] >= 4 or (length[give] == 3 and profile(give) == (2, 1, 1)):
                        ledger.transfers.append(Transfer("R2", give, recv, Fraction(1, 9)))
        # rule 3: (2,2,2)-faces draw 1/18 per link from (2,2,1)-faces
        for link in S.links:
            for recv, give in ((link.a, link.b), (link.b, link.a)):
                if recv == give:
                    continue
                if length[recv] == 3 and profile(recv) == (2, 2, 2):
                    if length[give] == 3 and profile(give) == (2, 2, 1):
                        ledger.transfers.append(Transfer("R3", give, recv, Fraction(1, 18)))
    else:
        # rule 2: 3-faces draw from 4+-faces, less across multiplicity-4 classes
        for link in S.links:
            for recv, give in ((link.a, link.b), (link.b, link.a)):
                if recv == give:
                    continue
                if length[recv] == 3 and length[give] >= 4:
                    if link.mult <= 3:
                        ledger.transfers.append(Transfer("R2", give, recv, Fraction(2, 15)))
                    elif link.mult == 4:
                        ledger.transfers.append(Transfer("R2", give, recv, Fraction(1, 15)))
        # rule 3: overfull 3-faces split their excess over needy 3-face links,
        # all measured on the post-R2 state
        snapshot = ledger.final()
        for f in S.faces:
            fid = f.id
            if length[fid] != 3 or snapshot[fid] <= target:
                continue
            eligible = []
            for link in S.links:
                for recv, give in ((link.a, link.b), (link.b, link.a)):
                    if give == fid and recv != fid and length[recv] == 3 \
                            and snapshot[recv] < target:
                        eligible.append(recv)
            if not eligible:
                continue
            share = (snapshot[fid] - target) / len(eligible)
            for recv in eligible:
                ledger.transfers.append(Transfer("R3", fid, recv, share))

    final = ledger.final()
    total = sum(final.values())
    expected = Fraction(2 * R.graph.size)
    if total != expected:
        raise AssertionError(
            f"internal error: charge not conserved ({total} != {expected})"
        )
    min_charge = min(final.values()) if final else Fraction(0)
    offenders = tuple(sorted(fid for fid, ch in final.items() if ch < target))
    return DischargeReport(ruleset, S, ledger, target, min_charge, offenders)


def charge_bound(G: mg.Multigraph, which: str, R: RotationSystem) -> bool:
    """Exact check of the Euler-derived face-count inequality.

    For the z5 parameters: 2*edges <= 22/9 * faces - 2/3, valid under
    the precondition min w(G) >= 0; the z7 form uses 34/15 and 2/5 under
    min rho(G) >= 0.  An unmet precondition raises PreconditionError.
    """
    if which == "z5":
        selector, coef, off = "w", Fraction(22, 9), Fraction(2, 3)
    elif which == "z7":
        selector, coef, off = "rho", Fraction(34, 15), Fraction(2, 5)
    else:
        raise ValueError(f"which must be 'z5' or 'z7', got {which!r}")
    value, _ = weights.min_weight(G, selector)
    if value < 0:
        raise PreconditionError(
            f"minimum {selector} is {value} < 0; the bound is only derived above 0"
        )
    nfaces = len(trace_faces(R))
    return Fraction(2 * G.size) <= coef * nfaces - off


# -- text format ----------------------------------------------------------------


def rotation_to_text(R: RotationSystem) -> str:
    lines = []
    for v in range(R.graph.n):
        row = " ".join(f"{w}:{c}" for w, c in R.rotation(v))
        lines.append(f"rot {v}: {row}")
    return "\n".join(lines) + "\n"


def rotation_from_text(text: str, G: mg.Multigraph) -> RotationSystem:
    rows: dict[int, list[tuple[int, int]]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not line.startswith("rot"):
            raise ValueError(f"line {lineno}: expected 'rot <v>: <u:copy> ...'")
        head, _, tail = line.partition(":")
        fields = head.split()
        if len(fields) != 2 or fields[0] != "rot":
            raise ValueError(f"line {lineno}: expected 'rot <v>: <u:copy> ...'")
        v = int(fields[1])
        if v in rows:
            raise ValueError(f"line {lineno}: repeated rotation for vertex {v}")
        row = []
        for token in tail.split():
            try:
                w, c = token.split(":")
                row.append((int(w), int(c)))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad dart token {token!r}") from exc
        rows[v] = row
    if set(rows) != set(range(G.n)):
        raise ValueError("rotation file does not cover every vertex exactly once")
    return RotationSystem(G, [rows[v] for v in range(G.n)])
