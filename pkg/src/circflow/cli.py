"""Command-line surface and corpus generators.

Subcommands: check, strong, weight, troublesome, scan, solve, discharge,
gen.  Exit codes: 0 when a verdict was produced (including negative
verdicts), 1 when a size guard or unmet precondition forced a refusal,
2 for unreadable or invalid input.  ``--format structured`` emits one
JSON document with stable field names instead of the text report.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from . import multigraph as mg
from . import orient, planar, reduce, weights
from .guards import CapExceeded


# -- corpus generators ---------------------------------------------------------


def gen_kcycle(k: int, n: int) -> tuple[mg.Multigraph, planar.RotationSystem]:
    """k parallel copies of the n-cycle, with its canonical embedding."""
    G = mg.cycle(n, k)
    orders = [[(i + 1) % n, (i - 1) % n] for i in range(n)]
    return G, planar.rotation_from_neighbor_order(G, orders)


_K4_ORDERS = [[1, 2, 3], [2, 0, 3], [0, 1, 3], [1, 0, 2]]
_C4_ORDERS = [[1, 3], [2, 0], [3, 1], [0, 2]]
_OCTAHEDRON_ORDERS = [
    [4, 1, 5, 3],
    [0, 4, 2, 5],
    [1, 4, 3, 5],
    [2, 4, 0, 5],
    [1, 0, 3, 2],
    [0, 1, 2, 3],
]


def octahedron() -> tuple[mg.Multigraph, planar.RotationSystem]:
    classes = {(0, 1): 1, (1, 2): 1, (2, 3): 1, (0, 3): 1}
    for e in range(4):
        classes[tuple(sorted((e, 4)))] = 1
        classes[tuple(sorted((e, 5)))] = 1
    G = mg.Multigraph(6, classes)
    return G, planar.rotation_from_neighbor_order(G, _OCTAHEDRON_ORDERS)


def stacked_triangulation(n: int) -> tuple[mg.Multigraph, planar.RotationSystem]:
    """Plane triangulation built by repeatedly filling a triangular face.

    Starts from the triangle; each new vertex is joined to the corners
    of the face with the least sorted corner tuple (earliest traced face
    on ties), so the construction is deterministic.
    """
    if n < 3:
        raise ValueError("triangulation needs at least 3 vertices")
    G = mg.cycle(3, 1)
    orders: list[list[int]] = [[1, 2], [2, 0], [0, 1]]
    for new in range(3, n):
        R = planar.rotation_from_neighbor_order(G, orders)
        faces = [f for f in planar.trace_faces(R) if f.length == 3]
        face = min(faces, key=lambda f: (tuple(sorted(x for x, _, _ in f.darts)), f.id))
        walk = [x for x, _, _ in face.darts]  # darts x->y, y->z, z->x
        x, y, z = walk
        classes = G.classes
        for corner in walk:
            classes[tuple(sorted((corner, new)))] = 1
        G = mg.Multigraph(new + 1, classes)
        orders.append([y, x, z])
        # the new spoke enters each corner right after that corner's
        # incoming boundary neighbor, keeping the rotation plane
        for corner, prev in ((x, z), (y, x), (z, y)):
            row = orders[corner]
            row.insert(row.index(prev) + 1, new)
    return G, planar.rotation_from_neighbor_order(G, orders)


def gen_triangulation(n: int, kind: str = "stacked") -> tuple[mg.Multigraph, planar.RotationSystem]:
    if kind == "stacked":
        return stacked_triangulation(n)
    if kind == "octahedron":
        if n != 6:
            raise ValueError("the octahedron has exactly 6 vertices")
        return octahedron()
    raise ValueError(f"unknown triangulation kind {kind!r}")


def gen_replicate(
    base: mg.Multigraph, rotation: planar.RotationSystem, k: int
) -> tuple[mg.Multigraph, planar.RotationSystem]:
    """Multiply every class of a simple plane graph by k, keeping its embedding."""
    if k < 1:
        raise ValueError("replication factor must be at least 1")
    if base.max_multiplicity() > 1:
        raise ValueError("replication base must be a simple graph")
    G = mg.Multigraph(base.n, {pair: k for pair, _ in base.items()})
    rows = []
    for v in range(base.n):
        row: list[tuple[int, int]] = []
        for w, _ in rotation.rotation(v):
            rng = range(k) if v < w else range(k - 1, -1, -1)
            row.extend((w, c) for c in rng)
        rows.append(row)
    return G, planar.RotationSystem(G, rows)


_CATALOG_ORDERS: dict[str, list[list[int]]] = {
    "aK2": [[1], [0]],
    "T": [[1, 2], [2, 0], [0, 1]],
    "kK4": _K4_ORDERS,
    "3K4+": _K4_ORDERS,
    "kC4": _C4_ORDERS,
    "5C4=": _C4_ORDERS,
    "5C4-": _C4_ORDERS,
}


def gen_catalog(name: str) -> tuple[mg.Multigraph, planar.RotationSystem | None]:
    label = mg.parse_label(name)
    G = mg.build_catalog(label)
    orders = _CATALOG_ORDERS.get(label.family)
    rotation = planar.rotation_from_neighbor_order(G, orders) if orders else None
    return G, rotation


# -- report plumbing -------------------------------------------------------------


class _InputError(ValueError):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc}") from exc


def _load_graph(path: str) -> mg.Multigraph:
    try:
        return mg.from_text(_read(path))
    except ValueError as exc:
        raise _InputError(f"{path}: {exc}") from exc


def _load_rotation(path: str, G: mg.Multigraph) -> planar.RotationSystem:
    try:
        return planar.rotation_from_text(_read(path), G)
    except (ValueError, planar.InvalidEmbedding) as exc:
        raise _InputError(f"{path}: {exc}") from exc


def _emit(report: dict, text_lines: list[str], fmt: str) -> None:
    if fmt == "structured":
        print(json.dumps(report, sort_keys=True, default=str))
    else:
        for line in text_lines:
            print(line)


# -- subcommands ------------------------------------------------------------------


def _cmd_check(args) -> int:
    G = _load_graph(args.graph)
    body = _read(args.certificate)
    head = next((ln.split()[0] for ln in body.splitlines()
                 if ln.strip() and not ln.startswith("#")), "")
    report: dict = {"command": "check", "version": __version__,
                    "inputs": {"graph": args.graph, "certificate": args.certificate}}
    lines: list[str] = []
    if head == "orient":
        try:
            cert = orient.certificate_from_text(body)
        except ValueError as exc:
            raise _InputError(f"{args.certificate}: {exc}") from exc
        if args.boundary:
            values = tuple(int(x) % cert.modulus for x in args.boundary.split(","))
        else:
            values = (0,) * G.n
        try:
            beta = orient.Boundary(cert.modulus, values)
        except ValueError as exc:
            raise _InputError(f"boundary: {exc}") from exc
        problems = _certificate_problems(G, beta, cert)
        report["kind"] = "orientation"
        report["verdict"] = "pass" if not problems else "fail"
        report["problems"] = problems
        lines.append(f"certificate: {report['verdict']}")
        lines.extend(f"  {p}" for p in problems)
    elif head == "flow":
        try:
            flow = orient.zflow_from_text(body)
        except ValueError as exc:
            raise _InputError(f"{args.certificate}: {exc}") from exc
        problems = _flow_problems(G, flow)
        report["kind"] = "flow"
        report["verdict"] = "pass" if not problems else "fail"
        report["problems"] = problems
        report["antisymmetric"] = not problems and orient.is_antisymmetric(flow)
        lines.append(f"flow: {report['verdict']}")
        lines.extend(f"  {p}" for p in problems)
        if not problems:
            lines.append(f"antisymmetric: {report['antisymmetric']}")
    else:
        raise _InputError(f"{args.certificate}: unrecognised certificate header {head!r}")
    _emit(report, lines, args.format)
    return 0


def _certificate_problems(G, beta, cert) -> list[str]:
    problems = []
    if set(cert.nets) != set(G.pairs()):
        problems.append("certificate classes do not match the graph")
        return problems
    for (u, v), mult in G.items():
        o = cert.nets[(u, v)]
        if abs(o) > mult or (o - mult) % 2 != 0:
            problems.append(f"class {u}-{v}: net {o} illegal for multiplicity {mult}")
    if problems:
        return problems
    realized = orient.realized_boundary(G, cert)
    for v in range(G.n):
        if realized.values[v] != beta.values[v]:
            problems.append(
                f"vertex {v}: net residue {realized.values[v]} != boundary {beta.values[v]}"
            )
    return problems


def _flow_problems(G, flow) -> list[str]:
    problems = []
    expected = {(u, v, i) for (u, v), mult in G.items() for i in range(mult)}
    if set(flow.values) != expected:
        problems.append("flow copies do not match the graph")
        return problems
    m = flow.modulus
    net = [0] * G.n
    for (u, v, i), (value, direction) in sorted(flow.values.items()):
        if value % m == 0:
            problems.append(f"copy {u}-{v}#{i}: value {value} is zero mod {m}")
        if not 1 <= value <= m - 1:
            problems.append(f"copy {u}-{v}#{i}: value {value} outside 1..{m - 1}")
        src, dst = (u, v) if direction == "uv" else (v, u)
        net[src] += value
        net[dst] -= value
    for v in range(G.n):
        if net[v] % m != 0:
            problems.append(f"vertex {v}: conservation fails ({net[v]} mod {m})")
    return problems


def _cmd_strong(args) -> int:
    G = _load_graph(args.graph)
    start = time.monotonic()
    result = orient.strongly_connected(G, args.modulus, vertex_cap=args.cap_n)
    elapsed = time.monotonic() - start
    report = {
        "command": "strong", "version": __version__, "elapsed_s": round(elapsed, 6),
        "inputs": {"graph": args.graph, "modulus": args.modulus},
        "verdict": "yes" if result.is_strong else "no",
        "boundaries_checked": result.boundaries_checked,
        "witness": list(result.witness.values) if result.witness else None,
    }
    lines = [f"strongly Z_{args.modulus}-connected: {report['verdict']}"]
    if result.witness:
        lines.append("witness boundary: (" + ",".join(map(str, result.witness.values)) + ")")
    lines.append(f"boundaries checked: {result.boundaries_checked}")
    _emit(report, lines, args.format)
    return 0


def _cmd_weight(args) -> int:
    G = _load_graph(args.graph)
    value, argmin = weights.min_weight(G, args.which, vertex_cap=args.cap_n)
    report = {
        "command": "weight", "version": __version__,
        "inputs": {"graph": args.graph, "which": args.which},
        "value": value,
        "argmin_rgs": list(argmin.to_rgs()),
        "argmin_classification": argmin.classification,
    }
    lines = [
        f"min {args.which} = {value}",
        f"argmin partition: {argmin} ({argmin.classification})",
    ]
    _emit(report, lines, args.format)
    return 0


def _cmd_troublesome(args) -> int:
    G = _load_graph(args.graph)
    found = weights.find_special_partition(G, args.mode, vertex_cap=args.cap_n)
    report: dict = {
        "command": "troublesome", "version": __version__,
        "inputs": {"graph": args.graph, "mode": args.mode},
    }
    if found is None:
        report["verdict"] = "none"
        lines = [f"{args.mode} partition: none"]
    else:
        partition, label = found
        report["verdict"] = "found"
        report["partition_rgs"] = list(partition.to_rgs())
        report["label"] = str(label)
        lines = [f"{args.mode} partition: {partition} -> {label}"]
    _emit(report, lines, args.format)
    return 0


def _cmd_scan(args) -> int:
    G = _load_graph(args.graph)
    reports = reduce.forbidden_scan(G, args.mode)
    report = {
        "command": "scan", "version": __version__,
        "inputs": {"graph": args.graph, "mode": args.mode},
        "occurrences": [
            {"rule": r.rule, "label": r.label, "vertices": list(r.vertices)} for r in reports
        ],
    }
    lines = [f"forbidden configurations ({args.mode}): {len(reports)}"]
    lines.extend(
        f"  {r.rule} {r.label} at {','.join(map(str, r.vertices))}" for r in reports
    )
    _emit(report, lines, args.format)
    return 0


def _cmd_solve(args) -> int:
    G = _load_graph(args.graph)
    rotation = _load_rotation(args.rotation, G) if args.rotation else None
    start = time.monotonic()
    result = reduce.solve_planar(
        G, args.p, rotation=rotation, base_n=args.base_n, search_cap=args.search_cap
    )
    elapsed = time.monotonic() - start
    report: dict = {
        "command": "solve", "version": __version__, "elapsed_s": round(elapsed, 6),
        "inputs": {"graph": args.graph, "p": args.p},
        "status": result.status,
        "steps": [s.to_line() for s in result.steps],
        "anomalies": list(result.anomalies),
    }
    lines = [f"solve p={args.p}: {result.status}"]
    if result.status == "orientation":
        report["certificate"] = {f"{u},{v}": o for (u, v), o in sorted(result.certificate.nets.items())}
        lines.append(orient.certificate_to_text(result.certificate).rstrip())
    elif result.status == "refuted":
        report["search_space"] = result.refutation.search_space
        lines.append(f"refuted; exhausted final search space {result.refutation.search_space}")
    else:
        report["reason"] = result.reason
        lines.append(f"refused: {result.reason}")
    for a in result.anomalies:
        lines.append(f"anomaly: {a}")
    if args.trace:
        Path(args.trace).write_text("".join(s.to_line() + "\n" for s in result.steps))
        lines.append(f"trace written to {args.trace}")
    _emit(report, lines, args.format)
    return 0 if result.status in ("orientation", "refuted") else 1


def _cmd_discharge(args) -> int:
    G = _load_graph(args.graph)
    R = _load_rotation(args.rotation, G)
    try:
        rep = planar.discharge(R, args.ruleset)
    except planar.InvalidEmbedding as exc:
        raise _InputError(str(exc)) from exc
    final = rep.ledger.final()
    report: dict = {
        "command": "discharge", "version": __version__,
        "inputs": {"graph": args.graph, "rotation": args.rotation, "ruleset": args.ruleset},
        "faces": {
            str(f.id): {"length": f.length, "final_charge": str(final[f.id])}
            for f in rep.structure.faces
        },
        "transfers": len(rep.ledger.transfers),
        "min_charge": str(rep.min_charge),
        "target": str(rep.target),
        "offenders": list(rep.offenders),
    }
    lines = [
        f"faces: {len(rep.structure.faces)}, strings: {len(rep.structure.strings)}, "
        f"transfers: {len(rep.ledger.transfers)}",
        f"min final charge {rep.min_charge} against target {rep.target}",
    ]
    for f in rep.structure.faces:
        prof = rep.structure.profiles.get(f.id)
        tag = f" profile={prof}" if prof else ""
        lines.append(f"  face {f.id}: length {f.length}{tag} final {final[f.id]}")
    if rep.offenders:
        lines.append("below target: " + ",".join(map(str, rep.offenders)))
    if args.bound:
        ok = planar.charge_bound(G, args.ruleset, R)
        report["bound_holds"] = ok
        lines.append(f"face-count bound holds: {ok}")
    _emit(report, lines, args.format)
    return 0


def _cmd_gen(args) -> int:
    if args.family == "kcycle":
        G, R = gen_kcycle(args.k, args.n)
    elif args.family == "replicate":
        base = _load_graph(args.base)
        base_rot = _load_rotation(args.base_rotation, base)
        try:
            G, R = gen_replicate(base, base_rot, args.k)
        except ValueError as exc:
            raise _InputError(str(exc)) from exc
    elif args.family == "catalog":
        try:
            G, R = gen_catalog(args.name)
        except ValueError as exc:
            raise _InputError(str(exc)) from exc
    elif args.family == "triangulation":
        try:
            G, R = gen_triangulation(args.n, args.kind)
        except ValueError as exc:
            raise _InputError(str(exc)) from exc
    else:  # pragma: no cover - argparse restricts choices
        raise _InputError(f"unknown family {args.family}")
    out = Path(args.out)
    files = [str(out.with_suffix(".mg"))]
    out.with_suffix(".mg").write_text(mg.to_text(G))
    if R is not None:
        planar.trace_faces(R)  # embedding sanity before writing
        out.with_suffix(".rot").write_text(planar.rotation_to_text(R))
        files.append(str(out.with_suffix(".rot")))
    report = {
        "command": "gen", "version": __version__,
        "inputs": vars(args) | {"func": None},
        "files": files, "vertices": G.n, "edges": G.size,
    }
    report["inputs"].pop("func", None)
    lines = [f"wrote {' '.join(files)} (n={G.n}, edges={G.size})"]
    _emit(report, lines, args.format)
    return 0


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circflow",
        description="modulo orientations, group connectivity, partition weights and "
        "face-charge accounting on small multigraphs",
    )
    parser.add_argument("--version", action="version", version=f"circflow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "structured"), default="text")
        p.add_argument("--seed", type=int, default=None,
                       help="seed for randomised subcommands (reserved)")

    p = sub.add_parser("check", help="verify an orientation certificate or flow file")
    p.add_argument("graph")
    p.add_argument("certificate")
    p.add_argument("--boundary", help="comma-separated boundary residues (default all zero)")
    common(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("strong", help="decide strong connectivity at a modulus")
    p.add_argument("graph")
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--cap-n", type=int, default=None or 12)
    common(p)
    p.set_defaults(func=_cmd_strong)

    p = sub.add_parser("weight", help="minimise a partition weight")
    p.add_argument("graph")
    p.add_argument("--which", choices=("w", "rho"), required=True)
    p.add_argument("--cap-n", type=int, default=12)
    common(p)
    p.set_defaults(func=_cmd_weight)

    p = sub.add_parser("troublesome", help="scan for obstruction partitions")
    p.add_argument("graph")
    p.add_argument("--mode", choices=("troublesome", "problematic"), default="troublesome")
    p.add_argument("--cap-n", type=int, default=12)
    common(p)
    p.set_defaults(func=_cmd_troublesome)

    p = sub.add_parser("scan", help="scan for forbidden configurations")
    p.add_argument("graph")
    p.add_argument("--mode", choices=("z5", "z7"), required=True)
    common(p)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("solve", help="search for an all-zero-net orientation")
    p.add_argument("graph")
    p.add_argument("--p", type=int, choices=(2, 3), required=True)
    p.add_argument("--rotation", help="optional rotation file enabling splitting lifts")
    p.add_argument("--base-n", type=int, default=6)
    p.add_argument("--search-cap", type=int, default=10**8)
    p.add_argument("--trace", help="write the replayable reduction trace here")
    common(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("discharge", help="run charge redistribution on an embedding")
    p.add_argument("graph")
    p.add_argument("rotation")
    p.add_argument("--ruleset", choices=("z5", "z7"), required=True)
    p.add_argument("--bound", action="store_true",
                   help="also verify the Euler-derived face-count inequality")
    common(p)
    p.set_defaults(func=_cmd_discharge)

    p = sub.add_parser("gen", help="generate corpus graphs and embeddings")
    gensub = p.add_subparsers(dest="family", required=True)

    g = gensub.add_parser("kcycle")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--out", required=True)
    common(g)
    g.set_defaults(func=_cmd_gen)

    g = gensub.add_parser("replicate")
    g.add_argument("--base", required=True)
    g.add_argument("--base-rotation", required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--out", required=True)
    common(g)
    g.set_defaults(func=_cmd_gen)

    g = gensub.add_parser("catalog")
    g.add_argument("--name", required=True)
    g.add_argument("--out", required=True)
    common(g)
    g.set_defaults(func=_cmd_gen)

    g = gensub.add_parser("triangulation")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--kind", choices=("stacked", "octahedron"), default="stacked")
    g.add_argument("--out", required=True)
    common(g)
    g.set_defaults(func=_cmd_gen)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except CapExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 1
    except planar.PreconditionError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
