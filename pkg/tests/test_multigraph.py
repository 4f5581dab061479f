import random

import pytest

from circflow import multigraph as mg

import util


def test_basic_invariants():
    G = mg.triangle(2, 2, 3)
    assert G.size == 7
    assert G.degrees() == [4, 5, 5]
    assert sum(G.degrees()) == 2 * G.size
    assert G.mult(1, 2) == 3 == G.mult(2, 1)
    assert G.mult(0, 0) == 0


def test_construction_errors():
    with pytest.raises(ValueError):
        mg.Multigraph(2, {(0, 0): 1})
    with pytest.raises(ValueError):
        mg.Multigraph(2, {(0, 1): 0})
    with pytest.raises(ValueError):
        mg.Multigraph(2, {(0, 2): 1})
    with pytest.raises(ValueError):
        mg.Multigraph(2, {(0, 1): 1, (1, 0): 1})


def test_cut_size_examples():
    assert mg.cut_size(mg.a_k2(3), {0}) == 3
    # the two multiplicity-2 classes of the triangle cross this cut
    T = mg.triangle(2, 2, 3)
    assert mg.cut_size(T, {1, 2}) == 4
    assert mg.cut_size(T, {1, 2}) == util.brute_cut(T, {1, 2})
    # two adjacent cycle vertices of 5C4 cut across two 5-classes
    C = mg.cycle(4, 5)
    assert mg.cut_size(C, {0, 1}) == 10


def test_cut_size_errors():
    G = mg.a_k2(2)
    with pytest.raises(ValueError):
        mg.cut_size(G, set())
    with pytest.raises(ValueError):
        mg.cut_size(G, {0, 1})


def test_cut_symmetry_and_handshake_random():
    rng = random.Random(11)
    for _ in range(100):
        n = rng.randint(2, 6)
        G = util.random_multigraph(rng, n)
        assert sum(G.degrees()) == 2 * G.size
        X = {v for v in range(n) if rng.random() < 0.5}
        if 0 < len(X) < n:
            comp = set(range(n)) - X
            assert mg.cut_size(G, X) == mg.cut_size(G, comp) == util.brute_cut(G, X)


def test_edge_connectivity():
    assert mg.edge_connectivity(mg.a_k2(3)) == 3
    # singleton cuts 4,5,5 and two-element cuts 5,5,4
    assert mg.edge_connectivity(mg.triangle(2, 2, 3)) == 4
    disconnected = mg.Multigraph(3, {(0, 1): 2})
    assert mg.edge_connectivity(disconnected) == 0
    rng = random.Random(5)
    for _ in range(25):
        G = util.random_connected_multigraph(rng, rng.randint(2, 5))
        assert mg.edge_connectivity(G) == util.brute_min_cut(G)


def test_odd_edge_connectivity():
    assert mg.odd_edge_connectivity(mg.cycle(4, 5)) == float("inf")
    assert mg.odd_edge_connectivity(mg.triangle(2, 2, 3)) == 5
    assert mg.odd_edge_connectivity(mg.a_k2(3)) == 3


def test_contract():
    T = mg.triangle(2, 2, 3)
    Q, mapping = mg.contract(T, {1, 2})
    assert mg.catalog_match(Q) == mg.CatalogLabel("aK2", (4,))
    assert mapping == (0, 1, 1)

    G = mg.cycle(5, 2)
    same, mapping = mg.contract(G, {3})
    assert same == G and mapping == (0, 1, 2, 3, 4)

    Q, _ = mg.contract(mg.five_c4_matching_deleted(), {0, 1})
    assert mg.catalog_match(Q) == mg.CatalogLabel("T", (4, 5, 5))

    # disconnected contraction set is plain identification
    P = mg.Multigraph(3, {(0, 1): 1, (1, 2): 1})
    Q, mapping = mg.contract(P, {0, 2})
    assert Q == mg.Multigraph(2, {(0, 1): 2})


def test_contract_then_cut():
    rng = random.Random(23)
    for _ in range(60):
        n = rng.randint(3, 6)
        G = util.random_multigraph(rng, n)
        X = set(rng.sample(range(n), rng.randint(2, n - 1)))
        S = set(rng.sample(sorted(X), rng.randint(1, len(X))))
        Q, mapping = mg.contract(G, S)
        image = {mapping[v] for v in X}
        if 0 < len(image) < Q.n:
            assert mg.cut_size(Q, image) == mg.cut_size(G, X)


def test_lift():
    T = mg.triangle(1, 1, 3)  # vertex 0 carries the two single classes
    lifted = mg.lift(T, 0, 1, 2)
    assert lifted.classes == {(1, 2): 4}
    assert lifted.degree(0) == 0

    path = mg.Multigraph(3, {(0, 1): 1, (1, 2): 1})
    assert mg.lift(path, 1, 0, 2).classes == {(0, 2): 1}

    with pytest.raises(ValueError):
        mg.lift(path, 1, 0, 0)
    with pytest.raises(ValueError):
        mg.lift(path, 0, 1, 2)  # no edge 0-2 to consume at 0

    # double lift collapses the subdivided wide triangle onto its 4-class
    H = mg.build_catalog("T115_o")
    assert H.classes == {(0, 1): 1, (0, 2): 1, (1, 2): 4, (1, 3): 1, (2, 3): 1}
    out = mg.lift(mg.lift(H, 0, 1, 2), 3, 1, 2)
    assert out.classes == {(1, 2): 6}
    assert out.degree(0) == out.degree(3) == 0


def test_lift_invariants_random():
    rng = random.Random(31)
    for _ in range(100):
        G = util.random_connected_multigraph(rng, rng.randint(3, 6))
        options = [
            (v, w1, w2)
            for v in range(G.n)
            for w1 in range(G.n)
            for w2 in range(G.n)
            if w1 != w2 and G.mult(v, w1) >= 1 and G.mult(v, w2) >= 1
        ]
        if not options:
            continue
        v, w1, w2 = rng.choice(options)
        L = mg.lift(G, v, w1, w2)
        assert L.size == G.size - 1
        assert L.degree(v) == G.degree(v) - 2
        for u in range(G.n):
            if u != v:
                assert L.degree(u) == G.degree(u)


def test_subdivide():
    assert mg.catalog_match(mg.subdivide_max(mg.a_k2(4))) == mg.CatalogLabel("T", (1, 1, 3))
    t = mg.triangle(1, 1, 5)
    assert mg.catalog_match(mg.subdivide(t, (0, 1))) == mg.CatalogLabel("T115_dot")
    C = mg.subdivide(mg.cycle(3, 1), (0, 1))
    assert mg.isomorphic(C, mg.cycle(4, 1))
    with pytest.raises(ValueError):
        mg.subdivide(mg.cycle(3, 1), (0, 5))
    with pytest.raises(ValueError):
        mg.subdivide_max(mg.triangle(1, 1, 5), (0, 1))  # not a maximal class

    G = mg.triangle(2, 2, 3)
    S = mg.subdivide(G, (1, 2))
    assert S.degree(3) == 2
    for v in range(3):
        assert S.degree(v) == G.degree(v)


def test_subdivide_max_tie_breaks_lexicographically():
    G = mg.Multigraph(3, {(0, 1): 3, (0, 2): 3, (1, 2): 1})
    S = mg.subdivide_max(G)
    assert S.mult(0, 1) == 2 and S.mult(0, 2) == 3


def test_catalog_match_examples():
    assert mg.catalog_match(mg.Multigraph(2, {(0, 1): 4})) == mg.CatalogLabel("aK2", (4,))
    assert mg.catalog_match(
        mg.Multigraph(3, {(0, 1): 2, (0, 2): 2, (1, 2): 3})
    ) == mg.CatalogLabel("T", (2, 2, 3))
    # cyclic multiplicities (4,5,4,5) are the matching-deleted graph;
    # deleting from two adjacent classes instead is something else
    assert mg.catalog_match(mg.five_c4_matching_deleted()) == mg.CatalogLabel("5C4=")
    adjacent = mg.Multigraph(4, {(0, 1): 4, (1, 2): 4, (2, 3): 5, (0, 3): 5})
    assert mg.catalog_match(adjacent) != mg.CatalogLabel("5C4=")
    assert mg.catalog_match(mg.k_c4(5)) == mg.CatalogLabel("kC4", (5,))
    assert mg.catalog_match(mg.k_k4(2)) == mg.CatalogLabel("kK4", (2,))
    assert mg.catalog_match(mg.Multigraph(4, {(0, 1): 1, (2, 3): 1})) is None


def test_catalog_match_isomorphism_invariance():
    rng = random.Random(47)
    names = ["4K2", "T2,2,3", "2K4", "3C4", "3K4+", "5C4=", "5C4-",
             "3C4_o", "T233_oo", "T115_o", "T115_dot", "5C4=_oo",
             "5C4=_oo_id", "T444_ooo"]
    for name in names:
        G = mg.build_catalog(name)
        label = mg.catalog_match(G)
        assert label is not None
        for _ in range(6):
            perm = list(range(G.n))
            rng.shuffle(perm)
            assert mg.catalog_match(mg.relabel(G, perm)) == label


def test_quotient_matches_repeated_contract():
    rng = random.Random(3)
    for _ in range(40):
        n = rng.randint(3, 6)
        G = util.random_multigraph(rng, n)
        blocks = util.random_partition_blocks(rng, n)
        Q = mg.quotient(G, blocks)
        # contract one block at a time, tracking vertex images
        work, ids = G, list(range(n))
        for blk in sorted(blocks, key=min):
            if len(blk) == 1:
                continue
            work, mapping = mg.contract(work, {ids[v] for v in blk})
            ids = [mapping[i] for i in ids]
        assert mg.isomorphic(work, Q)


def test_text_roundtrip():
    G = mg.triangle(2, 2, 3)
    assert mg.from_text(mg.to_text(G)) == G
    text = "# a comment\nmg 3\nc 0 1 2\n\nc 1 2 3\n"
    assert mg.from_text(text) == mg.Multigraph(3, {(0, 1): 2, (1, 2): 3})


def test_text_errors():
    with pytest.raises(ValueError, match="line 3"):
        mg.from_text("mg 2\nc 0 1 2\nc 0 1 1\n")
    with pytest.raises(ValueError, match="line 2"):
        mg.from_text("mg 2\nc 1 0 2\n")
    with pytest.raises(ValueError, match="mg header"):
        mg.from_text("c 0 1 2\n")
    with pytest.raises(ValueError, match="multiplicity"):
        mg.from_text("mg 2\nc 0 1 0\n")


def test_parse_label_forms():
    assert mg.parse_label("4K2") == mg.CatalogLabel("aK2", (4,))
    assert mg.parse_label("T2,3,3") == mg.CatalogLabel("T", (2, 3, 3))
    assert mg.parse_label("T3,2,3") == mg.CatalogLabel("T", (2, 3, 3))
    assert mg.parse_label("2K4") == mg.CatalogLabel("kK4", (2,))
    assert mg.parse_label("3C4") == mg.CatalogLabel("kC4", (3,))
    assert mg.parse_label("K4") == mg.CatalogLabel("kK4", (1,))
    assert mg.parse_label("5C4=") == mg.CatalogLabel("5C4=")
    with pytest.raises(ValueError):
        mg.parse_label("what")
