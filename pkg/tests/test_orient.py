import random

import pytest

from circflow import multigraph as mg
from circflow import orient
from circflow.guards import CapExceeded

import util


def test_boundary_validation():
    with pytest.raises(ValueError):
        orient.Boundary(4, (0, 0))
    with pytest.raises(ValueError):
        orient.Boundary(1, (0,))
    with pytest.raises(ValueError):
        orient.Boundary(5, (1, 1))
    with pytest.raises(ValueError):
        orient.Boundary(5, (5, 0))
    b = orient.Boundary(5, (2, 3))
    assert b.negated().values == (3, 2)


def test_beta_orientation_examples():
    r = orient.beta_orientation(mg.a_k2(2), orient.Boundary(5, (1, 4)))
    assert isinstance(r, orient.Refutation)
    assert r.search_space == 3

    # net -2 is the only value = 3 mod 5 with |net| <= 4 and even parity
    c = orient.beta_orientation(mg.a_k2(4), orient.Boundary(5, (3, 2)))
    assert c.nets == {(0, 1): -2}
    assert c.out_copies(0, 1, 4) == 1

    single = mg.Multigraph(1, {})
    c = orient.beta_orientation(single, orient.Boundary(5, (0,)))
    assert c.nets == {}

    c = orient.beta_orientation(mg.a_k2(6), orient.Boundary(7, (4, 3)))
    assert c.out_copies(0, 1, 6) == 5


def test_beta_orientation_matches_brute_force():
    rng = random.Random(67)
    for _ in range(120):
        n = rng.randint(1, 4)
        G = util.random_multigraph(rng, n, max_mult=3)
        m = rng.choice((3, 5, 7))
        values = util.random_boundary_values(rng, n, m) if n > 1 else (0,)
        got = orient.beta_orientation(G, orient.Boundary(m, values))
        expect = util.brute_achievable(G, values, m)
        if expect:
            assert isinstance(got, orient.OrientationCertificate)
            assert orient.verify_certificate(G, orient.Boundary(m, values), got)
        else:
            assert isinstance(got, orient.Refutation)


def test_mod_orientation():
    r = orient.mod_orientation(mg.k_k4(1), 2)
    assert isinstance(r, orient.Refutation) and r.search_space == 64

    c = orient.mod_orientation(mg.cycle(4, 5), 2)
    assert orient.verify_certificate(mg.cycle(4, 5), orient.zero_boundary(4, 5), c)

    # forced net shape: the low-degree corner balances exactly, the two
    # 5-degree corners carry net +-5
    T = mg.triangle(2, 2, 3)
    c = orient.mod_orientation(T, 2)
    assert isinstance(c, orient.OrientationCertificate)
    net0 = c.nets[(0, 1)] + c.nets[(0, 2)]
    net1 = -c.nets[(0, 1)] + c.nets[(1, 2)]
    assert net0 == 0
    assert abs(net1) == 5


def test_verify_certificate_rejects_tampering():
    G = mg.cycle(4, 5)
    beta = orient.zero_boundary(4, 5)
    c = orient.mod_orientation(G, 2)
    assert orient.verify_certificate(G, beta, c)
    bad = orient.OrientationCertificate(5, dict(c.nets))
    first = next(iter(bad.nets))
    bad.nets[first] = -bad.nets[first] + 2  # parity-preserving corruption
    assert not orient.verify_certificate(G, beta, bad)
    missing = orient.OrientationCertificate(5, {k: v for k, v in c.nets.items() if k != first})
    assert not orient.verify_certificate(G, beta, missing)


def test_strongly_connected_basics():
    res = orient.strongly_connected(mg.a_k2(3), 5)
    assert not res.is_strong
    assert res.witness.values == (0, 0)

    res = orient.strongly_connected(mg.a_k2(4), 5, collect=True)
    assert res.is_strong
    assert res.boundaries_checked == 5
    assert len(res.certificates) == 5

    disconnected = mg.Multigraph(4, {(0, 1): 3, (2, 3): 3})
    res = orient.strongly_connected(disconnected, 5)
    assert not res.is_strong
    assert isinstance(res.witness, orient.Boundary)
    assert isinstance(
        orient.beta_orientation(disconnected, res.witness), orient.Refutation
    )

    with pytest.raises(CapExceeded):
        orient.strongly_connected(mg.cycle(6, 2), 5, vertex_cap=5)


def test_iter_boundaries_order_and_count():
    bs = list(orient.iter_boundaries(3, 5))
    assert len(bs) == 25
    assert bs[0] == (0, 0, 0)
    assert bs[1] == (0, 1, 4)
    assert all(sum(b) % 5 == 0 for b in bs)
    assert bs == sorted(bs)


def test_extend_orientation_examples():
    # contraction of the full pair graph leaves a single vertex
    G = mg.a_k2(5)
    beta = orient.Boundary(5, (2, 3))
    cert = orient.extend_orientation(
        G, [0, 1], {(0, 1): 4}, orient.OrientationCertificate(5, {}), beta
    )
    assert orient.verify_certificate(G, beta, cert)

    # absorb one class into a wide pair inside a triangle
    G = mg.triangle(1, 4, 4)
    beta = orient.zero_boundary(3, 5)
    GS, mapping = mg.contract(G, [0, 2])
    bc = orient.contracted_boundary(G, [0, 2], beta, mapping, GS.n)
    sub = orient.beta_orientation(GS, bc)
    cert = orient.extend_orientation(G, [0, 2], {(0, 2): 4}, sub, beta)
    assert orient.verify_certificate(G, beta, cert)
    direct = orient.beta_orientation(G, beta)
    assert isinstance(direct, orient.OrientationCertificate)


def test_extend_orientation_errors():
    G = mg.triangle(1, 4, 4)
    beta = orient.zero_boundary(3, 5)
    with pytest.raises(ValueError, match="contracted boundary"):
        orient.extend_orientation(
            G, [0, 2], {(0, 2): 4}, orient.OrientationCertificate(5, {(0, 1): 5}), beta
        )
    # a 3-fold pair cannot absorb every residual
    G2 = mg.triangle(1, 3, 3)
    GS, mapping = mg.contract(G2, [0, 2])
    beta2 = orient.Boundary(5, (1, 0, 4))
    bc = orient.contracted_boundary(G2, [0, 2], beta2, mapping, GS.n)
    sub = orient.beta_orientation(GS, bc)
    assert isinstance(sub, orient.OrientationCertificate)
    try:
        cert = orient.extend_orientation(G2, [0, 2], {(0, 2): 3}, sub, beta2)
    except orient.ExtensionError as exc:
        assert exc.residual is not None
    else:
        assert orient.verify_certificate(G2, beta2, cert)


def test_extension_random_cross_check():
    # whenever H is a 4-fold pair inside G, extension must reproduce a
    # verifiable certificate for any boundary the contraction achieves
    rng = random.Random(101)
    done = 0
    while done < 60:
        n = rng.randint(3, 5)
        G = util.random_connected_multigraph(rng, n, max_mult=5)
        wide = [(u, v) for (u, v), mult in G.items() if mult >= 4]
        if not wide:
            continue
        u, v = rng.choice(wide)
        values = util.random_boundary_values(rng, n, 5)
        beta = orient.Boundary(5, values)
        GS, mapping = mg.contract(G, [u, v])
        bc = orient.contracted_boundary(G, [u, v], beta, mapping, GS.n)
        sub = orient.beta_orientation(GS, bc)
        if isinstance(sub, orient.Refutation):
            continue
        cert = orient.extend_orientation(G, [u, v], {(u, v): 4}, sub, beta)
        assert orient.verify_certificate(G, beta, cert)
        done += 1


def test_zflow_conversion_and_checks():
    G = mg.cycle(4, 5)
    cert = orient.mod_orientation(G, 2)
    flow = orient.orientation_to_zflow(G, cert)
    assert all(value == 2 for value, _ in flow.values.values())
    assert orient.verify_zflow(G, flow)
    assert orient.is_antisymmetric(flow)

    empty = mg.Multigraph(1, {})
    f0 = orient.orientation_to_zflow(empty, orient.OrientationCertificate(5, {}))
    assert orient.verify_zflow(empty, f0)
    assert orient.is_antisymmetric(f0)

    # values 1 and 4 sum to zero mod 5
    two = mg.Multigraph(2, {(0, 1): 2})
    f = orient.ZFlow(5, {(0, 1, 0): (1, "uv"), (0, 1, 1): (4, "vu")})
    assert orient.verify_zflow(two, f)
    assert not orient.is_antisymmetric(f)

    bad = orient.ZFlow(5, {(0, 1, 0): (5, "uv"), (0, 1, 1): (5, "vu")})
    assert not orient.verify_zflow(two, bad)

    with pytest.raises(ValueError):
        orient.orientation_to_zflow(mg.a_k2(1), orient.OrientationCertificate(5, {(0, 1): 1}))


def test_find_circular_flow():
    f = orient.find_circular_flow(mg.cycle(3, 1), 5, 2)
    assert isinstance(f, orient.IntegerFlow)
    assert orient.verify_circular_flow(mg.cycle(3, 1), f)
    assert all(v == 2 for v, _ in f.values.values())

    r = orient.find_circular_flow(mg.k_k4(1), 5, 2)
    assert isinstance(r, orient.FlowRefutation)

    f = orient.find_circular_flow(mg.a_k2(2), 4, 2)
    assert isinstance(f, orient.IntegerFlow)
    f = orient.find_circular_flow(mg.a_k2(2), 2, 1)
    assert isinstance(f, orient.IntegerFlow)
    assert orient.verify_circular_flow(mg.a_k2(2), f)

    with pytest.raises(ValueError):
        orient.find_circular_flow(mg.a_k2(2), 3, 2)
    with pytest.raises(CapExceeded):
        orient.find_circular_flow(mg.cycle(5, 5), 5, 2, edge_cap=20)


def test_certificate_text_roundtrip():
    G = mg.triangle(2, 2, 3)
    cert = orient.mod_orientation(G, 2)
    back = orient.certificate_from_text(orient.certificate_to_text(cert))
    assert back.modulus == cert.modulus and back.nets == cert.nets
    with pytest.raises(ValueError, match="line 2"):
        orient.certificate_from_text("orient 5\nnet 1 0 1\n")
    with pytest.raises(ValueError, match="orient header"):
        orient.certificate_from_text("net 0 1 1\n")


def test_zflow_text_roundtrip():
    G = mg.cycle(4, 5)
    flow = orient.orientation_to_zflow(G, orient.mod_orientation(G, 2))
    back = orient.zflow_from_text(orient.zflow_to_text(flow))
    assert back.modulus == flow.modulus and back.values == flow.values
    with pytest.raises(ValueError, match="direction"):
        orient.zflow_from_text("flow 5\nval 0 1 0 2 xy\n")
