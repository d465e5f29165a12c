import random

import pytest
from hypothesis import given, strategies as st

from anonylink.crypto import GROUP_PROFILES, comm, group_profile, hash_bytes, prf

G = group_profile("toy64")


def test_profiles_are_valid_groups():
    for name in GROUP_PROFILES:
        g = group_profile(name)
        assert (g.p - 1) % g.q == 0
        assert g.is_element(g.g) and g.is_element(g.h)
        assert g.g != g.h


def test_unknown_profile():
    with pytest.raises((KeyError, ValueError)):
        group_profile("nope")


def test_pedersen_homomorphism_1000_pairs():
    rng = random.Random(11)
    for _ in range(1000):
        r1, r2 = G.random_scalar(rng), G.random_scalar(rng)
        v1, v2 = rng.randrange(2 ** 32), rng.randrange(2 ** 32)
        assert G.mul(G.commit(r1, v1), G.commit(r2, v2)) == G.commit(r1 + r2, v1 + v2)


def test_pedersen_homomorphism_large_profile():
    g = group_profile("modp1536")
    rng = random.Random(3)
    for _ in range(20):
        r1, r2, v1, v2 = (rng.randrange(g.q) for _ in range(4))
        assert g.mul(g.commit(r1, v1), g.commit(r2, v2)) == g.commit(r1 + r2, v1 + v2)


def test_balanced_transaction_identity():
    """Outputs over inputs equal the kernel excess exactly when values balance."""
    rng = random.Random(2)
    for _ in range(200):
        vin = [rng.randrange(1, 1000) for _ in range(rng.randint(1, 3))]
        total = sum(vin)
        cut = rng.randrange(0, total)
        vout = [v for v in (cut, total - cut) if v > 0]
        rin = [G.random_scalar(rng) for _ in vin]
        rout = [G.random_scalar(rng) for _ in vout]
        cin = [G.commit(r, v) for r, v in zip(rin, vin)]
        cout = [G.commit(r, v) for r, v in zip(rout, vout)]
        excess = G.exp(G.g, sum(rout) - sum(rin))
        assert G.mul(*cout, G.inv(G.mul(*cin)), G.inv(excess)) == 1
        inflated = G.commit(rout[0], vout[0] + 1)
        assert G.mul(inflated, *cout[1:], G.inv(G.mul(*cin)), G.inv(excess)) != 1


@given(st.integers(1, 2 ** 60), st.integers(1, 2 ** 60))
def test_exp_and_inverse(a, b):
    x = G.exp(G.g, a)
    assert G.is_element(x)
    assert G.mul(x, G.inv(x)) == 1
    assert G.mul(G.exp(G.g, a), G.exp(G.g, b)) == G.exp(G.g, a + b)
    assert isinstance(x, int)


def test_non_elements():
    assert not G.is_element(0)
    assert not G.is_element(G.p)
    non_residue = next(x for x in range(2, 100) if pow(x, G.q, G.p) != 1)
    assert not G.is_element(non_residue)


def test_hash_to_group_lands_in_subgroup():
    for i in range(50):
        assert G.is_element(G.hash_to_group("t", i))


def test_hash_domains_separate():
    assert hash_bytes("a", b"x") != hash_bytes("b", b"x")
    assert hash_bytes("a", b"x", b"y") != hash_bytes("a", b"xy")
    assert hash_bytes("a", 1) == hash_bytes("a", 1)
    assert prf(b"k1", "sn", b"r") != prf(b"k2", "sn", b"r")
    assert comm(b"r1", b"m") != comm(b"r2", b"m")
