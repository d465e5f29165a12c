"""Prime-order group arithmetic, Pedersen commitments and hash primitives.

The group is the subgroup of quadratic residues modulo a safe prime
``p = 2q + 1``; it has prime order ``q``.  Group elements are plain ints.
Commitments are written multiplicatively: ``commit(r, v) = G^r * H^v``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

from gmpy2 import invert, powmod

# 64-bit safe prime: fast enough for 10^4-trial Monte-Carlo cells.
TOY64_P = 18446744073709550147

# RFC 3526 group 5 (1536-bit MODP), a published safe prime.
MODP1536_P = int(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD1"
    "29024E088A67CC74020BBEA63B139B22514A08798E3404DD"
    "EF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245"
    "E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3D"
    "C2007CB8A163BF0598DA48361C55D39A69163FA8FD24CF5F"
    "83655D23DCA3AD961C62F356208552BB9ED529077096966D"
    "670C354E4ABC9804F1746C08CA237327FFFFFFFFFFFFFFFF", 16)


_PERSONALIZED: dict[str, "hashlib._Hash"] = {}


def _encode(part: bytes | int | str) -> bytes:
    if isinstance(part, int):
        return part.to_bytes((part.bit_length() + 8) // 8, "big", signed=True)
    if isinstance(part, str):
        return part.encode()
    return part


def hash_bytes(domain: str, *parts: bytes | int | str) -> bytes:
    """Domain-separated BLAKE2b-256 over length-prefixed parts."""
    base = _PERSONALIZED.get(domain)
    if base is None:
        base = hashlib.blake2b(digest_size=32, person=domain.encode()[:16].ljust(16, b"\0"))
        _PERSONALIZED[domain] = base
    h = base.copy()
    for part in parts:
        part = _encode(part)
        h.update(len(part).to_bytes(4, "big"))
        h.update(part)
    return h.digest()


def prf(key: bytes, *parts: bytes | int | str) -> bytes:
    """Keyed pseudo-random function (keyed BLAKE2b)."""
    h = hashlib.blake2b(digest_size=32, key=key, person=b"anonylink.prf\0\0\0")
    for part in parts:
        part = _encode(part)
        h.update(len(part).to_bytes(4, "big"))
        h.update(part)
    return h.digest()


def comm(randomness: bytes, *parts: bytes | int | str) -> bytes:
    """Hash commitment ``COMM_randomness(parts)``."""
    return hash_bytes("anonylink.comm", randomness, *parts)


@dataclass(frozen=True)
class GroupParams:
    name: str
    p: int
    q: int
    g: int
    h: int
    h_derivation: str

    def __post_init__(self):
        if (self.p - 1) % self.q:
            raise ValueError("q must divide p - 1")
        for x in (self.g, self.h):
            if x in (0, 1) or pow(x, self.q, self.p) != 1:
                raise ValueError("generator not in the order-q subgroup")

    def exp(self, base: int, e: int) -> int:
        return int(powmod(base, e % self.q, self.p))

    def mul(self, *xs: int) -> int:
        out = 1
        for x in xs:
            out = out * x % self.p
        return out

    def inv(self, x: int) -> int:
        return int(invert(x, self.p))

    def is_element(self, x: int) -> bool:
        return isinstance(x, int) and 0 < x < self.p and powmod(x, self.q, self.p) == 1

    def hash_to_scalar(self, *parts) -> int:
        return int.from_bytes(hash_bytes("anonylink.Hs", *parts), "big") % self.q

    def hash_to_group(self, *parts) -> int:
        """Square a hash output into the QR subgroup; nobody learns its log base G."""
        ctr = 0
        while True:
            x = int.from_bytes(hash_bytes("anonylink.h2g", ctr, *parts)
                               + hash_bytes("anonylink.h2g2", ctr, *parts), "big")
            x = pow(x % self.p, 2, self.p)
            if x not in (0, 1):
                return x
            ctr += 1

    def random_scalar(self, rng) -> int:
        return rng.randrange(1, self.q)

    def commit(self, r: int, v: int) -> int:
        """Pedersen commitment ``G^r * H^v``."""
        return int(powmod(self.g, r % self.q, self.p) * powmod(self.h, v % self.q, self.p) % self.p)

    def element_bytes(self, x: int) -> bytes:
        return x.to_bytes((self.p.bit_length() + 7) // 8, "big")


def _make_group(name: str, p: int) -> GroupParams:
    q = (p - 1) // 2
    g = 4  # 2^2 is a quadratic residue, so it has order q
    proto = GroupParams(name, p, q, g, g * g % p, "placeholder")
    h = proto.hash_to_group("anonylink/H", g)
    return GroupParams(name, p, q, g, h,
                       "H = (BLAKE2b(ctr, 'anonylink/H', G) mod p)^2 mod p")


@lru_cache(maxsize=None)
def group_profile(name: str = "toy64") -> GroupParams:
    if name == "toy64":
        return _make_group(name, TOY64_P)
    if name == "modp1536":
        return _make_group(name, MODP1536_P)
    raise ValueError(f"unknown group profile {name!r}")


GROUP_PROFILES = ("toy64", "modp1536")
