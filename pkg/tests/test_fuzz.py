"""Single-field mutations of genuine transactions must never validate."""
import dataclasses
import random

import pytest

from anonylink import SCHEME_NAMES, WorldConfig, new_world
from anonylink.schemes.utxo import MixParticipant

MUTATIONS_PER_SCHEME = 1000


def leaves(obj, path=()):
    if dataclasses.is_dataclass(obj):
        for f in dataclasses.fields(obj):
            yield from leaves(getattr(obj, f.name), path + (f.name,))
    elif isinstance(obj, (tuple, list)):
        for i, x in enumerate(obj):
            yield from leaves(x, path + (i,))
    else:
        yield path, obj


def set_path(obj, path, value):
    if not path:
        return value
    head, rest = path[0], path[1:]
    if dataclasses.is_dataclass(obj):
        return dataclasses.replace(obj, **{head: set_path(getattr(obj, head), rest, value)})
    items = list(obj)
    items[head] = set_path(items[head], rest, value)
    return type(obj)(items)


def mutate(value, rng):
    if isinstance(value, bool):
        return not value
    if isinstance(value, int):
        return value + rng.choice([1, -1, 2 ** 16, rng.randrange(1, 2 ** 64)])
    if isinstance(value, bytes):
        if not value:
            return b"\x00"
        i = rng.randrange(len(value))
        return value[:i] + bytes([value[i] ^ (1 << rng.randrange(8))]) + value[i + 1:]
    if isinstance(value, str):
        return value + "x"
    raise TypeError(type(value))


class Fuzzer:
    """Wraps ``World.submit``: every genuine transaction is validated as-is
    and under random single-field mutations just before it is applied."""

    def __init__(self, world, rng, per_tx):
        self.world, self.rng, self.per_tx = world, rng, per_tx
        self.accepted = self.tried = 0
        self.escaped = []
        self._submit = world.submit
        world.submit = self.submit

    def submit(self, submitter, tx, new_coins=(), spent_coins=()):
        w = self.world
        w.ledger.round = w.round
        assert w.scheme.validate(tx, w.ledger).ok
        self.accepted += 1
        paths = [p for p, _ in leaves(tx)]
        for _ in range(self.per_tx):
            path = self.rng.choice(paths)
            old = dict(leaves(tx))[path]
            bad = set_path(tx, path, mutate(old, self.rng))
            self.tried += 1
            if w.scheme.validate(bad, w.ledger).ok:
                self.escaped.append((path, old))
        return self._submit(submitter, tx, new_coins, spent_coins)


def drive(world):
    """Mints, plain transfers with and without change, and a mixing round."""
    sch = world.scheme
    v = world.config.denomination if sch.fixed_denomination else 10
    for s in world.subjects:
        for _ in range(2):
            sch.mint(world, s, v)
    world.advance(world.config.maturity + 1)
    for s in world.subjects[:4]:
        coin = world.wallets[s].unspent()[0]
        amt = v if sch.fixed_denomination or s % 2 else 4
        sch.transfer(world, s, (s + 1) % len(world.subjects), [coin], [amt])
        world.advance(1)
    if sch.is_mixer:
        parts = [MixParticipant(s, world.wallets[s].unspent()[0], (s + 2) % 6) for s in range(4, 6)]
        sch.run_mix_round(world, parts)


@pytest.mark.parametrize("scheme", SCHEME_NAMES)
def test_mutations_rejected_originals_accepted(scheme):
    world = new_world(WorldConfig(scheme, subjects=6, seed=17))
    fz = Fuzzer(world, random.Random(scheme), per_tx=1)
    drive(world)
    n_tx = fz.accepted
    world2 = new_world(WorldConfig(scheme, subjects=6, seed=17))
    fz = Fuzzer(world2, random.Random(scheme), per_tx=-(-MUTATIONS_PER_SCHEME // n_tx))
    drive(world2)
    assert fz.tried >= MUTATIONS_PER_SCHEME
    assert fz.accepted == n_tx and world2.conservation_holds()
    assert fz.escaped == []


def test_helpers_roundtrip():
    from anonylink.schemes.utxo import Outpoint, TxOut, UtxoTx
    from anonylink.schemes.base import ProofToken
    tx = UtxoTx("transfer", (Outpoint(b"ab", 0),), (TxOut(b"x", 5),), b"n", ProofToken(b"s", True))
    paths = dict(leaves(tx))
    assert paths[("outputs", 0, "value")] == 5
    t2 = set_path(tx, ("outputs", 0, "value"), 6)
    assert t2.outputs[0].value == 6 and tx.outputs[0].value == 5
    assert set_path(tx, ("proof_auth", "verified"), False).proof_auth.verified is False
