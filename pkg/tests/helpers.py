"""Shared world-building helpers for the tests."""
from anonylink import WorldConfig, new_world


def value_for(world, v=10):
    return world.config.denomination if world.scheme.fixed_denomination else v


def funded_world(scheme, subjects=5, per_subject=2, seed=1, **kw):
    w = new_world(WorldConfig(scheme, subjects=subjects, seed=seed, **kw))
    for s in range(subjects):
        for _ in range(per_subject):
            w.scheme.mint(w, s, value_for(w))
    w.advance(w.config.maturity + 1)
    return w


def pay(world, sender, recipient, amount=None):
    coin = world.wallets[sender].unspent()[0]
    amount = value_for(world, 3) if amount is None else amount
    return world.scheme.transfer(world, sender, recipient, [coin], [amount])
