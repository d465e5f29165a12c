import random
from collections import Counter

import pytest

from anonylink import SCHEME_NAMES, WorldConfig, get_scheme_class, new_world
from anonylink.ledger import WorldError
from anonylink.schemes import AddressScheme, RejectReason, SchemeError, TransactionRejected
from anonylink.schemes.cryptonote import CNTx
from anonylink.schemes.mimblewimble import MWTx
from anonylink.schemes.utxo import MixParticipant
from anonylink.schemes.zerocash import ZerocashPour

from helpers import funded_world, pay, value_for


@pytest.mark.parametrize("scheme", SCHEME_NAMES)
def test_transfer_moves_value_and_conserves(scheme):
    w = funded_world(scheme)
    before0, before1 = w.wallets[0].balance(), w.wallets[1].balance()
    amount = value_for(w, 3)
    pay(w, 0, 1, amount)
    assert w.wallets[0].balance() == before0 - amount
    assert w.wallets[1].balance() == before1 + amount
    assert w.conservation_holds()
    assert not w.pending


@pytest.mark.parametrize("scheme", SCHEME_NAMES)
def test_replayed_transaction_rejected(scheme):
    w = funded_world(scheme)
    t = pay(w, 0, 1)
    with pytest.raises(TransactionRejected) as exc:
        w.submit(t.submitter, t.tx)
    assert exc.value.validation.reason in (RejectReason.DOUBLE_SPEND, RejectReason.DUPLICATE_COMMITMENT)


@pytest.mark.parametrize("scheme", SCHEME_NAMES)
def test_wallet_refuses_spent_or_foreign_coins(scheme):
    w = funded_world(scheme)
    coin = w.wallets[0].unspent()[0]
    w.scheme.transfer(w, 0, 1, [coin], [value_for(w, 3)])
    with pytest.raises(SchemeError):
        w.scheme.transfer(w, 0, 1, [coin], [value_for(w, 3)])
    with pytest.raises(SchemeError):
        w.scheme.transfer(w, 2, 1, [w.wallets[3].unspent()[0]], [value_for(w, 3)])


@pytest.mark.parametrize("scheme", [s for s in SCHEME_NAMES if s != "zerocoin"])
def test_overspend_refused(scheme):
    w = funded_world(scheme)
    coin = w.wallets[0].unspent()[0]
    with pytest.raises(SchemeError):
        w.scheme.transfer(w, 0, 1, [coin], [coin.value + 1])


@pytest.mark.parametrize("scheme", SCHEME_NAMES)
def test_coin_labels_appear_on_ledger(scheme):
    w = funded_world(scheme)
    t = pay(w, 0, 1)
    ids = set()
    for e in w.ledger.entries:
        ids.update(w.scheme.identifiers(e.tx))
    for c in t.new_coins:
        assert w.scheme.coin_label(c) in ids
    for c in t.spent_coins:
        if scheme != "mimblewimble":
            assert w.scheme.consumption_tag(w, c) in ids


def test_too_few_subjects():
    with pytest.raises(WorldError):
        new_world(WorldConfig("cryptonote", subjects=2, ring_size=4))


def test_address_schemes():
    want = {"bitcoin": AddressScheme.PSEUDONYM, "coinjoin": AddressScheme.PSEUDONYM,
            "coinshuffle": AddressScheme.ONE_TIME_ADDRESS, "zerocoin": AddressScheme.ADDRESSLESS,
            "zerocash": AddressScheme.ADDRESS_ENCRYPTION,
            "cryptonote": AddressScheme.ONE_TIME_ADDRESS, "mimblewimble": AddressScheme.ADDRESSLESS}
    assert {s: get_scheme_class(s).address_scheme for s in SCHEME_NAMES} == want


def test_unknown_scheme():
    with pytest.raises(SchemeError):
        get_scheme_class("dash")


# -- transparent schemes -------------------------------------------------------------

def test_bitcoin_reuses_address_for_change():
    w = funded_world("bitcoin")
    t = pay(w, 0, 1)
    addrs = [o.address for o in t.tx.outputs]
    assert w.wallets[0].keys[0] in addrs


@pytest.mark.parametrize("scheme", ["coinjoin", "coinshuffle"])
def test_mix_round_equal_outputs(scheme):
    w = funded_world(scheme, subjects=6, per_subject=1)
    parts = [MixParticipant(s, w.wallets[s].unspent()[0], (s + 1) % 6) for s in range(4)]
    tx, new, order = w.scheme.run_mix_round(w, parts)
    assert len(tx.inputs) == 4 and len({o.value for o in tx.outputs}) == 1
    assert sorted(order) == list(range(4))
    assert w.conservation_holds()
    if scheme == "coinshuffle":
        assert len({o.address for o in tx.outputs}) == len(tx.outputs)


def test_mix_round_needs_two():
    w = funded_world("coinjoin")
    with pytest.raises(SchemeError):
        w.scheme.run_mix_round(w, [MixParticipant(0, w.wallets[0].unspent()[0], 1)])


# -- Zerocoin ----------------------------------------------------------------------------

def test_zerocoin_fixed_denomination():
    w = funded_world("zerocoin")
    with pytest.raises(SchemeError):
        w.scheme.mint(w, 0, w.config.denomination + 1)
    with pytest.raises(SchemeError):
        w.scheme.transfer(w, 0, 1, [w.wallets[0].unspent()[0]], [w.config.denomination + 1])


def test_zerocoin_recipient_draws_serial():
    w = funded_world("zerocoin")
    t = pay(w, 0, 1)
    new = t.new_coins[0]
    assert new.owner == 1 and new.secret.cm == new.public_id
    assert t.share_from == 1 and t.share_to == 0


# -- Zerocash ------------------------------------------------------------------------------

def test_zerocash_serial_replay_rejected():
    w = funded_world("zerocash")
    t = pay(w, 0, 1)
    assert isinstance(t.tx, ZerocashPour)
    v = w.scheme.validate(t.tx, w.ledger)
    assert not v.ok and v.reason is RejectReason.DOUBLE_SPEND


def test_zerocash_cm_sn_independent():
    from scipy.stats import chi2_contingency

    w = new_world(WorldConfig("zerocash", subjects=4, seed=9))
    table = [[0] * 4 for _ in range(4)]
    for i in range(1000):
        coin = w.scheme.mint(w, i % 4, 1 + i % 7)
        cm = bytes.fromhex(w.scheme.coin_label(coin)[3:])
        sn = bytes.fromhex(w.scheme.consumption_tag(w, coin)[3:])
        table[cm[0] >> 6][sn[0] >> 6] += 1
    _, p, _, _ = chi2_contingency(table)
    assert p > 0.01


# -- CryptoNote -----------------------------------------------------------------------------

def test_stealth_addresses_collision_free():
    w = new_world(WorldConfig("cryptonote", subjects=4, seed=4))
    g = w.group
    rng = random.Random(8)
    keys = [w.wallets[s].keys[0] for s in range(4)]
    seen = Counter()
    for i in range(10_000):
        out = w.scheme._make_output(w, keys[i % 4], 1, g.random_scalar(rng), i % 3)
        seen[out.P] += 1
    assert len(seen) == 10_000


def test_stealth_output_recognized_only_by_owner():
    w = new_world(WorldConfig("cryptonote", subjects=4, seed=4))
    g = w.group
    keys = [w.wallets[s].keys[0] for s in range(4)]
    for i in range(50):
        out = w.scheme._make_output(w, keys[0], 5, g.random_scalar(w.rng), 0)
        sec = w.scheme._recognize(w, keys[0], out, 0)
        assert sec is not None and sec.v == 5 and g.exp(g.g, sec.x) == out.P
        assert all(w.scheme._recognize(w, k, out, 0) is None for k in keys[1:])


@pytest.mark.parametrize("n", [1, 2, 4, 8])
def test_rings_have_n_mature_members(n):
    w = funded_world("cryptonote", subjects=max(n, 4), per_subject=3, ring_size=n)
    t = pay(w, 0, 1)
    assert isinstance(t.tx, CNTx)
    st = w.ledger.state
    for ring in t.tx.rings:
        assert len(ring) == n
        assert all(st.output_round[m] <= w.round - w.config.maturity for m in ring)
    assert st.index_of[t.spent_coins[0].public_id] in t.tx.rings[0]


def test_cryptonote_needs_mature_decoys():
    w = new_world(WorldConfig("cryptonote", subjects=4, seed=1))
    for s in range(4):
        w.scheme.mint(w, s, 5)
    with pytest.raises(SchemeError):
        pay(w, 0, 1)


def test_key_image_stable_per_coin():
    w = funded_world("cryptonote")
    coin = w.wallets[0].unspent()[0]
    tag = w.scheme.consumption_tag(w, coin)
    t = w.scheme.transfer(w, 0, 1, [coin], [3])
    assert f"ki:{t.tx.key_images[0]:x}" == tag


def test_ringct_hides_amounts():
    w = funded_world("cryptonote")
    t = pay(w, 0, 1, 3)
    assert all(o.amount not in (3, 7) for o in t.tx.outputs)
    legacy = funded_world("cryptonote", ringct=False)
    t = pay(legacy, 0, 1, 3)
    assert sorted(o.amount for o in t.tx.outputs) == [3, 7]


# -- Mimblewimble -------------------------------------------------------------------------------

def test_mimblewimble_balance_and_submitter():
    w = funded_world("mimblewimble")
    coin = w.wallets[0].unspent()[0]
    t = w.scheme.transfer(w, 0, 1, [coin], [coin.value])
    assert isinstance(t.tx, MWTx) and t.submitter == 1
    g = w.group
    ident = g.mul(*t.tx.outputs, g.inv(g.mul(*t.tx.inputs)), g.inv(t.tx.kernel_excess))
    assert ident == 1


def test_mimblewimble_change_pre_split():
    w = funded_world("mimblewimble")
    n = len(w.ledger)
    coin = w.wallets[0].unspent()[0]
    w.scheme.transfer(w, 0, 1, [coin], [3])
    assert len(w.ledger) == n + 2
    assert w.wallets[0].balance() == 2 * 10 - 3
    assert w.conservation_holds()


def test_mimblewimble_wrong_excess_rejected():
    w = funded_world("mimblewimble")
    coin = w.wallets[0].unspent()[0]
    g = w.group
    t = w.scheme.build_transfer(w, 0, 1, [coin], [coin.value], {"excess": g.exp(g.g, 12345)})
    v = w.scheme.validate(t.tx, w.ledger)
    assert not v.ok and v.reason is RejectReason.UNBALANCED
