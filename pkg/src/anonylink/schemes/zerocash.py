"""Zerocash: coin commitments on creation, serial numbers on consumption.

A note is ``(a_pk, v, rho, r, s)`` with ``cm = COMM_s(COMM_r(a_pk || rho) || v)``
and serial ``sn = PRF_{a_sk}(rho)``.  Only the holder of ``a_sk`` can compute
``sn``, so the ledger shows two unrelated-looking identifiers per coin.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..crypto import comm, prf
from .base import (AddressScheme, Coin, CoinScheme, ProofToken, RejectReason, SchemeError,
                   Transfer, Validation, check_proof, prove)


@dataclass(frozen=True)
class ZerocashKeys:
    a_sk: bytes
    a_pk: bytes


@dataclass(frozen=True)
class ZerocashNote:
    a_pk: bytes
    v: int
    rho: bytes
    r: bytes
    s: bytes
    cm: bytes


@dataclass(frozen=True)
class ZerocashShare:
    """What the sender discloses to the recipient of a pour."""

    note: ZerocashNote
    sn_old: tuple[bytes, ...]


@dataclass(frozen=True)
class ZerocashMint:
    cm: bytes
    proof_mint: ProofToken


@dataclass(frozen=True)
class ZerocashPour:
    sn_old: tuple[bytes, ...]
    cm_new: tuple[bytes, ...]
    proof_pour: ProofToken


def coin_commitment(a_pk: bytes, v: int, rho: bytes, r: bytes, s: bytes) -> bytes:
    k = comm(r, a_pk, rho)
    return comm(s, k, v)


def serial_number(a_sk: bytes, rho: bytes) -> bytes:
    return prf(a_sk, "sn", rho)


def derive_pk(a_sk: bytes) -> bytes:
    return prf(a_sk, "addr", 0)


class ZerocashState:
    def __init__(self):
        self.cms: set[bytes] = set()
        self.sns: set[bytes] = set()


class ZerocashScheme(CoinScheme):
    name = "zerocash"
    display_name = "Zerocash"
    address_scheme = AddressScheme.ADDRESS_ENCRYPTION
    has_secret_sharing = True
    hides_values = True
    opaque_transactions = True

    def new_state(self):
        return ZerocashState()

    def keygen(self, world, subject):
        world._require(subject)
        a_sk = world.rng.randbytes(32)
        return ZerocashKeys(a_sk, derive_pk(a_sk))

    def _new_note(self, world, a_pk: bytes, v: int, params: dict) -> ZerocashNote:
        rho = params.get("rho") or world.rng.randbytes(32)
        r = params.get("r") or world.rng.randbytes(32)
        s = params.get("s") or world.rng.randbytes(32)
        return ZerocashNote(a_pk, v, rho, r, s, coin_commitment(a_pk, v, rho, r, s))

    def mint(self, world, subject, v, params=None):
        from ..ledger import FAUCET
        if v <= 0:
            raise SchemeError("mint value must be positive")
        note = self._new_note(world, world.wallets[subject].keys[0].a_pk, v, params or {})
        token = prove(world.ledger, "zc-mint", (note.cm,), None)
        coin = Coin(world.new_coin_id(), subject, v, note.cm)
        world.submit(FAUCET, ZerocashMint(note.cm, token), new_coins=[coin])
        world.mint_submitted(coin)
        world.faucet_deliver(subject, ZerocashShare(note, ()))
        self.scan_and_receive(world, subject)
        return coin

    def build_transfer(self, world, sender, recipient, coins, amounts, params=None):
        params = params or {}
        change = self._check_spend(world, sender, coins, amounts)
        st: ZerocashState = world.ledger.state
        # Witness check performed privately by the ideal verifier.
        failure = None
        sn_old = []
        for c in coins:
            note, keys = c.secret
            if note.cm not in st.cms or derive_pk(keys.a_sk) != note.a_pk:
                failure = RejectReason.MALFORMED
            sn_old.append(serial_number(keys.a_sk, note.rho))
        b_pk = world.wallets[recipient].keys[0].a_pk
        # "inflate" models a cheating sender minting value out of thin air.
        inflated = [a + (params.get("inflate", 0) if i == 0 else 0) for i, a in enumerate(amounts)]
        new_notes = [self._new_note(world, b_pk, a, params) for a in inflated]
        owners = [recipient] * len(amounts)
        if change:
            new_notes.append(self._new_note(world, world.wallets[sender].keys[0].a_pk, change, {}))
            owners.append(sender)
        v_old = sum(c.secret[0].v for c in coins)
        v_new = sum(n.v for n in new_notes)
        if v_old != v_new:
            failure = failure or RejectReason.UNBALANCED
        for n in new_notes:
            if coin_commitment(n.a_pk, n.v, n.rho, n.r, n.s) != n.cm:
                failure = failure or RejectReason.MALFORMED
        body = (tuple(sn_old), tuple(n.cm for n in new_notes))
        tx = ZerocashPour(*body, prove(world.ledger, "zc-pour", body, failure))
        new_coins = [Coin(world.new_coin_id(), o, n.v, n.cm) for n, o in zip(new_notes, owners)]
        shares = [ZerocashShare(n, tuple(sn_old)) for n, o in zip(new_notes, owners) if o == recipient]
        for n, o in zip(new_notes, owners):
            if o == sender:
                world.wallets[sender].drafts[n.cm] = n
        share = shares[0] if len(shares) == 1 else tuple(shares)
        return Transfer(tx, share, sender, recipient, sender,
                        new_coins=new_coins, spent_coins=list(coins))

    def scan_and_receive(self, world, recipient):
        wallet = world.wallets[recipient]
        st: ZerocashState = world.ledger.state
        keys = {k.a_pk: k for k in wallet.keys}
        found = []
        notes = list(wallet.drafts.values())
        for _, _, share in wallet.received_shares[wallet.share_cursor:]:
            for sh in (share if isinstance(share, tuple) else (share,)):
                if isinstance(sh, ZerocashShare):
                    notes.append(sh.note)
        wallet.share_cursor = len(wallet.received_shares)
        for note in notes:
            k = keys.get(note.a_pk)
            if k is None or coin_commitment(note.a_pk, note.v, note.rho, note.r, note.s) != note.cm:
                continue
            if note.cm not in st.cms:
                wallet.drafts[note.cm] = note
                continue
            coin = world.receive(recipient, note.cm)
            if coin is not None:
                coin.secret = (note, k)
                found.append(coin)
            wallet.drafts.pop(note.cm, None)
        return found

    def validate(self, tx, ledger):
        st: ZerocashState = ledger.state
        if isinstance(tx, ZerocashMint):
            if not isinstance(tx.cm, bytes) or len(tx.cm) != 32:
                return Validation.reject(RejectReason.MALFORMED, "bad commitment")
            if tx.cm in st.cms:
                return Validation.reject(RejectReason.DUPLICATE_COMMITMENT, "cm already listed")
            return check_proof(ledger, "zc-mint", tx, tx.proof_mint)
        if not isinstance(tx, ZerocashPour):
            return Validation.reject(RejectReason.MALFORMED, "unknown transaction type")
        if not tx.sn_old or not tx.cm_new:
            return Validation.reject(RejectReason.MALFORMED, "empty pour")
        if len(set(tx.sn_old)) != len(tx.sn_old) or any(sn in st.sns for sn in tx.sn_old):
            return Validation.reject(RejectReason.DOUBLE_SPEND, "serial number seen before")
        if len(set(tx.cm_new)) != len(tx.cm_new) or any(cm in st.cms for cm in tx.cm_new):
            return Validation.reject(RejectReason.DUPLICATE_COMMITMENT, "cm already listed")
        return check_proof(ledger, "zc-pour", tx, tx.proof_pour)

    def apply(self, tx, ledger):
        st: ZerocashState = ledger.state
        if isinstance(tx, ZerocashMint):
            st.cms.add(tx.cm)
        else:
            st.sns.update(tx.sn_old)
            st.cms.update(tx.cm_new)

    def coin_label(self, coin):
        return f"cm:{coin.public_id.hex()}"

    def consumption_tag(self, world, coin):
        note, keys = coin.secret
        return f"sn:{serial_number(keys.a_sk, note.rho).hex()}"

    def identifiers(self, tx):
        if isinstance(tx, ZerocashMint):
            return [f"cm:{tx.cm.hex()}"]
        return [f"sn:{sn.hex()}" for sn in tx.sn_old] + [f"cm:{cm.hex()}" for cm in tx.cm_new]

    def truth_records(self, tx, new_coins, spent_coins, round_):
        from ..ledger import TruthRecord
        for c in new_coins:
            yield f"cm:{c.public_id.hex()}", TruthRecord(c.owner, c.coin_id, c.value, round_, "created")
        if isinstance(tx, ZerocashPour):
            for sn, c in zip(tx.sn_old, spent_coins):
                yield f"sn:{sn.hex()}", TruthRecord(c.owner, c.coin_id, c.value, round_, "consumed")
