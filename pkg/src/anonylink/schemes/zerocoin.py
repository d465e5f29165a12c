"""Zerocoin: fixed-denomination coins, commitment on mint, serial on spend.

There are no addresses.  To receive, a party generates its own coin secret
``(serial, r)`` and hands only ``cm = COMM_r(serial)`` to the payer, so the
payer never learns the serial that will later be revealed.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..crypto import comm
from .base import (AddressScheme, Coin, CoinScheme, ProofToken, RejectReason, SchemeError,
                   Transfer, Validation, check_proof, prove)


@dataclass(frozen=True)
class ZerocoinSecret:
    serial: bytes
    r: bytes
    cm: bytes


@dataclass(frozen=True)
class ZerocoinRequest:
    """Recipient -> payer: the commitment to mint for me."""

    cm_new: bytes


@dataclass(frozen=True)
class ZerocoinMint:
    cm: bytes
    denomination: int
    proof_mint: ProofToken


@dataclass(frozen=True)
class ZerocoinSpend:
    serial: bytes
    cm_new: bytes
    denomination: int
    proof_spend: ProofToken


def zerocoin_commitment(serial: bytes, r: bytes) -> bytes:
    return comm(r, "zerocoin", serial)


class ZerocoinState:
    def __init__(self):
        self.cms: set[bytes] = set()
        self.serials: set[bytes] = set()


class ZerocoinScheme(CoinScheme):
    name = "zerocoin"
    display_name = "Zerocoin"
    address_scheme = AddressScheme.ADDRESSLESS
    has_secret_sharing = True
    fixed_denomination = True
    opaque_transactions = True

    @property
    def denomination(self) -> int:
        return self.config.denomination

    def new_state(self):
        return ZerocoinState()

    def keygen(self, world, subject):
        world._require(subject)
        return None

    def _draft(self, world, subject) -> ZerocoinSecret:
        serial, r = world.rng.randbytes(32), world.rng.randbytes(32)
        sec = ZerocoinSecret(serial, r, zerocoin_commitment(serial, r))
        world.wallets[subject].drafts[sec.cm] = sec
        return sec

    def mint(self, world, subject, v, params=None):
        from ..ledger import FAUCET
        if v != self.denomination:
            raise SchemeError(f"zerocoin mints only the fixed denomination {self.denomination}")
        sec = self._draft(world, subject)
        body = (sec.cm, v)
        coin = Coin(world.new_coin_id(), subject, v, sec.cm)
        world.submit(FAUCET, ZerocoinMint(*body, prove(world.ledger, "zcoin-mint", body, None)),
                     new_coins=[coin])
        world.mint_submitted(coin)
        self.scan_and_receive(world, subject)
        return coin

    def build_transfer(self, world, sender, recipient, coins, amounts, params=None):
        if len(coins) != 1 or list(amounts) != [self.denomination]:
            raise SchemeError("a zerocoin transfer moves exactly one coin of the denomination")
        self._check_spend(world, sender, coins, amounts)
        st: ZerocoinState = world.ledger.state
        old: ZerocoinSecret = coins[0].secret
        # Accumulator membership as an ideal set-membership oracle.
        failure = None
        if old.cm not in st.cms or zerocoin_commitment(old.serial, old.r) != old.cm:
            failure = RejectReason.MALFORMED
        new = self._draft(world, recipient)
        body = (old.serial, new.cm, self.denomination)
        tx = ZerocoinSpend(*body, prove(world.ledger, "zcoin-spend", body, failure))
        coin = Coin(world.new_coin_id(), recipient, self.denomination, new.cm)
        return Transfer(tx, ZerocoinRequest(new.cm), recipient, sender, sender,
                        new_coins=[coin], spent_coins=list(coins))

    def scan_and_receive(self, world, recipient):
        wallet = world.wallets[recipient]
        st: ZerocoinState = world.ledger.state
        found = []
        for cm, sec in list(wallet.drafts.items()):
            if cm in st.cms:
                coin = world.receive(recipient, cm)
                if coin is not None:
                    coin.secret = sec
                    found.append(coin)
                del wallet.drafts[cm]
        return found

    def validate(self, tx, ledger):
        st: ZerocoinState = ledger.state
        if isinstance(tx, ZerocoinMint):
            if tx.denomination != self.denomination:
                return Validation.reject(RejectReason.MALFORMED, "wrong denomination")
            if tx.cm in st.cms:
                return Validation.reject(RejectReason.DUPLICATE_COMMITMENT, "cm already listed")
            return check_proof(ledger, "zcoin-mint", tx, tx.proof_mint)
        if not isinstance(tx, ZerocoinSpend):
            return Validation.reject(RejectReason.MALFORMED, "unknown transaction type")
        if tx.denomination != self.denomination:
            return Validation.reject(RejectReason.UNBALANCED, "wrong denomination")
        if tx.serial in st.serials:
            return Validation.reject(RejectReason.DOUBLE_SPEND, "serial seen before")
        if tx.cm_new in st.cms:
            return Validation.reject(RejectReason.DUPLICATE_COMMITMENT, "cm already listed")
        return check_proof(ledger, "zcoin-spend", tx, tx.proof_spend)

    def apply(self, tx, ledger):
        st: ZerocoinState = ledger.state
        if isinstance(tx, ZerocoinMint):
            st.cms.add(tx.cm)
        else:
            st.serials.add(tx.serial)
            st.cms.add(tx.cm_new)

    def coin_label(self, coin):
        return f"cm:{coin.public_id.hex()}"

    def consumption_tag(self, world, coin):
        return f"sn:{coin.secret.serial.hex()}"

    def identifiers(self, tx):
        if isinstance(tx, ZerocoinMint):
            return [f"cm:{tx.cm.hex()}"]
        return [f"sn:{tx.serial.hex()}", f"cm:{tx.cm_new.hex()}"]

    def truth_records(self, tx, new_coins, spent_coins, round_):
        from ..ledger import TruthRecord
        for c in new_coins:
            yield f"cm:{c.public_id.hex()}", TruthRecord(c.owner, c.coin_id, c.value, round_, "created")
        if isinstance(tx, ZerocoinSpend):
            c = spent_coins[0]
            yield f"sn:{tx.serial.hex()}", TruthRecord(c.owner, c.coin_id, c.value, round_, "consumed")
