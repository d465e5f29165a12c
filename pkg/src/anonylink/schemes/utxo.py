"""Transparent UTXO schemes: plain Bitcoin, CoinJoin and Coinshuffle.

All three share one cleartext transaction format.  They differ in how
addresses are chosen and in whether transfers go through joint mixing rounds.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..crypto import hash_bytes
from .base import (ACCEPT, AddressScheme, Coin, CoinScheme, ProofToken, RejectReason,
                   SchemeError, Transfer, Validation, check_proof, prove)


@dataclass(frozen=True, order=True)
class Outpoint:
    txid: bytes
    index: int


@dataclass(frozen=True)
class TxOut:
    address: bytes
    value: int


@dataclass(frozen=True)
class UtxoTx:
    kind: str  # "mint", "transfer" or "mix"
    inputs: tuple[Outpoint, ...]
    outputs: tuple[TxOut, ...]
    nonce: bytes
    proof_auth: ProofToken


@dataclass(frozen=True)
class MixParticipant:
    sender: int
    coin: Coin
    recipient: int
    # CoinJoin only: output address chosen by the participant (may be reused).
    address: bytes | None = None


class UtxoState:
    def __init__(self):
        self.utxos: dict[Outpoint, TxOut] = {}
        self.spent: set[Outpoint] = set()
        self.txids: set[bytes] = set()
        # txid of each ledger entry, in ledger order.
        self.entry_txids: list[bytes] = []


def txid_of(kind, inputs, outputs, nonce) -> bytes:
    return hash_bytes("anonylink.txid", repr((kind, inputs, outputs, nonce)))


class BitcoinScheme(CoinScheme):
    name = "bitcoin"
    display_name = "Bitcoin"
    address_scheme = AddressScheme.PSEUDONYM
    one_time_addresses = False

    def new_state(self):
        return UtxoState()

    def keygen(self, world, subject):
        """A fresh pseudonymous address (hash of a random public key)."""
        world._require(subject)
        return hash_bytes("anonylink.addr", world.rng.randbytes(32))

    def new_address(self, world, subject) -> bytes:
        addr = self.keygen(world, subject)
        world.wallets[subject].keys.append(addr)
        return addr

    def primary_address(self, world, subject) -> bytes:
        return world.wallets[subject].keys[0]

    def recipient_address(self, world, recipient) -> bytes:
        if self.one_time_addresses:
            return self.new_address(world, recipient)
        return self.primary_address(world, recipient)

    # -- transactions ----------------------------------------------------------
    def _finish(self, world, kind, inputs, outs, owners, failure=None):
        nonce = world.rng.randbytes(8)
        inputs, outputs = tuple(inputs), tuple(TxOut(a, v) for a, v in outs)
        body = (kind, inputs, outputs, nonce)
        token = prove(world.ledger, "utxo", body, failure)
        tx = UtxoTx(kind, inputs, outputs, nonce, token)
        txid = txid_of(*body)
        coins = [Coin(world.new_coin_id(), owner, out.value, Outpoint(txid, i))
                 for i, (out, owner) in enumerate(zip(outputs, owners))]
        return tx, coins

    def mint(self, world, subject, v, params=None):
        params = params or {}
        if v <= 0:
            raise SchemeError("mint value must be positive")
        addr = self.new_address(world, subject) if params.get("fresh_address") \
            else self.primary_address(world, subject)
        from ..ledger import FAUCET
        tx, coins = self._finish(world, "mint", (), [(addr, v)], [subject])
        world.submit(FAUCET, tx, new_coins=coins)
        world.mint_submitted(coins[0])
        self.scan_and_receive(world, subject)
        return coins[0]

    def build_transfer(self, world, sender, recipient, coins, amounts, params=None):
        params = params or {}
        change = self._check_spend(world, sender, coins, amounts)
        outs, owners = [], []
        for a in amounts:
            outs.append((params.get("address") or self.recipient_address(world, recipient), a))
            owners.append(recipient)
        if change:
            change_addr = self.new_address(world, sender) if self.one_time_addresses \
                else self.primary_address(world, sender)
            outs.append((change_addr, change))
            owners.append(sender)
        tx, new = self._finish(world, "transfer", [c.public_id for c in coins], outs, owners)
        return Transfer(tx, None, sender, recipient, sender, new_coins=new, spent_coins=list(coins))

    def scan_and_receive(self, world, recipient):
        wallet = world.wallets[recipient]
        mine = set(wallet.keys)
        found = []
        entries = world.ledger.entries
        txids = world.ledger.state.entry_txids
        for entry in entries[wallet.scan_cursor:]:
            tx = entry.tx
            txid = txids[entry.index]
            for i, out in enumerate(tx.outputs):
                if out.address in mine:
                    coin = world.receive(recipient, Outpoint(txid, i))
                    if coin is not None:
                        found.append(coin)
        wallet.scan_cursor = len(entries)
        return found

    def validate(self, tx, ledger):
        st: UtxoState = ledger.state
        if not isinstance(tx, UtxoTx) or tx.kind not in ("mint", "transfer", "mix"):
            return Validation.reject(RejectReason.MALFORMED, "unknown transaction kind")
        if not tx.outputs or any(not isinstance(o.value, int) or o.value <= 0 for o in tx.outputs):
            return Validation.reject(RejectReason.MALFORMED, "bad outputs")
        if tx.kind == "mint":
            if tx.inputs:
                return Validation.reject(RejectReason.MALFORMED, "mint with inputs")
        else:
            if not tx.inputs:
                return Validation.reject(RejectReason.MALFORMED, "no inputs")
            if len(set(tx.inputs)) != len(tx.inputs):
                return Validation.reject(RejectReason.DOUBLE_SPEND, "input repeated")
            total_in = 0
            for op in tx.inputs:
                if op in st.spent:
                    return Validation.reject(RejectReason.DOUBLE_SPEND, "input already spent")
                out = st.utxos.get(op)
                if out is None:
                    return Validation.reject(RejectReason.MALFORMED, "unknown input")
                total_in += out.value
            if total_in != sum(o.value for o in tx.outputs):
                return Validation.reject(RejectReason.UNBALANCED, "inputs != outputs")
        if txid_of(tx.kind, tx.inputs, tx.outputs, tx.nonce) in st.txids:
            return Validation.reject(RejectReason.DUPLICATE_COMMITMENT, "duplicate transaction")
        return check_proof(ledger, "utxo", tx, tx.proof_auth)

    def apply(self, tx, ledger):
        st: UtxoState = ledger.state
        txid = txid_of(tx.kind, tx.inputs, tx.outputs, tx.nonce)
        st.txids.add(txid)
        st.entry_txids.append(txid)
        for op in tx.inputs:
            del st.utxos[op]
            st.spent.add(op)
        for i, out in enumerate(tx.outputs):
            st.utxos[Outpoint(txid, i)] = out

    def identifiers(self, tx):
        txid = txid_of(tx.kind, tx.inputs, tx.outputs, tx.nonce)
        return [f"out:{txid.hex()}:{i}" for i in range(len(tx.outputs))]

    def truth_records(self, tx, new_coins, spent_coins, round_):
        from ..ledger import TruthRecord
        for c in new_coins:
            yield (f"out:{c.public_id.txid.hex()}:{c.public_id.index}",
                   TruthRecord(c.owner, c.coin_id, c.value, round_, "created"))

    @staticmethod
    def outpoint_key(op: Outpoint) -> str:
        return f"out:{op.txid.hex()}:{op.index}"

    def coin_label(self, coin):
        return self.outpoint_key(coin.public_id)

    def consumption_tag(self, world, coin):
        return self.outpoint_key(coin.public_id)


class CoinJoinScheme(BitcoinScheme):
    name = "coinjoin"
    display_name = "CoinJoin"
    is_mixer = True

    def run_mix_round(self, world, participants: list[MixParticipant]):
        if len(participants) < 2:
            raise SchemeError("a mixing round needs at least 2 participants")
        senders = [p.sender for p in participants]
        for p in participants:
            self._check_spend(world, p.sender, [p.coin], [])
        denom = min(p.coin.value for p in participants)
        order = list(range(len(participants)))
        world.rng.shuffle(order)
        outs, owners = [], []
        for k in order:
            p = participants[k]
            outs.append((self._mix_output_address(world, p), denom))
            owners.append(p.recipient)
        # Change, if any, goes back to each sender's own primary address.
        for p in participants:
            if p.coin.value > denom:
                outs.append((self.primary_address(world, p.sender), p.coin.value - denom))
                owners.append(p.sender)
        tx, new = self._finish(world, "mix", [p.coin.public_id for p in participants], outs, owners)
        submitter = world.rng.choice(senders)
        t = Transfer(tx, None, submitter, submitter, submitter,
                     new_coins=new, spent_coins=[p.coin for p in participants])
        self._execute(world, t)
        return tx, new, order

    def _mix_output_address(self, world, p: MixParticipant) -> bytes:
        return p.address or self.primary_address(world, p.recipient)


class CoinshuffleScheme(CoinJoinScheme):
    name = "coinshuffle"
    display_name = "Coinshuffle"
    address_scheme = AddressScheme.ONE_TIME_ADDRESS
    one_time_addresses = True

    def _mix_output_address(self, world, p: MixParticipant) -> bytes:
        return self.new_address(world, p.recipient)
