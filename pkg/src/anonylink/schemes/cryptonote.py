"""CryptoNote: stealth addresses, ring spends with key images, Ring CT amounts.

Recipient keys are ``A = G^a, B = G^b``.  The sender picks a nonce ``r`` and
publishes ``R = G^r`` and the one-time destination ``P = G^{Hs(A^r, i)} * B``.
Only the holder of ``a`` can recognize ``P`` (``R^a = A^r``); only the holder
of ``b`` as well can spend it, with key ``x = Hs(R^a, i) + b``.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..crypto import hash_bytes
from .base import (AddressScheme, Coin, CoinScheme, ProofToken, RejectReason, SchemeError,
                   Transfer, Validation, check_proof, prove)


@dataclass(frozen=True)
class CryptoNoteKeys:
    a: int
    b: int
    A: int
    B: int


@dataclass(frozen=True)
class CNOutput:
    P: int
    R: int
    # Ring CT: Pedersen commitment; legacy mode: cleartext amount.
    amount: int
    # Ring CT: amount masked with a shared-secret pad, else 0.
    enc_amount: int
    # One byte of H(shared secret): lets wallets skip most outputs after one exponentiation.
    view_tag: int = 0


@dataclass(frozen=True)
class CNSecret:
    x: int
    v: int
    mask: int
    P: int


@dataclass(frozen=True)
class CNMint:
    outputs: tuple[CNOutput, ...]
    proof_mint: ProofToken


@dataclass(frozen=True)
class CNTx:
    rings: tuple[tuple[int, ...], ...]
    key_images: tuple[int, ...]
    outputs: tuple[CNOutput, ...]
    proof_ring: ProofToken


@dataclass(frozen=True)
class CNShare:
    """Out-of-band payment notice: destination key, amount and tx public key."""

    P: int
    v: int
    R: int


def view_tag(shared: int, i: int) -> int:
    return hash_bytes("anonylink.vtag", shared, i)[0]


class CryptoNoteState:
    def __init__(self):
        self.outputs: list[CNOutput] = []
        self.output_round: list[int] = []
        self.index_of: dict[int, int] = {}
        self.key_images: set[int] = set()


class CryptoNoteScheme(CoinScheme):
    name = "cryptonote"
    display_name = "CryptoNote"
    address_scheme = AddressScheme.ONE_TIME_ADDRESS
    has_secret_sharing = True
    hides_values = True

    @property
    def ring_size(self) -> int:
        return self.config.ring_size

    @property
    def maturity(self) -> int:
        return self.config.maturity

    def min_subjects(self) -> int:
        return self.config.ring_size

    def new_state(self):
        return CryptoNoteState()

    def keygen(self, world, subject):
        world._require(subject)
        g = world.group
        a, b = g.random_scalar(world.rng), g.random_scalar(world.rng)
        return CryptoNoteKeys(a, b, g.exp(g.g, a), g.exp(g.g, b))

    # -- output construction ---------------------------------------------------
    def _make_output(self, world, keys: CryptoNoteKeys, v: int, r: int, i: int) -> CNOutput:
        g = world.group
        shared = g.exp(keys.A, r)
        R = g.exp(g.g, r)
        P = g.mul(g.exp(g.g, g.hash_to_scalar("stealth", shared, i)), keys.B)
        tag = view_tag(shared, i)
        if self.config.ringct:
            mask = g.hash_to_scalar("mask", shared, i)
            pad = g.hash_to_scalar("amount", shared, i)
            return CNOutput(P, R, g.commit(mask, v), (v + pad) % g.q, tag)
        return CNOutput(P, R, v, 0, tag)

    def _recognize(self, world, keys: CryptoNoteKeys, out: CNOutput, i: int) -> CNSecret | None:
        g = world.group
        shared = g.exp(out.R, keys.a)
        if view_tag(shared, i) != out.view_tag:
            return None
        hs = g.hash_to_scalar("stealth", shared, i)
        if g.mul(g.exp(g.g, hs), keys.B) != out.P:
            return None
        if self.config.ringct:
            mask = g.hash_to_scalar("mask", shared, i)
            v = (out.enc_amount - g.hash_to_scalar("amount", shared, i)) % g.q
            if g.commit(mask, v) != out.amount:
                return None
        else:
            mask, v = 0, out.amount
        return CNSecret((hs + keys.b) % g.q, v, mask, out.P)

    def key_image(self, world, sec: CNSecret) -> int:
        g = world.group
        return g.exp(g.hash_to_group("key-image", sec.P), sec.x)

    def _outputs_tx(self, world, dests, params) -> tuple[list[CNOutput], int]:
        g = world.group
        r = params.get("r") or g.random_scalar(world.rng)
        outs = [self._make_output(world, world.wallets[s].keys[0], v, r, i)
                for i, (s, v) in enumerate(dests)]
        return outs, r

    def mint(self, world, subject, v, params=None):
        from ..ledger import FAUCET
        if v <= 0:
            raise SchemeError("mint value must be positive")
        outs, _ = self._outputs_tx(world, [(subject, v)], params or {})
        body = (tuple(outs),)
        coin = Coin(world.new_coin_id(), subject, v, outs[0].P)
        world.submit(FAUCET, CNMint(*body, prove(world.ledger, "cn-mint", body, None)),
                     new_coins=[coin])
        world.mint_submitted(coin)
        self.scan_and_receive(world, subject)
        return coin

    def eligible_decoys(self, world, exclude: set[int]) -> list[int]:
        st: CryptoNoteState = world.ledger.state
        cutoff = world.round - self.maturity
        return [i for i, rnd in enumerate(st.output_round) if rnd <= cutoff and i not in exclude]

    def build_transfer(self, world, sender, recipient, coins, amounts, params=None):
        params = params or {}
        change = self._check_spend(world, sender, coins, amounts)
        st: CryptoNoteState = world.ledger.state
        g = world.group
        rings, images = [], []
        real = {st.index_of[c.public_id] for c in coins}
        failure = None
        forced = params.get("rings")
        for k, c in enumerate(coins):
            sec: CNSecret = c.secret
            idx = st.index_of[c.public_id]
            if forced is not None:
                ring = tuple(sorted(forced[k]))
            else:
                # Decoys: uniform over mature outputs other than the real ones.
                pool = self.eligible_decoys(world, real)
                if len(pool) < self.ring_size - 1:
                    raise SchemeError(f"only {len(pool)} mature decoys for ring size {self.ring_size}")
                ring = tuple(sorted(world.rng.sample(pool, self.ring_size - 1) + [idx]))
            if idx not in ring or g.exp(g.g, sec.x) != sec.P:
                failure = RejectReason.MALFORMED
            rings.append(ring)
            images.append(self.key_image(world, sec))
        dests = [(recipient, a) for a in amounts]
        if change:
            dests.append((sender, change))
        outs, r = self._outputs_tx(world, dests, params)
        v_in = sum(c.secret.v for c in coins)
        v_out = sum(v for _, v in dests) + params.get("inflate", 0)
        if v_in != v_out:
            failure = failure or RejectReason.UNBALANCED
        body = (tuple(rings), tuple(images), tuple(outs))
        tx = CNTx(*body, prove(world.ledger, "cn-ring", body, failure))
        new_coins = [Coin(world.new_coin_id(), s, v, o.P) for (s, v), o in zip(dests, outs)]
        share = CNShare(outs[0].P, amounts[0], outs[0].R)
        return Transfer(tx, share, sender, recipient, sender,
                        new_coins=new_coins, spent_coins=list(coins))

    def scan_and_receive(self, world, recipient):
        wallet = world.wallets[recipient]
        found = []
        entries = world.ledger.entries
        for entry in entries[wallet.scan_cursor:]:
            for i, out in enumerate(entry.tx.outputs):
                for keys in wallet.keys:
                    sec = self._recognize(world, keys, out, i)
                    if sec is not None:
                        coin = world.receive(recipient, out.P)
                        if coin is not None:
                            coin.secret = sec
                            found.append(coin)
                        break
        wallet.scan_cursor = len(entries)
        return found

    def validate(self, tx, ledger):
        st: CryptoNoteState = ledger.state
        if isinstance(tx, CNMint):
            bad = self._check_outputs(tx.outputs, st)
            return bad or check_proof(ledger, "cn-mint", tx, tx.proof_mint)
        if not isinstance(tx, CNTx):
            return Validation.reject(RejectReason.MALFORMED, "unknown transaction type")
        if not tx.rings or len(tx.rings) != len(tx.key_images):
            return Validation.reject(RejectReason.MALFORMED, "ring/key-image count mismatch")
        cutoff = ledger.round - self.maturity
        for ring in tx.rings:
            if len(ring) != self.ring_size or len(set(ring)) != len(ring):
                return Validation.reject(RejectReason.MALFORMED, "bad ring size")
            for m in ring:
                if not isinstance(m, int) or not 0 <= m < len(st.outputs):
                    return Validation.reject(RejectReason.MALFORMED, "unknown ring member")
                if st.output_round[m] > cutoff:
                    return Validation.reject(RejectReason.MALFORMED, "immature ring member")
        if len(set(tx.key_images)) != len(tx.key_images) or any(
                ki in st.key_images for ki in tx.key_images):
            return Validation.reject(RejectReason.DOUBLE_SPEND, "key image seen before")
        bad = self._check_outputs(tx.outputs, st)
        return bad or check_proof(ledger, "cn-ring", tx, tx.proof_ring)

    @staticmethod
    def _check_outputs(outputs, st) -> Validation | None:
        if not outputs:
            return Validation.reject(RejectReason.MALFORMED, "no outputs")
        ps = [o.P for o in outputs]
        if len(set(ps)) != len(ps) or any(p in st.index_of for p in ps):
            return Validation.reject(RejectReason.DUPLICATE_COMMITMENT, "destination key reused")
        return None

    def apply(self, tx, ledger):
        st: CryptoNoteState = ledger.state
        if isinstance(tx, CNTx):
            st.key_images.update(tx.key_images)
        for out in tx.outputs:
            st.index_of[out.P] = len(st.outputs)
            st.outputs.append(out)
            st.output_round.append(ledger.round)

    def coin_label(self, coin):
        return f"P:{coin.public_id:x}"

    def consumption_tag(self, world, coin):
        return f"ki:{self.key_image(world, coin.secret):x}"

    def identifiers(self, tx):
        ids = [f"P:{o.P:x}" for o in tx.outputs]
        if isinstance(tx, CNTx):
            ids += [f"ki:{ki:x}" for ki in tx.key_images]
        return ids

    def truth_records(self, tx, new_coins, spent_coins, round_):
        from ..ledger import TruthRecord
        for c in new_coins:
            yield f"P:{c.public_id:x}", TruthRecord(c.owner, c.coin_id, c.value, round_, "created")
        if isinstance(tx, CNTx):
            for ki, c in zip(tx.key_images, spent_coins):
                yield f"ki:{ki:x}", TruthRecord(c.owner, c.coin_id, c.value, round_, "consumed")
