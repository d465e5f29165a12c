"""Mimblewimble: coins are bare Pedersen commitments ``G^r * H^v``.

To pay, the sender hands the old commitments and their openings ``(r, v)``
to the recipient, who builds the transaction: old commitments in, fresh
commitments out, and a kernel excess ``G^x`` with ``x = sum r_out - sum r_in``
so that ``prod(out) / prod(in) / excess`` is the identity.  The recipient
submits it.
"""
from __future__ import annotations

from dataclasses import dataclass

from .base import (AddressScheme, Coin, CoinScheme, ProofToken, RejectReason, SchemeError,
                   Transfer, Validation, check_proof, prove)

RANGE_BITS = 32


@dataclass(frozen=True)
class MWOpening:
    commitment: int
    r: int
    v: int


@dataclass(frozen=True)
class MWShare:
    openings: tuple[MWOpening, ...]


@dataclass(frozen=True)
class MWMint:
    output: int
    proof_range: ProofToken


@dataclass(frozen=True)
class MWTx:
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    kernel_excess: int
    proof_kernel: ProofToken
    proof_range: ProofToken


class MimblewimbleState:
    def __init__(self):
        self.utxos: set[int] = set()
        self.spent: set[int] = set()


class MimblewimbleScheme(CoinScheme):
    name = "mimblewimble"
    display_name = "Mimblewimble"
    address_scheme = AddressScheme.ADDRESSLESS
    submitter_role = "recipient"
    has_secret_sharing = True
    hides_values = True
    opaque_transactions = True

    def new_state(self):
        return MimblewimbleState()

    def keygen(self, world, subject):
        world._require(subject)
        return None

    def _opening(self, world, v: int) -> MWOpening:
        g = world.group
        r = g.random_scalar(world.rng)
        return MWOpening(g.commit(r, v), r, v)

    def mint(self, world, subject, v, params=None):
        from ..ledger import FAUCET
        if v <= 0:
            raise SchemeError("mint value must be positive")
        op = self._opening(world, v)
        coin = Coin(world.new_coin_id(), subject, v, op.commitment)
        world.wallets[subject].drafts[op.commitment] = op
        ok = None if 0 <= v < 2 ** RANGE_BITS else RejectReason.MALFORMED
        world.submit(FAUCET, MWMint(op.commitment, prove(world.ledger, "mw-mint", (op.commitment,), ok)),
                     new_coins=[coin])
        world.mint_submitted(coin)
        self.scan_and_receive(world, subject)
        return coin

    def build_recipient_tx(self, world, recipient, openings, out_values, params=None):
        """Recipient side: consume the handed-over openings, create fresh outputs."""
        params = params or {}
        g = world.group
        outs = [self._opening(world, v) for v in out_values]
        x = (sum(o.r for o in outs) - sum(o.r for o in openings)) % g.q
        excess = g.exp(g.g, x)
        if "excess" in params:
            excess = params["excess"]
        inputs = tuple(o.commitment for o in openings)
        outputs = tuple(o.commitment for o in outs)
        body = (inputs, outputs, excess)
        kernel_fail = None if g.exp(g.g, x) == excess else RejectReason.UNBALANCED
        range_fail = None if all(0 <= o.v < 2 ** RANGE_BITS for o in outs) else RejectReason.MALFORMED
        tx = MWTx(*body, prove(world.ledger, "mw-kernel", body, kernel_fail),
                  prove(world.ledger, "mw-range", body, range_fail))
        for o in outs:
            world.wallets[recipient].drafts[o.commitment] = o
        return tx, outs

    def build_transfer(self, world, sender, recipient, coins, amounts, params=None):
        params = params or {}
        change = self._check_spend(world, sender, coins, amounts)
        if change:
            # Split first so that exactly the paid value changes hands.
            split = self.build_transfer(world, sender, sender, list(coins),
                                        [sum(amounts), change], {"outputs": [sum(amounts), change]})
            self._execute(world, split)
            by_id = {c.public_id: c for c in world.wallets[sender].unspent()}
            pay = next(c for c in split.new_coins if c.value == sum(amounts)
                       and c.public_id in by_id)
            coins = [by_id[pay.public_id]]
        openings = tuple(MWOpening(c.public_id, c.secret.r, c.secret.v) for c in coins)
        out_values = params.get("outputs") or [sum(c.value for c in coins)]
        tx, outs = self.build_recipient_tx(world, recipient, openings, out_values, params)
        new_coins = [Coin(world.new_coin_id(), recipient, o.v, o.commitment) for o in outs]
        share = MWShare(openings) if sender != recipient else None
        return Transfer(tx, share, sender, recipient, recipient,
                        new_coins=new_coins, spent_coins=list(coins))

    def scan_and_receive(self, world, recipient):
        wallet = world.wallets[recipient]
        st: MimblewimbleState = world.ledger.state
        found = []
        for c, op in list(wallet.drafts.items()):
            if c in st.utxos:
                coin = world.receive(recipient, c)
                if coin is not None:
                    coin.secret = op
                    found.append(coin)
                del wallet.drafts[c]
        return found

    def validate(self, tx, ledger):
        st: MimblewimbleState = ledger.state
        g = ledger.group
        if isinstance(tx, MWMint):
            if not g.is_element(tx.output):
                return Validation.reject(RejectReason.MALFORMED, "not a group element")
            if tx.output in st.utxos or tx.output in st.spent:
                return Validation.reject(RejectReason.DUPLICATE_COMMITMENT, "commitment exists")
            return check_proof(ledger, "mw-mint", tx, tx.proof_range)
        if not isinstance(tx, MWTx):
            return Validation.reject(RejectReason.MALFORMED, "unknown transaction type")
        if not tx.inputs or not tx.outputs:
            return Validation.reject(RejectReason.MALFORMED, "empty side")
        if len(set(tx.inputs)) != len(tx.inputs):
            return Validation.reject(RejectReason.DOUBLE_SPEND, "input repeated")
        for c in tx.inputs:
            if c in st.spent:
                return Validation.reject(RejectReason.DOUBLE_SPEND, "input already spent")
            if c not in st.utxos:
                return Validation.reject(RejectReason.MALFORMED, "unknown input")
        if len(set(tx.outputs)) != len(tx.outputs) or any(
                c in st.utxos or c in st.spent for c in tx.outputs):
            return Validation.reject(RejectReason.DUPLICATE_COMMITMENT, "commitment exists")
        if not all(g.is_element(c) for c in (*tx.outputs, tx.kernel_excess)):
            return Validation.reject(RejectReason.MALFORMED, "not a group element")
        lhs = g.mul(*tx.outputs, g.inv(g.mul(*tx.inputs)), g.inv(tx.kernel_excess))
        if lhs != 1:
            return Validation.reject(RejectReason.UNBALANCED, "commitments do not sum to zero")
        bad = check_proof(ledger, "mw-kernel", tx, tx.proof_kernel)
        if not bad.ok:
            return bad
        return check_proof(ledger, "mw-range", tx, tx.proof_range)

    def apply(self, tx, ledger):
        st: MimblewimbleState = ledger.state
        if isinstance(tx, MWMint):
            st.utxos.add(tx.output)
            return
        for c in tx.inputs:
            st.utxos.discard(c)
            st.spent.add(c)
        st.utxos.update(tx.outputs)

    def coin_label(self, coin):
        return f"C:{coin.public_id:x}"

    def consumption_tag(self, world, coin):
        return f"C:{coin.public_id:x}"

    def identifiers(self, tx):
        if isinstance(tx, MWMint):
            return [f"C:{tx.output:x}"]
        return [f"C:{c:x}" for c in tx.outputs] + [f"K:{tx.kernel_excess:x}"]

    def truth_records(self, tx, new_coins, spent_coins, round_):
        from ..ledger import TruthRecord
        for c in new_coins:
            yield f"C:{c.public_id:x}", TruthRecord(c.owner, c.coin_id, c.value, round_, "created")
        if isinstance(tx, MWTx):
            owner = new_coins[0].owner if new_coins else -1
            yield f"K:{tx.kernel_excess:x}", TruthRecord(owner, -1, 0, round_, "kernel")
