"""Common coin-scheme interface, wallet coin records and the ideal proof oracle."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields, is_dataclass
from typing import Any

from ..crypto import hash_bytes


class AddressScheme(enum.Enum):
    PSEUDONYM = "pseudonym"
    ONE_TIME_ADDRESS = "one-time address"
    ADDRESS_ENCRYPTION = "address encryption"
    ADDRESSLESS = "addressless"


class RejectReason(enum.Enum):
    DOUBLE_SPEND = "double_spend"
    UNBALANCED = "unbalanced"
    DUPLICATE_COMMITMENT = "duplicate_commitment"
    MALFORMED = "malformed"


@dataclass(frozen=True)
class Validation:
    ok: bool
    reason: RejectReason | None = None
    detail: str = ""

    @classmethod
    def reject(cls, reason: RejectReason, detail: str = "") -> "Validation":
        return cls(False, reason, detail)


ACCEPT = Validation(True)


class TransactionRejected(Exception):
    def __init__(self, validation: Validation):
        super().__init__(f"{validation.reason.value}: {validation.detail}")
        self.validation = validation


class SchemeError(ValueError):
    pass


@dataclass(frozen=True)
class ProofToken:
    """Published face of an ideal zero-knowledge proof or signature.

    The challenger checks the witness privately and records the outcome in
    the ledger's oracle table under ``statement``; validators consult that
    table, never the witness.
    """

    statement: bytes
    verified: bool


def statement_of(kind: str, body: Any) -> bytes:
    return hash_bytes("anonylink.stmt", kind, repr(body))


def public_body(tx) -> tuple:
    """All public fields of a transaction except its proof tokens."""
    return tuple(getattr(tx, f.name) for f in fields(tx) if not f.name.startswith("proof"))


def prove(ledger, kind: str, tx_body: Any, failure: RejectReason | None) -> ProofToken:
    """Ideal verifier: record whether the private witness satisfied the statement."""
    stmt = statement_of(kind, tx_body)
    ledger.oracle[stmt] = failure
    return ProofToken(stmt, failure is None)


def check_proof(ledger, kind: str, tx, token: ProofToken) -> Validation:
    if not isinstance(token, ProofToken) or token.statement != statement_of(kind, public_body(tx)):
        return Validation.reject(RejectReason.MALFORMED, "proof not bound to transaction")
    if token.statement not in ledger.oracle:
        return Validation.reject(RejectReason.MALFORMED, "proof unknown to verifier")
    failure = ledger.oracle[token.statement]
    if failure is not None:
        return Validation.reject(failure, "witness check failed")
    if not token.verified:
        return Validation.reject(RejectReason.MALFORMED, "proof token not verified")
    return ACCEPT


@dataclass
class Coin:
    """A wallet's spendable record: secret side plus the on-ledger face."""

    coin_id: int
    owner: int
    value: int
    public_id: Any
    secret: Any = None
    created_round: int = 0
    created_entry: int = -1
    spent: bool = False


@dataclass
class Transfer:
    """Output of ``build_transfer``: what goes on the ledger and what is secret-shared."""

    tx: Any
    share: Any
    share_from: int
    share_to: int
    submitter: int
    new_coins: list[Coin] = field(default_factory=list)
    spent_coins: list[Coin] = field(default_factory=list)


def to_jsonable(obj: Any) -> Any:
    """Canonical JSON-ready form: dataclasses to dicts, bytes to hex, enums to values."""
    if is_dataclass(obj) and not isinstance(obj, type):
        out = {"_type": type(obj).__name__}
        for f in fields(obj):
            out[f.name] = to_jsonable(getattr(obj, f.name))
        return out
    if isinstance(obj, bytes):
        return obj.hex()
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(x) for x in obj)
    return obj


class CoinScheme:
    """Base class; subclasses fill in the ledger format and validation rules."""

    name: str = ""
    display_name: str = ""
    address_scheme: AddressScheme = AddressScheme.PSEUDONYM
    # Who hands the transaction to the network.
    submitter_role: str = "sender"
    has_secret_sharing: bool = False
    hides_values: bool = False
    fixed_denomination: bool = False
    is_mixer: bool = False
    # Relays see only ciphertext/commitments, no addresses or amounts.
    opaque_transactions: bool = False

    def __init__(self, world_config):
        self.config = world_config

    # -- setup ---------------------------------------------------------------
    def min_subjects(self) -> int:
        return 2

    def new_state(self) -> Any:
        raise NotImplementedError

    def keygen(self, world, subject: int) -> Any:
        raise NotImplementedError

    def mint(self, world, subject: int, v: int) -> Coin:
        raise NotImplementedError

    # -- transfers -----------------------------------------------------------
    def build_transfer(self, world, sender: int, recipient: int, coins: list[Coin],
                       amounts: list[int], params: dict | None = None) -> Transfer:
        raise NotImplementedError

    def scan_and_receive(self, world, recipient: int) -> list[Coin]:
        raise NotImplementedError

    def validate(self, tx, ledger) -> Validation:
        raise NotImplementedError

    def apply(self, tx, ledger) -> None:
        raise NotImplementedError

    def identifiers(self, tx) -> list[str]:
        """Every identifier a transaction introduces on the ledger."""
        raise NotImplementedError

    def truth_records(self, tx, new_coins, spent_coins, round_):
        raise NotImplementedError

    def coin_label(self, coin: Coin) -> str:
        """The identifier under which ``coin`` was created on the ledger."""
        raise NotImplementedError

    def consumption_tag(self, world, coin: Coin) -> str:
        """The identifier that will appear on the ledger when ``coin`` is spent."""
        raise NotImplementedError

    # -- helpers shared by all schemes ---------------------------------------
    def transfer(self, world, sender: int, recipient: int, coins: list[Coin],
                 amounts: list[int], params: dict | None = None) -> Transfer:
        """Build, deliver the secret share, submit and let the recipient scan."""
        t = self.build_transfer(world, sender, recipient, coins, amounts, params or {})
        self._execute(world, t)
        return t

    def _execute(self, world, t: Transfer) -> None:
        if t.share is not None:
            world.send_secret_share(t.share_from, t.share_to, t.share)
        world.submit(t.submitter, t.tx, new_coins=t.new_coins, spent_coins=t.spent_coins)
        for owner in sorted({c.owner for c in t.new_coins}):
            self.scan_and_receive(world, owner)

    def _check_spend(self, world, sender: int, coins: list[Coin], amounts: list[int]) -> int:
        if not coins:
            raise SchemeError("no input coins")
        wallet = world.wallets[sender]
        for c in coins:
            if c.owner != sender or wallet.coins.get(c.coin_id) is not c:
                raise SchemeError(f"sender {sender} does not own coin {c.coin_id}")
            if c.spent:
                raise SchemeError(f"coin {c.coin_id} already spent")
        total = sum(c.value for c in coins)
        if any(a <= 0 for a in amounts):
            raise SchemeError("output amounts must be positive")
        if sum(amounts) > total:
            raise SchemeError("insufficient funds")
        return total - sum(amounts)
