"""Three-layer world model: transport log, shared ledger and wallets.

A :class:`World` is driven by discrete rounds and a single seeded RNG.  The
challenger's omniscient bookkeeping (``truth``, ``pending``) lives here too;
adversaries only ever get a view built by :mod:`anonylink.attacks.view`.
"""
from __future__ import annotations

import enum
import hashlib
import json
import random
from dataclasses import asdict, dataclass, field
from typing import Any

from .crypto import GroupParams, group_profile
from .schemes.base import Coin, TransactionRejected, to_jsonable

FAUCET = -1
MIXNET_SEGMENT = 255


class Visibility(enum.Enum):
    OPAQUE = "opaque"
    CLEARTEXT = "cleartext"


@dataclass(frozen=True, order=True)
class NodeAddress:
    segment: int
    host: int


@dataclass(frozen=True)
class TransportObservation:
    round: int
    origin: NodeAddress
    kind: str  # "tx" or "share"
    payload_ref: str
    visibility: Visibility


@dataclass(frozen=True)
class LedgerEntry:
    round: int
    index: int
    tx: Any


@dataclass(frozen=True)
class TruthRecord:
    subject: int
    coin_id: int
    value: int
    round: int
    event: str


class SharedLedger:
    """Append-only entry list plus the scheme's validation state."""

    def __init__(self, state, group: GroupParams | None = None):
        self.entries: list[LedgerEntry] = []
        self.state = state
        # Public group parameters, for schemes whose validators do group arithmetic.
        self.group = group
        self.oracle: dict[bytes, Any] = {}
        self.chain: list[bytes] = []
        # Current round, as seen by validators.
        self.round = 0

    def __len__(self):
        return len(self.entries)

    def append(self, round_: int, tx) -> int:
        entry = LedgerEntry(round_, len(self.entries), tx)
        self.entries.append(entry)
        prev = self.chain[-1] if self.chain else b""
        self.chain.append(hashlib.sha256(prev + repr(entry).encode()).digest())
        return entry.index

    def prefix_digest(self, k: int | None = None) -> bytes:
        k = len(self.entries) if k is None else k
        return self.chain[k - 1] if k else b""


@dataclass
class WalletStore:
    owner: int
    coins: dict[int, Coin] = field(default_factory=dict)
    received_shares: list[tuple[int, int, Any]] = field(default_factory=list)
    keys: list[Any] = field(default_factory=list)
    # Secrets of coins this wallet created for itself but has not yet seen on-ledger.
    drafts: dict[Any, Any] = field(default_factory=dict)
    scan_cursor: int = 0
    share_cursor: int = 0

    def unspent(self) -> list[Coin]:
        return [c for c in self.coins.values() if not c.spent]

    def balance(self) -> int:
        return sum(c.value for c in self.unspent())


@dataclass
class WorldConfig:
    scheme: str
    subjects: int = 4
    seed: int = 42
    ring_size: int = 4
    mix_size: int = 4
    denomination: int = 1
    group_profile: str = "toy64"
    ringct: bool = True
    maturity: int = 10
    mixnet: bool = False


@dataclass(frozen=True)
class WorldTrace:
    ledger: list[LedgerEntry]
    transport: list[TransportObservation]
    ground_truth: dict[str, TruthRecord]
    rng_seed: int

    def to_dict(self) -> dict:
        return {
            "rng_seed": self.rng_seed,
            "ledger": [to_jsonable(e) for e in self.ledger],
            "transport": [to_jsonable(o) for o in self.transport],
            "ground_truth": {k: asdict(v) for k, v in self.ground_truth.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


class WorldError(ValueError):
    pass


class World:
    def __init__(self, config: WorldConfig):
        from .schemes import get_scheme_class

        cls = get_scheme_class(config.scheme)
        self.config = config
        self.scheme = cls(config)
        if config.subjects < max(2, self.scheme.min_subjects()):
            raise WorldError(
                f"{config.scheme} needs at least {max(2, self.scheme.min_subjects())} subjects, "
                f"got {config.subjects}")
        self.group: GroupParams = group_profile(config.group_profile)
        self.rng = random.Random(config.seed)
        # Separate stream so toggling the mixnet leaves every other draw unchanged.
        self._mix_rng = random.Random(config.seed ^ 0x6D69786E6574)
        self.round = 0
        self.ledger = SharedLedger(self.scheme.new_state(), self.group)
        self.transport: list[TransportObservation] = []
        self.mixnet = config.mixnet
        self.truth: dict[str, TruthRecord] = {}
        self.pending: dict[Any, Coin] = {}
        self.minted_total = 0
        self._next_coin = 0
        self._shares_sent = 0
        self.wallets: dict[int, WalletStore] = {}
        self.node_addresses: dict[int, NodeAddress] = {}
        taken = set()
        for s in [FAUCET, *range(config.subjects)]:
            while True:
                addr = NodeAddress(self.rng.randrange(16), self.rng.randrange(1 << 24))
                if addr not in taken:
                    break
            taken.add(addr)
            self.node_addresses[s] = addr
        for s in range(config.subjects):
            self.wallets[s] = WalletStore(s)
        for s in range(config.subjects):
            self.wallets[s].keys.append(self.scheme.keygen(self, s))

    # -- subjects ------------------------------------------------------------
    @property
    def subjects(self) -> list[int]:
        return sorted(self.wallets)

    def add_subject(self) -> int:
        s = max(self.wallets) + 1
        taken = set(self.node_addresses.values())
        while True:
            addr = NodeAddress(self.rng.randrange(16), self.rng.randrange(1 << 24))
            if addr not in taken:
                break
        self.node_addresses[s] = addr
        self.wallets[s] = WalletStore(s)
        self.wallets[s].keys.append(self.scheme.keygen(self, s))
        return s

    def _require(self, subject: int) -> None:
        if subject not in self.wallets:
            raise WorldError(f"unknown subject {subject}")

    def new_coin_id(self) -> int:
        self._next_coin += 1
        return self._next_coin

    # -- time ----------------------------------------------------------------
    def advance(self, rounds: int = 1) -> int:
        self.round += rounds
        return self.round

    # -- layer 0 -------------------------------------------------------------
    def set_transport_anonymizer(self, enabled: bool) -> None:
        self.mixnet = bool(enabled)

    def _origin(self, subject: int) -> NodeAddress:
        if self.mixnet:
            return NodeAddress(MIXNET_SEGMENT, self._mix_rng.getrandbits(48))
        return self.node_addresses[subject]

    def _observe(self, subject: int, kind: str, ref: str, vis: Visibility) -> None:
        self.transport.append(TransportObservation(self.round, self._origin(subject), kind, ref, vis))

    # -- layer 1 -------------------------------------------------------------
    def submit(self, submitter: int, tx, new_coins=(), spent_coins=()) -> int:
        if submitter != FAUCET:
            self._require(submitter)
        self.ledger.round = self.round
        verdict = self.scheme.validate(tx, self.ledger)
        if not verdict.ok:
            raise TransactionRejected(verdict)
        self.scheme.apply(tx, self.ledger)
        pos = self.ledger.append(self.round, tx)
        vis = Visibility.OPAQUE if self.scheme.opaque_transactions else Visibility.CLEARTEXT
        self._observe(submitter, "tx", f"tx:{pos}", vis)
        for c in spent_coins:
            c.spent = True
        for c in new_coins:
            c.created_round = self.round
            c.created_entry = pos
            self.pending[c.public_id] = c
        for ident, rec in self.scheme.truth_records(tx, new_coins, spent_coins, self.round):
            self.truth[ident] = rec
        return pos

    def mint_submitted(self, coin: Coin) -> None:
        self.minted_total += coin.value

    def faucet_deliver(self, subject: int, note) -> None:
        """Hand a minted coin's secrets to its owner (plumbing, not observed)."""
        self._require(subject)
        self.wallets[subject].received_shares.append((self.round, FAUCET, note))

    # -- layer 2 -------------------------------------------------------------
    def send_secret_share(self, frm: int, to: int, share) -> None:
        self._require(frm)
        self._require(to)
        self.wallets[to].received_shares.append((self.round, frm, share))
        self._shares_sent += 1
        self._observe(frm, "share", f"share:{self._shares_sent}", Visibility.OPAQUE)

    def receive(self, subject: int, public_id) -> Coin | None:
        """Move a pending coin into ``subject``'s wallet once they recognize it."""
        coin = self.pending.get(public_id)
        if coin is None or coin.owner != subject:
            return None
        del self.pending[public_id]
        self.wallets[subject].coins[coin.coin_id] = coin
        return coin

    # -- checks and export ---------------------------------------------------
    def conservation_holds(self) -> bool:
        held = sum(w.balance() for w in self.wallets.values())
        in_flight = sum(c.value for c in self.pending.values())
        return held + in_flight == self.minted_total

    def trace(self) -> WorldTrace:
        return WorldTrace(list(self.ledger.entries), list(self.transport), dict(self.truth),
                          self.config.seed)


def new_world(config: WorldConfig) -> World:
    return World(config)
