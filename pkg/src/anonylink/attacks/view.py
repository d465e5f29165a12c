"""What an adversary is allowed to see.

A view is assembled by the challenger from public data (the ledger, and the
transport log for relay adversaries) plus the adversary's own private
knowledge.  It never holds a reference to the :class:`~anonylink.ledger.World`,
so challenger-side bookkeeping (ground truth, pending coins, other wallets)
is unreachable by construction.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

from ..ledger import LedgerEntry, TransportObservation
from ..schemes.base import to_jsonable


@dataclass(frozen=True)
class AdversaryView:
    scheme: str
    params: dict[str, Any]
    round: int
    ledger: tuple[LedgerEntry, ...]
    # None for ledger-only adversaries.
    transport: tuple[TransportObservation, ...] | None
    # Private knowledge held by the adversary (and colluders), e.g. received shares.
    knowledge: dict[str, Any] = field(default_factory=dict)
    # The question: a target description plus the candidate answers.
    question: dict[str, Any] = field(default_factory=dict)

    @property
    def candidates(self) -> tuple[str, ...]:
        return tuple(self.question["candidates"])

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "params": to_jsonable(self.params),
            "round": self.round,
            "ledger": [to_jsonable(e) for e in self.ledger],
            "transport": None if self.transport is None else [to_jsonable(o) for o in self.transport],
            "knowledge": to_jsonable(self.knowledge),
            "question": to_jsonable(self.question),
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def public_params(world) -> dict[str, Any]:
    cfg = world.config
    return {"ring_size": cfg.ring_size, "mix_size": cfg.mix_size, "maturity": cfg.maturity,
            "denomination": cfg.denomination, "ringct": cfg.ringct}


def make_view(world, *, transport: bool, knowledge: dict | None = None,
              question: dict | None = None) -> AdversaryView:
    return AdversaryView(
        scheme=world.config.scheme,
        params=public_params(world),
        round=world.round,
        ledger=tuple(world.ledger.entries),
        transport=tuple(world.transport) if transport else None,
        knowledge=dict(knowledge or {}),
        question=dict(question or {}),
    )
