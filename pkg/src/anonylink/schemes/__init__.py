"""Coin-scheme registry."""
from __future__ import annotations

from .base import (AddressScheme, Coin, CoinScheme, RejectReason, SchemeError, TransactionRejected,
                   Transfer, Validation)
from .cryptonote import CryptoNoteScheme
from .mimblewimble import MimblewimbleScheme
from .utxo import BitcoinScheme, CoinJoinScheme, CoinshuffleScheme
from .zerocash import ZerocashScheme
from .zerocoin import ZerocoinScheme

SCHEMES: dict[str, type[CoinScheme]] = {
    cls.name: cls
    for cls in (BitcoinScheme, CoinJoinScheme, CoinshuffleScheme, ZerocoinScheme,
                ZerocashScheme, CryptoNoteScheme, MimblewimbleScheme)
}

SCHEME_NAMES = tuple(SCHEMES)


def get_scheme_class(name: str) -> type[CoinScheme]:
    try:
        return SCHEMES[name.lower()]
    except KeyError:
        raise SchemeError(f"unknown scheme {name!r}; choose from {', '.join(SCHEMES)}") from None


__all__ = [
    "AddressScheme", "Coin", "CoinScheme", "RejectReason", "SchemeError", "TransactionRejected",
    "Transfer", "Validation", "SCHEMES", "SCHEME_NAMES", "get_scheme_class",
]
