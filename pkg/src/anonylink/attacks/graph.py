"""Transaction graph reconstructed from public ledger entries only."""
from __future__ import annotations

from collections import defaultdict

from ..schemes.cryptonote import CNMint, CNTx
from ..schemes.mimblewimble import MWMint, MWTx
from ..schemes.utxo import UtxoTx, txid_of
from ..schemes.zerocash import ZerocashMint, ZerocashPour
from ..schemes.zerocoin import ZerocoinMint, ZerocoinSpend


class LedgerGraph:
    """Who-created-what and who-consumed-what, as far as the ledger reveals.

    Coin identifiers use the same strings as the schemes' ``identifiers``.
    ``inputs`` holds consumed coins named by their creation identifier (a
    hard edge); ``rings`` holds anonymity sets of possible inputs (soft
    edges); ``tags`` maps every consumption record to its entry.
    """

    def __init__(self, view):
        self.params = view.params
        self.round_of: list[int] = [e.round for e in view.ledger]
        self.created_in: dict[str, int] = {}
        self.outputs: dict[int, list[str]] = defaultdict(list)
        self.inputs: dict[int, list[str]] = defaultdict(list)
        self.rings: dict[int, list[tuple[str, ...]]] = defaultdict(list)
        self.tags: dict[str, int] = {}
        self.values: dict[str, int] = {}
        self.addresses: dict[str, bytes] = {}
        self._cn_outputs: list[str] = []
        for e in view.ledger:
            self._add(e.index, e.tx)

    def _created(self, idx: int, cid: str, value: int | None = None) -> None:
        self.created_in[cid] = idx
        self.outputs[idx].append(cid)
        if value is not None:
            self.values[cid] = value

    def _add(self, idx: int, tx) -> None:
        if isinstance(tx, UtxoTx):
            txid = txid_of(tx.kind, tx.inputs, tx.outputs, tx.nonce)
            for op in tx.inputs:
                cid = f"out:{op.txid.hex()}:{op.index}"
                self.inputs[idx].append(cid)
                self.tags[cid] = idx
            for i, out in enumerate(tx.outputs):
                cid = f"out:{txid.hex()}:{i}"
                self._created(idx, cid, out.value)
                self.addresses[cid] = out.address
        elif isinstance(tx, (ZerocashMint, ZerocoinMint)):
            denom = getattr(tx, "denomination", None)
            self._created(idx, f"cm:{tx.cm.hex()}", denom)
        elif isinstance(tx, ZerocashPour):
            for sn in tx.sn_old:
                self.tags[f"sn:{sn.hex()}"] = idx
            for cm in tx.cm_new:
                self._created(idx, f"cm:{cm.hex()}")
        elif isinstance(tx, ZerocoinSpend):
            self.tags[f"sn:{tx.serial.hex()}"] = idx
            self._created(idx, f"cm:{tx.cm_new.hex()}", tx.denomination)
        elif isinstance(tx, (CNMint, CNTx)):
            if isinstance(tx, CNTx):
                for ring, ki in zip(tx.rings, tx.key_images):
                    self.rings[idx].append(tuple(self._cn_outputs[m] for m in ring))
                    self.tags[f"ki:{ki:x}"] = idx
            for out in tx.outputs:
                cid = f"P:{out.P:x}"
                self._cn_outputs.append(cid)
                self._created(idx, cid, None if self.params.get("ringct", True) else out.amount)
        elif isinstance(tx, MWMint):
            self._created(idx, f"C:{tx.output:x}")
        elif isinstance(tx, MWTx):
            for c in tx.inputs:
                cid = f"C:{c:x}"
                self.inputs[idx].append(cid)
                self.tags[cid] = idx
            for c in tx.outputs:
                self._created(idx, f"C:{c:x}")

    # -- queries -------------------------------------------------------------
    def entry_ancestors(self, idx: int) -> set[str]:
        """Coins that may have funded entry ``idx``: hard edges followed
        transitively, ring members taken as-is (one hop)."""
        seen: set[str] = set()
        stack = [idx]
        visited = set()
        while stack:
            e = stack.pop()
            if e in visited:
                continue
            visited.add(e)
            for c in self.inputs.get(e, ()):
                if c not in seen:
                    seen.add(c)
                    if c in self.created_in:
                        stack.append(self.created_in[c])
            for ring in self.rings.get(e, ()):
                seen.update(ring)
        return seen

    def ancestors(self, coin_id: str) -> set[str]:
        idx = self.created_in.get(coin_id)
        return set() if idx is None else self.entry_ancestors(idx)

    def consumed_round(self, tag: str) -> int | None:
        idx = self.tags.get(tag)
        return None if idx is None else self.round_of[idx]

    def created_round(self, coin_id: str) -> int | None:
        idx = self.created_in.get(coin_id)
        return None if idx is None else self.round_of[idx]

    def input_addresses(self, idx: int) -> set[bytes]:
        return {self.addresses[c] for c in self.inputs.get(idx, ()) if c in self.addresses}

    def output_addresses(self, idx: int) -> set[bytes]:
        return {self.addresses[c] for c in self.outputs.get(idx, ()) if c in self.addresses}


def transport_origins(view) -> dict[int, object]:
    """Ledger position -> observed origin of the submitting node."""
    out = {}
    for obs in view.transport or ():
        if obs.kind == "tx":
            out[int(obs.payload_ref.split(":")[1])] = obs.origin
    return out
