"""Adversary strategies.  Each takes an AdversaryView and returns its tie set:
the candidates it considers equally likely (best guess = any of them)."""
from __future__ import annotations

from .graph import LedgerGraph, transport_origins
from .view import AdversaryView


def _cands(view: AdversaryView) -> list[str]:
    return list(view.candidates)


def _narrow(cands, keep) -> list[str]:
    """Restrict to ``keep`` unless that would rule out every candidate."""
    hit = [c for c in cands if c in keep]
    return hit or list(cands)


# -- ledger-only ------------------------------------------------------------

def graph_walker(view: AdversaryView) -> list[str]:
    """Coin-to-coin: every candidate reachable backwards from the target.

    Hard edges (outpoints, reused commitments) are followed transitively,
    ring members count as possible sources; opaque spends yield nothing.
    """
    g = LedgerGraph(view)
    return _narrow(_cands(view), g.ancestors(view.question["target"]))


def value_reader(view: AdversaryView) -> list[str]:
    """Coin-to-value: read the amount if the ledger shows it (cleartext, or a
    fixed denomination)."""
    g = LedgerGraph(view)
    v = g.values.get(view.question["target"])
    return _narrow(_cands(view), set() if v is None else {str(v)})


def time_reader(view: AdversaryView) -> list[str]:
    """Coin-to-time: the round of the entry carrying the consumption record."""
    g = LedgerGraph(view)
    r = g.consumed_round(view.question["target"])
    return _narrow(_cands(view), set() if r is None else {str(r)})


def address_linker(view: AdversaryView) -> list[str]:
    """Tran-to-tran from the ledger alone: shared addresses or shared inputs."""
    g = LedgerGraph(view)
    first = view.question["first"]

    def marks(idx):
        return g.input_addresses(idx) | g.output_addresses(idx) | set(g.inputs.get(idx, ()))

    mine = marks(first)
    return _narrow(_cands(view), {c for c in view.candidates if mine & marks(_pos(c))})


def _pos(tx_label: str) -> int:
    return int(tx_label.split(":")[1])


# -- ledger + transport ----------------------------------------------------

def origin_matcher(view: AdversaryView) -> list[str]:
    """Tran-to-tran: same observed origin as the first transaction."""
    origins = transport_origins(view)
    me = origins.get(view.question["first"])
    same = {c for c in view.candidates if origins.get(_pos(c)) == me}
    return _narrow(address_linker(view), same)


def graph_walker_with_origins(view: AdversaryView) -> list[str]:
    """Coin-to-coin: the ledger walk, then keep sources whose creating
    transaction came from the same node as the target's."""
    g = LedgerGraph(view)
    tie = graph_walker(view)
    origins = transport_origins(view)
    me = origins.get(g.created_in.get(view.question["target"]))
    same = {c for c in tie if origins.get(g.created_in.get(c)) == me}
    return _narrow(tie, same)


# -- malicious recipient ---------------------------------------------------

def _funding_answer(view: AdversaryView, entry: int) -> list[str]:
    g = LedgerGraph(view)
    victim = set(view.question["victim_coins"])
    funding = (g.entry_ancestors(entry) & victim) or victim
    medium = view.question["medium"]
    if medium == "sent-coin":
        return _narrow(_cands(view), funding)
    if medium == "coin-to-value":
        vals = [g.values.get(c) for c in funding]
        return _narrow(_cands(view), set() if None in vals else {str(v) for v in vals})
    return _narrow(_cands(view), {str(g.created_round(c)) for c in funding})


def merchant(view: AdversaryView) -> list[str]:
    """Locate the payment through the coin received, then walk back."""
    g = LedgerGraph(view)
    return _funding_answer(view, g.created_in[view.knowledge["received_coin"]])


def told_payment(view: AdversaryView) -> list[str]:
    """Reference: the ledger adversary, told which entry is the payment."""
    return _funding_answer(view, view.knowledge["payment_entry"])


# -- malicious sender + colluder -------------------------------------------

def marked_tracker(view: AdversaryView) -> list[str]:
    """Which forward descends from a marked coin.

    Identifier media: the marked coin is among the forward's ancestors
    (commitment reuse is a hard edge; a ring containing it is a soft one).
    Value medium: the forwarded amount equals the marked amount.
    """
    k = view.knowledge
    fwds = k["forwards"]
    medium = view.question["medium"]
    if medium == "coin-to-value":
        hits = [f for f in fwds if k["marked_value"] is not None and f["amount"] == k["marked_value"]]
    else:
        g = LedgerGraph(view)
        marked = set(k["marked"])
        hits = [f for f in fwds if g.ancestors(f["coin"]) & marked]
    hits = hits or fwds
    if medium == "coin-to-time":
        return _narrow(_cands(view), {str(f["round"]) for f in hits})
    return _narrow(_cands(view), {f["label"] for f in hits})


def random_guesser(view: AdversaryView) -> list[str]:
    """Knows nothing: every candidate is equally likely."""
    return _cands(view)
