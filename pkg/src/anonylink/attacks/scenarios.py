"""Challenger side: build one seeded world per trial and pose the challenge.

Every builder returns a :class:`Scenario`.  The adversary later receives only
an :class:`~anonylink.attacks.view.AdversaryView` assembled from it; the
world object and the truth stay with the challenger.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from ..ledger import World, WorldConfig
from ..schemes.base import Coin
from .core import Challenge, GameConfig

UNIT = 100
# SLLA coin-to-value: candidate payment amounts are drawn from this range.
VALUE_RANGE = (1, 1000)
# Funding coins for value games are larger than any candidate amount.
FUNDING = 5000
# SCCLA: incoming coins are worth at least this much; forwards are smaller.
SCCLA_MIN_INCOMING = 200
MARKED_VALUE = 7007


@dataclass
class Scenario:
    """A finished world plus one challenge per medium it supports.

    Builders never branch on the medium, so every question posed on a
    scenario sees exactly the same world.
    """

    world: World
    challenges: dict[str, Challenge]
    questions: dict[str, dict[str, Any]]
    # Private knowledge of the attacker (and colluders).
    knowledge: dict[str, Any] = field(default_factory=dict)
    # Knowledge of the SLLA-equipped reference adversary, where one is measured.
    baseline_knowledge: dict[str, Any] | None = None

    def analytic_baseline(self, medium: str) -> Fraction:
        return Fraction(1, len(self.challenges[medium].candidates))


def _single(world, medium, challenge, question, **kw) -> Scenario:
    return Scenario(world, {medium: challenge}, {medium: question}, **kw)


# -- shared helpers -----------------------------------------------------------

def make_world(cfg: GameConfig, seed: int, subjects: int) -> World:
    wc = WorldConfig(cfg.scheme, subjects=max(subjects, cfg.ring_size, 2), seed=seed,
                     ring_size=cfg.ring_size, mix_size=cfg.mix_size,
                     group_profile=cfg.group_profile, maturity=cfg.maturity, mixnet=cfg.mixnet)
    return World(wc)


def unit_value(world: World) -> int:
    return world.config.denomination if world.scheme.fixed_denomination else UNIT


def mint(world: World, subject: int, v: int, fresh: bool = True) -> Coin:
    """Faucet mint; transparent schemes mint to a fresh address so that funding
    coins of one subject are not trivially clustered."""
    return world.scheme.mint(world, subject, v, {"fresh_address": fresh})


def pay(world: World, sender: int, recipient: int, coin: Coin, amount: int | None = None):
    """Pay ``amount`` (default: the whole coin); returns (recipient coin, ledger position)."""
    amount = coin.value if amount is None else amount
    t = world.scheme.transfer(world, sender, recipient, [coin], [amount])
    got = [c for c in t.new_coins if c.owner == recipient and c.value == amount]
    return got[0], len(world.ledger.entries) - 1


def is_ring_scheme(world: World) -> bool:
    return world.config.scheme == "cryptonote"


def mint_fillers(world: World, bystanders: list[int], count: int) -> list[Coin]:
    """Coins owned by uninvolved subjects; they widen the decoy pool."""
    return [mint(world, bystanders[i % len(bystanders)], unit_value(world)) for i in range(count)]


def decoy_fillers_needed(world: World, mature_outputs: int) -> int:
    if not is_ring_scheme(world):
        return 0
    return max(0, world.config.ring_size - mature_outputs)


def label(world: World, coin: Coin) -> str:
    return world.scheme.coin_label(coin)


def geometric_gap(world: World, p: float = 0.5) -> int:
    """1 + Geometric(p) failures: strictly positive round gap."""
    gap = 1
    while world.rng.random() >= p:
        gap += 1
    return gap


def sorted_labels(xs) -> tuple[str, ...]:
    return tuple(sorted(xs))


# -- layer 1 ------------------------------------------------------------------

def lineage(cfg: GameConfig, seed: int) -> Scenario:
    """m source coins A_i each move to a fresh owner as B_i, in shuffled order.

    The adversary is given one B_k and must name its source among the
    candidates.  For ring schemes the candidate pool is padded with mature
    bystander coins up to the ring size, so every ring lies inside the pool.
    """
    m = cfg.candidates
    pool = max(m, cfg.ring_size) if cfg.scheme == "cryptonote" else m
    fillers = pool - m
    world = make_world(cfg, seed, 2 * m + max(fillers, 1))
    rng = world.rng
    senders, recipients = list(range(m)), list(range(m, 2 * m))
    bystanders = list(range(2 * m, world.config.subjects))
    v = unit_value(world)
    order = list(range(m))
    rng.shuffle(order)
    sources: dict[int, Coin] = {}
    for i in order:
        sources[i] = mint(world, senders[i], v)
    extra = mint_fillers(world, bystanders, fillers)
    world.advance(cfg.maturity)
    rng.shuffle(order)
    dests: dict[int, Coin] = {}
    if world.scheme.is_mixer:
        from ..schemes.utxo import MixParticipant
        size = cfg.mix_size
        groups = [order[i:i + size] for i in range(0, m, size)]
        if len(groups) > 1 and len(groups[-1]) < 2:
            groups[-2].extend(groups.pop())
        for g in groups:
            parts = [MixParticipant(senders[i], sources[i], recipients[i]) for i in g]
            _, new, _ = world.scheme.run_mix_round(world, parts)
            for i in g:
                dests[i] = next(c for c in new if c.owner == recipients[i])
    else:
        for i in order:
            dests[i], _ = pay(world, senders[i], recipients[i], sources[i])
    world.advance(1)
    k = rng.randrange(m)
    cands = sorted_labels([label(world, c) for c in sources.values()] + [label(world, c) for c in extra])
    return _single(world, "coin-to-coin", Challenge(cands, label(world, sources[k])),
                   {"target": label(world, dests[k]), "candidates": cands})


def _candidate_values(world: World, m: int) -> tuple[list[int], int]:
    """m distinct candidate amounts and the true one.

    Fixed-denomination schemes can only ever move the denomination, so the
    truth is forced to it (placed among m - 1 random distractors).
    """
    rng = world.rng
    if world.scheme.fixed_denomination:
        d = world.config.denomination
        others = rng.sample([x for x in range(*VALUE_RANGE) if x != d], m - 1)
        return sorted(others + [d]), d
    values = sorted(rng.sample(range(*VALUE_RANGE), m))
    return values, rng.choice(values)


def value_transfer(cfg: GameConfig, seed: int) -> Scenario:
    """A payment whose amount is drawn from m candidates; name the amount."""
    m = cfg.candidates
    world = make_world(cfg, seed, 3)
    values, x = _candidate_values(world, m)
    fixed = world.scheme.fixed_denomination
    funding = mint(world, 0, x if fixed else FUNDING)
    mint_fillers(world, [2], decoy_fillers_needed(world, 1) + (1 if is_ring_scheme(world) else 0))
    world.advance(cfg.maturity)
    got, _ = pay(world, 0, 1, funding, x)
    world.advance(1)
    cands = tuple(str(v) for v in values)
    return _single(world, "coin-to-value", Challenge(cands, str(x)),
                   {"target": label(world, got), "candidates": cands})


def consumption_time(cfg: GameConfig, seed: int) -> Scenario:
    """m coins are spent at m distinct rounds; name the round of a designated one.

    The coin is designated by the identifier its consumption record carries
    (outpoint, serial number, key image or input commitment).
    """
    m = cfg.candidates
    world = make_world(cfg, seed, 2 * m)
    rng = world.rng
    coins = [mint(world, i, unit_value(world)) for i in range(m)]
    mint_fillers(world, list(range(m, 2 * m)), decoy_fillers_needed(world, m))
    world.advance(cfg.maturity)
    order = list(range(m))
    rng.shuffle(order)
    rounds = {}
    for i in order:
        world.advance(1)
        rounds[i] = world.round
        pay(world, i, m + i, coins[i])
    k = rng.randrange(m)
    tag = world.scheme.consumption_tag(world, coins[k])
    cands = tuple(str(rounds[i]) for i in sorted(rounds, key=rounds.get))
    return _single(world, "coin-to-time", Challenge(cands, str(rounds[k])),
                   {"target": tag, "candidates": cands})


# -- layer 0 ------------------------------------------------------------------

def two_transactions(cfg: GameConfig, seed: int) -> Scenario:
    """One node submits two transactions, m - 1 other nodes one each.

    The adversary is shown the target's first transaction and must find its
    second among the m later ones.  Funding coins sit at fresh addresses and
    every transaction has its own counterparty, so the ledger alone does not
    tie the pair together.
    """
    m = cfg.candidates
    world = make_world(cfg, seed, 1 + (m - 1) + (m + 1) + 1)
    rng = world.rng
    target, others = 0, list(range(1, m))
    counterparts = list(range(m, 2 * m + 1))
    bystander = 2 * m + 1
    by_sender = world.scheme.submitter_role == "sender"
    # (submitter, counterparty) per transaction; index 0 and 1 are the target's.
    plan = [(target, counterparts[0]), (target, counterparts[1])]
    plan += [(o, counterparts[1 + i + 1]) for i, o in enumerate(others)]
    funding = []
    for submitter, cp in plan:
        payer = submitter if by_sender else cp
        funding.append(mint(world, payer, unit_value(world)))
    mint_fillers(world, [bystander], decoy_fillers_needed(world, len(plan)))
    world.advance(cfg.maturity)

    def run(i):
        submitter, cp = plan[i]
        sender, recipient = (submitter, cp) if by_sender else (cp, submitter)
        _, pos = pay(world, sender, recipient, funding[i])
        return pos

    first = run(0)
    world.advance(1)
    later = list(range(1, len(plan)))
    rng.shuffle(later)
    pos = {i: run(i) for i in later}
    world.advance(1)
    cands = tuple(f"tx:{pos[i]}" for i in sorted(later, key=pos.get))
    return _single(world, "tran-to-tran", Challenge(cands, f"tx:{pos[1]}"),
                   {"first": first, "candidates": cands})


# -- layer 2 ------------------------------------------------------------------

def merchant_payment(cfg: GameConfig, seed: int) -> Scenario:
    """The victim, holding m coins acquired at distinct rounds, pays the attacker.

    The attacker (a merchant) receives the payment and its secret share; the
    challenge asks which coin funded it, that coin's value, or the round the
    victim acquired it.  The reference adversary is told the payment
    transaction and sees only the ledger.
    """
    m = cfg.candidates
    victim, merchant = 0, 1
    world = make_world(cfg, seed, 3)
    rng = world.rng
    fixed = world.scheme.fixed_denomination
    if fixed:
        values = [world.config.denomination] * m
    else:
        values = rng.sample(range(2, VALUE_RANGE[1]), m)
    coins = []
    for v in values:
        coins.append(mint(world, victim, v))
        world.advance(1)
    mint_fillers(world, [2], decoy_fillers_needed(world, m) + (1 if is_ring_scheme(world) else 0))
    world.advance(cfg.maturity)
    k = rng.randrange(m)
    price = values[k] if fixed else 1
    t = world.scheme.transfer(world, victim, merchant, [coins[k]], [price])
    got = next(c for c in t.new_coins if c.owner == merchant)
    pay_pos = len(world.ledger.entries) - 1
    world.advance(1)
    victim_coins = [label(world, c) for c in coins]
    dv, truth_v = _candidate_values(world, m) if fixed else (sorted(values), values[k])
    rounds = [c.created_round for c in coins]
    asked = {
        "sent-coin": (sorted_labels(victim_coins), victim_coins[k]),
        "coin-to-value": (tuple(str(v) for v in dv), str(truth_v)),
        "coin-to-time": (tuple(str(r) for r in rounds), str(rounds[k])),
    }
    owned = sorted_labels(victim_coins)
    knowledge = {"received_coin": label(world, got), "received_value": got.value,
                 "share": t.share}
    return Scenario(world, {md: Challenge(c, tr) for md, (c, tr) in asked.items()},
                    {md: {"victim_coins": owned, "candidates": c} for md, (c, _) in asked.items()},
                    knowledge, baseline_knowledge={"payment_entry": pay_pos})


def marked_coin(cfg: GameConfig, seed: int) -> Scenario:
    """The attacker is one of m senders paying the victim, using a marked coin.

    After the coins mature the victim forwards each one to a colluder, one per
    round with Geometric(0.5) gaps and a fresh, smaller amount.  Attacker and
    colluder pool their knowledge to find which forward consumed the marked
    coin, its round, or (via amounts only) which forward carried its value.
    The reference adversary has the same colluder view but does not know
    which incoming coin was the attacker's.
    """
    m = cfg.candidates
    victim, colluder = 0, 1
    senders = list(range(2, 2 + m))  # senders[0] is the attacker
    world = make_world(cfg, seed, 2 + m + 1)
    bystander = 2 + m
    rng = world.rng
    fixed = world.scheme.fixed_denomination
    if fixed:
        incoming_v = [world.config.denomination] * m
    else:
        incoming_v = [MARKED_VALUE] + rng.sample(range(SCCLA_MIN_INCOMING, 5000), m - 1)
    funding = [mint(world, s, v) for s, v in zip(senders, incoming_v)]
    mint_fillers(world, [bystander], decoy_fillers_needed(world, m))
    world.advance(cfg.maturity)
    order = list(range(m))
    rng.shuffle(order)
    incoming = {}
    for j in order:
        incoming[j], _ = pay(world, senders[j], victim, funding[j])
    world.advance(cfg.maturity)
    rng.shuffle(order)
    if fixed:
        amounts = [world.config.denomination] * m
    else:
        amounts = rng.sample(range(1, SCCLA_MIN_INCOMING), m)
    forwards = []
    for n_fwd, j in enumerate(order):
        world.advance(geometric_gap(world))
        got, pos = pay(world, victim, colluder, incoming[j], amounts[n_fwd])
        forwards.append({"label": f"fwd:{n_fwd}", "entry": pos, "coin": label(world, got),
                         "amount": got.value, "round": world.round, "_source": j})
    world.advance(1)
    truth_fwd = next(f for f in forwards if f["_source"] == 0)
    colluder_view = [{k: v for k, v in f.items() if not k.startswith("_")} for f in forwards]
    by_round = (tuple(str(f["round"]) for f in forwards), str(truth_fwd["round"]))
    by_label = (tuple(f["label"] for f in forwards), truth_fwd["label"])
    asked = {"consumed-coin": by_label, "coin-to-value": by_label, "coin-to-time": by_round}
    # The attacker knows the identifier of the coin it handed the victim.
    marked = (label(world, incoming[0]),)
    everyone = sorted_labels(label(world, c) for c in incoming.values())
    knowledge = {"forwards": colluder_view, "marked": marked, "marked_value": incoming_v[0]}
    baseline = {"forwards": colluder_view, "marked": everyone, "marked_value": None}
    return Scenario(world, {md: Challenge(c, tr) for md, (c, tr) in asked.items()},
                    {md: {"candidates": c} for md, (c, _) in asked.items()}, knowledge, baseline)
