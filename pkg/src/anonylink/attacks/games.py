"""The four linkability games as challenger/adversary experiments."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from typing import Callable, Sequence, TextIO

from ..schemes import get_scheme_class
from . import scenarios, strategies
from .core import (AttackOutcome, GameConfig, GameError, NotApplicable, Tally, estimate_advantage,
                   score, wilson_interval)
from .view import AdversaryView, make_view

Strategy = Callable[[AdversaryView], list]


@dataclass(frozen=True)
class GameSpec:
    build: Callable[[GameConfig, int], scenarios.Scenario]
    adversary: Strategy
    # Reference adversary for games scored against a measured baseline.
    reference: Strategy | None = None
    needs_secret_sharing: bool = False


GAMES: dict[tuple[str, str], GameSpec] = {
    ("slla", "coin-to-coin"): GameSpec(scenarios.lineage, strategies.graph_walker),
    ("slla", "coin-to-value"): GameSpec(scenarios.value_transfer, strategies.value_reader),
    ("slla", "coin-to-time"): GameSpec(scenarios.consumption_time, strategies.time_reader),
    ("slla", "tran-to-tran"): GameSpec(scenarios.two_transactions, strategies.address_linker),
    ("tlla", "coin-to-coin"): GameSpec(scenarios.lineage, strategies.graph_walker_with_origins),
    ("tlla", "coin-to-value"): GameSpec(scenarios.value_transfer, strategies.value_reader),
    ("tlla", "coin-to-time"): GameSpec(scenarios.consumption_time, strategies.time_reader),
    ("tlla", "tran-to-tran"): GameSpec(scenarios.two_transactions, strategies.origin_matcher),
}
for _medium in ("sent-coin", "coin-to-value", "coin-to-time"):
    GAMES[("rccla", _medium)] = GameSpec(scenarios.merchant_payment, strategies.merchant,
                                         strategies.told_payment, needs_secret_sharing=True)
for _medium in ("consumed-coin", "coin-to-value", "coin-to-time"):
    GAMES[("sccla", _medium)] = GameSpec(scenarios.marked_coin, strategies.marked_tracker,
                                         strategies.marked_tracker, needs_secret_sharing=True)

TRANSPORT_ATTACKS = {"tlla"}


def applicability(config: GameConfig) -> str | None:
    """Reason the cell is not applicable, or None."""
    spec = GAMES.get((config.attack, config.medium))
    if spec is None:
        return f"{config.attack} has no {config.medium} medium"
    cls = get_scheme_class(config.scheme)
    if spec.needs_secret_sharing and not cls.has_secret_sharing:
        return f"{cls.display_name} has no secret-sharing layer"
    return None


def trial_seed(config: GameConfig, t: int) -> int:
    return (config.seed + t) % 2 ** 64


def run_game(config: GameConfig, *, adversary: Strategy | None = None,
             transcript: TextIO | None = None) -> AttackOutcome:
    """Play ``config.trials`` independent challenges; one world per trial."""
    cell = (config.attack, config.medium)
    return run_cells(config, [cell], adversary=adversary, transcript=transcript)[cell]


def run_cells(config: GameConfig, cells: Sequence[tuple[str, str]], *,
              adversary: Strategy | None = None, transcript: TextIO | None = None
              ) -> dict[tuple[str, str], AttackOutcome]:
    """Play several (attack, medium) cells that share a scenario builder.

    Each trial's world is built once and every cell's adversary is asked its
    question on it.  Builders ignore the medium, so the outcome of a cell is
    the same whether it is run alone or alongside others.
    """
    out: dict[tuple[str, str], AttackOutcome] = {}
    live = []
    for attack, medium in cells:
        cfg = replace(config, attack=attack, medium=medium)
        reason = applicability(cfg)
        if reason is not None:
            out[(attack, medium)] = AttackOutcome.not_applicable_for(cfg, reason)
        else:
            live.append((attack, medium))
    if not live:
        return out
    specs = {c: GAMES[c] for c in live}
    if len({sp.build for sp in specs.values()}) != 1:
        raise GameError("cells run together must share a scenario builder")
    build = next(iter(specs.values())).build
    tallies = {c: Tally() for c in live}
    for t in range(config.trials):
        seed = trial_seed(config, t)
        sc = build(config, seed)
        for attack, medium in live:
            spec = specs[(attack, medium)]
            challenge = sc.challenges[medium]
            question = {**sc.questions[medium], "medium": medium}
            view = make_view(sc.world, transport=attack in TRANSPORT_ATTACKS,
                             knowledge=sc.knowledge, question=question)
            tie_rng = random.Random(seed ^ 0x7469652D627265616B)
            credit, guess = score((adversary or spec.adversary)(view), challenge,
                                  config.scoring, tie_rng)
            ref_credit = None
            if spec.reference is not None and sc.baseline_knowledge is not None:
                ref_view = make_view(sc.world, transport=False, knowledge=sc.baseline_knowledge,
                                     question=question)
                ref_credit, _ = score(spec.reference(ref_view), challenge, config.scoring, tie_rng)
            tallies[(attack, medium)].add(credit, ref_credit, sc.analytic_baseline(medium))
            if transcript is not None:
                transcript.write(json.dumps({
                    "scheme": config.scheme, "attack": attack, "medium": medium, "trial": t,
                    "seed": seed, "view_digest": view.digest(), "guess": guess,
                    "truth": challenge.truth, "credit": float(credit), "correct": credit > 0,
                }, sort_keys=True) + "\n")
    for attack, medium in live:
        cfg = replace(config, attack=attack, medium=medium)
        out[(attack, medium)] = summarize(cfg, tallies[(attack, medium)],
                                          measured=specs[(attack, medium)].reference is not None)
    return {c: out[c] for c in cells}


def builder_groups(cells: Sequence[tuple[str, str]]) -> list[list[tuple[str, str]]]:
    """Partition cells so that each group shares one scenario builder."""
    groups: dict[object, list[tuple[str, str]]] = {}
    for c in cells:
        spec = GAMES.get(c)
        groups.setdefault(spec.build if spec else c, []).append(c)
    return list(groups.values())


def summarize(config: GameConfig, tally: Tally, measured: bool) -> AttackOutcome:
    n = tally.trials
    analytic = float(tally.analytic_baseline / n)
    common = dict(game=config.attack, medium=config.medium, scheme=config.scheme,
                  analytic_baseline=analytic)
    if measured:
        ref = float(tally.baseline_successes)
        return estimate_advantage(float(tally.successes), n, ref / n, baseline_kind="measured",
                                  baseline_ci_95=wilson_interval(ref, n), **common)
    return estimate_advantage(float(tally.successes), n, analytic, **common)


def _run(attack: str, config: GameConfig, **kw) -> AttackOutcome:
    if config.attack != attack:
        config = GameConfig(**{**config.to_dict(), "attack": attack})
    return run_game(config, **kw)


def run_slla(config: GameConfig, **kw) -> AttackOutcome:
    """Ledger-only adversary."""
    return _run("slla", config, **kw)


def run_tlla(config: GameConfig, **kw) -> AttackOutcome:
    """Relay adversary: ledger plus every transport observation."""
    return _run("tlla", config, **kw)


def run_rccla(config: GameConfig, **kw) -> AttackOutcome:
    """Malicious recipient, scored against the SLLA adversary told the payment."""
    return _run("rccla", config, **kw)


def run_sccla(config: GameConfig, **kw) -> AttackOutcome:
    """Malicious sender colluding with the victim's next recipient."""
    return _run("sccla", config, **kw)


RUNNERS = {"slla": run_slla, "tlla": run_tlla, "rccla": run_rccla, "sccla": run_sccla}


def require_applicable(config: GameConfig) -> None:
    reason = applicability(config)
    if reason is not None:
        raise NotApplicable(reason)
