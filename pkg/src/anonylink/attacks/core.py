"""Game configuration, outcome statistics and scoring."""
from __future__ import annotations

import enum
import math
import random
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any, Sequence

Z95 = 1.959963984540054
# Slack when testing whether a CI endpoint touches the baseline.
CI_EPS = 1e-12


class Attack(str, enum.Enum):
    SLLA = "slla"
    TLLA = "tlla"
    RCCLA = "rccla"
    SCCLA = "sccla"


class Medium(str, enum.Enum):
    COIN_TO_COIN = "coin-to-coin"
    COIN_TO_VALUE = "coin-to-value"
    COIN_TO_TIME = "coin-to-time"
    TRAN_TO_TRAN = "tran-to-tran"
    SENT_COIN = "sent-coin"
    CONSUMED_COIN = "consumed-coin"


class Scoring(str, enum.Enum):
    # Credit 1/|tie| when the truth is among the adversary's equally-best guesses.
    EXPECTED = "expected"
    # Break ties with a seeded draw; 0/1 credit.
    SAMPLED = "sampled"


class GameError(ValueError):
    pass


class NotApplicable(GameError):
    """The (scheme, attack, medium) cell has no meaning for this scheme."""


@dataclass
class GameConfig:
    scheme: str
    attack: str = "slla"
    medium: str = "coin-to-coin"
    trials: int = 10000
    seed: int = 42
    candidates: int = 8
    ring_size: int = 4
    mix_size: int = 4
    mixnet: bool = False
    group_profile: str = "toy64"
    scoring: str = "expected"
    maturity: int = 10

    def __post_init__(self):
        self.attack = Attack(self.attack).value
        self.medium = Medium(self.medium).value
        self.scoring = Scoring(self.scoring).value
        if self.trials < 1:
            raise GameError("trials must be >= 1")
        if self.candidates < 2:
            raise GameError("candidates m must be >= 2")
        if self.ring_size < 1:
            raise GameError("ring size n must be >= 1")
        if self.mix_size < 2:
            raise GameError("mix size must be >= 2")
        if not 0 <= self.seed < 2 ** 64:
            raise GameError("seed must fit in 64 bits")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class AttackOutcome:
    game: str
    medium: str
    scheme: str
    success_rate: float
    wilson_ci_95: tuple[float, float]
    baseline: float
    trials: int
    advantage: float
    # "analytic": random-guess rate from m or n; "measured": SLLA-equipped
    # adversary on the same worlds.
    baseline_kind: str = "analytic"
    baseline_ci_95: tuple[float, float] | None = None
    # The random-guess rate 1/|candidates|, reported even when the baseline is measured.
    analytic_baseline: float | None = None
    not_applicable: str | None = None
    successes: float = 0.0

    @property
    def applicable(self) -> bool:
        return self.not_applicable is None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["wilson_ci_95"] = list(self.wilson_ci_95)
        if self.baseline_ci_95 is not None:
            d["baseline_ci_95"] = list(self.baseline_ci_95)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AttackOutcome":
        d = dict(d)
        d["wilson_ci_95"] = tuple(d["wilson_ci_95"])
        if d.get("baseline_ci_95") is not None:
            d["baseline_ci_95"] = tuple(d["baseline_ci_95"])
        return cls(**d)

    @classmethod
    def not_applicable_for(cls, config: GameConfig, reason: str) -> "AttackOutcome":
        return cls(config.attack, config.medium, config.scheme, 0.0, (0.0, 0.0), 0.0, 0, 0.0,
                   not_applicable=reason)


def wilson_interval(successes: float, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval; ``successes`` may be fractional (expected scoring)."""
    if trials <= 0:
        raise GameError("trials must be positive")
    if not 0 <= successes <= trials:
        raise GameError("successes must lie in [0, trials]")
    p = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(max(p * (1 - p) / trials + z2 / (4 * trials * trials), 0.0)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def estimate_advantage(successes: float, trials: int, baseline: float, *, game: str = "",
                       medium: str = "", scheme: str = "", **extra) -> AttackOutcome:
    ci = wilson_interval(successes, trials)
    rate = successes / trials
    return AttackOutcome(game, medium, scheme, rate, ci, baseline, trials, rate - baseline,
                         successes=successes, **extra)


def ci_contains(ci: tuple[float, float], x: float) -> bool:
    return ci[0] - CI_EPS <= x <= ci[1] + CI_EPS


@dataclass(frozen=True)
class Challenge:
    """One challenge: the candidate answers and the challenger's secret truth."""

    candidates: tuple[str, ...]
    truth: str

    def __post_init__(self):
        if self.truth not in self.candidates:
            raise GameError("truth must be one of the candidates")


def score(tie: Sequence[str], challenge: Challenge, mode: str, rng: random.Random | None = None
          ) -> tuple[Fraction, Any]:
    """Credit for a tie set.  Guesses outside the candidate list are ignored;
    an empty set falls back to all candidates (a blind guess)."""
    allowed = set(challenge.candidates)
    tie = sorted({t for t in tie if t in allowed}) or sorted(allowed)
    if mode == Scoring.SAMPLED.value:
        guess = (rng or random.Random(0)).choice(tie)
        return Fraction(int(guess == challenge.truth)), guess
    return (Fraction(1, len(tie)) if challenge.truth in tie else Fraction(0)), tie


@dataclass
class Tally:
    """Exact, order-independent accumulator of per-trial credits.

    Credits are rationals (1/|tie|), so summing Fractions makes the total
    independent of the order in which trials finish.
    """

    successes: Fraction = Fraction(0)
    baseline_successes: Fraction = Fraction(0)
    analytic_baseline: Fraction = Fraction(0)
    trials: int = 0

    def add(self, credit: Fraction, baseline_credit: Fraction | None, analytic: Fraction) -> None:
        self.successes += credit
        if baseline_credit is not None:
            self.baseline_successes += baseline_credit
        self.analytic_baseline += analytic
        self.trials += 1

    def merge(self, other: "Tally") -> "Tally":
        return Tally(self.successes + other.successes,
                     self.baseline_successes + other.baseline_successes,
                     self.analytic_baseline + other.analytic_baseline,
                     self.trials + other.trials)
