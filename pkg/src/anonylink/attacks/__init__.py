"""Linkability attack games: SLLA, TLLA, RCCLA and SCCLA."""
from .core import (Attack, AttackOutcome, GameConfig, GameError, Medium, NotApplicable, Scoring,
                   ci_contains, estimate_advantage, wilson_interval)
from .games import (GAMES, RUNNERS, applicability, run_game, run_rccla, run_sccla, run_slla,
                    run_tlla)
from .view import AdversaryView

__all__ = [
    "Attack", "AttackOutcome", "GameConfig", "GameError", "Medium", "NotApplicable", "Scoring",
    "ci_contains", "estimate_advantage", "wilson_interval", "GAMES", "RUNNERS", "applicability",
    "run_game", "run_rccla", "run_sccla", "run_slla", "run_tlla", "AdversaryView",
]
