import dataclasses
import io
import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from anonylink import SCHEME_NAMES
from anonylink.attacks import (GAMES, AdversaryView, GameConfig, GameError, NotApplicable,
                               applicability, run_game)
from anonylink.attacks.core import (Z95, Challenge, Tally, ci_contains, estimate_advantage, score,
                                    wilson_interval)
from anonylink.attacks.games import builder_groups, require_applicable, run_cells
from anonylink.attacks.scenarios import lineage
from anonylink.attacks.strategies import random_guesser
from anonylink.attacks.view import make_view
from anonylink.ledger import LedgerEntry, TransportObservation, World

SLLA_MEDIA = ["coin-to-coin", "coin-to-value", "coin-to-time", "tran-to-tran"]


# -- statistics ---------------------------------------------------------------------

def test_wilson_width_at_quarter():
    lo, hi = wilson_interval(2500, 10_000)
    assert lo < 0.25 < hi and hi - lo < 0.02


@pytest.mark.parametrize("n", range(1, 21))
def test_wilson_endpoints_solve_score_equation(n):
    """Each finite endpoint L satisfies (k/n - L)^2 = z^2 L (1 - L) / n."""
    for k in range(n + 1):
        lo, hi = wilson_interval(k, n)
        p = k / n
        for end in (lo, hi):
            if 0 < end < 1:
                assert (p - end) ** 2 == pytest.approx(Z95 ** 2 * end * (1 - end) / n, abs=1e-12)
        assert lo <= p <= hi
        assert (lo == 0) == (k == 0) and (hi == 1) == (k == n)


def test_wilson_fractional_and_errors():
    lo, hi = wilson_interval(12.5, 100)
    assert lo < 0.125 < hi
    with pytest.raises(GameError):
        wilson_interval(1, 0)
    with pytest.raises(GameError):
        wilson_interval(11, 10)


def test_estimate_advantage():
    out = estimate_advantage(2500, 10_000, 0.125, game="slla", medium="coin-to-coin", scheme="x")
    assert out.success_rate == 0.25 and out.advantage == pytest.approx(0.125)
    assert not ci_contains(out.wilson_ci_95, 0.125)


# -- scoring ----------------------------------------------------------------------

CH = Challenge(("a", "b", "c", "d"), "b")


def test_expected_credit():
    assert score(["b"], CH, "expected")[0] == 1
    assert score(["a", "b"], CH, "expected")[0] == Fraction(1, 2)
    assert score(["a"], CH, "expected")[0] == 0
    assert score([], CH, "expected")[0] == Fraction(1, 4)
    assert score(["zz", "b"], CH, "expected")[0] == 1


def test_sampled_credit_is_seeded():
    picks = [score(["a", "b"], CH, "sampled", random.Random(s))[1] for s in range(50)]
    assert picks == [score(["a", "b"], CH, "sampled", random.Random(s))[1] for s in range(50)]
    assert set(picks) == {"a", "b"}


def test_challenge_truth_must_be_candidate():
    with pytest.raises(GameError):
        Challenge(("a",), "b")


@given(st.lists(st.tuples(st.integers(0, 8), st.integers(1, 8)), min_size=1, max_size=30),
       st.randoms())
def test_tally_order_independent(credits, rnd):
    items = [(Fraction(min(a, b), b), None, Fraction(1, 8)) for a, b in credits]
    t1, t2 = Tally(), Tally()
    for it in items:
        t1.add(*it)
    shuffled = items[:]
    rnd.shuffle(shuffled)
    half = len(shuffled) // 2
    a, b = Tally(), Tally()
    for it in shuffled[:half]:
        a.add(*it)
    for it in shuffled[half:]:
        b.add(*it)
    t2 = a.merge(b)
    assert (t1.successes, t1.trials) == (t2.successes, t2.trials)


# -- configuration -----------------------------------------------------------------

@pytest.mark.parametrize("bad", [dict(trials=0), dict(candidates=1), dict(ring_size=0),
                                 dict(mix_size=1), dict(seed=-1), dict(attack="xx"),
                                 dict(medium="coin-to-mood"), dict(scoring="best")])
def test_game_config_validation(bad):
    with pytest.raises(ValueError):
        GameConfig("bitcoin", **bad)


def test_not_applicable_cells():
    cfg = GameConfig("bitcoin", attack="rccla", medium="sent-coin", trials=5)
    assert applicability(cfg)
    out = run_game(cfg)
    assert not out.applicable and out.trials == 0
    with pytest.raises(NotApplicable):
        require_applicable(cfg)
    assert applicability(GameConfig("bitcoin", attack="rccla", medium="consumed-coin"))


# -- the adversary's view --------------------------------------------------------------

def walk(obj, seen=None):
    seen = set() if seen is None else seen
    if id(obj) in seen:
        return
    seen.add(id(obj))
    yield obj
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        for f in dataclasses.fields(obj):
            yield from walk(getattr(obj, f.name), seen)
    elif isinstance(obj, dict):
        for k, v in obj.items():
            yield from walk(k, seen)
            yield from walk(v, seen)
    elif isinstance(obj, (list, tuple, set, frozenset)):
        for x in obj:
            yield from walk(x, seen)


@pytest.mark.parametrize("scheme", SCHEME_NAMES)
def test_view_holds_no_private_state(scheme):
    cfg = GameConfig(scheme, trials=1)
    sc = lineage(cfg, 7)
    view = make_view(sc.world, transport=True, knowledge=sc.knowledge,
                     question={**sc.questions["coin-to-coin"], "medium": "coin-to-coin"})
    from anonylink.ledger import TruthRecord, WalletStore
    from anonylink.schemes.base import Coin
    for obj in walk(view):
        assert not isinstance(obj, (World, WalletStore, TruthRecord, Coin))
    assert "truth" not in json.dumps(view.to_dict())
    assert all(isinstance(e, LedgerEntry) for e in view.ledger)
    assert all(isinstance(o, TransportObservation) for o in view.transport)
    ledger_only = make_view(sc.world, transport=False)
    assert ledger_only.transport is None


def test_view_digest_stable():
    sc1, sc2 = lineage(GameConfig("zerocash"), 3), lineage(GameConfig("zerocash"), 3)
    q = {**sc1.questions["coin-to-coin"], "medium": "coin-to-coin"}
    assert make_view(sc1.world, transport=False, question=q).digest() == \
        make_view(sc2.world, transport=False, question=q).digest()


# -- calibration and capability ---------------------------------------------------------

@pytest.mark.parametrize("scheme", SCHEME_NAMES)
@pytest.mark.parametrize("medium", SLLA_MEDIA)
def test_random_guesser_hits_baseline(scheme, medium):
    out = run_game(GameConfig(scheme, "slla", medium, trials=400, scoring="sampled", seed=11),
                   adversary=random_guesser)
    assert out.baseline == pytest.approx(1 / 8)
    # 28 cells are checked, so widen each interval to 99.9% (z = 3.29).
    assert ci_contains(wilson_interval(out.successes, out.trials, z=3.29), out.baseline)


def test_expected_scoring_random_guesser_exact():
    out = run_game(GameConfig("bitcoin", trials=50), adversary=random_guesser)
    assert out.success_rate == 1 / 8


@pytest.mark.parametrize("scheme", SCHEME_NAMES)
def test_relay_at_least_ledger(scheme):
    cfg = GameConfig(scheme, trials=150, seed=5)
    for medium in SLLA_MEDIA:
        s = run_game(dataclasses.replace(cfg, attack="slla", medium=medium))
        t = run_game(dataclasses.replace(cfg, attack="tlla", medium=medium))
        assert t.success_rate >= s.wilson_ci_95[0], (medium, s, t)


@pytest.mark.parametrize("scheme", SCHEME_NAMES)
def test_mixnet_collapses_tran_to_tran(scheme):
    cfg = GameConfig(scheme, "tlla", "tran-to-tran", trials=150, seed=2)
    assert run_game(cfg).success_rate == 1.0
    out = run_game(dataclasses.replace(cfg, mixnet=True))
    assert ci_contains(out.wilson_ci_95, 1 / cfg.candidates)


@pytest.mark.parametrize("n", [2, 4, 8])
def test_cryptonote_ring_guess_is_one_over_n(n):
    out = run_game(GameConfig("cryptonote", trials=200, ring_size=n, seed=n))
    assert out.success_rate == pytest.approx(1 / n)


@pytest.mark.parametrize("scheme", SCHEME_NAMES)
def test_grouped_cells_equal_single_runs(scheme):
    cfg = GameConfig(scheme, trials=30, seed=9)
    cells = [("slla", "coin-to-coin"), ("tlla", "coin-to-coin"), ("rccla", "sent-coin"),
             ("rccla", "coin-to-time"), ("sccla", "consumed-coin"), ("sccla", "coin-to-value")]
    for group in builder_groups(cells):
        together = run_cells(cfg, group)
        for cell in group:
            alone = run_game(dataclasses.replace(cfg, attack=cell[0], medium=cell[1]))
            assert together[cell] == alone


def test_cells_with_different_builders_refuse_to_share():
    with pytest.raises(GameError):
        run_cells(GameConfig("bitcoin", trials=1), [("slla", "coin-to-coin"), ("slla", "coin-to-value")])


def test_game_runs_are_reproducible():
    cfg = GameConfig("coinjoin", "tlla", "coin-to-coin", trials=40, seed=123)
    assert run_game(cfg) == run_game(cfg)


def test_transcript_lines():
    buf = io.StringIO()
    cfg = GameConfig("zerocoin", "slla", "coin-to-value", trials=12)
    out = run_game(cfg, transcript=buf)
    rows = [json.loads(line) for line in buf.getvalue().splitlines()]
    assert len(rows) == 12 and [r["trial"] for r in rows] == list(range(12))
    assert sum(r["credit"] for r in rows) == pytest.approx(out.successes)
    assert {"seed", "view_digest", "guess", "truth", "correct"} <= set(rows[0])


def test_measured_baselines_reported():
    out = run_game(GameConfig("cryptonote", "rccla", "sent-coin", trials=40))
    assert out.baseline_kind == "measured" and out.baseline_ci_95 is not None
    assert out.analytic_baseline == pytest.approx(1 / 8)


def test_every_game_has_a_builder_and_adversary():
    for (attack, medium), spec in GAMES.items():
        assert callable(spec.build) and callable(spec.adversary)
