"""Command-line front end: run one game, the full matrix, verify, or the theorem checks.

Configuration is layered: built-in defaults, then ``ANONYLINK_SEED``, then a
JSON file given by ``--config`` (keys are the fields of
:class:`anonylink.evaluator.RunConfig`), then explicit flags.
``--dump-config`` prints the merged document, which ``--config`` accepts back.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import evaluator as ev
from .attacks import GAMES, GameError, applicability, run_game
from .attacks.core import Attack, AttackOutcome, Medium, Scoring
from .crypto import GROUP_PROFILES
from .privacy_core import theorem_checks
from .schemes import SCHEME_NAMES, SchemeError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

# Flag dest -> RunConfig field.
_FLAG_FIELDS = {
    "scheme": "schemes", "attack": "attack", "medium": "medium", "column": "columns",
    "trials": "trials", "seed": "seed", "ring": "ring_size", "mix_size": "mix_size",
    "candidates": "candidates", "mixnet": "mixnet", "group_profile": "group_profile",
    "scoring": "scoring", "maturity": "maturity", "min_trials": "min_trials",
    "format": "format", "out": "out", "transcript": "transcript",
}


class ConfigError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration; flags override its values")
    p.add_argument("--dump-config", action="store_true",
                   help="print the merged configuration as JSON and exit")
    p.add_argument("--scheme", action="append", choices=SCHEME_NAMES,
                   help="scheme (repeat for several; default: all for matrix/verify)")
    p.add_argument("--trials", type=int, help="challenges per cell (default 10000)")
    p.add_argument("--seed", type=int, help="master seed (default 42, or $ANONYLINK_SEED)")
    p.add_argument("--ring", type=int, help="ring size n for CryptoNote (default 4)")
    p.add_argument("--mix-size", type=int, help="participants per mixing round (default 4)")
    p.add_argument("--candidates", type=int, help="candidate answers m per challenge (default 8)")
    p.add_argument("--mixnet", action="store_true", default=None,
                   help="hide transport origins behind a mixnet")
    p.add_argument("--group-profile", choices=GROUP_PROFILES, help="group parameters")
    p.add_argument("--scoring", choices=[s.value for s in Scoring],
                   help="expected: 1/|tie| credit (default); sampled: seeded tie-break")
    p.add_argument("--maturity", type=int, help="rounds before an output may serve as a decoy")
    p.add_argument("--min-trials", type=int, help="fewest trials a verdict may rest on (default 1000)")
    p.add_argument("--format", choices=sorted(ev.RENDERERS), help="report format (default json)")
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anonylink", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="play one game and report its outcome")
    _common(p)
    p.add_argument("--attack", choices=[a.value for a in Attack])
    p.add_argument("--medium", choices=[m.value for m in Medium])
    p.add_argument("--transcript", help="write one JSON line per trial here")

    for name, text in (("matrix", "play every (scheme, column) game"),
                       ("verify", "play the matrix and diff it against the expected verdicts")):
        p = sub.add_parser(name, help=text)
        _common(p)
        p.add_argument("--column", action="append", choices=ev.COLUMN_KEYS,
                       help="restrict to a column (repeatable)")
        if name == "verify":
            p.add_argument("--fixture", help="expected-verdict JSON (default: the shipped one)")

    p = sub.add_parser("theorems", help="check the linkage algebra")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--max-dim", type=int, default=8)
    return parser


def resolve_config(args: argparse.Namespace, env: dict | None = None) -> ev.RunConfig:
    """defaults < $ANONYLINK_SEED < --config file < flags."""
    env = os.environ if env is None else env
    doc: dict = {}
    if env.get("ANONYLINK_SEED"):
        try:
            doc["seed"] = int(env["ANONYLINK_SEED"])
        except ValueError:
            raise ConfigError(f"ANONYLINK_SEED is not an integer: {env['ANONYLINK_SEED']!r}")
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
        if not isinstance(loaded, dict):
            raise ConfigError("config must be a JSON object")
        doc.update(loaded)
    for dest, key in _FLAG_FIELDS.items():
        val = getattr(args, dest, None)
        if val is not None:
            doc[key] = tuple(val) if isinstance(val, list) else val
    if args.command == "run" and "schemes" not in doc:
        raise ConfigError("run needs --scheme")
    try:
        cfg = ev.RunConfig.from_dict(doc)
    except (GameError, SchemeError, ev.FixtureError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc))
    if args.command == "run" and len(cfg.schemes) != 1:
        raise ConfigError("run takes exactly one --scheme")
    return cfg


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _progress(scheme, group):
    print(f"  {scheme}: {', '.join(f'{a}/{m}' for a, m in group)}", file=sys.stderr)


def cmd_run(cfg: ev.RunConfig) -> int:
    gc = cfg.game_config(cfg.schemes[0])
    if (gc.attack, gc.medium) not in GAMES:
        raise ConfigError(f"no game for {gc.attack} / {gc.medium}")
    reason = applicability(gc)
    if reason is None:
        if cfg.transcript:
            with open(cfg.transcript, "w", encoding="utf-8") as fh:
                outcome = run_game(gc, transcript=fh)
        else:
            outcome = run_game(gc)
    else:
        outcome = AttackOutcome.not_applicable_for(gc, reason)
    verdict = None
    if not outcome.applicable or outcome.trials >= cfg.min_trials:
        v = ev.classify(outcome, min_trials=cfg.min_trials)
        verdict = {"level": v.level.value, "symbol": v.symbol, "p_est": v.p_est}
    doc = {"config": gc.to_dict(), "outcome": outcome.to_dict(), "verdict": verdict}
    if cfg.format == "json":
        text = json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    elif cfg.format == "csv":
        keys = ["scheme", "game", "medium", "trials", "success_rate", "baseline", "advantage"]
        text = ",".join(keys + ["verdict"]) + "\n" + ",".join(
            [str(doc["outcome"][k]) for k in keys] + [verdict["level"] if verdict else ""]) + "\n"
    else:
        lo, hi = outcome.wilson_ci_95
        text = (f"{outcome.scheme} {outcome.game} {outcome.medium}: "
                + (f"not applicable ({outcome.not_applicable})" if not outcome.applicable else
                   f"success {outcome.success_rate:.4f} [{lo:.4f}, {hi:.4f}] vs baseline "
                   f"{outcome.baseline:.4f} over {outcome.trials} trials")
                + (f" -> {verdict['symbol']} {verdict['level']}" if verdict else "") + "\n")
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_matrix(cfg: ev.RunConfig) -> int:
    m = ev.build_matrix(cfg, progress=_progress)
    _emit(ev.render(m, cfg.format), cfg.out)
    return EXIT_OK


def cmd_verify(cfg: ev.RunConfig, fixture: str | None) -> int:
    try:
        fx = ev.load_fixture(fixture)
    except (ev.FixtureError, OSError) as exc:
        raise ConfigError(str(exc))
    m = ev.build_matrix(cfg, progress=_progress)
    diffs = ev.verify_against_expected(m, fx)
    if cfg.out:
        _emit(ev.render(m, cfg.format), cfg.out)
    sys.stdout.write(ev.summarize_diffs(diffs))
    return EXIT_FAIL if diffs else EXIT_OK


def cmd_theorems(args: argparse.Namespace) -> int:
    checks = theorem_checks(max_dim=args.max_dim, samples=args.samples, seed=args.seed)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command == "theorems":
        return cmd_theorems(args)
    try:
        cfg = resolve_config(args)
        if args.dump_config:
            doc = {k: v for k, v in cfg.to_dict().items() if v is not None}
            print(json.dumps(doc, sort_keys=True, indent=2))
            return EXIT_OK
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "matrix":
            return cmd_matrix(cfg)
        return cmd_verify(cfg, args.fixture)
    except (ConfigError, ev.InsufficientTrials) as exc:
        print(f"anonylink: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
