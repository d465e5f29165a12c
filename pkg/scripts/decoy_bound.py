"""Ring-size sweep: ledger adversary's coin-to-coin success against 1/n.

    python3 scripts/decoy_bound.py --trials 10000 --sizes 2 4 8 16
"""
import argparse
import time

from anonylink.attacks import GameConfig, run_game
from anonylink.attacks.core import ci_contains


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 4, 8, 16])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--scoring", choices=["expected", "sampled"], default="expected")
    args = ap.parse_args()

    print(f"{'n':>3} {'1/n':>7} {'success':>8} {'95% CI':>19} {'in CI':>6} {'secs':>6}")
    all_ok = True
    for n in args.sizes:
        cfg = GameConfig("cryptonote", "slla", "coin-to-coin", trials=args.trials,
                         ring_size=n, seed=args.seed, scoring=args.scoring)
        t0 = time.perf_counter()
        out = run_game(cfg)
        dt = time.perf_counter() - t0
        ok = ci_contains(out.wilson_ci_95, 1 / n)
        all_ok &= ok
        lo, hi = out.wilson_ci_95
        print(f"{n:>3} {1 / n:>7.4f} {out.success_rate:>8.4f} [{lo:.4f}, {hi:.4f}] {str(ok):>6} {dt:>6.1f}")
    return 0 if all_ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
