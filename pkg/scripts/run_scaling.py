"""Wall time of check_sync on the 4-process intersection ring as the NFAs grow.

    python3 scripts/run_scaling.py --sizes 4 8 16 32 64
"""

import argparse
import math
import time

from mbsync.decide import check_sync
from mbsync.decide.bench import cycle_nfa, gen_benchmark


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    ap.add_argument("--gadget", choices=["none", "nonsync", "nonsim"], default="none")
    args = ap.parse_args()
    points = []
    print(f"{'size':>5} {'answer':>6} {'states':>8} {'seconds':>8}")
    for n in args.sizes:
        cfm = gen_benchmark([cycle_nfa(n), cycle_nfa(n + 1), cycle_nfa(n), cycle_nfa(n + 1)], gadget=args.gadget)
        t0 = time.perf_counter()
        v = check_sync(cfm)
        dt = time.perf_counter() - t0
        points.append((math.log(n), math.log(dt)))
        print(f"{n:>5} {'yes' if v.answer else 'no':>6} {v.states:>8} {dt:>8.2f}")
    if len(points) > 1:
        mx = sum(x for x, _ in points) / len(points)
        my = sum(y for _, y in points) / len(points)
        slope = sum((x - mx) * (y - my) for x, y in points) / sum((x - mx) ** 2 for x, _ in points)
        print(f"log-log slope {slope:.2f}")


if __name__ == "__main__":
    main()
