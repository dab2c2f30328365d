"""Engine-versus-oracle agreement over a random corpus of small CFMs.

    python3 scripts/run_corpus.py --n 500 --seed 0
"""

import argparse
import time

from mbsync.corpus import CorpusConfig, compare, corpus


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--bound", type=int, default=8)
    ap.add_argument("--transitions", type=int, default=CorpusConfig.max_transitions)
    args = ap.parse_args()
    cfg = CorpusConfig(seed=args.seed, max_transitions=args.transitions)
    t0 = time.time()
    bad = complete = nonsync = witnesses = 0
    slowest = (0.0, "")
    for cfm in corpus(args.n, cfg):
        t = time.time()
        a = compare(cfm, bound=args.bound)
        slowest = max(slowest, (time.time() - t, cfm.name))
        complete += a.complete
        nonsync += a.sync is False
        witnesses += a.witnesses
        if not a.ok:
            bad += 1
            print(cfm.name, "; ".join(a.problems))
    print(
        f"cfms {args.n}  disagreements {bad}  oracle complete {complete}  not synchronizable {nonsync}  "
        f"witnesses checked {witnesses}  time {time.time() - t0:.1f}s  slowest {slowest[1]} {slowest[0]:.1f}s"
    )


if __name__ == "__main__":
    main()
