"""Wall-clock timings of braid compilation and hhh tables.

    python scripts/bench_hhh.py -D 12 --literal
"""
import argparse
import time

from soergelkit import hecke as hk
from soergelkit import invariants as iv
from soergelkit import rouquier as rq

CASES = [(2, "1 1 1"), (2, "1 1 1 1 1"), (3, "1 2"), (3, "1 -2 1 -2"), (3, "1 1 2 1 1 2")]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("-D", "--cutoff", type=int, default=12)
    ap.add_argument("--literal", action="store_true", help="also time the unreduced n-variable computation")
    ap.add_argument("--unsimplified", action="store_true", help="skip Gaussian elimination")
    args = ap.parse_args()
    print(f"{'braid':<22} {'summands':>8} {'build s':>8} {'hhh s':>8} {'literal s':>9}  euler")
    for n, text in CASES:
        b = hk.BraidWord.parse(n, text)
        t0 = time.perf_counter()
        c = rq.braid_to_complex(b, simplify=not args.unsimplified)
        t1 = time.perf_counter()
        table = iv.hhh(c, iv.SliceRequest(args.cutoff))
        t2 = time.perf_counter()
        lit = ""
        if args.literal:
            iv.clear_caches()
            iv.hhh(c, iv.SliceRequest(args.cutoff, reduced=False))
            lit = f"{time.perf_counter() - t2:.2f}"
        ok = iv.check_euler(b, table)["pass"]
        print(f"n={n} {text:<18} {c.size():>8} {t1 - t0:>8.2f} {t2 - t1:>8.2f} {lit:>9}  {'ok' if ok else 'FAIL'}")
        iv.clear_caches()


if __name__ == "__main__":
    main()
