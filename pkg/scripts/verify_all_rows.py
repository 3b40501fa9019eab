#!/usr/bin/env python3
"""Verify every genus-4 table row and write one JSON report per row."""

import argparse
import pathlib
import sys

from sepsemi.models import NON_M_ROWS
from sepsemi.reports import VerifyParams, default_seed, run_verify_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="reports")
    ap.add_argument("--bound", type=int, default=8)
    ap.add_argument("--seed", type=int, default=default_seed())
    args = ap.parse_args()
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ok = True
    for kind, r, l in NON_M_ROWS:
        rep = run_verify_table(kind, r, l, args.bound, VerifyParams(seed=args.seed))
        (out / f"{kind}_{r}_{l}.json").write_text(rep.dumps())
        print(f"{kind:12s} ({r},{l})  {'pass' if rep.verdict else 'FAIL'}  {rep.runtime:6.1f} s")
        ok &= rep.verdict
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
