#!/usr/bin/env python3
"""SVG charts of the six model curves, oriented by their first certified morphism."""

import argparse
import pathlib

from sepsemi.models import NON_M_ROWS, model_sextic
from sepsemi.realizations import realize_row
from sepsemi.svg import render_chart
from sepsemi.topology import complex_orientation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="figures")
    ap.add_argument("--samples", type=int, default=100)
    args = ap.parse_args()
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for kind, r, l in NON_M_ROWS:
        C, L = model_sextic(kind, r, l)
        ori = None
        for R in realize_row(C, L, kind, r, l, n_samples=args.samples)[:1]:
            if R.ok:
                ori = complex_orientation(L, R.morphism)
        path = out / f"{kind}_{r}_{l}.svg"
        path.write_text(render_chart(C.quadric, L.loops, orientation=ori))
        print(path)


if __name__ == "__main__":
    main()
