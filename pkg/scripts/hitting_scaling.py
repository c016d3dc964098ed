"""
Hitting-time sweep: one-shot, concurrent, average and group-velocity times.

Runs the hypercube family over n and the line family over target distance,
writing one CSV per family.
"""

import argparse
from pathlib import Path

from cayleywalk.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--cube-sizes", default="4,6,8,10,12")
    ap.add_argument("--line-sizes", default="10,20,40,60,80,100")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("out/hitting_scaling"))
    args = ap.parse_args()
    for family, sizes in (("hypercube", args.cube_sizes), ("line", args.line_sizes)):
        code = cli_main(["compare", "--family", family, "--sizes", sizes,
                         "--workers", str(args.workers), "--out", str(args.out / family)])
        if code:
            raise SystemExit(code)
        print((args.out / family / "compare.csv").read_text())


if __name__ == "__main__":
    main()
