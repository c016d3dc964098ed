"""Position distribution of the Hadamard walk from the symmetric start, with the light-cone tail mass."""

import argparse
import math
from pathlib import Path

import numpy as np

from cayleywalk.export import write_distribution_csv, write_json
from cayleywalk.walk import evolve, hadamard_coin, position_distribution, symmetric_line_state


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", type=int, default=100)
    ap.add_argument("--out", type=Path, default=Path("out/hadamard_distribution"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    state = evolve(symmetric_line_state(args.t), hadamard_coin(), args.t)
    P = position_distribution(state)
    x = state.positions
    edge = args.t / math.sqrt(2)
    write_distribution_csv(args.out / f"distribution_t{args.t}.csv", state)
    summary = {
        "t": args.t,
        "peak_positions": [int(x[np.argmax(np.where(x < 0, P, 0))]), int(x[np.argmax(np.where(x > 0, P, 0))])],
        "t_over_sqrt2": edge,
        "mass_beyond_t_over_sqrt2": float(P[np.abs(x) > edge].sum()),
        "mass_beyond_t_over_sqrt2_plus_5": float(P[np.abs(x) > edge + 5].sum()),
    }
    write_json(args.out / "summary.json", summary)
    print(summary)


if __name__ == "__main__":
    main()
