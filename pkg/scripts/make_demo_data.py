#!/usr/bin/env python3
"""Generate small demo CSVs: a snowman silhouette and a noisy circle.

The snowman (two stacked circle outlines) with a height filter, n=6,
p=0.3 is the classic picture; the circle with n=8, p=0.35 yields a
14-node cycle. Both are handy for poking at the CLI and the UI.
"""

import argparse
import os

import numpy as np


def write_csv(path, header, rows, labels=None):
    with open(path, "w", encoding="utf-8") as f:
        f.write(",".join(header) + "\n")
        for i, row in enumerate(rows):
            cells = [repr(float(v)) for v in row]
            if labels is not None:
                cells.append(labels[i])
            f.write(",".join(cells) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="demo_data")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)
    rng = np.random.default_rng(args.seed)

    tb = rng.uniform(0, 2 * np.pi, 400)
    th = rng.uniform(0, 2 * np.pi, 240)
    body = np.column_stack([np.cos(tb), np.sin(tb)])
    head = np.column_stack([0.5 * np.cos(th), 1.3 + 0.5 * np.sin(th)])
    pts = np.vstack([body, head])
    labels = ["body"] * 400 + ["head"] * 240
    write_csv(os.path.join(args.out_dir, "snowman.csv"),
              ["x", "y", "part"], pts, labels)

    theta = np.sort(rng.uniform(0, 2 * np.pi, 1000))
    circle = np.column_stack([np.cos(theta), np.sin(theta)])
    write_csv(os.path.join(args.out_dir, "circle.csv"), ["x", "y"], circle)

    gaps = np.diff(np.concatenate([theta, [theta[0] + 2 * np.pi]]))
    print(f"wrote {args.out_dir}/snowman.csv (640 rows) and "
          f"{args.out_dir}/circle.csv (1000 rows)")
    print("suggested circle run: nervemap mapper --input circle.csv "
          "--output-dir graphs --filter '{\"kind\": \"column\", \"column\": \"y\"}' "
          f"--intervals 8 --overlaps 0.35 --eps {3 * float(gaps.max()):.4f} "
          "--min-pts 3")


if __name__ == "__main__":
    main()
