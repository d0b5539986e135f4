#!/usr/bin/env python3
"""Run a small benchmark sweep and write the metrics table.

The harness reads a key=value experiment description, sweeps the
sketch size over every method, and emits one CSV row per
(method, k, trial) cell.  Rows carry squared relative error, PSNR,
wall time, and the a-priori bound, so plotting error against k is a
one-liner from the file.
"""

import os
import tempfile

from tsketch import parse_experiment_spec, run_experiment, write_metrics_csv

SPEC = """
# polynomially decaying spectrum, three sketch sizes, two trials each
kind = poly
n = 40
p = 6
r = 8
decay = 1.0
k = 10, 15, 20
l = 2k+1
trials = 2
seed = 11
"""


def main():
    spec = parse_experiment_spec(SPEC)
    rows = run_experiment(spec)

    fd, path = tempfile.mkstemp(suffix=".csv")
    os.close(fd)
    try:
        write_metrics_csv(path, rows)
        with open(path, encoding="utf-8") as f:
            print(f.read().rstrip("\n"))
    finally:
        os.unlink(path)

    best = min(
        (r for r in rows if r.method == "alg3"),
        key=lambda r: r.relative_error,
    )
    print()
    print("best sketched cell: k=%d trial=%d rel err %.3e"
          % (best.k, best.trial, best.relative_error))


if __name__ == "__main__":
    main()
