"""l0 and l1 recovery over [0,2]^n, integral versus continuous signals.

Prints the table as CSV; --output also writes CSV and JSON files.
"""

import argparse
import sys
import time

from intsparse.experiments import DEFAULT_TIME_LIMIT, reproduce


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--scale", choices=("desk", "paper"), default="desk")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
    p.add_argument("--output", default=None, help="file stem for .csv/.json results")
    p.add_argument("--deterministic", action="store_true",
                   help="omit wall times so repeated runs are byte-identical")
    args = p.parse_args()
    start = time.perf_counter()
    _, text = reproduce("III", args.scale, args.seed, args.time_limit, args.output,
                        args.deterministic)
    sys.stdout.write(text)
    print(f"# total {time.perf_counter() - start:.1f} s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
