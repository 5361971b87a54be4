from __future__ import annotations

import argparse

from singrobin.asymptotics import compute_theta0
from singrobin.models import BoundaryParams
from singrobin.recovery import model_tail
from singrobin.store import RunStore


def main() -> None:
    parser = argparse.ArgumentParser(description="Write an exact asymptotic-model eigenvalue tail")
    parser.add_argument("--b", type=float, required=True)
    parser.add_argument("--beta", type=float, default=0.0)
    parser.add_argument("--count", type=int, default=8)
    parser.add_argument("--index-shift", type=int, default=1)
    parser.add_argument("--output-dir", default="out")
    parser.add_argument("--name", default="model_tail.csv")
    args = parser.parse_args()

    params = BoundaryParams(b=args.b, beta=args.beta)
    theta0 = compute_theta0(params.b).theta0
    tail = model_tail(params, theta0, args.count, args.index_shift)
    path = RunStore(args.output_dir).write_csv(args.name, ("index", "lambda"), tail)
    print(path, len(tail))


if __name__ == "__main__":
    main()
