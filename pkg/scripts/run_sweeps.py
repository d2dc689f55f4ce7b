#!/usr/bin/env python
"""Run the four standard parameter sweeps and write CSV results.

Each sweep varies one knob (user count, block bonus, fee rate, mean block
interval) over its default grid while holding everything else at the default
market. Results land in --out-dir as per-instance CSVs plus *_means.csv and
*_meta.json siblings.

The default market prices capacity above what any single miner's valuation
can cover, so the cleared welfare is zero across most grids. Pass a smaller
--unit-cost (for example 0.001) to see an allocating regime.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from edgeauction import (
    SWEEPABLE_PARAMETERS,
    default_sweep_spec,
    emit_results,
    run_sweep,
    sweep_metadata,
)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="results", help="directory for CSV output")
    parser.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    parser.add_argument(
        "--instances", type=int, default=100, help="instances per grid value (default 100)"
    )
    parser.add_argument(
        "--unit-cost",
        type=float,
        default=None,
        help="override the per-unit capacity cost (default keeps the standard market)",
    )
    parser.add_argument(
        "--workers", type=int, default=1, help="thread count for instance evaluation"
    )
    args = parser.parse_args(argv)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    overrides = {}
    if args.unit_cost is not None:
        overrides["unit_cost"] = args.unit_cost

    for param in SWEEPABLE_PARAMETERS:
        spec = default_sweep_spec(
            param,
            instances_per_point=args.instances,
            base_seed=args.seed,
            **overrides,
        )
        points, means = run_sweep(spec, max_workers=args.workers)
        written = emit_results(
            points,
            means,
            "csv",
            out_dir / f"sweep_{param}.csv",
            sweep_param=param,
            metadata=sweep_metadata(spec),
        )
        print(f"== {param} ==")
        for mean in means:
            print(
                f"  {param}={mean.grid_value:g}: "
                f"welfare {mean.welfare:.6f}, winners {mean.winner_count:.2f}, "
                f"payments {mean.total_payment:.6f}"
            )
        for path in written:
            print(f"  wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
