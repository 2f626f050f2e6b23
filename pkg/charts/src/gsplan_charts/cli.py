"""`charts` command: render planner outputs into the two report figures."""

from __future__ import annotations

import argparse
import os
import sys

from .io import ChartInputError
from .render import render_bar_chart, render_world_map


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="charts",
        description="render gateway-planner outputs (bar chart + world map)",
    )
    parser.add_argument("--stats", required=True, help="stats CSV (criteria,fraction)")
    parser.add_argument("--sites", required=True, help="sites CSV from the planner")
    parser.add_argument("--regions", required=True, help="regions GeoJSON")
    parser.add_argument("--out-dir", required=True)
    args = parser.parse_args(argv)

    try:
        os.makedirs(args.out_dir, exist_ok=True)
        bar_path = os.path.join(args.out_dir, "selection_bars.png")
        map_path = os.path.join(args.out_dir, "world_sites.png")
        render_bar_chart(args.stats, bar_path)
        render_world_map(args.sites, args.regions, map_path)
    except (ChartInputError, OSError) as exc:
        print(f"charts: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {bar_path}")
    print(f"wrote {map_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
