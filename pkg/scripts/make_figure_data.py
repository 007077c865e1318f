"""Regenerate the CSV data behind every built-in figure preset.

Runs each preset sweep through the same code path as `tbswap sweep
--preset NAME` and writes NAME.csv plus NAME.meta.json into the output
directory.  Output is deterministic: rerunning the script produces
byte-identical files, so the CSVs can be committed and diffed.

Usage:
    python3 scripts/make_figure_data.py [--out-dir DATA] [--only NAME ...]
"""

import argparse
import sys
import time
from pathlib import Path

from tbswap.cli import PRESET_NAMES, preset_sections, write_sweep


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, default=Path("figure_data"),
                    help="directory for the CSV and meta files (default: figure_data/)")
    ap.add_argument("--only", nargs="*", choices=PRESET_NAMES, metavar="NAME",
                    help="regenerate only these presets (default: all)")
    args = ap.parse_args(argv)

    names = args.only if args.only else list(PRESET_NAMES)
    args.out_dir.mkdir(parents=True, exist_ok=True)

    for name in names:
        out = args.out_dir / f"{name}.csv"
        start = time.perf_counter()
        rows = write_sweep(preset_sections(name), out)
        elapsed = time.perf_counter() - start
        print(f"{name}: {rows} rows -> {out} ({elapsed:.2f} s)")

    return 0


if __name__ == "__main__":
    sys.exit(main())
