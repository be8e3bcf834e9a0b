#!/usr/bin/env python3
"""Regenerate every figure dataset and run the verification table.

Usage: python scripts/make_figures.py [outdir]

Writes fig1.csv .. fig6.csv into outdir (default ./figures) at the default
resolutions, then runs the acceptance checks.  Equivalent to calling the
`bandgap` CLI once per figure.
"""

import pathlib
import sys
import time

from bandgap.cli import main as bandgap_main


def run(outdir: pathlib.Path) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    commands = [
        ["fig1", "--eta", "5"],
        ["fig2", "--eta", "5"],
        ["fig3"],
        ["fig4"],
        ["fig5"],
        ["fig6"],
    ]
    for cmd in commands:
        out = outdir / f"{cmd[0]}.csv"
        t0 = time.perf_counter()
        rc = bandgap_main(cmd + ["--out", str(out)])
        if rc != 0:
            print(f"{cmd[0]} failed with exit code {rc}")
            return rc
        print(f"wrote {out} ({time.perf_counter() - t0:.1f} s)")
    return bandgap_main(["verify"])


if __name__ == "__main__":
    target = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path("figures")
    sys.exit(run(target))
