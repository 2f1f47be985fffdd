#!/usr/bin/env python3
"""Regenerate every figure data file as CSV under data/ (gnuplot-ready).

The fourteen 12-qubit factoring traces dominate the runtime (a few minutes on
one core); pass --quick to run only one base per variant.
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from ibits.cli import main as cli  # noqa: E402

BASES = (2, 4, 7, 8, 11, 13, 14)


def jobs(quick: bool):
    yield "beamsplitter_scan.csv", ["scenario", "beamsplitter-scan", "--photons", "20", "--points", "33"]
    yield "mz_scan_1photon.csv", ["scenario", "mz-scan", "--photons", "1", "--points", "17"]
    yield "mz_scan_20photon.csv", ["scenario", "mz-scan", "--photons", "20", "--points", "17"]
    yield "decoherence_scan.csv", ["scenario", "decoherence-scan", "--points", "11"]
    yield "mz_error_scan.csv", ["scenario", "mz-error-scan", "--points", "8"]
    yield "teleport.csv", ["scenario", "teleport"]
    yield "grover_n8.csv", ["scenario", "grover", "--qubits", "8"]
    yield "grover_used_n7.csv", ["scenario", "grover-used", "--qubits", "7"]
    for base in (7,) if quick else BASES:
        yield f"shor_a{base}.csv", ["scenario", "shor", "--a", str(base)]
        yield f"shor_used_a{base}.csv", ["scenario", "shor-used", "--a", str(base)]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="data")
    parser.add_argument("--quick", action="store_true", help="one factoring base instead of seven")
    args = parser.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for filename, argv in jobs(args.quick):
        target = outdir / filename
        print(f"writing {target} ...", flush=True)
        code = cli(argv + ["-o", str(target)])
        if code != 0:
            print(f"failed with exit code {code}", file=sys.stderr)
            return code
    print("done")
    return 0


if __name__ == "__main__":
    sys.exit(main())
