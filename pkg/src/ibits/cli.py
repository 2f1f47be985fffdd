"""Command-line interface.

Subcommands::

    ibits scenario NAME [options]     # builtin traces and parameter scans
    ibits run FILE.iqc [options]      # execute a circuit program
    ibits measure --matrix F | --kraus F [F ...]

Exit codes: 0 success, 1 parse diagnostics, 2 usage / unknown scenario,
3 capacity guard, 4 I/O failure, 5 non-unitary matrix given to
``measure --matrix``.

Trace output columns are ``step,label,interference,ibits``; scans emit two
parameter columns followed by ``interference``.  Numbers carry 12 significant
digits and identical invocations produce byte-identical output.  The
``ITF_THREADS`` environment variable caps the numeric backend's thread count
when set before start-up.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

SCENARIOS = (
    "teleport",
    "grover",
    "grover-used",
    "shor",
    "shor-used",
    "beamsplitter-scan",
    "mz-scan",
    "mz-error-scan",
    "decoherence-scan",
)

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_IO = 4
EXIT_NON_UNITARY = 5


def _apply_thread_cap() -> None:
    value = os.environ.get("ITF_THREADS")
    if not value or "numpy" in sys.modules:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, value)


def fmt12(value: float) -> str:
    """Fixed 12-significant-digit rendering (stable across platforms)."""
    import numpy as np

    return np.format_float_positional(
        float(value), precision=12, unique=False, fractional=False
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ibits", description="interference measure toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("scenario", help="run a builtin scenario or scan")
    sc.add_argument("name", choices=SCENARIOS)
    sc.add_argument("--qubits", type=int, default=None)
    sc.add_argument("--marked", type=int, default=0)
    sc.add_argument("--a", type=int, default=7, help="base for the factoring trace")
    sc.add_argument("--modulus", type=int, default=15)
    sc.add_argument("--photons", type=int, default=None)
    sc.add_argument("--points", type=int, default=None)
    _common_output_args(sc)

    rn = sub.add_parser("run", help="execute a .iqc circuit file")
    rn.add_argument("file")
    _common_output_args(rn)

    ms = sub.add_parser("measure", help="measure a matrix or Kraus-set file")
    group = ms.add_mutually_exclusive_group(required=True)
    group.add_argument("--matrix", help="unitary matrix file")
    group.add_argument("--kraus", nargs="+", help="Kraus operator files forming one channel")
    return parser


def _common_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-o", "--output", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, default=0)


def _trace_rows(trace):
    header = ("step", "label", "interference", "ibits")
    rows = [(r.step, r.label, r.interference, r.ibits) for r in trace.records]
    return header, rows


def _scenario_rows(name: str, args):
    from . import optics, protocols
    from .channels import bitflip, compose, phaseflip, unitary_channel
    from .gates import hadamard
    from .measure import interference_kraus

    if name == "teleport":
        return _trace_rows(protocols.teleportation_trace())
    if name in ("grover", "grover-used"):
        include = name == "grover"
        qubits = args.qubits if args.qubits is not None else (8 if include else 7)
        return _trace_rows(protocols.grover_trace(qubits, args.marked, include))
    if name in ("shor", "shor-used"):
        include = name == "shor"
        return _trace_rows(protocols.shor_trace(args.modulus, args.a, include))

    import numpy as np

    if name == "beamsplitter-scan":
        photons = args.photons if args.photons is not None else 20
        points = args.points if args.points is not None else 33
        rows = []
        for n in range(1, photons + 1):
            for theta in np.linspace(0.0, math.pi / 2, points):
                value = interference_kraus(
                    unitary_channel(optics.bs_unitary(n, theta).matrix)
                )
                rows.append((n, theta, value))
        return ("photons", "theta", "interference"), rows
    if name == "mz-scan":
        photons = args.photons if args.photons is not None else 1
        points = args.points if args.points is not None else 17
        rows = []
        for theta in np.linspace(0.0, math.pi / 2, points):
            for phi in np.linspace(0.0, 2 * math.pi, points):
                value = interference_kraus(
                    unitary_channel(optics.mz_unitary(photons, theta, phi).matrix)
                )
                rows.append((theta, phi, value))
        return ("theta", "phi", "interference"), rows
    if name == "mz-error-scan":
        points = args.points if args.points is not None else 8
        rows = []
        for phi in np.linspace(0.0, 2 * math.pi, points):
            for p in np.linspace(0.0, 1.0, points):
                value = interference_kraus(
                    optics.mz_phase_error_channel(math.pi / 4, phi, p)
                )
                rows.append((phi, p, value))
        return ("phi", "p", "interference"), rows
    if name == "decoherence-scan":
        points = args.points if args.points is not None else 11
        h_channel = unitary_channel(hadamard())
        kinds = (
            ("bitflip", bitflip, False),
            ("phaseflip", phaseflip, False),
            ("bitflip-after-h", bitflip, True),
            ("phaseflip-after-h", phaseflip, True),
        )
        rows = []
        for label, make, after_h in kinds:
            for p in np.linspace(0.0, 1.0, points):
                ch = compose(make(p), h_channel) if after_h else make(p)
                rows.append((label, p, interference_kraus(ch)))
        return ("channel", "p", "interference"), rows
    raise AssertionError(name)  # pragma: no cover - argparse restricts choices


def _render(header, rows, fmt: str) -> str:
    def cell(value):
        if isinstance(value, float):
            return fmt12(value)
        return str(value)

    if fmt == "csv":
        lines = [",".join(header)]
        lines.extend(",".join(cell(v) for v in row) for row in rows)
        return "\n".join(lines) + "\n"
    payload = [dict(zip(header, row)) for row in rows]
    return json.dumps(payload, indent=2) + "\n"


def _write_output(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_scenario(args) -> int:
    from .errors import CapacityError, ValidationError

    try:
        header, rows = _scenario_rows(args.name, args)
    except CapacityError as exc:
        print(f"ibits: capacity guard: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ValidationError as exc:
        print(f"ibits: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        _write_output(_render(header, rows, args.format), args.output)
    except OSError as exc:
        print(f"ibits: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _cmd_run(args) -> int:
    from .circuitlang import CircuitParseError, parse, run
    from .errors import CapacityError

    try:
        with open(args.file, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        print(f"ibits: cannot read {args.file}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        program = parse(source)
    except CircuitParseError as exc:
        for diag in exc.diagnostics:
            print(f"{args.file}: {diag}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    try:
        trace = run(program)
    except CapacityError as exc:
        print(f"ibits: capacity guard: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    header, rows = _trace_rows(trace)
    try:
        _write_output(_render(header, rows, args.format), args.output)
    except OSError as exc:
        print(f"ibits: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _cmd_measure(args) -> int:
    from .channels import channel_from_kraus
    from .errors import ValidationError
    from .matrixcore import is_unitary, load_matrix
    from .measure import ibits as to_ibits
    from .measure import interference_kraus, interference_unitary

    try:
        if args.matrix is not None:
            m = load_matrix(args.matrix)
            if m.shape[0] != m.shape[1] or not is_unitary(m, 1e-9):
                print(
                    f"ibits: {args.matrix} is not unitary; use --kraus for channels",
                    file=sys.stderr,
                )
                return EXIT_NON_UNITARY
            value = interference_unitary(m, validate=False)
        else:
            ops = [load_matrix(path) for path in args.kraus]
            value = interference_kraus(channel_from_kraus(ops))
    except OSError as exc:
        print(f"ibits: cannot read input: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"ibits: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"{fmt12(value)} {fmt12(to_ibits(value))}")
    return EXIT_OK


def main(argv=None) -> int:
    _apply_thread_cap()
    args = _build_parser().parse_args(argv)
    if args.command == "scenario":
        return _cmd_scenario(args)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_measure(args)


if __name__ == "__main__":
    sys.exit(main())
