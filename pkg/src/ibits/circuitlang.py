"""Line-oriented circuit description language (.iqc files).

Grammar, one instruction per line, keywords case-insensitive, '#' starts a
comment, angles are literal radians::

    QUBITS n
    H q | X q | Z q
    CNOT c t
    CPHASE c t phi
    QFT lo hi            # inclusive qubit range, lo <= hi
    ORACLE m             # sign flip of basis state m
    R2                   # sign flip of |0...0>
    DIFFUSION
    BITFLIP q p
    PHASEFLIP q p
    MEASURE q1 [q2 ...]
    TRACE label

QUBITS must appear exactly once, before any instruction.  Parsing collects
one diagnostic per offending line and keeps going, so a file with e bad lines
reports e diagnostics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .channels import bitflip, embed_qubit, phaseflip, projective_measurement
from .gates import GateKind, GateSpec, qft_stages
from .protocols import InterferenceTrace, Step, accumulate

__all__ = [
    "Diagnostic",
    "Instruction",
    "CircuitProgram",
    "CircuitParseError",
    "parse",
    "format_program",
    "program_steps",
    "run",
]

_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}: {self.message}"


@dataclass(frozen=True)
class Instruction:
    op: str
    args: tuple = ()


@dataclass(frozen=True)
class CircuitProgram:
    qubit_count: int
    instructions: tuple[Instruction, ...]


class CircuitParseError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


# argument kinds per keyword: q = qubit index, i = non-negative int,
# f = float, p = probability, s = bare token; trailing '+' repeats the kind
_GRAMMAR = {
    "H": "q",
    "X": "q",
    "Z": "q",
    "CNOT": "qq",
    "CPHASE": "qqf",
    "QFT": "qq",
    "ORACLE": "i",
    "R2": "",
    "DIFFUSION": "",
    "BITFLIP": "qp",
    "PHASEFLIP": "qp",
    "MEASURE": "q+",
    "TRACE": "s",
}


def parse(source: str) -> CircuitProgram:
    """Parse a program; raises CircuitParseError carrying all diagnostics."""
    diagnostics: list[Diagnostic] = []
    instructions: list[Instruction] = []
    qubit_count: int | None = None

    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(line)]
        if not tokens:
            continue
        word, col = tokens[0]
        keyword = word.upper()
        args = tokens[1:]

        if keyword == "QUBITS":
            if qubit_count is not None:
                diagnostics.append(Diagnostic(lineno, col, "QUBITS declared more than once"))
                continue
            if instructions:
                diagnostics.append(
                    Diagnostic(lineno, col, "QUBITS must come before any instruction")
                )
                continue
            if len(args) != 1:
                diagnostics.append(Diagnostic(lineno, col, "QUBITS takes one count"))
                continue
            text, acol = args[0]
            try:
                count = int(text)
            except ValueError:
                diagnostics.append(Diagnostic(lineno, acol, f"malformed qubit count {text!r}"))
                continue
            if count < 1:
                diagnostics.append(Diagnostic(lineno, acol, "qubit count must be positive"))
                continue
            qubit_count = count
            continue

        if keyword not in _GRAMMAR:
            diagnostics.append(Diagnostic(lineno, col, f"unknown keyword {word!r}"))
            continue
        if qubit_count is None:
            diagnostics.append(
                Diagnostic(lineno, col, "instruction before the QUBITS declaration")
            )
            continue

        parsed = _parse_args(keyword, args, lineno, col, qubit_count, diagnostics)
        if parsed is None:
            continue
        if not _validate_instruction(keyword, parsed, args, lineno, qubit_count, diagnostics):
            continue
        instructions.append(Instruction(keyword, parsed))

    if qubit_count is None and not diagnostics:
        diagnostics.append(Diagnostic(1, 1, "missing QUBITS declaration"))
    if diagnostics:
        raise CircuitParseError(diagnostics)
    return CircuitProgram(qubit_count=qubit_count, instructions=tuple(instructions))


def _parse_args(keyword, args, lineno, col, qubit_count, diagnostics):
    spec = _GRAMMAR[keyword]
    variadic = spec.endswith("+")
    kinds = spec[:-1] * max(len(args), 1) if variadic else spec
    if variadic and not args:
        diagnostics.append(Diagnostic(lineno, col, f"{keyword} needs at least one argument"))
        return None
    if not variadic and len(args) != len(kinds):
        diagnostics.append(
            Diagnostic(lineno, col, f"{keyword} takes {len(kinds)} argument(s), got {len(args)}")
        )
        return None
    out = []
    for kind, (text, acol) in zip(kinds, args):
        if kind == "s":
            out.append(text)
            continue
        if kind == "f" or kind == "p":
            try:
                value = float(text)
            except ValueError:
                diagnostics.append(Diagnostic(lineno, acol, f"malformed number {text!r}"))
                return None
            if kind == "p" and not 0.0 <= value <= 1.0:
                diagnostics.append(
                    Diagnostic(lineno, acol, f"probability {text} outside [0, 1]")
                )
                return None
            out.append(value)
            continue
        try:
            value = int(text)
        except ValueError:
            diagnostics.append(Diagnostic(lineno, acol, f"malformed integer {text!r}"))
            return None
        if kind == "q" and not 0 <= value < qubit_count:
            diagnostics.append(Diagnostic(lineno, acol, f"qubit {value} out of range"))
            return None
        if kind == "i" and value < 0:
            diagnostics.append(Diagnostic(lineno, acol, f"argument {value} must be >= 0"))
            return None
        out.append(value)
    return tuple(out)


def _validate_instruction(keyword, parsed, args, lineno, qubit_count, diagnostics) -> bool:
    if keyword in ("CNOT", "CPHASE") and parsed[0] == parsed[1]:
        diagnostics.append(
            Diagnostic(lineno, args[1][1], f"{keyword} qubits must be distinct")
        )
        return False
    if keyword == "QFT" and parsed[0] > parsed[1]:
        diagnostics.append(
            Diagnostic(lineno, args[0][1], f"QFT range {parsed[0]}..{parsed[1]} is empty")
        )
        return False
    if keyword == "ORACLE" and parsed[0] >= (1 << qubit_count):
        diagnostics.append(
            Diagnostic(lineno, args[0][1], f"marked state {parsed[0]} out of range")
        )
        return False
    if keyword == "MEASURE" and len(set(parsed)) != len(parsed):
        diagnostics.append(Diagnostic(lineno, args[0][1], "MEASURE qubits must be distinct"))
        return False
    return True


def format_program(program: CircuitProgram) -> str:
    """Canonical source text; parse(format_program(p)) == p."""
    lines = [f"QUBITS {program.qubit_count}"]
    for inst in program.instructions:
        parts = [inst.op]
        for a in inst.args:
            parts.append(repr(a) if isinstance(a, float) else str(a))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def program_steps(program: CircuitProgram) -> list[Step]:
    """Lower each instruction to one trace step."""
    n = program.qubit_count
    dim = 1 << n
    steps = []
    for inst in program.instructions:
        label = " ".join(
            [inst.op] + [repr(a) if isinstance(a, float) else str(a) for a in inst.args]
        )
        op, args = inst.op, inst.args
        if op in ("H", "X", "Z"):
            steps.append(Step(label, (GateSpec(GateKind[op], (args[0],)),)))
        elif op == "CNOT":
            steps.append(Step(label, (GateSpec(GateKind.CNOT, (args[0], args[1])),)))
        elif op == "CPHASE":
            steps.append(Step(label, (GateSpec(GateKind.CPHASE, (args[0], args[1]), (args[2],)),)))
        elif op == "QFT":
            gates = tuple(g for stage in qft_stages(args[0], args[1]) for g in stage)
            steps.append(Step(label, gates))
        elif op == "ORACLE":
            steps.append(Step(label, (GateSpec(GateKind.ORACLE, (), (args[0],)),)))
        elif op == "R2":
            steps.append(Step(label, (GateSpec(GateKind.R2),)))
        elif op == "DIFFUSION":
            steps.append(Step(label, (GateSpec(GateKind.DIFFUSION),)))
        elif op == "BITFLIP":
            steps.append(Step(label, channel=embed_qubit(bitflip(args[1]), n, args[0])))
        elif op == "PHASEFLIP":
            steps.append(Step(label, channel=embed_qubit(phaseflip(args[1]), n, args[0])))
        elif op == "MEASURE":
            steps.append(Step(label, channel=projective_measurement(dim, args)))
        elif op == "TRACE":
            steps.append(Step(str(args[0])))
        else:  # pragma: no cover - grammar table and lowering must stay in sync
            raise AssertionError(f"unhandled instruction {op}")
    return steps


def run(program: CircuitProgram) -> InterferenceTrace:
    """Execute a validated program; one record per instruction."""
    return accumulate(
        program_steps(program),
        1 << program.qubit_count,
        params={"qubits": program.qubit_count},
    )
