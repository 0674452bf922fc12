"""DIMACS-subset CNF parsing and brute-force satisfiability."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CapacityError, ParseError

MAX_VARS = 20


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...] = field(default_factory=tuple)

    def __post_init__(self):
        clauses = tuple(tuple(int(lit) for lit in clause) for clause in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        if self.num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        for clause in clauses:
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range for {self.num_vars} variables")

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, clause + (0,))) for clause in self.clauses]
        return "\n".join(lines) + "\n"

    def without_clause(self, index: int) -> "CnfFormula":
        return CnfFormula(self.num_vars, self.clauses[:index] + self.clauses[index + 1 :])


def parse_dimacs(text: str, source: str | None = None) -> CnfFormula:
    """Parse the DIMACS subset: ``c`` comments, one ``p cnf V C`` header, 0-terminated clauses.

    A clause may span several lines; every clause must end with ``0``.
    """
    header = None
    clauses: list[tuple[int, ...]] = []
    pending: list[int] = []
    pending_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise ParseError("duplicate problem line", lineno, source)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"malformed header {line!r}; expected 'p cnf <vars> <clauses>'", lineno, source)
            try:
                nvars, nclauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"malformed header {line!r}", lineno, source) from None
            if nvars < 0 or nclauses < 0:
                raise ParseError("negative counts in header", lineno, source)
            header = (nvars, nclauses, lineno)
            continue
        if header is None:
            raise ParseError("clause before 'p cnf' header", lineno, source)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno, source) from None
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
                pending_line = None
                continue
            if abs(lit) > header[0]:
                raise ParseError(f"literal {lit} out of range 1..{header[0]}", lineno, source)
            if pending_line is None:
                pending_line = lineno
            pending.append(lit)
    if header is None:
        raise ParseError("missing 'p cnf' header", None, source)
    if pending:
        raise ParseError("clause not terminated by 0", pending_line, source)
    nvars, nclauses, hline = header
    if len(clauses) != nclauses:
        raise ParseError(f"header declares {nclauses} clauses, found {len(clauses)}", hline, source)
    return CnfFormula(nvars, tuple(clauses))


def read_dimacs(path: str | Path) -> CnfFormula:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read DIMACS file: {exc.strerror}", None, str(path)) from None
    return parse_dimacs(text, source=str(path))


def _satisfied_mask(f: CnfFormula) -> np.ndarray:
    if f.num_vars > MAX_VARS:
        raise CapacityError(f"{f.num_vars} variables exceeds the brute-force limit of {MAX_VARS}")
    # assignment a: variable v is true iff bit (v - 1) of a is set
    assignments = np.arange(1 << f.num_vars, dtype=np.int64)
    ok = np.ones(assignments.size, dtype=bool)
    for clause in f.clauses:
        sat = np.zeros(assignments.size, dtype=bool)
        for lit in set(clause):
            bit = (assignments >> (abs(lit) - 1)) & 1
            sat |= bit.astype(bool) if lit > 0 else ~bit.astype(bool)
        ok &= sat
    return ok


def brute_force_sat(f: CnfFormula) -> int:
    return int(bool(_satisfied_mask(f).any()))


def count_models(f: CnfFormula) -> int:
    return int(_satisfied_mask(f).sum())


def evaluate(f: CnfFormula, assignment: dict[int, bool]) -> bool:
    return all(
        any(assignment[abs(lit)] == (lit > 0) for lit in clause) for clause in f.clauses
    )


def brute_force_models(f: CnfFormula):
    """Yield satisfying assignments one at a time; a slow path kept for cross-checking."""
    if f.num_vars > MAX_VARS:
        raise CapacityError(f"{f.num_vars} variables exceeds the brute-force limit of {MAX_VARS}")
    for values in itertools.product((False, True), repeat=f.num_vars):
        assignment = {v + 1: values[v] for v in range(f.num_vars)}
        if evaluate(f, assignment):
            yield assignment
