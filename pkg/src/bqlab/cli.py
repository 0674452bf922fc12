"""Command-line harness: ``verify``, ``run`` and ``table``.

Exit codes: 0 success, 1 a verification or exactness failure, 2 usage,
parse or contract errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from . import quantum_algorithms as qa
from . import statevec as sv
from .classical import (
    TruthTableReduction,
    classical_chain_parity,
    evaluate_tt,
)
from .errors import BQLabError, CapacityError, ContractError, ExactnessViolation, ParseError
from .oracles import (
    CountedOracle,
    InnerProductOracleSpec,
    MonotoneChain,
    chain_oracle,
    inner_product_oracle,
    sat_oracle,
    superterse_spec,
    table_oracle,
)
from .sat import read_dimacs
from .verification import SUITES, padded_table_oracle, run_suite

FORMATS = ("csv", "markdown", "json")
REPORT_FIELDS = ("algorithm", "instance", "output", "quantum_queries", "classical_queries", "exact")


@dataclass(frozen=True)
class ExperimentReport:
    algorithm: str
    instance: str
    output: str
    quantum_queries: int
    classical_queries: int
    exact: bool

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentReport":
        missing = set(REPORT_FIELDS) - set(data)
        if missing:
            raise ValueError(f"report is missing {sorted(missing)}")
        return cls(
            str(data["algorithm"]),
            str(data["instance"]),
            str(data["output"]),
            int(data["quantum_queries"]),
            int(data["classical_queries"]),
            bool(data["exact"]),
        )


# -- oracle spec files --------------------------------------------------------


@dataclass
class OracleSpec:
    kind: str
    oracle: CountedOracle
    description: str
    chain: MonotoneChain | None = None
    inner: InnerProductOracleSpec | None = None


def parse_oracle_spec(text: str, source: str = "<spec>", base_dir: Path | None = None) -> OracleSpec:
    """Parse one oracle specification (blank lines and ``#`` comments ignored)."""
    lines = [
        (i, line.strip())
        for i, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.strip().startswith("#")
    ]
    if not lines:
        raise ParseError("empty oracle specification", None, source)
    lineno, first = lines[0]
    tokens = first.split()
    for i, extra in lines[1:]:
        tokens += extra.split()
    kind, args = tokens[0], tokens[1:]
    try:
        if kind == "table":
            if len(args) != 1:
                raise ParseError("expected 'table <bitstring>'", lineno, source)
            return OracleSpec("table", table_oracle(args[0]), f"table={args[0]}")
        if kind == "chain":
            if len(args) != 2:
                raise ParseError("expected 'chain <L> <ones-count>'", lineno, source)
            length, ones = int(args[0]), int(args[1])
            chain = MonotoneChain.with_ones(length, ones)
            return OracleSpec("chain", chain_oracle(chain), f"L={length};ones={ones}", chain=chain)
        if kind == "dimacs":
            if not args:
                raise ParseError("expected 'dimacs <path> [<path> ...]'", lineno, source)
            base = base_dir or Path(".")
            formulas = [read_dimacs(p if Path(p).is_absolute() else base / p) for p in args]
            return OracleSpec("dimacs", sat_oracle(formulas), f"dimacs={len(formulas)}")
        if kind == "innerproduct":
            if len(args) < 2:
                raise ParseError("expected 'innerproduct <m_z> <n> <outputs...>'", lineno, source)
            z_width, n = int(args[0]), int(args[1])
            outs = args[2:]
            if len(outs) != 1 << z_width:
                raise ParseError(f"expected {1 << z_width} outputs, got {len(outs)}", lineno, source)
            if any(len(o) != n or set(o) - {"0", "1"} for o in outs):
                raise ParseError(f"outputs must be {n}-bit strings", lineno, source)
            spec = InnerProductOracleSpec(z_width, n, tuple(int(o, 2) for o in outs))
            return OracleSpec("innerproduct", inner_product_oracle(spec), f"m_z={z_width};n={n}", inner=spec)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), lineno, source) from None
    raise ParseError(f"unknown oracle kind {kind!r}", lineno, source)


def load_oracle_spec(path: str | Path) -> OracleSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read spec: {exc.strerror}", None, str(path)) from None
    return parse_oracle_spec(text, str(path), path.parent)


# -- single runs --------------------------------------------------------------


def _fresh(args) -> OracleSpec:
    # re-parse so quantum and classical runs each get their own counter
    return load_oracle_spec(args.spec)


def _require_spec(args, *kinds):
    if not args.spec:
        raise ContractError(f"--spec is required for {args.algorithm}")
    spec = load_oracle_spec(args.spec)
    if kinds and spec.kind not in kinds:
        raise ContractError(f"{args.algorithm} needs a {' or '.join(kinds)} spec, got {spec.kind}")
    return spec


def run_algorithm(args) -> ExperimentReport:
    algo = args.algorithm
    if algo == "deutsch":
        spec = _require_spec(args, "table")
        out = qa.deutsch_parity(spec.oracle)
        classical = _fresh(args).oracle
        check = classical.query(0) ^ classical.query(1)
        _agree(out, check)
        return ExperimentReport(algo, spec.description, str(out), spec.oracle.count, classical.count, True)

    if algo == "parallel":
        spec = _require_spec(args, "table", "dimacs")
        if args.m:
            size = args.m
        elif spec.kind == "dimacs":
            # an odd universe is padded with one out-of-range query, which answers 0
            size = len(spec.oracle.universe) + len(spec.oracle.universe) % 2
        else:
            size = spec.oracle.universe_size
        if size % 2:
            raise ContractError(f"parallel parity pairs an even number of queries, got {size}")
        if size < 2 or size > spec.oracle.universe_size:
            raise ContractError(f"cannot pair {size} queries from a universe of {spec.oracle.universe_size}")
        pairs = [(2 * i, 2 * i + 1) for i in range(size // 2)]
        out = qa.pairwise_parallel_parity(spec.oracle, pairs)
        classical = _fresh(args).oracle
        xor = tuple(bin(i).count("1") & 1 for i in range(1 << size))
        check = evaluate_tt(TruthTableReduction(tuple(range(size)), xor), classical)
        _agree(out, check)
        return ExperimentReport(
            algo, f"{spec.description};m={size}", str(out), spec.oracle.count, classical.count, True
        )

    if algo == "chain":
        spec = _require_spec(args, "chain")
        length = len(spec.chain)
        out = qa.chain_parity_search(spec.oracle, length)
        classical = _fresh(args).oracle
        check = classical_chain_parity(classical, length)
        _agree(out, check)
        return ExperimentReport(algo, spec.description, str(out), spec.oracle.count, classical.count, True)

    if algo == "bv":
        if args.a:
            inst = qa.extraction_instance(args.a)
            description = f"a={args.a}"
        else:
            spec = _require_spec(args, "innerproduct")
            if spec.inner.z_width:
                raise ContractError("bv needs an innerproduct spec with m_z = 0 (or use --a)")
            inst = qa.ExtractionInstance(sv.to_bits(spec.inner.outputs[0], spec.inner.n), spec.oracle)
            description = spec.description
        out = qa.bv_extract(inst)
        fresh = qa.extraction_instance(inst.hidden)
        n = inst.n
        check = "".join(str(fresh.oracle.query(1 << (n - 1 - i))) for i in range(n))
        _agree(out, check)
        return ExperimentReport(algo, description, out, inst.oracle.count, fresh.oracle.count, True)

    if algo == "superterse":
        spec = _require_spec(args, "innerproduct")
        if args.z is None:
            raise ContractError("superterse needs --z <bitstring>")
        out = qa.extract_function_one_query(spec.inner, args.z, spec.oracle)
        classical = _fresh(args).oracle
        z = sv.from_bits(args.z)
        n = spec.inner.n
        check = "".join(str(classical.query((z << n) | (1 << (n - 1 - i)))) for i in range(n))
        _agree(out, check)
        return ExperimentReport(
            algo, f"{spec.description};z={args.z}", out, spec.oracle.count, classical.count, True
        )

    raise ContractError(f"unknown algorithm {algo!r}")


def _agree(quantum, classical) -> None:
    if str(quantum) != str(classical):
        raise ExactnessViolation(f"quantum output {quantum} disagrees with classical {classical}")


# -- query-count table --------------------------------------------------------


def _popcount_mod4(idx: int) -> int:
    return bin(idx).count("1") & 3


def table_rows(max_k: int) -> list[ExperimentReport]:
    """Measured classical vs quantum query counts for k = 1..max_k."""
    if not 1 <= max_k <= 4:
        raise ContractError("max_k must be between 1 and 4")
    rows = []
    for k in range(1, max_k + 1):
        # parity of 2k answers
        m = 2 * k
        answers = [(i * 5 + k) % 3 == 0 for i in range(m)]
        xor = tuple(bin(i).count("1") & 1 for i in range(1 << m))
        g = TruthTableReduction(tuple(range(m)), xor)
        classical, quantum = padded_table_oracle(answers), padded_table_oracle(answers)
        want = evaluate_tt(g, classical)
        out = qa.pairwise_parallel_parity(quantum, [(2 * i, 2 * i + 1) for i in range(k)])
        rows.append(_row("parity", f"k={k};m={m}", out, want, quantum.count, classical.count))

        # monotone chain of length 2^(k+1) - 2
        length = (1 << (k + 1)) - 2
        chain = MonotoneChain.with_ones(length, length // 2 + 1)
        quantum, classical = chain_oracle(chain), chain_oracle(chain)
        out = qa.chain_parity_search(quantum, length)
        want = classical_chain_parity(classical, length)
        rows.append(
            _row("chain", f"k={k};L={length};ones={chain.ones}", out, want, quantum.count, classical.count)
        )

        # n-bit function of 2^(k+1) - 2 non-adaptive queries
        n = 2
        answers = [i % 5 == 1 for i in range(length)]
        g = TruthTableReduction(tuple(range(length)), _popcount_mod4, output_width=n)
        classical, quantum = padded_table_oracle(answers), padded_table_oracle(answers)
        want = sv.to_bits(evaluate_tt(g, classical), n)
        out = qa.function_pipeline(g, quantum)
        rows.append(
            _row("pipeline", f"k={k};m={length};n={n}", out, want, quantum.count, classical.count)
        )

        # F_n^A with one query to the inner-product set
        n = k + 1
        a_oracle = table_oracle("0110")
        spec = superterse_spec(a_oracle, n)
        z = sum(((i + k) % 4) << (2 * (n - 1 - i)) for i in range(n))
        quantum = inner_product_oracle(spec)
        out = qa.extract_function_one_query(spec, z, quantum)
        classical = table_oracle("0110")
        want = "".join(str(classical.query((z >> (2 * (n - 1 - i))) & 3)) for i in range(n))
        rows.append(_row("superterse", f"k={k};n={n};z={sv.to_bits(z, 2 * n)}", out, want, quantum.count, classical.count))
    return rows


def _row(algorithm, instance, out, want, quantum_queries, classical_queries) -> ExperimentReport:
    _agree(out, want)
    return ExperimentReport(algorithm, instance, str(out), quantum_queries, classical_queries, True)


def render(rows: list[ExperimentReport], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([r.to_dict() for r in rows], indent=2)
    values = [[str(getattr(r, f)).lower() if f == "exact" else str(getattr(r, f)) for f in REPORT_FIELDS] for r in rows]
    if fmt == "csv":
        return "\n".join([",".join(REPORT_FIELDS)] + [",".join(v) for v in values])
    if fmt == "markdown":
        lines = ["| " + " | ".join(REPORT_FIELDS) + " |", "|" + "---|" * len(REPORT_FIELDS)]
        lines += ["| " + " | ".join(v) + " |" for v in values]
        return "\n".join(lines)
    raise ContractError(f"unknown format {fmt!r}")


def parse_json_reports(text: str) -> list[ExperimentReport]:
    data = json.loads(text)
    if isinstance(data, dict):
        data = [data]
    return [ExperimentReport.from_dict(d) for d in data]


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bqlab",
        description="Exact quantum bounded-query algorithms with counted oracles.",
    )
    parser.add_argument("--budget", type=int, default=sv.DEFAULT_QUBIT_BUDGET, help="qubit budget (default 24)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run property suites")
    p.add_argument("suite", choices=list(SUITES) + ["all"])
    p.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")

    p = sub.add_parser("run", help="run one algorithm on one instance")
    p.add_argument("algorithm", choices=["deutsch", "parallel", "chain", "bv", "superterse"])
    p.add_argument("--spec", help="oracle specification file")
    p.add_argument("--a", help="hidden string for bv")
    p.add_argument("--z", help="z bit string for superterse")
    p.add_argument("--m", type=int, help="number of queries to pair for parallel (default: whole universe)")
    p.add_argument("--format", choices=FORMATS, default="markdown")

    p = sub.add_parser("table", help="quantum vs classical query counts")
    p.add_argument("--max-k", type=int, default=3)
    p.add_argument("--format", choices=FORMATS, default="markdown")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.budget < 1:
        parser.error("--budget must be positive")
    try:
        with sv.qubit_budget_limit(args.budget):
            return _dispatch(args)
    except (ParseError, ContractError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BQLabError as exc:
        print(f"failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.command == "verify":
        names = list(SUITES) if args.suite == "all" else [args.suite]
        start = time.perf_counter()
        ok = True
        for name in names:
            result = run_suite(name, seed=args.seed)
            print(result.summary())
            for failure in result.failures[:10]:
                print(f"  - {failure}")
            ok &= result.ok
        print(f"{'OK' if ok else 'FAILED'}: {len(names)} suite(s) in {time.perf_counter() - start:.2f}s")
        return 0 if ok else 1

    if args.command == "run":
        report = run_algorithm(args)
        print(render([report], args.format))
        return 0

    if args.command == "table":
        if not 1 <= args.max_k <= 4:
            print("error: --max-k must be between 1 and 4", file=sys.stderr)
            return 2
        print(render(table_rows(args.max_k), args.format))
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
