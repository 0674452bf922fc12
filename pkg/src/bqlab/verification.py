"""Exhaustive and seeded-random property suites behind ``bqlab verify``."""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable

from . import quantum_algorithms as qa
from . import statevec as sv
from .classical import (
    Leaf,
    QueryNode,
    TruthTableReduction,
    classical_chain_parity,
    evaluate_tree,
    evaluate_tt,
    exhaustive_adaptive_sim,
    mind_change_bits,
)
from .errors import AdaptivityError
from .oracles import (
    MonotoneChain,
    chain_code,
    chain_oracle,
    superterse_spec,
    inner_product_oracle,
    table_oracle,
    threshold_bits,
)

PIPELINE_RANDOM_TRIALS = 100


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: list[str] = field(default_factory=list)
    max_deviation: float = 0.0
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return (
            f"{status} {self.name}: {self.cases} cases, {len(self.failures)} failures, "
            f"max amplitude deviation {self.max_deviation:.2e}, {self.seconds:.2f}s"
        )


class _Checker:
    def __init__(self, result: SuiteResult):
        self.result = result

    def check(self, condition: bool, message: str) -> None:
        self.result.cases += 1
        if not condition:
            self.result.failures.append(message)

    def case(self, label: str, fn: Callable[[], bool | str]) -> None:
        """Run ``fn``; it returns True, or a failure description."""
        self.result.cases += 1
        try:
            outcome = fn()
        except Exception as exc:  # a suite reports, it does not stop
            self.result.failures.append(f"{label}: {type(exc).__name__}: {exc}")
            return
        if outcome is not True:
            self.result.failures.append(f"{label}: {outcome}")


def padded_table_oracle(answers, name="table"):
    """Table oracle whose first len(answers) queries answer as given; the rest answer 0."""
    width = max(1, (len(answers) - 1).bit_length())
    bits = list(answers) + [0] * ((1 << width) - len(answers))
    return table_oracle(bits, name=name)


def all_monotone_chains(length: int):
    for ones in range(length + 1):
        yield MonotoneChain.with_ones(length, ones)


# -- suites ------------------------------------------------------------------


def suite_deutsch(check: _Checker, rng: random.Random) -> None:
    for table in ("00", "01", "10", "11"):
        def run(table=table):
            oracle = table_oracle(table)
            out = qa.deutsch_parity(oracle)
            want = int(table[0]) ^ int(table[1])
            if out != want or oracle.count != 1:
                return f"got {out} with {oracle.count} queries, want {want} with 1"
            return True
        check.case(f"deutsch {table}", run)


def suite_parallel(check: _Checker, rng: random.Random) -> None:
    for k in (1, 2, 3):
        pairs = [(2 * i, 2 * i + 1) for i in range(k)]
        for answers in itertools.product((0, 1), repeat=2 * k):
            def run(answers=answers, k=k, pairs=pairs):
                oracle = padded_table_oracle(answers)
                out = qa.pairwise_parallel_parity(oracle, pairs)
                want = sum(answers) & 1
                if out != want or oracle.count != k:
                    return f"got {out} with {oracle.count} queries, want {want} with {k}"
                if any(len(t) > 2 for t in oracle.trace):
                    return "a query touched more than its planned pair"
                return True
            check.case(f"parallel k={k} {answers}", run)

    # 2k classical -> k quantum, exhaustively over m = 2 evaluators and answers
    for table in itertools.product((0, 1), repeat=4):
        for answers in itertools.product((0, 1), repeat=2):
            def run(table=table, answers=answers):
                g = TruthTableReduction((0, 1), table)
                classical = padded_table_oracle(answers)
                quantum = padded_table_oracle(answers)
                want = evaluate_tt(g, classical)
                out = qa.decision_via_parity(g, quantum)
                if out != want or quantum.count != 1 or classical.count != 2:
                    return f"quantum {out}/{quantum.count}q vs classical {want}/{classical.count}q"
                return True
            check.case(f"decision m=2 t={table} T={answers}", run)

    for trial in range(PIPELINE_RANDOM_TRIALS):
        m = rng.choice((4, 6))
        table = [rng.randint(0, 1) for _ in range(1 << m)]
        answers = [rng.randint(0, 1) for _ in range(m)]

        def run(table=table, answers=answers, m=m):
            g = TruthTableReduction(tuple(range(m)), table)
            oracle = padded_table_oracle(answers)
            out = qa.decision_via_parity(g, oracle)
            want = g.output(answers)
            if out != want or oracle.count != m // 2:
                return f"got {out} with {oracle.count} queries, want {want} with {m // 2}"
            return True
        check.case(f"decision random m={m} #{trial}", run)


def suite_chain(check: _Checker, rng: random.Random) -> None:
    for k in (1, 2, 3):
        length = (1 << (k + 1)) - 2
        for chain in all_monotone_chains(length):
            def run(chain=chain, k=k, length=length):
                oracle = chain_oracle(chain)
                out = qa.chain_parity_search(oracle, length)
                classical = chain_oracle(chain)
                cl = classical_chain_parity(classical, length)
                compiled = qa.compile_chain_search(chain_oracle(chain), length).evaluate()
                if out != chain.parity or oracle.count != k:
                    return f"quantum {out} with {oracle.count} queries, want {chain.parity} with {k}"
                if cl != chain.parity or classical.count != k + 1:
                    return f"classical {cl} with {classical.count} queries, want {k + 1}"
                if compiled != chain.parity:
                    return f"compiled search returned {compiled}"
                return True
            check.case(f"chain k={k} ones={chain.ones}", run)

    # the search is adaptive: for k = 2 no single declared plan serves every chain
    def adaptive():
        length = 6
        traces = []
        for chain in all_monotone_chains(length):
            oracle = chain_oracle(chain)
            qa.chain_parity_search(oracle, length)
            traces.append(oracle.trace[:])
        for plan in {tuple(t) for t in traces}:
            rejected = 0
            for chain in all_monotone_chains(length):
                oracle = chain_oracle(chain)
                oracle.declare_plan(plan)
                try:
                    qa.chain_parity_search(oracle, length)
                except AdaptivityError:
                    rejected += 1
            if not rejected:
                return f"plan {plan} accepted every chain"
        return True
    check.case("chain search is adaptive at k=2", adaptive)


def suite_bv(check: _Checker, rng: random.Random) -> None:
    for n in range(1, 9):
        for a in range(1 << n):
            hidden = sv.to_bits(a, n)

            def run(hidden=hidden):
                inst = qa.extraction_instance(hidden)
                out = qa.bv_extract(inst)
                if out != hidden or inst.oracle.count != 1:
                    return f"got {out} with {inst.oracle.count} queries"
                return True
            check.case(f"bv {hidden}", run)


def suite_mindchange(check: _Checker, rng: random.Random) -> None:
    for m in (1, 2, 3):
        for table in itertools.product((0, 1), repeat=1 << m):
            g = TruthTableReduction(tuple(range(m)), table)
            for answers in itertools.product((0, 1), repeat=m):
                def run(g=g, answers=answers):
                    cert = mind_change_bits(g, answers)
                    phi = cert.phi_bits
                    if cert.base ^ (sum(phi) & 1) != g.output(answers):
                        return "parity of mind changes does not give t(T)"
                    if any(phi[i] < phi[i + 1] for i in range(len(phi) - 1)):
                        return f"phi {phi} not monotone"
                    if threshold_bits(phi).bits != phi:
                        return "threshold_bits changed an already sorted phi"
                    return True
                check.case(f"mindchange m={m} t={table} T={answers}", run)

    # adaptive trees of depth <= 2 over a 3-query universe, against every oracle
    leaves = (Leaf(0), Leaf(1))
    depth1 = [QueryNode(q, a, b) for q in range(3) for a in leaves for b in leaves]
    trees = depth1 + [QueryNode(q, a, b) for q in range(3) for a in depth1[::3] for b in depth1[1::3]]
    for ti, tree in enumerate(trees):
        def run(tree=tree):
            red = exhaustive_adaptive_sim(tree, k=2)
            if red.m > 3:
                return f"{red.m} queries for a depth-2 tree"
            for answers in itertools.product((0, 1), repeat=3):
                want = evaluate_tree(tree, lambda q: answers[q])
                oracle = padded_table_oracle(answers)
                if evaluate_tt(red, oracle) != want:
                    return f"disagrees with the tree on {answers}"
            return True
        check.case(f"adaptive sim tree #{ti}", run)


def _pipeline_case(g: TruthTableReduction, answers, k: int) -> bool | str:
    classical = padded_table_oracle(answers)
    quantum = padded_table_oracle(answers)
    want = sv.to_bits(evaluate_tt(g, classical), g.output_width)
    out = qa.function_pipeline(g, quantum)
    if out != want or quantum.count != 2 * k:
        return f"got {out} with {quantum.count} queries, want {want} with {2 * k}"
    return True


def suite_pipeline(check: _Checker, rng: random.Random) -> None:
    # clean subroutines restore every work register and phase
    for table in ("00", "01", "10", "11"):
        check.case(
            f"clean deutsch {table}",
            lambda table=table: qa.verify_clean_wrap(qa.deutsch_subroutine(table_oracle(table))) and True,
        )
    for k in (1, 2, 3):
        length = (1 << (k + 1)) - 2
        for chain in all_monotone_chains(length):
            check.case(
                f"clean chain k={k} ones={chain.ones}",
                lambda chain=chain, length=length: qa.verify_clean_wrap(
                    qa.compile_chain_search(chain_oracle(chain), length)
                )
                and True,
            )

    # exhaustive k = 1, n = 2
    for table in itertools.product(range(4), repeat=4):
        for answers in itertools.product((0, 1), repeat=2):
            g = TruthTableReduction((0, 1), table, output_width=2)
            check.case(f"pipeline k=1 E={table} T={answers}", lambda g=g, a=answers: _pipeline_case(g, a, 1))

    for trial in range(PIPELINE_RANDOM_TRIALS):
        k = rng.choice((1, 2))
        n = rng.randint(1, 4)
        m = (1 << (k + 1)) - 2
        table = [rng.randrange(1 << n) for _ in range(1 << m)]
        answers = [rng.randint(0, 1) for _ in range(m)]
        g = TruthTableReduction(tuple(range(m)), table, output_width=n)
        check.case(
            f"pipeline random k={k} n={n} #{trial}",
            lambda g=g, a=answers, k=k: _pipeline_case(g, a, k),
        )


def suite_superterse(check: _Checker, rng: random.Random) -> None:
    for a_table in itertools.product((0, 1), repeat=4):
        a_oracle = table_oracle(a_table)
        for n in range(1, 5):
            spec = superterse_spec(a_oracle, n)
            oracle = inner_product_oracle(spec)
            for zs in itertools.product(range(4), repeat=n):
                z = 0
                for zi in zs:
                    z = (z << 2) | zi

                def run(spec=spec, oracle=oracle, z=z, zs=zs):
                    before = oracle.count
                    out = qa.extract_function_one_query(spec, z, oracle)
                    want = "".join(str(a_table[zi]) for zi in zs)
                    if out != want or oracle.count - before != 1:
                        return f"got {out} with {oracle.count - before} queries, want {want}"
                    return True
                check.case(f"superterse A={a_table} z={zs}", run)


SUITES: dict[str, Callable[[_Checker, random.Random], None]] = {
    "deutsch": suite_deutsch,
    "parallel": suite_parallel,
    "chain": suite_chain,
    "bv": suite_bv,
    "mindchange": suite_mindchange,
    "pipeline": suite_pipeline,
    "superterse": suite_superterse,
}


def run_suite(name: str, seed: int = 0) -> SuiteResult:
    result = SuiteResult(name)
    start = time.perf_counter()
    with sv.exactness_monitor() as monitor:
        SUITES[name](_Checker(result), random.Random(seed))
    result.seconds = time.perf_counter() - start
    result.max_deviation = monitor.max_deviation
    if monitor.max_deviation > sv.EXACTNESS_TOL:
        result.failures.append(f"max amplitude deviation {monitor.max_deviation:.3e} exceeds 1e-9")
    return result
