"""Exact quantum bounded-query algorithms built on the state-vector simulator.

Decision procedures return an ``int`` bit; procedures that output strings
return them as bit strings.  Query counts are never returned: read them
from the oracle counter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import statevec as sv
from .classical import TruthTableReduction, mind_change_bits
from .errors import ContractError, ExactnessViolation
from .oracles import (
    CountedOracle,
    InnerProductOracleSpec,
    chain_code,
    chain_index_width,
    inner_product,
    inner_product_oracle,
    threshold_bits,
)
from .statevec import RegisterLayout, ReversibleMap

NOT = ReversibleMap(1, [1, 0])
# (control, target) -> (control, target xor control)
CNOT = ReversibleMap(2, [0, 1, 3, 2])


# -- gate programs ----------------------------------------------------------


@dataclass(frozen=True)
class Hadamard:
    register: str

    def apply(self, state: sv.QuantumState) -> sv.QuantumState:
        return sv.hadamard_block(state, self.register)

    def inverse(self) -> "Hadamard":
        return self


@dataclass(frozen=True, eq=False)
class Reversible:
    rmap: ReversibleMap
    registers: tuple[str, ...]

    def apply(self, state):
        return sv.apply_reversible(state, self.rmap, self.registers)

    def inverse(self) -> "Reversible":
        return Reversible(self.rmap.inverse(), self.registers)


@dataclass(frozen=True, eq=False)
class OracleCall:
    oracle: CountedOracle
    query_registers: tuple[str, ...]
    answer_register: str

    def apply(self, state):
        return sv.oracle_gate(state, self.oracle, self.query_registers, self.answer_register)

    def inverse(self) -> "OracleCall":
        return self


def run_program(state: sv.QuantumState, program: Iterable) -> sv.QuantumState:
    for op in program:
        state = op.apply(state)
    return state


@dataclass(frozen=True, eq=False)
class ExactSubroutine:
    """A gate program that leaves a deterministic bit in ``answer_register``.

    ``input_registers`` hold classical inputs; every other register starts
    at zero.
    """

    layout: RegisterLayout
    program: tuple
    answer_register: str
    query_budget: int
    input_registers: tuple[str, ...] = ()

    def __post_init__(self):
        calls = sum(isinstance(op, OracleCall) for op in self.program)
        if calls != self.query_budget:
            raise ContractError(f"program makes {calls} oracle calls, budget says {self.query_budget}")
        self.layout.index_of(self.answer_register)
        for name in self.input_registers:
            self.layout.index_of(name)

    def run(self, state: sv.QuantumState) -> sv.QuantumState:
        if state.layout.registers != self.layout.registers:
            raise ContractError("state layout does not match the subroutine")
        return run_program(state, self.program)

    def evaluate(self, **inputs: int) -> int:
        """Run on a basis input and read the answer (raises if not exact)."""
        out = self.run(sv.basis_state(self.layout, **inputs))
        return int(sv.measure_exact(out, self.answer_register))

    def basis_inputs(self):
        names = self.input_registers
        widths = [self.layout.width(n) for n in names]
        total = sum(widths)
        for packed in range(1 << total):
            values, shift = {}, total
            for name, w in zip(names, widths):
                shift -= w
                values[name] = (packed >> shift) & ((1 << w) - 1)
            yield values


def clean_wrap(sub: ExactSubroutine, aux: str = "aux") -> ExactSubroutine:
    """Compute, XOR the answer into a fresh ``aux`` qubit, uncompute."""
    layout = sub.layout.extend((aux, 1))
    forward = tuple(sub.program)
    copy = Reversible(CNOT, (sub.answer_register, aux))
    backward = tuple(op.inverse() for op in reversed(forward))
    return ExactSubroutine(
        layout,
        forward + (copy,) + backward,
        aux,
        2 * sub.query_budget,
        sub.input_registers + (aux,),
    )


@dataclass
class CleanWrapReport:
    cases: int
    min_fidelity: float
    max_amplitude_error: float


def verify_clean_wrap(sub: ExactSubroutine, wrapped: ExactSubroutine | None = None) -> CleanWrapReport:
    """Check |x>|b>|0..0> -> |x>|b xor sub(x)>|0..0> on every basis input, phases included.

    Raises :class:`ExactnessViolation` if ``sub`` is not exact or the wrapped
    program leaves garbage behind.
    """
    if wrapped is None:
        wrapped = clean_wrap(sub)
    aux = wrapped.answer_register
    cases, min_fid, max_err = 0, 1.0, 0.0
    for inputs in sub.basis_inputs():
        answer = sub.evaluate(**inputs)
        for b in (0, 1):
            start = sv.basis_state(wrapped.layout, **inputs, **{aux: b})
            expected = sv.basis_state(wrapped.layout, **inputs, **{aux: b ^ answer})
            final = wrapped.run(start)
            fid = sv.fidelity(expected, final)
            err = sv.amplitude_distance(expected, final)
            cases += 1
            min_fid = min(min_fid, fid)
            max_err = max(max_err, err)
            if fid < 1 - sv.EXACTNESS_TOL or err > sv.EXACTNESS_TOL:
                raise ExactnessViolation(
                    f"wrapped subroutine not clean on input {inputs}, aux={b}: "
                    f"fidelity {fid:.12f}, amplitude error {err:.3e}"
                )
    return CleanWrapReport(cases, min_fid, max_err)


def identity_subroutine() -> ExactSubroutine:
    """Zero-query subroutine whose answer is its 1-bit input."""
    return ExactSubroutine(RegisterLayout.of(("x", 1)), (), "x", 0, ("x",))


# -- Deutsch parity -----------------------------------------------------------


def _minus_prep(register: str) -> tuple:
    return (Reversible(NOT, (register,)), Hadamard(register))


def deutsch_subroutine(oracle: CountedOracle) -> ExactSubroutine:
    if oracle.query_width != 1:
        raise ContractError("Deutsch parity needs a 1-bit oracle")
    layout = RegisterLayout.of(("q", 1), ("b", 1))
    program = _minus_prep("b") + (
        Hadamard("q"),
        OracleCall(oracle, ("q",), "b"),
        Hadamard("q"),
    )
    return ExactSubroutine(layout, program, "q", 1)


def deutsch_parity(oracle: CountedOracle) -> int:
    """f(0) xor f(1) with one query."""
    sub = deutsch_subroutine(oracle)
    final = sub.run(sv.allocate(sub.layout))
    return int(sv.measure_exact(final, "q"))


def pair_relabeling(width: int, q0: int, q1: int) -> ReversibleMap:
    """Bijection sending 0...0 to q0 and 10...0 to q1; the rest in sorted order."""
    size = 1 << width
    top = 1 << (width - 1)
    rest = iter(v for v in range(size) if v not in (q0, q1))
    mapping = []
    for d in range(size):
        if d == 0:
            mapping.append(q0)
        elif d == top:
            mapping.append(q1)
        else:
            mapping.append(next(rest))
    return ReversibleMap(width, mapping)


def two_point_subroutine(oracle: CountedOracle, q0: int, q1: int) -> ExactSubroutine:
    w = oracle.query_width
    for q in (q0, q1):
        if not 0 <= q < oracle.universe_size:
            raise ContractError(f"query {q} outside the {w}-bit oracle universe")
    if q0 == q1:
        raise ContractError("two-point parity needs two distinct queries")
    regs = [("c", 1)] + ([("pad", w - 1)] if w > 1 else []) + [("b", 1)]
    layout = RegisterLayout(tuple(regs))
    query = ("c", "pad") if w > 1 else ("c",)
    sigma = Reversible(pair_relabeling(w, q0, q1), query)
    program = _minus_prep("b") + (
        Hadamard("c"),
        sigma,
        OracleCall(oracle, query, "b"),
        sigma.inverse(),
        Hadamard("c"),
    )
    return ExactSubroutine(layout, program, "c", 1)


def two_point_parity(oracle: CountedOracle, q0: int, q1: int) -> int:
    """A(q0) xor A(q1) with one query."""
    sub = two_point_subroutine(oracle, q0, q1)
    final = sub.run(sv.allocate(sub.layout))
    return int(sv.measure_exact(final, "c"))


def pairwise_parallel_parity(oracle: CountedOracle, pairs: Sequence[tuple[int, int]]) -> int:
    """XOR of 2k answers with k non-adaptive queries, one per pair.

    The whole query plan is declared on the oracle before the first query.
    """
    pairs = [(int(a), int(b)) for a, b in pairs]
    if not pairs:
        raise ContractError("need at least one pair")
    flat = [q for pair in pairs for q in pair]
    if len(set(flat)) != len(flat):
        raise ContractError("pairs must consist of 2k distinct queries")
    oracle.declare_plan([set(pair) for pair in pairs])
    try:
        parity = 0
        for q0, q1 in pairs:
            parity ^= two_point_parity(oracle, q0, q1)
        return parity
    finally:
        oracle.clear_plan()


def _half(m: int) -> int:
    if m < 2 or m % 2:
        raise ContractError(f"need an even, positive number of queries, got {m}")
    return m // 2


def mind_change_oracle(reduction: TruthTableReduction, oracle: CountedOracle) -> tuple[int, CountedOracle]:
    """Base bit and the oracle answering the mind-change predicates phi_1..phi_m.

    phi_i holds iff some chain of satisfied query sets makes the evaluator
    change its mind at least i times.  Its queries are charged to ``oracle``.
    """
    cert = mind_change_bits(reduction, reduction.true_answers(oracle))
    phi = cert.phi_bits
    derived = oracle.derive(
        chain_index_width(len(phi)),
        lambda code: phi[code] if code < len(phi) else 0,
        name=f"{oracle.name}/phi",
    )
    return cert.base, derived


def decision_via_parity(reduction: TruthTableReduction, oracle: CountedOracle) -> int:
    """Evaluate a 2k-query reduction with k non-adaptive quantum queries."""
    if reduction.output_width != 1:
        raise ContractError("decision_via_parity needs a 1-bit evaluator")
    k = _half(reduction.m)
    base, phi_oracle = mind_change_oracle(reduction, oracle)
    pairs = [(chain_code(2 * i - 1), chain_code(2 * i)) for i in range(1, k + 1)]
    return base ^ pairwise_parallel_parity(phi_oracle, pairs)


# -- ordered search on monotone chains ---------------------------------------


def chain_rounds(length: int) -> int:
    """k such that length == 2**(k+1) - 2."""
    k = (length + 2).bit_length() - 2
    if k < 1 or (1 << (k + 1)) - 2 != length:
        raise ContractError(f"chain length {length} is not of the form 2^(k+1) - 2")
    return k


def _probe_positions(live: Sequence[int], k: int) -> tuple[int, int]:
    a = 1 << (k - 1)
    b = a + (1 << k) - 1
    return live[a - 1], live[b - 1]


def _narrow(live: list[int], k: int, p: int) -> list[int]:
    a = 1 << (k - 1)
    b = a + (1 << k) - 1
    if p:
        return live[a : b - 1]
    return live[: a - 1] + live[b:]


def chain_parity_search(oracle: CountedOracle, length: int) -> int:
    """Parity of c_1..c_L, L = 2^(k+1) - 2, with k adaptive quantum queries.

    Each round learns the parity of two probe positions with one query and
    drops a block of even parity; the last round's bit is the answer.
    """
    k = chain_rounds(length)
    live = list(range(1, length + 1))
    for level in range(k, 0, -1):
        ja, jb = _probe_positions(live, level)
        p = two_point_parity(oracle, chain_code(ja), chain_code(jb))
        if level == 1:
            return p
        live = _narrow(live, level, p)
        assert len(live) == (1 << level) - 2
    raise AssertionError("unreachable")


def _live_after(length: int, history: Sequence[int]) -> list[int]:
    k = chain_rounds(length)
    live = list(range(1, length + 1))
    for i, p in enumerate(history):
        live = _narrow(live, k - i, p)
    return live


def compile_chain_search(
    oracle: CountedOracle,
    length: int,
    x_width: int = 0,
    base: Callable[[int], int] | None = None,
) -> ExactSubroutine:
    """Chain search as a single unitary program, without mid-circuit measurement.

    Round r keeps its outcome in qubit ``c<r>``.  Between oracle calls the
    program is a reversible map that reads the earlier outcomes of each
    branch and writes that branch's probe position into ``idx`` (then
    erases it again), so branches holding different histories query
    different positions under the same single oracle call.

    With ``x_width > 0`` the oracle is queried on (x, index) and ``x`` is an
    input register; ``base(x)`` is XORed into the answer at the end.
    """
    k = chain_rounds(length)
    w = chain_index_width(length)
    if oracle.query_width != x_width + w:
        raise ContractError(
            f"oracle width {oracle.query_width} != x width {x_width} + index width {w}"
        )
    regs = ([("x", x_width)] if x_width else []) + [(f"c{r}", 1) for r in range(1, k + 1)]
    regs += [("idx", w), ("m", 1)]
    layout = RegisterLayout(tuple(regs))
    query = ("x", "idx") if x_width else ("idx",)

    program: list = list(_minus_prep("m"))
    for r in range(1, k + 1):
        level = k - r + 1
        # domain bits: c1..c(r-1) (history), c_r (which probe), idx
        def select(state_bits: int, r=r, level=level) -> int:
            idx = state_bits & ((1 << w) - 1)
            c_r = (state_bits >> w) & 1
            hist_bits = state_bits >> (w + 1)
            history = [(hist_bits >> (r - 2 - i)) & 1 for i in range(r - 1)]
            live = _live_after(length, history)
            pos = _probe_positions(live, level)[c_r]
            return (state_bits & ~((1 << w) - 1)) | (idx ^ chain_code(pos))

        select_regs = tuple(f"c{i}" for i in range(1, r + 1)) + ("idx",)
        selector = Reversible(ReversibleMap.from_function(r + w, select), select_regs)
        program += [
            Hadamard(f"c{r}"),
            selector,
            OracleCall(oracle, query, "m"),
            selector.inverse(),
            Hadamard(f"c{r}"),
        ]
    answer = f"c{k}"
    if base is not None:
        if not x_width:
            raise ContractError("a base bit needs an x register")

        def add_base(bits: int) -> int:
            return bits ^ (int(base(bits >> 1)) & 1)

        program.append(Reversible(ReversibleMap.from_function(x_width + 1, add_base), ("x", answer)))
    inputs = ("x",) if x_width else ()
    return ExactSubroutine(layout, tuple(program), answer, k, inputs)


# -- Bernstein-Vazirani extraction -------------------------------------------


@dataclass
class ExtractionInstance:
    hidden: str
    oracle: CountedOracle

    @property
    def n(self) -> int:
        return len(self.hidden)


def extraction_instance(hidden: str) -> ExtractionInstance:
    """Oracle for x -> <a, x> with hidden string ``a``."""
    n = len(hidden)
    if n < 1 or set(hidden) - {"0", "1"}:
        raise ContractError(f"hidden string must be a non-empty bit string, got {hidden!r}")
    spec = InnerProductOracleSpec(0, n, (sv.from_bits(hidden),))
    return ExtractionInstance(hidden, inner_product_oracle(spec, name=f"ip[{hidden}]"))


def bv_extract(instance: ExtractionInstance | CountedOracle) -> str:
    """Recover a from x -> <a, x> with one query."""
    oracle = instance.oracle if isinstance(instance, ExtractionInstance) else instance
    n = oracle.query_width
    layout = RegisterLayout.of(("x", n), ("b", 1))
    program = _minus_prep("b") + (
        Hadamard("x"),
        OracleCall(oracle, ("x",), "b"),
        Hadamard("x"),
    )
    oracle.declare_plan([range(1 << n)])
    try:
        final = run_program(sv.allocate(layout), program)
    finally:
        oracle.clear_plan()
    return sv.measure_exact(final, "x")


# -- function pipeline --------------------------------------------------------


@dataclass
class PipelineCircuit:
    """Everything function_pipeline builds, exposed for inspection and tests."""

    derived_oracle: CountedOracle
    subroutine: ExactSubroutine
    wrapped: ExactSubroutine
    chains: dict[int, object]
    base_bits: dict[int, int]


def build_pipeline(g: TruthTableReduction, oracle: CountedOracle) -> PipelineCircuit:
    m = g.m
    n = g.output_width
    chain_rounds(m)
    answers = g.true_answers(oracle)
    chains, base_bits = {}, {}
    for x in range(1 << n):
        fx = TruthTableReduction(g.queries, lambda idx, x=x: inner_product(x, g.output(idx)))
        cert = mind_change_bits(fx, answers)
        chains[x] = threshold_bits(cert.phi_bits)
        base_bits[x] = cert.base
    w = chain_index_width(m)

    def chi(q: int) -> int:
        x, code = q >> w, q & ((1 << w) - 1)
        bits = chains[x].bits
        return bits[code] if code < len(bits) else 0

    derived = oracle.derive(n + w, chi, name=f"{oracle.name}/chi")
    sub = compile_chain_search(derived, m, x_width=n, base=base_bits.__getitem__)
    return PipelineCircuit(derived, sub, clean_wrap(sub, aux="out"), chains, base_bits)


def function_pipeline(g: TruthTableReduction, oracle: CountedOracle) -> str:
    """g's n-bit output with 2k queries, for g making 2^(k+1) - 2 non-adaptive queries.

    The clean chain search computes <x, g(z)> into a |-> qubit, turning it
    into the phase (-1)^<x, g(z)> on a uniform superposition of x; a final
    Hadamard block leaves g(z) in the x register.
    """
    circuit = build_pipeline(g, oracle)
    wrapped = circuit.wrapped
    program = _minus_prep("out") + (Hadamard("x"),) + wrapped.program + (Hadamard("x"),)
    final = run_program(sv.allocate(wrapped.layout), program)
    return sv.measure_exact(final, "x")


# -- one-query function extraction -------------------------------------------


def extract_function_one_query(
    spec: InnerProductOracleSpec, z: int | str, oracle: CountedOracle | None = None
) -> str:
    """f(z) from one query to X = {(z, y) : <f(z), y> = 1}."""
    if oracle is None:
        oracle = inner_product_oracle(spec)
    if oracle.query_width != spec.query_width:
        raise ContractError("oracle does not match the inner-product spec")
    if isinstance(z, str):
        if len(z) != spec.z_width:
            raise ContractError(f"z must be {spec.z_width} bits, got {z!r}")
        z = sv.from_bits(z)
    if not 0 <= z < (1 << spec.z_width):
        raise ContractError(f"z={z} outside the {spec.z_width}-bit domain")
    n = spec.n
    regs = ([("z", spec.z_width)] if spec.z_width else []) + [("y", n), ("b", 1)]
    layout = RegisterLayout(tuple(regs))
    query = ("z", "y") if spec.z_width else ("y",)
    program: tuple = ()
    if spec.z_width:
        load = ReversibleMap(spec.z_width, np.arange(1 << spec.z_width) ^ z)
        program += (Reversible(load, ("z",)),)
    program += _minus_prep("b") + (
        Hadamard("y"),
        OracleCall(oracle, query, "b"),
        Hadamard("y"),
    )
    oracle.declare_plan([[(z << n) | y for y in range(1 << n)]])
    try:
        final = run_program(sv.allocate(layout), program)
    finally:
        oracle.clear_plan()
    return sv.measure_exact(final, "y")
