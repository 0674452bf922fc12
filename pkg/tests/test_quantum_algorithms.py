import itertools
import random

import numpy as np
import pytest

from bqlab import statevec as sv
from bqlab.classical import TruthTableReduction, classical_chain_parity, evaluate_tt
from bqlab.errors import AdaptivityError, ContractError, ExactnessViolation
from bqlab.oracles import (
    InnerProductOracleSpec,
    MonotoneChain,
    chain_index_width,
    chain_oracle,
    inner_product_oracle,
    superterse_spec,
    table_oracle,
)
from bqlab.quantum_algorithms import (
    ExactSubroutine,
    Hadamard,
    OracleCall,
    build_pipeline,
    bv_extract,
    chain_parity_search,
    chain_rounds,
    clean_wrap,
    compile_chain_search,
    decision_via_parity,
    deutsch_parity,
    deutsch_subroutine,
    extract_function_one_query,
    extraction_instance,
    function_pipeline,
    identity_subroutine,
    pair_relabeling,
    pairwise_parallel_parity,
    two_point_parity,
    verify_clean_wrap,
)
from bqlab.statevec import RegisterLayout


def padded(answers):
    size = max(2, 1 << max(1, (len(answers) - 1).bit_length()))
    return table_oracle(list(answers) + [0] * (size - len(answers)))


@pytest.mark.parametrize("table", ["00", "01", "10", "11"])
def test_deutsch_all_tables(table):
    o = table_oracle(table)
    assert deutsch_parity(o) == int(table[0]) ^ int(table[1])
    assert o.count == 1


def test_pair_relabeling_sends_pair_to_front():
    sigma = pair_relabeling(3, 2, 5)
    assert sigma(0) == 2
    assert sigma(4) == 5
    assert sorted(sigma(i) for i in range(8)) == list(range(8))


def test_two_point_on_chain():
    o = chain_oracle(MonotoneChain((1, 1, 0, 0, 0, 0)))
    assert two_point_parity(o, 2 - 1, 5 - 1) == 1
    assert o.count == 1


def test_two_point_needs_distinct_points():
    with pytest.raises(ContractError):
        two_point_parity(table_oracle("0110"), 1, 1)


def test_two_point_exhaustive_width3():
    for table in itertools.product((0, 1), repeat=8):
        o = table_oracle(table)
        for q0, q1 in itertools.permutations(range(8), 2):
            assert two_point_parity(o, q0, q1) == table[q0] ^ table[q1]


def test_pairwise_k2():
    o = table_oracle((1, 0, 1, 1))
    assert pairwise_parallel_parity(o, [(0, 1), (2, 3)]) == 1
    assert o.count == 2
    assert o.plan_remaining is None or not o.plan_remaining


def test_pairwise_rejects_repeated_query():
    with pytest.raises(ContractError):
        pairwise_parallel_parity(table_oracle("0110"), [(0, 1), (1, 2)])


def test_decision_via_parity_xor():
    g = TruthTableReduction((0, 1), (0, 1, 1, 0))
    o = table_oracle("11")
    assert decision_via_parity(g, o) == 0
    assert o.count == 1


def test_decision_via_parity_odd_m():
    g = TruthTableReduction((0, 1, 2), (0,) * 8)
    with pytest.raises(ContractError):
        decision_via_parity(g, table_oracle("0110"))


def test_decision_via_parity_random_m4():
    rng = random.Random(3)
    for _ in range(40):
        table = tuple(rng.randint(0, 1) for _ in range(16))
        answers = [rng.randint(0, 1) for _ in range(4)]
        g = TruthTableReduction((0, 1, 2, 3), table)
        want = evaluate_tt(g, padded(answers))
        o = padded(answers)
        assert decision_via_parity(g, o) == want
        assert o.count == 2


@pytest.mark.parametrize("length, k", [(2, 1), (6, 2), (14, 3)])
def test_chain_rounds(length, k):
    assert chain_rounds(length) == k


@pytest.mark.parametrize("length", [0, 1, 3, 5, 7])
def test_chain_rounds_rejects(length):
    with pytest.raises(ContractError):
        chain_rounds(length)


def test_chain_search_bad_length():
    with pytest.raises(ContractError):
        chain_parity_search(chain_oracle(MonotoneChain((1, 0, 0))), 3)


@pytest.mark.parametrize("length", [2, 6, 14, 30])
def test_chain_search_every_chain(length):
    k = chain_rounds(length)
    for ones in range(length + 1):
        o = chain_oracle(MonotoneChain.with_ones(length, ones))
        assert chain_parity_search(o, length) == ones % 2
        assert o.count == k
        c = chain_oracle(MonotoneChain.with_ones(length, ones))
        assert classical_chain_parity(c, length) == ones % 2
        assert c.count == k + 1


@pytest.mark.parametrize("length", [2, 6, 14])
def test_compiled_search_matches_recursive(length):
    for ones in range(length + 1):
        o = chain_oracle(MonotoneChain.with_ones(length, ones))
        sub = compile_chain_search(o, length)
        compiled = sub.evaluate()
        assert o.count == sub.query_budget == chain_rounds(length)
        assert compiled == chain_parity_search(o, length)


def test_compiled_search_is_one_oracle_per_round():
    sub = compile_chain_search(chain_oracle(MonotoneChain.with_ones(6, 3)), 6)
    assert sum(isinstance(op, OracleCall) for op in sub.program) == 2


def test_compiled_search_over_x_register():
    # two chains side by side, selected by x, plus a base bit
    chains = {0: MonotoneChain.with_ones(6, 1), 1: MonotoneChain.with_ones(6, 4)}
    w = chain_index_width(6)
    base = table_oracle("01")
    o = base.derive(1 + w, lambda q: chains[q >> w].bits[q & 7] if (q & 7) < 6 else 0, "pair")
    sub = compile_chain_search(o, 6, x_width=1, base=lambda x: 1)
    assert sub.evaluate(x=0) == 1 ^ 1
    assert sub.evaluate(x=1) == 0 ^ 1


def test_budget_mismatch_rejected():
    o = table_oracle("01")
    layout = RegisterLayout.of(("q", 1), ("b", 1))
    with pytest.raises(ContractError):
        ExactSubroutine(layout, (OracleCall(o, ("q",), "b"),), "b", 2)


def test_bv_hidden_1011():
    inst = extraction_instance("1011")
    assert bv_extract(inst) == "1011"
    assert inst.oracle.count == 1


def test_bv_zero_string():
    inst = extraction_instance("0000000")
    assert bv_extract(inst) == "0000000"


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_bv_exhaustive(n):
    for a in range(1 << n):
        hidden = sv.to_bits(a, n)
        assert bv_extract(extraction_instance(hidden)) == hidden


def test_clean_wrap_deutsch():
    sub = deutsch_subroutine(table_oracle("01"))
    wrapped = clean_wrap(sub)
    assert wrapped.query_budget == 2
    report = verify_clean_wrap(sub, wrapped)
    assert report.cases == 2
    assert report.min_fidelity > 1 - 1e-9


def test_clean_wrap_identity():
    sub = identity_subroutine()
    report = verify_clean_wrap(sub)
    assert report.cases == 4
    assert clean_wrap(sub).query_budget == 0


def test_clean_wrap_detects_garbage():
    # a program that leaves a Hadamard on an unmeasured register is not exact
    layout = RegisterLayout.of(("a", 1), ("g", 1))
    sub = ExactSubroutine(layout, (Hadamard("g"),), "a", 0)
    bad = ExactSubroutine(layout.extend(("aux", 1)), (Hadamard("g"),), "aux", 0, ("aux",))
    with pytest.raises(ExactnessViolation):
        verify_clean_wrap(sub, bad)


@pytest.mark.parametrize("length", [2, 6, 14])
def test_clean_wrap_chain_search(length):
    for ones in (0, 1, length // 2, length):
        sub = compile_chain_search(chain_oracle(MonotoneChain.with_ones(length, ones)), length)
        verify_clean_wrap(sub)


def test_clean_wrap_on_superposition():
    chains = {0: MonotoneChain.with_ones(2, 1), 1: MonotoneChain.with_ones(2, 2)}
    w = chain_index_width(2)
    o = table_oracle("01").derive(1 + w, lambda q: chains[q >> w].bits[q & 3] if (q & 3) < 2 else 0, "c")
    sub = compile_chain_search(o, 2, x_width=1)
    wrapped = clean_wrap(sub, aux="out")
    start = sv.hadamard_block(sv.allocate(wrapped.layout), "x")
    final = wrapped.run(start)
    # work registers come back to zero, out holds the parity entangled with x
    expected = np.zeros(final.layout.dimension, dtype=complex)
    for x in (0, 1):
        idx = final.layout.compose_index({"x": x, "out": chains[x].parity})
        expected[idx] = 1 / np.sqrt(2)
    assert sv.fidelity(sv.QuantumState(final.layout, expected), final) > 1 - 1e-9


def test_pipeline_single_query_pair():
    # g(T) = (T1 and T2, T1 or T2) over 2 queries
    outputs = [0b00, 0b01, 0b01, 0b11]
    g = TruthTableReduction((0, 1), outputs, output_width=2)
    for answers in itertools.product((0, 1), repeat=2):
        o = table_oracle(answers)
        want = sv.to_bits(outputs[2 * answers[0] + answers[1]], 2)
        assert function_pipeline(g, o) == want
        assert o.count == 2


def test_pipeline_six_queries():
    rng = random.Random(11)
    for _ in range(10):
        outputs = [rng.randrange(8) for _ in range(64)]
        g = TruthTableReduction(tuple(range(6)), outputs, output_width=3)
        answers = [rng.randint(0, 1) for _ in range(6)]
        o = padded(answers)
        want = sv.to_bits(evaluate_tt(g, padded(answers)), 3)
        assert function_pipeline(g, o) == want
        assert o.count == 4


def test_pipeline_rejects_bad_m():
    g = TruthTableReduction((0, 1, 2), (0,) * 8)
    with pytest.raises(ContractError):
        function_pipeline(g, table_oracle("0110"))


def test_pipeline_chains_are_thresholds():
    g = TruthTableReduction((0, 1), [0, 1, 1, 0], output_width=1)
    circuit = build_pipeline(g, table_oracle("11"))
    assert circuit.chains[1].bits == (1, 1)
    assert circuit.wrapped.query_budget == 2


def test_extract_function_example():
    a = table_oracle("10")
    spec = superterse_spec(a, 3)
    assert extract_function_one_query(spec, "010") == "101"


def test_extract_function_exhaustive_small():
    for outputs in itertools.product(range(4), repeat=2):
        spec = InnerProductOracleSpec(1, 2, outputs)
        for z in (0, 1):
            o = inner_product_oracle(spec)
            assert extract_function_one_query(spec, z, o) == sv.to_bits(outputs[z], 2)
            assert o.count == 1


def test_extract_function_bad_z():
    spec = InnerProductOracleSpec(1, 2, (0, 1))
    with pytest.raises(ContractError):
        extract_function_one_query(spec, "01")


def test_plan_rejects_adaptive_second_round():
    # a plan fixed before seeing answers cannot serve both branches of round two
    o = chain_oracle(MonotoneChain.with_ones(6, 1))
    chain_parity_search(o, 6)
    trace = list(o.trace)
    other = chain_oracle(MonotoneChain.with_ones(6, 4))
    other.declare_plan(trace)
    with pytest.raises(AdaptivityError):
        chain_parity_search(other, 6)
