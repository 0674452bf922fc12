import itertools

import pytest
from hypothesis import given, strategies as st

from bqlab import statevec as sv
from bqlab.errors import AdaptivityError, ContractError
from bqlab.oracles import (
    InnerProductOracleSpec,
    MonotoneChain,
    chain_oracle,
    inner_product_oracle,
    reset_and_read_counter,
    sat_oracle,
    superterse_spec,
    table_oracle,
    threshold_bits,
)
from bqlab.quantum_algorithms import deutsch_parity
from bqlab.sat import CnfFormula
from bqlab.statevec import RegisterLayout


def test_table_oracle_reads_table():
    o = table_oracle("01")
    assert (o.query(0), o.query(1)) == (0, 1)
    assert o.query_width == 1


def test_constant_table():
    o = table_oracle("0000")
    assert o.query_width == 2
    assert [o.peek(i) for i in range(4)] == [0, 0, 0, 0]


def test_table_query_by_bitstring():
    assert table_oracle("1110").query("11") == 0


def test_table_length_must_be_power_of_two():
    with pytest.raises(ContractError):
        table_oracle("011")


def test_chain_oracle_indexing():
    o = chain_oracle(MonotoneChain((1, 1, 0, 0, 0, 0)))
    # position j is encoded as j - 1
    assert o.query(2 - 1) == 1
    assert o.query(5 - 1) == 0
    assert o.query_width == 3
    assert o.peek(7) == 0  # out of range


def test_all_ones_chain():
    o = chain_oracle(MonotoneChain((1,) * 6))
    assert all(o.query(j - 1) == 1 for j in range(1, 7))


def test_chain_rejects_non_monotone():
    with pytest.raises(ContractError):
        MonotoneChain((0, 1))


def test_sat_oracle_answers():
    contradiction = CnfFormula(1, ((1,), (-1,)))
    unit = CnfFormula(1, ((1,),))
    o = sat_oracle([contradiction, unit])
    assert (o.query(0), o.query(1)) == (0, 1)


def test_sat_oracle_single_formula():
    o = sat_oracle([CnfFormula(2, ((1, 2),))])
    assert o.query(0) == 1
    assert o.peek(1) == 0


def test_sat_oracle_empty_clause():
    assert sat_oracle([CnfFormula(1, ((),))]).query(0) == 0


def test_inner_product_zero_vector():
    spec = InnerProductOracleSpec(1, 3, (0, 0))
    o = inner_product_oracle(spec)
    assert not any(o.truth_table())


def test_inner_product_single_overlap():
    o = inner_product_oracle(InnerProductOracleSpec(0, 3, (0b101,)))
    assert o.query("100") == 1


def test_inner_product_even_overlap():
    o = inner_product_oracle(InnerProductOracleSpec(0, 3, (0b101,)))
    # popcount(101 & 111) = 2
    assert o.query("111") == 0


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_inner_product_linear_in_y(n):
    for outputs in itertools.product(range(1 << n), repeat=2):
        spec = InnerProductOracleSpec(1, n, outputs)
        o = inner_product_oracle(spec)
        for z in (0, 1):
            for y, y2 in itertools.product(range(1 << n), repeat=2):
                q = lambda yy: (z << n) | yy
                assert o.peek(q(y ^ y2)) == o.peek(q(y)) ^ o.peek(q(y2))


def test_superterse_spec_reads_a():
    a = table_oracle("10")
    spec = superterse_spec(a, 3)
    # z = (0, 1, 0) over a 1-bit universe
    assert spec.f(0b010) == 0b101
    assert a.count == 0


def test_threshold_bits_examples():
    assert threshold_bits((0, 1, 0, 1)).bits == (1, 1, 0, 0)
    assert threshold_bits((0, 0, 0)).bits == (0, 0, 0)


@given(st.lists(st.integers(0, 1), max_size=20))
def test_threshold_bits_properties(bits):
    chain = threshold_bits(bits)
    assert len(chain) == len(bits)
    assert chain.ones == sum(bits)
    assert chain.parity == sum(bits) % 2
    assert all(chain.bits[j] >= chain.bits[j + 1] for j in range(len(bits) - 1))


@given(st.integers(1, 30), st.data())
def test_chain_answers_non_increasing(length, data):
    ones = data.draw(st.integers(0, length))
    o = chain_oracle(MonotoneChain.with_ones(length, ones))
    answers = [o.peek(code) for code in range(length)]
    assert all(answers[i] >= answers[i + 1] for i in range(length - 1))


def test_counter_reset():
    o = table_oracle("01")
    assert reset_and_read_counter(o) == 0
    layout = RegisterLayout.of(("q", 1), ("b", 1))
    for _ in range(3):
        sv.oracle_gate(sv.allocate(layout), o, "q", "b")
    assert reset_and_read_counter(o) == 3
    assert o.count == 0


def test_counter_after_deutsch():
    o = table_oracle("01")
    deutsch_parity(o)
    assert reset_and_read_counter(o) == 1


def test_peek_is_free():
    o = table_oracle("0110")
    o.peek(1)
    o.truth_table()
    assert o.count == 0


def test_derived_oracle_shares_counter():
    o = table_oracle("0110")
    d = o.derive(1, lambda q: 1 - q, "neg")
    d.query(0)
    assert o.count == 1


def test_plan_enforced_for_classical_queries():
    o = table_oracle("0110")
    o.declare_plan([{0}, {2}])
    o.query(0)
    with pytest.raises(AdaptivityError):
        o.query(3)
    assert o.count == 1


def test_plan_enforced_for_gates():
    o = table_oracle("0110")
    layout = RegisterLayout.of(("q", 2), ("b", 1))
    o.declare_plan([{0, 1}])
    with pytest.raises(AdaptivityError):
        sv.oracle_gate(sv.hadamard_block(sv.allocate(layout), "q"), o, "q", "b")


def test_plan_exhaustion():
    o = table_oracle("01")
    o.declare_plan([{0}])
    o.query(0)
    with pytest.raises(AdaptivityError):
        o.query(0)
