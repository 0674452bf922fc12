"""Counted Boolean oracles over fixed-width query strings.

Queries are integers in ``range(2**query_width)``; as bit strings they are
written most significant bit first.  Every oracle is total: indices outside
the meaningful universe answer 0, which keeps the oracle gate unitary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import sat as satmod
from .errors import AdaptivityError, ContractError
from .statevec import from_bits, to_bits


class QueryCounter:
    """Mutable query tally; shared between an oracle and the oracles derived from it."""

    def __init__(self):
        self.value = 0

    def __repr__(self):
        return f"QueryCounter({self.value})"


class CountedOracle:
    """A predicate on ``query_width``-bit strings that counts how often it is consulted.

    Counting happens in two places only: :meth:`query` (classical access) and
    :func:`bqlab.statevec.oracle_gate` (one quantum query per application).
    :meth:`peek` evaluates the predicate without charging, for semantic
    constructions that stand in for formula-level reductions.
    """

    def __init__(
        self,
        query_width: int,
        predicate: Callable[[int], int],
        *,
        name: str = "oracle",
        counter: QueryCounter | None = None,
    ):
        if query_width < 1:
            raise ContractError("query width must be at least 1")
        self.query_width = int(query_width)
        self.predicate = predicate
        self.name = name
        self.counter = counter if counter is not None else QueryCounter()
        self._table: np.ndarray | None = None
        self._plan: list[frozenset[int]] | None = None
        self._plan_pos = 0
        self.trace: list[frozenset[int]] = []

    def __repr__(self):
        return f"CountedOracle({self.name!r}, width={self.query_width}, count={self.count})"

    @property
    def count(self) -> int:
        return self.counter.value

    @property
    def universe_size(self) -> int:
        return 1 << self.query_width

    def peek(self, i: int) -> int:
        if not 0 <= i < self.universe_size:
            raise ContractError(f"query {i} outside {self.query_width}-bit universe")
        if self._table is not None:
            return int(self._table[i])
        return int(bool(self.predicate(i)))

    def truth_table(self) -> np.ndarray:
        if self._table is None:
            self._table = np.fromiter(
                (int(bool(self.predicate(i))) for i in range(self.universe_size)),
                dtype=np.uint8,
                count=self.universe_size,
            )
        return self._table

    def query(self, i: int | str) -> int:
        """Classical counted query."""
        if isinstance(i, str):
            if len(i) != self.query_width:
                raise ContractError(f"query {i!r} is not {self.query_width} bits wide")
            i = from_bits(i)
        answer = self.peek(i)
        self._charge(np.array([i]))
        return answer

    def declare_plan(self, supports: Iterable[Iterable[int]]) -> None:
        """Fix the queries of a non-adaptive run before the first one is made.

        The j-th query made afterwards (quantum or classical) must only touch
        query strings in ``supports[j]``.
        """
        if self._plan is not None and self._plan_pos:
            raise AdaptivityError("a plan is already in progress on this oracle")
        plan = [frozenset(int(q) for q in s) for s in supports]
        for s in plan:
            bad = [q for q in s if not 0 <= q < self.universe_size]
            if bad:
                raise ContractError(f"planned queries {bad} outside the oracle universe")
        self._plan = plan
        self._plan_pos = 0

    def clear_plan(self) -> None:
        self._plan = None
        self._plan_pos = 0

    @property
    def plan_remaining(self) -> int | None:
        if self._plan is None:
            return None
        return len(self._plan) - self._plan_pos

    def _charge(self, support: np.ndarray) -> None:
        touched = frozenset(int(q) for q in support)
        if self._plan is not None:
            if self._plan_pos >= len(self._plan):
                raise AdaptivityError(
                    f"{self.name}: query {self._plan_pos + 1} exceeds the {len(self._plan)} planned queries"
                )
            allowed = self._plan[self._plan_pos]
            if not touched <= allowed:
                extra = sorted(touched - allowed)
                raise AdaptivityError(
                    f"{self.name}: query {self._plan_pos + 1} touches {extra[:8]} outside the declared plan"
                )
            self._plan_pos += 1
        self.trace.append(touched)
        self.counter.value += 1

    def derive(self, query_width: int, predicate: Callable[[int], int], name: str) -> "CountedOracle":
        """An oracle whose queries are charged to this oracle's counter."""
        return CountedOracle(query_width, predicate, name=name, counter=self.counter)


def reset_and_read_counter(oracle: CountedOracle) -> int:
    n = oracle.counter.value
    oracle.counter.value = 0
    oracle.trace.clear()
    return n


def table_oracle(truth_table: str | Sequence[int], name: str = "table") -> CountedOracle:
    bits = [int(b) for b in truth_table]
    size = len(bits)
    if size < 2 or size & (size - 1):
        raise ContractError(f"truth table length {size} is not a power of two >= 2")
    if any(b not in (0, 1) for b in bits):
        raise ContractError("truth table entries must be 0 or 1")
    width = size.bit_length() - 1
    table = tuple(bits)
    return CountedOracle(width, table.__getitem__, name=name)


@dataclass(frozen=True)
class MonotoneChain:
    """Non-increasing bits c_1 >= c_2 >= ... >= c_L (stored 0-based)."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        object.__setattr__(self, "bits", bits)
        if any(b not in (0, 1) for b in bits):
            raise ContractError("chain entries must be 0 or 1")
        if any(bits[j] < bits[j + 1] for j in range(len(bits) - 1)):
            raise ContractError(f"chain {bits} is not non-increasing")

    @classmethod
    def with_ones(cls, length: int, ones: int) -> "MonotoneChain":
        if not 0 <= ones <= length:
            raise ContractError(f"cannot place {ones} ones in a chain of length {length}")
        return cls((1,) * ones + (0,) * (length - ones))

    def __len__(self):
        return len(self.bits)

    def __getitem__(self, j: int) -> int:
        """1-based access matching c_1..c_L."""
        if not 1 <= j <= len(self.bits):
            raise IndexError(j)
        return self.bits[j - 1]

    @property
    def ones(self) -> int:
        return sum(self.bits)

    @property
    def parity(self) -> int:
        return self.ones & 1


def chain_index_width(length: int) -> int:
    """ceil(log2(L + 1)) bits, enough for the codes 0..L."""
    return max(1, int(length).bit_length())


def chain_code(j: int) -> int:
    """Query code for chain position j (1-based)."""
    return j - 1


def chain_oracle(chain: MonotoneChain, name: str = "chain") -> CountedOracle:
    bits = chain.bits
    if not bits:
        raise ContractError("chain must be non-empty")

    def predicate(code: int) -> int:
        return bits[code] if code < len(bits) else 0

    oracle = CountedOracle(chain_index_width(len(bits)), predicate, name=name)
    oracle.chain = chain
    return oracle


def sat_oracle(universe: Sequence[satmod.CnfFormula], name: str = "sat") -> CountedOracle:
    formulas = list(universe)
    if not formulas:
        raise ContractError("SAT universe must contain at least one formula")
    answers = tuple(satmod.brute_force_sat(f) for f in formulas)
    width = max(1, (len(formulas) - 1).bit_length())

    def predicate(j: int) -> int:
        return answers[j] if j < len(answers) else 0

    oracle = CountedOracle(width, predicate, name=name)
    oracle.universe = formulas
    return oracle


@dataclass(frozen=True)
class InnerProductOracleSpec:
    """Hidden map f from ``z_width``-bit strings to ``n``-bit strings.

    The oracle built from it answers query (z, y), encoded as ``z << n | y``,
    with the parity of ``f(z) AND y``.
    """

    z_width: int
    n: int
    outputs: tuple[int, ...]

    def __post_init__(self):
        outs = tuple(int(v) for v in self.outputs)
        object.__setattr__(self, "outputs", outs)
        if self.z_width < 0 or self.n < 1:
            raise ContractError("need z_width >= 0 and n >= 1")
        if len(outs) != 1 << self.z_width:
            raise ContractError(f"need {1 << self.z_width} outputs, got {len(outs)}")
        if any(not 0 <= v < (1 << self.n) for v in outs):
            raise ContractError(f"outputs must be {self.n}-bit values")

    @property
    def query_width(self) -> int:
        return self.z_width + self.n

    def f(self, z: int) -> int:
        return self.outputs[z]


def inner_product(u: int, v: int) -> int:
    return (u & v).bit_count() & 1


def inner_product_oracle(spec: InnerProductOracleSpec, name: str = "X") -> CountedOracle:
    n = spec.n
    mask = (1 << n) - 1
    outputs = spec.outputs

    def predicate(q: int) -> int:
        return inner_product(outputs[q >> n], q & mask)

    oracle = CountedOracle(spec.query_width, predicate, name=name)
    oracle.spec = spec
    return oracle


def superterse_spec(a_oracle: CountedOracle, n: int) -> InnerProductOracleSpec:
    """The inner-product set for F_n^A: f(z_1..z_n) = (A(z_1), ..., A(z_n)).

    ``z`` packs the n queries to A, z_1 in the most significant chunk; output
    bit i (from the left) is A(z_i).  A is evaluated with ``peek``: building
    the set X is a construction, not a query.
    """
    u = a_oracle.query_width
    chunk = (1 << u) - 1
    answers = [a_oracle.peek(q) for q in range(1 << u)]
    outputs = []
    for z in range(1 << (n * u)):
        out = 0
        for i in range(n):
            zi = (z >> (u * (n - 1 - i))) & chunk
            out = (out << 1) | answers[zi]
        outputs.append(out)
    return InnerProductOracleSpec(n * u, n, tuple(outputs))


def threshold_bits(bits: Sequence[int]) -> MonotoneChain:
    """c_i = 1 iff at least i of ``bits`` are set."""
    bits = [int(b) for b in bits]
    return MonotoneChain.with_ones(len(bits), sum(bits))


def describe(oracle: CountedOracle) -> str:
    return "".join(str(int(b)) for b in oracle.truth_table())


__all__ = [
    "CountedOracle",
    "InnerProductOracleSpec",
    "MonotoneChain",
    "QueryCounter",
    "chain_code",
    "chain_index_width",
    "chain_oracle",
    "describe",
    "inner_product",
    "inner_product_oracle",
    "reset_and_read_counter",
    "sat_oracle",
    "superterse_spec",
    "table_oracle",
    "threshold_bits",
    "to_bits",
]
