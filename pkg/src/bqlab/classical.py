"""Classical bounded-query machinery: truth-table reductions, mind changes, baselines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

from .errors import CapacityError, ContractError
from .oracles import CountedOracle, chain_code, chain_index_width

# the subset DP is exponential in the number of true answers
MAX_MIND_CHANGE_SUPPORT = 14

Evaluator = Union[Sequence[int], Callable[[int], int]]


def answer_index(answers: Sequence[int]) -> int:
    """Pack answers T_1..T_m into an integer, T_1 most significant."""
    idx = 0
    for b in answers:
        idx = (idx << 1) | (int(b) & 1)
    return idx


def answer_bits(index: int, m: int) -> tuple[int, ...]:
    return tuple((index >> (m - 1 - j)) & 1 for j in range(m))


@dataclass(frozen=True)
class TruthTableReduction:
    """A non-adaptive oracle machine: fixed query list plus an evaluator.

    ``evaluator`` is either a table with 2**m entries indexed by
    :func:`answer_index`, or a callable on that index (for query lists too
    long to tabulate).  Outputs are ``output_width``-bit integers.
    """

    queries: tuple[int, ...]
    evaluator: Evaluator
    output_width: int = 1

    def __post_init__(self):
        object.__setattr__(self, "queries", tuple(int(q) for q in self.queries))
        m = len(self.queries)
        if m < 1:
            raise ContractError("a reduction makes at least one query")
        if not callable(self.evaluator):
            table = tuple(int(v) for v in self.evaluator)
            if len(table) != 1 << m:
                raise ContractError(f"evaluator table needs {1 << m} entries, got {len(table)}")
            limit = 1 << self.output_width
            if any(not 0 <= v < limit for v in table):
                raise ContractError(f"evaluator outputs must fit in {self.output_width} bits")
            object.__setattr__(self, "evaluator", table)

    @property
    def m(self) -> int:
        return len(self.queries)

    def output(self, answers: int | Sequence[int]) -> int:
        idx = answers if isinstance(answers, int) else answer_index(answers)
        if callable(self.evaluator):
            return int(self.evaluator(idx))
        return self.evaluator[idx]

    def true_answers(self, oracle: CountedOracle) -> tuple[int, ...]:
        """The oracle's answers to the query list, read without charging."""
        self._check_width(oracle)
        return tuple(oracle.peek(q) for q in self.queries)

    def _check_width(self, oracle: CountedOracle) -> None:
        bad = [q for q in self.queries if not 0 <= q < oracle.universe_size]
        if bad:
            raise ContractError(f"queries {bad} do not fit the {oracle.query_width}-bit oracle")


def evaluate_tt(reduction: TruthTableReduction, oracle: CountedOracle) -> int:
    reduction._check_width(oracle)
    answers = [oracle.query(q) for q in reduction.queries]
    return reduction.output(answers)


@dataclass(frozen=True)
class MindChangeCertificate:
    base: int
    phi_bits: tuple[int, ...]
    max_changes: int

    @property
    def output(self) -> int:
        return self.base ^ (self.max_changes & 1)


def max_mind_changes(t: Callable[[int], int], m: int, support: Sequence[int]) -> int:
    """Longest alternation count of ``t`` along chains of answer sets inside ``support``.

    ``support`` lists the 0-based positions whose answers are 1.  A chain is
    {} = S_0 < S_1 < ... < S_r with every S_j a subset of the support; its
    alternation count is the number of j with t(S_j) != t(S_{j+1}).

    DP over subsets, tracking for each subset S and value v the best count of
    a chain ending inside S at a set where t is v.  O(2^s * s) for s = |support|.
    """
    s = len(support)
    if s > MAX_MIND_CHANGE_SUPPORT:
        raise CapacityError(
            f"{s} true answers exceeds the mind-change DP bound of {MAX_MIND_CHANGE_SUPPORT}"
        )
    position_bit = [1 << (m - 1 - p) for p in support]
    neg = -1
    size = 1 << s
    value = [0] * size
    best = [[neg, neg] for _ in range(size)]
    alt = 0
    for mask in range(size):
        idx = 0
        for i in range(s):
            if mask >> i & 1:
                idx |= position_bit[i]
        v = int(t(idx)) & 1
        value[mask] = v
        if mask == 0:
            alt = 0
            best[0][v] = 0
            continue
        b0 = b1 = neg
        rest = mask
        while rest:
            low = rest & -rest
            sub = best[mask ^ low]
            if sub[0] > b0:
                b0 = sub[0]
            if sub[1] > b1:
                b1 = sub[1]
            rest ^= low
        same, other = (b0, b1) if v == 0 else (b1, b0)
        alt = max(same, other + 1 if other >= 0 else neg)
        best[mask][v] = alt
        best[mask][1 - v] = other
    return alt


def mind_change_bits(reduction: TruthTableReduction, true_answers: Sequence[int]) -> MindChangeCertificate:
    if reduction.output_width != 1:
        raise ContractError("mind changes are defined for 1-bit evaluators")
    m = reduction.m
    if len(true_answers) != m:
        raise ContractError(f"expected {m} answers, got {len(true_answers)}")
    support = [j for j, b in enumerate(true_answers) if int(b)]
    changes = max_mind_changes(reduction.output, m, support)
    phi = (1,) * changes + (0,) * (m - changes)
    cert = MindChangeCertificate(reduction.output(0), phi, changes)
    assert cert.output == reduction.output(list(true_answers)), "mind-change parity mismatch"
    return cert


def classical_chain_parity(oracle: CountedOracle, length: int) -> int:
    """Parity of a monotone chain by binary search for its last 1.

    The search range for the number of ones is padded to 2**q values,
    q = ceil(log2(L + 1)), so every run makes exactly q queries; positions
    past L are out of range and answer 0.
    """
    q = chain_index_width(length)
    if oracle.query_width < q:
        raise ContractError(f"oracle width {oracle.query_width} cannot index a chain of length {length}")
    lo, hi = 0, (1 << q) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if oracle.query(chain_code(mid)):
            lo = mid
        else:
            hi = mid - 1
    return lo & 1


@dataclass(frozen=True)
class Leaf:
    output: int


@dataclass(frozen=True)
class QueryNode:
    query: int
    if0: "QueryNode | Leaf"
    if1: "QueryNode | Leaf"


def tree_depth(tree) -> int:
    if isinstance(tree, Leaf):
        return 0
    return 1 + max(tree_depth(tree.if0), tree_depth(tree.if1))


def evaluate_tree(tree, answer: Callable[[int], int]) -> int:
    node = tree
    while isinstance(node, QueryNode):
        node = node.if1 if answer(node.query) else node.if0
    return node.output


def exhaustive_adaptive_sim(tree, k: int | None = None, output_width: int = 1) -> TruthTableReduction:
    """Turn a depth-k adaptive query tree into a reduction over its distinct queries."""
    depth = tree_depth(tree)
    if k is not None and depth > k:
        raise ContractError(f"tree has depth {depth} > {k}")
    if depth == 0:
        raise ContractError("a tree without queries has no reduction")
    queries: list[int] = []
    frontier = [tree]
    while frontier:
        nxt = []
        for node in frontier:
            if isinstance(node, QueryNode):
                if node.query not in queries:
                    queries.append(node.query)
                nxt += [node.if0, node.if1]
        frontier = nxt
    m = len(queries)
    pos = {q: j for j, q in enumerate(queries)}
    table = []
    for idx in range(1 << m):
        table.append(evaluate_tree(tree, lambda q: (idx >> (m - 1 - pos[q])) & 1))
    return TruthTableReduction(tuple(queries), tuple(table), output_width)
