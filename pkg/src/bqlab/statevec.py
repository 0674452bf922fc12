"""Exact dense state-vector simulation over named bit registers.

Basis index convention: the index of a basis state is the concatenation of
the register contents in declaration order, first register in the most
significant bits.  Within a register, the first qubit is the most
significant bit as well, so a register holding the string ``"101"`` holds
the integer 5.
"""

from __future__ import annotations

import contextlib
import functools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import CapacityError, ContractError, ExactnessViolation

DEFAULT_QUBIT_BUDGET = 24
EXACTNESS_TOL = 1e-9
# marginal probabilities below this are treated as absent from a superposition
SUPPORT_TOL = 1e-12

_SQRT1_2 = 1.0 / math.sqrt(2.0)


def to_bits(value: int, width: int) -> str:
    if width == 0:
        return ""
    return format(value, f"0{width}b")


def from_bits(bits: str) -> int:
    return int(bits, 2) if bits else 0


_budget = [DEFAULT_QUBIT_BUDGET]


def qubit_budget() -> int:
    return _budget[-1]


@contextlib.contextmanager
def qubit_budget_limit(qubits: int):
    """Temporarily change the budget applied to layouts built without an explicit one."""
    if qubits < 1:
        raise ContractError("qubit budget must be positive")
    _budget.append(int(qubits))
    try:
        yield
    finally:
        _budget.pop()


@dataclass(frozen=True)
class RegisterLayout:
    registers: tuple[tuple[str, int], ...]
    budget: int | None = None

    def __post_init__(self):
        if self.budget is None:
            object.__setattr__(self, "budget", _budget[-1])
        regs = tuple((str(name), int(width)) for name, width in self.registers)
        object.__setattr__(self, "registers", regs)
        names = [name for name, _ in regs]
        if len(set(names)) != len(names):
            raise ContractError(f"duplicate register names in {names}")
        for name, width in regs:
            if width < 1:
                raise ContractError(f"register {name!r} has width {width}; widths must be >= 1")
        object.__setattr__(self, "_names", tuple(names))
        object.__setattr__(self, "_widths", tuple(w for _, w in regs))
        object.__setattr__(self, "_positions", {name: i for i, name in enumerate(names)})
        if self.total_width > self.budget:
            raise CapacityError(
                f"layout needs {self.total_width} qubits, budget is {self.budget}"
            )

    @classmethod
    def of(cls, *registers: tuple[str, int], budget: int | None = None) -> "RegisterLayout":
        return cls(tuple(registers), budget=budget)

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    @property
    def widths(self) -> tuple[int, ...]:
        return self._widths

    @property
    def total_width(self) -> int:
        return sum(self.widths)

    @property
    def dimension(self) -> int:
        return 1 << self.total_width

    def index_of(self, name: str) -> int:
        try:
            return self._positions[name]
        except KeyError:
            raise KeyError(f"unknown register {name!r}; layout has {list(self.names)}") from None

    def width(self, name: str) -> int:
        return self.registers[self.index_of(name)][1]

    def qubit_range(self, name: str) -> range:
        """Global qubit positions of a register, position 0 being the most significant."""
        i = self.index_of(name)
        start = sum(self.widths[:i])
        return range(start, start + self.widths[i])

    def extend(self, *registers: tuple[str, int]) -> "RegisterLayout":
        return RegisterLayout(self.registers + tuple(registers), budget=self.budget)

    def compose_index(self, values: dict[str, int]) -> int:
        """Basis index for the given register contents (missing registers are 0)."""
        unknown = set(values) - set(self.names)
        if unknown:
            raise KeyError(f"unknown registers {sorted(unknown)}")
        index = 0
        for name, width in self.registers:
            v = int(values.get(name, 0))
            if not 0 <= v < (1 << width):
                raise ContractError(f"value {v} does not fit register {name!r} of width {width}")
            index = (index << width) | v
        return index

    def split_index(self, index: int) -> dict[str, int]:
        out = {}
        for name, width in reversed(self.registers):
            out[name] = index & ((1 << width) - 1)
            index >>= width
        return dict(reversed(list(out.items())))


@dataclass
class QuantumState:
    layout: RegisterLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.layout.dimension,):
            raise ContractError(
                f"amplitude vector has shape {self.amplitudes.shape}, "
                f"layout needs ({self.layout.dimension},)"
            )

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def check_norm(self, tol: float = EXACTNESS_TOL) -> None:
        if abs(self.norm_squared - 1.0) > tol:
            raise ContractError(f"state norm^2 is {self.norm_squared!r}, expected 1")

    def copy(self) -> "QuantumState":
        return QuantumState(self.layout, self.amplitudes.copy())

    def amplitude(self, **values: int) -> complex:
        return complex(self.amplitudes[self.layout.compose_index(values)])

    def _tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(tuple(1 << w for w in self.layout.widths))


def allocate(layout: RegisterLayout) -> QuantumState:
    amps = np.zeros(layout.dimension, dtype=np.complex128)
    amps[0] = 1.0
    return QuantumState(layout, amps)


def basis_state(layout: RegisterLayout, **values: int) -> QuantumState:
    amps = np.zeros(layout.dimension, dtype=np.complex128)
    amps[layout.compose_index(values)] = 1.0
    return QuantumState(layout, amps)


# registers up to this width get H^{(x)w} as one dense matrix product
_DENSE_HADAMARD_MAX = 10


@functools.lru_cache(maxsize=None)
def _walsh_matrix(width: int) -> np.ndarray:
    h = np.ones((1, 1), dtype=np.complex128)
    base = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) * _SQRT1_2
    for _ in range(width):
        h = np.kron(h, base)
    h.setflags(write=False)
    return h


def hadamard_block(state: QuantumState, register: str) -> QuantumState:
    """Apply H to every qubit of ``register``."""
    layout = state.layout
    n = layout.total_width
    qubits = layout.qubit_range(register)
    if len(qubits) <= _DENSE_HADAMARD_MAX:
        view = state.amplitudes.reshape(1 << qubits.start, 1 << len(qubits), 1 << (n - qubits.stop))
        out = np.tensordot(_walsh_matrix(len(qubits)), view, axes=([1], [1]))
        return QuantumState(layout, np.ascontiguousarray(out.transpose(1, 0, 2)).reshape(-1))
    vec = state.amplitudes.copy()
    for q in qubits:
        view = vec.reshape(1 << q, 2, 1 << (n - q - 1))
        a0 = view[:, 0, :].copy()
        a1 = view[:, 1, :]
        view[:, 0, :] = (a0 + a1) * _SQRT1_2
        view[:, 1, :] = (a0 - a1) * _SQRT1_2
    return QuantumState(layout, vec)


class ReversibleMap:
    """A bijection on ``domain_width``-bit integers, applied as a permutation unitary."""

    def __init__(self, domain_width: int, mapping: Sequence[int] | np.ndarray):
        self.domain_width = int(domain_width)
        table = np.asarray(mapping, dtype=np.int64)
        size = 1 << self.domain_width
        if table.shape != (size,):
            raise ContractError(f"mapping must have {size} entries, got {table.shape}")
        if table.min(initial=0) < 0 or table.max(initial=0) >= size:
            raise ContractError("mapping leaves the domain")
        seen = np.zeros(size, dtype=bool)
        seen[table] = True
        if not seen.all():
            raise ContractError("mapping is not a bijection")
        self.mapping = table

    @classmethod
    def from_function(cls, domain_width: int, fn: Callable[[int], int]) -> "ReversibleMap":
        return cls(domain_width, [fn(x) for x in range(1 << domain_width)])

    @classmethod
    def identity(cls, domain_width: int) -> "ReversibleMap":
        return cls(domain_width, np.arange(1 << domain_width))

    def inverse(self) -> "ReversibleMap":
        inv = np.empty_like(self.mapping)
        inv[self.mapping] = np.arange(self.mapping.size)
        return ReversibleMap(self.domain_width, inv)

    def __call__(self, x: int) -> int:
        return int(self.mapping[x])

    def __eq__(self, other):
        return (
            isinstance(other, ReversibleMap)
            and self.domain_width == other.domain_width
            and np.array_equal(self.mapping, other.mapping)
        )

    def __repr__(self):
        return f"ReversibleMap(domain_width={self.domain_width})"


def _as_names(registers: str | Iterable[str]) -> tuple[str, ...]:
    if isinstance(registers, str):
        return (registers,)
    return tuple(registers)


def _grouped(state: QuantumState, front: tuple[str, ...]) -> tuple[np.ndarray, Callable[[np.ndarray], np.ndarray]]:
    """View the amplitudes as (dim(front[0]), dim(front[1]), ..., rest).

    Returns the regrouped array and a function mapping an array of the same
    shape back to a flat amplitude vector in layout order.
    """
    layout = state.layout
    axes = [layout.index_of(name) for name in front]
    if len(set(axes)) != len(axes):
        raise ContractError(f"register listed twice in {front}")
    tensor = state._tensor()
    moved = np.moveaxis(tensor, axes, list(range(len(axes))))
    moved_shape = moved.shape
    front_dims = [1 << layout.widths[a] for a in axes]
    grouped = moved.reshape(*front_dims, -1)

    def restore(arr: np.ndarray) -> np.ndarray:
        back = np.moveaxis(arr.reshape(moved_shape), list(range(len(axes))), axes)
        return np.ascontiguousarray(back).reshape(-1)

    return grouped, restore


def apply_reversible(
    state: QuantumState, rmap: ReversibleMap, registers: str | Sequence[str]
) -> QuantumState:
    """Relabel basis states of the concatenated ``registers`` by ``rmap``."""
    names = _as_names(registers)
    width = sum(state.layout.width(n) for n in names)
    if width != rmap.domain_width:
        raise ContractError(
            f"map acts on {rmap.domain_width} qubits but registers {names} hold {width}"
        )
    grouped, restore = _grouped(state, names)
    flat = grouped.reshape(1 << width, -1)
    out = np.empty_like(flat)
    out[rmap.mapping] = flat
    return QuantumState(state.layout, restore(out))


def register_probabilities(state: QuantumState, registers: str | Sequence[str]) -> np.ndarray:
    """Marginal distribution of the concatenated ``registers``."""
    names = _as_names(registers)
    width = sum(state.layout.width(n) for n in names)
    grouped, _ = _grouped(state, names)
    flat = grouped.reshape(1 << width, -1)
    return (np.abs(flat) ** 2).sum(axis=1)


def oracle_gate(state: QuantumState, oracle, query_register: str | Sequence[str], answer_register: str) -> QuantumState:
    """One application of U_A: |i>|b> -> |i>|b xor A(i)>.

    ``query_register`` may name several registers, concatenated in the given
    order.  The oracle is charged exactly one query whatever the size of the
    superposition over query strings.
    """
    names = _as_names(query_register)
    layout = state.layout
    qwidth = sum(layout.width(n) for n in names)
    if qwidth != oracle.query_width:
        raise ContractError(
            f"query registers {names} hold {qwidth} qubits, oracle expects {oracle.query_width}"
        )
    if layout.width(answer_register) != 1:
        raise ContractError(f"answer register {answer_register!r} must be a single qubit")
    if answer_register in names:
        raise ContractError("answer register cannot be part of the query")

    grouped, restore = _grouped(state, names + (answer_register,))
    flat = grouped.reshape(1 << qwidth, 2, -1)
    probs = (np.abs(flat) ** 2).sum(axis=(1, 2))
    support = np.flatnonzero(probs > SUPPORT_TOL)
    oracle._charge(support)

    answers = oracle.truth_table().astype(bool)
    out = flat.copy()
    out[answers, 0, :] = flat[answers, 1, :]
    out[answers, 1, :] = flat[answers, 0, :]
    return QuantumState(layout, restore(out))


class ExactnessMonitor:
    """Records the worst outcome probability seen by :func:`measure_exact`."""

    def __init__(self):
        self.measurements = 0
        self.min_probability = 1.0

    @property
    def max_deviation(self) -> float:
        return max(0.0, 1.0 - self.min_probability)

    def record(self, probability: float) -> None:
        self.measurements += 1
        self.min_probability = min(self.min_probability, probability)


_monitors: list[ExactnessMonitor] = []


@contextlib.contextmanager
def exactness_monitor():
    mon = ExactnessMonitor()
    _monitors.append(mon)
    try:
        yield mon
    finally:
        _monitors.remove(mon)


def measure_exact(state: QuantumState, register: str | Sequence[str]) -> str:
    """Return the outcome of ``register`` that occurs with probability >= 1 - 1e-9.

    The state is left untouched.  Raises :class:`ExactnessViolation` when the
    register is not (numerically) in a classical state.
    """
    names = _as_names(register)
    width = sum(state.layout.width(n) for n in names)
    probs = register_probabilities(state, names)
    best = int(np.argmax(probs))
    p = float(probs[best])
    for mon in _monitors:
        mon.record(p)
    if p < 1.0 - EXACTNESS_TOL:
        raise ExactnessViolation(
            f"register {names} has no deterministic outcome: "
            f"best is {to_bits(best, width)!r} with probability {p:.12f}"
        )
    return to_bits(best, width)


def fidelity(a: QuantumState, b: QuantumState) -> float:
    """Squared magnitude of the inner product of the two amplitude vectors.

    Blind to a global phase; use :func:`amplitude_distance` when phases must
    be compared exactly.
    """
    if a.layout.registers != b.layout.registers:
        raise ContractError("fidelity needs identical register layouts")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def amplitude_distance(a: QuantumState, b: QuantumState) -> float:
    """Largest per-amplitude difference; sensitive to global phase."""
    if a.layout.registers != b.layout.registers:
        raise ContractError("amplitude_distance needs identical register layouts")
    return float(np.max(np.abs(a.amplitudes - b.amplitudes)))


def is_dyadic_sqrt2(value: float, max_j: int, tol: float = EXACTNESS_TOL) -> bool:
    """True if ``value`` is within ``tol`` of m * 2**(-j/2) for an integer m and some j <= max_j."""
    for j in range(max_j + 1):
        scale = 2.0 ** (j / 2)
        m = round(value * scale)
        if abs(value - m / scale) <= tol:
            return True
    return False


def dyadic_violations(state: QuantumState) -> list[int]:
    """Basis indices whose amplitude is not of the form (m + i m') 2**(-j/2)."""
    max_j = 2 * state.layout.total_width
    bad = []
    for idx in np.flatnonzero(np.abs(state.amplitudes) > SUPPORT_TOL):
        amp = state.amplitudes[idx]
        if not (is_dyadic_sqrt2(amp.real, max_j) and is_dyadic_sqrt2(amp.imag, max_j)):
            bad.append(int(idx))
    return bad
