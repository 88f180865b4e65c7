"""Circuits over single-qubit gates and CNOT.

Qubit j holds bit j of the basis index, i = sum_j i_j 2**j, so qubit 0 is the
least-significant bit. All modules and file formats use this convention.

Circuits are immutable. Builders collect gates in a CircuitBuilder and freeze
the result with build().
"""

import contextlib
import functools
import logging
import typing

import attr
import numpy as np

from . import attrs_extra, linalg

GATE_UNITARY_TOLERANCE = 1e-12

log = logging.getLogger(__name__)


class CircuitError(ValueError):
    """Raised when a gate or circuit violates the circuit invariants."""


class LayoutError(CircuitError):
    """Raised when registers or gate supports overlap where they must be disjoint."""


class InsufficientAncillas(LayoutError):
    """Raised when a builder needs more ancillary qubits than it was given."""


@attr.s(frozen=True, eq=False, repr=False)
class OneQubit:
    target = attr.ib(validator=attrs_extra.qubit_index, converter=int)
    matrix = attr.ib(converter=attrs_extra.readonly_matrix)

    @matrix.validator
    def _check_matrix(self, attribute, value):
        if value.shape != (2, 2):
            raise CircuitError(f'single-qubit gate needs a 2x2 matrix, got {value.shape}')
        if not linalg.is_unitary(value, GATE_UNITARY_TOLERANCE):
            raise CircuitError(f'gate on qubit {self.target} is not unitary')

    @property
    def qubits(self) -> typing.Tuple[int, ...]:
        return (self.target,)

    def adjoint(self) -> 'OneQubit':
        return OneQubit(self.target, self.matrix.conj().T)

    def relabel(self, mapping: typing.Sequence[int]) -> 'OneQubit':
        return OneQubit(mapping[self.target], self.matrix)

    def __eq__(self, other):
        if not isinstance(other, OneQubit):
            return NotImplemented
        return self.target == other.target and np.array_equal(self.matrix, other.matrix)

    def __repr__(self):
        return f'OneQubit(target={self.target}, matrix={self.matrix.tolist()!r})'


@attr.s(frozen=True)
class Cnot:
    control = attr.ib(validator=attrs_extra.qubit_index, converter=int)
    target = attr.ib(validator=attrs_extra.qubit_index, converter=int)

    @target.validator
    def _check_distinct(self, attribute, value):
        if value == self.control:
            raise CircuitError(f'CNOT control and target are both qubit {value}')

    @property
    def qubits(self) -> typing.Tuple[int, ...]:
        return self.control, self.target

    def adjoint(self) -> 'Cnot':
        return self

    def relabel(self, mapping: typing.Sequence[int]) -> 'Cnot':
        return Cnot(mapping[self.control], mapping[self.target])


Gate = typing.Union[OneQubit, Cnot]


@attr.s(frozen=True, auto_attribs=True)
class Section:
    """Named range [start, stop) of gate positions."""

    name: str
    start: int
    stop: int


@attr.s(frozen=True, auto_attribs=True)
class Metrics:
    depth: int
    size: int
    ancilla_count: int
    cnot_count: int


def _layering_depth(num_qubits: int, gates: typing.Iterable[Gate]) -> int:
    """Greedy ASAP layering: each gate goes one layer after the last gate on its qubits."""

    busy_until = [0] * num_qubits
    depth = 0
    for gate in gates:
        layer = max(busy_until[q] for q in gate.qubits) + 1
        for q in gate.qubits:
            busy_until[q] = layer
        depth = max(depth, layer)
    return depth


@attr.s(frozen=True, hash=False)
class Circuit:
    num_qubits = attr.ib(validator=attr.validators.instance_of(int))
    gates = attr.ib(converter=tuple, default=())
    ancillas = attr.ib(converter=frozenset, default=frozenset())
    sections = attr.ib(converter=tuple, default=())

    def __attrs_post_init__(self):
        for position, gate in enumerate(self.gates):
            if not isinstance(gate, (OneQubit, Cnot)):
                raise CircuitError(f'gate {position} has unsupported type {type(gate)}')
            for q in gate.qubits:
                if q >= self.num_qubits:
                    raise CircuitError(f'gate {position} touches qubit {q}, '
                                       f'circuit has {self.num_qubits} qubits')
        for q in self.ancillas:
            if not 0 <= q < self.num_qubits:
                raise CircuitError(f'ancilla {q} out of range for {self.num_qubits} qubits')
        for section in self.sections:
            if not 0 <= section.start <= section.stop <= len(self.gates):
                raise CircuitError(f'section {section.name!r} out of range')

    @functools.cached_property
    def depth(self) -> int:
        return _layering_depth(self.num_qubits, self.gates)

    @property
    def size(self) -> int:
        return len(self.gates)

    @property
    def cnot_count(self) -> int:
        return sum(1 for gate in self.gates if isinstance(gate, Cnot))

    def section(self, name: str) -> 'Circuit':
        """Returns the gates of the named section as a circuit of its own."""

        for section in self.sections:
            if section.name == name:
                return Circuit(self.num_qubits, self.gates[section.start:section.stop],
                               self.ancillas)
        raise KeyError(name)

    def section_names(self) -> typing.List[str]:
        return [section.name for section in self.sections]


def append(c: Circuit, gate: Gate) -> Circuit:
    return Circuit(c.num_qubits, c.gates + (gate,), c.ancillas, c.sections)


def depth(c: Circuit) -> int:
    return c.depth


def recompute_depth(c: Circuit) -> int:
    """Depth computed from scratch, bypassing the cached value."""
    return _layering_depth(c.num_qubits, c.gates)


def metrics(c: Circuit) -> Metrics:
    return Metrics(depth=c.depth, size=c.size, ancilla_count=len(c.ancillas),
                   cnot_count=c.cnot_count)


def compose(a: Circuit, b: Circuit) -> Circuit:
    """Runs a, then b."""

    if a.num_qubits != b.num_qubits:
        raise CircuitError(f'cannot compose circuits on {a.num_qubits} and {b.num_qubits} qubits')
    offset = len(a.gates)
    shifted = tuple(Section(s.name, s.start + offset, s.stop + offset) for s in b.sections)
    return Circuit(a.num_qubits, a.gates + b.gates, a.ancillas | b.ancillas,
                   a.sections + shifted)


def adjoint(c: Circuit) -> Circuit:
    size = len(c.gates)
    mirrored = tuple(Section(s.name, size - s.stop, size - s.start)
                     for s in reversed(c.sections))
    return Circuit(c.num_qubits, tuple(g.adjoint() for g in reversed(c.gates)),
                   c.ancillas, mirrored)


def remap(c: Circuit, mapping: typing.Sequence[int], num_qubits: int = None) -> Circuit:
    """Relabels qubit q as mapping[q].

    Without num_qubits the mapping must be a permutation of the circuit's qubits;
    with it, the circuit is embedded injectively into a register of that width.
    """
    mapping = [int(q) for q in mapping]
    if len(mapping) != c.num_qubits:
        raise CircuitError(f'mapping has {len(mapping)} entries for {c.num_qubits} qubits')
    if len(set(mapping)) != len(mapping):
        raise CircuitError('qubit mapping is not injective')
    if num_qubits is None:
        num_qubits = c.num_qubits
        if sorted(mapping) != list(range(num_qubits)):
            raise CircuitError('qubit mapping is not a permutation')
    elif any(not 0 <= q < num_qubits for q in mapping):
        raise CircuitError(f'qubit mapping leaves the {num_qubits}-qubit register')

    return Circuit(num_qubits,
                   tuple(g.relabel(mapping) for g in c.gates),
                   frozenset(mapping[q] for q in c.ancillas),
                   c.sections)


def check_disjoint(*registers: typing.Iterable[int]) -> None:
    """Raises LayoutError when any qubit appears twice across the registers."""

    seen: typing.Set[int] = set()
    for register in registers:
        for q in register:
            if q in seen:
                raise LayoutError(f'qubit {q} is used by more than one register')
            seen.add(q)


@attr.s
class CircuitBuilder:
    """Mutable gate collector; call build() for the immutable Circuit."""

    num_qubits = attr.ib(validator=attr.validators.instance_of(int))
    _gates = attr.ib(factory=list, init=False, repr=False)
    _ancillas = attr.ib(factory=set, init=False)
    _sections = attr.ib(factory=list, init=False)

    def _check(self, *qubits: int) -> None:
        for q in qubits:
            if not 0 <= q < self.num_qubits:
                raise CircuitError(f'qubit {q} out of range for {self.num_qubits} qubits')

    def __len__(self) -> int:
        return len(self._gates)

    def u(self, target: int, matrix: np.ndarray) -> None:
        self._check(target)
        self._gates.append(OneQubit(target, matrix))

    def cx(self, control: int, target: int) -> None:
        self._check(control, target)
        self._gates.append(Cnot(control, target))

    def gate(self, gate: Gate) -> None:
        self._check(*gate.qubits)
        self._gates.append(gate)

    def extend(self, other: Circuit) -> None:
        if other.num_qubits != self.num_qubits:
            raise CircuitError(f'cannot extend a {self.num_qubits}-qubit circuit '
                               f'with a {other.num_qubits}-qubit one')
        offset = len(self._gates)
        self._gates.extend(other.gates)
        self._ancillas.update(other.ancillas)
        self._sections.extend(Section(s.name, s.start + offset, s.stop + offset)
                              for s in other.sections)

    def declare_ancillas(self, qubits: typing.Iterable[int]) -> None:
        qubits = list(qubits)
        self._check(*qubits)
        self._ancillas.update(qubits)

    @contextlib.contextmanager
    def section(self, name: str):
        """Labels the gates added inside the context."""

        start = len(self._gates)
        yield
        self._sections.append(Section(name, start, len(self._gates)))

    def build(self) -> Circuit:
        return Circuit(self.num_qubits, tuple(self._gates), frozenset(self._ancillas),
                       tuple(self._sections))
