"""Dense statevector simulation, the oracle that verifies synthesized circuits."""

import logging
import typing

import attr
import numpy as np

from . import attrs_extra, circuit

DEFAULT_QUBIT_CAP = 26
DEFAULT_ANCILLA_TOLERANCE = 1e-9
MAX_EXTRACT_QUBITS = 12
STATE_NORM_TOLERANCE = 1e-10

log = logging.getLogger(__name__)


class SimulationError(Exception):
    """Base class for simulator failures."""


class QubitCapExceeded(SimulationError):
    """Raised when a circuit is too wide to simulate densely."""


class DimensionMismatch(SimulationError, ValueError):
    """Raised when a state and a circuit (or two states) do not have the same width."""


class AncillaNotRestored(SimulationError):
    """Raised when ancillas are not back in |0> after a run."""


class EntangledWithAncilla(AncillaNotRestored):
    """Raised when the working qubits end up entangled with the ancillas."""


def _axis(num_qubits: int, qubit: int) -> int:
    """Array axis of a qubit when a state is viewed with shape (2,) * num_qubits.

    Amplitude i sits at the flat C-order position i = sum_j i_j 2**j, so the
    last axis is qubit 0. All bit extraction in this module goes through here.
    """
    return num_qubits - 1 - qubit


def bit_of(index: typing.Union[int, np.ndarray], qubit: int):
    return (index >> qubit) & 1


@attr.s(frozen=True, eq=False)
class StateVector:
    num_qubits = attr.ib(validator=attr.validators.instance_of(int))
    amplitudes = attr.ib(converter=attrs_extra.readonly_matrix, repr=False)

    @amplitudes.validator
    def _check_shape(self, attribute, value):
        if value.shape != (1 << self.num_qubits,):
            raise DimensionMismatch(f'{self.num_qubits} qubits need {1 << self.num_qubits} '
                                    f'amplitudes, got shape {value.shape}')

    @classmethod
    def from_amplitudes(cls, amplitudes) -> 'StateVector':
        """Checked constructor: the length must be a power of two and the norm 1."""

        amplitudes = np.asarray(amplitudes, dtype=complex)
        num_qubits = len(amplitudes).bit_length() - 1
        if len(amplitudes) != 1 << num_qubits:
            raise DimensionMismatch(f'{len(amplitudes)} amplitudes is not a power of two')
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1) > STATE_NORM_TOLERANCE:
            raise ValueError(f'state has norm {norm:.12g}, expected 1')
        return cls(num_qubits, amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def zero_state(num_qubits: int) -> StateVector:
    return basis_state(num_qubits, 0)


def basis_state(num_qubits: int, index: int) -> StateVector:
    amplitudes = np.zeros(1 << num_qubits, dtype=complex)
    amplitudes[index] = 1.0
    return StateVector(num_qubits, amplitudes)


def _positions(num_qubits: int, qubits: typing.Sequence[int]) -> np.ndarray:
    """Flat indices of the basis states where only `qubits` may be non-zero.

    Entry x holds the index that carries bit j of x on qubits[j].
    """
    local = np.arange(1 << len(qubits))
    positions = np.zeros_like(local)
    for j, q in enumerate(qubits):
        positions |= bit_of(local, j) << q
    return positions


def embed(amplitudes, qubits: typing.Sequence[int], num_qubits: int) -> StateVector:
    """Places amplitudes on `qubits`, with every other qubit in |0>."""

    amplitudes = np.asarray(amplitudes, dtype=complex)
    if len(amplitudes) != 1 << len(qubits):
        raise DimensionMismatch(f'{len(amplitudes)} amplitudes for {len(qubits)} qubits')
    full = np.zeros(1 << num_qubits, dtype=complex)
    full[_positions(num_qubits, qubits)] = amplitudes
    return StateVector(num_qubits, full)


def restrict(state: StateVector, qubits: typing.Sequence[int]) -> np.ndarray:
    """Amplitudes on `qubits` with every other qubit projected onto |0>."""
    return state.amplitudes[_positions(state.num_qubits, qubits)]


def off_subspace_mass(state: StateVector, qubits: typing.Sequence[int]) -> float:
    """Probability that any of the other qubits (not in `qubits`) is |1>."""

    kept = restrict(state, qubits)
    return max(0.0, 1.0 - float(np.vdot(kept, kept).real))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|"""

    if a.num_qubits != b.num_qubits:
        raise DimensionMismatch(f'states on {a.num_qubits} and {b.num_qubits} qubits')
    return min(1.0, float(abs(np.vdot(a.amplitudes, b.amplitudes))))


def unitary_distance(expected: np.ndarray, actual: np.ndarray) -> float:
    """Max column 2-norm of the difference, after aligning global phase.

    The phase is taken from the largest-magnitude entry of the first column.
    """
    expected = np.asarray(expected, dtype=complex)
    actual = np.asarray(actual, dtype=complex)
    if expected.shape != actual.shape:
        raise DimensionMismatch(f'matrix shapes differ: {expected.shape} vs {actual.shape}')

    pivot = int(np.argmax(np.abs(expected[:, 0])))
    ratio = actual[pivot, 0] / expected[pivot, 0]
    aligned = expected * (ratio / abs(ratio) if abs(ratio) > 0 else 1.0)
    return float(np.max(np.linalg.norm(aligned - actual, axis=0)))


@attr.s
class Simulator:
    qubit_cap = attr.ib(default=DEFAULT_QUBIT_CAP, validator=attr.validators.instance_of(int))
    ancilla_tolerance = attr.ib(default=DEFAULT_ANCILLA_TOLERANCE, converter=float)
    _log = attrs_extra.log('%s.Simulator' % __name__)

    def check_width(self, num_qubits: int) -> None:
        if num_qubits > self.qubit_cap:
            raise QubitCapExceeded(f'{num_qubits} qubits exceeds the simulator cap '
                                   f'of {self.qubit_cap}')

    def run(self, c: circuit.Circuit, state: StateVector) -> StateVector:
        if c.num_qubits != state.num_qubits:
            raise DimensionMismatch(f'circuit has {c.num_qubits} qubits, '
                                    f'state has {state.num_qubits}')
        self.check_width(c.num_qubits)

        n = c.num_qubits
        tensor = np.array(state.amplitudes, dtype=complex).reshape((2,) * n)
        for gate in c.gates:
            if isinstance(gate, circuit.OneQubit):
                _apply_one_qubit(tensor, n, gate.target, gate.matrix)
            else:
                _apply_cnot(tensor, n, gate.control, gate.target)
        return StateVector(n, tensor.reshape(-1))

    def ancilla_mass(self, c: circuit.Circuit, state: StateVector) -> float:
        """Probability of finding any declared ancilla outside |0> after the run."""

        out = self.run(c, state)
        working = [q for q in range(c.num_qubits) if q not in c.ancillas]
        return off_subspace_mass(out, working)

    def verify_ancilla_restored(self, c: circuit.Circuit, state: StateVector) -> bool:
        mass = self.ancilla_mass(c, state)
        if mass > self.ancilla_tolerance:
            self._log.debug('Ancilla mass %.3g after run exceeds %.3g',
                            mass, self.ancilla_tolerance)
            return False
        return True

    def extract_unitary(self, c: circuit.Circuit, on: typing.Sequence[int]) -> np.ndarray:
        """The operator a circuit applies to `on`, all other qubits starting in |0>."""

        on = list(on)
        if len(on) > MAX_EXTRACT_QUBITS:
            raise QubitCapExceeded(f'cannot extract a unitary on {len(on)} qubits, '
                                   f'limit is {MAX_EXTRACT_QUBITS}')
        circuit.check_disjoint(on)
        self.check_width(c.num_qubits)

        dimension = 1 << len(on)
        matrix = np.zeros((dimension, dimension), dtype=complex)
        for column in range(dimension):
            state = embed(np.eye(dimension)[column], on, c.num_qubits)
            out = self.run(c, state)
            mass = off_subspace_mass(out, on)
            if mass > self.ancilla_tolerance:
                raise self._restoration_error(out, on, column, mass)
            matrix[:, column] = restrict(out, on)
        return matrix

    def _restoration_error(self, out: StateVector, on: typing.Sequence[int],
                           column: int, mass: float) -> AncillaNotRestored:
        others = [q for q in range(out.num_qubits) if q not in on]
        rows = _positions(out.num_qubits, on)
        cols = _positions(out.num_qubits, others)
        joint = out.amplitudes[rows[:, np.newaxis] | cols[np.newaxis, :]]
        reduced = joint @ joint.conj().T
        weights = np.linalg.eigvalsh(reduced)
        if len(weights) > 1 and weights[-2] > self.ancilla_tolerance:
            return EntangledWithAncilla(f'column {column}: working qubits are entangled '
                                        f'with the ancillas')
        return AncillaNotRestored(f'column {column}: ancilla mass {mass:.3g} '
                                  f'outside |0...0>')


def _apply_one_qubit(tensor: np.ndarray, n: int, qubit: int, matrix: np.ndarray) -> None:
    axis = _axis(n, qubit)
    zero = [slice(None)] * n
    one = [slice(None)] * n
    zero[axis], one[axis] = 0, 1
    amp0 = tensor[tuple(zero)].copy()
    amp1 = tensor[tuple(one)]
    tensor[tuple(zero)] = matrix[0, 0] * amp0 + matrix[0, 1] * amp1
    tensor[tuple(one)] = matrix[1, 0] * amp0 + matrix[1, 1] * amp1


def _apply_cnot(tensor: np.ndarray, n: int, control: int, target: int) -> None:
    flip0 = [slice(None)] * n
    flip1 = [slice(None)] * n
    flip0[_axis(n, control)] = flip1[_axis(n, control)] = 1
    flip0[_axis(n, target)], flip1[_axis(n, target)] = 0, 1
    swapped = tensor[tuple(flip0)].copy()
    tensor[tuple(flip0)] = tensor[tuple(flip1)]
    tensor[tuple(flip1)] = swapped


# Used by the module-level functions; the CLI builds its own from the configuration.
_default = Simulator()


def run(c: circuit.Circuit, state: StateVector) -> StateVector:
    return _default.run(c, state)


def extract_unitary(c: circuit.Circuit, on: typing.Sequence[int]) -> np.ndarray:
    return _default.extract_unitary(c, on)


def verify_ancilla_restored(c: circuit.Circuit, state: StateVector) -> bool:
    return _default.verify_ancilla_restored(c, state)
