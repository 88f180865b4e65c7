"""JSON documents read and written by the command line.

Complex numbers are stored as [re, im] pairs. Basis indices follow the
circuit convention: qubit j holds bit j.
"""

import json
import logging
import pathlib
import typing

import attr
import numpy as np

from . import circuit, cqsp, json_encoder, linalg, simulator, ucg

log = logging.getLogger(__name__)


class InvalidDocument(ValueError):
    """Raised when a JSON file does not have the expected structure."""


def _complex(value, where: str) -> complex:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise InvalidDocument(f'{where}: expected [re, im], got {value!r}')
    try:
        return complex(float(value[0]), float(value[1]))
    except (TypeError, ValueError) as ex:
        raise InvalidDocument(f'{where}: {ex}') from ex


def _complex_array(values, where: str) -> np.ndarray:
    if not isinstance(values, list):
        raise InvalidDocument(f'{where}: expected a list')
    return np.array([_complex(v, f'{where}[{i}]') for i, v in enumerate(values)], dtype=complex)


def _pairs(values: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).ravel()]


def _matrix_rows(matrix: np.ndarray) -> list:
    return [_pairs(row) for row in np.asarray(matrix, dtype=complex)]


def _matrix(rows, where: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise InvalidDocument(f'{where}: expected a list of rows')
    parsed = [_complex_array(row, f'{where}[{i}]') for i, row in enumerate(rows)]
    if any(len(row) != len(parsed) for row in parsed):
        raise InvalidDocument(f'{where}: matrix is not square')
    return np.array(parsed)


def _field(doc: typing.Mapping, key: str, kind: type = object):
    if not isinstance(doc, dict):
        raise InvalidDocument(f'expected a JSON object, got {type(doc).__name__}')
    try:
        value = doc[key]
    except KeyError:
        raise InvalidDocument(f'missing key {key!r}') from None
    if not isinstance(value, kind) or isinstance(value, bool) and kind is int:
        raise InvalidDocument(f'key {key!r} should be {kind.__name__}, got {value!r}')
    return value


def state_from_dict(doc: dict) -> np.ndarray:
    n = _field(doc, 'num_qubits', int)
    amplitudes = _complex_array(_field(doc, 'amplitudes', list), 'amplitudes')
    if len(amplitudes) != 1 << n:
        raise InvalidDocument(f'{len(amplitudes)} amplitudes for {n} qubits')
    try:
        return linalg.check_normalized(amplitudes)
    except ValueError as ex:
        raise InvalidDocument(str(ex)) from ex


def state_to_dict(amplitudes: np.ndarray) -> dict:
    amplitudes = np.asarray(amplitudes, dtype=complex)
    return {'num_qubits': linalg.num_qubits_for(len(amplitudes)),
            'amplitudes': _pairs(amplitudes)}


def matrix_from_dict(doc: dict) -> np.ndarray:
    n = _field(doc, 'n', int)
    matrix = _matrix(_field(doc, 'rows', list), 'rows')
    if matrix.shape != (1 << n, 1 << n):
        raise InvalidDocument(f'matrix of shape {matrix.shape} for n={n}')
    if not linalg.is_unitary(matrix):
        raise InvalidDocument('matrix is not unitary')
    return matrix


def matrix_to_dict(matrix: np.ndarray) -> dict:
    return {'n': linalg.num_qubits_for(len(matrix)), 'rows': _matrix_rows(matrix)}


def cqsp_spec_from_dict(doc: dict) -> cqsp.CqspSpec:
    k = _field(doc, 'k', int)
    n = _field(doc, 'n', int)
    states = _field(doc, 'states', list)
    parsed = [_complex_array(state, f'states[{i}]') for i, state in enumerate(states)]
    try:
        return cqsp.CqspSpec(k, n, parsed)
    except ValueError as ex:
        raise InvalidDocument(str(ex)) from ex


def cqsp_spec_to_dict(spec: cqsp.CqspSpec) -> dict:
    return {'k': spec.k, 'n': spec.n, 'states': [_pairs(state) for state in spec.states]}


def ucu_spec_from_dict(doc: dict) -> ucg.UcuSpec:
    controls = _field(doc, 'controls', list)
    targets = _field(doc, 'targets', list)
    table = [_matrix(entry, f'table[{x}]') for x, entry in enumerate(_field(doc, 'table', list))]
    try:
        return ucg.UcuSpec(controls, targets, table)
    except ValueError as ex:
        raise InvalidDocument(str(ex)) from ex


def ucu_spec_to_dict(spec: ucg.UcuSpec) -> dict:
    return {'controls': list(spec.controls), 'targets': list(spec.targets),
            'table': [_matrix_rows(entry) for entry in spec.table]}


def circuit_to_dict(c: circuit.Circuit) -> dict:
    gates = []
    for gate in c.gates:
        if isinstance(gate, circuit.Cnot):
            gates.append({'kind': 'cx', 'control': gate.control, 'target': gate.target})
        else:
            gates.append({'kind': 'u', 'target': gate.target,
                          'matrix': _matrix_rows(gate.matrix)})
    return {'num_qubits': c.num_qubits, 'ancillas': sorted(c.ancillas), 'gates': gates}


def circuit_from_dict(doc: dict) -> circuit.Circuit:
    builder = circuit.CircuitBuilder(_field(doc, 'num_qubits', int))
    try:
        for position, gate in enumerate(_field(doc, 'gates', list)):
            kind = _field(gate, 'kind', str)
            if kind == 'cx':
                builder.cx(_field(gate, 'control', int), _field(gate, 'target', int))
            elif kind == 'u':
                builder.u(_field(gate, 'target', int),
                          _matrix(_field(gate, 'matrix', list), f'gates[{position}].matrix'))
            else:
                raise InvalidDocument(f'gate {position} has unknown kind {kind!r}')
        builder.declare_ancillas(doc.get('ancillas', []))
    except circuit.CircuitError as ex:
        raise InvalidDocument(str(ex)) from ex
    return builder.build()


@attr.s(auto_attribs=True)
class MetricsDocument:
    """Contents of the metrics file written next to every synthesized circuit."""

    depth: int
    size: int
    cnot_count: int
    ancilla_count: int
    method: str
    analytic_depth_model: float
    num_qubits: int = 0
    verified: typing.Optional[bool] = None
    lower_bound: typing.Optional[int] = None
    lower_bound_ratio: typing.Optional[float] = None
    timing: dict = attr.Factory(dict)

    @classmethod
    def for_circuit(cls, c: circuit.Circuit, method: str, analytic_depth: float,
                    **extra) -> 'MetricsDocument':
        m = circuit.metrics(c)
        return cls(depth=m.depth, size=m.size, cnot_count=m.cnot_count,
                   ancilla_count=m.ancilla_count, method=method,
                   analytic_depth_model=analytic_depth, num_qubits=c.num_qubits, **extra)

    def to_dict(self) -> dict:
        return attr.asdict(self)


def read_json(path: pathlib.Path) -> typing.Any:
    """Parses a JSON file; syntax errors become InvalidDocument."""

    log.debug('Reading %s', path)
    try:
        with path.open(encoding='utf8') as infile:
            return json.load(infile)
    except json.JSONDecodeError as ex:
        raise InvalidDocument(f'{path}: {ex}') from ex


def write_json(path: pathlib.Path, payload: typing.Any) -> None:
    tmpname = path.with_name(path.name + '~')
    with tmpname.open('w', encoding='utf8') as outfile:
        json.dump(payload, outfile, cls=json_encoder.JSONEncoder, indent=1)
    tmpname.replace(path)
    log.info('Wrote %s', path)


def load_state(path: pathlib.Path) -> simulator.StateVector:
    return simulator.StateVector.from_amplitudes(state_from_dict(read_json(path)))


def load_matrix(path: pathlib.Path) -> np.ndarray:
    return matrix_from_dict(read_json(path))


def load_cqsp_spec(path: pathlib.Path) -> cqsp.CqspSpec:
    return cqsp_spec_from_dict(read_json(path))


def load_circuit(path: pathlib.Path) -> circuit.Circuit:
    return circuit_from_dict(read_json(path))


def save_circuit(path: pathlib.Path, c: circuit.Circuit) -> None:
    write_json(path, circuit_to_dict(c))
