"""Uniformly controlled gates and unitaries.

Control value x of a table reads bit j from controls[j]. The UCG kernel splits
on the highest control with demultiplex(), leaving a diagonal that is either
synthesized as a phase multiplexor or, inside a cascade, merged into the next
gate's table.
"""

import logging
import typing

import attr
import numpy as np

from . import attrs_extra, circuit, linalg, primitives

# Gate list entries produced by the kernel: a 2x2 matrix on the target, or the
# position of the control driving a CNOT onto the target.
KernelOp = typing.Union[np.ndarray, int]

log = logging.getLogger(__name__)


def _stack_unitaries(value) -> np.ndarray:
    table = np.array(value, dtype=complex)
    table.setflags(write=False)
    return table


@attr.s(frozen=True)
class UcuSpec:
    """sum_x |x><x|_controls (x) table[x]_targets"""

    controls = attr.ib(converter=attrs_extra.qubit_tuple, validator=attrs_extra.distinct_qubits)
    targets = attr.ib(converter=attrs_extra.qubit_tuple, validator=attrs_extra.distinct_qubits)
    table = attr.ib(converter=_stack_unitaries, repr=False)

    def __attrs_post_init__(self):
        circuit.check_disjoint(self.controls, self.targets)
        dimension = 1 << len(self.targets)
        expected = (1 << len(self.controls), dimension, dimension)
        if self.table.shape != expected:
            raise ValueError(f'table has shape {self.table.shape}, expected {expected}')
        for x, entry in enumerate(self.table):
            if not linalg.is_unitary(entry):
                raise ValueError(f'table entry {x} is not unitary')

    def matrix(self) -> np.ndarray:
        """Operator on controls + targets, controls as the low bits."""

        k = len(self.controls)
        dimension = 1 << (k + len(self.targets))
        result = np.zeros((dimension, dimension), dtype=complex)
        for x, entry in enumerate(self.table):
            rows = x + (np.arange(entry.shape[0]) << k)
            result[np.ix_(rows, rows)] = entry
        return result


@attr.s(frozen=True)
class LayeredTargets:
    """One single-qubit table per target, each indexed by the control value."""

    tables = attr.ib(converter=lambda value: tuple(_stack_unitaries(t) for t in value),
                     repr=False)

    def __attrs_post_init__(self):
        if not self.tables:
            return
        rows = self.tables[0].shape[0]
        if rows & (rows - 1):
            raise ValueError(f'table length {rows} is not a power of two')
        for i, table in enumerate(self.tables):
            if table.shape != (rows, 2, 2):
                raise ValueError(f'table {i} has shape {table.shape}, expected {(rows, 2, 2)}')
            for x, entry in enumerate(table):
                if not linalg.is_unitary(entry):
                    raise ValueError(f'table {i} entry {x} is not unitary')

    @property
    def p(self) -> int:
        return len(self.tables)

    @property
    def q(self) -> int:
        return self.tables[0].shape[0].bit_length() - 1 if self.tables else 0


@attr.s(frozen=True)
class CnotPlacement:
    """CNOT between two targets, present in W^x exactly for the control values in `when`."""

    control = attr.ib(validator=attr.validators.instance_of(int))
    target = attr.ib(validator=attr.validators.instance_of(int))
    when = attr.ib(converter=frozenset)


@attr.s(frozen=True)
class UcuLayer:
    """One layer of the W^x circuits: per-target 1q tables plus CNOT placements."""

    gates = attr.ib(converter=lambda value: {int(i): _stack_unitaries(t)
                                             for i, t in dict(value).items()},
                    factory=dict, repr=False)
    cnots = attr.ib(converter=tuple, factory=tuple)

    def __attrs_post_init__(self):
        support: typing.List[int] = list(self.gates)
        for placement in self.cnots:
            support.extend([placement.control, placement.target])
        circuit.check_disjoint(support)


def gray_code(i: int) -> int:
    return i ^ (i >> 1)


def _parity_matrix(num_controls: int) -> np.ndarray:
    """M[x, i] = (-1)^popcount(x & gray(i))"""

    size = 1 << num_controls
    overlap = np.arange(size)[:, np.newaxis] & gray_code(np.arange(size))[np.newaxis, :]
    parity = np.zeros_like(overlap)
    for bit in range(num_controls):
        parity ^= (overlap >> bit) & 1
    return 1 - 2 * parity


def emit_rotation_multiplexor(builder: circuit.CircuitBuilder, axis: str,
                              angles: np.ndarray, controls: typing.Sequence[int],
                              target: int) -> None:
    """Applies R_axis(angles[x]) to target when the controls hold x.

    Gray-code sequence of 2**c rotations, each followed by a CNOT from the control
    whose bit changes between consecutive code words.
    """
    rotation = {'y': linalg.ry, 'z': linalg.rz}[axis]
    angles = np.asarray(angles, dtype=float)
    c = len(controls)
    if len(angles) != 1 << c:
        raise ValueError(f'{len(angles)} angles for {c} controls')
    if c == 0:
        builder.u(target, rotation(angles[0]))
        return

    transformed = _parity_matrix(c).T @ angles / (1 << c)
    for i, angle in enumerate(transformed):
        builder.u(target, rotation(angle))
        if i == len(transformed) - 1:
            changed = c - 1
        else:
            changed = (gray_code(i) ^ gray_code(i + 1)).bit_length() - 1
        builder.cx(controls[changed], target)


def emit_diagonal(builder: circuit.CircuitBuilder, phases: np.ndarray,
                  qubits: typing.Sequence[int]) -> None:
    """Applies diag(e^{i phases}) to qubits, phase index bit j read from qubits[j].

    Peels the highest qubit off as an Rz multiplexor and recurses on the averaged
    phases; the last qubit gets a single diagonal gate, which carries the global phase.
    """
    phases = np.asarray(phases, dtype=float)
    qubits = list(qubits)
    if len(phases) != 1 << len(qubits):
        raise ValueError(f'{len(phases)} phases for {len(qubits)} qubits')

    while len(qubits) > 1:
        half = len(phases) // 2
        low, high = phases[:half], phases[half:]
        emit_rotation_multiplexor(builder, 'z', high - low, qubits[:-1], qubits[-1])
        phases = (low + high) / 2
        qubits = qubits[:-1]
    builder.u(qubits[0], np.diag(np.exp(1j * phases)))


def _split_pair(u0: np.ndarray, u1: np.ndarray) \
        -> typing.Tuple[typing.Tuple[float, float], np.ndarray, np.ndarray]:
    """Finds phases, b and a with u0 = P b a and u1 = P^dagger b X a, P = diag(e^{i phi}).

    The phases make P u1 u0^dagger P Hermitian with zero trace, so its
    demultiplexed square D^2 is diag(+1, -1) up to the order of the entries.
    """
    w = u1 @ u0.conj().T
    omega = np.angle(np.linalg.det(w)) / 2
    corner = np.angle((w * np.exp(-1j * omega))[0, 0])
    phi0 = -(omega + corner) / 2
    phi1 = (np.pi - omega + corner) / 2
    p = np.diag(np.exp(1j * np.array([phi0, phi1])))

    left, phases, right = linalg.demultiplex(p @ u1, p.conj().T @ u0)
    swap = linalg.IDENTITY if (phases[0] ** 2).real > 0 else linalg.PAULI_X
    h = linalg.HADAMARD
    b = left @ np.diag(phases.conj()) @ swap @ h
    a = h @ swap @ right
    return (phi0, phi1), b, a


def decompose(table: np.ndarray) -> typing.Tuple[typing.List[KernelOp], np.ndarray]:
    """Returns (ops, diag) with UCG(table) = diag(diag) . ops.

    ops are in application order; diag is indexed by x + 2**k t over the
    controls followed by the target. The op list has 2**k gates and
    2**k - 1 CNOTs.
    """
    table = np.asarray(table, dtype=complex)
    if len(table) == 1:
        return [table[0]], np.ones(2, dtype=complex)

    half = len(table) // 2
    k = half.bit_length()
    h = linalg.HADAMARD

    phis = np.zeros((half, 2))
    b_table = np.zeros((half, 2, 2), dtype=complex)
    a_table = np.zeros((half, 2, 2), dtype=complex)
    for r in range(half):
        phis[r], b_table[r], a_table[r] = _split_pair(table[r], table[r + half])

    # The CNOT is written as H CZ H: the CZ commutes with the diagonal left by the
    # a-side and the Hadamards are folded into the neighbouring gates.
    ops_a, diag_a = decompose(h @ a_table)
    ops_a[-1] = h @ ops_a[-1]

    d_a = np.zeros((half, 2, 2), dtype=complex)
    d_a[:, 0, 0] = diag_a[:half]
    d_a[:, 1, 1] = diag_a[half:]
    ops_b, diag_b = decompose(b_table @ h @ d_a @ h)

    diag = np.zeros(2 * len(table), dtype=complex)
    for t in range(2):
        for c in range(2):
            sign = 1 if c == 0 else -1
            positions = np.arange(half) + half * c + len(table) * t
            diag[positions] = np.exp(1j * sign * phis[:, t]) * diag_b[np.arange(half) + half * t]
    return ops_a + [k - 1] + ops_b, diag


def _emit_ops(builder: circuit.CircuitBuilder, ops: typing.List[KernelOp],
              controls: typing.Sequence[int], target: int) -> None:
    for op in ops:
        if isinstance(op, int):
            builder.cx(controls[op], target)
        else:
            builder.u(target, linalg.nearest_unitary(op))


def build_ucg(spec: UcuSpec, m: int = 0, num_qubits: int = None) -> circuit.Circuit:
    """Uniformly controlled single-qubit gate, exact including global phase.

    Uses no ancillas; the budget m is accepted for interface symmetry with the
    other builders.
    """
    if len(spec.targets) != 1:
        raise ValueError(f'a UCG has one target, got {len(spec.targets)}')
    target = spec.targets[0]
    controls = list(spec.controls)
    builder = circuit.CircuitBuilder(num_qubits or 1 + max(controls + [target]))

    if not controls:
        builder.u(target, spec.table[0])
        return builder.build()

    ops, diag = decompose(spec.table)
    _emit_ops(builder, ops, controls, target)
    emit_diagonal(builder, np.angle(diag), controls + [target])
    log.debug('UCG with %d controls on qubit %d: %d gates (budget %d unused)',
              len(controls), target, len(builder), m)
    return builder.build()


@attr.s(frozen=True)
class CascadeLevel:
    controls = attr.ib(converter=attrs_extra.qubit_tuple)
    target = attr.ib(converter=int)
    table = attr.ib(repr=False)


def emit_ucg_cascade(builder: circuit.CircuitBuilder,
                     levels: typing.Sequence[CascadeLevel]) -> None:
    """UCGs applied one after the other, each controlled by all qubits before it.

    Level l + 1 must be controlled by exactly the controls and target of level l,
    so the diagonal left by level l acts on its controls only and is absorbed
    into its table. Only the last level's diagonal is synthesized.
    """
    pending: typing.Optional[typing.Tuple[typing.List[int], np.ndarray]] = None
    for level in levels:
        table = np.asarray(level.table, dtype=complex)
        if pending is not None:
            qubits, diag = pending
            if qubits != list(level.controls):
                raise circuit.LayoutError(f'cascade level on {level.target} is controlled by '
                                          f'{list(level.controls)}, expected {qubits}')
            table = table * diag[:, np.newaxis, np.newaxis]
        elif len(table) != 1 << len(level.controls):
            raise ValueError(f'table of {len(table)} entries for {len(level.controls)} controls')

        ops, diag = decompose(table)
        _emit_ops(builder, ops, level.controls, level.target)
        pending = list(level.controls) + [level.target], diag

    if pending is not None and not np.allclose(pending[1], 1.0, rtol=0.0, atol=1e-14):
        emit_diagonal(builder, np.angle(pending[1]), pending[0])


def build_multi_target_ucu(lt: LayeredTargets, ctrl: typing.Sequence[int],
                           targets: typing.Sequence[int], ancillas: typing.Sequence[int],
                           num_qubits: int = None) -> circuit.Circuit:
    """sum_x |x><x| (x) (tensor_i U_i^x) via p copies of the control register.

    Target i is driven by its own copy R_i; the ancillas beyond the p*q copy
    qubits are split evenly among the p UCGs.
    """
    ctrl, targets, ancillas = list(ctrl), list(targets), list(ancillas)
    q, p = len(ctrl), len(targets)
    if lt.p != p or (p and lt.q != q):
        raise ValueError(f'tables for {lt.p} targets and {lt.q} controls, '
                         f'registers have {p} targets and {q} controls')
    circuit.check_disjoint(ctrl, targets, ancillas)
    builder = circuit.CircuitBuilder(num_qubits or 1 + max(ctrl + targets + ancillas))

    if q == 0:
        for target, table in zip(targets, lt.tables):
            builder.u(target, table[0])
        return builder.build()

    if len(ancillas) < p * q:
        raise circuit.InsufficientAncillas(f'{p} targets with {q} controls need {p * q} '
                                           f'ancillas, got {len(ancillas)}')
    registers = [ancillas[i * q:(i + 1) * q] for i in range(p)]
    share = (len(ancillas) - p * q) // p if p else 0

    copy = primitives.build_copy(q, p, ctrl, registers, builder.num_qubits)
    builder.extend(copy)
    for register, target, table in zip(registers, targets, lt.tables):
        spec = UcuSpec(register, [target], table)
        builder.extend(build_ucg(spec, m=share, num_qubits=builder.num_qubits))
    builder.extend(circuit.adjoint(copy))
    builder.declare_ancillas(ancillas[:p * q])
    return builder.build()


def build_layered_ucu(layers: typing.Sequence[UcuLayer], ctrl: typing.Sequence[int],
                      targets: typing.Sequence[int], ancillas: typing.Sequence[int],
                      num_qubits: int = None) -> circuit.Circuit:
    """sum_x |x><x| (x) W^x for a layered circuit W^x.

    Single-qubit tables become parallel UCGs driven by per-target copies of the
    control register; a CNOT placed only for some control values becomes one
    (q+1)-fold Toffoli per value, controlled by the copy owned by its target.
    """
    ctrl, targets, ancillas = list(ctrl), list(targets), list(ancillas)
    q, p = len(ctrl), len(targets)
    circuit.check_disjoint(ctrl, targets, ancillas)
    if len(ancillas) < p * q:
        raise circuit.InsufficientAncillas(f'{p} targets with {q} controls need {p * q} '
                                           f'ancillas, got {len(ancillas)}')
    builder = circuit.CircuitBuilder(num_qubits or 1 + max(ctrl + targets + ancillas))
    registers = [ancillas[i * q:(i + 1) * q] for i in range(p)]
    spare = ancillas[p * q:]

    copy = primitives.build_copy(q, p, ctrl, registers, builder.num_qubits) if q else None
    if copy is not None:
        builder.extend(copy)

    for depth, layer in enumerate(layers):
        for i, table in sorted(layer.gates.items()):
            if table.shape != (1 << q, 2, 2):
                raise ValueError(f'layer {depth} table for target {i} has shape {table.shape}')
            if q == 0:
                builder.u(targets[i], table[0])
                continue
            spec = UcuSpec(registers[i], [targets[i]], table)
            builder.extend(build_ucg(spec, num_qubits=builder.num_qubits))

        share = len(spare) // max(1, len(layer.cnots))
        for j, placement in enumerate(layer.cnots):
            control, target = targets[placement.control], targets[placement.target]
            values = sorted(placement.when)
            if any(not 0 <= x < 1 << q for x in values):
                raise ValueError(f'layer {depth} CNOT has control values out of range: {values}')
            if len(values) == 1 << q:
                builder.cx(control, target)
                continue

            local = registers[placement.target]
            scratch = spare[j * share:(j + 1) * share]
            mode = primitives.LOG_DEPTH if len(scratch) >= q - 1 else primitives.NO_ANCILLA
            toffoli = primitives.build_nfold_toffoli(
                local + [control], target, scratch if mode == primitives.LOG_DEPTH else (),
                mode=mode, num_qubits=builder.num_qubits)
            for x in values:
                frame = [local[b] for b in range(q) if not (x >> b) & 1]
                for qubit in frame:
                    builder.u(qubit, linalg.PAULI_X)
                builder.extend(toffoli)
                for qubit in frame:
                    builder.u(qubit, linalg.PAULI_X)

    if copy is not None:
        builder.extend(circuit.adjoint(copy))
    builder.declare_ancillas(ancillas[:p * q])
    return builder.build()
