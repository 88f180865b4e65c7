"""Reusable sub-circuits: fan-out copy, n-fold Toffoli, prefix-controlled gadget."""

import logging
import math
import typing

import attr
import numpy as np

from . import circuit, linalg

NO_ANCILLA = 'no_ancilla'
LOG_DEPTH = 'log_depth'
TOFFOLI_MODES = (NO_ANCILLA, LOG_DEPTH)

T_GATE = linalg.phase_gate(math.pi / 4)
T_DAGGER = linalg.phase_gate(-math.pi / 4)

log = logging.getLogger(__name__)

Register = typing.Sequence[int]


def _width(*registers: typing.Iterable[int]) -> int:
    return 1 + max((q for register in registers for q in register), default=-1)


def build_copy(n: int, m: int, src: Register, dsts: typing.Sequence[Register],
               num_qubits: int = None) -> circuit.Circuit:
    """CNOT doubling tree writing m copies of the n-qubit register src.

    Every round, each register that already holds the value copies it into a
    fresh one, so ceil(log2(m + 1)) rounds suffice.
    """
    if len(dsts) != m:
        raise circuit.LayoutError(f'expected {m} destination registers, got {len(dsts)}')
    for register in [src, *dsts]:
        if len(register) != n:
            raise circuit.LayoutError(f'register {list(register)} is not {n} qubits wide')
    circuit.check_disjoint(src, *dsts)

    builder = circuit.CircuitBuilder(num_qubits or _width(src, *dsts))
    holders = [src]
    pending = list(dsts)
    while pending:
        fresh = pending[:len(holders)]
        pending = pending[len(holders):]
        for source, dest in zip(holders, fresh):
            for a, b in zip(source, dest):
                builder.cx(a, b)
        holders.extend(fresh)
    return builder.build()


def _emit_toffoli(builder: circuit.CircuitBuilder, a: int, b: int, target: int) -> None:
    """Exact CCX over {H, T, T^dagger, CNOT}."""

    h = linalg.HADAMARD
    builder.u(target, h)
    builder.cx(b, target)
    builder.u(target, T_DAGGER)
    builder.cx(a, target)
    builder.u(target, T_GATE)
    builder.cx(b, target)
    builder.u(target, T_DAGGER)
    builder.cx(a, target)
    builder.u(b, T_GATE)
    builder.u(target, T_GATE)
    builder.u(target, h)
    builder.cx(a, b)
    builder.u(a, T_GATE)
    builder.u(b, T_DAGGER)
    builder.cx(a, b)


def _emit_controlled_phase(builder: circuit.CircuitBuilder, a: int, b: int,
                           angle: float) -> None:
    """diag(1, 1, 1, e^{i angle}) on (a, b)."""

    builder.u(a, linalg.phase_gate(angle / 2))
    builder.cx(a, b)
    builder.u(b, linalg.phase_gate(-angle / 2))
    builder.cx(a, b)
    builder.u(b, linalg.phase_gate(angle / 2))


def _emit_gray_code_toffoli(builder: circuit.CircuitBuilder, controls: Register,
                            target: int) -> None:
    """Multi-controlled X without ancillas.

    The target is conjugated by H around a multi-controlled Z, which is written as
    a sum of parity phases: pi * prod(c) = sum over non-empty subsets S of
    (-1)^(|S|-1) pi/2^(k-1) * parity_S(c). Subsets are visited in Gray-code order,
    the running parity lives on the highest control of the subset, and the last
    subset is a single control so every control ends up restored.
    """
    k = len(controls)
    angle = math.pi / (1 << (k - 1))

    builder.u(target, linalg.HADAMARD)
    previous = 0
    for step in range(1, 1 << k):
        gray = step ^ (step >> 1)
        lead = gray.bit_length() - 1
        if previous:
            changed = (gray ^ previous).bit_length() - 1
            if changed != lead:
                builder.cx(controls[changed], controls[lead])
            else:
                for j in range(lead):
                    if (gray >> j) & 1:
                        builder.cx(controls[j], controls[lead])
        sign = 1 if bin(gray).count('1') % 2 else -1
        _emit_controlled_phase(builder, controls[lead], target, sign * angle)
        previous = gray
    builder.u(target, linalg.HADAMARD)


def build_nfold_toffoli(controls: Register, target: int, ancillas: Register = (),
                        mode: str = NO_ANCILLA, num_qubits: int = None) -> circuit.Circuit:
    """|x, b> -> |x, b xor prod(x)> on basis states.

    log_depth computes a balanced AND-tree into ancillas, flips the target from
    the two remaining wires and uncomputes the tree; it needs len(controls) - 2
    clean ancillas.
    """
    if mode not in TOFFOLI_MODES:
        raise ValueError(f'unknown Toffoli mode {mode!r}')
    controls = list(controls)
    ancillas = list(ancillas)
    circuit.check_disjoint(controls, [target], ancillas)

    k = len(controls)
    builder = circuit.CircuitBuilder(num_qubits or _width(controls, [target], ancillas))

    if k == 0:
        builder.u(target, linalg.PAULI_X)
    elif k == 1:
        builder.cx(controls[0], target)
    elif k == 2:
        _emit_toffoli(builder, controls[0], controls[1], target)
    elif mode == NO_ANCILLA:
        _emit_gray_code_toffoli(builder, controls, target)
    else:
        if len(ancillas) < k - 2:
            raise circuit.InsufficientAncillas(
                f'log-depth {k}-fold Toffoli needs {k - 2} ancillas, got {len(ancillas)}')
        compute = circuit.CircuitBuilder(builder.num_qubits)
        wires = controls
        free = iter(ancillas)
        used = []
        while len(wires) > 2:
            merged = []
            for a, b in zip(wires[::2], wires[1::2]):
                scratch = next(free)
                _emit_toffoli(compute, a, b, scratch)
                merged.append(scratch)
                used.append(scratch)
            if len(wires) % 2:
                merged.append(wires[-1])
            wires = merged

        tree = compute.build()
        builder.extend(tree)
        _emit_toffoli(builder, wires[0], wires[1], target)
        builder.extend(circuit.adjoint(tree))
        builder.declare_ancillas(used)

    return builder.build()


def _x_frame(builder: circuit.CircuitBuilder, prefix: str, ctrl_reg: Register) -> None:
    for bit, q in zip(prefix, ctrl_reg):
        if bit == '0':
            builder.u(q, linalg.PAULI_X)


@attr.s(frozen=True)
class PrefixControlParts:
    """The stages of a prefix-controlled gate, in application order.

    w1 marks the ancilla when the prefix matches, d1/d2/d3 are the C, B and
    A + R(alpha) layers, cnot is the ancilla-controlled CNOT between them and w2
    unmarks the ancilla. Only d1, d2 and d3 depend on the gate V.
    """

    w1 = attr.ib(validator=attr.validators.instance_of(circuit.Circuit))
    d1 = attr.ib(validator=attr.validators.instance_of(circuit.Circuit))
    cnot = attr.ib(validator=attr.validators.instance_of(circuit.Circuit))
    d2 = attr.ib(validator=attr.validators.instance_of(circuit.Circuit))
    d3 = attr.ib(validator=attr.validators.instance_of(circuit.Circuit))
    w2 = attr.ib(validator=attr.validators.instance_of(circuit.Circuit))

    def stages(self) -> typing.List[circuit.Circuit]:
        return [self.w1, self.d1, self.cnot, self.d2, self.cnot, self.d3, self.w2]

    def assemble(self) -> circuit.Circuit:
        builder = circuit.CircuitBuilder(self.w1.num_qubits)
        for stage in self.stages():
            builder.extend(stage)
        return builder.build()


def prefix_ctrl_parts(prefix: str, ctrl_reg: Register, target: int, ancilla: int,
                      v: np.ndarray, num_qubits: int = None,
                      scratch: Register = ()) -> PrefixControlParts:
    if any(bit not in '01' for bit in prefix):
        raise ValueError(f'prefix must be a bit string, got {prefix!r}')
    if len(prefix) > len(ctrl_reg):
        raise circuit.LayoutError(f'prefix of length {len(prefix)} on a '
                                  f'{len(ctrl_reg)}-qubit register')
    controls = list(ctrl_reg[:len(prefix)])
    circuit.check_disjoint(ctrl_reg, [target], [ancilla], scratch)
    width = num_qubits or _width(ctrl_reg, [target, ancilla], scratch)
    factors = linalg.axbxc_factor(v)

    mode = LOG_DEPTH if len(scratch) >= len(controls) - 2 > 0 else NO_ANCILLA
    marker = build_nfold_toffoli(controls, ancilla, scratch if mode == LOG_DEPTH else (),
                                 mode=mode, num_qubits=width)

    w1 = circuit.CircuitBuilder(width)
    _x_frame(w1, prefix, ctrl_reg)
    w1.extend(marker)
    w1.declare_ancillas([ancilla])

    w2 = circuit.CircuitBuilder(width)
    w2.extend(marker)
    _x_frame(w2, prefix, ctrl_reg)
    w2.declare_ancillas([ancilla])

    d1 = circuit.CircuitBuilder(width)
    d1.u(target, factors.c)
    cnot = circuit.CircuitBuilder(width)
    cnot.cx(ancilla, target)
    d2 = circuit.CircuitBuilder(width)
    d2.u(target, factors.b)
    d3 = circuit.CircuitBuilder(width)
    d3.u(target, factors.a)
    d3.u(ancilla, linalg.phase_gate(factors.alpha))

    return PrefixControlParts(w1=w1.build(), d1=d1.build(), cnot=cnot.build(),
                              d2=d2.build(), d3=d3.build(), w2=w2.build())


def build_prefix_ctrl_1q(prefix: str, ctrl_reg: Register, target: int, ancilla: int,
                         v: np.ndarray, num_qubits: int = None,
                         scratch: Register = ()) -> circuit.Circuit:
    """Applies V to target iff the first len(prefix) bits of ctrl_reg equal prefix.

    Bit j of the prefix string is compared with ctrl_reg[j]. An empty prefix
    always matches and yields the plain gate.
    """
    if not prefix:
        builder = circuit.CircuitBuilder(num_qubits or _width(ctrl_reg, [target, ancilla]))
        builder.u(target, v)
        return builder.build()
    return prefix_ctrl_parts(prefix, ctrl_reg, target, ancilla, v,
                             num_qubits=num_qubits, scratch=scratch).assemble()
