"""Controlled quantum state preparation.

Index qubits 0..k-1 hold i, the n target qubits k..k+n-1 receive |psi_i>, and
ancillas follow the targets. Every method here uses that layout.
"""

import logging
import math
import typing

import attr
import numpy as np

from . import circuit, linalg, qsp, ucg

AUTO = 'auto'
CASE1 = 'case1'
CONTROLLED_LAYERS = 'controlled_layers'
TWO_STAGE = 'two_stage'
METHODS = (AUTO, CASE1, CONTROLLED_LAYERS, TWO_STAGE)

log = logging.getLogger(__name__)


def _state_table(value) -> np.ndarray:
    states = np.array(value, dtype=complex)
    states.setflags(write=False)
    return states


@attr.s(frozen=True)
class CqspSpec:
    """2^k normalized n-qubit states, row i prepared when the index register holds i."""

    k = attr.ib(validator=attr.validators.instance_of(int))
    n = attr.ib(validator=attr.validators.instance_of(int))
    states = attr.ib(converter=_state_table, repr=False)

    @states.validator
    def _check_states(self, attribute, value):
        if self.k < 0 or self.n < 1:
            raise ValueError(f'need k >= 0 and n >= 1, got k={self.k}, n={self.n}')
        if value.shape != (1 << self.k, 1 << self.n):
            raise ValueError(f'expected {1 << self.k} states of {1 << self.n} amplitudes, '
                             f'got shape {value.shape}')
        for i, state in enumerate(value):
            linalg.check_normalized(state, what=f'state {i}')

    @classmethod
    def from_states(cls, states) -> 'CqspSpec':
        states = _state_table(states)
        if states.ndim != 2:
            raise ValueError('states must be a list of amplitude vectors')
        k = linalg.num_qubits_for(states.shape[0])
        n = linalg.num_qubits_for(states.shape[1])
        return cls(k, n, states)

    @property
    def index_qubits(self) -> typing.List[int]:
        return list(range(self.k))

    @property
    def target_qubits(self) -> typing.List[int]:
        return list(range(self.k, self.k + self.n))


def analytic_depth(k: int, n: int, m: int) -> float:
    """Depth shape n + k + 2^(n+k) / (n + k + m)."""
    return n + k + 2 ** (n + k) / (n + k + m)


def build_cqsp_case1(spec: CqspSpec, m: int = 0) -> circuit.Circuit:
    """n UCGs; level i targets qubit k + i and is controlled by every qubit below it."""

    trees = [linalg.amplitude_tree(state) for state in spec.states]
    builder = circuit.CircuitBuilder(spec.k + spec.n)
    ucg.emit_ucg_cascade(builder, qsp.cascade_levels(trees, spec.k, spec.n))
    log.debug('CQSP cascade k=%d n=%d: %d gates, budget %d unused',
              spec.k, spec.n, len(builder), m)
    return builder.build()


def layer_constant(n: int) -> float:
    return qsp.layer_constant(n)


def max_layer_width(n: int) -> int:
    return max(qsp.layer_widths(n))


def controlled_layers_requirement(k: int, n: int) -> int:
    """Tree-register ancillas plus k copy qubits per target of the widest layer."""
    return qsp.rosenthal_requirement(n) + max_layer_width(n) * k


def build_cqsp_controlled_layers(spec: CqspSpec, m: int) -> circuit.Circuit:
    """Runs the tree construction with every L layer turned into a multi-target UCU.

    The C circuits do not depend on the state, so they run once, unconditioned.
    """
    k, n = spec.k, spec.n
    needed = controlled_layers_requirement(k, n)
    if m < needed:
        raise circuit.InsufficientAncillas(f'controlled layers for k={k}, n={n} need '
                                           f'{needed} ancillas, budget is {m}')

    layout = qsp.RosenthalLayout(n)
    width = k + n + needed
    to_global = [k + q for q in range(layout.num_qubits)]
    copies = list(range(k + layout.num_qubits, width))

    per_state = [qsp.rosenthal_layers(state, layout) for state in spec.states]
    fixed = {name: circuit.remap(c, to_global, width)
             for name, c in qsp.rosenthal_circuits(n).named()}

    def controlled_layer(r: int) -> circuit.Circuit:
        qubits = [q for q, _ in per_state[0][r]]
        tables = [np.array([layers[r][slot][1] for layers in per_state])
                  for slot in range(len(qubits))]
        return ucg.build_multi_target_ucu(ucg.LayeredTargets(tables), spec.index_qubits,
                                          [k + q for q in qubits],
                                          copies[:len(qubits) * k], num_qubits=width)

    builder = circuit.CircuitBuilder(width)
    with builder.section('L1'):
        builder.extend(controlled_layer(0))
    for name in ("C1'", "C1''"):
        with builder.section(name):
            builder.extend(fixed[name])
    for r, name in enumerate(qsp.LAYER_NAMES[1:], start=1):
        with builder.section(name):
            builder.extend(controlled_layer(r))
        with builder.section(f'C{r + 1}'):
            builder.extend(fixed[f'C{r + 1}'])
    builder.declare_ancillas(range(k + n, width))
    log.debug('CQSP controlled layers k=%d n=%d: %d gates on %d qubits',
              k, n, len(builder), width)
    return builder.build()


def split_width(k: int, n: int) -> int:
    """Target qubits prepared by the first stage: ceil(4 log2(n + k)) - k, at most n."""
    return min(n, math.ceil(4 * math.log2(n + k)) - k)


def marginal_spec(spec: CqspSpec, s: int) -> CqspSpec:
    """States over the top s target qubits: v'_eta = norm of the block eta of v."""

    blocks = spec.states.reshape(1 << spec.k, 1 << s, 1 << (spec.n - s))
    return CqspSpec(spec.k, s, np.linalg.norm(blocks, axis=2).astype(complex))


def conditional_spec(spec: CqspSpec, s: int) -> CqspSpec:
    """States over the low n - s target qubits, indexed by i + 2^k eta.

    A block with no weight gets |0...0>; it is never reached with non-zero amplitude.
    """
    low = spec.n - s
    blocks = spec.states.reshape(1 << spec.k, 1 << s, 1 << low)
    norms = np.linalg.norm(blocks, axis=2)
    states = np.zeros((1 << s, 1 << spec.k, 1 << low), dtype=complex)
    for i in range(1 << spec.k):
        for eta in range(1 << s):
            if norms[i, eta] > linalg.ZERO_NORM:
                states[eta, i] = blocks[i, eta] / norms[i, eta]
            else:
                states[eta, i, 0] = 1.0
    return CqspSpec(spec.k + s, low, states.reshape(-1, 1 << low))


def two_stage_parts(spec: CqspSpec, m: int, s: int) \
        -> typing.Tuple[circuit.Circuit, circuit.Circuit]:
    """Both stages relabelled onto the CqspSpec register layout.

    The first stage writes the top s target qubits. The second stage treats the
    index and those s qubits as its index register and fills the rest.
    """
    k, n = spec.k, spec.n
    low = n - s
    first = build_cqsp(marginal_spec(spec, s), m)
    second = build_cqsp(conditional_spec(spec, s), m)
    width = k + n + max(first.num_qubits - (k + s), second.num_qubits - (k + n))

    index = list(range(k))
    top = list(range(k + low, k + n))
    bottom = list(range(k, k + low))

    def ancillas(count: int) -> typing.List[int]:
        return list(range(k + n, k + n + count))

    first_map = index + top + ancillas(first.num_qubits - (k + s))
    second_map = index + top + bottom + ancillas(second.num_qubits - (k + n))
    return (circuit.remap(first, first_map, width),
            circuit.remap(second, second_map, width))


def build_cqsp_two_stage(spec: CqspSpec, m: int,
                         split: typing.Optional[int] = None) -> circuit.Circuit:
    s = split_width(spec.k, spec.n) if split is None else min(split, spec.n)
    if s <= 0:
        log.debug('two-stage split %d leaves nothing for the first stage, using case1', s)
        return build_cqsp_case1(spec, m)
    if s >= spec.n:
        log.debug('two-stage split covers all %d targets, building in one stage', s)
        return build_cqsp(spec, m, method=_one_stage_method(spec.k, spec.n, m))

    first, second = two_stage_parts(spec, m, s)
    builder = circuit.CircuitBuilder(first.num_qubits)
    with builder.section('stage1'):
        builder.extend(first)
    with builder.section('stage2'):
        builder.extend(second)
    return builder.build()


def _one_stage_method(k: int, n: int, m: int) -> str:
    if m >= controlled_layers_requirement(k, n) and \
            m >= max(2 * layer_constant(n) * n * (1 << n), k * (1 << n)):
        return CONTROLLED_LAYERS
    return CASE1


def dispatch(k: int, n: int, m: int) -> str:
    """Chooses the construction for a budget of m ancillas."""

    method = _one_stage_method(k, n, m)
    if method == CONTROLLED_LAYERS:
        return method
    s = split_width(k, n)
    if 0 < s < n and m >= 2 ** (n + k) / (n + k) ** 2:
        return TWO_STAGE
    return CASE1


def resolve_method(k: int, n: int, m: int, method: str = AUTO) -> str:
    """The construction build_cqsp(spec, m, method) actually runs.

    A two-stage request whose split leaves one of the stages empty is built in
    one stage, and reported as that stage's method.
    """
    if method not in METHODS:
        raise ValueError(f'unknown CQSP method {method!r}')
    chosen = dispatch(k, n, m) if method == AUTO else method
    if chosen == TWO_STAGE:
        s = split_width(k, n)
        if s <= 0:
            return CASE1
        if s >= n:
            return _one_stage_method(k, n, m)
    return chosen


def build_cqsp(spec: CqspSpec, m: int = 0, method: str = AUTO) -> circuit.Circuit:
    chosen = resolve_method(spec.k, spec.n, m, method)
    log.debug('CQSP k=%d n=%d m=%d method %s', spec.k, spec.n, m, chosen)
    if chosen == CONTROLLED_LAYERS:
        return build_cqsp_controlled_layers(spec, m)
    if chosen == TWO_STAGE:
        return build_cqsp_two_stage(spec, m)
    return build_cqsp_case1(spec, m)
