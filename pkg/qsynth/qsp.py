"""Quantum state preparation: UCG cascade and the tree-register construction.

The tree construction loads every conditional amplitude |phi_x> of the
amplitude tree onto its own qubit R_x, writes the leaf reached by walking the
tree into the data register, and then disentangles the tree registers with
Gamma^dagger. It is emitted as C5 L5 C4 L4 C3 L3 C2 L2 C1 L1 where only the
L layers depend on the target state.
"""

import functools
import itertools
import logging
import typing

import attr
import numpy as np

from . import circuit, linalg, primitives, ucg

AUTO = 'auto'
CASCADE = 'cascade'
ROSENTHAL = 'rosenthal'
METHODS = (AUTO, CASCADE, ROSENTHAL)

LAYER_NAMES = ('L1', 'L2', 'L3', 'L4', 'L5')

log = logging.getLogger(__name__)

LayerEntries = typing.Tuple[typing.Tuple[int, np.ndarray], ...]


def analytic_depth(n: int, m: int) -> float:
    """Depth shape n + 2^n / (n + m) of optimal state preparation."""
    return n + 2 ** n / (n + m)


def cascade_levels(trees: typing.Sequence[linalg.AmplitudeTree], k: int,
                   n: int) -> typing.List[ucg.CascadeLevel]:
    """UCG levels preparing trees[i] on qubits k..k+n-1 when qubits 0..k-1 hold i.

    Level l targets qubit k + l and is controlled by every qubit below it; its
    table entry for control value i + 2**k p is the node gate U_(l, p) of tree i.
    """
    if len(trees) != 1 << k:
        raise ValueError(f'{len(trees)} trees for {k} control qubits')
    levels = []
    for level in range(n):
        per_tree = np.array([tree.prep_gates(level) for tree in trees])
        # (index, prefix, 2, 2) -> entry index + 2**k prefix
        table = per_tree.transpose(1, 0, 2, 3).reshape(-1, 2, 2)
        levels.append(ucg.CascadeLevel(controls=range(k + level), target=k + level,
                                       table=table))
    return levels


def build_qsp_cascade(v: np.ndarray, m: int = 0) -> circuit.Circuit:
    """n UCGs of growing size; uses no ancillas whatever the budget m."""

    tree = linalg.amplitude_tree(v)
    builder = circuit.CircuitBuilder(tree.n)
    ucg.emit_ucg_cascade(builder, cascade_levels([tree], 0, tree.n))
    log.debug('QSP cascade on %d qubits: %d gates', tree.n, len(builder))
    return builder.build()


@attr.s(frozen=True)
class LeafAssignment:
    """A bit for every internal node of the depth-n tree, keyed by node label."""

    bits = attr.ib(converter=dict)

    @bits.validator
    def _check_complete(self, attribute, value):
        n = (len(value) + 1).bit_length() - 1
        if len(value) != (1 << n) - 1:
            raise ValueError(f'{len(value)} node bits do not fill a complete tree')
        expected = {linalg.node_label(level, prefix) for level, prefix in linalg.tree_nodes(n)}
        if set(value) != expected:
            raise ValueError('node labels do not match a complete tree')
        if any(bit not in (0, 1) for bit in value.values()):
            raise ValueError('node bits must be 0 or 1')

    @property
    def n(self) -> int:
        return len(self.bits).bit_length()

    @classmethod
    def from_int(cls, n: int, value: int) -> 'LeafAssignment':
        """Bit i of value goes to the i-th node in (level, prefix) order."""

        nodes = linalg.tree_nodes(n)
        return cls({linalg.node_label(*node): (value >> i) & 1 for i, node in enumerate(nodes)})


def leaf_function(z: LeafAssignment) -> str:
    """Walks from the root, at node x going to child x + z_x."""

    node = ''
    for _ in range(z.n):
        node += str(z.bits[node])
    return node


def leaf_function_by_formula(z: LeafAssignment) -> str:
    """Leaf bit j is set iff some t with t_j = 1 has z_{t<i} = t_i for all i <= j."""

    bits = []
    for j in range(1, z.n + 1):
        hit = any(
            all(z.bits[''.join(t[:i - 1])] == int(t[i - 1]) for i in range(1, j + 1))
            for t in (tuple(head) + ('1',) for head in itertools.product('01', repeat=j - 1))
        )
        bits.append('1' if hit else '0')
    return ''.join(bits)


def leaf_index(leaf: str) -> int:
    """Basis index of a leaf, t_j on qubit j - 1."""
    return linalg.node_from_label(leaf)[1]


def u_leaf_scratch_size(n: int) -> int:
    """One-hot path registers for levels 1 .. n-1."""
    return max(0, (1 << n) - 2)


def build_u_leaf(n: int, node_qubits: typing.Mapping[str, int], out_reg: typing.Sequence[int],
                 ancillas: typing.Sequence[int], num_qubits: int = None) -> circuit.Circuit:
    """|z, a> -> |z, a xor leaf(z)>, leaf bit j written to out_reg[j].

    A one-hot register per level marks the node the walk is in; level l + 1 is
    computed from level l and the node bits with Toffolis, the output bits are
    XORed from the right-hand halves, and the one-hot registers are uncomputed.
    """
    nodes = [linalg.node_label(*node) for node in linalg.tree_nodes(n)]
    if sorted(node_qubits) != sorted(nodes):
        raise circuit.LayoutError(f'node qubits do not cover the depth-{n} tree')
    if len(out_reg) != n:
        raise circuit.LayoutError(f'output register has {len(out_reg)} qubits, expected {n}')
    needed = u_leaf_scratch_size(n)
    if len(ancillas) < needed:
        raise circuit.InsufficientAncillas(f'leaf unitary for n={n} needs {needed} '
                                           f'ancillas, got {len(ancillas)}')
    scratch = list(ancillas[:needed])
    circuit.check_disjoint([node_qubits[x] for x in nodes], out_reg, scratch)

    width = num_qubits or 1 + max([*node_qubits.values(), *out_reg, *scratch])
    free = iter(scratch)
    onehot = {(level, prefix): next(free)
              for level in range(1, n) for prefix in range(1 << level)}

    def z(level: int, prefix: int) -> int:
        return node_qubits[linalg.node_label(level, prefix)]

    def toffoli(builder: circuit.CircuitBuilder, a: int, b: int, target: int) -> None:
        builder.extend(primitives.build_nfold_toffoli(
            [a, b], target, mode=primitives.LOG_DEPTH, num_qubits=width))

    compute = circuit.CircuitBuilder(width)
    if n >= 2:
        root = z(0, 0)
        compute.u(onehot[1, 0], linalg.PAULI_X)
        compute.cx(root, onehot[1, 0])
        compute.cx(root, onehot[1, 1])
        for level in range(1, n - 1):
            for prefix in range(1 << level):
                here = onehot[level, prefix]
                left = onehot[level + 1, prefix]
                right = onehot[level + 1, prefix + (1 << level)]
                toffoli(compute, here, z(level, prefix), right)
                compute.cx(here, left)
                compute.cx(right, left)
    path = compute.build()

    builder = circuit.CircuitBuilder(width)
    builder.extend(path)
    builder.cx(z(0, 0), out_reg[0])
    for level in range(1, n - 1):
        for prefix in range(1 << level):
            builder.cx(onehot[level + 1, prefix + (1 << level)], out_reg[level])
    if n >= 2:
        for prefix in range(1 << (n - 1)):
            toffoli(builder, onehot[n - 1, prefix], z(n - 1, prefix), out_reg[n - 1])
    builder.extend(circuit.adjoint(path))
    builder.declare_ancillas(scratch)
    return builder.build()


@attr.s(frozen=True)
class RosenthalLayout:
    """Register layout of the tree construction, a function of n only.

    Data register S is qubits 0..n-1. Then one R_x per node, then per node
    (in level, prefix order) its copy S_x of the data register and its gadget
    ancilla A_x. The leaf unitary borrows its scratch from the S_x/A_x block,
    which is clean while it runs.
    """

    n = attr.ib(validator=attr.validators.instance_of(int))

    @property
    def nodes(self) -> typing.List[str]:
        return [linalg.node_label(*node) for node in linalg.tree_nodes(self.n)]

    @property
    def num_nodes(self) -> int:
        return (1 << self.n) - 1

    @property
    def data(self) -> typing.List[int]:
        return list(range(self.n))

    def r(self, label: str) -> int:
        return self.n + self.nodes.index(label)

    def s_copy(self, label: str) -> typing.List[int]:
        base = self.n + self.num_nodes + self.nodes.index(label) * (self.n + 1)
        return list(range(base, base + self.n))

    def a(self, label: str) -> int:
        return self.s_copy(label)[-1] + 1

    @property
    def num_qubits(self) -> int:
        return self.n + self.num_nodes * (self.n + 2)

    @property
    def ancillas(self) -> typing.List[int]:
        return list(range(self.n, self.num_qubits))

    @property
    def pool(self) -> typing.List[int]:
        return list(range(self.n + self.num_nodes, self.num_qubits))


def rosenthal_requirement(n: int) -> int:
    """Ancillas needed by the tree construction."""
    return RosenthalLayout(n).num_qubits - n


@attr.s(frozen=True)
class RosenthalCircuits:
    """The state-independent circuits C1', C1'', C2 .. C5 on the layout's register."""

    c1_leaf = attr.ib()
    c1_gamma = attr.ib()
    c2 = attr.ib()
    c3 = attr.ib()
    c4 = attr.ib()
    c5 = attr.ib()

    def named(self) -> typing.List[typing.Tuple[str, circuit.Circuit]]:
        return [("C1'", self.c1_leaf), ("C1''", self.c1_gamma), ('C2', self.c2),
                ('C3', self.c3), ('C4', self.c4), ('C5', self.c5)]


@functools.lru_cache(maxsize=None)
def rosenthal_circuits(n: int) -> RosenthalCircuits:
    layout = RosenthalLayout(n)
    width = layout.num_qubits
    nodes = layout.nodes

    node_qubits = {x: layout.r(x) for x in nodes}
    leaf = build_u_leaf(n, node_qubits, layout.data, layout.pool, num_qubits=width)

    copy = primitives.build_copy(n, len(nodes), layout.data,
                                 [layout.s_copy(x) for x in nodes], num_qubits=width)

    # The marker stages and CNOTs of a prefix-controlled gate do not depend on
    # the gate, so the identity stands in for U_x^dagger here.
    parts = {x: primitives.prefix_ctrl_parts(x, layout.s_copy(x), layout.r(x), layout.a(x),
                                             linalg.IDENTITY, num_qubits=width)
             for x in nodes}

    gamma = circuit.CircuitBuilder(width)
    gamma.extend(copy)
    for x in nodes:
        flip = primitives.build_prefix_ctrl_1q(x + '1', layout.s_copy(x), layout.r(x),
                                               layout.a(x), linalg.PAULI_X, num_qubits=width)
        gamma.extend(circuit.adjoint(flip))
    for x in nodes:
        gamma.extend(circuit.adjoint(parts[x].w2))

    cnots = circuit.CircuitBuilder(width)
    for x in nodes:
        cnots.extend(parts[x].cnot)

    unmark = circuit.CircuitBuilder(width)
    for x in nodes:
        unmark.extend(circuit.adjoint(parts[x].w1))

    return RosenthalCircuits(
        c1_leaf=leaf,
        c1_gamma=gamma.build(),
        c2=cnots.build(),
        c3=cnots.build(),
        c4=unmark.build(),
        c5=circuit.adjoint(copy),
    )


def rosenthal_layers(v: np.ndarray, layout: RosenthalLayout) -> typing.List[LayerEntries]:
    """The five state-dependent layers L1 .. L5 as (qubit, gate) entries.

    Every node contributes to every layer, identity or not, so the layer
    positions are the same for all states.
    """
    tree = linalg.amplitude_tree(v)
    if tree.n != layout.n:
        raise circuit.LayoutError(f'{tree.n}-qubit state on a {layout.n}-qubit layout')

    layers: typing.List[typing.List[typing.Tuple[int, np.ndarray]]] = [[] for _ in LAYER_NAMES]
    for level, prefix in linalg.tree_nodes(layout.n):
        x = linalg.node_label(level, prefix)
        prep = tree.prep_gate(level, prefix)
        factors = linalg.axbxc_factor(prep.conj().T)
        layers[0].append((layout.r(x), prep))
        layers[1].append((layout.r(x), factors.a.conj().T))
        layers[1].append((layout.a(x), linalg.phase_gate(-factors.alpha)))
        layers[2].append((layout.r(x), factors.b.conj().T))
        layers[3].append((layout.r(x), factors.c.conj().T))
        layers[4].append((layout.r(x), prep.conj().T))
    return [tuple(layer) for layer in layers]


def layer_widths(n: int) -> typing.Tuple[int, ...]:
    """Gates per layer as rosenthal_layers() emits them: one per tree register,
    plus one per gadget ancilla in L2.
    """
    nodes = RosenthalLayout(n).num_nodes
    return nodes, 2 * nodes, nodes, nodes, nodes


def layer_constant(n: int) -> float:
    """c in s_r <= c 2^n, measured from the layer widths of the plan."""
    return max(layer_widths(n)) / (1 << n)


@attr.s(frozen=True)
class RosenthalPlan:
    layout = attr.ib(validator=attr.validators.instance_of(RosenthalLayout))
    circuits = attr.ib(validator=attr.validators.instance_of(RosenthalCircuits))
    layers = attr.ib(repr=False)

    @classmethod
    def for_state(cls, v: np.ndarray) -> 'RosenthalPlan':
        n = linalg.num_qubits_for(len(v))
        layout = RosenthalLayout(n)
        return cls(layout, rosenthal_circuits(n), rosenthal_layers(v, layout))

    def layer_constant(self) -> float:
        return max(len(layer) for layer in self.layers) / (1 << self.layout.n)


def _emit_layer(builder: circuit.CircuitBuilder, name: str, entries: LayerEntries) -> None:
    with builder.section(name):
        for qubit, gate in entries:
            builder.u(qubit, gate)


def build_gamma_dagger(v: np.ndarray, plan: RosenthalPlan) -> circuit.Circuit:
    """C5 L5 C4 L4 C3 L3 C2 L2 C1'' on the plan's layout."""

    layers = rosenthal_layers(v, plan.layout)
    c = plan.circuits
    builder = circuit.CircuitBuilder(plan.layout.num_qubits)
    with builder.section("C1''"):
        builder.extend(c.c1_gamma)
    for name, entries, fixed in zip(LAYER_NAMES[1:], layers[1:],
                                    [('C2', c.c2), ('C3', c.c3), ('C4', c.c4), ('C5', c.c5)]):
        _emit_layer(builder, name, entries)
        with builder.section(fixed[0]):
            builder.extend(fixed[1])
    builder.declare_ancillas(plan.layout.ancillas)
    return builder.build()


def build_qsp_rosenthal(v: np.ndarray, m: int) -> circuit.Circuit:
    """Loads the tree onto R, writes the walked leaf into S, then applies Gamma^dagger."""

    plan = RosenthalPlan.for_state(v)
    needed = rosenthal_requirement(plan.layout.n)
    if m < needed:
        raise circuit.InsufficientAncillas(f'tree construction for n={plan.layout.n} needs '
                                           f'{needed} ancillas, budget is {m}')

    builder = circuit.CircuitBuilder(plan.layout.num_qubits)
    _emit_layer(builder, 'L1', plan.layers[0])
    with builder.section("C1'"):
        builder.extend(plan.circuits.c1_leaf)
    builder.extend(build_gamma_dagger(v, plan))
    builder.declare_ancillas(plan.layout.ancillas)
    log.debug('Tree QSP on %d qubits: %d gates over %d qubits',
              plan.layout.n, len(builder), plan.layout.num_qubits)
    return builder.build()


def select_method(n: int, m: int, method: str = AUTO) -> str:
    """The tree construction runs only when m covers its layout."""

    if method not in METHODS:
        raise ValueError(f'unknown QSP method {method!r}')
    if method != AUTO:
        return method
    return ROSENTHAL if m >= rosenthal_requirement(n) else CASCADE


def build_qsp(v: np.ndarray, m: int = 0, method: str = AUTO) -> circuit.Circuit:
    n = linalg.num_qubits_for(len(v))
    chosen = select_method(n, m, method)
    log.debug('QSP n=%d m=%d method %s', n, m, chosen)
    if chosen == ROSENTHAL:
        return build_qsp_rosenthal(v, m)
    return build_qsp_cascade(v, m)


def expected_gamma_image(v: np.ndarray, t: int) -> np.ndarray:
    """Tree-register part of Gamma |t>|0>: |t_i> on path nodes, |phi_x> elsewhere.

    Returns the amplitudes over R in node order (node i on bit i).
    """
    tree = linalg.amplitude_tree(v)
    state = np.ones(1, dtype=complex)
    for level, prefix in linalg.tree_nodes(tree.n):
        if t & ((1 << level) - 1) == prefix:
            bit = (t >> level) & 1
            local = np.array([1.0 - bit, bit], dtype=complex)
        else:
            local = np.array(tree.phi(level, prefix))
        state = np.kron(local, state)
    return state


