"""Numerical kernels.

Single-qubit factorizations, the cosine-sine decomposition, demultiplexing of
block-diagonal unitaries and the amplitude tree that drives state preparation.
"""

import cmath
import logging
import math
import typing

import attr
import numpy as np
import scipy.linalg

NORM_TOLERANCE = 1e-10
CLUSTER_TOLERANCE = 1e-8

# Tree nodes whose norm is below this are treated as empty.
ZERO_NORM = 1e-14

IDENTITY = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)

log = logging.getLogger(__name__)


class DecompositionError(ValueError):
    """Raised when a matrix or vector cannot be decomposed as requested."""


def is_unitary(matrix: np.ndarray, atol: float = NORM_TOLERANCE) -> bool:
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    residual = matrix @ matrix.conj().T - np.eye(matrix.shape[0])
    return bool(np.max(np.abs(residual), initial=0.0) <= atol)


def check_unitary(matrix, what: str = 'matrix', atol: float = NORM_TOLERANCE) -> np.ndarray:
    """Returns the matrix as complex array, raising DecompositionError if not unitary."""

    matrix = np.asarray(matrix, dtype=complex)
    if not is_unitary(matrix, atol):
        raise DecompositionError(f'{what} is not unitary within {atol}')
    return matrix


def check_normalized(vector, what: str = 'state') -> np.ndarray:
    vector = np.asarray(vector, dtype=complex)
    if vector.ndim != 1:
        raise DecompositionError(f'{what} must be a vector, got shape {vector.shape}')
    norm = np.linalg.norm(vector)
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise DecompositionError(f'{what} has norm {norm:.12g}, expected 1')
    return vector


def num_qubits_for(dimension: int) -> int:
    """Returns n for a dimension of 2**n."""

    n = dimension.bit_length() - 1
    if dimension < 1 or 1 << n != dimension:
        raise DecompositionError(f'dimension {dimension} is not a power of two')
    return n


def rz(angle: float) -> np.ndarray:
    return np.diag([cmath.exp(-0.5j * angle), cmath.exp(0.5j * angle)])


def ry(angle: float) -> np.ndarray:
    cos, sin = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[cos, -sin], [sin, cos]], dtype=complex)


def phase_gate(angle: float) -> np.ndarray:
    """R(angle) = diag(1, e^{i angle})"""
    return np.diag([1.0, cmath.exp(1j * angle)])


def nearest_unitary(matrix: np.ndarray) -> np.ndarray:
    """Polar projection onto the unitaries, removes rounding drift."""

    left, _, right = np.linalg.svd(matrix)
    return left @ right


def zyz_angles(u: np.ndarray) -> typing.Tuple[float, float, float, float]:
    """Returns (alpha, beta, gamma, delta) with u = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta)."""

    u = check_unitary(u, 'single-qubit gate')
    if u.shape != (2, 2):
        raise DecompositionError(f'expected a 2x2 matrix, got shape {u.shape}')

    alpha = cmath.phase(np.linalg.det(u)) / 2
    special = u * cmath.exp(-1j * alpha)
    top, bottom = special[0, 0], special[1, 0]

    gamma = 2 * math.atan2(abs(bottom), abs(top))
    arg_top, arg_bottom = cmath.phase(top), cmath.phase(bottom)
    return alpha, arg_bottom - arg_top, gamma, -arg_top - arg_bottom


@attr.s(frozen=True)
class AxbxcFactors:
    """u = e^{i alpha} A X B X C with A B C = 1."""

    alpha = attr.ib(converter=float)
    a = attr.ib()
    b = attr.ib()
    c = attr.ib()

    def reconstruct(self) -> np.ndarray:
        return cmath.exp(1j * self.alpha) * self.a @ PAULI_X @ self.b @ PAULI_X @ self.c


def axbxc_factor(u: np.ndarray) -> AxbxcFactors:
    alpha, beta, gamma, delta = zyz_angles(u)
    return AxbxcFactors(
        alpha=alpha,
        a=rz(beta) @ ry(gamma / 2),
        b=ry(-gamma / 2) @ rz(-(delta + beta) / 2),
        c=rz((delta - beta) / 2),
    )


def state_prep_gate(beta0: complex, beta1: complex) -> np.ndarray:
    """Returns a unitary mapping |0> to beta0|0> + beta1|1>.

    Complex amplitudes are handled by an Rz after the Ry, with the common phase
    carried by the matrix itself.
    """
    theta = 2 * math.atan2(abs(beta1), abs(beta0))
    gamma0, gamma1 = cmath.phase(beta0), cmath.phase(beta1)
    return cmath.exp(0.5j * (gamma0 + gamma1)) * rz(gamma1 - gamma0) @ ry(theta)


@attr.s(frozen=True)
class CsdFactors:
    """u = diag(v1p, v1pp) [[C, S], [-S, C]] diag(v2p, v2pp)"""

    v1p = attr.ib()
    v1pp = attr.ib()
    v2p = attr.ib()
    v2pp = attr.ib()
    thetas = attr.ib()

    def middle(self) -> np.ndarray:
        cos, sin = np.diag(np.cos(self.thetas)), np.diag(np.sin(self.thetas))
        return np.block([[cos, sin], [-sin, cos]])

    def reconstruct(self) -> np.ndarray:
        left = scipy.linalg.block_diag(self.v1p, self.v1pp)
        right = scipy.linalg.block_diag(self.v2p, self.v2pp)
        return left @ self.middle() @ right


def csd_factor(u: np.ndarray) -> CsdFactors:
    """Cosine-sine decomposition with the angles sorted ascending."""

    u = check_unitary(u, 'unitary')
    if num_qubits_for(u.shape[0]) < 2:
        raise DecompositionError('cosine-sine decomposition needs at least 2 qubits')
    half = u.shape[0] // 2

    (u1, u2), thetas, (v1h, v2h) = scipy.linalg.cossin(u, p=half, q=half, separate=True)

    # cossin returns the middle block as [[C, -S], [S, C]]; conjugating with
    # diag(1, -1) turns it into [[C, S], [-S, C]].
    cos, sin = np.diag(np.cos(thetas)), np.diag(np.sin(thetas))
    lapack_middle = np.block([[cos, -sin], [sin, cos]])
    lapack_product = scipy.linalg.block_diag(u1, u2) @ lapack_middle \
        @ scipy.linalg.block_diag(v1h, v2h)
    if np.allclose(lapack_product, u, atol=1e-8):
        u2, v2h = -u2, -v2h

    order = np.argsort(thetas, kind='stable')
    return CsdFactors(
        v1p=u1[:, order],
        v1pp=u2[:, order],
        v2p=v1h[order, :],
        v2pp=v2h[order, :],
        thetas=np.clip(thetas[order], 0.0, math.pi / 2),
    )


class Demultiplexed(typing.NamedTuple):
    """v = left @ D @ right and w = left @ D^dagger @ right, D = diag(phases)."""

    left: np.ndarray
    phases: np.ndarray
    right: np.ndarray

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.phases)


def _circular_gap(first: float, second: float) -> float:
    return (second - first) % (2 * math.pi)


def demultiplex(v: np.ndarray, w: np.ndarray) -> Demultiplexed:
    """Splits diag(v, w) into (1 x left) (phase multiplexor) (1 x right).

    The eigenphases of v w^dagger are sorted by principal argument in [0, 2pi);
    eigenvalues closer than CLUSTER_TOLERANCE, measured around the circle, share a
    QR-orthonormalized basis. Every column keeps its own eigenphase.
    """
    v = check_unitary(v, 'first block')
    w = check_unitary(w, 'second block')
    if v.shape != w.shape:
        raise DecompositionError(f'block shapes differ: {v.shape} vs {w.shape}')

    product = v @ w.conj().T
    try:
        triangular, vectors = scipy.linalg.schur(product, output='complex')
    except (np.linalg.LinAlgError, ValueError) as ex:
        raise DecompositionError(f'eigendecomposition failed: {ex}') from ex

    angles = np.mod(np.angle(np.diag(triangular)), 2 * math.pi)
    order = np.argsort(angles, kind='stable')
    angles = angles[order]
    vectors = vectors[:, order]

    # A cluster straddling angle 0 moves to the front so that it stays contiguous.
    size = len(angles)
    tail = size
    while tail > 1 and _circular_gap(angles[tail - 1], angles[tail % size]) <= CLUSTER_TOLERANCE:
        tail -= 1
    if tail < size:
        order = np.r_[tail:size, 0:tail]
        angles = angles[order]
        vectors = vectors[:, order]

    start = 0
    for stop in range(1, size + 1):
        if stop < size and _circular_gap(angles[stop - 1], angles[stop]) <= CLUSTER_TOLERANCE:
            continue
        if stop - start > 1:
            vectors[:, start:stop], _ = np.linalg.qr(vectors[:, start:stop])
        start = stop

    phases = np.exp(0.5j * angles)
    right = (phases[:, np.newaxis] * vectors.conj().T) @ w
    return Demultiplexed(left=vectors, phases=phases, right=right)


def node_label(level: int, prefix: int) -> str:
    """Tree node as the bit string t_1 ... t_level, where t_j is bit j-1 of the prefix."""
    return ''.join(str((prefix >> j) & 1) for j in range(level))


def node_from_label(label: str) -> typing.Tuple[int, int]:
    return len(label), sum(int(bit) << j for j, bit in enumerate(label))


def tree_nodes(n: int) -> typing.List[typing.Tuple[int, int]]:
    """All internal nodes of the depth-n tree, ordered by level then prefix."""
    return [(level, prefix) for level in range(n) for prefix in range(1 << level)]


@attr.s(frozen=True)
class AmplitudeTree:
    """Conditional amplitudes of a state, one node per prefix of the basis index.

    Node (level, prefix) covers the basis indices whose low `level` bits equal
    `prefix`; its children are (level + 1, prefix) and (level + 1, prefix + 2**level).
    On the last level the betas carry the amplitude phases, so the product of
    betas along the path to leaf x equals v_x.
    """

    n = attr.ib(validator=attr.validators.instance_of(int))
    beta0 = attr.ib(repr=False)
    beta1 = attr.ib(repr=False)
    node_norm = attr.ib(repr=False)

    def phi(self, level: int, prefix: int) -> typing.Tuple[complex, complex]:
        return complex(self.beta0[level][prefix]), complex(self.beta1[level][prefix])

    def prep_gate(self, level: int, prefix: int) -> np.ndarray:
        return state_prep_gate(*self.phi(level, prefix))

    def prep_gates(self, level: int) -> np.ndarray:
        """Gates U_(level, p) for all prefixes p, as an array of shape (2**level, 2, 2)."""
        return np.array([self.prep_gate(level, prefix) for prefix in range(1 << level)])

    def leaf_product(self, index: int) -> complex:
        product = 1.0 + 0.0j
        for level in range(self.n):
            prefix = index & ((1 << level) - 1)
            bit = (index >> level) & 1
            product *= (self.beta1 if bit else self.beta0)[level][prefix]
        return product


def amplitude_tree(v: np.ndarray) -> AmplitudeTree:
    v = check_normalized(v)
    n = num_qubits_for(len(v))
    if n < 1:
        raise DecompositionError('a state needs at least one qubit')

    probabilities = np.abs(v) ** 2
    norms = [np.sqrt(probabilities.reshape(-1, 1 << level).sum(axis=0))
             for level in range(n)]

    beta0, beta1 = [], []
    for level in range(n):
        half = 1 << level
        if level < n - 1:
            child0 = norms[level + 1][:half].astype(complex)
            child1 = norms[level + 1][half:].astype(complex)
        else:
            child0, child1 = v[:half], v[half:]

        parent = norms[level]
        empty = parent <= ZERO_NORM
        safe = np.where(empty, 1.0, parent)
        beta0.append(np.where(empty, 1.0, child0 / safe))
        beta1.append(np.where(empty, 0.0, child1 / safe))

    log.debug('Amplitude tree for %d qubits, %d empty nodes', n,
              sum(int(np.count_nonzero(level_norms <= ZERO_NORM)) for level_norms in norms))
    return AmplitudeTree(n=n, beta0=tuple(beta0), beta1=tuple(beta1), node_norm=tuple(norms))
