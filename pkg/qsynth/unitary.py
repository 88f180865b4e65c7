"""General unitary synthesis.

Three routes: a recursive cosine-sine decomposition without ancillas, the
oracle |i>|0> -> |i>|U_i> built as a CQSP over the columns of U, and a
controlled oracle over a family of smaller unitaries. depth_model() gives the
predicted cost of the ancilla-assisted route for a choice of k.
"""

import logging
import math
import typing

import attr
import numpy as np

from . import circuit, cqsp, linalg, ucg

SMALL_BUDGET = 'cascade'
LARGE_BUDGET = 'cqsp'
BRANCHES = (SMALL_BUDGET, LARGE_BUDGET)

log = logging.getLogger(__name__)


def _unitary_matrix(value) -> np.ndarray:
    matrix = linalg.check_unitary(np.array(value, dtype=complex), what='U')
    matrix.setflags(write=False)
    return matrix


@attr.s(frozen=True)
class OracleSpec:
    """A 2^n x 2^n unitary whose column i is prepared under control value i."""

    u = attr.ib(converter=_unitary_matrix, repr=False)

    @property
    def n(self) -> int:
        return linalg.num_qubits_for(self.u.shape[0])

    def as_cqsp(self) -> cqsp.CqspSpec:
        return cqsp.CqspSpec(self.n, self.n, self.u.T)


def build_oracle(u: typing.Union[OracleSpec, np.ndarray], m: int = 0,
                 method: str = cqsp.AUTO) -> circuit.Circuit:
    """|i>|0^n> -> |i>|U_i>; index on qubits 0..n-1, output on n..2n-1."""

    spec = u if isinstance(u, OracleSpec) else OracleSpec(u)
    log.debug('oracle for a %d-qubit unitary, budget %d', spec.n, m)
    return cqsp.build_cqsp(spec.as_cqsp(), m, method)


def controlled_oracle_spec(family: typing.Sequence[np.ndarray]) -> cqsp.CqspSpec:
    """The family as one CQSP: control value x + 2^(n-k) y selects column y of U_x."""

    matrices = [_unitary_matrix(u) for u in family]
    if not matrices:
        raise ValueError('empty unitary family')
    k = linalg.num_qubits_for(matrices[0].shape[0])
    selectors = linalg.num_qubits_for(len(matrices))
    if any(u.shape != matrices[0].shape for u in matrices):
        raise ValueError('unitaries in a family must have the same size')
    states = np.array([u[:, y] for y in range(1 << k) for u in matrices])
    return cqsp.CqspSpec(selectors + k, k, states)


def controlled_oracle_branch(k: int, n: int, m: int) -> str:
    """Cascade of UCGs when m <= 2 (n + c k) 2^k, one CQSP otherwise."""

    threshold = 2 * (n + cqsp.layer_constant(k) * k) * (1 << k)
    return SMALL_BUDGET if m <= threshold else LARGE_BUDGET


def build_controlled_oracle(family: typing.Sequence[np.ndarray], m: int = 0,
                            branch: typing.Optional[str] = None) -> circuit.Circuit:
    """sum_x |x><x| (x) O_(U_x) for 2^(n-k) unitaries on k qubits.

    Selector x on qubits 0..n-k-1, column index y on n-k..n-1, output on
    n..n+k-1.
    """
    spec = controlled_oracle_spec(family)
    k = spec.n
    n = spec.k
    chosen = branch or controlled_oracle_branch(k, n, m)
    if chosen not in BRANCHES:
        raise ValueError(f'unknown controlled-oracle branch {chosen!r}')
    log.debug('controlled oracle n=%d k=%d m=%d branch %s', n, k, m, chosen)
    if chosen == SMALL_BUDGET:
        return cqsp.build_cqsp_case1(spec, m)
    return cqsp.build_cqsp(spec, m)


def _emit_block_diagonal(builder: circuit.CircuitBuilder, top: np.ndarray,
                         bottom: np.ndarray, qubits: typing.Sequence[int]) -> None:
    """diag(top, bottom) with the block selected by qubits[-1]."""

    left, phases, right = linalg.demultiplex(top, bottom)
    _emit_unitary(builder, right, qubits[:-1])
    ucg.emit_rotation_multiplexor(builder, 'z', -2 * np.angle(phases), qubits[:-1], qubits[-1])
    _emit_unitary(builder, left, qubits[:-1])


def _emit_unitary(builder: circuit.CircuitBuilder, u: np.ndarray,
                  qubits: typing.Sequence[int]) -> None:
    qubits = list(qubits)
    if len(qubits) == 1:
        builder.u(qubits[0], linalg.nearest_unitary(u))
        return
    factors = linalg.csd_factor(u)
    _emit_block_diagonal(builder, factors.v2p, factors.v2pp, qubits)
    ucg.emit_rotation_multiplexor(builder, 'y', -2 * np.asarray(factors.thetas),
                                  qubits[:-1], qubits[-1])
    _emit_block_diagonal(builder, factors.v1p, factors.v1pp, qubits)


def build_unitary_csd(u: np.ndarray, m: int = 0) -> circuit.Circuit:
    """Quantum Shannon decomposition: 3/4 4^n - 3/2 2^n CNOTs, no ancillas."""

    spec = OracleSpec(u)
    builder = circuit.CircuitBuilder(spec.n)
    _emit_unitary(builder, spec.u, range(spec.n))
    log.debug('CSD synthesis of a %d-qubit unitary: %d gates, budget %d unused',
              spec.n, len(builder), m)
    return builder.build()


def csd_cnot_count(n: int) -> int:
    if n == 1:
        return 0
    return 3 * 4 ** n // 4 - 3 * 2 ** n // 2


def cnot_lower_bound(n: int) -> int:
    """ceil((4^n - 3n - 1) / 4), the fewest CNOTs any n-qubit unitary circuit may need."""
    return -(-(4 ** n - 3 * n - 1) // 4)


@attr.s(frozen=True, auto_attribs=True)
class DepthModelPoint:
    n: int
    k: int
    m: int
    predicted_depth: float
    predicted_size: float
    k_star: int


def optimal_k(n: int, m: int) -> int:
    """The k minimising n 2^(n-k/2) + 2^(2n+k/2)/m, rounded and clamped to [1, n]."""
    return max(1, min(n, round(math.log2(n * m) - n)))


def depth_model(n: int, k: int, m: int) -> DepthModelPoint:
    if n < 1 or not 1 <= k <= n:
        raise ValueError(f'need 1 <= k <= n, got n={n}, k={k}')
    if m < 1:
        raise ValueError(f'the depth model needs m >= 1, got {m}')
    return DepthModelPoint(
        n=n, k=k, m=m,
        predicted_depth=n * 2 ** (n - k / 2) + 2 ** (2 * n + k / 2) / m,
        predicted_size=m * 2 ** (n - k / 2) + 2 ** (2 * n + k / 2),
        k_star=optimal_k(n, m),
    )


def analytic_depth(n: int, m: int) -> float:
    """Model depth at the best k; without ancillas, the CSD CNOT count."""
    if m < 1:
        return float(csd_cnot_count(n))
    return depth_model(n, optimal_k(n, m), m).predicted_depth
