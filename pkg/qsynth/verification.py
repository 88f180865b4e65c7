"""Simulator checks of synthesized circuits against what they should implement.

Every check returns a Verdict rather than raising, so the CLI and the bench
harness can report failures and circuits too wide to simulate alike.
"""

import logging
import typing

import attr
import numpy as np

from . import circuit, cqsp, simulator

OK = 'OK'
FAIL = 'FAIL'
UNVERIFIABLE = 'UNVERIFIABLE'

log = logging.getLogger(__name__)


@attr.s(frozen=True, auto_attribs=True)
class Verdict:
    status: str
    reason: str = ''

    @property
    def ok(self) -> bool:
        return self.status == OK

    def line(self) -> str:
        return self.status if not self.reason else f'{self.status}: {self.reason}'


def _working_qubits(c: circuit.Circuit) -> typing.List[int]:
    return [q for q in range(c.num_qubits) if q not in c.ancillas]


def _guarded(check: typing.Callable[[], Verdict]) -> Verdict:
    try:
        verdict = check()
    except simulator.QubitCapExceeded as ex:
        verdict = Verdict(UNVERIFIABLE, f'{ex}; unverifiable at desk scale')
    except simulator.EntangledWithAncilla as ex:
        verdict = Verdict(FAIL, f'ancilla entangled with the output: {ex}')
    except simulator.AncillaNotRestored as ex:
        verdict = Verdict(FAIL, f'ancilla not restored: {ex}')
    log.debug('verdict: %s', verdict.line())
    return verdict


def _run_indexed(sim: simulator.Simulator, c: circuit.Circuit, index: int,
                 expected: np.ndarray, tol: float) -> typing.Optional[Verdict]:
    """Runs |index>|0> and compares the working qubits with `expected`."""

    working = _working_qubits(c)
    out = sim.run(c, simulator.basis_state(c.num_qubits, index))
    mass = simulator.off_subspace_mass(out, working)
    if mass > sim.ancilla_tolerance:
        return Verdict(FAIL, f'ancilla not restored for input {index}: mass {mass:.3g}')
    actual = simulator.StateVector(len(working), simulator.restrict(out, working))
    wanted = simulator.StateVector(len(working), expected)
    fid = simulator.fidelity(actual, wanted)
    if fid < 1 - tol:
        return Verdict(FAIL, f'fidelity {fid:.12f} for input {index} is below 1 - {tol:g}')
    return None


def check_state_preparation(sim: simulator.Simulator, c: circuit.Circuit,
                            v: np.ndarray, tol: float) -> Verdict:
    """|0...0> -> |v> on the working qubits, ancillas back in |0>."""

    def check() -> Verdict:
        sim.check_width(c.num_qubits)
        working = _working_qubits(c)
        if 1 << len(working) != len(v):
            return Verdict(FAIL, f'circuit has {len(working)} working qubits, '
                                 f'state has {len(v)} amplitudes')
        return _run_indexed(sim, c, 0, np.asarray(v, dtype=complex), tol) or Verdict(OK)

    return _guarded(check)


def check_cqsp(sim: simulator.Simulator, c: circuit.Circuit, spec: cqsp.CqspSpec,
               tol: float) -> Verdict:
    """|i>|0> -> |i>|psi_i> for every index i."""

    def check() -> Verdict:
        sim.check_width(c.num_qubits)
        working = _working_qubits(c)
        if working != list(range(spec.k + spec.n)):
            return Verdict(FAIL, f'circuit working qubits {working} do not match '
                                 f'k={spec.k}, n={spec.n}')
        for i, state in enumerate(spec.states):
            index = np.zeros(1 << spec.k, dtype=complex)
            index[i] = 1.0
            verdict = _run_indexed(sim, c, i, np.kron(state, index), tol)
            if verdict is not None:
                return verdict
        return Verdict(OK)

    return _guarded(check)


def check_unitary(sim: simulator.Simulator, c: circuit.Circuit, u: np.ndarray,
                  tol: float) -> Verdict:
    """The operator on the working qubits equals u up to global phase."""

    def check() -> Verdict:
        sim.check_width(c.num_qubits)
        working = _working_qubits(c)
        if 1 << len(working) != len(u):
            return Verdict(FAIL, f'circuit has {len(working)} working qubits, '
                                 f'matrix has dimension {len(u)}')
        distance = simulator.unitary_distance(u, sim.extract_unitary(c, working))
        if distance > tol:
            return Verdict(FAIL, f'operator distance {distance:.3g} exceeds {tol:g}')
        return Verdict(OK)

    return _guarded(check)
