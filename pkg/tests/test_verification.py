import numpy as np

from qsynth import circuit, cqsp, linalg, qsp, simulator, unitary, verification

from tests.abstract_test import AbstractQsynthTest


class VerificationTest(AbstractQsynthTest):
    def setUp(self):
        super().setUp()
        self.sim = simulator.Simulator()

    def test_state_preparation_ok(self):
        v = self.random_state(3)
        verdict = verification.check_state_preparation(self.sim, qsp.build_qsp(v), v, 1e-9)
        self.assertEqual(verification.OK, verdict.status)
        self.assertEqual('OK', verdict.line())

    def test_state_preparation_wrong_state(self):
        c = qsp.build_qsp(self.random_state(2))
        verdict = verification.check_state_preparation(self.sim, c, self.random_state(2), 1e-9)
        self.assertEqual(verification.FAIL, verdict.status)
        self.assertIn('fidelity', verdict.reason)
        self.assertTrue(verdict.line().startswith('FAIL: '))

    def test_width_mismatch(self):
        c = qsp.build_qsp(self.random_state(2))
        verdict = verification.check_state_preparation(self.sim, c, self.random_state(3), 1e-9)
        self.assertEqual(verification.FAIL, verdict.status)

    def test_dirty_ancilla(self):
        builder = circuit.CircuitBuilder(2)
        builder.u(1, linalg.PAULI_X)
        builder.declare_ancillas([1])
        verdict = verification.check_state_preparation(self.sim, builder.build(),
                                                       np.array([1, 0]), 1e-9)
        self.assertEqual(verification.FAIL, verdict.status)
        self.assertIn('ancilla not restored', verdict.reason)

    def test_unverifiable(self):
        sim = simulator.Simulator(qubit_cap=2)
        v = self.random_state(3)
        verdict = verification.check_state_preparation(sim, qsp.build_qsp(v), v, 1e-9)
        self.assertEqual(verification.UNVERIFIABLE, verdict.status)
        self.assertFalse(verdict.ok)

    def test_cqsp(self):
        spec = cqsp.CqspSpec(1, 1, [[1, 0], [0, 1]])
        builder = circuit.CircuitBuilder(2)
        builder.cx(0, 1)
        self.assertTrue(verification.check_cqsp(self.sim, builder.build(), spec, 1e-9).ok)

        wrong = cqsp.CqspSpec(1, 1, [[0, 1], [0, 1]])
        verdict = verification.check_cqsp(self.sim, builder.build(), wrong, 1e-9)
        self.assertEqual(verification.FAIL, verdict.status)
        self.assertIn('input 0', verdict.reason)

    def test_unitary(self):
        u = self.random_unitary(2)
        c = unitary.build_unitary_csd(u)
        self.assertTrue(verification.check_unitary(self.sim, c, u, 1e-8).ok)
        verdict = verification.check_unitary(self.sim, c, self.random_unitary(2), 1e-8)
        self.assertEqual(verification.FAIL, verdict.status)

    def test_entangled_ancilla(self):
        builder = circuit.CircuitBuilder(2)
        builder.u(0, linalg.HADAMARD)
        builder.cx(0, 1)
        builder.declare_ancillas([1])
        verdict = verification.check_unitary(self.sim, builder.build(), linalg.HADAMARD, 1e-8)
        self.assertEqual(verification.FAIL, verdict.status)
        self.assertIn('entangled', verdict.reason)
