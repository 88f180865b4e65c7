import json
import pathlib
import tempfile

import numpy as np

from qsynth import circuit, cqsp, documents, linalg, ucg

from tests.abstract_test import AbstractQsynthTest


class AbstractDocumentTest(AbstractQsynthTest):
    def setUp(self):
        super().setUp()
        self.tmpdir = tempfile.TemporaryDirectory()
        self.tmppath = pathlib.Path(self.tmpdir.name)

    def tearDown(self):
        self.tmpdir.cleanup()


class StateDocumentTest(AbstractDocumentTest):
    def test_parse(self):
        v = documents.state_from_dict({'num_qubits': 1, 'amplitudes': [[0.6, 0], [0, 0.8]]})
        self.assertAllClose([0.6, 0.8j], v)

    def test_to_dict(self):
        doc = documents.state_to_dict(np.array([0.6, 0.8j]))
        self.assertEqual({'num_qubits': 1, 'amplitudes': [[0.6, 0.0], [0.0, 0.8]]}, doc)

    def test_invalid(self):
        bad_docs = [
            [],
            {'amplitudes': [[1, 0]]},
            {'num_qubits': 'one', 'amplitudes': [[1, 0]]},
            {'num_qubits': True, 'amplitudes': [[1, 0], [0, 0]]},
            {'num_qubits': 1, 'amplitudes': [[1, 0]]},
            {'num_qubits': 1, 'amplitudes': [[1, 0], [1, 0]]},
            {'num_qubits': 1, 'amplitudes': [[1, 0], [0]]},
            {'num_qubits': 1, 'amplitudes': [[1, 0], ['zero', 0]]},
        ]
        for doc in bad_docs:
            with self.subTest(doc=doc), self.assertRaises(documents.InvalidDocument):
                documents.state_from_dict(doc)

    def test_load_state(self):
        path = self.tmppath / 'state.json'
        v = self.random_state(3)
        documents.write_json(path, documents.state_to_dict(v))
        state = documents.load_state(path)
        self.assertEqual(3, state.num_qubits)
        self.assertAllClose(v, state.amplitudes, atol=1e-15)


class MatrixDocumentTest(AbstractDocumentTest):
    def test_parse(self):
        doc = {'n': 1, 'rows': [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]}
        self.assertAllClose(linalg.PAULI_X, documents.matrix_from_dict(doc))

    def test_invalid(self):
        bad_docs = [
            {'n': 1, 'rows': []},
            {'n': 1, 'rows': [[[1, 0], [0, 0]]]},
            {'n': 2, 'rows': [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]},
            {'n': 1, 'rows': [[[1, 0], [1, 0]], [[0, 0], [1, 0]]]},
        ]
        for doc in bad_docs:
            with self.subTest(doc=doc), self.assertRaises(documents.InvalidDocument):
                documents.matrix_from_dict(doc)

    def test_load_matrix(self):
        path = self.tmppath / 'u.json'
        u = self.random_unitary(2)
        documents.write_json(path, documents.matrix_to_dict(u))
        self.assertAllClose(u, documents.load_matrix(path), atol=1e-15)


class SpecDocumentTest(AbstractDocumentTest):
    def test_cqsp_spec(self):
        spec = cqsp.CqspSpec(1, 1, [[1, 0], [0, 1j]])
        doc = documents.cqsp_spec_to_dict(spec)
        self.assertEqual({'k': 1, 'n': 1, 'states': [[[1.0, 0.0], [0.0, 0.0]],
                                                     [[0.0, 0.0], [0.0, 1.0]]]}, doc)
        parsed = documents.cqsp_spec_from_dict(doc)
        self.assertAllClose(spec.states, parsed.states)

    def test_cqsp_spec_invalid(self):
        with self.assertRaises(documents.InvalidDocument):
            documents.cqsp_spec_from_dict({'k': 1, 'n': 1, 'states': [[[1, 0], [0, 0]]]})
        with self.assertRaises(documents.InvalidDocument):
            documents.cqsp_spec_from_dict({'k': 0, 'n': 1, 'states': [[[1, 0], [1, 0]]]})

    def test_ucu_spec(self):
        doc = {'controls': [0], 'targets': [1],
               'table': [documents.matrix_to_dict(np.eye(2))['rows'],
                         documents.matrix_to_dict(linalg.PAULI_X)['rows']]}
        spec = documents.ucu_spec_from_dict(doc)
        self.assertEqual((0,), spec.controls)
        self.assertAllClose(linalg.PAULI_X, spec.table[1])
        self.assertEqual(doc, documents.ucu_spec_to_dict(spec))

    def test_ucu_spec_invalid(self):
        with self.assertRaises(documents.InvalidDocument):
            documents.ucu_spec_from_dict({'controls': [0], 'targets': [0], 'table': []})


class CircuitDocumentTest(AbstractDocumentTest):
    def test_to_dict(self):
        builder = circuit.CircuitBuilder(2)
        builder.u(0, linalg.PAULI_X)
        builder.cx(0, 1)
        builder.declare_ancillas([1])
        doc = documents.circuit_to_dict(builder.build())

        self.assertEqual({
            'num_qubits': 2,
            'ancillas': [1],
            'gates': [
                {'kind': 'u', 'target': 0,
                 'matrix': [[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]},
                {'kind': 'cx', 'control': 0, 'target': 1},
            ],
        }, doc)

    def test_save_and_load(self):
        builder = circuit.CircuitBuilder(3)
        builder.u(2, self.random_single_qubit())
        builder.cx(2, 0)
        original = builder.build()

        path = self.tmppath / 'circuit.json'
        documents.save_circuit(path, original)
        loaded = documents.load_circuit(path)

        self.assertEqual(3, loaded.num_qubits)
        self.assertEqual(frozenset(), loaded.ancillas)
        self.assertEqual(original.cnot_count, loaded.cnot_count)
        first = loaded.gates[0]
        assert isinstance(first, circuit.OneQubit)
        self.assertAllClose(original.gates[0].matrix, first.matrix, atol=1e-15)

    def test_invalid(self):
        bad_docs = [
            {'num_qubits': 2, 'gates': [{'kind': 'cz', 'control': 0, 'target': 1}]},
            {'num_qubits': 2, 'gates': [{'kind': 'cx', 'control': 0, 'target': 0}]},
            {'num_qubits': 2, 'gates': [{'kind': 'cx', 'control': 0, 'target': 2}]},
            {'num_qubits': 1, 'gates': [{'kind': 'u', 'target': 0,
                                         'matrix': [[[1, 0], [1, 0]], [[0, 0], [1, 0]]]}]},
            {'num_qubits': 1, 'gates': [], 'ancillas': [3]},
            {'gates': []},
        ]
        for doc in bad_docs:
            with self.subTest(doc=doc), self.assertRaises(documents.InvalidDocument):
                documents.circuit_from_dict(doc)


class JsonFileTest(AbstractDocumentTest):
    def test_malformed_json(self):
        path = self.tmppath / 'broken.json'
        path.write_text('{"num_qubits": 1,', encoding='utf8')
        with self.assertRaises(documents.InvalidDocument):
            documents.read_json(path)

    def test_missing_file(self):
        with self.assertRaises(OSError):
            documents.read_json(self.tmppath / 'absent.json')

    def test_write_replaces_atomically(self):
        path = self.tmppath / 'metrics.json'
        documents.write_json(path, {'depth': 1})
        documents.write_json(path, {'depth': np.int64(2), 'phase': np.complex128(1j)})
        self.assertEqual({'depth': 2, 'phase': [0.0, 1.0]},
                         json.loads(path.read_text(encoding='utf8')))
        self.assertEqual(['metrics.json'], [p.name for p in self.tmppath.iterdir()])

    def test_metrics_document(self):
        builder = circuit.CircuitBuilder(3)
        builder.cx(0, 1)
        builder.declare_ancillas([2])
        metrics = documents.MetricsDocument.for_circuit(builder.build(), 'cascade', 4.5,
                                                        verified=True)
        doc = metrics.to_dict()
        self.assertEqual(1, doc['depth'])
        self.assertEqual(1, doc['cnot_count'])
        self.assertEqual(1, doc['ancilla_count'])
        self.assertEqual(3, doc['num_qubits'])
        self.assertEqual('cascade', doc['method'])
        self.assertEqual(4.5, doc['analytic_depth_model'])
        self.assertIs(True, doc['verified'])
        self.assertIsNone(doc['lower_bound'])
