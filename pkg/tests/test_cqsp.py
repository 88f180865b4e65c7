import numpy as np

from qsynth import bench, circuit, cqsp, qsp, simulator, verification

from tests.abstract_test import AbstractQsynthTest


class AbstractCqspTest(AbstractQsynthTest):
    def random_spec(self, k: int, n: int) -> cqsp.CqspSpec:
        return bench.random_cqsp_spec(self.rng, k, n)

    def assertPrepares(self, spec: cqsp.CqspSpec, c: circuit.Circuit):
        verdict = verification.check_cqsp(simulator.Simulator(), c, spec, 1e-9)
        self.assertTrue(verdict.ok, verdict.line())

    def assertCoherent(self, spec: cqsp.CqspSpec, c: circuit.Circuit):
        """A superposition on the index register gives sum_i a_i |i>|psi_i>."""

        a = self.random_state(spec.k)
        working = spec.index_qubits + spec.target_qubits
        out = simulator.run(c, simulator.embed(a, spec.index_qubits, c.num_qubits))
        expected = (spec.states * a[:, np.newaxis]).T.reshape(-1)
        self.assertLess(simulator.off_subspace_mass(out, working), 1e-9)
        self.assertStatesClose(expected, simulator.restrict(out, working), atol=1e-9)


class SpecTest(AbstractCqspTest):
    def test_from_states(self):
        spec = cqsp.CqspSpec.from_states([[1, 0], [0, 1], [0.6, 0.8], [0, 1j]])
        self.assertEqual(2, spec.k)
        self.assertEqual(1, spec.n)
        self.assertEqual([0, 1], spec.index_qubits)
        self.assertEqual([2], spec.target_qubits)

    def test_validation(self):
        with self.assertRaises(ValueError):
            cqsp.CqspSpec(1, 1, [[1, 0]])
        with self.assertRaises(ValueError):
            cqsp.CqspSpec(0, 1, [[1, 1]])
        with self.assertRaises(ValueError):
            cqsp.CqspSpec(0, 0, [[1]])
        with self.assertRaises(ValueError):
            cqsp.CqspSpec.from_states([[1, 0], [0, 1], [1, 0]])

    def test_marginal_and_conditional(self):
        v = np.array([0.5, 0.5, 0.5j, -0.5])
        spec = cqsp.CqspSpec(0, 2, [v])

        marginal = cqsp.marginal_spec(spec, 1)
        self.assertEqual((0, 1), (marginal.k, marginal.n))
        self.assertAllClose([[np.sqrt(0.5), np.sqrt(0.5)]], marginal.states)

        conditional = cqsp.conditional_spec(spec, 1)
        self.assertEqual((1, 1), (conditional.k, conditional.n))
        self.assertAllClose([[np.sqrt(0.5), np.sqrt(0.5)],
                             [np.sqrt(0.5) * 1j, -np.sqrt(0.5)]], conditional.states)

    def test_conditional_of_empty_block(self):
        spec = cqsp.CqspSpec(1, 2, [[1, 0, 0, 0], [0, 0, 0.6, 0.8]])
        conditional = cqsp.conditional_spec(spec, 1)
        # row i + 2 eta; state 0 has no weight on eta = 1, state 1 none on eta = 0
        self.assertAllClose([1, 0], conditional.states[0])
        self.assertAllClose([1, 0], conditional.states[1])
        self.assertAllClose([1, 0], conditional.states[2])
        self.assertAllClose([0.6, 0.8], conditional.states[3])


class Case1Test(AbstractCqspTest):
    def test_prepares_every_index(self):
        for k, n in [(1, 1), (1, 3), (2, 3), (3, 2)]:
            spec = self.random_spec(k, n)
            with self.subTest(k=k, n=n):
                self.assertPrepares(spec, cqsp.build_cqsp_case1(spec))

    def test_coherent_on_superpositions(self):
        spec = self.random_spec(2, 3)
        self.assertCoherent(spec, cqsp.build_cqsp_case1(spec))

    def test_k_zero_is_state_preparation(self):
        spec = self.random_spec(0, 3)
        c = cqsp.build_cqsp_case1(spec)
        self.assertStatesClose(spec.states[0], self.prepared(c, range(3)), atol=1e-9)

    def test_size(self):
        for k in (1, 2):
            for n in range(1, 5):
                c = cqsp.build_cqsp_case1(self.random_spec(k, n))
                with self.subTest(k=k, n=n):
                    self.assertEqual((1 << (k + n + 2)) - (1 << (k + 1)) - n - 3, c.size)

    def test_size_grows_as_two_to_the_n(self):
        ns = list(range(3, 10))
        sizes = [cqsp.build_cqsp_case1(self.random_spec(1, n)).size for n in ns]
        slope = bench.fit_log2_slope([n + 1 for n in ns], sizes)
        self.assertGreaterEqual(slope, 0.9)
        self.assertLessEqual(slope, 1.1)


class ControlledLayersTest(AbstractCqspTest):
    def test_requirement(self):
        self.assertEqual(3 + 2, cqsp.controlled_layers_requirement(1, 1))
        self.assertEqual(12 + 6, cqsp.controlled_layers_requirement(1, 2))
        self.assertEqual(12 + 12, cqsp.controlled_layers_requirement(2, 2))

    def test_prepares_every_index(self):
        for k, n in [(1, 1), (2, 1)]:
            spec = self.random_spec(k, n)
            c = cqsp.build_cqsp_controlled_layers(spec, cqsp.controlled_layers_requirement(k, n))
            with self.subTest(k=k, n=n):
                self.assertPrepares(spec, c)
                self.assertCoherent(spec, c)

    def test_sections(self):
        spec = self.random_spec(1, 1)
        c = cqsp.build_cqsp_controlled_layers(spec, cqsp.controlled_layers_requirement(1, 1))
        self.assertEqual(['L1', "C1'", "C1''", 'L2', 'C2', 'L3', 'C3', 'L4', 'C4', 'L5', 'C5'],
                         c.section_names())

    def test_state_independent_circuits_match_across_specs(self):
        m = cqsp.controlled_layers_requirement(1, 1)
        a = cqsp.build_cqsp_controlled_layers(self.random_spec(1, 1), m)
        b = cqsp.build_cqsp_controlled_layers(self.random_spec(1, 1), m)

        self.assertEqual(a.section_names(), b.section_names())
        for name in ("C1'", "C1''", 'C2', 'C3', 'C4', 'C5'):
            with self.subTest(section=name):
                self.assertEqual(a.section(name).gates, b.section(name).gates)

    def test_equal_states_match_plain_preparation(self):
        v = self.random_state(1)
        spec = cqsp.CqspSpec.from_states([v, v])
        plain = self.prepared(qsp.build_qsp_cascade(v), range(1))
        c = cqsp.build_cqsp_controlled_layers(spec, cqsp.controlled_layers_requirement(1, 1))

        for i in range(2):
            index = np.zeros(2, dtype=complex)
            index[i] = 1.0
            with self.subTest(i=i):
                actual = self.prepared(c, spec.index_qubits + spec.target_qubits, index=i)
                self.assertStatesClose(np.kron(plain, index), actual, atol=1e-9)

    def test_insufficient_budget(self):
        spec = self.random_spec(1, 1)
        with self.assertRaises(circuit.InsufficientAncillas):
            cqsp.build_cqsp_controlled_layers(spec, 4)


class TwoStageTest(AbstractCqspTest):
    def test_split_width(self):
        self.assertEqual(2, cqsp.split_width(1, 2))
        self.assertEqual(3, cqsp.split_width(2, 3))
        self.assertEqual(16, cqsp.split_width(2, 20))

    def test_explicit_splits(self):
        spec = self.random_spec(2, 3)
        for split in (1, 2):
            c = cqsp.build_cqsp_two_stage(spec, 0, split=split)
            with self.subTest(split=split):
                self.assertEqual(['stage1', 'stage2'], c.section_names())
                self.assertPrepares(spec, c)
                self.assertCoherent(spec, c)

    def test_zero_blocks(self):
        states = np.zeros((2, 4), dtype=complex)
        states[0, 0] = 1
        states[1, 2:] = [0.6, 0.8j]
        spec = cqsp.CqspSpec(1, 2, states)
        self.assertPrepares(spec, cqsp.build_cqsp_two_stage(spec, 0, split=1))

    def test_full_split_is_one_stage(self):
        spec = self.random_spec(1, 2)
        c = cqsp.build_cqsp_two_stage(spec, 0)
        self.assertEqual([], c.section_names())
        self.assertPrepares(spec, c)

    def test_non_positive_split_falls_back(self):
        spec = self.random_spec(1, 2)
        c = cqsp.build_cqsp_two_stage(spec, 0, split=0)
        self.assertEqual(cqsp.build_cqsp_case1(spec).size, c.size)


class PathEquivalenceTest(AbstractCqspTest):
    def test_all_methods_agree(self):
        spec = self.random_spec(1, 2)
        circuits = {
            cqsp.CASE1: cqsp.build_cqsp(spec, 0, cqsp.CASE1),
            cqsp.TWO_STAGE: cqsp.build_cqsp_two_stage(spec, 0, split=1),
            cqsp.CONTROLLED_LAYERS: cqsp.build_cqsp(
                spec, cqsp.controlled_layers_requirement(1, 2), cqsp.CONTROLLED_LAYERS),
        }
        for method, c in circuits.items():
            with self.subTest(method=method):
                self.assertPrepares(spec, c)


class DispatchTest(AbstractCqspTest):
    def test_dispatch(self):
        self.assertEqual(cqsp.CASE1, cqsp.dispatch(1, 2, 0))
        self.assertEqual(cqsp.CASE1, cqsp.dispatch(1, 2, 23))
        self.assertEqual(cqsp.CONTROLLED_LAYERS, cqsp.dispatch(1, 2, 24))
        self.assertEqual(cqsp.TWO_STAGE, cqsp.dispatch(2, 20, 10000))
        self.assertEqual(cqsp.CASE1, cqsp.dispatch(2, 20, 1000))

    def test_resolve_method(self):
        self.assertEqual(cqsp.CASE1, cqsp.resolve_method(1, 2, 0, cqsp.TWO_STAGE))
        self.assertEqual(cqsp.CONTROLLED_LAYERS, cqsp.resolve_method(1, 2, 24, cqsp.TWO_STAGE))
        self.assertEqual(cqsp.TWO_STAGE, cqsp.resolve_method(2, 20, 0, cqsp.TWO_STAGE))
        self.assertEqual(cqsp.CASE1, cqsp.resolve_method(1, 2, 0, cqsp.CASE1))
        self.assertEqual(cqsp.dispatch(2, 20, 10000), cqsp.resolve_method(2, 20, 10000))
        with self.assertRaises(ValueError):
            cqsp.resolve_method(1, 2, 0, 'magic')

    def test_auto_uses_dispatch(self):
        spec = self.random_spec(1, 2)
        self.assertEqual(3, cqsp.build_cqsp(spec).num_qubits)
        with self.assertRaises(ValueError):
            cqsp.build_cqsp(spec, 0, 'magic')

    def test_analytic_depth(self):
        self.assertAlmostEqual(5 + 32 / 5, cqsp.analytic_depth(2, 3, 0))
