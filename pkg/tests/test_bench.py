import csv
import pathlib
import tempfile

import numpy as np

from qsynth import bench, simulator

from tests.abstract_test import AbstractQsynthTest


class ParseTest(AbstractQsynthTest):
    def test_parse_range(self):
        self.assertEqual([2, 3, 4], bench.parse_range('2:4'))
        self.assertEqual([3], bench.parse_range('3'))
        for text in ('4:2', 'a:b', '-1:2', ''):
            with self.subTest(text=text), self.assertRaises(ValueError):
                bench.parse_range(text)

    def test_parse_list(self):
        self.assertEqual([0, 16, 64], bench.parse_list('0,16,64'))
        for text in ('', 'x', '1,-2'):
            with self.subTest(text=text), self.assertRaises(ValueError):
                bench.parse_list(text)

    def test_sweep(self):
        instances = bench.sweep('qsp', [0, 1, 2], [1, 2], [0, 8])
        self.assertEqual([bench.Instance('qsp', 1, 0, 0), bench.Instance('qsp', 1, 0, 8),
                          bench.Instance('qsp', 2, 0, 0), bench.Instance('qsp', 2, 0, 8)],
                         instances)
        self.assertEqual(4, len(bench.sweep('cqsp', [1, 2], [1, 2], [0])))
        with self.assertRaises(ValueError):
            bench.sweep('teleport', [1], [0], [0])


class RandomInstanceTest(AbstractQsynthTest):
    def test_random_state_is_normalized(self):
        v = bench.random_state(self.rng, 4)
        self.assertEqual(16, len(v))
        self.assertAlmostEqual(1.0, float(np.linalg.norm(v)))

    def test_random_unitary(self):
        u = bench.random_unitary(self.rng, 2)
        self.assertAllClose(np.eye(4), u @ u.conj().T, atol=1e-12)

    def test_instance_rng_is_reproducible(self):
        instance = bench.Instance('qsp', 3, 0, 0)
        a = bench.random_state(instance.rng(7), 3)
        b = bench.random_state(instance.rng(7), 3)
        c = bench.random_state(instance.rng(8), 3)
        self.assertAllClose(a, b, atol=0)
        self.assertFalse(np.allclose(a, c))


class BenchTest(AbstractQsynthTest):
    def setUp(self):
        super().setUp()
        self.tmpdir = tempfile.TemporaryDirectory()
        self.tmppath = pathlib.Path(self.tmpdir.name)

    def tearDown(self):
        self.tmpdir.cleanup()

    def test_qsp_rows(self):
        runner = bench.Bench(simulator.Simulator(), seed=1)
        rows = runner.run(bench.sweep('qsp', [1, 2, 3], [0], [0, 12]), jobs=2)

        self.assertEqual([(1, 0), (1, 12), (2, 0), (2, 12), (3, 0), (3, 12)],
                         [(row.instance.n, row.instance.m) for row in rows])
        self.assertTrue(all(row.verified == 'true' for row in rows))
        self.assertEqual('rosenthal', rows[3].method)
        self.assertEqual('cascade', rows[4].method)
        self.assertIn('synthesis', runner.durations.phases)

    def test_unitary_rows_have_ratio(self):
        runner = bench.Bench(simulator.Simulator(), seed=1)
        rows = runner.run(bench.sweep('unitary', [2, 3], [0], [0]))
        self.assertEqual([6 / 3, 36 / 14], [row.lower_bound_ratio for row in rows])

    def test_single_qubit_unitary_has_no_ratio(self):
        # The CNOT lower bound for one qubit is zero.
        runner = bench.Bench(simulator.Simulator(), seed=1)
        rows = runner.run(bench.sweep('unitary', [1, 2], [0], [0]))

        self.assertEqual([1, 2], [row.instance.n for row in rows])
        self.assertIsNone(rows[0].lower_bound_ratio)
        self.assertEqual('', rows[0].as_csv()[10])
        self.assertEqual('true', rows[0].verified)
        self.assertEqual(2.0, rows[1].lower_bound_ratio)

    def test_skip_and_unverifiable(self):
        runner = bench.Bench(simulator.Simulator(qubit_cap=2), seed=1)
        rows = runner.run([bench.Instance('cqsp', 2, 1, 0)])
        self.assertEqual('unverifiable', rows[0].verified)

        runner = bench.Bench(simulator.Simulator(), seed=1, verify=False)
        rows = runner.run([bench.Instance('cqsp', 2, 1, 0)])
        self.assertEqual('skipped', rows[0].verified)

    def test_deterministic_across_jobs(self):
        instances = bench.sweep('cqsp', [1, 2], [1, 2], [0])
        serial = bench.Bench(simulator.Simulator(), seed=3).run(instances, jobs=1)
        parallel = bench.Bench(simulator.Simulator(), seed=3).run(instances, jobs=4)
        self.assertEqual([row.as_csv() for row in serial], [row.as_csv() for row in parallel])

    def test_write_csv(self):
        runner = bench.Bench(simulator.Simulator(), seed=1)
        rows = runner.run(bench.sweep('unitary', [2], [0], [0]))
        path = self.tmppath / 'unitary.csv'
        bench.write_csv(path, rows)

        with path.open(newline='', encoding='utf8') as infile:
            table = list(csv.reader(infile))
        self.assertEqual(list(bench.COLUMNS), table[0])
        self.assertEqual(['unitary', '2', '0', '0', 'csd'], table[1][:5])
        self.assertEqual('true', table[1][9])
        self.assertEqual('2.0000', table[1][10])
        self.assertEqual('1', table[1][11])

    def test_fit_log2_slope(self):
        self.assertAlmostEqual(2.0, bench.fit_log2_slope([1, 2, 3], [4, 16, 64]))
