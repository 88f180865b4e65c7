from collections import OrderedDict
import json
import unittest
from unittest import mock

from qsynth import timing, json_encoder


class TimingTest(unittest.TestCase):
    @mock.patch('time.monotonic')
    def test_record_duration(self, mock_monotonic):
        epoch = 260690.552905407
        mock_monotonic.side_effect = [epoch, epoch + 3.125, epoch + 10, epoch + 11.5]

        t = timing.Timing()
        with t.record_duration(timing.SYNTHESIS):
            pass
        with t.record_duration(timing.VERIFICATION):
            pass

        self.assertEqual(OrderedDict([
            ('synthesis', 3.125),
            ('verification', 1.5),
        ]), t.phases)
        self.assertEqual(4.625, t.total())

    @mock.patch('time.monotonic')
    def test_record_duration_accumulates(self, mock_monotonic):
        epoch = 1000.0
        mock_monotonic.side_effect = [epoch, epoch + 0.5, epoch + 2, epoch + 2.25]

        t = timing.Timing()
        with t.record_duration('synthesis'):
            pass
        with t.record_duration('synthesis'):
            pass

        self.assertEqual(OrderedDict([('synthesis', 0.75)]), t.phases)

    @mock.patch('time.monotonic')
    def test_record_duration_exception(self, mock_monotonic):
        epoch = 260690.552905407
        mock_monotonic.side_effect = [epoch, epoch + 3.125]

        t = timing.Timing()

        with self.assertRaises(ValueError):
            with t.record_duration('synthesis'):
                raise ValueError('just testing here')

        self.assertEqual(OrderedDict([
            ('synthesis', 3.125),
        ]), t.phases)

    def test_add_empty(self):
        t1 = timing.Timing()
        t2 = timing.Timing()
        tsum = t1 + t2

        self.assertIsNot(t1, tsum)
        self.assertIsNot(t2, tsum)
        self.assertEqual(OrderedDict(), tsum.phases)

    def test_add(self):
        t1 = timing.Timing(OrderedDict([
            ('synthesis', 3.125),
            ('verification', 1.625),
        ]))
        t2 = timing.Timing(OrderedDict([
            ('synthesis', 3),
            ('writing', 0.5),
        ]))
        t1_phases_copy = t1.phases.copy()
        t2_phases_copy = t2.phases.copy()

        tsum = t1 + t2

        self.assertIsNot(t1.phases, tsum.phases)
        self.assertIsNot(t2.phases, tsum.phases)
        self.assertEqual(t1.phases, t1_phases_copy)
        self.assertEqual(t2.phases, t2_phases_copy)

        self.assertEqual(OrderedDict([
            ('synthesis', 6.125),
            ('verification', 1.625),
            ('writing', 0.5),
        ]), tsum.phases)

    def test_iadd(self):
        t1 = timing.Timing(OrderedDict([('synthesis', 3.125)]))
        t2 = timing.Timing(OrderedDict([('synthesis', 3), ('verification', 0.5)]))
        t1_phases_before = t1.phases
        t1 += t2

        self.assertIs(t1.phases, t1_phases_before)
        self.assertEqual(OrderedDict([
            ('synthesis', 6.125),
            ('verification', 0.5),
        ]), t1.phases)
        self.assertEqual(6.125, t1['synthesis'])

    def test_add_bad_type(self):
        with self.assertRaises(TypeError):
            timing.Timing() + 3
        with self.assertRaises(TypeError):
            3 + timing.Timing()

    def test_json_encoding(self):
        t1 = timing.Timing(OrderedDict([
            ('synthesis', 3.1250000004),
            ('verification', 41.625),
        ]))

        as_json = json.dumps(t1, cls=json_encoder.JSONEncoder)
        from_json = json.loads(as_json)

        self.assertEqual({'synthesis': 3.125, 'verification': 41.625}, from_json)
