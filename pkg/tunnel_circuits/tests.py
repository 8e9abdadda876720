import math

from django.test import SimpleTestCase

from modes.serializers import ScanRowSerializer
from modes.services import ScanRow
from tunnel_circuits.utils import degrees_to_radians, parse_range, radians_to_degrees, range_grid


class AngleConversionTest(SimpleTestCase):
    def test_degrees_and_radians(self):
        self.assertAlmostEqual(degrees_to_radians(180.0), math.pi, delta=1e-15)
        self.assertAlmostEqual(radians_to_degrees(-math.pi / 2), -90.0, delta=1e-12)
        for value in (-359.8569, -0.007529, 10.0, 359.428):
            self.assertAlmostEqual(radians_to_degrees(degrees_to_radians(value)), value, delta=1e-12)

    def test_serializers_report_degrees(self):
        row = ScanRow(theta=degrees_to_radians(90.0), a=1.0, b=2.0, c=3.0, determinant=-0.5)
        self.assertAlmostEqual(ScanRowSerializer(row).data['theta_deg'], 90.0, delta=1e-12)


class ParseRangeTest(SimpleTestCase):
    def test_bounds_and_step(self):
        self.assertEqual(parse_range('-360:0'), (-360.0, 0.0, None))
        self.assertEqual(parse_range('10:360:10'), (10.0, 360.0, 10.0))
        self.assertEqual(parse_range(' -1 : -0.5 '), (-1.0, -0.5, None))

    def test_rejects_malformed_ranges(self):
        for text in ('nonsense', '1', '1:2:3:4', '5:1', '1:1', '0:10:0', '0:10:-1', ':3'):
            with self.assertRaises(ValueError, msg=text):
                parse_range(text)

    def test_grid_includes_upper_bound(self):
        grid = range_grid(10.0, 360.0, 10.0)
        self.assertEqual(len(grid), 36)
        self.assertEqual(grid[-1], 360.0)
        self.assertEqual(range_grid(0.0, 1.0, 0.3), [0.0, 0.3, 0.6, 0.8999999999999999])
