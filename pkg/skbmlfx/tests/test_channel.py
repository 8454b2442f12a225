import dataclasses

from django.test import SimpleTestCase

from skbmlfx.channel import ChannelParams, achievable_rate, latency, path_loss, snr
from skbmlfx.exceptions import InvalidArgument, NonPositiveDistance, ZeroRate


class PathLossTests(SimpleTestCase):
    def test_reference_distance(self):
        params = ChannelParams(d_m=10.0)
        self.assertAlmostEqual(path_loss(params), 1e-3, delta=1e-15)

    def test_link_parameters(self):
        self.assertAlmostEqual(path_loss(ChannelParams()), 8e-9, delta=8e-12)

    def test_zero_exponent_ignores_distance(self):
        near = path_loss(ChannelParams(zeta=0.0, d_m=20.0))
        far = path_loss(ChannelParams(zeta=0.0, d_m=2000.0))
        self.assertEqual(near, far)

    def test_non_positive_distance(self):
        with self.assertRaises(NonPositiveDistance):
            path_loss(ChannelParams(d_m=0.0))


class RateTests(SimpleTestCase):
    def test_unit_snr_gives_bandwidth(self):
        params = ChannelParams(beta0_db=0.0, d_m=10.0, power_dbm=-114.0)
        self.assertAlmostEqual(snr(params), 1.0, places=9)
        self.assertAlmostEqual(achievable_rate(params) / params.bandwidth_hz, 1.0, places=9)

    def test_link_parameters(self):
        rate = achievable_rate(ChannelParams())
        self.assertAlmostEqual(rate / 1.4294e7, 1.0, delta=1e-3)

    def test_more_bandwidth_more_rate(self):
        params = ChannelParams()
        wider = dataclasses.replace(params, bandwidth_hz=2 * params.bandwidth_hz)
        self.assertGreater(achievable_rate(wider), achievable_rate(params))

    def test_invalid_bandwidth(self):
        with self.assertRaises(InvalidArgument):
            ChannelParams(bandwidth_hz=0.0)


class LatencyTests(SimpleTestCase):
    def test_arithmetic(self):
        self.assertEqual(latency(4, ChannelParams(q_bits=2), 8.0), 1.0)

    def test_empty_payload(self):
        self.assertEqual(latency(0, ChannelParams(), 1e6), 0.0)

    def test_level_ratios(self):
        params = ChannelParams()
        rate = achievable_rate(params)
        visual, intermediate, semantic = (latency(n, params, rate) for n in (1024, 15, 85))
        self.assertAlmostEqual(visual / intermediate, 1074.4 / 15.7, delta=0.01 * 1074.4 / 15.7)
        self.assertAlmostEqual(semantic / intermediate, 89.2 / 15.7, delta=0.01 * 89.2 / 15.7)

    def test_zero_rate(self):
        with self.assertRaises(ZeroRate):
            latency(1, ChannelParams(), 0.0)

    def test_negative_elements(self):
        with self.assertRaises(InvalidArgument):
            latency(-1, ChannelParams(), 1.0)
