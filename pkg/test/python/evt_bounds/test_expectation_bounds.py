r"""
Tests of the normalizing sequences and of the bounds on the expected
completion time.
"""
import math
import warnings

import evttest
import numpy as np
from multicast_evt.evt_bounds import (EULER_GAMMA, alpha_target, default_kn, delta_beta,
                                      expectation_bounds, growing_k_bounds, gumbel_sandwich,
                                      lower_bn, scaling_constants, solve_alpha, sufficiency_ratio,
                                      tail_normalizer, tail_time_bound, upper_bn)
from multicast_evt.nb_dist import AsymptoticWarning, NBParams, iid_max_mean, nb_tail_envelope
from multicast_evt.tree_sim import TreeSpec, iid_max_table

################################################################################
#
# TestNormalizers
#
################################################################################
class TestNormalizers(evttest.EvtTestCase):
    """
    Function:

    def upper_bn(n, p, M, K)
    def tail_normalizer(n, m, p, variant)
    def lower_bn(n, k_n, p, M, K, variant, ratio_threshold)

    Scenarios:

    - **if** p = 0.1 **return** upper b_n = 15.54 (n = 2^10) and 33.19 (n = 2^20)
    - **if** n = 2^20, p = 0.1 **return** n Pr(NB(20, p) > b_n + x) close to delta^x
    - **if** m = 1 **return** log_{1/p} n
    - **if** n grows **return** hat and standard normalizers approaching each other
    - **if** Psi <= 0 or the variant is unknown **raise** ValueError
    - **if** the sufficiency ratio exceeds the threshold **issue** AsymptoticWarning
    - **if** k_n is not a power of K or exceeds n **raise** ValueError
    - **if** M = 2 or K = 4 **return** n Pr(NB(M log_K n, p) > b_n + x) within [0.7, 1.4] delta^x
    - **if** n = 2^20, k_n = 2^7, p = 0.1 **return** n Pr(NB(7, p) > lower b_n) within [0.5, 2]
    - **if** n grows at fixed m = 7 **return** n Pr(NB(7, p) > lower b_n) decreasing towards 1
    """
# Scenario 1
    def test_upper_values(self):
        self.assertAlmostEqual(upper_bn(2**10, 0.1), 15.54, places=2)
        self.assertAlmostEqual(upper_bn(2**20, 0.1), 33.19, places=2)

# Scenario 2
    def test_upper_limit(self):
        n, p = 2**20, 0.1
        b_n = upper_bn(n, p)
        delta = 0.22689
        for x in (-1.0, 0.0, 1.0):
            ratio = n * nb_tail_envelope(b_n + x, NBParams(20, p)) / delta**x
            self.assertLess(abs(ratio - 1.0), 0.05, msg="x=%r ratio=%r"%(x, ratio))

# Scenario 3
    def test_geometric(self):
        n, p = 2**12, 0.3
        self.assertRelClose(tail_normalizer(n, 1, p), math.log(n) / math.log(1.0 / p), 1e-12)

# Scenario 4
    def test_hat_converges(self):
        diffs = [abs(tail_normalizer(2.0**e, 4, 0.1, 'hat') - tail_normalizer(2.0**e, 4, 0.1))
                 for e in (20, 40, 80, 160)]
        self.assertTrue(all(a > b for a, b in zip(diffs, diffs[1:])))

# Scenario 5
    def test_errors(self):
        with self.assertRaises(ValueError):
            tail_normalizer(2, 10, 0.9)
        with self.assertRaises(ValueError):
            tail_normalizer(2**10, 3, 0.1, 'other')

# Scenario 6
    def test_sufficiency_warning(self):
        with self.assertWarns(AsymptoticWarning):
            b_n = lower_bn(2**20, 2**7, 0.1)
        self.assertRelClose(b_n, tail_normalizer(2**20, 7, 0.1))
        with warnings.catch_warnings():
            warnings.simplefilter('error', AsymptoticWarning)
            lower_bn(2**20, 2, 0.1)

# Scenario 7
    def test_bad_kn(self):
        with self.assertRaises(ValueError):
            lower_bn(2**10, 6, 0.1)
        with self.assertRaises(ValueError):
            lower_bn(2**10, 2**11, 0.1)

# Scenario 8
    def test_upper_limit_general(self):
        n, p = 2**20, 0.1
        for M, K in ((2, 2), (1, 4)):
            m = M * round(math.log(n, K))
            b_n = upper_bn(n, p, M, K)
            delta, _ = delta_beta(p, solve_alpha(p, alpha_target(M, K)).alpha)
            for x in (-1.0, 0.0, 1.0):
                ratio = n * nb_tail_envelope(b_n + x, NBParams(m, p)) / delta**x
                self.assertTrue(0.7 <= ratio <= 1.4, msg="M=%i K=%i x=%r ratio=%r"%(M, K, x, ratio))

# Scenario 9
    def test_lower_level(self):
        n, p = 2**20, 0.1
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', AsymptoticWarning)
            b_n = lower_bn(n, 2**7, p)
        ratio = n * nb_tail_envelope(b_n, NBParams(7, p))
        self.assertTrue(0.5 <= ratio <= 2.0, msg="ratio=%r"%(ratio,))

# Scenario 10
    def test_lower_level_trend(self):
        p = 0.1
        ratios = []
        for e in (80, 160, 320, 640):
            n = 2**e
            ratios.append(n * nb_tail_envelope(tail_normalizer(n, 7, p), NBParams(7, p)))
        self.assertTrue(all(a > b > 1.0 for a, b in zip(ratios, ratios[1:])), msg=repr(ratios))
        self.assertLess(ratios[-1], 1.4)

################################################################################
#
# TestDefaultKn
#
################################################################################
class TestDefaultKn(evttest.EvtTestCase):
    """
    Function:

    def sufficiency_ratio(n, m)
    def default_kn(n, K, M, threshold)

    Scenarios:

    - **if** ln n <= 1 **return** an infinite ratio
    - **if** n = 2^20 **return** k_n = 2
    - **if** n = 2^60 **return** k_n = 4
    - **if** n is not a power of K **raise** ValueError
    """
# Scenario 1
    def test_small_n(self):
        self.assertEqual(sufficiency_ratio(2, 1), math.inf)

# Scenario 2
    def test_moderate_n(self):
        self.assertEqual(default_kn(2**20), 2)

# Scenario 3
    def test_large_n(self):
        self.assertEqual(default_kn(2**60), 4)

# Scenario 4
    def test_not_power(self):
        with self.assertRaises(ValueError):
            default_kn(1000)

################################################################################
#
# TestExpectationBounds
#
################################################################################
class TestExpectationBounds(evttest.EvtTestCase):
    """
    Function:

    def expectation_bounds(spec, k_n)
    def gumbel_sandwich(b_n, base)

    Scenarios:

    - **if** N = 4..23, p in {0.1, 0.2, 0.5} **return** lower_trivial <= lower_main <= upper_main
    - **if** N = 10, p = 0.1 **return** the exact i.i.d. mean inside the Gumbel sandwich
    - **if** the sufficiency ratio is large **return** a flagged report
    - **return** sandwiches of width one starting at b_n + gamma/ln(1/base) and cdf limits
      exp(-base^(x-1)) <= exp(-base^x)
    - **if** k_n exceeds n **raise** ValueError
    """
# Scenario 1
    def test_ordering(self):
        for p in (0.1, 0.2, 0.5):
            for N in range(4, 24):
                spec = TreeSpec.from_height(2, N, p)
                for kn in (None, 4, 7):
                    if kn is not None and kn >= N:
                        continue
                    rep = expectation_bounds(spec, None if kn is None else 2**kn)
                    msg = "p=%r N=%r kn=%r"%(p, N, kn)
                    self.assertLessEqual(rep.lower_trivial, rep.lower_main + 1e-12, msg=msg)
                    self.assertLessEqual(rep.lower_main, rep.upper_main, msg=msg)
                    self.assertEqual(rep.mode, 'constant_k')

# Scenario 2
    def test_iid_sandwich(self):
        spec = TreeSpec.from_height(2, 10, 0.1)
        rep = expectation_bounds(spec)
        sandwich = gumbel_sandwich(rep.b_n_upper, rep.delta)
        exact = iid_max_mean(spec.n, NBParams(spec.h, spec.p))
        self.assertAlmostEqual(sandwich.mean_lo, 15.93, places=2)
        self.assertAlmostEqual(sandwich.mean_hi, rep.upper_main, places=12)
        self.assertTrue(sandwich.mean_lo <= exact <= sandwich.mean_hi)

# Scenario 3
    def test_flags(self):
        rep = expectation_bounds(TreeSpec.from_height(2, 10, 0.1), 2**7)
        self.assertTrue(any(f.startswith('sufficiency_ratio=') for f in rep.flags))
        rep = expectation_bounds(TreeSpec.from_height(2, 10, 0.1))
        self.assertEqual(rep.k_n, 2)
        self.assertEqual(rep.flags, ())

# Scenario 4
    def test_sandwich(self):
        res = gumbel_sandwich(10.0, 0.25)
        self.assertRelClose(res.mean_lo, 10.0 + EULER_GAMMA / math.log(4.0))
        self.assertRelClose(res.mean_hi - res.mean_lo, 1.0)
        lo, hi = res.cdf_bounds(1.0)
        self.assertRelClose(lo, math.exp(-1.0))
        self.assertRelClose(hi, math.exp(-0.25))
        with self.assertRaises(ValueError):
            gumbel_sandwich(10.0, 1.0)

# Scenario 5
    def test_bad_kn(self):
        with self.assertRaises(ValueError):
            expectation_bounds(TreeSpec.from_height(2, 5, 0.1), 2**6)

################################################################################
#
# TestMonotonicity
#
################################################################################
class TestMonotonicity(evttest.EvtTestCase):
    """
    Function:

    def expectation_bounds(spec, k_n)
    def scaling_constants(p, alpha, M, K)

    Scenarios:

    - **if** the height grows at fixed k_n **return** non-decreasing lower and upper bounds
    - **if** the number of messages grows **return** non-decreasing lower and upper bounds
    - **if** the degree grows **return** decreasing scaling constants
    """
# Scenario 1
    def test_in_n(self):
        reports = [expectation_bounds(TreeSpec.from_height(2, N, 0.1), 4) for N in range(4, 24)]
        for prev, cur in zip(reports, reports[1:]):
            self.assertLessEqual(prev.lower_main, cur.lower_main)
            self.assertLessEqual(prev.upper_main, cur.upper_main)

# Scenario 2
    def test_in_m(self):
        reports = [expectation_bounds(TreeSpec.from_height(2, 10, 0.1, M), 4) for M in (1, 2, 3)]
        for prev, cur in zip(reports, reports[1:]):
            self.assertLessEqual(prev.lower_main, cur.lower_main)
            self.assertLessEqual(prev.upper_main, cur.upper_main)

# Scenario 3
    def test_in_k(self):
        p = 0.1
        consts = [scaling_constants(p, solve_alpha(p, alpha_target(1, K)).alpha, 1, K)
                  for K in (2, 3, 4, 8, 16)]
        for (lo0, hi0), (lo1, hi1) in zip(consts, consts[1:]):
            self.assertGreater(lo0, lo1)
            self.assertGreater(hi0, hi1)

################################################################################
#
# TestTailTime
#
################################################################################
class TestTailTime(evttest.EvtTestCase):
    """
    Function:

    def tail_time_bound(spec, epsilon, conservative)

    Scenarios:

    - **if** n = 2^10, p = 0.1, epsilon = 0.2 **return** T = 16.554
    - **if** conservative **return** T + 1, covering the exact i.i.d. quantile
    - **return** T decreasing in epsilon
    - **if** epsilon is outside (0, 1) **raise** ValueError
    """
    def setUp(self):
        self.spec = TreeSpec.from_height(2, 10, 0.1)

# Scenario 1
    def test_value(self):
        self.assertAlmostEqual(tail_time_bound(self.spec, 0.2), 16.554, places=2)

# Scenario 2
    def test_conservative(self):
        support, cdf = iid_max_table(self.spec.n, self.spec.h, self.spec.p)
        for eps in (0.01, 0.05, 0.1, 0.2):
            quantile = support[np.searchsorted(cdf, 1.0 - eps, side='left')]
            bound = tail_time_bound(self.spec, eps, conservative=True)
            self.assertRelClose(bound, tail_time_bound(self.spec, eps) + 1.0, 1e-12)
            self.assertLessEqual(quantile, bound)

# Scenario 3
    def test_monotone(self):
        values = [tail_time_bound(self.spec, eps) for eps in (0.01, 0.1, 0.5, 0.9)]
        self.assertTrue(all(a > b for a, b in zip(values, values[1:])))

# Scenario 4
    def test_bad_eps(self):
        with self.assertRaises(ValueError):
            tail_time_bound(self.spec, 0.0)

################################################################################
#
# TestGrowingDegree
#
################################################################################
class TestGrowingDegree(evttest.EvtTestCase):
    """
    Function:

    def growing_k_bounds(n, K_n, p, mode)

    Scenarios:

    - **if** mode = 'constant_h' **return** lower <= upper with the Gumbel term added
    - **if** mode = 'growing_h' **return** lower <= upper and the delta flag
    - **if** the mode is unknown or n is not a power of K_n **raise** ValueError
    """
# Scenario 1
    def test_constant_height(self):
        rep = growing_k_bounds(2**20, 2**10, 0.1, 'constant_h')
        self.assertEqual(rep.mode, 'constant_h')
        self.assertEqual(rep.k_n, 2**10)
        self.assertIn('gumbel_term_added', rep.flags)
        self.assertLessEqual(rep.lower_main, rep.upper_main)
        self.assertTrue(math.isnan(rep.alpha_root))

# Scenario 2
    def test_growing_height(self):
        for K_n, h in ((16, 5), (256, 3)):
            rep = growing_k_bounds(K_n**h, K_n, 0.1, 'growing_h')
            self.assertIn('delta_uses_alpha_p_over_alpha_minus_inv_log_k', rep.flags)
            self.assertLessEqual(rep.lower_main, rep.upper_main)
            self.assertTrue(0.0 < rep.delta < 1.0)

# Scenario 3
    def test_errors(self):
        with self.assertRaises(ValueError):
            growing_k_bounds(2**20, 2**10, 0.1, 'other')
        with self.assertRaises(ValueError):
            growing_k_bounds(1000, 16, 0.1)
