r"""
Tests of the joint tails of subtree maxima and of the dependence sums.
"""
import math

import evttest
import numpy as np
from scipy import stats
from multicast_evt.evt_diagnostics import (JointTailQuery, dprime_alpha_n, growing_k_dprime_sum,
                                           joint_tail_bound, joint_tail_exact, pair_tail)
from multicast_evt.nb_dist import NBParams, nb_sf

################################################################################
#
# TestJointTailQuery
#
################################################################################
class TestJointTailQuery(evttest.EvtTestCase):
    """
    Class:

    JointTailQuery(n, k_n, i, x, p)

    Scenarios:

    - **if** i is outside 1..log_K k_n - 1 **raise** ValueError
    - **if** k_n is not a power of K or exceeds n **raise** ValueError
    - **return** m = log_K k_n and a level growing with x
    """
# Scenario 1
    def test_bad_i(self):
        for i in (0, 4):
            with self.assertRaises(ValueError):
                JointTailQuery(2**12, 16, i)

# Scenario 2
    def test_bad_kn(self):
        with self.assertRaises(ValueError):
            JointTailQuery(2**12, 12, 1)
        with self.assertRaises(ValueError):
            JointTailQuery(2**4, 2**5, 1)

# Scenario 3
    def test_level(self):
        q0 = JointTailQuery(2**12, 16, 2)
        q1 = JointTailQuery(2**12, 16, 2, x=1.5)
        self.assertEqual(q0.m, 4)
        self.assertAlmostEqual(q1.level - q0.level, 1.5, places=12)

################################################################################
#
# TestPairTail
#
################################################################################
class TestPairTail(evttest.EvtTestCase):
    """
    Function:

    def pair_tail(shared, separate, u, p, trunc_tol, envelope)
    def joint_tail_exact(q)

    Scenarios:

    - **if** shared = 0 **return** Pr(Z > u)^2
    - **if** n = 2^8, k_n = 8, i = 1, p = 0.3 **return** the brute-force double sum
    - **return** joint tails decreasing in x
    - **if** the envelope is used **return** a value not above the integer one
    """
# Scenario 1
    def test_independent(self):
        params = NBParams(3, 0.2)
        expected = float(nb_sf(9, params))**2
        self.assertRelClose(pair_tail(0, 3, 9.4, 0.2), expected, 1e-12)

# Scenario 2
    def test_brute_force(self):
        p = 0.3
        q = JointTailQuery(2**8, 8, 1, p=p)
        u = q.level
        w = np.arange(2, 300)
        pmf_w = stats.nbinom.pmf(w - 2, 2, 1.0 - p)
        z = np.arange(1, 300)
        sf_z = stats.nbinom.sf(z - 1, 1, 1.0 - p)
        sf_prev = stats.nbinom.sf(z - 2, 1, 1.0 - p)
        pmf_min = sf_prev**2 - sf_z**2
        total = math.fsum((pmf_w[:, None] * pmf_min[None, :] * (w[:, None] + z[None, :] > u)).ravel().tolist())
        self.assertRelClose(joint_tail_exact(q), total, 1e-9)

# Scenario 3
    def test_decreasing_in_x(self):
        values = [joint_tail_exact(JointTailQuery(2**12, 16, 2, x=x, p=0.1)) for x in (-1.0, 0.0, 1.0, 2.0)]
        self.assertTrue(all(a > b for a, b in zip(values, values[1:])))

# Scenario 4
    def test_envelope(self):
        for x in (0.0, 0.3, 0.7):
            q_int = JointTailQuery(2**16, 16, 2, x=x, p=0.1)
            q_env = JointTailQuery(2**16, 16, 2, x=x, p=0.1, envelope=True)
            self.assertLessEqual(joint_tail_exact(q_env), joint_tail_exact(q_int) * (1.0 + 1e-12))

################################################################################
#
# TestJointTailBound
#
################################################################################
class TestJointTailBound(evttest.EvtTestCase):
    """
    Function:

    def joint_tail_bound(q, alpha)

    Scenarios:

    - **if** n in {2^12, 2^16, 2^20}, k_n = 16, p = 0.1 **return** a bound above the exact joint tail
    - **if** K = 3 **return** a bound above the exact joint tail
    - **return** the dropped (1 + o(1)) factor flagged
    """
# Scenario 1
    def test_bound_above_exact(self):
        for n in (2**12, 2**16, 2**20):
            for i in (1, 2, 3):
                q = JointTailQuery(n, 16, i, p=0.1)
                self.assertGreaterEqual(joint_tail_bound(q).value, joint_tail_exact(q),
                                        msg="n=%r i=%r"%(n, i))

# Scenario 2
    def test_flag(self):
        self.assertTrue(joint_tail_bound(JointTailQuery(2**12, 16, 1)).remainder_dropped)

# Scenario 3
    def test_ternary(self):
        for n in (3**8, 3**12):
            for i in (1, 2):
                q = JointTailQuery(n, 27, i, p=0.1, K=3)
                self.assertEqual(q.m, 3)
                self.assertGreaterEqual(joint_tail_bound(q).value, joint_tail_exact(q),
                                        msg="n=%r i=%r"%(n, i))

################################################################################
#
# TestDependenceSums
#
################################################################################
class TestDependenceSums(evttest.EvtTestCase):
    """
    Function:

    def dprime_alpha_n(n, k_n, p, x, method)
    def growing_k_dprime_sum(n, h, p, x)

    Scenarios:

    - **if** log_K k_n < 2 **return** 0
    - **return** the exact sum below the analytic one
    - **if** the height is fixed and n grows **return** an increasing growing-degree sum
    - **if** the method is unknown or h < 2 or n is not an h-th power **raise** ValueError
    - **if** n doubles from 2^12 to 2^20 at k_n = 16 **return** a strictly decreasing exact sum
    """
# Scenario 1
    def test_no_pairs(self):
        self.assertEqual(dprime_alpha_n(2**12, 2, 0.1), 0.0)

# Scenario 2
    def test_exact_below_bound(self):
        for n in (2**12, 2**16, 2**20):
            exact = dprime_alpha_n(n, 16, 0.1, method='exact')
            bound = dprime_alpha_n(n, 16, 0.1, method='bound')
            self.assertGreater(exact, 0.0)
            self.assertLessEqual(exact, bound)

# Scenario 3
    def test_growing_degree(self):
        values = [growing_k_dprime_sum(2**e, 2, 0.1) for e in range(8, 21, 2)]
        self.assertTrue(all(a < b for a, b in zip(values, values[1:])))

# Scenario 4
    def test_errors(self):
        with self.assertRaises(ValueError):
            dprime_alpha_n(2**12, 16, 0.1, method='other')
        with self.assertRaises(ValueError):
            growing_k_dprime_sum(2**8, 1, 0.1)
        with self.assertRaises(ValueError):
            growing_k_dprime_sum(10, 2, 0.1)

# Scenario 5
    def test_decreasing_in_n(self):
        values = [dprime_alpha_n(2**e, 16, 0.1) for e in range(12, 21)]
        self.assertTrue(all(a > b for a, b in zip(values, values[1:])), msg=repr(values))
        self.assertGreater(values[-1], 0.0)
