r"""
Module defining a custom TestCase with extra functionality.
"""
import math
import unittest

import numpy as np

class EvtTestCase(unittest.TestCase):
    """
    TestCase comparing numpy arrays with np.allclose and floats with a
    relative tolerance.
    """
    def __init__(self, *args, **kwargs):
        super(EvtTestCase, self).__init__(*args, **kwargs)
        self.addTypeEqualityFunc(np.ndarray, self.is_arrays_equal)

    def is_arrays_equal(self, arr1, arr2, msg=None):
        """
        Raises self.failureException if arrays arr1 and arr2 are not close.
        """
        if not np.allclose(arr1, arr2):
            raise self.failureException(msg or "arrays differ:\n%s\n%s"%(arr1, arr2))

    def assertRelClose(self, value, expected, rel_tol=1e-9, msg=None):
        if not math.isclose(value, expected, rel_tol=rel_tol, abs_tol=0.0):
            raise self.failureException(msg or "%r != %r (rel_tol=%g)"%(value, expected, rel_tol))
