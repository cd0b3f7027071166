################################################################################
#
# multicast_evt: extreme-value bounds for reliable multicast trees
#
# Copyright (C) 2026 The multicast_evt developers
#
# multicast_evt is free software: you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by the Free
# Software Foundation, either version 3 of the License, or (at your option)
# any later version.
#
# multicast_evt is distributed in the hope that it will be useful, but WITHOUT
# ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS
# FOR A PARTICULAR PURPOSE. See the GNU General Public License for more
# details.
#
# You should have received a copy of the GNU General Public License along with
# multicast_evt. If not, see <http://www.gnu.org/licenses/>.
#
################################################################################
r"""
  multicast_evt.special_fn
  ========================

  Special functions needed by the negative-binomial engine: log-gamma,
  log-beta, the regularized incomplete beta function and the Gauss
  hypergeometric series.

  All routines are pure functions of their arguments. Accuracy targets and
  iteration caps are passed in an `Accuracy` object.
"""
import math
from dataclasses import dataclass

from scipy import special

__all__ = ['Accuracy', 'ConvergenceError', 'DEFAULT_ACCURACY',
           'log_gamma', 'log_beta', 'reg_inc_beta', 'gauss_2f1_series']

# Floor used by the modified Lentz algorithm to avoid division by zero
_FPMIN = 1.0e-300
_EPS = 2.220446049250313e-16


class ConvergenceError(ArithmeticError):
    """
    Raised when a series or a continued fraction does not reach the requested
    accuracy within the allowed number of terms.
    """
    def __init__(self, message, terms=None):
        super(ConvergenceError, self).__init__(message)
        self.terms = terms


@dataclass(frozen=True)
class Accuracy:
    """
    Accuracy target of iterative evaluations.

    Parameters
    ----------
    rel_tol : float
              Relative tolerance on the returned value.
    max_terms : int
                Maximal number of series terms or continued-fraction steps.
    """
    rel_tol: float = 1e-12
    max_terms: int = 10**7

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise ValueError("Accuracy: rel_tol must be positive, got %r"%(self.rel_tol,))
        if self.max_terms < 1:
            raise ValueError("Accuracy: max_terms must be at least 1, got %r"%(self.max_terms,))

    @property
    def stop_tol(self):
        """Internal stopping tolerance, two digits tighter than `rel_tol`."""
        return max(self.rel_tol * 1e-2, 4 * _EPS)


DEFAULT_ACCURACY = Accuracy()

################################################################################
#
# log_gamma()
#
################################################################################
def log_gamma(x):
    """
    Natural logarithm of the Gamma function for `x > 0`.
    """
    if not (x > 0.0 and math.isfinite(x)):
        raise ValueError("log_gamma: argument must be positive and finite, got %r"%(x,))
    return float(special.gammaln(x))

################################################################################
#
# log_beta()
#
################################################################################
def log_beta(a, b):
    """
    Natural logarithm of the Beta function B(a, b) = G(a) G(b) / G(a + b).
    """
    if not (a > 0.0 and b > 0.0):
        raise ValueError("log_beta: arguments must be positive, got (%r, %r)"%(a, b))
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("log_beta: arguments must be finite, got (%r, %r)"%(a, b))
    return float(special.betaln(a, b))

################################################################################
#
# gauss_2f1_series()
#
################################################################################
def gauss_2f1_series(a, b, c, z, acc=DEFAULT_ACCURACY):
    r"""
    Gauss hypergeometric function :math:`{}_2F_1(a, b; c; z)` summed as a
    power series for :math:`0 \le z < 1`.

    Summation stops once the current term is smaller than `acc.rel_tol`
    times the partial sum and the terms are decreasing in magnitude.

    Parameters
    ----------
    a, b, c : float
              Parameters; `c` must not be zero or a negative integer.
    z : float
        Argument in [0, 1).
    acc : Accuracy, optional

    Returns
    -------
    value : float
    """
    if c <= 0 and float(c).is_integer():
        raise ValueError("gauss_2f1_series: c must not be a non-positive integer, got %r"%(c,))
    if not 0.0 <= z < 1.0:
        raise ValueError("gauss_2f1_series: z must lie in [0, 1), got %r"%(z,))

    total = 1.0
    term = 1.0
    prev = math.inf
    tol = acc.stop_tol
    for k in range(acc.max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total += term
        if term == 0.0:
            return total
        if abs(term) <= tol * abs(total) and abs(term) < abs(prev):
            return total
        prev = term

    raise ConvergenceError("gauss_2f1_series: no convergence after %i terms "
                           "(a=%r, b=%r, c=%r, z=%r)"%(acc.max_terms, a, b, c, z),
                           terms=acc.max_terms)

################################################################################
#
# reg_inc_beta()
#
################################################################################
def _beta_cont_frac(x, a, b, acc):
    """
    Continued fraction of the incomplete beta function evaluated with the
    modified Lentz algorithm.
    """
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    tol = acc.stop_tol
    for m in range(1, acc.max_terms + 1):
        m2 = 2 * m
# Even step
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
# Odd step
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            return h

    raise ConvergenceError("reg_inc_beta: continued fraction did not converge "
                           "(x=%r, a=%r, b=%r)"%(x, a, b), terms=acc.max_terms)


def _inc_beta_lower(x, a, b, acc):
    """
    I_x(a, b) on the side where the continued fraction converges fast.
    Falls back to the power series I_x = x^a (1-x)^b / (a B) 2F1(a+b, 1; a+1; x).
    """
    log_front = a * math.log(x) + b * math.log1p(-x) - log_beta(a, b)
    try:
        return math.exp(log_front) * _beta_cont_frac(x, a, b, acc) / a
    except ConvergenceError:
        pass
    try:
        return math.exp(log_front - math.log(a)) * gauss_2f1_series(a + b, 1.0, a + 1.0, x, acc)
    except ConvergenceError as err:
        raise ConvergenceError("reg_inc_beta: continued fraction and power series both "
                               "failed (x=%r, a=%r, b=%r)"%(x, a, b), terms=err.terms)


def reg_inc_beta(x, a, b, acc=DEFAULT_ACCURACY):
    r"""
    Regularized incomplete beta function :math:`I_x(a, b)`.

    The continued fraction is evaluated for :math:`x < (a+1)/(a+b+2)`, the
    symmetry :math:`I_x(a,b) = 1 - I_{1-x}(b,a)` is used otherwise.

    Parameters
    ----------
    x : float
        Argument in [0, 1].
    a, b : float
           Positive shape parameters.
    acc : Accuracy, optional

    Returns
    -------
    value : float
            A number in [0, 1].
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError("reg_inc_beta: x must lie in [0, 1], got %r"%(x,))
    if not (a > 0.0 and b > 0.0):
        raise ValueError("reg_inc_beta: a and b must be positive, got (%r, %r)"%(a, b))

    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0

    if x < (a + 1.0) / (a + b + 2.0):
        value = _inc_beta_lower(x, a, b, acc)
    else:
        value = 1.0 - _inc_beta_lower(1.0 - x, b, a, acc)
    return min(1.0, max(0.0, value))
