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
  multicast_evt.nb_dist
  =====================

  Negative-binomial engine. A random variable X ~ NB(m, p) counts the slots
  needed to collect `m` successes when every slot fails independently with
  probability `p`; its support is {m, m+1, ...}.

  The module provides the exact law (pmf, cdf, survival arrays), the
  continuous envelopes used to work with real-valued levels, the asymptotic
  tail formulas and certified evaluations of the auxiliary sums that control
  the dependence between leaves.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple
from warnings import warn

import numpy as np
from scipy import special

from .special_fn import (DEFAULT_ACCURACY, ConvergenceError, gauss_2f1_series,
                         log_gamma, reg_inc_beta)

__all__ = ['NBParams', 'AsymptoticWarning', 'CertifiedSum', 'GeneralTail', 'TailConstant',
           'nb_log_pmf', 'nb_pmf', 'nb_cdf', 'nb_mean', 'nb_sf', 'nb_cdf_table',
           'nb_ext_log_pmf', 'anderson_envelope', 'nb_tail_envelope', 'tail_constant',
           'asymptotic_tail_general', 'asymptotic_tail_stirling',
           'factorial_moment_sum', 'factorial_moment_bound', 'min_pgf_sum', 'min_pgf_bound',
           'iid_max_cdf', 'iid_max_mean']

# Survival values below this threshold do not change F^n in double precision
_TINY_TAIL = 1e-300
_CHUNK = 256


class AsymptoticWarning(UserWarning):
    """
    An asymptotic formula is evaluated outside the range where it is reliable.
    """
    pass


@dataclass(frozen=True)
class NBParams:
    """
    Parameters of a negative-binomial variable.

    Parameters
    ----------
    m : int
        Number of required successes, m >= 1.
    p : float
        Failure (loss) probability of one slot, 0 < p < 1.
    """
    m: int
    p: float

    def __post_init__(self):
        if isinstance(self.m, bool) or int(self.m) != self.m or self.m < 1:
            raise ValueError("NBParams: m must be an integer >= 1, got %r"%(self.m,))
        if not 0.0 < self.p < 1.0:
            raise ValueError("NBParams: p must lie in (0, 1), got %r"%(self.p,))
        object.__setattr__(self, 'm', int(self.m))
        object.__setattr__(self, 'p', float(self.p))

    @property
    def log_inv_p(self):
        """ln(1/p), the natural unit of the tail decay."""
        return -math.log(self.p)


class CertifiedSum(NamedTuple):
    """Truncated series with a rigorous bound on the neglected remainder."""
    value: float
    remainder: float
    terms: int


class GeneralTail(NamedTuple):
    phi: float
    psi: float
    epsilon: float
    tail: float
    refined: float
    unreliable: bool


class TailConstant(NamedTuple):
    c_m: float
    c_limit: float
    b_tilde: float


def _check_integer_support(x, params, name):
    if int(x) != x:
        raise ValueError("%s: x must be an integer, got %r"%(name, x))
    if x < params.m:
        raise ValueError("%s: x=%r lies below the support minimum m=%i"%(name, x, params.m))

################################################################################
#
# Exact law
#
################################################################################
def nb_log_pmf(x, params):
    """
    ln Pr(X = x) = ln C(x-1, m-1) + (x-m) ln p + m ln(1-p).
    """
    _check_integer_support(x, params, 'nb_log_pmf')
    m, p = params.m, params.p
    return (log_gamma(x) - log_gamma(m) - log_gamma(x - m + 1)
            + (x - m) * math.log(p) + m * math.log1p(-p))


def nb_pmf(x, params):
    """
    Pr(X = x) for an integer x >= m.
    """
    return math.exp(nb_log_pmf(x, params))


def nb_ext_log_pmf(y, params):
    """
    Gamma extension of `nb_log_pmf` to real y > m - 1.
    """
    m, p = params.m, params.p
    if not y > m - 1:
        raise ValueError("nb_ext_log_pmf: y must exceed m - 1 = %i, got %r"%(m - 1, y))
    return (float(special.gammaln(y)) - log_gamma(m) - float(special.gammaln(y - m + 1))
            + (y - m) * math.log(p) + m * math.log1p(-p))


def nb_cdf(x, params, acc=DEFAULT_ACCURACY):
    """
    Pr(X <= x) = I_{1-p}(m, x - m + 1) for an integer x >= m.
    """
    _check_integer_support(x, params, 'nb_cdf')
    return reg_inc_beta(1.0 - params.p, params.m, x - params.m + 1, acc)


def nb_mean(params):
    """
    E[X] = m / (1 - p).
    """
    return params.m / (1.0 - params.p)


def nb_sf(x, params, acc=DEFAULT_ACCURACY):
    """
    Vectorized survival function Pr(X > x) for integer (array) x.
    Values below the support give 1.

    A scalar x goes through the same continued fraction as `nb_cdf`, so that
    nb_sf(x) and 1 - nb_cdf(x) agree to its accuracy; arrays use
    scipy.special.betainc.
    """
    x = np.asarray(x, dtype=float)
    m = params.m
    if x.ndim == 0:
        if x < m:
            return 1.0
        return reg_inc_beta(params.p, float(x) - m + 1.0, float(m), acc)
    a = np.maximum(x - m + 1.0, 1.0)
    sf = special.betainc(a, float(m), params.p)
    return np.where(x < m, 1.0, sf)


def nb_cdf_table(params, x_max):
    """
    Returns the support grid m..x_max and the cdf on it.
    """
    if x_max < params.m:
        raise ValueError("nb_cdf_table: x_max=%r lies below the support minimum"%(x_max,))
    support = np.arange(params.m, int(x_max) + 1)
    return support, 1.0 - nb_sf(support, params)

################################################################################
#
# Continuous envelopes
#
################################################################################
def anderson_envelope(cdf_values, x, support_min=0):
    r"""
    Continuous envelope of a discrete cdf obtained by linear interpolation
    of the hazard :math:`h[k] = -\ln(1 - F[k])`,
    :math:`F_c(x) = 1 - e^{-h_c(x)}`.

    Parameters
    ----------
    cdf_values : array
                 F[support_min], F[support_min + 1], ...
    x : float
        Point of evaluation inside the tabulated range.
    support_min : int, optional
                  Integer corresponding to the first entry of `cdf_values`.

    Returns
    -------
    value : float
            F_c(x); agrees with the table at the nodes and satisfies
            F_c(x - 1) <= F[floor(x)] <= F_c(x).
    """
    cdf = np.asarray(cdf_values, dtype=float)
    last = support_min + len(cdf) - 1
    if x < support_min:
        raise ValueError("anderson_envelope: x=%r lies below the support minimum %r"%(x, support_min))
    if x > last:
        raise ValueError("anderson_envelope: x=%r lies beyond the tabulated range (last node %r)"%(x, last))

    k = int(math.floor(x))
    frac = x - k
    i = k - support_min
    if frac == 0.0:
        return float(cdf[i])

    with np.errstate(divide='ignore'):
        h_lo = -math.log1p(-cdf[i]) if cdf[i] < 1.0 else math.inf
        h_hi = -math.log1p(-cdf[i + 1]) if cdf[i + 1] < 1.0 else math.inf
    if math.isinf(h_hi):
        return 1.0
    h = (1.0 - frac) * h_lo + frac * h_hi
    return -math.expm1(-h)


def nb_tail_envelope(x, params, acc=DEFAULT_ACCURACY):
    r"""
    Continuous tail :math:`\bar F_c(x) = I_p(x - m + 1, m)` for real
    :math:`x > m - 1`. At integers it equals Pr(X > x).
    """
    m = params.m
    if not x > m - 1:
        raise ValueError("nb_tail_envelope: x must exceed m - 1 = %i, got %r"%(m - 1, x))
    return reg_inc_beta(params.p, x - m + 1.0, float(m), acc)


def tail_constant(params, a, d, acc=DEFAULT_ACCURACY):
    r"""
    Ratio :math:`C_m = \Pr(X > \tilde b)/\Pr(X = \tilde b + 1)` at the level
    :math:`\tilde b = a m + d`, with the gamma-extended pmf for real levels.
    It equals :math:`{}_2F_1(1, \tilde b + 1; \tilde b - m + 2; p)`.

    Returns
    -------
    TailConstant(c_m, c_limit, b_tilde)
        `c_limit` is the large-m limit 1/(1 - a p/(a - 1)).
    """
    m, p = params.m, params.p
    if not a > 1.0 / (1.0 - p):
        raise ValueError("tail_constant: a must exceed 1/(1-p) = %r, got %r"%(1.0 / (1.0 - p), a))
    b_tilde = a * m + d
    if not b_tilde > m - 1:
        raise ValueError("tail_constant: level a*m + d = %r lies outside the support"%(b_tilde,))
    c_m = gauss_2f1_series(1.0, b_tilde + 1.0, b_tilde - m + 2.0, p, acc)
    delta = a * p / (a - 1.0)
    return TailConstant(c_m, 1.0 / (1.0 - delta), b_tilde)

################################################################################
#
# Asymptotic tails
#
################################################################################
def asymptotic_tail_general(n, m_n, alpha, x, p, warn_threshold=0.5, acc=DEFAULT_ACCURACY):
    r"""
    Tail of NB(m_n, p) at the level

    .. math:: \varphi(n) = \alpha L + (m_n - 1)\log_{1/p}(\tfrac{1-p}{p}\Psi_\alpha)
              - \log_{1/p}((m_n - 1)!) + x,

    with :math:`L = \log_{1/p} n` and
    :math:`\Psi_\alpha = \alpha L + (m_n - 1)\log_{1/p}\tfrac{1-p}{p}`.

    The approximation reads :math:`p^x n^{-\alpha}\varepsilon(n)` with
    :math:`\varepsilon(n) = \prod_{j<m_n}(\varphi - j)/\Psi_\alpha^{m_n}`
    for :math:`m_n > 1`; for :math:`m_n = 1` the tail is exact and
    :math:`\varepsilon(n) = 1`.
    `refined` carries the exact envelope tail at :math:`\varphi`.
    `unreliable` is set (and an `AsymptoticWarning` issued) when
    :math:`|\varepsilon(n) - 1|` exceeds `warn_threshold`.

    Returns
    -------
    GeneralTail(phi, psi, epsilon, tail, refined, unreliable)
    """
    if n <= 1:
        raise ValueError("asymptotic_tail_general: n must exceed 1, got %r"%(n,))
    if int(m_n) != m_n or m_n < 1:
        raise ValueError("asymptotic_tail_general: m_n must be an integer >= 1, got %r"%(m_n,))
    if not alpha > 0.0:
        raise ValueError("asymptotic_tail_general: alpha must be positive, got %r"%(alpha,))
    if not 0.0 < p < 1.0:
        raise ValueError("asymptotic_tail_general: p must lie in (0, 1), got %r"%(p,))

    m_n = int(m_n)
    log_inv_p = -math.log(p)
    log_n = math.log(n)
    big_l = log_n / log_inv_p
    ratio = (1.0 - p) / p

    psi = alpha * big_l + (m_n - 1) * math.log(ratio) / log_inv_p
    if not psi > 0.0:
        raise ValueError("asymptotic_tail_general: Psi(m_n) = %r is not positive; "
                         "n is too small for m_n=%i at p=%r"%(psi, m_n, p))
    phi = (alpha * big_l + (m_n - 1) * math.log(ratio * psi) / log_inv_p
           - math.lgamma(m_n) / log_inv_p + x)

    factors = [(phi - j) / psi for j in range(m_n)]
    if m_n == 1:
# Geometric law: Pr(X > phi) = p^phi = p^x n^-alpha exactly
        epsilon = 1.0
    elif all(f > 0.0 for f in factors):
        epsilon = math.exp(math.fsum(math.log(f) for f in factors))
    else:
        epsilon = math.prod(factors)
    tail = math.exp(x * math.log(p) - alpha * log_n) * epsilon

    if phi > m_n - 1:
        refined = nb_tail_envelope(phi, NBParams(m_n, p), acc)
    else:
        refined = math.nan

    unreliable = not abs(epsilon - 1.0) <= warn_threshold
    if unreliable:
        warn("asymptotic_tail_general: epsilon(n) = %.4g deviates from 1 by more than %g "
             "(n=%r, m_n=%i, p=%r)"%(epsilon, warn_threshold, n, m_n, p), AsymptoticWarning)

    return GeneralTail(phi, psi, epsilon, tail, refined, unreliable)


def asymptotic_tail_stirling(m, a, d, p, acc=DEFAULT_ACCURACY):
    r"""
    Stirling form of the tail Pr(X > a m + d) for X ~ NB(m, p):

    .. math:: C_m A^m \delta^d m^{-1/2} (a - 1)^{-1} \sqrt{\delta p / 2\pi},

    with :math:`A = a^a (a-1)^{1-a} p^{a-1} (1-p)` and :math:`\delta = a p/(a-1)`.
    """
    params = NBParams(m, p)
    c_m = tail_constant(params, a, d, acc).c_m
    delta = a * p / (a - 1.0)
    log_a = (a * math.log(a) - (a - 1.0) * math.log(a - 1.0)
             + (a - 1.0) * math.log(p) + math.log1p(-p))
    log_value = (math.log(c_m) + m * log_a + d * math.log(delta) - 0.5 * math.log(m)
                 - math.log(a - 1.0) + 0.5 * math.log(delta * p / (2.0 * math.pi)))
    return math.exp(log_value)

################################################################################
#
# Certified auxiliary sums
#
################################################################################
def factorial_moment_sum(params, acc=DEFAULT_ACCURACY):
    r"""
    Certified evaluation of :math:`\sum_k f[k] \prod_{j=0}^{m-1}(k - j)`.

    The summand ratio :math:`p\,k(k+1)/(k-m+1)^2` decreases in k, so once it
    drops below one the remainder is bounded by a geometric series.
    """
    m, p = params.m, params.p
    log_p = math.log(p)
    total = 0.0
    for terms, k in enumerate(range(m, m + acc.max_terms), start=1):
        log_term = nb_log_pmf(k, params) + math.lgamma(k + 1) - math.lgamma(k - m + 1)
        term = math.exp(log_term)
        total += term
        ratio = math.exp(log_p + math.log(k) + math.log(k + 1) - 2.0 * math.log(k - m + 1))
        if ratio < 1.0:
            remainder = term * ratio / (1.0 - ratio)
            if remainder <= acc.rel_tol * total:
                return CertifiedSum(total, remainder, terms)
    raise ConvergenceError("factorial_moment_sum: no convergence for %r"%(params,), terms=acc.max_terms)


def factorial_moment_bound(params):
    r"""
    Upper bound :math:`(2m-1)! / ((m-1)! (1-p)^m)` on `factorial_moment_sum`.
    """
    m, p = params.m, params.p
    return math.exp(math.lgamma(2 * m) - math.lgamma(m) - m * math.log1p(-p))


def min_pgf_sum(params, acc=DEFAULT_ACCURACY):
    r"""
    Certified evaluation of :math:`\sum_k p^{-k} \Pr(\min(Z_1, Z_2) = k)` for
    two independent copies of Z ~ NB(m, p), with
    :math:`\Pr(\min = k) = \bar F[k-1]^2 - \bar F[k]^2`.
    """
    m, p = params.m, params.p
    log_inv_p = params.log_inv_p
    total = 0.0
    terms = 0
    k0 = m
    while terms < acc.max_terms:
        ks = np.arange(k0, k0 + _CHUNK)
        sf_prev = nb_sf(ks - 1, params)
        sf_curr = nb_sf(ks, params)
        log_weight = ks * log_inv_p
        probs = sf_prev**2 - sf_curr**2
        chunk = np.exp(log_weight + np.log(np.maximum(probs, _TINY_TAIL)))
        chunk[probs <= 0.0] = 0.0
        for k, term in zip(ks, chunk):
            total += term
            terms += 1
            j = k + 1
# Bound of the remainder from j on: u_j / (1 - rho_j)
            r_f = p * j / (j - m + 1.0)
            rho = p * (j / (j - m + 1.0))**2
            if r_f < 1.0 and rho < 1.0:
                log_u = (j * log_inv_p + 2.0 * nb_log_pmf(int(j), params)
                         - 2.0 * math.log1p(-r_f))
                remainder = math.exp(log_u) / (1.0 - rho)
                if remainder <= acc.rel_tol * total:
                    return CertifiedSum(total, remainder, terms)
        k0 += _CHUNK
    raise ConvergenceError("min_pgf_sum: no convergence for %r"%(params,), terms=terms)


def min_pgf_bound(params):
    """
    Upper bound 2 (4/p)^m on `min_pgf_sum`.
    """
    return 2.0 * (4.0 / params.p)**params.m

################################################################################
#
# Maximum of n i.i.d. copies
#
################################################################################
def iid_max_cdf(x, n, params):
    """
    Pr(max of n i.i.d. NB(m, p) <= x) = F[x]^n, vectorized in x.
    """
    sf = nb_sf(x, params)
    with np.errstate(divide='ignore'):
        return np.exp(n * np.log1p(-sf))


def iid_max_mean(n, params, acc=DEFAULT_ACCURACY):
    r"""
    Exact expectation of the maximum of `n` i.i.d. NB(m, p) variables,
    :math:`m + \sum_{x \ge m} (1 - F[x]^n)`.

    The remainder after x = K is bounded by :math:`n \bar F[K+1]/(1 - r)`
    with r the pmf ratio at K + 1.
    """
    if int(n) != n or n < 1:
        raise ValueError("iid_max_mean: n must be a positive integer, got %r"%(n,))
    m, p = params.m, params.p
    parts = [float(m)]
    x0 = m
    terms = 0
    while terms < acc.max_terms:
        xs = np.arange(x0, x0 + _CHUNK)
        sf = nb_sf(xs, params)
        parts.extend((-np.expm1(n * np.log1p(-sf))).tolist())
        terms += _CHUNK
        j = xs[-1] + 1
        r_f = p * j / (j - m + 1.0)
        if r_f < 1.0:
            total = math.fsum(parts)
            remainder = n * float(nb_sf(j, params)) / (1.0 - r_f)
            if remainder <= acc.rel_tol * total:
                return total
        x0 += _CHUNK
    raise ConvergenceError("iid_max_mean: no convergence for n=%r, %r"%(n, params), terms=terms)
