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
  multicast_evt.evt_bounds
  ========================

  Extreme-value bounds on the expected completion time of a K-ary multicast
  tree.

  The upper bound replaces the tree by the maximum of n i.i.d. NB(M log_K n, p)
  variables and rests on the normalizing sequence

  .. math:: b_n = \alpha m + \log_\delta\sqrt{m} + \beta, \quad m = M\log_K n,

  where alpha is the root of g_p(alpha) = 0 to the right of 1/(1-p).
  The lower bound cuts the tree at subtrees of k_n leaves, bounds the shared
  top by its mean and the bottom by a Gumbel sandwich with the normalizer of
  a NB(M log_K k_n, p) tail.
"""
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Tuple
from warnings import warn

import numpy as np
from scipy import optimize

from .nb_dist import AsymptoticWarning
from .tree_sim import TreeSpec, integer_log

__all__ = ['EULER_GAMMA', 'InfeasibleRootError', 'RootSolution', 'GumbelSandwich',
           'BoundsReport', 'RootWindow', 'alpha_target', 'g_value', 'solve_alpha',
           'alpha_star_lower_exists', 'solve_alpha_growing', 'delta_beta', 'psi',
           'sufficiency_ratio', 'default_kn', 'tail_normalizer', 'upper_bn', 'lower_bn',
           'scaling_constants', 'gumbel_sandwich',
           'expectation_bounds', 'tail_time_bound', 'growing_k_bounds',
           'large_m_root_window']

EULER_GAMMA = float(np.euler_gamma)

_ETA = 1e-9
_MAX_DOUBLINGS = 200


class InfeasibleRootError(ValueError):
    """
    The root equation has no solution to the right of its maximum.
    """
    pass


class RootSolution(NamedTuple):
    alpha: float
    target: float
    residual: float
    bracket: Tuple[float, float]


class RootWindow(NamedTuple):
    lo: float
    hi: float
    exponent: Optional[float]
    alpha: float
    inside: bool


@dataclass(frozen=True)
class GumbelSandwich:
    """
    Limits of the expected maximum: mean_lo = b_n + gamma/ln(1/base) and
    mean_hi = mean_lo + 1.
    """
    b_n: float
    base: float
    mean_lo: float
    mean_hi: float

    def cdf_bounds(self, x):
        """
        Limits exp(-base^(x-1)) and exp(-base^x) of Pr(max <= b_n + x).
        """
        return math.exp(-self.base**(x - 1.0)), math.exp(-self.base**x)


@dataclass(frozen=True)
class BoundsReport:
    spec: TreeSpec
    k_n: Optional[int]
    alpha_root: float
    delta: float
    beta: float
    b_n_upper: float
    b_n_lower: float
    b_n_lower_hat: float
    lower_trivial: float
    lower_claim_a: float
    lower_main: float
    upper_main: float
    scaling_lo: float
    scaling_hi: float
    scaling_lo_log2: float
    scaling_hi_log2: float
    mode: str = 'constant_k'
    flags: Tuple[str, ...] = field(default_factory=tuple)


def _log_base(x, base):
    return math.log(x) / math.log(base)


def _log_k(n, K):
    h = integer_log(n, K)
    return float(h) if h is not None else _log_base(n, K)


def _check_p(p, name):
    if not 0.0 < p < 1.0:
        raise ValueError("%s: p must lie in (0, 1), got %r"%(name, p))

################################################################################
#
# Root of g_p
#
################################################################################
def alpha_target(M=1, K=2):
    """
    Right-hand side K^(-1/M) of the root equation for M messages on a K-ary tree.
    """
    return float(K)**(-1.0 / M)


def g_value(alpha, p, target):
    r"""
    :math:`g_p(\alpha) = \alpha^\alpha (\alpha-1)^{1-\alpha} p^{\alpha-1}(1-p)/t - 1`,
    evaluated in log space.
    """
    if alpha < 1.0:
        raise ValueError("g_value: alpha must be >= 1, got %r"%(alpha,))
    shifted = alpha - 1.0
    log_a = alpha * math.log(alpha) + shifted * math.log(p) + math.log1p(-p)
    if shifted > 0.0:
        log_a -= shifted * math.log(shifted)
    return math.expm1(log_a - math.log(target))


def _bisect_right_root(fun, lo):
    """
    Bisection of a function that is positive at `lo` and decreasing to the
    right of it.
    """
    if not fun(lo) > 0.0:
        return None
    hi = 2.0 * lo
    for it in range(_MAX_DOUBLINGS):
        if fun(hi) < 0.0:
            break
        hi *= 2.0
    else:
        raise InfeasibleRootError("no sign change found up to alpha=%r"%(hi,))
    root = optimize.bisect(fun, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return root, (lo, hi)


def solve_alpha(p, target=0.5):
    """
    Root of g_p(alpha) = 0 to the right of 1/(1-p).

    Parameters
    ----------
    p : float
        Loss probability.
    target : float
             Right-hand side K^(-1/M); 1/2 for a binary tree with one message.

    Returns
    -------
    RootSolution(alpha, target, residual, bracket)
    """
    _check_p(p, 'solve_alpha')
    if not target > 0.0:
        raise ValueError("solve_alpha: target must be positive, got %r"%(target,))
    if target >= 1.0:
        raise InfeasibleRootError("solve_alpha: g_p(1/(1-p)) = 1/target - 1 <= 0 for target=%r"%(target,))

    fun = lambda a: g_value(a, p, target)
    found = _bisect_right_root(fun, 1.0 / (1.0 - p) + _ETA)
    if found is None:
        raise InfeasibleRootError("solve_alpha: g_p is not positive right of its maximum "
                                  "(p=%r, target=%r)"%(p, target))
    alpha, bracket = found
    return RootSolution(alpha, target, fun(alpha), bracket)


def alpha_star_lower_exists(p, target=0.5):
    """
    True if g_p also vanishes left of its maximum, which happens for p > 1 - target.
    """
    return g_value(1.0, p, target) < 0.0


def solve_alpha_growing(p, K_n):
    r"""
    Root of the height-growing equation for a tree of degree K_n,

    .. math:: (\ln K)^{1/\ln K} \frac{a^a}{(a-1/\ln K)^{a-1/\ln K}}
              p^{a-1/\ln K}(1-p)^{1/\ln K} = e^{-1},

    to the right of its maximum at 1/((1-p)\ln K).
    """
    _check_p(p, 'solve_alpha_growing')
    if K_n < 2:
        raise ValueError("solve_alpha_growing: K_n must be >= 2, got %r"%(K_n,))
    inv_l = 1.0 / math.log(K_n)

    def fun(a):
        s = a - inv_l
        return (-inv_l * math.log(inv_l) + a * math.log(a) - s * math.log(s)
                + s * math.log(p) + inv_l * math.log1p(-p) + 1.0)

    found = _bisect_right_root(fun, inv_l / (1.0 - p) + _ETA)
    if found is None:
        raise InfeasibleRootError("solve_alpha_growing: no root for p=%r, K_n=%r"%(p, K_n))
    alpha, bracket = found
    return RootSolution(alpha, math.exp(-1.0), fun(alpha), bracket)


def delta_beta(p, alpha, shift=1.0):
    r"""
    :math:`\delta = \alpha p/(\alpha - s)` and
    :math:`\beta = \log_\delta(\sqrt{2\pi/(\delta p)}\,(\alpha - s)/C)`,
    :math:`C = 1/(1-\delta)`, with s = 1 for a fixed degree.
    """
    _check_p(p, 'delta_beta')
    if not alpha > shift:
        raise ValueError("delta_beta: alpha=%r must exceed %r"%(alpha, shift))
    delta = alpha * p / (alpha - shift)
    if not 0.0 < delta < 1.0:
        raise ValueError("delta_beta: delta=%r outside (0, 1); alpha=%r lies left of the maximum"
                         %(delta, alpha))
    big_c = 1.0 / (1.0 - delta)
    beta = math.log(math.sqrt(2.0 * math.pi / (delta * p)) * (alpha - shift) / big_c) / math.log(delta)
    return delta, beta

################################################################################
#
# Normalizing sequences
#
################################################################################
def psi(n, m, p, alpha=1.0):
    r"""
    :math:`\Psi_\alpha(m) = \alpha\log_{1/p} n + (m-1)\log_{1/p}\frac{1-p}{p}`.
    """
    log_inv_p = -math.log(p)
    return alpha * math.log(n) / log_inv_p + (m - 1) * math.log((1.0 - p) / p) / log_inv_p


def sufficiency_ratio(n, m):
    """
    m^2 ln ln n / ln n; the lower normalizer is accurate when this is small.
    """
    log_n = math.log(n)
    if log_n <= 1.0:
        return math.inf
    return m * m * math.log(log_n) / log_n


def default_kn(n, K=2, M=1, threshold=0.5):
    """
    Largest power k_n of K with sufficiency ratio of M log_K k_n below
    `threshold`, never smaller than K.
    """
    h = integer_log(n, K)
    if h is None or h < 1:
        raise ValueError("default_kn: n=%r is not a positive power of K=%r"%(n, K))
    best = 1
    for j in range(1, h + 1):
        if sufficiency_ratio(n, M * j) <= threshold:
            best = j
    return K**best


def tail_normalizer(n, m, p, variant='standard'):
    """
    Level b with n Pr(NB(m, p) > b) -> 1, standard or hat form.
    """
    log_inv_p = -math.log(p)
    ratio = (1.0 - p) / p
    big_l = math.log(n) / log_inv_p
    log_fact = math.lgamma(m) / log_inv_p
    big_psi = psi(n, m, p)
    if variant == 'hat':
        big_psi += (m - 1) * math.log(math.log(n)) - log_fact
    elif variant != 'standard':
        raise ValueError("tail_normalizer: unknown variant '%s'"%(variant,))
    if m == 1:
        return big_l
    if not big_psi > 0.0:
        raise ValueError("tail_normalizer: Psi=%r is not positive (n=%r too small for m=%i at p=%r)"
                         %(big_psi, n, m, p))
    return big_l + (m - 1) * math.log(ratio * big_psi) / log_inv_p - log_fact


def upper_bn(n, p, M=1, K=2):
    """
    Upper normalizing sequence alpha m + log_delta sqrt(m) + beta with
    m = M log_K n and alpha the root at target K^(-1/M).
    """
    _check_p(p, 'upper_bn')
    if n <= 1:
        raise ValueError("upper_bn: n must exceed 1, got %r"%(n,))
    m = M * _log_k(n, K)
    alpha = solve_alpha(p, alpha_target(M, K)).alpha
    delta, beta = delta_beta(p, alpha)
    return alpha * m + math.log(math.sqrt(m)) / math.log(delta) + beta


def lower_bn(n, k_n, p, M=1, K=2, variant='standard', ratio_threshold=0.5):
    """
    Lower normalizing sequence of the subtree maxima, built on
    NB(M log_K k_n, p).

    Parameters
    ----------
    variant : str
              'standard' or 'hat'.
    ratio_threshold : float
                      An `AsymptoticWarning` is issued when the sufficiency
                      ratio of M log_K k_n exceeds this value.
    """
    _check_p(p, 'lower_bn')
    j = integer_log(k_n, K)
    if j is None or j < 1:
        raise ValueError("lower_bn: k_n=%r must be a positive power of K=%r"%(k_n, K))
    if k_n > n:
        raise ValueError("lower_bn: k_n=%r exceeds n=%r"%(k_n, n))
    m = M * j
    ratio = sufficiency_ratio(n, m)
    if ratio > ratio_threshold:
        warn("lower_bn: sufficiency ratio m^2 ln ln n / ln n = %.3g exceeds %g (n=%r, m=%i)"
             %(ratio, ratio_threshold, n, m), AsymptoticWarning)
    return tail_normalizer(n, m, p, variant)


def scaling_constants(p, alpha, M=1, K=2):
    """
    Leading constants (per ln n) of the lower and upper bounds,
    M/((1-p) ln K) + 1/ln(1/p) and alpha M / ln K.
    """
    return M / ((1.0 - p) * math.log(K)) + 1.0 / -math.log(p), alpha * M / math.log(K)


def gumbel_sandwich(b_n, base):
    """
    GumbelSandwich of a normalizer `b_n` whose tail decays like base^x.
    """
    if not 0.0 < base < 1.0:
        raise ValueError("gumbel_sandwich: base must lie in (0, 1), got %r"%(base,))
    mean_lo = b_n + EULER_GAMMA / math.log(1.0 / base)
    return GumbelSandwich(b_n, base, mean_lo, mean_lo + 1.0)

################################################################################
#
# Bounds on the expected completion time
#
################################################################################
def expectation_bounds(spec, k_n=None, ratio_threshold=0.5):
    """
    Collects all bounds on E[M_n] for a tree.

    Parameters
    ----------
    spec : TreeSpec
    k_n : int, optional
          Subtree size of the lower bound; `default_kn` if not given.
    ratio_threshold : float
                      Sufficiency ratio above which the report is flagged.

    Returns
    -------
    BoundsReport
    """
    K, n, p, M, h = spec.K, spec.n, spec.p, spec.M, spec.h
    if k_n is None:
        k_n = default_kn(n, K, M)
    j = integer_log(k_n, K)
    if j is None or j < 1 or j > h:
        raise ValueError("expectation_bounds: k_n=%r must be a power of K=%i between K and n=%i"
                         %(k_n, K, n))
    flags = []
    log_inv_p = -math.log(p)

    root = solve_alpha(p, alpha_target(M, K))
    alpha = root.alpha
    delta, beta = delta_beta(p, alpha)
    m_up = M * h
    b_up = alpha * m_up + math.log(math.sqrt(m_up)) / math.log(delta) + beta

    m_low = M * j
    ratio = sufficiency_ratio(n, m_low)
    if ratio > ratio_threshold:
        flags.append('sufficiency_ratio=%.3g' % ratio)
    b_low = tail_normalizer(n, m_low, p)
    try:
        b_hat = tail_normalizer(n, m_low, p, 'hat')
    except ValueError:
        b_hat = math.nan
        flags.append('hat_normalizer_undefined')

    gumbel_p = EULER_GAMMA / log_inv_p
    lower_trivial = m_up / (1.0 - p)
    lower_claim_a = M * (h - 1) / (1.0 - p) + gumbel_p + tail_normalizer(n, M, p)
    lower_main = M * (h - j) / (1.0 - p) + gumbel_p + b_low
    upper_main = gumbel_sandwich(b_up, delta).mean_hi

    scaling_lo, scaling_hi = scaling_constants(p, alpha, M, K)
    return BoundsReport(spec=spec, k_n=k_n, alpha_root=alpha, delta=delta, beta=beta,
                        b_n_upper=b_up, b_n_lower=b_low, b_n_lower_hat=b_hat,
                        lower_trivial=lower_trivial, lower_claim_a=lower_claim_a,
                        lower_main=lower_main, upper_main=upper_main,
                        scaling_lo=scaling_lo, scaling_hi=scaling_hi,
                        scaling_lo_log2=scaling_lo * math.log(2.0),
                        scaling_hi_log2=scaling_hi * math.log(2.0),
                        mode='constant_k', flags=tuple(flags))


def tail_time_bound(spec, epsilon, conservative=False):
    """
    Time T with Pr(completion > T) <= epsilon asymptotically,
    T = b_n + log_delta(-ln(1 - epsilon)).

    With `conservative`, one slot is added; the result then also bounds the
    (1 - epsilon) quantile of integer-valued maxima at finite n.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("tail_time_bound: epsilon must lie in (0, 1), got %r"%(epsilon,))
    alpha = solve_alpha(spec.p, alpha_target(spec.M, spec.K)).alpha
    delta, beta = delta_beta(spec.p, alpha)
    m = spec.M * spec.h
    b_n = alpha * m + math.log(math.sqrt(m)) / math.log(delta) + beta
    t = b_n + math.log(-math.log1p(-epsilon)) / math.log(delta)
    return t + 1.0 if conservative else t


def growing_k_bounds(n, K_n, p, mode='constant_h'):
    """
    Bounds on E[M_n] when the degree K_n grows with n.

    Parameters
    ----------
    n : int
        Number of leaves, a power of K_n.
    K_n : int
    p : float
    mode : str
           'constant_h' (height fixed, K_n = n^(1/h)) or 'growing_h'
           (height log n / log K_n growing).

    Returns
    -------
    BoundsReport
        Scaling constants are per ln n.
    """
    _check_p(p, 'growing_k_bounds')
    h = integer_log(n, K_n)
    if h is None or h < 1:
        raise ValueError("growing_k_bounds: n=%r is not a positive power of K_n=%r"%(n, K_n))
    spec = TreeSpec(K_n, n, p, 1)
    log_inv_p = -math.log(p)
    gumbel_p = EULER_GAMMA / log_inv_p
    big_l = math.log(n) / log_inv_p

    lower = (h - 1) / (1.0 - p) + big_l + gumbel_p
    flags = []
    if mode == 'constant_h':
        alpha = delta = beta = math.nan
        b_up = tail_normalizer(n, h, p)
        upper = b_up + gumbel_p + 1.0
        scaling_lo = scaling_hi = 1.0 / log_inv_p
        flags.append('gumbel_term_added')
    elif mode == 'growing_h':
        root = solve_alpha_growing(p, K_n)
        alpha = root.alpha
        log_k = math.log(K_n)
        delta, beta = delta_beta(p, alpha, shift=1.0 / log_k)
        b_up = (alpha * math.log(n) + math.log(math.sqrt(math.log(n) * log_k)) / math.log(delta)
                + beta)
        upper = gumbel_sandwich(b_up, delta).mean_hi
        scaling_lo = 1.0 / ((1.0 - p) * log_k) + 1.0 / log_inv_p
        scaling_hi = alpha
        flags.append('delta_uses_alpha_p_over_alpha_minus_inv_log_k')
    else:
        raise ValueError("growing_k_bounds: unknown mode '%s'"%(mode,))

    return BoundsReport(spec=spec, k_n=n // K_n, alpha_root=alpha, delta=delta, beta=beta,
                        b_n_upper=b_up, b_n_lower=big_l, b_n_lower_hat=math.nan,
                        lower_trivial=h / (1.0 - p), lower_claim_a=lower,
                        lower_main=lower, upper_main=upper,
                        scaling_lo=scaling_lo, scaling_hi=scaling_hi,
                        scaling_lo_log2=scaling_lo * math.log(2.0),
                        scaling_hi_log2=scaling_hi * math.log(2.0),
                        mode=mode, flags=tuple(flags))


def large_m_root_window(p, M, K=2, exponents=None):
    r"""
    Window around the root for many messages: the root lies in
    (1/(1-p), 1/(1-p) + M^{-s}) for the largest s on the grid with
    g_p(1/(1-p) + M^{-s}) < 0.

    Returns
    -------
    RootWindow(lo, hi, exponent, alpha, inside)
        `hi` is infinite and `exponent` None if no grid point qualifies.
        `inside` tells whether the solved root lies in (lo, hi); an
        `AsymptoticWarning` is issued when it does not.
    """
    _check_p(p, 'large_m_root_window')
    if exponents is None:
        exponents = np.linspace(0.01, 0.49, 49)
    target = alpha_target(M, K)
    alpha = solve_alpha(p, target).alpha
    lo = 1.0 / (1.0 - p)
    hi, best = math.inf, None
    for s in sorted(exponents):
        eps = float(M)**(-s)
        if g_value(lo + eps, p, target) < 0.0:
            hi, best = lo + eps, float(s)
    inside = best is not None and lo < alpha < hi
    if not inside:
        warn("large_m_root_window: root %.10g outside (%.10g, %.10g) for M=%r"
             %(alpha, lo, hi, M), AsymptoticWarning)
    return RootWindow(lo, hi, best, alpha, inside)
