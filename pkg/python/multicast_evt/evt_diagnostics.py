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
  multicast_evt.evt_diagnostics
  =============================

  Quantities that control the dependence between leaf arrival times.

  Two leaves of a subtree with 2**m leaves (K**m in general) whose paths
  split i levels above them share m - i channels and use i channels each on
  their own, so their joint exceedance of a level u is

    Pr(W + min(Z1, Z2) > u),  W ~ NB(m - i, p),  Z1, Z2 ~ NB(i, p).

  Summed over the pairs of a subtree and multiplied by n this gives the
  quantity alpha_n whose decay justifies the Gumbel limit of the subtree
  maxima.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

from .evt_bounds import tail_normalizer, psi
from .nb_dist import CertifiedSum, NBParams, nb_sf
from .special_fn import ConvergenceError
from .tree_sim import integer_log

__all__ = ['JointTailQuery', 'JointTailBound', 'pair_tail', 'joint_tail_exact',
           'joint_tail_bound', 'dprime_alpha_n', 'growing_k_dprime_sum']

_CHUNK = 256
_MAX_TERMS = 10**6


@dataclass(frozen=True)
class JointTailQuery:
    """
    Pair of leaves (1, K**i) inside a subtree of k_n leaves of a tree with n
    leaves, compared with the level u_n = lower normalizer + x.

    Parameters
    ----------
    envelope : bool
               Evaluate the tail of the shared part through the continuous
               envelope at real levels instead of the integer law.
    """
    n: int
    k_n: int
    i: int
    x: float = 0.0
    p: float = 0.1
    trunc_tol: float = 1e-14
    K: int = 2
    envelope: bool = False

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError("JointTailQuery: p must lie in (0, 1), got %r"%(self.p,))
        m = integer_log(self.k_n, self.K)
        if m is None or m < 1:
            raise ValueError("JointTailQuery: k_n=%r is not a positive power of K=%r"%(self.k_n, self.K))
        if self.k_n > self.n:
            raise ValueError("JointTailQuery: k_n=%r exceeds n=%r"%(self.k_n, self.n))
        if not 1 <= self.i <= m - 1:
            raise ValueError("JointTailQuery: i=%r outside 1..%i (log_K k_n - 1)"%(self.i, m - 1))
        if not self.trunc_tol > 0.0:
            raise ValueError("JointTailQuery: trunc_tol must be positive, got %r"%(self.trunc_tol,))

    @property
    def m(self):
        """Channels on a root-to-leaf path of the subtree, log_K k_n."""
        return integer_log(self.k_n, self.K)

    @property
    def level(self):
        return tail_normalizer(self.n, self.m, self.p) + self.x


class JointTailBound(NamedTuple):
    value: float
    remainder_dropped: bool


def _shared_tail(t, params, envelope):
    """
    Pr(W > t) for an array of real levels t.
    """
    if not envelope:
        return nb_sf(np.floor(t), params)
    m = params.m
    a = np.maximum(t - m + 1.0, 1.0)
    return np.where(t <= m - 1, 1.0, special.betainc(a, float(m), params.p))


def _pair_tail_sum(shared, separate, u, p, trunc_tol, envelope):
    if separate < 1:
        raise ValueError("pair_tail: separate must be >= 1, got %r"%(separate,))
    if shared < 0:
        raise ValueError("pair_tail: shared must be >= 0, got %r"%(shared,))
    zp = NBParams(separate, p)

    if shared == 0:
        z_tail = _shared_tail(np.array([u], dtype=float), zp, envelope)[0]
        return CertifiedSum(float(z_tail)**2, 0.0, 1)

    wp = NBParams(shared, p)
    parts = []
    k0 = separate
    terms = 0
    while terms < _MAX_TERMS:
        ks = np.arange(k0, k0 + _CHUNK)
        sf_prev = nb_sf(ks - 1, zp)
        sf_curr = nb_sf(ks, zp)
        probs = sf_prev**2 - sf_curr**2
        parts.extend((_shared_tail(u - ks, wp, envelope) * probs).tolist())
        terms += _CHUNK
# Pr(min > k_last) bounds everything not yet summed
        remainder = float(sf_curr[-1])**2
        total = math.fsum(parts)
        if remainder <= trunc_tol * total:
            return CertifiedSum(total, remainder, terms)
        k0 += _CHUNK
    raise ConvergenceError("pair_tail: truncation did not reach %g after %i terms"%(trunc_tol, terms),
                           terms=terms)


def pair_tail(shared, separate, u, p, trunc_tol=1e-14, envelope=False):
    """
    Pr(W + min(Z1, Z2) > u) with W ~ NB(shared, p) and independent
    Z1, Z2 ~ NB(separate, p). For shared = 0 this is Pr(Z > u)**2.
    """
    return _pair_tail_sum(shared, separate, u, p, trunc_tol, envelope).value


def joint_tail_exact(q):
    """
    Pr(Y_1 > u_n, Y_{K**i} > u_n) for the pair described by `q`.
    """
    return pair_tail(q.m - q.i, q.i, q.level, q.p, q.trunc_tol, q.envelope)


def joint_tail_bound(q, alpha=0.75):
    r"""
    Analytic bound on `joint_tail_exact`,

    .. math:: 2 \frac{p^x}{n} (C\Psi(m))^{m-1}
              \left(\frac{4 C m}{1-p}\right)^i + n^{-2\alpha},

    with C = max(1/log_{1/p} n, 1/Psi(m)). The (1 + o(1)) factor is dropped
    and reported through `remainder_dropped`.
    """
    n, m, p = q.n, q.m, q.p
    big_psi = psi(n, m, p)
    big_l = math.log(n) / -math.log(p)
    big_c = max(1.0 / big_l, 1.0 / big_psi)
    log_value = (math.log(2.0) + q.x * math.log(p) - math.log(n)
                 + (m - 1) * math.log(big_c * big_psi)
                 + q.i * math.log(4.0 * big_c * m / (1.0 - p)))
    value = math.exp(log_value) + math.exp(-2.0 * alpha * math.log(n))
    return JointTailBound(value, True)


def _pair_weight(K, i):
    """Number of leaves whose path splits from leaf 1 exactly i levels up."""
    return (K - 1) * K**(i - 1)


def dprime_alpha_n(n, k_n, p, x=0.0, method='exact', K=2, envelope=True, alpha=0.75,
                   trunc_tol=1e-14):
    r"""
    :math:`\alpha_n = n \sum_{i=1}^{m-1} (K-1)K^{i-1} \Pr(Y_1 > u_n, Y_{K^i} > u_n)`
    with m = log_K k_n.

    Parameters
    ----------
    method : str
             'exact' or 'bound'.
    envelope : bool
               Used by the exact method, see `JointTailQuery`.
    """
    if method not in ('exact', 'bound'):
        raise ValueError("dprime_alpha_n: unknown method '%s'"%(method,))
    m = integer_log(k_n, K)
    if m is None or m < 1:
        raise ValueError("dprime_alpha_n: k_n=%r is not a positive power of K=%r"%(k_n, K))
    total = []
    for i in range(1, m):
        q = JointTailQuery(n, k_n, i, x, p, trunc_tol, K, envelope)
        prob = joint_tail_exact(q) if method == 'exact' else joint_tail_bound(q, alpha).value
        total.append(_pair_weight(K, i) * prob)
    return n * math.fsum(total)


def growing_k_dprime_sum(n, h, p, x=0.0, envelope=True, trunc_tol=1e-14):
    r"""
    Dependence sum of a tree of fixed height h and degree K_n = n^{1/h},
    with blocks of n/K_n leaves:

    .. math:: n \sum_{i=1}^{h-1} (K_n-1)K_n^{i-1}
              \Pr(T_1 > u_n, T_{K_n^i} > u_n),

    u_n being the normalizer of NB(h, p). It grows with n.
    """
    if h < 2:
        raise ValueError("growing_k_dprime_sum: h must be >= 2, got %r"%(h,))
    k_deg = int(round(n**(1.0 / h)))
    for cand in (k_deg - 1, k_deg, k_deg + 1):
        if cand >= 2 and cand**h == n:
            k_deg = cand
            break
    else:
        raise ValueError("growing_k_dprime_sum: n=%r is not an h-th power (h=%r)"%(n, h))
    u = tail_normalizer(n, h, p) + x
    total = [_pair_weight(k_deg, i) * pair_tail(h - i, i, u, p, trunc_tol, envelope)
             for i in range(1, h)]
    return n * math.fsum(total)
