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
  multicast_evt.tree_sim
  ======================

  Monte Carlo simulation of reliable dissemination over a complete K-ary
  tree. Every edge needs a negative-binomial number of slots NB(M, p) to
  forward the M messages and the arrival time of a leaf is the sum of the
  delays along its root-to-leaf path.

  Trees are simulated level by level: the arrival times of one level are
  repeated K times and the delays of the next level are added, so only the
  current level is kept in memory.

  Every replication i draws from its own generator seeded by
  SeedSequence(master_seed, spawn_key=(i,)); results do not depend on the
  number of threads or MPI ranks used.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from . import mpi
from .nb_dist import NBParams, iid_max_cdf, nb_sf

__all__ = ['TreeSpec', 'SimConfig', 'SimEstimate', 'Ecdf', 'ResourceError', 'MODES',
           'integer_log', 'replication_rng', 'sample_geometric', 'sample_edge_delay',
           'sample_completion', 'sample_lower_construct', 'sample_iid_max',
           'sample_subtree_y', 'iid_max_table', 'estimate', 'estimate_many']

MODES = ('tree', 'lower_construct', 'iid', 'subtree_y')
DEFAULT_MAX_LEAVES = 2**25
DEFAULT_IID_DIRECT_MAX = 4096

# 97.5% quantile of the standard normal
_Z975 = 1.959963984540054


class ResourceError(MemoryError):
    """
    The requested simulation would hold more leaves than allowed.
    """
    pass


def integer_log(n, base):
    """
    Returns h with base**h == n, or None if n is not a power of base.
    """
    if base < 2 or n < 1:
        return None
    h = 0
    val = 1
    while val < n:
        val *= base
        h += 1
    return h if val == n else None

################################################################################
#
# Data types
#
################################################################################
@dataclass(frozen=True)
class TreeSpec:
    """
    Complete K-ary tree with n = K**h leaves, loss probability p and M
    messages per edge.
    """
    K: int
    n: int
    p: float
    M: int = 1

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 2:
            raise ValueError("TreeSpec: K must be an integer >= 2, got %r"%(self.K,))
        if int(self.M) != self.M or self.M < 1:
            raise ValueError("TreeSpec: M must be an integer >= 1, got %r"%(self.M,))
        if not 0.0 < self.p < 1.0:
            raise ValueError("TreeSpec: p must lie in (0, 1), got %r"%(self.p,))
        h = integer_log(self.n, int(self.K))
        if h is None or h < 1:
            raise ValueError("TreeSpec: n=%r is not a positive power of K=%r"%(self.n, self.K))
        object.__setattr__(self, 'K', int(self.K))
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'M', int(self.M))
        object.__setattr__(self, 'p', float(self.p))
        object.__setattr__(self, '_h', h)

    @classmethod
    def from_height(cls, K, h, p, M=1):
        return cls(K, int(K)**int(h), p, M)

    @property
    def h(self):
        """Height of the tree, log_K n."""
        return self._h

    def edge_params(self):
        return NBParams(self.M, self.p)


@dataclass(frozen=True)
class SimConfig:
    """
    Parameters
    ----------
    replications : int
    master_seed : int
    k_n : int, optional
          Subtree size for the `lower_construct` and `subtree_y` modes.
    mode : str
           One of 'tree', 'lower_construct', 'iid', 'subtree_y'.
    workers : int
              Local threads per MPI rank.
    max_leaves : int
                 Largest number of leaves held in memory by one replication.
    iid_direct_max : int
                     Above this n the i.i.d. maximum is drawn by inversion.
    """
    replications: int
    master_seed: int
    k_n: Optional[int] = None
    mode: str = 'tree'
    workers: int = 1
    max_leaves: int = DEFAULT_MAX_LEAVES
    iid_direct_max: int = DEFAULT_IID_DIRECT_MAX

    def __post_init__(self):
        if int(self.replications) != self.replications or self.replications < 1:
            raise ValueError("SimConfig: replications must be a positive integer, got %r"%(self.replications,))
        if int(self.master_seed) != self.master_seed or self.master_seed < 0:
            raise ValueError("SimConfig: master_seed must be a non-negative integer, got %r"%(self.master_seed,))
        if self.mode not in MODES:
            raise ValueError("SimConfig: unknown mode '%s' (expected one of %s)"%(self.mode, ', '.join(MODES)))
        if self.workers < 1:
            raise ValueError("SimConfig: workers must be >= 1, got %r"%(self.workers,))
        if self.mode in ('lower_construct', 'subtree_y') and self.k_n is None:
            raise ValueError("SimConfig: mode '%s' requires k_n"%(self.mode,))


@dataclass(frozen=True)
class SimEstimate:
    mean: float
    std_err: Optional[float]
    ci95: Optional[Tuple[float, float]]
    count: int
    seed: int


@dataclass(frozen=True, eq=False)
class Ecdf:
    """
    Empirical distribution of integer samples: `support` holds the distinct
    values in increasing order and `cum_prob` the fraction of samples <= value.
    """
    support: np.ndarray
    cum_prob: np.ndarray

    @classmethod
    def from_samples(cls, samples):
        values, counts = np.unique(np.asarray(samples), return_counts=True)
        cum = np.cumsum(counts) / float(counts.sum())
        cum[-1] = 1.0
        return cls(values, cum)

    def at(self, x):
        """Empirical cdf evaluated at x."""
        idx = np.searchsorted(self.support, x, side='right')
        return 0.0 if idx == 0 else float(self.cum_prob[idx - 1])

    def quantile(self, q):
        """Smallest support value whose cumulative probability reaches q."""
        if not 0.0 < q <= 1.0:
            raise ValueError("Ecdf.quantile: q must lie in (0, 1], got %r"%(q,))
        idx = int(np.searchsorted(self.cum_prob, q, side='left'))
        return int(self.support[min(idx, len(self.support) - 1)])

################################################################################
#
# Samplers
#
################################################################################
def replication_rng(master_seed, index):
    """
    Generator of replication `index`.
    """
    seq = np.random.SeedSequence(master_seed, spawn_key=(int(index),))
    return np.random.Generator(np.random.SFC64(seq))


def sample_geometric(p, rng):
    """
    Geometric number of slots until the first success, by inversion
    ceil(ln U / ln p) with U uniform on (0, 1].
    """
    u = 1.0 - rng.random()
    if u <= 0.0:
        return 1
    return max(1, int(math.ceil(math.log(u) / math.log(p))))


def _geometric_draws(p, shape, rng):
    u = 1.0 - rng.random(shape)
    g = np.ceil(np.log(u) / math.log(p))
    return np.maximum(g, 1.0).astype(np.int64)


def _nb_draws(m, p, size, rng):
    """
    `size` independent NB(m, p) draws, each the sum of m geometric delays.
    """
    if m == 1:
        return _geometric_draws(p, size, rng)
    return _geometric_draws(p, (size, m), rng).sum(axis=1)


def sample_edge_delay(spec, rng):
    """
    Slots needed by one edge to forward the M messages.
    """
    return sum(sample_geometric(spec.p, rng) for _ in range(spec.M))


def _forest_leaf_times(spec, height, n_roots, rng, max_leaves):
    n_leaves = n_roots * spec.K**height
    if n_leaves > max_leaves:
        raise ResourceError("simulation needs %i leaves per replication, the budget is %i"
                            %(n_leaves, max_leaves))
    times = np.zeros(n_roots, dtype=np.int64)
    for level in range(height):
        times = np.repeat(times, spec.K)
        times += _nb_draws(spec.M, spec.p, times.size, rng)
    return times


def sample_completion(spec, rng, return_leaves=False, max_leaves=DEFAULT_MAX_LEAVES):
    """
    Completion time of one replication on the full tree.

    Returns
    -------
    completion : int
    leaves : array, only if `return_leaves`
             Arrival times of the leaves in tree order.
    """
    leaves = _forest_leaf_times(spec, spec.h, 1, rng, max_leaves)
    completion = int(leaves.max())
    if return_leaves:
        return completion, leaves
    return completion


def _subtree_height(spec, k_n):
    j = integer_log(k_n, spec.K)
    if j is None or j < 1 or j > spec.h:
        raise ValueError("k_n=%r must be a power of K=%i between K and n=%i"%(k_n, spec.K, spec.n))
    return j


def sample_subtree_y(spec, k_n, rng, max_leaves=DEFAULT_MAX_LEAVES):
    """
    Maximum over n/k_n independent subtrees of k_n leaves each.
    """
    j = _subtree_height(spec, k_n)
    times = _forest_leaf_times(spec, j, spec.n // k_n, rng, max_leaves)
    return int(times.max())


def sample_lower_construct(spec, k_n, rng, max_leaves=DEFAULT_MAX_LEAVES):
    """
    W + Y where W ~ NB(M log_K(n/k_n), p) covers the shared top of the tree
    and Y is drawn by `sample_subtree_y`.
    """
    j = _subtree_height(spec, k_n)
    top = spec.M * (spec.h - j)
    w = int(_nb_draws(top, spec.p, 1, rng)[0]) if top > 0 else 0
    return w + sample_subtree_y(spec, k_n, rng, max_leaves)


@lru_cache(maxsize=64)
def iid_max_table(n, m, p):
    """
    Support and cdf F[x]^n of the maximum of n i.i.d. NB(m, p), tabulated
    until the cdf equals one in double precision.
    """
    params = NBParams(m, p)
    x_max = m + 64
    while n * float(nb_sf(x_max, params)) > 1e-17:
        x_max = m + 2 * (x_max - m)
    support = np.arange(m, x_max + 1)
    cdf = iid_max_cdf(support, n, params)
    cdf[-1] = 1.0
    support.setflags(write=False)
    cdf.setflags(write=False)
    return support, cdf


def sample_iid_max(spec, rng, direct_max=DEFAULT_IID_DIRECT_MAX):
    """
    Maximum of n i.i.d. NB(M h, p) variables: direct draws for n <= direct_max,
    inversion of F^n otherwise.
    """
    m = spec.M * spec.h
    if spec.n <= direct_max:
        return int(_nb_draws(m, spec.p, spec.n, rng).max())
    support, cdf = iid_max_table(spec.n, m, spec.p)
    idx = int(np.searchsorted(cdf, rng.random(), side='right'))
    return int(support[min(idx, len(support) - 1)])

################################################################################
#
# estimate()
#
################################################################################
def _make_sampler(config, spec):
    if config.mode == 'tree':
        return lambda rng: sample_completion(spec, rng, max_leaves=config.max_leaves)
    if config.mode == 'lower_construct':
        return lambda rng: sample_lower_construct(spec, config.k_n, rng, config.max_leaves)
    if config.mode == 'subtree_y':
        return lambda rng: sample_subtree_y(spec, config.k_n, rng, config.max_leaves)
    return lambda rng: sample_iid_max(spec, rng, config.iid_direct_max)


def _run_indices(sampler, master_seed, indices, workers):
    def run_chunk(chunk):
        return [sampler(replication_rng(master_seed, i)) for i in chunk]

    if workers == 1 or len(indices) < 2:
        return np.array(run_chunk(indices), dtype=np.int64)
    chunks = np.array_split(indices, min(workers, len(indices)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(run_chunk, chunks))
    return np.array([v for part in parts for v in part], dtype=np.int64)


def estimate(config, spec):
    """
    Runs `config.replications` replications of the mode selected in `config`.

    Returns
    -------
    (SimEstimate, Ecdf)
    """
    if config.mode in ('lower_construct', 'subtree_y'):
        _subtree_height(spec, config.k_n)
    sampler = _make_sampler(config, spec)

    indices = mpi.slice_array(np.arange(config.replications))
    local = _run_indices(sampler, config.master_seed, indices, config.workers)

    samples = np.empty(config.replications, dtype=np.int64)
    for idx, vals in mpi.allgather((indices, local)):
        samples[idx] = vals

    count = config.replications
    mean = math.fsum(samples.tolist()) / count
    if count > 1:
        var = math.fsum(((samples - mean)**2).tolist()) / (count - 1)
        std_err = math.sqrt(var / count)
        ci95 = (mean - _Z975 * std_err, mean + _Z975 * std_err)
    else:
        std_err = None
        ci95 = None

    est = SimEstimate(mean, std_err, ci95, count, config.master_seed)
    return est, Ecdf.from_samples(samples)


def estimate_many(config, spec, modes=('lower_construct', 'tree', 'iid')):
    """
    Paired runs of several modes sharing the replication seeds of `config`.
    """
    return {mode: estimate(replace(config, mode=mode), spec) for mode in modes}
