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
  multicast_evt.experiments
  =========================

  Row producers of the batch commands. Every `run_<command>` function takes
  the parsed command parameters and the [General] parameters and returns
  the CSV columns together with a list of row dictionaries.

  A row whose `status` starts with 'error' marks a fatal failure; other
  statuses ('ok', 'infeasible', 'undefined') are informative.
"""
import csv
import json
import math
import warnings

from . import mpi
from .evt_bounds import (InfeasibleRootError, alpha_star_lower_exists, alpha_target, delta_beta,
                         expectation_bounds, growing_k_bounds, gumbel_sandwich, scaling_constants,
                         solve_alpha, sufficiency_ratio, tail_normalizer, tail_time_bound)
from .evt_diagnostics import (JointTailQuery, dprime_alpha_n, growing_k_dprime_sum,
                              joint_tail_bound, joint_tail_exact)
from .nb_dist import AsymptoticWarning, NBParams, iid_max_mean
from .tree_sim import ResourceError, SimConfig, TreeSpec, estimate
from .version import version

__all__ = ['RUNNERS', 'run_command', 'write_csv', 'is_fatal']

STATUS_OK = 'ok'


def _error(err):
    return 'error: %s: %s'%(type(err).__name__, err)


def is_fatal(row):
    return str(row.get('status', '')).startswith('error')


def _progress(general, message):
    if general.get('verbosity', 0) > 0:
        mpi.report("  " + message)


def _scaled_reps(pars, n):
    """
    Replications at n leaves: `reps`, lowered to max_leaf_draws/n when that
    budget is set, but never below min_reps.
    """
    reps = pars['reps']
    if pars.get('max_leaf_draws'):
        reps = max(min(reps, pars['max_leaf_draws'] // n), min(pars['min_reps'], reps))
    return reps


def _sim_config(general, pars, reps, mode, k_n=None):
    return SimConfig(replications=reps, master_seed=general['seed'], k_n=k_n, mode=mode,
                     workers=general['workers'], max_leaves=general['max_leaves'],
                     iid_direct_max=pars.get('iid_direct_max', 4096))


def _trees(pars):
    for p in pars['p']:
        for M in pars['M']:
            for K in pars['K']:
                for N in pars['n_exp']:
                    yield TreeSpec.from_height(K, N, p, M)


def _tree_columns(spec):
    return {'N': spec.h, 'n': spec.n, 'p': spec.p, 'M': spec.M, 'K': spec.K}

################################################################################
#
# roots
#
################################################################################
ROOTS_COLUMNS = ['p', 'M', 'K', 'target', 'alpha', 'residual', 'alpha_max', 'alpha_star_lower_exists',
                 'scaling_lo_log2', 'scaling_hi_log2', 'status']

def run_roots(pars, general):
    rows = []
    for p in pars['p']:
        for M in pars['M']:
            for K in pars['K']:
                target = alpha_target(M, K)
                row = {'p': p, 'M': M, 'K': K, 'target': target, 'alpha_max': 1.0 / (1.0 - p)}
                try:
                    root = solve_alpha(p, target)
                    lo, hi = scaling_constants(p, root.alpha, M, K)
                    row.update(alpha=root.alpha, residual=root.residual,
                               alpha_star_lower_exists=alpha_star_lower_exists(p, target),
                               scaling_lo_log2=lo * math.log(2.0), scaling_hi_log2=hi * math.log(2.0),
                               status=STATUS_OK)
                except InfeasibleRootError:
                    row['status'] = 'infeasible'
                except ValueError as err:
                    row['status'] = _error(err)
                rows.append(row)
    return ROOTS_COLUMNS, rows

################################################################################
#
# bounds
#
################################################################################
BOUNDS_COLUMNS = ['regime', 'N', 'n', 'p', 'M', 'K', 'kn_exp', 'k_n', 'alpha', 'delta', 'beta',
                  'b_n_upper', 'b_n_lower', 'b_n_lower_hat', 'lower_trivial', 'lower_claim_a',
                  'lower_main', 'upper_main', 'scaling_lo', 'scaling_hi', 'scaling_lo_log2',
                  'scaling_hi_log2', 'flags', 'status']

def _report_row(rep):
    row = _tree_columns(rep.spec)
    row.update(regime=rep.mode, k_n=rep.k_n, alpha=rep.alpha_root, delta=rep.delta, beta=rep.beta,
               b_n_upper=rep.b_n_upper, b_n_lower=rep.b_n_lower, b_n_lower_hat=rep.b_n_lower_hat,
               lower_trivial=rep.lower_trivial, lower_claim_a=rep.lower_claim_a,
               lower_main=rep.lower_main, upper_main=rep.upper_main,
               scaling_lo=rep.scaling_lo, scaling_hi=rep.scaling_hi,
               scaling_lo_log2=rep.scaling_lo_log2, scaling_hi_log2=rep.scaling_hi_log2,
               flags=';'.join(rep.flags), status=STATUS_OK)
    return row


def run_bounds(pars, general):
    rows = []
    if pars['regime'] != 'constant_k':
        for p in pars['p']:
            for K in pars['K']:
                for h in pars['height']:
                    row = {'regime': pars['regime'], 'N': h, 'n': K**h, 'p': p, 'M': 1, 'K': K}
                    try:
                        row = _report_row(growing_k_bounds(K**h, K, p, pars['regime']))
                    except ValueError as err:
                        row['status'] = _error(err)
                    rows.append(row)
        return BOUNDS_COLUMNS, rows

    for spec in _trees(pars):
        for kn in (pars['kn_exp'] or [None]):
            if kn is not None and kn > spec.h:
                continue
            k_n = spec.K**kn if kn is not None else None
            row = _tree_columns(spec)
            row.update(regime='constant_k', kn_exp=kn, k_n=k_n)
            try:
                row = _report_row(expectation_bounds(spec, k_n))
                row['kn_exp'] = kn if kn is not None else int(round(math.log(row['k_n'], spec.K)))
            except InfeasibleRootError:
                row['status'] = 'infeasible'
            except ValueError as err:
                row['status'] = _error(err)
            rows.append(row)
    return BOUNDS_COLUMNS, rows

################################################################################
#
# simulate
#
################################################################################
SIMULATE_COLUMNS = ['N', 'n', 'p', 'M', 'K', 'kn_exp', 'k_n', 'reps', 'seed',
                    'mean_tree', 'se_tree', 'ci_lo_tree', 'ci_hi_tree',
                    'mean_lower', 'se_lower', 'ci_lo_lower', 'ci_hi_lower',
                    'mean_iid', 'se_iid', 'ci_lo_iid', 'ci_hi_iid',
                    'lower_trivial', 'lower_claim_a', 'lower_main', 'upper_main', 'bracketed',
                    'status']

def _estimate_columns(est, key):
    """
    Mean, standard error and 95% interval of an estimate under suffix `key`;
    the interval is left empty for a single replication.
    """
    row = {'mean_' + key: est.mean, 'se_' + key: est.std_err}
    if est.ci95 is not None:
        row.update({'ci_lo_' + key: est.ci95[0], 'ci_hi_' + key: est.ci95[1]})
    return row


def run_simulate(pars, general):
    rows = []
    modes = pars['modes']
    for spec in _trees(pars):
        reps = _scaled_reps(pars, spec.n)
        base = _tree_columns(spec)
        base.update(reps=reps, seed=general['seed'])
        _progress(general, "simulate: N=%i p=%g M=%i K=%i reps=%i"%(spec.h, spec.p, spec.M, spec.K, reps))
        sims = {}
        try:
            for mode in ('tree', 'iid'):
                if mode in modes:
                    sims[mode] = estimate(_sim_config(general, pars, reps, mode), spec)[0]
        except (ResourceError, ValueError) as err:
            rows.append(dict(base, status=_error(err)))
            continue

        for kn in (pars['kn_exp'] or [None]):
            if kn is not None and kn > spec.h:
                continue
            row = dict(base)
            try:
                rep = expectation_bounds(spec, spec.K**kn if kn is not None else None)
                row.update(kn_exp=int(round(math.log(rep.k_n, spec.K))), k_n=rep.k_n,
                           lower_trivial=rep.lower_trivial, lower_claim_a=rep.lower_claim_a,
                           lower_main=rep.lower_main, upper_main=rep.upper_main)
                if 'lower_construct' in modes:
                    est = estimate(_sim_config(general, pars, reps, 'lower_construct', rep.k_n), spec)[0]
                    row.update(_estimate_columns(est, 'lower'))
                for mode in ('tree', 'iid'):
                    if mode in sims:
                        row.update(_estimate_columns(sims[mode], mode))
                if 'tree' in sims:
                    row['bracketed'] = rep.lower_main <= sims['tree'].mean <= rep.upper_main
                row['status'] = STATUS_OK
            except (ResourceError, ValueError) as err:
                row['status'] = _error(err)
            rows.append(row)
    return SIMULATE_COLUMNS, rows

################################################################################
#
# tail
#
################################################################################
TAIL_COLUMNS = ['N', 'n', 'p', 'M', 'K', 'mode', 'reps', 'seed', 'eps', 'quantile', 'bound',
                'bound_conservative', 'gap', 'covered', 'status']

def run_tail(pars, general):
    rows = []
    for spec in _trees(pars):
        reps = _scaled_reps(pars, spec.n)
        for mode in pars['modes']:
            base = _tree_columns(spec)
            base.update(mode=mode, reps=reps, seed=general['seed'])
            _progress(general, "tail: N=%i p=%g mode=%s reps=%i"%(spec.h, spec.p, mode, reps))
            try:
                ecdf = estimate(_sim_config(general, pars, reps, mode), spec)[1]
            except (ResourceError, ValueError) as err:
                rows.append(dict(base, status=_error(err)))
                continue
            for eps in pars['eps']:
                row = dict(base, eps=eps)
                try:
                    quantile = ecdf.quantile(1.0 - eps)
                    bound = tail_time_bound(spec, eps)
                    conservative = tail_time_bound(spec, eps, conservative=True)
                    row.update(quantile=quantile, bound=bound, bound_conservative=conservative,
                               gap=bound - quantile, covered=quantile <= conservative,
                               status=STATUS_OK)
                except ValueError as err:
                    row['status'] = _error(err)
                rows.append(row)
    return TAIL_COLUMNS, rows

################################################################################
#
# y-convergence
#
################################################################################
Y_COLUMNS = ['N', 'n', 'p', 'M', 'K', 'kn_exp', 'k_n', 'variant', 'reps', 'seed', 'mean_y', 'se_y',
             'mean_y_iid', 'b_n', 'sandwich_lo', 'sandwich_hi', 'sufficiency_ratio', 'status']

def run_y_convergence(pars, general):
    rows = []
    variants = ['standard', 'hat'] if pars['variant'] == 'both' else [pars['variant']]
    for spec in _trees(pars):
        for kn in pars['kn_exp']:
            if kn > spec.h:
                continue
            k_n = spec.K**kn
            m = spec.M * kn
            reps = _scaled_reps(pars, spec.n)
            base = _tree_columns(spec)
            base.update(kn_exp=kn, k_n=k_n, reps=reps, seed=general['seed'],
                        sufficiency_ratio=sufficiency_ratio(spec.n, m))
            _progress(general, "y-convergence: N=%i kn_exp=%i reps=%i"%(spec.h, kn, reps))
            try:
                est = estimate(_sim_config(general, pars, reps, 'subtree_y', k_n), spec)[0]
                base.update(mean_y=est.mean, se_y=est.std_err,
                            mean_y_iid=iid_max_mean(spec.n, NBParams(m, spec.p)))
            except (ResourceError, ValueError, ArithmeticError) as err:
                rows.append(dict(base, status=_error(err)))
                continue
            for variant in variants:
                row = dict(base, variant=variant)
                try:
                    sandwich = gumbel_sandwich(tail_normalizer(spec.n, m, spec.p, variant), spec.p)
                    row.update(b_n=sandwich.b_n, sandwich_lo=sandwich.mean_lo,
                               sandwich_hi=sandwich.mean_hi, status=STATUS_OK)
                except ValueError:
                    row['status'] = 'undefined'
                rows.append(row)
    return Y_COLUMNS, rows

################################################################################
#
# iid-sandwich
#
################################################################################
IID_COLUMNS = ['N', 'n', 'p', 'M', 'K', 'reps', 'seed', 'mean_sim', 'se_sim', 'mean_exact',
               'b_n_upper', 'sandwich_lo', 'sandwich_hi', 'exact_inside', 'status']

def run_iid_sandwich(pars, general):
    rows = []
    for spec in _trees(pars):
        reps = _scaled_reps(pars, spec.n)
        row = _tree_columns(spec)
        row.update(reps=reps, seed=general['seed'])
        _progress(general, "iid-sandwich: N=%i p=%g reps=%i"%(spec.h, spec.p, reps))
        try:
            alpha = solve_alpha(spec.p, alpha_target(spec.M, spec.K)).alpha
            delta, beta = delta_beta(spec.p, alpha)
            m = spec.M * spec.h
            b_up = alpha * m + math.log(math.sqrt(m)) / math.log(delta) + beta
            sandwich = gumbel_sandwich(b_up, delta)
            exact = iid_max_mean(spec.n, NBParams(m, spec.p))
            est = estimate(_sim_config(general, pars, reps, 'iid'), spec)[0]
            row.update(mean_sim=est.mean, se_sim=est.std_err, mean_exact=exact, b_n_upper=b_up,
                       sandwich_lo=sandwich.mean_lo, sandwich_hi=sandwich.mean_hi,
                       exact_inside=sandwich.mean_lo <= exact <= sandwich.mean_hi,
                       status=STATUS_OK)
        except InfeasibleRootError:
            row['status'] = 'infeasible'
        except (ResourceError, ValueError, ArithmeticError) as err:
            row['status'] = _error(err)
        rows.append(row)
    return IID_COLUMNS, rows

################################################################################
#
# diagnostics
#
################################################################################
DIAG_COLUMNS = ['kind', 'N', 'n', 'p', 'K', 'k_n', 'i', 'x', 'exact', 'bound', 'status']

def run_diagnostics(pars, general):
    rows = []
    x, envelope, alpha = pars['x'], pars['envelope'], pars['alpha']
    for p in pars['p']:
        for K in pars['K']:
            for N in pars['n_exp']:
                n = K**N
                base = {'N': N, 'n': n, 'p': p, 'K': K, 'x': x}
                for kn in pars['kn_exp']:
                    if kn < 2 or kn > N:
                        continue
                    k_n = K**kn
                    _progress(general, "diagnostics: N=%i kn_exp=%i p=%g"%(N, kn, p))
                    try:
                        for i in range(1, kn):
                            q = JointTailQuery(n, k_n, i, x, p, K=K, envelope=envelope)
                            rows.append(dict(base, kind='joint_tail', k_n=k_n, i=i,
                                             exact=joint_tail_exact(q),
                                             bound=joint_tail_bound(q, alpha).value,
                                             status=STATUS_OK))
                        rows.append(dict(base, kind='alpha_n', k_n=k_n,
                                         exact=dprime_alpha_n(n, k_n, p, x, 'exact', K, envelope),
                                         bound=dprime_alpha_n(n, k_n, p, x, 'bound', K, alpha=alpha),
                                         status=STATUS_OK))
                    except (ValueError, ArithmeticError) as err:
                        rows.append(dict(base, kind='alpha_n', k_n=k_n, status=_error(err)))
                for h in pars['growing_height']:
                    if N % h != 0:
                        continue
                    k_deg = K**(N // h)
                    row = dict(base, kind='growing_k', K=k_deg, k_n=n // k_deg)
                    try:
                        row.update(exact=growing_k_dprime_sum(n, h, p, x, envelope), status=STATUS_OK)
                    except (ValueError, ArithmeticError) as err:
                        row['status'] = _error(err)
                    rows.append(row)
    return DIAG_COLUMNS, rows

################################################################################
#
# Dispatch and output
#
################################################################################
RUNNERS = {
    'roots': run_roots,
    'bounds': run_bounds,
    'simulate': run_simulate,
    'tail': run_tail,
    'y-convergence': run_y_convergence,
    'iid-sandwich': run_iid_sandwich,
    'diagnostics': run_diagnostics,
}


def run_command(command, pars, general):
    """
    Runs a command; asymptotic warnings are not printed, they are carried
    by the `flags` and `status` columns.
    """
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', AsymptoticWarning)
        return RUNNERS[command](pars, general)


def _format(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(stream, command, config, columns, rows):
    """
    Writes the header comment line and the rows as CSV.
    """
    general = config['general']
    header = "# multicast_evt %s command=%s seed=%s seed_source=%s config=%s"%(
        version, command, general['seed'], general.get('seed_source', ''),
        json.dumps(config, sort_keys=True, separators=(',', ':')))
    stream.write(header + '\n')
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format(row.get(col)) for col in columns])
