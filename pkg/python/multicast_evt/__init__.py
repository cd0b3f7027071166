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

from .special_fn import Accuracy, ConvergenceError
from .nb_dist import NBParams, AsymptoticWarning
from .tree_sim import TreeSpec, SimConfig, SimEstimate, Ecdf, ResourceError, estimate
from .evt_bounds import (BoundsReport, GumbelSandwich, InfeasibleRootError, RootSolution,
                         expectation_bounds, solve_alpha, tail_time_bound)
from .evt_diagnostics import JointTailQuery, dprime_alpha_n
from .version import version

__all__ = ['Accuracy', 'ConvergenceError', 'NBParams', 'AsymptoticWarning',
           'TreeSpec', 'SimConfig', 'SimEstimate', 'Ecdf', 'ResourceError', 'estimate',
           'BoundsReport', 'GumbelSandwich', 'InfeasibleRootError', 'RootSolution',
           'expectation_bounds', 'solve_alpha', 'tail_time_bound',
           'JointTailQuery', 'dprime_alpha_n', 'version']
