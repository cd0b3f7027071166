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
  multicast_evt.presets
  =====================

  Configurations reproducing the standard figure data sets, selected with
  `--figures NAME`. Each preset is a command name and config-file text.
"""

PRESETS = {
    'fig-expected-p01': ('simulate', """
[simulate]
P = 0.1
N_EXP = 4..23
KN_EXP = 4 7
REPS = 1000
MIN_REPS = 100
MAX_LEAF_DRAWS = 1073741824
MODES = tree lower_construct iid
"""),
    'fig-expected-p-sweep': ('simulate', """
[simulate]
P = 0.05..0.5:0.05
N_EXP = 5 10 15
REPS = 1000
MODES = tree iid
"""),
    'fig-m-dependence': ('bounds', """
[bounds]
P = 0.1
M = 1 2 4 8 16
N_EXP = 10..20:2
"""),
    'fig-k-dependence': ('bounds', """
[bounds]
P = 0.1
K = 2 3 4 8
N_EXP = 4..10
"""),
    'fig-tail': ('tail', """
[tail]
P = 0.1
N_EXP = 10 14 18
EPS = 0.01 0.05 0.1 0.2 0.3
REPS = 2000
MODES = iid tree
"""),
    'fig-y-convergence': ('y-convergence', """
[y-convergence]
P = 0.1
N_EXP = 8..20
KN_EXP = 2 4
VARIANT = both
REPS = 500
MIN_REPS = 100
MAX_LEAF_DRAWS = 268435456
"""),
    'fig-roots': ('roots', """
[roots]
P = 0.05..0.5:0.05
M = 1 2 4 8
K = 2 4
"""),
    'fig-alpha-bounds': ('roots', """
[roots]
P = 0.01..0.5:0.01
M = 1
K = 2
"""),
    'fig-iid-sandwich': ('iid-sandwich', """
[iid-sandwich]
P = 0.1 0.5 0.7
N_EXP = 4..20
REPS = 2000
"""),
    'fig-diagnostics': ('diagnostics', """
[diagnostics]
P = 0.1
N_EXP = 12..24:4
KN_EXP = 4
GROWING_HEIGHT = 2
"""),
}


def get_preset(name):
    """
    Returns (command, config text) of a preset.
    """
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError("Unknown preset '%s'; available: %s"%(name, ', '.join(sorted(PRESETS))))
