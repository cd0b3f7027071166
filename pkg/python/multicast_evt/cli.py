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
  multicast_evt.cli
  =================

  Command-line front end:

    multicast_evt <command> [options]
    multicast_evt --figures <preset> [options]

  with <command> one of roots, bounds, simulate, tail, y-convergence,
  iid-sandwich, diagnostics. Results are written as CSV.

  Options are merged in the order: built-in defaults, preset, config-file
  (--config), command-line flags.
"""
import argparse
import sys

from . import mpi
from .experiments import is_fatal, run_command, write_csv
from .inpconf import COMMANDS, ConfigParameters
from .presets import PRESETS, get_preset
from .version import version

__all__ = ['main', 'build_parser']

# flag -> config key of the command section
COMMAND_FLAGS = {
    'p': 'p',
    'n_exp': 'n_exp',
    'K': 'k',
    'M': 'm',
    'kn_exp': 'kn_exp',
    'reps': 'reps',
    'eps': 'eps',
    'variant': 'variant',
}
# flag -> config key of [General]
GENERAL_FLAGS = {
    'seed': 'seed',
    'out': 'out',
    'workers': 'workers',
}


def _common_options():
    common = argparse.ArgumentParser(add_help=False)
    sup = argparse.SUPPRESS
    common.add_argument('--p', default=sup, help="loss probabilities, e.g. '0.1 0.2' or '0.05..0.5:0.05'")
    common.add_argument('--n-exp', dest='n_exp', default=sup, help="tree heights N (n = K**N), e.g. '4..23'")
    common.add_argument('--K', default=sup, help="tree degrees")
    common.add_argument('--M', default=sup, help="numbers of messages")
    common.add_argument('--kn-exp', dest='kn_exp', default=sup, help="subtree heights log_K k_n")
    common.add_argument('--reps', default=sup, help="Monte Carlo replications")
    common.add_argument('--seed', default=sup, help="master seed")
    common.add_argument('--eps', default=sup, help="tail probabilities")
    common.add_argument('--variant', default=sup, help="lower normalizer: standard, hat or both")
    common.add_argument('--workers', default=sup, help="threads per MPI rank")
    common.add_argument('--out', default=sup, help="output CSV file ('-' for stdout)")
    common.add_argument('--config', default=sup, help="config-file")
    common.add_argument('--figures', default=sup, choices=sorted(PRESETS), help="figure preset")
    common.add_argument('-v', '--verbose', action='count', default=sup, help="echo parsed parameters")
    return common


def build_parser():
    common = _common_options()
    parser = argparse.ArgumentParser(prog='multicast_evt', parents=[common],
                                     description="Extreme-value bounds and simulations of "
                                                 "reliable multicast trees.")
    parser.add_argument('--version', action='version', version='%(prog)s ' + version)
    sub = parser.add_subparsers(dest='command')
    for command in COMMANDS:
        sub.add_parser(command, parents=[common])
    return parser


def _load_config(parser, args, command, preset_text):
    verbosity = getattr(args, 'verbose', 0)
    cpars = ConfigParameters(verbosity=verbosity)
    if preset_text is not None:
        cpars.read_string(preset_text)
    if getattr(args, 'config', None):
        cpars.read_file(args.config)

    known = cpars.cmd_optional[command]
    for flag, key in COMMAND_FLAGS.items():
        if hasattr(args, flag):
            if key not in known:
                parser.error("option --%s is not used by command '%s'"%(flag.replace('_', '-'), command))
            cpars.set_option(command, key, getattr(args, flag))
    for flag, key in GENERAL_FLAGS.items():
        if hasattr(args, flag):
            cpars.set_option('general', key, getattr(args, flag))
    if verbosity:
        cpars.set_option('general', 'verbosity', verbosity)

    cpars.parse_input(command)
    return cpars


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    command = args.command
    preset_text = None
    if hasattr(args, 'figures'):
        preset_command, preset_text = get_preset(args.figures)
        if command is not None and command != preset_command:
            parser.error("preset '%s' belongs to command '%s', not '%s'"%(args.figures, preset_command, command))
        command = preset_command
    if command is None:
        parser.error("a command or --figures is required")

    try:
        cpars = _load_config(parser, args, command, preset_text)
    except Exception as err:
        raise SystemExit("  Error in configuration: %s"%(err))

    columns, rows = run_command(command, cpars.parameters, cpars.general)

    if mpi.is_master_node():
        out = cpars.general['out']
        if out == '-':
            write_csv(sys.stdout, command, cpars.as_dict(), columns, rows)
        else:
            with open(out, 'w', newline='') as f:
                write_csv(f, command, cpars.as_dict(), columns, rows)
            mpi.report("  %s: %i rows written to %s"%(command, len(rows), out))

    failed = [row for row in rows if is_fatal(row)]
    for row in failed:
        print("  %s"%(row['status']), file=sys.stderr)
    return 1 if failed else 0


if __name__ == '__main__':
    raise SystemExit(main())
