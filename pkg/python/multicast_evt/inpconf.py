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
  multicast_evt.inpconf
  =====================

  Parsing and checking of experiment configurations.

  A configuration is a config-file with a [General] section and one section
  per command, e.g.

    [General]
    SEED = 2024

    [bounds]
    P = 0.1 0.2 0.5
    N_EXP = 4..23
    KN_EXP = 4 7
"""
import configparser
import os
import re
import sys

import numpy as np

__all__ = ['ConfigParameters', 'issue_warning', 'COMMANDS', 'SEED_ENV', 'DEFAULT_SEED']

COMMANDS = ('roots', 'bounds', 'simulate', 'tail', 'y-convergence', 'iid-sandwich', 'diagnostics')
SEED_ENV = 'MULTICAST_EVT_SEED'
DEFAULT_SEED = 20240601

def issue_warning(message):
    """
    Issues a warning.
    """
    print(file=sys.stderr)
    print("  !!! WARNING !!!: " + message, file=sys.stderr)
    print(file=sys.stderr)

################################################################################
################################################################################
#
# class ConfigParameters
#
################################################################################
################################################################################
class ConfigParameters:
    r"""
    Class responsible for parsing of the experiment configuration.

    Parameters:

    - *gen_optional* : parameters of section [General]
    - *cmd_optional* : parameters of every command section

    The dictionaries map conf-file keywords to a tuple:

      1. internal name of a parameter
      2. function used to convert an input string into data for a given parameter
      3. default value (optional)

    Sources are read in order and later ones override earlier ones: presets,
    config-files and finally single options set from the command line.
    """
################################################################################
#
# __init__()
#
################################################################################
    def __init__(self, input_filename=None, input_string=None, verbosity=0):
        self.verbosity = verbosity
        self.cp = configparser.ConfigParser()
        if input_string is not None:
            self.read_string(input_string)
        if input_filename is not None:
            self.read_file(input_filename)

        self.general = {}
        self.parameters = {}

        self.gen_optional = {
            'seed': ('seed', self.parse_string_seed),
            'out': ('out', str, '-'),
            'workers': ('workers', self.parse_string_positive_int, 1),
            'verbosity': ('verbosity', int, 0),
            'max_leaves': ('max_leaves', self.parse_string_positive_int, 2**25)}

        common = {
            'p': ('p', self.parse_string_prob_list, [0.1, 0.2, 0.5]),
            'm': ('M', self.parse_string_int_list, [1]),
            'k': ('K', self.parse_string_degree_list, [2])}

        grid = dict(common)
        grid.update({
            'n_exp': ('n_exp', self.parse_string_int_list, list(range(4, 24))),
            'kn_exp': ('kn_exp', self.parse_string_int_list, None)})

        sim = dict(grid)
        sim.update({
            'reps': ('reps', self.parse_string_positive_int, 1000),
            'min_reps': ('min_reps', self.parse_string_positive_int, 100),
            'max_leaf_draws': ('max_leaf_draws', self.parse_string_positive_int, None),
            'iid_direct_max': ('iid_direct_max', self.parse_string_positive_int, 4096)})

        self.cmd_optional = {
            'roots': dict(common),
            'bounds': dict(grid, **{
                'regime': ('regime', lambda s: self.parse_string_choice(
                    s, ('constant_k', 'constant_h', 'growing_h')), 'constant_k'),
                'height': ('height', self.parse_string_int_list, [2, 3])}),
            'simulate': dict(sim, **{
                'modes': ('modes', lambda s: self.parse_string_choice_list(
                    s, ('tree', 'lower_construct', 'iid')), ['tree', 'lower_construct', 'iid'])}),
            'tail': dict(sim, **{
                'eps': ('eps', self.parse_string_eps_list, [0.01, 0.05, 0.1, 0.2]),
                'modes': ('modes', lambda s: self.parse_string_choice_list(
                    s, ('tree', 'iid')), ['iid', 'tree'])}),
            'y-convergence': dict(sim, **{
                'variant': ('variant', lambda s: self.parse_string_choice(
                    s, ('standard', 'hat', 'both')), 'both')}),
            'iid-sandwich': dict(sim),
            'diagnostics': dict(grid, **{
                'x': ('x', float, 0.0),
                'alpha': ('alpha', float, 0.75),
                'envelope': ('envelope', self.parse_string_logical, True),
                'growing_height': ('growing_height', self.parse_string_int_list, [2])})}

        self.cmd_optional['y-convergence']['kn_exp'] = ('kn_exp', self.parse_string_int_list, [2, 4])
        self.cmd_optional['diagnostics']['kn_exp'] = ('kn_exp', self.parse_string_int_list, [4])

################################################################################
#
# Sources
#
################################################################################
    def read_string(self, text):
        """
        Reads configuration text; keys already present are overridden.
        """
        self.cp.read_string(text)

    def read_file(self, filename):
        """
        Reads a config-file; keys already present are overridden.
        """
        with open(filename, 'r') as f:
            self.cp.read_file(f, source=filename)

    def set_option(self, section, key, value):
        """
        Sets a single option, e.g. from a command-line flag.
        """
        if section.lower() == 'general':
            section = self._general_section()
        if not self.cp.has_section(section):
            self.cp.add_section(section)
        self.cp.set(section, key, str(value))

#
# Special parsers
#
################################################################################
#
# parse_string_logical()
#
################################################################################
    def parse_string_logical(self, par_str):
        """
        Logical parameters are given by string 'True' or 'False'
        (case does not matter). In fact, only the first symbol matters so that
        one can write 'T' or 'F'.
        """
        first_char = par_str[0].lower()
        assert first_char in 'tf', "Logical parameters should be given by either 'True' or 'False'"
        return first_char == 't'

################################################################################
#
# parse_string_int_list()
#
################################################################################
    def parse_string_int_list(self, par_str):
        """
        A list of integers, either enumerated ('4 7 10', commas allowed) or
        given by a range 'i1..i2' with an optional step 'i1..i2:step'.
        An empty string gives None.
        """
        par_str = par_str.strip()
        if not par_str:
            return None
        patt = r'^([0-9]+)\.\.([0-9]+)(?::([0-9]+))?$'
        match = re.match(patt, par_str)
        if match:
            i1, i2 = int(match.group(1)), int(match.group(2))
            step = int(match.group(3)) if match.group(3) else 1
            mess = "First index of the range must be smaller or equal to the second"
            assert i1 <= i2, mess
            assert step > 0, "Step of the range must be positive"
            return list(range(i1, i2 + 1, step))
        try:
            return [int(s) for s in re.split(r'[\s,]+', par_str)]
        except ValueError:
            raise ValueError("Cannot parse a list of integers: '%s'"%(par_str))

################################################################################
#
# parse_string_float_list()
#
################################################################################
    def parse_string_float_list(self, par_str):
        """
        A list of floats, enumerated or given by a range 'x1..x2:step'.
        """
        par_str = par_str.strip()
        patt = r'^([0-9.eE+-]+)\.\.([0-9.eE+-]+):([0-9.eE+-]+)$'
        match = re.match(patt, par_str)
        if match:
            x1, x2, step = map(float, match.groups())
            assert step > 0.0, "Step of the range must be positive"
            assert x1 <= x2, "First value of the range must be smaller or equal to the second"
            count = int(round((x2 - x1) / step)) + 1
            return [round(x1 + i * step, 12) for i in range(count)]
        try:
            return [float(s) for s in re.split(r'[\s,]+', par_str)]
        except ValueError:
            raise ValueError("Cannot parse a list of floats: '%s'"%(par_str))

    def parse_string_prob_list(self, par_str):
        """
        Loss probabilities, each in (0, 1).
        """
        values = self.parse_string_float_list(par_str)
        assert all(0.0 < v < 1.0 for v in values), "Loss probabilities must lie in (0, 1): '%s'"%(par_str)
        return values

    def parse_string_eps_list(self, par_str):
        values = self.parse_string_float_list(par_str)
        assert all(0.0 < v < 1.0 for v in values), "Tail probabilities must lie in (0, 1): '%s'"%(par_str)
        return values

    def parse_string_degree_list(self, par_str):
        values = self.parse_string_int_list(par_str)
        assert values and all(k >= 2 for k in values), "Tree degrees must be >= 2: '%s'"%(par_str)
        return values

    def parse_string_positive_int(self, par_str):
        value = int(par_str)
        assert value >= 1, "Parameter must be a positive integer, got '%s'"%(par_str)
        return value

    def parse_string_seed(self, par_str):
        value = int(par_str)
        assert value >= 0, "SEED must be a non-negative integer, got '%s'"%(par_str)
        return value

################################################################################
#
# parse_string_choice()
#
################################################################################
    def parse_string_choice(self, par_str, choices):
        value = par_str.strip().lower()
        assert value in choices, "'%s' is not one of: %s"%(par_str, ', '.join(choices))
        return value

    def parse_string_choice_list(self, par_str, choices):
        values = [s for s in re.split(r'[\s,]+', par_str.strip().lower()) if s]
        assert values, "Empty list of choices"
        for value in values:
            assert value in choices, "'%s' is not one of: %s"%(value, ', '.join(choices))
        return values

################################################################################
#
# parse_parameter_set()
#
################################################################################
    def parse_parameter_set(self, section, param_set, exception=False, defaults=True):
        """
        Parses required or optional parameter set from a section.
        For required parameters `exception=True` must be set.
        """
        parsed = {}
        for par in list(param_set.keys()):
            key = param_set[par][0]
            try:
                par_str = self.cp.get(section, par)
            except (configparser.NoOptionError, configparser.NoSectionError):
                if exception:
                    message = "Required parameter '%s' not found in section [%s]"%(par, section)
                    raise Exception(message)
                else:
# Use the default value if there is one
                    if defaults and len(param_set[par]) > 2:
                        parsed[key] = param_set[par][2]
                    continue

            if self.verbosity > 0:
                print("  %s = %s"%(par, par_str), file=sys.stderr)

            parse_fun = param_set[par][1]
            parsed[key] = parse_fun(par_str)

        if self.cp.has_section(section):
            unknown = set(self.cp.options(section)) - set(param_set.keys())
            for par in sorted(unknown):
                issue_warning("Unknown parameter '%s' in section [%s] is ignored"%(par, section))

        return parsed

################################################################################
#
# parse_general()
#
################################################################################
    def _general_section(self):
        gen_section = [s for s in self.cp.sections() if s.lower() == 'general']
        if len(gen_section) > 1:
            raise Exception("More than one section [General] is found")
        return gen_section[0] if gen_section else 'General'

    def parse_general(self):
        """
        Parses [General] section. The seed defaults to the environment
        variable MULTICAST_EVT_SEED, then to a fixed value.
        """
        self.general = {}
        parsed = self.parse_parameter_set(self._general_section(), self.gen_optional, exception=False)
        if 'seed' in parsed:
            self.general['seed_source'] = 'config'
        elif os.environ.get(SEED_ENV):
            parsed['seed'] = self.parse_string_seed(os.environ[SEED_ENV])
            self.general['seed_source'] = 'env:' + SEED_ENV
        else:
            parsed['seed'] = DEFAULT_SEED
            self.general['seed_source'] = 'default'
        self.general.update(parsed)

################################################################################
#
# parse_command()
#
################################################################################
    def parse_command(self, command):
        """
        Parses the section of `command`, filling in defaults.
        """
        assert command in COMMANDS, "Unknown command '%s'"%(command)
        self.parameters = self.parse_parameter_set(command, self.cmd_optional[command],
                                                   exception=False)
        self.check_command(command)

    def check_command(self, command):
        """
        Consistency checks across parameters of a command section.
        """
        pars = self.parameters
        if 'n_exp' in pars:
            assert pars['n_exp'] and all(n >= 1 for n in pars['n_exp']), "N_EXP must be positive integers"
        if pars.get('kn_exp') is not None:
            assert all(j >= 1 for j in pars['kn_exp']), "KN_EXP must be positive integers"
        if 'M' in pars:
            assert pars['M'] and all(m >= 1 for m in pars['M']), "M must be positive integers"
        if command == 'bounds' and pars['regime'] != 'constant_k':
            assert pars['height'] and all(h >= 1 for h in pars['height']), "HEIGHT must be positive integers"
        if command == 'diagnostics':
            assert all(h >= 2 for h in pars['growing_height']), "GROWING_HEIGHT must be >= 2"

################################################################################
#
# Main parser function
#
################################################################################
    def parse_input(self, command):
        """
        Parses [General] and the command section.
        """
        self.parse_general()
        self.parse_command(command)

    def as_dict(self):
        """
        Parsed configuration, suitable for serialization.
        """
        out = {'general': dict(self.general), 'parameters': {}}
        for key, value in self.parameters.items():
            if isinstance(value, np.ndarray):
                value = value.tolist()
            out['parameters'][key] = value
        return out
