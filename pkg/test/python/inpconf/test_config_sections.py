r"""
Tests of 'parse_parameter_set()', 'parse_general()' and 'parse_input()'
defined in ConfigParameters class
"""
import contextlib
import io
import os
import rpath
_rpath = os.path.dirname(rpath.__file__) + '/'
from unittest import mock

import evttest
from multicast_evt.inpconf import DEFAULT_SEED, SEED_ENV, ConfigParameters
from multicast_evt.presets import PRESETS, get_preset

################################################################################
#
# TestParseParameterSet
#
################################################################################
class TestParseParameterSet(evttest.EvtTestCase):
    """
    Function:

    def parse_parameter_set(self, section, param_set, exception=False)

    Scenarios:

    - **if** section [bounds] contains 'P' and 'N_EXP' **return** them parsed, with
      defaults for the missing optional parameters
    - **if** a parameter is missing and exception=True **raise** Exception
    - **if** a section has an unknown parameter **issue** a warning
    """
    def setUp(self):
        self.cpars = ConfigParameters(_rpath + 'test1.cfg')

# Scenario 1
    def test_bounds_section(self):
        res = self.cpars.parse_parameter_set('bounds', self.cpars.cmd_optional['bounds'])
        self.assertListEqual(res['p'], [0.1, 0.2])
        self.assertListEqual(res['n_exp'], list(range(4, 11)))
        self.assertListEqual(res['kn_exp'], [4, 7])
        self.assertListEqual(res['M'], [1])
        self.assertListEqual(res['K'], [2])
        self.assertEqual(res['regime'], 'constant_k')

# Scenario 2
    def test_required_exception(self):
        param_set = {'eps': ('eps', self.cpars.parse_string_eps_list)}
        err_mess = "Required parameter"
        with self.assertRaisesRegex(Exception, err_mess):
            self.cpars.parse_parameter_set('bounds', param_set, exception=True)

# Scenario 3
    def test_unknown_parameter(self):
        cpars = ConfigParameters(_rpath + 'input_test_1.cfg')
        err = io.StringIO()
        with contextlib.redirect_stderr(err):
            res = cpars.parse_parameter_set('simulate', cpars.cmd_optional['simulate'])
        self.assertIn("Unknown parameter 'color'", err.getvalue())
        self.assertListEqual(res['modes'], ['tree', 'iid'])
        self.assertListEqual(res['M'], [1, 2])
        self.assertEqual(len(res['p']), 4)

################################################################################
#
# TestParseGeneral
#
################################################################################
class TestParseGeneral(evttest.EvtTestCase):
    """
    Function:

    def parse_general(self)

    Scenarios:

    - **if** [General] sets SEED **return** it with seed_source 'config'
    - **if** SEED is absent and the environment variable is set **return** the environment seed
    - **if** neither is set **return** the default seed
    - **if** SEED is negative **raise** AssertionError
    - **if** an option is set afterwards **return** the overriding value
    """
# Scenario 1
    def test_config_seed(self):
        cpars = ConfigParameters(_rpath + 'test1.cfg')
        with mock.patch.dict(os.environ, {SEED_ENV: '99'}):
            cpars.parse_general()
        self.assertEqual(cpars.general['seed'], 2024)
        self.assertEqual(cpars.general['seed_source'], 'config')
        self.assertEqual(cpars.general['workers'], 2)
        self.assertEqual(cpars.general['out'], '-')

# Scenario 2
    def test_env_seed(self):
        cpars = ConfigParameters(_rpath + 'input_test_1.cfg')
        with mock.patch.dict(os.environ, {SEED_ENV: '99'}):
            cpars.parse_general()
        self.assertEqual(cpars.general['seed'], 99)
        self.assertEqual(cpars.general['seed_source'], 'env:' + SEED_ENV)
        self.assertEqual(cpars.general['out'], 'result.csv')

# Scenario 3
    def test_default_seed(self):
        cpars = ConfigParameters(input_string="[roots]\nP = 0.1\n")
        with mock.patch.dict(os.environ, {}, clear=True):
            cpars.parse_general()
        self.assertEqual(cpars.general['seed'], DEFAULT_SEED)
        self.assertEqual(cpars.general['seed_source'], 'default')

# Scenario 4
    def test_negative_seed(self):
        cpars = ConfigParameters(_rpath + 'input_test_3.cfg')
        with self.assertRaises(AssertionError):
            cpars.parse_general()

# Scenario 5
    def test_override(self):
        cpars = ConfigParameters(_rpath + 'test1.cfg')
        cpars.set_option('general', 'seed', 7)
        cpars.set_option('bounds', 'p', '0.5')
        cpars.parse_input('bounds')
        self.assertEqual(cpars.general['seed'], 7)
        self.assertListEqual(cpars.parameters['p'], [0.5])

################################################################################
#
# TestParseInput
#
################################################################################
class TestParseInput(evttest.EvtTestCase):
    """
    Function:

    def parse_input(self, command)
    def as_dict(self)

    Scenarios:

    - **if** a command section is absent **return** the defaults of the command
    - **if** HEIGHT contains 0 in a growing-degree regime **raise** AssertionError
    - **if** the command is unknown **raise** AssertionError
    - **return** a serializable dictionary of the parsed configuration
    - **if** a preset is parsed **return** its parameters without warnings
    """
# Scenario 1
    def test_defaults(self):
        cpars = ConfigParameters(input_string="[General]\nSEED = 3\n")
        cpars.parse_input('diagnostics')
        pars = cpars.parameters
        self.assertListEqual(pars['kn_exp'], [4])
        self.assertListEqual(pars['growing_height'], [2])
        self.assertEqual(pars['envelope'], True)
        self.assertEqual(pars['alpha'], 0.75)

# Scenario 2
    def test_bad_height(self):
        cpars = ConfigParameters(_rpath + 'input_test_2.cfg')
        with self.assertRaisesRegex(AssertionError, "HEIGHT"):
            cpars.parse_input('bounds')

# Scenario 3
    def test_unknown_command(self):
        cpars = ConfigParameters(_rpath + 'test1.cfg')
        with self.assertRaises(AssertionError):
            cpars.parse_input('plot')

# Scenario 4
    def test_as_dict(self):
        cpars = ConfigParameters(_rpath + 'test1.cfg')
        cpars.parse_input('bounds')
        res = cpars.as_dict()
        self.assertEqual(res['general']['seed'], 2024)
        self.assertListEqual(res['parameters']['kn_exp'], [4, 7])

# Scenario 5
    def test_presets(self):
        for name in PRESETS:
            command, text = get_preset(name)
            cpars = ConfigParameters(input_string=text)
            err = io.StringIO()
            with contextlib.redirect_stderr(err):
                cpars.parse_input(command)
            self.assertEqual(err.getvalue(), '', msg=name)
        with self.assertRaises(ValueError):
            get_preset('fig-unknown')
