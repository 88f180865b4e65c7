"""Loads the qsynth configuration files and sets up logging."""

import collections
import configparser
import logging
import pathlib
import typing

from . import simulator

HOME_CONFIG_FILE = pathlib.Path('~/.qsynth.cfg').expanduser()
GLOBAL_CONFIG_FILE = pathlib.Path('./qsynth.cfg').absolute()
CONFIG_SECTION = 'qsynth'

# Exit status for input errors, shared with the CLI.
EXIT_INPUT_ERROR = 2

DEFAULT_CONFIG = {
    'qsynth': collections.OrderedDict([
        ('simulator_qubit_cap', str(simulator.DEFAULT_QUBIT_CAP)),
        ('fidelity_tolerance', '1e-9'),
        ('unitary_tolerance', '1e-8'),
        ('ancilla_tolerance', str(simulator.DEFAULT_ANCILLA_TOLERANCE)),
        ('seed', '0'),
        ('bench_jobs', '1'),
    ]),
    'loggers': collections.OrderedDict([('keys', 'root,qsynth')]),
    'logger_root': collections.OrderedDict([('level', 'WARNING'), ('handlers', 'console')]),
    'logger_qsynth': collections.OrderedDict([
        ('level', 'INFO'),
        ('qualname', 'qsynth'),
        ('handlers', 'console'),
        ('propagate', '0'),
    ]),
    'handlers': collections.OrderedDict([('keys', 'console')]),
    'handler_console': collections.OrderedDict([
        ('class', 'logging.StreamHandler'),
        ('formatter', 'qsynth'),
        ('args', '(sys.stderr,)'),
    ]),
    'formatters': collections.OrderedDict([('keys', 'qsynth')]),
    'formatter_qsynth': collections.OrderedDict([
        ('format', '%(asctime)-15s %(levelname)8s %(name)s %(message)s'),
    ]),
}  # type: typing.Mapping[str, typing.Mapping[str, typing.Any]]

log = logging.getLogger(__name__)


class ConfigParser(configparser.ConfigParser):
    """ConfigParser that can easily get values from our default config section."""

    _DEFAULT_INTERPOLATION = configparser.ExtendedInterpolation()

    def value(self, key, valtype: type = str):
        return valtype(self.get(CONFIG_SECTION, key))

    def setvalue(self, key, value):
        self.set(CONFIG_SECTION, key, str(value))

    def simulator(self) -> simulator.Simulator:
        return simulator.Simulator(qubit_cap=self.value('simulator_qubit_cap', int),
                                   ancilla_tolerance=self.value('ancilla_tolerance', float))


def load_config(config_file: pathlib.Path = None,
                show_effective_config: bool = False) -> ConfigParser:
    """Loads the defaults, then ./qsynth.cfg and ~/.qsynth.cfg or the given file."""

    # Logging and the default interpolation of configparser both use the
    # same syntax for variables. ExtendedInterpolation lets config files use
    # ${key} while the logging format keeps %(levelname)s.
    confparser = ConfigParser()
    confparser.read_dict(DEFAULT_CONFIG)

    if config_file:
        log.info('Loading configuration from %s', config_file)
        if not config_file.exists():
            log.error('Config file %s does not exist', config_file)
            raise SystemExit(EXIT_INPUT_ERROR)
        loaded = confparser.read(str(config_file), encoding='utf8')
    else:
        config_files = [GLOBAL_CONFIG_FILE, HOME_CONFIG_FILE]
        filenames = [str(f.absolute()) for f in config_files if f.exists()]
        loaded = confparser.read(filenames, encoding='utf8')

    log.debug('Succesfully loaded: %s', loaded)
    check_config(confparser)

    if show_effective_config:
        import sys
        log.info('Effective configuration:')
        to_show = configparser.ConfigParser(
            interpolation=configparser.ExtendedInterpolation()
        )
        to_show.read_dict(confparser)
        to_show.write(sys.stderr)

    return confparser


def configure_logging(confparser: configparser.ConfigParser, enable_debug: bool):
    import logging.config

    logging.config.fileConfig(confparser, disable_existing_loggers=True)
    logging.captureWarnings(capture=True)

    if enable_debug:
        logging.getLogger('qsynth').setLevel(logging.DEBUG)
        log.debug('Enabling debug logging')


def check_config(confparser: ConfigParser):
    """Check the config, stopping the process if there is an error."""

    def number(key: str, valtype: type):
        try:
            return confparser.value(key, valtype)
        except ValueError:
            raise SystemExit(f'Configuration error: {key} should be a {valtype.__name__}: '
                             f'{confparser.value(key)!r}')

    cap = number('simulator_qubit_cap', int)
    if not 1 <= cap <= 30:
        raise SystemExit(f'Configuration error: simulator_qubit_cap should be '
                         f'between 1 and 30: {cap}')

    for key in ('fidelity_tolerance', 'unitary_tolerance', 'ancilla_tolerance'):
        tolerance = number(key, float)
        if not 0 < tolerance < 1:
            raise SystemExit(f'Configuration error: {key} should be between 0 and 1: '
                             f'{tolerance}')

    number('seed', int)
    if number('bench_jobs', int) < 1:
        raise SystemExit('Configuration error: bench_jobs should be at least 1')
