#!/usr/bin/env python3

'''
Functions callable both from Python and from the command line, with
defaults that can come from a configuration file.
'''

import argparse
import bisect
import collections
import json
import os
import sys

from sortkd import import_path
from sortkd.core import ConfigError

class _Argument:
    def __init__(
            self,
            long_or_short_1,
            long_or_short_2=None,
            default=None,
            dest=None,
            help=None,
            nargs=None,
            **kwargs
        ):
            self.args = []
            # argparse cannot tell us if an argument was given or not, and we need
            # that to decide if the config file overrides it. None is the sentinel.
            self.kwargs = {'default': None}
            shortname, longname, key, is_option = self.get_key(
                long_or_short_1,
                long_or_short_2,
                dest
            )
            if shortname is not None:
                self.args.append(shortname)
            if is_option:
                self.args.append(longname)
            else:
                self.args.append(key)
                self.kwargs['metavar'] = longname
                if default is not None and nargs is None:
                    self.kwargs['nargs'] = '?'
            if dest is not None:
                self.kwargs['dest'] = dest
            if nargs is not None:
                self.kwargs['nargs'] = nargs
            self.is_bool = default is True or default is False
            if not self.is_bool and default is None and (
                nargs in ('*', '+')
                or kwargs.get('action') == 'append'
            ):
                default = []
            if self.is_bool and not 'action' in kwargs:
                self.kwargs['action'] = 'store_true'
            if help is not None:
                if default is not None:
                    if not help.endswith((' ', '\n')):
                        help += ' '
                    help += 'Default: {}'.format(default)
                self.kwargs['help'] = help
            self.optional = (
                default is not None or
                self.is_bool or
                is_option or
                nargs in ('?', '*', '+')
            ) and not kwargs.get('required', False)
            self.kwargs.update(kwargs)
            self.default = default
            self.longname = longname
            self.key = key
            self.is_option = is_option
            self.nargs = nargs

    def __str__(self):
        return str(self.args) + ' ' + str(self.kwargs)

    @staticmethod
    def get_key(
        long_or_short_1,
        long_or_short_2=None,
        dest=None,
        **kwargs
    ):
        '''
        :return: (shortname, longname, key, is_option). With two names the
            second one is the long one and determines the key.
        '''
        if long_or_short_2 is None:
            shortname = None
            longname = long_or_short_1
        else:
            shortname = long_or_short_1
            longname = long_or_short_2
        if longname[0] == '-':
            key = longname.lstrip('-').replace('-', '_')
            is_option = True
        else:
            key = longname.replace('-', '_')
            is_option = False
        if dest is not None:
            key = dest
        return shortname, longname, key, is_option

def load_config(config_file, extra_config_params=None):
    '''
    Read argument defaults from a configuration file.

    * .py: a module defining set_args(args) or set_args(args, extra_config_params)
      that fills the args dict
    * .json: a JSON object
    * .toml: a TOML table

    Dashes in keys are turned into underscores.

    :rtype: Dict[str, Any]
    '''
    ext = os.path.splitext(config_file)[1]
    if ext == '.json':
        with open(config_file, 'r', encoding='utf-8') as f:
            try:
                configs = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError('config_file', '{}: {}'.format(config_file, e))
    elif ext == '.toml':
        import tomllib
        with open(config_file, 'rb') as f:
            try:
                configs = tomllib.load(f)
            except tomllib.TOMLDecodeError as e:
                raise ConfigError('config_file', '{}: {}'.format(config_file, e))
    else:
        configs = {}
        config = import_path.import_path(config_file, register=False)
        if extra_config_params is None:
            config.set_args(configs)
        else:
            config.set_args(configs, extra_config_params)
    if not isinstance(configs, dict):
        raise ConfigError('config_file', '{} must contain a key/value mapping'.format(config_file))
    return {key.replace('-', '_'): value for key, value in configs.items()}

class CliFunction:
    '''
    A function that can be called either from Python code, or from the command line.

    * one argument description, in a format very close to argparse
    * default arguments handled the same way in both cases
    * a configuration file can provide default values, see load_config
    * boolean defaults automatically use store_true, and get a --no-* inverse
      so that a value set from the config can be undone
    * from a Python call, get the equivalent command line with get_cli
    * main() knows which arguments were given explicitly, through _args_given
    '''
    def __call__(self, **kwargs):
        '''
        Python version of the function call.
        '''
        return self._do_main(kwargs)

    def _do_main(self, kwargs):
        return self.main(**self._get_args(kwargs))

    def __init__(
        self,
        default_config_file=None,
        description=None,
        extra_config_params=None,
        config_flags=('--config-file',),
    ):
        '''
        :param config_flags: option strings of the config file argument, the last one
            being the long name.
        '''
        self._arguments = collections.OrderedDict()
        self._default_config_file = default_config_file
        self._description = description
        self.extra_config_params = extra_config_params
        self.add_argument(
            *config_flags,
            dest='config_file',
            help='Path to a configuration file (.py, .json or .toml) with argument defaults. '
                 'Default: {}'.format(self._default_config_file)
        )

    def __str__(self):
        return '\n'.join(str(self._arguments[key]) for key in self._arguments)

    def _get_args(self, kwargs):
        '''
        Resolve arguments from the explicit values, the config file and the defaults,
        in that order of precedence.

        Add an extra _args_given argument which says if each argument was given.
        Args set from the config file count as given.
        '''
        args_with_defaults = kwargs.copy()
        args_given = {}
        if args_with_defaults.get('config_file') is not None:
            config_file = args_with_defaults['config_file']
            args_given['config_file'] = True
        else:
            config_file = self._default_config_file
            args_given['config_file'] = False
        for key in self._arguments:
            args_given[key] = not (
                not key in args_with_defaults or
                args_with_defaults[key] is None or
                self._arguments[key].nargs == '*' and args_with_defaults[key] == []
            )
        for key in args_with_defaults:
            if key not in self._arguments:
                raise ConfigError(key, 'unknown argument')
        if config_file is not None:
            if os.path.exists(config_file):
                config_configs = load_config(config_file, self.extra_config_params)
                for key in config_configs:
                    if key not in self._arguments or key == 'config_file':
                        raise ConfigError(key, 'unknown key in config file {}'.format(config_file))
                    if not args_given[key]:
                        args_with_defaults[key] = config_configs[key]
                        args_given[key] = True
            elif args_given['config_file']:
                raise FileNotFoundError('Config file does not exist: {}'.format(config_file))
        for key in self._arguments:
            argument = self._arguments[key]
            if (not key in args_with_defaults) or args_with_defaults[key] is None or \
                    (argument.nargs == '*' and args_with_defaults[key] == []):
                if argument.optional:
                    args_with_defaults[key] = argument.default
                else:
                    raise ConfigError(key, 'value not given for mandatory argument')
        args_with_defaults['_args_given'] = args_given
        del args_with_defaults['config_file']
        return args_with_defaults

    def add_argument(
            self,
            *args,
            **kwargs
        ):
            argument = _Argument(*args, **kwargs)
            self._arguments[argument.key] = argument

    def get_parser(self):
        parser = argparse.ArgumentParser(
            description=self._description,
            formatter_class=argparse.RawTextHelpFormatter,
        )
        for key in self._arguments:
            argument = self._arguments[key]
            parser.add_argument(*argument.args, **argument.kwargs)
            if argument.is_bool:
                new_longname = '--no' + argument.longname[1:]
                kwargs = argument.kwargs.copy()
                kwargs['default'] = not argument.default
                if kwargs['action'] in ('store_true', 'store_false'):
                    kwargs['action'] = 'store_false'
                kwargs.pop('help', None)
                kwargs.pop('dest', None)
                parser.add_argument(new_longname, dest=argument.key, **kwargs)
        return parser

    def cli_noexit(self, cli_args=None):
        '''
        Call the function from the CLI, parsing cli_args, or sys.argv if None.

        :return: the return of main
        '''
        args = self.get_parser().parse_args(args=cli_args)
        return self._do_main(vars(args))

    def cli(self, *args, **kwargs):
        '''
        Same as cli_noexit, but exit the program with the return value of main
        as the exit status. None is considered as 0.
        '''
        exit_status = self.cli_noexit(*args, **kwargs)
        if exit_status is None:
            exit_status = 0
        sys.exit(exit_status)

    def get_cli(self, **kwargs):
        '''
        :rtype: List[Tuple[str]]
        :return: the canonical command line arguments that would generate this
                 Python function call.

                 (--key, value) option pairs are grouped into tuples, and all
                 other values are grouped in their own tuple (positional_arg,)
                 or (--bool-arg,).

                 Arguments with default values are not added, but arguments
                 that are set by the config are.

                 Options are sorted alphabetically, followed by positional arguments.
        '''
        options = []
        positional_dict = {}
        kwargs = self._get_args(kwargs)
        for key in kwargs:
            if key == '_args_given':
                continue
            argument = self._arguments[key]
            value = kwargs[key]
            if value == argument.default:
                continue
            if argument.is_option:
                if argument.is_bool:
                    if value:
                        vals = [(argument.longname,)]
                    else:
                        vals = [('--no-' + argument.longname[2:],)]
                elif argument.kwargs.get('action') == 'append' or argument.nargs in ('*', '+'):
                    vals = [(argument.longname, str(val)) for val in value]
                else:
                    vals = [(argument.longname, str(value))]
                for val in vals:
                    bisect.insort(options, val)
            elif type(value) is list:
                positional_dict[key] = [tuple([str(v)]) for v in value]
            else:
                positional_dict[key] = [(str(value),)]
        positional = []
        for key in self._arguments.keys():
            if key in positional_dict:
                positional.extend(positional_dict[key])
        return options + positional

    @staticmethod
    def get_key(*args, **kwargs):
        return _Argument.get_key(*args, **kwargs)

    def main(self, **kwargs):
        '''
        Do the main function call work.

        :type arguments: Dict
        '''
        raise NotImplementedError

if __name__ == '__main__':
    import tempfile

    class OneCliFunction(CliFunction):
        def __init__(self, default_config_file=None):
            super().__init__(
                default_config_file=default_config_file,
                description='Transform some logits.',
                config_flags=('--config', '--config-file'),
            )
            self.add_argument('-m', '--mode', default='identity', help='Transform kind')
            self.add_argument('-t', '--temperature', default=4.0, type=float, help='Softmax temperature')
            self.add_argument('--standardize', default=False, help='Apply z-score')
            self.add_argument('--check', default=True, help='Check outputs')
            self.add_argument('--seed', type=int, help='RNG seed')
            self.add_argument('--noise-ratio', action='append', type=float)
            self.add_argument('records-in', help='Input file')
            self.add_argument('extra', nargs='*')

        def main(self, **kwargs):
            del kwargs['_args_given']
            return kwargs

    one_cli_function = OneCliFunction()

    default = one_cli_function(records_in='a.jsonl')
    assert default == {
        'mode': 'identity',
        'temperature': 4.0,
        'standardize': False,
        'check': True,
        'seed': None,
        'noise_ratio': [],
        'records_in': 'a.jsonl',
        'extra': [],
    }, default
    assert one_cli_function.cli_noexit(['a.jsonl']) == default

    out = one_cli_function(records_in='a.jsonl', mode='sort', temperature=2.0)
    assert out == one_cli_function.cli_noexit(['--mode', 'sort', '-t', '2', 'a.jsonl'])
    assert one_cli_function.cli_noexit(['--no-check', 'a.jsonl'])['check'] is False
    assert one_cli_function.cli_noexit(['--noise-ratio', '0.1', '--noise-ratio', '0.2', 'a.jsonl'])['noise_ratio'] \
        == [0.1, 0.2]
    assert one_cli_function.cli_noexit(['a.jsonl', 'b', 'c'])['extra'] == ['b', 'c']

    try:
        one_cli_function()
    except ConfigError as e:
        assert e.key == 'records_in'
    else:
        assert False

    with tempfile.TemporaryDirectory() as tmp:
        json_config = os.path.join(tmp, 'config.json')
        with open(json_config, 'w') as f:
            json.dump({'mode': 'swap', 'standardize': True, 'noise-ratio': [0.3]}, f)
        out = one_cli_function(records_in='a.jsonl', config_file=json_config, mode='sort')
        # Explicit arguments beat the config, the config beats the defaults.
        assert out['mode'] == 'sort'
        assert out['standardize'] is True
        assert out['noise_ratio'] == [0.3]
        assert one_cli_function.cli_noexit(['--config', json_config, '--no-standardize', 'a.jsonl'])['standardize'] \
            is False

        py_config = os.path.join(tmp, 'config.py')
        with open(py_config, 'w') as f:
            f.write('def set_args(args):\n    args["temperature"] = 8.0\n')
        assert OneCliFunction(py_config)(records_in='a.jsonl')['temperature'] == 8.0

        bad_config = os.path.join(tmp, 'bad.json')
        with open(bad_config, 'w') as f:
            json.dump({'temperatur': 1.0}, f)
        try:
            one_cli_function(records_in='a.jsonl', config_file=bad_config)
        except ConfigError as e:
            assert e.key == 'temperatur'
        else:
            assert False

        try:
            one_cli_function(records_in='a.jsonl', config_file=os.path.join(tmp, 'missing.json'))
        except FileNotFoundError:
            pass
        else:
            assert False

    assert one_cli_function.get_cli(records_in='a.jsonl', mode='sort') == [('--mode', 'sort'), ('a.jsonl',)]
    assert one_cli_function.get_cli(records_in='a.jsonl', check=False, standardize=True) == \
        [('--no-check',), ('--standardize',), ('a.jsonl',)]
    assert one_cli_function.get_cli(records_in='a.jsonl', noise_ratio=[0.2, 0.1]) == \
        [('--noise-ratio', '0.1'), ('--noise-ratio', '0.2'), ('a.jsonl',)]
