#!/usr/bin/env python3

import importlib.machinery
import importlib.util
import os
import sys

root_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

def import_path(path, register=True):
    '''
    Import a Python source file given by path, even if it has no .py extension,
    e.g. our executables or test case files.

    Dashes in the basename become underscores in the module name.

    :param register: add the module to sys.modules under that name.
    '''
    module_name = os.path.basename(path).replace('-', '_')
    if module_name.endswith('.py'):
        module_name = module_name[:-3]
    spec = importlib.util.spec_from_loader(
        module_name,
        importlib.machinery.SourceFileLoader(module_name, path)
    )
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    if register:
        sys.modules[module_name] = module
    return module

def import_path_relative_root(basename):
    return import_path(os.path.join(root_dir, basename))

def import_path_main(basename):
    '''
    Import an object of the Main class of a given executable.

    By convention, the main object of all our CLI scripts is called Main.
    '''
    if root_dir not in sys.path:
        sys.path.insert(0, root_dir)
    return import_path_relative_root(basename).Main()
