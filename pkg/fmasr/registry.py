import os
from pathlib import Path

import sacred
from sacred.config import ConfigScope

from fmasr.utils.loginit import get_logger

logger = get_logger(__name__)  # pylint: disable=invalid-name

# mapping of module types (e.g., "solver") to the module base classes
all_known_modules = {}

PACKAGE_PATH = Path(os.path.dirname(__file__))
RESULTS_BASE_PATH = Path(os.environ.get("FMASR_RESULTS", os.path.expanduser("~/.fmasr/results/")))
CACHE_BASE_PATH = Path(os.environ.get("FMASR_CACHE", os.path.expanduser("~/.fmasr/cache/")))


class RegisterableModule(type):
    """ Metaclass indicating that the subclass is an fmasr module.
        Modules receive a `self.plugins` dict mapping names to classes.
        This package's `all_known_modules` dict maps module types to module base classes. """

    def __init__(cls, name, parents, attrs):
        """ Metaclass used to automatically register module implementations """
        if not hasattr(cls, "plugins"):
            # true when module base class is declared (e.g., Solver)
            cls.plugins = {}
            all_known_modules[cls.module_type] = cls
        else:
            # class (FastMarchingASR) inheriting from the module base class (Solver)
            cls.register_plugin(cls)

    def register_plugin(cls, plugin):
        if cls.plugins.get(plugin.name, plugin) != plugin:
            logger.debug(f"WARNING: replacing entry {cls.plugins[plugin.name]} for {plugin.name} with {plugin}")
        cls.plugins[plugin.name] = plugin


class ModuleBase:
    """ Base class to be inherited by fmasr module classes (e.g., Solver, Benchmark) """

    # this module's class methods that should be exposed as commands
    commands = {}
    cfg = None
    config_keys_not_in_path = []

    def __init__(self, cfg):
        """ Use classmethod create, or let the pipeline instantiate the module from its config. """
        self.cfg = sacred.config.custom_containers.ReadOnlyDict(cfg)

    @staticmethod
    def config():
        pass

    @classmethod
    def default_config(cls):
        cfg = dict(ConfigScope(cls.config)())
        cfg["_name"] = cls.name
        return cfg

    @classmethod
    def create(cls, **overrides):
        """ Instantiate this module with its default config, updated with `overrides`. """

        cfg = cls.default_config()
        unknown = set(overrides) - set(cfg)
        if unknown:
            raise KeyError(f"unknown config options for {cls.module_type}={cls.name}: {sorted(unknown)}")
        cfg.update(overrides)
        return cls(cfg)

    @classmethod
    def _create_ingredient(cls, path, command_list):
        ingredient = sacred.Ingredient(path)

        # create module config consisting of (1) the module class name and (2) its config options (from config())
        ingredient.add_config({"_name": cls.name})
        ingredient.config(cls.config)

        # add ingredient's commands to the shared command_list
        for command_name, command_func in cls.commands.items():
            command_list.append((command_name, command_func, path, ingredient))

        return ingredient

    def get_cache_path(self):
        """ Return a path encoding the module's config, which can be used for caching. """
        return CACHE_BASE_PATH / self.get_module_path()

    def get_module_path(self):
        """ Return a path encoding the module's config """

        module_cfg = {k: v for k, v in self.cfg.items() if k not in self.config_keys_not_in_path}
        module_name_key = self.module_type + "-" + module_cfg.pop("_name")
        return "_".join([module_name_key] + [f"{k}-{v}" for k, v in sorted(module_cfg.items())])

    def print_module_graph(self, prefix=""):
        print(prefix + f"{self.module_type}={self.name}")
