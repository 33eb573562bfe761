# Copyright 2018-2019 Xanadu Quantum Technologies Inc.

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
r"""
This module contains the :class:`Configuration` class, which is used to
find, load, validate and save the numerical options of PHCircuit and of the
installed integrators.

The options live in a TOML file with the sections

* ``[main]``: the default integrator and circuit formulation,
* ``[newton]``: tolerances of the Newton iterations,
* ``[laws]``: tolerances of the law inversions and energy quadratures,
* ``[dynit]``: the options of the dynamic iteration,

and one section per integrator, named by its short name, overriding
``[newton]``.
"""
import os
import logging as log
import numbers

import toml
from appdirs import user_config_dir

log.getLogger()


#: environment variable naming a directory that holds the configuration file
ENV_VAR = "PHCIRCUIT_CONF"

#: sections whose options must be numbers, except for the listed string options
NUMERIC_SECTIONS = {"newton": (), "laws": (), "dynit": ("scheme",)}


class Configuration:
    """Configuration class.

    The file ``name`` is looked up in the current directory, in the directory
    named by the ``PHCIRCUIT_CONF`` environment variable and in the user
    configuration directory, in that order; finally ``name`` itself is tried
    as a path.

    Args:
        name (str): filename of the configuration file, or a path to it

    Raises:
        ValueError: if a numerical option of the file is not a number
    """

    def __init__(self, name):
        self._config = {}
        self._filepath = None
        self._name = name
        self._user_config_dir = user_config_dir("phcircuit", "phcircuit")
        self._env_config_dir = os.environ.get(ENV_VAR, "")

        for path in self.candidates:
            try:
                self.load(path)
            except FileNotFoundError:
                continue
            self._filepath = path
            break
        else:
            log.info("No PHCircuit configuration file found.")

    def __str__(self):
        return "{}".format(self._config) if self._config else ""

    def __repr__(self):
        return "PHCircuit Configuration <{}>".format(self._filepath)

    def __bool__(self):
        return bool(self._config)

    @property
    def candidates(self):
        """list[str]: the paths tried when looking for the configuration file"""
        directories = [os.curdir, self._env_config_dir, self._user_config_dir, ""]
        return [os.path.join(d, self._name) for d in directories]

    @property
    def path(self):
        """str or None: the path of the loaded configuration file"""
        return self._filepath

    def load(self, filepath):
        """Load and validate a configuration file.

        Args:
            filepath (str): path to the configuration file

        Raises:
            FileNotFoundError: if there is no such file
            ValueError: if a numerical option is not a number
        """
        with open(filepath, "r") as f:
            config = toml.load(f)

        self.validate(config, filepath)
        self._config = config
        log.debug("Loaded configuration file %s.", filepath)

    def save(self, filepath):
        """Save the options to a configuration file.

        Args:
            filepath (str): path to the configuration file
        """
        with open(filepath, "w") as f:
            toml.dump(self._config, f)

    @staticmethod
    def validate(config, source="<config>"):
        """Check that the numerical sections only hold numbers.

        Args:
            config (dict): the parsed options
            source (str): the file name used in error messages

        Raises:
            ValueError: for a non-numerical option
        """
        for section, strings in NUMERIC_SECTIONS.items():
            for key, value in config.get(section, {}).items():
                if key in strings:
                    continue
                if isinstance(value, bool) or not isinstance(value, numbers.Number):
                    raise ValueError(
                        "Option {}.{} in {} must be a number, got {!r}.".format(
                            section, key, source, value
                        )
                    )

    def options(self, *sections):
        """Merge the options of several sections.

        Later sections take precedence; nested tables are left out.

        Args:
            *sections (str): dotted section names

        Returns:
            dict: the merged options
        """
        merged = {}
        for section in sections:
            values = self[section]
            if isinstance(values, dict):
                merged.update({k: v for k, v in values.items() if not isinstance(v, dict)})
        return merged

    def __getitem__(self, key):
        return self.safe_get(self._config, *key.split("."))

    def __setitem__(self, key, value):
        self.safe_set(self._config, value, *key.split("."))

    @staticmethod
    def safe_set(dct, value, *keys):
        """Set a value in a nested dictionary, creating missing tables.

        Args:
            dct (dict): the nested dictionary
            value: the value to set
            *keys: the path of keys, outermost first
        """
        *tables, last = keys
        for key in tables:
            dct = dct.setdefault(key, {})
        dct[last] = value

    @staticmethod
    def safe_get(dct, *keys):
        """Get a value from a nested dictionary.

        Args:
            dct (dict): the nested dictionary
            *keys: the path of keys, outermost first

        Returns:
            the value at ``dct[keys[0]][keys[1]]...``, or an empty dictionary
            if any key along the path is missing
        """
        for key in keys:
            if not isinstance(dct, dict) or key not in dct:
                return {}
            dct = dct[key]
        return dct
