# Copyright 2018 Xanadu Quantum Technologies Inc.

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
Unit tests for the :mod:`phcircuit` configuration class :class:`Configuration`.
"""
# pylint: disable=protected-access
import os
import logging as log

import pytest
import toml

import phcircuit as phc
from phcircuit import Configuration
from phcircuit.dynit import WindowConfig

log.getLogger("defaults")

config_path = "default_config.toml"
root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


@pytest.fixture(scope="function")
def default_config():
    return Configuration(name=os.path.join(root, config_path))


@pytest.fixture(scope="session")
def default_config_toml():
    return toml.load(os.path.join(root, config_path))


class TestConfigurationFileInteraction:
    """Test the interaction with the configuration file."""

    def test_loading_current_directory(self, monkeypatch, default_config_toml):
        """Test that the default configuration file can be loaded
        from the current directory."""
        monkeypatch.chdir(root)
        monkeypatch.setenv("PHCIRCUIT_CONF", "")
        config = Configuration(name=config_path)

        assert config.path == os.path.join(os.curdir, config_path)
        assert config._config == default_config_toml

    def test_loading_environment_variable(self, monkeypatch, tmp_path, default_config_toml):
        """Test that the default configuration file can be loaded
        from an environment variable."""
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("PHCIRCUIT_CONF", root)

        config = Configuration(name=config_path)

        assert config._config == default_config_toml
        assert config._env_config_dir == root
        assert config.path == os.path.join(root, config_path)

    def test_loading_absolute_path(self, monkeypatch, tmp_path, default_config_toml):
        """Test that the default configuration file can be loaded
        from an absolute path."""
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("PHCIRCUIT_CONF", "")

        config = Configuration(name=os.path.join(root, config_path))

        assert config._config == default_config_toml
        assert config.path == os.path.join(root, config_path)

    def test_not_found_warning(self, caplog):
        """Test that a message is logged if no configuration file is found."""
        caplog.clear()
        caplog.set_level(log.INFO)

        Configuration("noconfig")

        assert len(caplog.records) == 1
        assert caplog.records[0].message == "No PHCircuit configuration file found."

    def test_save(self, tmp_path, default_config):
        """Test saving a configuration file."""
        default_config["dynit.lmax"] = 10

        temp_config_path = str(tmp_path / "test_config.toml")
        default_config.save(temp_config_path)

        result = toml.load(temp_config_path)
        assert default_config._config == result
        assert result["dynit"]["lmax"] == 10


class TestProperties:
    """Test that the configuration class works as expected"""

    def test_get_item(self, default_config):
        """Test getting items."""
        # get existing options
        assert default_config["main.integrator"] == "trapezoidal"
        assert default_config["main"]["model"] == "model1"
        assert default_config["newton.max_iter"] == 50
        assert default_config["laws"]["inversion_tol"] == 1e-12

        # sections without options
        assert default_config["euler"] == {}

        # get key that doesn't exist
        assert default_config["dynit.idonotexist"] == {}
        assert default_config["idonotexist.either"] == {}

    def test_set_item(self, default_config):
        """Test setting items."""
        # set existing options
        default_config["newton.abs_tol"] = 1e-6
        assert default_config["newton.abs_tol"] == 1e-6
        assert default_config["newton"]["abs_tol"] == 1e-6

        # set new options
        default_config["trapezoidal"]["max_iter"] = 5
        assert default_config["trapezoidal.max_iter"] == 5

        # set nested keys that don't exist
        default_config["plugins.rk4.order"] = 4
        assert default_config["plugins"] == {"rk4": {"order": 4}}

    def test_options(self, default_config):
        """Test that later sections take precedence."""
        default_config["trapezoidal.max_iter"] = 5

        options = default_config.options("main", "newton", "trapezoidal")
        assert options["max_iter"] == 5
        assert options["abs_tol"] == 1e-10
        assert options["integrator"] == "trapezoidal"

        assert default_config.options("idonotexist") == {}

    def test_bool(self, default_config):
        """Test boolean value of the Configuration object."""
        # test false if no config is loaded
        config = Configuration("noconfig")

        assert not config
        assert default_config


class TestPHCircuitInit:
    """Tests to ensure that the code in phcircuit/__init__.py and the
    option classes correctly load and use configuration data"""

    def test_integrator_load(self, default_config):
        """Test loading an integrator with a configuration."""
        default_config["newton.max_iter"] = 20
        default_config["euler.max_iter"] = 7

        assert phc.integrator("trapezoidal", config=default_config).newton.max_iter == 20
        assert phc.integrator("euler", config=default_config).newton.max_iter == 7

    def test_keyword_arguments_take_precedence(self, default_config):
        """Test that keyword arguments override the configuration."""
        default_config["euler.max_iter"] = 7
        integ = phc.integrator("euler", config=default_config, max_iter=3)

        assert integ.newton.max_iter == 3

    def test_window_config(self, default_config):
        """Test the dynamic iteration options from a configuration."""
        config = WindowConfig.from_config(default_config, window=0.1, h=0.01)

        assert config.lmax == 20
        assert config.wr_tol == 1e-8
        assert config.scheme == "jacobi"
        assert config.workers is None


class TestValidation:
    """Tests for the validation of the numerical sections."""

    def test_candidates(self, monkeypatch):
        """Test the search order of the configuration file."""
        monkeypatch.setenv("PHCIRCUIT_CONF", "/etc/phcircuit")
        config = Configuration("noconfig.toml")

        assert config.candidates[0] == os.path.join(os.curdir, "noconfig.toml")
        assert config.candidates[1] == os.path.join("/etc/phcircuit", "noconfig.toml")
        assert config.candidates[-1] == "noconfig.toml"
        assert config.path is None

    @pytest.mark.parametrize(
        "text",
        ['[newton]\nabs_tol = "small"\n', "[laws]\ninversion_tol = true\n", "[dynit]\nlmax = [20]\n"],
    )
    def test_not_a_number(self, tmp_path, text):
        """Test that numerical options must be numbers."""
        path = tmp_path / "config.toml"
        path.write_text(text)

        with pytest.raises(ValueError, match="must be a number"):
            Configuration(str(path))

    def test_scheme_is_a_string(self, tmp_path):
        """Test that the iteration scheme may be a string."""
        path = tmp_path / "config.toml"
        path.write_text('[dynit]\nscheme = "gs"\nlmax = 5\n')

        config = Configuration(str(path))
        assert WindowConfig.from_config(config, window=0.1, h=0.01).scheme == "gauss-seidel"
