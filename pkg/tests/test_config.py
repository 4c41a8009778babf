# SPDX-FileCopyrightText: Copyright (c) 2024 NVIDIA CORPORATION & AFFILIATES. All rights reserved.
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import logging

import pytest

from sheaftree.config import Settings, configure_logging, load_settings
from sheaftree.error import ValidationError


def test_defaults_without_pyproject(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("SHEAFTREE_CONFIG", raising=False)
    assert load_settings() == Settings()


def test_tool_table(pyproject_toml_temp_dir):
    settings = load_settings()
    assert settings.field == "Fp:5"
    assert settings.seed == 3
    assert settings.count == 2
    assert settings.max_vertices == 5
    assert settings.max_stalk_dim == Settings().max_stalk_dim


def test_command_table(pyproject_toml_temp_dir):
    settings = load_settings(command="selftest")
    assert settings.count == 1
    assert settings.seed == 3
    assert settings.failure_dir == str(pyproject_toml_temp_dir / "failures")
    assert load_settings(command="random").count == 2


def test_config_override(pyproject_toml_temp_dir, monkeypatch):
    other = pyproject_toml_temp_dir / "other.toml"
    other.write_text('[tool.sheaftree]\nfield = "Fp:7"\nmax-stalk-dim = 1\n')
    monkeypatch.setenv("SHEAFTREE_CONFIG", str(other))
    settings = load_settings()
    assert settings.field == "Fp:7"
    assert settings.max_stalk_dim == 1
    assert settings.seed == 0


def test_unknown_key_warns(tmp_path):
    (tmp_path / "pyproject.toml").write_text('[tool.sheaftree]\ncolour = "blue"\nseed = 9\n')
    with pytest.warns(UserWarning, match="colour"):
        settings = load_settings(src_dir=tmp_path)
    assert settings.seed == 9


def test_bad_toml(tmp_path):
    (tmp_path / "pyproject.toml").write_text("[tool.sheaftree\n")
    with pytest.raises(ValidationError) as excinfo:
        load_settings(src_dir=tmp_path)
    assert excinfo.value.kind == "ConfigError"


def test_replace_skips_unset_values():
    settings = Settings().replace(seed=None, count=5, pretty=None)
    assert settings.count == 5
    assert settings.seed == 0
    assert settings.pretty is False


def test_log_level(monkeypatch):
    monkeypatch.setenv("SHEAFTREE_LOGLEVEL", "warning")
    assert configure_logging() == "WARNING"
    assert logging.getLogger("sheaftree").level == logging.WARNING
    monkeypatch.setenv("SHEAFTREE_LOGLEVEL", "chatty")
    with pytest.warns(UserWarning):
        assert configure_logging() == "INFO"
    monkeypatch.setenv("SHEAFTREE_LOGLEVEL", "DEBUG")
    configure_logging()
