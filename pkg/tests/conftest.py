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

import json
import os

import pytest
from test_util import FIXTURE_DIR

from sheaftree import fixtures
from sheaftree.cli import main
from sheaftree.exactla import FieldSpec

os.environ["SHEAFTREE_LOGLEVEL"] = "DEBUG"

PYPROJECT_TOML_TEMPLATE = """
[tool.sheaftree]
field = "Fp:5"
seed = 3
count = 2
max_vertices = 5

[tool.sheaftree.selftest]
count = 1
failure_dir = "{failure_dir}"
"""


@pytest.fixture(scope="session")
def Q():
    return FieldSpec.parse("Q")


@pytest.fixture(scope="session")
def F5():
    return FieldSpec.parse("Fp:5")


@pytest.fixture(scope="session")
def edge_es():
    return fixtures.edge()


@pytest.fixture(scope="session")
def star3_es():
    return fixtures.star3_elliptic()


@pytest.fixture(scope="session")
def path3_multi():
    return fixtures.path3_multifacial()


@pytest.fixture(scope="session")
def reducible_es():
    return fixtures.edge_reducible()


@pytest.fixture(scope="function")
def pyproject_toml_temp_dir(tmp_path, monkeypatch):
    """A working directory holding a pyproject.toml with a [tool.sheaftree] table."""
    (tmp_path / "pyproject.toml").write_text(
        PYPROJECT_TOML_TEMPLATE.format(failure_dir=tmp_path / "failures")
    )
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("SHEAFTREE_CONFIG", raising=False)
    yield tmp_path


@pytest.fixture(scope="function")
def run_cli(capsys, tmp_path, monkeypatch):
    """Run the CLI in-process from an empty directory; return (exit code, JSON document)."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("SHEAFTREE_CONFIG", raising=False)

    def run(*argv):
        argv = [str(FIXTURE_DIR / a) if a.endswith(".json") else a for a in argv]
        code = main(argv)
        captured = capsys.readouterr()
        return code, json.loads(captured.out)

    return run
