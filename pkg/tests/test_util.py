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

import functools
import json
import pathlib

BASE_DIR = pathlib.Path(__file__).parent
FIXTURE_DIR = BASE_DIR / "fixtures"


@functools.lru_cache
def sample_instances():
    """Return (name, text) for every instance document under tests/fixtures."""
    result = []
    for path in sorted(FIXTURE_DIR.glob("*.json")):
        result.append((path.stem, path.read_text(encoding="utf-8")))
    assert len(result) > 0, FIXTURE_DIR
    return tuple(result)


def load_document(name):
    """A fresh, mutable copy of a fixture document."""
    return json.loads(dict(sample_instances())[name])


def matrix(m):
    """A Matrix as rows of scalar strings, for comparisons."""
    return m.to_strings()
