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

import hashlib
import json
import pathlib
import sys

FORMAT_VERSION = "sheaftree/1"


def canonical_json(document):
    return json.dumps(document, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(document):
    """sha256 of the canonical JSON form of ``document``."""
    return hashlib.sha256(canonical_json(document).encode("utf-8")).hexdigest()


def dump_json(document, pretty=False):
    if pretty:
        return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    return canonical_json(document) + "\n"


def write_output(text, out=None):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = pathlib.Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
