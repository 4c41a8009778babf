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
"""Machine-readable command reports.

Every command, successful or not, ends in one report. Reports hold no
timestamps or paths, so the same input and seed give the same bytes.
"""

from sheaftree.common import FORMAT_VERSION, dump_json, write_output
from sheaftree.equivariant import EDGE, VERTEX, orbits, orientation_character, stabilizer
from sheaftree.error import HypothesisViolated


def make_report(command, digest=None, results=None, assertions=None, error=None, exit_code=0):
    return {
        "format": FORMAT_VERSION,
        "command": command,
        "digest": digest,
        "status": "ok" if exit_code == 0 else "failed",
        "exit_code": exit_code,
        "results": results if results is not None else {},
        "assertions": list(assertions or []),
        "error": error,
    }


def failure_report(command, digest, exc, results=None):
    """The report of a command stopped by a ``SheafTreeError``."""
    error = exc.as_dict()
    if isinstance(exc, HypothesisViolated) and exc.evidence is not None:
        error["evidence"] = exc.evidence.as_dict()
    return make_report(
        command,
        digest,
        results=results,
        assertions=getattr(exc, "assertions", []),
        error=error,
        exit_code=exc.exit_code,
    )


def emit(report, pretty=False, out=None):
    write_output(dump_json(report, pretty=pretty), out)


def orbit_tables(action):
    """Vertex and edge orbits with the stabilizer of each representative."""
    vertex_rows = [
        {"representative": x, "members": members, "stabilizer": stabilizer(action, VERTEX, x)}
        for x, members in orbits(action, VERTEX)
    ]
    edge_rows = []
    for e, members in orbits(action, EDGE):
        character = orientation_character(action, e)
        edge_rows.append(
            {
                "representative": e,
                "members": members,
                "stabilizer": sorted(character),
                "orientation_character": {str(g): s for g, s in sorted(character.items())},
            }
        )
    return {"vertex_orbits": vertex_rows, "edge_orbits": edge_rows}
