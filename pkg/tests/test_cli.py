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

import pytest
from test_util import load_document

from sheaftree.cli import main


def test_cohomology_of_the_edge(run_cli):
    code, report = run_cli("cohomology", "edge.json")
    assert code == 0
    assert report["status"] == "ok"
    assert report["command"] == "cohomology"
    assert len(report["digest"]) == 64
    results = report["results"]
    assert results["h0_dim"] == 1
    assert results["h1_dim"] == 0
    assert results["character_h0"] == ["1", "1"]
    assert results["character_h1"] == ["0", "0"]
    assert results["euler"]["holds"]


def test_cohomology_without_a_group(run_cli):
    code, report = run_cli("cohomology", "path3_multi.json")
    assert code == 0
    results = report["results"]
    assert (results["h0_dim"], results["h1_dim"]) == (0, 1)
    assert results["euler"] == {"h0_minus_h1": -1, "vdim_minus_edim": -1, "holds": True}
    assert "character_h0" not in results


def test_validate_reports_orbits(run_cli):
    code, report = run_cli("validate", "path3_flip.json")
    assert code == 0
    results = report["results"]
    assert results["group_order"] == 2
    assert results["vertex_orbits"] == [
        {"representative": 0, "members": [0, 2], "stabilizer": [0]},
        {"representative": 1, "members": [1], "stabilizer": [0, 1]},
    ]
    assert results["edge_orbits"] == [
        {
            "representative": 0,
            "members": [0, 1],
            "stabilizer": [0],
            "orientation_character": {"0": 1},
        }
    ]


def test_decompose_the_edge(run_cli):
    code, report = run_cli("decompose", "edge.json")
    assert code == 0
    decomposition = report["results"]["decomposition"]
    assert decomposition["variant"] == "EdgeInduced"
    assert decomposition["cell"] == {"kind": "edge", "id": 0}
    assert decomposition["stabilizer"] == [0, 1]
    assert decomposition["trace"] == ["UnifacialKept"]
    certificate = report["results"]["certificate"]
    assert certificate["dim"] == 1
    assert certificate["determinant"] != "0"
    assert all(a["ok"] for a in report["assertions"])


def test_decompose_after_a_quotient(run_cli):
    code, report = run_cli("decompose", "path3_flip.json")
    assert code == 0
    decomposition = report["results"]["decomposition"]
    assert decomposition["variant"] == "VertexInduced"
    assert decomposition["cell"] == {"kind": "vertex", "id": 1}
    assert decomposition["trace"] == ["QuotientRecursed", "Elliptic"]


def test_decompose_without_a_group(run_cli):
    code, report = run_cli("decompose", "path3_multi.json")
    assert code == 0
    assert report["results"]["decomposition"]["variant"] == "Zero"
    assert report["results"]["certificate"]["dim"] == 0


def test_decompose_reducible(run_cli):
    code, report = run_cli("decompose", "edge_reducible.json")
    assert code == 2
    assert report["status"] == "failed"
    assert report["exit_code"] == 2
    error = report["error"]
    assert error["error"] == "HypothesisViolated"
    assert error["kind"] == "Reducible"
    assert error["evidence"]["dim"] == 1
    assert report["assertions"][-1]["name"] == "irreducible"


def test_prime_field_character(run_cli):
    code, report = run_cli("cohomology", "c3_star_f7.json")
    assert code == 0
    assert report["results"]["character_h0"] == ["1", "2", "4"]


def test_invalid_instance(run_cli, tmp_path):
    document = load_document("edge")
    document["field"] = "Fp:4"
    (tmp_path / "bad.inst").write_text(json.dumps(document))
    code, report = run_cli("cohomology", "bad.inst")
    assert code == 1
    assert report["error"]["kind"] == "NotPrime"
    assert report["digest"] is None


def test_missing_file(run_cli):
    code, report = run_cli("validate", "nowhere.inst")
    assert code == 1
    assert report["error"]["kind"] == "ReadError"


def test_undecodable_file(run_cli, tmp_path):
    (tmp_path / "binary.inst").write_bytes(b"\xff\xfe{")
    code, report = run_cli("validate", "binary.inst")
    assert code == 1
    assert report["status"] == "failed"
    assert report["error"]["kind"] == "ReadError"
    assert "UTF-8" in report["error"]["message"]


@pytest.mark.parametrize(
    "argv",
    [[], ["cohomology"], ["frobnicate"], ["random", "--constraint", "tight"]],
)
def test_usage_errors(run_cli, argv):
    code, report = run_cli(*argv)
    assert code == 1
    assert report["error"]["kind"] == "UsageError"


def test_fixture_round_trip(run_cli, tmp_path):
    code, document = run_cli("fixture", "star3-ell")
    assert code == 0
    assert document["format"] == "sheaftree/1"
    (tmp_path / "star3.inst").write_text(json.dumps(document))
    code, report = run_cli("cohomology", "star3.inst")
    assert code == 0
    assert report["results"]["character_h0"] == ["2", "0", "0", "0", "-1", "-1"]


def test_random_is_deterministic(run_cli):
    _, first = run_cli("random", "--seed", "5", "--equivariant", "--max-vertices", "5")
    _, second = run_cli("random", "--seed", "5", "--equivariant", "--max-vertices", "5")
    assert first == second
    assert "group" in first


def test_random_with_a_field(run_cli):
    code, document = run_cli("random", "--field", "Fp:3", "--constraint", "multifacial")
    assert code == 0
    assert document["field"] == "Fp:3"


def test_random_infeasible(run_cli):
    code, report = run_cli("random", "--constraint", "multifacial", "--leaf-dim", "1")
    assert code == 1
    assert report["error"]["kind"] == "InfeasibleConstraint"


def test_pretty_output(run_cli):
    _, compact = run_cli("cohomology", "edge.json")
    _, pretty = run_cli("cohomology", "edge.json", "--pretty")
    assert compact == pretty


def test_out_file(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    out = tmp_path / "reports" / "edge-report"
    code = main(["fixture", "edge", "--out", str(out)])
    assert code == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["group"]["order"] == 2


def test_selftest_with_no_draws(run_cli):
    code, report = run_cli("selftest", "--count", "0")
    assert code == 0
    assert report["results"]["failures"] == []
    for tally in report["results"]["suites"].values():
        assert tally == {"passed": 0, "failed": 0, "skipped": 0}


def test_selftest_small_run(run_cli, tmp_path):
    code, report = run_cli(
        "selftest", "--count", "2", "--max-vertices", "4", "--seed", "1"
    )
    assert code == 0, report["results"]["failures"]
    suites = report["results"]["suites"]
    assert suites["sign-mutation"]["passed"] == 1
    assert suites["quotient-recursed"]["passed"] == 1
    assert suites["subspace"]["passed"] == 2
    assert suites["euler"]["passed"] == 2
    assert not list(tmp_path.glob("sheaftree-failure-*.json"))
