import json
import math

import pytest

from hilbert_exceptional.cli import EXIT_CONFIG, EXIT_PASS, main


@pytest.fixture
def write_input(tmp_path):
    def write(payload, name="input.json"):
        path = tmp_path / name
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
        return str(path)

    return write


def test_levelset_unit_interval(write_input, capsys):
    path = write_input({"set": [[0, 1]], "lambda": math.log(2.0)})
    assert main(["levelset", "--input", path]) == EXIT_PASS
    report = json.loads(capsys.readouterr().out)
    assert report["command"] == "levelset"
    assert report["schema"] == 1
    assert report["passed"]
    assert report["roots"] == pytest.approx([-1.0], abs=1e-12)


def test_stein_weiss_artifacts(write_input, tmp_path, capsys):
    path = write_input({"set": [[0, 1], [2, 3]], "lambdas": [0.1, 0.5, 1.0]})
    out = tmp_path / "out"
    assert main(["stein-weiss", "--input", path, "--out", str(out)]) == EXIT_PASS
    capsys.readouterr()
    lines = (out / "stein_weiss.csv").read_text().splitlines()
    assert lines[0] == "lambda,exact,formula,rel_error"
    assert len(lines) == 4
    for line in lines[1:]:
        assert float(line.split(",")[3]) <= 1e-6
    report = json.loads((out / "stein_weiss.json").read_text())
    assert report["passed"]


def test_whitney(write_input, capsys):
    path = write_input({"set": [[0, 1], [2, 5]]})
    assert main(["whitney", "--input", path, "--depth", "4"]) == EXIT_PASS
    report = json.loads(capsys.readouterr().out)
    assert report["depth"] == 4
    assert report["cells"]


def test_transform_is_deterministic(write_input, capsys):
    path = write_input(
        {"set": [[0, 1], [2, 3]], "points": [-1.0, 1.5, 4.0], "epsilons": [0.1, 0.5]}
    )
    assert main(["transform", "--input", path]) == EXIT_PASS
    first = capsys.readouterr().out
    assert main(["transform", "--input", path]) == EXIT_PASS
    assert capsys.readouterr().out == first
    report = json.loads(first)
    assert report["max_oracle_error"] <= 1e-7
    assert report["values"][1]["value"] == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize(
    "payload",
    [
        "{not json",
        {"set": [[0, 1]], "lambda": 1.0, "colour": "red"},
        {"schema": 2, "set": [[0, 1]], "lambda": 1.0},
        {"set": [[1, 0]], "lambda": 1.0},
        {"set": [[0, 1]], "lambda": 0.0},
        {"set": [[0, 1]]},
    ],
)
def test_levelset_config_errors(write_input, capsys, payload):
    path = write_input(payload)
    assert main(["levelset", "--input", path]) == EXIT_CONFIG
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "config"


def test_missing_input_file(tmp_path):
    assert main(["levelset", "--input", str(tmp_path / "nowhere.json")]) == EXIT_CONFIG


def test_unknown_command():
    assert main(["frobnicate"]) == EXIT_CONFIG


def test_unknown_tolerance_field(write_input):
    path = write_input({"set": [[0, 1]], "lambda": 1.0, "tolerances": {"loose": 1.0}})
    assert main(["levelset", "--input", path]) == EXIT_CONFIG


@pytest.mark.parametrize("cases", [{"oracle": 0}, {"bogus": 3}])
def test_verify_all_rejects_bad_cases(write_input, cases):
    path = write_input({"cases": cases})
    assert main(["verify-all", "--input", path]) == EXIT_CONFIG


def test_transform_of_a_piecewise_linear_function(write_input, tmp_path, capsys):
    hat = {"nodes": [0.0, 1.0, 2.0], "values": [0.0, 1.0, 0.0]}
    path = write_input({"plfunction": hat, "points": [1.0, 3.0], "epsilon": 0.25})
    out = tmp_path / "out"
    assert main(["transform", "--input", path, "--out", str(out)]) == EXIT_PASS
    report = json.loads(capsys.readouterr().out)
    assert report["source"] == "plfunction"
    assert report["values"][0]["value"] == pytest.approx(0.0, abs=1e-14)
    assert "maximal_lower_bound" not in report["values"][0]
    lines = (out / "transform.csv").read_text().splitlines()
    assert lines[0] == "x,epsilon,value,oracle,abs_diff"
    # a principal value row and one truncated row per point
    assert len(lines) == 5
    x, eps, _, _, diff = lines[2].split(",")
    assert (float(x), float(eps)) == (1.0, 0.25)
    assert float(diff) <= 1e-7


@pytest.mark.parametrize(
    "payload",
    [
        {
            "set": [[0, 1]],
            "plfunction": {"nodes": [0, 1], "values": [0, 0]},
            "points": [2.0],
        },
        {"points": [2.0]},
        {"plfunction": {"nodes": [1, 0], "values": [0, 0]}, "points": [2.0]},
        {"set": [[0, 1]], "points": [2.0], "epsilons": [0.1, -0.5]},
    ],
)
def test_transform_config_errors(write_input, payload):
    path = write_input(payload)
    assert main(["transform", "--input", path]) == EXIT_CONFIG


def test_endpoint_singularities_are_null(write_input, capsys):
    path = write_input({"set": [[0, 1]], "points": [0.0, 1.0], "epsilons": [0.5]})
    assert main(["transform", "--input", path]) == EXIT_PASS
    document = capsys.readouterr().out
    assert "Infinity" not in document
    report = json.loads(document)
    assert report["values"][0]["value"] is None
    assert report["values"][1]["value"] is None
    endpoint = report["values"][1]["truncated"][0]
    assert endpoint["value"] == pytest.approx(math.log(2.0) / math.pi)


def test_kk_command(write_input, tmp_path, capsys):
    path = write_input({"set": [[0.0, 0.1]]})
    out = tmp_path / "out"
    assert main(["kk", "--input", path, "--out", str(out)]) == EXIT_PASS
    report = json.loads(capsys.readouterr().out)
    assert report["passed"]
    assert report["measure_error"] <= report["measure_tol"]
    lines = (out / "kk.csv").read_text().splitlines()
    assert lines[0] == "x,max_partial_sum,bound"


def test_construct_thm1_command(write_input, capsys):
    path = write_input({"seed_points": [0.0], "depth": 3})
    assert main(["construct-thm1", "--input", path]) == EXIT_PASS
    report = json.loads(capsys.readouterr().out)
    assert report["passed"]
    assert len(report["witnesses"]) == 1
    assert report["witnesses"][0]["passed"]


def test_construct_thm2_command(write_input, capsys):
    path = write_input({"seed_points": [0.0], "depth": 2})
    assert main(["construct-thm2", "--input", path]) == EXIT_PASS
    report = json.loads(capsys.readouterr().out)
    assert report["continuous"]
    assert report["witnesses"][0]["passed"]


def test_verify_all_is_deterministic(write_input, capsys):
    cases = {"oracle": 5, "level_set": 5, "stein_weiss": 2, "whitney": 2}
    path = write_input({"cases": cases})
    assert main(["verify-all", "--input", path, "--seed", "5"]) == EXIT_PASS
    first = capsys.readouterr().out
    assert main(["verify-all", "--input", path, "--seed", "5"]) == EXIT_PASS
    assert capsys.readouterr().out == first
    assert json.loads(first)["passed"]
