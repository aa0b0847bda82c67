import json
from pathlib import Path

import pytest

from kplab import cli
from kplab.kpverify import VIOLATION, KpReport, KpRow

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(tmp_path, *args):
    return cli.main([*args, "--out", str(tmp_path)])


def write(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(payload if isinstance(payload, str) else json.dumps(payload), encoding="utf-8")
    return str(p)


def test_identity_kp_verify(tmp_path):
    assert run(tmp_path, "kp-verify", str(CONFIGS / "kp_identity.json")) == 0
    lines = (tmp_path / "kp_verify.csv").read_text().splitlines()
    assert lines[0].startswith("pair,alpha,s,h_source")
    assert all(line.split(",")[5] == "0" for line in lines[1:])
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["exit_code"] == 0 and manifest["outputs"] == ["kp_verify.csv"]
    assert {"kplab", "numpy", "python"} <= set(manifest["versions"])


def test_malformed_json(tmp_path, capsys):
    path = write(tmp_path, "bad.json", '{\n  "s": 1.0,,\n}')
    assert run(tmp_path / "o", "entropy", path) == 1
    assert "bad.json:2:" in capsys.readouterr().err


def test_unknown_and_invalid_fields(tmp_path, capsys):
    path = write(tmp_path, "c.json", {"configuration": {"points": [[0.0]]}, "s": -1, "noise": 2})
    assert run(tmp_path / "o", "entropy", path) == 1
    err = capsys.readouterr().err
    assert "field 's'" in err and "field 'noise'" in err


def test_pair_needs_exactly_one_target(tmp_path, capsys):
    path = write(tmp_path, "c.json", {"source": {"points": [[0.0]]}})
    assert run(tmp_path / "o", "kp-verify", path) == 1
    assert "exactly one" in capsys.readouterr().err


def test_expanding_target_is_an_error(tmp_path):
    path = write(tmp_path, "c.json", {"source": {"points": [[0.0], [1.0]]}, "target": {"points": [[0.0], [3.0]]}})
    assert run(tmp_path / "o", "kp-verify", path) == 1


def test_violation_exit_code(tmp_path, monkeypatch):
    def fake(pair, orders, noises, policy, pair_id, abs_tol):
        return KpReport(pair_id, [KpRow(2.0, 1.0, 1.0, 2.0, -1.0, 0.0, "exact-integer", VIOLATION)])

    monkeypatch.setattr(cli, "verify_kp_entropy", fake)
    assert run(tmp_path, "kp-verify", str(CONFIGS / "kp_identity.json")) == 2


def test_flags_override_config(tmp_path):
    assert run(tmp_path, "entropy", str(CONFIGS / "entropy.json"), "--policy", "mc", "--samples", "5000", "--seed", "7") == 0
    rows = (tmp_path / "entropy.csv").read_text().splitlines()[1:]
    mc_rows = [r.split(",") for r in rows if "monte-carlo" in r]
    assert mc_rows and all(r[5] == "5000" and r[6] == "7" for r in mc_rows)


def test_row_errors_do_not_abort(tmp_path):
    path = write(tmp_path, "c.json", {"configuration": {"points": [[0.0]]}, "orders": [-1, 2]})
    assert run(tmp_path / "o", "entropy", path) == 0
    rows = (tmp_path / "o" / "entropy.csv").read_text().splitlines()
    assert len(rows) == 3 and rows[1].split(",")[-1] != "" and rows[2].split(",")[-1] == ""


def test_mc_output_is_byte_identical(tmp_path):
    args = ("entropy", str(CONFIGS / "entropy.json"), "--policy", "mc", "--samples", "20000")
    run(tmp_path / "a", *args)
    run(tmp_path / "b", *args)
    assert (tmp_path / "a" / "entropy.csv").read_bytes() == (tmp_path / "b" / "entropy.csv").read_bytes()


def test_float_format_round_trips(tmp_path):
    run(tmp_path, "entropy", str(CONFIGS / "entropy.json"))
    text = (tmp_path / "entropy.csv").read_text().splitlines()[3].split(",")[1]
    from kplab.gaussmix import GaussianMixture, renyi_exact_integer
    import numpy as np

    exact = renyi_exact_integer(GaussianMixture(np.array([[0.0], [2.0]]), np.array([0.5, 0.5]), np.eye(1)), 2).value
    assert float(text) == exact


@pytest.mark.parametrize(
    "command, config",
    [
        ("flow", "flow.json"),
        ("minty", "minty.json"),
        ("costa", "costa.json"),
        ("capacity", "capacity.json"),
        ("volume", "volume.json"),
        ("kp-verify", "kp_verify.json"),
    ],
)
def test_sample_configs(tmp_path, command, config):
    assert run(tmp_path, command, str(CONFIGS / config)) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    for name in manifest["outputs"]:
        assert (tmp_path / name).read_text().count("\n") >= 2


def test_quick_suite(tmp_path):
    assert run(tmp_path, "suite", str(CONFIGS / "suite_quick.json")) == 0
    summary = (tmp_path / "suite_summary.csv").read_text().splitlines()
    assert len(summary) == 11


def test_unknown_criterion(tmp_path):
    path = write(tmp_path, "c.json", {"quick": True, "criteria": [12]})
    assert run(tmp_path / "o", "suite", path) == 1
