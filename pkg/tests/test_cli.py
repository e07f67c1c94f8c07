import json
import subprocess
import sys

import pytest
import yaml

from dtlab.cli import SCHEMA, main, parse_alpha, parse_int_list, UsageError


def run(tmp_path, *argv, name="out"):
    out = tmp_path / f"{name}.csv"
    js = tmp_path / f"{name}.json"
    code = main([*argv, "--out", str(out), "--json", str(js)])
    return code, out, js


COMMANDS = [
    ("verify", "--count", "10"),
    ("transversal", "--n", "5", "--count", "6"),
    ("orbit", "--n", "4", "--steps", "5000", "--batch", "500", "--reference", "2000"),
    ("orbit", "--mode", "torus", "--dim", "1", "--steps", "2000"),
    ("scan", "--kind", "fit", "--n", "5", "--grid", "8"),
    ("scan", "--kind", "d1b2", "--n", "5", "--grid", "8", "--variant", "c1c3"),
    ("appendix", "--count", "20", "--poly-count", "2", "--m", "1-2"),
    ("sample", "--n", "5", "--count", "50"),
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: "-".join(a[:3]))
def test_commands_are_deterministic(tmp_path, argv):
    c1, o1, j1 = run(tmp_path, *argv, "--seed", "7", name="a")
    c2, o2, j2 = run(tmp_path, *argv, "--seed", "7", name="b")
    assert c1 == c2 == 0
    assert o1.read_bytes() == o2.read_bytes()
    doc = json.loads(j1.read_text())
    assert doc["schema"] == SCHEMA and doc["seed"] == 7
    assert {"config", "statistics"} <= set(doc)


def test_seed_changes_output(tmp_path):
    _, a, _ = run(tmp_path, "sample", "--n", "5", "--count", "20", "--seed", "1", name="a")
    _, b, _ = run(tmp_path, "sample", "--n", "5", "--count", "20", "--seed", "2", name="b")
    assert a.read_bytes() != b.read_bytes()


def test_regime_violation_exits_2_without_files(tmp_path):
    code, out, js = run(tmp_path, "sample", "--alpha", "1,1,1,1", "--count", "5")
    assert code == 2
    assert not out.exists() and not js.exists()


def test_usage_errors(tmp_path):
    assert main(["scan", "--kind", "d1b2", "--n", "4"]) == 2
    assert main(["orbit", "--n", "4", "--twists", "q7"]) == 2
    assert main(["nonsense"]) == 2
    cfg = tmp_path / "bad.yaml"
    cfg.write_text(yaml.safe_dump({"no_such_key": 1}))
    assert main(["sample", "--config", str(cfg)]) == 2


def test_verify_fails_on_injected_fault(tmp_path):
    code, out, _ = run(tmp_path, "verify", "--count", "10", "--perturb", "1e-3")
    assert code == 1
    assert "False" in out.read_text()


def test_config_precedence(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(yaml.safe_dump({"n": 6, "count": 3, "sample": {"count": 4}}))
    _, out, js = run(tmp_path, "sample", "--config", str(cfg))
    doc = json.loads(js.read_text())
    assert doc["config"]["n"] == 6 and doc["config"]["count"] == 4
    _, out, js = run(tmp_path, "sample", "--config", str(cfg), "--count", "9", name="flag")
    assert json.loads(js.read_text())["config"]["count"] == 9
    assert len(out.read_text().strip().splitlines()) == 1 + 9


def test_checkpoint_resume_matches_single_run(tmp_path):
    base = ["orbit", "--n", "4", "--batch", "1000", "--reference", "0", "--seed", "3"]
    _, whole, _ = run(tmp_path, *base, "--steps", "20000", name="whole")
    ck = tmp_path / "walk.json"
    run(tmp_path, *base, "--steps", "8000", "--checkpoint", str(ck), name="first")
    assert ck.exists()
    _, resumed, _ = run(tmp_path, *base, "--steps", "20000", "--checkpoint", str(ck), name="second")
    assert resumed.read_bytes() == whole.read_bytes()


def test_threads_do_not_change_results(tmp_path):
    argv = ["transversal", "--n", "4", "--count", "8", "--seed", "5"]
    _, one, _ = run(tmp_path, *argv, "--threads", "1", name="one")
    _, two, _ = run(tmp_path, *argv, "--threads", "2", name="two")
    assert one.read_bytes() == two.read_bytes()


def test_parsers():
    assert parse_alpha("uniform:6.0", 4) == (6.0,) * 4
    with pytest.raises(UsageError):
        parse_alpha("1,2,3", 5)
    assert parse_int_list("1-3") == [1, 2, 3]
    assert parse_int_list("1,4") == [1, 4]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "dtlab", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "dtlab" in res.stdout
