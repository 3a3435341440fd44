import json
from pathlib import Path

import pytest

from lefschetz_lab.cli import main

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


@pytest.mark.parametrize(
    "command,scenario",
    [
        ("ns-lie", "vtilde_m3.json"),
        ("mukai-density", "quintic_density.json"),
        ("k3-mirror", "k3_mirror_u.json"),
        ("abelian-mirror", "ei_mirror.json"),
        ("stabilizer-lie", "k3_stabilizer_u.json"),
        ("signature", "hyperbolic_signature.json"),
    ],
)
def test_shipped_scenarios_pass(capsys, command, scenario):
    code, rep = run_cli(capsys, command, "--input", str(SCENARIOS / scenario))
    assert code == 0
    assert rep["command"] == command and rep["checks"]
    assert all(c["passed"] for c in rep["checks"])
    assert set(rep) >= {"version", "seed", "inputs", "results", "cached", "timing"}


def test_ns_lie_report_contents(capsys):
    code, rep = run_cli(capsys, "ns-lie", "--input", str(SCENARIOS / "vtilde_m3.json"))
    assert rep["results"]["dim"] == 10
    assert rep["results"]["graded_dims"] == {"-2": 3, "0": 4, "2": 3}


def test_signature_and_out_file(capsys, tmp_path):
    src = write(tmp_path, "g.json", {"gram": [[2, 0, 0], [0, -1, 0], [0, 0, 0]]})
    out = tmp_path / "rep.json"
    assert main(["signature", "--input", src, "--out", str(out)]) == 0
    assert json.loads(out.read_text())["results"]["signature"] == [1, 1, 1]


def test_k3_mirror_with_search(capsys, tmp_path):
    cfg = json.loads((SCENARIOS / "k3_mirror_u.json").read_text())
    del cfg["Ucopy"]
    code, rep = run_cli(capsys, "k3-mirror", "--input", write(tmp_path, "s.json", cfg))
    assert code == 0 and rep["results"]["Ucopy_searched"]
    assert rep["results"]["mirror_signature"] == [1, 17, 0]


def test_abelian_mirror_budget_exhausted_exits_one(capsys, tmp_path):
    src = write(tmp_path, "a.json", {"example": 1, "m": 1})
    code, rep = run_cli(capsys, "abelian-mirror", "--input", src, "--budget", "2")
    assert code == 1 and rep["results"]["budget_exhausted"]


@pytest.mark.parametrize(
    "content",
    ["{not json", "[1, 2]", json.dumps({"gram": [[0, 1], [0, 0]]}), json.dumps({"nothing": 1})],
    ids=["syntax", "not-object", "asymmetric", "missing-key"],
)
def test_malformed_input_exits_two(capsys, tmp_path, content):
    command = "signature" if "gram" in content else "ns-lie"
    assert main([command, "--input", write(tmp_path, "bad.json", content)]) == 2


def test_bad_range_and_missing_file(tmp_path):
    src = str(SCENARIOS / "quintic_density.json")
    assert main(["mukai-density", "--input", src, "--range", "3..1"]) == 2
    assert main(["mukai-density", "--input", src, "--range", "x"]) == 2
    assert main(["signature", "--input", str(tmp_path / "absent.json")]) == 2
    assert main(["no-such-command", "--input", src]) == 2


def test_cache_hit_and_miss(capsys, tmp_path):
    cache = str(tmp_path / "cache")
    src = write(tmp_path, "v.json", {"mukai_extension": {"q": [[1, 0], [0, 2]]}})
    _, first = run_cli(capsys, "ns-lie", "--input", src, "--cache-dir", cache)
    _, second = run_cli(capsys, "ns-lie", "--input", src, "--cache-dir", cache)
    assert not first["cached"] and second["cached"]
    assert first["results"] == second["results"]
    src2 = write(tmp_path, "v2.json", {"mukai_extension": {"q": [[1, 0], [0, 3]]}})
    _, third = run_cli(capsys, "ns-lie", "--input", src2, "--cache-dir", cache)
    assert not third["cached"]
    _, other_seed = run_cli(capsys, "ns-lie", "--input", src, "--cache-dir", cache, "--seed", "4")
    assert not other_seed["cached"]


def test_corrupt_cache_entry_is_ignored(capsys, tmp_path):
    cache = tmp_path / "cache"
    src = write(tmp_path, "v.json", {"mukai_extension": {"q": [[1, 0], [0, 2]]}})
    _, first = run_cli(capsys, "ns-lie", "--input", src, "--cache-dir", str(cache))
    (entry,) = cache.glob("*.json")
    entry.write_text("{truncated")
    code, again = run_cli(capsys, "ns-lie", "--input", src, "--cache-dir", str(cache))
    assert code == 0 and not again["cached"]
    assert again["results"] == first["results"]
    # a well-formed entry filed under the wrong key is also a miss
    entry.write_text(json.dumps({"key": "other", "value": {"results": {}, "checks": []}}))
    _, third = run_cli(capsys, "ns-lie", "--input", src, "--cache-dir", str(cache))
    assert not third["cached"]


def test_unwritable_cache_dir_warns(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    src = write(tmp_path, "v.json", {"mukai_extension": {"q": [[1]]}})
    code, rep = run_cli(capsys, "ns-lie", "--input", src, "--cache-dir", str(blocker / "sub"))
    assert code == 0 and not rep["cached"]
    assert rep["warnings"]


def test_results_deterministic_across_runs(capsys):
    src = str(SCENARIOS / "quintic_density.json")
    _, a = run_cli(capsys, "mukai-density", "--input", src, "--seed", "3")
    _, b = run_cli(capsys, "mukai-density", "--input", src, "--seed", "3")
    assert a["results"] == b["results"] and a["inputs"] == b["inputs"]
