import csv
import hashlib
import io
import json
import subprocess
import sys

import pytest

from birkhoff_lab.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_cf_golden(capsys):
    code, out, _ = run(["cf", "--alpha", "golden", "--depth", "6"], capsys)
    assert code == 0 and json.loads(out)["q"] == [1, 2, 3, 5, 8, 13]


def test_unknown_subcommand_exits_two():
    proc = subprocess.run([sys.executable, "-m", "birkhoff_lab", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr


def test_precondition_error_is_json(capsys):
    code, _, err = run(["--precision", "3", "cf", "--alpha", "golden", "--depth", "3"], capsys)
    assert code == 2 and json.loads(err)["error"] == "PreconditionError"


def test_budget_error_exit_code(capsys):
    code, _, err = run(["partition", "--alpha", "golden", "--level", "30", "--max-arcs", "100"], capsys)
    assert code == 3 and json.loads(err)["exit_code"] == 3


def test_global_flags_in_either_position(capsys):
    _, a, _ = run(["--precision", "64", "cf", "--alpha", "golden", "--depth", "4"], capsys)
    _, b, _ = run(["cf", "--precision", "64", "--alpha", "golden", "--depth", "4"], capsys)
    assert a == b and json.loads(a)["precision"] == 64


def test_partition_csv(capsys):
    _, out, _ = run(["partition", "--alpha", "golden", "--level", "4"], capsys)
    r = rows(out)
    assert len(r) == 8 + 5
    assert sum(int(x["length"], 16) for x in r) == 1 << 127


def test_birkhoff_and_discrepancy(capsys):
    _, out, _ = run(["birkhoff", "--f", "coboundary", "--alpha", "golden", "--n", "50", "--gauge", "nu=0.5"], capsys)
    r = rows(out)
    assert len(r) == 50 and max(abs(float(x["S_n"])) for x in r) <= 2
    _, out, _ = run(["discrepancy", "--alpha", "golden", "--n", "1,2"], capsys)
    assert float(rows(out)[1]["star"]) == pytest.approx(0.3819660112501051)


def test_hilbert_modes_agree(capsys):
    _, out, _ = run(["hilbert", "--a", "0.5", "--n", "1000", "--mode", "both"], capsys)
    assert all(abs(float(x["direct"]) - float(x["fourier"])) < 1e-6 for x in rows(out))


def test_zoo_writes_manifest(tmp_path, capsys):
    d = tmp_path / "r"
    code, _, _ = run(["--out-dir", str(d), "zoo", "rademacher", "--K", "64", "--N", "4"], capsys)
    assert code == 0
    man = json.loads((d / "manifest.json").read_text())
    assert man["subcommand"] == "zoo rademacher" and man["seed"] == 0 and man["version"]
    for name, digest in man["outputs"].items():
        assert hashlib.sha256((d / name).read_bytes()).hexdigest() == digest


def test_zoo_function_feeds_birkhoff(tmp_path, capsys):
    d = tmp_path / "p"
    run(["--out-dir", str(d), "zoo", "plateau", "--eps", "0.5"], capsys)
    spec = json.loads((d / "spec.json").read_text())
    _, out, _ = run(["birkhoff", "--f", str(d / "function.json"), "--alpha", "golden", "--n", str(spec["m"])],
                    capsys)
    assert abs(float(rows(out)[-1]["S_n"])) <= 0.5 * spec["m"] + 1e-9
    code, out, _ = run(["dim", "audit", "--spec", str(d / "spec.json"), "--s", "0.5", "--delta", "0.5",
                        "--eps", "0.5"], capsys)
    assert code == 0 and rows(out)[-1]["class"] == "pass"


def test_hilbert_example(capsys):
    _, out, _ = run(["zoo", "hilbert-example", "--a", "0.5", "--x", "0.25"], capsys)
    assert float(rows(out)[0]["f"]) == pytest.approx(-0.8)


def test_premeasure(tmp_path, capsys):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"lengths": [0.1, 0.01]}))
    _, out, _ = run(["dim", "premeasure", "--cover", str(p), "--s", "0.5"], capsys)
    assert float(rows(out)[0]["pre_measure"]) == pytest.approx(0.41623, abs=1e-5)


def test_decay_is_reproducible(tmp_path, capsys):
    digests = []
    for name in ("a", "b"):
        d = tmp_path / name
        run(["mc", "decay", "--nu", "0.8", "--kmax", "12", "--samples", "1000", "--seed", "7",
             "--out-dir", str(d)], capsys)
        digests.append(json.loads((d / "manifest.json").read_text())["outputs"])
    assert digests[0] == digests[1]


def test_threads_env_fallback(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("BIRKHOFF_LAB_THREADS", "2")
    d = tmp_path / "m"
    run(["--out-dir", str(d), "mc", "menshov", "--N", "4", "--profile", "flat", "--samples", "1000"], capsys)
    assert json.loads((d / "manifest.json").read_text())["parameters"]["threads"] == 2


def test_mc_outputs_have_bound_column(capsys):
    for argv in (["mc", "lil", "--eps", "0.9", "--M", "16", "--samples", "1000"],
                 ["mc", "ortho", "--kmax", "2", "--samples", "1000"],
                 ["mc", "key", "--K", "256", "--N", "16", "--M", "16", "--samples", "100"]):
        code, out, _ = run(argv, capsys)
        assert code == 0 and "bound" in rows(out)[0]
