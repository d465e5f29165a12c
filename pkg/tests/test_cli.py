import json

import pytest

from anonylink.cli import main

FAST = ["--trials", "40", "--min-trials", "20"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_cryptonote_quarter(capsys):
    code, out, _ = run(capsys, "run", "--scheme", "cryptonote", "--attack", "slla",
                       "--medium", "coin-to-coin", "--ring", "4", *FAST)
    assert code == 0
    doc = json.loads(out)
    assert doc["outcome"]["success_rate"] == pytest.approx(0.25)
    assert doc["verdict"]["level"] == "probabilistic"


def test_run_zerocoin_value_unresistant(capsys):
    code, out, _ = run(capsys, "run", "--scheme", "zerocoin", "--attack", "slla",
                       "--medium", "coin-to-value", *FAST)
    assert code == 0 and json.loads(out)["verdict"]["level"] == "unresistant"


def test_run_below_min_trials_gives_no_verdict(capsys):
    code, out, _ = run(capsys, "run", "--scheme", "bitcoin", "--trials", "5")
    assert code == 0 and json.loads(out)["verdict"] is None


def test_run_not_applicable(capsys):
    code, out, _ = run(capsys, "run", "--scheme", "bitcoin", "--attack", "sccla",
                       "--medium", "consumed-coin", *FAST)
    assert code == 0 and json.loads(out)["verdict"]["level"] == "not_applicable"


@pytest.mark.parametrize("argv", [
    ["run", "--trials", "5"],
    ["run", "--scheme", "bitcoin", "--scheme", "zerocash", "--trials", "5"],
    ["run", "--scheme", "bitcoin", "--trials", "0"],
    ["run", "--scheme", "bitcoin", "--attack", "rccla", "--medium", "tran-to-tran", "--trials", "5"],
    ["run", "--scheme", "nocoin"],
    ["matrix", "--bogus"],
    ["matrix", "--scheme", "bitcoin", "--trials", "10"],
    ["verify", "--fixture", "/nonexistent.json", "--trials", "5"],
    [],
])
def test_config_errors_exit_2(capsys, argv):
    assert main(argv) == 2


def test_bad_config_file(tmp_path, capsys):
    p = tmp_path / "c.json"
    p.write_text("[1, 2]")
    assert main(["matrix", "--config", str(p)]) == 2
    p.write_text('{"seeed": 3}')
    assert main(["matrix", "--config", str(p)]) == 2


def test_env_seed(monkeypatch, capsys):
    monkeypatch.setenv("ANONYLINK_SEED", "99")
    _, out, _ = run(capsys, "matrix", "--dump-config")
    assert json.loads(out)["seed"] == 99
    _, out, _ = run(capsys, "matrix", "--dump-config", "--seed", "5")
    assert json.loads(out)["seed"] == 5
    monkeypatch.setenv("ANONYLINK_SEED", "x")
    assert main(["matrix", "--dump-config"]) == 2


def test_dump_config_round_trip(tmp_path, capsys):
    code, out, _ = run(capsys, "matrix", "--dump-config", "--scheme", "zerocash", "--ring", "3",
                       "--format", "csv", *FAST)
    assert code == 0
    cfg = tmp_path / "cfg.json"
    cfg.write_text(out)
    _, again, _ = run(capsys, "matrix", "--dump-config", "--config", str(cfg))
    assert json.loads(again) == json.loads(out)
    _, direct, _ = run(capsys, "matrix", "--scheme", "zerocash", "--ring", "3", "--format", "csv", *FAST)
    _, via_file, _ = run(capsys, "matrix", "--config", str(cfg))
    assert direct == via_file


def test_flags_override_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 1, "trials": 7}))
    _, out, _ = run(capsys, "matrix", "--dump-config", "--config", str(cfg), "--trials", "9")
    doc = json.loads(out)
    assert doc["seed"] == 1 and doc["trials"] == 9


def test_matrix_reports_are_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["matrix", "--scheme", "zerocoin", "--scheme", "mimblewimble", *FAST,
                     "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    for fmt in ("markdown", "csv"):
        code, out, _ = run(capsys, "matrix", "--scheme", "zerocoin", "--format", fmt, *FAST)
        assert code == 0 and "zerocoin".lower() in out.lower()


def test_verify_exit_codes(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--scheme", "zerocash", "--scheme", "bitcoin", *FAST)
    assert code == 0 and "no differences" in out
    code, out, _ = run(capsys, "verify", "--scheme", "coinjoin", "--column", "L0/tlla/tran-to-tran",
                       "--mixnet", *FAST)
    assert code == 1 and "L0/tlla/tran-to-tran" in out


def test_verify_against_custom_fixture(tmp_path, capsys):
    from importlib import resources
    doc = json.loads(resources.files("anonylink").joinpath("data/expected_matrix.json").read_text("utf-8"))
    doc["schemes"]["zerocash"]["expected"]["L1/slla/coin-to-value"] = "✗"
    p = tmp_path / "fx.json"
    p.write_text(json.dumps(doc, ensure_ascii=False), encoding="utf-8")
    code, out, _ = run(capsys, "verify", "--scheme", "zerocash", "--fixture", str(p), *FAST)
    assert code == 1 and "zerocash L1/slla/coin-to-value" in out
    doc["schemes"]["dash"] = doc["schemes"]["zerocash"]
    p.write_text(json.dumps(doc, ensure_ascii=False), encoding="utf-8")
    assert main(["verify", "--scheme", "zerocash", "--fixture", str(p), *FAST]) == 2


def test_transcript(tmp_path, capsys):
    t = tmp_path / "t.jsonl"
    assert main(["run", "--scheme", "zerocash", "--trials", "6", "--transcript", str(t)]) == 0
    rows = [json.loads(line) for line in t.read_text().splitlines()]
    assert len(rows) == 6 and rows[0]["scheme"] == "zerocash"


def test_theorems(capsys):
    code, out, _ = run(capsys, "theorems", "--samples", "100")
    assert code == 0 and out.count("PASS") == 5 and "FAIL" not in out
