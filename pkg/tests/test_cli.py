import io
import json

import pytest

from foursq import cli
from foursq.cli import OutputRecord, main, read_records


def call(*argv, env=None, monkeypatch=None):
    out = io.StringIO()
    code = main(list(argv), out=out)
    out.seek(0)
    return code, list(read_records(out)) if not argv or argv[0] != "--human" else out.getvalue()


def test_represent_record():
    code, recs = call("represent", "--target", "cor1.2", "--n", "10")
    assert code == 0 and len(recs) == 1
    r = recs[0]
    assert r.kind == "witness" and r.schema_version == 1
    assert r.payload["tuple"] == [1, 3, 0, 0] and r.payload["certificate"] == {"p": 7, "k": 1}


def test_record_round_trip():
    rec = OutputRecord("bounds", {"k": 1})
    assert OutputRecord.from_line(rec.to_line()) == rec
    with pytest.raises(cli.ConfigError):
        OutputRecord.from_line('{"kind": "x", "payload": {}, "schema_version": 1}')


def test_exit_codes():
    assert call("represent", "--target", "thm1.1", "--n", "1", "--d", "2")[0] == cli.EXIT_NOT_FOUND
    assert call("represent", "--target", "thm1.1", "--n", "5", "--d", "4")[0] == cli.EXIT_DOMAIN
    assert call("represent", "--target", "cor1.2", "--n", "0")[0] == cli.EXIT_DOMAIN
    assert call("represent", "--target", "cor1.2", "--n", "10", "--d", "1")[0] == cli.EXIT_CONFIG
    assert call("conjecture", "--id", "135", "--n-max", str(10**8))[0] == cli.EXIT_RESOURCE
    assert call("verify", "--target", "bogus", "--from", "1", "--to", "5")[0] == cli.EXIT_USAGE
    assert call("bounds", "--k", "0", "--j", "1", "--l", "1")[0] == cli.EXIT_USAGE
    assert call("verify", "--target", "cor1.2")[0] == cli.EXIT_CONFIG
    assert call("check-log", "/nonexistent/file.jsonl")[0] == cli.EXIT_CONFIG


def test_error_record_shape():
    code, recs = call("represent", "--target", "thm1.1", "--n", "1", "--d", "2")
    p = recs[0].payload
    assert recs[0].kind == "error" and p["type"] == "NotFound" and p["exit_code"] == 4 and "diagnostics" in p


def test_verify_failures_and_allow_ineffective():
    code, recs = call("verify", "--target", "thm1.3", "--lambda", "1", "--delta", "1", "--from", "1", "--to", "20")
    assert code == cli.EXIT_FAILURES
    assert [f["n"] for f in recs[0].payload["failed"]] == [3, 7, 11, 15, 19]
    # those failures are not ineffectivity, so the flag does not help
    code, _ = call("verify", "--allow-ineffective", "--target", "thm1.3", "--lambda", "1", "--delta", "1",
                   "--from", "1", "--to", "20")
    assert code == cli.EXIT_FAILURES


def test_verify_ineffective_thm11():
    code, recs = call("verify", "--target", "thm1.1", "--d", "2", "--from", "1", "--to", "3", "--mode", "construct")
    assert code == cli.EXIT_FAILURES and recs[0].payload["not_found"] == len(recs[0].payload["failed"]) > 0
    code, _ = call("verify", "--allow-ineffective", "--target", "thm1.1", "--d", "2", "--from", "1", "--to", "3",
                   "--mode", "construct")
    assert code == 0


def test_config_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"workers": 3, "campaigns": {"small": {"target": "cor1.3i", "n_lo": 2, "n_hi": 300,
                                                                    "mode": "cross", "workers": 2}}}))
    monkeypatch.setenv("FOURSQ_WORKERS", "5")
    code, recs = call("--config", str(cfg), "verify", "--campaign", "small")
    assert code == 0 and recs[0].payload["spec"]["workers"] == 2 and recs[0].payload["checked"] == 299
    code, recs = call("--config", str(cfg), "verify", "--campaign", "small", "--workers", "1", "--to", "100")
    assert recs[0].payload["spec"]["workers"] == 1 and recs[0].payload["n_hi"] == 100
    cfg.write_text(json.dumps({"workers": 3}))
    code, recs = call("--config", str(cfg), "verify", "--target", "cor1.2", "--from", "1", "--to", "10")
    assert recs[0].payload["spec"]["workers"] == 3
    code, recs = call("verify", "--target", "cor1.2", "--from", "1", "--to", "10")
    assert recs[0].payload["spec"]["workers"] == 5
    monkeypatch.setenv("FOURSQ_WORKERS", "zero")
    assert call("verify", "--target", "cor1.2", "--from", "1", "--to", "10")[0] == cli.EXIT_CONFIG


def test_bad_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text("{not json")
    assert call("--config", str(cfg), "bounds", "--k", "1", "--j", "3", "--l", "4")[0] == cli.EXIT_CONFIG
    cfg.write_text(json.dumps({"colour": "blue"}))
    assert call("--config", str(cfg), "bounds", "--k", "1", "--j", "3", "--l", "4")[0] == cli.EXIT_CONFIG
    cfg.write_text(json.dumps({"campaigns": {}}))
    assert call("--config", str(cfg), "verify", "--campaign", "missing")[0] == cli.EXIT_CONFIG


def test_bounds_exact_fractions():
    code, recs = call("bounds", "--k", "1", "--j", "3", "--l", "4")
    p = recs[0].payload
    assert cli.fraction_from_json(p["a"]) == 256
    assert p["b"]["certified"] == "upper"
    assert cli.fraction_from_json(p["c"]) == cli.Fraction(3275**2, 3)


def test_conjecture_commands():
    code, recs = call("conjecture", "--id", "135", "--n-max", "500")
    assert code == 0 and recs[0].kind == "campaign" and recs[0].payload["passed"] == 501
    code, recs = call("conjecture", "--id", "explore", "--form", "1112", "--coeffs", "1,2,0,0", "--n-max", "60")
    assert code == 0 and recs[0].kind == "report" and recs[0].payload["no_natural_value"] == []
    assert call("conjecture", "--id", "explore", "--n-max", "60")[0] == cli.EXIT_CONFIG


def test_check_log_and_verify_log(tmp_path):
    log = tmp_path / "w.jsonl"
    code, _ = call("verify", "--target", "cor1.2", "--from", "1", "--to", "2000", "--witness-log", str(log))
    assert code == 0
    code, recs = call("check-log", str(log))
    assert code == 0 and recs[0].payload["witnesses"] == 2000
    log.write_text(log.read_text().replace('"tuple":[0,1,0,0]', '"tuple":[1,1,0,0]', 1))
    assert call("check-log", str(log))[0] == cli.EXIT_CONFIG


def test_human_output():
    code, text = call("--human", "represent", "--target", "thm1.2i", "--n", "4", "--lambda", "5")
    assert code == 0 and text.startswith("thm1.2i n=4: (0, 1, 1, 1)")
    code, text = call("--human", "verify", "--target", "cor1.2", "--from", "1", "--to", "50")
    assert "passed 50" in text and "digest" in text
    code, text = call("--human", "bounds", "--k", "1", "--j", "3", "--l", "4")
    assert "certified upper bound" in text


def test_module_entry_point():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "foursq", "represent", "--target", "cor1.3ii", "--n", "4"],
                         capture_output=True, text=True, check=False)
    assert out.returncode == 0
    assert json.loads(out.stdout)["payload"]["tuple"] == [2, 0, 0, 0]
