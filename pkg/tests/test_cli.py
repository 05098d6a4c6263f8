import json

import pytest

from blowupcalc.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_donaldson(capsys):
    code, out, _ = run(capsys, "donaldson", "--power", "4", "--format", "json")
    assert code == 0
    assert json.loads(out)["coefficient"] == "-2"


def test_vdim(capsys):
    code, out, _ = run(capsys, "vdim", "--rank", "2", "--c1", "0", "--c2", "3", "--chiO", "1")
    assert code == 0 and out.strip() == "vdim  9"


def test_za_order_zero(capsys):
    code, out, _ = run(capsys, "qseries", "za", "--a", "0", "--order", "0", "--format", "json")
    assert code == 0
    assert json.loads(out)["series"] == [{"exponent": "0/4", "coeff": "1"}]


def test_goettsche_partitions(capsys):
    code, out, _ = run(capsys, "qseries", "goettsche", "--chi", "1", "--order", "6", "--format", "json")
    coeffs = [int(r["coeff"]) for r in json.loads(out)["series"]]
    assert coeffs == [1, 1, 2, 3, 5, 7, 11]


def test_schur_all_monomials(capsys):
    code, out, _ = run(capsys, "schur", "--j", "2", "--n", "5", "--format", "json")
    assert code == 0
    rows = json.loads(out)["integrals"]
    assert all(r["push"] == r["oracle"] for r in rows)


@pytest.mark.parametrize("argv", [
    ("omega", "--bogus"),
    (),
    ("qseries", "za", "--a", "3"),
    ("schur", "--j", "2", "--n", "4", "--monomial", "1,1"),
    ("donaldson", "--power", "7"),
    ("omega", "--D", "-1"),
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and err


def test_verification_failure_exit_code(capsys, monkeypatch):
    from blowupcalc import schur
    monkeypatch.setattr(schur, "schubert_oracle", lambda *a, **k: -1)
    code, _, err = run(capsys, "schur", "--j", "2", "--n", "4")
    assert code == 2 and "verification failed" in err


def test_omega_cache_byte_identical(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("WALLCROSS_CACHE_DIR", str(tmp_path))
    argv = ("omega", "--rank", "2", "--j", "1", "--D", "4", "--format", "json")
    _, first, err1 = run(capsys, *argv)
    _, second, err2 = run(capsys, *argv)
    assert first == second
    assert "served from cache" in err2 and "served from cache" not in err1
    # a different D is a different key
    _, _, err3 = run(capsys, "omega", "--rank", "2", "--j", "1", "--D", "3", "--format", "json")
    assert "served from cache" not in err3


def test_corrupt_cache_recomputes(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("WALLCROSS_CACHE_DIR", str(tmp_path))
    argv = ("omega", "--rank", "1", "--j", "0", "--D", "3", "--format", "json")
    _, first, _ = run(capsys, *argv)
    cached = [p for p in tmp_path.iterdir() if p.suffix == ".json"]
    assert len(cached) == 1
    cached[0].write_text("{not json")
    with pytest.warns(UserWarning, match="unreadable cache"):
        code, again, _ = run(capsys, *argv)
    assert code == 0 and again == first
    json.loads(cached[0].read_text())          # overwritten with a valid entry


def test_verify_log(tmp_path, capsys):
    audit = tmp_path / "a.jsonl"
    code, _, err = run(capsys, "omega", "--rank", "2", "--j", "0", "--D", "4",
                       "--audit", str(audit), "--verify-log")
    assert code == 0 and "audit replay: ok" in err
    assert audit.exists() and audit.read_text().strip()


def test_tampered_log_fails(tmp_path):
    from blowupcalc.engine import VerificationError, omega_series
    res = omega_series(1, 0, "chi_y", 4)
    records = [dict(r) for r in res.audit]
    for rec in records:
        rec["coefficientDelta"] = {k: v + " + y" if k.startswith("M_X") else v
                                   for k, v in rec["coefficientDelta"].items()}
    with pytest.raises(VerificationError):
        res.verify_replay(records)


def test_both_modes_report(capsys):
    code, out, _ = run(capsys, "omega", "--rank", "1", "--j", "0", "--D", "4",
                       "--mode", "both", "--format", "json")
    assert code == 0
    assert json.loads(out)["kernelRatios"] == {"1": "1"}     # only j = 1 walls at this size


@pytest.mark.parametrize("suffix", [".toml", ".json"])
def test_config_file(tmp_path, capsys, suffix):
    cfg = tmp_path / f"run{suffix}"
    if suffix == ".toml":
        cfg.write_text('rank = 1\nj = 0\nD = 4\ninsertion = "todd"\n')
    else:
        cfg.write_text(json.dumps({"rank": 1, "j": 0, "D": 4, "insertion": "todd"}))
    code, out, _ = run(capsys, "omega", "--config", str(cfg), "--format", "json")
    assert code == 0
    obj = json.loads(out)
    assert obj["r"] == 1 and obj["insertion"] == "todd"
    # command-line flags override the file
    code, out, _ = run(capsys, "omega", "--config", str(cfg), "--insertion", "chi_y", "--format", "json")
    assert json.loads(out)["insertion"] == "chi_y"


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"rnak": 2}))
    code, _, err = run(capsys, "omega", "--config", str(cfg))
    assert code == 1 and "rnak" in err


def test_wallcross_explicit_class(capsys, tmp_path):
    surf = tmp_path / "p2.json"
    surf.write_text(json.dumps({"basis": ["H"], "matrix": [[1]], "K": [-3], "chiO": 1}))
    code, out, _ = run(capsys, "wallcross", "--surface", str(surf), "--rank", "2", "--c1", "1",
                       "--c2", "3", "--insertion", "mu:[C]^4", "--format", "json")
    assert code == 0
    assert json.loads(out)["omegaText"] == {"1": "-2"}


def test_output_file(tmp_path, capsys):
    path = tmp_path / "out.json"
    run(capsys, "vdim", "--c2", "3", "--output", str(path))
    assert json.loads(path.read_text())["vdim"] == 9
