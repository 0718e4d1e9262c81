import subprocess
import sys

import pytest

from ftvqe.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def body(text):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def kv(text):
    return dict(ln.split(",", 1) for ln in body(text))


def test_synth_half_pi_is_clifford(capsys):
    code, out, _ = run(["synth", "--theta", "1.5707963267948966", "--digits", "8"], capsys)
    assert code == 0
    res = kv(out)
    assert res["t_count"] == "0" and res["verified"] == "1"


def test_synth_zero_is_empty(capsys):
    code, out, _ = run(["synth", "--theta", "0", "--digits", "4"], capsys)
    assert code == 0
    assert kv(out)["word"] == ""


def test_synth_generic_verified(capsys):
    code, out, _ = run(["synth", "--theta", "0.5", "--digits", "4"], capsys)
    res = kv(out)
    assert code == 0 and res["verified"] == "1"
    assert float(res["achieved_error"]) <= 1e-4
    assert res["word"].count("T") == int(res["t_count"]) > 0


def test_provenance_header_lists_resolved_config(capsys):
    _, out, _ = run(["synth", "--theta", "0.25", "--digits", "3", "--seed", "5"], capsys)
    head = [ln for ln in out.splitlines() if ln.startswith("#")]
    assert head[0] == "# ftvqe synth"
    assert any(ln.startswith("# version = ") for ln in head)
    for key in ("run.seed = 5", "synth.digits = 3", "synth.theta = 0.25", "run.threads = 1", "synth.axis = 'Z'"):
        assert f"# {key}" in head


def test_sweep_synth_rows(capsys):
    code, out, _ = run(["sweep-synth", "--digits", "2,3", "--grid-points", "5"], capsys)
    assert code == 0
    rows = body(out)
    assert rows[0] == "theta,d,t_count,error"
    data = [r.split(",") for r in rows[1:]]
    assert len(data) == 10
    for theta, d, tc, err in data:
        assert float(err) <= 10.0 ** -int(d)
        if float(theta) in (0.0, round(3.141592653589793, 12), round(1.5707963267948966, 12)):
            assert tc == "0"


def test_reruns_are_byte_identical(capsys):
    argv = ["vqe", "--n", "2", "--layers", "1", "--mode", "FT", "--digits", "3", "--max-iterations", "5", "--seed", "3"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b


def test_vqe_trace_and_params_out(tmp_path, capsys):
    pfile = tmp_path / "params.txt"
    code, out, _ = run(["vqe", "--n", "2", "--layers", "1", "--params-out", str(pfile)], capsys)
    assert code == 0
    rows = body(out)
    assert rows[0].startswith("step,energy,energy_error,d")
    assert float(rows[-1].split(",")[2]) <= 1e-10
    assert len(pfile.read_text().split()) == 2

    code, out, _ = run(
        ["fixed-angle", "--n", "2", "--layers", "1", "--params", str(pfile), "--digits", "2,4,6"], capsys
    )
    assert code == 0
    rows = [r.split(",") for r in body(out)[1:]]
    diffs = [float(r[1]) for r in rows]
    assert diffs[0] > diffs[1] > diffs[2]


def test_euler_and_precision_study(capsys):
    code, out, _ = run(["euler", "--thetas", "0.3,2.2", "--digits", "3,4"], capsys)
    assert code == 0 and len(body(out)) == 5
    code, out, _ = run(
        ["precision-study", "--n", "2", "--layers", "1", "--params", "random", "--p-list", "7,20", "--digits", "1..3"], capsys
    )
    assert code == 0
    rows = body(out)
    assert rows[0] == "p,d,energy_diff" and len(rows) == 7


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("synth.theta: 0.7\nsynth.digits: 3\nrun.seed: 9\n")
    code, out, _ = run(["synth", "--config", str(cfg), "--digits", "2"], capsys)
    assert code == 0
    assert "# synth.digits = 2" in out and "# run.seed = 9" in out
    assert kv(out)["theta"] == "0.7"


def test_out_file(tmp_path, capsys):
    dest = tmp_path / "o.csv"
    code, out, _ = run(["synth", "--theta", "0.1", "--digits", "2", "--out", str(dest)], capsys)
    assert code == 0 and out == ""
    assert dest.read_text().startswith("# ftvqe synth")


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["synth", "--digits", "x"],
        ["synth", "--axis", "Q"],
        ["vqe", "--mode", "FT"],
        ["vqe", "--model", "HEISENBERG"],
        ["fixed-angle", "--params", "/nonexistent/params"],
    ],
)
def test_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("synth.thetaa: 0.7\n")
    code, _, err = run(["synth", "--config", str(cfg)], capsys)
    assert code == 2 and "unknown config key" in err


def test_verification_failure_exit_code(monkeypatch, capsys):
    import mpmath

    import ftvqe.cli as cli

    monkeypatch.setattr(cli, "rz_error", lambda word, theta, d: mpmath.mpf(1))
    code, out, _ = run(["synth", "--theta", "0.5", "--digits", "3"], capsys)
    assert code == 1
    assert kv(out)["verified"] == "0"


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ftvqe.cli", "synth", "--theta", "0", "--digits", "2"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "word," in proc.stdout
