import numpy as np
import pytest

from tfaloc import io as tio
from tfaloc import sympmat as sm
from tfaloc.cli import load_config, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_covariance_exit_codes(capsys):
    code, out, _ = run(["check-covariance", "--matrix", "A_tau", "--tau", "0.3"], capsys)
    assert code == 0 and out.strip().endswith("covariant")
    code, out, _ = run(["check-covariance", "--matrix", "J"], capsys)
    assert code == 1 and "A31+A32" in out and "FAIL" in out


def test_check_covariance_from_file(tmp_path, capsys):
    path = tmp_path / "cov.txt"
    path.write_text(sm.format_matrix(sm.random_covariant(1, 4)))
    assert run(["check-covariance", "--matrix", str(path)], capsys)[0] == 0


def test_usage_errors_exit_two(capsys):
    assert run(["nope"], capsys)[0] == 2
    assert run(["check-covariance", "--matrix", "missing"], capsys)[0] == 2
    assert run(["check-covariance", "--matrix", "A_tau"], capsys)[0] == 2
    code, _, err = run(["transform", "--repr", "wa"], capsys)
    assert code == 2 and "--matrix" in err


def test_numerical_failure_exit_one(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("d=1\n2 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n")
    code, _, err = run(["check-covariance", "--matrix", str(path)], capsys)
    assert code == 1 and "NotSymplectic" in err


@pytest.mark.parametrize("which", ["3.5", "3.6"])
def test_counterexample_peak_gap(which, capsys):
    code, out, _ = run(["counterexample", "--which", which], capsys)
    assert code == 0
    assert "peak_gap=0.125000" in out and "PASS" in out


def test_counterexample_unbounded(capsys):
    code, out, _ = run(["counterexample", "--which", "unbounded"], capsys)
    assert code == 0 and "ratio=2.000000" in out


def test_counterexample_singular_kernel(capsys):
    code, out, _ = run(["counterexample", "--which", "3.8"], capsys)
    assert code == 0 and "fraction 1.000000" in out


def test_transform_is_byte_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.tfag", tmp_path / "b.tfag"
    for p in (a, b):
        assert run(["transform", "--repr", "wa", "--matrix", "A_tau", "--tau", "0.3",
                    "--f", "gaussian:0.5,0.25", "--out", str(p)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    W = tio.read_sampled(a)
    assert W.values.shape == (256, 256)


def test_transform_reads_function_files(tmp_path, capsys, phi):
    f = tmp_path / "f.tfag"
    tio.write_sampled(f, phi)
    out = tmp_path / "w.tfag"
    assert run(["transform", "--repr", "wigner", "--f", str(f), "--g", str(f), "--out", str(out)], capsys)[0] == 0
    W = tio.read_sampled(out).values
    assert abs(W[128, 128] - 2**0.5) < 1e-12


def test_transform_csv_stdout(capsys):
    code, out, _ = run(["transform", "--repr", "stft", "--N", "16", "--format", "csv"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "w0,w1,re,im" and len(lines) == 1 + 16 * 16


def test_quantize_and_localize(tmp_path, capsys):
    q = tmp_path / "q.op"
    loc = tmp_path / "l.op"
    cl = tmp_path / "c.op"
    assert run(["quantize", "--quant", "weyl", "--symbol", "one", "--out", str(q)], capsys)[0] == 0
    M = tio.read_operator(q)
    assert np.allclose(M.matrix, np.eye(256))
    assert run(["localize", "--matrix", "A_tau", "--tau", "0.5", "--symbol", "gaussian", "--out", str(loc)], capsys)[0] == 0
    assert run(["localize", "--classical", "--symbol", "gaussian", "--out", str(cl)], capsys)[0] == 0
    assert tio.read_operator(loc).distance(tio.read_operator(cl)) < 1e-10


def test_config_file_and_env(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "tfa.cfg"
    cfg.write_text("# small grid\ngrid.N = 16\n")
    assert load_config(str(cfg))["grid.N"] == "16"
    monkeypatch.setenv("TFA_CONFIG", str(cfg))
    code, out, _ = run(["transform", "--repr", "stft", "--format", "csv"], capsys)
    assert code == 0 and len(out.splitlines()) == 1 + 16 * 16
    # flags override the file
    code, out, _ = run(["transform", "--repr", "stft", "--format", "csv", "--N", "8"], capsys)
    assert len(out.splitlines()) == 1 + 8 * 8


def test_bad_config_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("no equals sign\n")
    assert run(["check-covariance", "--matrix", "J", "--config", str(cfg)], capsys)[0] == 2


def test_verify_theorem_default_panel(tmp_path, capsys):
    out = tmp_path / "panel.csv"
    code, _, err = run(["verify-theorem", "--panel", "default", "--out", str(out)], capsys)
    assert code == 0, err
    rows = out.read_text().splitlines()
    assert rows[0] == "matrix,symbol,windows,covariant,gap"
    assert len(rows) == 1 + 10 * 3 * 2


def test_report_mp(tmp_path, capsys):
    out = tmp_path / "mp.csv"
    assert run(["report", "--which", "mp", "--out", str(out)], capsys)[0] == 0
    assert out.read_text().startswith("label,p,ratio,status")
