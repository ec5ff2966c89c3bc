import json

import pytest

from conftest import FIXTURES
from tacx.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ring_info_ok(capsys):
    code, out, _ = run(capsys, "ring", "info", FIXTURES / "exnew_r.ring")
    assert code == 0
    rep = json.loads(out)
    assert rep["dim1"] == 6 and rep["dim2"] == 5
    assert rep["yoshino_b"] is True
    assert rep["yoshino"]["koszul"] == "not checked"


def test_ring_info_counterexample_exits_1(capsys):
    code, out, _ = run(capsys, "ring", "info", FIXTURES / "counterex_r.ring")
    assert code == 1
    rep = json.loads(out)
    assert rep["dim1"] == 6 and rep["dim2"] == 3
    assert rep["yoshino_b"] is False


def test_ring_info_missing_file(capsys):
    code, _, err = run(capsys, "ring", "info", "/nonexistent.ring")
    assert code == 2
    assert "error" in err


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["ring"])
    assert exc.value.code == 2


def test_ezd_search_empty_exits_1(capsys, tmp_path):
    out_file = tmp_path / "report.json"
    code, out, _ = run(
        capsys, "--out", out_file, "ezd", "search", FIXTURES / "ex1_r.ring",
        "--exhaustive", "--proxy-prime", "3",
    )
    assert code == 1
    rep = json.loads(out_file.read_text())
    assert rep["pairs"] == [] and rep["count"] == 0
    assert rep["message"] == "no exact zero divisors found"
    assert rep["prime"] == 3


def test_ezd_search_finds(capsys):
    code, out, _ = run(capsys, "ezd", "search", FIXTURES / "exnew_r.ring",
                       "--exhaustive", "--proxy-prime", "3")
    assert code == 0
    rep = json.loads(out)
    assert rep["count"] > 0


def test_ezd_search_random_mode(capsys):
    code, out, _ = run(capsys, "ezd", "search", FIXTURES / "exnew_r.ring",
                       "--trials", "500", "--seed", "11")
    assert code == 0
    rep = json.loads(out)
    assert rep["mode"] == "random" and rep["count"] == 1


def test_ezd_verify(capsys):
    code, out, _ = run(capsys, "ezd", "verify", FIXTURES / "exnew_r.ring",
                       "--a", "z1+z2", "--b", "z1-z2")
    assert code == 0
    assert json.loads(out)["ezd"] is True
    code, out, _ = run(capsys, "ezd", "verify", FIXTURES / "exnew_r.ring",
                       "--a", "x1", "--b", "y1")
    assert code == 1
    assert json.loads(out)["ezd"] is False


def test_complex_verify_finalex(capsys):
    code, out, _ = run(capsys, "complex", "verify", FIXTURES / "finalex.cx")
    assert code == 0
    rep = json.loads(out)
    assert rep["totally_acyclic"] is True
    assert rep["exact_at"] == {"0": True, "1": True}


def test_csum_build_writes_ring(capsys, tmp_path):
    out_ring = tmp_path / "r.ring"
    code, out, _ = run(capsys, "csum", "build", FIXTURES / "exnew_r1.ring",
                       FIXTURES / "exnew_s1.ring", "-o", out_ring)
    assert code == 0
    rep = json.loads(out)
    assert rep["dim1"] == 6 and rep["dim2"] == 5
    assert out_ring.exists()
    code2, out2, _ = run(capsys, "ring", "info", out_ring)
    assert code2 == 0


def test_csum_missing_distinguished_is_usage_error(capsys, tmp_path):
    bad = tmp_path / "bad.ring"
    bad.write_text("[vars] q1\n[quadrics]\nq1^2\n")
    code, _, err = run(capsys, "csum", "check", bad, FIXTURES / "exnew_s1.ring")
    assert code == 2
    assert "distinguished" in err


def test_graph_import(capsys, tmp_path):
    out_ring = tmp_path / "g.ring"
    code, out, _ = run(capsys, "graph", "import", FIXTURES / "path6.graph",
                       "-o", out_ring, "--spotcheck")
    assert code == 0
    rep = json.loads(out)
    assert rep["components"] == {"A": ["x1", "y1"], "B": ["x2", "y2"]}
    assert rep["no_ezd_spotcheck"] is True
    assert out_ring.exists()


def test_double_build(capsys):
    code, out, _ = run(
        capsys, "double", "build", "--ring", FIXTURES / "ex1_r1.ring",
        "--x", "x1+x2+y1+y2+y3", "--w", "x1+x2-y1-y2-y3",
        "--dec", "(x1,y1)", "--alpha", "1",
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["a_matrix"] == [
        ["x1 + x2 + y1 + y2 + y3", "x1"],
        ["-y1", "x1 + x2 - y1 - y2 - y3"],
    ]
    assert all(rep["verdicts"].values())


def test_double_search_defaults_dec(capsys):
    code, out, _ = run(
        capsys, "double", "search", "--ring", FIXTURES / "ex1_r1.ring",
        "--x", "x1+x2+y1+y2+y3", "--w", "x1+x2-y1-y2-y3",
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["alpha"] == 1


def test_normalize_failure_exits_1(capsys, tmp_path):
    cx = tmp_path / "l1.cx"
    import shutil

    shutil.copy(FIXTURES / "ex1_r1.ring", tmp_path / "ex1_r1.ring")
    cx.write_text(
        "[ring] ex1_r1.ring\n[period] 2\n[let]\n"
        "l1 = x1+x2+y1+y2+y3\nl1p = x1+x2-y1-y2-y3\n"
        "[matrix 0]\n[[l1]]\n[matrix 1]\n[[l1p]]\n"
    )
    code, _, err = run(capsys, "complex", "normalize", cx)
    assert code == 1
    assert "U_0" in err


def test_assemble_cli_roundtrip(capsys, tmp_path):
    import shutil

    for name in ("exnew_r1.ring", "exnew_s1.ring"):
        shutil.copy(FIXTURES / name, tmp_path / name)
    (tmp_path / "a.cx").write_text(
        "[ring] exnew_r1.ring\n[period] 2\n[matrix 0]\n[[z1]]\n[matrix 1]\n[[z1]]\n"
    )
    (tmp_path / "b.cx").write_text(
        "[ring] exnew_s1.ring\n[period] 2\n[matrix 0]\n[[z2]]\n[matrix 1]\n[[z2]]\n"
    )
    code, out, _ = run(capsys, "complex", "assemble", tmp_path / "a.cx",
                       tmp_path / "b.cx", "-o", tmp_path / "glued")
    assert code == 0
    rep = json.loads(out)
    assert rep["totally_acyclic"] is True
    code2, out2, _ = run(capsys, "complex", "verify", tmp_path / "glued.cx")
    assert code2 == 0
    assert json.loads(out2)["totally_acyclic"] is True


def test_reports_byte_identical(capsys, tmp_path):
    r1, r2 = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "--out", r1, "ring", "info", FIXTURES / "exnew_r1.ring")
    run(capsys, "--out", r2, "ring", "info", FIXTURES / "exnew_r1.ring")
    assert r1.read_bytes() == r2.read_bytes()


def test_prime_env_override(capsys, monkeypatch):
    monkeypatch.setenv("TACX_PRIME", "5")
    code, out, _ = run(capsys, "ring", "info", FIXTURES / "exnew_r1.ring")
    assert code == 0
    assert json.loads(out)["prime"] == 5


def test_bad_prime_rejected(capsys):
    code, _, err = run(capsys, "--prime", "2", "ring", "info", FIXTURES / "exnew_r1.ring")
    assert code == 2
    assert "sign-sensitive" in err
