import json
import math
import subprocess
import sys

import pytest

from hecke_shuffle.cli import main, parse_complex, parse_points
from hecke_shuffle.errors import PreconditionError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_phi_schema(capsys):
    code, out, _ = run(capsys, "eval", "phi", "--d", "0", "--s", "2.5")
    assert code == 0
    rec = json.loads(out)
    assert rec["schema"] == 1
    assert set(rec) == {"schema", "subject", "field", "lambda_star", "s", "value", "error_estimate", "truncation"}
    assert rec["subject"] == "phi" and rec["field"] == "Q"
    assert rec["s"] == [2.5, 0.0]
    # zeta*(2.5)/zeta*(3.5), from mpmath at 30 digits
    assert rec["value"][0] == pytest.approx(2.0812112477734, rel=1e-12)


def test_eval_local_real(capsys):
    code, out, _ = run(capsys, "eval", "local", "--place", "real", "--sdiff", "2", "--lamdiff", "0")
    assert code == 0
    assert json.loads(out)["value"] == [pytest.approx(2.0), 0.0]


def test_eval_shuffle_two_terms(capsys):
    code, out, _ = run(capsys, "eval", "shuffle", "--gens", "g1,g2", "--at", "@0.3+0.5j;@1.1-0.2j")
    assert code == 0
    rec = json.loads(out)
    assert rec["truncation"]["expr"] == "shuffle(gen:g1, gen:g2)"
    code, out2, _ = run(capsys, "eval", "shuffle", "--expr", "shuffle(gen:g1, gen:g2)", "--at", "0.3+0.5i;1.1-0.2i")
    assert json.loads(out2)["value"] == rec["value"]


def test_eval_multiple_points_and_csv(capsys):
    code, out, _ = run(capsys, "eval", "lfunction", "--d", "2", "--at", "1@2.5;-1@3+1j", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("subject,field,lambda_star")
    assert len(lines) == 3


def test_eval_other_subjects(capsys):
    for argv in (
        ["eval", "phiw", "--d", "-1", "--perm", "2,1", "--at", "@0.2;@2.5+1j"],
        ["eval", "assemble", "--at", "@0.1;@2.1"],
        ["eval", "fourier", "--d", "2", "--at", "1@0.5+1j"],
        ["eval", "local", "--d", "2", "--place", "padic", "--prime", "7", "--which", "1", "--lam", "1", "--sdiff", "2.5"],
        ["eval", "lfunction", "--d", "-3", "--s=-1.5+2j", "--method", "completed"],
    ):
        code, out, err = run(capsys, *argv)
        assert code == 0, (argv, err)
        assert json.loads(out.splitlines()[0])["schema"] == 1


@pytest.mark.parametrize("argv", [
    ["eval", "phi", "--d", "7", "--s", "2"],
    ["eval", "phi", "--d", "2", "--lam", "1", "--s", "0.5"],
    ["eval", "phi", "--d", "2", "--lam", "1,2", "--s", "3"],
    ["eval", "phiw", "--perm", "2,1", "--at", "@0.2"],
    ["eval", "assemble", "--at", "@0;@0.5"],
    ["eval", "phi", "--s", "abc"],
])
def test_precondition_exit_code(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "precondition" in err


def test_convergence_exit_code(capsys):
    code, _, err = run(capsys, "eval", "lfunction", "--s", "1.05", "--X", "50", "--tol", "1e-9")
    assert code == 1
    assert "converge" in err


def test_bad_flag_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["eval", "nonsense"])
    assert info.value.code == 2


def test_verify_bijection(capsys):
    code, out, _ = run(capsys, "verify", "bijection", "--n", "6")
    assert code == 0
    last = [l for l in out.splitlines() if "m+n=6" in l][0]
    assert last.startswith("PASS") and "distinct=720" in last and "collisions=0" in last


def test_verify_local_json(capsys):
    code, out, _ = run(capsys, "verify", "local", "--d", "-1", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == 1 and doc["passed"]
    assert [c["status"] for c in doc["checks"]] == ["PASS"] * 3


def test_verify_failure_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "functional", "--tol", "1e-300")
    assert code == 1
    assert "FAIL" in out


def test_cache_commands(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("HECKE_SHUFFLE_CACHE", raising=False)
    code, out, _ = run(capsys, "cache", "build", "--d", "13", "--X", "997", "--cache-dir", str(tmp_path))
    assert code == 0 and (tmp_path / "primes_d13_X997.txt").exists()
    code, out, _ = run(capsys, "cache", "list", "--cache-dir", str(tmp_path))
    assert "primes_d13_X997.txt d=13 X=997" in out
    other = tmp_path / "env"
    monkeypatch.setenv("HECKE_SHUFFLE_CACHE", str(other))
    run(capsys, "cache", "build", "--d", "5", "--X", "101", "--cache-dir", str(tmp_path))
    assert (other / "primes_d5_X101.txt").exists()
    code, out, _ = run(capsys, "cache", "clear")
    assert out.strip() == "removed 1 cache files"
    monkeypatch.delenv("HECKE_SHUFFLE_CACHE")
    assert run(capsys, "cache", "list")[0] == 2


def test_point_parsing():
    assert parse_complex("1.5-2i") == 1.5 - 2j
    pts = parse_points("1@2; -2@0.5+1j ;", 1)
    assert [(p.lam, p.s) for p in pts] == [((1,), 2), ((-2,), 0.5 + 1j)]
    assert parse_points("3", 1)[0].lam == (0,)
    with pytest.raises(PreconditionError):
        parse_points("1,1@2", 1)


def test_subprocess_determinism():
    cmd = [sys.executable, "-m", "hecke_shuffle", "verify", "assoc", "--seed", "7"]
    a = subprocess.run(cmd, capture_output=True, check=True)
    b = subprocess.run(cmd, capture_output=True, check=True)
    assert a.stdout == b.stdout and a.stdout
