import json

import pytest

from confvar.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_basis(capsys):
    assert run(capsys, "basis", "--level", "4") == (0, "(L -2 -2)\n(L -4)\n", "")
    assert run(capsys, "basis", "--level", "0")[:2] == (0, "()\n")
    code, _, err = run(capsys, "basis", "--level", "-1")
    assert code == 2 and "usage error" in err


def test_global_flags_either_side(capsys):
    a = run(capsys, "--format", "json", "basis", "--level", "4")
    b = run(capsys, "basis", "--level", "4", "--format", "json")
    assert a == b
    assert json.loads(a[1]) == {"basis": ["(L -2 -2)", "(L -4)"], "level": 4}


def test_transform_law(capsys):
    code, out, _ = run(capsys, "transform-law", "--modes", "-2")
    assert code == 0 and out == "(-2) : G1^2\n() : c/12 * schwarzian\n"
    assert run(capsys, "transform-law", "--modes", "-2", "--identity")[1] == "(-2) : 1\n"
    assert run(capsys, "transform-law", "--modes", "-1")[0] == 2


def test_transform_law_double(capsys):
    code, out, _ = run(capsys, "transform-law", "--modes", "-2,-2")
    assert code == 0
    assert out.splitlines()[0] == "(-2 -2) : G1^4"


def test_transform_family_at_points(capsys):
    code, out, _ = run(capsys, "transform-law", "--modes", "-2,-2", "--points", "2")
    assert code == 0 and out.startswith("{1,2} 1 : G1_1^2*G1_2^2")
    assert run(capsys, "transform-law", "--modes", "-2,-3", "--points", "2")[0] == 2
    assert run(capsys, "transform-law", "--modes", "-2,-2,-2", "--points", "3")[0] == 2


def test_vertex_commands(capsys):
    assert run(capsys, "act", "--mode", "2", "--word", "-2")[1] == "(1/2*c)*1\n"
    assert run(capsys, "y-coeff", "--v", "-2", "--n", "1", "--w", "-2")[1] == "(2)*L(-2)1\n"
    code, out, _ = run(capsys, "jacobi-check", "--u", "-2", "--v", "-2", "--w", "-2",
                       "--p", "1", "--q", "0", "--r", "-1")
    assert code == 0 and out.endswith("pass\n")
    code, out, _ = run(capsys, "--format", "sexp", "two-point", "--order", "4")
    assert code == 0 and out.startswith("(series")


def test_faadibruno_and_gaussian(capsys):
    code, out, _ = run(capsys, "faadibruno", "--n", "1", "--k", "2", "--check")
    assert code == 0 and out.splitlines()[0] == "1 1 : coeff 1 weight 1"
    assert run(capsys, "gaussian", "--word", "-2,0")[1] == "2*d3\n"
    code, out, _ = run(capsys, "gaussian", "--derived", "2", "--window", "-3..-2")
    assert code == 0 and all(line.startswith("pass") for line in out.splitlines())
    assert run(capsys, "gaussian")[0] == 2


def test_verify_exit_codes(capsys):
    ok = run(capsys, "verify", "--suite", "virasoro", "--modes", "-2..2", "--level", "2")
    assert ok[0] == 0 and ok[1].endswith("OK: 2/2\n")
    bad = run(capsys, "verify", "--suite", "virasoro", "--modes", "-2..2", "--level", "2",
              "--inject-fault")
    assert bad[0] == 1 and "FAIL [virasoro] injected fault" in bad[1]
    assert run(capsys, "verify", "--suite", "nope")[0] == 2
    assert run(capsys, "verify", "--modes", "3..1")[0] == 2


@pytest.mark.parametrize("suite", ["gaussian", "faadibruno", "transform", "sandbox"])
def test_injected_fault_flips_exit(capsys, suite):
    from confvar import suites
    reps = suites.run([(suites.FAULTS[suite], ())])
    assert [r["status"] for r in reps] == ["fail"]


def test_out_file_and_determinism(tmp_path, capsys):
    target = tmp_path / "law.json"
    assert main(["--out", str(target), "--format", "json", "transform-law", "--modes", "-3"]) == 0
    first = target.read_text()
    main(["--out", str(target), "--format", "json", "transform-law", "--modes", "-3"])
    assert target.read_text() == first
    assert capsys.readouterr().out == ""


def test_parallel_jobs_same_output(capsys):
    args = ["verify", "--suite", "gaussian", "--window", "-3..-2"]
    serial = run(capsys, *args)
    parallel = run(capsys, "--jobs", "2", *args)
    assert serial == parallel and serial[0] == 0
