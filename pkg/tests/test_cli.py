import subprocess
import sys
from pathlib import Path

import pytest

from artifact import cli

DATA = Path(__file__).parent / "data"
FIXTURE = str(DATA / "p_over_one_minus_p_squared.series")
GENUS_ONE = "Z[PT,vir]{K3xC[g=1,N=0]}_(0,1)(|| tau0(w))"


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_detect_rational_fixture(capsys):
    code, out, _ = run(capsys, "detect-rational", "--in", FIXTURE)
    assert code == 0 and out.strip() == "p/(1-p)^2"
    code, out, _ = run(capsys, "--format", "records", "detect-rational", "--in", FIXTURE)
    assert out.strip() == "rational value=p/(1-p)^2"


def test_detect_rational_undetermined_exits_one(capsys):
    code, _, _ = run(capsys, "detect-rational", "--in", FIXTURE, "--max-deg", "1")
    assert code == 1


def test_p_to_z(capsys):
    code, out, _ = run(capsys, "p-to-z", "--order", "8", "--rational", "p-2+1/p")
    assert code == 0
    assert out.strip() == "z^2 + 1/12*z^4 + 1/360*z^6 + 1/20160*z^8 + O(z^9)"
    code, _, err = run(capsys, "p-to-z", "--order", "4", "--in", FIXTURE)
    assert code == 2 and "truncated" in err


def test_verify_projector_and_algebras(capsys):
    code, out, _ = run(capsys, "verify-projector", "--n", "3", "--preset", "toy")
    assert code == 0 and "identity" in out
    code, out, _ = run(capsys, "validate-algebra")
    assert code == 0 and out.count(": ok") == 4


def test_hilb_diagonal_records(capsys):
    code, out, _ = run(capsys, "hilb-diagonal", "--n", "1", "--preset", "toy", "--format", "records")
    assert code == 0
    assert out.splitlines() == ["term mu={(1,1)} coeff=1", "term mu={(1,p)} coeff=1", "count n=2"]


def test_transform_and_invert(capsys):
    code, out, _ = run(capsys, "transform", "tau1(g)")
    assert out.strip() == "[z^-1] tau1(g) + [1] tau0(K[2;1].g)"
    code, out, _ = run(capsys, "invert", "[z^-1] tau1(g) + [1] tau0(K[2;1].g)")
    assert code == 0 and out.strip() == "[1] tau1(g)"
    code, _, _ = run(capsys, "transform", "tau0(a) tau0(b) * Drel(1,2)", "--excess", "raise")
    assert code == 2
    code, _, _ = run(capsys, "transform", "tau0(a) tau0(b) * Drel(1,2)", "--excess", "euler")
    assert code == 0


def test_parse_errors_show_caret(capsys):
    code, _, err = run(capsys, "degenerate", "Z[XX,red]{K3xC}_(B+F,1)(q1(p)|0> || 1)", "--split", "node")
    assert code == 2
    lines = err.splitlines()
    assert lines[1].index("^") == 2 and "column 3" in lines[2]


@pytest.mark.parametrize("argv", [
    ["hilb-diagonal", "--n", "2", "--bogus"],
    ["nope"],
    ["reduce-to-cap"],
    ["suite", "other"],
    ["hilb-diagonal", "--n", "2", "--preset", "missing"],
    ["replay", "/nonexistent/trace.txt"],
])
def test_usage_errors_exit_two(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_reduce_and_replay(capsys, tmp_path):
    code, out, _ = run(capsys, "reduce-to-cap", GENUS_ONE, "--format", "records")
    assert code == 0 and out.startswith("root: ")
    trace = tmp_path / "trace.txt"
    trace.write_text(out)
    code, out2, _ = run(capsys, "replay", str(trace))
    assert code == 0 and "replayed 2 steps" in out2
    assert run(capsys, "reduce-to-cap", "--replay", str(trace))[0] == 0
    trace.write_text(out.replace("N=2", "N=3"))
    code, _, err = run(capsys, "replay", str(trace))
    assert code == 1 and "replay failed" in err


def test_human_derivation_is_deterministic(capsys):
    first = run(capsys, "reduce-to-cap", GENUS_ONE)
    second = run(capsys, "reduce-to-cap", GENUS_ONE)
    assert first == second
    assert first[1].startswith("start  ")


def test_degenerate_and_split(capsys):
    b = "Z[PT,vir]{K3xC[alg=toy]}_(0,1)(q1(p)|0> || tau0(w))"
    code, out, _ = run(capsys, "degenerate", b, "--split", "node[g1=0,A1=1]", "--format", "records")
    assert code == 0 and "step 1: rule=degenerate:node[g1=0,A1=1] at=0.0 -> " in out
    code, out, _ = run(capsys, "degenerate", b, "--split", "node[g1=0,A1=1]", "--kunneth", "symbolic")
    assert code == 0 and "H[j]" in out
    code, out, _ = run(capsys, "split-diagonal",
                       "Z[PT,vir]{P3/P2}_(H)(q1(1)|0> || tau0(H) tau1(1) * Drel(1,2))")
    assert code == 0 and "DX1[j1]" in out
    assert run(capsys, "split-diagonal", b)[0] == 2


def test_mcf(capsys):
    code, out, _ = run(capsys, "mcf", "--theory", "pt", "--div", "3", "--format", "records")
    assert code == 0 and "(p^3)" in out
    code, out, _ = run(capsys, "mcf", "--div", "2", "--compat", "--format", "records")
    assert code == 0
    assert out.splitlines()[-3].endswith("-> 0")
    assert "square k=2 ok=True" in out
    assert run(capsys, "mcf", "--theory", "gw", "--div", "2")[0] == 0


def test_check_prefactors(capsys):
    code, out, _ = run(capsys, "check-prefactors", "--samples", "100", "--seed", "4")
    assert code == 0 and out.strip().endswith("0 mismatches")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "artifact", "transform", "tau0(g)"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "[1] tau0(g)"
    proc = subprocess.run([sys.executable, "-m", "artifact", "transform", "tau0(g"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 2 and "^" in proc.stderr
