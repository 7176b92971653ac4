"""The eleven acceptance criteria, one test each, with a PASS/FAIL line per criterion."""
import os

import pytest

from artifact import acceptance, cli

NUMBERS = [n for n, _, _ in acceptance.CRITERIA]


@pytest.fixture(scope="module")
def outcomes():
    jobs = min(len(NUMBERS), os.cpu_count() or 1)
    return {o.number: o for o in acceptance.run_all(jobs=jobs)}


@pytest.mark.parametrize("number", NUMBERS)
def test_criterion(number, outcomes, capsys):
    o = outcomes[number]
    with capsys.disabled():
        print("\n" + o.line())
    assert o.ok, o.detail


def test_suite_command_reports_every_criterion(capsys):
    code = cli.run(["suite", "acceptance", "--jobs", "4", "--format", "records"])
    out = capsys.readouterr().out.splitlines()
    assert code == 0
    assert [ln.split()[1] for ln in out if ln.startswith("criterion")] == [f"n={n}" for n in NUMBERS]
    assert out[-1] == f"summary passed={len(NUMBERS)} failed=-"
