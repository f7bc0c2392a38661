"""The acceptance criteria, run through ``recurrence-lab verify``.

The suite runs twice on the shipped configuration. Every criterion test reads
its verdicts from the first run and prints one PASS/FAIL line; criterion 11
compares the two ``verdicts.json`` files byte for byte.
"""
import io
import json

import pytest

from recurrence_lab import cli

TITLES = {
    1: "return-time entropy on CircleExpanding(2)",
    2: "Ornstein-Weiss entropy on Bernoulli(0.3)",
    3: "grid cells equal partition returns at depth n + m",
    4: "failure-function periods equal brute force",
    5: "median minimal period / n on Bernoulli(1/2) words",
    6: "Katok cylinder-count entropy and its c independence",
    7: "pressure with constant and coordinate potentials",
    8: "dimension and recurrence-rate identities",
    9: "inequality bundles with a negative control",
    10: "randomised monotonicity and censoring properties",
    11: "two verify runs give byte-identical JSON",
}


@pytest.fixture(scope="module")
def runs(tmp_path_factory):
    out = []
    for k in range(2):
        d = tmp_path_factory.mktemp(f"verify{k}")
        code = cli.run(["verify", "--out", str(d)], stdout=io.StringIO())
        out.append((code, (d / "verdicts.json").read_bytes()))
    return out


def _report(capsys, number, ok, detail=""):
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {TITLES[number]}"
    with capsys.disabled():
        print("\n" + line + (f"  [{detail}]" if detail else ""))


def _verdicts(runs, number):
    rows = json.loads(runs[0][1])
    return [v for v in rows if v["relation"].split(":", 1)[0] == str(number)]


@pytest.mark.parametrize("number", range(1, 11))
def test_criterion(runs, capsys, number):
    mine = _verdicts(runs, number)
    failed = [v["relation"] for v in mine if v["status"] == "FAIL"]
    ok = bool(mine) and not failed
    _report(capsys, number, ok, "; ".join(failed))
    assert mine, f"no verdicts recorded for criterion {number}"
    assert not failed, failed


def test_criterion_11_reproducible(runs, capsys):
    internal = _verdicts(runs, 11)
    same = runs[0][1] == runs[1][1]
    ok = same and all(v["status"] == "PASS" for v in internal)
    _report(capsys, 11, ok)
    assert same
    assert internal and all(v["status"] == "PASS" for v in internal)


def test_verify_exits_zero(runs):
    assert [code for code, _ in runs] == [0, 0]
