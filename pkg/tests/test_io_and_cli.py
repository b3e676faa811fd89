import json
import os
import random
from fractions import Fraction as F

import pytest

from otlab.cli import main
from otlab.finite_ot import (
    CostMatrix,
    Marginals,
    instance_from_json,
    instance_to_json,
    save_instance,
)
from otlab.rational import INF, format_rational, parse_rational_str
from otlab.serialize import rle_decode, rle_encode


def test_rational_round_trip():
    for s in ["0/1", "7/3", "-2/5", "12/1"]:
        assert format_rational(parse_rational_str(s)) == s
    assert parse_rational_str("inf") is INF
    assert format_rational(INF) == "inf"
    assert parse_rational_str("4/6") == F(2, 3)


def test_instance_round_trip():
    cost = CostMatrix([[F(1, 2), INF], [3, 0]])
    marg = Marginals([F(1, 2), F(1, 2)], [F(1, 4), F(3, 4)])
    text = instance_to_json(cost, marg)
    cost2, marg2 = instance_from_json(text)
    assert cost2.entries == cost.entries
    assert marg2.mu == marg.mu and marg2.nu == marg.nu
    assert instance_to_json(cost2, marg2) == text


def test_rle_round_trip():
    rng = random.Random(2)
    vals = [rng.randint(-3, 3) for _ in range(200)]
    assert rle_decode(rle_encode(vals)).tolist() == vals


def test_cli_solve_identity(tmp_path):
    inst = tmp_path / "id3.json"
    save_instance(inst, CostMatrix([[0 if i == j else 1 for j in range(3)] for i in range(3)]), Marginals.uniform(3))
    out = tmp_path / "report.json"
    assert main(["solve", str(inst), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["primal"] == "0/1"
    assert report["dual"] == "0/1"
    assert report["slackness"]["passed"]
    assert report["monotonicity"]["passed"]


def test_cli_solve_random_matches(tmp_path):
    rng = random.Random(77)
    n = 5
    cost = CostMatrix(
        [[F(rng.randint(0, 30), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
    )
    inst = tmp_path / "r5.json"
    save_instance(inst, cost, Marginals.uniform(n))
    out = tmp_path / "report.json"
    assert main(["solve", str(inst), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["primal"] == report["dual"]


def test_cli_solve_infeasible_exit(tmp_path):
    inst = tmp_path / "bad.json"
    save_instance(inst, CostMatrix([[INF, INF], [1, 1]]), Marginals.uniform(2))
    assert main(["solve", str(inst)]) == 3


def test_cli_solve_parse_error(tmp_path):
    p = tmp_path / "junk.json"
    p.write_text("{not json")
    assert main(["solve", str(p)]) == 2


def test_cli_construct_and_verify(tmp_path, capsys):
    d = tmp_path / "artifacts"
    assert main(["construct", "--m1", "5", "--depth", "2", "--levels", "2",
                 "--outdir", str(d)]) == 0
    names = sorted(os.listdir(d))
    assert names == [
        "diagnostics.jsonl",
        "quasi_cost_level_1.csv",
        "quasi_cost_level_2.csv",
        "singular_ledger.json",
        "tau_level_1.json",
        "tau_level_2.json",
        "tower.json",
    ]
    ledger = json.loads((d / "singular_ledger.json").read_text())
    assert ledger[0]["singular_mass"] == "-2/5"
    lines = (d / "diagnostics.jsonl").read_text().strip().split("\n")
    assert json.loads(lines[0])["dual_value"] == "1/1"
    assert main(["verify", str(d)]) == 0


def test_cli_construct_deterministic(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    for d in (d1, d2):
        assert main(["construct", "--m1", "5", "--depth", "2", "--outdir", str(d)]) == 0
    for name in os.listdir(d1):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_cli_verify_catches_tampering(tmp_path):
    d = tmp_path / "artifacts"
    assert main(["construct", "--m1", "5", "--depth", "2", "--outdir", str(d)]) == 0
    tl = json.loads((d / "tau_level_1.json").read_text())
    tl["tau_rle"][0][0] += 1
    (d / "tau_level_1.json").write_text(json.dumps(tl))
    assert main(["verify", str(d)]) == 1


def test_cli_bad_m1_usage():
    assert main(["construct", "--m1", "4", "--depth", "1"]) == 2


def test_cli_search_cap_exit():
    assert main(["construct", "--m1", "5", "--depth", "2", "--search-cap", "8"]) == 4


def test_cli_gap_report(tmp_path):
    out = tmp_path / "gap.json"
    assert main(["gap", "--m1", "5", "--jmax", "2", "--M", "2", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["primal"] == "1/1" and report["dual"] == "1/1"


def test_cli_gap_degenerate_m1():
    # two-graph degenerate report: identity plus one rotation step
    assert main(["gap", "--m1", "5", "--jmax", "1", "--M", "1"]) == 0


def test_cli_gap_usage_errors():
    with pytest.raises(SystemExit) as e:
        main(["gap", "--m1", "5"])  # missing required flags
    assert e.value.code == 2
    assert main(["gap", "--m1", "5", "--jmax", "1", "--M", "3"]) == 2


def test_cli_construct_quasi_cost_csv_pattern(tmp_path):
    # level-1 step pattern at M1 = 11: dips to -3 on the outer intervals,
    # 2 on the bulk, 1 on the middle
    d = tmp_path / "m11"
    assert main(["construct", "--m1", "11", "--depth", "1", "--outdir", str(d)]) == 0
    rows = (d / "quasi_cost_level_1.csv").read_text().strip().split("\n")[1:]
    values = [r.split(",")[2] for r in rows]
    assert values[0] == "-3/1" and values[-1] == "-3/1"
    assert values[5] == "1/1"
    assert values[1:5] == ["2/1"] * 4 and values[6:10] == ["2/1"] * 4
