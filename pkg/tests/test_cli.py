from __future__ import annotations

import csv
import io
import json

from qcdcl_lab.cli import main
from qcdcl_lab.goldens import equality_script
from qcdcl_lab.harness import CSV_HEADER, ExperimentPlan, run_plan
from qcdcl_lab.replay import serialize_script


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_eval_xt_pipeline(tmp_path, capsys):
    path = tmp_path / "eq2.qdimacs"
    code, _, _ = run(capsys, "gen", "--family", "equality", "--n", "2", "-o", str(path))
    assert code == 0
    text = path.read_text()
    assert text.startswith("c equality_2")

    code, out, _ = run(capsys, "eval", "--input", str(path))
    assert code == 0 and out.strip() == "false"

    code, out, _ = run(capsys, "xt-check", "--input", str(path))
    assert code == 0
    payload = json.loads(out)
    assert payload["applicable"] and payload["holds"]


def test_solve_emits_checkable_proof(tmp_path, capsys):
    formula = tmp_path / "f.qdimacs"
    proof = tmp_path / "f.qrp"
    stats = tmp_path / "f.json"
    run(capsys, "gen", "--family", "qparity", "--n", "3", "-o", str(formula))
    code, out, _ = run(
        capsys, "solve", "--input", str(formula),
        "--decision", "lev-ord", "--propagation", "red",
        "--emit-proof", str(proof), "--emit-stats", str(stats),
    )
    assert code == 0
    assert json.loads(out)["status"] == "refuted"
    assert json.loads(stats.read_text())["reductions"] >= 0

    code, out, _ = run(capsys, "check", "--input", str(formula), "--proof", str(proof))
    assert code == 0 and out.startswith("valid")


def test_check_rejects_wrong_formula(tmp_path, capsys):
    f1 = tmp_path / "a.qdimacs"
    f2 = tmp_path / "b.qdimacs"
    proof = tmp_path / "a.qrp"
    run(capsys, "gen", "--family", "qparity", "--n", "3", "-o", str(f1))
    run(capsys, "gen", "--family", "equality", "--n", "3", "-o", str(f2))
    run(
        capsys, "solve", "--input", str(f1), "--decision", "lev-ord",
        "--propagation", "red", "--emit-proof", str(proof),
    )
    code, out, _ = run(capsys, "check", "--input", str(f2), "--proof", str(proof))
    assert code == 1 and "invalid" in out


def test_replay_cli(tmp_path, capsys):
    formula = tmp_path / "eq.qdimacs"
    script = tmp_path / "eq.script"
    run(capsys, "gen", "--family", "equality", "--n", "3", "-o", str(formula))
    script.write_text(serialize_script(equality_script(3)))
    code, out, _ = run(
        capsys, "replay", "--input", str(formula), "--script", str(script),
        "--decision", "ass-r-ord", "--propagation", "red",
    )
    assert code == 0
    assert json.loads(out)["status"] == "refuted"


def test_simulate_cli(tmp_path, capsys):
    formula = tmp_path / "t.qdimacs"
    proof = tmp_path / "t.qrp"
    rounds = tmp_path / "t.rounds"
    out_proof = tmp_path / "t.sim.qrp"
    run(capsys, "gen", "--family", "trapdoor", "--n", "2", "-o", str(formula))
    from qcdcl_lab.goldens import fig_trapdoor_refutation
    from qcdcl_lab.proofs import serialize_proof

    proof.write_text(serialize_proof(fig_trapdoor_refutation(2)))
    code, out, _ = run(
        capsys, "simulate", "--input", str(formula), "--qres-proof", str(proof),
        "--emit-proof", str(out_proof), "--emit-rounds", str(rounds),
    )
    assert code == 0
    assert json.loads(out)["rounds"] >= 1
    code, _, _ = run(capsys, "check", "--input", str(formula), "--proof", str(out_proof))
    assert code == 0


def test_goldens_cli(capsys):
    code, out, _ = run(
        capsys, "goldens", "--qparity-n", "4", "--equality-n", "3",
        "--trapdoor-n", "2", "--lonsing-n", "2",
    )
    assert code == 0
    assert out.count("pass") == 5


def test_bench_cli_schema(tmp_path, capsys):
    out_csv = tmp_path / "bench.csv"
    code, _, _ = run(
        capsys, "bench", "--family", "equality", "--n", "2..3",
        "--policies", "lev-ord/red,ass-r-ord/red", "--seeds", "0",
        "--stable-timing", "-o", str(out_csv),
    )
    assert code == 0
    rows = list(csv.reader(io.StringIO(out_csv.read_text())))
    assert rows[0] == CSV_HEADER
    assert len(rows) == 1 + 2 * 2
    outcomes = {r[7] for r in rows[1:]}
    assert outcomes == {"refuted"}


def test_empty_plan_gives_header_only():
    records, text = run_plan(ExperimentPlan(cells=[]))
    assert records == []
    rows = list(csv.reader(io.StringIO(text)))
    assert rows == [CSV_HEADER]


def test_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.qdimacs"
    bad.write_text("p cnf 1 1\ne 1 0\n1 -1 0\n")
    code, _, err = run(
        capsys, "solve", "--input", str(bad),
        "--decision", "lev-ord", "--propagation", "red",
    )
    assert code == 1 and "error" in err
