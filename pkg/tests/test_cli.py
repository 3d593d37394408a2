import csv
import io
import json

import pytest

from hublab.cli import main
from hublab.family_gen import FamilyParams, build_H
from hublab.graph_core import all_pairs, read_graph, write_graph
from hublab.hub_labeling import baseline_full, read_labels, write_labels


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def strip_volatile(report: dict) -> dict:
    out = json.loads(json.dumps(report))
    out.pop("timestamp", None)
    out.pop("timing", None)
    for row in out.get("rows", []):
        row.pop("wall_time_s", None)
    return out


def test_gen_smallest_instance(capsys, tmp_path):
    out_path = tmp_path / "h.txt"
    code, out = run_cli(capsys, "gen", "--kind", "H", "--b", "1", "--ell", "1", "--out", str(out_path))
    assert code == 0
    rep = json.loads(out)
    assert rep["n"] == 6 and rep["m"] == 8
    g = read_graph(out_path)
    assert g.n == 6 and g.m == 8
    assert (tmp_path / "h.txt.meta.json").exists()


def test_gen_deleted_variant(capsys, tmp_path):
    remove = tmp_path / "remove.txt"
    remove.write_text("0\n# comment\n1\n")
    out_path = tmp_path / "gp.txt"
    code, out = run_cli(
        capsys, "gen", "--kind", "Gprime", "--b", "1", "--ell", "1",
        "--remove-file", str(remove), "--out", str(out_path),
    )
    assert code == 0
    meta = json.loads((tmp_path / "gp.txt.meta.json").read_text())
    assert meta["kind"] == "G_prime"
    assert sorted(meta["removed"]) == ["1:0", "1:1"]


def test_verify_baseline_labels_exit_zero(capsys, tmp_path):
    inst = build_H(FamilyParams(1, 1))
    gpath, lpath = tmp_path / "g.txt", tmp_path / "l.txt"
    write_graph(inst.graph, gpath)
    write_labels(baseline_full(all_pairs(inst.graph)), lpath)
    code, out = run_cli(capsys, "verify", "--graph", str(gpath), "--labels", str(lpath))
    assert code == 0
    assert json.loads(out)["valid"] is True


def test_verify_invalid_labels_exit_one(capsys, tmp_path):
    inst = build_H(FamilyParams(1, 1))
    gpath, lpath = tmp_path / "g.txt", tmp_path / "l.txt"
    write_graph(inst.graph, gpath)
    lpath.write_text("".join(f"{v}: ({v},0)\n" for v in range(inst.graph.n)))
    code, out = run_cli(capsys, "verify", "--graph", str(gpath), "--labels", str(lpath))
    assert code == 1
    assert json.loads(out)["valid"] is False


def test_build_verify_round_trip(capsys, tmp_path):
    inst = build_H(FamilyParams(1, 1))
    gpath = tmp_path / "g.txt"
    write_graph(inst.graph, gpath)
    lpath = tmp_path / "labels.txt"
    rpath = tmp_path / "report.json"
    code, out = run_cli(
        capsys, "build", "--graph", str(gpath), "--D", "3", "--seed", "4",
        "--out", str(lpath), "--report", str(rpath),
    )
    assert code == 0
    rep = json.loads(rpath.read_text())
    assert rep["labeling"]["valid"] is True
    code, out = run_cli(capsys, "verify", "--graph", str(gpath), "--labels", str(lpath))
    assert code == 0
    # re-running the verifier reproduces the recorded statistics exactly
    vrep = json.loads(out)
    assert vrep["total_size"] == rep["labeling"]["total_size"]
    assert vrep["avg_hub_size"] == rep["labeling"]["avg_hub_size"]
    assert vrep["bit_estimate"] == rep["labeling"]["bit_estimate"]


def test_build_determinism_modulo_timing(capsys, tmp_path):
    inst = build_H(FamilyParams(1, 1))
    gpath = tmp_path / "g.txt"
    write_graph(inst.graph, gpath)
    outputs = []
    labels = []
    lpath = tmp_path / "out.labels"
    for _ in ("a", "b"):
        code, out = run_cli(
            capsys, "build", "--graph", str(gpath), "--D", "2", "--seed", "9",
            "--out", str(lpath),
        )
        assert code == 0
        outputs.append(strip_volatile(json.loads(out)))
        labels.append(lpath.read_bytes())
    assert outputs[0] == outputs[1]
    assert labels[0] == labels[1]


def test_closure_and_stats(capsys, tmp_path):
    inst = build_H(FamilyParams(1, 1))
    gpath, lpath, cpath = tmp_path / "g.txt", tmp_path / "l.txt", tmp_path / "c.txt"
    write_graph(inst.graph, gpath)
    lpath.write_text("0: (5,25)\n1:\n2:\n3:\n4:\n5:\n")
    code, out = run_cli(capsys, "closure", "--graph", str(gpath), "--labels", str(lpath), "--out", str(cpath))
    assert code == 0
    closed = read_labels(cpath)
    assert closed.size(0) == 3  # path of two edges up to level 2
    code, out = run_cli(capsys, "stats", "--labels", str(cpath))
    assert code == 0
    rep = json.loads(out)
    assert rep["total_size"] == 3


def test_audit_cli_lemma1_and_counting(capsys, tmp_path):
    code, _ = run_cli(capsys, "gen", "--kind", "G", "--b", "1", "--ell", "1", "--out", str(tmp_path / "g.txt"))
    assert code == 0
    code, out = run_cli(
        capsys, "audit", "lemma1", "--graph", str(tmp_path / "g.txt"),
        "--meta", str(tmp_path / "g.txt.meta.json"),
    )
    assert code == 0
    assert json.loads(out)["passed"] is True
    g = read_graph(tmp_path / "g.txt")
    write_labels(baseline_full(all_pairs(g)), tmp_path / "l.txt")
    code, out = run_cli(
        capsys, "audit", "counting", "--graph", str(tmp_path / "g.txt"),
        "--meta", str(tmp_path / "g.txt.meta.json"), "--labels", str(tmp_path / "l.txt"),
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["passed"] is True and rep["rhs"] == 2


def test_sumindex_cli_single_and_sweep(capsys):
    code, out = run_cli(
        capsys, "sumindex", "--b", "1", "--ell", "1", "--bits", "1", "--a", "0", "--b-index", "0",
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["mismatches"] == 0 and rep["runs"] == 1
    code, out = run_cli(
        capsys, "sumindex", "--b", "2", "--ell", "2", "--bits", "1010", "--sweep", "--format", "csv",
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 16
    assert all(r["decoded"] == r["expected"] for r in rows)


def test_sumindex_cli_usage_error(capsys):
    code, _ = run_cli(capsys, "sumindex", "--b", "1", "--ell", "1", "--bits", "1")
    assert code == 2


def test_bench_single_threshold(capsys, tmp_path):
    inst = build_H(FamilyParams(1, 1))
    gpath = tmp_path / "g.txt"
    write_graph(inst.graph, gpath)
    code, out = run_cli(capsys, "bench", "--graph", str(gpath), "--D-range", "2")
    assert code == 0
    rep = json.loads(out)
    assert len(rep["rows"]) == 1 and rep["rows"][0]["valid"] is True


def test_bench_csv_rows(capsys, tmp_path):
    inst = build_H(FamilyParams(1, 1))
    gpath = tmp_path / "g.txt"
    write_graph(inst.graph, gpath)
    code, out = run_cli(capsys, "bench", "--graph", str(gpath), "--D-range", "2,4,8", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["D"] for r in rows] == ["2", "4", "8"]
    assert all(r["valid"] == "True" for r in rows)


def test_audit_counting_invalid_labels_exit_one(capsys, tmp_path):
    code, _ = run_cli(capsys, "gen", "--kind", "H", "--b", "1", "--ell", "1", "--out", str(tmp_path / "h.txt"))
    assert code == 0
    g = read_graph(tmp_path / "h.txt")
    (tmp_path / "bad.txt").write_text("".join(f"{v}: ({v},0)\n" for v in range(g.n)))
    code, out = run_cli(
        capsys, "audit", "counting", "--graph", str(tmp_path / "h.txt"),
        "--meta", str(tmp_path / "h.txt.meta.json"), "--labels", str(tmp_path / "bad.txt"),
    )
    assert code == 1
    assert json.loads(out)["passed"] is False


def test_bench_three_regular_rows(capsys, tmp_path):
    from hublab.corpus import random_regular_graph

    g = random_regular_graph(500, 3, seed=6)
    gpath = tmp_path / "g.txt"
    write_graph(g, gpath)
    code, out = run_cli(capsys, "bench", "--graph", str(gpath), "--D-range", "2,4,8")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 3
    assert all(r["valid"] and r["bound_ok"] for r in rows)


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_missing_file_reports_usage_error(capsys):
    code, _ = run_cli(capsys, "verify", "--graph", "/nonexistent", "--labels", "/nonexistent")
    assert code == 2
