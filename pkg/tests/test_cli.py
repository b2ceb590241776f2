import csv
import json

import pytest

from itrich.cli import main
from itrich.sweep import aggregate, parse_sweep_spec, read_runs, run_sweep

TRI_PENDANT = "1 2\n1 3\n2 3\n1 4\n"


def _tree(path):
    return {p.relative_to(path).as_posix(): p.read_bytes() for p in sorted(path.rglob("*"))
            if p.is_file()}


def test_delta_outputs(tmp_path):
    src = tmp_path / "g.txt"
    src.write_text(TRI_PENDANT)
    assert main(["delta", "--input", str(src), "--out", str(tmp_path / "o")]) == 0
    rows = list(csv.DictReader(open(tmp_path / "o" / "nodes.csv")))
    assert [r["label"] for r in rows] == ["1", "2", "3", "4"]
    assert float(rows[0]["delta"]) == pytest.approx(4 / 15)
    man = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert man["command"] == "delta" and len(man["inputs"]["input"]["sha256"]) == 64


def test_generate_toy_and_byte_identical_reruns(tmp_path):
    for name in ("a", "b"):
        assert main(["generate", "toy", "--preset", "paper-4blocks", "--seed", "1",
                     "--out", str(tmp_path / name)]) == 0
    assert _tree(tmp_path / "a") == _tree(tmp_path / "b")
    lines = (tmp_path / "a" / "truth.csv").read_text().splitlines()
    assert len(lines) == 301


def test_decompose_byte_identical(tmp_path):
    main(["generate", "toy", "--seed", "2", "--out", str(tmp_path / "toy")])
    edges = str(tmp_path / "toy" / "edges.txt")
    args = ["decompose", "--input", edges, "--threshold", "fixed:0.1", "--null-replicates", "5",
            "--seed", "7", "--curves"]
    assert main(args + ["--out", str(tmp_path / "x")]) == 0
    assert main(args + ["--out", str(tmp_path / "y")]) == 0
    assert _tree(tmp_path / "x") == _tree(tmp_path / "y")
    doc = json.loads((tmp_path / "x" / "decomposition.json").read_text())
    assert doc["seeds"]["master"] == 7 and doc["replicates"] == 5
    assert sum(c["size"] for c in doc["clubs"]) + len(doc["sparse"]) == 300
    man = json.loads((tmp_path / "x" / "manifest.json").read_text())
    assert man["seeds"] == {"master": 7, "tie": 0}


def test_score_and_entropy_commands(tmp_path):
    src = tmp_path / "g.txt"
    src.write_text(TRI_PENDANT)
    truth = tmp_path / "t.csv"
    truth.write_text("node,class\n1,D\n2,D\n3,D\n4,ND\n")
    dec = tmp_path / "d.json"
    dec.write_text(json.dumps({"clubs": [{"nodes": ["1", "2", "3"]}], "sparse": ["4"]}))
    assert main(["score", "--input", str(src), "--truth", str(truth), "--decomposition", str(dec),
                 "--out", str(tmp_path / "s")]) == 0
    sc = json.loads((tmp_path / "s" / "score.json").read_text())
    assert sc["recall"] == 1.0 and sc["specificity"] == 1.0
    assert main(["entropy", "--input", str(src), "--attributes", str(truth),
                 "--out", str(tmp_path / "e")]) == 0
    rows = list(csv.DictReader(open(tmp_path / "e" / "entropy.csv")))
    assert rows[3]["entropy"] == "0.0" and rows[0]["entropy"] != ""


def test_kcore_nullmodel_noise_ppm(tmp_path):
    src = tmp_path / "g.txt"
    src.write_text(TRI_PENDANT + "2 4\n")
    assert main(["kcore", "--input", str(src), "--out", str(tmp_path / "k")]) == 0
    assert main(["nullmodel", "--input", str(src), "--null-replicates", "2", "--export", "0", "1",
                 "--out", str(tmp_path / "n")]) == 0
    assert (tmp_path / "n" / "null_1.csv").exists()
    assert main(["generate", "noise", "--input", str(src), "--noise", "3", "--seed", "1",
                 "--out", str(tmp_path / "z")]) == 0
    assert len((tmp_path / "z" / "truth.csv").read_text().splitlines()) == 8
    assert main(["generate", "ppm", "--block-size", "5", "--out", str(tmp_path / "p")]) == 0


def test_errors_exit_nonzero(tmp_path, capsys):
    assert main(["kcore", "--input", str(tmp_path / "missing.txt"), "--out", str(tmp_path)]) == 2
    bad = tmp_path / "loop.txt"
    bad.write_text("a a\n")
    assert main(["delta", "--input", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "self-loop" in capsys.readouterr().err


def test_out_dir_from_env(tmp_path, monkeypatch):
    monkeypatch.setenv("ITRICH_OUT", str(tmp_path / "envout"))
    from itrich.cli import build_parser
    args = build_parser().parse_args(["kcore", "--input", "x"])
    assert str(args.out) == str(tmp_path / "envout")


def _spec(tmp_path, body):
    p = tmp_path / "sweep.txt"
    p.write_text(body)
    return p


def test_sweep_grammar(tmp_path):
    spec = parse_sweep_spec(_spec(tmp_path, "bases = a.txt, toy:paper-4blocks  # two\n"
                                            "noise = 0, 10\nr = 0, 0.5\nrepeats = 2\nmu = 0.1\n"))
    assert spec.bases == ("a.txt", "toy:paper-4blocks") and spec.noise == (0, 10)
    assert spec.metadata == {"mu": "0.1"} and len(list(spec.cells())) == 8
    with pytest.raises(ValueError):
        parse_sweep_spec(_spec(tmp_path, "bases\n"))


def test_sweep_empty_grid(tmp_path):
    spec = parse_sweep_spec(_spec(tmp_path, "bases = toy:paper-4blocks\nnoise =\nr = 0\n"))
    assert run_sweep(spec, tmp_path / "out") == []
    assert (tmp_path / "out" / "summary.csv").read_text().strip() == \
        "base,noise,r,runs,recall_mean,recall_std,specificity_mean,specificity_std"


def test_sweep_missing_base(tmp_path):
    spec = parse_sweep_spec(_spec(tmp_path, "bases = nope.txt\nnoise = 0\nr = 0\n"))
    with pytest.raises(FileNotFoundError):
        run_sweep(spec, tmp_path / "out")


def test_sweep_resume_and_aggregate(tmp_path):
    base = tmp_path / "base.txt"
    base.write_text("".join(f"{c * 8 + i} {c * 8 + j}\n" for c in range(3)
                            for i in range(8) for j in range(i + 1, 8)) + "0 8\n8 16\n")
    body = "bases = base.txt\nnoise = 0, 6\nr = 0\nrepeats = 1\nreplicates = 3\n" \
           "threshold = fixed:0.1\nseed = 5\n"
    spec = parse_sweep_spec(_spec(tmp_path, body))
    out = tmp_path / "out"
    summary = run_sweep(spec, out)
    assert len(summary) == 2 and all(row["recall_std"] == 0.0 for row in summary)
    first = (out / "runs.csv").read_bytes()
    # a larger repeat count only runs the new repeats and leaves old rows untouched
    spec2 = parse_sweep_spec(_spec(tmp_path, body.replace("repeats = 1", "repeats = 2")))
    run_sweep(spec2, out)
    rows = read_runs(out / "runs.csv")
    assert len(rows) == 4
    old = [line for line in first.decode().splitlines()[1:]]
    assert all(line in (out / "runs.csv").read_text().splitlines() for line in old)
    assert aggregate(rows) == aggregate(read_runs(out / "runs.csv"))
    # jobs > 1 gives the same rows as a serial run
    run_sweep(spec2, tmp_path / "par", jobs=2)
    assert (tmp_path / "par" / "runs.csv").read_bytes() == (out / "runs.csv").read_bytes()
