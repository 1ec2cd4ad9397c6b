import csv
import os
import subprocess
import sys

import numpy as np
import pytest

from proxcg.cli import CSV_MAGIC, _suite_specs, build_parser, main
from proxcg.problems import sample_libsvm_path


def read_csv(path):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    assert lines[0] == CSV_MAGIC
    body = [ln for ln in lines if not ln.startswith("#")]
    rows = list(csv.reader(body))
    return rows[0], rows[1:]


SMALL = ["--family", "lasso", "--m", "60", "--n", "20", "--s", "4"]


def test_solve_example(tmp_path):
    out = tmp_path / "run"
    code = main(["solve", "--family", "lasso", "--m", "500", "--n", "150", "--s", "30",
                 "--lambda", "0.1", "--variant", "alg31", "--seed", "7", "--out", str(out)])
    assert code == 0
    header, rows = read_csv(out / "trace.csv")
    assert header == ["k", "f", "eta_norm", "mu", "alpha", "step_kind", "g_evals",
                      "h_evals", "prox_evals"]
    assert rows[-1][5] == "stop"
    header, rows = read_csv(out / "summary.csv")
    summary = dict(zip(header, rows[0]))
    assert summary["status"] == "converged" and summary["seed"] == "7"
    assert int(summary["iterations"]) == len(read_csv(out / "trace.csv")[1]) - 1


def test_missing_family_prints_usage(tmp_path, capsys):
    assert main(["solve", "--m", "5", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "usage:" in err and "--family" in err


def test_argparse_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as e:
        main(["solve", "--variant", "newton"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 1


def test_apg_on_mcp_rejected(tmp_path, capsys):
    code = main(["solve", "--variant", "apg", "--family", "mcp", "--m", "30", "--n", "10",
                 "--s", "2", "--out", str(tmp_path)])
    assert code == 1
    assert "convex" in capsys.readouterr().err


def test_max_iter_exit_2(tmp_path):
    assert main(["solve", *SMALL, "--max-iter", "2", "--out", str(tmp_path)]) == 2


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[problem]\nfamily = mcp\nm = 40\nn = 12\ns = 3\nc = 5\n\n"
                   "[solver]\nvariant = pgm\ntol = 1e-6\n")
    out = tmp_path / "o"
    assert main(["solve", "--config", str(cfg), "--variant", "alg41", "--out", str(out)]) == 0
    header, rows = read_csv(out / "summary.csv")
    s = dict(zip(header, rows[0]))
    assert s["variant"] == "alg41" and s["family"] == "mcp" and "c=5" in s["problem"]


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[solver]\nbogus = 1\n[problem]\nfamily = lasso\nm=5\nn=3\ns=1\n")
    assert main(["solve", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert main(["solve", "--config", str(tmp_path / "nope.ini")]) == 1
    assert main(["solve", *SMALL, "--kappa", "2", "--out", str(tmp_path)]) == 1
    assert main(["solve", "--family", "logistic", "--data", str(tmp_path / "x.svm")]) == 1


def test_suite_four_solver_columns(tmp_path):
    out = tmp_path / "s"
    code = main(["suite", *SMALL, "--variants", "alg31,alg31-interp,pgm,apg",
                 "--repetitions", "2", "--out", str(out)])
    assert code == 0
    header, rows = read_csv(out / "aggregate.csv")
    assert header == ["metric", "problem", "alg31", "alg31-interp", "pgm", "apg"]
    assert [r[0] for r in rows] == ["mean_iterations", "mean_switches", "switch_ratio_pct",
                                    "converged", "mean_time"]
    header, rows = read_csv(out / "runs.csv")
    assert len(rows) == 8
    for name in ("profile_iterations.csv", "profile_time.csv"):
        header, rows = read_csv(out / name)
        assert header == ["solver", "tau", "P"]


def test_table_preset_specs():
    args = build_parser().parse_args(["suite", "--preset", "lasso-grid", "--lambda", "0.01"])
    specs = _suite_specs(None, args)
    assert [(s.m, s.n, s.s) for s in specs][2] == (500, 150, 30)
    assert len(specs) == 7 and all(s.lam == 0.01 for s in specs)
    assert [s.sparse for s in specs] == [False] * 6 + [True]


def test_suite_single_repetition(tmp_path):
    out = tmp_path / "s"
    assert main(["suite", *SMALL, "--variants", "alg31,pgm", "--repetitions", "1",
                 "--out", str(out)]) == 0
    rh, runs = read_csv(out / "runs.csv")
    ah, agg = read_csv(out / "aggregate.csv")
    its = {r[rh.index("solver")]: r[rh.index("iterations")] for r in runs}
    row = next(r for r in agg if r[0] == "mean_iterations")
    assert float(row[ah.index("alg31")]) == float(its["alg31"])
    assert float(row[ah.index("pgm")]) == float(its["pgm"])


def test_suite_logistic(tmp_path):
    data = tmp_path / "small.libsvm"
    with open(sample_libsvm_path()) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")][:20]
    data.write_text("".join(lines))
    out = tmp_path / "s"
    assert main(["suite", "--family", "logistic", "--data", str(data), "--lambda", "0.05",
                 "--variants", "alg31,pgm", "--repetitions", "1", "--out", str(out)]) == 0
    h, runs = read_csv(out / "runs.csv")
    assert all(r[h.index("family")] == "logistic" for r in runs)
    assert all("lam=0.05" in r[h.index("problem")] for r in runs)
    assert all(r[h.index("status")] == "converged" for r in runs)


def test_suite_rejects_convex_only_variants_on_mcp(tmp_path):
    assert main(["suite", "--family", "mcp", "--m", "20", "--n", "8", "--s", "2",
                 "--variants", "alg41,apg", "--out", str(tmp_path)]) == 1


def test_suite_all_dnf_exit_2(tmp_path):
    assert main(["suite", *SMALL, "--variants", "alg31", "--repetitions", "1",
                 "--max-iter", "1", "--out", str(tmp_path)]) == 2


def write_runs(path, cells):
    lines = [CSV_MAGIC, "problem,family,seed,solver,status,iterations,wall_time"]
    for p, s, it, tm in cells:
        lines.append(f"{p},lasso,0,{s},converged,{it},{tm}")
    path.write_text("\n".join(lines) + "\n")


def test_profile_two_by_two(tmp_path):
    runs = tmp_path / "runs.csv"
    write_runs(runs, [("p0", "a", 1, 0.1), ("p0", "b", 2, 0.2),
                      ("p1", "a", 2, 0.2), ("p1", "b", 1, 0.1)])
    out = tmp_path / "profile.csv"
    assert main(["profile", "--input", str(runs), "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["solver", "tau", "P"]
    assert rows == [["a", "1.0", "0.5"], ["a", "2.0", "1.0"], ["a", "inf", "1.0"],
                    ["b", "1.0", "0.5"], ["b", "2.0", "1.0"], ["b", "inf", "1.0"]]


def test_profile_metrics_differ(tmp_path):
    runs = tmp_path / "runs.csv"
    write_runs(runs, [("p0", "a", 1, 0.3), ("p0", "b", 2, 0.1),
                      ("p1", "a", 3, 0.2), ("p1", "b", 1, 0.1)])
    outs = {}
    for metric in ("iterations", "time"):
        out = tmp_path / f"{metric}.csv"
        assert main(["profile", "--input", str(runs), "--metric", metric,
                     "--out", str(out)]) == 0
        outs[metric] = read_csv(out)[1]
    assert outs["iterations"] != outs["time"]
    for rows in outs.values():
        P = np.array([float(r[2]) for r in rows])
        assert np.all((P >= 0) & (P <= 1))


def test_profile_errors(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert main(["profile", "--input", str(empty)]) == 1
    header_only = tmp_path / "h.csv"
    header_only.write_text("problem,seed,solver,status,iterations,wall_time\n")
    assert main(["profile", "--input", str(header_only)]) == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("# proxcg-csv v1\nproblem,seed,solver,status,iterations,wall_time\n"
                   "p,0,a,converged,3,0.1\np,0,b,converged,three,0.1\n")
    capsys.readouterr()
    assert main(["profile", "--input", str(bad)]) == 1
    assert "row 4" in capsys.readouterr().err
    short = tmp_path / "short.csv"
    short.write_text("problem,seed,solver,status,iterations,wall_time\np,0,a\n")
    assert main(["profile", "--input", str(short)]) == 1
    assert "row 2" in capsys.readouterr().err
    missing = tmp_path / "missing.csv"
    missing.write_text("problem,solver\np,a\n")
    assert main(["profile", "--input", str(missing)]) == 1


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "proxcg", "solve", *SMALL, "--out",
                        str(tmp_path)], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert os.path.exists(tmp_path / "trace.csv")
