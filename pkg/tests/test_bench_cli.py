import csv
import io
import json

import pytest

from coalp.bench import config_label, format_table, parse_config, run_bench, write_csv
from coalp.cli import main
from coalp.parser import parse_program
from coalp.programs import BINARY_TREE, BTG

from conftest import A


def _cli(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def test_parse_config():
    c = parse_config("6t+6e")
    assert (c.worker_threads, c.parallel_expansion, c.expansion_threads) == (6, True, 6)
    assert config_label(c) == "6t+6e"
    assert config_label(parse_config("4t")) == "4t"
    with pytest.raises(ValueError):
        parse_config("four")


def test_run_bench_single_row():
    rows = run_bench(parse_program("p(a)."), A("p(X)"), [parse_config("1t")], repeats=1)
    [r] = rows
    assert r.wall_median > 0 and r.speedup == 1.0 and r.solutions == 1 and r.repeats == 1
    assert "1t" in format_table(rows)


def test_run_bench_ground_counts(tmp_path):
    rows = run_bench(parse_program(BTG), A("btree(tree(empty,0,empty))"),
                     [parse_config("1t"), parse_config("2t+2e")], repeats=2, mode="ground")
    assert [r.config for r in rows] == ["1t", "2t+2e"]
    assert all((r.node_count, r.leaf_count, r.solutions) == (8, 3, 1) for r in rows)
    assert rows[0].speedup == 1.0
    path = tmp_path / "b.csv"
    write_csv(rows, path)
    with open(path) as f:
        got = list(csv.DictReader(f))
    assert [g["config"] for g in got] == ["1t", "2t+2e"]
    assert float(got[0]["speedup"]) == 1.0


def test_run_bench_rejects_bad_args():
    with pytest.raises(ValueError):
        run_bench(parse_program("p(a)."), A("p(X)"), [parse_config("1t")], repeats=0)
    with pytest.raises(ValueError):
        run_bench(parse_program("p(a)."), A("p(X)"), [], repeats=1)


def test_cli_run_builtin():
    code, out = _cli(["run", "builtin:binarytree", "--goal", "btree(X).", "--solutions", "3"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "btree(empty)  |  {X/empty}  |  1"
    assert lines[1].endswith("|  4") and len(lines) == 4
    assert lines[-1].startswith("% 3 solution(s)")


def test_cli_run_file_ground_and_emit(tmp_path):
    f = tmp_path / "btg.pl"
    f.write_text(BTG)
    out_dir = tmp_path / "out"
    code, out = _cli(["run", str(f), "--goal", "btree(X)", "--mode", "ground",
                      "--emit-tree", "json", "--emit-templates", "dot", "--out-dir", str(out_dir)])
    assert code == 0
    assert out.splitlines()[-1] == "% 3 ground answer(s)"
    trees = sorted(out_dir.glob("ground-*.json"))
    assert len(trees) == 3
    assert json.loads(trees[0].read_text())["root"]["atom"] == "btree(empty)"
    dot = (out_dir / "templates.dot").read_text()
    assert dot.startswith("digraph") and "dashed" in dot


def test_cli_run_emits_numbered_steps(tmp_path):
    code, _ = _cli(["run", "builtin:tq", "--goal", "T(X,c)", "--emit-tree", "dot",
                    "--out-dir", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "step-0000.dot").exists() and (tmp_path / "step-0001.dot").exists()


def test_cli_errors(tmp_path, capsys):
    bad = tmp_path / "bad.pl"
    bad.write_text("p(a). p(a,b).")
    assert main(["run", str(bad), "--goal", "p(X)"], out=io.StringIO()) == 2
    assert "arity conflict" in capsys.readouterr().err
    assert main(["run", "builtin:binarytree", "--goal", "btree(X), bit(Y)"], out=io.StringIO()) == 2
    assert main(["run", "builtin:binarytree", "--goal", "btree(X)", "--mode", "ground"],
                out=io.StringIO()) == 2
    assert main(["run", str(tmp_path / "missing.pl"), "--goal", "p(X)"], out=io.StringIO()) == 2
    with pytest.raises(SystemExit):
        main(["run", "builtin:nope", "--goal", "p(X)"], out=io.StringIO())


def test_cli_gen(tmp_path):
    code, out = _cli(["gen", "bta", "--n", "0"])
    assert code == 0 and len(parse_program(out)) == 5
    target = tmp_path / "u.pl"
    assert _cli(["gen", "uta", "--n", "1", "-o", str(target)])[0] == 0
    assert len(parse_program(target.read_text())) == 21
    code, out = _cli(["gen", "datalog", "--seed", "5", "--clauses", "12"])
    assert code == 0 and len(parse_program(out)) == 12
    assert _cli(["gen", "bta", "--n", "5"])[0] == 2


def test_cli_bench(tmp_path):
    prog = tmp_path / "bt.pl"
    prog.write_text(BINARY_TREE)
    csv_path = tmp_path / "res" / "bench.csv"
    code, out = _cli(["bench", "--program", str(prog), "--goal", "btree(X)",
                      "--configs", "1t,2t", "--repeats", "1", "--solutions", "10",
                      "--csv", str(csv_path)])
    assert code == 0
    assert csv_path.exists() and csv_path.with_suffix(".png").exists()
    with open(csv_path) as f:
        rows = list(csv.DictReader(f))
    assert [r["config"] for r in rows] == ["1t", "2t"]
    assert float(rows[0]["speedup"]) == 1.0
    assert all(r["solutions"] == "10" for r in rows)
    assert "speedup" in out
