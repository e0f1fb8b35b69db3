"""Command-line interface: ``coalp run``, ``coalp gen`` and ``coalp bench``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import format_table, parse_config, run_bench, write_csv
from .clausetree import DEFAULT_BUDGET, ModeError, compile_program
from .cotree import derive_step, initial_state
from .generators import generate_bta, generate_datalog, generate_uta
from .ground import ground_solve
from .parser import ParseError, parse_atomic_goal, parse_program
from .programs import BUILTIN
from .render import templates_to_dot, templates_to_json, tree_to_dot, tree_to_json
from .search import DEFAULT_MAX_STEPS, SearchConfig, search


def _read_program(spec: str):
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        if name not in BUILTIN:
            raise SystemExit(f"unknown builtin program {name!r}; choose from {sorted(BUILTIN)}")
        return parse_program(BUILTIN[name])
    return parse_program(Path(spec).read_text(encoding="utf-8"))


def _goal(prog, text: str):
    text = text.strip()
    if not text.endswith("."):
        text += "."
    return parse_atomic_goal(text, prog)


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _nonneg(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coalp", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="derive answers for a goal")
    r.add_argument("program", help="program file, or builtin:NAME")
    r.add_argument("--goal", required=True, help="atomic goal, e.g. 'btree(X).'")
    r.add_argument("--mode", choices=["ground", "coinductive"], default="coinductive")
    r.add_argument("--threads", type=_positive, default=1)
    r.add_argument("--expand-parallel", action="store_true")
    r.add_argument("--expand-threads", type=_positive, default=1)
    r.add_argument("--solutions", type=_positive, default=None)
    r.add_argument("--max-steps", type=_positive, default=DEFAULT_MAX_STEPS)
    r.add_argument("--queue", choices=["fifo", "lifo"], default="fifo")
    r.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    r.add_argument("--no-occurs-check", action="store_true")
    r.add_argument("--no-prune", action="store_true")
    r.add_argument("--emit-tree", choices=["dot", "json"])
    r.add_argument("--emit-templates", choices=["dot", "json"])
    r.add_argument("--out-dir", default="coalp-out",
                   help="directory for --emit-tree / --emit-templates files")

    g = sub.add_parser("gen", help="generate a program")
    gsub = g.add_subparsers(dest="kind", required=True)
    kinds = []
    for kind in ("bta", "uta"):
        k = gsub.add_parser(kind)
        k.add_argument("--n", type=_nonneg, required=True)
        kinds.append(k)
    d = gsub.add_parser("datalog")
    kinds.append(d)
    d.add_argument("--seed", type=int, required=True)
    d.add_argument("--clauses", type=_nonneg, default=30)
    d.add_argument("--predicates", type=_positive, default=4)
    d.add_argument("--constants", type=_positive, default=4)
    d.add_argument("--max-body", type=_nonneg, default=3)
    for k in kinds:
        k.add_argument("-o", "--output", help="write to a file instead of stdout")

    b = sub.add_parser("bench", help="time a goal under several configurations")
    b.add_argument("--program", required=True)
    b.add_argument("--goal", required=True)
    b.add_argument("--configs", default="1t,2t,4t")
    b.add_argument("--repeats", type=_positive, default=3)
    b.add_argument("--mode", choices=["ground", "coinductive"], default="coinductive")
    b.add_argument("--solutions", type=_positive, default=None)
    b.add_argument("--max-steps", type=_positive, default=DEFAULT_MAX_STEPS)
    b.add_argument("--timeout", type=float, default=None, help="per-run limit in seconds")
    b.add_argument("--csv", default="bench.csv")
    b.add_argument("--plot", default=None, help="speedup figure path (default: next to the CSV)")
    return ap


def _cmd_run(a, out) -> int:
    prog = _read_program(a.program)
    goal = _goal(prog, a.goal)
    store = compile_program(prog)
    outdir = Path(a.out_dir)
    if a.emit_templates:
        outdir.mkdir(parents=True, exist_ok=True)
        text = templates_to_dot(store) if a.emit_templates == "dot" else templates_to_json(store)
        (outdir / f"templates.{a.emit_templates}").write_text(text)

    if a.mode == "ground":
        threads = a.expand_threads if a.expand_parallel else 1
        res = ground_solve(store, goal, a.threads, threads, a.budget)
        found = 0
        for i, (inst, tree, w) in enumerate(res):
            if a.emit_tree:
                outdir.mkdir(parents=True, exist_ok=True)
                _write_tree(outdir / f"ground-{i:04d}.{a.emit_tree}", tree.root, a.emit_tree)
            if w is not None:
                found += 1
                flag = " (truncated)" if tree.truncated else ""
                print(f"{inst}  |  nodes={tree.node_count} leaves={tree.leaf_count}{flag}", file=out)
                if a.solutions is not None and found >= a.solutions:
                    break
        print(f"% {found} ground answer(s)", file=out)
        return 0

    cfg = SearchConfig(
        worker_threads=a.threads, parallel_expansion=a.expand_parallel,
        expansion_threads=a.expand_threads, max_solutions=a.solutions,
        max_steps=a.max_steps, queue_discipline=a.queue, prune=not a.no_prune,
        budget=a.budget, occurs_check=not a.no_occurs_check,
    )
    if a.emit_tree:
        _dump_steps(store, goal, cfg, outdir, a.emit_tree)
    run = search(store, goal, cfg)
    n = 0
    for sol in run:
        print(sol, file=out)
        n += 1
    print(f"% {n} solution(s), {run.steps} step(s), status {run.status}", file=out)
    return 0


def _write_tree(path: Path, root, fmt: str, **extra):
    path.write_text(tree_to_dot(root, path.stem) if fmt == "dot" else tree_to_json(root, **extra))


def _dump_steps(store, goal, cfg: SearchConfig, outdir: Path, fmt: str, limit: int = 200):
    """Write the trees of the first ``limit`` derivation states, numbered in processing order."""
    outdir.mkdir(parents=True, exist_ok=True)
    sc = cfg.step_config()
    queue = [initial_state(store, goal, sc)]
    i = 0
    while queue and i < min(limit, cfg.max_steps or limit):
        st = queue.pop(0) if cfg.queue_discipline == "fifo" else queue.pop()
        _write_tree(outdir / f"step-{i:04d}.{fmt}", st.tree.root, fmt,
                    rank=st.rank, chain=[str(s) for s in st.chain])
        i += 1
        if st.open:
            queue.extend(derive_step(st, store, sc))


def _cmd_gen(a, out) -> int:
    if a.kind == "bta":
        p = generate_bta(a.n)
    elif a.kind == "uta":
        p = generate_uta(a.n)
    else:
        p = generate_datalog(a.seed, a.clauses, a.predicates, a.constants, a.max_body)
    text = str(p)
    if a.output:
        Path(a.output).write_text(text)
    else:
        out.write(text)
    return 0


def _cmd_bench(a, out) -> int:
    from .plotting import plot_speedup

    prog = _read_program(a.program)
    goal = _goal(prog, a.goal)
    base = SearchConfig(max_solutions=a.solutions, max_steps=a.max_steps, timeout=a.timeout)
    cfgs = [parse_config(c, base) for c in a.configs.split(",") if c.strip()]
    rows = run_bench(prog, goal, cfgs, a.repeats, a.mode, program_id=a.program)
    csv_path = Path(a.csv)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    write_csv(rows, csv_path)
    plot_path = Path(a.plot) if a.plot else csv_path.with_suffix(".png")
    plot_speedup(rows, plot_path, title=f"{Path(a.program).name}: {goal}")
    print(format_table(rows), file=out)
    print(f"% wrote {csv_path} and {plot_path}", file=out)
    return 0


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    a = build_parser().parse_args(argv)
    try:
        if a.cmd == "run":
            return _cmd_run(a, out)
        if a.cmd == "gen":
            return _cmd_gen(a, out)
        return _cmd_bench(a, out)
    except ParseError as e:
        for d in e.diagnostics:
            print(f"error: {d}", file=sys.stderr)
        return 2
    except (ModeError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
