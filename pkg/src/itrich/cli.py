"""Command-line front end.

Every subcommand writes its results plus ``manifest.json`` (input hashes,
seeds, versions, arguments) into ``--out`` (default: ``$ITRICH_OUT`` or
``./itrich-out``).  Manifests carry no timestamps, so rerunning a command
with the same seeds reproduces the output directory byte for byte.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__, _kernels
from .decompose import SPARSE, Decomposition, ThresholdPolicy, run_itrich, write_decomposition_json
from .evaluation import (core_delta_table, label_entropy, neighbor_mean_delta, score,
                         write_assignment_csv)
from .generators import (NoiseSpec, PPMTreeSpec, ToySpec, augment_with_noise, generate_ppm_tree,
                         generate_toy)
from .graph import GraphError, k_shell_decomposition, load_attributes, load_edge_list, save_edge_list
from .nullmodel import DEFAULT_SWAPS_PER_EDGE, null_sample, replicate_seed, write_sample
from .richclub import write_rho_csv
from .sweep import parse_sweep_spec, run_sweep
from .weights import compute_weighted_graph, weight_summary, write_edge_csv, write_node_csv

log = logging.getLogger("itrich")

TOY_PRESETS = {"paper-4blocks": ToySpec.paper}


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json(obj, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _manifest(args, out: Path, inputs: dict[str, Path], seeds: dict) -> None:
    config = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()
              if k not in ("func", "out", "verbose")}
    _write_json({
        "command": args.command if not getattr(args, "kind", None) else f"{args.command} {args.kind}",
        "config": config,
        "inputs": {name: {"path": str(p), "sha256": _sha256(p)} for name, p in inputs.items()},
        "seeds": seeds,
        "versions": {"itrich": __version__, "python": platform.python_version(),
                     "numpy": np.__version__, "scipy": scipy.__version__},
        "backend": _kernels.BACKEND,
    }, out / "manifest.json")


def _load(args):
    return load_edge_list(args.input, args.format)


def cmd_delta(args, out: Path) -> None:
    wg = compute_weighted_graph(_load(args))
    write_node_csv(wg, out / "nodes.csv")
    write_edge_csv(wg, out / "edges.csv")
    if wg.base.m:
        s = weight_summary(wg)
        _write_json(s.__dict__, out / "summary.json")
    _manifest(args, out, {"input": args.input}, {})


def cmd_kcore(args, out: Path) -> None:
    g = _load(args)
    ks = k_shell_decomposition(g)
    with open(out / "kshell.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "label", "core_number"])
        for i in range(g.n):
            w.writerow([i, g.labels[i], int(ks.core_number[i])])
    _manifest(args, out, {"input": args.input}, {})


def cmd_nullmodel(args, out: Path) -> None:
    wg = compute_weighted_graph(_load(args))
    rows = []
    for k in range(args.null_replicates):
        seed = replicate_seed(args.seed, k)
        sample = null_sample(wg, seed, args.swaps_per_edge)
        if k in args.export:
            write_sample(sample, wg.base.labels, out / f"null_{k}.csv")
        st = sample.strengths()
        rows.append({"replicate": k, "seed": seed, "mean_delta": float(st.mean()),
                     "max_delta": float(st.max(initial=0.0))})
    _write_json({"samples": rows}, out / "nullmodel.json")
    _manifest(args, out, {"input": args.input}, {"master": args.seed})


def cmd_decompose(args, out: Path) -> None:
    g = _load(args)
    wg = compute_weighted_graph(g)
    policy = ThresholdPolicy.parse(args.threshold, args.er_replicates)
    dec = run_itrich(wg, policy, args.null_replicates, args.seed, args.tie_seed,
                     args.swaps_per_edge, keep_curves=True)
    ks = k_shell_decomposition(g)
    write_decomposition_json(dec, g.labels, out / "decomposition.json")
    write_assignment_csv(wg, dec, ks, out / "nodes.csv")
    core_delta_table(wg, ks, dec).write_csv(out / "core_delta.csv")
    if args.format == "csv" or args.curves:
        for k, curve in enumerate(dec.curves, 1):
            write_rho_csv(curve, out / f"rho_{k}.csv")
    inputs = {"input": args.input}
    if args.attributes:
        load_attributes(g, args.attributes)  # validate labels before recording the file
        inputs["attributes"] = args.attributes
    _manifest(args, out, inputs, {"master": args.seed, "tie": args.tie_seed})
    print(f"{len(dec.clubs)} clubs, sizes {[len(c.nodes) for c in dec.clubs]}, "
          f"sparse part {len(dec.sparse_part)}")


def _read_classes(g, path: Path) -> list[str]:
    g = load_attributes(g, path)
    attrs = g.node_attrs
    missing = [g.labels[i] for i in range(g.n) if i not in attrs]
    if missing:
        raise GraphError(f"{path}: no class for nodes {missing[:5]}")
    return [attrs[i] for i in range(g.n)]


def cmd_entropy(args, out: Path) -> None:
    g = _load(args)
    classes = _read_classes(g, args.attributes)
    wg = compute_weighted_graph(g)
    with open(out / "entropy.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "label", "class", "degree", "delta", "entropy", "neighbor_mean_delta"])
        for i in range(g.n):
            h = label_entropy(g, classes, i)
            nm = neighbor_mean_delta(wg, i)
            w.writerow([i, g.labels[i], classes[i], int(g.degrees[i]), repr(float(wg.delta[i])),
                        "" if h is None else repr(h), "" if nm is None else repr(nm)])
    _manifest(args, out, {"input": args.input, "attributes": args.attributes}, {})


def cmd_score(args, out: Path) -> None:
    g = _load(args)
    classes = _read_classes(g, args.truth)
    with open(args.decomposition, encoding="utf-8") as fh:
        doc = json.load(fh)
    sparse_labels = set(doc["sparse"])
    assignment = np.full(g.n, SPARSE, dtype=np.int64)
    for k, club in enumerate(doc["clubs"]):
        for label in club["nodes"]:
            assignment[g.index_of(label)] = k
    if any(g.labels[i] not in sparse_labels for i in np.flatnonzero(assignment == SPARSE)):
        raise GraphError(f"{args.decomposition}: does not cover every node of {args.input}")
    dec = Decomposition(g.n, (), frozenset(np.flatnonzero(assignment == SPARSE).tolist()),
                        assignment, {}, (), ThresholdPolicy())
    dense_names = {"d", "dense", "1", "true"}
    dense = [i for i in range(g.n) if classes[i].lower() in dense_names]
    sparse = [i for i in range(g.n) if classes[i].lower() not in dense_names]
    sc = score(dense, sparse, dec)
    _write_json(sc.__dict__, out / "score.json")
    _manifest(args, out, {"input": args.input, "truth": args.truth,
                          "decomposition": args.decomposition}, {})
    print(f"recall={sc.recall} specificity={sc.specificity}")


def _write_truth(labels, truth, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "class"])
        for label, t in zip(labels, truth):
            w.writerow([label, t])


def cmd_generate(args, out: Path) -> None:
    inputs = {}
    if args.kind == "toy":
        spec = TOY_PRESETS[args.preset](args.seed)
        g, truth = generate_toy(spec)
    elif args.kind == "ppm":
        spec = PPMTreeSpec(args.block_size, args.p, args.q, args.preset, args.seed)
        g, blocks = generate_ppm_tree(spec)
        truth = [f"block{int(b)}" for b in blocks]
    else:
        base = load_edge_list(args.input, args.format)
        inputs["input"] = args.input
        res = augment_with_noise(NoiseSpec(base, args.noise, args.r, args.seed))
        g, truth = res.graph, res.truth
        _write_json({"initial_gap": res.initial_gap, "final_gap": res.final_gap,
                     "target_gap": res.target_gap, "added_links": res.added_links},
                    out / "noise.json")
    save_edge_list(g, out / "edges.txt")
    _write_truth(g.labels, truth, out / "truth.csv")
    _manifest(args, out, inputs, {"master": args.seed})
    print(f"{g.n} nodes, {g.m} edges")


def cmd_sweep(args, out: Path) -> None:
    spec = parse_sweep_spec(args.spec)
    summary = run_sweep(spec, out, args.jobs)
    _manifest(args, out, {"spec": args.spec}, {"master": spec.seed})
    print(f"{len(summary)} aggregate rows")


def _common(p, seeds=False, nulls=False):
    p.add_argument("--out", type=Path, default=Path(os.environ.get("ITRICH_OUT", "itrich-out")),
                   help="output directory (default $ITRICH_OUT or ./itrich-out)")
    if seeds:
        p.add_argument("--seed", type=int, default=0, help="master seed")
    if nulls:
        p.add_argument("--null-replicates", type=int, default=50)
        p.add_argument("--swaps-per-edge", type=int, default=DEFAULT_SWAPS_PER_EDGE)


def _input(p):
    p.add_argument("--input", type=Path, required=True, help="edge list")
    p.add_argument("--format", choices=["whitespace", "csv"], default="whitespace",
                   help="edge-list delimiter")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="itrich", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("delta", help="edge weights and node strengths")
    _input(p), _common(p)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("kcore", help="k-shell decomposition")
    _input(p), _common(p)
    p.set_defaults(func=cmd_kcore)

    p = sub.add_parser("nullmodel", help="sample the null ensemble")
    _input(p), _common(p, seeds=True, nulls=True)
    p.add_argument("--export", type=int, nargs="*", default=[0],
                   help="replicate indices to write as edge CSV")
    p.set_defaults(func=cmd_nullmodel)

    p = sub.add_parser("decompose", help="iterative weighted rich-club decomposition")
    _input(p), _common(p, seeds=True, nulls=True)
    p.add_argument("--threshold", default="fixed:0.1", help="fixed:<f> | er | abs:<v>")
    p.add_argument("--er-replicates", type=int, default=10)
    p.add_argument("--tie-seed", type=int, default=0)
    p.add_argument("--attributes", type=Path, help="node,attribute CSV (recorded in manifest)")
    p.add_argument("--curves", action="store_true", help="also write rho_<k>.csv per round")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("entropy", help="neighbour class entropy per node")
    _input(p), _common(p)
    p.add_argument("--attributes", type=Path, required=True, help="node,class CSV")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("score", help="recall/specificity of a decomposition")
    _input(p), _common(p)
    p.add_argument("--truth", type=Path, required=True, help="node,class CSV with D/ND classes")
    p.add_argument("--decomposition", type=Path, required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("generate", help="synthetic graphs")
    gsub = p.add_subparsers(dest="kind", required=True)
    q = gsub.add_parser("toy")
    _common(q, seeds=True)
    q.add_argument("--preset", choices=sorted(TOY_PRESETS), default="paper-4blocks")
    q.set_defaults(func=cmd_generate)
    q = gsub.add_parser("ppm")
    _common(q, seeds=True)
    q.add_argument("--preset", default="rooted-depth3", help="block-tree preset")
    q.add_argument("--block-size", type=int, default=100)
    q.add_argument("--p", type=float, default=0.85)
    q.add_argument("--q", type=float, default=0.65)
    q.set_defaults(func=cmd_generate)
    q = gsub.add_parser("noise")
    _input(q), _common(q, seeds=True)
    q.add_argument("--noise", type=int, required=True, help="number of noise nodes")
    q.add_argument("--r", type=float, default=0.0, help="gap fraction to close")
    q.set_defaults(func=cmd_generate)

    p = sub.add_parser("sweep", help="noise sweep from a key = value spec file")
    _common(p)
    p.add_argument("--spec", type=Path, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = args.out
    try:
        out.mkdir(parents=True, exist_ok=True)
        args.func(args, out)
    except (GraphError, ValueError, OSError, KeyError) as exc:
        print(f"itrich {args.command}: {type(exc).__module__}.{type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
