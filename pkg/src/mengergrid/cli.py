"""Command line interface: ``mengergrid {sponge,peano,train,metrics,embed,demo}``.

Exit codes: 0 success, 2 usage, 3 validation, 4 capacity, 5 I/O.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import formats
from .embed import embed_grid, embedding_to_geometry, validate_embedding
from .errors import CapacityError, DomainError, ValidationError
from .grid import (
    init_weights,
    make_chain,
    make_lattice2d,
    make_lattice3d,
    make_ring,
    peano_polyline,
)
from .metrics import quantization_error, run_folding_demo, topographic_error, topology_metrics
from .sponge import skeleton
from .training import TrainingSchedule, som_train

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_CAPACITY, EXIT_IO = 0, 2, 3, 4, 5

# Keys a --config file may set, per subcommand. Flags given on the command
# line take precedence over the file.
CONFIG_KEYS = {
    "sponge": {"level", "cubes"},
    "peano": {"order"},
    "train": {"t_max", "eta0", "etaF", "sigma0", "sigmaF", "epochs", "seed"},
    "metrics": set(),
    "embed": {"k_start", "k_max", "seed", "restarts"},
    "demo": {"seed", "k_max"},
}

DEFAULTS = {
    "level": 2, "cubes": False, "order": 3,
    "t_max": 10_000, "eta0": 0.5, "etaF": 0.01, "sigma0": None, "sigmaF": 0.5,
    "epochs": 10, "seed": 0,
    "k_start": 1, "k_max": 4, "restarts": 8,
}


def _resolve(args, command):
    """Merge defaults, config file and flags; unknown config keys are errors."""
    conf = {}
    if args.config is not None:
        try:
            conf = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{args.config}:{exc.lineno}: invalid JSON: {exc.msg}") from None
        if not isinstance(conf, dict):
            raise ValidationError(f"{args.config}: config must be a JSON object")
        unknown = sorted(set(conf) - CONFIG_KEYS[command])
        if unknown:
            raise ValidationError(f"{args.config}: unknown keys for '{command}': {unknown}")
    for key in CONFIG_KEYS[command]:
        if getattr(args, key, None) is None:
            setattr(args, key, conf.get(key, DEFAULTS[key]))
    return args


def _base(out) -> Path:
    p = Path(out)
    return p.with_suffix("") if p.suffix else p


def _sibling(out, suffix) -> Path:
    b = _base(out)
    return b.with_name(b.name + suffix)


def parse_grid_spec(spec: str):
    """``chain:M``, ``ring:M``, ``lattice2d:WxH``, ``lattice3d:WxHxD``, ``edges:FILE``, ``json:FILE``."""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "chain":
            return make_chain(int(arg))
        if kind == "ring":
            return make_ring(int(arg))
        if kind == "lattice2d":
            w, h = (int(v) for v in arg.split("x"))
            return make_lattice2d(w, h)
        if kind == "lattice3d":
            w, h, d = (int(v) for v in arg.split("x"))
            return make_lattice3d(w, h, d)
    except ValueError as exc:
        if isinstance(exc, (DomainError, ValidationError)):
            raise
        raise ValidationError(f"bad grid spec {spec!r}") from None
    if kind == "edges":
        return formats.parse_edge_list(Path(arg).read_text(), arg)
    if kind == "json":
        return formats.load_grid(arg)
    raise ValidationError(
        f"bad grid spec {spec!r}; use chain:M, ring:M, lattice2d:WxH, lattice3d:WxHxD, edges:FILE or json:FILE"
    )


def _schedule(args, g) -> TrainingSchedule:
    sigma0 = args.sigma0
    if sigma0 is None:
        sigma0 = max(1.0, float(g.hop_matrix.max()) / 2, args.sigmaF)
    return TrainingSchedule(args.t_max, args.eta0, args.etaF, sigma0, args.sigmaF)


def _metrics_text(g, data):
    if g.n_nodes >= 2:
        m = topology_metrics(g, data)
        return formats.metrics_to_json(m.quantization_error, m.topographic_error, m.n_samples)
    return formats.metrics_to_json(quantization_error(g, data), None, len(data))


def _embed_files(g, base: Path, k_start, k_max, seed, restarts):
    e = embed_grid(g, k_start, k_max, seed, restarts)
    problems = validate_embedding(g, e)
    if problems:
        raise ValidationError("embedding failed validation: " + "; ".join(problems))
    geom = embedding_to_geometry(e)

    def name(suffix):
        return base.with_name(base.name + suffix)

    return {
        name(".json"): formats.embedding_to_json(e),
        name(".obj"): formats.geometry_obj(geom, e.level),
        name(".ply"): formats.points_ply(geom.node_points[v] for v in sorted(geom.node_points)),
    }


def cmd_sponge(args):
    sk = skeleton(args.level)
    return {
        _sibling(args.out, ".json"): formats.skeleton_to_json(sk),
        _sibling(args.out, ".obj"): formats.sponge_obj(sk, cubes=bool(args.cubes)),
    }


def cmd_peano(args):
    pts = peano_polyline(args.order)
    return {
        _sibling(args.out, ".csv"): formats.format_csv(pts.tolist()),
        _sibling(args.out, ".obj"): formats.polyline_obj(
            pts.tolist(), [list(range(len(pts)))], f"# Peano curve of order {args.order}\n"),
    }


def cmd_train(args):
    g = parse_grid_spec(args.grid)
    data = formats.read_dataset_csv(args.data)
    g = init_weights(g, data, args.seed)
    rep = som_train(g, data, _schedule(args, g), args.seed, args.epochs)
    return {
        Path(args.out): formats.grid_to_json(rep.grid),
        _sibling(args.out, ".metrics.json"): _metrics_text(rep.grid, data),
        _sibling(args.out, ".trace.csv"): formats.format_csv(
            [(e + 1, q) for e, q in enumerate(rep.qe_trace)]),
    }


def cmd_metrics(args):
    g = formats.load_grid(args.model)
    if g.weights is None:
        raise ValidationError(f"{args.model}: model has no weights")
    data = formats.read_dataset_csv(args.data)
    text = _metrics_text(g, data)
    if args.out is None:
        sys.stdout.write(text)
        return {}
    return {Path(args.out): text}


def cmd_embed(args):
    g = formats.load_grid(args.model)
    return _embed_files(g, _base(args.out), args.k_start, args.k_max, args.seed, args.restarts)


def cmd_demo(args):
    out = Path(args.out)
    runs = run_folding_demo(args.seed)
    files, te = {}, {}
    for name, (rep, data) in runs.items():
        te[name] = topographic_error(rep.grid, data)
        files[out / f"{name}.model.json"] = formats.grid_to_json(rep.grid)
        files[out / f"{name}.metrics.json"] = _metrics_text(rep.grid, data)
        files[out / f"{name}.trace.csv"] = formats.format_csv(
            [(e + 1, q) for e, q in enumerate(rep.qe_trace)])
        files.update(_embed_files(rep.grid, out / f"{name}.embedding", 1, args.k_max,
                                  args.seed, DEFAULTS["restarts"]))
    files[out / "summary.json"] = json.dumps(
        {"te_chain": te["chain"], "te_lattice": te["lattice"], "seed": args.seed}) + "\n"
    return files


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mengergrid", description="Menger sponge grids, Kohonen maps and universal embeddings.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_required=True, out_help="output path"):
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", required=out_required, help=out_help)
        sp.add_argument("--config", help="JSON file with defaults for this subcommand's options")

    sp = sub.add_parser("sponge", help="write the level-k sponge skeleton (JSON + OBJ)")
    sp.add_argument("--level", "-k", type=int)
    sp.add_argument("--cubes", action="store_true", default=None, help="export cells as cubes")
    common(sp, out_help="base path; .json and .obj are appended")
    sp.set_defaults(func=cmd_sponge)

    sp = sub.add_parser("peano", help="write the order-p Peano polyline (CSV + OBJ)")
    sp.add_argument("--order", "-p", type=int)
    common(sp, out_help="base path; .csv and .obj are appended")
    sp.set_defaults(func=cmd_peano)

    sp = sub.add_parser("train", help="train a Kohonen map on a CSV dataset")
    sp.add_argument("--grid", required=True, help="chain:M | ring:M | lattice2d:WxH | lattice3d:WxHxD | edges:FILE | json:FILE")
    sp.add_argument("--data", required=True, help="headerless CSV, one sample per row")
    sp.add_argument("--t-max", dest="t_max", type=int)
    sp.add_argument("--eta0", type=float)
    sp.add_argument("--etaF", type=float)
    sp.add_argument("--sigma0", type=float, help="default: half the grid diameter")
    sp.add_argument("--sigmaF", type=float)
    sp.add_argument("--epochs", type=int)
    common(sp, out_help="model JSON; .metrics.json and .trace.csv siblings are written too")
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("metrics", help="quantisation and topographic error of a model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--data", required=True)
    common(sp, out_required=False, out_help="metrics JSON (default: stdout)")
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("embed", help="embed a model's grid into the universal curve")
    sp.add_argument("--model", required=True)
    sp.add_argument("--k-start", dest="k_start", type=int)
    sp.add_argument("--k-max", dest="k_max", type=int)
    sp.add_argument("--restarts", type=int)
    common(sp, out_help="base path; .json, .obj and .ply are appended")
    sp.set_defaults(func=cmd_embed)

    sp = sub.add_parser("demo", help="chain vs. lattice folding experiment, end to end")
    sp.add_argument("--k-max", dest="k_max", type=int)
    common(sp, out_help="output directory")
    sp.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _resolve(args, args.command)
        files = args.func(args)
        formats.write_files(files)
    except CapacityError as exc:
        print(f"mengergrid: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ValidationError, DomainError) as exc:
        print(f"mengergrid: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"mengergrid: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
