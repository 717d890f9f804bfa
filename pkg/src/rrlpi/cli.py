"""Command-line interface.

Exit status is 0 on success, 1 on usage errors and 2 on runtime failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import Config, ConfigError, load_toml
from .errors import RRLPIError
from .estimators import METHODS, estimate, le_fiedler
from .graph import cosine_affinity
from .ioutils import read_matrix_csv, write_atomic, write_csv, write_json
from .partition import align_labels, get_partitioner

log = logging.getLogger("rrlpi")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _names(text):
    out = [v.strip().lower() for v in text.split(",") if v.strip()]
    bad = [v for v in out if v not in METHODS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown method(s) {bad}; choose from {METHODS}")
    return out


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, help="random seed (default 0)")
    g.add_argument("--config", help="TOML file with defaults for any option")
    g.add_argument("--out-dir", help="directory for output files (default .)")
    g.add_argument(
        "--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="logging verbosity"
    )
    return p


def _search(p):
    g = p.add_argument_group("penalty search")
    g.add_argument("--gamma-min", type=float)
    g.add_argument("--gamma-max", type=float)
    g.add_argument("--n-candidates", type=int)
    g.add_argument("--kappa-mode", choices=["zero", "median"])
    g.add_argument("--n-min", type=float, help="minimum set size (default n / k_max)")
    g.add_argument("--k-max", type=int)
    g.add_argument("--delta-scale", type=float)
    g.add_argument("--huber-c", type=float)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(
        prog="rrlpi",
        description="Robust Fiedler vector estimation, penalty selection and cluster enumeration.",
        parents=[common],
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        return sub.add_parser(name, help=help_, parents=[common], argument_default=argparse.SUPPRESS)

    p = add("synth", "write a synthetic three-cluster data set")
    p.add_argument("--n-per-cluster", type=int)
    p.add_argument("--n-out1", type=int, help="number of Type I outliers")
    p.add_argument("--theta-o1", type=float, help="Type I spread")
    p.add_argument("--n-out2", type=int, help="number of Type II outliers")
    p.add_argument("--theta-o2", type=float, help="Type II spread")

    p = add("embed", "estimate the Fiedler vector of a data set")
    p.add_argument("input", help="CSV with one sample per row")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--gamma", type=float)
    p.add_argument("--auto-gamma", action="store_true")
    p.add_argument("--labels", help="CSV whose first column holds reference labels")
    p.add_argument("--k", type=int, help="clusters for the partition in the figure")
    _search(p)

    p = add("select-gamma", "write penalty-candidate diagnostics")
    p.add_argument("input")
    p.add_argument("--method", choices=["rlpi", "rrlpi"])
    _search(p)

    p = add("enumerate", "estimate the number of clusters by modularity")
    p.add_argument("input")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--gamma", type=float)
    p.add_argument("--k-min", type=int)
    p.add_argument("--partitioner", choices=["kmeans", "kmedoids"])
    _search(p)

    p = add("segment", "segment an RGB image")
    p.add_argument("image", help="PNG or PPM file")
    p.add_argument("--ground-truth", help="label image, one colour per segment")
    p.add_argument("--k", type=int)
    p.add_argument("--noise-var", type=float)
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--gamma", type=float)
    p.add_argument("--target-n", type=int)
    p.add_argument("--partitioner", choices=["kmeans", "kmedoids"])
    p.add_argument("--match-radius", type=int)
    _search(p)

    p = add("bench", "Monte-Carlo accuracy sweep over the Type I spread")
    p.add_argument("--theta-o1-grid", type=_floats, help="comma-separated spreads")
    p.add_argument("--methods", type=_names, help="comma-separated methods")
    p.add_argument("--n-runs", type=int)
    p.add_argument("--n-per-cluster", type=int)
    p.add_argument("--n-out1", type=int)
    p.add_argument("--n-out2", type=int)
    p.add_argument("--partitioner", choices=["kmeans", "kmedoids"])
    _search(p)

    add("verify-theory", "compare numerical spectra with closed forms")
    return parser


def _resolve(ns: argparse.Namespace) -> Config:
    vals = vars(ns).copy()
    cfg = Config()
    path = vals.pop("config", None)
    if path:
        cfg.update(load_toml(path))
    for k in ("command", "input", "image", "labels", "ground_truth"):
        vals.pop(k, None)
    cfg.update(vals)
    return cfg


def _out(cfg: Config, name: str) -> Path:
    return Path(cfg.out_dir) / name


def _load_X(path):
    X, _ = read_matrix_csv(path)
    return X


def _embedding(cfg: Config, X, G):
    from .penalty import estimate_fiedler_rrlpi

    method = cfg.method.lower()
    if method in ("rlpi", "rrlpi") and (cfg.auto_gamma or cfg.gamma is None):
        emb, g_hat, diag = estimate_fiedler_rrlpi(X, G, cfg.gamma_search(), method=method)
        return emb, g_hat, diag
    y_F = le_fiedler(G).y
    emb = estimate(method, X, G, gamma=cfg.gamma, c=cfg.huber_c, y_F=y_F)
    return emb, cfg.gamma, None


def _diag_payload(cfg, n, g_hat, diag):
    from .penalty import delta_threshold

    gs = cfg.gamma_search()
    return {
        "gamma_hat": g_hat,
        "delta": delta_threshold(n, gs.delta_scale),
        "n_min": gs.resolve_n_min(n),
        "kappa_mode": gs.kappa_mode,
        "candidates": [d.to_dict() for d in diag],
    }


def cmd_synth(cfg: Config, ns) -> int:
    from .synth import SyntheticSpec, generate

    spec = SyntheticSpec.default(
        cfg.n_per_cluster,
        n_out1=cfg.n_out1,
        theta_o1=cfg.theta_o1,
        n_out2=cfg.n_out2,
        theta_o2=cfg.theta_o2,
        seed=cfg.seed,
    )
    X, lab, mask = generate(spec)
    m = X.shape[0]
    write_csv(_out(cfg, "data.csv"), [f"x{i + 1}" for i in range(m)], X.T.tolist())
    write_csv(_out(cfg, "labels.csv"), ["label", "outlier"], zip(lab, mask.astype(int)))
    print(f"wrote {X.shape[1]} samples with {m} features to {_out(cfg, 'data.csv')}")
    return EXIT_OK


def cmd_embed(cfg: Config, ns) -> int:
    from .plotting import embedding_svg

    X = _load_X(ns.input)
    G = cosine_affinity(X)
    emb, g_hat, diag = _embedding(cfg, X, G)
    write_csv(_out(cfg, "embedding.csv"), ["index", "y"], enumerate(emb.y))
    ref = None
    if getattr(ns, "labels", None):
        L, _ = read_matrix_csv(ns.labels)
        ref = L[0].astype(int)
        if ref.size != emb.y.size:
            raise UsageError("label file length differs from the number of samples")
    k = cfg.k if "k" in vars(ns) or ref is None else int(np.unique(ref[ref > 0]).size)
    part = get_partitioner(cfg.partitioner)(emb.y, k)
    summary = {"method": emb.kind, "gamma": g_hat, "n": int(emb.y.size), "k": k}
    if ref is not None:
        keep = ref > 0
        summary["p_acc"] = align_labels(part[keep], ref[keep])[1]
    if diag is not None:
        write_json(_out(cfg, "diagnostics.json"), _diag_payload(cfg, G.n, g_hat, diag))
    write_json(_out(cfg, "summary.json"), summary)
    write_atomic(_out(cfg, "embedding.svg"), embedding_svg(emb.y, part, title=emb.kind))
    print(f"{emb.kind}: n={emb.y.size} gamma={g_hat}")
    return EXIT_OK


def cmd_select_gamma(cfg: Config, ns) -> int:
    from .penalty import estimate_fiedler_rrlpi

    X = _load_X(ns.input)
    G = cosine_affinity(X)
    method = cfg.method if cfg.method in ("rlpi", "rrlpi") else "rrlpi"
    _, g_hat, diag = estimate_fiedler_rrlpi(X, G, cfg.gamma_search(), method=method)
    write_json(_out(cfg, "gamma_diagnostics.json"), _diag_payload(cfg, G.n, g_hat, diag))
    print(f"gamma_hat={g_hat!r}")
    return EXIT_OK


def cmd_enumerate(cfg: Config, ns) -> int:
    from .enumeration import enumerate_clusters
    from .plotting import modularity_svg

    X = _load_X(ns.input)
    G = cosine_affinity(X)
    emb, g_hat, _ = _embedding(cfg, X, G)
    res = enumerate_clusters(G, emb.y, cfg.k_min, min(cfg.k_max, G.n), cfg.partitioner)
    write_csv(_out(cfg, "enumeration.csv"), ["K", "Q"], ((int(k), q) for k, q in res.table))
    write_json(_out(cfg, "enumeration.json"), {"k_hat": res.k_hat, "method": emb.kind, "gamma": g_hat})
    write_atomic(_out(cfg, "enumeration.svg"), modularity_svg(res.table))
    print(f"K_hat={res.k_hat}")
    return EXIT_OK


def cmd_segment(cfg: Config, ns) -> int:
    from .image import corrupt, load_image, load_label_image, save_label_png, segment

    grid = load_image(ns.image)
    gt = load_label_image(ns.ground_truth) if getattr(ns, "ground_truth", None) else None
    if cfg.noise_var > 0:
        grid = corrupt(grid, cfg.noise_var, cfg.seed)
    res = segment(
        grid,
        cfg.k,
        method=cfg.method,
        ground_truth=gt,
        target_n=cfg.target_n,
        cfg=cfg.gamma_search(),
        gamma=cfg.gamma,
        partitioner=cfg.partitioner,
        match_radius=cfg.match_radius,
    )
    import io

    buf = io.BytesIO()
    save_label_png(res.labels, buf)
    write_atomic(_out(cfg, "labels.png"), buf.getvalue())
    rows = []
    flat = res.labels.ravel()
    pix = grid.reshape(-1, 3)
    for lab in np.unique(flat):
        sel = flat == lab
        rows.append([int(lab), int(sel.sum()), *pix[sel].mean(axis=0)])
    write_csv(_out(cfg, "labels.csv"), ["label", "n_pixels", "mean_r", "mean_g", "mean_b"], rows)
    payload = {"method": cfg.method, "k": cfg.k, "gamma": res.gamma, "noise_var": cfg.noise_var}
    payload.update(res.metrics)
    write_json(_out(cfg, "metrics.json"), payload)
    print(" ".join(f"{k}={v}" for k, v in sorted(payload.items())))
    return EXIT_OK


def cmd_bench(cfg: Config, ns) -> int:
    from .plotting import bench_svg
    from .synth import SyntheticSpec, monte_carlo

    spec = SyntheticSpec.default(cfg.n_per_cluster, n_out1=cfg.n_out1, n_out2=cfg.n_out2, seed=cfg.seed)
    rows = monte_carlo(
        spec,
        {"theta_o1": [float(t) for t in cfg.theta_o1_grid]},
        methods=cfg.methods,
        n_runs=cfg.n_runs,
        cfg=cfg.gamma_search(),
        partitioner=cfg.partitioner,
    )
    cols = ["theta_o1", "method", "mean", "std", "n_runs", "n_failed"]
    write_csv(_out(cfg, "bench.csv"), cols, ([r[c] for c in cols] for r in rows))
    write_json(_out(cfg, "bench.json"), {"rows": rows, "seed": cfg.seed, "n_per_cluster": cfg.n_per_cluster})
    write_atomic(_out(cfg, "bench.svg"), bench_svg(rows, "theta_o1"))
    for r in rows:
        print(f"theta_o1={r['theta_o1']:g} {r['method']:>5} mean={r['mean']:.4f} std={r['std']:.4f}")
    return EXIT_OK


def cmd_verify_theory(cfg: Config, ns) -> int:
    from .theory import run_all

    rows = run_all(seed=cfg.seed)
    write_csv(_out(cfg, "theory.csv"), ["check", "value", "tolerance", "passed"], rows)
    for name, val, tol, ok in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  value={val:.3e}  tol={tol:g}")
    return EXIT_OK if all(r[3] for r in rows) else EXIT_RUNTIME


COMMANDS = {
    "synth": cmd_synth,
    "embed": cmd_embed,
    "select-gamma": cmd_select_gamma,
    "enumerate": cmd_enumerate,
    "segment": cmd_segment,
    "bench": cmd_bench,
    "verify-theory": cmd_verify_theory,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _resolve(ns)
    except (ConfigError, OSError) as exc:
        print(f"rrlpi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=getattr(logging, cfg.log_level.upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[ns.command](cfg, ns)
    except UsageError as exc:
        print(f"rrlpi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RRLPIError, ValueError, OSError, KeyError) as exc:
        log.debug("failure", exc_info=True)
        print(f"rrlpi: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
