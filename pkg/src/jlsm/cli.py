"""Command-line entry points.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

import argparse
import os
import sys

import numpy as np

from . import evaluate as ev
from . import model_select, simulate, storage
from .config import ConfigError, RunConfig, config_from_items, read_config, write_config
from .distributions import FactorizationError, ParameterDomainError, RngStream
from .fit import run_chain
from .model import Family
from .simulate import GroundTruth


class UsageError(ValueError):
    pass


def _load_config(args, family=None):
    cfg = read_config(args.config) if getattr(args, "config", None) else RunConfig(
        family=family or Family.GAUSSIAN
    )
    if family is not None and cfg.family is not family:
        cfg = config_from_items({**cfg.flat_items(), "family": family.value})
    if getattr(args, "seed", None) is not None:
        cfg = config_from_items({**cfg.flat_items(), "seed": args.seed})
    if getattr(args, "threads", None):
        cfg = config_from_items({**cfg.flat_items(), "pg_blocks": args.threads})
    return cfg


def _write_truth(truth, directory):
    os.makedirs(directory, exist_ok=True)
    p = lambda name: os.path.join(directory, name)
    storage._write_rows(p("alpha0.tsv"), [truth.alpha0])
    storage._write_rows(p("gamma0.tsv"), [truth.gamma0])
    storage._write_ragged(p("Z0.tsv"), [truth.Z0])
    storage._write_ragged(p("B0.tsv"), [truth.B0])
    with open(p("truth.txt"), "w") as fh:
        fh.write(f"k0={truth.Z0.shape[1]}\n")
        fh.write(f"density={truth.density}\n")


def _read_truth(directory):
    p = lambda name: os.path.join(directory, name)
    alpha0 = storage._read_rows(p("alpha0.tsv"))[0]
    gamma0 = storage._read_rows(p("gamma0.tsv"))[0]
    Z0 = storage._read_ragged(p("Z0.tsv"), alpha0.size)[0]
    B0 = storage._read_ragged(p("B0.tsv"), gamma0.size)[0]
    density = 0.0
    with open(p("truth.txt")) as fh:
        for line in fh:
            key, _, value = line.strip().partition("=")
            if key == "density":
                density = float(value)
    return GroundTruth(alpha0, gamma0, Z0, B0, density)


def _cmd_simulate(args):
    design = simulate.SimDesign(
        n=args.n, q=args.q, k0=args.k0, family=Family(args.family),
        alpha_range=(args.alpha_lo, args.alpha_hi), seed=args.seed or 0,
    )
    dataset, truth = simulate.generate_dataset(design, RngStream(design.seed, 0))
    os.makedirs(args.out, exist_ok=True)
    storage.write_dataset(
        dataset,
        os.path.join(args.out, "network.txt"),
        os.path.join(args.out, "attributes.tsv"),
    )
    _write_truth(truth, os.path.join(args.out, "truth"))
    print(f"wrote dataset (n={dataset.n}, q={dataset.q}, "
          f"density={truth.density:.3f}) to {args.out}")
    return 0


def _cmd_fit(args):
    family = Family(args.family)
    cfg = _load_config(args, family)
    dataset = storage.read_dataset(args.network, args.attributes, family)
    chain = run_chain(dataset, cfg)
    os.makedirs(args.out, exist_ok=True)
    storage.persist_chain(chain, os.path.join(args.out, "chain"))
    write_config(cfg, os.path.join(args.out, "run_config.txt"))
    khat = ev.posterior_mode_dimension(chain)
    with open(os.path.join(args.out, "summary.txt"), "w") as fh:
        fh.write(f"kept={len(chain)}\n")
        fh.write(f"khat={khat}\n")
        fh.write(f"mean_loglik={np.mean(chain.loglik)!r}\n")
    print(f"fit complete: kept={len(chain)} khat={khat}")
    return 0


def _cmd_evaluate(args):
    chain = storage.load_chain(args.chain)
    truth = _read_truth(args.truth)
    row = {
        "khat": ev.posterior_mode_dimension(chain),
        "k0": truth.Z0.shape[1],
        "delta_Z": ev.metric_delta_Z(chain, truth),
        "delta_B": ev.metric_delta_B(chain, truth),
        "delta_alpha": ev.metric_delta_alpha(chain, truth),
        "delta_gamma": ev.metric_delta_gamma(chain, truth),
    }
    storage.write_csv(args.out, [row])
    print(", ".join(f"{k}={v}" for k, v in row.items()))
    return 0


def _cmd_select(args):
    family = Family(args.family)
    cfg = _load_config(args, family)
    dataset = storage.read_dataset(args.network, args.attributes, family)
    candidates = [int(x) for x in args.candidates.split(",")]
    if args.method == "cv":
        result = model_select.kfold_cv(
            dataset, candidates, args.folds, cfg, RngStream(cfg.seed, 0)
        )
        rows = [
            {"k": int(k), "mean_heldout_loglik": m, "se": s}
            for k, m, s in zip(result.candidates, result.mean_loglik, result.se_loglik)
        ]
        storage.write_csv(args.out, rows)
        print(f"cv selection: k={result.selected} (1-SE: k={result.selected_1se})")
    else:
        rows = model_select.criteria_table(dataset, candidates, cfg)
        storage.write_csv(args.out, rows)
        for crit in ("aic", "bic", "dic", "waic"):
            best = min(rows, key=lambda r: r[crit])
            print(f"{crit} selection: k={best['k']}")
    return 0


_CELLS = {
    "n50q20": (50, 20), "n100q20": (100, 20), "n150q20": (150, 20),
    "n100q10": (100, 10), "n100q30": (100, 30),
}


def _replicate_cell(n, q, family, reps, cfg, base_seed, alpha_range=(-0.5, 0.5)):
    """Fit `reps` simulated datasets; return per-rep metric dicts."""
    rows = []
    for r in range(reps):
        seed = base_seed + r
        design = simulate.SimDesign(
            n=n, q=q, k0=3, family=family, alpha_range=alpha_range, seed=seed
        )
        dataset, truth = simulate.generate_dataset(design, RngStream(seed, 0))
        cfg_r = config_from_items({**cfg.flat_items(), "seed": seed})
        chain = run_chain(dataset, cfg_r)
        rows.append({
            "rep": r,
            "khat": ev.posterior_mode_dimension(chain),
            "delta_Z": ev.metric_delta_Z(chain, truth),
            "delta_B": ev.metric_delta_B(chain, truth),
            "delta_alpha": ev.metric_delta_alpha(chain, truth),
            "delta_gamma": ev.metric_delta_gamma(chain, truth),
            "density": truth.density,
        })
    return rows


def _summary_row(label, family, rows):
    khats = [r["khat"] for r in rows]
    acc, mab = ev.dimension_accuracy(khats, 3)
    out = {"cell": label, "family": family.value, "acc": acc, "mab": mab}
    for m in ("delta_Z", "delta_B", "delta_alpha", "delta_gamma"):
        vals = np.array([r[m] for r in rows])
        out[f"{m}_mean"] = float(vals.mean())
        out[f"{m}_sd"] = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
    return out


def _cmd_replicate_study1(args):
    family = Family(args.family)
    cfg = _load_config(args, family)
    n, q = _CELLS[args.cell]
    rows = _replicate_cell(n, q, family, args.reps, cfg, cfg.seed)
    os.makedirs(args.out, exist_ok=True)
    storage.write_csv(os.path.join(args.out, "replications.csv"), rows)
    summary = _summary_row(args.cell, family, rows)
    storage.write_csv(os.path.join(args.out, "summary.csv"), [summary])
    print(f"{args.cell} {family.value}: acc={summary['acc']:.3f} "
          f"mab={summary['mab']:.3f} delta_Z={summary['delta_Z_mean']:.3f}")
    return 0


# network-density sweep: alpha ~ U(c - 0.125, c + 0.125) at decreasing offsets
_STUDY2_CENTERS = (-1.75, -1.5, -1.0, -0.5, -0.25)


def _cmd_replicate_study2(args):
    family = Family(args.family)
    cfg = _load_config(args, family)
    out_rows = []
    centers = [_STUDY2_CENTERS[i] for i in args.points] if args.points else _STUDY2_CENTERS
    for c in centers:
        alpha_range = (c - 0.125, c + 0.125)
        for variant, q in (("joint", 20), ("network-only", 0)):
            rows = _replicate_cell(
                100, q, family, args.reps, cfg, cfg.seed, alpha_range=alpha_range
            )
            khats = [r["khat"] for r in rows]
            acc, mab = ev.dimension_accuracy(khats, 3)
            out_rows.append({
                "alpha_center": c,
                "density": float(np.mean([r["density"] for r in rows])),
                "model": variant,
                "acc": acc,
                "mab": mab,
                "delta_Z_mean": float(np.mean([r["delta_Z"] for r in rows])),
            })
    os.makedirs(args.out, exist_ok=True)
    storage.write_csv(os.path.join(args.out, "density_sweep.csv"), out_rows)
    for r in out_rows:
        print(f"center={r['alpha_center']} density={r['density']:.3f} "
              f"{r['model']}: acc={r['acc']:.2f} delta_Z={r['delta_Z_mean']:.3f}")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="jlsm",
        description="Joint latent space models with automatic dimension selection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key=value run configuration file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", required=True)
        p.add_argument("--threads", type=int, default=None,
                       help="independent blocks for the augmentation draws")

    p = sub.add_parser("simulate", help="generate a synthetic dataset")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k0", type=int, default=3)
    p.add_argument("--family", default="gaussian", choices=["gaussian", "bernoulli"])
    p.add_argument("--alpha-lo", type=float, default=-0.5)
    p.add_argument("--alpha-hi", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", help="run the Gibbs sampler on a dataset")
    p.add_argument("--network", required=True)
    p.add_argument("--attributes", required=True)
    p.add_argument("--family", default="gaussian", choices=["gaussian", "bernoulli"])
    add_common(p)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("evaluate", help="compare a chain against ground truth")
    p.add_argument("--chain", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("select", help="baseline dimension-selection criteria")
    p.add_argument("--network", required=True)
    p.add_argument("--attributes", required=True)
    p.add_argument("--family", default="gaussian", choices=["gaussian", "bernoulli"])
    p.add_argument("--candidates", required=True, help="comma-separated k values")
    p.add_argument("--method", default="criteria", choices=["criteria", "cv"])
    p.add_argument("--folds", type=int, default=5)
    add_common(p)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("replicate-study1", help="parameter-recovery replication cell")
    p.add_argument("--cell", required=True, choices=sorted(_CELLS))
    p.add_argument("--family", default="gaussian", choices=["gaussian", "bernoulli"])
    p.add_argument("--reps", type=int, default=10)
    add_common(p)
    p.set_defaults(func=_cmd_replicate_study1)

    p = sub.add_parser("replicate-study2", help="network-density sensitivity sweep")
    p.add_argument("--family", default="gaussian", choices=["gaussian", "bernoulli"])
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--points", type=int, nargs="*", default=None,
                   help="indices into the density sweep (0=sparsest)")
    add_common(p)
    p.set_defaults(func=_cmd_replicate_study2)

    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    except (FactorizationError, ParameterDomainError, FloatingPointError) as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return 4
    except (storage.DataFormatError, OSError, ValueError) as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
