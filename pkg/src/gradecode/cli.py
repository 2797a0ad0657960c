"""Command-line front end.

Exit codes: 0 success / pass, 1 verification failure, 2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import secrets
import sys
from pathlib import Path

import numpy as np

from . import coding, conditions, expander, io, sim
from .decoders import default_decoder_name, get_decoder
from .errors import GradeCodeError

SEED_ENV = "GRADECODE_SEED"


def resolve_seed(seed: int | None) -> int:
    if seed is None:
        env = os.environ.get(SEED_ENV)
        seed = int(env) if env else secrets.randbelow(2**31)
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _int_list(text: str) -> list[int]:
    out = []
    for chunk in text.split(","):
        if "-" in chunk.strip()[1:]:
            lo, hi = chunk.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(chunk))
    return out


def cmd_scheme_build(args) -> int:
    kind = args.kind
    summary: dict = {"kind": kind, "n": args.n}
    if kind in ("complex-mds", "real-bch"):
        if args.s is None:
            raise GradeCodeError(f"--kind {kind} needs --s")
        build = coding.build_complex_scheme if kind == "complex-mds" else coding.build_real_bch_scheme
        scheme = build(args.n, args.s)
        summary["s"] = args.s
    elif kind == "identity":
        scheme = expander.identity_scheme(args.n)
        summary["d"] = 1
    else:
        if args.d is None:
            raise GradeCodeError(f"--kind {kind} needs --d")
        seed = resolve_seed(args.seed)
        summary["seed"] = seed
        if kind == "expander":
            scheme = expander.build_expander_scheme(
                expander.random_regular_graph(args.n, args.d, seed=seed))
        else:
            scheme = expander.build_bipartite_scheme(
                expander.random_bipartite_regular_graph(args.n, args.d, seed=seed))
        summary["d"] = args.d
        summary["lambda"] = scheme.bound_lambda
        summary["lambda_below_d"] = scheme.bound_lambda < args.d
        if args.graph_out and kind == "expander":
            io.write_graph(scheme.graph, args.graph_out)
    summary["row_support"] = scheme.storage_overhead
    if args.out:
        io.save_scheme(scheme, args.out)
        summary["out"] = str(args.out)
    print(json.dumps(summary))
    return 0


def cmd_verify(args) -> int:
    scheme = io.load_scheme(args.scheme)
    seed = resolve_seed(args.seed)
    if scheme.kind in io.EXACT_KINDS:
        report = conditions.check_ec(scheme, get_decoder(args.decoder or "exact"),
                                     mode=args.mode, samples=args.samples, seed=seed)
    else:
        dec = get_decoder(args.decoder or default_decoder_name(scheme))
        if args.epsilon == "none":
            eps = lambda s: 0.0 if s == 0 else math.inf  # noqa: E731
        else:
            base = conditions.scheme_epsilon(scheme)
            eps = lambda s: args.epsilon_scale * base(s)  # noqa: E731
        s_values = _int_list(args.s) if args.s else None
        report = conditions.check_eps_ac(scheme, dec, eps, s=s_values,
                                         samples=args.samples, seed=seed)
    out = report.to_dict()
    out["seed"] = seed
    print(json.dumps(out, default=float))
    return 0 if report.passed else 1


def cmd_sweep(args) -> int:
    seed = resolve_seed(args.seed)
    d_values = _int_list(args.d)
    s_values = list(range(args.s_min, args.s_max + 1))
    rows = sim.l2_sweep(args.n, d_values, s_values, trials=args.trials,
                        decoders=args.decoders.split(","), seed=seed, draws=args.draws)
    if args.out:
        io.write_csv(rows, sim.SWEEP_FIELDS, args.out)
    else:
        import csv

        w = csv.DictWriter(sys.stdout, fieldnames=sim.SWEEP_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return 0


def _learning_rate(spec) -> sim.LearningRate:
    if isinstance(spec, (int, float)):
        return sim.LearningRate(constant=float(spec))
    if "constant" in spec:
        return sim.LearningRate(constant=float(spec["constant"]))
    return sim.LearningRate(c1=float(spec["c1"]), c2=float(spec["c2"]))


def cmd_train(args) -> int:
    cfg_path = Path(args.config)
    cfg = json.loads(cfg_path.read_text())
    base = cfg_path.parent
    scheme = io.load_scheme(base / cfg["scheme_path"])
    seed = resolve_seed(args.seed if args.seed is not None else cfg.get("seed"))
    if "data_path" in cfg:
        data = io.read_dataset(base / cfg["data_path"])
    else:
        dcfg = cfg.get("data", {})
        data = sim.synthetic_dataset(int(dcfg.get("m", 1000)), int(dcfg.get("p", 20)),
                                     seed=dcfg.get("seed", seed))
    pdata = sim.partition(data, scheme, seed=cfg.get("partition_seed", seed))
    st = cfg.get("straggler", {})
    model = sim.StragglerModel(kind=st.get("kind", "fixed-random"), s=st.get("s", 0),
                               seed=st.get("seed", seed))
    run = sim.run_gd(scheme, pdata, int(cfg.get("T", 100)),
                     _learning_rate(cfg.get("lr", {"c1": 1.0, "c2": 1.0})),
                     stragglers=model, decoder=cfg.get("decoder"),
                     pack=bool(cfg.get("pack", False)))
    out = args.out or cfg.get("out")
    if out:
        io.write_csv(run.metrics_rows(), io.METRIC_FIELDS, out)
    print(json.dumps({"final_loss": run.final_loss, "T": len(run.records),
                      "max_l2_dev": max((r.l2_dev for r in run.records), default=0.0),
                      "seed": seed, "out": str(out) if out else None}))
    return 0


def cmd_bound(args) -> int:
    if args.scheme:
        scheme = io.load_scheme(args.scheme)
        B = np.asarray(scheme.B)
    elif args.n is None or args.d is None:
        raise GradeCodeError("give --scheme or both --n and --d")
    elif args.d == 1:
        B = np.eye(args.n)
    else:
        seed = resolve_seed(args.seed)
        B = expander.build_expander_scheme(
            expander.random_regular_graph(args.n, args.d, seed=seed)).B
    d = int(np.count_nonzero(B, axis=1).max())
    K, Q = conditions.adversarial_straggler_set(B, args.s, d)
    res = conditions.min_norm_residual(B, K)
    lower = math.sqrt(args.s // d)
    ok = res >= lower - 1e-9
    print(json.dumps({"K": (K + 1).tolist(), "Q": (Q + 1).tolist(), "d": d, "s": args.s,
                      "residual": res, "lower_bound": lower,
                      "result": "pass" if ok else "fail"}))
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gradecode",
                                description="Gradient coding schemes: build, verify, simulate.")
    sub = p.add_subparsers(dest="command", required=True)

    sch = sub.add_parser("scheme", help="scheme construction")
    schsub = sch.add_subparsers(dest="scheme_command", required=True)
    b = schsub.add_parser("build", help="build a scheme and write it as JSON")
    b.add_argument("--kind", required=True,
                   choices=["complex-mds", "real-bch", "expander", "bipartite", "identity"])
    b.add_argument("--n", type=int, required=True, help="number of workers")
    b.add_argument("--s", type=int, help="straggler tolerance (exact kinds)")
    b.add_argument("--d", type=int, help="degree (graph kinds)")
    b.add_argument("--seed", type=int, help=f"graph seed (default ${SEED_ENV} or random)")
    b.add_argument("--out", help="output JSON path")
    b.add_argument("--graph-out", help="also write the graph as an adjacency list")
    b.set_defaults(func=cmd_scheme_build)

    v = sub.add_parser("verify", help="check the EC / eps-AC condition of a scheme file")
    v.add_argument("--scheme", required=True, help="scheme JSON path")
    v.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive",
                   help="exact schemes only; approximate schemes are always sampled")
    v.add_argument("--samples", type=int, default=200, help="sets per straggler count")
    v.add_argument("--epsilon", choices=["auto", "none"], default="auto",
                   help="auto: bound implied by the scheme; none: report residuals only")
    v.add_argument("--epsilon-scale", type=float, default=1.0,
                   help="multiply the auto bound by this factor")
    v.add_argument("--decoder", choices=["exact", "linear", "optimal", "ignore"])
    v.add_argument("--s", help="straggler counts to sample, e.g. '1-5' or '2,4'")
    v.add_argument("--seed", type=int, help="sampling seed")
    v.set_defaults(func=cmd_verify)

    sw = sub.add_parser("sweep", help="l2 recovery error over random regular graphs")
    sw.add_argument("--n", type=int, required=True)
    sw.add_argument("--d", required=True, help="degree or list, e.g. '3' or '3-10'")
    sw.add_argument("--s-min", type=int, default=0)
    sw.add_argument("--s-max", type=int, required=True)
    sw.add_argument("--trials", type=int, default=100, help="sets per graph")
    sw.add_argument("--draws", type=int, default=10, help="graphs per degree")
    sw.add_argument("--decoders", default="linear,optimal")
    sw.add_argument("--seed", type=int)
    sw.add_argument("--out", help="CSV path (default stdout)")
    sw.set_defaults(func=cmd_sweep)

    t = sub.add_parser("train", help="simulate coded gradient descent from a JSON config")
    t.add_argument("--config", required=True)
    t.add_argument("--out", help="metrics CSV path (overrides config)")
    t.add_argument("--seed", type=int)
    t.set_defaults(func=cmd_train)

    bd = sub.add_parser("bound", help="greedy adversarial stragglers vs sqrt(floor(s/d))")
    bd.add_argument("--scheme", help="scheme JSON path")
    bd.add_argument("--n", type=int)
    bd.add_argument("--d", type=int, help="1 means the identity scheme")
    bd.add_argument("--s", type=int, required=True)
    bd.add_argument("--seed", type=int)
    bd.set_defaults(func=cmd_bound)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GradeCodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
