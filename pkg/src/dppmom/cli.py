"""Command-line entry point: ``dppmom <subcommand> ...``.

Exit codes: 0 success, 1 input error, 2 numeric or capability error.
Failures print one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .bounds import (ComplexityQuery, divergence_exhaustive, estimation_bound_raw,
                     lower_bound_kernels, minimax_lower_bound_raw, recovery_bound_raw,
                     sample_bound_estimation, sample_bound_recovery)
from .cyclebasis import shortest_maximal_cycle_basis
from .errors import CapabilityError, InputError, NumericError
from .estimator import bhat_histogram, estimate
from .experiments import TrialConfig, default_jobs, parse_grid, run_grid
from .io import (load_graph, load_kernel_csv, load_samples, save_graph, save_kernel_csv,
                 save_samples, save_signs, write_json)
from .sampler import RngSeed, sample

log = logging.getLogger("dppmom")


def _sidecar(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def _provenance(args, **extra) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    return {"version": __version__, "command": args.command, "config": cfg, **extra}


def _check_output(path) -> None:
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise InputError(f"output directory does not exist: {parent}")


def cmd_sample(args) -> int:
    K = load_kernel_csv(args.kernel)
    _check_output(args.out)
    seed = RngSeed(args.seed, args.stream)
    print(f"seed={args.seed} stream={args.stream}", file=sys.stderr)
    samples = sample(K, args.n, seed, args.method)
    save_samples(samples, args.out)
    write_json(_provenance(args, N=K.N, n=samples.n), _sidecar(args.out))
    return 0


def _result_dict(res) -> dict:
    return {
        "N": res.khat.N,
        "khat": res.khat.matrix.tolist(),
        "edges": [[i + 1, j + 1] for i, j in res.ghat.edges],
        "signs": list(res.signs.signs),
        "sparsity_estimate": res.sparsity_estimate,
        "path": res.path,
        "sign_system_status": res.sign_system_status,
        "basis": [[v + 1 for v in c.vertices] for c in res.basis.cycles],
        "hhat": res.hhat,
        "warnings": res.warnings,
        "bhat_histogram": bhat_histogram(res.bhat),
    }


def cmd_estimate(args) -> int:
    samples = load_samples(args.samples, args.N)
    _check_output(args.out)
    res = estimate(samples, args.alpha, force_general=args.force_general)
    info = _result_dict(res)
    if args.format == "json":
        write_json({**_provenance(args), **info}, args.out)
    else:
        save_kernel_csv(res.khat, args.out)
        stem = Path(args.out).with_suffix("")
        save_graph(res.ghat, f"{stem}.graph.txt")
        save_signs(res.signs, f"{stem}.signs.txt")
        write_json({**_provenance(args), **info}, _sidecar(args.out))
    print(f"sparsity={res.sparsity_estimate} path={res.path} status={res.sign_system_status}")
    return 0


def cmd_cyclebasis(args) -> int:
    G = load_graph(args.graph)
    _check_output(args.out)
    basis = shortest_maximal_cycle_basis(G)
    cycles = [[v + 1 for v in c.vertices] for c in basis.cycles]
    if args.format == "json":
        write_json({"sparsity": basis.sparsity, "nu": basis.nu, "chorded": basis.chorded,
                    "cycles": cycles}, args.out)
    else:
        with open(args.out, "w") as fh:
            fh.write(f"# sparsity={basis.sparsity} nu={basis.nu}\n")
            for c in cycles:
                fh.write(" ".join(map(str, c)) + "\n")
    print(f"sparsity={basis.sparsity} nu={basis.nu}")
    return 0


def cmd_bounds(args) -> int:
    if args.mode == "divergence":
        if args.kernel1 and args.kernel2:
            k1, k2 = load_kernel_csv(args.kernel1), load_kernel_csv(args.kernel2)
        else:
            pair = lower_bound_kernels(args.ell, args.alpha)
            k1, k2 = pair.kplus, pair.kminus
        kl, hel = divergence_exhaustive(k1, k2)
        out = {"mode": "divergence", "kl": kl, "hellinger_sq": hel}
        if not (args.kernel1 and args.kernel2):
            out.update(kl_bound=4 * (6 * args.alpha) ** args.ell,
                       hellinger_sq_bound=(8 * args.alpha ** 2) ** args.ell)
        print(json.dumps(out, sort_keys=True))
        return 0
    q = ComplexityQuery(args.N, args.ell, args.alpha, args.eps, args.delta, args.C)
    if args.mode == "recovery":
        raw, n = recovery_bound_raw(q), sample_bound_recovery(q)
    elif args.mode == "estimation":
        raw, n = estimation_bound_raw(q), sample_bound_estimation(q)
    else:
        raw = minimax_lower_bound_raw(q)
        n = int(raw)
    if args.format == "json":
        print(json.dumps({"mode": args.mode, "n": n, "raw": raw, "query": vars(q)}, sort_keys=True))
    else:
        print(n)
    return 0


def cmd_experiment(args) -> int:
    _check_output(args.out)
    cfg = TrialConfig(family=args.family, N_grid=parse_grid(args.N), n_grid=parse_grid(args.n),
                      trials=args.trials, alpha=args.alpha, base_seed=args.seed,
                      method=args.method, force_general=args.force_general,
                      kernel_path=args.kernel, jobs=args.jobs or default_jobs())
    print(f"seed={args.seed}", file=sys.stderr)
    grid = run_grid(cfg)
    grid.to_csv(args.out, timing=not args.no_timing)
    write_json(_provenance(args, cells=len(grid.cells)), _sidecar(args.out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dppmom", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="draw samples from DPP(K)")
    s.add_argument("--kernel", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--stream", type=int, default=0)
    s.add_argument("--method", choices=["spectral", "bruteforce"], default="spectral")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)

    e = sub.add_parser("estimate", help="estimate a kernel from samples")
    e.add_argument("--samples", required=True)
    e.add_argument("--alpha", type=float, required=True)
    e.add_argument("--N", type=int, default=None, help="ground-set size (default: file header)")
    e.add_argument("--force-general", action="store_true")
    e.add_argument("--out", required=True)
    e.add_argument("--format", choices=["csv", "json"], default="csv")
    e.set_defaults(func=cmd_estimate)

    c = sub.add_parser("cyclebasis", help="shortest maximal cycle basis of a graph")
    c.add_argument("--graph", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--format", choices=["text", "json"], default="text")
    c.set_defaults(func=cmd_cyclebasis)

    b = sub.add_parser("bounds", help="sample-complexity calculators")
    b.add_argument("--mode", choices=["recovery", "estimation", "lower", "divergence"],
                   required=True)
    b.add_argument("--N", type=int, default=1)
    b.add_argument("--ell", type=int, default=3)
    b.add_argument("--alpha", type=float, default=0.125)
    b.add_argument("--eps", type=float, default=0.1)
    b.add_argument("--delta", type=float, default=0.1)
    b.add_argument("--C", type=float, default=1.0)
    b.add_argument("--kernel1")
    b.add_argument("--kernel2")
    b.add_argument("--format", choices=["text", "json"], default="text")
    b.set_defaults(func=cmd_bounds)

    x = sub.add_parser("experiment", help="Monte-Carlo recovery grid")
    x.add_argument("--family", choices=["cycle", "clique", "chordal-random", "file"],
                   required=True)
    x.add_argument("--N", default="4:12")
    x.add_argument("--n", default="1000:100000:log")
    x.add_argument("--trials", type=int, default=50)
    x.add_argument("--seed", type=int, default=0)
    x.add_argument("--alpha", type=float, default=None)
    x.add_argument("--method", choices=["spectral", "bruteforce", "exact"], default="spectral")
    x.add_argument("--kernel", default=None)
    x.add_argument("--force-general", action="store_true")
    x.add_argument("--jobs", type=int, default=None, help="worker processes (env DPPMOM_JOBS)")
    x.add_argument("--no-timing", action="store_true", help="omit the seconds column")
    x.add_argument("--out", required=True)
    x.set_defaults(func=cmd_experiment)
    return p


def _fail(kind: str, exc: Exception, code: int) -> int:
    print(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}),
          file=sys.stderr)
    return code


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, FileNotFoundError, ValueError) as exc:
        return _fail("input", exc, 1)
    except (NumericError, CapabilityError, ArithmeticError) as exc:
        return _fail("numeric", exc, 2)


def main() -> None:
    sys.exit(dispatch())
