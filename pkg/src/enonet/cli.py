"""Command-line front end wiring the library into reproducible experiments.

Every command writes its artifacts plus a ``run_manifest.json`` into the
output directory; reruns with the same flags and seed produce byte-identical
CSV files (floats are printed with 17 significant digits).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, claw
from .eno_core import (
    GhostPolicy,
    eno_interp_shift_batch,
    eno_rec_shift_batch,
    predict_fine_level,
    scale_input,
)
from .eno_sr import enosr_predict, sr_indicators
from .functions import get_function_1d, get_function_2d
from .multires import (
    ThresholdSchedule,
    compress_image,
    compression_rate,
    decode,
    decode2d,
    encode,
    encode2d,
    error_norms,
    read_pgm,
    write_container,
    write_pgm,
)
from .relunet import (
    build_eno3_explicit,
    build_eno4_explicit,
    build_eno_interp_net,
    build_eno_rec_net,
    build_enosr_class_net,
    build_enosr_regression_net,
    enosr_regression_reference,
    trained_deleno,
)

RNG_NAME = "numpy PCG64 (np.random.default_rng)"


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_manifest(out_dir: Path, command: str, flags: dict, seed: int, outputs):
    manifest = {
        "command": command,
        "flags": {k: (v.value if isinstance(v, GhostPolicy) else v) for k, v in sorted(flags.items())},
        "seed": seed,
        "rng": RNG_NAME,
        "package": f"enonet {__version__}",
        "outputs": [str(p) for p in outputs],
    }
    path = out_dir / "run_manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _net_shift_fn(method: str, p: int):
    """Stencil-shift callback for the network-driven interpolation modes."""
    if method == "net":
        net = build_eno3_explicit() if p == 3 else build_eno4_explicit() if p == 4 else build_eno_interp_net(p)
        return lambda windows: net.classify(windows)
    if method == "trained":
        if p not in (3, 4):
            raise SystemExit("trained networks exist for p in {3, 4} only")
        net = trained_deleno(p)
        return lambda windows: net.classify(scale_input(windows))
    return None


def _predict_series(samples_by_level, p, method, ghost):
    """Per-level fine predictions for one of the interpolation methods."""
    preds = []
    for coarse in samples_by_level[:-1]:
        if method == "enosr":
            preds.append(enosr_predict(coarse))
        else:
            preds.append(predict_fine_level(coarse, p, ghost, shift_fn=_net_shift_fn(method, p)))
    return preds


def _predict_once(coarse, args, ghost):
    if args.method == "enosr":
        return enosr_predict(coarse)
    return predict_fine_level(coarse, args.p, ghost, shift_fn=_net_shift_fn(args.method, args.p))


def cmd_interpolate(args, out_dir: Path) -> list:
    ghost = GhostPolicy(args.ghost)
    outputs = []
    rows = []
    if args.input:
        current = np.loadtxt(args.input, delimiter=",", ndmin=2)[:, -1].astype(float)
        for k in range(args.levels):
            current = _predict_once(current, args, ghost)
            path = out_dir / f"prediction_level{k + 1}.csv"
            write_csv(path, ["predicted"], ((v,) for v in current))
            outputs.append(path)
    else:
        fn, domain = get_function_1d(args.function)
        for k in range(args.levels):
            n = args.n0 * 2 ** k
            coarse = fn(np.linspace(domain[0], domain[1], n + 1))
            exact = fn(np.linspace(domain[0], domain[1], 2 * n + 1))
            pred = _predict_once(coarse, args, ghost)
            x = np.linspace(domain[0], domain[1], exact.size)
            path = out_dir / f"prediction_level{k + 1}.csv"
            write_csv(path, ["x", "predicted", "exact"], zip(x, pred, exact))
            outputs.append(path)
            h = (domain[1] - domain[0]) / (2 * n)
            norms = error_norms(exact, pred, h=h)
            rows.append((k + 1, 2 * n, h, norms.l1, norms.l2, norms.linf))
    if rows:
        err_path = out_dir / "errors.csv"
        write_csv(err_path, ["level", "n_fine", "h", "l1", "l2", "linf"], rows)
        outputs.append(err_path)
    return outputs


def order_study_errors(function: str, method: str, p: int, levels: int, n0: int = 16,
                       ghost=GhostPolicy.CONSTANT_EXTRAPOLATE):
    """(h, L1, Linf) per refinement for the prediction error on a named function."""
    fn, domain = get_function_1d(function)
    results = []
    for k in range(levels):
        n = n0 * 2 ** k
        coarse = fn(np.linspace(domain[0], domain[1], n + 1))
        exact = fn(np.linspace(domain[0], domain[1], 2 * n + 1))
        if method == "enosr":
            pred = enosr_predict(coarse)
        else:
            pred = predict_fine_level(coarse, p, ghost, shift_fn=_net_shift_fn(method, p))
        h = (domain[1] - domain[0]) / (2 * n)
        norms = error_norms(exact, pred, h=h)
        results.append((n, h, norms.l1, norms.linf))
    return results


def cmd_order_study(args, out_dir: Path) -> list:
    results = order_study_errors(args.function, args.method, args.p, args.levels, args.n0,
                                 GhostPolicy(args.ghost))
    rows = []
    for i, (n, h, l1, linf) in enumerate(results):
        slope = np.log2(results[i - 1][3] / linf) if i > 0 and linf > 0 else float("nan")
        slope_l1 = np.log2(results[i - 1][2] / l1) if i > 0 and l1 > 0 else float("nan")
        rows.append((n, h, l1, linf, slope_l1, slope))
    path = out_dir / "order_study.csv"
    write_csv(path, ["n", "h", "l1", "linf", "slope_l1", "slope_linf"], rows)
    return [path]


def cmd_compress(args, out_dir: Path) -> list:
    ghost = GhostPolicy(args.ghost)
    outputs = []
    if args.mode == "1d":
        schedule = ThresholdSchedule(args.eps, args.t, args.K)
        fn, domain = get_function_1d(args.function)
        n_fine = args.n0 * 2 ** args.K
        x = np.linspace(domain[0], domain[1], n_fine + 1)
        fine = fn(x)
        rep = encode(fine, args.p, schedule, ghost)
        decoded = decode(rep, args.p, ghost)
        h = (domain[1] - domain[0]) / n_fine
        norms = error_norms(fine, decoded, h=h)
        container = out_dir / "compressed.enomr"
        write_container(container, rep, args.p, schedule, ghost)
        decoded_path = out_dir / "decoded.csv"
        write_csv(decoded_path, ["x", "decoded", "exact"], zip(x, decoded, fine))
        metrics = out_dir / "metrics.csv"
        write_csv(metrics,
                  ["p", "eps", "t", "K", "n0", "l1", "l2", "linf",
                   "rel_l1", "rel_l2", "rel_linf", "compression_rate"],
                  [(args.p, args.eps, args.t, args.K, args.n0, norms.l1, norms.l2,
                    norms.linf, norms.rel_l1, norms.rel_l2, norms.rel_linf,
                    compression_rate(rep))])
        outputs += [container, decoded_path, metrics]
    elif args.mode == "2d":
        schedule = ThresholdSchedule(args.eps, args.t, args.K)
        fn, dom_x, dom_y = get_function_2d(args.function)
        nx = args.nx0 * 2 ** args.K
        ny = args.ny0 * 2 ** args.K
        gx = np.linspace(dom_x[0], dom_x[1], nx + 1)
        gy = np.linspace(dom_y[0], dom_y[1], ny + 1)
        fine = fn(gx[:, None], gy[None, :])
        rep = encode2d(fine, args.p, schedule, ghost)
        decoded = decode2d(rep, args.p, ghost)
        hx = (dom_x[1] - dom_x[0]) / nx
        hy = (dom_y[1] - dom_y[0]) / ny
        norms = error_norms(fine, decoded, h=hx * hy)
        container = out_dir / "compressed.enomr"
        write_container(container, rep, args.p, schedule, ghost)
        metrics = out_dir / "metrics.csv"
        write_csv(metrics,
                  ["p", "eps", "t", "K", "nx0", "ny0", "l1", "l2", "linf",
                   "rel_l1", "rel_l2", "rel_linf", "compression_rate"],
                  [(args.p, args.eps, args.t, args.K, args.nx0, args.ny0, norms.l1,
                    norms.l2, norms.linf, norms.rel_l1, norms.rel_l2, norms.rel_linf,
                    compression_rate(rep))])
        outputs += [container, metrics]
    else:  # image
        schedule = ThresholdSchedule(args.eps, args.t, args.K)
        image = read_pgm(args.infile).astype(float)
        rep, decoded, metrics_dict = compress_image(image, args.p, schedule, ghost)
        out_image = Path(args.outfile) if args.outfile else out_dir / "decoded.pgm"
        write_pgm(out_image, decoded[: image.shape[0], : image.shape[1]])
        container = out_dir / "compressed.enomr"
        write_container(container, rep, args.p, schedule, ghost)
        metrics = out_dir / "metrics.csv"
        write_csv(metrics,
                  ["p", "eps", "t", "K", "rel_l1", "rel_l2", "rel_linf", "compression_rate"],
                  [(args.p, args.eps, args.t, args.K, metrics_dict["rel_l1"],
                    metrics_dict["rel_l2"], metrics_dict["rel_linf"],
                    metrics_dict["compression_rate"])])
        outputs += [out_image, container, metrics]
    return outputs


def cmd_solve(args, out_dir: Path) -> list:
    try:
        result = claw.solve_euler(args.problem, args.n, args.p, args.cfl, args.tf)
    except claw.StateInvalidError as exc:
        snap_path = out_dir / "diagnostic_snapshot.csv"
        if exc.snapshot is not None:
            write_csv(snap_path, ["rho", "mom", "energy"], zip(*exc.snapshot))
        raise SystemExit(f"positivity failure: {exc}; snapshot at {snap_path}")
    rho, v, p = claw.primitives_of(result)
    snapshot = out_dir / "snapshot.csv"
    write_csv(snapshot, ["x", "rho", "v", "p"], zip(result.x, rho, v, p))
    meta = {
        "N": args.n,
        "cfl": args.cfl,
        "p": args.p,
        "t_final": result.t,
        "steps": result.n_steps,
        "problem": args.problem,
        "splitting": "global_lax_friedrichs",
        "boundary": result.config.boundary,
    }
    outputs = [snapshot]
    if args.reference:
        ref = claw.solve_euler(args.problem, 10 * args.n, 4, args.cfl, args.tf)
        ref_rho, ref_v, ref_p = claw.primitives_of(ref)
        h = result.config.h
        dist = {
            "l1_rho": float(h * np.abs(rho - np.interp(result.x, ref.x, ref_rho)).sum()),
            "l1_v": float(h * np.abs(v - np.interp(result.x, ref.x, ref_v)).sum()),
            "l1_p": float(h * np.abs(p - np.interp(result.x, ref.x, ref_p)).sum()),
        }
        meta["reference"] = {"N": 10 * args.n, "p": 4, **dist}
        print(f"L1 distance to reference (rho): {dist['l1_rho']:.6e}")
    meta_path = out_dir / "run_meta.json"
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    outputs.append(meta_path)
    return outputs


# ---------------------------------------------------------------------------
# network verification


def _uniform_windows(rng, n, width):
    return rng.uniform(-1.0, 1.0, size=(n, width))


def _sine_windows(rng, n, width):
    qs = rng.integers(0, 40, size=n)
    ns = rng.integers(1, 6, size=n) * 100
    out = np.empty((n, width))
    for i in range(n):
        grid = np.sin((qs[i] + 1) * np.pi * np.arange(ns[i] + 1) / ns[i])
        start = rng.integers(0, ns[i] + 1 - width)
        out[i] = grid[start:start + width]
    return out


def _stencil_sampler(rng, sampler: str, width: int):
    def sample(n):
        if sampler == "uniform":
            return _uniform_windows(rng, n, width)
        if sampler == "sine":
            return _sine_windows(rng, n, width)
        n_sine = n // 5
        return np.vstack([_uniform_windows(rng, n - n_sine, width),
                          _sine_windows(rng, n_sine, width)])
    return sample


def _piecewise_linear_windows(rng, n):
    """Training-style fixtures: kink position mixes 25% inside [4,5] with
    75% anywhere in [-9, 9] (including smooth windows)."""
    a = rng.uniform(-1.0, 1.0, n)
    b = rng.uniform(-1.0, 1.0, n)
    inside = rng.uniform(size=n) < 0.25
    z = np.where(inside, rng.uniform(4.0, 5.0, n), rng.uniform(-9.0, 9.0, n))
    x = np.arange(10.0)
    return a[:, None] * np.minimum(x - z[:, None], 0.0) + b[:, None] * np.maximum(x - z[:, None], 0.0)


def _classify_chunked(net, batch, threads, transform=None):
    if transform is not None:
        batch = transform(batch)
    if threads <= 1 or batch.shape[0] < 4 * threads:
        return net.classify(batch)
    chunks = np.array_split(batch, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(net.classify, chunks))
    return np.concatenate(parts)


def verify_target(target: str, samples: int, seed: int, threads: int = 1, p: int = 5,
                  sampler: str = "uniform"):
    """Returns (passed, rate_or_error, detail dict)."""
    rng = np.random.default_rng(seed)
    if target in ("interp3", "interp4", "interpN", "trained3", "trained4"):
        order = {"interp3": 3, "interp4": 4, "interpN": p}.get(target, int(target[-1]))
        width = 2 * order - 2
        if target == "interp3":
            net = build_eno3_explicit()
        elif target == "interp4":
            net = build_eno4_explicit()
        elif target == "interpN":
            net = build_eno_interp_net(order)
        else:
            net = trained_deleno(order)
        batch = _stencil_sampler(rng, sampler, width)(samples)
        transform = scale_input if target.startswith("trained") else None
        predicted = _classify_chunked(net, batch, threads, transform)
        expected = eno_interp_shift_batch(batch, order)
        rate = float(np.mean(predicted == expected))
        floor = 0.985 if target.startswith("trained") else 1.0
        detail = _first_mismatch(batch, predicted, expected)
        return rate >= floor, rate, detail
    if target in ("rec2", "rec3"):
        order = int(target[-1])
        net = build_eno_rec_net(order)
        batch = _stencil_sampler(rng, sampler, 2 * order - 1)(samples)
        predicted = _classify_chunked(net, batch, threads)
        expected = eno_rec_shift_batch(batch, order)
        rate = float(np.mean(predicted == expected))
        return rate >= 1.0, rate, _first_mismatch(batch, predicted, expected)
    if target == "sr-class":
        net = build_enosr_class_net()
        batch = _piecewise_linear_windows(rng, samples)
        predicted = _classify_chunked(net, batch, threads) + 1
        expected = np.array([sr_indicators(w).classes[4] for w in batch])
        rate = float(np.mean(predicted == expected))
        return rate >= 1.0, rate, _first_mismatch(batch, predicted, expected)
    if target == "sr-reg":
        eps = 1e-2
        net = build_enosr_regression_net(eps)
        batch = _piecewise_linear_windows(rng, samples)
        out = net.forward(batch)[:, 0]
        ref = np.array([enosr_regression_reference(w, eps) for w in batch])
        err = float(np.max(np.abs(out - ref))) if samples else 0.0
        worst = int(np.argmax(np.abs(out - ref))) if samples else -1
        detail = {"max_abs_error": err, "worst_window": batch[worst].tolist() if samples else None}
        return err <= 1e-9, err, detail
    raise SystemExit(f"unknown target {target!r}")


def _first_mismatch(batch, predicted, expected):
    bad = np.nonzero(predicted != expected)[0]
    if bad.size == 0:
        return {}
    i = int(bad[0])
    return {
        "first_counterexample": batch[i].tolist(),
        "predicted": int(predicted[i]),
        "expected": int(expected[i]),
    }


def cmd_verify_net(args, out_dir: Path) -> list:
    passed, value, detail = verify_target(args.target, args.samples, args.seed,
                                          args.threads, args.p, args.sampler)
    if args.target == "sr-reg":
        print(f"target {args.target}: max |net - formula| = {value:.3e} (gate 1e-9)")
    else:
        print(f"target {args.target}: agreement {value:.6f} over {args.samples} samples")
    if "first_counterexample" in detail:
        print(f"first counterexample: {detail['first_counterexample']}")
        print(f"predicted {detail['predicted']}, expected {detail['expected']}")
    report = out_dir / "verify_report.json"
    with open(report, "w", encoding="utf-8") as fh:
        json.dump({"target": args.target, "samples": args.samples, "value": value,
                   "passed": bool(passed), **detail}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if not passed:
        print("VERIFICATION FAILED", file=sys.stderr)
        raise SystemExit(1)
    return [report]


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="enonet", description=__doc__)
    parser.add_argument("--seed", type=int, default=42, help="PRNG seed (default 42)")
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("ENONET_THREADS", "1")),
                        help="worker threads for batch sweeps (env ENONET_THREADS)")
    parser.add_argument("--out-dir", default="out", help="artifact directory")
    sub = parser.add_subparsers(dest="command", required=True)

    pi = sub.add_parser("interpolate", help="predict refined levels of a sampled function")
    group = pi.add_mutually_exclusive_group(required=True)
    group.add_argument("--function", choices=["q62", "f1", "f2", "sine"])
    group.add_argument("--input", help="CSV of samples (last column used)")
    pi.add_argument("--p", type=int, default=3)
    pi.add_argument("--levels", type=int, default=4)
    pi.add_argument("--n0", type=int, default=16)
    pi.add_argument("--method", choices=["eno", "enosr", "net", "trained"], default="eno")
    pi.add_argument("--ghost", choices=[g.value for g in GhostPolicy], default="constant")
    pi.set_defaults(func=cmd_interpolate)

    po = sub.add_parser("order-study", help="grid-refinement error slopes")
    po.add_argument("--function", choices=["q62", "f1", "f2", "sine"], required=True)
    po.add_argument("--method", choices=["eno", "enosr", "net", "trained"], default="eno")
    po.add_argument("--p", type=int, default=3)
    po.add_argument("--levels", type=int, default=5)
    po.add_argument("--n0", type=int, default=16)
    po.add_argument("--ghost", choices=[g.value for g in GhostPolicy], default="constant")
    po.set_defaults(func=cmd_order_study)

    pc = sub.add_parser("compress", help="multi-resolution threshold compression")
    modes = pc.add_subparsers(dest="mode", required=True)
    c1 = modes.add_parser("1d")
    c1.add_argument("--function", choices=["q62", "f1", "f2", "sine"], default="q62")
    c1.add_argument("--n0", type=int, default=9)
    c1.add_argument("--K", type=int, default=5)
    c1.add_argument("--eps", type=float, default=0.5)
    c1.add_argument("--t", type=float, default=0.5)
    c1.add_argument("--p", type=int, default=3)
    c1.add_argument("--ghost", choices=[g.value for g in GhostPolicy], default="constant")
    c2 = modes.add_parser("2d")
    c2.add_argument("--function", choices=["q64"], default="q64")
    c2.add_argument("--nx0", type=int, default=16)
    c2.add_argument("--ny0", type=int, default=16)
    c2.add_argument("--K", type=int, default=4)
    c2.add_argument("--eps", type=float, default=10.0)
    c2.add_argument("--t", type=float, default=0.5)
    c2.add_argument("--p", type=int, default=3)
    c2.add_argument("--ghost", choices=[g.value for g in GhostPolicy], default="constant")
    ci = modes.add_parser("image")
    ci.add_argument("--in", dest="infile", required=True, help="input PGM (P5)")
    ci.add_argument("--out", dest="outfile", help="decoded PGM path")
    ci.add_argument("--K", type=int, default=5)
    ci.add_argument("--eps", type=float, default=1.0)
    ci.add_argument("--t", type=float, default=0.2)
    ci.add_argument("--p", type=int, default=3)
    ci.add_argument("--ghost", choices=[g.value for g in GhostPolicy], default="constant")
    pc.set_defaults(func=cmd_compress)

    ps = sub.add_parser("solve", help="1D Euler finite-difference runs")
    ps.add_argument("--problem", choices=["sod", "shock-entropy"], required=True)
    ps.add_argument("--n", "--N", dest="n", type=int, default=50)
    ps.add_argument("--cfl", type=float, default=0.5)
    ps.add_argument("--p", type=int, default=3)
    ps.add_argument("--tf", type=float, default=None)
    ps.add_argument("--reference", action="store_true",
                    help="also run a 10x-resolved p=4 reference and report L1 distances")
    ps.set_defaults(func=cmd_solve)

    pv = sub.add_parser("verify-net", help="network-vs-oracle verification suites")
    pv.add_argument("--target", required=True,
                    choices=["interp3", "interp4", "interpN", "rec2", "rec3",
                             "sr-class", "sr-reg", "trained3", "trained4"])
    pv.add_argument("--samples", type=int, default=100000)
    pv.add_argument("--p", type=int, default=5, help="order for interpN")
    pv.add_argument("--sampler", choices=["uniform", "sine", "mixed"], default="uniform",
                    help="stencil sampler for interpolation/reconstruction targets")
    pv.set_defaults(func=cmd_verify_net)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = args.func(args, out_dir)
    flags = {k: v for k, v in vars(args).items() if k not in ("func",)}
    write_manifest(out_dir, args.command, flags, args.seed, outputs)
    return 0


if __name__ == "__main__":
    sys.exit(main())
