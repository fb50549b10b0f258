"""Command-line front end: ``samplentt {sample,matrix,bench,stats,cycles}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import bench, cyclesim, stats
from .batch import trial_seeds
from .matrixgen import KYBER_LEVELS, generate_matrix
from .samplers import SAMPLERS, SamplingExhausted, get_sampler
from .xof import RATE_BYTES, new_stream, shake128_batch

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _hex_bytes(text):
    try:
        value = bytes.fromhex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hex string: {text!r}") from None
    if not value:
        raise argparse.ArgumentTypeError("seed must be non-empty")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _alpha(text):
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="samplentt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats, default_format="json"):
        p.add_argument("--seed", type=_hex_bytes, default=bench.DEFAULT_MASTER_SEED,
                       help="seed as hex (default: 32 zero bytes)")
        p.add_argument("--format", choices=formats, default=default_format)
        p.add_argument("--out", help="write output here instead of stdout")

    p = sub.add_parser("sample", help="sample one polynomial from SHAKE-128(seed)")
    p.add_argument("--sampler", choices=sorted(SAMPLERS), default="modified")
    p.add_argument("--cap-blocks", type=_positive_int)
    common(p, ("json", "csv", "text", "raw"))

    p = sub.add_parser("matrix", help="generate the k x k matrix from a 32-byte rho")
    p.add_argument("--sampler", choices=sorted(SAMPLERS), default="modified")
    p.add_argument("--k", type=int, choices=sorted(KYBER_LEVELS), default=2)
    p.add_argument("--cap-blocks", type=_positive_int)
    common(p, ("json", "raw", "text"))

    p = sub.add_parser("bench", help="bit consumption, two-squeeze success and rejection rate")
    p.add_argument("--sampler", choices=sorted(SAMPLERS), action="append",
                   help="repeatable; default: all samplers")
    p.add_argument("--trials", type=_positive_int, default=bench.DEFAULT_TRIALS)
    p.add_argument("--k", type=int, choices=sorted(KYBER_LEVELS), default=2)
    p.add_argument("--cap-blocks", type=_positive_int)
    common(p, ("json", "csv", "text"))

    p = sub.add_parser("stats", help="frequency, entropy, KS, runs and serial tests")
    p.add_argument("--sampler", choices=sorted(SAMPLERS), action="append")
    p.add_argument("--samples", type=_positive_int, default=1_000_000)
    p.add_argument("--alpha", type=_alpha, default=stats.DEFAULT_ALPHA)
    common(p, ("json", "csv", "text"), default_format="text")

    p = sub.add_parser("cycles", help="clock-cycle model of the sampler datapath")
    p.add_argument("--sampler", choices=cyclesim.VARIANTS, default="modified")
    p.add_argument("--trials", type=_positive_int, default=1)
    p.add_argument("--event-log", help="CSV of (cycle, block, action) for trial 0")
    common(p, ("json", "csv", "text"))
    return parser


def _emit(args, payload):
    if isinstance(payload, str):
        payload = payload if payload.endswith("\n") else payload + "\n"
        data = payload.encode()
    else:
        data = payload
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def cmd_sample(args):
    poly, report = get_sampler(args.sampler)(new_stream(args.seed, args.cap_blocks))
    if args.format == "raw":
        return poly.to_bytes_le16()
    if args.format == "csv":
        return "index,coefficient\n" + "".join(f"{i},{c}\n" for i, c in enumerate(poly))
    if args.format == "text":
        rep = report.to_dict()
        head = "\n".join(f"{k:>18}: {v}" for k, v in rep.items())
        body = "\n".join(" ".join(f"{c:4d}" for c in poly.coefficients[i:i + 16]) for i in range(0, 256, 16))
        return f"sampler: {args.sampler}\nseed: {args.seed.hex()}\n{head}\n{body}"
    return json.dumps({"sampler": args.sampler, "seed": args.seed.hex(),
                       "coefficients": list(poly.coefficients), "report": report.to_dict()})


def cmd_matrix(args):
    if len(args.seed) != 32:
        raise argparse.ArgumentTypeError("matrix --seed must be 32 bytes (64 hex digits)")
    mat = generate_matrix(args.seed, args.k, args.sampler, args.cap_blocks)
    if args.format == "raw":
        return mat.to_bytes_le16()
    if args.format == "text":
        lines = [f"{KYBER_LEVELS[args.k]} matrix, sampler {args.sampler}"]
        for i in range(args.k):
            for j in range(args.k):
                r = mat.reports[i][j]
                lines.append(f"A[{i}][{j}]: {r.fresh_bits} bits, {r.rejected}/{r.candidates_total} rejected, "
                             f"{r.blocks_squeezed} blocks, first coefficients {list(mat[i, j].coefficients[:4])}")
        return "\n".join(lines)
    return mat.to_json()


def cmd_bench(args):
    cfg = bench.BenchConfig(samplers=tuple(args.sampler or SAMPLERS), k=args.k, trials=args.trials,
                            master_seed=args.seed, cap_blocks=args.cap_blocks, output_format=args.format)
    summary = bench.run_all(cfg)
    return {"json": summary.to_json, "csv": summary.to_csv, "text": summary.to_text}[args.format]()


def cmd_stats(args):
    names = tuple(args.sampler or SAMPLERS)
    results = {}
    for name in names:
        x = bench.generate_samples(name, args.samples, args.seed)
        results[name] = stats.run_all(x, alpha=args.alpha)
    ok = all(r.passed for rs in results.values() for r in rs)
    if args.format == "json":
        out = json.dumps({s: [r.to_dict() for r in rs] for s, rs in results.items()}, indent=2)
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("sampler", "test", "statistic", "p_value", "alpha", "passed"))
        for s, rs in results.items():
            for r in rs:
                w.writerow((s, r.test_name, repr(r.statistic), repr(r.p_value), r.alpha, r.passed))
        out = buf.getvalue()
    else:
        lines = [f"# {args.samples} samples per sampler, alpha = {args.alpha}", stats.format_table(results), ""]
        for s, rs in results.items():
            for r in rs:
                lines.append(f"{s:<13}{r.test_name:<10} statistic={r.statistic:.6g} p={r.p_value:.4f} "
                             f"{'PASS' if r.passed else 'FAIL'}")
        out = "\n".join(lines)
    return out, ok


def cmd_cycles(args):
    seeds = trial_seeds(args.seed, 0, args.trials)
    data = shake128_batch(seeds, 6 * RATE_BYTES)
    traces = []
    for t, row in enumerate(data):
        cfg = cyclesim.DatapathConfig(args.sampler, row.tobytes(), record_events=(t == 0 and bool(args.event_log)))
        traces.append(cyclesim.simulate(cfg))
    if args.event_log:
        with open(args.event_log, "w", newline="") as fh:
            fh.write(traces[0].events_csv())
    cfg0 = cyclesim.DatapathConfig(args.sampler)
    totals = np.array([tr.total_cycles for tr in traces], dtype=np.float64)
    summary = {
        "variant": args.sampler, "trials": args.trials,
        "mean_total_cycles": float(totals.mean()),
        "group_period": cyclesim.GROUP_PERIOD[args.sampler],
        "pipeline_fill": cyclesim.PIPELINE_FILL[args.sampler],
        "seedmem_depth": cfg0.seedmem_depth,
        "shake_cycles": cyclesim.shake_latency(cfg0.seedmem_depth // RATE_BYTES, cfg0),
        "mean_activity": {b: float(np.mean([tr.activity[b] for tr in traces])) for b in cyclesim.BLOCKS},
        "mean_idle_cycles": float(np.mean([tr.idle_cycles for tr in traces])),
    }
    if args.format == "json":
        return json.dumps(summary, indent=2)
    if args.format == "csv":
        rows = ["trial,total_cycles,groups,idle_cycles,rejecter_active,bytes_read"]
        rows += [f"{t},{tr.total_cycles},{tr.groups},{tr.idle_cycles},{tr.activity['rejecter']},{tr.bytes_read}"
                 for t, tr in enumerate(traces)]
        return "\n".join(rows)
    lines = [f"{k}: {v}" for k, v in summary.items() if k != "mean_activity"]
    lines += [f"  {b:<13}{v:10.2f}" for b, v in summary["mean_activity"].items()]
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help, 2 for usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "stats":
            out, ok = cmd_stats(args)
            _emit(args, out)
            return EXIT_OK if ok else EXIT_FAIL
        handler = {"sample": cmd_sample, "matrix": cmd_matrix, "bench": cmd_bench, "cycles": cmd_cycles}
        _emit(args, handler[args.command](args))
    except argparse.ArgumentTypeError as exc:
        parser.print_usage(sys.stderr)
        print(f"samplentt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SamplingExhausted as exc:
        print(f"samplentt: stream exhausted: {exc} ({exc.report.accepted} coefficients accepted)", file=sys.stderr)
        return EXIT_FAIL
    except (stats.TooFewSamples, stats.DegenerateSequence) as exc:
        print(f"samplentt: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
