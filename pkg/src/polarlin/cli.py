"""Command-line front end.

Exit status: 0 on success, 2 on usage errors (bad flags, bad lengths, bad
grids), 1 when a run itself fails (for example an ambiguous decode).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .channels import BEC, GaussianFlip, ReceivedWord
from .codec import Payload, bits_to_text, text_to_bits
from .decoder import SideInformation, decode
from .encoder import PolarCode, assemble_input, encode
from .gf2 import BitWord
from .polarization import (
    FitError,
    FrozenPolicy,
    capacity_histogram,
    channel_density,
    fit_sigmoid,
    logistic,
    polarize,
)


class UsageError(ValueError):
    pass


# --------------------------------------------------------------------------- parsing helpers


def parse_grid(text: str, reference: tuple[float, ...] = ()) -> tuple[float, ...]:
    """Comma list of values and ``start:stop[:step]`` ranges.

    A range without a step expands to the reference grid points lying inside it.
    """
    values: list[float] = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        parts = item.split(":")
        try:
            nums = [float(p) for p in parts]
        except ValueError:
            raise UsageError(f"not a number or range: {item!r}") from None
        if len(nums) == 1:
            values.append(nums[0])
        elif len(nums) == 2:
            lo, hi = nums
            inside = [v for v in reference if lo - 1e-12 <= v <= hi + 1e-12]
            if not inside:
                raise UsageError(f"range {item!r} needs a step (start:stop:step)")
            values.extend(inside)
        elif len(nums) == 3:
            lo, hi, step = nums
            if step <= 0 or hi < lo:
                raise UsageError(f"invalid range {item!r}")
            count = int(round((hi - lo) / step)) + 1
            values.extend(round(lo + k * step, 12) for k in range(count))
        else:
            raise UsageError(f"invalid range {item!r}")
    if not values:
        raise UsageError("empty parameter grid")
    return tuple(values)


def parse_n_list(text: str) -> tuple[int, ...]:
    """Comma list of block lengths; ``a,b,...,c`` continues the ratio b/a up to c."""
    items = [s.strip() for s in text.split(",") if s.strip()]
    out: list[int] = []
    for k, item in enumerate(items):
        if item == "...":
            if len(out) < 2 or k + 1 >= len(items):
                raise UsageError("'...' needs two leading values and a final value")
            ratio = out[-1] // out[-2]
            if ratio < 2 or out[-2] * ratio != out[-1]:
                raise UsageError("'...' continues a geometric sequence with an integer ratio")
            stop = int(items[k + 1])
            nxt = out[-1] * ratio
            while nxt < stop:
                out.append(nxt)
                nxt *= ratio
            continue
        try:
            out.append(int(item))
        except ValueError:
            raise UsageError(f"not an integer: {item!r}") from None
    for n in out:
        if n < 2 or n & (n - 1):
            raise UsageError(f"block length {n} is not a power of two")
    return tuple(out)


def _positions(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise UsageError(f"positions must be comma-separated integers: {text!r}") from None


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("POLAR_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"POLAR_SEED must be an integer, got {env!r}") from None


def _code_from_args(args) -> PolarCode:
    N = args.n
    if N < 2 or N & (N - 1):
        raise UsageError(f"--n must be a power of two, got {N}")
    if args.frozen == "none":
        return PolarCode(N, (), args.frozen_value, args.permuted)
    K = args.k if args.k is not None else N // 2
    return ex.build_code(N, K, FrozenPolicy(args.frozen), args.frozen_value, args.permuted,
                         args.design_eps)


def _open_out(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="\n")


def _write_table(path: Path, header: list[str], rows, dat: bool = True) -> None:
    with _open_out(path) as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")
    if dat:
        with _open_out(path.with_suffix(".dat")) as fh:
            fh.write("# " + " ".join(header) + "\n")
            for row in rows:
                fh.write(" ".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")


# --------------------------------------------------------------------------- commands


def cmd_encode(args) -> int:
    code = _code_from_args(args)
    if (args.text is None) == (args.bits is None):
        raise UsageError("give exactly one of --text or --bits")
    msg = text_to_bits(args.text) if args.text is not None else BitWord(args.bits)
    if len(msg) != code.K:
        raise UsageError(f"message has {len(msg)} bits but the code carries K={code.K}")
    x = encode(assemble_input(msg, code), code)
    if args.out:
        with _open_out(Path(args.out)) as fh:
            fh.write(f"{x}\n")
    else:
        print(x)
    return 0


def cmd_decode(args) -> int:
    code = _code_from_args(args)
    text = args.received
    if args.received_file:
        text = Path(args.received_file).read_text(encoding="utf-8").strip()
    if not text:
        raise UsageError("give --received or --received-file")
    y = ReceivedWord.from_string(text.strip(), _positions(args.flipped))
    if len(y) != code.N:
        raise UsageError(f"received word has {len(y)} symbols, --n is {code.N}")
    side = SideInformation(frozenset() if args.diagnostic else frozenset(y.flagged))
    res = decode(y, code, side)
    if not res.ok:
        extra = f" (rank deficit {res.rank_deficit})" if res.rank_deficit else ""
        print(f"decode failed: {res.tag.value}{extra}", file=sys.stderr)
        return 1
    print(bits_to_text(res.message) if args.as_text else res.message)
    return 0


def _sweep_config(args, params, trials) -> ex.SweepConfig:
    N = args.n
    K = args.k if args.k is not None else N // 2
    payload = Payload(args.text) if args.text is not None else None
    return ex.SweepConfig(
        N=N, K=K, model=args.model, params=params, trials=trials, seed=_seed(args),
        payload=payload, frozen_policy=FrozenPolicy(args.frozen),
        frozen_value=args.frozen_value, permuted=args.permuted, design_epsilon=args.design_eps,
        half_erfc=args.half_erfc, exact_count=args.exact_count, genie=not args.diagnostic,
    )


def _model_grid(args) -> tuple[float, ...]:
    if args.model == "bec":
        if args.eps is None or args.sigma is not None:
            raise UsageError("--model bec takes --eps")
        return parse_grid(args.eps, ex.TABLE1_EPSILONS)
    if args.sigma is None or args.eps is not None:
        raise UsageError("--model gflip takes --sigma")
    return parse_grid(args.sigma, ex.TABLE2_SIGMAS)


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    config = _sweep_config(args, _model_grid(args), args.trials)
    records = ex.run_trials(config, jobs=args.jobs)
    summaries = ex.summarize(records)
    out = Path(args.out_dir)
    with _open_out(out / f"{args.prefix}trials.csv") as fh:
        ex.write_trials_csv(records, fh)
    with _open_out(out / f"{args.prefix}summary.csv") as fh:
        ex.write_summary_csv(summaries, fh)
    with _open_out(out / f"{args.prefix}summary.dat") as fh:
        fh.write("# " + ex.SUMMARY_HEADER.replace(",", " ") + "\n")
        for s in summaries:
            fh.write(ex.summary_row(s).replace(",", " ") + "\n")
    sys.stdout.write(ex.SUMMARY_HEADER + "\n")
    for s in summaries:
        sys.stdout.write(ex.summary_row(s) + "\n")
    return 0


def cmd_transmit_retry(args) -> int:
    if args.episodes < 1:
        raise UsageError("--episodes must be at least 1")
    config = _sweep_config(args, _model_grid(args), args.episodes)
    records = ex.run_trials(config, jobs=args.jobs, retry=True)
    out = Path(args.out_dir)
    with _open_out(out / f"{args.prefix}retry.csv") as fh:
        ex.write_trials_csv(records, fh)
    print("noise_param,episodes,mean_attempts,first_try_fail_fraction,predicted_attempts")
    for param in config.params:
        st = ex.retry_stats([r for r in records if r.noise_param == param])
        print(f"{param!r},{st.episodes},{st.mean_attempts!r},{st.first_try_fail_fraction!r},"
              f"{st.predicted_attempts!r}")
    return 0


def cmd_polarize(args) -> int:
    if not 0.0 <= args.eps <= 1.0:
        raise UsageError(f"--eps must lie in [0, 1], got {args.eps}")
    if args.stages < 1:
        raise UsageError("--stages must be at least 1")
    if args.bins < 2:
        raise UsageError("--bins must be at least 2")
    prof = polarize(args.eps, args.stages)
    N = prof.N
    out = Path(args.out_dir)
    _write_table(out / "profile.csv", ["channel", "capacity"],
                 [(k + 1, float(c)) for k, c in enumerate(prof.capacities)])
    _write_table(out / "histogram.csv", ["bin_lo", "bin_hi", "count"],
                 [(lo, hi, c) for (lo, hi), c in capacity_histogram(prof, args.bins)])
    fit = None
    if N >= 8:
        try:
            fit = fit_sigmoid(prof)
        except FitError as exc:
            print(f"sigmoid fit skipped: {exc}", file=sys.stderr)
    sorted_c = prof.sorted_capacities()
    rows = []
    for rank, (ch, c) in enumerate(zip(prof.sorted_order, sorted_c), start=1):
        model = float(logistic(rank, fit.mu, fit.beta)) if fit else ""
        rows.append((rank, int(ch) + 1, float(c), model))
    _write_table(out / "sorted.csv", ["sorted_rank", "channel", "capacity", "sigmoid"], rows)
    if fit:
        _write_table(out / "fit.csv", ["mu", "beta", "rms_residual", "mu_stderr", "beta_stderr"],
                     [(fit.mu, fit.beta, fit.residual, fit.mu_stderr, fit.beta_stderr)], dat=False)
        grid = np.linspace(0.0, N, args.density_points)
        dens = channel_density(grid, fit, N)
        _write_table(out / "density.csv", ["n", "density"],
                     [(float(a), float(b)) for a, b in zip(grid, dens)])
        print(f"N={N} mu={fit.mu:.4f}±{fit.mu_stderr:.4f} beta={fit.beta:.4f}±{fit.beta_stderr:.4f}"
              f" rms={fit.residual:.3g}")
    else:
        print(f"N={N} capacities: " + ", ".join(f"{c:.6g}" for c in prof.capacities))
    return 0


def cmd_bench(args) -> int:
    ns = parse_n_list(args.n_list)
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.model == "bec":
        model = BEC(args.eps if args.eps is not None else 0.01)
    else:
        model = GaussianFlip(args.sigma if args.sigma is not None else 0.3)
    prof = ex.timing_profile(ns, model, args.trials, _seed(args))
    out = Path(args.out_dir)
    _write_table(out / "bench.csv", ["N", "mean_s", "stddev_s", "successes"],
                 [(p.N, p.mean_time, p.stddev, p.successes) for p in prof])
    usable = [p for p in prof if p.successes and p.mean_time > 0]
    if len(usable) < 4:
        print(f"power-law fit refused: need at least 4 timed points, have {len(usable)}",
              file=sys.stderr)
        return 0
    fit = ex.fit_power_law(usable)
    _write_table(out / "bench_fit.csv", ["coefficient", "exponent", "exponent_stderr", "r_squared"],
                 [(fit.coefficient, fit.exponent, fit.exponent_stderr, fit.r_squared)], dat=False)
    print(f"time ~ {fit.coefficient:.3e} * N^{fit.exponent:.3f} "
          f"(stderr {fit.exponent_stderr:.3f}, R^2 {fit.r_squared:.4f})")
    return 0


# --------------------------------------------------------------------------- parser


def _add_code_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="block length N (power of two)")
    p.add_argument("--k", type=int, help="message bits K (default N/2)")
    p.add_argument("--frozen", choices=["first-half", "lowest-capacity", "none"],
                   default="first-half", help="frozen-position policy")
    p.add_argument("--frozen-value", type=int, choices=[0, 1], default=0)
    p.add_argument("--permuted", action="store_true",
                   help="use the bit-reversed generator B[N].F^n")
    p.add_argument("--design-eps", type=float, default=0.5,
                   help="erasure rate used to rank channels for lowest-capacity")


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=list(ex.MODEL_KINDS), required=True)
    p.add_argument("--eps", help="erasure grid, e.g. 0.001:0.15 or 0.01,0.05 or 0:0.1:0.01")
    p.add_argument("--sigma", help="noise-sigma grid, same syntax as --eps")
    p.add_argument("--seed", type=int, help="base seed (falls back to $POLAR_SEED, then 0)")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--text", help="payload text (8 bits per character, must fill K)")
    p.add_argument("--half-erfc", action="store_true", help="flip probability erfc/2")
    p.add_argument("--exact-count", action="store_true",
                   help="draw noise positions without replacement")
    p.add_argument("--diagnostic", action="store_true",
                   help="keep equations at flipped positions")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--prefix", default="")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polarlin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode text or bits into a codeword")
    _add_code_flags(p)
    p.add_argument("--text")
    p.add_argument("--bits")
    p.add_argument("--out", help="write the codeword here instead of stdout")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="linear decode of a received word")
    _add_code_flags(p)
    p.add_argument("--received", help="symbols 0/1 with ? or e for erasures")
    p.add_argument("--received-file")
    p.add_argument("--flipped", help="comma-separated 1-based positions known to be flipped")
    p.add_argument("--diagnostic", action="store_true",
                   help="keep equations at flipped positions")
    p.add_argument("--as-text", action="store_true", help="print the message as text")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="Monte Carlo failure-fraction sweep")
    _add_code_flags(p)
    _add_sim_flags(p)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("transmit-retry", help="resend until success, count attempts")
    _add_code_flags(p)
    _add_sim_flags(p)
    p.add_argument("--episodes", type=int, default=1000)
    p.set_defaults(func=cmd_transmit_retry)

    p = sub.add_parser("polarize", help="capacity profile, sigmoid fit, density, histogram")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--stages", type=int, required=True)
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--density-points", type=int, default=1025)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_polarize)

    p = sub.add_parser("bench", help="elimination time versus N and a power-law fit")
    p.add_argument("--n-list", required=True, help="e.g. 8,16,...,4096")
    p.add_argument("--model", choices=list(ex.MODEL_KINDS), default="bec")
    p.add_argument("--eps", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:  # includes UsageError
        print(f"polarlin {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"polarlin {args.command}: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
