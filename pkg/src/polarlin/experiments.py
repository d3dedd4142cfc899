"""Monte Carlo harness: failure-fraction sweeps, timing scaling, retransmission.

Every trial draws its noise from its own generator, seeded from
``(base_seed, parameter_index, trial_index)`` through ``numpy``'s
``SeedSequence``.  Results therefore do not depend on the order or the number
of worker processes that ran them.
"""

from __future__ import annotations

import io
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, TextIO

import numpy as np
from scipy import stats

from .channels import BEC, ChannelModel, GaussianFlip, ReceivedWord, sample_noise, transmit
from .codec import Payload, bits_to_text
from .decoder import DecodeResult, decode, decode_flip
from .encoder import PolarCode, assemble_input, butterfly_encode, encode
from .gf2 import BitWord
from .polarization import FrozenPolicy, polarize, select_frozen

DEFAULT_TEXT = "Write A Write BC"
TABLE1_EPSILONS = (0.001, 0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1, 0.15)
TABLE2_SIGMAS = (0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6)
TIMING_NS = (8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096)

MODEL_KINDS = ("bec", "gflip")


def default_payload(K: int, seed: int = 0) -> Payload:
    """The 16-character text when it fits exactly, else seeded printable ASCII."""
    if K % 8:
        raise ValueError(f"payload length must be a multiple of 8 bits, got {K}")
    if K == 8 * len(DEFAULT_TEXT):
        return Payload(DEFAULT_TEXT)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x7E47]))
    return Payload("".join(map(chr, rng.integers(32, 127, size=K // 8).tolist())))


@dataclass(frozen=True)
class SweepConfig:
    N: int
    K: int
    model: str
    params: tuple[float, ...]
    trials: int = 100
    seed: int = 0
    payload: Payload | None = None
    frozen_policy: FrozenPolicy = FrozenPolicy.FIRST_HALF
    frozen_value: int = 0
    permuted: bool = False
    design_epsilon: float = 0.5
    half_erfc: bool = False
    exact_count: bool = False
    genie: bool = True

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise ValueError(f"model must be one of {MODEL_KINDS}, got {self.model!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if not 0 < self.K <= self.N:
            raise ValueError(f"message length K={self.K} must lie in 1..N={self.N}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        for p in self.params:
            self.channel(p)  # validates the grid
        if self.payload is None:
            object.__setattr__(self, "payload", default_payload(self.K, self.seed))
        if len(self.payload) != self.K:
            raise ValueError(f"payload carries {len(self.payload)} bits, K={self.K}")

    def channel(self, param: float) -> ChannelModel:
        if self.model == "bec":
            return BEC(param)
        return GaussianFlip(param, self.half_erfc)

    def code(self) -> PolarCode:
        return build_code(self.N, self.K, self.frozen_policy, self.frozen_value,
                          self.permuted, self.design_epsilon)


def build_code(N: int, K: int, policy: FrozenPolicy = FrozenPolicy.FIRST_HALF,
               frozen_value: int = 0, permuted: bool = False,
               design_epsilon: float = 0.5) -> PolarCode:
    count = N - K
    if policy is FrozenPolicy.FIRST_HALF:
        frozen = tuple(range(1, count + 1))
    else:
        frozen = select_frozen(polarize(design_epsilon, N.bit_length() - 1), count, policy)
    return PolarCode(N, frozen, frozen_value, permuted)


@lru_cache(maxsize=8)
def _prepared(config: SweepConfig) -> tuple[PolarCode, BitWord, BitWord]:
    code = config.code()
    message = config.payload.bits
    return code, message, encode(assemble_input(message, code), code)


def trial_seed(base_seed: int, param_index: int, trial_index: int) -> int:
    ss = np.random.SeedSequence([base_seed, param_index, trial_index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class TrialRecord:
    N: int
    noise_kind: str
    noise_param: float
    attempts: int
    run_time_s: float
    solve_time_s: float
    success: bool
    fail_kind: str | None
    affected_count: int
    decoded_text: str
    seed: int
    timestamp: str


def _attempt(config: SweepConfig, code: PolarCode, codeword: BitWord,
             noise_param: float, rng: np.random.Generator) -> tuple[DecodeResult, int]:
    noise = sample_noise(config.N, config.channel(noise_param), rng, config.exact_count)
    y = transmit(codeword, noise)
    if config.model == "gflip":
        return decode_flip(y, code, genie=config.genie), len(noise)
    return decode(y, code), len(noise)


def _outcome(res: DecodeResult, message: BitWord) -> tuple[bool, str | None, str]:
    if not res.ok:
        return False, res.tag.value, ""
    return res.message == message, None, bits_to_text(res.message)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


def run_trial(config: SweepConfig, noise_param: float, seed: int) -> TrialRecord:
    """Encode the payload, push it through one noisy channel use, decode, check."""
    t0 = time.perf_counter()
    code, message, codeword = _prepared(config)
    rng = np.random.default_rng(seed)
    res, affected = _attempt(config, code, codeword, noise_param, rng)
    success, fail_kind, text = _outcome(res, message)
    return TrialRecord(config.N, config.model, noise_param, 1, time.perf_counter() - t0,
                       res.solve_time, success, fail_kind, affected, text, seed, _now())


def transmit_until_success(config: SweepConfig, noise_param: float, seed: int,
                           max_attempts: int = 10_000) -> TrialRecord:
    """Resend the same payload with fresh noise until it decodes correctly."""
    t0 = time.perf_counter()
    code, message, codeword = _prepared(config)
    rng = np.random.default_rng(seed)
    solve = 0.0
    for attempt in range(1, max_attempts + 1):
        res, affected = _attempt(config, code, codeword, noise_param, rng)
        solve += res.solve_time
        success, fail_kind, text = _outcome(res, message)
        if success:
            break
    return TrialRecord(config.N, config.model, noise_param, attempt, time.perf_counter() - t0,
                       solve, success, fail_kind, affected, text, seed, _now())


def _run_chunk(args) -> list[TrialRecord]:
    config, p_idx, param, trial_range, retry = args
    fn = transmit_until_success if retry else run_trial
    return [fn(config, param, trial_seed(config.seed, p_idx, t)) for t in trial_range]


def run_trials(config: SweepConfig, jobs: int = 1, retry: bool = False) -> list[TrialRecord]:
    """All trials of the sweep, ordered by (parameter index, trial index)."""
    chunk = max(1, min(config.trials, 250))
    tasks = [
        (config, p_idx, param, range(start, min(start + chunk, config.trials)), retry)
        for p_idx, param in enumerate(config.params)
        for start in range(0, config.trials, chunk)
    ]
    if jobs <= 1 or len(tasks) == 1:
        out = [_run_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            out = list(pool.map(_run_chunk, tasks))
    return [rec for part in out for rec in part]


@dataclass(frozen=True)
class SweepSummary:
    noise_param: float
    trials: int
    fails: int
    mean_solve_time: float
    stddev_solve_time: float
    mean_affected_positions: float

    @property
    def fail_fraction(self) -> Fraction:
        return Fraction(self.fails, self.trials)


def summarize(records: Iterable[TrialRecord]) -> list[SweepSummary]:
    groups: dict[float, list[TrialRecord]] = {}
    for r in records:
        groups.setdefault(r.noise_param, []).append(r)
    out = []
    for param, recs in groups.items():
        times = [r.solve_time_s for r in recs]
        out.append(SweepSummary(
            param,
            len(recs),
            sum(not r.success for r in recs),
            statistics.fmean(times),
            statistics.stdev(times) if len(times) > 1 else 0.0,
            statistics.fmean(r.affected_count for r in recs),
        ))
    return out


def run_sweep(config: SweepConfig, jobs: int = 1) -> list[SweepSummary]:
    return summarize(run_trials(config, jobs))


def expected_transmissions(fail_fraction: float) -> float:
    """Mean number of sends until the first success, 1 / (1 - p)."""
    if not 0.0 <= fail_fraction < 1.0:
        raise ValueError(f"fail fraction must lie in [0, 1), got {fail_fraction}")
    return 1.0 / (1.0 - fail_fraction)


@dataclass(frozen=True)
class RetryStats:
    episodes: int
    mean_attempts: float
    first_try_fail_fraction: float
    predicted_attempts: float


def retry_stats(records: Sequence[TrialRecord]) -> RetryStats:
    """Compare observed attempts with 1/(1-p), p estimated from first attempts only."""
    n = len(records)
    p_hat = sum(r.attempts > 1 for r in records) / n
    return RetryStats(n, statistics.fmean(r.attempts for r in records), p_hat,
                      expected_transmissions(p_hat) if p_hat < 1 else math.inf)


# --------------------------------------------------------------------------- timing


@dataclass(frozen=True)
class TimingPoint:
    N: int
    mean_time: float
    stddev: float
    successes: int


def timing_profile(N_list: Sequence[int], model: ChannelModel, trials: int,
                   seed: int = 0) -> list[TimingPoint]:
    """Elimination time per N over successful single-trial decodes (K = N/2)."""
    out = []
    for idx, N in enumerate(N_list):
        if N < 2 or N & (N - 1):
            raise ValueError(f"block length must be a power of two, got {N}")
        code = PolarCode.first_half(N)
        rng = np.random.default_rng(np.random.SeedSequence([seed, idx]))
        message = BitWord(rng.integers(0, 2, size=code.K))
        x = butterfly_encode(assemble_input(message, code), code)
        decode(ReceivedWord.from_bits(x), code)  # warm caches and the JIT before timing
        times = []
        for _ in range(trials):
            noise = sample_noise(N, model, rng)
            y = transmit(x, noise)
            res = decode_flip(y, code) if isinstance(model, GaussianFlip) else decode(y, code)
            if res.ok and res.message == message:
                times.append(res.solve_time)
        mean = statistics.fmean(times) if times else math.nan
        sd = statistics.stdev(times) if len(times) > 1 else 0.0
        out.append(TimingPoint(N, mean, sd, len(times)))
    return out


@dataclass(frozen=True)
class PowerLawFit:
    coefficient: float
    exponent: float
    exponent_stderr: float
    r_squared: float

    def __iter__(self):
        return iter((self.coefficient, self.exponent))


def fit_power_law(profile) -> PowerLawFit:
    """Least-squares line through (log N, log t); time ~ coefficient * N**exponent."""
    pts = [(p.N, p.mean_time) if isinstance(p, TimingPoint) else (p[0], p[1]) for p in profile]
    if len(pts) < 4:
        raise ValueError(f"a power-law fit needs at least 4 points, got {len(pts)}")
    n = np.array([p[0] for p in pts], dtype=float)
    t = np.array([p[1] for p in pts], dtype=float)
    if not (np.all(np.isfinite(t)) and np.all(t > 0)):
        raise ValueError("timing values must be positive and finite")
    lr = stats.linregress(np.log(n), np.log(t))
    return PowerLawFit(float(np.exp(lr.intercept)), float(lr.slope), float(lr.stderr),
                       float(lr.rvalue**2))


def flip_count_curve(N: int, sigma_list: Sequence[float], trials: int, seed: int = 0,
                     half_erfc: bool = False) -> list[tuple[float, float]]:
    """Mean number of distinct flipped positions per sigma."""
    out = []
    for idx, sigma in enumerate(sigma_list):
        rng = np.random.default_rng(np.random.SeedSequence([seed, idx]))
        model = GaussianFlip(sigma, half_erfc)
        counts = [len(sample_noise(N, model, rng)) for _ in range(trials)]
        out.append((float(sigma), statistics.fmean(counts)))
    return out


# --------------------------------------------------------------------------- CSV

TRIAL_HEADER = ("N,noise_kind,noise_param,attempts,run_time_s,solve_time_s,success,"
                "fail_kind,affected_count,decoded_text,seed,timestamp_iso8601")
SUMMARY_HEADER = "noise_param,trials,fails,fail_fraction,mean_solve_s,stddev_solve_s,mean_affected"


def _quote(text: str) -> str:
    return '"' + text.replace('"', '""') + '"'


def _num(x: float) -> str:
    return repr(float(x))


def trial_row(r: TrialRecord) -> str:
    return ",".join([
        str(r.N), r.noise_kind, _num(r.noise_param), str(r.attempts), _num(r.run_time_s),
        _num(r.solve_time_s), "true" if r.success else "false", r.fail_kind or "",
        str(r.affected_count), _quote(r.decoded_text), str(r.seed), r.timestamp,
    ])


def summary_row(s: SweepSummary) -> str:
    return ",".join([
        _num(s.noise_param), str(s.trials), str(s.fails), _num(float(s.fail_fraction)),
        _num(s.mean_solve_time), _num(s.stddev_solve_time), _num(s.mean_affected_positions),
    ])


def write_trials_csv(records: Iterable[TrialRecord], out: TextIO) -> None:
    out.write(TRIAL_HEADER + "\n")
    for r in records:
        out.write(trial_row(r) + "\n")


def write_summary_csv(summaries: Iterable[SweepSummary], out: TextIO) -> None:
    out.write(SUMMARY_HEADER + "\n")
    for s in summaries:
        out.write(summary_row(s) + "\n")


def trials_csv_text(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    write_trials_csv(records, buf)
    return buf.getvalue()
