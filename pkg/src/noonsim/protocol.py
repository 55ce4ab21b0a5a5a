"""Monte Carlo simulation of the memory-pooled recursive cat factory.

Cats are injected at ``initial_level`` (single-photon cats, or two-photon cats
made by Hong-Ou-Mandel bunching at a cost of two single photons each). A
level holding two stored cats merges them immediately; successes move up one
level, failures are discarded. The run stops once ``target_count`` cats of
``target_n`` photons exist, or when the single-photon budget runs out.

With inefficient detectors a merge can be accepted although photons reached
the heralding detectors. Such outputs are flagged *corrupt*, and a corrupt
flag propagates to anything later built from that state. Flags are bookkeeping
only; no corrupted wavefunction is evolved.

Two engines are provided. :func:`run_protocol` processes injections in
vectorized chunks while preserving the exact greedy first-in-first-out pairing
order, so it is statistically identical to stepping the pool one injection at
a time. :func:`run_protocol_stepwise` does the latter literally through
:func:`pair_and_attempt` and serves as the reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import analytics

__all__ = [
    "AttemptRecord",
    "MergeModel",
    "MemoryPool",
    "ProtocolConfig",
    "ProtocolSummary",
    "RunStatistics",
    "aggregate",
    "pair_and_attempt",
    "run_many",
    "run_protocol",
    "run_protocol_stepwise",
    "run_rng",
]

# accepted attempts with corrupt inputs use the clean-input acceptance probability
CORRUPT_INPUT_ACCEPT_MODEL = "same_as_clean"

MAX_CHUNK = 1 << 22


@dataclass(frozen=True)
class ProtocolConfig:
    target_n: int
    target_count: int = 1
    eta: float = 1.0
    seed: int = 0
    initial_level: int = 1
    max_singles: int | None = None

    def __post_init__(self):
        if not analytics.is_power_of_two(self.target_n) or self.target_n < 2:
            raise ValueError(f"target_n must be a power of two >= 2, got {self.target_n!r}")
        if not isinstance(self.target_count, int) or self.target_count < 1:
            raise ValueError(f"target_count must be a positive integer, got {self.target_count!r}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta!r}")
        if self.initial_level not in (1, 2) or self.target_n % self.initial_level:
            raise ValueError(f"initial_level must be 1 or 2 and divide target_n, got {self.initial_level!r}")
        if self.initial_level == self.target_n:
            raise ValueError("target_n must exceed initial_level")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.max_singles is not None and self.max_singles < self.initial_level:
            raise ValueError("max_singles is too small to inject a single state")

    @property
    def merge_levels(self) -> list[int]:
        """Photon numbers at which merges happen, bottom to top."""
        levels = []
        n = self.initial_level
        while n < self.target_n:
            levels.append(n)
            n *= 2
        return levels

    @property
    def singles_per_injection(self) -> int:
        return self.initial_level


def run_rng(seed: int, run_index: int) -> np.random.Generator:
    """Independent stream for run ``run_index``; unaffected by how runs are scheduled."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(run_index,)))


@dataclass(frozen=True)
class MergeModel:
    """Per-level ``(p_true, p_accept)``: herald-vacuum probability and no-click probability."""

    probs: Mapping[int, tuple[float, float]]

    @classmethod
    def for_levels(cls, levels: Iterable[int], eta: float) -> "MergeModel":
        return cls({n: analytics.lossy_accept_prob(n, eta) for n in levels})

    @classmethod
    def for_config(cls, config: ProtocolConfig) -> "MergeModel":
        return cls.for_levels(config.merge_levels, config.eta)

    def __getitem__(self, level: int) -> tuple[float, float]:
        return self.probs[level]


@dataclass(frozen=True)
class MemoryPool:
    """Stored cats per level as ``level -> (clean, corrupt)``."""

    inventory: Mapping[int, tuple[int, int]] = field(default_factory=dict)

    def clean(self, level: int) -> int:
        return self.inventory.get(level, (0, 0))[0]

    def corrupt(self, level: int) -> int:
        return self.inventory.get(level, (0, 0))[1]

    def total(self, level: int) -> int:
        return sum(self.inventory.get(level, (0, 0)))

    def with_counts(self, level: int, clean: int, corrupt: int) -> "MemoryPool":
        if clean < 0 or corrupt < 0:
            raise ValueError("pool counts cannot be negative")
        inv = dict(self.inventory)
        inv[level] = (clean, corrupt)
        return MemoryPool(inv)

    def add(self, level: int, corrupt: bool = False, count: int = 1) -> "MemoryPool":
        c, k = self.inventory.get(level, (0, 0))
        return self.with_counts(level, c + (0 if corrupt else count), k + (count if corrupt else 0))

    def to_dict(self) -> dict:
        return {str(k): list(v) for k, v in sorted(self.inventory.items())}


@dataclass(frozen=True)
class AttemptRecord:
    level: int
    corrupt_inputs: int
    accepted: bool
    false_accept: bool
    output_corrupt: bool


def pair_and_attempt(
    pool: MemoryPool,
    level: int,
    rng: np.random.Generator,
    p_true: float,
    p_accept: float | None = None,
) -> tuple[MemoryPool, AttemptRecord]:
    """Take two cats from ``level`` and try to merge them.

    When more than two are stored the pair is drawn uniformly at random.
    One uniform draw ``u`` decides the outcome: ``u < p_true`` is a genuine
    success, ``p_true <= u < p_accept`` an accepted attempt in which photons
    went undetected, and anything else a failure. An accepted output is
    corrupt if either input was corrupt or the acceptance was false.
    """
    if p_accept is None:
        p_accept = p_true
    clean, corrupt = pool.clean(level), pool.corrupt(level)
    total = clean + corrupt
    if total < 2:
        raise ValueError(f"need two stored cats at level {level}, have {total}")
    if corrupt == 0:
        n_bad = 0
    elif clean == 0:
        n_bad = 2
    elif total == 2:
        n_bad = 1
    else:
        n_bad = int(rng.hypergeometric(corrupt, clean, 2))
    pool = pool.with_counts(level, clean - (2 - n_bad), corrupt - n_bad)

    u = rng.random()
    accepted = u < p_accept
    false_accept = accepted and u >= p_true
    out_corrupt = accepted and (n_bad > 0 or false_accept)
    if accepted:
        pool = pool.add(2 * level, corrupt=out_corrupt)
    return pool, AttemptRecord(level, n_bad, accepted, false_accept, out_corrupt)


@dataclass(frozen=True)
class RunStatistics:
    """Outcome of one protocol run.

    ``singles_consumed`` counts single photons (two per injected cat when
    starting from two-photon cats). ``elapsed_steps`` is the number of
    injections. Per-level dicts are keyed by the photon number of the inputs.
    """

    config: ProtocolConfig
    run_index: int
    singles_consumed: int
    tn_attempts: dict[int, int]
    tn_successes: dict[int, int]
    false_accepts: dict[int, int]
    final_clean: int
    final_corrupt: int
    elapsed_steps: int
    budget_exhausted: bool = False
    leftover: MemoryPool = field(default_factory=MemoryPool)

    @property
    def final_total(self) -> int:
        return self.final_clean + self.final_corrupt

    def check_ledger(self) -> None:
        """Assert that every created cat was merged, discarded, or is still stored."""
        created = {self.config.initial_level: self.elapsed_steps}
        for level in self.config.merge_levels:
            created[2 * level] = self.tn_successes[level]
        for level in self.config.merge_levels:
            left = self.leftover.total(level)
            if created[level] != 2 * self.tn_attempts[level] + left:
                raise AssertionError(f"ledger mismatch at level {level}")
        if created[self.config.target_n] != self.final_total:
            raise AssertionError("ledger mismatch at target level")
        if self.singles_consumed != self.elapsed_steps * self.config.singles_per_injection:
            raise AssertionError("singles ledger mismatch")


def _expected_injections(model: MergeModel, levels: Sequence[int], count: int) -> float:
    need = float(count)
    for level in reversed(levels):
        need *= 2.0 / model[level][1]
    return need


def run_protocol(config: ProtocolConfig, run_index: int = 0) -> RunStatistics:
    """Simulate one run of the pooled protocol.

    Injections are processed in chunks. Each stored cat carries its creation
    time (the injection that completed it) so that, after the target count is
    reached, everything triggered by later injections can be cut away exactly.
    """
    rng = run_rng(config.seed, run_index)
    model = MergeModel.for_config(config)
    levels = config.merge_levels
    top = config.target_n
    budget = None if config.max_singles is None else config.max_singles // config.singles_per_injection

    carry_t = {lvl: np.empty(0, dtype=np.int64) for lvl in levels}
    carry_f = {lvl: np.empty(0, dtype=bool) for lvl in levels}
    created: dict[int, list[tuple[np.ndarray, np.ndarray]]] = {lvl: [] for lvl in levels + [top]}
    attempts: dict[int, list[tuple[np.ndarray, np.ndarray, np.ndarray]]] = {lvl: [] for lvl in levels}
    n_final = 0
    injected = 0
    stop_time = None

    while stop_time is None:
        want = _expected_injections(model, levels, config.target_count - n_final)
        chunk = min(MAX_CHUNK, int(math.ceil(1.2 * want)) + 16)
        if budget is not None:
            chunk = min(chunk, budget - injected)
            if chunk <= 0:
                break
        times = np.arange(injected + 1, injected + chunk + 1, dtype=np.int64)
        flags = np.zeros(chunk, dtype=bool)
        injected += chunk
        for lvl in levels:
            created[lvl].append((times, flags))
            t = np.concatenate((carry_t[lvl], times))
            f = np.concatenate((carry_f[lvl], flags))
            m = len(t) // 2
            carry_t[lvl], carry_f[lvl] = t[2 * m :], f[2 * m :]
            when = t[1 : 2 * m : 2]
            bad_in = f[0 : 2 * m : 2] | f[1 : 2 * m : 2]
            p_true, p_acc = model[lvl]
            u = rng.random(m)
            acc = u < p_acc
            false_acc = acc & (u >= p_true)
            attempts[lvl].append((when, acc, false_acc))
            times, flags = when[acc], (bad_in | false_acc)[acc]
        created[top].append((times, flags))
        n_final += len(times)
        if n_final >= config.target_count:
            all_final = np.concatenate([t for t, _ in created[top]])
            stop_time = int(all_final[config.target_count - 1])

    exhausted = stop_time is None
    if exhausted:
        stop_time = injected

    def upto(parts, i):
        return np.concatenate([p[i] for p in parts]) if parts else np.empty(0)

    tn_attempts, tn_successes, false_accepts = {}, {}, {}
    pool = MemoryPool()
    for lvl in levels:
        when = upto(attempts[lvl], 0)
        live = when <= stop_time
        tn_attempts[lvl] = int(live.sum())
        tn_successes[lvl] = int((upto(attempts[lvl], 1).astype(bool) & live).sum())
        false_accepts[lvl] = int((upto(attempts[lvl], 2).astype(bool) & live).sum())
        ct, cf = upto(created[lvl], 0), upto(created[lvl], 1).astype(bool)
        kept = ct <= stop_time
        leftover_flags = cf[kept][2 * tn_attempts[lvl] :]
        if len(leftover_flags):
            pool = pool.with_counts(lvl, int((~leftover_flags).sum()), int(leftover_flags.sum()))
    ft, ff = upto(created[top], 0), upto(created[top], 1).astype(bool)
    final_flags = ff[ft <= stop_time]
    return RunStatistics(
        config=config,
        run_index=run_index,
        singles_consumed=stop_time * config.singles_per_injection,
        tn_attempts=tn_attempts,
        tn_successes=tn_successes,
        false_accepts=false_accepts,
        final_clean=int((~final_flags).sum()),
        final_corrupt=int(final_flags.sum()),
        elapsed_steps=stop_time,
        budget_exhausted=exhausted,
        leftover=pool,
    )


def run_protocol_stepwise(config: ProtocolConfig, run_index: int = 0) -> RunStatistics:
    """Reference engine: one injection at a time through :func:`pair_and_attempt`."""
    rng = run_rng(config.seed, run_index)
    model = MergeModel.for_config(config)
    levels = config.merge_levels
    top = config.target_n
    budget = None if config.max_singles is None else config.max_singles // config.singles_per_injection
    tn_attempts = dict.fromkeys(levels, 0)
    tn_successes = dict.fromkeys(levels, 0)
    false_accepts = dict.fromkeys(levels, 0)
    pool = MemoryPool()
    steps = 0
    exhausted = False
    while pool.total(top) < config.target_count:
        if budget is not None and steps >= budget:
            exhausted = True
            break
        pool = pool.add(config.initial_level)
        steps += 1
        for lvl in levels:
            while pool.total(lvl) >= 2:
                pool, rec = pair_and_attempt(pool, lvl, rng, *model[lvl])
                tn_attempts[lvl] += 1
                tn_successes[lvl] += rec.accepted
                false_accepts[lvl] += rec.false_accept
    leftover = MemoryPool({k: v for k, v in pool.inventory.items() if k != top and sum(v) > 0})
    return RunStatistics(
        config=config,
        run_index=run_index,
        singles_consumed=steps * config.singles_per_injection,
        tn_attempts=tn_attempts,
        tn_successes=tn_successes,
        false_accepts=false_accepts,
        final_clean=pool.clean(top),
        final_corrupt=pool.corrupt(top),
        elapsed_steps=steps,
        budget_exhausted=exhausted,
        leftover=leftover,
    )


def run_many(config: ProtocolConfig, runs: int, engine=run_protocol) -> list[RunStatistics]:
    """``runs`` independent runs, ordered by run index."""
    if runs < 1:
        raise ValueError("runs must be positive")
    return [engine(config, i) for i in range(runs)]


@dataclass(frozen=True)
class LevelSummary:
    level: int
    attempts: int
    successes: int
    false_accepts: int

    @property
    def success_rate(self) -> float:
        return self.successes / self.attempts if self.attempts else math.nan

    @property
    def success_rate_se(self) -> float:
        p = self.success_rate
        return math.sqrt(p * (1 - p) / self.attempts) if self.attempts else math.nan

    @property
    def false_accept_rate(self) -> float:
        return self.false_accepts / self.successes if self.successes else math.nan

    @property
    def false_accept_rate_se(self) -> float:
        q = self.false_accept_rate
        return math.sqrt(q * (1 - q) / self.successes) if self.successes else math.nan

    def to_dict(self) -> dict:
        return {
            "attempts": self.attempts,
            "successes": self.successes,
            "false_accepts": self.false_accepts,
            "success_rate": self.success_rate,
            "success_rate_se": self.success_rate_se,
            "false_accept_rate": self.false_accept_rate,
            "false_accept_rate_se": self.false_accept_rate_se,
        }


@dataclass(frozen=True)
class ProtocolSummary:
    """Aggregate over runs sharing one configuration (up to ``run_index``).

    With a single run the standard errors are 0 by convention and
    ``standard_errors_defined`` is False.
    """

    config: ProtocolConfig
    runs: int
    mean_singles: float
    se_singles: float
    singles_quantiles: dict[str, float]
    mean_singles_per_cat: float
    se_singles_per_cat: float
    levels: dict[int, LevelSummary]
    final_clean: int
    final_corrupt: int
    budget_exhausted_runs: int

    @property
    def standard_errors_defined(self) -> bool:
        return self.runs > 1

    @property
    def corruption_fraction(self) -> float:
        total = self.final_clean + self.final_corrupt
        return self.final_corrupt / total if total else math.nan

    def to_dict(self) -> dict:
        c = self.config
        return {
            "config": {
                "target_n": c.target_n,
                "target_count": c.target_count,
                "eta": c.eta,
                "seed": c.seed,
                "initial_level": c.initial_level,
                "max_singles": c.max_singles,
            },
            "runs": self.runs,
            "mean_singles": self.mean_singles,
            "se_singles": self.se_singles,
            "singles_quantiles": self.singles_quantiles,
            "mean_singles_per_cat": self.mean_singles_per_cat,
            "se_singles_per_cat": self.se_singles_per_cat,
            "expected_singles_per_cat": _expected_singles_per_cat(c),
            "levels": {str(k): v.to_dict() for k, v in sorted(self.levels.items())},
            "final_clean": self.final_clean,
            "final_corrupt": self.final_corrupt,
            "corruption_fraction": self.corruption_fraction,
            "budget_exhausted_runs": self.budget_exhausted_runs,
            "standard_errors_defined": self.standard_errors_defined,
            "corrupt_input_accept_model": CORRUPT_INPUT_ACCEPT_MODEL,
        }


def _expected_singles_per_cat(config: ProtocolConfig) -> float:
    """Exact-recurrence mean singles per target cat at perfect detection efficiency."""
    seq = dict(analytics.expected_pool_sequence(config.target_n, 1))
    return float(seq[config.initial_level] * config.singles_per_injection)


def _se(values: np.ndarray) -> float:
    return float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0


def aggregate(runs: Sequence[RunStatistics]) -> ProtocolSummary:
    if not runs:
        raise ValueError("cannot aggregate zero runs")
    config = replace(runs[0].config)
    singles = np.array([r.singles_consumed for r in runs], dtype=float)
    per_cat = np.array([r.singles_consumed / r.final_total for r in runs if r.final_total], dtype=float)
    levels = {
        lvl: LevelSummary(
            lvl,
            sum(r.tn_attempts[lvl] for r in runs),
            sum(r.tn_successes[lvl] for r in runs),
            sum(r.false_accepts[lvl] for r in runs),
        )
        for lvl in config.merge_levels
    }
    q = np.quantile(singles, [0.05, 0.5, 0.95])
    return ProtocolSummary(
        config=config,
        runs=len(runs),
        mean_singles=float(singles.mean()),
        se_singles=_se(singles),
        singles_quantiles={"q05": float(q[0]), "q50": float(q[1]), "q95": float(q[2])},
        mean_singles_per_cat=float(per_cat.mean()) if len(per_cat) else math.nan,
        se_singles_per_cat=_se(per_cat),
        levels=levels,
        final_clean=sum(r.final_clean for r in runs),
        final_corrupt=sum(r.final_corrupt for r in runs),
        budget_exhausted_runs=sum(r.budget_exhausted for r in runs),
    )
