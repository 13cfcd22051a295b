"""
Monte-Carlo simulation of the random model behind the heuristics.

A simulated field draws its class group 2-rank rho, the class k of its
Selmer signature image and a uniformly random unit subspace E of
X = F2^{r1+r2+rho} through a fixed vector e. The unit signature rank is
read off dim(E ∩ Y) by explicit linear algebra, so the counting lemma used
by the closed forms is checked independently.

Work is split into fixed-size chunks seeded from one master seed, so
results do not depend on the number of worker processes.
"""

import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Optional, Union

import numpy as np
from scipy import stats

from .errors import InadmissibleError, SupportMismatchError
from .f2linalg import random_independent_rows, rank_of
from .heuristics import (
    Signature,
    TruncatedReal,
    cond_sigrank,
    eta_plus_rational,
    eta_rational,
    k_distribution,
    malle_constant,
    sigrank,
    sigrank_bounds,
    split_prob,
)

logger = logging.getLogger(__name__)

RHO_MAX = 40
CHUNK_SIZE = 10_000
DEFAULT_SIGMA = 4.0

Probability = Union[float, Fraction, TruncatedReal]


@dataclass(frozen=True)
class FieldSample:
    """
    One simulated field.

    Attributes:
        k: dim(im ∩ V_inf)
        rho: Class group 2-rank
        s: Unit signature rank
    """
    sig: Signature
    k: int
    rho: int
    s: int

    def __post_init__(self) -> None:
        lo, hi = sigrank_bounds(self.sig, self.k, self.rho)
        if not lo <= self.s <= hi:
            raise InadmissibleError(f"s={self.s} outside {lo}..{hi} for k={self.k}, rho={self.rho}")

    @property
    def rho_plus(self) -> int:
        return self.rho + self.k

    @property
    def rho_inf(self) -> int:
        return self.sig.r1 - self.s

    @property
    def split(self) -> bool:
        return self.rho_inf == self.k


@lru_cache(maxsize=None)
def _k_probabilities(sig: Signature) -> np.ndarray:
    probs = np.array([float(p) for p in k_distribution(sig)])
    return probs / probs.sum()


@lru_cache(maxsize=None)
def rho_masses(sig: Signature) -> tuple[float, ...]:
    """eta(0..RHO_MAX) as floats with the residual mass folded into the last cell."""
    constant = float(malle_constant())
    masses = [constant * float(eta_rational(sig, rho)) for rho in range(RHO_MAX + 1)]
    masses[-1] += max(0.0, 1.0 - math.fsum(masses))
    total = math.fsum(masses)
    return tuple(m / total for m in masses)


def sample_class(sig: Signature, rng: np.random.Generator) -> int:
    probs = _k_probabilities(sig)
    return int(rng.choice(len(probs), p=probs))


def sample_rho(sig: Signature, rng: np.random.Generator) -> int:
    masses = rho_masses(sig)
    return int(rng.choice(len(masses), p=np.asarray(masses)))


def draw_sigrank(sig: Signature, k: int, rho: int, rng: np.random.Generator) -> int:
    """
    s = r1 + r2 - dim(E ∩ Y) with e the first coordinate vector, Y spanned by
    the next rho + k + r2 coordinate vectors and E uniform of dimension
    r1 + r2 through e.
    """
    m = sig.r1 + sig.r2 + rho
    r = rho + k + sig.r2
    t = sig.r1 + sig.r2
    rows = random_independent_rows(m, t, rng, start=[1])
    y_mask = ((1 << r) - 1) << 1
    # dim(E ∩ Y) = t - rank(E mod Y), so s = rank(E mod Y)
    return rank_of(row & ~y_mask for row in rows)


def simulate_field(sig: Signature, rng: np.random.Generator) -> FieldSample:
    rho = sample_rho(sig, rng)
    k = sample_class(sig, rng)
    return FieldSample(sig, k, rho, draw_sigrank(sig, k, rho, rng))


@dataclass
class Cell:
    outcome: object
    observed: int
    expected: float
    z: float


@dataclass
class Comparison:
    """Empirical counts against an exact distribution."""
    name: str
    trials: int
    cells: list[Cell] = field(default_factory=list)
    chi2_pvalue: Optional[float] = None
    sigma: float = DEFAULT_SIGMA

    @property
    def max_deviation(self) -> float:
        if not self.cells:
            return 0.0
        return max(abs(c.observed / self.trials - c.expected) for c in self.cells)

    @property
    def max_abs_z(self) -> float:
        return max((abs(c.z) for c in self.cells), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_abs_z <= self.sigma


def _as_float(p: Probability) -> float:
    return float(p.value) if isinstance(p, TruncatedReal) else float(p)


def compare_distributions(
    name: str,
    counts: Mapping,
    exact: Mapping,
    sigma: float = DEFAULT_SIGMA,
) -> Comparison:
    """
    Per-cell binomial z-scores and a chi-square p-value for observed counts
    against exact probabilities. Every observed outcome must have positive
    exact probability. Cells expected fewer than 5 times (or all but 5)
    get z = 0 and only enter the chi-square statistic.
    """
    trials = sum(counts.values())
    if trials <= 0:
        raise InadmissibleError("no trials to compare")
    probs = {o: _as_float(p) for o, p in exact.items()}
    outside = [o for o, c in counts.items() if c and probs.get(o, 0.0) <= 0.0]
    if outside:
        raise SupportMismatchError(f"{name}: outcomes {sorted(outside)} have probability zero")

    comparison = Comparison(name, trials, sigma=sigma)
    for outcome in sorted(probs):
        p = probs[outcome]
        observed = counts.get(outcome, 0)
        freq = observed / trials
        if p * trials < 5 or p * trials > trials - 5:
            # normal approximation invalid; left to the pooled chi-square bin
            z = 0.0
        else:
            z = (freq - p) / math.sqrt(p * (1.0 - p) / trials)
        comparison.cells.append(Cell(outcome, observed, p, z))

    # pool cells with small expected counts before the chi-square test
    observed_bins, expected_bins = [], []
    pooled_obs = pooled_exp = 0.0
    for cell in comparison.cells:
        expected = cell.expected * trials
        if expected >= 5:
            observed_bins.append(cell.observed)
            expected_bins.append(expected)
        else:
            pooled_obs += cell.observed
            pooled_exp += expected
    if pooled_exp >= 5 or (pooled_exp > 0 and not expected_bins):
        observed_bins.append(pooled_obs)
        expected_bins.append(pooled_exp)
    elif pooled_exp > 0:
        observed_bins[-1] += pooled_obs
        expected_bins[-1] += pooled_exp
    if len(observed_bins) > 1:
        statistic = sum((o - e) ** 2 / e for o, e in zip(observed_bins, expected_bins))
        comparison.chi2_pvalue = float(stats.chi2.sf(statistic, len(observed_bins) - 1))
    return comparison


@dataclass
class SimReport:
    """Outcome of a simulation run."""
    sig: Signature
    trials: int
    seed: int
    counts: dict = field(default_factory=dict)
    comparisons: list[Comparison] = field(default_factory=list)
    conditioned_on: Optional[tuple[int, int]] = None

    def frequencies(self, name: str) -> dict:
        return {o: c / self.trials for o, c in sorted(self.counts[name].items())}

    @property
    def max_deviation(self) -> float:
        return max((c.max_deviation for c in self.comparisons), default=0.0)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.comparisons)


def _chunks(trials: int, seed: int) -> list[tuple[int, np.random.SeedSequence]]:
    if trials < 1:
        raise InadmissibleError("trials must be positive")
    n_chunks = -(-trials // CHUNK_SIZE)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [CHUNK_SIZE] * (n_chunks - 1) + [trials - CHUNK_SIZE * (n_chunks - 1)]
    return list(zip(sizes, children))


def _field_chunk(sig: Signature, size: int, seed_seq: np.random.SeedSequence) -> dict:
    rng = np.random.default_rng(seed_seq)
    counts = {name: Counter() for name in ("k", "rho", "rho_plus", "s", "split")}
    for _ in range(size):
        sample = simulate_field(sig, rng)
        counts["k"][sample.k] += 1
        counts["rho"][sample.rho] += 1
        counts["rho_plus"][sample.rho_plus] += 1
        counts["s"][sample.s] += 1
        counts["split"][sample.split] += 1
    return counts


def _conditional_chunk(sig: Signature, k: int, rho: int, size: int, seed_seq: np.random.SeedSequence) -> dict:
    rng = np.random.default_rng(seed_seq)
    counts = Counter(draw_sigrank(sig, k, rho, rng) for _ in range(size))
    return {"s": counts}


def _merge(parts: list[dict]) -> dict:
    merged: dict = {}
    for part in parts:
        for name, counter in part.items():
            merged.setdefault(name, Counter()).update(counter)
    return {name: dict(sorted(counter.items())) for name, counter in merged.items()}


def _run_chunks(worker, head: tuple, chunks: list, threads: int) -> dict:
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(worker, *head, size, seq) for size, seq in chunks]
            parts = [f.result() for f in futures]
    else:
        parts = [worker(*head, size, seq) for size, seq in chunks]
    return _merge(parts)


def exact_distributions(sig: Signature) -> dict:
    """Closed-form distributions matching the simulated quantities."""
    constant = float(malle_constant())
    rho = dict(enumerate(rho_masses(sig)))
    rho_plus = {
        rp: constant * float(eta_plus_rational(sig, rp))
        for rp in range(RHO_MAX + sig.r1 // 2 + 1)
    }
    if sig.r1 == 1:
        s = {1: 1.0}
        split = {True: 1.0}
    else:
        s = {value: _as_float(sigrank(sig, value)) for value in range(1, sig.r1 + 1)}
        yes = _as_float(split_prob(sig))
        split = {True: yes, False: 1.0 - yes}
    return {
        "k": dict(enumerate(k_distribution(sig))),
        "rho": rho,
        "rho_plus": rho_plus,
        "s": s,
        "split": split,
    }


def run_simulation(
    sig: Signature,
    trials: int,
    seed: int,
    threads: int = 1,
    sigma: float = DEFAULT_SIGMA,
) -> SimReport:
    chunks = _chunks(trials, seed)
    logger.debug("simulating %s: %d trials in %d chunks", sig, trials, len(chunks))
    counts = _run_chunks(_field_chunk, (sig,), chunks, threads)
    report = SimReport(sig, trials, seed, counts)
    exact = exact_distributions(sig)
    for name in ("k", "rho", "rho_plus", "s", "split"):
        report.comparisons.append(compare_distributions(name, counts[name], exact[name], sigma))
    logger.info("simulation %s: max deviation %.3g, passed=%s", sig, report.max_deviation, report.passed)
    return report


def run_conditional(
    sig: Signature,
    k: int,
    rho: int,
    trials: int,
    seed: int,
    threads: int = 1,
    sigma: float = DEFAULT_SIGMA,
) -> SimReport:
    """Signature ranks at fixed (k, rho) against the conditional closed form."""
    if not 0 <= k <= sig.r1 // 2 or rho < 0:
        raise InadmissibleError(f"bad k={k} or rho={rho}")
    counts = _run_chunks(_conditional_chunk, (sig, k, rho), _chunks(trials, seed), threads)
    lo, hi = sigrank_bounds(sig, k, rho)
    exact = {s: cond_sigrank(sig, s, k, rho) for s in range(lo, hi + 1)}
    report = SimReport(sig, trials, seed, counts, conditioned_on=(k, rho))
    report.comparisons.append(compare_distributions("s", counts["s"], exact, sigma))
    return report
