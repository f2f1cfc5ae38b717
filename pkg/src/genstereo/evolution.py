"""The generational loop: elitist, rank-based genetic search over disparity maps."""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .fitness import FitnessContext, fitness
from .fuzzy import ConfigError, MembershipParams
from .genome import crossover, mutate, random_init, rng_stream
from .imaging import StereoPair

log = logging.getLogger(__name__)

LOG_COLUMNS = ("generation", "best_fitness", "mean_fitness", "millis")


@dataclass(frozen=True)
class GaConfig:
    """Evolution hyperparameters.

    ``offspring_count`` defaults to ``population_size``.  ``workers`` only
    changes how child evaluations are scheduled, never the result.
    """

    d_max: int
    population_size: int = 70
    offspring_count: int | None = None
    max_generations: int = 100
    mutation_rate: float = 0.40
    elite_fraction: float = 0.40
    neighborhood_radius: int = 1
    patch_radius: int = 1
    sigma: float = 42.5
    seed: int = 0
    stagnation_window: int = 15
    stagnation_epsilon: float = 1e-4
    workers: int = 1

    def __post_init__(self):
        if self.offspring_count is None:
            object.__setattr__(self, "offspring_count", self.population_size)
        checks = [
            (self.population_size >= 2, "population_size must be >= 2"),
            (self.offspring_count >= 1, "offspring_count must be >= 1"),
            (0 < self.elite_fraction <= 1, "elite_fraction must lie in (0, 1]"),
            (0 <= self.mutation_rate <= 1, "mutation_rate must lie in [0, 1]"),
            (self.d_max >= 0, "d_max must be >= 0"),
            (self.max_generations >= 0, "max_generations must be >= 0"),
            (self.neighborhood_radius >= 0, "neighborhood_radius must be >= 0"),
            (self.patch_radius >= 0, "patch_radius must be >= 0"),
            (self.sigma > 0, "sigma must be positive"),
            (self.stagnation_window >= 1, "stagnation_window must be >= 1"),
            (self.workers >= 1, "workers must be >= 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    @property
    def elite_count(self) -> int:
        return math.ceil(self.elite_fraction * self.population_size)

    @property
    def membership(self) -> MembershipParams:
        return MembershipParams.with_sigma(self.sigma)


@dataclass
class Individual:
    chrom: np.ndarray
    fitness: float


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    best_fitness: float
    mean_fitness: float
    millis: float


@dataclass
class EvolutionLog:
    generations: list[GenerationStats] = field(default_factory=list)

    def append(self, stats: GenerationStats) -> None:
        self.generations.append(stats)

    @property
    def best_fitness(self) -> list[float]:
        return [g.best_fitness for g in self.generations]

    def __len__(self):
        return len(self.generations)

    def to_csv(self, timing: bool = True) -> str:
        """CSV with one header row.  ``timing=False`` writes 0 in the millis
        column so that logs of identical runs are byte-identical."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(LOG_COLUMNS)
        for g in self.generations:
            millis = round(g.millis, 3) if timing else 0
            writer.writerow([g.generation, repr(g.best_fitness), repr(g.mean_fitness), millis])
        return buf.getvalue()


def rank_survival_probability(rank_index: int, total: int) -> float:
    """Linear rank survival probability; rank 0 is the worst individual."""
    if total < 1:
        raise ValueError("total must be >= 1")
    return (rank_index + 1) / total


def _rank_weights(n: int) -> np.ndarray:
    # index 0 is the best individual
    w = np.array([rank_survival_probability(n - 1 - i, n) for i in range(n)])
    return w / w.sum()


def _ranked(individuals: list[Individual]) -> list[Individual]:
    return sorted(individuals, key=lambda ind: -ind.fitness)


def _make_child(ranked, weights, ctx, config, rng):
    i, j = rng.choice(len(ranked), size=2, replace=False, p=weights)
    child = crossover(ranked[i].chrom, ranked[j].chrom, rng)
    child = mutate(child, ctx.volume, config.mutation_rate, config.patch_radius, config.d_max, rng)
    return Individual(child, fitness(child, ctx))


def _map(executor, fn, items):
    if executor is None:
        return [fn(x) for x in items]
    return list(executor.map(fn, items))


def survival_fill(pool: list[Individual], slots: int, rng: np.random.Generator) -> list[Individual]:
    """Pick ``slots`` individuals from ``pool`` by repeated linear-rank survival draws.

    Each pass ranks the remaining candidates and walks them best first; a
    candidate survives when a uniform draw falls below its rank probability.
    The best remaining candidate always survives, so every pass makes progress.
    """
    remaining = _ranked(pool)
    chosen: list[Individual] = []
    while len(chosen) < slots:
        n = len(remaining)
        kept = []
        for pos, ind in enumerate(remaining):
            if len(chosen) < slots and rng.random() < rank_survival_probability(n - 1 - pos, n):
                chosen.append(ind)
            else:
                kept.append(ind)
        remaining = kept
    return chosen


def step(
    population: list[Individual],
    ctx: FitnessContext,
    config: GaConfig,
    rng: np.random.Generator,
    generation: int = 1,
    executor: ThreadPoolExecutor | None = None,
) -> list[Individual]:
    """Produce generation ``generation`` from the evaluated ``population``.

    Children are built from per-child streams keyed by (seed, generation,
    child index), so evaluation order and thread count do not matter.
    ``rng`` drives only the survival sampling.
    """
    mu = config.population_size
    ranked = _ranked(population)
    weights = _rank_weights(len(ranked))

    def build(i):
        return _make_child(ranked, weights, ctx, config, rng_stream(config.seed, generation, 1, i))

    children = _map(executor, build, range(config.offspring_count))
    elites = ranked[: config.elite_count]
    return elites + survival_fill(ranked[config.elite_count :] + children, mu - len(elites), rng)


def _stats(generation: int, population: list[Individual], millis: float) -> GenerationStats:
    scores = np.array([ind.fitness for ind in population])
    return GenerationStats(generation, float(scores.max()), float(scores.mean()), millis)


def _stagnated(best: list[float], window: int, eps: float) -> bool:
    if len(best) <= window:
        return False
    old, new = best[-1 - window], best[-1]
    if old == new:
        return True
    return (new - old) / max(abs(old), 1e-300) < eps


def evolve(
    pair: StereoPair,
    config: GaConfig,
    ctx: FitnessContext | None = None,
    on_generation=None,
) -> tuple[np.ndarray, EvolutionLog]:
    """Run the genetic search and return (best disparity map, log).

    The loop stops after ``max_generations`` or when the best fitness has
    improved by less than ``stagnation_epsilon`` (relative) over the last
    ``stagnation_window`` generations.  ``on_generation`` is called with
    each :class:`GenerationStats` as it is recorded.
    """
    if config.d_max >= pair.shape[1]:
        raise ConfigError(f"d_max {config.d_max} must be below the image width {pair.shape[1]}")
    if ctx is None:
        ctx = FitnessContext.from_pair(pair, config.d_max, config.neighborhood_radius, config.membership)
    h, w = pair.shape
    evo_log = EvolutionLog()
    executor = ThreadPoolExecutor(config.workers) if config.workers > 1 else None

    def record(stats):
        evo_log.append(stats)
        if on_generation is not None:
            on_generation(stats)
        log.debug("gen %d best %.6g mean %.6g", stats.generation, stats.best_fitness, stats.mean_fitness)

    try:
        t0 = time.perf_counter()

        def seed_individual(i):
            chrom = random_init(h, w, config.d_max, rng_stream(config.seed, 0, 1, i))
            return Individual(chrom, fitness(chrom, ctx))

        population = _map(executor, seed_individual, range(config.population_size))
        record(_stats(0, population, (time.perf_counter() - t0) * 1e3))

        for gen in range(1, config.max_generations + 1):
            t0 = time.perf_counter()
            population = step(population, ctx, config, rng_stream(config.seed, gen, 0), gen, executor)
            record(_stats(gen, population, (time.perf_counter() - t0) * 1e3))
            if _stagnated(evo_log.best_fitness, config.stagnation_window, config.stagnation_epsilon):
                log.info("stopping at generation %d: best fitness stagnated", gen)
                break
    finally:
        if executor is not None:
            executor.shutdown()

    best = _ranked(population)[0]
    return best.chrom, evo_log
