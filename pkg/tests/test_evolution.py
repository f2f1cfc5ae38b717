import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genstereo.evolution import (
    EvolutionLog,
    GaConfig,
    GenerationStats,
    Individual,
    evolve,
    rank_survival_probability,
    step,
    survival_fill,
)
from genstereo.fitness import FitnessContext, fitness
from genstereo.fuzzy import ConfigError
from genstereo.genome import crossover, mutate, random_init, rng_stream
from genstereo.imaging import GrayImage, StereoPair
from genstereo.synthetic import block_disparity, random_dot_stereogram


@pytest.fixture(scope="module")
def scene():
    return random_dot_stereogram(block_disparity(24, 24, 10, 3), np.random.default_rng(3))


def _initial(ctx, config):
    h, w = ctx.shape
    pop = []
    for i in range(config.population_size):
        chrom = random_init(h, w, config.d_max, rng_stream(config.seed, 0, 1, i))
        pop.append(Individual(chrom, fitness(chrom, ctx)))
    return pop


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(population_size=1),
        dict(offspring_count=0),
        dict(elite_fraction=0.0),
        dict(elite_fraction=1.5),
        dict(mutation_rate=-0.1),
        dict(mutation_rate=1.1),
        dict(d_max=-1),
        dict(sigma=0),
    ],
)
def test_config_invariants(kwargs):
    base = dict(d_max=3)
    base.update(kwargs)
    with pytest.raises(ConfigError):
        GaConfig(**base)


def test_config_defaults():
    cfg = GaConfig(d_max=5)
    assert (cfg.population_size, cfg.max_generations) == (70, 100)
    assert cfg.mutation_rate == 0.40 and cfg.elite_fraction == 0.40
    assert cfg.offspring_count == 70 and cfg.neighborhood_radius == 1 and cfg.sigma == 42.5
    assert cfg.elite_count == 28


def test_d_max_must_fit_image(scene):
    with pytest.raises(ConfigError):
        evolve(scene.pair, GaConfig(d_max=24, max_generations=1))


def test_rank_probability_examples():
    assert rank_survival_probability(3, 4) == 1.0
    assert rank_survival_probability(0, 4) == 0.25
    with pytest.raises(ValueError):
        rank_survival_probability(0, 0)


@pytest.mark.parametrize("n", [1, 2, 5, 10])
def test_rank_probability_expected_survivors(n):
    exact = sum(rank_survival_probability(k, n) for k in range(n))
    assert exact == pytest.approx(n * (n + 1) / (2 * n))
    draws = np.random.default_rng(n).random((20000, n))
    probs = np.array([rank_survival_probability(k, n) for k in range(n)])
    assert (draws < probs).sum(axis=1).mean() == pytest.approx(exact, rel=0.02)


def test_zero_generations_returns_best_initial(scene):
    cfg = GaConfig(d_max=5, population_size=8, max_generations=0, seed=4)
    best, log = evolve(scene.pair, cfg)
    ctx = FitnessContext.from_pair(scene.pair, 5, 1)
    initial = _initial(ctx, cfg)
    top = max(initial, key=lambda ind: ind.fitness)
    assert np.array_equal(best, top.chrom)
    assert len(log) == 1 and log.best_fitness[0] == top.fitness


def test_identical_images_prefer_zero_disparity():
    img = GrayImage(np.random.default_rng(0).integers(0, 256, (16, 16)))
    best, _ = evolve(StereoPair(img, img), GaConfig(d_max=2, population_size=30, max_generations=60, seed=0))
    assert np.bincount(best.ravel()).argmax() == 0


def test_evolve_deterministic(scene):
    cfg = GaConfig(d_max=5, population_size=10, max_generations=8, seed=21)
    a, la = evolve(scene.pair, cfg)
    b, lb = evolve(scene.pair, cfg)
    assert np.array_equal(a, b)
    assert la.to_csv(timing=False) == lb.to_csv(timing=False)


def test_evolve_independent_of_workers(scene):
    cfg = GaConfig(d_max=5, population_size=10, max_generations=6, seed=5)
    a, la = evolve(scene.pair, cfg)
    b, lb = evolve(scene.pair, GaConfig(d_max=5, population_size=10, max_generations=6, seed=5, workers=4))
    assert np.array_equal(a, b)
    assert la.best_fitness == lb.best_fitness


def test_step_full_elitism_keeps_population(scene):
    cfg = GaConfig(d_max=5, population_size=6, elite_fraction=1.0, seed=2)
    ctx = FitnessContext.from_pair(scene.pair, 5, 1)
    pop = _initial(ctx, cfg)
    nxt = step(pop, ctx, cfg, rng_stream(2, 1, 0))
    assert sorted(id(p) for p in nxt) == sorted(id(p) for p in pop)


def test_step_keeps_best_and_size(scene):
    cfg = GaConfig(d_max=5, population_size=9, offspring_count=5, seed=8)
    ctx = FitnessContext.from_pair(scene.pair, 5, 1)
    pop = _initial(ctx, cfg)
    for g in range(1, 6):
        best = max(pop, key=lambda ind: ind.fitness)
        pop = step(pop, ctx, cfg, rng_stream(8, g, 0), g)
        assert len(pop) == 9
        assert any(p is best for p in pop)


def test_selection_beats_no_selection_control(scene):
    cfg = GaConfig(d_max=5, population_size=20, seed=11)
    ctx = FitnessContext.from_pair(scene.pair, 5, 1)
    pop = _initial(ctx, cfg)
    control = _initial(ctx, cfg)
    for g in range(1, 11):
        pop = step(pop, ctx, cfg, rng_stream(11, g, 0), g)
        children = []
        for i in range(cfg.population_size):
            r = rng_stream(11, g, 1, i)
            a, b = r.choice(cfg.population_size, 2, replace=False)
            child = crossover(control[a].chrom, control[b].chrom, r)
            child = mutate(child, ctx.volume, cfg.mutation_rate, cfg.patch_radius, cfg.d_max, r)
            children.append(Individual(child, fitness(child, ctx)))
        control = children
    ga = np.sort([p.fitness for p in pop])
    ctl = np.sort([p.fitness for p in control])
    assert np.all(ga >= ctl)


def test_survival_fill_always_takes_best():
    pool = [Individual(np.zeros((1, 1), np.int32), float(f)) for f in (3, 9, 1, 5)]
    for s in range(10):
        chosen = survival_fill(pool, 2, rng_stream(s))
        assert len(chosen) == 2 and chosen[0].fitness == 9.0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**63 - 1))
def test_run_invariants(seed):
    scene = random_dot_stereogram(block_disparity(16, 16, 6, 2), np.random.default_rng(seed % 1000))
    seen = []
    cfg = GaConfig(d_max=3, population_size=6, max_generations=5, seed=seed, stagnation_window=100)
    best, log = evolve(scene.pair, cfg, on_generation=seen.append)
    assert seen == log.generations
    b = log.best_fitness
    assert all(x <= y for x, y in zip(b, b[1:]))
    assert best.min() >= 0 and best.max() <= 3


def test_stagnation_stops_early():
    img = GrayImage(np.full((8, 8), 50))
    _, log = evolve(StereoPair(img, img), GaConfig(d_max=2, population_size=4, max_generations=50, stagnation_window=3))
    # fitness is identically zero, so the run stops after the first window
    assert len(log) == 4


def test_log_csv_format():
    log = EvolutionLog([GenerationStats(0, 2.5, 1.25, 3.14159), GenerationStats(1, 3.0, 2.0, 1.0)])
    lines = log.to_csv().splitlines()
    assert lines[0] == "generation,best_fitness,mean_fitness,millis"
    assert lines[1] == "0,2.5,1.25,3.142"
    assert log.to_csv(timing=False).splitlines()[1] == "0,2.5,1.25,0"
