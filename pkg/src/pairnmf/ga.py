"""Continuous genetic algorithm over penalty-weight vectors in [0, 1]^T.

Tournament selection, one-point crossover, per-gene Gaussian mutation with
clamping, and a best-so-far archive (the archive, not the final population,
defines the result, which makes the fitness trace non-decreasing). Fitness
evaluations are memoized: selection and crossover mostly produce clones,
and the fitness function is required to be deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ContractViolation


@dataclass
class Chromosome:
    genes: np.ndarray  # values in [0, 1]
    fitness: Optional[float] = None

    def copy(self) -> "Chromosome":
        return Chromosome(self.genes.copy(), self.fitness)


@dataclass(frozen=True)
class GaConfig:
    pop_size: int = 10
    generations: int = 20
    crossover_prob: float = 0.2
    mutation_prob: float = 0.05
    mutation_sigma: float = 0.1
    tournament_size: int = 3
    seed: int = 0
    patience: int = 5  # generations without improvement before early stop

    def __post_init__(self):
        if self.pop_size < 2:
            raise ContractViolation("pop_size must be >= 2")
        for name in ("crossover_prob", "mutation_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ContractViolation(f"{name} must be in [0, 1]")
        if self.tournament_size < 1:
            raise ContractViolation("tournament_size must be >= 1")
        if self.patience < 1:
            raise ContractViolation("patience must be >= 1")


@dataclass
class GaTrace:
    best_fitness_per_generation: list = field(default_factory=list)
    best_chromosome: Optional[Chromosome] = None


def _random_population(t_len, config, rng):
    return [Chromosome(rng.random(t_len)) for _ in range(config.pop_size)]


def init_population(t_len: int, config: GaConfig) -> list:
    """pop_size chromosomes with genes i.i.d. uniform in [0, 1], seeded."""
    if t_len < 1:
        raise ContractViolation("t_len must be >= 1")
    return _random_population(t_len, config, np.random.default_rng(config.seed))


def tournament_select(pop, config: GaConfig, rng) -> list:
    """pop_size winners of size-`tournament_size` tournaments drawn with
    replacement; fitness ties go to the first drawn contender."""
    for c in pop:
        if c.fitness is None:
            raise ContractViolation("tournament_select requires evaluated fitnesses")
    winners = []
    for _ in range(len(pop)):
        contenders = rng.integers(0, len(pop), size=config.tournament_size)
        best = pop[contenders[0]]
        for idx in contenders[1:]:
            if pop[idx].fitness > best.fitness:
                best = pop[idx]
        winners.append(best.copy())
    return winners


def one_point_crossover(a: Chromosome, b: Chromosome, config: GaConfig, rng):
    """With probability crossover_prob, swap gene tails after a uniformly
    chosen cut point; length-1 chromosomes pass through unchanged."""
    t_len = len(a.genes)
    if len(b.genes) != t_len:
        raise ContractViolation("parents must have equal gene lengths")
    if t_len < 2:
        return a.copy(), b.copy()
    if rng.random() >= config.crossover_prob:
        return a.copy(), b.copy()
    cut = int(rng.integers(1, t_len))
    child_a = np.concatenate([a.genes[:cut], b.genes[cut:]])
    child_b = np.concatenate([b.genes[:cut], a.genes[cut:]])
    return Chromosome(child_a), Chromosome(child_b)


def mutate(c: Chromosome, config: GaConfig, rng) -> Chromosome:
    """Per-gene Gaussian perturbation (probability mutation_prob, sigma
    mutation_sigma), clamped back to [0, 1]."""
    genes = c.genes.copy()
    changed = False
    for i in range(len(genes)):
        if rng.random() < config.mutation_prob:
            genes[i] = min(1.0, max(0.0, genes[i] + rng.normal(0.0, config.mutation_sigma)))
            changed = True
    return Chromosome(genes, None if changed else c.fitness)


def optimize(
    fitness_fn: Callable[[Chromosome], float],
    t_len: int,
    config: GaConfig,
) -> GaTrace:
    """Run the GA and return the best-so-far chromosome and fitness trace.

    Stops after `generations` generations, or earlier once `patience`
    consecutive generations fail to improve the archived best. The fitness
    function must be deterministic; repeated gene vectors are not
    re-evaluated.
    """
    if t_len < 1:
        raise ContractViolation("t_len must be >= 1")
    rng = np.random.default_rng(config.seed)
    memo: dict = {}

    def evaluate(ch: Chromosome) -> None:
        if ch.fitness is not None:
            return
        key = ch.genes.tobytes()
        if key not in memo:
            memo[key] = float(fitness_fn(ch))
        ch.fitness = memo[key]

    pop = _random_population(t_len, config, rng)
    for ch in pop:
        evaluate(ch)
    archive = max(pop, key=lambda c: c.fitness).copy()

    trace = GaTrace(best_chromosome=archive)
    stall = 0
    for _gen in range(config.generations):
        selected = tournament_select(pop, config, rng)
        children = []
        for i in range(0, len(selected) - 1, 2):
            children.extend(one_point_crossover(selected[i], selected[i + 1], config, rng))
        if len(selected) % 2 == 1:
            children.append(selected[-1].copy())
        pop = [mutate(ch, config, rng) for ch in children]
        for ch in pop:
            evaluate(ch)
        gen_best = max(pop, key=lambda c: c.fitness)
        if gen_best.fitness > archive.fitness:
            archive = gen_best.copy()
            stall = 0
        else:
            stall += 1
        trace.best_fitness_per_generation.append(archive.fitness)
        if stall >= config.patience:
            break
    trace.best_chromosome = archive
    return trace
