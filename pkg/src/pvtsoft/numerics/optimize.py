"""Box-bounded minimizers: real-coded GA, particle swarm, and Levenberg-Marquardt.

GA and PSO evaluate an objective f: R^d -> cost over a bounds box and keep
a best-so-far history with one entry per iteration; histories are
non-increasing by construction. Candidates whose cost comes back non-finite
are discarded (never become best, never win a tournament). All random
draws for candidate i of generation g come from stream (seed, g, i), so the
result does not depend on evaluation order.

lm_fit is a damped Gauss-Newton loop over an explicit residual vector and
Jacobian; it is also the trainer behind the MLP's second-order mode.
"""

import csv
from dataclasses import dataclass

import numpy as np

from ..errors import OptimizationError, ValidationError
from .rng import stream

TOURNAMENT_SIZE = 3
BLEND_ALPHA = 0.5
ELITE_COUNT = 1
LAMBDA_STALL = 1e12


@dataclass
class GaConfig:
    """Real-coded genetic algorithm settings.

    `bounds` is one (low, high) pair per gene. `mutation_sd` of None means
    10% of each gene's range.
    """

    population: int
    iterations: int
    bounds: list[tuple[float, float]]
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    mutation_sd: float | None = None
    seed: int = 0

    def __post_init__(self):
        _check_common(self.population, self.iterations, self.bounds)
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValidationError("crossover_rate must be in [0, 1]")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValidationError("mutation_rate must be in [0, 1]")
        if self.mutation_sd is not None and self.mutation_sd <= 0:
            raise ValidationError("mutation_sd must be positive")


@dataclass
class PsoConfig:
    """Particle swarm settings; defaults follow the reference configuration
    (c1 = 1, c2 = 2) with a fixed constriction-style inertia."""

    population: int
    iterations: int
    bounds: list[tuple[float, float]]
    c1: float = 1.0
    c2: float = 2.0
    inertia: float = 0.729
    seed: int = 0

    def __post_init__(self):
        _check_common(self.population, self.iterations, self.bounds)
        if self.c1 < 0 or self.c2 < 0:
            raise ValidationError("acceleration coefficients must be non-negative")


@dataclass
class LmConfig:
    """Levenberg-Marquardt damping schedule."""

    max_iterations: int = 100
    lambda_init: float = 1e-3
    lambda_up: float = 10.0
    lambda_down: float = 0.1
    tolerance: float = 1e-10

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be >= 1")
        if self.lambda_init <= 0:
            raise ValidationError("lambda_init must be positive")
        if not self.lambda_up > 1 > self.lambda_down > 0:
            raise ValidationError("need lambda_up > 1 > lambda_down > 0")


def _check_common(population, iterations, bounds):
    if population < 2:
        raise ValidationError("population must be >= 2")
    if iterations < 1:
        raise ValidationError("iterations must be >= 1")
    if len(bounds) == 0:
        raise ValidationError("bounds must contain at least one dimension")
    for lo, hi in bounds:
        if not lo < hi:
            raise ValidationError(f"bound ({lo}, {hi}) must satisfy low < high")


@dataclass
class OptResult:
    """Best point and cost plus the per-iteration best-so-far history."""

    point: np.ndarray
    cost: float
    history: np.ndarray


@dataclass
class LmResult:
    params: np.ndarray
    cost: float
    history: np.ndarray
    status: str  # converged | max_iterations | stalled
    accepted_steps: int = 0


def _evaluate(objective, pop: np.ndarray) -> np.ndarray:
    costs = np.empty(pop.shape[0])
    for i, x in enumerate(pop):
        c = objective(x)
        costs[i] = c if np.isfinite(c) else np.inf
    return costs


def ga_minimize(objective, cfg: GaConfig) -> OptResult:
    """Minimize over the bounds box with tournament selection, blend
    crossover, Gaussian mutation, and single-individual elitism."""
    bounds = np.asarray(cfg.bounds, dtype=float)
    lo, hi = bounds[:, 0], bounds[:, 1]
    d = len(bounds)
    mut_sd = np.full(d, cfg.mutation_sd) if cfg.mutation_sd is not None else 0.1 * (hi - lo)

    pop = np.empty((cfg.population, d))
    for i in range(cfg.population):
        pop[i] = lo + stream(cfg.seed, 0, i).random(d) * (hi - lo)
    costs = _evaluate(objective, pop)
    if not np.any(np.isfinite(costs)):
        raise OptimizationError("objective returned a non-finite cost for every initial candidate")

    best = int(np.argmin(costs))
    best_x, best_c = pop[best].copy(), float(costs[best])
    history = np.empty(cfg.iterations)

    for gen in range(1, cfg.iterations + 1):
        new_pop = np.empty_like(pop)
        new_costs = np.empty_like(costs)
        new_pop[0], new_costs[0] = best_x, best_c  # elitism
        for i in range(ELITE_COUNT, cfg.population):
            rng = stream(cfg.seed, gen, i)
            p1 = _tournament(pop, costs, rng)
            p2 = _tournament(pop, costs, rng)
            if rng.random() < cfg.crossover_rate:
                child = _blend(p1, p2, rng)
            else:
                child = p1.copy()
            mutate = rng.random(d) < cfg.mutation_rate
            child = np.where(mutate, child + rng.normal(0.0, mut_sd), child)
            new_pop[i] = np.clip(child, lo, hi)
            c = objective(new_pop[i])
            new_costs[i] = c if np.isfinite(c) else np.inf
        pop, costs = new_pop, new_costs
        gen_best = int(np.argmin(costs))
        if costs[gen_best] < best_c:
            best_x, best_c = pop[gen_best].copy(), float(costs[gen_best])
        history[gen - 1] = best_c

    return OptResult(best_x, best_c, history)


def _tournament(pop, costs, rng):
    idx = rng.integers(pop.shape[0], size=TOURNAMENT_SIZE)
    return pop[idx[np.argmin(costs[idx])]]


def _blend(p1, p2, rng):
    low = np.minimum(p1, p2)
    span = np.abs(p1 - p2)
    return low - BLEND_ALPHA * span + rng.random(p1.size) * (1 + 2 * BLEND_ALPHA) * span


def pso_minimize(objective, cfg: PsoConfig, init: np.ndarray | None = None) -> OptResult:
    """Synchronous PSO: v <- w v + c1 r1 (pbest - x) + c2 r2 (gbest - x),
    positions clamped to the bounds box.

    When `init` is given, particle 0 starts there (used to seed a search
    from a heuristic initialization) and the rest start uniformly random.
    """
    bounds = np.asarray(cfg.bounds, dtype=float)
    lo, hi = bounds[:, 0], bounds[:, 1]
    d = len(bounds)

    x = np.empty((cfg.population, d))
    for i in range(cfg.population):
        x[i] = lo + stream(cfg.seed, 0, i).random(d) * (hi - lo)
    if init is not None:
        if len(init) != d:
            raise ValidationError("init length does not match bounds dimension")
        x[0] = np.clip(np.asarray(init, dtype=float), lo, hi)
    v = np.zeros_like(x)

    costs = _evaluate(objective, x)
    if not np.any(np.isfinite(costs)):
        raise OptimizationError("objective returned a non-finite cost for every initial candidate")
    pbest, pbest_c = x.copy(), costs.copy()
    g = int(np.argmin(costs))
    gbest, gbest_c = x[g].copy(), float(costs[g])
    history = np.empty(cfg.iterations)

    for it in range(1, cfg.iterations + 1):
        for i in range(cfg.population):
            rng = stream(cfg.seed, it, i)
            r1, r2 = rng.random(d), rng.random(d)
            v[i] = cfg.inertia * v[i] + cfg.c1 * r1 * (pbest[i] - x[i]) + cfg.c2 * r2 * (gbest - x[i])
            x[i] = np.clip(x[i] + v[i], lo, hi)
        costs = _evaluate(objective, x)
        improved = costs < pbest_c
        pbest[improved] = x[improved]
        pbest_c[improved] = costs[improved]
        g = int(np.argmin(pbest_c))
        if pbest_c[g] < gbest_c:
            gbest, gbest_c = pbest[g].copy(), float(pbest_c[g])
        history[it - 1] = gbest_c

    return OptResult(gbest, gbest_c, history)


def minimize(objective, cfg) -> OptResult:
    """Dispatch on config type, so callers can take either optimizer."""
    if isinstance(cfg, GaConfig):
        return ga_minimize(objective, cfg)
    if isinstance(cfg, PsoConfig):
        return pso_minimize(objective, cfg)
    raise ValidationError(f"unsupported optimizer config type {type(cfg).__name__}")


def lm_fit(residual_fn, jacobian_fn, init: np.ndarray, cfg: LmConfig, monitor=None) -> LmResult:
    """Damped least squares: solve (J'J + lambda I) delta = -J'r per step,
    growing lambda on rejected steps and shrinking it on accepted ones.

    Terminates when the cost change of an accepted step falls below
    cfg.tolerance, when max_iterations is reached, or with status "stalled"
    when no descent direction exists (zero gradient at nonzero residual, or
    lambda grows past LAMBDA_STALL without an acceptable step).

    `monitor(params, cost)`, when given, is called at the initial point and
    after every accepted step; callers use it to track held-out error.
    """
    from .linalg import solve_linear  # local import avoids cycle at module load

    x = np.asarray(init, dtype=float).copy()
    r = np.asarray(residual_fn(x), dtype=float)
    if not np.all(np.isfinite(r)):
        raise OptimizationError("residuals are non-finite at the initial point")
    cost = float(r @ r)
    lam = cfg.lambda_init
    history = [cost]
    status = "max_iterations"
    accepted = 0
    if monitor is not None:
        monitor(x, cost)

    for _ in range(cfg.max_iterations):
        jac = np.asarray(jacobian_fn(x), dtype=float)
        grad = jac.T @ r
        if np.max(np.abs(grad)) == 0.0:
            status = "converged" if cost <= cfg.tolerance else "stalled"
            break
        a = jac.T @ jac
        a[np.diag_indices_from(a)] += lam
        try:
            delta = solve_linear(a, -grad)
        except Exception:
            lam *= cfg.lambda_up
            if lam > LAMBDA_STALL:
                status = "stalled"
                break
            continue
        x_new = x + delta
        r_new = np.asarray(residual_fn(x_new), dtype=float)
        cost_new = float(r_new @ r_new) if np.all(np.isfinite(r_new)) else np.inf
        if cost_new < cost:
            change = cost - cost_new
            x, r, cost = x_new, r_new, cost_new
            lam *= cfg.lambda_down
            history.append(cost)
            accepted += 1
            if monitor is not None:
                monitor(x, cost)
            if change <= cfg.tolerance:
                status = "converged"
                break
        else:
            lam *= cfg.lambda_up
            if lam > LAMBDA_STALL:
                status = "stalled"
                break

    return LmResult(x, cost, np.asarray(history), status, accepted)


def write_history_csv(history: np.ndarray, path) -> None:
    """Export a best-cost history as CSV with columns (iteration, best_cost)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "best_cost"])
        for i, c in enumerate(history):
            writer.writerow([i + 1, repr(float(c))])
