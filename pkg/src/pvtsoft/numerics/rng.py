"""Seeded, splittable random streams.

Every stochastic routine in the toolkit draws from a stream addressed by
(seed, *path). Identical addresses give identical sequences and distinct
addresses give statistically independent ones, so optimizers can evaluate
a generation's candidates in any order (or concurrently) and still produce
bit-identical results: candidate draws are addressed (seed, generation,
candidate index).

Streams are numpy Philox generators keyed through SeedSequence, a
counter-based construction whose output is stable across platforms and
numpy versions. The identifier below is echoed into run reports so a
report pins the generator that produced it.
"""

import numpy as np

ALGORITHM_ID = "numpy-philox4x64/seed-sequence"


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator addressed by (seed, *path)."""
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=path)))


def derive_seed(seed: int, index: int) -> int:
    """Derive a stable child seed, used to give pipeline stages independent streams."""
    return int(np.random.SeedSequence(entropy=seed, spawn_key=(index,)).generate_state(1)[0])


def farthest_point_indices(points: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """Pick `count` row indices of `points` by farthest-point traversal.

    The first index is drawn from `rng`; each subsequent pick maximizes the
    minimum Euclidean distance to the rows already chosen (ties resolved by
    lowest index). Used to seed RBF centers and fuzzy cluster centers.
    """
    n = points.shape[0]
    if not 1 <= count <= n:
        raise ValueError(f"count must be in [1, {n}], got {count}")
    chosen = [int(rng.integers(n))]
    min_d2 = np.sum((points - points[chosen[0]]) ** 2, axis=1)
    while len(chosen) < count:
        nxt = int(np.argmax(min_d2))
        chosen.append(nxt)
        d2 = np.sum((points - points[nxt]) ** 2, axis=1)
        min_d2 = np.minimum(min_d2, d2)
    return np.asarray(chosen, dtype=int)
