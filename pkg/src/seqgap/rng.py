"""Counter-based, splittable random streams.

Every routine that consumes randomness takes an explicit ``numpy.random.Generator``.
Streams are backed by Philox (counter-based) so that split children are
statistically independent and the whole tree is reproducible from one seed.
A generator is owned by a single caller at a time; parallel work splits
sub-streams up front and reduces results in a fixed order.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """Root stream for a given seed."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.Philox(seed))


def split(rng: np.random.Generator, k: int) -> list[np.random.Generator]:
    """Split ``k`` independent child streams off ``rng``.

    Children are derived from the generator's seed sequence; repeated calls
    yield fresh, non-overlapping children.
    """
    ss = rng.bit_generator.seed_seq
    return [np.random.Generator(np.random.Philox(child)) for child in ss.spawn(k)]


def sample_subset(m: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform k-subset of {0, ..., m-1} via a partial Fisher-Yates shuffle.

    Returns the subset as a sorted int array. O(m) memory, O(m + k) time.
    """
    if not 0 <= k <= m:
        raise ValueError(f"need 0 <= k <= m, got k={k}, m={m}")
    arr = np.arange(m)
    for t in range(k):
        j = t + int(rng.integers(m - t))
        arr[t], arr[j] = arr[j], arr[t]
    out = arr[:k]
    out.sort()
    return out


def sample_subsets_batch(
    m: int, k: int, size: int, rng: np.random.Generator
) -> np.ndarray:
    """``size`` independent uniform k-subsets of {0, ..., m-1}, one per row.

    Vectorized: each row is the index set of the k smallest of m iid uniform
    keys, which is exactly uniform over k-subsets. Rows are sorted.
    """
    keys = rng.random((size, m))
    idx = np.argpartition(keys, k - 1, axis=1)[:, :k] if k > 0 else np.empty((size, 0), int)
    idx.sort(axis=1)
    return idx
