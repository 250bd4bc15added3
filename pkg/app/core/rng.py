"""
Reproducible randomness (philox4x64-v1)

All draws come from numpy's counter-based Philox-4x64-10 bit generator.

- Streams: ``generator(seed, *path)`` keys Philox with the 64-bit seed when no
  path is given, otherwise with the first two words of
  ``SeedSequence(seed, spawn_key=path).generate_state(2, uint64)``. Paths split a
  seed into independent, order-free substreams (trial ``i`` uses path ``(i,)``).
- Single queries: ``uniforms_at(seed, counter, lane)`` reads raw outputs of
  Philox with key ``seed`` and counter ``counter + lane * 2**64`` and maps each
  64-bit word ``w`` to ``(w >> 11) * 2**-53``. Nothing is shared between calls;
  ``uniforms_block`` returns the same values for a run of counters at once.

See docs/rng.md for the full description.
"""

import numpy as np

from app.core.config import settings

MASK64 = (1 << 64) - 1


def normalize_seed(seed: int) -> int:
    """Map any Python int onto the 64-bit seed space"""
    return int(seed) & MASK64


def _path_key(seed: int, path: tuple[int, ...]) -> np.ndarray:
    sequence = np.random.SeedSequence(normalize_seed(seed), spawn_key=tuple(int(p) for p in path))
    return sequence.generate_state(2, dtype=np.uint64)


def generator(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for ``seed`` split along ``path``"""
    if path:
        bit_generator = np.random.Philox(key=_path_key(seed, path))
    else:
        bit_generator = np.random.Philox(key=normalize_seed(seed))
    return np.random.Generator(bit_generator)


def derive_seed(seed: int, *path: int) -> int:
    """64-bit child seed of ``seed`` along ``path``"""
    return int(_path_key(seed, path)[0])


def uniforms_at(seed: int, counter: int, lane: int = 0, count: int = 2) -> np.ndarray:
    """``count`` uniforms in [0, 1) keyed by (seed, counter, lane)"""
    bit_generator = np.random.Philox(
        key=normalize_seed(seed),
        counter=(int(counter) & MASK64) | ((int(lane) & MASK64) << 64),
    )
    raw = bit_generator.random_raw(count)
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def uniforms_block(seed: int, start: int, n: int, lane: int = 0) -> np.ndarray:
    """Rows i of the result equal ``uniforms_at(seed, start + i, lane)``, shape (n, 2)

    Philox produces four words per counter value, and numpy advances the counter
    before generating, so one stream started at ``start`` yields the first two
    words of every later counter in order.
    """
    bit_generator = np.random.Philox(
        key=normalize_seed(seed),
        counter=(int(start) & MASK64) | ((int(lane) & MASK64) << 64),
    )
    raw = bit_generator.random_raw(4 * n).reshape(n, 4)[:, :2]
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def describe() -> dict:
    return {"name": settings.RNG_NAME, "bit_generator": "Philox4x64-10", "splitting": "SeedSequence.spawn_key"}
