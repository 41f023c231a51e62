"""Moving block bootstrap over whole time rows.

Every draw is a deterministic function of ``(seed, draw_id, attempt)``: the
generator is seeded from a :class:`numpy.random.SeedSequence` built on that
key, so draws can be produced in any order or in parallel.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

# stream tags keep bootstrap and simulation randomness disjoint
STREAM_BOOTSTRAP = 0
STREAM_SIMULATION = 1

_U64 = 2**64


def keyed_rng(seed, *key):
    """Generator determined only by ``seed`` and the integer ``key``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, key)])))


@dataclass(frozen=True)
class MbbConfig:
    """Block length, number of draws and seed of a block bootstrap."""

    block_length: int
    draws: int = 999
    seed: int = 0

    def __post_init__(self):
        for name in ("block_length", "draws", "seed"):
            val = getattr(self, name)
            if isinstance(val, (bool, np.bool_)) or int(val) != val:
                raise ValidationError(f"{name} must be an integer, got {val!r}")
            object.__setattr__(self, name, int(val))
        if self.block_length < 1:
            raise ValidationError(f"block length must be >= 1, got {self.block_length}")
        if self.draws < 1:
            raise ValidationError(f"number of draws must be >= 1, got {self.draws}")
        if not 0 <= self.seed < _U64:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    def check_length(self, P):
        if self.block_length > P:
            raise ValidationError(f"block length {self.block_length} exceeds sample length {P}")


def n_blocks(P, block_length):
    return -(-P // block_length)


def indices_from_starts(starts, block_length, P):
    """Concatenate runs ``s, s+1, ..., s+l-1`` and truncate to ``P``."""
    starts = np.asarray(starts, dtype=np.int64)
    runs = starts[:, None] + np.arange(block_length)[None, :]
    return runs.ravel()[:P]


def block_starts(P, cfg, draw_id, attempt=0):
    cfg.check_length(P)
    rng = keyed_rng(cfg.seed, STREAM_BOOTSTRAP, draw_id, attempt)
    return rng.integers(0, P - cfg.block_length + 1, size=n_blocks(P, cfg.block_length))


def draw_block_indices(P, cfg, draw_id, attempt=0):
    """Index vector of one block-bootstrap draw over rows ``0..P-1``.

    Parameters
    ----------
    P : int
        Evaluation sample length.
    cfg : MbbConfig
    draw_id : int
        Draw counter; together with ``cfg.seed`` it fixes the result.
    attempt : int, optional
        Retry counter used when a draw has to be replaced.
    """
    starts = block_starts(P, cfg, draw_id, attempt)
    return indices_from_starts(starts, cfg.block_length, P)


def index_plan(P, cfg):
    """All ``cfg.draws`` index vectors stacked as a (B, P) array."""
    return np.stack([draw_block_indices(P, cfg, b) for b in range(cfg.draws)])


def resample(sample, indices):
    """Row-resample any sample container; row ``t`` becomes row ``indices[t]``."""
    idx = np.asarray(indices)
    if idx.ndim != 1 or idx.size != sample.P:
        raise IndexError(f"index vector must have length {sample.P}")
    if idx.size and (idx.min() < 0 or idx.max() >= sample.P):
        raise IndexError("bootstrap index out of range")
    return sample.take(idx)
