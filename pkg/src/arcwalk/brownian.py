"""Function-valued hidden chain built from Brownian bridges and meanders.

Paths live on the uniform grid s_k = k/n, k = 0..n.  Samplers come in two
forms: single-path functions returning :class:`BrownianPath`, and ``*_batch``
functions returning 2-D arrays with one path per row.  The single-path form
is the batch form with one row, so both consume the generator identically.

One hidden step from occupation level y:

* sample a standard bridge B, a standard meander M and a sign R;
* splice ``sqrt(y) B(s/y)`` on [0, y] with
  ``R sqrt(1-y) M((s-y)/(1-y))`` on (y, 1].

The square-root amplitudes are Brownian scaling; without them the spliced
path does not have the covariance min(s, s') of Brownian motion.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass

import numpy as np

from .density import arcsine_ppf
from .seeding import map_replicates, split_counts

DEFAULT_N = 4096
BLOCK_ROWS = 512


class PathKind(str, enum.Enum):
    FREE = "Free"
    BRIDGE = "Bridge"
    MEANDER = "Meander"
    SPLICED = "Spliced"


@dataclass(frozen=True)
class PathGrid:
    n: int = DEFAULT_N

    def __post_init__(self):
        n = self.n
        if n < 2 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 2, got {n}")

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n


@dataclass(frozen=True)
class BrownianPath:
    grid: PathGrid
    values: np.ndarray
    kind: PathKind

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "value"])
        for s, v in zip(self.grid.points, self.values):
            w.writerow([repr(float(s)), repr(float(v))])
        return buf.getvalue()


@dataclass(frozen=True)
class SpliceInput:
    bridge: BrownianPath
    meander: BrownianPath
    rademacher: int
    split: float

    def __post_init__(self):
        if self.bridge.kind is not PathKind.BRIDGE:
            raise ValueError("splice needs a Bridge path on the left")
        if self.meander.kind is not PathKind.MEANDER:
            raise ValueError("splice needs a Meander path on the right")
        if self.rademacher not in (-1, 1):
            raise ValueError("rademacher must be +1 or -1")
        if self.bridge.grid != self.meander.grid:
            raise ValueError("bridge and meander must share a grid")


def _grid_n(grid) -> int:
    return grid.n if isinstance(grid, PathGrid) else PathGrid(int(grid)).n


# -- batch samplers --------------------------------------------------------

def sample_bm_batch(grid, size: int, rng: np.random.Generator) -> np.ndarray:
    n = _grid_n(grid)
    out = np.zeros((size, n + 1))
    inc = rng.standard_normal((size, n))
    inc *= math.sqrt(1.0 / n)
    np.cumsum(inc, axis=1, out=out[:, 1:])
    return out


def sample_bridge_batch(grid, size: int, rng: np.random.Generator) -> np.ndarray:
    n = _grid_n(grid)
    w = sample_bm_batch(n, size, rng)
    s = np.arange(n + 1) / n
    w -= s * w[:, -1:]
    w[:, -1] = 0.0
    return w


def sample_meander_batch(grid, size: int, rng: np.random.Generator) -> np.ndarray:
    """Meanders as Bessel(3) bridges from 0 to a Rayleigh endpoint.

    Draw order: the endpoints, then three bridge batches.
    """
    n = _grid_n(grid)
    r = rng.rayleigh(1.0, size)
    s = np.arange(n + 1) / n
    out = sample_bridge_batch(n, size, rng)
    out += s * r[:, None]
    np.square(out, out=out)
    for _ in range(2):
        b = sample_bridge_batch(n, size, rng)
        out += b * b
    np.sqrt(out, out=out)
    out[:, -1] = r  # exact endpoint, avoids sqrt round-off
    return out


def _left_mask(n: int, splits: np.ndarray) -> np.ndarray:
    """Grid points read from the bridge: s_k up to the first s_k >= split."""
    k_star = np.ceil(splits * n - 1e-9)
    return np.arange(n + 1)[None, :] <= k_star


def splice_batch(bridges: np.ndarray, meanders: np.ndarray, signs,
                 splits) -> np.ndarray:
    """Row-wise splice.

    The straddling grid point (first s_k >= split) takes the bridge branch;
    it reads the bridge past its end, i.e. the exact zero B(1) = 0, so the
    spliced path touches zero within one cell of the split.
    """
    splits = np.asarray(splits, dtype=float).reshape(-1, 1)
    signs = np.asarray(signs, dtype=float).reshape(-1, 1)
    if np.any((splits <= 0) | (splits >= 1)):
        raise ValueError("split points must lie strictly inside (0, 1)")
    n = bridges.shape[1] - 1
    s = np.arange(n + 1)[None, :] / n
    left = _left_mask(n, splits)
    # position on the source path's own grid, in units of cells
    pos = np.where(left, s / splits, (s - splits) / (1.0 - splits))
    pos *= n
    np.clip(pos, 0.0, n, out=pos)
    idx = np.minimum(pos.astype(np.int64), n - 1)
    frac = pos - idx
    # one gather from [bridge | meander] rows
    idx += np.where(left, 0, n + 1)
    both = np.concatenate([bridges, meanders], axis=1)
    lo = np.take_along_axis(both, idx, axis=1)
    hi = np.take_along_axis(both, idx + 1, axis=1)
    out = lo + frac * (hi - lo)
    out *= np.where(left, np.sqrt(splits), signs * np.sqrt(1.0 - splits))
    return out


def occupation_times(values: np.ndarray) -> np.ndarray:
    """Fraction of grid points k = 1..n where the path is strictly positive."""
    values = np.atleast_2d(values)
    return (values[:, 1:] > 0).mean(axis=1)


def last_zeros(values: np.ndarray, rng: np.random.Generator | None = None
               ) -> np.ndarray:
    """Last sign change or touch of zero, linearly interpolated, per row.

    Returns 0 when the path never returns to zero after s = 0.  With an
    ``rng``, cells whose endpoints share a sign also count as containing a
    zero with the Brownian-bridge hitting probability exp(-2 a b n); this
    removes most of the grid bias near s = 0, where crossings hide inside
    cells.
    """
    values = np.atleast_2d(values)
    n = values.shape[1] - 1
    a, b = values[:, :-1], values[:, 1:]
    ab = a * b
    hit = ab <= 0
    if rng is not None:
        u = rng.random(ab.shape)
        with np.errstate(over="ignore"):
            hit |= u < np.exp(-2.0 * n * ab)
    rows = np.arange(values.shape[0])
    j = n - 1 - np.argmax(hit[:, ::-1], axis=1)
    none = ~hit[rows, j]
    va, vb = a[rows, j], b[rows, j]
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(vb == 0, 1.0, np.where(va == 0, 0.0, va / (va - vb)))
        # hidden crossing: weight toward the endpoint nearer zero
        hidden = va * vb > 0
        frac = np.where(hidden, np.abs(va) / (np.abs(va) + np.abs(vb)), frac)
    out = (j + frac) / n
    out[none] = 0.0
    return out


@dataclass
class HiddenBatch:
    """Result of one hidden step per row.

    ``bridge_occupation`` is measured on the bridge's own grid;
    ``sampled_bridge_occupation`` on the points where the splice reads the
    bridge (s_k / y for s_k <= y).  Only the latter satisfies the splice
    decomposition to within 2/n pathwise.
    """

    values: np.ndarray
    occupation: np.ndarray
    rademacher: np.ndarray
    bridge_occupation: np.ndarray
    sampled_bridge_occupation: np.ndarray


def hidden_step_batch(prev_occupation, grid, rng: np.random.Generator
                      ) -> HiddenBatch:
    """Advance a batch of hidden-chain states; one row per previous level.

    Draw order: bridges, meanders, signs.
    """
    prev = np.atleast_1d(np.asarray(prev_occupation, dtype=float))
    n = _grid_n(grid)
    size = prev.size
    bridges = sample_bridge_batch(n, size, rng)
    meanders = sample_meander_batch(n, size, rng)
    signs = np.where(rng.random(size) < 0.5, -1, 1)
    vals = splice_batch(bridges, meanders, signs, prev)
    left = _left_mask(n, prev[:, None])[:, 1:]
    n_left = np.maximum(left.sum(axis=1), 1)
    sampled = ((vals[:, 1:] > 0) & left).sum(axis=1) / n_left
    return HiddenBatch(vals, occupation_times(vals), signs,
                       occupation_times(bridges), sampled)


# -- single-path API -------------------------------------------------------

def sample_bm(grid: PathGrid, rng: np.random.Generator) -> BrownianPath:
    return BrownianPath(grid, sample_bm_batch(grid, 1, rng)[0], PathKind.FREE)


def sample_bridge(grid: PathGrid, rng: np.random.Generator) -> BrownianPath:
    return BrownianPath(grid, sample_bridge_batch(grid, 1, rng)[0], PathKind.BRIDGE)


def sample_meander(grid: PathGrid, rng: np.random.Generator) -> BrownianPath:
    return BrownianPath(grid, sample_meander_batch(grid, 1, rng)[0], PathKind.MEANDER)


def splice(inp: SpliceInput) -> BrownianPath:
    if not 0.0 < inp.split < 1.0:
        raise ValueError(f"split={inp.split!r} must lie strictly inside (0, 1)")
    vals = splice_batch(inp.bridge.values[None, :], inp.meander.values[None, :],
                        [inp.rademacher], [inp.split])
    return BrownianPath(inp.bridge.grid, vals[0], PathKind.SPLICED)


def occupation_time(path: BrownianPath) -> float:
    return float(occupation_times(path.values)[0])


def last_zero(path: BrownianPath, rng: np.random.Generator | None = None
              ) -> float:
    return float(last_zeros(path.values, rng)[0])


def hidden_step(prev_occupation: float, grid: PathGrid,
                rng: np.random.Generator) -> tuple[BrownianPath, float]:
    if not 0.0 < prev_occupation < 1.0:
        raise ValueError("previous occupation must lie strictly inside (0, 1)")
    hb = hidden_step_batch([prev_occupation], grid, rng)
    return BrownianPath(grid, hb.values[0], PathKind.SPLICED), float(hb.occupation[0])


# -- Monte Carlo drivers ---------------------------------------------------
# Each driver splits the sample count into fixed blocks with derived seeds,
# so results depend only on (seed, samples, n).

def _collect(fn, samples: int, seed: int):
    return map_replicates(fn, split_counts(samples, BLOCK_ROWS), seed)


def occupation_samples(n: int, samples: int, seed: int,
                       kind: PathKind = PathKind.FREE) -> np.ndarray:
    sampler = {PathKind.FREE: sample_bm_batch,
               PathKind.BRIDGE: sample_bridge_batch,
               PathKind.MEANDER: sample_meander_batch}[PathKind(kind)]
    parts = _collect(lambda rng, m: occupation_times(sampler(n, m, rng)),
                     samples, seed)
    return np.concatenate(parts)


def last_zero_samples(n: int, samples: int, seed: int,
                      bridge_correction: bool = False) -> np.ndarray:
    def block(rng, m):
        paths = sample_bm_batch(n, m, rng)
        return last_zeros(paths, rng if bridge_correction else None)

    parts = _collect(block, samples, seed)
    return np.concatenate(parts)


def spliced_marginals(n: int, samples: int, seed: int, at) -> np.ndarray:
    """Values of spliced paths at times ``at``, splits drawn from arcsine.

    Returns an array of shape (samples, len(at)).
    """
    idx = np.rint(np.asarray(at, dtype=float) * n).astype(np.int64)

    def block(rng, m):
        splits = arcsine_ppf(rng.random(m))
        splits = np.clip(splits, 1e-12, 1.0 - 1e-12)
        hb = hidden_step_batch(splits, n, rng)
        return hb.values[:, idx]

    return np.concatenate(_collect(block, samples, seed))


def iterate_hidden_chain(n: int, samples: int, seed: int, iterations: int,
                         at=(0.25, 0.5, 0.75)):
    """Start from free Brownian motion and apply ``iterations`` hidden steps.

    Returns (final occupation times, final path values at ``at``).
    """
    idx = np.rint(np.asarray(at, dtype=float) * n).astype(np.int64)

    def block(rng, m):
        occ = occupation_times(sample_bm_batch(n, m, rng))
        vals = None
        for _ in range(iterations):
            # occupation 0 or 1 is a grid artifact; keep the split interior
            occ = np.clip(occ, 0.5 / n, 1.0 - 0.5 / n)
            hb = hidden_step_batch(occ, n, rng)
            occ, vals = hb.occupation, hb.values[:, idx]
        return occ, vals

    parts = _collect(block, samples, seed)
    return (np.concatenate([p[0] for p in parts]),
            np.concatenate([p[1] for p in parts]))


def coupling_samples(n: int, samples: int, seed: int, prev: float) -> HiddenBatch:
    """Hidden steps from a fixed previous level; paths are dropped."""
    def block(rng, m):
        hb = hidden_step_batch(np.full(m, prev), n, rng)
        hb.values = None
        return hb

    parts = _collect(block, samples, seed)
    cat = lambda name: np.concatenate([getattr(p, name) for p in parts])  # noqa: E731
    return HiddenBatch(None, cat("occupation"), cat("rademacher"),
                       cat("bridge_occupation"), cat("sampled_bridge_occupation"))


def covariance_with_se(u: np.ndarray, v: np.ndarray) -> tuple[float, float]:
    """Sample covariance and its standard error from the product terms."""
    prod = (u - u.mean()) * (v - v.mean())
    return float(prod.mean()), float(prod.std(ddof=1) / math.sqrt(prod.size))
