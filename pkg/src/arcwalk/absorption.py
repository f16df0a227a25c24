"""Absorbing extension of the p < 0 walk.

For p < 0 the walk drifts toward the nearer endpoint and its law converges
to a Bernoulli distribution on {0, 1}.  A run is declared absorbed once it
enters the band [0, eps] or [1 - eps, 1].
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .density import lp_mean
from .kernels import UniformStream, Variant, WalkParams, step, step_many
from .seeding import make_rng, map_replicates, split_counts

DEFAULT_EPS = 1e-9
DEFAULT_MAX_STEPS = 10_000


class Outcome(str, enum.Enum):
    ZERO = "AbsorbedAtZero"
    ONE = "AbsorbedAtOne"
    UNDECIDED = "Undecided"


def bernoulli_limit_mean(x: float, p: float) -> float:
    """Limiting probability of absorption at 1 when started from ``x``.

    1/2 - (x**(p-1) - (1-x)**(p-1)) / (2**(2 - 1/p) * M_p(x, 1-x)**(p-1))
    """
    if not p < 0:
        raise ValueError("the absorbing limit needs p < 0")
    if not 0.0 < x < 1.0:
        raise ValueError(f"x={x!r} must lie strictly inside (0, 1)")
    m = lp_mean(x, 1.0 - x, p)
    # ratio of powers done in logs; both terms share the exponent p - 1
    lm = math.log(m)
    scale = (2.0 - 1.0 / p) * math.log(2.0)
    t1 = math.exp((p - 1.0) * (math.log(x) - lm) - scale)
    t2 = math.exp((p - 1.0) * (math.log1p(-x) - lm) - scale)
    return 0.5 - (t1 - t2)


def _classify(x: float, eps: float):
    if x <= eps:
        return Outcome.ZERO
    if x >= 1.0 - eps:
        return Outcome.ONE
    return None


def simulate_absorbing(p: float, x0: float, max_steps: int = DEFAULT_MAX_STEPS,
                       eps: float = DEFAULT_EPS, seed: int = 0) -> Outcome:
    """Run one absorbing chain until it enters an eps-band or times out."""
    params = WalkParams(Variant.PABSORBING, p)
    x = float(x0)
    hit = _classify(x, eps)
    if hit is not None:
        return hit
    stream = UniformStream(make_rng(seed), block=256)
    for _ in range(max_steps):
        x = step(x, params, stream)
        hit = _classify(x, eps)
        if hit is not None:
            return hit
    return Outcome.UNDECIDED


@dataclass
class AbsorptionSummary:
    p: float
    x0: float
    runs: int
    at_one: int
    at_zero: int
    undecided: int
    eps: float
    max_steps: int

    @property
    def decided(self) -> int:
        return self.at_one + self.at_zero

    @property
    def frac_one(self) -> float:
        return self.at_one / self.decided if self.decided else float("nan")

    @property
    def std_error(self) -> float:
        f = self.frac_one
        return math.sqrt(f * (1.0 - f) / self.decided) if self.decided else float("nan")


def _absorb_block(p, x0, max_steps, eps, rng, n):
    params = WalkParams(Variant.PABSORBING, p)
    xs = np.full(n, float(x0))
    outcome = np.zeros(n, dtype=np.int8)  # 0 running, 1 at one, -1 at zero
    outcome[xs <= eps] = -1
    outcome[xs >= 1.0 - eps] = 1
    active = np.flatnonzero(outcome == 0)
    for _ in range(max_steps):
        if active.size == 0:
            break
        nxt = step_many(xs[active], params, rng)
        xs[active] = nxt
        outcome[active[nxt <= eps]] = -1
        outcome[active[nxt >= 1.0 - eps]] = 1
        active = active[outcome[active] == 0]
    return outcome


def absorption_frequency(p: float, x0: float, runs: int, seed: int,
                         max_steps: int = DEFAULT_MAX_STEPS,
                         eps: float = DEFAULT_EPS,
                         block: int = 8192) -> AbsorptionSummary:
    """Vectorized absorption experiment over ``runs`` independent chains.

    Runs are grouped in fixed blocks, each with its own derived stream, so
    the counts depend on (seed, runs, block) only.
    """
    if not p < 0:
        raise ValueError("the absorbing walk needs p < 0")
    if not 0.0 <= x0 <= 1.0:
        raise ValueError("x0 must lie in [0, 1]")
    outs = map_replicates(
        lambda rng, n: _absorb_block(p, x0, max_steps, eps, rng, n),
        split_counts(runs, block), seed)
    allout = np.concatenate(outs) if outs else np.zeros(0, dtype=np.int8)
    return AbsorptionSummary(p=p, x0=x0, runs=runs,
                             at_one=int((allout == 1).sum()),
                             at_zero=int((allout == -1).sum()),
                             undecided=int((allout == 0).sum()),
                             eps=eps, max_steps=max_steps)
