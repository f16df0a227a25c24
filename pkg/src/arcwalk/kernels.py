"""Transition kernels and one-step samplers for the interval walks.

Kernel convention: ``K(a, b)`` is the density of moving *to* ``a`` *from*
``b``, so a stationary density solves ``rho(a) = int K(a, b) rho(b) db``.

Draw order in :func:`step` is fixed so traces replay bit-identically:

1. one uniform ``u1`` picks the branch (``u1 < w0`` means jump toward 0);
2. one uniform ``u2`` places the state inside the chosen subinterval.

``u2 == 0`` (probability ~2**-53) is rejected and redrawn, as is any
position that rounds onto an endpoint of the open interval.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .seeding import make_rng


class Variant(str, enum.Enum):
    X = "x"
    Y = "y"
    PFAMILY = "p"
    PABSORBING = "absorbing"


@dataclass(frozen=True)
class WalkParams:
    variant: Variant = Variant.X
    p: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not math.isfinite(self.p):
            raise ValueError(f"p must be finite, got {self.p}")
        if self.variant is Variant.PABSORBING and not self.p < 0:
            raise ValueError("the absorbing variant requires p < 0")

    @property
    def exponent(self) -> float:
        """Branch-weight exponent; X and Y are the p = 0 members."""
        if self.variant in (Variant.X, Variant.Y):
            return 0.0
        return self.p


@dataclass
class ChainTrace:
    params: WalkParams
    seed: int
    x0: float
    states: np.ndarray
    burn_in: int = 0
    thinning: int = 1
    n_transitions: int = field(default=0)


def _check_open(name, v):
    if not 0.0 < v < 1.0:
        raise ValueError(f"{name}={v!r} is outside the open interval (0, 1)")


def kernel_x(a: float, b: float) -> float:
    """Median-martingale kernel: 1/(2b) below the current state, 1/(2(1-b)) above."""
    _check_open("a", a)
    _check_open("b", b)
    if a <= b:
        return 0.5 / b
    return 0.5 / (1.0 - b)


def kernel_y(a: float, b: float) -> float:
    """Kernel of the reflected walk: uniform on (0, b) or on (1-b, 1).

    When b > 1/2 the two target intervals overlap and the branch densities
    add, giving 1/b there.  Each branch carries mass 1/2, so the kernel
    integrates to one in ``a``.
    """
    _check_open("a", a)
    _check_open("b", b)
    val = 0.0
    if a <= b:
        val += 0.5 / b
    if a > 1.0 - b:
        val += 0.5 / b
    return val


def kernel_p(s: float, x: float, p: float) -> float:
    """Kernel of the p-family, evaluated in log space.

    ``x**(p-1) / (x**p + (1-x)**p)`` for s < x and
    ``(1-x)**(p-1) / (x**p + (1-x)**p)`` for s > x.
    """
    _check_open("s", s)
    _check_open("x", x)
    lx, l1x = math.log(x), math.log1p(-x)
    log_norm = np.logaddexp(p * lx, p * l1x)
    if s <= x:
        return math.exp((p - 1.0) * lx - log_norm)
    return math.exp((p - 1.0) * l1x - log_norm)


def left_probability(x, p: float):
    """Probability of jumping toward 0 from ``x``: x**p / (x**p + (1-x)**p).

    Works elementwise on arrays.  p = 0 returns exactly 1/2.
    """
    if p == 0.0:
        return 0.5 if np.ndim(x) == 0 else np.full(np.shape(x), 0.5)
    with np.errstate(divide="ignore", over="ignore"):
        t = p * (np.log1p(-np.asarray(x, dtype=float)) - np.log(x))
        w = 1.0 / (1.0 + np.exp(t))
    return float(w) if np.ndim(w) == 0 else w


def _left_probability_scalar(x: float, p: float) -> float:
    if p == 0.0:
        return 0.5
    t = p * (math.log1p(-x) - math.log(x))
    if t > 700.0:
        return 0.0
    return 1.0 / (1.0 + math.exp(t))


class UniformStream:
    """Buffered ``random()`` source.

    Yields exactly the sequence of successive ``rng.random()`` calls, but
    amortizes the numpy call overhead over blocks.
    """

    def __init__(self, rng: np.random.Generator, block: int = 1 << 14):
        self._rng = rng
        self._block = block
        self._buf: list[float] = []
        self._pos = 0

    def random(self) -> float:
        if self._pos == len(self._buf):
            self._buf = self._rng.random(self._block).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u


def step(x: float, params: WalkParams, rng) -> float:
    """One transition from ``x``.  ``rng`` only needs a ``random()`` method."""
    variant = params.variant
    if variant is Variant.PABSORBING:
        if x == 0.0 or x == 1.0:
            return x
        if not 0.0 < x < 1.0:
            raise ValueError(f"x={x!r} is outside [0, 1]")
    else:
        _check_open("x", x)

    w0 = _left_probability_scalar(x, params.exponent)
    go_left = rng.random() < w0
    while True:
        u = rng.random()
        if u == 0.0:
            continue
        if go_left:
            y = x * u
            lo, hi = 0.0, x
        elif variant is Variant.Y:
            y = (1.0 - x) + x * u
            lo, hi = 1.0 - x, 1.0
        else:
            y = x + (1.0 - x) * u
            lo, hi = x, 1.0
        if lo < y < hi:
            return y
        if variant is Variant.PABSORBING and y in (0.0, 1.0):
            # underflow at the edge of the absorbing chain: landing on the
            # endpoint is the limit behaviour anyway
            return y


def step_many(xs: np.ndarray, params: WalkParams,
              rng: np.random.Generator) -> np.ndarray:
    """Advance many independent chains by one step.

    Draws all branch uniforms first, then all position uniforms.  Chains
    sitting on an absorbing endpoint stay put but still consume draws.
    """
    xs = np.asarray(xs, dtype=float)
    n = xs.size
    w0 = left_probability(np.clip(xs, 1e-300, 1.0 - 1e-16), params.exponent)
    go_left = rng.random(n) < w0
    u = rng.random(n)
    bad = u == 0.0
    while bad.any():
        u[bad] = rng.random(int(bad.sum()))
        bad = u == 0.0
    if params.variant is Variant.Y:
        right = (1.0 - xs) + xs * u
    else:
        right = xs + (1.0 - xs) * u
    out = np.where(go_left, xs * u, right)
    if params.variant is Variant.PABSORBING:
        stuck = (xs == 0.0) | (xs == 1.0)
        out[stuck] = xs[stuck]
    return out


def simulate(params: WalkParams, x0: float, n_steps: int, burn_in: int = 0,
             thinning: int = 1, seed: int = 0) -> ChainTrace:
    """Run one chain and record ``n_steps`` states.

    The chain makes ``burn_in`` transitions, then records the state after
    every ``thinning``-th further transition; ``x0`` itself is never
    recorded.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if thinning < 1:
        raise ValueError("thinning must be >= 1")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    stream = UniformStream(make_rng(seed))
    x = float(x0)
    for _ in range(burn_in):
        x = step(x, params, stream)
    states = np.empty(n_steps)
    for i in range(n_steps):
        for _ in range(thinning):
            x = step(x, params, stream)
        states[i] = x
    return ChainTrace(params=params, seed=seed, x0=float(x0), states=states,
                      burn_in=burn_in, thinning=thinning,
                      n_transitions=burn_in + n_steps * thinning)


def simulate_ensemble(params: WalkParams, x0: float, times, n_chains: int,
                      seed: int) -> dict[int, np.ndarray]:
    """Laws of X_t across ``n_chains`` parallel chains at the given times."""
    times = sorted(set(int(t) for t in times))
    if times and times[0] < 1:
        raise ValueError("times must be >= 1")
    rng = make_rng(seed)
    xs = np.full(n_chains, float(x0))
    out = {}
    t = 0
    for target in times:
        while t < target:
            xs = step_many(xs, params, rng)
            t += 1
        out[target] = xs.copy()
    return out
