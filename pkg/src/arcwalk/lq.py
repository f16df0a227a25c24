"""l_q objectives of the one-step conditional law of the p-family.

From state x the next state is uniform on (0, x) with probability
``w0 = x**p / (x**p + (1-x)**p)`` and uniform on (x, 1) otherwise.  The
objective ``f(z) = E|z - X|**q`` is integrated exactly, piece by piece.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .kernels import left_probability

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
# the odd |h|**(q+1) term only dominates the smooth quadratic below a
# crossover step that shrinks fast as q -> 1 (about 2e-3 at q=0.75, x=0.4)
CLASSIFY_STEPS = (1e-3, 1e-4, 1e-5)


class CriticalPoint(str, enum.Enum):
    MINIMUM = "Minimum"
    INFLECTION = "Inflection"
    MAXIMUM = "Maximum"


class UndeterminedError(RuntimeError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class LqQuery:
    p: float
    q: float
    x: float

    def __post_init__(self):
        if not self.q > 0:
            raise ValueError(f"q must be positive, got {self.q}")
        if not 0.0 < self.x < 1.0:
            raise ValueError(f"x={self.x!r} must lie strictly inside (0, 1)")

    @property
    def w0(self) -> float:
        return left_probability(self.x, self.p)


def _uniform_abs_moment(z: float, a: float, b: float, q: float) -> float:
    """E|z - U|**q for U uniform on (a, b)."""
    r = q + 1.0
    if z <= a:
        num = (b - z) ** r - (a - z) ** r
    elif z >= b:
        num = (z - a) ** r - (z - b) ** r
    else:
        num = (z - a) ** r + (b - z) ** r
    return num / (r * (b - a))


def lq_objective(query: LqQuery, z: float) -> float:
    w0 = query.w0
    x, q = query.x, query.q
    return (w0 * _uniform_abs_moment(z, 0.0, x, q)
            + (1.0 - w0) * _uniform_abs_moment(z, x, 1.0, q))


def lq_derivative_at_x(query: LqQuery) -> float:
    """f'(x) = w0 x**(q-1) - (1-w0)(1-x)**(q-1).

    Equivalently (x**(p+q-1) - (1-x)**(p+q-1)) / (x**p + (1-x)**p), which
    vanishes identically when p = 1 - q.
    """
    x, p, q = query.x, query.p, query.q
    e = p + q - 1.0
    if e == 0.0:
        return 0.0
    lx, l1x = math.log(x), math.log1p(-x)
    log_norm = max(p * lx, p * l1x) + math.log1p(math.exp(-abs(p * lx - p * l1x)))
    return math.exp(e * lx - log_norm) - math.exp(e * l1x - log_norm)


def conditional_median(query: LqQuery) -> float:
    """Point where the one-step CDF crosses 1/2."""
    w0, x = query.w0, query.x
    if w0 >= 0.5:
        return x * 0.5 / w0
    return x + (0.5 - w0) * (1.0 - x) / (1.0 - w0)


def golden_section(f, lo: float, hi: float, tol: float = 1e-10,
                   max_iter: int = 500) -> float:
    """Minimize a unimodal ``f`` on [lo, hi]; returns the bracket midpoint."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    else:
        raise ConvergenceError(
            f"golden section stalled at bracket width {b - a:.3g} > {tol:.3g}")
    mid = 0.5 * (a + b)
    # the endpoints can win when the minimum sits on the boundary
    return min((lo, hi, mid), key=f) if f(mid) > min(f(lo), f(hi)) else mid


def lq_minimizer(query: LqQuery, tol: float = 1e-10) -> float:
    """argmin over z in [0, 1] of E|z - X|**q; requires q >= 1."""
    if query.q < 1.0:
        raise ValueError("the minimizer is only characterized for q >= 1; "
                         "use classify_critical_point for q < 1")
    if query.q == 1.0:
        return conditional_median(query)
    return golden_section(lambda z: lq_objective(query, z), 0.0, 1.0, tol)


def classify_critical_point(query: LqQuery, deriv_tol: float = 1e-9,
                            steps=CLASSIFY_STEPS) -> CriticalPoint:
    """Minimum / inflection / maximum of the objective at z = x.

    Compares f(x +- delta) with f(x) for each delta; all deltas must agree.
    """
    d = lq_derivative_at_x(query)
    if abs(d) > deriv_tol:
        raise ValueError(f"z = x is not a critical point (f'(x) = {d:.3g})")
    x = query.x
    f0 = lq_objective(query, x)
    verdicts = set()
    for delta in steps:
        up = lq_objective(query, x + delta) > f0
        down = lq_objective(query, x - delta) > f0
        if up and down:
            verdicts.add(CriticalPoint.MINIMUM)
        elif up != down:
            verdicts.add(CriticalPoint.INFLECTION)
        else:
            verdicts.add(CriticalPoint.MAXIMUM)
    if len(verdicts) != 1:
        raise UndeterminedError(
            f"verdict changes across steps {steps}: {sorted(v.value for v in verdicts)}")
    return verdicts.pop()
