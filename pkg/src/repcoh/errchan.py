"""Single-qubit X-type error channel: construction, composition and metrics.

The channel is ``rho -> (1-q) U rho U^dag + q X U rho U^dag X`` with
``U = exp(-i eps X / 2)``.  On the Pauli transfer matrix it acts trivially
on ``{I, X}`` and as the scaled rotation ``(1-2q) R(eps)`` on ``{Y, Z}``, so
the 2x2 block is the whole story and everything here works on that block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

PTM_TOL = 1e-12

Mode = Literal["eq16", "eq17", "exact_composition"]
MODES = ("eq16", "eq17", "exact_composition")


@dataclass(frozen=True)
class ErrorParams:
    """Coherent rotation angle ``epsilon`` (radians) and flip probability ``q``."""

    epsilon: float
    q: float

    def __post_init__(self):
        if not (0.0 <= self.q <= 0.5):
            raise ValueError(f"q must lie in [0, 1/2], got {self.q!r}")
        if not abs(self.epsilon) < math.pi:
            raise ValueError(f"|epsilon| must be < pi, got {self.epsilon!r}")

    @property
    def noiseless(self) -> bool:
        return self.epsilon == 0 and self.q == 0


@dataclass(frozen=True)
class PhysicalRates:
    omega: float
    gamma: float
    tau: float

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma!r}")
        if not self.tau > 0:
            raise ValueError(f"tau must be > 0, got {self.tau!r}")


@dataclass(frozen=True)
class ReducedPTM:
    """The block ``[[a, -b], [b, a]]`` acting on the (Y, Z) Pauli components."""

    a: float
    b: float

    @classmethod
    def identity(cls) -> "ReducedPTM":
        return cls(1.0, 0.0)

    @property
    def norm_sq(self) -> float:
        return self.a * self.a + self.b * self.b

    def matrix(self):
        import numpy as np

        return np.array([[self.a, -self.b], [self.b, self.a]])

    def __matmul__(self, other: "ReducedPTM") -> "ReducedPTM":
        return compose(self, other)


@dataclass(frozen=True)
class ChannelMetrics:
    r: float
    D: float
    coherence_ratio: Optional[float]
    coherence_ratio_approx: Optional[float] = None


@dataclass(frozen=True)
class FailurePrediction:
    m_crit: Optional[int]
    m_fail: Optional[int]
    threshold: float


def from_physical_rates(rates: PhysicalRates) -> ErrorParams:
    """Map a rotation rate, dephasing rate and cycle time to ``(epsilon, q)``.

    ``epsilon = omega * tau`` and ``q = (1 - exp(-2 gamma tau)) / 2``.
    """
    eps = rates.omega * rates.tau
    if abs(eps) >= math.pi:
        raise ValueError(f"omega*tau = {eps!r} is outside (-pi, pi)")
    q = -0.5 * math.expm1(-2.0 * rates.gamma * rates.tau)
    return ErrorParams(eps, min(q, 0.5))


def reduced_ptm(p: ErrorParams) -> ReducedPTM:
    shrink = 1.0 - 2.0 * p.q
    return ReducedPTM(shrink * math.cos(p.epsilon), shrink * math.sin(p.epsilon))


def compose(x: ReducedPTM, y: ReducedPTM) -> ReducedPTM:
    """Block of ``x o y``; the blocks commute, so the order is immaterial."""
    # (a1 + i b1)(a2 + i b2) in complex form
    return ReducedPTM(x.a * y.a - x.b * y.b, x.a * y.b + x.b * y.a)


def power(x: ReducedPTM, m: int) -> ReducedPTM:
    """``x`` composed with itself ``m`` times, by repeated squaring."""
    if m < 0:
        raise ValueError("m must be non-negative")
    result = ReducedPTM.identity()
    base = x
    while m:
        if m & 1:
            result = compose(result, base)
        base = compose(base, base)
        m >>= 1
    return result


def extract_params(x: ReducedPTM) -> ErrorParams:
    """Invert :func:`reduced_ptm`.

    Raises
    ------
    ValueError
        If ``a**2 + b**2`` exceeds one by more than ``PTM_TOL``.
    """
    nsq = x.norm_sq
    if nsq > 1.0 + PTM_TOL:
        raise ValueError(f"non-physical block: a^2 + b^2 = {nsq!r} > 1")
    q = 0.5 * (1.0 - math.sqrt(min(nsq, 1.0)))
    q = min(max(q, 0.0), 0.5)
    if nsq == 0.0:
        return ErrorParams(0.0, 0.5)
    eps = math.atan2(x.b, x.a)
    # atan2 returns pi for a negated block; ErrorParams needs |eps| < pi
    if abs(eps) >= math.pi:
        eps = math.copysign(math.nextafter(math.pi, 0.0), eps)
    return ErrorParams(eps, q)


def pauli_twirl(p: ErrorParams) -> ErrorParams:
    """Drop the off-diagonal of the block, keeping ``(1-2q) cos(eps)``.

    Written as ``q + (1-2q) sin^2(eps/2)``, which equals
    ``(1 - (1-2q) cos eps) / 2`` without the cancellation at small angles.
    A negative diagonal (``|eps| > pi/2`` with ``q < 1/2``) would need a
    flip probability above 1/2 and is rejected.
    """
    s2 = math.sin(0.5 * p.epsilon) ** 2
    q_tw = p.q + (1.0 - 2.0 * p.q) * s2
    if q_tw > 0.5:
        raise ValueError(f"twirl of {p} has flip probability {q_tw!r} > 1/2")
    return ErrorParams(0.0, q_tw)


def metrics(p: ErrorParams) -> ChannelMetrics:
    """Average infidelity ``r``, diamond distance ``D`` and ``D/r``.

    ``D`` is evaluated as ``sqrt(q^2 + (1-2q) sin^2(eps/2))``, algebraically
    identical to ``sqrt(3r/2 - q(1-q))`` but free of cancellation when
    ``eps << q``.  The small-parameter estimate
    ``(3/2) sqrt(q^2 + eps^2/4) / (q + eps^2/4)`` is attached when both
    ``q`` and ``|eps|`` are below 0.1.
    """
    s2 = math.sin(0.5 * p.epsilon) ** 2
    r = (2.0 / 3.0) * (p.q + (1.0 - 2.0 * p.q) * s2)
    D = math.hypot(p.q, math.sqrt((1.0 - 2.0 * p.q) * s2))
    ratio = D / r if r > 0 else None
    approx = None
    if p.q < 0.1 and abs(p.epsilon) < 0.1 and r > 0:
        approx = coherence_ratio_small(p.epsilon, p.q)
    return ChannelMetrics(r=r, D=D, coherence_ratio=ratio, coherence_ratio_approx=approx)


def coherence_ratio_small(epsilon: float, q: float) -> float:
    e4 = 0.25 * epsilon * epsilon
    return 1.5 * math.hypot(q, 0.5 * epsilon) / (q + e4)


def diamond_after_cycles(p: ErrorParams, m: int) -> float:
    """Linear-in-m diamond distance ``m sqrt(q^2 + eps^2/4)``.

    First order only: for mixed channels the true distance of the m-fold
    composition is not linear in m.  Kept as a reporting formula.
    """
    return m * math.sqrt(p.q * p.q + 0.25 * p.epsilon * p.epsilon)


def worst_case_infidelity(p: ErrorParams, m: int, mode: Mode = "exact_composition") -> float:
    """Failure probability after ``m`` cycles for the worst input state.

    The worst input has its Bloch vector in the y-z plane.  ``eq16`` and
    ``eq17`` are the first-order closed forms; ``exact_composition`` uses the
    m-th power of the block and is the authoritative mode.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if m == 0:
        return 0.0
    if mode == "eq16":
        return m * p.q * math.cos(m * p.epsilon) + math.sin(0.5 * m * p.epsilon) ** 2
    if mode == "eq17":
        return m * p.q + (0.5 * m * p.epsilon) ** 2
    if mode == "exact_composition":
        # power(reduced_ptm(p), m) = (1-2q)^m R(m eps); the angle wrap
        # leaves sin^2(m eps / 2) unchanged, so evaluate it directly
        if p.q >= 0.5:
            return 0.5
        log_shrink = m * math.log1p(-2.0 * p.q)
        q_m = -0.5 * math.expm1(log_shrink)
        return q_m + math.exp(log_shrink) * math.sin(0.5 * m * p.epsilon) ** 2
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def _ceil(x: float) -> int:
    # absorb round-off such as 150.00000000000003
    near = round(x)
    if abs(x - near) <= 1e-9 * max(1.0, abs(x)):
        return int(near)
    return math.ceil(x)


def critical_cycles(p: ErrorParams) -> Optional[int]:
    """Cycle count ``2q/eps^2`` where coherent growth overtakes stochastic."""
    if p.epsilon == 0:
        return None
    return max(1, _ceil(2.0 * p.q / (p.epsilon * p.epsilon)))


def failure_cycles(
    p: ErrorParams, threshold: float = 0.5, mode: Mode = "exact_composition",
    max_cycles: int = 1 << 62,
) -> Optional[int]:
    """Smallest ``m`` whose worst-case infidelity reaches ``threshold``.

    Doubling brackets the crossing, bisection pins it.  For ``eps != 0`` the
    search is confined to the first half rotation period, where the
    coherent part is still increasing; later peaks are damped by the
    stochastic part and never exceed the first.  Returns ``None`` if the
    threshold is never reached.
    """
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    if p.noiseless:
        return None
    # (1 - (1-2q)^m)/2 < 1/2 for every m; float rounding would say otherwise
    if mode == "exact_composition" and p.epsilon == 0 and p.q < 0.5 and threshold >= 0.5:
        return None

    def reached(m):
        if mode == "exact_composition":
            # infidelity = (1 - (1-2q)^m cos(m eps)) / 2; compare without the 1/2 - 1/2
            shrink = 0.0 if p.q >= 0.5 else math.exp(m * math.log1p(-2.0 * p.q))
            return shrink * math.cos(m * p.epsilon) <= 1.0 - 2.0 * threshold
        return worst_case_infidelity(p, m, mode) >= threshold

    limit = max_cycles
    if p.epsilon != 0 and mode != "eq17":
        limit = min(limit, math.ceil(math.pi / abs(p.epsilon)))
    hi = 1
    while not reached(hi):
        if hi >= limit:
            return None
        hi = min(2 * hi, limit)
    lo = hi // 2  # not reached at lo, or lo == 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if reached(mid):
            hi = mid
        else:
            lo = mid
    return hi


def predict(
    p: ErrorParams, threshold: float = 0.5, mode: Mode = "exact_composition"
) -> FailurePrediction:
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    return FailurePrediction(
        m_crit=critical_cycles(p),
        m_fail=failure_cycles(p, threshold, mode),
        threshold=threshold,
    )
