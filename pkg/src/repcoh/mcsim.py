"""Seeded Monte Carlo trajectories of a logical qubit under repeated QEC cycles.

Each cycle draws a syndrome class of the logical channel, rotates the state
about X by that class's residual angle and flips it with the class's
logical flip probability.  Trajectory ``i`` owns the random stream
``SeedSequence(seed, spawn_key=(i,))``, and partial sums are merged in
trajectory order over fixed-size blocks, so results do not depend on how
many workers run the blocks.
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errchan import ErrorParams, worst_case_infidelity
from .repcode import LogicalChannel

logger = logging.getLogger(__name__)

WEIGHT_TOL = 1e-9
BLOCK_SIZE = 256


@dataclass(frozen=True)
class LogicalState:
    alpha: complex
    beta: complex

    def __post_init__(self):
        if abs(abs(self.alpha) ** 2 + abs(self.beta) ** 2 - 1.0) > 1e-12:
            raise ValueError("state is not normalized")

    @classmethod
    def worst_case(cls, theta: float = 0.0) -> "LogicalState":
        """``cos(theta)|0> - i sin(theta)|1>``, Bloch vector in the y-z plane."""
        return cls(complex(math.cos(theta)), -1j * math.sin(theta))

    def overlap_sq(self, other: "LogicalState") -> float:
        return abs(self.alpha.conjugate() * other.alpha + self.beta.conjugate() * other.beta) ** 2


@dataclass(frozen=True)
class Mixture:
    """Flattened mixture of ``(weight, rotation angle, flip probability)``."""

    weights: np.ndarray
    angles: np.ndarray
    flips: np.ndarray

    @classmethod
    def from_channel(cls, channel: Union[LogicalChannel, ErrorParams]) -> "Mixture":
        if isinstance(channel, ErrorParams):
            return cls(np.array([1.0]), np.array([channel.epsilon]), np.array([channel.q]))
        w = np.array(channel.weights, dtype=float)
        total = w.sum()
        if abs(total - 1.0) > WEIGHT_TOL:
            warnings.warn(f"class weights sum to {total!r}; renormalizing", RuntimeWarning)
            w = w / total
        eps = np.array([c.eps_j for c in channel.classes], dtype=float)
        q = np.array([float(c.q_j) for c in channel.classes], dtype=float)
        return cls(w, eps, q)

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.weights)


def _class_index(cum: np.ndarray, u):
    return np.minimum(np.searchsorted(cum, u, side="right"), len(cum) - 1)


def sample_cycle(
    state: LogicalState,
    channel: Union[LogicalChannel, ErrorParams, Mixture],
    rng: np.random.Generator,
) -> LogicalState:
    """Advance one trajectory by one QEC cycle."""
    mix = channel if isinstance(channel, Mixture) else Mixture.from_channel(channel)
    u_class, u_flip = rng.random(), rng.random()
    k = int(_class_index(mix.cumulative, u_class))
    half = 0.5 * mix.angles[k]
    c, s = math.cos(half), math.sin(half)
    a = c * state.alpha - 1j * s * state.beta
    b = -1j * s * state.alpha + c * state.beta
    if u_flip < mix.flips[k]:
        a, b = b, a
    norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
    return LogicalState(a / norm, b / norm)


@dataclass(frozen=True)
class TrajectoryConfig:
    channel: Union[LogicalChannel, ErrorParams]
    m_max: int
    samples: int
    seed: int
    theta: float = 0.0

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.m_max < 1:
            raise ValueError("m_max must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class FailureCurve:
    m: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    samples: int
    max_norm_error: float = field(default=0.0, compare=False)

    def rows(self):
        return zip(self.m.tolist(), self.mean.tolist(), self.stderr.tolist())


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _run_block(mix: Mixture, cfg: TrajectoryConfig, start: int, stop: int):
    """Failure-probability sums over trajectories ``start..stop-1``."""
    n = stop - start
    # each trajectory's draws come from its own stream, class draw then flip draw
    draws = np.stack([trajectory_rng(cfg.seed, i).random((cfg.m_max, 2)) for i in range(start, stop)])
    cum = mix.cumulative
    cos_half = np.cos(0.5 * mix.angles)
    sin_half = np.sin(0.5 * mix.angles)
    init = LogicalState.worst_case(cfg.theta)
    a0 = np.full(n, init.alpha, dtype=complex)
    b0 = np.full(n, init.beta, dtype=complex)
    a, b = a0.copy(), b0.copy()
    sums = np.empty(cfg.m_max)
    max_norm_err = 0.0
    for t in range(cfg.m_max):
        k = _class_index(cum, draws[:, t, 0])
        c, s = cos_half[k], sin_half[k]
        a, b = c * a - 1j * s * b, -1j * s * a + c * b
        flip = draws[:, t, 1] < mix.flips[k]
        a, b = np.where(flip, b, a), np.where(flip, a, b)
        norm = np.sqrt(a.real**2 + a.imag**2 + b.real**2 + b.imag**2)
        max_norm_err = max(max_norm_err, float(np.max(np.abs(norm - 1.0))))
        a /= norm
        b /= norm
        overlap = np.conj(a0) * a + np.conj(b0) * b
        fail = 1.0 - (overlap.real**2 + overlap.imag**2)
        sums[t] = math.fsum(np.clip(fail, 0.0, 1.0))
    return sums, max_norm_err


def run_failure_curve(cfg: TrajectoryConfig, workers: int = 1, block_size: int = BLOCK_SIZE) -> FailureCurve:
    """Average failure probability ``1 - |<psi(0)|psi(m)>|^2`` per cycle.

    ``block_size`` fixes the reduction tree and is part of the result's
    identity; ``workers`` only changes scheduling.
    """
    mix = Mixture.from_channel(cfg.channel)
    bounds = [(s, min(s + block_size, cfg.samples)) for s in range(0, cfg.samples, block_size)]

    def job(bound):
        return _run_block(mix, cfg, *bound)

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, bounds))
    else:
        parts = [job(bd) for bd in bounds]
    total = np.zeros(cfg.m_max)
    for sums, _ in parts:
        total = total + sums
    mean = total / cfg.samples
    mean = np.clip(mean, 0.0, 1.0)
    stderr = np.sqrt(mean * (1.0 - mean) / cfg.samples)
    norm_err = max(err for _, err in parts)
    logger.debug("max per-cycle normalization error %.3g", norm_err)
    return FailureCurve(
        m=np.arange(1, cfg.m_max + 1),
        mean=mean,
        stderr=stderr,
        samples=cfg.samples,
        max_norm_error=norm_err,
    )


@dataclass(frozen=True)
class ZRow:
    m: int
    mean: float
    expected: float
    stderr: float
    z: Optional[float]


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple
    max_abs_z: float
    fraction_above_4: float
    undefined: int


def validate_against_analytic(curve: FailureCurve, p: ErrorParams) -> ValidationReport:
    """Per-cycle z-scores of the curve against the exact composition."""
    rows = []
    for m, mean, se in curve.rows():
        expected = worst_case_infidelity(p, m, "exact_composition")
        if se > 0:
            z = (mean - expected) / se
        elif abs(mean - expected) <= 1e-15:
            z = 0.0
        else:
            z = None
        rows.append(ZRow(m, mean, expected, se, z))
    defined = [abs(r.z) for r in rows if r.z is not None]
    max_abs = max(defined) if defined else 0.0
    frac = sum(1 for z in defined if z > 4) / len(defined) if defined else 0.0
    return ValidationReport(
        rows=tuple(rows),
        max_abs_z=max_abs,
        fraction_above_4=frac,
        undefined=len(rows) - len(defined),
    )
