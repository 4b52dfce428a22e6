"""Error parameters across concatenation levels.

Two iterations are offered: the leading-order closed-form recursion, carried
in log10 so that levels far below the float range still report, and exact
iteration of :func:`repcoh.repcode.exact_logical_params`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errchan import ChannelMetrics, ErrorParams, coherence_ratio_small, metrics
from .repcode import check_distance, exact_logical_params

LEADING_MAX_LEVEL = 10
EXACT_MAX_LEVEL = 4
UNDERFLOW_LOG10 = -300.0

_LOG10_2 = math.log10(2.0)
_LN10 = math.log(10.0)


@dataclass(frozen=True)
class Level:
    n: int
    params: ErrorParams
    log10_epsilon: float  # log10 |eps_n|, -inf when zero
    log10_q: float
    metrics: ChannelMetrics
    eps_over_q: Optional[float]
    epsilon_sign: int = 1

    @property
    def coherence_ratio(self) -> Optional[float]:
        """``D/r``, falling back to the small-parameter form after underflow."""
        if self.metrics.coherence_ratio is not None:
            return self.metrics.coherence_ratio
        return _log_coherence_ratio(self.log10_epsilon, self.log10_q)


@dataclass(frozen=True)
class LevelTrace:
    d: int
    levels: tuple

    def __getitem__(self, n):
        return self.levels[n]

    def __len__(self):
        return len(self.levels)


def _log10(x: float) -> float:
    return math.log10(abs(x)) if x != 0 else -math.inf


def _log10_add(a: float, b: float) -> float:
    return float(np.logaddexp(a * _LN10, b * _LN10) / _LN10)


def _linear(log10_value: float) -> float:
    if log10_value < UNDERFLOW_LOG10:
        return 0.0
    return 10.0**log10_value


def _log_coherence_ratio(le: float, lq: float) -> Optional[float]:
    """Small-parameter ``D/r`` evaluated from log10 magnitudes."""
    if le == -math.inf and lq == -math.inf:
        return None
    le4 = 2.0 * le - 2.0 * _LOG10_2 if le > -math.inf else -math.inf
    num = 0.5 * _log10_add(2.0 * lq, le4)
    den = _log10_add(lq, le4)
    return 1.5 * 10.0 ** (num - den)


def _eps_over_q(sign: int, le: float, lq: float) -> Optional[float]:
    if lq == -math.inf:
        return None
    if le == -math.inf:
        return 0.0
    if le - lq > 308.0:
        return sign * math.inf
    return sign * 10.0 ** (le - lq)


def _make_level(n, eps, q, le, lq, sign) -> Level:
    p = ErrorParams(eps, q)
    return Level(
        n=n,
        params=p,
        log10_epsilon=le,
        log10_q=lq,
        metrics=metrics(p),
        eps_over_q=_eps_over_q(sign, le, lq),
        epsilon_sign=sign,
    )


def _check_levels(n_max: int, cap: int) -> None:
    if not 0 <= n_max <= cap:
        raise ValueError(f"n_max must lie in [0, {cap}], got {n_max}")


def leading_step_log10(d: int, le: float, lq: float) -> tuple:
    """One leading-order step on log10 magnitudes ``(|eps|, q)``."""
    h = (d - 1) // 2
    if le == -math.inf:
        le_next = -math.inf
    else:
        le_next = _LOG10_2 + math.log10(math.comb(d - 1, h)) + d * (le - _LOG10_2)
    le4 = 2.0 * le - 2.0 * _LOG10_2 if le > -math.inf else -math.inf
    inner = _log10_add(le4, lq)
    lq_next = math.log10(math.comb(d, h)) + (h + 1) * inner if inner > -math.inf else -math.inf
    return le_next, lq_next


def recurse_leading(d: int, p0: ErrorParams, n_max: int) -> LevelTrace:
    """Iterate ``eps' = 2 C(d-1,h) (eps/2)^d`` and ``q' = C(d,h) (eps^2/4 + q)^(h+1)``.

    ``h = (d-1)/2``.  Linear fields read zero once a value falls below
    ``1e-300``; the log10 fields carry on.
    """
    check_distance(d)
    _check_levels(n_max, LEADING_MAX_LEVEL)
    sign = 1 if p0.epsilon >= 0 else -1
    levels = [_make_level(0, p0.epsilon, p0.q, _log10(p0.epsilon), _log10(p0.q), sign)]
    h = (d - 1) // 2
    for n in range(1, n_max + 1):
        prev = levels[-1]
        le, lq = leading_step_log10(d, prev.log10_epsilon, prev.log10_q)
        # direct evaluation while nothing has underflowed keeps early levels exact
        exact_inputs = (prev.params.epsilon != 0 or prev.log10_epsilon == -math.inf) and (
            prev.params.q != 0 or prev.log10_q == -math.inf
        )
        eps_prev, q_prev = prev.params.epsilon, prev.params.q
        if exact_inputs and le >= UNDERFLOW_LOG10:
            eps = 2.0 * math.comb(d - 1, h) * (0.5 * eps_prev) ** d
        else:
            eps = sign * _linear(le)
        if exact_inputs and lq >= UNDERFLOW_LOG10:
            q = math.comb(d, h) * (0.25 * eps_prev * eps_prev + q_prev) ** (h + 1)
        else:
            q = _linear(lq)
        levels.append(_make_level(n, eps, min(q, 0.5), le, lq, sign))
    return LevelTrace(d=d, levels=tuple(levels))


def recurse_exact(d: int, p0: ErrorParams, n_max: int) -> LevelTrace:
    check_distance(d)
    _check_levels(n_max, EXACT_MAX_LEVEL)
    p = p0
    levels = []
    for n in range(n_max + 1):
        if n:
            p = exact_logical_params(d, p)
        sign = 1 if p.epsilon >= 0 else -1
        levels.append(_make_level(n, p.epsilon, p.q, _log10(p.epsilon), _log10(p.q), sign))
    return LevelTrace(d=d, levels=tuple(levels))


@dataclass(frozen=True)
class CoherenceRow:
    d: int
    n: int
    epsilon: float
    q: float
    log10_epsilon: float
    log10_q: float
    r: float
    D: float
    d_over_r: Optional[float]
    eps_over_q: Optional[float]


def coherence_table(
    d_list: Sequence[int],
    p0: ErrorParams,
    n_max: int,
    exact: bool = False,
    workers: int = 1,
) -> list:
    """Rows ``(d, n, ..., D/r, eps/q)`` for every distance and level.

    Distances are evaluated independently (optionally in parallel); rows
    come back ordered by the position of ``d`` in ``d_list`` then by level.
    """
    for d in d_list:
        check_distance(d)
    run = recurse_exact if exact else recurse_leading

    def one(d):
        trace = run(d, p0, n_max)
        return [
            CoherenceRow(
                d=d,
                n=lv.n,
                epsilon=lv.params.epsilon,
                q=lv.params.q,
                log10_epsilon=lv.log10_epsilon,
                log10_q=lv.log10_q,
                r=lv.metrics.r,
                D=lv.metrics.D,
                d_over_r=lv.coherence_ratio,
                eps_over_q=lv.eps_over_q,
            )
            for lv in trace.levels
        ]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(one, d_list))
    else:
        chunks = [one(d) for d in d_list]
    return [row for chunk in chunks for row in chunk]


__all__ = [
    "Level",
    "LevelTrace",
    "CoherenceRow",
    "recurse_leading",
    "recurse_exact",
    "coherence_table",
    "leading_step_log10",
    "coherence_ratio_small",
]
