"""Exact logical channel of the distance-d repetition code.

Each physical qubit suffers ``Lambda_q o Lambda_eps``.  After perfect
syndrome extraction and minimum-weight recovery the logical map is a mixture
over syndrome weight classes ``j = 0 .. (d-1)/2``::

    G = sum_j C(d, j) P_j  Lambda_{Q_j} o Lambda_{eps_j}

where ``P_j`` is the probability that the coherent part lands in a given
weight-``j`` syndrome, ``eps_j`` the residual logical rotation of that
branch and ``Q_j`` the probability that the stochastic flips then push the
recovery across to a logical flip.  No N-qubit operator is ever built.

Flip sums accept ``fractions.Fraction`` for ``q``; in that case ``Q_j`` and
``A_j`` come out as exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union

from .errchan import ErrorParams, ReducedPTM, extract_params

Number = Union[float, Fraction]

MAX_DISTANCE = 61


def check_distance(d: int) -> int:
    if isinstance(d, bool) or not isinstance(d, int):
        raise TypeError(f"code distance must be an int, got {type(d).__name__}")
    if d < 3 or d % 2 == 0:
        raise ValueError(f"code distance must be an odd integer >= 3, got {d}")
    if d > MAX_DISTANCE:
        raise ValueError(f"code distance must be <= {MAX_DISTANCE}, got {d}")
    return d


@dataclass(frozen=True)
class SyndromeClass:
    j: int
    p_j: float
    q_j: Number
    a_j: Number
    eps_j: float
    # tan(eps_j / 2); kept so the block entries avoid a trig round trip
    tan_half: float = field(default=0.0, repr=False)


@dataclass(frozen=True)
class LogicalChannel:
    d: int
    classes: tuple

    @property
    def weights(self) -> list:
        """Mixture weights ``C(d, j) P_j`` in class order."""
        return [math.comb(self.d, c.j) * c.p_j for c in self.classes]


def overlap_coefficient(d: int, j: int, k: int, n: int) -> int:
    """Multiplicity of each weight ``j+k-2n`` term in ``O_j O_k``.

    ``C(d,k) C(k,n) C(d-k, j-n) / C(d, j+k-2n)``, always an integer.
    """
    if not (0 <= j <= d and 0 <= k <= d and 0 <= n <= min(j, k)):
        raise ValueError(f"indices out of range: d={d}, j={j}, k={k}, n={n}")
    if j - n > d - k:
        raise ValueError(f"C({d - k}, {j - n}) is undefined for d={d}, j={j}, k={k}, n={n}")
    num = math.comb(d, k) * math.comb(k, n) * math.comb(d - k, j - n)
    den = math.comb(d, k + j - 2 * n)
    value, rem = divmod(num, den)
    if rem:
        raise ArithmeticError(f"non-integral overlap coefficient {num}/{den}")
    return value


def flip_terms(d: int, j: int) -> Iterator[tuple]:
    """Yield ``(k, n, count, crosses)`` for the flip sums of class ``j``.

    ``count = C(j, n) C(d-j, k-n)`` stochastic patterns of weight ``k``
    overlap the coherent support in ``n`` places; ``crosses`` is true when
    the combined weight ``j+k-2n`` exceeds ``(d-1)/2`` so that recovery
    completes a logical flip.  ``k`` runs over ``0..(d-1)/2``; the
    complementary patterns of weight ``d-k`` are accounted for by the
    caller.
    """
    h = (d - 1) // 2
    for k in range(h + 1):
        for n in range(max(0, k - (d - j)), min(j, k) + 1):
            count = math.comb(j, n) * math.comb(d - j, k - n)
            yield k, n, count, (j + k - 2 * n) > h


def flip_sums(d: int, j: int, q: Number) -> tuple:
    """Return ``(A_j, Q_j)``: no-logical-flip and logical-flip probabilities."""
    one = Fraction(1) if isinstance(q, Fraction) else 1.0
    p = one - q
    a = 0 * one
    b = 0 * one
    for k, _n, count, crosses in flip_terms(d, j):
        low = q**k * p ** (d - k)
        high = q ** (d - k) * p**k
        if crosses:
            a += count * high
            b += count * low
        else:
            a += count * low
            b += count * high
    return a, b


def branch_probability(d: int, j: int, epsilon: float) -> float:
    """``P_j = c^{2(d-j)} s^{2j} + c^{2j} s^{2(d-j)}``."""
    c2 = math.cos(0.5 * epsilon) ** 2
    s2 = math.sin(0.5 * epsilon) ** 2
    return c2 ** (d - j) * s2**j + c2**j * s2 ** (d - j)


def branch_tan_half(d: int, j: int, epsilon: float) -> float:
    """``tan(eps_j / 2) = (-1)^{(d-1)/2 + j} tan^{d-2j}(eps/2)``."""
    sign = -1.0 if ((d - 1) // 2 + j) % 2 else 1.0
    return sign * math.tan(0.5 * epsilon) ** (d - 2 * j)


def branch_angle(d: int, j: int, epsilon: float) -> float:
    if abs(epsilon) >= math.pi / 2:
        raise ValueError("branch angles require |epsilon| < pi/2")
    return 2.0 * math.atan(branch_tan_half(d, j, epsilon))


def syndrome_classes(d: int, p: ErrorParams, q: Number = None) -> LogicalChannel:
    """Build the syndrome-class decomposition of the logical channel.

    ``q`` overrides ``p.q``; pass a ``Fraction`` to get exact flip sums.
    """
    check_distance(d)
    if abs(p.epsilon) >= math.pi / 2:
        raise ValueError("exact logical channel requires |epsilon| < pi/2")
    qq = p.q if q is None else q
    classes = []
    for j in range((d - 1) // 2 + 1):
        a_j, q_j = flip_sums(d, j, qq)
        t = branch_tan_half(d, j, p.epsilon)
        classes.append(
            SyndromeClass(
                j=j,
                p_j=branch_probability(d, j, p.epsilon),
                q_j=q_j,
                a_j=a_j,
                eps_j=2.0 * math.atan(t),
                tan_half=t,
            )
        )
    return LogicalChannel(d=d, classes=tuple(classes))


def _block_terms(ch: LogicalChannel):
    """Per-class ``(w, 1-2Q, cos eps_j, sin eps_j, 1 - (1-2Q) cos eps_j)``."""
    for w, c in zip(ch.weights, ch.classes):
        qj = float(c.q_j)
        t2 = c.tan_half * c.tan_half
        cos_j = (1.0 - t2) / (1.0 + t2)
        sin_j = 2.0 * c.tan_half / (1.0 + t2)
        shrink = 1.0 - 2.0 * qj
        # 1 - (1-2Q) cos = 2Q + (1-2Q) * 2 sin^2(eps_j/2), all terms >= 0
        deficit = 2.0 * qj + shrink * 2.0 * t2 / (1.0 + t2)
        yield w, shrink, cos_j, sin_j, deficit


def logical_reduced_ptm(ch: LogicalChannel) -> ReducedPTM:
    a = 0.0
    b = 0.0
    for w, shrink, cos_j, sin_j, _ in _block_terms(ch):
        a += w * shrink * cos_j
        b += w * shrink * sin_j
    return ReducedPTM(a, b)


def exact_logical_params(d: int, p: ErrorParams) -> ErrorParams:
    """One exact level of encoding: ``(eps, q) -> (eps_bar, q_bar)``.

    Equal to ``extract_params(logical_reduced_ptm(syndrome_classes(d, p)))``
    but ``q_bar`` is assembled from non-negative deficits instead of
    ``1 - sqrt(a^2 + b^2)``, so it stays accurate when it is far below
    machine epsilon (deep concatenation levels).
    """
    if p.noiseless:
        return ErrorParams(0.0, 0.0)
    ch = syndrome_classes(d, p)
    a = b = one_minus_a = 0.0
    for w, shrink, cos_j, sin_j, deficit in _block_terms(ch):
        a += w * shrink * cos_j
        b += w * shrink * sin_j
        one_minus_a += w * deficit
    # 1 - a^2 - b^2 = (1-a)(1+a) - b^2
    gap = one_minus_a * (1.0 + a) - b * b
    if gap < -1e-12:
        raise ValueError(f"non-physical logical block (1 - |R|^2 = {gap!r})")
    gap = max(gap, 0.0)
    radius = math.sqrt(max(a * a + b * b, 0.0))
    q_bar = 0.5 * gap / (1.0 + radius)
    eps_bar = math.atan2(b, a)
    return ErrorParams(eps_bar, min(q_bar, 0.5))


def exact_logical_params_naive(d: int, p: ErrorParams) -> ErrorParams:
    """Same map through :func:`extract_params`; reference path for tests."""
    return extract_params(logical_reduced_ptm(syndrome_classes(d, p)))


def leading_logical_epsilon(d: int, epsilon: float) -> float:
    return 2.0 * math.comb(d - 1, (d - 1) // 2) * (0.5 * epsilon) ** d


def leading_logical_q(d: int, epsilon: float, q: float) -> float:
    return math.comb(d, (d - 1) // 2) * (0.25 * epsilon * epsilon + q) ** ((d + 1) // 2)
