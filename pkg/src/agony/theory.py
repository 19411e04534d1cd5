"""First-order (expected value) hierarchy of RSBM rankings.

All quantities assume ``R = 2**a`` classes of equal size.  A ranking is
described by ``b``: ``b > 0`` merges blocks of ``2**b`` adjacent classes
(``2**(a-b)`` classes remain), ``b < 0`` splits each class into ``2**-b``
parts and ``b = 0`` is the planted ranking.  "Inverted" rankings reverse the
class order.  The estimate of the hierarchy is ``1 - E[A] / E[m]``.

Two routes compute the same numbers: explicit sums over class pairs
(:func:`expected_agony_direct`, :func:`expected_agony_inverted`) valid for
any ``d``, and closed forms in ``b`` for ``d = 1, 2``.  The tests hold them
to each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

TWITTER = "twitter"
MILITARY = "military"
UNCOVERED = "uncovered"


@dataclass(frozen=True)
class TheoryInputs:
    """RSBM parameters plus the ranking shape ``b``.

    ``n_per_class`` only scales absolute counts; hierarchy values do not
    depend on it.
    """

    p: float
    q: float
    s: float
    a: int
    b: float = 0.0
    n_per_class: float = 1.0

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("a must be non-negative")
        if self.b > self.a:
            raise ValueError("b cannot exceed a")

    @property
    def R(self) -> float:
        return 2.0**self.a

    @property
    def R_tilde(self) -> float:
        return 2.0 ** (self.a - self.b)


# --- sums ------------------------------------------------------------------

_FAULHABER = {
    0: lambda K: K,
    1: lambda K: K * (K + 1) / 2,
    2: lambda K: K * (K + 1) * (2 * K + 1) / 6,
    3: lambda K: (K * (K + 1) / 2) ** 2,
}


def _is_int(x, tol=1e-9) -> bool:
    return abs(x - round(x)) < tol


def _weighted_sum(d, K, k0) -> float:
    """``sum_{k=k0}^{K-1} (k+1)**d (K-k)``.

    For ``d`` in {0, 1, 2} a polynomial in ``K`` that extends to real ``K``;
    otherwise ``K`` must be an integer.
    """
    if float(d).is_integer() and int(d) in (0, 1, 2):
        d = int(d)
        S, S1 = _FAULHABER[d], _FAULHABER[d + 1]
        # no clamp for K < k0: the closed forms use this continuation
        return (K + 1) * (S(K) - S(k0)) - (S1(K) - S1(k0))
    if not _is_int(K):
        raise ValueError(f"class count {K} must be an integer for d={d}")
    K = int(round(K))
    return math.fsum((k + 1) ** d * (K - k) for k in range(k0, K))


def expected_edges(p, q, s, a, n_per_class=1.0) -> float:
    """``E[m]`` to first order (within-class pairs counted as ``n**2``)."""
    R = 2.0**a
    return n_per_class**2 * (p * (R - 1) + q * (R - 1) * (R - 2) / 2 + s * R * (R + 1) / 2)


def hbar_planted(d, p, q, s, R) -> float:
    """Expected hierarchy of the planted ranking for ``R`` equal classes."""
    if R < 1:
        raise ValueError("R must be >= 1")
    R = int(R)
    back = math.fsum((k + 1) ** d * (R - k) for k in range(R))
    edges = p * (R - 1) + q * (R - 1) * (R - 2) / 2 + s * R * (R + 1) / 2
    if edges == 0:
        raise ValueError("no edges expected: hierarchy undefined")
    return 1.0 - s * back / edges


def _within(inp: TheoryInputs, K: float) -> float:
    """Expected links inside merged classes (each costs 1)."""
    B = 2.0**inp.b
    n2 = inp.n_per_class**2
    return n2 * K * ((B - 1) * inp.p + B * (B + 1) / 2 * inp.s + (B / 2 - 1) * (B - 1) * inp.q)


def expected_agony_direct(d, inp: TheoryInputs) -> float:
    """``E[A_d]`` of the merged (``b >= 0``) or split (``b < 0``) ranking."""
    p, q, s, a, b = inp.p, inp.q, inp.s, inp.a, inp.b
    K = 2.0 ** (a - b)
    block = (inp.n_per_class * 2.0**b) ** 2
    if b < 0:
        return s * block * _weighted_sum(d, K, 0)
    return s * block * _weighted_sum(d, K, 1) + _within(inp, K)


def expected_agony_inverted(d, inp: TheoryInputs) -> float:
    """``E[A_d]`` of the inverted merged or split ranking.

    Backward links of the planted ranking point forward and cost nothing;
    forward links now pay by their distance.
    """
    p, q, s, a, b = inp.p, inp.q, inp.s, inp.a, inp.b
    n2 = inp.n_per_class**2
    if b >= 0:
        K = 2.0 ** (a - b)
        B2 = 4.0**b
        far = B2 * n2 * q * _weighted_sum(d, K, 2)
        near = 2.0**d * n2 * (K - 1) * ((B2 - 1) * q + p)
        return far + near + _within(inp, K)
    M = 2.0**-b
    A = 2.0**a
    if not (_is_int(M) and _is_int(A)):
        raise ValueError("split count 2**-b must be an integer")
    M, A = int(round(M)), int(round(A))
    c = (inp.n_per_class * 2.0**b) ** 2
    t = math.fsum((k + 1) ** d * (A * (M - k) * s + (A - 1) * k * p) for k in range(M))
    t += math.fsum((k + 1 + M) ** d * ((A - 1) * (M - k) * p + (A - 2) * k * q) for k in range(M))
    if A >= 2:
        t += q * math.fsum((k + 1 + 2 * M) ** d * ((A - 2) * M - k) for k in range((A - 2) * M + 1))
    return c * t


def hbar_from_sums(d, inp: TheoryInputs, inverted: bool = False) -> float:
    """``1 - E[A_d] / E[m]`` from the explicit sums."""
    ea = expected_agony_inverted(d, inp) if inverted else expected_agony_direct(d, inp)
    em = expected_edges(inp.p, inp.q, inp.s, inp.a, inp.n_per_class)
    if em == 0:
        raise ValueError("no edges expected: hierarchy undefined")
    return 1.0 - ea / em


# --- closed forms ----------------------------------------------------------


def _den(p, q, s, a):
    A = 2.0**a
    return A * (2 * p - 3 * q + s) + A * A * (q + s) - 2 * p + 2 * q


def hbar_direct_d1(b, p, q, s, a) -> float:
    A, B = 2.0**a, 2.0**b
    return (A - B) * (6 * p + 3 * (A * B - 2) * q - A * (A + B) * s) / (3 * B * _den(p, q, s, a))


def hbar_inverted_d1(b, p, q, s, a) -> float:
    A, B = 2.0**a, 2.0**b
    return (B - A) * (A * B * (q - 3 * s) + (A * A - 6) * q + 6 * p) / (3 * B * _den(p, q, s, a))


def hbar_direct_d2(b, p, q, s, a) -> float:
    A, B = 2.0**a, 2.0**b
    inner = 2 * A * B * B * (2 * s - 3 * q) + 5 * s * A * A * B + A**3 * s - 12 * B * (p - q)
    return -(A - B) * inner / (6 * B * B * _den(p, q, s, a))


def hbar_inverted_d2(b, p, q, s, a) -> float:
    A, B = 2.0**a, 2.0**b
    inner = 2 * A * B * B * (2 * q - 3 * s) + (5 * A * A - 36) * B * q + A**3 * q + 36 * B * p
    return (B - A) * inner / (6 * B * B * _den(p, q, s, a))


_CLOSED = {
    (1, False): hbar_direct_d1,
    (1, True): hbar_inverted_d1,
    (2, False): hbar_direct_d2,
    (2, True): hbar_inverted_d2,
}


def hbar_curve(d, p, q, s, a, b, inverted=False) -> float:
    """Hierarchy at (possibly fractional) ``b``; closed form when one exists."""
    fn = _CLOSED.get((d, inverted))
    if fn is not None and b >= 0:
        return fn(b, p, q, s, a)
    return hbar_from_sums(d, TheoryInputs(p, q, s, a, b), inverted)


def hbar_d0_star(p, q, s, a, N) -> float:
    """Hierarchy of the all-singletons ranking at ``d = 0``."""
    return 1.0 - 4.0**a * (N + 1) * s / (_den(p, q, s, a) * N)


# --- thresholds ------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdSetD1:
    """Critical ``s`` values at ``d = 1``; ``None`` where undefined.

    ``s_m``: planted stops being optimal (twitter).  ``s_2``: two classes
    become optimal.  ``s_i``: inverted two classes beat the planted ranking
    (``q = 0``).  ``s_1``: planted hierarchy reaches zero (``q = 0``).
    ``s_2_i``, ``s_3_i``: inverted two-class hierarchy turns positive, and
    three inverted classes start to win.  ``b_star`` and ``b_i_star`` are the
    optimal merge depths at the given ``s``.
    """

    s_m: float
    s_2: float
    s_i: float
    s_1: float
    s_2_i: float
    s_3_i: float
    b_star: Optional[float] = None
    b_i_star: Optional[float] = None


def b_star_d1(p, q, s, a) -> Optional[float]:
    num = 4.0**a * s + 6 * (q - p)
    den = 3 * q - s
    if den <= 0 or num <= 0:
        return None
    return 0.5 * math.log2(num / den)


def b_i_star_d1(p, s) -> Optional[float]:
    if s <= 0 or p <= 0:
        return None
    return 0.5 * math.log2(2 * p / s)


def thresholds_d1(p, q, a, s=None) -> ThresholdSetD1:
    A = 2.0**a
    s_m = (6 * (A - 1) * p - 3 * (A - 2) * q) / (A - A * A + A**3)
    s_2 = 3 / 7 * ((A * A - 12) * q + 12 * p) / (A * A)
    s_i = 12 * p / (3 * A + 2 * A * A - 2)
    s_1 = 6 * p / (A * (1 + A))
    s_2_i = 4 * p / (A * A)
    s_3_i = 3 * s_2_i
    bs = bi = None
    if s is not None:
        bs = b_star_d1(p, q, s, a)
        bi = b_i_star_d1(p, s)
    return ThresholdSetD1(s_m, s_2, s_i, s_1, s_2_i, s_3_i, bs, bi)


@dataclass(frozen=True)
class ThresholdSetD2:
    """Critical ``s`` values at ``d = 2``; ``None`` where undefined.

    ``s_2m``: planted stops being optimal (twitter).  ``s_21``: the trivial
    ranking becomes optimal (twitter).  ``s_21_0``: planted hierarchy
    reaches zero (``q = 0``).  ``s_22_i``, ``s_23_i``: inverted two classes
    turn positive, and three inverted classes start to win.
    """

    s_2m: float
    s_21: float
    s_21_0: float
    s_22_i: float
    s_23_i: float
    b2_star: Optional[float] = None
    beta: Optional[float] = None
    b2_i_star: Optional[float] = None


def b2_star(p, q, s, a) -> Optional[float]:
    """Stationary point of the ``d = 2`` merged hierarchy in ``b``.

    With ``x = 2**b`` the derivative vanishes where
    ``(3q - 2s) x**3 - (2 * 4**a * s - 6(p - q)) x - 8**a * s = 0``.  Returns
    the maximizing root with ``1 <= x <= 2**a``.
    """
    A = 2.0**a
    c3 = 3 * q - 2 * s
    c1 = -(2 * A * A * s - 6 * (p - q))
    c0 = -(A**3) * s
    roots = np.roots([c3, 0.0, c1, c0]) if c3 != 0 else np.roots([c1, c0])
    cands = [r.real for r in roots if abs(r.imag) < 1e-9 * max(1.0, abs(r)) and 1 <= r.real <= A]
    if not cands:
        return None
    best = max(cands, key=lambda x: hbar_direct_d2(math.log2(x), p, q, s, a))
    return math.log2(best)


def _beta(p, q, s, a) -> Optional[float]:
    rad = 3**6 * 2.0 ** (6 * a) * s**2 * (3 * q - 2 * s) ** 4 - 2**5 * 3**3 * (3 * q - 2 * s) ** 3 * (
        4.0**a * s - 3 * p + 3 * q
    ) ** 3
    return math.sqrt(rad) if rad >= 0 else None


def b2_i_star(p, s) -> Optional[float]:
    if s <= 0 or p <= 0:
        return None
    return 0.5 * math.log2(6 * p / s)


def thresholds_d2(p, q, a, s=None) -> ThresholdSetD2:
    A = 2.0**a
    s_2m = 6 * (2 * (q - p) / A + 2 * p - q) / (-3 * A + 2 * A**3 + A * A + 4)
    s_21 = (A * A * q + 4 * p - 4 * q) / (3 * A * A)
    s_21_0 = 12 * p / (A * (5 * A + A * A + 4))
    s_22_i = 12 * p / (A * A)
    s_23_i = 3 * s_22_i
    b2 = beta = bi = None
    if s is not None:
        b2 = b2_star(p, q, s, a)
        beta = _beta(p, q, s, a)
        bi = b2_i_star(p, s)
    return ThresholdSetD2(s_2m, s_21, s_21_0, s_22_i, s_23_i, b2, beta, bi)


# --- optimal summaries -----------------------------------------------------


@dataclass(frozen=True)
class OptimalSummary:
    """Optimal first-order hierarchy and class count.

    ``R_tilde`` may be fractional; ``R_int`` is the better of its integer
    neighbours and ``hbar_int`` its hierarchy.  Everything is ``None`` for
    an uncovered regime.
    """

    hbar: Optional[float]
    R_tilde: Optional[float]
    regime: str
    hierarchy_type: str
    b: Optional[float] = None
    inverted: bool = False
    R_int: Optional[int] = None
    hbar_int: Optional[float] = None

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def hierarchy_type(p, q, s) -> str:
    if q == 0:
        return MILITARY
    if p >= q > s:
        return TWITTER
    return UNCOVERED


def _summary(d, p, q, s, a, b, regime, htype, inverted=False, hbar=None):
    R_tilde = 2.0 ** (a - b)
    if hbar is None:
        hbar = hbar_curve(d, p, q, s, a, b, inverted)
    lo, hi = max(1, math.floor(R_tilde + 1e-9)), min(2**a, math.ceil(R_tilde - 1e-9))
    best = None
    for k in {lo, hi}:
        h = hbar_curve(d, p, q, s, a, a - math.log2(k), inverted) if k > 1 else 0.0
        if best is None or h > best[1]:
            best = (k, h)
    return OptimalSummary(hbar, R_tilde, regime, htype, b, inverted, best[0], best[1])


def _uncovered():
    return OptimalSummary(None, None, UNCOVERED, UNCOVERED)


def optimal_summary_d1(p, q, s, a) -> OptimalSummary:
    htype = hierarchy_type(p, q, s)
    t = thresholds_d1(p, q, a, s)
    if htype == TWITTER:
        if s <= t.s_m:
            return _summary(1, p, q, s, a, 0.0, "planted", htype)
        if s < t.s_2 and t.b_star is not None:
            return _summary(1, p, q, s, a, min(max(t.b_star, 0.0), a - 1.0), "merged", htype)
        return _summary(1, p, q, s, a, a - 1.0, "two classes", htype)
    if htype == MILITARY:
        if s <= t.s_i:
            return _summary(1, p, q, s, a, 0.0, "planted", htype)
        if s <= t.s_3_i or t.b_i_star is None:
            return _summary(1, p, q, s, a, a - 1.0, "inverted two classes", htype, inverted=True)
        b = min(max(t.b_i_star, 0.0), a - 1.0)
        return _summary(1, p, q, s, a, b, "inverted merged", htype, inverted=True)
    return _uncovered()


def optimal_summary_d2(p, q, s, a) -> OptimalSummary:
    htype = hierarchy_type(p, q, s)
    t = thresholds_d2(p, q, a, s)
    trivial = OptimalSummary(0.0, 1.0, "trivial", htype, float(a), False, 1, 0.0)
    if htype == TWITTER:
        if s <= t.s_2m:
            return _summary(2, p, q, s, a, 0.0, "planted", htype)
        if s <= t.s_21 and t.b2_star is not None:
            return _summary(2, p, q, s, a, t.b2_star, "merged", htype)
        return trivial
    if htype == MILITARY:
        if s < t.s_21_0:
            return _summary(2, p, q, s, a, 0.0, "planted", htype)
        if s <= t.s_22_i:
            return trivial
        if s < t.s_23_i or t.b2_i_star is None:
            return _summary(2, p, q, s, a, a - 1.0, "inverted two classes", htype, inverted=True)
        b = min(max(t.b2_i_star, 0.0), a - 1.0)
        return _summary(2, p, q, s, a, b, "inverted merged", htype, inverted=True)
    return _uncovered()


def optimal_summary_d0(p, q, s, a, N) -> OptimalSummary:
    """All nodes in their own class is optimal; its hierarchy is at least 1/2."""
    R = 2**a
    if N % R:
        raise ValueError("N must be a multiple of 2**a")
    h = hbar_d0_star(p, q, s, a, N)
    if h < 0.5 - 1e-12:
        raise AssertionError(f"d=0 optimum {h} below 1/2")
    b = -math.log2(N / R)
    return OptimalSummary(h, float(N), "singletons", hierarchy_type(p, q, s), b, False, int(N), h)


def optimal_summary(d, p, q, s, a, N=None) -> OptimalSummary:
    if d == 1:
        return optimal_summary_d1(p, q, s, a)
    if d == 2:
        return optimal_summary_d2(p, q, s, a)
    if d == 0:
        if N is None:
            raise ValueError("d=0 needs N")
        return optimal_summary_d0(p, q, s, a, N)
    raise ValueError(f"no closed-form optimum for d={d}")


# --- scaling ---------------------------------------------------------------


@dataclass(frozen=True)
class ScalingRow:
    a: int
    R: int
    s_m: float
    s_m_R2: float
    s_2m: float
    s_2m_R3: float


def scaling_check(p, q, a_range) -> list[ScalingRow]:
    """Resolution thresholds rescaled by ``R**2`` (d=1) and ``R**3`` (d=2)."""
    a_range = list(a_range)
    if len(a_range) < 3:
        raise ValueError("need at least three values of a")
    rows = []
    for a in a_range:
        R = 2**a
        sm = thresholds_d1(p, q, a).s_m
        s2m = thresholds_d2(p, q, a).s_2m
        rows.append(ScalingRow(a, R, sm, sm * R**2, s2m, s2m * R**3))
    return rows
