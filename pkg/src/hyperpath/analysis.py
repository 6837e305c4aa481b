"""Closed-form and exact-enumeration quantities for increasing paths.

Exact moments are kept as :class:`fractions.Fraction` built from the binary
value of the float ``p``, so they are exact for the probability actually
used by the edge sampler.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionTooLarge, InvalidParameter

ENUMERATION_CAP = 9
ENUMERATION_HARD_CAP = 11


def survival_probability(alpha: float, tol: float = 1e-12) -> float:
    """Root in (0, 1) of ``z = 1 - exp(-alpha z)``; 0 when ``alpha <= 1``.

    A few fixed-point steps from 1 give a starting guess, then bisection on
    ``f(z) = z - 1 + exp(-alpha z)`` over ``[tol, 1 - tol]`` runs until
    ``|f| <= tol``.
    """
    if alpha <= 0:
        raise InvalidParameter("alpha must be positive")
    if tol <= 0:
        raise InvalidParameter("tol must be positive")
    if alpha <= 1:
        return 0.0

    def f(z):
        return z - 1.0 + math.exp(-alpha * z)

    lo, hi = tol, 1.0 - tol
    z = 1.0
    for _ in range(8):
        z = 1.0 - math.exp(-alpha * z)
    # f < 0 below the root and > 0 above it; tighten the bracket with the guess.
    if lo < z < hi:
        if f(z) < 0:
            lo = z
        else:
            hi = z
    mid = z
    for _ in range(200):
        fm = f(mid)
        if abs(fm) <= tol and lo <= mid <= hi:
            return mid
        if fm < 0:
            lo = mid
        else:
            hi = mid
        mid = 0.5 * (lo + hi)
        if hi - lo < 1e-17:
            break
    return mid


def _tail_exponent(delta: float) -> float:
    return (1.0 - delta) / delta * math.log(2.0 / (1.0 - delta))


def subcritical_delta(alpha: float, tol: float = 1e-12) -> float:
    """Smallest ``δ*`` with ``(α/e)·(2/(1-δ))^((1-δ)/δ) < 1`` on ``(δ*, 1)``.

    Taking logs, the condition is ``((1-δ)/δ)·ln(2/(1-δ)) < 1 - ln α``; the
    left side decreases from +inf to 0 on (0, 1), so bisection finds the
    crossing.  For any ``δ > δ*`` the expected number of increasing paths of
    length ``δd`` decays exponentially in ``d``.
    """
    if not 0 < alpha < math.e:
        raise InvalidParameter("subcritical_delta needs 0 < alpha < e")
    target = 1.0 - math.log(alpha)
    lo, hi = 1e-12, 1.0 - 1e-15
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _tail_exponent(mid) >= target:
            lo = mid
        else:
            hi = mid
    return hi


def log_expected_path_count(d: int, m: int, p: float) -> float:
    if not 0 <= m <= d:
        raise InvalidParameter(f"m={m} outside [0, {d}]")
    if p == 0:
        return 0.0 if m == 0 else -math.inf
    return (d - m) * math.log(2) + math.lgamma(d + 1) - math.lgamma(d - m + 1) + m * math.log(p)


def expected_path_count(d: int, m: int, p: float) -> float:
    """Expected number of increasing paths with exactly ``m`` edges in Q^d_p.

    ``2^(d-m) · d!/(d-m)! · p^m``: choose the ``d - m`` fixed coordinates'
    values, the ordered ``m`` flipped coordinates, and require ``m`` edges.
    Exact rational arithmetic up to d = 25, log-space beyond.
    """
    if not 0 <= m <= d:
        raise InvalidParameter(f"m={m} outside [0, {d}]")
    if d <= 25:
        exact = 2 ** (d - m) * math.perm(d, m) * Fraction(p) ** m
        return float(exact)
    try:
        return math.exp(log_expected_path_count(d, m, p))
    except OverflowError:
        return math.inf


def overlap_profile(d: int, allow_large: bool = False) -> list[int]:
    """``Y_k`` = number of full increasing paths sharing exactly ``k`` edges
    with the identity path (which flips coordinates 0, 1, ..., d-1 in order).

    Enumerates all ``d!`` paths.  A path shares its ``t``-th edge with the
    identity iff its first ``t`` and first ``t + 1`` flipped coordinates are
    both initial segments ``{0..t-1}`` and ``{0..t}``.
    """
    if d < 1:
        raise InvalidParameter("d must be >= 1")
    cap = ENUMERATION_HARD_CAP if allow_large else ENUMERATION_CAP
    if d > cap:
        raise DimensionTooLarge(f"enumerating {d}! paths exceeds the cap d <= {cap}")
    if d > ENUMERATION_CAP:
        warnings.warn(f"enumerating {math.factorial(d)} paths; this is slow", RuntimeWarning)
    y = [0] * (d + 1)
    for perm in itertools.permutations(range(d)):
        shared = 0
        running_max = -1
        prev_cut = True
        for t, c in enumerate(perm):
            if c > running_max:
                running_max = c
            cut = running_max == t
            if prev_cut and cut:
                shared += 1
            prev_cut = cut
        y[shared] += 1
    return y


def yk_upper_bound(d: int, k: int) -> int:
    """``Σ_{l=1}^{⌊(d-k)/2⌋} C(d, 2l) · 2^(l-1) · (d-k-2l+2)!``."""
    if not 0 <= k < d:
        raise InvalidParameter(f"k={k} outside [0, {d})")
    return sum(
        math.comb(d, 2 * l) * 2 ** (l - 1) * math.factorial(d - k - 2 * l + 2)
        for l in range(1, (d - k) // 2 + 1)
    )


def first_moment(d: int, p: float) -> Fraction:
    """``E[X] = d! p^d`` for the number ``X`` of antipodal increasing paths."""
    return math.factorial(d) * Fraction(p) ** d


def second_moment_exact(d: int, p: float, y: list[int] | None = None) -> tuple[Fraction, float]:
    """``E[X²] = d! p^(2d) Σ_k p^(-k) Y_k`` and the Paley–Zygmund bound.

    Returns ``(E[X²], E[X]² / E[X²])``.  When ``p d >= e`` the bound is also
    checked against ``d^-5``.
    """
    if not 0 <= p <= 1:
        raise InvalidParameter("p must lie in [0, 1]")
    if y is None:
        y = overlap_profile(d)
    if p == 0:
        return Fraction(0), math.nan
    q = Fraction(p)
    # d! p^(2d) Σ_k p^(-k) Y_k, written with non-negative powers only
    ex2 = math.factorial(d) * sum(q ** (2 * d - k) * yk for k, yk in enumerate(y))
    ex = first_moment(d, p)
    pz = float(ex * ex / ex2)
    if p * d >= math.e and pz < d ** -5:
        raise ArithmeticError(f"Paley-Zygmund bound {pz} below d^-5 at d={d}, p={p}")
    return ex2, pz


@dataclass(frozen=True)
class MomentTable:
    d: int
    alpha: float
    p: float
    y: tuple[int, ...]
    bounds: tuple[int, ...]
    e_x: Fraction
    e_x2: Fraction
    pz_lower: float

    def to_csv(self) -> str:
        lines = ["k,Y_k,bound_k"]
        for k, yk in enumerate(self.y):
            bound = self.bounds[k] if k < self.d else ""
            lines.append(f"{k},{yk},{bound}")
        lines.append(f"E_X,{float(self.e_x)!r},")
        lines.append(f"E_X2,{float(self.e_x2)!r},")
        lines.append(f"pz_lower,{self.pz_lower!r},")
        return "\n".join(lines) + "\n"


def moment_table(d: int, alpha: float, allow_large: bool = False) -> MomentTable:
    from .edge_sampler import p_from_alpha

    p = p_from_alpha(alpha, d)
    y = overlap_profile(d, allow_large)
    ex2, pz = second_moment_exact(d, p, y)
    return MomentTable(
        d=d,
        alpha=alpha,
        p=p,
        y=tuple(y),
        bounds=tuple(yk_upper_bound(d, k) for k in range(d)),
        e_x=first_moment(d, p),
        e_x2=ex2,
        pz_lower=pz,
    )
