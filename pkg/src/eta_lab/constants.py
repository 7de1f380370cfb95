"""Rigorous enclosures of the prime-series limit constants.

Five positive series over primes p_1 < p_2 < ... are evaluated exactly:

    theta : sum_k p_k^2(p_k+2)/(2(p_k+1)^2) * prod_{j<k} (2+p_j(p_j+2))/(2(p_j+1)^2)
    Theta : sum_k p_k^2/(2(p_k+1))          * prod_{j<k} (p_j+2)/(2(p_j+1))
    alpha : sum_k p_k^2/(2(p_k+1)^2)        * prod_{j<k} (p_j+2)/(2(p_j+1))
    beta  : sum_k p_k/(2(p_k+1)^2)          * prod_{j<k} (p_j+2)/(2(p_j+1))
    erdos : sum_k p_k/2^k

theta is the fixed-prime heuristic value for the average of eta(D1, D2);
Theta*(1-beta)+alpha is the proven limit; Theta alone is the limit of the
average of n(D); erdos is the limit of the average of n_1(p). Partial sums
are exact rationals; tails are closed by a geometric bound resting on
Nagura's theorem (for n >= 25 there is a prime in (n, 1.2n], hence
p_{k+1} <= 1.2 p_k once p_k >= 25):

  * every step ratio term_{k+1}/term_k is at most r = (36/25) * c(p_K),
    where c is the series' product factor (c <= 1/2 + 1/(2(p_K+1)), so
    r < 3/4 once p_K >= 25);
  * term_{K+1} is bounded by evaluating the head factor at 6 p_K / 5
    (the head is increasing in p, except for beta where it decreases and
    the head at p_K already bounds it);
  * the tail is then at most term_{K+1}^ub / (1 - r).

For erdos the ratio bound is simply p_{k+1}/(2 p_k) <= 3/5. Everything is
exact rational arithmetic end to end; no rounding mode can leak in.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, log

from .arith import PrimeTable, sieve_primes

__all__ = [
    "SERIES_NAMES",
    "RigorousValue",
    "default_primes",
    "series_terms",
    "partial_sum",
    "tail_bound",
    "rigorous_constant",
    "combined_constant",
    "mu_constant",
    "render_decimal",
    "sign_probability",
    "least_negative_density",
    "ZETA2_LO",
    "ZETA2_HI",
]

SERIES_NAMES = ("theta", "Theta", "alpha", "beta", "erdos")

# 30-decimal-digit enclosure of zeta(2) = pi^2/6, used only for reference
# columns in experiment reports; no pass/fail logic compares against it.
ZETA2_LO = Fraction(1644934066848226436472415166646, 10**30)
ZETA2_HI = Fraction(1644934066848226436472415166647, 10**30)


def _head_theta(p: Fraction) -> Fraction:
    return p * p * (p + 2) / (2 * (p + 1) ** 2)


def _head_Theta(p: Fraction) -> Fraction:
    return p * p / (2 * (p + 1))


def _head_alpha(p: Fraction) -> Fraction:
    return p * p / (2 * (p + 1) ** 2)


def _head_beta(p: Fraction) -> Fraction:
    return p / (2 * (p + 1) ** 2)


def _factor_theta(p: int) -> Fraction:
    return Fraction(2 + p * (p + 2), 2 * (p + 1) ** 2)


def _factor_shared(p: int) -> Fraction:
    return Fraction(p + 2, 2 * (p + 1))


_HEADS = {
    "theta": _head_theta,
    "Theta": _head_Theta,
    "alpha": _head_alpha,
    "beta": _head_beta,
}
_FACTORS = {
    "theta": _factor_theta,
    "Theta": _factor_shared,
    "alpha": _factor_shared,
    "beta": _factor_shared,
}
# heads increase with p except beta's, which decreases for p > 1
_HEAD_INCREASING = {"theta": True, "Theta": True, "alpha": True, "beta": False}


@dataclass(frozen=True)
class RigorousValue:
    """Exact rational interval [lo, hi] proven to contain a series limit."""

    name: str
    k_terms: int
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"{self.name}: lo > hi")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: Fraction | int) -> bool:
        return self.lo <= x <= self.hi


def default_primes(k_terms: int) -> PrimeTable:
    """A prime table holding at least k_terms primes."""
    if k_terms < 1:
        raise ValueError("k_terms must be >= 1")
    limit = 64
    if k_terms > 16:
        limit = int(k_terms * (log(k_terms) + log(log(k_terms)) + 1.1)) + 16
    while True:
        table = sieve_primes(limit)
        if len(table) >= k_terms:
            return table
        limit *= 2


def _check(name: str, k_terms: int, primes: PrimeTable) -> None:
    if name not in SERIES_NAMES:
        raise ValueError(f"unknown series {name!r}, expected one of {SERIES_NAMES}")
    if k_terms < 1:
        raise ValueError(f"k_terms must be >= 1, got {k_terms}")
    if len(primes) < k_terms:
        raise ValueError(
            f"prime table holds {len(primes)} primes, {k_terms} needed"
        )


def series_terms(name: str, k_terms: int, primes: PrimeTable) -> list[Fraction]:
    """Exact terms term_1..term_K, running product carried incrementally."""
    _check(name, k_terms, primes)
    if name == "erdos":
        return [Fraction(primes.p(k), 2**k) for k in range(1, k_terms + 1)]
    head = _HEADS[name]
    factor = _FACTORS[name]
    out: list[Fraction] = []
    prod = Fraction(1)
    for k in range(1, k_terms + 1):
        p = primes.p(k)
        out.append(head(Fraction(p)) * prod)
        prod *= factor(p)
    return out


def partial_sum(name: str, k_terms: int, primes: PrimeTable) -> Fraction:
    """Exact partial sum of the named series through k_terms terms."""
    total = Fraction(0)
    for term in series_terms(name, k_terms, primes):
        total += term
    return total


def tail_bound(name: str, k_terms: int, primes: PrimeTable) -> Fraction:
    """Exact rational T with sum_{k > k_terms} term_k <= T.

    Requires p_K >= 25 so Nagura's prime-gap theorem gives
    p_{k+1} <= 1.2 p_k for all k >= K.
    """
    _check(name, k_terms, primes)
    p_K = primes.p(k_terms)
    if p_K < 25:
        raise ValueError(
            f"tail bound needs p_K >= 25 (K >= 10); got p_{k_terms} = {p_K}"
        )
    if name == "erdos":
        ratio = Fraction(3, 5)
        first_ub = Fraction(6 * p_K, 5) / 2 ** (k_terms + 1)
        return first_ub / (1 - ratio)
    factor = _FACTORS[name]
    ratio = Fraction(36, 25) * factor(p_K)
    assert ratio < 1
    prod = Fraction(1)
    for k in range(1, k_terms + 1):
        prod *= factor(primes.p(k))
    head = _HEADS[name]
    head_arg = Fraction(6 * p_K, 5) if _HEAD_INCREASING[name] else Fraction(p_K)
    first_ub = head(head_arg) * prod
    return first_ub / (1 - ratio)


def rigorous_constant(
    name: str, k_terms: int = 1000, primes: PrimeTable | None = None
) -> RigorousValue:
    """[partial_sum, partial_sum + tail_bound] for the named constant."""
    if primes is None:
        primes = default_primes(k_terms)
    lo = partial_sum(name, k_terms, primes)
    hi = lo + tail_bound(name, k_terms, primes)
    return RigorousValue(name=name, k_terms=k_terms, lo=lo, hi=hi)


def combined_constant(
    k_terms: int = 1000, primes: PrimeTable | None = None
) -> RigorousValue:
    """Enclosure of Theta*(1-beta)+alpha by interval arithmetic."""
    if primes is None:
        primes = default_primes(k_terms)
    big = rigorous_constant("Theta", k_terms, primes)
    al = rigorous_constant("alpha", k_terms, primes)
    be = rigorous_constant("beta", k_terms, primes)
    if not (0 <= be.lo <= be.hi <= 1):
        raise ValueError("beta enclosure escaped [0, 1]; raise k_terms")
    lo = big.lo * (1 - be.hi) + al.lo
    hi = big.hi * (1 - be.lo) + al.hi
    return RigorousValue(name="combined", k_terms=k_terms, lo=lo, hi=hi)


def mu_constant(
    k_terms: int = 1000, primes: PrimeTable | None = None
) -> RigorousValue:
    """Enclosure of mu = (Theta*(1-beta)+alpha) - theta, the part of the
    eta average contributed by unboundedly large primes."""
    if primes is None:
        primes = default_primes(k_terms)
    comb = combined_constant(k_terms, primes)
    th = rigorous_constant("theta", k_terms, primes)
    return RigorousValue(
        name="mu", k_terms=k_terms, lo=comb.lo - th.hi, hi=comb.hi - th.lo
    )


# ---------------------------------------------------------------------------
# Decimal rendering with outward semantics
# ---------------------------------------------------------------------------

def _format_scaled(t: int, digits: int) -> str:
    sign = "-" if t < 0 else ""
    t = abs(t)
    ip, rem = divmod(t, 10**digits)
    return f"{sign}{ip}.{rem:0{digits}d}"


def _exact_decimal(x: Fraction) -> str:
    den = x.denominator
    tmp = den
    for f in (2, 5):
        while tmp % f == 0:
            tmp //= f
    if tmp != 1:
        return f"{x.numerator}/{x.denominator}"
    sign = "-" if x < 0 else ""
    a = abs(x)
    ip = a.numerator // a.denominator
    frac = a - ip
    digs = []
    while frac:
        frac *= 10
        d = frac.numerator // frac.denominator
        digs.append(str(d))
        frac -= d
    return f"{sign}{ip}" + ("." + "".join(digs) if digs else "")


def render_decimal(value: RigorousValue, digits: int) -> str:
    """Decimal rendering of an enclosure with `digits` places after the point.

    If every point of [lo, hi] shares the same first `digits` decimals, the
    shared truncation is printed (a correct prefix of the limit's decimal
    expansion). Otherwise an ASCII 'mid +/- w' form is printed whose
    interval contains [lo, hi]. A degenerate interval prints exactly.
    """
    if digits < 1:
        raise ValueError("digits must be >= 1")
    if value.lo == value.hi:
        return _exact_decimal(value.lo)
    scale = 10**digits
    t_lo = floor(value.lo * scale)
    t_hi = floor(value.hi * scale)
    if t_lo == t_hi:
        return _format_scaled(t_lo, digits)
    mid = value.midpoint
    half = value.width / 2
    t_mid = floor(mid * scale)
    # half-width padded by one ulp of the printed midpoint, rounded up
    padded = half + Fraction(1, scale)
    w = float(padded.numerator) / float(padded.denominator)
    w *= 1.0000001
    return f"{_format_scaled(t_mid, digits)} +/- {w:.2e}"


# ---------------------------------------------------------------------------
# Shared density predictions (same prime products as the series above)
# ---------------------------------------------------------------------------

def sign_probability(p: int, sign: int) -> Fraction:
    """Limit proportion of fundamental discriminants D with chi_D(p) = sign:
    p/(2p+2) for sign = +-1, 1/(p+1) for sign = 0."""
    if sign in (1, -1):
        return Fraction(p, 2 * p + 2)
    if sign == 0:
        return Fraction(1, p + 1)
    raise ValueError(f"sign must be -1, 0 or +1, got {sign}")


def pair_sign_probability(p: int, sign: int) -> Fraction:
    """Limit proportion of ordered pairs (D1, D2) whose coefficient sign at
    p equals `sign`: p(p+2)/(2(p+1)^2) for +-1, 1/(p+1)^2 for 0."""
    if sign in (1, -1):
        return Fraction(p * (p + 2), 2 * (p + 1) ** 2)
    if sign == 0:
        return Fraction(1, (p + 1) ** 2)
    raise ValueError(f"sign must be -1, 0 or +1, got {sign}")


def least_negative_density(k: int, primes: PrimeTable) -> Fraction:
    """Limit proportion of fundamental discriminants with n(D) = p_k:
    p_k/(2(p_k+1)) * prod_{j<k} (p_j+2)/(2(p_j+1))."""
    if k < 1:
        raise ValueError("k must be >= 1")
    p = primes.p(k)
    out = Fraction(p, 2 * (p + 1))
    for j in range(1, k):
        out *= _factor_shared(primes.p(j))
    return out
