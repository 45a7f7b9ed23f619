"""Exact integer arithmetic: factorization, Ramanujan sums and their moments.

Everything here is exact integer or rational arithmetic except the ``direct``
Ramanujan mode, which sums complex exponentials and then certifies that the
result rounds cleanly to an integer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .config import current_limits, require_work
from .errors import BudgetError, DomainError, NumericalIntegrityError
from .report import MomentReport

RAMANUJAN_MODES = ("direct", "multiplicative", "moebius_gcd")


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple[tuple[int, int], ...]

    def check(self) -> bool:
        from sympy import isprime

        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1 or not isprime(p):
                return False
            last = p
            prod *= p**e
        return prod == self.value

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)


@dataclass(frozen=True)
class ArithmeticBasics:
    factorization: Factorization
    mobius: int
    phi: int
    divisor_count: int


@lru_cache(maxsize=65536)
def _trial_division(n: int) -> tuple[tuple[int, int], ...]:
    out = []
    m = n
    for p in (2, 3):
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
    p = 5
    step = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += step
        step = 6 - step
    if m > 1:
        out.append((m, 1))
    return tuple(out)


def factorize(n: int) -> Factorization:
    n = int(n)
    if n < 1:
        raise DomainError(f"factorization needs n >= 1, got {n}")
    if n > current_limits().factor_max:
        raise DomainError(f"n={n} exceeds factorization limit {current_limits().factor_max}")
    return Factorization(n, _trial_division(n))


def mobius(n: int) -> int:
    fs = factorize(n).factors
    if any(e > 1 for _, e in fs):
        return 0
    return -1 if len(fs) % 2 else 1


def euler_phi(n: int) -> int:
    out = 1
    for p, e in factorize(n).factors:
        out *= p ** (e - 1) * (p - 1)
    return out


def divisor_count(n: int) -> int:
    return math.prod(e + 1 for _, e in factorize(n).factors)


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n).factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def arithmetic_basics(n: int) -> ArithmeticBasics:
    f = factorize(n)
    return ArithmeticBasics(f, mobius(n), euler_phi(n), divisor_count(n))


# --------------------------------------------------------------------------
# Ramanujan sums


def _ramanujan_direct(q: int, n: int) -> int:
    if q > current_limits().direct_ramanujan_q:
        raise BudgetError(f"direct Ramanujan sum limited to q <= {current_limits().direct_ramanujan_q}")
    r = n % q
    a = np.arange(q)
    a = a[np.gcd(a, q) == 1] if q > 1 else np.array([0])
    z = np.exp(2j * np.pi * (a * r % q) / q).sum()
    val = round(z.real)
    tol = 1e-6 * q
    if abs(z.imag) >= tol or abs(z.real - val) >= tol:
        raise NumericalIntegrityError(f"c_{q}({n}) direct sum residual too large: {z}")
    return int(val)


def _ramanujan_prime_power(p: int, k: int, n: int) -> int:
    pk = p**k
    if n % pk == 0:
        return pk - pk // p
    if n % (pk // p) == 0:
        return -(pk // p)
    return 0


def _ramanujan_multiplicative(q: int, n: int) -> int:
    out = 1
    for p, k in factorize(q).factors:
        out *= _ramanujan_prime_power(p, k, n)
        if out == 0:
            break
    return out


def _ramanujan_moebius(q: int, n: int) -> int:
    g = math.gcd(q, n)
    return sum(d * mobius(q // d) for d in divisors(g))


_MODES = {
    "direct": _ramanujan_direct,
    "multiplicative": _ramanujan_multiplicative,
    "moebius_gcd": _ramanujan_moebius,
}


def ramanujan_sum(q: int, n: int, mode: str = "multiplicative") -> int:
    """c_q(n) = sum over a in (Z/qZ)^x of exp(2 pi i a n / q).

    ``c_q(0)`` is phi(q); negative ``n`` uses evenness c_q(-n) = c_q(n).
    """
    q, n = int(q), int(n)
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    try:
        fn = _MODES[mode]
    except KeyError:
        raise DomainError(f"unknown mode {mode!r}; choose from {RAMANUJAN_MODES}") from None
    return fn(q, abs(n))


@lru_cache(maxsize=4096)
def ramanujan_period(q: int) -> tuple[int, ...]:
    """(c_q(0), ..., c_q(q-1)); c_q is q-periodic in n."""
    return tuple(_ramanujan_multiplicative(q, r) for r in range(q))


def ramanujan_table(q: int, n: np.ndarray) -> np.ndarray:
    """Vectorized c_q(n) for an integer array ``n`` via the period table."""
    per = np.asarray(ramanujan_period(int(q)), dtype=np.int64)
    return per[np.abs(np.asarray(n, dtype=np.int64)) % q]


def partial_sums(n: int, N: int) -> tuple[int, int]:
    """(C_N(n), S_N(n)): signed and absolute sums of c_q(n) over 1 <= q <= N."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    vals = [ramanujan_sum(q, n) for q in range(1, N + 1)]
    return sum(vals), sum(abs(v) for v in vals)


def partial_sum_table(N: int, n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = np.asarray(n, dtype=np.int64)
    C = np.zeros(n.shape, dtype=np.int64)
    S = np.zeros(n.shape, dtype=np.int64)
    for q in range(1, N + 1):
        c = ramanujan_table(q, n)
        C += c
        S += np.abs(c)
    return C, S


# --------------------------------------------------------------------------
# Moments


def _power_sum(values: np.ndarray, j: int) -> int:
    vmax = int(values.max()) if values.size else 0
    if values.size * float(vmax) ** j < 2**62:
        return int(np.sum(values.astype(np.int64) ** j))
    return sum(int(v) ** j for v in values.tolist())


def _root_of_mean(total: int, M: int, j: int) -> float:
    if total == 0:
        return 0.0
    return math.exp((math.log(total) - math.log(M)) / j)


def ramanujan_moment(Q: int, j: int, M: int, oracle: bool = False) -> MomentReport:
    """[(1/M) sum_{n=1..M} S_Q(n)^j]^(1/j) with exact integer accumulation.

    With ``oracle=True`` the total is recomputed independently (Moebius-gcd
    evaluation, descending n) and must agree exactly.
    """
    if Q < 1 or j < 1 or M < 1:
        raise DomainError("Q, j, M must be positive")
    require_work(M * Q, "ramanujan_moment")
    n = np.arange(1, M + 1, dtype=np.int64)
    _, S = partial_sum_table(Q, n)
    total = _power_sum(S, j)
    checked = False
    if oracle:
        require_work(M * Q * 8, "ramanujan_moment oracle")
        alt = 0
        for m in range(M, 0, -1):
            s = 0
            for q in range(Q, 0, -1):
                s += abs(_ramanujan_moebius(q, m))
            alt += s**j
        if alt != total:
            raise NumericalIntegrityError(f"moment oracle mismatch: {total} != {alt}")
        checked = True
    return MomentReport(
        parameters={"Q": Q, "j": j, "M": M},
        value=_root_of_mean(total, M, j),
        oracle_checked=checked,
        extra={"total": total, "mean": str(Fraction(total, M))},
    )


def _lcm_distribution(Q: int, j: int) -> dict[int, int]:
    dist = {1: 1}
    for _ in range(j):
        nxt: dict[int, int] = {}
        for L, c in dist.items():
            for q in range(1, Q + 1):
                m = L * q // math.gcd(L, q)
                nxt[m] = nxt.get(m, 0) + c
        dist = nxt
    return dist


def divisor_count_sieve(X: int) -> np.ndarray:
    """d(r) for r = 0..X (d(0) set to 0)."""
    d = np.zeros(X + 1, dtype=np.int64)
    for k in range(1, X + 1):
        d[k::k] += 1
    return d


def lcm_moment(Q: int, j: int, divisor_route: bool = True) -> MomentReport:
    """Sum over q in [1, Q]^j of 1/lcm(q), exact, plus the divisor-function majorant.

    The majorant is sum_{r <= Q^j} d(r)^j / r: each lcm r <= Q^j is hit by at
    most d(r)^j tuples.
    """
    if Q < 1 or j < 1:
        raise DomainError("Q and j must be positive")
    dist = _lcm_distribution_checked(Q, j)
    exact = sum((Fraction(c, L) for L, c in dist.items()), Fraction(0))
    extra: dict = {"exact": str(exact), "tuples": Q**j}
    if divisor_route:
        X = Q**j
        require_work(X * math.log(X + 1) + X, "lcm_moment divisor route")
        d = divisor_count_sieve(X)[1:].astype(float)
        r = np.arange(1, X + 1, dtype=float)
        bound = math.fsum((d**j / r).tolist())
        extra["divisor_bound"] = bound
        extra["below_bound"] = float(exact) <= bound
    return MomentReport(parameters={"Q": Q, "j": j}, value=float(exact), extra=extra)


def _lcm_distribution_checked(Q: int, j: int) -> dict[int, int]:
    # each DP layer touches (#distinct lcms) * Q pairs; distinct lcms <= Q^j
    require_work(min(Q**j, 10**12) * Q, "lcm_moment enumeration")
    return _lcm_distribution(Q, j)


def lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def gcd_product_period_sum(q_vec: Sequence[int], verify: bool = True) -> int:
    """sum_{n=1..L} prod_i gcd(q_i, n) with L = lcm(q_vec).

    With ``verify`` the summand's L-periodicity is checked: the sums over
    n <= 2L and n <= 3L must be exactly 2x and 3x the returned value.
    """
    qs = [int(q) for q in q_vec]
    if not qs or min(qs) < 1:
        raise DomainError("q_vec must be a nonempty list of positive integers")
    L = lcm(qs)
    span = 3 * L if verify else L
    require_work(span * len(qs), "gcd_product_period_sum")
    n = np.arange(1, span + 1, dtype=np.int64)
    prod = np.ones(span, dtype=object if _overflows(qs) else np.int64)
    for q in qs:
        prod = prod * np.gcd(n, q)
    cums = [int(prod[: m * L].sum()) for m in (1, 2, 3)] if verify else [int(prod.sum())]
    if verify and (cums[1] != 2 * cums[0] or cums[2] != 3 * cums[0]):
        raise NumericalIntegrityError(f"period extension failed for {qs}: {cums}")
    return cums[0]


def _overflows(qs: Sequence[int]) -> bool:
    return math.prod(qs) * lcm(qs) >= 2**62


def prime_power_gcd_sum(p: int, exponents: Sequence[int], powers: Sequence[int]) -> int:
    """sum_{n <= p^max(x)} prod_s gcd(p^{x_s}, n)^{k_s}, by direct enumeration."""
    top = p ** max(exponents)
    require_work(top * len(exponents), "prime_power_gcd_sum")
    total = 0
    for n in range(1, top + 1):
        term = 1
        for x, k in zip(exponents, powers):
            term *= math.gcd(p**x, n) ** k
        total += term
    return total


def gcd_product_period_sum_local(q_vec: Sequence[int]) -> int:
    """Same quantity as gcd_product_period_sum, evaluated prime by prime.

    gcd(q, n) is multiplicative across the primes of L, so by CRT the period
    sum factors into one local sum per prime p^x || L, each over n <= p^x.
    """
    qs = [int(q) for q in q_vec]
    L = lcm(qs)
    total = 1
    for p, x in factorize(L).factors:
        local_exps = []
        for q in qs:
            y = 0
            while q % p == 0:
                q //= p
                y += 1
            local_exps.append(y)
        top = p**x
        n = np.arange(1, top + 1, dtype=np.int64)
        prod = np.ones(top, dtype=object)
        for y in local_exps:
            prod = prod * np.gcd(n, p**y)
        total *= int(prod.sum())
    return total


def period_average_bound(q_vec: Sequence[int], M: int) -> tuple[Fraction, Fraction]:
    """Both sides of the periodicity reduction for products of |c_q|.

    Returns ((1/M) sum_{n<=M} prod |c_{q_i}(n)|, (2/L) sum_{n<=L} prod gcd(q_i, n)).
    The left side is at most the right side whenever M >= L.
    """
    qs = [int(q) for q in q_vec]
    L = lcm(qs)
    require_work(M * len(qs), "period_average_bound")
    n = np.arange(1, M + 1, dtype=np.int64)
    prod = np.ones(M, dtype=object)
    for q in qs:
        prod = prod * np.abs(ramanujan_table(q, n))
    lhs = Fraction(int(prod.sum()), M)
    rhs = Fraction(2 * gcd_product_period_sum(qs, verify=False), L)
    return lhs, rhs


def max_divisor_exponent(X: int, start: int = 3) -> float:
    """max over start <= r <= X of log d(r) / log r (the exponent in d(r) <= r^eps)."""
    d = divisor_count_sieve(X)
    r = np.arange(start, X + 1)
    return float(np.max(np.log(d[start:]) / np.log(r)))
