"""Supernatural numbers: prime factorizations with exponents in {1, 2, ...} or infinity.

A supernatural number is a formal product ``prod p^e(p)`` over primes, where each
exponent is a positive integer or ``INF``.  They order procyclic groups: two such
groups are isomorphic exactly when their supernatural orders are equal, so most of
the hull classification in this package reduces to arithmetic in this module.

Divisibility, gcd and lcm are pointwise on exponents (min / max), with the usual
conventions ``e <= INF`` for every ``e`` and ``INF <= INF``.
"""

import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

INF = math.inf

Exponent = Union[int, float]  # positive int, or INF

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_PRIME_LIMIT = 1 << 64


def is_prime(n: int) -> bool:
    """Deterministic primality test for ``n < 2**64``; larger inputs are rejected."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    if n >= _PRIME_LIMIT:
        raise ValueError(f"primality testing is limited to integers below 2**64, got {n}")
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # This witness set decides primality for every n < 2**64.
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    # Brent's cycle variant; n must be odd, composite, and not a prime power of 2.
    if n % 2 == 0:
        return 2
    for c in range(1, 64):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"failed to find a factor of {n}")


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of a positive integer below 2**64 as {prime: exponent}."""
    if n < 1:
        raise ValueError(f"cannot factor non-positive integer {n}")
    if n >= _PRIME_LIMIT:
        raise ValueError(f"factorization is limited to integers below 2**64, got {n}")
    factors: dict[int, int] = {}
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    p = 49
    while p * p <= n and p < 1000:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
        p += 2
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    return factors


_TERM_RE = re.compile(r"^(\d+)\^(\d+|inf)$")


@dataclass(frozen=True)
class Supernatural:
    """Canonical formal product ``prod p^e(p)``, stored as sorted (prime, exponent) pairs."""

    pairs: tuple[tuple[int, Exponent], ...]

    def __post_init__(self) -> None:
        seen = set()
        for p, e in self.pairs:
            if p in seen:
                raise ValueError(f"duplicate prime {p}")
            seen.add(p)
            if not is_prime(p):
                raise ValueError(f"base {p} is not prime")
            if e == INF:
                continue
            if not isinstance(e, int) or e < 1:
                raise ValueError(f"exponent of {p} must be a positive integer or INF, got {e!r}")
        if tuple(sorted(self.pairs)) != self.pairs:
            raise ValueError("pairs must be sorted by prime")

    @classmethod
    def from_factors(cls, factors: Mapping[int, Exponent]) -> "Supernatural":
        pairs = tuple(sorted((p, e) for p, e in factors.items() if e != 0))
        return cls(pairs)

    @classmethod
    def from_int(cls, n: int) -> "Supernatural":
        return cls.from_factors(factorize(n))

    @classmethod
    def one(cls) -> "Supernatural":
        return cls(())

    @classmethod
    def parse(cls, text: str) -> "Supernatural":
        """Parse strings like ``"2^inf*3^4"``; ``"1"`` denotes the empty product."""
        stripped = text.strip()
        if stripped == "1":
            return cls.one()
        if not stripped:
            raise ValueError("empty factorization string")
        factors: dict[int, Exponent] = {}
        for term in stripped.split("*"):
            m = _TERM_RE.match(term.strip())
            if m is None:
                raise ValueError(f"malformed term {term.strip()!r}, expected p^e")
            p = int(m.group(1))
            e: Exponent = INF if m.group(2) == "inf" else int(m.group(2))
            if e == 0:
                raise ValueError(f"zero exponent for base {p}")
            if not is_prime(p):
                raise ValueError(f"base {p} is not prime")
            if p in factors:
                raise ValueError(f"duplicate prime {p}")
            factors[p] = e
        return cls.from_factors(factors)

    def format(self) -> str:
        if not self.pairs:
            return "1"
        parts = []
        for p, e in self.pairs:
            parts.append(f"{p}^inf" if e == INF else f"{p}^{e}")
        return "*".join(parts)

    def __str__(self) -> str:
        return self.format()

    @property
    def factors(self) -> dict[int, Exponent]:
        return dict(self.pairs)

    def exponent(self, p: int) -> Exponent:
        for q, e in self.pairs:
            if q == p:
                return e
        return 0

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    def divides(self, other: "Supernatural") -> bool:
        return all(e <= other.exponent(p) for p, e in self.pairs)

    def lcm(self, other: "Supernatural") -> "Supernatural":
        factors: dict[int, Exponent] = dict(self.pairs)
        for p, e in other.pairs:
            factors[p] = max(factors.get(p, 0), e)
        return Supernatural.from_factors(factors)

    def gcd(self, other: "Supernatural") -> "Supernatural":
        factors: dict[int, Exponent] = {}
        for p, e in self.pairs:
            m = min(e, other.exponent(p))
            if m != 0:
                factors[p] = m
        return Supernatural.from_factors(factors)

    def is_finite(self) -> bool:
        return all(e != INF for _, e in self.pairs)

    def as_int(self) -> int:
        """Materialize a finite supernatural as an ordinary integer."""
        if not self.is_finite():
            raise ValueError(f"{self} has an infinite exponent")
        n = 1
        for p, e in self.pairs:
            n *= p ** int(e)
        return n

    def to_json_dict(self) -> dict[str, Union[int, str]]:
        return {str(p): ("inf" if e == INF else int(e)) for p, e in self.pairs}

    @classmethod
    def from_json_dict(cls, obj: Mapping[str, Union[int, str]]) -> "Supernatural":
        factors: dict[int, Exponent] = {}
        for key, val in obj.items():
            p = int(key)
            if val == "inf":
                factors[p] = INF
            elif isinstance(val, int) and not isinstance(val, bool):
                factors[p] = val
            else:
                raise ValueError(f"exponent of {p} must be an integer or \"inf\", got {val!r}")
        return cls.from_factors(factors)
