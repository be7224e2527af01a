"""Frequency integer chains and hull classification.

A limit-periodic sequence decomposes into periodic layers whose periods form a
divisibility chain ``n_1 | n_2 | ...``.  The chain determines the hull of the
sequence up to isomorphism through its supernatural limit, so classification
questions become supernatural-number comparisons plus explicit divisibility
witnesses.

Infinite chains are represented finitely as a prefix plus a cyclic ratio rule:
after the prefix, consecutive ratios repeat the rule forever.  This makes the
classification decidable and every reported quantity exactly computable.
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .supernatural import INF, Supernatural, factorize


@dataclass(frozen=True)
class FrequencyChain:
    """Divisibility chain ``n_1 | n_2 | ...`` given by a prefix and an optional cyclic ratio rule."""

    prefix: tuple[int, ...]
    rule: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "rule", tuple(self.rule))
        if not self.prefix:
            raise ValueError("chain prefix must be nonempty")
        for n in self.prefix:
            if not isinstance(n, int) or n < 1:
                raise ValueError(f"chain entries must be positive integers, got {n!r}")
        for a, b in zip(self.prefix, self.prefix[1:]):
            if b <= a:
                raise ValueError(f"chain entries must be strictly increasing ({a} then {b})")
            if b % a != 0:
                raise ValueError(f"divisibility violated: {a} does not divide {b}")
        for r in self.rule:
            if not isinstance(r, int) or r < 2:
                raise ValueError(f"rule ratios must be integers >= 2, got {r!r}")

    @property
    def is_finite(self) -> bool:
        return not self.rule

    def nth_term(self, j: int) -> int:
        """The j-th chain entry, 1-indexed; total for every j >= 1 on ruled chains."""
        if j < 1:
            raise ValueError(f"chain entries are indexed from 1, got {j}")
        if j <= len(self.prefix):
            return self.prefix[j - 1]
        if not self.rule:
            raise ValueError(f"finite chain of length {len(self.prefix)} has no entry {j}")
        steps = j - len(self.prefix)
        cycles, rem = divmod(steps, len(self.rule))
        value = self.prefix[-1] * math.prod(self.rule) ** cycles
        for r in self.rule[:rem]:
            value *= r
        return value

    def terms(self, count: int) -> list[int]:
        """First ``count`` entries, computed incrementally."""
        if count < 1:
            raise ValueError("count must be >= 1")
        if not self.rule and count > len(self.prefix):
            raise ValueError(f"finite chain of length {len(self.prefix)} has no entry {count}")
        out = list(self.prefix[:count])
        value = out[-1]
        i = 0
        while len(out) < count:
            value *= self.rule[i % len(self.rule)]
            out.append(value)
            i += 1
        return out

    def ratio_at(self, j: int) -> int:
        """Ratio from entry j to entry j+1."""
        if j < 1:
            raise ValueError(f"ratio index must be >= 1, got {j}")
        if j < len(self.prefix):
            return self.prefix[j] // self.prefix[j - 1]
        if not self.rule:
            raise ValueError(f"finite chain of length {len(self.prefix)} has no ratio at {j}")
        return self.rule[(j - len(self.prefix)) % len(self.rule)]

    def subchain(self, step: int) -> "FrequencyChain":
        """The chain of every ``step``-th entry; an infinite subchain has the same hull."""
        if step < 1:
            raise ValueError("step must be >= 1")
        if step == 1:
            return self
        if not self.rule:
            kept = self.prefix[step - 1 :: step]
            if not kept:
                raise ValueError(f"step {step} exceeds chain length {len(self.prefix)}")
            return FrequencyChain(kept, ())
        keep_count = -(-len(self.prefix) // step)  # ceil: kept prefix covers the original prefix
        new_prefix = [self.nth_term(i * step) for i in range(1, keep_count + 1)]
        cycle = len(self.rule) // math.gcd(len(self.rule), step)
        base = keep_count * step
        new_rule = [
            self.nth_term(base + (c + 1) * step) // self.nth_term(base + c * step)
            for c in range(cycle)
        ]
        return FrequencyChain(tuple(new_prefix), tuple(new_rule))

    def entry_factorization(self, j: int) -> dict[int, int]:
        """Factorization of the j-th entry, assembled from the chain's small parts.

        Entries deep in a chain overflow any direct factoring limit, but they
        are products of the first entry and the consecutive ratios, which stay
        small; factoring those pieces is always feasible.
        """
        factors = dict(factorize(self.nth_term(1)))
        for i in range(1, j):
            for p, e in factorize(self.ratio_at(i)).items():
                factors[p] = factors.get(p, 0) + e
        return factors

    def limit(self) -> Supernatural:
        """Supernatural limit of the chain: exponent sup over all entries.

        Primes occurring in the cyclic rule recur forever and get exponent INF;
        every other prime tops out in the last prefix entry.
        """
        factors: dict[int, float | int] = dict(self.entry_factorization(len(self.prefix)))
        for r in self.rule:
            for p in factorize(r):
                factors[p] = INF
        return Supernatural.from_factors(factors)

    def to_json_dict(self) -> dict:
        out: dict = {"prefix": list(self.prefix)}
        if self.rule:
            out["rule"] = list(self.rule)
        return out

    @classmethod
    def from_json_dict(cls, obj: dict) -> "FrequencyChain":
        if "prefix" not in obj:
            raise ValueError("chain object must have a \"prefix\" field")
        return cls(tuple(obj["prefix"]), tuple(obj.get("rule", ())))


def chain_make(prefix: Iterable[int], rule: Iterable[int] = ()) -> FrequencyChain:
    return FrequencyChain(tuple(prefix), tuple(rule))


def chain_limit(chain: FrequencyChain) -> Supernatural:
    return chain.limit()


def _sorted_prime_steps(q: int) -> list[int]:
    """Prime factors of q with multiplicity, nondecreasing."""
    steps: list[int] = []
    for p, e in sorted(factorize(q).items()):
        steps.extend([p] * e)
    return steps


def maximal_chain(chain: FrequencyChain, depth: Optional[int] = None) -> FrequencyChain:
    """Refine a chain so every consecutive ratio is prime, keeping the same limit.

    Composite ratios split into their prime factors in nondecreasing order, which
    makes the refinement canonical.  ``depth`` materializes that many entries of
    the input chain into the refined prefix (it must cover the existing prefix);
    for ruled chains the ratio rule is refined and rotated to continue from there.
    """
    plen = len(chain.prefix)
    if depth is None:
        depth = plen
    if depth < plen:
        raise ValueError(f"depth {depth} must cover the prefix length {plen}")
    if chain.rule:
        entries = chain.terms(depth)
        phase = (depth - plen) % len(chain.rule)
        rotated = chain.rule[phase:] + chain.rule[:phase]
        new_rule: list[int] = []
        for r in rotated:
            new_rule.extend(_sorted_prime_steps(r))
    else:
        if depth > plen:
            raise ValueError(f"finite chain of length {plen} has no entry {depth}")
        entries = list(chain.prefix)
        new_rule = []
    refined = [entries[0]]
    for a, b in zip(entries, entries[1:]):
        for p in _sorted_prime_steps(b // a):
            refined.append(refined[-1] * p)
    return FrequencyChain(tuple(refined), tuple(new_rule))


def first_level_divisible(
    chain: FrequencyChain, n: int, n_factors: Optional[dict[int, int]] = None
) -> Optional[int]:
    """Smallest level j with n dividing the j-th entry, or None when no level works.

    ``n_factors`` supplies the factorization of n when n is too large to factor
    directly (deep chain entries).
    """
    need = Supernatural.from_factors(n_factors) if n_factors else Supernatural.from_int(n)
    if not need.divides(chain.limit()):
        return None
    max_exp = max((int(e) for _, e in need.pairs), default=0)
    cycle = len(chain.rule) if chain.rule else 0
    cap = len(chain.prefix) + cycle * (max_exp + 1) + 1
    if not chain.rule:
        cap = len(chain.prefix)
    for j in range(1, cap + 1):
        if chain.nth_term(j) % n == 0:
            return j
    raise AssertionError(f"divisibility level for {n} not found within {cap} entries")


@dataclass(frozen=True)
class HullComparison:
    """Classification verdict for two chains, with divisibility witnesses.

    When isomorphic, ``forward[i] = (entry_of_a, witness_entry_of_b)`` exhibits a
    chain-b entry divisible by the i-th entry of chain a (and ``backward`` the
    other direction).  Otherwise ``blocker`` names a side and one of its entries
    that divides no entry of the other chain.
    """

    isomorphic: bool
    order_a: Supernatural
    order_b: Supernatural
    forward: tuple[tuple[int, int], ...] = ()
    backward: tuple[tuple[int, int], ...] = ()
    blocker: Optional[tuple[str, int]] = None

    def to_json_dict(self) -> dict:
        out: dict = {
            "isomorphic": self.isomorphic,
            "order_a": self.order_a.to_json_dict(),
            "order_b": self.order_b.to_json_dict(),
        }
        if self.isomorphic:
            out["forward"] = [list(pair) for pair in self.forward]
            out["backward"] = [list(pair) for pair in self.backward]
        else:
            side, entry = self.blocker
            out["blocker"] = {"side": side, "entry": entry}
        return out


def _available_depth(chain: FrequencyChain, wanted: int) -> int:
    return wanted if chain.rule else min(wanted, len(chain.prefix))


def _find_blocker(a: FrequencyChain, b: FrequencyChain) -> Optional[int]:
    """An entry of ``a`` that divides no entry of ``b``; None if a's limit divides b's."""
    la, lb = a.limit(), b.limit()
    for p, e in la.pairs:
        if e <= lb.exponent(p):
            continue
        # Scan for an entry whose p-exponent exceeds everything b can offer.
        target = int(lb.exponent(p)) + 1
        depth = _available_depth(a, len(a.prefix) + (len(a.rule) or 0) * target + 1)
        for j in range(1, depth + 1):
            entry = a.nth_term(j)
            exp = 0
            while entry % p == 0:
                entry //= p
                exp += 1
            if exp >= target:
                return a.nth_term(j)
        raise AssertionError(f"blocking entry for prime {p} not found")
    return None


def hulls_isomorphic(
    a: FrequencyChain, b: FrequencyChain, cert_entries: int = 8
) -> HullComparison:
    """Decide whether two chains present isomorphic hulls, with a certificate.

    The verdict is equality of the supernatural limits.  The certificate gives,
    for each of the first ``cert_entries`` entries on each side, an entry of the
    other chain it divides; when the hulls differ it gives one concrete entry
    that no entry of the other chain dominates.
    """
    la, lb = a.limit(), b.limit()
    if la != lb:
        blocker_a = _find_blocker(a, b)
        if blocker_a is not None:
            return HullComparison(False, la, lb, blocker=("a", blocker_a))
        return HullComparison(False, la, lb, blocker=("b", _find_blocker(b, a)))
    forward = []
    for i in range(1, _available_depth(a, cert_entries) + 1):
        n = a.nth_term(i)
        j = first_level_divisible(b, n, a.entry_factorization(i))
        forward.append((n, b.nth_term(j)))
    backward = []
    for i in range(1, _available_depth(b, cert_entries) + 1):
        n = b.nth_term(i)
        j = first_level_divisible(a, n, b.entry_factorization(i))
        backward.append((n, a.nth_term(j)))
    return HullComparison(True, la, lb, tuple(forward), tuple(backward))


def bohr_coefficient(d: Callable[[int], float], q: int, window: int) -> complex:
    """Symmetric Birkhoff average ``(1/2N) sum_{k=-N..N} d(k) exp(-2 pi i k / q)``.

    A nonvanishing limit at q certifies that 2*pi/q belongs to the frequency
    module of d.  No tapering is applied; the finite-window value differs from
    the limit by O(1/N) for limit-periodic input.
    """
    if q < 1:
        raise ValueError(f"q must be a positive integer, got {q}")
    if window < q:
        raise ValueError(f"window {window} must be at least q = {q}")
    # The phase factor has period q in k, so precompute one cycle.
    phases = [cmath.exp(-2j * math.pi * (t % q) / q) for t in range(q)]
    total = 0 + 0j
    for k in range(-window, window + 1):
        total += d(k) * phases[k % q]
    return total / (2 * window)


def common_divisor_frequency(q1: int, q2: int) -> int:
    """Denominator of the common divisor of the frequencies 2*pi/q1 and 2*pi/q2."""
    if q1 < 1 or q2 < 1:
        raise ValueError("frequencies must have positive integer denominators")
    return math.lcm(q1, q2)


@dataclass(frozen=True)
class FrequencyModuleView:
    """Generators 1/n_j (j <= level) of the frequency module presented by a chain."""

    chain: FrequencyChain
    level: int

    def __post_init__(self) -> None:
        if self.level < 1:
            raise ValueError("level must be >= 1")
        self.chain.nth_term(self.level)  # validates the level exists

    def generator_denominators(self) -> list[int]:
        return self.chain.terms(self.level)

    def generators(self) -> list[Fraction]:
        return [Fraction(1, n) for n in self.generator_denominators()]

    def angular_generators(self) -> list[float]:
        return [2 * math.pi / n for n in self.generator_denominators()]
