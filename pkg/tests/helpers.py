"""Shared oracles and generators for the test suite.

Everything here is deliberately independent of the library internals it
checks: transfer products are redone in exact rational arithmetic, hull
classification is re-verified by direct divisibility search, and chain
generators only use the public constructor.
"""

import random
from fractions import Fraction

from limitper import FrequencyChain, maximal_chain


def exact_transfer(values, E, count, start=0):
    """Exact 2x2 product of [[E - V(n), -1], [1, 0]] over ``count`` steps, as Fractions."""
    e = Fraction(E)
    vals = [Fraction(v) for v in values]
    m11, m12, m21, m22 = Fraction(1), Fraction(0), Fraction(0), Fraction(1)
    for n in range(start, start + count):
        a = e - vals[n % len(vals)]
        m11, m12, m21, m22 = a * m11 - m21, a * m12 - m22, m11, m12
    return (m11, m12, m21, m22)


def divisibility_oracle(a, b, entry_depth=10, witness_depth=50):
    """Direct check of the classification condition: every probed entry of each
    chain divides some entry of the other, witnesses searched to depth 50."""

    def dominated(x, y):
        x_depth = entry_depth if x.rule else min(entry_depth, len(x.prefix))
        y_depth = witness_depth if y.rule else min(witness_depth, len(y.prefix))
        for i in range(1, x_depth + 1):
            n = x.nth_term(i)
            if not any(y.nth_term(j) % n == 0 for j in range(1, y_depth + 1)):
                return False
        return True

    return dominated(a, b) and dominated(b, a)


_START_POOL = (1, 2, 3, 4, 5, 6, 7, 10, 12, 15, 30, 36, 60, 210)
_PREFIX_RATIOS = (2, 2, 3, 3, 5, 6, 7, 10)
_RULE_RATIOS = (2, 2, 3, 3, 5, 6, 7, 10, 15)


def random_chain(rng: random.Random, entry_cap: int = 10**6) -> FrequencyChain:
    """Seeded ruled chain: prefix of at most 4 entries below the cap, cycle <= 3."""
    prefix = [rng.choice(_START_POOL)]
    for _ in range(rng.randrange(3)):
        nxt = prefix[-1] * rng.choice(_PREFIX_RATIOS)
        if nxt > entry_cap:
            break
        prefix.append(nxt)
    rule = tuple(rng.choice(_RULE_RATIOS) for _ in range(rng.randint(1, 3)))
    return FrequencyChain(tuple(prefix), rule)


def isomorphic_variant(rng: random.Random, chain: FrequencyChain) -> FrequencyChain:
    """A different presentation of the same hull: subchain, refinement, or unroll."""
    mode = rng.randrange(4)
    if mode == 0:
        return chain
    if mode == 1:
        return chain.subchain(rng.randint(2, 4))
    if mode == 2:
        return maximal_chain(chain, len(chain.prefix) + rng.randrange(3))
    extra = rng.randint(1, 3)
    terms = chain.terms(len(chain.prefix) + extra)
    phase = extra % len(chain.rule)
    return FrequencyChain(tuple(terms), chain.rule[phase:] + chain.rule[:phase])
