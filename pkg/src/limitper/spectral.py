"""Spectral measurements for ``[Hu](n) = u(n+1) + u(n-1) + V(n) u(n)``.

Transfer-matrix products are rescaled at norm 2**512 with an accumulated
log-scale, so Lyapunov exponents are computed overflow-free.  Periodic spectra
come from the discriminant (trace of the one-period transfer matrix): the
spectrum is exactly ``{E : |Delta(E)| <= 2}`` and band edges are localized by a
sign scan plus bisection, which stays stable where explicit polynomial
coefficients would not.  The integrated density of states uses the symmetric
tridiagonal inertia count, O(N) per energy with integer-valued counts.
"""

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence, Union

from .frequency import FrequencyChain
from .potential import PeriodicLayer, Potential

_RESCALE = 2.0**512
_RESCALE_LOG = 512.0 * math.log(2.0)


@dataclass(frozen=True)
class TransferState:
    """2x2 transfer product, stored descaled with an accumulated log-scale factor."""

    m11: float
    m12: float
    m21: float
    m22: float
    log_scale: float = 0.0

    def norm(self) -> float:
        """Max-abs-entry norm; spectrally equivalent to the operator norm for 2x2."""
        return max(abs(self.m11), abs(self.m12), abs(self.m21), abs(self.m22))

    def matrix(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return ((self.m11, self.m12), (self.m21, self.m22))

    def det(self) -> float:
        """Determinant of the full product, rescale undone; products of the
        one-step matrices are unimodular, so this should be 1 up to rounding."""
        stored = self.m11 * self.m22 - self.m12 * self.m21
        if stored == 0.0 or self.log_scale == 0.0:
            return stored
        log_mag = math.log(abs(stored)) + 2.0 * self.log_scale
        if log_mag > 700.0:
            return math.copysign(math.inf, stored)
        return math.copysign(math.exp(log_mag), stored)

    @classmethod
    def identity(cls) -> "TransferState":
        return cls(1.0, 0.0, 0.0, 1.0, 0.0)


def transfer_product(
    V: Callable[[int], float], E: float, n_start: int, n_end: int
) -> TransferState:
    """Ordered product of one-step matrices ``[[E - V(n), -1], [1, 0]]`` over [n_start, n_end).

    New steps multiply on the left, propagating (u(n+1), u(n)).  An empty range
    returns the identity with log-scale 0.
    """
    if n_start > n_end:
        raise ValueError(f"n_start {n_start} must be <= n_end {n_end}")
    m11, m12, m21, m22 = 1.0, 0.0, 0.0, 1.0
    log_scale = 0.0
    for n in range(n_start, n_end):
        a = E - V(n)
        m11, m12, m21, m22 = a * m11 - m21, a * m12 - m22, m11, m12
        mag = max(abs(m11), abs(m12), abs(m21), abs(m22))
        while mag > _RESCALE:
            m11 /= _RESCALE
            m12 /= _RESCALE
            m21 /= _RESCALE
            m22 /= _RESCALE
            log_scale += _RESCALE_LOG
            mag /= _RESCALE
    return TransferState(m11, m12, m21, m22, log_scale)


def lyapunov_estimate(V: Callable[[int], float], E: float, N: int) -> float:
    """Finite-size Lyapunov estimate ``log ||T_N|| / N`` over sites 1..N.

    Reported raw: small negative values are possible at finite N and are not
    clamped, so exact shift identities survive.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    state = transfer_product(V, E, 1, N + 1)
    return (state.log_scale + math.log(state.norm())) / N


_PeriodValues = Union[PeriodicLayer, Sequence[float]]


def _period_values(v: _PeriodValues) -> tuple[float, ...]:
    if isinstance(v, PeriodicLayer):
        return v.values
    vals = tuple(float(x) for x in v)
    if not vals:
        raise ValueError("period values must be nonempty")
    return vals


def discriminant(v_period: _PeriodValues, E: float) -> float:
    """Trace of the one-period transfer matrix (a degree-p monic polynomial in E)."""
    vals = _period_values(v_period)
    state = transfer_product(lambda n: vals[n % len(vals)], E, 0, len(vals))
    # One period never triggers a rescale at desk scales; fold it back if it did.
    scale = math.exp(state.log_scale) if state.log_scale else 1.0
    return (state.m11 + state.m22) * scale


@dataclass(frozen=True)
class BandSet:
    """Finite union of disjoint closed intervals, sorted ascending."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "intervals", tuple((float(a), float(b)) for a, b in self.intervals)
        )
        prev_hi = -math.inf
        for lo, hi in self.intervals:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError("band endpoints must be finite")
            if hi < lo:
                raise ValueError(f"empty interval [{lo}, {hi}]")
            if lo <= prev_hi:
                raise ValueError("intervals must be disjoint and ascending")
            prev_hi = hi

    def measure(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)

    def to_json_dict(self) -> dict:
        return {"bands": [[lo, hi] for lo, hi in self.intervals]}


def measure_estimate(b: BandSet) -> float:
    return b.measure()


def _point_distance(x: float, intervals: Sequence[tuple[float, float]]) -> float:
    best = math.inf
    for lo, hi in intervals:
        if x < lo:
            best = min(best, lo - x)
        elif x > hi:
            best = min(best, x - hi)
        else:
            return 0.0
    return best


def _directed_hausdorff(a: BandSet, b: BandSet) -> float:
    # Over a union of intervals, distance-to-b peaks at interval endpoints of a
    # or at gap midpoints of b that fall inside an interval of a.
    candidates = [p for lo, hi in a.intervals for p in (lo, hi)]
    for (lo1, hi1), (lo2, _) in zip(b.intervals, b.intervals[1:]):
        mid = (hi1 + lo2) / 2.0
        if any(lo <= mid <= hi for lo, hi in a.intervals):
            candidates.append(mid)
    return max(_point_distance(x, b.intervals) for x in candidates)


def hausdorff_dist(a: BandSet, b: BandSet) -> float:
    """Symmetric Hausdorff distance between two finite interval unions, from endpoints."""
    if not a.intervals and not b.intervals:
        return 0.0
    if not a.intervals or not b.intervals:
        return math.inf
    return max(_directed_hausdorff(a, b), _directed_hausdorff(b, a))


def _hidden_gap_anchor(delta, lo: float, hi: float, rounds: int = 4) -> float | None:
    """Search [lo, hi] for a point with |Delta| > 2 around a local extremum.

    The bracket contains at most one extremum of the discriminant, so repeated
    subdivision around the extreme sample converges on it; a gap narrower than
    the final resolution is indistinguishable from a tangency and ignored.
    """
    for _ in range(rounds):
        step = (hi - lo) / 48
        if step == 0.0:
            break
        samples = [lo + k * step for k in range(49)]
        values = [delta(e) for e in samples]
        best = max(range(49), key=lambda k: abs(values[k]))
        if abs(values[best]) > 2.0:
            return samples[best]
        lo = samples[max(best - 1, 0)]
        hi = samples[min(best + 1, 48)]
    return None


def bands(v_period: _PeriodValues, tol: float = 1e-9) -> BandSet:
    """Spectrum ``{E : |Delta(E)| <= 2}`` of a periodic potential as a BandSet.

    A sign scan on a grid of 16p points per unit interval over
    ``[-2 - ||V||, 2 + ||V||]`` brackets each band edge, then bisection on
    |Delta| - 2 localizes it to width ``tol``.  Gaps narrower than the grid
    spacing hide inside in-band runs at a local extremum of the discriminant;
    those extrema (at most p - 1, far apart at grid scale) are hunted down and
    inserted as extra out-of-band points before edges are resolved.  Bands
    separated by less than ``tol`` (touching bands at a double root) merge.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    vals = _period_values(v_period)
    p = len(vals)
    sup = max(abs(v) for v in vals)
    lo_edge, hi_edge = -2.0 - sup, 2.0 + sup
    npts = max(2, math.ceil((hi_edge - lo_edge) * 16 * p) + 1)
    grid = [lo_edge + (hi_edge - lo_edge) * i / (npts - 1) for i in range(npts)]
    delta = lambda e: discriminant(vals, e)
    values = [delta(e) for e in grid]
    points = [(e, abs(v) <= 2.0) for e, v in zip(grid, values)]

    anchors = []
    for i in range(1, npts - 1):
        if not (points[i - 1][1] and points[i][1] and points[i + 1][1]):
            continue
        if (values[i] - values[i - 1]) * (values[i + 1] - values[i]) <= 0.0:
            found = _hidden_gap_anchor(delta, grid[i - 1], grid[i + 1])
            if found is not None:
                anchors.append((found, False))
    if anchors:
        points = sorted(points + anchors)

    def bisect_edge(e_out: float, e_in: float) -> float:
        for _ in range(200):
            if abs(e_in - e_out) <= tol:
                break
            mid = (e_out + e_in) / 2.0
            if abs(delta(mid)) <= 2.0:
                e_in = mid
            else:
                e_out = mid
        return (e_out + e_in) / 2.0

    raw: list[tuple[float, float]] = []
    i = 0
    total = len(points)
    while i < total:
        if not points[i][1]:
            i += 1
            continue
        j = i
        while j + 1 < total and points[j + 1][1]:
            j += 1
        left = points[i][0] if i == 0 else bisect_edge(points[i - 1][0], points[i][0])
        right = points[j][0] if j == total - 1 else bisect_edge(points[j + 1][0], points[j][0])
        raw.append((left, right))
        i = j + 1
    merged: list[list[float]] = []
    for lo, hi in raw:
        if merged and lo - merged[-1][1] < tol:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return BandSet(tuple((lo, hi) for lo, hi in merged))


def eigenvalue_count(values: Sequence[float], E: float) -> int:
    """Eigenvalues <= E of the Dirichlet truncation with diagonal ``values``.

    Sturm inertia count on the symmetric tridiagonal matrix with unit
    off-diagonals: negative pivots of ``d_i = (V(i) - E) - 1/d_{i-1}``.  A zero
    pivot means E is exactly an eigenvalue of a leading minor; it is nudged to
    -1e-300 so the eigenvalue is counted.
    """
    count = 0
    d = 1.0
    first = True
    for v in values:
        if first:
            d = v - E
            first = False
        else:
            d = (v - E) - 1.0 / d
        if d == 0.0:
            d = -1e-300
        if d < 0.0:
            count += 1
    return count


def ids(V: Callable[[int], float], E: float, N: int = 10_000) -> float:
    """Integrated density of states at E from the N-site Dirichlet truncation."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return eigenvalue_count([V(i) for i in range(1, N + 1)], E) / N


@dataclass(frozen=True)
class IDSCurve:
    energies: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.energies) != len(self.values):
            raise ValueError("energies and values must have equal length")
        if any(b < a for a, b in zip(self.energies, self.energies[1:])):
            raise ValueError("energy grid must be ascending")


def ids_curve(V: Callable[[int], float], energies: Sequence[float], N: int = 10_000) -> IDSCurve:
    """IDS sampled on an ascending grid; the potential window is built once."""
    window = [V(i) for i in range(1, N + 1)]
    grid = tuple(float(e) for e in energies)
    vals = tuple(eigenvalue_count(window, e) / N for e in grid)
    return IDSCurve(grid, vals)


def log_holder_report(curve: IDSCurve) -> dict:
    """Qualitative log-Holder modulus of an IDS curve.

    For adjacent grid energies, reports ``|dk| * log(1/|dE|)``; log-Holder
    continuity keeps this bounded, so large values flag near-violations worth
    inspecting at finer resolution.
    """
    rows = []
    worst = 0.0
    for (e1, k1), (e2, k2) in zip(
        zip(curve.energies, curve.values), zip(curve.energies[1:], curve.values[1:])
    ):
        de = e2 - e1
        if de <= 0:
            continue
        product = abs(k2 - k1) * math.log(1.0 / de) if de < 1.0 else 0.0
        worst = max(worst, product)
        rows.append({"E": (e1 + e2) / 2.0, "dk": k2 - k1, "dE": de, "log_holder": product})
    return {"max_log_holder": worst, "pairs": rows}


@dataclass(frozen=True)
class SpectrumApprox:
    band_set: BandSet
    tail_bound: float
    level: int
    period: int

    def to_json_dict(self) -> dict:
        out = self.band_set.to_json_dict()
        out["tail_bound"] = self.tail_bound
        out["level"] = self.level
        out["period"] = self.period
        return out


def spectrum_approx(V: Potential, level: int, tol: float = 1e-9) -> SpectrumApprox:
    """Band set of the level-``level`` periodic approximant, with a Hausdorff certificate.

    The true spectrum lies within Hausdorff distance ``tail_bound`` of the
    returned set: replacing V by its approximant is a self-adjoint perturbation
    of that sup-norm size, and spectra of self-adjoint operators move by at
    most the perturbation norm.
    """
    values = V.level_values(level)
    tail = V.level_tail(level)
    return SpectrumApprox(bands(values, tol), tail, level, len(values))


class ConditionAReport(NamedTuple):
    bounded: bool
    witness: int
    sup_log_ratio: float
    scope: str  # "all-levels" for ruled chains, "prefix-only" otherwise
    unbounded_trend: bool
    log_ratios: tuple[float, ...]


def condition_a_check(chain: FrequencyChain, depth: int) -> ConditionAReport:
    """Uniform bound on ``log m_{j+1} / log m_j`` along the chain entries.

    The witness is the least integer m >= 2 with ``m_{j+1} <= m_j**m``
    everywhere, found by exact integer comparisons.  For ruled chains the
    cyclic ratios bound every level, so the verdict covers the whole chain
    (internally the scan is extended through one full cycle past the prefix).
    A bare prefix only supports a verdict about the listed entries; that case
    is flagged, along with a strictly increasing trend in the log-ratios,
    which suggests the continuation is unbounded.
    """
    if depth < 2:
        raise ValueError("depth must be >= 2 to form a ratio")
    if chain.rule:
        scan = max(depth, len(chain.prefix) + len(chain.rule) + 1)
        scope = "all-levels"
    else:
        scan = min(depth, len(chain.prefix))
        scope = "prefix-only"
    entries = chain.terms(scan)
    entries = [n for n in entries if n > 1]  # a leading 1 carries no frequency content
    if len(entries) < 2:
        raise ValueError("need at least two entries above 1")
    witness = 2
    log_ratios = []
    for a, b in zip(entries, entries[1:]):
        log_ratios.append(math.log(b) / math.log(a))
        e = 1
        power = a
        while power < b:
            power *= a
            e += 1
        witness = max(witness, e)
    reported = tuple(log_ratios[: max(depth - 1, 1)])
    trend = len(reported) >= 2 and all(
        x < y for x, y in zip(reported, reported[1:])
    )
    return ConditionAReport(
        bounded=True,
        witness=witness,
        sup_log_ratio=max(log_ratios),
        scope=scope,
        unbounded_trend=scope == "prefix-only" and trend,
        log_ratios=reported,
    )
