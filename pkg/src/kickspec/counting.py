"""Counting experiments: shrinking intervals, S(x) sets, and divergence scans.

The divergence argument estimates B^-1(x) from below by counting how many
eigenphases theta_n fall close to x.  Two windows are in play:

* the per-index window |x - theta_n| <= |a_n| (the set S(x)), which gives the
  unconditional per-term bound B^-1 >= 4 #S(x);
* the N-dependent window 2*pi*N**(2(1/2-gamma)) / sqrt(log N), which shrinks
  more slowly and trades per-term quality for a bigger count, the route that
  extends the argument to j >= 2.

Interval counts A(J_N(x), N) are tied to the exact discrepancy through
|A(J, N) - N*|J|| <= N * D_N, which holds for every interval by definition of
the discrepancy, and is asserted in every sweep cell.

Distances are circular on [0, 2*pi): plain absolute differences undercount
near the wrap-around, and eigenphases live on the circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .equidistribution import SequenceSpec, discrepancy_exact, sequence_points
from .errors import IntervalRangeError, ToleranceError
from .rationals import RationalApprox, golden_ratio
from .spectral import (
    BaseSpectrum,
    Divergent,
    GammaWindow,
    KickState,
    ThetaSequence,
    b_inverse_partial,
    circle_distance,
    gamma_window,
    power_law_state,
    theta_sequence,
)

__all__ = [
    "IntervalJ",
    "CountReport",
    "BInverseBounds",
    "CellResult",
    "SweepResult",
    "make_interval",
    "count_interval",
    "count_set_S",
    "count_set_bourget",
    "bourget_half_width",
    "inequality_check",
    "b_lower_bounds",
    "divergence_scan",
    "gamma_sweep",
    "default_x_grid",
]

TWO_PI = 2.0 * math.pi
Variant = Literal["combescure", "bourget"]
GrowthLabel = Literal["divergent-trend", "bounded", "inconclusive"]
#: Default small exponent shaving for the bourget-variant anchor term.
DEFAULT_DELTA = 0.01
#: Float slack absorbing the rounding between exact reals and float counts.
_INEQ_SLACK = 1e-12


def bourget_half_width(n: int, gamma: float) -> float:
    """Half-width N**(2(1/2-gamma)) / sqrt(log N) of the widened interval."""
    if n < 3:
        raise ValueError("bourget window needs n >= 3 so log n > 1")
    return n ** (2.0 * (0.5 - gamma)) / math.sqrt(math.log(n))


@dataclass(frozen=True)
class IntervalJ:
    """Shrinking interval centred at x/(2*pi) on the unit circle."""

    center: float
    half_width: float
    variant: Variant
    n: int
    gamma: float

    @property
    def lower(self) -> float:
        return self.center - self.half_width

    @property
    def upper(self) -> float:
        return self.center + self.half_width

    @property
    def length(self) -> float:
        return self.upper - self.lower


def make_interval(x: float, n: int, gamma: float,
                  variant: Variant = "combescure") -> IntervalJ:
    """Interval J_N(x) = [x/2pi - w, x/2pi + w) with the variant's half-width.

    combescure: w = N**(-gamma); bourget: w = N**(2(1/2-gamma))/sqrt(log N).
    The interval must fit inside [0, 1); callers pick a larger N or another x
    when it spills.
    """
    if not 0.0 < x < TWO_PI:
        raise ValueError("x must lie strictly inside (0, 2*pi)")
    if variant == "combescure":
        if n < 1:
            raise ValueError("n must be positive")
        half_width = float(n) ** (-gamma)
    elif variant == "bourget":
        half_width = bourget_half_width(n, gamma)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    center = x / TWO_PI
    if center - half_width < 0.0 or center + half_width > 1.0:
        raise IntervalRangeError(
            f"interval around {center:.6f} with half-width {half_width:.6f} "
            "spills outside [0, 1)")
    return IntervalJ(center=center, half_width=half_width, variant=variant,
                     n=n, gamma=gamma)


def count_interval(points: Iterable[float], interval: IntervalJ) -> int:
    """A([a, b), N): how many of the points fall in the half-open interval."""
    xs = np.asarray(points, dtype=np.float64)
    return int(np.count_nonzero((xs >= interval.lower) & (xs < interval.upper)))


def count_set_S(x: float, state: KickState, theta: ThetaSequence,
                n: int) -> int:
    """#S(x) = #{m < n : dist(x, theta_m) <= |a_m|} with circular distance.

    Uses the state's actual (normalised) coefficients as the per-index
    window; indices with a_m = 0 can never qualify.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > min(state.dim, len(theta)):
        raise ValueError("n exceeds the available state or phase length")
    window = np.abs(state.coefficients[:n])
    dist = circle_distance(x, theta.values[:n])
    return int(np.count_nonzero((window > 0.0) & (dist <= window)))


def count_set_bourget(x: float, theta: ThetaSequence, n: int,
                      gamma: float) -> int:
    """#{m < n : dist(x, theta_m) <= 2*pi*N**(2(1/2-gamma))/sqrt(log N)}."""
    if n < 3:
        raise ValueError("bourget window needs n >= 3")
    if n > len(theta):
        raise ValueError("n exceeds the phase length")
    window = TWO_PI * bourget_half_width(n, gamma)
    dist = circle_distance(x, theta.values[:n])
    return int(np.count_nonzero(dist <= min(window, math.pi)))


@dataclass(frozen=True)
class CountReport:
    """One (x, N) cell of a counting experiment.

    ``lhs`` is |A(J_N(x), N) - N*|J_N||, which the discrepancy bounds
    unconditionally; for the bourget variant ``anchored_lhs`` additionally
    records |A - 2 N**(2(1-gamma-delta))|, the anchor used by the asymptotic
    argument (meaningful only at astronomically large N, so never asserted).
    """

    n: int
    a_count: int
    s_count: int
    lhs: float
    rhs: float
    b_inverse: float | Divergent
    holds: bool
    variant: Variant = "combescure"
    delta: float | None = None
    anchored_lhs: float | None = None

    def __post_init__(self):
        if self.a_count < 0 or self.s_count < 0:
            raise ValueError("counts are nonnegative")
        if self.a_count > self.n or self.s_count > self.n:
            raise ValueError("counts cannot exceed the number of terms")


def inequality_check(x: float, spec: SequenceSpec, gamma: float, n: int,
                     variant: Variant = "combescure",
                     delta: float = DEFAULT_DELTA) -> CountReport:
    """Verify |A(J_N(x), N) - N*|J_N|| <= N * D_N on the sequence (n**j beta).

    The exact discrepancy makes the inequality unconditional; a violation
    beyond float slack is a ToleranceError, not a data point.  The returned
    report carries only the inequality sides; s_count and b_inverse stay at
    zero here (they are filled by the sweep cells, which know the window
    state).
    """
    interval = make_interval(x, n, gamma, variant)
    pts = sequence_points(spec, n)
    a_count = count_interval(pts, interval)
    d_n = discrepancy_exact(pts).d_n
    rhs = n * d_n
    lhs = abs(a_count - n * interval.length)
    anchored = None
    if variant == "bourget":
        anchored = abs(a_count - 2.0 * n ** (2.0 * (1.0 - gamma - delta)))
    holds = lhs <= rhs * (1.0 + _INEQ_SLACK) + _INEQ_SLACK
    if not holds:
        raise ToleranceError(
            f"counting inequality violated at x={x}, N={n}: "
            f"lhs={lhs:.6e} > rhs={rhs:.6e}")
    return CountReport(n=n, a_count=a_count, s_count=0, lhs=lhs, rhs=rhs,
                       b_inverse=0.0, holds=holds, variant=variant,
                       delta=delta if variant == "bourget" else None,
                       anchored_lhs=anchored)


@dataclass(frozen=True)
class BInverseBounds:
    """Lower bounds for the partial sum of B^-1(x)."""

    per_term_bound: float  # 4 * #S(x)
    widened_bound: float  # (1/pi**2) * #S_bourget(x) * log N / N**(2(1-gamma))
    b_inverse: float | Divergent


def b_lower_bounds(x: float, state: KickState, theta: ThetaSequence,
                   n: int) -> BInverseBounds:
    """Evaluate both lower bounds and assert the partial sum dominates them.

    The per-term bound 4#S(x) is coefficient-agnostic: every counted index
    contributes at least 4 because |a_m| / dist >= 1 and sin(u) <= u.  The
    widened bound follows the same substitution with the N-dependent window;
    its textbook constant 1/pi**2 assumes coefficients of size n**(-gamma)
    without the normalisation constant, which desk-scale margins absorb.
    """
    if state.gamma is None:
        raise ValueError("the widened bound needs a power-law state (gamma)")
    s_count = count_set_S(x, state, theta, n)
    per_term = 4.0 * s_count
    s_wide = count_set_bourget(x, theta, n, state.gamma)
    widened = (s_wide / math.pi**2) * math.log(n) / float(n) ** (2.0 * (1.0 - state.gamma))
    value = b_inverse_partial(x, state, theta, n)
    if not isinstance(value, Divergent):
        if value < per_term:
            raise ToleranceError(
                f"B^-1 partial sum {value:.6e} below per-term bound {per_term:.6e}")
        if value < widened:
            raise ToleranceError(
                f"B^-1 partial sum {value:.6e} below widened bound {widened:.6e}")
    return BInverseBounds(per_term_bound=per_term, widened_bound=widened,
                          b_inverse=value)


@dataclass(frozen=True)
class CellResult:
    x: float
    gamma: float
    report: CountReport


@dataclass(frozen=True)
class SweepResult:
    """Per-cell reports plus growth labels of a divergence scan.

    Labels are heuristics over finite data: ``divergent-trend`` when the
    count never decreases and at least doubles from the smallest to the
    largest N, ``bounded`` when it is flat over the top three grid sizes,
    ``inconclusive`` otherwise.  The raw tables are always present.
    """

    gamma_grid: tuple[float, ...]
    x_grid: tuple[float, ...]
    n_grid: tuple[int, ...]
    cells: tuple[CellResult, ...]
    labels: dict[tuple[float, float], GrowthLabel]
    window: GammaWindow | None = None
    window_membership: dict[float, bool] | None = None

    def __post_init__(self):
        expected = len(self.gamma_grid) * len(self.x_grid) * len(self.n_grid)
        if len(self.cells) != expected:
            raise ValueError(f"cell table has {len(self.cells)} entries, "
                             f"grids imply {expected}")
        if len(self.labels) != len(self.gamma_grid) * len(self.x_grid):
            raise ValueError("need one growth label per (x, gamma) pair")

    def label(self, x: float, gamma: float) -> GrowthLabel:
        return self.labels[(x, gamma)]

    def counts(self, x: float, gamma: float) -> tuple[int, ...]:
        return tuple(c.report.s_count for c in self.cells
                     if c.x == x and c.gamma == gamma)


def _growth_label(counts: Sequence[int]) -> GrowthLabel:
    nondecreasing = all(b >= a for a, b in zip(counts, counts[1:]))
    doubled = counts[-1] >= 2 * counts[0] and counts[-1] > counts[0]
    if nondecreasing and doubled:
        return "divergent-trend"
    if len(counts) >= 3 and counts[-1] == counts[-2] == counts[-3]:
        return "bounded"
    return "inconclusive"


def _monomial_spectrum(spec: SequenceSpec) -> BaseSpectrum:
    from fractions import Fraction

    beta = [Fraction(0)] * spec.j + [spec.beta.as_fraction()]
    return BaseSpectrum(beta=tuple(beta))


def _scan_one_x(x: float, gamma: float, sizes: Sequence[int],
                theta: ThetaSequence, state: KickState,
                d_by_n: dict[int, float], variant: Variant,
                delta: float) -> tuple[list[CellResult], GrowthLabel]:
    weights = np.abs(state.coefficients)
    dist = circle_distance(x, theta.values)
    hit_s = (weights > 0.0) & (dist <= weights)
    s_cum = np.cumsum(hit_s)
    cells: list[CellResult] = []
    counts: list[int] = []
    for n in sizes:
        interval = make_interval(x, n, gamma, variant)
        unit = theta.unit_values[1:n + 1]
        a_count = int(np.count_nonzero(
            (unit >= interval.lower) & (unit < interval.upper)))
        rhs = n * d_by_n[n]
        lhs = abs(a_count - n * interval.length)
        holds = lhs <= rhs * (1.0 + _INEQ_SLACK) + _INEQ_SLACK
        if not holds:
            raise ToleranceError(
                f"counting inequality violated at x={x}, N={n}")
        s_count = int(s_cum[n])  # indices 1..n inclusive
        bounds = b_lower_bounds(x, state, theta, n + 1)
        anchored = None
        if variant == "bourget":
            anchored = abs(a_count - 2.0 * n ** (2.0 * (1.0 - gamma - delta)))
        report = CountReport(
            n=n, a_count=a_count, s_count=s_count, lhs=lhs, rhs=rhs,
            b_inverse=bounds.b_inverse, holds=holds, variant=variant,
            delta=delta if variant == "bourget" else None,
            anchored_lhs=anchored)
        cells.append(CellResult(x=x, gamma=gamma, report=report))
        counts.append(s_count)
    return cells, _growth_label(counts)


def divergence_scan(spec: SequenceSpec, gamma: float,
                    x_grid: Sequence[float], n_grid: Sequence[int],
                    variant: Variant = "combescure",
                    delta: float = DEFAULT_DELTA,
                    threads: int = 1) -> SweepResult:
    """Count A(J_N(x), N) and #S(x) over a geometric N grid for several x.

    Every cell also carries the discrepancy inequality sides and the partial
    B^-1 sum, with the lower bounds asserted.  Shared inputs (theta values,
    per-N discrepancies, the window state) are computed once; the per-x work
    is pure on immutable arrays, so it may run on a thread pool, and results
    are always assembled in x-grid order regardless of completion order.
    """
    sizes = sorted(int(n) for n in n_grid)
    if len(sizes) < 2:
        raise ValueError("n_grid needs at least two sizes")
    n_max = sizes[-1]
    base = _monomial_spectrum(spec)
    theta = theta_sequence(base, n_max + 1)
    state = power_law_state(gamma, n_max + 1)
    d_by_n = {n: discrepancy_exact(theta.unit_values[1:n + 1]).d_n for n in sizes}

    xs = list(x_grid)
    if threads > 1 and len(xs) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(
                lambda x: _scan_one_x(x, gamma, sizes, theta, state, d_by_n,
                                      variant, delta), xs))
    else:
        results = [_scan_one_x(x, gamma, sizes, theta, state, d_by_n,
                               variant, delta) for x in xs]

    cells: list[CellResult] = []
    labels: dict[tuple[float, float], GrowthLabel] = {}
    for x, (x_cells, label) in zip(xs, results):
        cells.extend(x_cells)
        labels[(x, gamma)] = label
    return SweepResult(gamma_grid=(gamma,), x_grid=tuple(xs),
                       n_grid=tuple(sizes), cells=tuple(cells), labels=labels)


def gamma_sweep(j: int, eta_estimate: float, beta: RationalApprox,
                gamma_grid: Sequence[float], x_grid: Sequence[float],
                n_grid: Sequence[int],
                variant: Variant = "combescure",
                threads: int = 1) -> SweepResult:
    """Run divergence scans across an exponent grid, annotated with the
    window (1/2, 1/2 + 1/(2*eta*j)) membership of each gamma.

    The window marks where the counting argument forces divergence; outside
    it the labels are reported without any assertion (that regime depends on
    the unproven Weyl-sum exponent).
    """
    gammas = tuple(float(g) for g in gamma_grid)
    if any(not 0.5 < g <= 1.0 for g in gammas):
        raise ValueError("gamma grid must lie inside (1/2, 1]")
    window = gamma_window(j, eta_estimate)
    spec = SequenceSpec(j=j, beta=beta)
    cells: list[CellResult] = []
    labels: dict[tuple[float, float], GrowthLabel] = {}
    for gamma in gammas:
        part = divergence_scan(spec, gamma, x_grid, n_grid, variant,
                               threads=threads)
        cells.extend(part.cells)
        labels.update(part.labels)
    membership = {g: g in window for g in gammas}
    return SweepResult(gamma_grid=gammas, x_grid=tuple(x_grid),
                       n_grid=tuple(int(n) for n in sorted(n_grid)),
                       cells=tuple(cells), labels=labels,
                       window=window, window_membership=membership)


def default_x_grid(count: int, n_min: int | None = None,
                   gamma: float | None = None,
                   variant: Variant = "combescure") -> tuple[float, ...]:
    """Deterministic pole-avoiding evaluation points x = 2*pi*{m*(phi-1) + 1/7}.

    The golden rotation never lands on the rational test sequences' phases,
    and the 1/7 offset keeps it off the golden sequences themselves.  When
    n_min and gamma are given, values whose interval would spill outside
    [0, 1) at the smallest grid size are skipped.
    """
    if count < 1:
        raise ValueError("count must be positive")
    phi_minus_one = float(golden_ratio(64)) - 1.0
    xs: list[float] = []
    m = 1
    while len(xs) < count:
        unit = (m * phi_minus_one + 1.0 / 7.0) % 1.0
        x = TWO_PI * unit
        m += 1
        if m > 1000 * count:
            raise ValueError("could not build a fitting x grid")
        if n_min is not None and gamma is not None:
            try:
                make_interval(x, n_min, gamma, variant)
            except IntervalRangeError:
                continue
        xs.append(x)
    return tuple(xs)
