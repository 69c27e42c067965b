"""Explicit bounds tying L(1, chi) from below and |L'(sigma, chi)| from above
to the location of a real zero beta0 of an even real Dirichlet L-function.

The chain: the mean value theorem gives 1 - beta0 = L(1, chi)/|L'(sigma, chi)|
for some sigma strictly between beta0 and 1.  A smoothed character-sum bound
with kernel f(n) = log(n)/n^sigma controls |L'|; the class number formula and
an exhaustive Pell search control L(1, chi).  Closing the chain under the
hypothesis beta0 >= 1 - c/(sqrt(q) log^2 q) yields the admissible constants c
tabulated by conductor range, and beta0 <= 1 - c/(sqrt(q) log^2 q).

Conductors enter in log-space (log_q), since the verified ranges reach
q = 1e100.  Everything is pure; the sweep operations are embarrassingly
parallel but run single-threaded here, with points merged in input order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .characters import QuadChar, fundamental_discriminants

__all__ = [
    "ADMISSIBLE_C_TABLE",
    "BoundReport",
    "Branch",
    "CharSumBound",
    "CheckPoint",
    "HLE_LOWER_SEARCHED",
    "HLE_LOWER_SMALL",
    "InadmissibleError",
    "KernelFunction",
    "L_ONE_FLOOR_LARGE",
    "NoAdmissibleCError",
    "REL_CLEARANCE",
    "SEARCH_CAP",
    "VerifyReport",
    "admissibility_margin",
    "beta0_upper",
    "bound_report",
    "l_one_lower",
    "l_prime_upper",
    "partial_sum_constant",
    "remainder_term",
    "solve_c",
    "verify_charsum_bound",
    "verify_lprime_bound",
    "weighted_charsum_bound",
]

LOG_Q_MIN = math.log(4e5)
LOG_1E7 = math.log(1e7)
LOG_1E12 = math.log(1e12)
LOG_Q_MAX = math.log(1e100)

# Verified floor of h+ * log(eta) on 4e5 <= q <= 1e7 (class-number data).
HLE_LOWER_SMALL = 79.2177
# Floor established by the exhaustive search over d u0^2 <= SEARCH_CAP.
HLE_LOWER_SEARCHED = 412.0
SEARCH_CAP = 75_000_000_000
# For d u0^2 above the cap, h * log(eta) >= log(u0 sqrt d) >= log(cap)/2.
L_ONE_FLOOR_LARGE = 12.52

# An inequality only counts as verified when it clears this relative margin;
# smaller positive margins are reported as marginal, never as passes.
REL_CLEARANCE = 1e-9

_SIGMA_GRID_POINTS = 64

# (q_lo, q_hi, c): beta0 <= 1 - c/(sqrt(q) log^2 q) holds on each range.
ADMISSIBLE_C_TABLE = (
    (4e5, 7e5, 624),
    (7e5, 1e6, 636),
    (1e6, 3e6, 641),
    (3e6, 8e6, 654),
    (8e6, 1e7, 660),
    (1e7, 1e12, 105),
    (1e12, 1e18, 104),
    (1e18, 1e26, 103),
    (1e26, 1e43, 102),
    (1e43, 1e100, 101),
)


@dataclass(frozen=True)
class KernelFunction:
    """The kernel f(n) = log(n) / n^sigma, sigma in [0.75, 1].

    On that sigma range f decreases for n >= 4 and its second difference
    f(n) - 2 f(n+1) + f(n+2) is nonnegative there (f is convex from n = 5 on
    and the n = 4 difference is checked directly), which is exactly what the
    character-sum bound needs.
    """

    sigma: float

    def __post_init__(self):
        if not 0.75 <= self.sigma <= 1.0:
            raise ValueError(f"sigma={self.sigma} outside [0.75, 1]")

    def f(self, n) -> float:
        if n < 2:
            raise ValueError("kernel evaluated below n = 2")
        return math.log(n) * float(n) ** (-self.sigma)

    def f_log(self, log_n: float) -> float:
        """f at a point given in log-space: log_n * exp(-sigma * log_n)."""
        return log_n * math.exp(-self.sigma * log_n)

    def second_difference(self, n) -> float:
        return self.f(n) - 2.0 * self.f(n + 1) + self.f(n + 2)


class Branch(Enum):
    """Which lower-bound regime for L(1, chi) applies."""

    LOW_RANGE = "low_range"  # 4e5 <= q <= 1e7: the 79.2177 class-number floor
    SEARCHED = "searched"  # d u0^2 under the search cap: the 412 floor
    PELL_FLOOR = "pell_floor"  # d u0^2 over the cap: log(cap)/2 >= 12.52


class InadmissibleError(ValueError):
    """The self-consistency chain does not close for this (q, c)."""


class NoAdmissibleCError(ValueError):
    """No integer c in [100, 1000] is admissible on the requested range."""


def _check_log_q(log_q: float):
    if not LOG_Q_MIN <= log_q <= LOG_Q_MAX:
        raise ValueError(
            f"log_q={log_q}: conductor outside the supported [4e5, 1e100] range"
        )


def _check_c(c: float):
    if not 100 <= c <= 1000:
        raise ValueError(f"c={c} outside the admissible-constant window [100, 1000]")


def _split_a(log_q: float) -> tuple[int | None, float]:
    """(A, log A) with A = floor(sqrt q) - 1.

    Below q = 1e12 the conductor round-trips through exp() exactly enough to
    recover the integer and take the true floor; above, A is the real
    sqrt(q) - 1 (the floor shifts A by less than one part in 1e6, far below
    any margin at those sizes), with log A = log(q)/2 + log1p(-q^(-1/2)).
    """
    if log_q <= LOG_1E12:
        q = round(math.exp(log_q))
        a = math.isqrt(q) - 1
        if a < 5:
            raise ValueError(f"conductor {q} too small: need floor(sqrt q) - 1 >= 5")
        return a, math.log(a)
    return None, 0.5 * log_q + math.log1p(-math.exp(-0.5 * log_q))


def _boundary_block(log_q: float, kernel: KernelFunction, theta: float):
    """The A-dependent terms shared by the full bound and the remainder.

    Returns (a_floor, log_a, block) with
    block = -(A/2) f(A) + (A/2)(f(A) - f(A+1)) + f(A+1)/2
            + (theta/2) [(A+1)(f(A+1) - f(A+2)) + f(A+2)].
    """
    a_floor, log_a = _split_a(log_q)
    if a_floor is not None:
        a = float(a_floor)
        la1 = math.log(a_floor + 1)
        la2 = math.log(a_floor + 2)
    else:
        a = math.exp(log_a)
        inv_a = math.exp(-log_a)
        la1 = log_a + math.log1p(inv_a)
        la2 = log_a + math.log1p(2.0 * inv_a)
    fa = kernel.f_log(log_a)
    fa1 = kernel.f_log(la1)
    fa2 = kernel.f_log(la2)
    block = (
        -(a / 2.0) * fa
        + (a / 2.0) * (fa - fa1)
        + 0.5 * fa1
        + (theta / 2.0) * ((a + 1.0) * (fa1 - fa2) + fa2)
    )
    return a_floor, log_a, block


@dataclass(frozen=True)
class CharSumBound:
    """Evaluated upper bound for |sum_{n>=4} chi(n) f(n)| at conductor q."""

    log_q: float
    sigma: float
    theta: float
    a_floor: int | None  # exact floor(sqrt q) - 1 when q <= 1e12
    log_a: float
    value: float
    exact_main: bool  # main f-sum summed directly vs replaced by its majorant


def weighted_charsum_bound(
    log_q: float, kernel: KernelFunction, theta: float = 1.0
) -> CharSumBound:
    """Bound for |sum_{n>=4} chi(n) f(n)|, chi any even primitive real
    character of conductor q, valid for every theta in [0, 1]:

        sum_{4<=n<=A} f(n) - (A/2) f(A) + (A/2)(f(A) - f(A+1)) + f(A+1)/2
        + (theta/2) [(A+1)(f(A+1) - f(A+2)) + f(A+2)] + 18 f(4) - 12 f(5),

    with A = floor(sqrt q) - 1.  theta = 1 is the worst case.  Below
    q = 1e12 the main sum is computed term by term (compensated); above, it
    is replaced by the partial-summation majorant
    A^(1-sigma) (log^2(A)/2 + partial_sum_constant(100)), and the result is
    flagged exact_main=False.  The returned value is nonnegative.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta={theta} outside [0, 1]")
    a_floor, log_a, block = _boundary_block(log_q, kernel, theta)
    if a_floor is not None:
        n = np.arange(4, a_floor + 1, dtype=np.float64)
        main = math.fsum((np.log(n) * n ** (-kernel.sigma)).tolist())
        exact = True
    else:
        main = math.exp((1.0 - kernel.sigma) * log_a) * (
            0.5 * log_a * log_a + partial_sum_constant(100)
        )
        exact = False
    value = main + block + 18.0 * kernel.f(4) - 12.0 * kernel.f(5)
    if value < 0.0:
        raise ArithmeticError(f"character-sum bound negative at log_q={log_q}")
    return CharSumBound(log_q, kernel.sigma, theta, a_floor, log_a, value, exact)


def remainder_term(log_q: float, sigma: float, include_heads: bool = False) -> float:
    """Everything in the character-sum bound except the main f-sum, theta = 1.

    The n = 2, 3 head of the L' series is absorbed into the leading
    q^((1-beta0)/2) log^2(q)/8 block (whose partial summation runs over all
    n <= A), so by default the head terms do NOT appear here.
    include_heads=True adds f(2) + f(3) for the alternative split in which
    the leading block only covers n >= 4; that variant fails the calibration
    against the admissible-constant table and is kept for comparison only.
    """
    kernel = KernelFunction(float(sigma))
    _, _, block = _boundary_block(log_q, kernel, 1.0)
    value = block + 18.0 * kernel.f(4) - 12.0 * kernel.f(5)
    if include_heads:
        value += kernel.f(2) + kernel.f(3)
    return value


def partial_sum_constant(d_cut: int) -> float:
    """-log^2(d_cut)/2 + sum_{n=2}^{d_cut} log(n)/n.

    Negative from d_cut = 26 on and slowly decreasing; at the conventional
    cut 100 it is about -0.0498, small enough that the partial-summation
    majorant simply drops it when a clean (and still valid) form is wanted.
    """
    if d_cut < 2:
        raise ValueError("d_cut must be at least 2")
    return -0.5 * math.log(d_cut) ** 2 + math.fsum(
        math.log(n) / n for n in range(2, d_cut + 1)
    )


def l_prime_upper(log_q: float, c: float) -> float:
    """Upper bound for |L'(sigma, chi)|, uniform over sigma in (beta0, 1),
    under the hypothesis beta0 >= 1 - c/(sqrt(q) log^2 q):

        exp(c / (2 sqrt(q) log q)) * log^2(q)/8  +  max_sigma remainder_term.

    The exponential factor is the exact log-space form of q^((1-beta0)/2) at
    the extreme beta0.  The remainder is maximized over a 64-point grid on
    [beta0, 1] whose right endpoint is the open-interval supremum (the
    remainder increases in sigma on this domain; property-tested).
    """
    _check_log_q(log_q)
    _check_c(c)
    sqrt_q = math.exp(0.5 * log_q)
    first = math.exp(c / (2.0 * sqrt_q * log_q)) * log_q * log_q / 8.0
    beta0 = 1.0 - c / (sqrt_q * log_q * log_q)
    lo = max(0.75, beta0)
    rmax = max(
        remainder_term(log_q, float(s))
        for s in np.linspace(lo, 1.0, _SIGMA_GRID_POINTS)
    )
    return first + rmax


def l_one_lower(log_q: float) -> tuple[float, Branch]:
    """Lower bound for L(1, chi), chi the even primitive real character of
    conductor q >= 4e5.

    Up to q = 1e7 the class-number floor gives 79.2177/sqrt(q).  Beyond, the
    bound is min(412, 12.52)/sqrt(q): the searched floor when the minimal
    Pell solution sits under the cap, log(cap)/2 when it does not, and the
    Pell floor is the smaller of the two.
    """
    _check_log_q(log_q)
    sqrt_q = math.exp(0.5 * log_q)
    if log_q <= LOG_1E7:
        return HLE_LOWER_SMALL / sqrt_q, Branch.LOW_RANGE
    return min(HLE_LOWER_SEARCHED, L_ONE_FLOOR_LARGE) / sqrt_q, Branch.PELL_FLOOR


def admissibility_margin(log_q: float, c: float) -> float:
    """Relative margin of c/(sqrt(q) log^2 q) <= l_one_lower / l_prime_upper.

    Nonnegative means the hypothesis beta0 >= 1 - c/(sqrt(q) log^2 q) is
    self-refuting, i.e. beta0 <= 1 - c/(sqrt(q) log^2 q) holds.
    """
    lhs = c / (math.exp(0.5 * log_q) * log_q * log_q)
    low, _ = l_one_lower(log_q)
    rhs = low / l_prime_upper(log_q, c)
    return (rhs - lhs) / rhs


def beta0_upper(log_q: float, c: float) -> float:
    """The zero-location bound 1 - c/(sqrt(q) log^2 q), with the
    admissibility of c verified first (InadmissibleError otherwise)."""
    margin = admissibility_margin(log_q, c)
    if margin < REL_CLEARANCE:
        raise InadmissibleError(
            f"c={c} not admissible at log_q={log_q}: relative margin {margin:.3e}"
        )
    return 1.0 - c / (math.exp(0.5 * log_q) * log_q * log_q)


@dataclass(frozen=True)
class BoundReport:
    """All quantities entering the zero-location bound at one (q, c)."""

    log_q: float
    c: float
    l_prime_upper: float
    l_one_lower: float
    beta0_upper: float
    branch: Branch


def bound_report(log_q: float, c: float) -> BoundReport:
    low, branch = l_one_lower(log_q)
    return BoundReport(
        log_q=log_q,
        c=c,
        l_prime_upper=l_prime_upper(log_q, c),
        l_one_lower=low,
        beta0_upper=beta0_upper(log_q, c),
        branch=branch,
    )


def solve_c(log_q_lo: float, log_q_hi: float, points: int = 1001) -> int:
    """Largest integer c in [100, 1000] admissible at every grid point of
    [q_lo, q_hi] (log-spaced grid of `points` >= 2 including both endpoints).

    The admissibility margin is strictly decreasing in c (the hypothesis
    side grows, the bound side shrinks), so integer bisection is exact.
    `points` is a declared parameter of the result: doubling it must not
    change the returned c, which the test suite checks on sample ranges.
    """
    _check_log_q(log_q_lo)
    _check_log_q(log_q_hi)
    if not log_q_lo < log_q_hi:
        raise ValueError("need q_lo < q_hi")
    if points < 2:
        raise ValueError("need at least the two endpoints")
    grid = np.linspace(log_q_lo, log_q_hi, points)

    def admissible(c: int) -> bool:
        return all(admissibility_margin(float(g), c) >= REL_CLEARANCE for g in grid)

    if not admissible(100):
        raise NoAdmissibleCError(
            f"no admissible c in [100, 1000] on log_q range "
            f"[{log_q_lo:.6g}, {log_q_hi:.6g}]"
        )
    lo, hi = 100, 1001  # invariant: lo admissible, hi not
    if admissible(1000):
        return 1000
    hi = 1000
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if admissible(mid):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class CheckPoint:
    """One verified inequality lhs <= rhs with its relative margin."""

    label: str
    lhs: float
    rhs: float
    rel_margin: float
    status: str  # "pass" (clears REL_CLEARANCE), "marginal", or "fail"


def check_leq(lhs: float, rhs: float, label: str) -> CheckPoint:
    margin = (rhs - lhs) / abs(rhs)
    if margin >= REL_CLEARANCE:
        status = "pass"
    elif margin >= 0.0:
        status = "marginal"
    else:
        status = "fail"
    return CheckPoint(label, lhs, rhs, margin, status)


@dataclass(frozen=True)
class VerifyReport:
    """A sweep of inequality checks, merged in input order."""

    name: str
    points: tuple[CheckPoint, ...]
    skipped: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(p.status == "pass" for p in self.points)

    @property
    def failures(self) -> tuple[CheckPoint, ...]:
        return tuple(p for p in self.points if p.status != "pass")

    @property
    def worst(self) -> CheckPoint:
        return min(self.points, key=lambda p: p.rel_margin)


def verify_lprime_bound(
    c: float = 100.0, points: int = 10_000, log_q_hi: float = LOG_Q_MAX
) -> VerifyReport:
    """Check l_prime_upper(q, c) <= log^2(q)/8 on a log-spaced conductor grid
    over [4e5, q_hi].  Every point must clear the 1e-9 relative margin."""
    _check_c(c)
    grid = np.linspace(LOG_Q_MIN, log_q_hi, points)
    checks = tuple(
        check_leq(
            l_prime_upper(float(g), c), float(g) * float(g) / 8.0, f"log_q={g:.9g}"
        )
        for g in grid
    )
    return VerifyReport("lprime_bound", checks)


def verify_charsum_bound(
    q_max: int,
    sigmas=(0.9, 0.99, 0.999),
    truncation: int = 10**6,
    max_truncation: int = 16 * 10**6,
) -> VerifyReport:
    """Instance-check the character-sum bound on every fundamental d <= q_max.

    For each d with floor(sqrt d) - 1 >= 5 and each sigma, the left side
    |sum_{n>=4} chi_d(n) f(n)| is enclosed rigorously (finite sum to N plus
    the d * f(N+1) summation-by-parts tail) and its upper edge is compared
    with the theta = 1 bound.  Discriminants too small for the bound's
    anchor are recorded as skipped.  A failure would falsify this
    implementation, not the bound; the tail is re-tightened (N scaled by 4)
    before a failure is accepted as real.
    """
    if q_max > 10**4:
        raise ValueError("verify_charsum_bound is an instance sweep: q_max <= 1e4")
    sigmas = tuple(float(s) for s in sigmas)
    for s in sigmas:
        if not 0.9 <= s < 1.0:
            raise ValueError(f"sigma={s} outside the sweep window [0.9, 1)")
    weight_cache: dict[tuple[float, int], np.ndarray] = {}

    def weights(sigma: float, n_terms: int) -> np.ndarray:
        key = (sigma, n_terms)
        if key not in weight_cache:
            n = np.arange(4, n_terms + 1, dtype=np.float64)
            weight_cache[key] = np.log(n) * n ** (-sigma)
        return weight_cache[key]

    checks = []
    skipped = []
    for d in fundamental_discriminants(5, q_max + 1):
        if math.isqrt(d) - 1 < 5:
            skipped.append(f"d={d}: below the bound's n = 4 anchor")
            continue
        chi = QuadChar(d)
        log_d = math.log(d)
        for sigma in sigmas:
            kernel = KernelFunction(sigma)
            rhs = weighted_charsum_bound(log_d, kernel, theta=1.0).value
            n_terms = truncation
            while True:
                signs = np.resize(chi.table, n_terms + 1)[4:].astype(np.float64)
                mid = abs(float(signs @ weights(sigma, n_terms)))
                radius = d * kernel.f(n_terms + 1)
                point = check_leq(mid + radius, rhs, f"d={d} sigma={sigma}")
                if point.status == "pass" or n_terms >= max_truncation:
                    break
                n_terms *= 4  # tail-dominated near-miss: tighten the enclosure
            checks.append(point)
    return VerifyReport("charsum_bound", tuple(checks), tuple(skipped))
