"""Pell fundamental solutions, regulators, and narrow class numbers.

For a positive fundamental discriminant d, eta_d = (v0 + u0 sqrt(d))/2 with
(v0, u0) the minimal positive solution of v^2 - d u^2 = 4, h+(d) the narrow
class number (the cycle count of reduced indefinite binary quadratic forms),
and the product h+(d) * log(eta_d) equals sqrt(d) * L(1, chi_d).  That
analytic identity is the cross-check tying this module to `characters`:
each side is computed with no shared code.

Everything here is a pure function; the `search` module calls these from
many worker processes at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .characters import is_fundamental_discriminant

__all__ = [
    "ContinuedFraction",
    "FormClassData",
    "PellSolution",
    "h_log_eta",
    "narrow_class_number",
    "pell4_min_solution",
    "reduced_forms",
    "regulator_log",
    "sqrt_continued_fraction",
]

_LOG2 = math.log(2)


@dataclass(frozen=True)
class ContinuedFraction:
    """Periodic continued fraction of sqrt(d): [a0; period repeating]."""

    d: int
    a0: int
    period: tuple[int, ...]


def sqrt_continued_fraction(d: int) -> ContinuedFraction:
    """Continued fraction of sqrt(d) by the exact integer P,Q recurrence.

    The period ends at the first partial quotient with Q back to 1 (that
    quotient is 2*a0, and the preceding terms are a palindrome).
    """
    a0 = math.isqrt(d)
    if a0 * a0 == d:
        raise ValueError(f"sqrt({d}) is rational; no periodic expansion")
    period = []
    m, q = 0, 1
    a = a0
    while True:
        m = a * q - m
        q = (d - m * m) // q
        a = (a0 + m) // q
        period.append(a)
        if q == 1:
            break
    return ContinuedFraction(d, a0, tuple(period))


def _require_domain(d: int):
    if not is_fundamental_discriminant(d):
        raise ValueError(f"{d} is not a positive fundamental discriminant")


def _fundamental_unit(d: int) -> tuple[int, int, int]:
    """Exact (v, u, ell): eps = (v + u sqrt(d))/2 is the fundamental unit > 1
    of the quadratic order of discriminant d, of norm (-1)^ell.

    Uses the purely periodic expansion of the reduced generator
    w = (b0 + sqrt(d))/2, b0 the largest integer of d's parity below sqrt(d):
    with period length ell and convergent denominators q_k, the unit is
    eps = q_{ell-1} w + q_{ell-2}.
    """
    r = math.isqrt(d)
    b0 = r if (r - d) % 2 == 0 else r - 1
    P, Q = b0, 2
    qm2, qm1 = 1, 0
    ell = 0
    while True:
        a = (P + r) // Q  # floor((P + sqrt d)/Q): exact, since 0 < frac(sqrt d) < 1
        P = a * Q - P
        Q = (d - P * P) // Q
        qm2, qm1 = qm1, a * qm1 + qm2
        ell += 1
        if P == b0 and Q == 2:
            break
    v = b0 * qm1 + 2 * qm2
    u = qm1
    if v * v - d * u * u != 4 * (-1) ** ell:
        raise ArithmeticError(f"unit norm check failed for d={d}")
    return v, u, ell


@dataclass(frozen=True)
class PellSolution:
    """Minimal positive (v0, u0) with v0^2 - d u0^2 = 4, plus log(eta_d)."""

    d: int
    v0: int
    u0: int
    eta_log: float


def _eta_log(v: int, u: int, d: int) -> float:
    """log((v + u sqrt d)/2) accurate to ~1 ulp for arbitrarily large v."""
    if v.bit_length() <= 500:
        return math.log((v + u * math.sqrt(d)) / 2)
    # v is huge: u sqrt(d) = sqrt(v^2 - 4); isqrt truncation error < 2^-500
    return math.log(v + math.isqrt(v * v - 4)) - _LOG2


def pell4_min_solution(d: int) -> PellSolution:
    """Minimal solution of v^2 - d u^2 = 4 in exact integer arithmetic.

    Derived from the fundamental unit: the unit itself when its norm is +1,
    its square when the norm is -1.  Minimality follows because u grows
    monotonically with the unit.  The Pell identity is re-verified exactly
    before returning.
    """
    _require_domain(d)
    v, u, ell = _fundamental_unit(d)
    if ell % 2:
        v, u = (v * v + d * u * u) // 2, v * u
    if v * v - d * u * u != 4:
        raise ArithmeticError(f"Pell identity violated for d={d}")
    return PellSolution(d, v, u, _eta_log(v, u, d))


def regulator_log(d: int) -> float:
    """log(eta_d) without big integers.

    Runs the same continued-fraction recurrence as pell4_min_solution but
    carries the convergent denominators as doubles with a shared power-of-two
    exponent (periods long enough to overflow float range are renormalized
    every few hundred steps), and doubles the result when the fundamental
    unit has norm -1.  Relative error ~ period * 2^-53, far inside the 1e-12
    contract checked against the exact route.
    """
    _require_domain(d)
    r = math.isqrt(d)
    b0 = r if (r - d) % 2 == 0 else r - 1
    sqd = math.sqrt(d)
    P, Q = b0, 2
    qm2, qm1 = 1.0, 0.0
    exp2 = 0
    ell = 0
    while True:
        a = (P + r) // Q
        P = a * Q - P
        Q = (d - P * P) // Q
        qm2, qm1 = qm1, a * qm1 + qm2
        ell += 1
        if qm1 > 2.0**512:
            qm2 = math.ldexp(qm2, -512)
            qm1 = math.ldexp(qm1, -512)
            exp2 += 512
        if P == b0 and Q == 2:
            break
    log_eps = math.log(qm1 * (b0 + sqd) / 2 + qm2) + exp2 * _LOG2
    return 2.0 * log_eps if ell % 2 else log_eps


@dataclass(frozen=True)
class FormClassData:
    """Narrow class number as the cycle count of reduced indefinite forms."""

    d: int
    h_plus: int
    reduced_form_count: int


def reduced_forms(d: int) -> list[tuple[int, int, int]]:
    """All reduced indefinite forms (a, b, c) of discriminant d.

    Reduced means b^2 - 4ac = d with |sqrt(d) - 2|a|| < b < sqrt(d); the
    companion bound on |c| follows automatically from |a c| = (d - b^2)/4.
    Enumeration: for each admissible b, the divisors of (d - b^2)/4 lying in
    the open interval ((sqrt d - b)/2, (sqrt d + b)/2) give |a|, each with
    both signs.  Output is sorted.
    """
    r = math.isqrt(d)
    forms = []
    for b in range(2 - (d % 2), r + 1, 2):
        m = (d - b * b) // 4  # = |a c| >= 1
        # integer |a| range: strict bounds, sqrt(d) irrational in domain
        a_min = (r - b) // 2 + 1
        a_max = (r + b) // 2
        if a_max - a_min > 512:
            cand = np.arange(a_min, a_max + 1, dtype=np.int64)
            divs = cand[m % cand == 0].tolist()
        else:
            divs = [a for a in range(a_min, a_max + 1) if m % a == 0]
        for a in divs:
            c = m // a
            forms.append((a, b, -c))
            forms.append((-a, b, c))
    forms.sort()
    return forms


def _rho(form: tuple[int, int, int], d: int, r: int) -> tuple[int, int, int]:
    """Gauss reduction step on a reduced form; permutes the reduced forms.

    The middle coefficient of the successor is the unique b' = -b (mod 2|c|)
    with sqrt(d) - 2|c| < b' < sqrt(d).
    """
    a, b, c = form
    cc = 2 * abs(c)
    t = (-b) % cc
    b2 = t + cc * ((r - t) // cc)
    return (c, b2, (b2 * b2 - d) // (4 * c))


def narrow_class_number(d: int) -> FormClassData:
    """Narrow class number h+(d) = number of reduction cycles.

    The reduction operator is a bijection on the finite set of reduced forms
    and its orbits are exactly the narrow form classes.  Cycles are walked
    from lexicographically minimal unvisited representatives, so the
    traversal order (and any per-cycle data) is deterministic.
    """
    _require_domain(d)
    if d > 10**9:
        raise ValueError("narrow_class_number: d beyond the 1e9 enumeration bound")
    forms = reduced_forms(d)
    formset = set(forms)
    r = math.isqrt(d)
    seen = set()
    cycles = 0
    for start in forms:
        if start in seen:
            continue
        cycles += 1
        g = start
        while True:
            seen.add(g)
            g = _rho(g, d, r)
            if g not in formset:
                raise ArithmeticError(f"reduction left the reduced set at d={d}: {g}")
            if g == start:
                break
    return FormClassData(d, cycles, len(forms))


def h_log_eta(d: int) -> float:
    """h+(d) * log(eta_d); equals sqrt(d) * L(1, chi_d) (cross-checked)."""
    return narrow_class_number(d).h_plus * regulator_log(d)
