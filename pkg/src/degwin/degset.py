"""Degree sets and their exponential generating function.

A degree set D is a finite or unbounded set of allowed vertex degrees.  The
model requires 1 in D (pendant vertices exist) and max(D) >= 3 (otherwise the
branching ratio never reaches 1 and there is no critical point).  Unbounded
sets given by a rule ("all", "even", "pow2", or a custom predicate) are
materialised up to a truncation bound; every evaluation re-checks stability by
doubling the bound until the value stops moving.

The generating function here is the degree EGF

    omega(z) = sum_{d in D} z^d / d!

and its termwise derivatives; the two ratios

    phi0(z) = z omega'(z) / omega(z)      (mean-degree functional)
    phi1(z) = z omega''(z) / omega'(z)    (branching ratio)

drive everything downstream: phi1 = 1 locates the critical point and
phi0 = 2r locates saddle points off criticality.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np
from scipy.special import gammaln

from .errors import DegreeSetError, TruncationUnstableError

DEFAULT_BOUND = 60
# Largest exponent for which z**p / p! is computed directly in floats; above
# this we go through exp(p log z - lgamma(p+1)) to dodge overflow.
_DIRECT_POWER_LIMIT = 150
_STABILITY_RTOL = 1e-12
_MAX_DOUBLINGS = 6

_RULES: dict[str, Callable[[int], bool]] = {
    "all": lambda d: True,
    "even": lambda d: d % 2 == 0,
    "pow2": lambda d: d >= 1 and (d & (d - 1)) == 0,
}


@dataclass(frozen=True)
class DegreeSet:
    """An immutable, validated set of allowed degrees.

    ``degrees`` is the sorted materialised tuple.  ``rule``/``predicate`` and
    ``bound`` are kept for unbounded sets so evaluations can extend the
    truncation on demand; explicit sets have rule None and never extend.
    """

    degrees: tuple[int, ...]
    rule: str | None = None
    bound: int | None = None
    predicate: Callable[[int], bool] | None = field(
        default=None, compare=False, repr=False
    )

    def __post_init__(self):
        degs = self.degrees
        if len(degs) == 0:
            raise DegreeSetError("degree set is empty")
        if any((not isinstance(d, int)) or d < 0 for d in degs):
            raise DegreeSetError(f"degrees must be non-negative integers: {degs}")
        if len(set(degs)) != len(degs) or tuple(sorted(degs)) != degs:
            raise DegreeSetError(f"degrees must be distinct and sorted: {degs}")
        if 1 not in degs:
            raise DegreeSetError(
                "degree set must contain 1: pendant vertices (and hence trees) "
                "are required by the sampling and threshold theory"
            )
        if max(degs) <= 2:
            raise DegreeSetError(
                "degree set needs at least one degree >= 3: with all degrees "
                "<= 2 the branching ratio stays below 1 and the model has no "
                "phase transition"
            )

    @classmethod
    def from_degrees(cls, degrees: Iterable[int]) -> "DegreeSet":
        return cls(tuple(sorted(set(int(d) for d in degrees))))

    @classmethod
    def from_rule(cls, rule: str, bound: int = DEFAULT_BOUND) -> "DegreeSet":
        if rule not in _RULES:
            raise DegreeSetError(
                f"unknown degree rule {rule!r}; known rules: {sorted(_RULES)}"
            )
        degs = _materialize(_RULES[rule], bound)
        return cls(degs, rule=rule, bound=bound)

    @classmethod
    def from_predicate(
        cls, predicate: Callable[[int], bool], bound: int = DEFAULT_BOUND
    ) -> "DegreeSet":
        degs = _materialize(predicate, bound)
        return cls(degs, rule="custom", bound=bound, predicate=predicate)

    def with_bound(self, bound: int) -> "DegreeSet":
        """Re-materialise an unbounded set at a new truncation bound.

        Explicit sets are returned unchanged (they have no tail to extend).
        """
        if self.rule is None:
            return self
        pred = self.predicate if self.predicate is not None else _RULES[self.rule]
        return DegreeSet(
            _materialize(pred, bound),
            rule=self.rule,
            bound=bound,
            predicate=self.predicate,
        )

    @property
    def min_degree(self) -> int:
        return self.degrees[0]

    @property
    def max_degree(self) -> int:
        return self.degrees[-1]

    def __str__(self) -> str:
        if self.rule is not None:
            return f"{self.rule}:{self.bound}"
        return ",".join(str(d) for d in self.degrees)


def _materialize(predicate: Callable[[int], bool], bound: int) -> tuple[int, ...]:
    if bound < 1:
        raise DegreeSetError(f"truncation bound must be >= 1, got {bound}")
    return tuple(d for d in range(bound + 1) if predicate(d))


_RANGE_RE = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$")
_RULE_RE = re.compile(r"^\s*([A-Za-z][A-Za-z0-9_-]*)\s*(?::\s*(\d+)\s*)?$")


def parse_degree_set(text: str) -> DegreeSet:
    """Parse a degree-set specification string.

    Accepted forms:
      * an explicit list:  ``"1,3,5,7"``
      * an inclusive range: ``"0..9"``
      * a rule with optional truncation bound: ``"all:60"``, ``"pow2:64"``,
        ``"even"`` (default bound 60)
    """
    if not isinstance(text, str) or not text.strip():
        raise DegreeSetError(f"empty degree-set specification: {text!r}")
    s = text.strip()
    m = _RANGE_RE.match(s)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise DegreeSetError(f"bad range {s!r}: upper end below lower end")
        return DegreeSet.from_degrees(range(lo, hi + 1))
    if "," in s or s.isdigit():
        try:
            degs = [int(tok) for tok in s.split(",") if tok.strip() != ""]
        except ValueError as exc:
            raise DegreeSetError(f"bad degree list {s!r}: {exc}") from None
        return DegreeSet.from_degrees(degs)
    m = _RULE_RE.match(s)
    if m:
        rule = m.group(1).lower()
        bound = int(m.group(2)) if m.group(2) is not None else DEFAULT_BOUND
        return DegreeSet.from_rule(rule, bound)
    raise DegreeSetError(f"unrecognised degree-set specification {s!r}")


@lru_cache(maxsize=256)
def _power_arrays(degrees: tuple[int, ...], order: int):
    """Exponents p = d - order and factors p! for the order-th termwise
    derivative of the degree EGF, restricted to d >= order."""
    ps = np.array([d - order for d in degrees if d >= order], dtype=np.int64)
    if ps.size == 0:
        return ps, np.empty(0)
    # log p! via gammaln keeps the large-p path overflow-free.
    logfact = gammaln(ps.astype(np.float64) + 1.0)
    small = ps <= _DIRECT_POWER_LIMIT
    fact_small = np.array([math.factorial(int(p)) for p in ps[small]], dtype=np.float64)
    return ps, (small, fact_small, logfact)


def _egf_raw(degrees: tuple[int, ...], z: float, order: int) -> float:
    ps, aux = _power_arrays(degrees, order)
    if ps.size == 0:
        return 0.0
    if z == 0.0:
        return 1.0 if ps[0] == 0 else 0.0
    small, fact_small, logfact = aux
    terms = np.empty(ps.size)
    terms[small] = np.power(z, ps[small]) / fact_small
    big = ~small
    if big.any():
        terms[big] = np.exp(ps[big] * math.log(z) - logfact[big])
    return math.fsum(terms.tolist())


def egf_eval(ds: DegreeSet, z: float, order: int = 0) -> float:
    """Evaluate the order-th termwise derivative of omega at z >= 0.

    For rule-based (unbounded) sets the truncation bound is doubled until the
    value is stable to relative 1e-12; failure to stabilise raises
    TruncationUnstableError.
    """
    if order < 0:
        raise ValueError(f"derivative order must be >= 0, got {order}")
    if not (z >= 0.0) or math.isinf(z):
        raise ValueError(f"egf_eval requires finite z >= 0, got {z}")
    val = _egf_raw(ds.degrees, z, order)
    if ds.rule is None:
        return val
    bound = ds.bound if ds.bound is not None else DEFAULT_BOUND
    for _ in range(_MAX_DOUBLINGS):
        bound *= 2
        wide = ds.with_bound(bound)
        val2 = _egf_raw(wide.degrees, z, order)
        if abs(val2 - val) <= _STABILITY_RTOL * max(abs(val2), 1e-300):
            return val2
        val = val2
    raise TruncationUnstableError(
        f"EGF truncation for {ds} did not stabilise at z={z} "
        f"(last bound {bound}); evaluate at smaller z or raise the bound"
    )


def egf_eval_complex(ds: DegreeSet, z: complex, order: int = 0) -> complex:
    """Termwise-derivative EGF at complex z (used by saddle evaluations).

    No tail-stability doubling: callers keep |z| at or below the real radius
    they have already validated.
    """
    ps, aux = _power_arrays(ds.degrees, order)
    if ps.size == 0:
        return 0.0 + 0.0j
    if z == 0:
        return complex(1.0 if ps[0] == 0 else 0.0)
    small, fact_small, logfact = aux
    terms = np.empty(ps.size, dtype=np.complex128)
    terms[small] = np.power(z, ps[small]) / fact_small
    big = ~small
    if big.any():
        terms[big] = np.exp(ps[big] * np.log(complex(z)) - logfact[big])
    re = math.fsum(terms.real.tolist())
    im = math.fsum(terms.imag.tolist())
    return complex(re, im)


def phi0(ds: DegreeSet, z: float) -> float:
    """z omega'(z) / omega(z); non-decreasing on the positive axis."""
    if z <= 0.0:
        raise ValueError(f"phi0 requires z > 0, got {z}")
    w0 = egf_eval(ds, z, 0)
    w1 = egf_eval(ds, z, 1)
    return z * w1 / w0


def phi1(ds: DegreeSet, z: float) -> float:
    """z omega''(z) / omega'(z); non-decreasing on the positive axis."""
    if z <= 0.0:
        raise ValueError(f"phi1 requires z > 0, got {z}")
    w1 = egf_eval(ds, z, 1)
    w2 = egf_eval(ds, z, 2)
    return z * w2 / w1


def periodicity(ds: DegreeSet) -> int:
    """gcd of the pairwise differences of the degrees."""
    dmin = ds.degrees[0]
    g = 0
    for d in ds.degrees[1:]:
        g = math.gcd(g, d - dmin)
    return g if g > 0 else 1


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the admissibility check for (degrees, n, m)."""

    ok: bool
    lower_ok: bool
    upper_ok: bool
    residue_ok: bool
    periodicity: int
    n: int
    m: int

    @property
    def failures(self) -> list[str]:
        out = []
        if not self.lower_ok:
            out.append(
                f"2m = {2 * self.m} must strictly exceed n*min(D) "
                f"(all-minimum-degree boundary)"
            )
        if not self.upper_ok:
            out.append(
                f"2m = {2 * self.m} must be strictly below n*max(D) "
                f"(all-maximum-degree boundary)"
            )
        if not self.residue_ok:
            out.append(
                f"2m - n*min(D) must be divisible by the degree period "
                f"p = {self.periodicity}"
            )
        return out


def check_condition_C(ds: DegreeSet, n: int, m: int) -> ConditionReport:
    """Admissibility of (n, m): strict boundary bounds plus the residue test.

    A degree sequence with n terms in D summing to 2m exists for large n iff
    min(D)*n < 2m < max(D)*n and p | (2m - n*min(D)) where p is the degree
    period; small-n corner cases are caught later by the sampler's exact count.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    p = periodicity(ds)
    two_m = 2 * m
    lower_ok = two_m > ds.min_degree * n
    upper_ok = two_m < ds.max_degree * n
    residue_ok = (two_m - n * ds.min_degree) % p == 0
    return ConditionReport(
        ok=lower_ok and upper_ok and residue_ok,
        lower_ok=lower_ok,
        upper_ok=upper_ok,
        residue_ok=residue_ok,
        periodicity=p,
        n=n,
        m=m,
    )
