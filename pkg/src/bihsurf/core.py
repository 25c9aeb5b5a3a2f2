"""Shared scalar/rational types, exact square roots and verification reports."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

# Two verification tiers: analytic-pipeline residuals vs finite-difference ones.
GEOMETRIC_TOL = 1e-9
FD_TOL = 1e-5


class DomainError(ValueError):
    """A parameter lies outside the domain an operation is defined on."""


class ExactnessError(ValueError):
    """Exact rational data was required but not available."""


def isqrt_exact(n: int) -> Optional[int]:
    """Integer square root of n if n is a perfect square, else None."""
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def rational_sqrt_exact(q: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or None if irrational.

    A reduced fraction p/q is a rational square iff p and q are both
    perfect squares.
    """
    if q < 0:
        raise DomainError("rational_sqrt_exact requires q >= 0, got %s" % q)
    num = isqrt_exact(q.numerator)
    if num is None:
        return None
    den = isqrt_exact(q.denominator)
    if den is None:
        return None
    return Fraction(num, den)


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Write n > 0 as s^2 * d with d squarefree; returns (s, d).

    Trial division; the lattice surds this library meets are tiny.
    """
    if n <= 0:
        raise DomainError("squarefree_decompose requires n > 0, got %d" % n)
    s, d = 1, 1
    p = 2
    m = n
    while p * p <= m:
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            s *= p ** (k // 2)
            if k % 2:
                d *= p
        p += 1 if p == 2 else 2
    return s, d * m


# non-finite residuals are capped to a finite sentinel so reports stay valid
# JSON; the value fails every sane tolerance
_RESIDUAL_CAP = 1e300


def _finite(x: float) -> float:
    x = float(x)
    return x if math.isfinite(x) and x < _RESIDUAL_CAP else _RESIDUAL_CAP


@dataclass(frozen=True)
class Check:
    """One named residual measured against a tolerance."""

    name: str
    residual: float
    tolerance: float

    def __post_init__(self):
        object.__setattr__(self, "residual", _finite(self.residual))
        object.__setattr__(self, "tolerance", float(self.tolerance))

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


@dataclass(frozen=True)
class VerificationReport:
    """Pass/fail summary of a batch of checks over sample_count points."""

    checks: tuple[Check, ...]
    sample_count: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def merged(self, other: "VerificationReport") -> "VerificationReport":
        """Associative merge: same-named checks keep the worst residual."""
        by_name: dict[str, Check] = {c.name: c for c in self.checks}
        order = [c.name for c in self.checks]
        for c in other.checks:
            if c.name in by_name:
                prev = by_name[c.name]
                if c.residual > prev.residual:
                    by_name[c.name] = Check(c.name, c.residual, min(c.tolerance, prev.tolerance))
            else:
                by_name[c.name] = c
                order.append(c.name)
        return VerificationReport(
            checks=tuple(by_name[n] for n in order),
            sample_count=self.sample_count + other.sample_count,
        )

    def to_dict(self) -> dict:
        return {
            "checks": [
                {
                    "name": c.name,
                    "residual": c.residual,
                    "tolerance": c.tolerance,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
            "samples": self.sample_count,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def make_report(entries: Iterable[tuple[str, float, float]], samples: int) -> VerificationReport:
    return VerificationReport(tuple(Check(n, r, t) for n, r, t in entries), samples)
