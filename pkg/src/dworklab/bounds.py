"""Valuation-bound catalog and verification harness.

`BoundKind` names one exponent formula e(n) together with its parameters;
`bound_value` evaluates it exactly; `verify_bounds` compares v_p(h_n)
against it row by row (violations are never dropped); `q_sequence` and
`verify_q_recurrence` check the mod-p recurrence of the normalized
quotients Q_n = h_n / p^{e(n)} that certifies tightness; and
`floor_lemma_checks` exhaustively tests the two floor-sum inequalities
the bound proofs rest on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exactcore import INFINITY, Valuation, check_prime, residue_mod_p, vp
from .series import ExpSeries, LogSeries

TAGS = (
    "thm2.1",
    "cor2.4",
    "thm2.7",
    "thm3.1",
    "thm3.3",
    "thm3.4",
    "cor3.6",
    "thm3.7",
    "thm5.2",
    "thm5.3",
    "thm5.5",
    "thm6.1",
    "thm6.2",
    "kty",
    "hnc2",
)

_NEEDS_L = {"thm2.1", "cor2.4", "thm2.7", "thm3.1", "thm3.4", "thm3.7", "kty"}
_NEEDS_M = {"thm2.1", "kty"}


def partition_case(parts: Sequence[int]) -> tuple[str, int, int]:
    """Case of an abelian type (a_1 >= ... >= a_r) and its (l, m) parameters.

    Case I  (a_1 > a_2+...+a_r):            l = a_1 + 1, m = a_2+...+a_r
    Case II (a_1 <= rest, weight even):     l = A_1 + 1, m = A_1
    Case III(a_1 <= rest, weight odd):      l = A_2 + 1, m = A_2 - 1
    """
    if not parts or any(a < 1 for a in parts) or list(parts) != sorted(parts, reverse=True):
        raise ValueError("partition must be weakly decreasing positive integers")
    weight = sum(parts)
    a1 = parts[0]
    rest = weight - a1
    if a1 > rest:
        return "I", a1 + 1, rest
    if weight % 2 == 0:
        half = weight // 2
        return "II", half + 1, half
    half = (weight + 1) // 2
    return "III", half + 1, half - 1


@dataclass(frozen=True)
class BoundKind:
    """A named exponent formula with its parameters and the prime p."""

    tag: str
    p: int
    l: int | None = None
    m: int | None = None
    partition: tuple[int, ...] | None = None
    dihedral_m: int | None = None

    def __post_init__(self):
        check_prime(self.p)
        tag = self.tag
        if tag not in TAGS:
            raise ValueError(f"unknown bound kind {tag!r}")
        if tag in _NEEDS_L and self.l is None:
            raise ValueError(f"{tag} needs parameter l")
        if tag in _NEEDS_M and self.m is None:
            raise ValueError(f"{tag} needs parameter m")
        if tag == "thm2.1" and not 0 <= self.m < self.l:
            raise ValueError("thm2.1 needs 0 <= m < l")
        if tag in ("cor2.4", "thm3.4") and self.l < 1:
            raise ValueError(f"{tag} needs l >= 1")
        if tag == "thm2.7" and (self.p != 2 or self.l < 2):
            raise ValueError("thm2.7 needs p = 2 and l >= 2")
        if tag in ("thm3.1", "thm3.7"):
            if self.p < 3 or self.l < 1 or (self.p, self.l) == (3, 1):
                raise ValueError(f"{tag} needs p >= 3, l >= 1, (p, l) != (3, 1)")
        if tag == "thm3.3" and self.p != 3:
            raise ValueError("thm3.3 needs p = 3")
        if tag == "thm3.4" and self.p != 2:
            raise ValueError("thm3.4 needs p = 2")
        if tag == "thm5.3" and self.p == 2:
            raise ValueError("thm5.3 concerns groups of odd order")
        if tag == "thm5.5":
            if self.p != 2 or self.dihedral_m is None or self.dihedral_m < 1:
                raise ValueError("thm5.5 needs p = 2 and a dihedral order parameter")
        if tag in ("thm6.1", "thm6.2"):
            if self.partition is None:
                raise ValueError(f"{tag} needs a partition")
            partition_case(self.partition)  # validates shape
            if tag == "thm6.2":
                case, _, _ = partition_case(self.partition)
                if self.p != 2 or case != "II":
                    raise ValueError("thm6.2 needs p = 2 and a case II partition")
        if tag == "kty" and not 0 <= self.m <= self.l:
            raise ValueError("kty needs l >= m >= 0")
        if tag == "hnc2" and self.p != 2:
            raise ValueError("hnc2 is a p = 2 bound")

    def describe(self) -> dict:
        out = {"tag": self.tag, "p": self.p}
        for key in ("l", "m", "partition", "dihedral_m"):
            val = getattr(self, key)
            if val is not None:
                out[key] = list(val) if isinstance(val, tuple) else val
        return out


def _floor_sum(n: int, base: int, lo: int, hi: int | None = None) -> int:
    """sum_{s=lo}^{hi} floor(n / base^s); hi=None runs until terms vanish."""
    total = 0
    q = base**lo
    s = lo
    while n // q and (hi is None or s <= hi):
        total += n // q
        q *= base
        s += 1
    return total


def _floor_sum_half(n: int, p: int, lo: int) -> int:
    """sum_{s>=lo} floor(n / (2 p^s))."""
    total = 0
    q = 2 * p**lo
    while n // q:
        total += n // q
        q *= p
    return total


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def bound_value(kind: BoundKind, n: int) -> int:
    """Exact integer value of the named exponent formula at n >= 0."""
    if n < 0:
        raise ValueError("n must be non-negative")
    p, tag = kind.p, kind.tag
    if tag == "thm2.1":
        return _floor_sum(n, p, 1, kind.l - 1) - (kind.l - kind.m - 1) * (n // p**kind.l)
    if tag == "cor2.4":
        return _floor_sum(n, p, 1, kind.l - 1) - (kind.l - 1) * (n // p**kind.l)
    if tag == "thm2.7":
        l = kind.l
        return (
            _floor_sum(n, 2, 1, l - 1) + n // 2 ** (l + 1) - n // 2 ** (l + 2)
        )
    if tag == "thm3.1":
        l = kind.l
        return _floor_sum(n, p, 1) - (l - 1) * (n // p**l) - _floor_sum_half(n, p, l)
    if tag == "thm3.3":
        # the correction term is ceil(floor(n/9)/2): up to floor(n/9) tail
        # indices at 3^2 each cost half a digit, rounded up since the
        # valuation is an integer (floor(n/18) is too small at n = 9)
        return _floor_sum(n, 3, 1) - _floor_sum_half(n, 3, 1) - _ceil_div(n // 9, 2)
    if tag == "thm3.4":
        l = kind.l
        if l == 1:
            return n // 2 - n // 4
        if l == 2:
            return n // 2
        return _floor_sum(n, 2, 1, l + 1) - (l - 1) * (n // 2**l)
    if tag == "cor3.6":
        if p == 2:
            return n // 2 - n // 4
        if p == 3:
            return bound_value(BoundKind("thm3.3", 3), n)
        return _floor_sum(n, p, 1) - _floor_sum_half(n, p, 1)
    if tag == "thm3.7":
        l = kind.l
        return (
            _floor_sum(n, p, 1)
            - (l - 1) * _ceil_div(n, 2 * p**l)
            - _floor_sum_half(n, p, l)
        )
    if tag == "thm5.2":
        return n // p - n // p**2
    if tag == "thm5.3":
        return n // p + n // p**2 - 2 * (n // p**3)
    if tag == "thm5.5":
        return n // 2 if kind.dihedral_m % 4 == 0 else n // 2 - n // 4
    if tag == "thm6.1":
        case, l, m = partition_case(kind.partition)
        if case == "I":
            a1 = kind.partition[0]
            rest = sum(kind.partition) - a1
            return _floor_sum(n, p, 1, a1) - (a1 - rest) * (n // p ** (a1 + 1))
        if case == "II":
            return _floor_sum(n, p, 1, m)  # m == A_1
        half = m + 1  # A_2
        return _floor_sum(n, p, 1, half) - n // p ** (half + 1)
    if tag == "thm6.2":
        a1 = sum(kind.partition) // 2
        return (
            _floor_sum(n, 2, 1, a1) + n // 2 ** (a1 + 2) - n // 2 ** (a1 + 3)
        )
    if tag == "kty":
        return _floor_sum(n, p, 1, kind.l) - (kind.l - kind.m) * (
            n // p ** (kind.l + 1)
        )
    if tag == "hnc2":
        return (n + 2) // 4
    raise AssertionError(tag)


@dataclass(frozen=True)
class VerifyRow:
    n: int
    valuation: Valuation
    bound: int
    slack: Valuation
    tight: bool

    def as_dict(self) -> dict:
        enc = lambda v: "infinity" if v is INFINITY else v
        return {
            "n": self.n,
            "valuation": enc(self.valuation),
            "bound": self.bound,
            "slack": enc(self.slack),
            "tight": self.tight,
        }


@dataclass
class BoundReport:
    kind: BoundKind
    rows: list[VerifyRow]
    violations: list[int] = field(default_factory=list)
    tight_set: list[int] = field(default_factory=list)
    min_slack: Valuation = INFINITY

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> dict:
        return {
            "kind": self.kind.describe(),
            "rows_checked": len(self.rows),
            "violations": self.violations,
            "min_slack": "infinity" if self.min_slack is INFINITY else self.min_slack,
            "tight": self.tight_set,
        }


def verify_bounds(
    h: ExpSeries, kind: BoundKind, n_lo: int = 0, n_hi: int | None = None
) -> BoundReport:
    """One row per n in [n_lo, n_hi]: valuation, bound, slack, tightness."""
    n_hi = h.n_max if n_hi is None else n_hi
    if n_hi > h.n_max:
        raise ValueError("range exceeds truncation")
    rows = []
    violations = []
    tight_set = []
    min_slack: Valuation = INFINITY
    for n in range(n_lo, n_hi + 1):
        val = vp(h[n], kind.p)
        bnd = bound_value(kind, n)
        slack = val - bnd if val is not INFINITY else INFINITY
        tight = slack == 0
        rows.append(VerifyRow(n, val, bnd, slack, tight))
        if val < bnd:
            violations.append(n)
        if tight:
            tight_set.append(n)
        if slack < min_slack:
            min_slack = slack
    return BoundReport(kind, rows, violations, tight_set, min_slack)


@dataclass(frozen=True)
class QSeq:
    """Residues mod p of Q_n = h_n / p^{e(n)} for n = 0..N."""

    residues: tuple[int, ...]
    kind: BoundKind

    @property
    def n_max(self) -> int:
        return len(self.residues) - 1

    def __getitem__(self, n: int) -> int:
        return self.residues[n]


def q_sequence(h: ExpSeries, kind: BoundKind, n_hi: int | None = None) -> QSeq:
    """Build the Q-sequence; any bound violation aborts with an error."""
    n_hi = h.n_max if n_hi is None else n_hi
    if n_hi > h.n_max:
        raise ValueError("range exceeds truncation")
    p = kind.p
    residues = []
    for n in range(n_hi + 1):
        e = bound_value(kind, n)
        hn = h[n]
        val = vp(hn, p)
        if val < e:
            raise ValueError(
                f"bound violated at n={n}: v_{p}(h_n) = {val} < {e}; Q_{n} undefined"
            )
        q = hn / Fraction(p**e) if e >= 0 else hn * Fraction(p ** (-e))
        residues.append(residue_mod_p(q, p))
    return QSeq(tuple(residues), kind)


@dataclass
class QRecurrenceReport:
    kind: BoundKind
    step: int
    multiplier: int  # residue mod p
    failures: list[int]
    checked: int

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> dict:
        return {
            "kind": self.kind.describe(),
            "step": self.step,
            "multiplier_mod_p": self.multiplier,
            "failures": self.failures,
            "rows_checked": self.checked,
        }


def q_recurrence_parameters(kind: BoundKind, s: LogSeries) -> tuple[int, int]:
    """(step, multiplier residue) of the quotient recurrence for this kind.

    The multiplier is (-1)^l (s_{p^l} - s_{p^{l-1}}) / p^m reduced mod p
    for the first family, and (s_{2^{l+1}} - s_{2^l}) / 2^{l-2} mod 2 for
    the p = 2 improved-bound family.  Raises if the required difference
    congruence fails (the multiplier would not be p-integral).
    """
    p, tag = kind.p, kind.tag
    if tag in ("thm2.1", "cor2.4", "thm6.1"):
        if tag == "thm2.1":
            l, m = kind.l, kind.m
        elif tag == "cor2.4":
            l, m = kind.l, 0
        else:
            case, l, m = partition_case(kind.partition)
            if case == "II" and p == 2:
                raise ValueError(
                    "p = 2 case II has no first-family quotient recurrence; "
                    "use the thm6.2 kind"
                )
        diff = s[p**l] - s[p ** (l - 1)]
        mult = diff / Fraction(p**m)
        if vp(mult, p) < 0:
            raise ValueError(
                "difference congruence hypothesis violated: multiplier not p-integral"
            )
        step = p**l
        rho = (-1) ** l * residue_mod_p(mult, p) % p
        return step, rho
    if tag in ("thm2.7", "thm6.2"):
        l = kind.l if tag == "thm2.7" else sum(kind.partition) // 2 + 1
        diff = s[2 ** (l + 1)] - s[2**l]
        mult = diff / Fraction(2 ** (l - 2))
        if vp(mult, 2) < 0:
            raise ValueError(
                "difference congruence hypothesis violated: multiplier not 2-integral"
            )
        return 2 ** (l + 2), residue_mod_p(mult, 2)
    raise ValueError(f"no quotient recurrence is defined for kind {tag!r}")


def verify_q_recurrence(q: QSeq, kind: BoundKind, s: LogSeries) -> QRecurrenceReport:
    """Check Q_n = rho * Q_{n-step} (mod p) for every step <= n <= N."""
    step, rho = q_recurrence_parameters(kind, s)
    p = kind.p
    failures = [
        n
        for n in range(step, q.n_max + 1)
        if q[n] != rho * q[n - step] % p
    ]
    return QRecurrenceReport(kind, step, rho, failures, max(q.n_max + 1 - step, 0))


# ---------------------------------------------------------------------------
# floor-sum lemmas
# ---------------------------------------------------------------------------


def floor_sum_gap(i: int, j: int, p: int, l: int) -> int:
    """sum_{s>=1} (floor(ij / p^{s+l}) - floor(j / p^s)), exactly."""
    total = 0
    s = 1
    while True:
        a = i * j // p ** (s + l)
        b = j // p**s
        if a == 0 and b == 0:
            return total
        total += a - b
        s += 1


def _default_x_grid() -> list[Fraction]:
    grid = set()
    for den in range(1, 9):
        for num in range(-4 * den, 4 * den + 1):
            grid.add(Fraction(num, den))
    return sorted(grid)


@dataclass
class FloorLemmaReport:
    ij_counterexamples: list[tuple[int, int]]
    half_counterexamples: list[tuple[int, Fraction]]
    ij_checked: int = 0
    half_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.ij_counterexamples and not self.half_counterexamples

    def summary(self) -> dict:
        return {
            "ij_checked": self.ij_checked,
            "ij_counterexamples": self.ij_counterexamples,
            "half_checked": self.half_checked,
            "half_counterexamples": [
                [j, str(x)] for j, x in self.half_counterexamples
            ],
        }


def half_floor_inequality_holds(j: int, x: Fraction) -> bool:
    """j + floor(x) <= floor(3j/2 + x) - floor(j/2)/2, checked exactly."""
    lhs = Fraction(j + math.floor(x))
    rhs = Fraction(math.floor(Fraction(3 * j, 2) + x)) - Fraction(j // 2, 2)
    return lhs <= rhs


def floor_lemma_checks(
    p: int,
    l: int,
    i_max: int,
    j_max: int,
    x_samples: Sequence[Fraction] | None = None,
    j_min: int = 0,
) -> FloorLemmaReport:
    """Exhaustively check both floor-sum inequalities over a grid.

    First: for p^l <= i <= i_max, 0 <= j <= j_max,
      sum_{s>=1}(floor(ij/p^{s+l}) - floor(j/p^s)) >= j (p^{floor(log_p i)-l}-1)/(p-1).
    Second: for j_min <= j <= j_max (independent of p, l) and x on the
    rational grid, j + floor(x) <= floor(3j/2 + x) - floor(j/2)/2.
    """
    check_prime(p)
    if l < 0:
        raise ValueError("l must be non-negative")
    report = FloorLemmaReport([], [])
    pl = p**l
    for i in range(pl, i_max + 1):
        # floor(log_p i) without floats
        e = 0
        q = p
        while q <= i:
            e += 1
            q *= p
        target_unit = (p ** (e - l) - 1) // (p - 1)
        for j in range(0, j_max + 1):
            report.ij_checked += 1
            if floor_sum_gap(i, j, p, l) < j * target_unit:
                report.ij_counterexamples.append((i, j))
    xs = _default_x_grid() if x_samples is None else list(x_samples)
    for j in range(j_min, j_max + 1):
        for x in xs:
            report.half_checked += 1
            if not half_floor_inequality_holds(j, Fraction(x)):
                report.half_counterexamples.append((j, Fraction(x)))
    return report
