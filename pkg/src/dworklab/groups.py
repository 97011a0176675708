"""Exact subgroup-count sequences for finite Abelian p-groups, cyclic and
dihedral groups, and free products of such groups.

The production path counts subgroups of each type inside an Abelian
p-group of type mu with the conjugate-partition formula

    #(subgroups of type nu)
        = prod_i p^{nu'_{i+1} (mu'_i - nu'_i)}
                 * [mu'_i - nu'_{i+1} choose nu'_i - nu'_{i+1}]_p,

summed over subgroup types of each size and converted to index counts.
A brute-force enumerator (closing subgroups under the group operation,
hard size cap 256) serves as ground truth.  Free products are represented
through their homomorphism-count sequences, which multiply pointwise;
their subgroup counts are recovered by the inverse transform.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping

from . import kernels
from .bounds import partition_case
from .exactcore import check_prime, vp
from .series import ExpSeries, LogSeries, exp_transform

ABELIAN_WEIGHT_CAP = 40
BRUTEFORCE_ORDER_CAP = 256


def conjugate_partition(parts: tuple[int, ...]) -> tuple[int, ...]:
    """Transpose of a weakly decreasing partition."""
    if not parts:
        return ()
    return tuple(sum(1 for a in parts if a >= i) for i in range(1, parts[0] + 1))


def partitions_of(weight: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """All weakly decreasing partitions of the given weight."""
    if weight == 0:
        yield ()
        return
    cap = weight if max_part is None else min(max_part, weight)
    for first in range(cap, 0, -1):
        for rest in partitions_of(weight - first, first):
            yield (first,) + rest


def partitions_fitting(mu: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    """All partitions nu contained in mu (nu_i <= mu_i for every i)."""

    def rec(idx: int, prev: int):
        yield ()
        if idx >= len(mu):
            return
        for part in range(1, min(mu[idx], prev) + 1):
            for tail in rec(idx + 1, part):
                yield (part,) + tail

    yield from rec(0, mu[0] if mu else 0)


@dataclass(frozen=True)
class PartitionType:
    """Type (a_1 >= a_2 >= ... >= a_r >= 1) of an Abelian p-group."""

    parts: tuple[int, ...]
    p: int

    def __post_init__(self):
        check_prime(self.p)
        object.__setattr__(self, "parts", tuple(int(a) for a in self.parts))
        if not self.parts or any(a < 1 for a in self.parts):
            raise ValueError("partition parts must be positive")
        if list(self.parts) != sorted(self.parts, reverse=True):
            raise ValueError("partition parts must be weakly decreasing")

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def rank(self) -> int:
        return len(self.parts)

    @property
    def group_order(self) -> int:
        return self.p**self.weight

    def conjugate(self) -> tuple[int, ...]:
        return conjugate_partition(self.parts)

    def half_weight(self) -> int:
        """A_1 = weight/2 for even weight, A_2 = (weight+1)/2 for odd."""
        return (self.weight + 1) // 2


@dataclass(frozen=True)
class SubgroupCounts:
    """Sparse map index -> number of subgroups of that index; absent = 0."""

    counts: tuple[tuple[int, int], ...]
    group_order: int

    @classmethod
    def from_map(cls, counts: Mapping[int, int], group_order: int) -> "SubgroupCounts":
        items = tuple(sorted((n, c) for n, c in counts.items() if c))
        return cls(items, group_order)

    def s(self, n: int) -> int:
        for idx, c in self.counts:
            if idx == n:
                return c
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.counts)

    def total(self) -> int:
        return sum(c for _, c in self.counts)

    def to_log_series(self, n_max: int) -> LogSeries:
        values = [0] * (n_max + 1)
        for idx, c in self.counts:
            if idx <= n_max:
                values[idx] = c
        return LogSeries(tuple(values[1:]))


def subgroup_type_count(mu: tuple[int, ...], nu: tuple[int, ...], p: int) -> int:
    """Number of subgroups of type nu inside an Abelian p-group of type mu."""
    from .exactcore import gauss_binom_at

    mu_c = conjugate_partition(mu)
    nu_c = conjugate_partition(nu)
    if len(nu_c) > len(mu_c):
        return 0
    total = 1
    for i in range(len(mu_c)):
        mi = mu_c[i]
        ni = nu_c[i] if i < len(nu_c) else 0
        ni1 = nu_c[i + 1] if i + 1 < len(nu_c) else 0
        if ni > mi:
            return 0
        total *= p ** (ni1 * (mi - ni)) * gauss_binom_at(mi - ni1, ni - ni1, p)
    return total


def abelian_subgroup_counts(t: PartitionType) -> SubgroupCounts:
    """s_{p^i} for 0 <= i <= weight via the type-counting formula."""
    if t.weight > ABELIAN_WEIGHT_CAP:
        raise ValueError(f"partition weight cap {ABELIAN_WEIGHT_CAP} exceeded")
    p = t.p
    by_size = [0] * (t.weight + 1)
    for nu in partitions_fitting(t.parts):
        by_size[sum(nu)] += subgroup_type_count(t.parts, nu, p)
    counts = {p ** (t.weight - size): c for size, c in enumerate(by_size)}
    return SubgroupCounts.from_map(counts, t.group_order)


def _addition_table(parts: tuple[int, ...], p: int) -> tuple[int, bytes]:
    """Elements of prod C_{p^{a_i}} encoded 0..order-1, plus the flattened
    sum table (entry i*order + j is the index of i + j)."""
    moduli = [p**a for a in parts]
    order = 1
    for m in moduli:
        order *= m
    decode = []
    for idx in range(order):
        x = []
        rem = idx
        for m in moduli:
            x.append(rem % m)
            rem //= m
        decode.append(tuple(x))
    encode = {x: i for i, x in enumerate(decode)}
    flat = bytearray(order * order)
    for i in range(order):
        base = i * order
        for j in range(order):
            flat[base + j] = encode[
                tuple((a + b) % m for a, b, m in zip(decode[i], decode[j], moduli))
            ]
    return order, bytes(flat)


def abelian_subgroup_counts_bruteforce(t: PartitionType) -> SubgroupCounts:
    """Ground-truth enumeration of every subgroup as an explicit element set.

    Walks the subgroup lattice level by level: each subgroup of order
    p^{k+1} is the closure of a subgroup H of order p^k together with one
    extra element g satisfying p*g in H; duplicate element sets are merged.
    The closure loop itself lives in the kernel backends.
    """
    if t.group_order > BRUTEFORCE_ORDER_CAP:
        raise ValueError(f"group order cap {BRUTEFORCE_ORDER_CAP} exceeded")
    order, add_flat = _addition_table(t.parts, t.p)
    sizes = kernels.subgroup_lattice_sizes(order, t.p, add_flat)
    counts: dict[int, int] = {}
    for size in sizes:
        index = order // size
        counts[index] = counts.get(index, 0) + 1
    return SubgroupCounts.from_map(counts, order)


def cyclic_subgroup_counts(m: int) -> SubgroupCounts:
    """One subgroup per divisor: s_d(C_m) = 1 iff d divides m."""
    if m < 1:
        raise ValueError("cyclic order must be positive")
    return SubgroupCounts.from_map({d: 1 for d in range(1, m + 1) if m % d == 0}, m)


def dihedral_subgroup_counts(m: int) -> SubgroupCounts:
    """Subgroup counts of the dihedral group of order 2m.

    For m >= 3: s_d = d for odd divisors d of 2m, 1 + d for even divisors,
    0 otherwise.  The degenerate m = 1, 2 (Abelian) route to the
    brute-force oracle instead, where the closed formula over-counts.
    """
    if m < 1:
        raise ValueError("dihedral order parameter must be positive")
    if m <= 2:
        parts = (1,) if m == 1 else (1, 1)
        return abelian_subgroup_counts_bruteforce(PartitionType(parts, 2))
    counts = {}
    for d in range(1, 2 * m + 1):
        if (2 * m) % d:
            continue
        counts[d] = d if d % 2 else 1 + d
    return SubgroupCounts.from_map(counts, 2 * m)


@dataclass(frozen=True)
class CaseClassification:
    """Which bound family applies to an Abelian type, with its parameters."""

    case: str  # "I", "II", "III"
    l: int
    m: int
    step: int  # p^l
    half: int | None  # A_1 (case II) or A_2 (case III)
    p2_exception: bool  # p = 2 case II, routed to the improved bound


def classify_abelian_case(t: PartitionType) -> CaseClassification:
    case, l, m = partition_case(t.parts)
    half = None
    if case == "II":
        half = t.weight // 2
    elif case == "III":
        half = (t.weight + 1) // 2
    return CaseClassification(
        case, l, m, t.p**l, half, case == "II" and t.p == 2
    )


@dataclass
class DiffProfileReport:
    """Outcome of the difference/symmetry structure checks on s_{p^i}."""

    failures: list[str]
    checks: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures


def difference_valuation_profile(c: SubgroupCounts, t: PartitionType) -> DiffProfileReport:
    """Verify the valuation profile of consecutive differences s_{p^i} - s_{p^{i-1}}.

    With W the weight and differences taken over 0 <= i <= W+1 (counts
    outside the support are zero):

    * v_p = i for 0 <= i <= min(W - a_1, floor(W/2)),
    * zero exactly for W - a_1 + 1 <= i <= a_1, plus i = A_2 for odd W,
    * v_p = W - i + 1 for max(a_1, ceil(W/2)) + 1 <= i <= W + 1,
    * at the case's own index the leading coefficient is -1 mod p,
    * and the symmetry s_{p^i} = s_{p^{W-i}} holds.
    """
    report = DiffProfileReport([])
    p, W, a1 = t.p, t.weight, t.parts[0]

    def sval(i: int) -> int:
        return c.s(p**i) if 0 <= i <= W else 0

    def check(ok: bool, message: str):
        report.checks += 1
        if not ok:
            report.failures.append(message)

    lo_hi = min(W - a1, W // 2)
    for i in range(0, lo_hi + 1):
        check(vp(sval(i) - sval(i - 1), p) == i, f"rising branch at i={i}")
    zero_set = set(range(W - a1 + 1, a1 + 1))
    if W % 2:
        zero_set.add((W + 1) // 2)
    for i in sorted(zero_set):
        check(sval(i) - sval(i - 1) == 0, f"zero plateau at i={i}")
    hi_lo = max(a1, (W + 1) // 2) + 1
    for i in range(hi_lo, W + 2):
        check(vp(sval(i) - sval(i - 1), p) == W - i + 1, f"falling branch at i={i}")

    case, l, _ = partition_case(t.parts)
    i0 = l  # a_1 + 1 / A_1 + 1 / A_2 + 1
    diff = sval(i0) - sval(i0 - 1)
    e = W - i0 + 1
    check(
        diff % p ** (e + 1) == (-(p**e)) % p ** (e + 1),
        f"leading term at i={i0} (case {case})",
    )
    for i in range(0, W + 1):
        check(sval(i) == sval(W - i), f"symmetry at i={i}")
    return report


def free_product_hom(parts: list[ExpSeries]) -> ExpSeries:
    """Pointwise product h_n = prod_i h_n(G_i); truncations must agree."""
    if not parts:
        raise ValueError("free product needs at least one factor series")
    n_max = parts[0].n_max
    if any(q.n_max != n_max for q in parts):
        raise ValueError("mismatched truncations in free product")
    out = list(parts[0].coeffs)
    for q in parts[1:]:
        out = [a * b for a, b in zip(out, q.coeffs)]
    return ExpSeries(tuple(out))


# ---------------------------------------------------------------------------
# group-spec grammar:  A[p;a1,a2,...]  C[m]  D[m]  joined with "*"
# ---------------------------------------------------------------------------

_TERM_RE = re.compile(r"^([ACD])\[([^\]]*)\]$")


@dataclass(frozen=True)
class GroupSpec:
    variant: str  # "abelian" | "cyclic" | "dihedral" | "free-product"
    partition: PartitionType | None = None
    order_param: int | None = None
    factors: tuple["GroupSpec", ...] = ()

    def canonical(self) -> str:
        if self.variant == "abelian":
            parts = ",".join(str(a) for a in self.partition.parts)
            return f"A[{self.partition.p};{parts}]"
        if self.variant == "cyclic":
            return f"C[{self.order_param}]"
        if self.variant == "dihedral":
            return f"D[{self.order_param}]"
        return "*".join(sorted(f.canonical() for f in self.factors))

    def is_free_product(self) -> bool:
        return self.variant == "free-product"


def _parse_term(text: str) -> GroupSpec:
    m = _TERM_RE.match(text)
    if not m:
        raise ValueError(f"malformed group term {text!r}")
    head, body = m.groups()
    if head == "A":
        try:
            p_str, parts_str = body.split(";")
            p = int(p_str)
            parts = tuple(sorted((int(x) for x in parts_str.split(",")), reverse=True))
        except ValueError as exc:
            raise ValueError(f"malformed abelian term {text!r}") from exc
        return GroupSpec("abelian", partition=PartitionType(parts, p))
    try:
        order = int(body)
    except ValueError as exc:
        raise ValueError(f"malformed group term {text!r}") from exc
    if order < 1:
        raise ValueError(f"group order parameter must be positive in {text!r}")
    return GroupSpec("cyclic" if head == "C" else "dihedral", order_param=order)


def parse_group_spec(text: str) -> GroupSpec:
    pieces = [piece.strip() for piece in text.split("*")]
    if any(not piece for piece in pieces):
        raise ValueError(f"malformed group spec {text!r}")
    terms = [_parse_term(piece) for piece in pieces]
    if len(terms) == 1:
        return terms[0]
    return GroupSpec("free-product", factors=tuple(terms))


def finite_subgroup_counts(spec: GroupSpec) -> SubgroupCounts:
    """Subgroup counts of a single finite group (not a free product)."""
    if spec.variant == "abelian":
        return abelian_subgroup_counts(spec.partition)
    if spec.variant == "cyclic":
        return cyclic_subgroup_counts(spec.order_param)
    if spec.variant == "dihedral":
        return dihedral_subgroup_counts(spec.order_param)
    raise ValueError("free products have no finite subgroup-count table")


@lru_cache(maxsize=256)
def _factor_hom_ints(canonical: str, n_max: int) -> tuple[int, ...]:
    spec = parse_group_spec(canonical)
    counts = finite_subgroup_counts(spec)
    svals = [0] * (n_max + 1)
    for idx, cval in counts.counts:
        if idx <= n_max:
            svals[idx] = cval
    return tuple(kernels.hall_exp(svals, n_max))


def hom_count_ints(spec: GroupSpec, n_max: int) -> list[int]:
    """h_0..h_{n_max} of the group as plain integers."""
    factors = spec.factors if spec.is_free_product() else (spec,)
    out = list(_factor_hom_ints(factors[0].canonical(), n_max))
    for factor in factors[1:]:
        other = _factor_hom_ints(factor.canonical(), n_max)
        out = [a * b for a, b in zip(out, other)]
    return out


def hom_count_ints_mod(spec: GroupSpec, n_max: int, modulus: int) -> list[int]:
    """h_0..h_{n_max} reduced modulo ``modulus`` (division-free, so exact)."""
    factors = spec.factors if spec.is_free_product() else (spec,)
    out = None
    for factor in factors:
        counts = finite_subgroup_counts(factor)
        svals = [0] * (n_max + 1)
        for idx, cval in counts.counts:
            if idx <= n_max:
                svals[idx] = cval
        h = kernels.hall_exp_mod(svals, n_max, modulus)
        out = h if out is None else [a * b % modulus for a, b in zip(out, h)]
    return out


def hom_count_series(spec: GroupSpec, n_max: int) -> ExpSeries:
    return ExpSeries(tuple(hom_count_ints(spec, n_max)))


def subgroup_count_series(spec: GroupSpec, n_max: int) -> LogSeries:
    """s_1..s_{n_max}; for free products recovered by the inverse transform."""
    if not spec.is_free_product():
        return finite_subgroup_counts(spec).to_log_series(n_max)
    s = kernels.hall_log(hom_count_ints(spec, n_max))
    return LogSeries(tuple(s[1:]))


def subgroup_residues_mod_p(spec: GroupSpec, n_max: int, p: int) -> list[int]:
    """s_n mod p for 0 <= n <= n_max, via capped p-adic precision.

    Matches `subgroup_count_series` exactly (cross-checked in the tests)
    while keeping every intermediate value below p**C with
    C = `kernels.log_residue_precision(n_max, p)`.
    """
    check_prime(p)
    modulus = p ** kernels.log_residue_precision(n_max, p)
    h = hom_count_ints_mod(spec, n_max, modulus)
    return kernels.hall_log_mod_residues(h, p, n_max)


# ---------------------------------------------------------------------------
# count export: one "n value" line per index, ascending
# ---------------------------------------------------------------------------


def dump_counts(c: SubgroupCounts) -> str:
    return "".join(f"{n} {value}\n" for n, value in c.counts)


def load_counts(text: str, group_order: int) -> SubgroupCounts:
    counts = {}
    for ln in text.splitlines():
        if not ln.strip():
            continue
        n_str, v_str = ln.split()
        counts[int(n_str)] = int(v_str)
    return SubgroupCounts.from_map(counts, group_order)
