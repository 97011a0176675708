"""Shared oracles and generators for the test suite.

These deliberately avoid the library's own recurrences: the polynomial
exponential multiplies out sum S^k / k! term by term, the involution
recurrence is the classical two-term one, and the series repair acts on
raw coefficient lists.
"""

from __future__ import annotations

from fractions import Fraction

from dworklab.kernels import vp_int


def poly_mul_trunc(a: list[Fraction], b: list[Fraction], n_max: int) -> list[Fraction]:
    out = [Fraction(0)] * (n_max + 1)
    for i, ai in enumerate(a):
        if ai == 0 or i > n_max:
            continue
        for j, bj in enumerate(b):
            if i + j > n_max:
                break
            if bj:
                out[i + j] += ai * bj
    return out


def poly_exp_oracle(svals: list) -> list[Fraction]:
    """h_0..h_N from s_1..s_N by expanding exp(S) = sum_k S(z)^k / k!.

    ``svals`` is indexed by position (entry 0 ignored).  Independent of
    the production recurrence.
    """
    n_max = len(svals) - 1
    series = [Fraction(0)] * (n_max + 1)
    for i in range(1, n_max + 1):
        series[i] = Fraction(svals[i]) / i
    total = [Fraction(0)] * (n_max + 1)
    total[0] = Fraction(1)
    power = total[:]
    kfact = 1
    for k in range(1, n_max + 1):
        power = poly_mul_trunc(power, series, n_max)
        kfact *= k
        for idx in range(n_max + 1):
            if power[idx]:
                total[idx] += power[idx] / kfact
    fact = 1
    out = []
    for n in range(n_max + 1):
        out.append(total[n] * fact)
        fact *= n + 1
    return out


def involution_oracle(n_max: int) -> list[int]:
    """Counts of involutions in S_n via i_n = i_{n-1} + (n-1) i_{n-2}."""
    vals = [1, 1]
    for n in range(2, n_max + 1):
        vals.append(vals[n - 1] + (n - 1) * vals[n - 2])
    return vals[: n_max + 1]


def repaired_integer_series(rng, p: int, n_max: int, depth: int, magnitude: int = 40) -> list[int]:
    """Random integer coefficients with the gap series made p-integral
    through z^depth: for p | j <= depth, force s_j = s_{j/p} mod p^{v_p(j)}."""
    s = [0] * (n_max + 1)
    for n in range(1, n_max + 1):
        s[n] = rng.randint(-magnitude, magnitude)
    for j in range(1, min(depth, n_max) + 1):
        if j % p == 0:
            s[j] = s[j // p] + p ** vp_int(j, p) * rng.randint(-magnitude, magnitude)
    return s


def naive_vp(x: int, p: int) -> int:
    v = 0
    x = abs(x)
    while x and x % p == 0:
        v += 1
        x //= p
    return v
