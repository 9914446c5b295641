"""Exact enumeration of smallest-component sizes.

Let s(k, n) be the number of labelled objects of size n whose smallest
irreducible component has exactly k elements; for permutations the
components are cycles and s(n, n) = (n-1)!.  With c_k components of
size k (c_k = (k-1)! for permutations), the counts satisfy

    s(k, n) = sum_{i=1}^{floor(n/k)} (c_k^i / i!) * n! / ((k!)^i (n-ki)!)
              * sum_{j=k+1}^{n-ki} s(j, n-ki)
            + [k | n] * (c_k^(n/k) / (n/k)!) * n! / (k!)^(n/k)

The inner sum over j is a suffix sum of an earlier row, so each row is
stored as its suffix-sum array: row n keeps T(k, n) = sum_{j>=k} s(j, n)
for k = 1..n+1.  This makes each cell cost O(n/k) big-integer operations
and lets tail probabilities be read off directly.  Cells are recovered
by differencing two adjacent suffix entries.

Structural facts used as invariants: s(n, n) = c_n, s(k, n) = 0 for
floor(n/2)+1 <= k <= n-1, and for permutations rows sum to n!.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Tuple

from decimal import Decimal

from .numerics import DEFAULT_PRECISION, factorial, rational_to_real

__all__ = [
    "MemoryCapError",
    "ComponentClass",
    "PERMUTATIONS",
    "DERANGEMENTS",
    "component_class_by_name",
    "CountTable",
    "SmallestDistribution",
    "MomentReport",
    "build_table",
    "distribution",
    "tail_probability",
    "moment",
    "variance",
    "variance_series",
    "brute_force_counts",
    "estimate_table_bytes",
]

DEFAULT_MEMORY_CAP = 2 << 30  # 2 GiB

BRUTE_FORCE_LIMIT = 8  # 8! = 40320 permutations, enumerable directly


class MemoryCapError(MemoryError):
    """Estimated table size exceeds the configured cap."""


@dataclass(frozen=True)
class ComponentClass:
    """A labelled class given by its per-size component counts c_k.

    Only the permutation instance carries probability semantics (its
    rows sum to n!); other weight maps yield raw counts only.
    """

    name: str
    weight: Callable[[int], int]

    def c(self, k: int) -> int:
        w = self.weight(k)
        if w < 0:
            raise ValueError(f"component weight must be >= 0, got c_{k} = {w}")
        return w


PERMUTATIONS = ComponentClass("permutations", lambda k: factorial(k - 1))
DERANGEMENTS = ComponentClass(
    "derangements", lambda k: 0 if k == 1 else factorial(k - 1)
)

_BUILTIN_CLASSES = {c.name: c for c in (PERMUTATIONS, DERANGEMENTS)}


def component_class_by_name(name: str) -> ComponentClass:
    try:
        return _BUILTIN_CLASSES[name]
    except KeyError:
        raise ValueError(
            f"unknown component class {name!r}; available: "
            f"{sorted(_BUILTIN_CLASSES)}"
        ) from None


def estimate_table_bytes(N: int) -> int:
    """Rough upper estimate of suffix-table memory for size N.

    Row n holds n+2 integers of at most lg(n!) bits; CPython stores ints
    in 30-bit digits with ~28 bytes of object overhead.
    """
    total = 0
    for n in range(1, N + 1):
        bits = math.lgamma(n + 1) / math.log(2) + 1
        total += (n + 2) * (28 + 4 * (int(bits) // 30 + 1))
    return total


class CountTable:
    """Triangular table of exact smallest-component counts up to size N.

    Rows are stored as suffix sums; ``cell``/``row`` difference adjacent
    entries.  Instances are immutable after construction and safe to
    share between threads.
    """

    def __init__(self, klass: ComponentClass, N: int, suffix_rows: List[List[int]],
                 factorials: List[int]):
        self.klass = klass
        self.N = N
        self._suffix = suffix_rows
        self._fact = factorials

    def suffix(self, n: int, k: int) -> int:
        """sum_{j>=k} s(j, n) for 1 <= k <= n+1."""
        self._check_n(n)
        if not 1 <= k <= n + 1:
            raise IndexError(f"k={k} out of range 1..{n + 1}")
        return self._suffix[n][k]

    def cell(self, n: int, k: int) -> int:
        """s(k, n): objects of size n with smallest component exactly k."""
        self._check_n(n)
        if not 1 <= k <= n:
            raise IndexError(f"k={k} out of range 1..{n}")
        row = self._suffix[n]
        return row[k] - row[k + 1]

    def row(self, n: int) -> List[int]:
        """[s(1, n), ..., s(n, n)]."""
        self._check_n(n)
        row = self._suffix[n]
        return [row[k] - row[k + 1] for k in range(1, n + 1)]

    def total(self, n: int) -> int:
        """Number of objects of size n (n! for permutations)."""
        self._check_n(n)
        return self._suffix[n][1]

    def factorial(self, n: int) -> int:
        return self._fact[n]

    def _check_n(self, n: int) -> None:
        if not 1 <= n <= self.N:
            raise IndexError(f"n={n} out of range 1..{self.N}")

    def _require_permutations(self, what: str) -> None:
        if self.klass.name != PERMUTATIONS.name:
            raise ValueError(
                f"{what} is defined only for the permutations class "
                f"(probability normalisation by n!), not {self.klass.name!r}"
            )


def build_table(klass: ComponentClass = PERMUTATIONS, N: int = 100, *,
                memory_cap: int = DEFAULT_MEMORY_CAP) -> CountTable:
    """Build the exact count table for sizes 1..N.

    Construction is sequential in n (row n reads suffix sums of rows
    below); a finished table is immutable.  Raises MemoryCapError when
    the size estimate exceeds ``memory_cap`` bytes.
    """
    if N < 1:
        raise ValueError(f"table size must be >= 1, got {N}")
    est = estimate_table_bytes(N)
    if est > memory_cap:
        raise MemoryCapError(
            f"estimated table size {est / 2**20:.0f} MiB exceeds cap "
            f"{memory_cap / 2**20:.0f} MiB (N={N})"
        )

    fact = [1] * (N + 1)
    for j in range(1, N + 1):
        fact[j] = fact[j - 1] * j

    # Per-size reduced weight a_k / b_k = c_k / k!; for permutations this
    # collapses to 1/k, which keeps the per-term integers small.
    reduced: List[Tuple[int, int]] = [(0, 1)] * (N + 1)
    for k in range(1, N + 1):
        ck = klass.c(k)
        g = math.gcd(ck, fact[k]) if ck else fact[k]
        reduced[k] = (ck // g if ck else 0, fact[k] // g)

    suffix_rows: List[List[int]] = [[]] * (N + 1)
    for n in range(1, N + 1):
        cells = [0] * (n + 2)
        fn = fact[n]
        for k in range(1, n // 2 + 1):
            a, b = reduced[k]
            if a == 0:
                continue
            acc = 0
            apow = 1
            bpow = 1
            for i in range(1, n // k + 1):
                apow *= a
                bpow *= b
                m = n - k * i
                if m == 0:
                    # all elements in components of size k (k divides n)
                    acc += fn * apow // (bpow * fact[i])
                elif m >= k + 1:
                    tail = suffix_rows[m][k + 1]
                    if tail:
                        acc += tail * (fn * apow // (bpow * fact[i] * fact[m]))
            cells[k] = acc
        cells[n] = klass.c(n)  # single component of full size

        suf = [0] * (n + 2)
        for k in range(n, 0, -1):
            suf[k] = suf[k + 1] + cells[k]
        suf[0] = suf[1]
        suffix_rows[n] = suf

    return CountTable(klass, N, suffix_rows, fact)


@dataclass(frozen=True)
class SmallestDistribution:
    """Exact law of the smallest-component size at a fixed object size."""

    n: int
    probs: Tuple[Fraction, ...]  # index k-1 holds P{X_n = k}

    def prob(self, k: int) -> Fraction:
        if not 1 <= k <= self.n:
            raise IndexError(f"k={k} out of range 1..{self.n}")
        return self.probs[k - 1]


@dataclass(frozen=True)
class MomentReport:
    """Exact first two moments and variance of the smallest-component size."""

    n: int
    mean: Fraction
    second_moment: Fraction
    variance: Fraction
    variance_over_n: Decimal


def distribution(table: CountTable, n: int) -> SmallestDistribution:
    """P{X_n = k} = s(k, n) / n! as exact rationals summing to 1."""
    table._require_permutations("distribution")
    table._check_n(n)
    fn = table.factorial(n)
    probs = tuple(Fraction(c, fn) for c in table.row(n))
    return SmallestDistribution(n, probs)


def tail_probability(table: CountTable, n: int, k: int) -> Fraction:
    """P{X_n >= k}, read from the cached suffix sums."""
    table._require_permutations("tail_probability")
    table._check_n(n)
    if not 1 <= k <= n:
        raise IndexError(f"k={k} out of range 1..{n}")
    return Fraction(table.suffix(n, k), table.factorial(n))


def moment(table: CountTable, n: int, ell: int) -> Fraction:
    """Exact ell-th moment sum_k k^ell P{X_n = k}."""
    table._require_permutations("moment")
    table._check_n(n)
    if ell < 1:
        raise ValueError(f"moment order must be >= 1, got {ell}")
    num = sum(k ** ell * c for k, c in enumerate(table.row(n), start=1))
    return Fraction(num, table.factorial(n))


def variance(table: CountTable, n: int, *, p: int = DEFAULT_PRECISION) -> MomentReport:
    """Exact variance (n! * sum k^2 s - (sum k s)^2) / (n!)^2 of X_n."""
    table._require_permutations("variance")
    table._check_n(n)
    row = table.row(n)
    s1 = sum(k * c for k, c in enumerate(row, start=1))
    s2 = sum(k * k * c for k, c in enumerate(row, start=1))
    fn = table.factorial(n)
    mean = Fraction(s1, fn)
    second = Fraction(s2, fn)
    var = Fraction(fn * s2 - s1 * s1, fn * fn)
    return MomentReport(n, mean, second, var, rational_to_real(var / n, p))


def variance_series(table: CountTable, *, p: int = DEFAULT_PRECISION
                    ) -> List[Tuple[int, Fraction, Decimal]]:
    """(n, Var(X_n), Var(X_n)/n) for every n = 1..N."""
    table._require_permutations("variance_series")
    out = []
    for n in range(1, table.N + 1):
        rep = variance(table, n, p=p)
        out.append((n, rep.variance, rep.variance_over_n))
    return out


def brute_force_counts(n: int) -> List[int]:
    """Smallest-cycle tallies by direct enumeration of all n! permutations.

    Independent oracle for the recurrence: walks every permutation's
    cycle structure, never touching the counting formula.
    """
    if not 1 <= n <= BRUTE_FORCE_LIMIT:
        raise ValueError(
            f"brute force enumeration limited to 1 <= n <= {BRUTE_FORCE_LIMIT}"
        )
    from itertools import permutations as iter_permutations

    tally = [0] * (n + 1)
    for perm in iter_permutations(range(n)):
        seen = [False] * n
        smallest = n + 1
        for start in range(n):
            if not seen[start]:
                length = 0
                j = start
                while not seen[j]:
                    seen[j] = True
                    j = perm[j]
                    length += 1
                if length < smallest:
                    smallest = length
        tally[smallest] += 1
    return tally[1:]
