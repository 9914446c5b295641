"""The generalized Buchstab function Omega_K and its reciprocal.

For a class parameter K > 0 (permutations K=1; 2-regular graphs and
surjections K=1/2) define

    Omega_K(x) = 1                                        1 <= x < 2
    Omega_K(x) = 1 + K * integral_2^x Omega_K(u-1)/(u-1) du,   x >= 2.

1/Omega_K(x) is the limiting proportion of objects whose smallest
component is large (at least a 1/x fraction of the object).

Taylor blocks mirror the plain Buchstab ledger: on [n, n+1) write
Omega_K(n + (1+z)/2) = sum_i c[n, i] z^i.  Block 1 is constant 1.
Block 2 comes from the exact closed form Omega_K = 1 + K ln(x-1) on
[2, 3): c[2, 0] = 1 + K ln(3/2) and c[2, i] = K (-1)^(i-1) / (i 3^i).
For n >= 3 the defining integral gives, with the finite convolution

    alpha_i = sum_{j=0}^{i} (-1)^(i-j) (2n-1)^-(i-j) c[n-1, j],

the advance rules c[n, i] = K alpha_{i-1} / ((2n-1) i) for i >= 1 and
c[n, 0] = sum_i c[n-1, i] - (K/(2n-1)) sum_i (-1)^(i+1) alpha_i/(i+1),
which make the blocks join continuously at the knots.

``oracle_quadrature`` solves the defining integral equation directly by
the method of steps with composite Simpson quadrature on a per-interval
dyadic grid (unit-interval prefix integrals are memoized).  It never
touches the Taylor blocks, so it serves as an independent oracle for
them.  A naive point-recursive quadrature would cost O(3^x); the
method-of-steps grid is linear in x and is what keeps x <= 30 cheap.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from decimal import Context, Decimal, localcontext
from typing import Dict, List, Sequence, Tuple

from .numerics import DEFAULT_PRECISION, as_real, context
from .omega import LedgerRangeError, TruncationWarning, DEFAULT_TARGET_DIGITS

__all__ = [
    "OmegaKBlock",
    "OmegaKLedger",
    "seed_block1",
    "seed_block2",
    "alpha_vector",
    "advance_omega_k",
    "eval_omega_k",
    "proportion_large_smallest",
    "oracle_quadrature",
    "table_values",
    "PAPER_TABLE_GRID",
    "DEFAULT_MAX_INTERVAL",
]

DEFAULT_MAX_INTERVAL = 16384

# Reference evaluation grid used by the table command: 1..10 and the
# powers of two 16..8192.
PAPER_TABLE_GRID: Tuple[int, ...] = tuple(range(1, 11)) + tuple(
    2 ** e for e in range(4, 14)
)


@dataclass(frozen=True)
class OmegaKBlock:
    """Taylor coefficients of Omega_K on [n, n+1) in z = 2(x-n) - 1."""

    n: int
    coeffs: Tuple[Decimal, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def eval(self, z: Decimal, ctx: Context) -> Decimal:
        acc = Decimal(0)
        for c in reversed(self.coeffs):
            acc = ctx.add(ctx.multiply(acc, z), c)
        return acc

    def boundary_sum(self, ctx: Context) -> Decimal:
        s = Decimal(0)
        for c in self.coeffs:
            s = ctx.add(s, c)
        return s


def seed_block1(J: int = 40, p: int = DEFAULT_PRECISION) -> OmegaKBlock:
    """Block 1: Omega_K = 1 on [1, 2)."""
    context(p)  # validate p
    return OmegaKBlock(1, (Decimal(1),) + (Decimal(0),) * J)


def seed_block2(K, J: int = 40, p: int = DEFAULT_PRECISION) -> OmegaKBlock:
    """Block 2 from the closed form 1 + K ln(x-1) on [2, 3).

    With x = 2 + (1+z)/2, ln(x-1) = ln(3/2) + ln(1 + z/3), whose series
    gives the coefficients directly.
    """
    ctx = context(p)
    Kd = as_real(K, p)
    if Kd <= 0:
        raise ValueError(f"class parameter K must be > 0, got {Kd}")
    with localcontext(ctx):
        c0 = 1 + Kd * (Decimal(3) / Decimal(2)).ln()
        coeffs = [c0]
        for i in range(1, J + 1):
            coeffs.append(Kd * Decimal((-1) ** (i - 1)) / Decimal(i * 3 ** i))
    return OmegaKBlock(2, tuple(coeffs))


def alpha_vector(prev: OmegaKBlock, n: int, p: int = DEFAULT_PRECISION
                 ) -> Tuple[Decimal, ...]:
    """alpha_i = sum_{j<=i} (-1)^(i-j) (2n-1)^-(i-j) c[n-1, j] for i = 0..J."""
    if n < 3:
        raise ValueError(f"alpha vector is defined for target blocks n >= 3, got {n}")
    J = prev.degree
    with localcontext(context(p)):
        q = Decimal(-1) / Decimal(2 * n - 1)
        powers = [Decimal(1)]
        for _ in range(J):
            powers.append(powers[-1] * q)
        c = prev.coeffs
        alpha = tuple(
            sum((powers[i - j] * c[j] for j in range(i + 1)), Decimal(0))
            for i in range(J + 1)
        )
    return alpha


def advance_omega_k(prev: OmegaKBlock, K, p: int = DEFAULT_PRECISION, *,
                    target_digits: int = DEFAULT_TARGET_DIGITS) -> OmegaKBlock:
    """Derive block n = prev.n + 1 (n >= 3) from the alpha convolution."""
    n = prev.n + 1
    if n < 3:
        raise ValueError("advance applies from block 2 onward; use the seeds below 3")
    J = prev.degree
    Kd = as_real(K, p)
    alpha = alpha_vector(prev, n, p)
    with localcontext(context(p)):
        m = Decimal(2 * n - 1)
        s_prev = Decimal(0)
        for c in prev.coeffs:
            s_prev += c
        s_alpha = Decimal(0)
        for i, a in enumerate(alpha):
            s_alpha += Decimal((-1) ** (i + 1)) * a / Decimal(i + 1)
        c0 = s_prev - Kd / m * s_alpha
        coeffs = [c0]
        for i in range(1, J + 1):
            coeffs.append(Kd * alpha[i - 1] / (m * Decimal(i)))
    if abs(coeffs[J]) >= Decimal(1).scaleb(-(target_digits + 2)):
        warnings.warn(
            f"block {n}: |c[J]| = {coeffs[J]:.2e} exceeds "
            f"1e-{target_digits + 2}; increase the Taylor degree",
            TruncationWarning,
            stacklevel=2,
        )
    return OmegaKBlock(n, tuple(coeffs))


class OmegaKLedger:
    """Lazily grown chain of Omega_K blocks for one value of K.

    Blocks are appended sequentially up to the largest requested x and
    then reused; finished blocks are never mutated.
    """

    def __init__(self, K, J: int = 40, p: int = DEFAULT_PRECISION, *,
                 max_interval: int = DEFAULT_MAX_INTERVAL):
        self.K = as_real(K, p)
        if self.K <= 0:
            raise ValueError(f"class parameter K must be > 0, got {self.K}")
        self.J = J
        self.p = p
        self.max_interval = max_interval
        self._blocks: List[OmegaKBlock] = [
            None,  # type: ignore[list-item]
            seed_block1(J, p),
            seed_block2(self.K, J, p),
        ]

    @property
    def built_through(self) -> int:
        return len(self._blocks) - 1

    def ensure(self, n: int) -> None:
        if n > self.max_interval:
            raise LedgerRangeError(
                f"block {n} beyond the configured ledger limit {self.max_interval}"
            )
        while self.built_through < n:
            self._blocks.append(
                advance_omega_k(self._blocks[-1], self.K, self.p)
            )

    def block(self, n: int) -> OmegaKBlock:
        if n < 1:
            raise LedgerRangeError(f"block index must be >= 1, got {n}")
        self.ensure(n)
        return self._blocks[n]


def eval_omega_k(ledger: OmegaKLedger, x) -> Decimal:
    """Omega_K(x) for x >= 1 (blocks grown on demand)."""
    p = ledger.p
    ctx = context(p)
    xd = as_real(x, p)
    if xd < 1:
        raise LedgerRangeError(f"Omega_K is defined on [1, inf), got {xd}")
    n = int(xd)
    block = ledger.block(n)
    z = ctx.subtract(ctx.multiply(Decimal(2), ctx.subtract(xd, Decimal(n))), Decimal(1))
    return block.eval(z, ctx)


def proportion_large_smallest(ledger: OmegaKLedger, x) -> Decimal:
    """1/Omega_K(x): limiting share of objects with a large smallest part."""
    p = ledger.p
    xd = as_real(x, p)
    if xd <= 1:
        raise LedgerRangeError(f"proportion defined for x > 1, got {xd}")
    return context(p).divide(Decimal(1), eval_omega_k(ledger, xd))


def table_values(ledger: OmegaKLedger, xs: Sequence) -> List[Tuple[Decimal, Decimal]]:
    """Rows (x, Omega_K(x)) for the given evaluation points."""
    return [(as_real(x, ledger.p), eval_omega_k(ledger, x)) for x in xs]


# ---------------------------------------------------------------------------
# Independent oracle: direct numerical solution of the integral equation
# ---------------------------------------------------------------------------

ORACLE_MAX_X = 30
ORACLE_MIN_TOL = Decimal("1e-12")
_SNAP_BITS = 52  # query points snapped to this dyadic depth


def oracle_quadrature(K, x, tol) -> Decimal:
    """Omega_K(x) from the defining integral equation, |error| < tol.

    Method of steps: the integrand Omega_K(u-1)/(u-1) is tabulated on a
    dyadic grid of each unit interval, with grid level chosen from tol
    (composite-Simpson error O(h^4) plus the error amplification factor
    of the integral recursion); unit-interval prefix integrals are
    memoized, and the final partial cell is integrated via a cubic
    through the four nearest grid values.  Requires 1 <= x <= 30 and
    tol >= 1e-12.
    """
    import math

    tol_d = as_real(tol, DEFAULT_PRECISION)
    if tol_d < ORACLE_MIN_TOL:
        raise ValueError(f"oracle tolerance must be >= 1e-12, got {tol_d}")
    xf = float(as_real(x, DEFAULT_PRECISION))
    if not 1 <= xf <= ORACLE_MAX_X:
        raise ValueError(f"oracle domain is 1 <= x <= {ORACLE_MAX_X}, got {x}")
    p = 35
    ctx = context(p)
    Kd = as_real(K, p)
    if Kd <= 0:
        raise ValueError(f"class parameter K must be > 0, got {Kd}")
    if xf < 2:
        return Decimal(1)

    # Error amplification through the recursion is below (x-1)^K * e;
    # split tol across the quadrature of at most ceil(x) intervals.
    Kf = float(Kd)
    amp = math.e * max(xf - 1.0, 1.0) ** Kf
    tau_unit = float(tol_d) / (2.0 * amp * (int(xf) + 1))
    # composite Simpson: per-unit error ~ B4 * h^4 / 180 <= tau_unit
    B4 = 64.0 * max(1.0, Kf) ** 2
    h_target = (tau_unit * 180.0 / B4) ** 0.25
    level = max(8, min(16, math.ceil(-math.log2(h_target))))
    cells = 1 << level

    with localcontext(ctx):
        step = Decimal(1) / Decimal(cells)

        # omega_vals[m][j] = Omega_K(m + j/cells); prefix[m][j] = integral of
        # f over [m, m + j/cells] with f(u) = Omega_K(u-1)/(u-1).
        omega_rows: Dict[int, List[Decimal]] = {
            1: [Decimal(1)] * (cells + 1)
        }

        def row(m: int) -> List[Decimal]:
            got = omega_rows.get(m)
            if got is not None:
                return got
            prev = row(m - 1)
            base = prev[cells]
            f = [prev[j] / (Decimal(m - 1) + Decimal(j) * step) for j in range(cells + 1)]
            # prefix integrals: Simpson over even cell pairs, cubic cell for odd ends
            pref = [Decimal(0)] * (cells + 1)
            for j in range(2, cells + 1, 2):
                pref[j] = pref[j - 2] + step / 3 * (f[j - 2] + 4 * f[j - 1] + f[j])
            c24 = 24 * cells
            for j in range(1, cells + 1, 2):
                # integral over one cell [j-1, j] via a cubic stencil
                if j >= 3:
                    cell = (f[j - 3] - 5 * f[j - 2] + 19 * f[j - 1] + 9 * f[j]) / c24
                else:
                    cell = (9 * f[j - 1] + 19 * f[j] - 5 * f[j + 1] + f[j + 2]) / c24
                pref[j] = pref[j - 1] + cell
            vals = [base + Kd * pref[j] for j in range(cells + 1)]
            omega_rows[m] = vals
            return vals

        n = int(xf)
        frac = as_real(x, p) - Decimal(n)
        if n >= ORACLE_MAX_X:
            n, frac = n - 1, frac + 1  # x == 30 lands on the last row's end
        vals = row(n)
        if frac == 0:
            return +vals[0]
        # snap the fractional part to the dyadic lattice, then split into
        # whole cells plus a partial cell handled by cubic interpolation
        snapped = int((frac * (1 << _SNAP_BITS)).to_integral_value())
        j_full, rem = divmod(snapped, 1 << (_SNAP_BITS - level))
        result = vals[j_full]
        if rem:
            t = Decimal(rem) / Decimal(1 << (_SNAP_BITS - level))  # in (0, 1)
            jj = min(max(j_full, 1), cells - 2)

            base_row = row(n - 1)

            def fv(idx: int) -> Decimal:
                return base_row[idx] / (Decimal(n) + Decimal(idx) * step - 1)

            f0, f1, f2, f3 = (fv(jj - 1), fv(jj), fv(jj + 1), fv(jj + 2))
            # Newton forward cubic based at node jj-1, integrated over
            # [j_full, j_full + t] cells
            d1 = f1 - f0
            d2 = f2 - 2 * f1 + f0
            d3 = f3 - 3 * f2 + 3 * f1 - f0
            a = Decimal(j_full - jj)
            s0 = a + t

            def antideriv(s: Decimal) -> Decimal:
                u = s + 1  # cells measured from the stencil base jj-1
                return (f0 * u + d1 * u * u / 2 + d2 * (u ** 3 / 3 - u * u / 2) / 2
                        + d3 * (u ** 4 / 4 - u ** 3 + u * u) / 6)

            seg = (antideriv(s0) - antideriv(a)) * step
            result = result + Kd * seg
        return +result
