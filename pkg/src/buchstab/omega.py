"""The Buchstab function via chained per-interval Taylor expansions.

omega is defined by omega(x) = 1/x on [1, 2] together with the delay
equation d(x*omega(x))/dx = omega(x-1) for x >= 2; it tends to
exp(-gamma) = 0.5614594835... and governs tail probabilities of
smallest components (P{X_n >= k} ~ omega(n/k)/k).

On each unit interval [n, n+1) write x = n + (1+z)/2 with z in [-1, 1)
and expand

    omega(n + (1+z)/2) = sum_i c[n, i] z^i.

Block 1 is the geometric series of 1/x about x = 1.5:
c[1, i] = (2/3) (-1/3)^i.  Integrating the delay equation across one
interval and matching powers of z gives the advance rules

    c[n+1, 0] = (1/(2n+3)) sum_i c[n, i] (2(n+1) + (-1)^i / (i+1))
    c[n+1, i] = (c[n, i-1]/i - c[n+1, i-1]) / (2n+3),   i >= 1,

the second computed in increasing i.  (Only this form reproduces the
closed form (1 + ln(x-1))/x on [2, 3].)  The centred variable keeps
coefficient decay fast near both interval ends.

Moment constants ell * integral_1^inf omega(x)/x^ell dx are assembled
from an exact first-interval integral (for ell = 2 the first interval
contributes exactly 3/4 to the variance constant C), trapezoidal
quadrature of the Taylor blocks with step 2^-grid_log2 on [2, n*], and
the analytic tail ell * exp(-gamma) * n*^(1-ell) / (ell-1), whose error
is capped by the classical |omega(x) - exp(-gamma)| < 1e-4 band for
x > 4.  Defaults (p=30, J=40, grid_log2=12, n*=200) give the constant
C = 1.30721... with an error budget around 1e-8.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from decimal import Context, Decimal, localcontext
from fractions import Fraction
from typing import List, Tuple

from .numerics import DEFAULT_PRECISION, as_real, context, exp_neg_gamma

__all__ = [
    "LedgerRangeError",
    "TruncationWarning",
    "QuadratureConfig",
    "OmegaBlock",
    "OmegaLedger",
    "MomentConstant",
    "seed_omega",
    "advance_omega",
    "build_omega_ledger",
    "eval_omega",
    "integrate_block",
    "moment_constant",
]

# Coefficients below this size cannot hurt the stated acceptance
# tolerances; used as the default truncation alarm threshold exponent.
DEFAULT_TARGET_DIGITS = 12


class LedgerRangeError(ValueError):
    """Evaluation point outside the ledger's covered interval."""


class TruncationWarning(UserWarning):
    """Taylor degree J too small for the requested target precision."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Grid, truncation and precision parameters for omega work.

    grid_log2    trapezoid step is 2**-grid_log2
    max_interval last Taylor block n* (tail handled analytically)
    taylor_degree J, the per-block truncation degree
    precision    working decimal digits
    """

    grid_log2: int = 12
    max_interval: int = 200
    taylor_degree: int = 40
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.grid_log2 < 1:
            raise ValueError(f"grid_log2 must be >= 1, got {self.grid_log2}")
        if self.max_interval < 5:
            raise ValueError(f"max_interval must be >= 5, got {self.max_interval}")
        if self.taylor_degree < 8:
            raise ValueError(f"taylor_degree must be >= 8, got {self.taylor_degree}")
        if self.precision < 10:
            raise ValueError(f"precision must be >= 10, got {self.precision}")


@dataclass(frozen=True)
class OmegaBlock:
    """Taylor coefficients of omega on [n, n+1) in z = 2(x-n) - 1."""

    n: int
    coeffs: Tuple[Decimal, ...]
    p: int

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def eval(self, z: Decimal, ctx: Context) -> Decimal:
        acc = Decimal(0)
        for c in reversed(self.coeffs):
            acc = ctx.add(ctx.multiply(acc, z), c)
        return acc

    def boundary_sum(self, ctx: Context) -> Decimal:
        """limit z -> 1, i.e. the value carried to the next knot."""
        s = Decimal(0)
        for c in self.coeffs:
            s = ctx.add(s, c)
        return s


class OmegaLedger:
    """Blocks 1..n* chained by the advance recurrence; immutable."""

    def __init__(self, blocks: List[OmegaBlock], config: QuadratureConfig):
        self.blocks = blocks  # blocks[0] is None; blocks[n] covers [n, n+1)
        self.config = config

    @property
    def max_interval(self) -> int:
        return self.config.max_interval

    def block(self, n: int) -> OmegaBlock:
        if not 1 <= n <= self.max_interval:
            raise LedgerRangeError(f"block {n} outside 1..{self.max_interval}")
        return self.blocks[n]


def _check_truncation(tail_coeff: Decimal, n: int, target_digits: int) -> None:
    if abs(tail_coeff) >= Decimal(1).scaleb(-(target_digits + 2)):
        warnings.warn(
            f"block {n}: |c[J]| = {tail_coeff:.2e} exceeds 1e-{target_digits + 2}; "
            f"increase the Taylor degree for {target_digits}-digit targets",
            TruncationWarning,
            stacklevel=3,
        )


def seed_omega(J: int = 40, p: int = DEFAULT_PRECISION) -> OmegaBlock:
    """Block 1: c[1, i] = (2/3)(-1/3)^i, the expansion of 1/x about 1.5."""
    ctx = context(p)
    coeffs = tuple(
        ctx.divide(Decimal(2 * (-1) ** i), Decimal(3 ** (i + 1))) for i in range(J + 1)
    )
    return OmegaBlock(1, coeffs, p)


def advance_omega(block: OmegaBlock, *,
                  target_digits: int = DEFAULT_TARGET_DIGITS) -> OmegaBlock:
    """Derive block n+1 from block n."""
    n = block.n
    J = block.degree
    p = block.p
    with localcontext(context(p)):
        divisor = Decimal(2 * n + 3)
        s = Decimal(0)
        for i, c in enumerate(block.coeffs):
            s += c * (Decimal(2 * (n + 1)) + Decimal((-1) ** i) / Decimal(i + 1))
        out = [s / divisor]
        for i in range(1, J + 1):
            out.append((block.coeffs[i - 1] / Decimal(i) - out[i - 1]) / divisor)
    _check_truncation(out[J], n + 1, target_digits)
    return OmegaBlock(n + 1, tuple(out), p)


def build_omega_ledger(config: QuadratureConfig = QuadratureConfig(), *,
                       target_digits: int = DEFAULT_TARGET_DIGITS) -> OmegaLedger:
    """Chain blocks 1..n*; construction is sequential in n."""
    blocks: List[OmegaBlock] = [None]  # type: ignore[list-item]
    blocks.append(seed_omega(config.taylor_degree, config.precision))
    for n in range(1, config.max_interval):
        blocks.append(advance_omega(blocks[n], target_digits=target_digits))
    return OmegaLedger(blocks, config)


def eval_omega(ledger: OmegaLedger, x) -> Decimal:
    """omega(x) for 1 <= x < n* + 1.

    Serves an integer x from the block starting at x (z = -1), so the
    half-open convention [n, n+1) applies everywhere.
    """
    p = ledger.config.precision
    ctx = context(p)
    xd = as_real(x, p)
    if xd < 1:
        raise LedgerRangeError(f"omega is defined on [1, inf), got {xd}")
    n = int(xd)
    if n > ledger.max_interval:
        raise LedgerRangeError(
            f"x = {xd} beyond ledger range [1, {ledger.max_interval + 1})"
        )
    z = ctx.subtract(ctx.multiply(Decimal(2), ctx.subtract(xd, Decimal(n))), Decimal(1))
    return ledger.block(n).eval(z, ctx)


def integrate_block(ledger: OmegaLedger, n: int, grid_log2: int | None = None,
                    moment_order: int = 2) -> Decimal:
    """Trapezoid approximation of integral_n^{n+1} omega(t)/t^ell dt.

    Walks the regular grid t = i * delta with delta = 2**-grid_log2,
    evaluating the block's Taylor polynomial at z = 2t - 1 by power
    accumulation and summing endpoint pairs; the common factor delta/2
    is applied once at the end.  Each interior grid value is computed
    once and reused as the next pair's left endpoint.
    """
    if moment_order < 1:
        raise ValueError(f"moment_order must be >= 1, got {moment_order}")
    if grid_log2 is None:
        grid_log2 = ledger.config.grid_log2
    block = ledger.block(n)
    coeffs = block.coeffs
    ell = moment_order
    with localcontext(context(ledger.config.precision)):
        delta = Decimal(1) / Decimal(2 ** grid_log2)
        steps = 2 ** grid_log2
        dn = Decimal(n)
        one = Decimal(1)
        two = Decimal(2)

        def value_at(t: Decimal) -> Decimal:
            z = two * t - one
            y = Decimal(0)
            zp = one
            for c in coeffs:
                y += c * zp
                zp *= z
            x = dn + t
            return y / (x * x if ell == 2 else x ** ell)

        s = Decimal(0)
        left = value_at(Decimal(0))
        for i in range(1, steps + 1):
            right = value_at(Decimal(i) * delta)
            s += left + right
            left = right
        return +(s * delta / two)


@dataclass(frozen=True)
class MomentConstant:
    """ell * integral_1^inf omega(x)/x^ell dx with an explicit error budget.

    ``first_interval`` is the exact rational contribution of [1, 2]
    where omega(x) = 1/x; for ell = 2 it is exactly 3/4.
    """

    moment_order: int
    value: Decimal
    error_budget: Decimal
    first_interval: Fraction


def moment_constant(ledger: OmegaLedger, moment_order: int = 2) -> MomentConstant:
    """Assemble the moment constant from exact head, quadrature and tail.

    value = ell * [ (1 - 2^-ell)/ell  (exact, omega = 1/x on [1,2])
                  + sum_{n=2}^{n*-1} trapezoid block integrals
                  + exp(-gamma) * n*^(1-ell) / (ell-1) ]          (tail)

    The budget adds the trapezoid bound O(delta^2), per-block Taylor
    truncation, and the 1e-4 tail band scaled by the tail weight.
    """
    ell = moment_order
    if ell < 2:
        raise ValueError(f"moment constant defined for orders >= 2, got {ell}")
    cfg = ledger.config
    n_star = cfg.max_interval
    first = Fraction(1) - Fraction(1, 2 ** ell)  # ell * (1 - 2^-ell)/ell
    with localcontext(context(cfg.precision)):
        quad = Decimal(0)
        trunc = Decimal(0)
        for n in range(2, n_star):
            quad += integrate_block(ledger, n, cfg.grid_log2, ell)
            # evaluation error of a truncated block, with geometric slack
            trunc += 3 * abs(ledger.block(n).coeffs[-1]) / Decimal(n) ** ell
        egamma = exp_neg_gamma(min(cfg.precision, 50))
        tail = egamma * Decimal(n_star) ** (1 - ell) / Decimal(ell - 1)
        value = Decimal(first.numerator) / Decimal(first.denominator) \
            + Decimal(ell) * (quad + tail)

        # trapezoid error <= delta^2/12 * sum_n max |f''| on [n, n+1] with
        # f = omega/t^ell; the bracket uses coarse bounds |omega| <= 0.6,
        # |omega'| <= 0.3, |omega''| <= 0.6 valid on [2, inf).
        delta = Decimal(1) / Decimal(2 ** cfg.grid_log2)
        f2_sum = Decimal(0)
        for n in range(2, n_star):
            dn = Decimal(n)
            bracket = (Decimal("0.6") + Decimal(2 * ell) * Decimal("0.3") / dn
                       + Decimal(ell * (ell + 1)) * Decimal("0.6") / (dn * dn))
            f2_sum += bracket / dn ** ell
        trap = delta * delta / 12 * f2_sum
        tail_band = Decimal("1e-4") * Decimal(n_star) ** (1 - ell) \
            * Decimal(ell) / Decimal(ell - 1)
        budget = +(Decimal(ell) * (trap + trunc) + tail_band)
    return MomentConstant(ell, +value, budget, first)
