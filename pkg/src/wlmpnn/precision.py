"""Correctly rounded p-bit arithmetic (MPFR through gmpy2) and exact hex I/O."""

from __future__ import annotations

import re
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

GUARD_BITS = 32


@dataclass(frozen=True)
class PrecisionContext:
    """Significand width ``bits`` with round-to-nearest-even.

    Use as ``with ctx.scope(): ...``; every MPFR operation inside is
    correctly rounded to ``bits`` bits.
    """

    bits: int

    def __post_init__(self):
        if self.bits < 2:
            raise ValueError(f"precision must be at least 2 bits, got {self.bits}")

    def scope(self, extra: int = 0):
        return gmpy2.context(
            precision=self.bits + extra,
            round=gmpy2.RoundToNearest,
            emax=gmpy2.get_emax_max(),
            emin=gmpy2.get_emin_min(),
        )

    def value(self, x) -> mpfr:
        """``x`` (int, float, Fraction-like, str or mpfr) rounded to ``bits``."""
        if isinstance(x, str):
            return from_hex(x, self.bits) if x.lower().lstrip("-+").startswith("0x") else mpfr(x, self.bits)
        return mpfr(x, self.bits)


def to_hex(x) -> str:
    """Exact hexadecimal float, e.g. ``0x1.8p+1``; works for any precision."""
    x = mpfr(x) if not isinstance(x, type(mpfr(0))) else x
    if gmpy2.is_zero(x):
        return "-0x0p+0" if gmpy2.is_signed(x) else "0x0p+0"
    if not gmpy2.is_finite(x):
        return str(x)
    num, den = x.as_integer_ratio()
    sign = "-" if num < 0 else ""
    num = abs(int(num))
    exp = -(int(den).bit_length() - 1)
    # x = num * 2**exp, with num odd or den == 1
    lead = num.bit_length() - 1
    frac = num - (1 << lead)
    e2 = exp + lead
    if lead == 0:
        return f"{sign}0x1p{e2:+d}"
    pad = (-lead) % 4
    frac <<= pad
    digits = format(frac, "x").rjust((lead + pad) // 4, "0").rstrip("0")
    return f"{sign}0x1.{digits}p{e2:+d}" if digits else f"{sign}0x1p{e2:+d}"


_HEX_RE = re.compile(r"^([+-]?)0x([0-9a-f]*)(?:\.([0-9a-f]*))?p([+-]?\d+)$", re.IGNORECASE)


def from_hex(s: str, bits: int | None = None) -> mpfr:
    """Parse :func:`to_hex` output; exact unless ``bits`` is too small."""
    m = _HEX_RE.match(s.strip())
    if not m:
        raise ValueError(f"not a hex float: {s!r}")
    sign, whole, frac, exp = m.groups()
    frac = frac or ""
    mant = int((whole or "0") + frac, 16)
    e2 = int(exp) - 4 * len(frac)
    need = max(mant.bit_length(), 2)
    prec = need if bits is None else bits
    with gmpy2.context(precision=max(prec, need), emax=gmpy2.get_emax_max(), emin=gmpy2.get_emin_min()):
        val = gmpy2.mul_2exp(mpfr(-mant if sign == "-" else mant), e2)
        return mpfr(val, prec)


def float_hex(x: float) -> str:
    return float(x).hex()
