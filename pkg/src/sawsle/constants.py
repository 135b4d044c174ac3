"""Conjectured critical exponents for the two-dimensional self-avoiding walk.

All values are stored as exact rationals so that the algebraic relations
between them can be asserted rather than assumed.
"""

from dataclasses import dataclass, field
from fractions import Fraction


@dataclass(frozen=True)
class Exponents:
    """Exponent set used throughout the package.

    nu     - mean-square displacement exponent
    gamma  - entropic correction exponent
    rho    - half-plane survival exponent
    p      - endpoint-radius weight power, (rho - gamma) / nu
    b      - boundary scaling exponent
    bbar   - interior scaling exponent
    """

    nu: Fraction = Fraction(3, 4)
    gamma: Fraction = Fraction(43, 32)
    rho: Fraction = Fraction(25, 64)
    p: Fraction = Fraction(-61, 48)
    b: Fraction = Fraction(5, 8)
    bbar: Fraction = Fraction(5, 48)

    def __post_init__(self):
        if self.p != (self.rho - self.gamma) / self.nu:
            raise ValueError("p must equal (rho - gamma) / nu exactly")
        if self.b + self.bbar != self.p + 2:
            raise ValueError("b + bbar must equal (rho - gamma) / nu + 2 exactly")

    @property
    def b_minus_bbar(self) -> Fraction:
        return self.b - self.bbar


#: The conjectured exponent values; every module takes these as its default.
SAW_EXPONENTS = Exponents()
