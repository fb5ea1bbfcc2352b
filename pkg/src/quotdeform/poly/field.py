"""Exact coefficient fields: the rationals and prime fields GF(p)."""
from __future__ import annotations

import random
from fractions import Fraction


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class ExactField:
    """Either QQ (``characteristic == 0``, elements are Fractions) or GF(p)
    (elements are ints in ``range(p)``)."""

    __slots__ = ("characteristic",)

    def __init__(self, characteristic: int = 0):
        if characteristic != 0:
            if not _is_prime(characteristic) or characteristic >= 2**31:
                raise ValueError(f"GF({characteristic}): order must be a prime below 2^31")
        self.characteristic = characteristic

    @property
    def name(self) -> str:
        return "QQ" if self.characteristic == 0 else f"GF({self.characteristic})"

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, ExactField) and other.characteristic == self.characteristic

    def __hash__(self):
        return hash(("ExactField", self.characteristic))

    @property
    def zero(self):
        return Fraction(0) if self.characteristic == 0 else 0

    @property
    def one(self):
        return Fraction(1) if self.characteristic == 0 else 1

    def __call__(self, x):
        p = self.characteristic
        if p == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % p == 0:
                raise ZeroDivisionError(f"{x} has no image in {self.name}")
            return x.numerator * pow(x.denominator, -1, p) % p
        if isinstance(x, str):
            return self(Fraction(x))
        return int(x) % p

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        p = self.characteristic
        if p == 0:
            return 1 / a
        return pow(a, -1, p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def mul(self, a, b):
        p = self.characteristic
        return a * b % p if p else a * b

    def add(self, a, b):
        p = self.characteristic
        return (a + b) % p if p else a + b

    def neg(self, a):
        p = self.characteristic
        return -a % p if p else -a

    def elements(self):
        """All elements of a finite field, in canonical order."""
        if self.characteristic == 0:
            raise ValueError("QQ is infinite")
        return range(self.characteristic)

    def random_element(self, rng: random.Random, height: int = 5):
        p = self.characteristic
        if p:
            return rng.randrange(p)
        num = rng.randint(-height, height)
        den = rng.randint(1, 3)
        return Fraction(num, den)

    def format(self, a) -> str:
        if self.characteristic:
            return str(int(a))
        a = Fraction(a)
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"


QQ = ExactField(0)


def GF(p: int) -> ExactField:
    return ExactField(p)
