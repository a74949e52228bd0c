"""Exact complex scalars with rational real and imaginary parts."""

import re
import sys
from fractions import Fraction
from typing import Any, Union

from app.errors import ParseError

_RATIONAL_PATTERN = re.compile(r"^\s*[+-]?\d+\s*(/\s*\d+\s*)?$")

# Exact entries may carry more digits than the default int/str conversion cap.
sys.set_int_max_str_digits(0)

Scalar = Union["GaussianRational", Fraction, int]


def parse_rational(text: Any, field: str = "entry") -> Fraction:
    """
    Parse a rational written as "p/q" or "p".

    Args:
        text: String (or JSON integer) to parse
        field: Field path reported on failure

    Returns:
        The value as a Fraction in lowest terms

    Raises:
        ParseError: If the text is not an exact rational
    """
    if isinstance(text, bool):
        raise ParseError(field, f"invalid rational {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or not _RATIONAL_PATTERN.match(text):
        raise ParseError(field, f"invalid rational {text!r}")
    try:
        return Fraction(re.sub(r"\s+", "", text))
    except ZeroDivisionError:
        raise ParseError(field, f"zero denominator in {text!r}")
    except ValueError as e:
        raise ParseError(field, f"invalid rational {text!r}: {e}")


class GaussianRational:
    """An element of Q(i): re + im*i with both parts exact rationals."""

    __slots__ = ("re", "im")

    def __init__(self, re: Union[Fraction, int] = 0, im: Union[Fraction, int] = 0):
        object.__setattr__(self, "re", re if isinstance(re, Fraction) else Fraction(re))
        object.__setattr__(self, "im", im if isinstance(im, Fraction) else Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __reduce__(self):
        return (GaussianRational, (self.re, self.im))

    @classmethod
    def coerce(cls, value: Scalar) -> "GaussianRational":
        """Promote an int or Fraction to a GaussianRational."""
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            return cls(value)
        raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")

    @classmethod
    def from_json(cls, value: Any, field: str = "entry") -> "GaussianRational":
        """Parse "p/q", "p" or a two-element [re, im] array."""
        if isinstance(value, list):
            if len(value) != 2:
                raise ParseError(field, "complex entry must be a two-element array")
            return cls(parse_rational(value[0], field), parse_rational(value[1], field))
        return cls(parse_rational(value, field))

    def to_json(self) -> Union[str, list]:
        """Serialize in lowest terms; real values drop the imaginary part."""
        if self.im == 0:
            return str(self.re)
        return [str(self.re), str(self.im)]

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def conjugate(self) -> "GaussianRational":
        if self.im == 0:
            return self
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Squared modulus re^2 + im^2."""
        return self.re * self.re + self.im * self.im

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other: Scalar) -> "GaussianRational":
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other: Scalar) -> "GaussianRational":
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other: Scalar) -> "GaussianRational":
        return GaussianRational.coerce(other) - self

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other: Scalar) -> "GaussianRational":
        other = GaussianRational.coerce(other)
        if self.im == 0 and other.im == 0:
            return GaussianRational(self.re * other.re)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "GaussianRational":
        other = GaussianRational.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero Gaussian rational")
        if other.im == 0:
            return GaussianRational(self.re / other.re, self.im / other.re)
        norm = other.abs2()
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / norm,
            (self.im * other.re - self.re * other.im) / norm,
        )

    def __rtruediv__(self, other: Scalar) -> "GaussianRational":
        return GaussianRational.coerce(other) / self

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        if self.im == 0:
            return f"GaussianRational({self.re})"
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
