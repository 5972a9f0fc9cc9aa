"""Exact arithmetic in Z_p, F_{p^2} = Z_p(sqrt D) for odd p, and F_4.

Elements are small immutable value types.  Every field type also exposes a
``FieldSpec``-style object (``PrimeField``, ``QuadraticField``, ``F4Field``)
that enumerates its elements in a fixed order; the affine-plane code relies
on that order for point indexing.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union


def is_prime(n: int) -> bool:
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


@lru_cache(maxsize=None)
def squares_mod(p: int) -> frozenset[int]:
    return frozenset((x * x) % p for x in range(p))


def is_quadratic_residue(a: int, p: int) -> bool:
    """True if ``a`` is a nonzero square mod ``p`` (exhaustive)."""
    a %= p
    return a != 0 and a in squares_mod(p)


def smallest_nonresidue(p: int) -> int:
    """Smallest D in [2, p) that is not a square mod the odd prime ``p``."""
    if p == 2:
        raise ValueError("Z_2 has no quadratic nonresidue")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    sq = squares_mod(p)
    for d in range(2, p):
        if d not in sq:
            return d
    raise AssertionError("unreachable for odd primes")


def check_nonresidue(D: int, p: int) -> int:
    D %= p
    if D == 0 or D in squares_mod(p):
        raise ValueError(f"D={D} is not a quadratic nonresidue mod {p}")
    return D


# ---------------------------------------------------------------------------
# Z_p


@dataclass(frozen=True)
class PrimeFieldElement:
    p: int
    value: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> "PrimeFieldElement":
        if isinstance(other, PrimeFieldElement):
            if other.p != self.p:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, int):
            return PrimeFieldElement(self.p, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeFieldElement(self.p, self.value + o.value)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeFieldElement(self.p, self.value - o.value)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeFieldElement(self.p, self.value * o.value)

    __rmul__ = __mul__

    def __neg__(self):
        return PrimeFieldElement(self.p, -self.value)

    def inv(self) -> "PrimeFieldElement":
        if self.value == 0:
            raise ZeroDivisionError("inverse of zero")
        return PrimeFieldElement(self.p, pow(self.value, -1, self.p))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        return PrimeFieldElement(self.p, pow(self.value, n, self.p))

    def is_zero(self) -> bool:
        return self.value == 0

    def __str__(self) -> str:
        return str(self.value)


# ---------------------------------------------------------------------------
# F_{p^2} = Z_p[s]/(s^2 - D)


@dataclass(frozen=True)
class QuadExtElement:
    """``a + b*s`` with ``s*s = D`` in F_{p^2}, p odd and D a nonresidue."""

    p: int
    D: int
    a: int
    b: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", self.a % self.p)
        object.__setattr__(self, "b", self.b % self.p)

    def _coerce(self, other) -> "QuadExtElement":
        if isinstance(other, QuadExtElement):
            if (other.p, other.D) != (self.p, self.D):
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, int):
            return QuadExtElement(self.p, self.D, other, 0)
        if isinstance(other, PrimeFieldElement) and other.p == self.p:
            return QuadExtElement(self.p, self.D, other.value, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExtElement(self.p, self.D, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExtElement(self.p, self.D, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a = self.a * o.a + self.D * self.b * o.b
        b = self.a * o.b + self.b * o.a
        return QuadExtElement(self.p, self.D, a, b)

    __rmul__ = __mul__

    def __neg__(self):
        return QuadExtElement(self.p, self.D, -self.a, -self.b)

    def norm(self) -> int:
        return (self.a * self.a - self.D * self.b * self.b) % self.p

    def inv(self) -> "QuadExtElement":
        n = self.norm()
        if n == 0:
            # the norm form is anisotropic, so only zero has norm zero
            raise ZeroDivisionError("inverse of zero")
        ninv = pow(n, -1, self.p)
        return QuadExtElement(self.p, self.D, self.a * ninv, -self.b * ninv)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = QuadExtElement(self.p, self.D, 1, 0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def in_prime_field(self) -> bool:
        return self.b == 0

    def __str__(self) -> str:
        return f"{self.a}+{self.b}*s"


# ---------------------------------------------------------------------------
# F_4 = {0, 1, w, w+1}, w^2 = w + 1.  Encoded as 2-bit integers (bit 1 = w).

_F4_NAMES = ("0", "1", "w", "w+1")
# log table relative to generator w: w^0 = 1, w^1 = w, w^2 = w+1
_F4_LOG = {1: 0, 2: 1, 3: 2}
_F4_EXP = (1, 2, 3)


@dataclass(frozen=True)
class F4Element:
    value: int

    def __post_init__(self) -> None:
        if self.value not in (0, 1, 2, 3):
            raise ValueError("F4 element code must be in 0..3")

    def _coerce(self, other) -> "F4Element":
        if isinstance(other, F4Element):
            return other
        if isinstance(other, int):
            return F4Element(other % 2)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return F4Element(self.value ^ o.value)

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.value == 0 or o.value == 0:
            return F4Element(0)
        return F4Element(_F4_EXP[(_F4_LOG[self.value] + _F4_LOG[o.value]) % 3])

    __rmul__ = __mul__

    def inv(self) -> "F4Element":
        if self.value == 0:
            raise ZeroDivisionError("inverse of zero")
        return F4Element(_F4_EXP[(-_F4_LOG[self.value]) % 3])

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = F4Element(1)
        for _ in range(n):
            result = result * self
        return result

    def is_zero(self) -> bool:
        return self.value == 0

    def __str__(self) -> str:
        return _F4_NAMES[self.value]


FieldElement = Union[PrimeFieldElement, QuadExtElement, F4Element]


# ---------------------------------------------------------------------------
# field descriptors


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def order(self) -> int:
        return self.p

    def elements(self) -> list[PrimeFieldElement]:
        return [PrimeFieldElement(self.p, v) for v in range(self.p)]

    def index(self, x: PrimeFieldElement) -> int:
        return x.value

    def __call__(self, v: int) -> PrimeFieldElement:
        return PrimeFieldElement(self.p, v)


@dataclass(frozen=True)
class QuadraticField:
    """F_{p^2} realised as Z_p(sqrt D); element ``a + b*s`` has index ``a + p*b``."""

    p: int
    D: int

    def __post_init__(self) -> None:
        if self.p == 2 or not is_prime(self.p):
            raise ValueError("quadratic extension needs an odd prime")
        check_nonresidue(self.D, self.p)
        object.__setattr__(self, "D", self.D % self.p)

    @classmethod
    def with_default_nonresidue(cls, p: int) -> "QuadraticField":
        return cls(p, smallest_nonresidue(p))

    @property
    def order(self) -> int:
        return self.p * self.p

    def elements(self) -> list[QuadExtElement]:
        p = self.p
        return [QuadExtElement(p, self.D, i % p, i // p) for i in range(p * p)]

    def index(self, x: QuadExtElement) -> int:
        return x.a + self.p * x.b

    def __call__(self, a: int, b: int = 0) -> QuadExtElement:
        return QuadExtElement(self.p, self.D, a, b)

    @property
    def sqrt_D(self) -> QuadExtElement:
        return QuadExtElement(self.p, self.D, 0, 1)


@dataclass(frozen=True)
class F4Field:
    @property
    def order(self) -> int:
        return 4

    def elements(self) -> list[F4Element]:
        return [F4Element(v) for v in range(4)]

    def index(self, x: F4Element) -> int:
        return x.value

    def __call__(self, v: int) -> F4Element:
        return F4Element(v)


def field_of_order(q: int, D: int | None = None):
    """Field descriptor for q prime, q = p^2 with p odd, or q = 4."""
    if q == 4:
        return F4Field()
    if is_prime(q):
        return PrimeField(q)
    r = int(round(q ** 0.5))
    if r * r == q and is_prime(r) and r != 2:
        return QuadraticField(r, smallest_nonresidue(r) if D is None else D)
    raise ValueError(f"unsupported field order {q}: need p, p^2 (p odd) or 4")


def iter_nonzero(field) -> Iterator[FieldElement]:
    return (x for x in field.elements() if not x.is_zero())
