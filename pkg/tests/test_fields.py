import itertools

import pytest

from mubnet.fields import (
    F4Element,
    F4Field,
    PrimeField,
    QuadraticField,
    check_nonresidue,
    field_of_order,
    is_prime,
    is_quadratic_residue,
    smallest_nonresidue,
)

PRIMES = [2, 3, 5, 7]


def _fields():
    out = [PrimeField(p) for p in PRIMES]
    out += [QuadraticField(3, 2), QuadraticField(5, 2), QuadraticField(7, 3), F4Field()]
    return out


@pytest.mark.parametrize("F", _fields(), ids=lambda F: f"q{F.order}")
def test_field_axioms_exhaustive(F):
    els = F.elements()
    zero, one = els[0], F(1)
    assert len(set(els)) == F.order
    for a in els:
        assert a + zero == a and a * one == a
        assert a + (-a) == zero
        if not a.is_zero():
            assert a * a.inv() == one
            assert a / a == one
    for a, b in itertools.product(els, repeat=2):
        assert a + b == b + a
        assert a * b == b * a
    for a, b, c in itertools.product(els, repeat=3):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c


@pytest.mark.parametrize("p", [3, 5, 7])
def test_frobenius_fixes_every_element(p):
    F = QuadraticField.with_default_nonresidue(p)
    for x in F.elements():
        assert x ** (p * p) == x


def test_worked_examples():
    assert PrimeField(3)(2).inv().value == 2
    s = QuadraticField(3, 2).sqrt_D
    assert s * s == QuadraticField(3, 2)(2)
    w = F4Element(2)
    assert w * w == F4Element(3)
    assert str(w * w) == "w+1"
    assert str(QuadraticField(3, 2)(1, 2)) == "1+2*s"
    assert str(PrimeField(5)(7)) == "2"


def test_zero_has_no_inverse():
    for F in _fields():
        with pytest.raises(ZeroDivisionError):
            F.elements()[0].inv()


@pytest.mark.parametrize("p,expected", [(3, 2), (5, 2), (7, 3), (11, 2), (13, 2), (17, 3), (23, 5)])
def test_smallest_nonresidue(p, expected):
    D = smallest_nonresidue(p)
    assert D == expected
    assert all((x * x - D) % p for x in range(p))
    assert all(is_quadratic_residue(c, p) for c in range(1, D))


def test_nonresidue_validation():
    with pytest.raises(ValueError):
        smallest_nonresidue(2)
    with pytest.raises(ValueError):
        smallest_nonresidue(9)
    with pytest.raises(ValueError):
        check_nonresidue(1, 3)
    with pytest.raises(ValueError):
        QuadraticField(5, 4)
    assert check_nonresidue(5, 3) == 2


def test_field_of_order():
    assert isinstance(field_of_order(7), PrimeField)
    assert isinstance(field_of_order(4), F4Field)
    assert field_of_order(25).D == 2
    assert field_of_order(9, 5).D == 2
    for bad in (6, 8, 16, 27):
        with pytest.raises(ValueError):
            field_of_order(bad)


def test_is_prime_matches_trial_division():
    for n in range(200):
        assert is_prime(n) == (n > 1 and all(n % f for f in range(2, n)))


def test_mixed_field_operands_rejected():
    with pytest.raises(ValueError):
        PrimeField(3)(1) + PrimeField(5)(1)
    with pytest.raises(ValueError):
        QuadraticField(3, 2)(1) * QuadraticField(7, 3)(1)
