import itertools

import pytest

from mubentropy.gf import (
    GaloisField,
    add,
    factorize,
    field_trace,
    find_irreducible,
    is_irreducible,
    mul,
    prime_power,
)

SMALL_FIELDS = [(p, k) for p, k in [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (2, 3), (3, 2), (2, 4), (5, 2), (7, 2), (2, 5), (2, 6), (3, 3)]]


def test_gf3_examples():
    F = GaloisField(3)
    two = F.element([2])
    assert add(two, two) == F.element([1])
    assert mul(two, two) == F.element([1])


def test_gf4_examples():
    F = GaloisField(2, 2)
    assert F.modulus == (1, 1, 1)  # t^2 + t + 1
    t, one = F.element([0, 1]), F.one
    assert t + t == F.zero
    assert t + one == F.element([1, 1])
    assert t * t == F.element([1, 1])
    assert t * (t + one) == one


def test_gf4_trace():
    F = GaloisField(2, 2)
    assert field_trace(F.zero) == 0
    assert field_trace(F.one) == 0
    assert field_trace(F.element([0, 1])) == 1


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_prime_field_trace_is_identity(p):
    F = GaloisField(p)
    assert [field_trace(x) for x in F.elements()] == list(range(p))


def test_field_mismatch():
    with pytest.raises(ValueError, match="field mismatch"):
        GaloisField(3).one + GaloisField(5).one


def test_reducible_modulus_rejected():
    with pytest.raises(ValueError, match="reducible"):
        GaloisField(2, 2, modulus=(1, 0, 1))  # (t+1)^2


def test_non_prime_characteristic_rejected():
    with pytest.raises(ValueError, match="not prime"):
        GaloisField(4)


def test_irreducible_search_is_smallest_first():
    # t^3 + t + 1 is the first irreducible cubic over GF(2); t^2 + 1 over GF(3)
    assert find_irreducible(2, 3) == (1, 1, 0, 1)
    assert find_irreducible(3, 2) == (1, 0, 1)
    assert not is_irreducible((1, 0, 0, 1), 2)


@pytest.mark.parametrize("p,k", [pk for pk in SMALL_FIELDS if pk[0] ** pk[1] <= 64])
def test_field_axioms_exhaustive(p, k):
    F = GaloisField(p, k)
    els = F.elements()
    zero, one = F.zero, F.one
    addt, mult = F.add_table, F.mul_table
    q = F.order
    for a, b in itertools.product(range(q), repeat=2):
        assert addt[a][b] == addt[b][a]
        assert mult[a][b] == mult[b][a]
    for a in range(q):
        assert addt[a][0] == a and mult[a][1] == a
        if a:
            assert 1 in mult[a]
            assert els[a] * els[a].inverse() == one
    if q <= 32:
        for a, b, c in itertools.product(range(q), repeat=3):
            assert mult[mult[a][b]][c] == mult[a][mult[b][c]]
            assert addt[addt[a][b]][c] == addt[a][addt[b][c]]
            assert mult[a][addt[b][c]] == addt[mult[a][b]][mult[a][c]]
    assert sum(1 for x in els if x == zero) == 1


@pytest.mark.parametrize("p,k", [pk for pk in SMALL_FIELDS if pk[0] ** pk[1] <= 16])
def test_trace_linear_over_prime_subfield(p, k):
    F = GaloisField(p, k)
    tr = F.trace_table
    for a, b in itertools.product(range(p), repeat=2):
        fa, fb = F.from_int(a), F.from_int(b)
        for x, y in itertools.product(F.elements(), repeat=2):
            lhs = field_trace(fa * x + fb * y)
            assert lhs == (a * tr[int(x)] + b * tr[int(y)]) % p


@pytest.mark.parametrize("p,k", SMALL_FIELDS)
def test_trace_frobenius_invariant(p, k):
    F = GaloisField(p, k)
    for x in F.elements():
        assert field_trace(x**p) == field_trace(x)


@pytest.mark.parametrize("p,k", SMALL_FIELDS)
def test_trace_is_onto_and_balanced(p, k):
    tr = GaloisField(p, k).trace_table
    assert all(tr.count(c) == p ** (k - 1) for c in range(p))


def test_prime_power_detection():
    assert prime_power(8) == (2, 3)
    assert prime_power(9) == (3, 2)
    assert prime_power(7) == (7, 1)
    assert prime_power(6) is None
    assert prime_power(12) is None
    assert factorize(12) == {2: 2, 3: 1}


def test_element_repr():
    F = GaloisField(2, 2)
    assert repr(F.element([0, 1]) * F.element([0, 1])) == "FieldElement(1 + t) in GF(2^2)"
