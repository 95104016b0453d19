"""Arithmetic in GF(p^k) with a dense coefficient-vector element encoding.

Elements are polynomials over GF(p) of degree < k, reduced modulo a monic
irreducible polynomial. The modulus is the lexicographically smallest
irreducible one, so field labelling is reproducible.

>>> F = GaloisField(2, 2)
>>> t = F.element([0, 1])
>>> t * t
FieldElement(1 + t) in GF(2^2)
"""

from __future__ import annotations

from functools import cached_property
from itertools import product


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(n: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` with ``n == p**k`` or ``None``."""
    if n < 2:
        return None
    fac = factorize(n)
    if len(fac) != 1:
        return None
    (p, k), = fac.items()
    return p, k


# polynomials: coefficient tuples, lowest degree first

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, m, p: int) -> list[int]:
    a = _trim([x % p for x in a])
    m = _trim(list(m))
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        coef = (a[-1] * inv_lead) % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * c) % p
        _trim(a)
    return a


def is_irreducible(poly, p: int) -> bool:
    """Exhaustive check that no monic factor of degree 1..deg/2 divides ``poly``."""
    poly = _trim(list(poly))
    deg = len(poly) - 1
    if deg < 1:
        return False
    for fdeg in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=fdeg):
            if not _poly_mod(poly, list(low) + [1], p):
                return False
    return True


def find_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree ``k`` over GF(p).

    Candidates are ordered by the integer ``sum(c_i * p**i)`` of their lower
    coefficients ``c_0 .. c_{k-1}``.
    """
    if k == 1:
        return (0, 1)
    for code in range(p**k):
        low = [(code // p**i) % p for i in range(k)]
        poly = low + [1]
        if is_irreducible(poly, p):
            return tuple(poly)
    raise ValueError(f"no irreducible polynomial of degree {k} over GF({p})")  # unreachable


class GaloisField:
    """The finite field GF(p^k).

    Elements are also addressable by an integer code ``sum(c_i * p**i)``;
    :attr:`add_table` and :attr:`mul_table` give the arithmetic on codes and
    are what the MUB construction uses.
    """

    def __init__(self, p: int, k: int = 1, modulus=None):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if k < 1:
            raise ValueError("extension degree must be >= 1")
        if modulus is None:
            modulus = find_irreducible(p, k)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise ValueError(f"modulus must be monic of degree {k}")
        if not is_irreducible(modulus, p):
            raise ValueError(f"modulus {modulus} is reducible over GF({p})")
        self.p = p
        self.k = k
        self.modulus = modulus
        self.order = p**k

    def __repr__(self):
        return f"GaloisField({self.p}, {self.k}, modulus={self.modulus})"

    def __eq__(self, other):
        return isinstance(other, GaloisField) and (self.p, self.k, self.modulus) == (
            other.p,
            other.k,
            other.modulus,
        )

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def element(self, coeffs) -> "FieldElement":
        if isinstance(coeffs, int):
            return self.from_int(coeffs)
        return FieldElement(self, coeffs)

    def from_int(self, code: int) -> "FieldElement":
        if not 0 <= code < self.order:
            raise ValueError(f"code {code} outside GF({self.order})")
        return FieldElement(self, [(code // self.p**i) % self.p for i in range(self.k)])

    @property
    def zero(self) -> "FieldElement":
        return self.from_int(0)

    @property
    def one(self) -> "FieldElement":
        return self.from_int(1)

    def elements(self) -> list["FieldElement"]:
        return [self.from_int(c) for c in range(self.order)]

    @cached_property
    def add_table(self) -> list[list[int]]:
        els = self.elements()
        return [[int(x + y) for y in els] for x in els]

    @cached_property
    def mul_table(self) -> list[list[int]]:
        els = self.elements()
        return [[int(x * y) for y in els] for x in els]

    @cached_property
    def trace_table(self) -> list[int]:
        return [field_trace(x) for x in self.elements()]


class FieldElement:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: GaloisField, coeffs):
        coeffs = [int(c) for c in coeffs]
        if len(coeffs) > field.k:
            coeffs = _poly_mod(coeffs, field.modulus, field.p)
        coeffs = coeffs + [0] * (field.k - len(coeffs))
        if any(not 0 <= c < field.p for c in coeffs):
            raise ValueError(f"coefficients must lie in [0, {field.p})")
        self.field = field
        self.coeffs = tuple(coeffs)

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement) or other.field != self.field:
            raise ValueError("field mismatch")

    def __int__(self):
        return sum(c * self.field.p**i for i, c in enumerate(self.coeffs))

    def __eq__(self, other):
        return isinstance(other, FieldElement) and other.field == self.field and other.coeffs == self.coeffs

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
                terms.append(str(c) if not mono else (mono if c == 1 else f"{c}{mono}"))
        body = " + ".join(terms) or "0"
        return f"FieldElement({body}) in GF({self.field.p}^{self.field.k})"

    def __add__(self, other):
        self._check(other)
        p = self.field.p
        return FieldElement(self.field, [(a + b) % p for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, [(-a) % p for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        p = self.field.p
        prod = [0] * (2 * self.field.k - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    prod[i + j] += a * b
        return FieldElement(self.field, _poly_mod(prod, self.field.modulus, p))

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.field.one, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "FieldElement":
        if not any(self.coeffs):
            raise ZeroDivisionError("zero has no inverse")
        # multiplicative group has order p^k - 1
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        return self * other.inverse()


def add(x: FieldElement, y: FieldElement) -> FieldElement:
    return x + y


def mul(x: FieldElement, y: FieldElement) -> FieldElement:
    return x * y


def field_trace(x: FieldElement) -> int:
    """Absolute trace ``x + x^p + ... + x^(p^(k-1))`` as a residue mod p."""
    F = x.field
    total, y = F.zero, x
    for _ in range(F.k):
        total = total + y
        y = y ** F.p
    if any(total.coeffs[1:]):
        raise ArithmeticError(f"trace {total} not in the prime subfield")
    return total.coeffs[0]
