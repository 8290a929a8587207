"""Exact commutative rings with unity carrying an order-2 involution theta.

Every ring is a singleton keyed by its descriptor string, so elements can test
``x.ring is y.ring`` instead of comparing descriptors.  Elements are immutable
``RingElement`` objects whose payload ``v`` is a canonical representation:

* rationals: a reduced ``Fraction``
* Gaussian rationals: ``(a, b, d)`` meaning ``(a + b i) / d`` with ``d > 0`` and
  ``gcd(a, b, d) = 1``
* ``gf(p, k)``: an integer code of the residue polynomial, base-``p`` digits
  low degree first
* ``quad(base, d)``: a pair ``(x, y)`` of base elements meaning ``x + y a``
* ``poly(base)`` / ``trunc(base, k)``: a tuple of base coefficients, low degree
  first, without trailing zeros
"""

from __future__ import annotations

import ast
import math
import operator
import re
from fractions import Fraction
from functools import lru_cache
from typing import Callable, NamedTuple

from sympy import prevprime
from sympy.ntheory import sqrt_mod

from .errors import DescriptorError, NoAntifixedUnit, NoHalf, NotInvertible, RingMismatch

__all__ = [
    "RingElement",
    "InvolutiveRing",
    "Rationals",
    "GaussianRationals",
    "LocalizedGaussianIntegers",
    "FiniteFieldSq",
    "QuadraticExt",
    "PolyExt",
    "TruncatedPoly",
    "Reduction",
    "parse_ring",
    "rationals",
    "gaussian_rationals",
    "localized_gaussian_integers",
    "finite_field_sq",
    "quadratic_ext",
    "poly_ext",
    "truncated_poly",
    "theta",
    "split_fixed_antifixed",
    "antifixed_unit",
]


class RingElement:
    __slots__ = ("ring", "v")

    def __init__(self, ring: InvolutiveRing, v) -> None:
        self.ring = ring
        self.v = v

    def _payload(self, other):
        if type(other) is RingElement and other.ring is self.ring:
            return other.v
        return self.ring.coerce(other).v

    def __add__(self, other):
        r = self.ring
        return RingElement(r, r._add(self.v, self._payload(other)))

    __radd__ = __add__

    def __sub__(self, other):
        r = self.ring
        return RingElement(r, r._sub(self.v, self._payload(other)))

    def __rsub__(self, other):
        r = self.ring
        return RingElement(r, r._sub(self._payload(other), self.v))

    def __mul__(self, other):
        r = self.ring
        return RingElement(r, r._mul(self.v, self._payload(other)))

    __rmul__ = __mul__

    def __neg__(self):
        r = self.ring
        return RingElement(r, r._neg(self.v))

    def __pos__(self):
        return self

    def __truediv__(self, other):
        return self * self.ring.coerce(other).inverse()

    def __rtruediv__(self, other):
        return self.ring.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if type(other) is RingElement and other.ring is self.ring:
            return self.v == other.v
        try:
            return self.v == self.ring.coerce(other).v
        except (RingMismatch, NotInvertible, TypeError):
            return False

    def __ne__(self, other) -> bool:
        return not self == other

    def __hash__(self) -> int:
        return hash((self.ring.descriptor, self.v))

    def __bool__(self) -> bool:
        return not self.ring._is_zero(self.v)

    def is_zero(self) -> bool:
        return self.ring._is_zero(self.v)

    def bar(self) -> RingElement:
        """theta applied to this element."""
        return RingElement(self.ring, self.ring._theta(self.v))

    def inverse(self) -> RingElement:
        return RingElement(self.ring, self.ring._inv(self.v))

    def is_unit(self) -> bool:
        return self.ring.is_unit(self)

    def __str__(self) -> str:
        return self.ring._format(self.v)

    def __repr__(self) -> str:
        return f"<{self.ring.descriptor}: {self}>"


class Reduction(NamedTuple):
    """Ring homomorphism into F_{p^m} = F_p[x]/(x^m - sum(modulus[j] x^j)).

    ``image`` maps a payload to its ``m`` coefficient residues.  It raises
    ``NotInvertible`` when a denominator vanishes modulo ``p``.
    """

    p: int
    m: int
    modulus: tuple[int, ...]
    image: Callable[[object], list[int]]
    exact: bool  # True when the homomorphism is injective (ring is F_{p^m} itself)


class InvolutiveRing:
    """Base class.  Subclasses implement the payload-level primitives."""

    descriptor: str = ""
    has_half: bool = True
    has_third: bool = True
    is_field: bool = False
    characteristic: int = 0

    # payload primitives -------------------------------------------------
    def _add(self, x, y):
        raise NotImplementedError

    def _sub(self, x, y):
        return self._add(x, self._neg(y))

    def _mul(self, x, y):
        raise NotImplementedError

    def _neg(self, x):
        raise NotImplementedError

    def _theta(self, x):
        raise NotImplementedError

    def _inv(self, x):
        raise NotImplementedError

    def _is_zero(self, x) -> bool:
        return x == self._zero

    def _from_int(self, n: int):
        raise NotImplementedError

    def _format(self, x) -> str:
        return str(x)

    def _embed(self, x: RingElement):
        """Payload for an element of a subring, or None."""
        return None

    # element-level API --------------------------------------------------
    @property
    def zero(self) -> RingElement:
        return RingElement(self, self._zero)

    @property
    def one(self) -> RingElement:
        return RingElement(self, self._one)

    def __call__(self, value) -> RingElement:
        return self.coerce(value)

    def coerce(self, value) -> RingElement:
        if type(value) is RingElement:
            if value.ring is self:
                return value
            payload = self._embed(value)
            if payload is None:
                raise RingMismatch(f"cannot coerce {value!r} into {self.descriptor}")
            return RingElement(self, payload)
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return RingElement(self, self._from_int(value))
        if isinstance(value, Fraction):
            num = RingElement(self, self._from_int(value.numerator))
            if value.denominator == 1:
                return num
            return num * RingElement(self, self._from_int(value.denominator)).inverse()
        if isinstance(value, str):
            return self.parse_element(value)
        raise RingMismatch(f"cannot coerce {value!r} into {self.descriptor}")

    def theta(self, x) -> RingElement:
        return self.coerce(x).bar()

    def is_unit(self, x: RingElement) -> bool:
        try:
            x.inverse()
        except NotInvertible:
            return False
        return True

    def antifixed_unit(self) -> RingElement:
        raise NoAntifixedUnit(f"{self.descriptor} has no invertible antifixed element")

    def named_elements(self) -> dict[str, RingElement]:
        """Names accepted by ``parse_element``."""
        names = {}
        try:
            names["a"] = self.antifixed_unit()
        except NoAntifixedUnit:
            pass
        return names

    def random_element(self, rng) -> RingElement:
        raise NotImplementedError

    def reduction(self, attempt: int = 0) -> Reduction | None:
        return None

    def parse_element(self, text: str) -> RingElement:
        return _evaluate(self, text)

    def __repr__(self) -> str:
        return f"<ring {self.descriptor}>"

    def __reduce__(self):
        return (parse_ring, (self.descriptor,))


# ---------------------------------------------------------------------------
# rationals


class Rationals(InvolutiveRing):
    """Q with the identity involution.  Only for untwisted oracle computations."""

    descriptor = "rationals"
    is_field = True
    _zero = Fraction(0)
    _one = Fraction(1)

    def _add(self, x, y):
        return x + y

    def _sub(self, x, y):
        return x - y

    def _mul(self, x, y):
        return x * y

    def _neg(self, x):
        return -x

    def _theta(self, x):
        return x

    def _inv(self, x):
        if not x:
            raise NotInvertible("division by zero")
        return 1 / x

    def _from_int(self, n):
        return Fraction(n)

    def _format(self, x):
        return str(x)

    def random_element(self, rng):
        return RingElement(self, Fraction(rng.randint(-9, 9), rng.choice((1, 1, 2, 3, 4))))

    def reduction(self, attempt=0):
        p = _split_prime(lambda q: True, attempt)

        def image(x):
            return [x.numerator * _invmod(x.denominator, p) % p]

        return Reduction(p, 1, (0,), image, False)


# ---------------------------------------------------------------------------
# Gaussian rationals


def _norm_gauss(a: int, b: int, d: int):
    if d < 0:
        a, b, d = -a, -b, -d
    g = math.gcd(a, b, d)
    if g > 1:
        a, b, d = a // g, b // g, d // g
    return (a, b, d)


def _frac_str(num: int, den: int) -> str:
    return str(num) if den == 1 else f"{num}/{den}"


class GaussianRationals(InvolutiveRing):
    """Q(i) with complex conjugation."""

    descriptor = "gaussian-rationals"
    is_field = True
    _zero = (0, 0, 1)
    _one = (1, 0, 1)

    def _add(self, x, y):
        a1, b1, d1 = x
        a2, b2, d2 = y
        if d1 == d2:
            return _norm_gauss(a1 + a2, b1 + b2, d1)
        return _norm_gauss(a1 * d2 + a2 * d1, b1 * d2 + b2 * d1, d1 * d2)

    def _sub(self, x, y):
        a1, b1, d1 = x
        a2, b2, d2 = y
        if d1 == d2:
            return _norm_gauss(a1 - a2, b1 - b2, d1)
        return _norm_gauss(a1 * d2 - a2 * d1, b1 * d2 - b2 * d1, d1 * d2)

    def _mul(self, x, y):
        a1, b1, d1 = x
        a2, b2, d2 = y
        if not b1 and not b2:
            return _norm_gauss(a1 * a2, 0, d1 * d2)
        return _norm_gauss(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1, d1 * d2)

    def _neg(self, x):
        return (-x[0], -x[1], x[2])

    def _theta(self, x):
        return (x[0], -x[1], x[2])

    def _inv(self, x):
        a, b, d = x
        n = a * a + b * b
        if n == 0:
            raise NotInvertible("division by zero")
        return _norm_gauss(a * d, -b * d, n)

    def _is_zero(self, x):
        return x[0] == 0 and x[1] == 0

    def _from_int(self, n):
        return (n, 0, 1)

    def _embed(self, x):
        if isinstance(x.ring, GaussianRationals) or isinstance(x.ring, Rationals):
            if isinstance(x.ring, Rationals):
                return _norm_gauss(x.v.numerator, 0, x.v.denominator)
            return x.v
        return None

    def _format(self, x):
        a, b, d = x
        re_part = Fraction(a, d)
        im_part = Fraction(b, d)
        if im_part == 0:
            return str(re_part)
        if im_part == 1:
            im = "i"
        elif im_part == -1:
            im = "-i"
        elif im_part.denominator == 1:
            im = f"{im_part}i"
        else:
            im = f"({im_part})i"
        if re_part == 0:
            return im
        sign = "" if im.startswith("-") else "+"
        return f"{re_part}{sign}{im}"

    def element(self, re, im=0) -> RingElement:
        re, im = Fraction(re), Fraction(im)
        d = re.denominator * im.denominator // math.gcd(re.denominator, im.denominator)
        return RingElement(self, _norm_gauss(int(re * d), int(im * d), d))

    def antifixed_unit(self):
        return RingElement(self, (0, 1, 1))

    def named_elements(self):
        names = super().named_elements()
        names["i"] = RingElement(self, (0, 1, 1))
        return names

    def random_element(self, rng):
        d = rng.choice((1, 1, 2, 3, 4, 6))
        return RingElement(self, _norm_gauss(rng.randint(-6, 6), rng.randint(-6, 6), d))

    def reduction(self, attempt=0):
        p = _split_prime(lambda q: q % 4 == 1, attempt)
        s = sqrt_mod(-1, p)

        def image(x):
            a, b, d = x
            if d % p == 0:
                raise NotInvertible(f"denominator {d} vanishes mod {p}")
            return [(a + b * s) * _invmod(d, p) % p]

        return Reduction(p, 1, (0,), image, False)


class LocalizedGaussianIntegers(GaussianRationals):
    """Z[i][1/N]: Gaussian rationals whose reduced denominator only has the
    prime factors of N.  Shares payloads with ``GaussianRationals`` so
    membership inside the fraction field is a denominator check."""

    def __init__(self, primes: tuple[int, ...] = (2, 3)) -> None:
        self.primes = tuple(sorted(primes))
        self.descriptor = f"gaussian-integers[1/{math.prod(self.primes)}]"
        self.has_half = 2 in self.primes
        self.has_third = 3 in self.primes
        self.is_field = False

    def contains_payload(self, x) -> bool:
        d = x[2]
        for p in self.primes:
            while d % p == 0:
                d //= p
        return d == 1

    def _inv(self, x):
        y = super()._inv(x)
        if not self.contains_payload(y):
            raise NotInvertible(f"{self._format(x)} is not a unit in {self.descriptor}")
        return y

    def _embed(self, x):
        payload = super()._embed(x)
        if payload is not None and not self.contains_payload(payload):
            raise RingMismatch(f"{x} does not lie in {self.descriptor}")
        return payload

    def random_element(self, rng):
        d = rng.choice((1, 1, 2, 3, 4, 6))
        return RingElement(self, _norm_gauss(rng.randint(-6, 6), rng.randint(-6, 6), d))


# ---------------------------------------------------------------------------
# finite fields F_{p^{2k}} with theta = Frobenius x -> x^{p^k}


def _poly_mulmod(a: list[int], b: list[int], modpoly: list[int], p: int) -> list[int]:
    """a*b mod (monic) modpoly over F_p; modpoly lists all m+1 coefficients."""
    m = len(modpoly) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for deg in range(len(prod) - 1, m - 1, -1):
        c = prod[deg]
        if c:
            for j in range(m + 1):
                prod[deg - m + j] = (prod[deg - m + j] - c * modpoly[j]) % p
    prod = prod[:m] + [0] * max(0, m - len(prod))
    return prod


def _first_primitive_poly(p: int, m: int) -> list[int]:
    """Lexicographically first monic primitive polynomial of degree m over F_p."""
    q = p**m
    for code in range(p**m):
        lower = [(code // p**j) % p for j in range(m)]
        if lower[0] == 0:
            continue
        modpoly = lower + [1]
        x = [0, 1] + [0] * (m - 2) if m > 1 else [(-lower[0]) % p]
        power = list(x)
        order = 1
        one = [1] + [0] * (m - 1)
        while power != one and order < q:
            power = _poly_mulmod(power, x, modpoly, p)
            order += 1
        if order == q - 1:
            return modpoly
    raise DescriptorError(f"no primitive polynomial found for F_{p}^{m}")


class FiniteFieldSq(InvolutiveRing):
    """F_{p^{2k}} with theta the order-2 Frobenius x -> x^{p^k}.

    Elements are residue polynomials in the stored primitive element ``g``;
    arithmetic goes through exp/log tables.
    """

    def __init__(self, p: int, k: int) -> None:
        if p < 2 or any(p % d == 0 for d in range(2, int(math.isqrt(p)) + 1)):
            raise DescriptorError(f"gf({p},{k}): {p} is not prime")
        if k < 1:
            raise DescriptorError(f"gf({p},{k}): k must be positive")
        self.p, self.k = p, k
        self.m = 2 * k
        self.q = p**self.m
        if self.q > 1 << 20:
            raise DescriptorError(f"gf({p},{k}) is too large for table arithmetic")
        self.descriptor = f"gf({p},{k})"
        self.characteristic = p
        self.has_half = p != 2
        self.has_third = p != 3
        self.is_field = True
        self.modpoly = _first_primitive_poly(p, self.m)
        q, m = self.q, self.m
        self._exp = [0] * (q - 1)
        self._log = [None] * q
        power = [1] + [0] * (m - 1)
        g = [0, 1] + [0] * (m - 2)
        for j in range(q - 1):
            code = self._encode(power)
            self._exp[j] = code
            self._log[code] = j
            power = _poly_mulmod(power, g, self.modpoly, p)
        self._zero = 0
        self._one = 1
        self._frob = p**k

    def _encode(self, digits):
        code = 0
        for c in reversed(digits):
            code = code * self.p + c
        return code

    def digits(self, code: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.m):
            out.append(code % p)
            code //= p
        return out

    def _add(self, x, y):
        p = self.p
        code, scale = 0, 1
        while x or y:
            code += ((x % p + y % p) % p) * scale
            x //= p
            y //= p
            scale *= p
        return code

    def _neg(self, x):
        p = self.p
        code, scale = 0, 1
        while x:
            code += ((-x) % p) * scale
            x //= p
            scale *= p
        return code

    def _sub(self, x, y):
        return self._add(x, self._neg(y))

    def _mul(self, x, y):
        if not x or not y:
            return 0
        return self._exp[(self._log[x] + self._log[y]) % (self.q - 1)]

    def _theta(self, x):
        if not x:
            return 0
        return self._exp[(self._log[x] * self._frob) % (self.q - 1)]

    def _inv(self, x):
        if not x:
            raise NotInvertible("division by zero")
        return self._exp[(-self._log[x]) % (self.q - 1)]

    def _from_int(self, n):
        return n % self.p

    def _format(self, x):
        if x == 0:
            return "0"
        terms = []
        for deg, c in reversed(list(enumerate(self.digits(x)))):
            if not c:
                continue
            if deg == 0:
                terms.append(str(c))
            else:
                mono = "g" if deg == 1 else f"g^{deg}"
                terms.append(mono if c == 1 else f"{c}{mono}")
        return "+".join(terms)

    def generator(self) -> RingElement:
        return RingElement(self, self._exp[1 % (self.q - 1)])

    def power_of_generator(self, j: int) -> RingElement:
        return RingElement(self, self._exp[j % (self.q - 1)])

    def elements(self) -> list[RingElement]:
        return [RingElement(self, c) for c in range(self.q)]

    def antifixed_unit(self):
        for j in range(self.q - 1):
            code = self._exp[j]
            if self._theta(code) == self._neg(code):
                return RingElement(self, code)
        raise NoAntifixedUnit(f"{self.descriptor} has no invertible antifixed element")

    def named_elements(self):
        names = super().named_elements()
        names["g"] = self.generator()
        return names

    def random_element(self, rng):
        return RingElement(self, rng.randrange(self.q))

    def reduction(self, attempt=0):
        modulus = tuple((-c) % self.p for c in self.modpoly[:-1])
        return Reduction(self.p, self.m, modulus, self.digits, True)


# ---------------------------------------------------------------------------
# quadratic extensions base[a]/(a^2 - d), theta(a) = -a


def _wrap(s: str) -> str:
    """Parenthesize a coefficient unless it is a plain integer."""
    return s if re.fullmatch(r"-?\d+", s) else f"({s})"


class QuadraticExt(InvolutiveRing):
    def __init__(self, base: InvolutiveRing, d: int) -> None:
        self.base = base
        self.d_int = d
        self.d = base.coerce(d)
        if self.d.bar() != self.d:
            raise DescriptorError("quad(base, d) needs theta(d) = d")
        self.descriptor = f"quad({base.descriptor},{d})"
        self.has_half = base.has_half
        self.has_third = base.has_third
        self.characteristic = base.characteristic
        self.is_field = False
        self._zero = (base.zero, base.zero)
        self._one = (base.one, base.zero)

    def _add(self, x, y):
        return (x[0] + y[0], x[1] + y[1])

    def _sub(self, x, y):
        return (x[0] - y[0], x[1] - y[1])

    def _mul(self, x, y):
        x0, x1 = x
        y0, y1 = y
        return (x0 * y0 + self.d * (x1 * y1), x0 * y1 + x1 * y0)

    def _neg(self, x):
        return (-x[0], -x[1])

    def _theta(self, x):
        return (x[0].bar(), -(x[1].bar()))

    def _inv(self, x):
        x0, x1 = x
        n = x0 * x0 - self.d * (x1 * x1)
        n_inv = n.inverse()
        return (x0 * n_inv, -(x1 * n_inv))

    def _is_zero(self, x):
        return x[0].is_zero() and x[1].is_zero()

    def _from_int(self, n):
        return (self.base.coerce(n), self.base.zero)

    def _embed(self, x):
        try:
            return (self.base.coerce(x), self.base.zero)
        except RingMismatch:
            return None

    def _format(self, x):
        x0, x1 = x
        if x1.is_zero():
            return str(x0)
        lin = "a" if x1 == 1 else ("-a" if x1 == -1 else f"{_wrap(str(x1))}a")
        if x0.is_zero():
            return lin
        sign = "" if lin.startswith("-") else "+"
        return f"{x0}{sign}{lin}"

    def antifixed_unit(self):
        a = RingElement(self, (self.base.zero, self.base.one))
        if not self.is_unit(a):
            raise NoAntifixedUnit(f"a is not invertible in {self.descriptor}")
        return a

    def named_elements(self):
        names = {k: self.coerce(v) for k, v in self.base.named_elements().items()}
        names.update(super().named_elements())
        return names

    def random_element(self, rng):
        return RingElement(self, (self.base.random_element(rng), self.base.random_element(rng)))

    def reduction(self, attempt=0):
        if not isinstance(self.base, Rationals):
            return None
        d = self.d_int
        p = _split_prime(lambda q: d % q != 0 and sqrt_mod(d, q) is not None, attempt)
        s = sqrt_mod(d, p)

        def image(x):
            x0, x1 = x[0].v, x[1].v
            den = x0.denominator * x1.denominator
            if den % p == 0:
                raise NotInvertible(f"denominator {den} vanishes mod {p}")
            return [(x0.numerator * _invmod(x0.denominator, p) + s * x1.numerator * _invmod(x1.denominator, p)) % p]

        return Reduction(p, 1, (0,), image, False)


# ---------------------------------------------------------------------------
# polynomial rings base[t] and truncations base[t]/(t^k), theta(t) = t


_VAR_NAMES = ("t", "u", "v", "w", "s")


def _used_vars(ring: InvolutiveRing) -> set[str]:
    used = set()
    while isinstance(ring, (PolyExt, QuadraticExt)):
        if isinstance(ring, PolyExt):
            used.add(ring.var)
        ring = ring.base
    return used


class PolyExt(InvolutiveRing):
    """base[t] with theta acting on coefficients and fixing t."""

    truncation: int | None = None

    def __init__(self, base: InvolutiveRing, var: str | None = None) -> None:
        self.base = base
        if var is None:
            used = _used_vars(base)
            var = next(name for name in _VAR_NAMES if name not in used)
        self.var = var
        self.descriptor = f"poly({base.descriptor})"
        self.has_half = base.has_half
        self.has_third = base.has_third
        self.characteristic = base.characteristic
        self.is_field = False
        self._zero = ()
        self._one = (base.one,)

    def _trim(self, coeffs):
        coeffs = list(coeffs)
        if self.truncation is not None:
            del coeffs[self.truncation:]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        return tuple(coeffs)

    def _add(self, x, y):
        if len(x) < len(y):
            x, y = y, x
        out = list(x)
        for i, c in enumerate(y):
            out[i] = out[i] + c
        return self._trim(out)

    def _sub(self, x, y):
        out = list(x) + [self.base.zero] * max(0, len(y) - len(x))
        for i, c in enumerate(y):
            out[i] = out[i] - c
        return self._trim(out)

    def _mul(self, x, y):
        if not x or not y:
            return ()
        n = len(x) + len(y) - 1
        if self.truncation is not None:
            n = min(n, self.truncation)
        out = [None] * n
        for i, a in enumerate(x):
            if i >= n:
                break
            if a.is_zero():
                continue
            for j, b in enumerate(y):
                if i + j >= n:
                    break
                term = a * b
                out[i + j] = term if out[i + j] is None else out[i + j] + term
        zero = self.base.zero
        return self._trim(zero if c is None else c for c in out)

    def _neg(self, x):
        return tuple(-c for c in x)

    def _theta(self, x):
        return tuple(c.bar() for c in x)

    def _inv(self, x):
        if len(x) == 1:
            return (x[0].inverse(),)
        raise NotInvertible("non-constant polynomial is not a unit")

    def _is_zero(self, x):
        return not x

    def _from_int(self, n):
        return self._trim((self.base.coerce(n),))

    def _embed(self, x):
        try:
            return self._trim((self.base.coerce(x),))
        except RingMismatch:
            return None

    def _format(self, x):
        if not x:
            return "0"
        terms = []
        for deg in range(len(x) - 1, -1, -1):
            c = x[deg]
            if c.is_zero():
                continue
            if deg == 0:
                terms.append(str(c))
                continue
            mono = self.var if deg == 1 else f"{self.var}^{deg}"
            cs = str(c)
            if cs == "1":
                terms.append(mono)
            elif cs == "-1":
                terms.append(f"-{mono}")
            else:
                terms.append(f"{_wrap(cs)}{mono}")
        out = terms[0]
        for term in terms[1:]:
            out += term if term.startswith("-") else f"+{term}"
        return out

    def variable(self) -> RingElement:
        return RingElement(self, self._trim((self.base.zero, self.base.one)))

    def coefficient(self, x: RingElement, degree: int) -> RingElement:
        coeffs = x.v
        return coeffs[degree] if degree < len(coeffs) else self.base.zero

    def from_coefficients(self, coeffs) -> RingElement:
        return RingElement(self, self._trim(self.base.coerce(c) for c in coeffs))

    def antifixed_unit(self):
        return self.coerce(self.base.antifixed_unit())

    def named_elements(self):
        names = {k: self.coerce(v) for k, v in self.base.named_elements().items()}
        names.update(super().named_elements())
        names[self.var] = self.variable()
        return names

    def random_element(self, rng):
        degree = rng.randint(0, 2 if self.truncation is None else self.truncation - 1)
        return self.from_coefficients(self.base.random_element(rng) for _ in range(degree + 1))


class TruncatedPoly(PolyExt):
    """base[t]/(t^k): the ring of k-jets, used to extract tangent vectors."""

    def __init__(self, base: InvolutiveRing, k: int, var: str | None = None) -> None:
        if k < 1:
            raise DescriptorError("trunc(base, k) needs k >= 1")
        self.truncation = k
        super().__init__(base, var)
        self.k = k
        self.descriptor = f"trunc({base.descriptor},{k})"

    def _inv(self, x):
        if not x:
            raise NotInvertible("division by zero")
        c0_inv = x[0].inverse()
        # power series inverse up to t^k
        inv = [c0_inv]
        for n in range(1, self.k):
            acc = self.base.zero
            for j in range(1, min(n, len(x) - 1) + 1):
                acc = acc + x[j] * inv[n - j]
            inv.append(-(acc * c0_inv))
        return self._trim(inv)


# ---------------------------------------------------------------------------
# helpers


def _invmod(d: int, p: int) -> int:
    d %= p
    if d == 0:
        raise NotInvertible(f"not invertible mod {p}")
    return pow(d, -1, p)


# Reduction primes stay below 2^20 so that float64 dot products of residue
# vectors up to length 2^13 are exact without limb splitting.
_PRIME_CEILING = 1 << 20


def _split_prime(predicate, attempt: int) -> int:
    """The attempt-th prime below the ceiling (counting downward) satisfying predicate."""
    p = _PRIME_CEILING
    found = -1
    while True:
        p = prevprime(p)
        if predicate(p):
            found += 1
            if found == attempt:
                return p


# ---------------------------------------------------------------------------
# constructors (memoized: one ring object per descriptor)


@lru_cache(maxsize=None)
def rationals() -> Rationals:
    return Rationals()


@lru_cache(maxsize=None)
def gaussian_rationals() -> GaussianRationals:
    return GaussianRationals()


@lru_cache(maxsize=None)
def localized_gaussian_integers(primes: tuple[int, ...] = (2, 3)) -> LocalizedGaussianIntegers:
    return LocalizedGaussianIntegers(primes)


@lru_cache(maxsize=None)
def finite_field_sq(p: int, k: int = 1) -> FiniteFieldSq:
    return FiniteFieldSq(p, k)


@lru_cache(maxsize=None)
def quadratic_ext(base: InvolutiveRing, d: int) -> QuadraticExt:
    return QuadraticExt(base, d)


@lru_cache(maxsize=None)
def poly_ext(base: InvolutiveRing, var: str | None = None) -> PolyExt:
    return PolyExt(base, var)


@lru_cache(maxsize=None)
def truncated_poly(base: InvolutiveRing, k: int, var: str | None = None) -> TruncatedPoly:
    return TruncatedPoly(base, k, var)


_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_\-]*(?:\[1/\d+\])?|-?\d+|[(),])")


def parse_ring(text: str) -> InvolutiveRing:
    """Parse a ring descriptor such as ``trunc(gaussian-rationals,3)``.

    >>> parse_ring("gf(3,1)").descriptor
    'gf(3,1)'
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            raise DescriptorError(f"bad ring descriptor {text!r} at offset {pos}")
        tokens.append(match.group(1))
        pos = match.end()
    ring, rest = _parse_ring_tokens(tokens, text)
    if rest:
        raise DescriptorError(f"trailing input in ring descriptor {text!r}")
    return ring


def _expect(tokens, tok, text):
    if not tokens or tokens[0] != tok:
        raise DescriptorError(f"expected {tok!r} in ring descriptor {text!r}")
    return tokens[1:]


def _int_token(tokens, text):
    if not tokens:
        raise DescriptorError(f"expected an integer in {text!r}")
    try:
        return int(tokens[0]), tokens[1:]
    except ValueError:
        raise DescriptorError(f"expected an integer in {text!r}, got {tokens[0]!r}") from None


def _parse_ring_tokens(tokens, text):
    if not tokens:
        raise DescriptorError(f"empty ring descriptor {text!r}")
    head, rest = tokens[0].lower().replace("_", "-"), tokens[1:]
    if head in ("rationals", "q", "qq"):
        return rationals(), rest
    if head in ("gaussian-rationals", "q(i)", "qi"):
        return gaussian_rationals(), rest
    match = re.fullmatch(r"(?:gaussian-integers|zi)\[1/(\d+)\]", head)
    if match:
        n = int(match.group(1))
        primes = tuple(p for p in range(2, n + 1) if n % p == 0 and all(p % d for d in range(2, p)))
        if not primes:
            raise DescriptorError(f"bad localization in {text!r}")
        return localized_gaussian_integers(primes), rest
    if head in ("gf", "finite-field-sq"):
        rest = _expect(rest, "(", text)
        p, rest = _int_token(rest, text)
        k = 1
        if rest and rest[0] == ",":
            k, rest = _int_token(rest[1:], text)
        rest = _expect(rest, ")", text)
        return finite_field_sq(p, k), rest
    if head in ("quad", "quadratic-ext"):
        rest = _expect(rest, "(", text)
        base, rest = _parse_ring_tokens(rest, text)
        rest = _expect(rest, ",", text)
        d, rest = _int_token(rest, text)
        rest = _expect(rest, ")", text)
        return quadratic_ext(base, d), rest
    if head in ("poly", "poly-ext"):
        rest = _expect(rest, "(", text)
        base, rest = _parse_ring_tokens(rest, text)
        rest = _expect(rest, ")", text)
        return poly_ext(base), rest
    if head in ("trunc", "truncated-poly"):
        rest = _expect(rest, "(", text)
        base, rest = _parse_ring_tokens(rest, text)
        rest = _expect(rest, ",", text)
        k, rest = _int_token(rest, text)
        rest = _expect(rest, ")", text)
        return truncated_poly(base, k), rest
    raise DescriptorError(f"unknown ring {tokens[0]!r} in {text!r}")


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}


def _evaluate(ring: InvolutiveRing, text: str) -> RingElement:
    """Evaluate an arithmetic expression like ``-a^2/2`` or ``1/2+i`` in ``ring``."""
    names = ring.named_elements()
    # implicit products as printed by str(): 2i, (1/2)i, (1+g)(2+g)
    source = re.sub(r"([\d)])\s*([A-Za-z(])", r"\1*\2", text.replace("^", "**"))
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise DescriptorError(f"cannot parse element {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return ring.coerce(node.value)
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise DescriptorError(f"unknown name {node.id!r} for ring {ring.descriptor}")
            return names[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            value = ev(node.operand)
            return -value if isinstance(node.op, ast.USub) else value
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                    raise DescriptorError(f"exponent must be an integer literal in {text!r}")
                return ev(node.left) ** node.right.value
            op = _BINOPS.get(type(node.op))
            if op is not None:
                return op(ev(node.left), ev(node.right))
        raise DescriptorError(f"unsupported syntax in element {text!r}")

    return ev(tree)


# ---------------------------------------------------------------------------
# module-level operations


def theta(x: RingElement) -> RingElement:
    return x.bar()


def split_fixed_antifixed(x: RingElement) -> tuple[RingElement, RingElement]:
    """Return (u, v) with u fixed by theta, v negated by theta, and u + v = x."""
    ring = x.ring
    if not ring.has_half:
        raise NoHalf(f"2 is not invertible in {ring.descriptor}")
    half = ring.coerce(Fraction(1, 2))
    xb = x.bar()
    return (x + xb) * half, (x - xb) * half


def antifixed_unit(ring: InvolutiveRing) -> RingElement:
    return ring.antifixed_unit()
