"""Exact base fields: prime fields F_p, extension fields F_{p^k}, and Q.

Every field works on numpy arrays elementwise (and on plain scalars), so the
linear algebra in :mod:`derived_tame.linalg` can be written once.  Finite
field elements are encoded as integers ``0..q-1``; for ``F_{p^k}`` the code of
``sum c_i w^i`` is ``sum c_i p^i``, so the prime subfield keeps its encoding
under field extension.  Rationals are numpy object arrays of ``Fraction``.
"""

from __future__ import annotations

import itertools
import math
import re
from fractions import Fraction
from functools import lru_cache

import numpy as np


def _factor_prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ValueError(f"field order must be >= 2, got {q}")
    p = 2
    while p * p <= q:
        if q % p == 0:
            break
        p += 1
    else:
        p = q
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    if r != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, k


class Field:
    """Common interface.  Subclasses fill in the arithmetic."""

    order: int | None = None
    characteristic: int = 0
    dtype: object = object

    # --- construction -----------------------------------------------------
    def zeros(self, shape) -> np.ndarray:
        raise NotImplementedError

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out

    def convert(self, value):
        """Map an int, Fraction or numeric string into the field."""
        raise NotImplementedError

    def asarray(self, values) -> np.ndarray:
        arr = np.asarray(values, dtype=object)
        flat = [self.convert(v) for v in arr.ravel()]
        out = self.zeros(arr.shape)
        if out.size:
            out.ravel()[:] = flat
        return out

    # --- arithmetic (elementwise, broadcasting) ---------------------------
    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def is_zero(self, a):
        return a == 0

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sum(self, a: np.ndarray, axis=None):
        raise NotImplementedError

    def power(self, a, n: int):
        result = self.one
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    # --- enumeration and sampling -----------------------------------------
    def elements(self):
        raise TypeError(f"{self} is infinite")

    def nonzero_elements(self):
        return [x for x in self.elements() if not self.is_zero(x)]

    def random(self, shape, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def to_json(self, x):
        raise NotImplementedError

    def fmt(self, x) -> str:
        return str(self.to_json(x))

    def __eq__(self, other):
        return type(self) is type(other) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return self.name

    @property
    def name(self) -> str:
        raise NotImplementedError


class PrimeField(Field):
    dtype = np.int64

    def __init__(self, p: int):
        pp, k = _factor_prime_power(p)
        if k != 1:
            raise ValueError(f"{p} is not prime")
        if p > 46337:
            raise ValueError("prime fields are limited to p < 46337 (int64 matmul)")
        self.p = p
        self.order = p
        self.characteristic = p
        self.one = 1
        self.zero = 0
        inv = np.zeros(p, dtype=np.int64)
        for x in range(1, p):
            inv[x] = pow(x, p - 2, p)
        self._inv = inv
        self.primitive_element = _find_generator_prime(p)

    @property
    def name(self) -> str:
        return f"F{self.p}"

    def zeros(self, shape):
        return np.zeros(shape, dtype=np.int64)

    def convert(self, value):
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, (np.integer,)):
            value = int(value)
        if isinstance(value, Fraction):
            den = value.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"{value} has no image in {self.name}")
            return (value.numerator * pow(den, self.p - 2, self.p)) % self.p
        if isinstance(value, int):
            return value % self.p
        raise TypeError(f"cannot convert {value!r} into {self.name}")

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero")
        out = self._inv[a]
        return int(out) if np.ndim(out) == 0 else out

    def matmul(self, a, b):
        return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % self.p

    def sum(self, a, axis=None):
        return np.asarray(a, dtype=np.int64).sum(axis=axis) % self.p

    def elements(self):
        return list(range(self.p))

    def random(self, shape, rng):
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    def to_json(self, x):
        return int(x)


class ExtensionField(Field):
    """F_{p^k} with table arithmetic; intended for small orders."""

    dtype = np.int64

    def __init__(self, q: int):
        p, k = _factor_prime_power(q)
        if k < 2:
            raise ValueError("use PrimeField for prime orders")
        if q > 4096:
            raise ValueError("extension fields are limited to order <= 4096")
        self.p, self.k, self.order = p, k, q
        self.characteristic = p
        self.one, self.zero = 1, 0
        self.modulus = _primitive_polynomial(p, k)
        digits = np.array([[(x // p**i) % p for i in range(k)] for x in range(q)], dtype=np.int64)
        weights = p ** np.arange(k, dtype=np.int64)
        self._add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        self._neg = ((-digits) % p) @ weights
        # the residue class of w has code p and generates the unit group
        log = np.full(q, -1, dtype=np.int64)
        exp = np.zeros(q - 1, dtype=np.int64)
        cur = np.zeros(k, dtype=np.int64)
        cur[0] = 1
        for e in range(q - 1):
            code = int(cur @ weights)
            exp[e] = code
            log[code] = e
            cur = _mul_by_w(cur, self.modulus, p)
        mul = np.zeros((q, q), dtype=np.int64)
        nz = np.arange(1, q)
        mul[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :]) % (q - 1)]
        self._mul = mul
        inv = np.zeros(q, dtype=np.int64)
        inv[nz] = exp[(-log[nz]) % (q - 1)]
        self._inv = inv
        self.primitive_element = p

    @property
    def name(self) -> str:
        return f"F{self.order}"

    def zeros(self, shape):
        return np.zeros(shape, dtype=np.int64)

    def convert(self, value):
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, np.integer):
            value = int(value)
        if isinstance(value, Fraction):
            den = value.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"{value} has no image in {self.name}")
            return (value.numerator * pow(den, self.p - 2, self.p)) % self.p
        if isinstance(value, int):
            return value % self.p
        raise TypeError(f"cannot convert {value!r} into {self.name}")

    def _out(self, x):
        return int(x) if np.ndim(x) == 0 else x

    def add(self, a, b):
        return self._out(self._add[a, b])

    def sub(self, a, b):
        return self._out(self._add[a, self._neg[b]])

    def neg(self, a):
        return self._out(self._neg[a])

    def mul(self, a, b):
        return self._out(self._mul[a, b])

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero")
        return self._out(self._inv[a])

    def matmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for l in range(a.shape[1]):
            out = self._add[out, self._mul[a[:, l, None], b[None, l, :]]]
        return out

    def sum(self, a, axis=None):
        a = np.asarray(a, dtype=np.int64)
        if axis is None:
            a = a.ravel()
            axis = 0
        a = np.moveaxis(a, axis, 0)
        out = np.zeros(a.shape[1:], dtype=np.int64)
        for row in a:
            out = self._add[out, row]
        return self._out(out)

    def elements(self):
        return list(range(self.order))

    def random(self, shape, rng):
        return rng.integers(0, self.order, size=shape, dtype=np.int64)

    def to_json(self, x):
        return int(x)

    def fmt(self, x) -> str:
        x = int(x)
        parts = []
        for i in range(self.k):
            c = (x // self.p**i) % self.p
            if c:
                parts.append(str(c) if i == 0 else (f"{c}*w^{i}" if c != 1 else f"w^{i}"))
        return "+".join(parts) or "0"


_frac_inv = np.frompyfunc(lambda x: Fraction(1) / x, 1, 1)


class RationalField(Field):
    """Exact rationals as object arrays of ``Fraction`` (integral entries may be plain ints)."""

    dtype = object
    order = None
    characteristic = 0

    def __init__(self):
        self.one = Fraction(1)
        self.zero = Fraction(0)

    @property
    def name(self) -> str:
        return "Q"

    def zeros(self, shape):
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out

    def convert(self, value):
        if isinstance(value, np.integer):
            value = int(value)
        if isinstance(value, (int, Fraction, str)):
            return Fraction(value)
        raise TypeError(f"cannot convert {value!r} into Q")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if isinstance(a, np.ndarray):
            if np.any(a == 0):
                raise ZeroDivisionError("inverse of zero")
            return _frac_inv(a)
        return 1 / Fraction(a)

    def is_zero(self, a):
        return a == 0

    def matmul(self, a, b):
        a = np.asarray(a, dtype=object)
        b = np.asarray(b, dtype=object)
        if a.shape[1] == 0 or a.size == 0 or b.size == 0:
            return self.zeros((a.shape[0], b.shape[1]))
        # clear denominators so numpy multiplies plain Python ints
        ia, da = _to_integers(a)
        ib, db = _to_integers(b)
        ma = max(abs(int(x)) for x in ia.ravel())
        mb = max(abs(int(x)) for x in ib.ravel())
        if ma * mb * a.shape[1] < 2**62:
            out = ia.astype(np.int64).dot(ib.astype(np.int64)).astype(object)
        else:
            out = ia.dot(ib)
        den = da * db
        return _frac_of(out, den)

    def sum(self, a, axis=None):
        a = np.asarray(a, dtype=object)
        if axis is None:
            return sum(a.ravel(), Fraction(0))
        if a.shape[axis] == 0:
            shape = a.shape[:axis] + a.shape[axis + 1:]
            return self.zeros(shape)
        return a.sum(axis=axis)

    def random(self, shape, rng, bound: int = 5):
        vals = rng.integers(-bound, bound + 1, size=shape)
        return self.asarray(vals.tolist()) if np.ndim(vals) else Fraction(int(vals))

    def to_json(self, x):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _to_integers(a: np.ndarray) -> tuple[np.ndarray, int]:
    dens = {x.denominator if isinstance(x, Fraction) else 1 for x in a.ravel()}
    den = math.lcm(*dens) if dens else 1
    conv = np.frompyfunc(lambda x: (x.numerator * (den // x.denominator)) if isinstance(x, Fraction) else int(x) * den, 1, 1)
    return conv(a).astype(object), den


def _frac_of(a: np.ndarray, den: int) -> np.ndarray:
    # integral entries stay Python ints (exact, and much cheaper than Fraction)
    if den == 1:
        return np.frompyfunc(int, 1, 1)(a).astype(object)
    conv = np.frompyfunc(lambda x: int(x) // den if int(x) % den == 0 else Fraction(int(x), den), 1, 1)
    return conv(a).astype(object)


def _find_generator_prime(p: int) -> int:
    if p == 2:
        return 1
    factors = [f for f in range(2, p) if (p - 1) % f == 0 and all(f % d for d in range(2, f))]
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in factors):
            return g
    raise AssertionError("no generator")


def _mul_by_w(vec: np.ndarray, modulus: tuple[int, ...], p: int) -> np.ndarray:
    # modulus is monic of degree k, coefficients low to high (length k + 1)
    k = len(vec)
    top = vec[-1]
    out = np.zeros(k, dtype=np.int64)
    out[1:] = vec[:-1]
    out = (out - top * np.array(modulus[:k], dtype=np.int64)) % p
    return out


def _primitive_polynomial(p: int, k: int) -> tuple[int, ...]:
    """Smallest monic polynomial of degree k over F_p whose root generates F_{p^k}^*."""
    q = p**k
    for tail in itertools.product(range(p), repeat=k):
        coeffs = tuple(tail[::-1]) + (1,)
        if coeffs[0] == 0:
            continue
        cur = np.zeros(k, dtype=np.int64)
        cur[0] = 1
        order = 0
        while True:
            cur = _mul_by_w(cur, coeffs, p)
            order += 1
            if cur[0] == 1 and not cur[1:].any():
                break
            if order > q:
                break
        if order == q - 1:
            return coeffs
    raise AssertionError(f"no primitive polynomial of degree {k} over F_{p}")


@lru_cache(maxsize=None)
def finite_field(q: int) -> Field:
    _, k = _factor_prime_power(q)
    return PrimeField(q) if k == 1 else ExtensionField(q)


QQ = RationalField()


def parse_field(spec: str) -> Field:
    """``"Q"`` or ``"F<q>"`` (q a prime power), case-insensitive."""
    s = spec.strip()
    if s.upper() in ("Q", "QQ"):
        return QQ
    m = re.fullmatch(r"[Ff](?:_)?(\d+)", s)
    if not m:
        raise ValueError(f"unknown field {spec!r}; expected 'Q' or 'F<q>'")
    return finite_field(int(m.group(1)))
