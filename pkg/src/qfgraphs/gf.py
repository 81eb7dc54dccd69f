"""Finite fields GF(p^m) in a polynomial basis.

Elements are encoded canonically as integers ``e = sum(c_i * p**i)`` where
``c_0 + c_1 x + ... + c_{m-1} x^{m-1}`` is the residue modulo the field's
irreducible modulus.  All heavy lifting happens on those integer encodings
through lookup tables (numpy arrays), which is what the enumeration kernels
in :mod:`qfgraphs.graph` rely on.  :class:`FieldElement` is the value-semantic
wrapper for interactive use.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DegreeMismatch,
    DivisionByZero,
    FieldMismatch,
    NoNonSquare,
    NotPrime,
    ParseError,
    ReducibleModulus,
    WrongCharacteristic,
)

# Tables are f x f; beyond this they stop being cheap.
MAX_ORDER = 2048


class SquareClass(enum.Enum):
    ZERO = "zero"
    SQUARE = "square"
    NONSQUARE = "nonsquare"

    def __mul__(self, other):
        if not isinstance(other, SquareClass):
            return NotImplemented
        if SquareClass.ZERO in (self, other):
            return SquareClass.ZERO
        return SquareClass.SQUARE if self is other else SquareClass.NONSQUARE


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_power(f: int):
    """Return ``(p, m)`` with ``f == p**m``, or None if f is not a prime power."""
    if f < 2:
        return None
    p = next(d for d in itertools.count(2) if f % d == 0)
    m = 0
    while f % p == 0:
        f //= p
        m += 1
    return (p, m) if f == 1 else None


def prime_powers(lo: int, hi: int) -> list[int]:
    return [f for f in range(max(lo, 2), hi + 1) if prime_power(f)]


# --- polynomials over GF(p), little-endian coefficient lists ---------------

def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, b, p):
    a = _poly_trim(a)
    b = _poly_trim(b)
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bc) % p
        a = _poly_trim(a)
    return a


def _poly_mulmod(a, b, modulus, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _poly_mod(out, modulus, p)


def is_irreducible(modulus, p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    deg = len(modulus) - 1
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_mod(modulus, list(low) + [1], p):
                return False
    return True


def _least_irreducible(p: int, m: int) -> tuple:
    for low in itertools.product(range(p), repeat=m):
        cand = list(low) + [1]
        if is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("every degree has an irreducible polynomial")


# --- fields -----------------------------------------------------------------

class FieldSpec:
    """The field GF(p^m) with a fixed modulus.

    Build instances with :func:`make_field`.  Integer-level arithmetic
    (``add``, ``mul``, ...) accepts Python ints or numpy integer arrays.
    """

    def __init__(self, p: int, m: int, modulus: tuple):
        self.p = p
        self.m = m
        self.modulus = tuple(modulus)
        self.order = p**m

    # identity ------------------------------------------------------------
    def _key(self):
        return (self.p, self.m, self.modulus)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m}, mod={list(self.modulus)})"

    def spec_string(self) -> str:
        if self.m == 1:
            return f"q={self.p}"
        mod = ",".join(map(str, self.modulus))
        return f"p={self.p},m={self.m},mod={mod}"

    @property
    def char(self) -> int:
        return self.p

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    def __call__(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatch(f"{value!r} is not in {self!r}")
            return value
        value = int(value)
        if not 0 <= value < self.order:
            raise ValueError(f"encoding {value} out of range for {self!r}")
        return FieldElement(self, value)

    def elements(self):
        return [FieldElement(self, e) for e in range(self.order)]

    def coeffs(self, e: int) -> tuple:
        return tuple((e // self.p**i) % self.p for i in range(self.m))

    def from_coeffs(self, coeffs) -> int:
        return sum((c % self.p) * self.p**i for i, c in enumerate(coeffs))

    def from_int(self, n: int) -> int:
        """Encoding of the integer n viewed in the prime subfield."""
        return n % self.p

    # tables ----------------------------------------------------------------
    def _poly_mul_enc(self, x: int, y: int) -> int:
        r = _poly_mulmod(list(self.coeffs(x)), list(self.coeffs(y)), list(self.modulus), self.p)
        return self.from_coeffs(r)

    @cached_property
    def _exp_log(self):
        f = self.order
        if self.m == 1:
            mul = lambda x, y: x * y % self.p  # noqa: E731
        else:
            mul = self._poly_mul_enc
        for g in range(1 if f == 2 else 2, f):
            exp = [1]
            x = g
            while x != 1:
                exp.append(x)
                x = mul(x, g)
            if len(exp) == f - 1:
                break
        exp_arr = np.array(exp, dtype=np.int64)
        log_arr = np.zeros(f, dtype=np.int64)
        log_arr[exp_arr] = np.arange(f - 1)
        return exp_arr, log_arr

    @cached_property
    def add_table(self) -> np.ndarray:
        f, p = self.order, self.p
        if self.m == 1:
            r = np.arange(f)
            return ((r[:, None] + r[None, :]) % p).astype(np.int32)
        digits = np.array([self.coeffs(e) for e in range(f)], dtype=np.int64)
        weights = p ** np.arange(self.m, dtype=np.int64)
        table = np.empty((f, f), dtype=np.int32)
        step = max(1, (1 << 20) // (f * self.m))
        for lo in range(0, f, step):
            block = (digits[lo:lo + step, None, :] + digits[None, :, :]) % p
            table[lo:lo + step] = block @ weights
        return table

    @cached_property
    def mul_table(self) -> np.ndarray:
        f = self.order
        if self.m == 1:
            r = np.arange(f)
            return ((r[:, None] * r[None, :]) % self.p).astype(np.int32)
        exp, log = self._exp_log
        t = exp[(log[:, None] + log[None, :]) % (f - 1)].astype(np.int32)
        t[0, :] = 0
        t[:, 0] = 0
        return t

    @cached_property
    def neg_table(self) -> np.ndarray:
        return np.argmin(self.add_table, axis=1).astype(np.int32)

    @cached_property
    def inv_table(self) -> np.ndarray:
        inv = np.argmax(self.mul_table == 1, axis=1).astype(np.int32)
        inv[0] = -1
        return inv

    @cached_property
    def _pylists(self):
        return (self.add_table.tolist(), self.mul_table.tolist(),
                self.neg_table.tolist(), self.inv_table.tolist())

    # integer-level arithmetic ---------------------------------------------
    def add(self, x, y):
        if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
            return self.add_table[x, y]
        return self._pylists[0][x][y]

    def neg(self, x):
        if isinstance(x, np.ndarray):
            return self.neg_table[x]
        return self._pylists[2][x]

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
            return self.mul_table[x, y]
        return self._pylists[1][x][y]

    def inv(self, x: int) -> int:
        if x == 0:
            raise DivisionByZero("0 has no inverse")
        return self._pylists[3][x]

    def div(self, x: int, y: int) -> int:
        return self.mul(x, self.inv(y))

    def power(self, x: int, e: int) -> int:
        if e < 0:
            x, e = self.inv(x), -e
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            e >>= 1
        return result

    def sum(self, xs) -> int:
        acc = 0
        for x in xs:
            acc = self.add(acc, x)
        return acc

    # square classes and Artin-Schreier ------------------------------------
    def square_class_of(self, x: int) -> SquareClass:
        if x == 0:
            return SquareClass.ZERO
        if self.p == 2:
            return SquareClass.SQUARE
        # Euler's criterion
        if self.power(x, (self.order - 1) // 2) == 1:
            return SquareClass.SQUARE
        return SquareClass.NONSQUARE

    @cached_property
    def is_square_table(self) -> np.ndarray:
        """Boolean array: True at nonzero squares."""
        out = np.zeros(self.order, dtype=bool)
        for x in range(1, self.order):
            out[x] = self.square_class_of(x) is SquareClass.SQUARE
        return out

    @cached_property
    def sqrt_table(self) -> np.ndarray:
        """Least square root of each element, -1 where none exists."""
        out = np.full(self.order, -1, dtype=np.int64)
        for y in range(self.order - 1, -1, -1):
            out[self.mul(y, y)] = y
        return out

    def sqrt(self, x: int):
        r = int(self.sqrt_table[x])
        return None if r < 0 else r

    @cached_property
    def wp_preimage(self) -> np.ndarray:
        """Least y with y^2 + y = x for each x, -1 outside the image."""
        if self.p != 2:
            raise WrongCharacteristic("Artin-Schreier map needs characteristic 2")
        out = np.full(self.order, -1, dtype=np.int64)
        for y in range(self.order - 1, -1, -1):
            out[self.add(self.mul(y, y), y)] = y
        return out

    def in_wp_image(self, x: int) -> bool:
        return bool(self.wp_preimage[x] >= 0)


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    value: int

    def _other(self, other) -> int:
        if not isinstance(other, FieldElement):
            raise FieldMismatch(f"cannot combine {self!r} with {other!r}")
        if other.field != self.field:
            raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
        return other.value

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._other(other)))

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._other(other)))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._other(other)))

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.value, self._other(other)))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.power(self.value, int(e)))

    def inv(self) -> FieldElement:
        return FieldElement(self.field, self.field.inv(self.value))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return f"{self.field!r}({self.value})"


def make_field(p: int, m: int = 1, modulus=None) -> FieldSpec:
    """Validate parameters and build GF(p^m).

    Without an explicit modulus the lexicographically least monic
    irreducible polynomial of degree m is used (``x`` for prime fields).
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if m < 1:
        raise DegreeMismatch("extension degree must be >= 1")
    if p**m > MAX_ORDER:
        raise ValueError(f"field order {p}^{m} exceeds supported maximum {MAX_ORDER}")
    if modulus is None:
        modulus = (0, 1) if m == 1 else _least_irreducible(p, m)
    else:
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != m + 1:
            raise DegreeMismatch(f"modulus must have {m + 1} coefficients")
        if modulus[-1] != 1:
            raise DegreeMismatch("modulus must be monic")
        if not is_irreducible(list(modulus), p):
            raise ReducibleModulus(f"{list(modulus)} is reducible over GF({p})")
    return FieldSpec(p, m, modulus)


def field_of_order(f: int) -> FieldSpec:
    pm = prime_power(f)
    if pm is None:
        raise NotPrime(f"{f} is not a prime power")
    return make_field(*pm)


def parse_field_spec(text: str) -> FieldSpec:
    """Parse ``q=<f>`` or ``p=<p>,m=<m>[,mod=<c0,...,cm>]``."""
    s = text.replace(" ", "")
    m = re.fullmatch(r"q=(\d+)", s)
    if m:
        return field_of_order(int(m.group(1)))
    m = re.fullmatch(r"p=(\d+),m=(\d+)(?:,mod=(\d+(?:,\d+)*))?", s)
    if not m:
        raise ParseError(f"bad field spec {text!r}")
    modulus = None
    if m.group(3):
        modulus = [int(c) for c in m.group(3).split(",")]
    return make_field(int(m.group(1)), int(m.group(2)), modulus)


def square_class(x: FieldElement) -> SquareClass:
    return x.field.square_class_of(x.value)


def nonsquare_witness(field: FieldSpec) -> FieldElement:
    if field.p == 2:
        raise NoNonSquare(f"every element of {field!r} is a square")
    for e in range(1, field.order):
        if field.square_class_of(e) is SquareClass.NONSQUARE:
            return FieldElement(field, e)
    raise AssertionError("odd-order field without non-squares")


def artin_schreier_class(x: FieldElement) -> bool:
    """True iff x = y^2 + y for some y."""
    if x.field.p != 2:
        raise WrongCharacteristic("Artin-Schreier map needs characteristic 2")
    return x.field.in_wp_image(x.value)


def wp_witness(field: FieldSpec) -> FieldElement:
    if field.p != 2:
        raise WrongCharacteristic("Artin-Schreier map needs characteristic 2")
    for e in range(field.order):
        if not field.in_wp_image(e):
            return FieldElement(field, e)
    raise AssertionError("Artin-Schreier map is never surjective on a finite field")


def canonical_witness(field: FieldSpec) -> int:
    """The class representative used by canonical models: a non-square in odd
    characteristic, an element outside the Artin-Schreier image in characteristic 2."""
    if field.p == 2:
        return wp_witness(field).value
    return nonsquare_witness(field).value


# --- linear algebra on encodings ------------------------------------------

def row_reduce(F: FieldSpec, rows):
    """Reduced row echelon form of a list of rows; returns (rows, pivot columns)."""
    M = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(M)) if M[i][c]), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        s = F.inv(M[r][c])
        M[r] = [F.mul(s, x) for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                t = M[i][c]
                M[i] = [F.sub(x, F.mul(t, y)) for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def rank(F: FieldSpec, rows) -> int:
    if not rows:
        return 0
    return len(row_reduce(F, rows)[1])


def det(F: FieldSpec, M) -> int:
    n = len(M)
    A = [list(r) for r in M]
    d = 1
    for c in range(n):
        pr = next((i for i in range(c, n) if A[i][c]), None)
        if pr is None:
            return 0
        if pr != c:
            A[c], A[pr] = A[pr], A[c]
            d = F.neg(d)
        d = F.mul(d, A[c][c])
        s = F.inv(A[c][c])
        for i in range(c + 1, n):
            if A[i][c]:
                t = F.mul(A[i][c], s)
                A[i] = [F.sub(x, F.mul(t, y)) for x, y in zip(A[i], A[c])]
    return d


def solve(F: FieldSpec, M, b):
    """Solve M x = b for square nonsingular M."""
    n = len(M)
    aug = [list(M[i]) + [b[i]] for i in range(n)]
    red, piv = row_reduce(F, aug)
    if piv != list(range(n)):
        raise DivisionByZero("singular system")
    return [red[i][n] for i in range(n)]
