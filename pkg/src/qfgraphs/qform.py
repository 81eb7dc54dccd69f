"""Non-degenerate quadratic forms over GF(p^m).

A form is stored as an upper-triangular coefficient array ``c`` with
``q(x) = sum_{i <= j} c[i][j] x_i x_j``; the polar form
``b(x, y) = q(x + y) - q(x) - q(y)`` is always derived.  Vectors are tuples
of element encodings; :func:`vec_index` maps them to integers in
``[0, f**n)`` with the first coordinate most significant, so index order is
lexicographic order on coordinate tuples.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from itertools import product

import numpy as np

from . import gf
from .errors import (
    AnisotropicForm,
    CapExceeded,
    DegenerateForm,
    DegenerateRestriction,
    DimensionMismatch,
    FieldMismatch,
    IsotropicSplitVector,
    ParseError,
    WrongCharacteristic,
)
from .gf import FieldElement, FieldSpec, SquareClass

DEFAULT_CAP = 2_000_000


# --- vectors ----------------------------------------------------------------

def _enc(F: FieldSpec, x) -> int:
    if isinstance(x, FieldElement):
        if x.field != F:
            raise FieldMismatch(f"{x!r} not in {F!r}")
        return x.value
    x = int(x)
    if not 0 <= x < F.order:
        raise ValueError(f"encoding {x} out of range for {F!r}")
    return x


def as_vector(F: FieldSpec, v) -> tuple:
    return tuple(_enc(F, x) for x in v)


def vec_index(F: FieldSpec, v) -> int:
    idx = 0
    for x in v:
        idx = idx * F.order + int(x)
    return idx


def vec_coords(F: FieldSpec, n: int, index: int) -> tuple:
    out = []
    for _ in range(n):
        index, r = divmod(index, F.order)
        out.append(r)
    return tuple(reversed(out))


def all_coords(F: FieldSpec, n: int) -> np.ndarray:
    """(f**n, n) array of coordinates in index order."""
    f = F.order
    idx = np.arange(f**n, dtype=np.int64)
    cols = [(idx // f ** (n - 1 - i)) % f for i in range(n)]
    return np.stack(cols, axis=1) if n else np.zeros((1, 0), dtype=np.int64)


def vec_add(F, v, w):
    return tuple(F.add(x, y) for x, y in zip(v, w))


def vec_sub(F, v, w):
    return tuple(F.sub(x, y) for x, y in zip(v, w))


def vec_scale(F, c, v):
    return tuple(F.mul(c, x) for x in v)


def lin_comb(F, coeffs, vectors, n):
    out = (0,) * n
    for c, v in zip(coeffs, vectors):
        if c:
            out = vec_add(F, out, vec_scale(F, c, v))
    return out


# --- the form ---------------------------------------------------------------

def _polar(F: FieldSpec, coeffs) -> list:
    n = len(coeffs)
    B = [[0] * n for _ in range(n)]
    for i in range(n):
        B[i][i] = F.add(coeffs[i][i], coeffs[i][i])
        for j in range(i + 1, n):
            B[i][j] = B[j][i] = coeffs[i][j]
    return B


def _nondegenerate(F: FieldSpec, coeffs) -> bool:
    return not coeffs or gf.det(F, _polar(F, coeffs)) != 0


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    field: FieldSpec
    coeffs: tuple
    n: int = dc_field(init=False)

    def __post_init__(self):
        F = self.field
        rows = tuple(tuple(_enc(F, x) for x in row) for row in self.coeffs)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionMismatch("coefficient array must be square")
        if any(rows[i][j] for i in range(n) for j in range(i)):
            raise ValueError("coefficient array must be upper triangular")
        object.__setattr__(self, "coeffs", rows)
        object.__setattr__(self, "n", n)
        if F.p == 2 and n % 2:
            raise DegenerateForm("odd-dimensional forms are degenerate in characteristic 2")
        if not _nondegenerate(F, rows):
            raise DegenerateForm("polar form has a nontrivial radical")

    def __eq__(self, other):
        return (isinstance(other, QuadraticForm) and self.field == other.field
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __repr__(self):
        return f"QuadraticForm({self.field!r}, {[list(r) for r in self.coeffs]})"

    def __call__(self, v) -> FieldElement:
        return FieldElement(self.field, self.value(as_vector(self.field, v)))

    @property
    def size(self) -> int:
        return self.field.order ** self.n

    @cached_property
    def polar(self) -> list:
        return _polar(self.field, self.coeffs)

    def value(self, v) -> int:
        F, c = self.field, self.coeffs
        acc = 0
        for i in range(self.n):
            if not v[i]:
                continue
            for j in range(i, self.n):
                if c[i][j] and v[j]:
                    acc = F.add(acc, F.mul(c[i][j], F.mul(v[i], v[j])))
        return acc

    def polar_value(self, v, w) -> int:
        F, B = self.field, self.polar
        acc = 0
        for i in range(self.n):
            if v[i]:
                s = F.sum(F.mul(B[i][j], w[j]) for j in range(self.n) if w[j])
                acc = F.add(acc, F.mul(v[i], s))
        return acc

    def value_array(self, cap: int = DEFAULT_CAP) -> np.ndarray:
        """q evaluated on every vector, in index order."""
        if self.size > cap:
            raise CapExceeded(self.size, cap)
        return self._values

    @cached_property
    def _values(self) -> np.ndarray:
        F = self.field
        X = all_coords(F, self.n)
        acc = np.zeros(len(X), dtype=np.int64)
        for i in range(self.n):
            for j in range(i, self.n):
                c = self.coeffs[i][j]
                if c:
                    acc = F.add(acc, F.mul(c, F.mul(X[:, i], X[:, j])))
        return acc

    def in_basis(self, basis) -> tuple:
        """Coefficients of q restricted to span(basis), in that basis."""
        r = len(basis)
        rows = [[0] * r for _ in range(r)]
        for i in range(r):
            rows[i][i] = self.value(basis[i])
            for j in range(i + 1, r):
                rows[i][j] = self.polar_value(basis[i], basis[j])
        return tuple(tuple(row) for row in rows)


def zero_form(F: FieldSpec) -> QuadraticForm:
    """The form on the zero space, used as an empty orthogonal complement."""
    return QuadraticForm(F, ())


def eval_q(q: QuadraticForm, v) -> FieldElement:
    v = as_vector(q.field, v)
    if len(v) != q.n:
        raise DimensionMismatch(f"vector of length {len(v)} for a form of dimension {q.n}")
    return FieldElement(q.field, q.value(v))


def bilinear_b(q: QuadraticForm, v, w) -> FieldElement:
    v, w = as_vector(q.field, v), as_vector(q.field, w)
    if len(v) != q.n or len(w) != q.n:
        raise DimensionMismatch("vector length does not match the form")
    return FieldElement(q.field, q.polar_value(v, w))


# --- constructors -----------------------------------------------------------

def diag(F: FieldSpec, *entries) -> QuadraticForm:
    """The diagonal form <a_1, ..., a_n>."""
    if len(entries) == 1 and isinstance(entries[0], (list, tuple)):
        entries = tuple(entries[0])
    a = [_enc(F, x) for x in entries]
    if F.p == 2:
        raise DegenerateForm("diagonal forms are degenerate in characteristic 2")
    if not all(a):
        raise DegenerateForm("diagonal entries must be nonzero")
    n = len(a)
    return QuadraticForm(F, tuple(tuple(a[i] if i == j else 0 for j in range(n)) for i in range(n)))


def binary(F: FieldSpec, a, b) -> QuadraticForm:
    """The binary form [a, b]: (x, y) -> a x^2 + x y + b y^2."""
    return QuadraticForm(F, ((_enc(F, a), 1), (0, _enc(F, b))))


def hyperbolic(F: FieldSpec) -> QuadraticForm:
    return binary(F, 0, 0)


def orth_sum(*forms: QuadraticForm) -> QuadraticForm:
    F = forms[0].field
    if any(q.field != F for q in forms):
        raise FieldMismatch("orthogonal sum of forms over different fields")
    n = sum(q.n for q in forms)
    rows = [[0] * n for _ in range(n)]
    off = 0
    for q in forms:
        for i in range(q.n):
            for j in range(i, q.n):
                rows[off + i][off + j] = q.coeffs[i][j]
        off += q.n
    return QuadraticForm(F, tuple(map(tuple, rows)))


def scale(q: QuadraticForm, c) -> QuadraticForm:
    F = q.field
    c = _enc(F, c)
    if not c:
        raise DegenerateForm("scaling by zero")
    return QuadraticForm(F, tuple(tuple(F.mul(c, x) for x in row) for row in q.coeffs))


def multiple(k: int, q: QuadraticForm) -> QuadraticForm:
    if k < 1:
        raise ValueError("multiplicity must be positive")
    return orth_sum(*([q] * k))


# --- invariants -------------------------------------------------------------

def _half_gram_det(F: FieldSpec, coeffs) -> int:
    n = len(coeffs)
    half = F.inv(2 % F.p)
    A = [[0] * n for _ in range(n)]
    for i in range(n):
        A[i][i] = coeffs[i][i]
        for j in range(i + 1, n):
            A[i][j] = A[j][i] = F.mul(half, coeffs[i][j])
    return gf.det(F, A) if n else 1


def determinant(q: QuadraticForm) -> int:
    """det of the symmetric matrix A with q(x) = x^T A x (basis dependent)."""
    if q.field.p == 2:
        raise WrongCharacteristic("determinant class is for odd characteristic")
    return _half_gram_det(q.field, q.coeffs)


def determinant_class(q: QuadraticForm) -> SquareClass:
    return q.field.square_class_of(determinant(q))


def _arf_of_coeffs(F: FieldSpec, coeffs) -> int:
    # Symplectic basis extraction over the standard basis, in index order.
    n = len(coeffs)
    B = _polar(F, coeffs)

    def b(v, w):
        return F.sum(F.mul(v[i], F.mul(B[i][j], w[j])) for i in range(n) for j in range(n)
                     if v[i] and w[j] and B[i][j])

    def qv(v):
        return F.sum(F.mul(coeffs[i][j], F.mul(v[i], v[j])) for i in range(n) for j in range(i, n)
                     if coeffs[i][j] and v[i] and v[j])

    vecs = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    total = 0
    while vecs:
        e = vecs[0]
        k = next(k for k in range(1, len(vecs)) if b(e, vecs[k]))
        f = vec_scale(F, F.inv(b(e, vecs[k])), vecs[k])
        total = F.add(total, F.mul(qv(e), qv(f)))
        rest = []
        for x in vecs[1:k] + vecs[k + 1:]:
            x = vec_add(F, x, vec_scale(F, b(x, f), e))
            x = vec_add(F, x, vec_scale(F, b(x, e), f))
            rest.append(x)
        vecs = rest
    return total


def arf_value(q: QuadraticForm) -> FieldElement:
    """A representative of the Arf invariant in F / wp(F)."""
    if q.field.p != 2:
        raise WrongCharacteristic("Arf invariant is for characteristic 2")
    return FieldElement(q.field, _arf_of_coeffs(q.field, q.coeffs))


def arf_invariant(q: QuadraticForm) -> bool:
    """True iff the Arf invariant lies in the Artin-Schreier image (trivial class)."""
    return q.field.in_wp_image(arf_value(q).value)


@dataclass(frozen=True)
class CanonicalType:
    """Isometry class of a form: dimension plus discriminant.

    ``disc`` is the square class of the determinant in odd characteristic and
    the boolean "Arf invariant is trivial" in characteristic 2.
    """

    dim: int
    disc: object
    hyperbolic: bool | None

    @property
    def isotropic(self) -> bool:
        if self.dim >= 3:
            return True
        return bool(self.hyperbolic) and self.dim == 2

    @property
    def witt_index(self) -> int:
        if self.dim % 2:
            return self.dim // 2
        return self.dim // 2 if self.hyperbolic else self.dim // 2 - 1

    @property
    def kernel_dim(self) -> int:
        return self.dim - 2 * self.witt_index

    @property
    def label(self) -> str:
        if self.hyperbolic:
            return "hyperbolic"
        return "isotropic" if self.isotropic else "anisotropic"


def _type_of(F: FieldSpec, coeffs) -> CanonicalType:
    n = len(coeffs)
    if F.p == 2:
        trivial = F.in_wp_image(_arf_of_coeffs(F, coeffs)) if n else True
        return CanonicalType(n, trivial, trivial)
    d = F.square_class_of(_half_gram_det(F, coeffs))
    if n % 2:
        return CanonicalType(n, d, None)
    k = n // 2
    sign = F.square_class_of(F.neg(1) if k % 2 else 1)
    return CanonicalType(n, d, d is sign)


def classify(q: QuadraticForm) -> CanonicalType:
    return _type_of(q.field, q.coeffs)


def is_isometric(q1: QuadraticForm, q2: QuadraticForm) -> bool:
    if q1.field != q2.field:
        raise FieldMismatch("forms over different fields")
    return classify(q1) == classify(q2)


def is_hyperbolic_plane(q: QuadraticForm) -> bool:
    return q.n == 2 and bool(classify(q).hyperbolic)


def canonical_model(F: FieldSpec, t: CanonicalType) -> QuadraticForm:
    """The normal-form representative of an isometry class."""
    n, k = t.dim, t.dim // 2
    if n == 0:
        return zero_form(F)
    H = hyperbolic(F)
    lam = gf.canonical_witness(F)
    if F.p == 2:
        parts = [H] * k if t.hyperbolic else [H] * (k - 1) + [binary(F, 1, lam)]
    elif n % 2:
        sign = F.neg(1) if k % 2 else 1
        last = 1 if F.square_class_of(sign) is t.disc else lam
        parts = [H] * k + [diag(F, last)]
    else:
        parts = [H] * k if t.hyperbolic else [H] * (k - 1) + [diag(F, 1, F.neg(lam))]
    return orth_sum(*parts)


def canonical_types(F: FieldSpec, n: int) -> list[CanonicalType]:
    """Every isometry class of non-degenerate forms of dimension n (0, 1 or 2 of them)."""
    if n == 0:
        return [_type_of(F, ())]
    if F.p == 2 and n % 2:
        return []
    out = []
    for t in (_type_of(F, canonical_model(F, CanonicalType(n, d, h)).coeffs)
              for d, h in _type_seeds(F, n)):
        if t not in out:
            out.append(t)
    return out


def _type_seeds(F: FieldSpec, n: int):
    if F.p == 2:
        return [(True, True), (False, False)]
    if n % 2:
        return [(SquareClass.SQUARE, None), (SquareClass.NONSQUARE, None)]
    return [(None, True), (None, False)]


def canonical_forms(F: FieldSpec, n: int) -> list[QuadraticForm]:
    return [canonical_model(F, t) for t in canonical_types(F, n)]


def canonical_model_string(F: FieldSpec, t: CanonicalType) -> str:
    n, k = t.dim, t.dim // 2
    if n == 0:
        return "0"

    def hs(j):
        return [] if j == 0 else ["H" if j == 1 else f"{j}*H"]

    if F.p == 2:
        parts = hs(k) if t.hyperbolic else hs(k - 1) + ["bin(1,wp)"]
    elif n % 2:
        sign = F.neg(1) if k % 2 else 1
        parts = hs(k) + ["diag(1)" if F.square_class_of(sign) is t.disc else "diag(lambda)"]
    else:
        parts = hs(k) if t.hyperbolic else hs(k - 1) + ["diag(1,-lambda)"]
    return " + ".join(parts)


# --- searches ---------------------------------------------------------------

def _iter_vectors(F: FieldSpec, n: int):
    return product(range(F.order), repeat=n)


def find_vector_with_value(q: QuadraticForm, b, allow_zero: bool = False):
    """Least-index vector v with q(v) = b, or None."""
    F = q.field
    b = _enc(F, b)
    if b == 0 and allow_zero:
        return (0,) * q.n
    if q.size <= DEFAULT_CAP:
        vals = q.value_array()
        hits = np.flatnonzero(vals == b)
        hits = hits[hits != 0]
        return vec_coords(F, q.n, int(hits[0])) if len(hits) else None
    for v in _iter_vectors(F, q.n):
        if any(v) and q.value(v) == b:
            return v
    return None


def represented_set(q: QuadraticForm, with_zero: bool = False, cap: int = DEFAULT_CAP) -> set:
    """D(q), or D~(q) when ``with_zero`` (0 added iff q is isotropic)."""
    vals = q.value_array(cap)[1:]
    out = set(int(x) for x in np.unique(vals))
    if not with_zero:
        out.discard(0)
    return out


def _isotropic_in_span(q: QuadraticForm, basis):
    F = q.field
    for coeffs in _iter_vectors(F, len(basis)):
        if any(coeffs):
            v = lin_comb(F, coeffs, basis, q.n)
            if q.value(v) == 0:
                return v
    return None


def _orth_complement(q: QuadraticForm, space, sub):
    """Basis of sub^perp inside span(space); sub must be non-degenerate."""
    F = q.field
    G = [[q.polar_value(x, y) for y in sub] for x in sub]
    projected = []
    for u in space:
        alpha = gf.solve(F, G, [q.polar_value(u, w) for w in sub])
        projected.append(vec_sub(F, u, lin_comb(F, alpha, sub, q.n)))
    rows, _ = gf.row_reduce(F, projected)
    return [tuple(r) for r in rows]


def _check_nondegenerate_sub(q: QuadraticForm, vectors):
    F = q.field
    if gf.rank(F, vectors) != len(vectors):
        raise DegenerateRestriction("vectors are linearly dependent")
    G = [[q.polar_value(x, y) for y in vectors] for x in vectors]
    if gf.det(F, G) == 0:
        raise DegenerateRestriction("restriction has a nontrivial radical")


@dataclass(frozen=True)
class WittDecomposition:
    witt_index: int
    anisotropic_kernel: QuadraticForm
    basis: tuple  # rows: hyperbolic pairs first, then kernel basis


def witt_decompose(q: QuadraticForm) -> WittDecomposition:
    F = q.field
    n = q.n
    space = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    pairs = []
    while space:
        v = _isotropic_in_span(q, space)
        if v is None:
            break
        u = next(u for u in space if q.polar_value(v, u))
        w0 = vec_scale(F, F.inv(q.polar_value(v, u)), u)
        w = vec_sub(F, w0, vec_scale(F, q.value(w0), v))
        pairs += [v, w]
        space = _orth_complement(q, space, [v, w])
    kernel = QuadraticForm(F, q.in_basis(space))
    return WittDecomposition(len(pairs) // 2, kernel, tuple(pairs) + tuple(space))


def split_off_vector(q: QuadraticForm, vectors):
    """Split span(vectors) off orthogonally.

    Returns ``(restriction, complement, complement_basis)`` with
    q isometric to restriction _|_ complement.
    """
    F = q.field
    vectors = [as_vector(F, v) for v in vectors]
    if len(vectors) == 1 and q.value(vectors[0]) == 0 and F.p != 2:
        raise IsotropicSplitVector("cannot split off an isotropic vector")
    _check_nondegenerate_sub(q, vectors)
    space = [tuple(1 if i == j else 0 for j in range(q.n)) for i in range(q.n)]
    comp = _orth_complement(q, space, vectors)
    return QuadraticForm(F, q.in_basis(vectors)), QuadraticForm(F, q.in_basis(comp)), comp


def find_hyperbolic_containing(q: QuadraticForm, v):
    """Return (v, w) spanning a hyperbolic plane that contains v."""
    F = q.field
    v = as_vector(F, v)
    if not any(v):
        raise ValueError("v must be nonzero")
    if not classify(q).isotropic:
        raise AnisotropicForm("an anisotropic form contains no hyperbolic plane")
    for w in _iter_vectors(F, q.n):
        if gf.rank(F, [v, w]) < 2:
            continue
        c = q.in_basis([v, w])
        if _nondegenerate(F, c) and _type_of(F, c).hyperbolic:
            return v, w
    raise AssertionError("isotropic forms have a hyperbolic plane through every vector")


# --- DSL --------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]+)|(.))")


def _tokenize(text):
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.group(1):
            toks.append(("int", int(m.group(1))))
        elif m.group(2):
            toks.append(("name", m.group(2)))
        elif m.group(3).strip():
            toks.append(("sym", m.group(3)))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, F: FieldSpec, text: str):
        self.F = F
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def fail(self, msg):
        raise ParseError(f"{msg} in form {self.text!r}")

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            self.fail(f"expected {value or kind}, got {tok[1]!r}")
        self.i += 1
        return tok[1]

    def parse(self):
        if not self.toks:
            self.fail("empty form")
        parts = self.term()
        while self.peek() == ("sym", "+"):
            self.take()
            parts += self.term()
        if self.peek()[0] is not None:
            self.fail(f"unexpected {self.peek()[1]!r}")
        return orth_sum(*parts)

    def term(self):
        k = 1
        if self.peek()[0] == "int":
            k = self.take()
            self.take("sym", "*")
            if k < 1:
                self.fail("multiplicity must be positive")
        return [self.atom()] * k

    def atom(self):
        name = self.take("name")
        if name == "H":
            return hyperbolic(self.F)
        if name in ("diag", "bin"):
            self.take("sym", "(")
            args = [self.elem()]
            while self.peek() == ("sym", ","):
                self.take()
                args.append(self.elem())
            self.take("sym", ")")
            if name == "diag":
                return diag(self.F, *args)
            if len(args) != 2:
                self.fail("bin takes two arguments")
            return binary(self.F, *args)
        self.fail(f"unknown atom {name!r}")

    def elem(self):
        neg = False
        if self.peek() == ("sym", "-"):
            self.take()
            neg = True
        kind, val = self.peek()
        if kind == "int":
            self.take()
            if val >= self.F.order:
                self.fail(f"element encoding {val} out of range")
            e = val
        elif val == "lambda":
            self.take()
            e = gf.nonsquare_witness(self.F).value
        elif val == "wp":
            self.take()
            e = gf.wp_witness(self.F).value
        else:
            self.fail(f"expected an element, got {val!r}")
        return self.F.neg(e) if neg else e


def parse_form(F: FieldSpec, text: str) -> QuadraticForm:
    """Parse the form DSL, e.g. ``2*H + bin(1,wp)`` or ``diag(1,1,lambda)``."""
    return _Parser(F, text).parse()


def parse_element(F: FieldSpec, text: str) -> int:
    """Parse an element token: an encoding, ``lambda``/``wp``, optionally negated."""
    p = _Parser(F, text)
    e = p.elem()
    if p.peek()[0] is not None:
        p.fail("trailing input")
    return e
