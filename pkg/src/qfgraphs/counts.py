"""Closed-form counts attached to quadratic forms over finite fields.

Pre-image sizes |V_a|, the structure of sum sets V_a + V_b for binary forms,
orders of orthogonal groups and numbers of totally isotropic subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .errors import CapExceeded, DimensionNotTwo, OneNotRepresented
from .gf import SquareClass
from .qform import (
    DEFAULT_CAP,
    QuadraticForm,
    _enc,
    all_coords,
    as_vector,
    classify,
    determinant,
    arf_value,
    vec_sub,
)


@dataclass(frozen=True)
class PreimageCount:
    value: int
    count: int


@dataclass(frozen=True)
class SumsetProfile:
    a: int
    b: int
    k: int
    unique_count: int
    sumset_size: int


def count_preimage(q: QuadraticForm, a) -> int:
    """Number of v (zero vector included) with q(v) = a."""
    F = q.field
    a = _enc(F, a)
    f, n = F.order, q.n
    if n == 0:
        return 1 if a == 0 else 0
    t = classify(q)
    m = n // 2
    if n % 2 == 0:
        if t.hyperbolic:
            return f ** (2*m - 1) + f**m - f ** (m-1) if a == 0 else f ** (2*m - 1) - f ** (m-1)
        return f ** (2*m - 1) - f**m + f ** (m-1) if a == 0 else f ** (2*m - 1) + f ** (m-1)
    if a == 0:
        return f ** (2*m)
    sign = F.neg(1) if m % 2 else 1
    s = F.square_class_of(F.mul(F.mul(sign, determinant(q)), a))
    return f ** (2*m) + f**m if s is SquareClass.SQUARE else f ** (2*m) - f**m


def preimage_profile(q: QuadraticForm) -> list[PreimageCount]:
    return [PreimageCount(a, count_preimage(q, a)) for a in range(q.field.order)]


def _k(q: QuadraticForm) -> int:
    f = q.field.order
    return f - 1 if classify(q).hyperbolic else f + 1


def _require_dim2(q):
    if q.n != 2:
        raise DimensionNotTwo(f"expected a binary form, got dimension {q.n}")


def _roots(F, A, B, C):
    """All t with A t^2 + B t + C = 0, sorted."""
    if A == 0:
        if B == 0:
            return list(range(F.order)) if C == 0 else []
        return [F.neg(F.div(C, B))]
    if F.p == 2:
        if B == 0:
            return [F.sqrt(F.div(C, A))]
        # t = (B/A) s  turns the equation into s^2 + s = AC/B^2
        s0 = int(F.wp_preimage[F.div(F.mul(A, C), F.mul(B, B))])
        if s0 < 0:
            return []
        r = F.div(B, A)
        return sorted({F.mul(r, s0), F.mul(r, F.add(s0, 1))})
    disc = F.sub(F.mul(B, B), F.mul(4 % F.p, F.mul(A, C)))
    sq = F.sqrt(disc)
    if sq is None:
        return []
    inv2a = F.inv(F.mul(2, A))
    return sorted({F.mul(F.sub(sq, B), inv2a), F.mul(F.sub(F.neg(sq), B), inv2a)})


def decompose_sum(q: QuadraticForm, w, a, b) -> list[tuple]:
    """All (u, v) with q(u) = a, q(v) = b and u + v = w, for a binary form.

    Solves q(u) = a together with the linear condition b(u, w) = q(w) + a - b
    by eliminating one coordinate of u.
    """
    _require_dim2(q)
    F = q.field
    w = as_vector(F, w)
    a, b = _enc(F, a), _enc(F, b)
    if not any(w):
        raise ValueError("w must be nonzero")
    L = [q.polar_value((1, 0), w), q.polar_value((0, 1), w)]
    c = F.sub(F.add(q.value(w), a), b)
    i = 0 if L[0] else 1
    j = 1 - i
    # u_i = r + s * u_j
    r = F.div(c, L[i])
    s = F.neg(F.div(L[j], L[i]))
    c11, c12, c22 = q.coeffs[0][0], q.coeffs[0][1], q.coeffs[1][1]
    ci, cj = (c11, c22) if i == 0 else (c22, c11)
    # q(u) = ci*u_i^2 + c12*u_i*u_j + cj*u_j^2 with u_i = r + s t, u_j = t
    A = F.add(F.add(F.mul(ci, F.mul(s, s)), F.mul(c12, s)), cj)
    B = F.add(F.mul(ci, F.mul(2 % F.p, F.mul(r, s))), F.mul(c12, r))
    C = F.sub(F.mul(ci, F.mul(r, r)), a)
    out = []
    for t in _roots(F, A, B, C):
        ui = F.add(r, F.mul(s, t))
        u = (ui, t) if i == 0 else (t, ui)
        out.append((u, vec_sub(F, w, u)))
    return sorted(out)


def _isotropic_extra(q, a, b) -> int:
    """Nonzero isotropic w in V_a + V_b; each has exactly one decomposition.

    For the hyperbolic plane xy these are the 2k points on the two axes,
    present only when a != b.
    """
    return 2 * _k(q) if a != b and classify(q).hyperbolic else 0


def unique_decomposition_count(q: QuadraticForm, a, b) -> int:
    """Number of nonzero w in V_a + V_b with exactly one decomposition w = u + v."""
    _require_dim2(q)
    F = q.field
    a, b = _enc(F, a), _enc(F, b)
    extra = _isotropic_extra(q, a, b)
    if F.square_class_of(F.mul(a, b)) is not SquareClass.SQUARE:
        return extra
    k = _k(q)
    if F.p == 2:
        return (0 if a == b else k) + extra
    return (k if a == b else 2 * k) + extra


def sumset_size(q: QuadraticForm, a, b) -> int:
    """|V_a + V_b| for a binary form and nonzero a, b (zero vector included)."""
    _require_dim2(q)
    F = q.field
    a, b = _enc(F, a), _enc(F, b)
    k = _k(q)
    half = _isotropic_extra(q, a, b) // 2
    if F.p == 2:
        base = k * (k - 1) // 2 + 1 if a == b else k * (k + 1) // 2
    elif F.square_class_of(F.mul(a, b)) is not SquareClass.SQUARE:
        base = k * k // 2
    else:
        base = k * k // 2 + 1 if a == b else k * (k + 2) // 2
    return base + half


def sumset_profile(q: QuadraticForm, a, b) -> SumsetProfile:
    return SumsetProfile(_enc(q.field, a), _enc(q.field, b), _k(q),
                         unique_decomposition_count(q, a, b), sumset_size(q, a, b))


def v1v1_reachable(q: QuadraticForm, a) -> bool:
    """Whether some w in V_1 + V_1 has q(w) = a."""
    _require_dim2(q)
    F = q.field
    a = _enc(F, a)
    if count_preimage(q, 1) == 0:
        raise OneNotRepresented("the form does not represent 1")
    if a == 0:
        raise ValueError("a must be nonzero")
    if F.p == 2:
        return F.in_wp_image(F.add(arf_value(q).value, F.inv(a)))
    if a == 4 % F.p:
        return True
    x = F.mul(determinant(q), F.sub(F.mul(4 % F.p, a), F.mul(a, a)))
    return F.square_class_of(x) is SquareClass.SQUARE


def orthogonal_group_order(q: QuadraticForm) -> int:
    f, n = q.field.order, q.n
    if n == 0:
        return 1
    m = n // 2
    if n % 2:
        return 2 * f ** (m * m) * prod(f ** (2*i) - 1 for i in range(1, m + 1))
    eps = -1 if classify(q).hyperbolic else 1
    return 2 * f ** (m * (m-1)) * (f**m + eps) * prod(f ** (2*i) - 1 for i in range(1, m))


def totally_isotropic_count(q: QuadraticForm, k: int, cap: int = DEFAULT_CAP) -> int:
    """Number of totally isotropic subspaces of dimension k (1 or 2)."""
    F = q.field
    f = F.order
    if k == 1:
        return (count_preimage(q, 0) - 1) // (f - 1)
    if k != 2:
        raise ValueError("only k = 1 or 2 is supported")
    if q.size > cap:
        raise CapExceeded(q.size, cap)
    iso = np.flatnonzero(q.value_array(cap) == 0)[1:]
    if len(iso) ** 2 > 50 * cap:
        raise CapExceeded(len(iso) ** 2, 50 * cap)
    X = all_coords(F, q.n)[iso]
    B = q.polar
    pairs = 0
    for idx in range(len(iso)):
        v = X[idx]
        # b(v, x) for every isotropic x
        Bv = [F.sum(F.mul(int(v[i]), B[i][j]) for i in range(q.n)) for j in range(q.n)]
        acc = np.zeros(len(iso), dtype=np.int64)
        for j in range(q.n):
            if Bv[j]:
                acc = F.add(acc, F.mul(Bv[j], X[:, j]))
        cand = X[acc == 0]
        pairs += len(cand) - _count_dependent(F, v, cand)
    return pairs // ((f*f - 1) * (f*f - f))


def _count_dependent(F, v, X) -> int:
    """How many rows of X are scalar multiples of the nonzero vector v."""
    i0 = int(np.flatnonzero(v)[0])
    c = F.mul(X[:, i0], F.inv(int(v[i0])))
    ok = np.ones(len(X), dtype=bool)
    for j in range(len(v)):
        ok &= F.mul(c, int(v[j])) == X[:, j]
    return int(ok.sum())
