"""Closed-form predictions for representation graph invariants.

Every predictor returns its value together with a clause tag naming the row
of the classification that fired, e.g. ``"diameter.dim3.det-eq-minus-a"``.
Tags are stable strings and end up verbatim in JSON reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb

from .counts import count_preimage, orthogonal_group_order, totally_isotropic_count
from .errors import DimensionNotThree, NoRouteApplicable, NotApplicable, OddDimCharTwo
from .gf import FieldSpec, SquareClass
from .qform import (
    DEFAULT_CAP,
    QuadraticForm,
    _enc,
    binary,
    canonical_forms,
    classify,
    determinant,
    diag,
    hyperbolic,
    orth_sum,
    zero_form,
)

INF = math.inf


class _NotCovered:
    """Sentinel for counts outside the closed-form results."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "NOT_COVERED"

    def __bool__(self):
        return False


NOT_COVERED = _NotCovered()


@dataclass(frozen=True)
class Prediction:
    value: object
    clause: str
    note: str = ""


@dataclass(frozen=True)
class DiameterPrediction:
    kind: str  # "exact" | "interval" | "infinite"
    clause: str
    value: int | None = None
    lo: int | None = None
    hi: int | None = None

    def contains(self, d) -> bool:
        if self.kind == "infinite":
            return d == INF
        if self.kind == "interval":
            return d != INF and self.lo <= d <= self.hi
        return d == self.value

    def as_value(self):
        """Exact value, math.inf, or the pair (lo, hi)."""
        if self.kind == "infinite":
            return INF
        if self.kind == "interval":
            return (self.lo, self.hi)
        return self.value


@dataclass(frozen=True)
class TriangleCountPrediction:
    c1: int
    c2: int
    total: int
    route: str  # "Diag" | "Binary" | "Isotropic0" | "Edgeless"
    clause: str
    routes: dict = field(default_factory=dict)  # every applicable route -> c2


def _is_edge_value(q: QuadraticForm, a: int) -> bool:
    """a in D~(q): some nonzero vector has value a."""
    return count_preimage(q, a) > (1 if a == 0 else 0)


def _square(F: FieldSpec, x: int) -> bool:
    return F.square_class_of(x) is SquareClass.SQUARE


def predict_connected(q: QuadraticForm, a) -> Prediction:
    F = q.field
    a = _enc(F, a)
    t = classify(q)
    if a == 0 and not t.isotropic:
        return Prediction(False, "connected.a0.anisotropic")
    if q.n == 1 and (F.m > 1 or not _square(F, F.mul(a, determinant(q)))):
        return Prediction(False, "connected.dim1")
    if a != 0 and q.n == 2 and t.hyperbolic and F.order <= 4:
        return Prediction(False, "connected.hyperbolic-plane.small-field")
    return Prediction(True, "connected.generic")


def predict_diameter(q: QuadraticForm, a) -> DiameterPrediction:
    F = q.field
    a = _enc(F, a)
    n, f = q.n, F.order
    if F.p == 2 and n % 2:
        raise OddDimCharTwo("odd-dimensional forms are degenerate in characteristic 2")
    t = classify(q)
    if a == 0:
        if t.isotropic:
            return DiameterPrediction("exact", "diameter.a0.isotropic", value=2)
        return DiameterPrediction("infinite", "diameter.a0.anisotropic")
    if n == 1:
        if F.m == 1 and _square(F, F.mul(a, determinant(q))):
            return DiameterPrediction("exact", "diameter.dim1.prime-field", value=(F.p - 1) // 2)
        return DiameterPrediction("infinite", "diameter.dim1.otherwise")
    if n == 2:
        if t.hyperbolic:
            if f <= 4:
                return DiameterPrediction("infinite", "diameter.dim2.hyperbolic.small-field")
            return DiameterPrediction("interval", "diameter.dim2.hyperbolic", lo=3, hi=4)
        if f == 2:
            return DiameterPrediction("exact", "diameter.dim2.anisotropic.F2", value=1)
        if f in (3, 4):
            return DiameterPrediction("exact", "diameter.dim2.anisotropic.F3-F4", value=2)
        return DiameterPrediction("exact", "diameter.dim2.anisotropic", value=3)
    if n == 3:
        if _square(F, F.neg(F.mul(a, determinant(q)))):
            return DiameterPrediction("exact", "diameter.dim3.det-eq-minus-a", value=2)
        return DiameterPrediction("exact", "diameter.dim3.otherwise", value=3)
    return DiameterPrediction("exact", "diameter.dim-ge-4", value=2)


def resolve_hyperbolic_interval(F: FieldSpec, a=1, max_vertices: int = DEFAULT_CAP, threads: int = 1) -> int:
    """Exact diameter of the hyperbolic plane's graph, by breadth-first search."""
    from .graph import GraphJob, RepresentationGraph

    a = _enc(F, a)
    if F.order < 5 or a == 0:
        raise NotApplicable("the interval only arises for a != 0 and f >= 5")
    g = RepresentationGraph(GraphJob(hyperbolic(F), a, max_vertices, threads))
    return g.diameter()


def predict_girth(q: QuadraticForm, a) -> Prediction:
    F = q.field
    a = _enc(F, a)
    n = q.n
    if not _is_edge_value(q, a):
        return Prediction(INF, "girth.edgeless", "EdgelessGraph")
    if a == 0:
        if F.order == 2 and not classify(q).hyperbolic and n == 4:
            return Prediction(4, "girth.a0.F2.H+bin(1,1)")
        if F.order == 2 and n == 2:
            return Prediction(4, "girth.a0.F2.H")
        return Prediction(3, "girth.a0")
    if n == 1:
        return Prediction(F.p, "girth.dim1")
    if n == 2:
        if F.order == 2 and classify(q).hyperbolic:
            return Prediction(INF, "girth.dim2.F2.hyperbolic")
        # -v, 0, v is a triangle whenever 3 = 0
        if F.p == 3:
            return Prediction(3, "girth.dim2.char3")
        if classify(q) == classify(binary(F, a, F.inv(a))):
            return Prediction(3, "girth.dim2.a-ainv")
        return Prediction(4, "girth.dim2.otherwise")
    return Prediction(3, "girth.dim-ge-3")


def _complement(q: QuadraticForm, head: QuadraticForm):
    """Some q' with q isometric to head + q', or None."""
    target = classify(q)
    for cand in canonical_forms(q.field, q.n - head.n):
        if classify(orth_sum(head, cand)) == target:
            return cand
    return None


def _diag_route(q: QuadraticForm, a: int):
    F = q.field
    qp = _complement(q, diag(F, a))
    if qp is None:
        return 0
    b = F.mul(3 % F.p, a)
    # in characteristic 3 the zero vector of q' gives w = -v, a dependent pair
    reach = count_preimage(qp, b) - (1 if b == 0 else 0)
    return count_preimage(q, a) * reach // 2


def _binary_route(q: QuadraticForm, a: int):
    F = q.field
    B = binary(F, a, F.inv(a))
    qp = zero_form(F) if q.n == 2 else _complement(q, B)
    if q.n == 2 and classify(q) != classify(B):
        qp = None
    if qp is None:
        return 0
    orbits = orthogonal_group_order(q) // (orthogonal_group_order(B) * orthogonal_group_order(qp))
    return count_preimage(B, F.mul(3 % F.p, a)) * orbits


def predict_triangles(q: QuadraticForm, a, cap: int = DEFAULT_CAP) -> TriangleCountPrediction:
    F = q.field
    a = _enc(F, a)
    f, size = F.order, q.size
    if not _is_edge_value(q, a):
        return TriangleCountPrediction(0, 0, 0, "Edgeless", "triangles.edgeless")
    if a == 0:
        c1 = totally_isotropic_count(q, 1) * comb(f - 1, 2)
        t2 = totally_isotropic_count(q, 2, cap) if q.n >= 4 else 0
        c2 = t2 * (f*f - 1) * (f*f - f) // 2
        return TriangleCountPrediction(c1, c2, (c1 + c2) * size // 3, "Isotropic0",
                                       "triangles.a0", {"Isotropic0": c2})
    c1 = count_preimage(q, a) // 2 if F.p == 3 else 0
    routes = {}
    if F.p != 2:
        routes["Diag"] = _diag_route(q, a)
    if F.p != 3 and q.n >= 2:
        routes["Binary"] = _binary_route(q, a)
    if not routes:
        if q.n == 1:  # char 2 never has dim 1; here p = 3 and only Diag applies
            routes["Diag"] = 0
        else:
            raise NoRouteApplicable("no decomposition route applies")
    if len(set(routes.values())) > 1:
        raise AssertionError(f"triangle routes disagree: {routes}")
    route = "Diag" if "Diag" in routes else "Binary"
    c2 = routes[route]
    return TriangleCountPrediction(c1, c2, (c1 + c2) * size // 3, route,
                                   f"triangles.a-nonzero.{route.lower()}", routes)


def predict_four_cycles(q: QuadraticForm, a) -> Prediction:
    F = q.field
    a = _enc(F, a)
    f = F.order
    if not _is_edge_value(q, a):
        return Prediction(0, "four_cycles.edgeless")
    if f == 2 and q.n == 4 and a == 1 and not classify(q).hyperbolic:
        return Prediction(900, "four_cycles.F2.H+bin(1,1)")
    if q.n != 2:
        return Prediction(NOT_COVERED, "four_cycles.not-covered")
    iso = bool(classify(q).hyperbolic)
    if a == 0:
        return Prediction(f * f * (6 * comb(f - 1, 3) + (f - 1) ** 2) // 4, "four_cycles.dim2.a0")
    if F.p == 2:
        v = f*f * (f-1) * (f-2) // 8 if iso else f**3 * (f+1) // 8
    else:
        v = f*f * (f-1) * (f-3) // 8 if iso else f*f * (f+1) * (f-1) // 8
    return Prediction(v, "four_cycles.dim2." + ("isotropic" if iso else "anisotropic"))


def distance_class_dim3(q: QuadraticForm, a, v) -> object:
    """d(0, v) in a ternary graph: 1, 2 or the string ">2"."""
    F = q.field
    if q.n != 3:
        raise DimensionNotThree(f"expected a ternary form, got dimension {q.n}")
    a = _enc(F, a)
    qv = q.value(v)
    if not any(int(x) for x in v):
        raise ValueError("v must be nonzero")
    if qv == a:
        return 1
    if qv == 0 and not _square(F, F.neg(F.mul(a, determinant(q)))):
        return ">2"
    return 2
