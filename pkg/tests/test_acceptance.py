"""Acceptance criteria, one marked test (or group of tests) per criterion.

A summary with one PASS/FAIL line per criterion is printed at the end of the
pytest run.  Criteria that cannot be met are left failing on purpose; see
the reason attached to the test.
"""

import io
import json
import math
import time

import networkx as nx
import pytest

from qfgraphs.cli import main
from qfgraphs.counts import (
    count_preimage,
    decompose_sum,
    orthogonal_group_order,
    sumset_size,
    unique_decomposition_count,
    v1v1_reachable,
)
from qfgraphs.gf import canonical_witness, field_of_order, make_field, prime_powers
from qfgraphs.graph import GraphJob, RepresentationGraph
from qfgraphs.predict import (
    NOT_COVERED,
    predict_connected,
    predict_diameter,
    predict_four_cycles,
    predict_girth,
)
from qfgraphs.qform import all_coords, canonical_forms, classify, hyperbolic, parse_form

import oracles
from conftest import GRID_FIELDS, grid

acceptance = pytest.mark.acceptance
SMALL_FIELDS = [f for f in GRID_FIELDS if f <= 13]


def cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, json.loads(out.getvalue())


def engine(q, a):
    return RepresentationGraph(GraphJob(q, a))


def witnesses(F):
    return sorted({0, 1, canonical_witness(F)})


@acceptance("AC1", "worked triangle example: 250000 triangles, c2 = 1200 by both routes")
def test_ac1_triangle_example():
    t0 = time.perf_counter()
    argv = ("-q", "q=5", "-f", "diag(1,1,1,1)", "-a", "1", "--json", "--no-timing")
    code, pred = cli("predict", *argv)
    assert code == 0
    tri = pred["predicted"]["triangles"]
    assert (tri["c1"], tri["c2"], tri["total"]) == (0, 1200, 250000)
    assert tri["routes"] == {"Diag": 1200, "Binary": 1200}
    code, ver = cli("verify", *argv)
    assert code == 0 and ver["match"]["triangles"] is True
    brute = ver["bruteforce"]["triangles"]
    assert (brute["c1"], brute["c2"], brute["total"]) == (0, 1200, 250000)
    assert time.perf_counter() - t0 < 5


@acceptance("AC2", "worked 4-cycle example: 225 through the origin, 900 in total")
def test_ac2_four_cycle_example():
    t0 = time.perf_counter()
    q = parse_form(field_of_order(2), "H + bin(1,1)")
    assert predict_four_cycles(q, 1).value == 900
    census = engine(q, 1).four_cycle_census()
    assert (census.four_cycles_through_origin, census.four_cycles_total) == (225, 900)
    G = oracles.graph(q, 1)
    assert oracles.four_cycles_through_origin(G, 4) == 225
    assert time.perf_counter() - t0 < 1


@acceptance("AC3", "diameter table on the full grid, zero mismatches")
def test_ac3_diameter_grid():
    t0 = time.perf_counter()
    bad, checked = [], 0
    for F, q, a in grid():
        pred, d = predict_diameter(q, a), engine(q, a).diameter()
        checked += 1
        if not pred.contains(d):
            bad.append((F.order, str(q), a, pred, d))
    assert checked > 150
    assert bad == []
    assert time.perf_counter() - t0 < 600


@acceptance("AC4", "girth table on the full grid, zero mismatches")
def test_ac4_girth_grid():
    bad, seen = [], set()
    for F, q, a in grid():
        pred, g = predict_girth(q, a), engine(q, a).girth()
        seen.add(pred.clause)
        if pred.value != g:
            bad.append((F.order, str(q), a, pred, g))
    assert bad == []
    # both characteristic-2 exceptions and the dimension-1 row were exercised
    assert {"girth.a0.F2.H", "girth.a0.F2.H+bin(1,1)", "girth.dim1"} <= seen
    F2 = field_of_order(2)
    assert predict_girth(hyperbolic(F2), 0).value == 4 == engine(hyperbolic(F2), 0).girth()
    for f in (3, 5, 7, 11, 13):
        q = canonical_forms(field_of_order(f), 1)[0]
        assert engine(q, count_nonzero_value(q)).girth() == f


def count_nonzero_value(q):
    """Some a != 0 represented by the unary form q."""
    return next(a for a in range(1, q.field.order) if count_preimage(q, a))


@acceptance("AC5", "point counts equal exhaustive enumeration, every a")
def test_ac5_point_counts():
    bad, checked = [], 0
    for f in GRID_FIELDS:
        F = field_of_order(f)
        for n in range(1, 7):
            if f ** n > 10 ** 5:
                break
            for q in canonical_forms(F, n):
                hist = oracles.value_histogram(q)
                for a in range(f):
                    checked += 1
                    if count_preimage(q, a) != hist.get(a, 0):
                        bad.append((f, str(q), a))
    assert checked > 500 and bad == []


@acceptance("AC6", "unique-decomposition and sumset-size tables, all dim-2 forms, f <= 13")
def test_ac6_sumset_tables():
    bad = []
    for f in SMALL_FIELDS:
        F = field_of_order(f)
        coords = [tuple(int(x) for x in v) for v in all_coords(F, 2)[1:]]
        for q in canonical_forms(F, 2):
            for a in range(1, f):
                for b in range(1, f):
                    sizes = [len(decompose_sum(q, w, a, b)) for w in coords]
                    unique = sum(1 for s in sizes if s == 1)
                    # zero lies in V_a + V_b exactly when a = b (take v = -u)
                    size = sum(1 for s in sizes if s) + (1 if a == b else 0)
                    if (unique_decomposition_count(q, a, b), sumset_size(q, a, b)) != (unique, size):
                        bad.append((f, str(q), a, b))
    assert bad == []


@acceptance("AC7", "4-cycle table for binary forms, f <= 13")
def test_ac7_four_cycles():
    bad, covered = [], 0
    for f in SMALL_FIELDS:
        F = field_of_order(f)
        for q in canonical_forms(F, 2):
            for a in witnesses(F):
                pred = predict_four_cycles(q, a).value
                if pred is NOT_COVERED:
                    continue
                covered += 1
                if pred != engine(q, a).four_cycle_census().four_cycles_total:
                    bad.append((f, str(q), a))
    assert covered > 40 and bad == []


@acceptance("AC8", "connectedness exceptions: components 2/3/4 and isolated points")
def test_ac8_connectedness_exceptions():
    for f, comps in ((2, 2), (3, 3), (4, 4)):
        q = hyperbolic(field_of_order(f))
        assert predict_connected(q, 1).value is False
        assert engine(q, 1).component_count() == comps
        assert nx.number_connected_components(oracles.graph(q, 1)) == comps
    for f in GRID_FIELDS:
        F = field_of_order(f)
        for n in (1, 2):
            for q in canonical_forms(F, n):
                if classify(q).isotropic:
                    continue
                g = engine(q, 0)
                assert predict_connected(q, 0).value is False
                assert len(g.neighbors) == 0 and g.component_count() == q.size


AC9_REASON = ("unattainable: the hyperbolic plane over GF(8) has diameter 3 for every a and "
              "both cubic moduli (networkx agrees), so the expected 4 at f = 8 cannot be reproduced")


def _hyperbolic_sweep():
    out = io.StringIO()
    code = main(["sweep", "-f", "H", "--fields", "5..101", "-a", "1", "--json"], out)
    return code, {r["f"]: r["oracle"] for r in json.loads(out.getvalue())["rows"]}


@acceptance("AC9", "hyperbolic diameter sweep 5..101 reproduces 4 for f in {5,7,8,9}, else 3")
@pytest.mark.xfail(strict=True, reason=AC9_REASON)
def test_ac9_hyperbolic_sweep_claim():
    code, rows = _hyperbolic_sweep()
    assert code == 0
    expected = {f: 4 if f <= 9 else 3 for f in prime_powers(5, 101)}
    assert rows == expected


def test_hyperbolic_sweep_actual_values():
    t0 = time.perf_counter()
    code, rows = _hyperbolic_sweep()
    assert time.perf_counter() - t0 < 120
    assert code == 0  # every row lies inside the 3..4 interval
    assert rows == {f: 4 if f in (5, 7, 9) else 3 for f in prime_powers(5, 101)}
    # not an artefact of the modulus or of a: both cubic moduli, every a, networkx
    for modulus in ((1, 1, 0, 1), (1, 0, 1, 1)):
        F8 = make_field(2, 3, modulus)
        assert {engine(hyperbolic(F8), a).diameter() for a in range(1, 8)} == {3}
    assert nx.diameter(oracles.graph(hyperbolic(field_of_order(8)), 1)) == 3


# --- AC10: property suites ---------------------------------------------------

@acceptance("AC10", "property suites")
def test_ac10_distance_depends_only_on_value():
    for F, q, a in grid():
        engine(q, a).distance_spectrum(check=True)  # raises on a counterexample
    for F, q, a in grid(fields=(2, 3, 4, 5, 7)):
        if q.size > 400:
            continue
        dist = nx.single_source_shortest_path_length(oracles.graph(q, a), (0,) * q.n)
        by_value = {}
        for v in oracles.vectors(F.order, q.n):
            if any(v):
                by_value.setdefault(oracles.q_eval(q, v), set()).add(dist.get(v, math.inf))
        assert all(len(ds) == 1 for ds in by_value.values())


@acceptance("AC10", "property suites")
def test_ac10_four_cycle_diagonals_are_perpendicular():
    cycles = 0
    for F, q, a in grid(dims=(2, 3, 4), fields=(2, 3, 4, 5, 7)):
        if q.size > 400:
            continue
        K = oracles.naive_of(F)
        g = engine(q, a)
        pt = [tuple(int(x) for x in c) for c in g.coords]
        for u, w, v in g.four_cycles_through_origin():
            cycles += 1
            assert oracles.polar(q, pt[w], oracles.vsub(K, pt[v], pt[u])) == 0
    assert cycles > 10 ** 4


@acceptance("AC10", "property suites")
def test_ac10_sumset_meets_isotropic_cone_trivially():
    for f in SMALL_FIELDS:
        F = field_of_order(f)
        for q in canonical_forms(F, 2):
            for a in range(1, f):
                sums = oracles.sumset_decompositions(q, a, a)
                assert [w for w in sums if oracles.q_eval(q, w) == 0] == [(0, 0)]


@acceptance("AC10", "property suites")
def test_ac10_isotropic_diameter_bounded_by_hyperbolic_plane():
    for f in GRID_FIELDS:
        F = field_of_order(f)
        for a in witnesses(F):
            bound = engine(hyperbolic(F), a).diameter()
            for n in (2, 3, 4):
                for q in canonical_forms(F, n):
                    if classify(q).isotropic:
                        assert engine(q, a).diameter() <= bound, (f, str(q), a)


@acceptance("AC10", "property suites")
def test_ac10_v1v1_reachability():
    for f in SMALL_FIELDS:
        F = field_of_order(f)
        for q in canonical_forms(F, 2):
            reached = {oracles.q_eval(q, w) for w in oracles.sumset_decompositions(q, 1, 1)}
            for a in range(1, f):
                assert v1v1_reachable(q, a) == (a in reached), (f, str(q), a)


@acceptance("AC10", "property suites")
def test_ac10_orthogonal_group_orders():
    checked = 0
    for n in (1, 2, 3):
        for f in prime_powers(2, int(round(512 ** (1 / n)))):
            if f ** n > 512:
                continue
            for q in canonical_forms(field_of_order(f), n):
                checked += 1
                assert orthogonal_group_order(q) == oracles.isometry_count(q), (f, str(q))
    assert checked > 100
