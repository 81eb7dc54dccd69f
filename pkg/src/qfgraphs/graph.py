"""Brute-force analysis of representation graphs.

The representation graph of (q, a) is the Cayley graph on (V, +) whose
connection set is N = {x != 0 : q(x) = a}.  Vertices are dense indices in
``[0, f**n)``; neighbours are computed by index arithmetic on coordinate
lookup tables, so only O(f**n) memory is needed beyond the connection set.

Because Cayley graphs are vertex transitive, a breadth-first search from the
origin is enough for both the diameter and the girth: any shortest cycle can
be translated to pass through 0, and the search sees it as either an edge
inside one BFS level (odd length) or a vertex with two parents (even length).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import CapExceeded
from .gf import rank
from .qform import DEFAULT_CAP, QuadraticForm, _enc, all_coords, vec_coords

INF = math.inf
DOT_CAP = 10_000

# Number of pair sums materialised per block.
_BLOCK = 1 << 21


def default_cap() -> int:
    return int(os.environ.get("QFGRAPHS_MAX_VERTICES", DEFAULT_CAP))


@dataclass(frozen=True)
class GraphJob:
    form: QuadraticForm
    a: int
    max_vertices: int = field(default_factory=default_cap)
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "a", _enc(self.form.field, self.a))


@dataclass(frozen=True)
class DistanceSpectrum:
    per_value: dict  # value b -> d(0, v_b), math.inf when unreachable
    diameter: float  # int or math.inf


@dataclass(frozen=True)
class CycleCensus:
    triangles_through_origin: int = 0
    triangles_total: int = 0
    four_cycles_through_origin: int = 0
    four_cycles_total: int = 0
    c1: int = 0
    c2: int = 0


@dataclass(frozen=True)
class BFSResult:
    dist: np.ndarray  # -1 for unreachable
    girth: float


class RepresentationGraph:
    """Lazily computed brute-force invariants of one representation graph."""

    def __init__(self, job: GraphJob):
        q = job.form
        if q.size > job.max_vertices:
            raise CapExceeded(q.size, job.max_vertices)
        self.job = job
        self.q = q
        self.F = q.field
        self.n = q.n
        self.a = job.a
        self.size = q.size

    # --- vertex arithmetic ----------------------------------------------
    @cached_property
    def coords(self) -> np.ndarray:
        return all_coords(self.F, self.n)

    @cached_property
    def values(self) -> np.ndarray:
        return self.q.value_array(self.job.max_vertices)

    @cached_property
    def weights(self) -> np.ndarray:
        f = self.F.order
        return np.array([f ** (self.n - 1 - i) for i in range(self.n)], dtype=np.int64)

    @cached_property
    def neighbors(self) -> np.ndarray:
        """Sorted indices of the connection set N."""
        idx = np.flatnonzero(self.values == self.a)
        return idx[idx != 0]

    @cached_property
    def negation(self) -> np.ndarray:
        neg = self.F.neg_table[self.coords]
        return neg @ self.weights

    def add_indices(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Outer sum: out[i, j] = index of x_i + y_j."""
        cx, cy = self.coords[xs], self.coords[ys]
        out = np.zeros((len(xs), len(ys)), dtype=np.int64)
        table = self.F.add_table
        for i in range(self.n):
            out += table[cx[:, i, None], cy[None, :, i]].astype(np.int64) * int(self.weights[i])
        return out

    def _blocks(self, xs: np.ndarray, width: int):
        step = max(1, _BLOCK // max(width, 1))
        return [xs[lo:lo + step] for lo in range(0, len(xs), step)]

    def _map(self, fn, blocks):
        if self.job.threads > 1 and len(blocks) > 1:
            with ThreadPoolExecutor(self.job.threads) as ex:
                return list(ex.map(fn, blocks))
        return [fn(b) for b in blocks]

    # --- connectivity ---------------------------------------------------
    @cached_property
    def bfs(self) -> BFSResult:
        N = self.neighbors
        dist = np.full(self.size, -1, dtype=np.int64)
        dist[0] = 0
        frontier = np.array([0], dtype=np.int64)
        level, seen, girth = 0, 1, INF
        while len(frontier) and not (seen == self.size and girth < INF):
            def expand(block, level=level):
                targets = self.add_indices(block, N).ravel()
                d = dist[targets]
                same = bool((d == level).any())
                new, counts = np.unique(targets[d == -1], return_counts=True)
                return same, new, counts

            parts = self._map(expand, self._blocks(frontier, len(N)))
            same = any(p[0] for p in parts)
            new = np.concatenate([p[1] for p in parts]) if parts else np.zeros(0, np.int64)
            counts = np.concatenate([p[2] for p in parts]) if parts else np.zeros(0, np.int64)
            new, inv = np.unique(new, return_inverse=True)
            hits = np.bincount(inv, weights=counts, minlength=len(new)) if len(new) else counts
            if girth == INF:
                if same:
                    girth = 2 * level + 1
                elif len(hits) and hits.max() >= 2:
                    girth = 2 * level + 2
            dist[new] = level + 1
            seen += len(new)
            frontier = new
            level += 1
        return BFSResult(dist, girth)

    def component_count_bfs(self) -> int:
        return self.size // int((self.bfs.dist >= 0).sum())

    def component_count_span(self) -> int:
        """Index of the subgroup generated by N: its size is p**rank over GF(p)."""
        F = self.F
        if not len(self.neighbors):
            return self.size
        digits = [F.coeffs(int(x)) for x in range(F.order)]
        rows = []
        for v in self.coords[self.neighbors]:
            rows.append([d for x in v for d in digits[x]])
        from .gf import make_field
        Fp = make_field(F.p)
        r = rank(Fp, _independent_subset(Fp, rows))
        return self.size // F.p ** r

    def component_count(self) -> int:
        return self.component_count_span()

    def distance_spectrum(self, check: bool = False) -> DistanceSpectrum:
        dist = self.bfs.dist
        vals = self.values
        per_value = {}
        for b in np.unique(vals[1:]):
            reps = np.flatnonzero(vals == b)
            reps = reps[reps != 0]
            d = dist[reps]
            if check and len(np.unique(d)) != 1:
                raise AssertionError(f"vertices with value {b} have different distances")
            per_value[int(b)] = INF if d[0] < 0 else int(d[0])
        diameter = INF if (dist < 0).any() else int(dist.max())
        return DistanceSpectrum(per_value, diameter)

    def diameter(self) -> float:
        dist = self.bfs.dist
        return INF if (dist < 0).any() else int(dist.max())

    def girth(self) -> float:
        return self.bfs.girth

    # --- cycles ---------------------------------------------------------
    def triangle_pairs(self) -> np.ndarray:
        """Unordered pairs (i, j), i < j, of indices into N forming a triangle with 0."""
        N = self.neighbors
        negN = self.negation[N]

        def scan(rows):
            lo = rows[0]
            diff = self.add_indices(N[rows], negN)
            ii, jj = np.nonzero(self.values[diff] == self.a)
            ii = ii + lo
            keep = ii < jj
            return np.stack([ii[keep], jj[keep]], axis=1)

        blocks = self._blocks(np.arange(len(N)), len(N))
        parts = self._map(scan, blocks)
        return np.concatenate(parts) if parts else np.zeros((0, 2), dtype=np.int64)

    def _dependent(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Elementwise: is ys[k] a scalar multiple of the nonzero vector xs[k]?"""
        F = self.F
        cx, cy = self.coords[xs], self.coords[ys]
        i0 = np.argmax(cx != 0, axis=1)
        rows = np.arange(len(xs))
        c = F.mul(cy[rows, i0], F.inv_table[cx[rows, i0]])
        ok = np.ones(len(xs), dtype=bool)
        for j in range(self.n):
            ok &= F.mul(c, cx[:, j]) == cy[:, j]
        return ok

    def triangle_census(self) -> CycleCensus:
        N = self.neighbors
        pairs = self.triangle_pairs()
        if len(pairs):
            dep = self._dependent(N[pairs[:, 0]], N[pairs[:, 1]])
            c1 = int(dep.sum())
        else:
            c1 = 0
        c2 = len(pairs) - c1
        through = c1 + c2
        return CycleCensus(triangles_through_origin=through, triangles_total=through * self.size // 3,
                           c1=c1, c2=c2)

    @cached_property
    def path2_counts(self) -> np.ndarray:
        """r[w] = number of u in N with w - u in N (0-w paths of length 2)."""
        N = self.neighbors

        def count(block):
            return np.bincount(self.add_indices(block, N).ravel(), minlength=self.size)

        parts = self._map(count, self._blocks(N, len(N)))
        return sum(parts) if parts else np.zeros(self.size, dtype=np.int64)

    def four_cycle_census(self) -> CycleCensus:
        r = self.path2_counts[1:].astype(np.int64)
        through = int((r * (r - 1) // 2).sum())
        return CycleCensus(four_cycles_through_origin=through, four_cycles_total=through * self.size // 4)

    def four_cycles_through_origin(self):
        """Yield every 4-cycle (u, w, v) with 0-u-w-v-0, u < v by index."""
        N = self.neighbors
        nset = set(int(x) for x in N)
        for w in np.flatnonzero(self.path2_counts >= 2):
            w = int(w)
            if w == 0:
                continue
            mids = [int(u) for u in N if int(self._sub(w, int(u))) in nset]
            for i in range(len(mids)):
                for j in range(i + 1, len(mids)):
                    yield mids[i], w, mids[j]

    def _sub(self, x: int, y: int) -> int:
        return int(self.add_indices(np.array([x]), np.array([self.negation[y]]))[0, 0])

    # --- export ---------------------------------------------------------
    def edges(self):
        """All edges (i, j) with i < j, sorted."""
        N = self.neighbors
        for block in self._blocks(np.arange(self.size), len(N)):
            S = self.add_indices(block, N)
            for row, i in zip(S, block):
                for j in np.sort(row[row > i]):
                    yield int(i), int(j)

    def vertex_label(self, i: int) -> str:
        return "(" + ",".join(map(str, vec_coords(self.F, self.n, i))) + ")"


def _independent_subset(F, rows):
    """Greedy basis of the row span; keeps the rank computation small."""
    basis = []
    for r in rows:
        if rank(F, basis + [r]) > len(basis):
            basis.append(r)
    return basis


# --- module-level operations -------------------------------------------

def neighbor_set(job: GraphJob) -> list[tuple]:
    g = RepresentationGraph(job)
    return [vec_coords(g.F, g.n, int(i)) for i in g.neighbors]


def component_count(job: GraphJob) -> int:
    return RepresentationGraph(job).component_count()


def distance_spectrum(job: GraphJob, check: bool = False) -> DistanceSpectrum:
    return RepresentationGraph(job).distance_spectrum(check)


def girth_bruteforce(job: GraphJob) -> float:
    return RepresentationGraph(job).girth()


def triangle_census(job: GraphJob) -> CycleCensus:
    return RepresentationGraph(job).triangle_census()


def four_cycle_census(job: GraphJob) -> CycleCensus:
    return RepresentationGraph(job).four_cycle_census()


def export_graph(job: GraphJob, fmt: str, sink) -> int:
    """Write the graph as an edge list ("i j" per line) or DOT; returns the edge count."""
    g = RepresentationGraph(job)
    if fmt == "dot" and g.size > DOT_CAP:
        raise CapExceeded(g.size, DOT_CAP)
    count = 0
    if fmt == "edges":
        for i, j in g.edges():
            sink.write(f"{i} {j}\n")
            count += 1
        return count
    if fmt != "dot":
        raise ValueError(f"unknown export format {fmt!r}")
    sink.write("graph G {\n")
    for i in range(g.size):
        sink.write(f'  {i} [label="{g.vertex_label(i)}"];\n')
    for i, j in g.edges():
        sink.write(f"  {i} -- {j};\n")
        count += 1
    sink.write("}\n")
    return count
