"""Lattice sums: modular graph functions and the direct Eisenstein sum.

Sums run over a sharp box [-M, M] in the coordinates of a kernel basis.
Each chunk is reduced with numpy, chunk partials are merged with
``math.fsum`` in chunk order, so the value does not depend on ``jobs``.
The error estimate is |V(M) − V(M/2)|; ``extrapolated`` removes the
leading M^{-p} tail, with p from power counting.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class GraphSpec:
    vertices: tuple
    edges: tuple  # (tail, head) pairs; None marks a free end

    def __post_init__(self):
        if not self.edges:
            raise ValueError("a graph needs at least one edge")
        verts = set(self.vertices)
        for tail, head in self.edges:
            if tail is None and head is None:
                raise ValueError("an edge needs at least one endpoint")
            for v in (tail, head):
                if v is not None and v not in verts:
                    raise ValueError(f"edge endpoint {v!r} is not a vertex")
            if tail is not None and tail == head:
                raise ValueError(f"self-edge at {tail!r}")
        if not _connected(self.vertices, self.edges):
            raise ValueError("graph is disconnected")

    @classmethod
    def from_json(cls, data) -> "GraphSpec":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple(data["vertices"]), tuple((e.get("tail"), e.get("head")) for e in data["edges"]))

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [{"tail": t, "head": h} for t, h in self.edges]}

    def reversed_edge(self, i: int) -> "GraphSpec":
        edges = list(self.edges)
        edges[i] = edges[i][::-1]
        return GraphSpec(self.vertices, tuple(edges))


def _connected(vertices, edges) -> bool:
    if not vertices:
        return False
    adj = {v: set() for v in vertices}
    for t, h in edges:
        if t is not None and h is not None:
            adj[t].add(h)
            adj[h].add(t)
    seen, stack = {vertices[0]}, [vertices[0]]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(vertices)


def c111_graph() -> GraphSpec:
    return GraphSpec(("v",), ((None, "v"), (None, "v"), (None, "v")))


def c211_graph() -> GraphSpec:
    return GraphSpec(("v1", "v2"), ((None, "v1"), ("v1", "v2"), ("v2", None), ("v2", None)))


@dataclass
class LatticeResult:
    value: complex | float
    cutoff: int
    error_estimate: float
    term_count: int
    value_half: complex | float = 0.0
    extrapolated: complex | float = 0.0
    tail_exponent: int = 2
    warnings: list = field(default_factory=list)

    def to_json(self) -> dict:
        def num(v):
            if isinstance(v, complex):
                return {"re": float(f"{v.real:.17g}"), "im": float(f"{v.imag:.17g}")}
            return float(f"{v:.17g}")

        return {
            "value": num(self.value),
            "extrapolated": num(self.extrapolated),
            "value_half": num(self.value_half),
            "error_estimate": float(f"{self.error_estimate:.17g}"),
            "cutoff": self.cutoff,
            "term_count": self.term_count,
            "tail_exponent": self.tail_exponent,
            "warnings": list(self.warnings),
        }


def incidence_matrix(G: GraphSpec) -> list:
    """ε_{v,i}: +1 if edge i points into v, -1 if it leaves v."""
    rows = []
    for v in G.vertices:
        rows.append([(1 if h == v else 0) - (1 if t == v else 0) for t, h in G.edges])
    return rows


def momentum_basis(G: GraphSpec) -> np.ndarray:
    """Integer basis (d × E) of the momentum-conservation lattice."""
    rows = [[Fraction(x) for x in row] for row in incidence_matrix(G)]
    E = len(G.edges)
    pivots, rank = [], 0
    for c in range(E):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][c]
        rows[rank] = [x / p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        pivots.append(c)
        rank += 1
    basis = []
    for fc in (c for c in range(E) if c not in pivots):
        v = [Fraction(0)] * E
        v[fc] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -rows[i][fc]
        if any(x.denominator != 1 for x in v):
            raise ValueError("momentum kernel basis is not integral")
        basis.append([int(x) for x in v])
    return np.array(basis, dtype=np.int64).reshape(len(basis), E)


def tail_exponent(basis: np.ndarray) -> int:
    """Power-counting decay exponent of the box tail.

    For every set T of edges, the momenta that vanish on T span a subspace
    of dimension d − rank(T) on which only the edges outside the span of T
    decay; the exponent is the minimum of 2·#decaying − 2·dim over such T.
    This does not depend on the choice of basis.  It is a heuristic, not a
    convergence proof: a value ≤ 0 signals a divergent direction.
    """
    d, E = basis.shape
    forms = basis.T.astype(np.float64)

    def rank(rows):
        return int(np.linalg.matrix_rank(forms[list(rows)])) if rows else 0

    best = None
    seen = set()
    for size in range(E + 1):
        for T in itertools.combinations(range(E), size):
            rk = rank(T)
            if rk >= d:
                continue
            closure = frozenset(e for e in range(E) if e in T or rank(T + (e,)) == rk)
            if closure in seen:
                continue
            seen.add(closure)
            p = 2 * (E - len(closure)) - 2 * (d - rk)
            best = p if best is None else min(best, p)
    return 2 if best is None else best


def _box(d: int, M: int) -> np.ndarray:
    axis = np.arange(-M, M + 1, dtype=np.int64)
    if d == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _run_chunks(task, chunks, jobs):
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(task, chunks))
    return [task(c) for c in chunks]


def _merge(parts, index):
    vals = [p[index] for p in parts]
    if any(isinstance(v, complex) for v in vals):
        return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))
    return math.fsum(vals)


def _extrapolate(v, v_half, p):
    f = 2.0**p
    return (f * v - v_half) / (f - 1.0)


def canonical_edges(G: GraphSpec) -> GraphSpec:
    """Same graph with edge orientations and edge order normalised.

    The summand is blind to both, so the lattice sum of the canonical graph
    is the sum of ``G``; computing it that way makes relabelling and
    reorienting edges bit-exact no-ops.
    """

    def key(v):
        return "" if v is None else str(v)

    def orient(edge):
        t, h = edge
        if h is None or (t is not None and key(t) > key(h)):
            t, h = h, t
        return (t, h)

    edges = sorted((orient(e) for e in G.edges), key=lambda e: (key(e[0]), key(e[1])))
    return GraphSpec(G.vertices, tuple(edges))


def graph_sum(G: GraphSpec, z: complex, M: int, *, basis: np.ndarray | None = None, jobs: int = 1, chunk: int = 32) -> LatticeResult:
    """π^{-E} Σ Π_i Im z/|m_i z + n_i|² over the box of kernel coordinates.

    ``basis`` overrides the computed kernel basis (rows index basis vectors,
    columns follow ``G.edges``); by default the sum runs over the canonical
    form of ``G``.
    """
    if M < 2:
        raise ValueError("cutoff M must be >= 2")
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half plane")
    if basis is None:
        basis = momentum_basis(canonical_edges(G))
    else:
        basis = np.asarray(basis, dtype=np.int64)
        if basis.ndim != 2 or basis.shape[1] != len(G.edges) or np.any(basis @ np.array(incidence_matrix(G)).T):
            raise ValueError("supplied basis does not solve the momentum constraints")
    d, E = basis.shape
    notes = []
    if d == 0:
        return LatticeResult(0.0, M, 0.0, 0, warnings=["empty momentum lattice"])
    p = tail_exponent(basis)
    if p <= 0 or np.any(np.all(basis == 0, axis=0)):
        msg = f"power counting suggests divergence (exponent {p})"
        warnings.warn(msg)
        notes.append(msg)
    x, y = z.real, z.imag
    coords = _box(d, M)
    inner = np.all(np.abs(coords) <= M // 2, axis=1)
    m_all = coords @ basis  # (K, E)
    n_all = m_all.astype(np.float64)
    starts = range(0, len(coords), chunk)

    def task(start):
        mm = m_all[start : start + chunk].astype(np.float64)  # (c, E)
        re = mm[:, None, :] * x + n_all[None, :, :]
        im = mm[:, None, :] * y
        denom = re * re + im * im
        zero = np.any(denom == 0, axis=2)
        safe = np.where(denom == 0, 1.0, denom)
        terms = np.prod(y / safe, axis=2)
        terms[zero] = 0.0
        in_mask = inner[start : start + chunk, None] & inner[None, :]
        return float(terms.sum()), float(terms[in_mask].sum()), int(terms.size - zero.sum())

    parts = _run_chunks(task, list(starts), jobs)
    scale = math.pi ** (-E)
    value = _merge(parts, 0) * scale
    half = _merge(parts, 1) * scale
    count = sum(p_[2] for p_ in parts)
    return LatticeResult(value, M, abs(value - half), count, half, _extrapolate(value, half, p), p, notes)


def eisenstein_lattice(r: int, s: int, z: complex, M: int, *, jobs: int = 1, chunk: int = 64) -> LatticeResult:
    """w!/(2πi)^{w+2} · ½ Σ' L/((mz+n)^{r+1}(mz̄+n)^{s+1}) over |m|, |n| ≤ M.

    The value is complex in general; for r = s it is real.
    """
    w = r + s
    if w < 2 or w % 2 or r < 0 or s < 0:
        raise ValueError(f"need r, s >= 0 with r + s >= 2 even, got ({r}, {s})")
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half plane")
    zb = z.conjugate()
    L = -2.0 * math.pi * z.imag
    n = np.arange(-M, M + 1, dtype=np.float64)
    inner_n = np.abs(n) <= M // 2
    rows = np.arange(-M, M + 1)

    def task(start):
        ms = rows[start : start + chunk].astype(np.float64)
        a = ms[:, None] * z + n[None, :]
        b = ms[:, None] * zb + n[None, :]
        zero = (ms[:, None] == 0) & (n[None, :] == 0)
        a = np.where(zero, 1.0, a)
        b = np.where(zero, 1.0, b)
        terms = 1.0 / (a ** (r + 1) * b ** (s + 1))
        terms[zero] = 0.0
        mask = (np.abs(ms) <= M // 2)[:, None] & inner_n[None, :]
        return complex(terms.sum()), complex(terms[mask].sum()), int(terms.size - zero.sum())

    parts = _run_chunks(task, list(range(0, len(rows), chunk)), jobs)
    pref = math.factorial(w) / (2j * math.pi) ** (w + 2) * 0.5 * L
    value = _merge(parts, 0) * pref
    half = _merge(parts, 1) * pref
    count = sum(p[2] for p in parts)
    return LatticeResult(value, M, abs(value - half), count, half, _extrapolate(value, half, w), w)
