"""Regular and bipartite graphs, their spectra, and approximate schemes.

An approximate scheme uses ``B = A_G / d`` for a connected d-regular graph
(or ``B = C / d`` for the biadjacency block of a bipartite one). The linear
decoder spreads weight ``n / (n - s)`` over the surviving workers; the
optimal decoder is the least-squares combination of the surviving rows.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import Disconnected, EmptySet, GenerationFailure, InvalidParams

MAX_ATTEMPTS = 1000


def _is_connected(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    if n == 0:
        return True
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    nbrs = [np.flatnonzero(row) for row in adj]
    while queue:
        v = queue.popleft()
        for u in nbrs[v]:
            if not seen[u]:
                seen[u] = True
                queue.append(u)
    return bool(seen.all())


@dataclass(frozen=True, eq=False)
class SpectralGraph:
    """A d-regular graph with its adjacency spectrum (descending)."""

    adjacency: np.ndarray
    d: int
    eigenvalues: np.ndarray
    lam: float
    connected: bool
    multigraph: bool = False

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def is_bipartite(self) -> bool:
        # connected regular graph is bipartite iff -d is an eigenvalue
        return bool(abs(self.eigenvalues[-1] + self.d) < 1e-8)


def graph_from_adjacency(adj, multigraph: bool = False) -> SpectralGraph:
    adj = np.array(adj, dtype=float)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise InvalidParams("adjacency must be square")
    if not np.array_equal(adj, adj.T):
        raise InvalidParams("adjacency must be symmetric")
    if not multigraph and (np.any(np.diag(adj) != 0) or not np.isin(adj, (0, 1)).all()):
        raise InvalidParams("simple graph needs a 0/1 adjacency with zero diagonal")
    deg = adj.sum(axis=1)
    if not np.all(deg == deg[0]):
        raise InvalidParams("graph is not regular")
    _, lam, ev = _spectrum(adj)
    adj.setflags(write=False)
    ev.setflags(write=False)
    return SpectralGraph(adjacency=adj, d=int(deg[0]), eigenvalues=ev, lam=lam,
                         connected=_is_connected(adj), multigraph=multigraph)


def _spectrum(adj: np.ndarray) -> tuple[float, float, np.ndarray]:
    ev = np.linalg.eigvalsh(adj)[::-1].copy()
    if ev.size == 1:
        return float(ev[0]), 0.0, ev
    return float(ev[0]), float(max(abs(ev[1]), abs(ev[-1]))), ev


def spectral_gap(g: SpectralGraph | np.ndarray) -> tuple[float, float, np.ndarray]:
    """Return ``(lambda_1, lambda, spectrum)`` with ``lambda = max(|l_2|, |l_n|)``."""
    adj = g.adjacency if isinstance(g, SpectralGraph) else np.asarray(g, dtype=float)
    if not np.allclose(adj, adj.T):
        raise InvalidParams("adjacency must be symmetric")
    return _spectrum(adj)


def complete_graph(n: int) -> SpectralGraph:
    return graph_from_adjacency(np.ones((n, n)) - np.eye(n))


def cycle_graph(n: int) -> SpectralGraph:
    adj = np.zeros((n, n))
    i = np.arange(n)
    adj[i, (i + 1) % n] = 1
    adj[(i + 1) % n, i] = 1
    return graph_from_adjacency(adj)


def _try_pairing(n: int, d: int, rng: np.random.Generator) -> set | None:
    # stub pairing; clashing stubs are re-shuffled among themselves
    edges: set[tuple[int, int]] = set()
    stubs = np.repeat(np.arange(n), d)
    for _ in range(100 * d + 100):
        if not stubs.size:
            return edges
        rng.shuffle(stubs)
        left = []
        for a, b in zip(stubs[0::2], stubs[1::2]):
            a, b = (int(a), int(b)) if a < b else (int(b), int(a))
            if a != b and (a, b) not in edges:
                edges.add((a, b))
            else:
                left.extend((a, b))
        if len(left) == stubs.size:
            # nothing paired this round; give up if no valid pair exists at all
            uniq = sorted(set(left))
            if not any(u < v and (u, v) not in edges for u in uniq for v in uniq):
                return None
        stubs = np.array(left, dtype=int)
    return None if stubs.size else edges


def random_regular_graph(n: int, d: int, seed: int | None = None) -> SpectralGraph:
    """Random simple connected d-regular graph on ``n`` vertices.

    Stubs are paired at random; pairs forming loops or repeated edges are
    returned to the pool and re-paired. Disconnected or stuck attempts are
    discarded, up to ``MAX_ATTEMPTS`` draws from the seeded stream.
    """
    if n * d % 2:
        raise InvalidParams(f"n*d must be even (n={n}, d={d})")
    if not 0 < d < n:
        raise InvalidParams(f"need 0 < d < n (n={n}, d={d})")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_ATTEMPTS):
        edges = _try_pairing(n, d, rng)
        if edges is None:
            continue
        adj = np.zeros((n, n))
        for a, b in edges:
            adj[a, b] = adj[b, a] = 1
        if _is_connected(adj):
            return graph_from_adjacency(adj)
    raise GenerationFailure(f"no connected {d}-regular graph on {n} vertices "
                            f"after {MAX_ATTEMPTS} attempts")


def margulis_graph(m: int) -> SpectralGraph:
    """8-regular Margulis / Gabber-Galil expander on Z_m x Z_m.

    Vertex ``(x, y)`` is joined to ``(x +- 2y, y)``, ``(x +- (2y+1), y)``,
    ``(x, y +- 2x)`` and ``(x, y +- (2x+1))`` mod m. Parallel edges and
    loops are kept with multiplicity so every row sums to 8.
    """
    if m < 2:
        raise InvalidParams("m must be at least 2")
    n = m * m
    adj = np.zeros((n, n))
    x, y = np.divmod(np.arange(n), m)
    targets = [
        ((x + 2 * y) % m, y), ((x - 2 * y) % m, y),
        ((x + 2 * y + 1) % m, y), ((x - 2 * y - 1) % m, y),
        (x, (y + 2 * x) % m), (x, (y - 2 * x) % m),
        (x, (y + 2 * x + 1) % m), (x, (y - 2 * x - 1) % m),
    ]
    src = np.arange(n)
    for tx, ty in targets:
        np.add.at(adj, (src, tx * m + ty), 1)
    g = graph_from_adjacency(adj, multigraph=True)
    assert g.d == 8
    return g


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """d-regular bipartite graph on ``2n`` vertices, given by its n x n block ``C``."""

    C: np.ndarray
    d: int
    singular_values: np.ndarray
    connected: bool

    @property
    def n(self) -> int:
        return self.C.shape[0]

    @property
    def lambda_bipartite(self) -> float:
        return float(self.singular_values[1]) if self.n > 1 else 0.0

    def full_adjacency(self) -> np.ndarray:
        n = self.n
        A = np.zeros((2 * n, 2 * n))
        A[:n, n:] = self.C
        A[n:, :n] = self.C.T
        return A


def bipartite_from_block(C) -> BipartiteGraph:
    C = np.array(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise InvalidParams("biadjacency block must be square")
    rows, cols = C.sum(axis=1), C.sum(axis=0)
    if not (np.all(rows == rows[0]) and np.all(cols == rows[0])):
        raise InvalidParams("block is not d-regular on both sides")
    sv = np.linalg.svd(C, compute_uv=False)
    C.setflags(write=False)
    g = BipartiteGraph(C=C, d=int(rows[0]), singular_values=sv, connected=False)
    object.__setattr__(g, "connected", _is_connected(g.full_adjacency()))
    return g


def complete_bipartite(n: int) -> BipartiteGraph:
    return bipartite_from_block(np.ones((n, n)))


def random_bipartite_regular_graph(n: int, d: int, seed: int | None = None,
                                   swaps_per_edge: int = 10) -> BipartiteGraph:
    """Random connected d-regular bipartite graph via double-edge swaps.

    Starts from the circulant block ``C[i, (i + k) mod n] = 1, k < d`` and
    applies ``swaps_per_edge * n * d`` swap attempts
    ``(a, b), (c, e) -> (a, e), (c, b)`` that keep the graph simple.
    """
    if not 0 < d <= n:
        raise InvalidParams(f"need 0 < d <= n (n={n}, d={d})")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_ATTEMPTS):
        C = np.zeros((n, n))
        i = np.arange(n)
        for k in range(d):
            C[i, (i + k) % n] = 1
        rows, cols = np.nonzero(C)
        edges = np.stack([rows, cols], axis=1)
        m = edges.shape[0]
        for _ in range(swaps_per_edge * m):
            p, q = rng.integers(m, size=2)
            (a, b), (c, e) = edges[p], edges[q]
            if a == c or b == e or C[a, e] or C[c, b]:
                continue
            C[a, b] = C[c, e] = 0
            C[a, e] = C[c, b] = 1
            edges[p] = (a, e)
            edges[q] = (c, b)
        g = bipartite_from_block(C)
        if g.connected:
            return g
    raise GenerationFailure("could not generate a connected bipartite graph")


@dataclass(frozen=True, eq=False)
class ApproxScheme:
    """Row-stochastic encoding matrix from a graph (or the identity)."""

    n: int
    d: int
    B: np.ndarray
    kind: str  # "expander", "bipartite" or "identity"
    bound_lambda: float
    graph: object = field(default=None, repr=False)

    def __post_init__(self):
        self.B.setflags(write=False)

    @property
    def k(self) -> int:
        return self.B.shape[1]

    @property
    def storage_overhead(self) -> int:
        return int(np.count_nonzero(self.B, axis=1).max())


def build_expander_scheme(g: SpectralGraph) -> ApproxScheme:
    if not g.connected:
        raise Disconnected("graph must be connected")
    if g.is_bipartite:
        warnings.warn("bipartite graph has lambda = d, so the error bound is no "
                      "better than ignoring stragglers; use build_bipartite_scheme",
                      stacklevel=2)
    return ApproxScheme(n=g.n, d=g.d, B=g.adjacency / g.d, kind="expander",
                        bound_lambda=g.lam, graph=g)


def build_bipartite_scheme(g: BipartiteGraph) -> ApproxScheme:
    if not g.connected:
        raise Disconnected("bipartite graph must be connected")
    return ApproxScheme(n=g.n, d=g.d, B=g.C / g.d, kind="bipartite",
                        bound_lambda=g.lambda_bipartite, graph=g)


def identity_scheme(n: int) -> ApproxScheme:
    """The trivial scheme: every worker holds one part, stragglers are ignored."""
    return ApproxScheme(n=n, d=1, B=np.eye(n), kind="identity", bound_lambda=1.0)


def _as_index_set(K: Iterable[int], n: int) -> np.ndarray:
    K = np.unique(np.asarray(list(K), dtype=int))
    if K.size == 0:
        raise EmptySet("non-straggler set is empty")
    if K[0] < 0 or K[-1] >= n:
        raise InvalidParams(f"indices out of range for n={n}")
    return K


def u_vector(K: Iterable[int], n: int) -> np.ndarray:
    """``-1`` off ``K`` and ``s / (n - s)`` on ``K``; sums to zero."""
    K = _as_index_set(K, n)
    s = n - K.size
    u = -np.ones(n)
    u[K] = s / (n - s)
    return u


def linear_decoder(K: Iterable[int], n: int) -> np.ndarray:
    """``A(K) = 1 + u_K``: weight ``n / (n - s)`` on K, zero elsewhere."""
    K = _as_index_set(K, n)
    a = np.zeros(n)
    a[K] = n / K.size
    return a


def ignore_stragglers_decoder(K: Iterable[int], n: int) -> np.ndarray:
    """Characteristic vector of ``K``."""
    K = _as_index_set(K, n)
    a = np.zeros(n)
    a[K] = 1.0
    return a


def least_squares_decoder(B: np.ndarray, K: Iterable[int]) -> np.ndarray:
    B = np.asarray(B)
    n = B.shape[0]
    K = _as_index_set(K, n)
    target = np.ones(B.shape[1], dtype=B.dtype)
    sol, *_ = np.linalg.lstsq(B[K].T, target, rcond=None)
    a = np.zeros(n, dtype=sol.dtype)
    a[K] = sol
    return a


def optimal_decoder(scheme, K: Iterable[int]) -> np.ndarray:
    """Minimum-norm least-squares solution of ``a B[K, :] ~ 1``, zero off ``K``."""
    return least_squares_decoder(scheme.B, K)


def residual(a: np.ndarray, B: np.ndarray, ord=2) -> float:
    """``|| a B - 1 ||`` in the requested norm."""
    return float(np.linalg.norm(a @ B - 1.0, ord=ord))


def sample_nonstragglers(n: int, s: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform (n - s)-subset via a seeded shuffle prefix, sorted."""
    return np.sort(rng.permutation(n)[: n - s])
