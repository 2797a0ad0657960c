"""Exact and approximate recovery checks, error bounds, and the lower bound.

Reports list non-straggler sets 1-based; everything else is 0-based.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import CapExceeded, EmptySet, InvalidParams
from .expander import least_squares_decoder, sample_nonstragglers

EC_TOL = 1e-8
AC_TOL = 1e-9
DEFAULT_CAP = 10**6

Decoder = Callable[[object, np.ndarray], np.ndarray]


@dataclass
class VerificationReport:
    scheme_id: str
    mode: str
    norm: str
    sets_tested: int
    max_residual: float
    violations: int
    worst_set: list[int] | None = None
    worst_margin: float | None = None
    tolerance: float = 0.0
    passed: bool = True
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _matrix(scheme) -> np.ndarray:
    return np.asarray(getattr(scheme, "B", scheme))


def _scheme_id(scheme) -> str:
    kind = getattr(scheme, "kind", "") or "matrix"
    B = _matrix(scheme)
    extra = ""
    if hasattr(scheme, "s") and getattr(scheme, "s", None) is not None:
        extra = f",s={scheme.s}"
    elif hasattr(scheme, "d"):
        extra = f",d={scheme.d}"
    return f"{kind}(n={B.shape[0]}{extra})"


def _default_exact_decoder(scheme, K):
    from .coding import decode

    return decode(scheme, K)


def check_ec(scheme, decoder: Decoder | None = None, mode: str = "exhaustive", *,
             s: int | None = None, samples: int = 1000, seed: int = 0,
             cap: int = DEFAULT_CAP, tol: float = EC_TOL) -> VerificationReport:
    """Check ``A(K) B = 1`` (infinity norm) over non-straggler sets of size n - s.

    ``scheme`` is an exact scheme or a bare matrix; for a bare matrix pass
    ``s`` and a ``decoder(B, K)``.
    """
    B = _matrix(scheme)
    n = B.shape[0]
    if s is None:
        s = scheme.s
    if decoder is None:
        decoder = _default_exact_decoder
    ones = np.ones(B.shape[1])

    if mode == "exhaustive":
        if math.comb(n, s) > cap:
            raise CapExceeded(f"C({n},{s}) = {math.comb(n, s)} exceeds cap {cap}")
        sets: Iterable = combinations(range(n), n - s)
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        sets = (sample_nonstragglers(n, s, rng) for _ in range(samples))
    else:
        raise InvalidParams(f"unknown mode {mode!r}")

    worst, worst_K, count, bad = 0.0, None, 0, 0
    for K in sets:
        K = np.asarray(K, dtype=int)
        a = decoder(scheme, K)
        r = float(np.abs(a @ B - ones).max())
        count += 1
        if r > tol:
            bad += 1
        if r > worst or worst_K is None:
            worst, worst_K = r, K
    return VerificationReport(
        scheme_id=_scheme_id(scheme), mode=mode, norm="inf", sets_tested=count,
        max_residual=worst, violations=bad,
        worst_set=None if worst_K is None else (worst_K + 1).tolist(),
        worst_margin=tol - worst, tolerance=tol, passed=bad == 0)


def check_eps_ac(scheme, decoder: Decoder, epsilon: Callable[[int], float], *,
                 s: int | Sequence[int] | None = None, samples: int = 200,
                 seed: int = 0, tol: float = AC_TOL) -> VerificationReport:
    """Check ``||A(K) B - 1||_2 <= epsilon(|K^c|)`` on sampled sets.

    ``s`` is one straggler count or several; by default every ``s`` in
    ``0..n-1`` is sampled ``samples`` times. The margin is
    ``epsilon(s) - residual``; the worst (smallest) one is reported.
    """
    B = _matrix(scheme)
    n = B.shape[0]
    if abs(epsilon(0)) > tol:
        raise InvalidParams("epsilon(0) must be 0")
    if s is None:
        s_values = list(range(n))
    elif isinstance(s, (int, np.integer)):
        s_values = [int(s)]
    else:
        s_values = [int(v) for v in s]
    eps = [epsilon(v) for v in s_values]
    order = np.argsort(s_values)
    if np.any(np.diff(np.asarray(eps)[order]) < -tol):
        raise InvalidParams("epsilon must be non-decreasing")

    rng = np.random.default_rng(seed)
    ones = np.ones(B.shape[1])
    worst_res, worst_margin, worst_K, count, bad = 0.0, math.inf, None, 0, 0
    for sv, bound in zip(s_values, eps):
        for _ in range(samples):
            K = sample_nonstragglers(n, sv, rng)
            r = float(np.linalg.norm(decoder(scheme, K) @ B - ones))
            count += 1
            margin = bound - r
            worst_res = max(worst_res, r)
            if r > bound + tol:
                bad += 1
            if margin < worst_margin:
                worst_margin, worst_K = margin, K
    return VerificationReport(
        scheme_id=_scheme_id(scheme), mode="sampled", norm="2", sets_tested=count,
        max_residual=worst_res, violations=bad,
        worst_set=None if worst_K is None else (worst_K + 1).tolist(),
        worst_margin=worst_margin, tolerance=tol, passed=bad == 0,
        details={"s_values": s_values})


def epsilon_bound(n: int, s: int, d: float, lam: float) -> float:
    """``(lam / d) * sqrt(n s / (n - s))``."""
    if not 0 <= s < n:
        raise InvalidParams(f"need 0 <= s < n, got n={n}, s={s}")
    if d <= 0 or lam < 0:
        raise InvalidParams("need d > 0 and lambda >= 0")
    return lam / d * math.sqrt(n * s / (n - s))


def epsilon_bound_bipartite(n: int, s: int, d: float, lambda_bipartite: float) -> float:
    """Same bound with the second singular value of the biadjacency block."""
    return epsilon_bound(n, s, d, lambda_bipartite)


def trivial_bound(s: int) -> float:
    return math.sqrt(s)


def benefits_over_trivial(n: int, s: int, d: float, lam: float) -> bool:
    """True when ``(lam/d) sqrt(n/(n-s)) < 1``, i.e. the graph bound beats sqrt(s)."""
    return lam / d * math.sqrt(n / (n - s)) < 1


def scheme_epsilon(scheme) -> Callable[[int], float]:
    """The error function a scheme's construction guarantees."""
    kind = getattr(scheme, "kind", "")
    n = _matrix(scheme).shape[0]
    if kind == "identity":
        return trivial_bound
    if kind in ("expander", "bipartite"):
        return lambda s: epsilon_bound(n, s, scheme.d, scheme.bound_lambda)
    return lambda s: 0.0


def adversarial_straggler_set(B, s: int, d: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Greedy straggler set that starves ``floor(s/d)`` partitions.

    Repeatedly takes the remaining partition with fewest remaining worker
    neighbours (smallest index on ties), removes it together with those
    workers. Returns ``(K, Q)``: the ``n - s`` smallest-index workers that
    avoid ``N(Q)``, and the starved partitions ``Q``. Any ``a`` supported
    on ``K`` has ``(a B)_q = 0`` for every ``q`` in ``Q``.
    """
    B = np.asarray(B)
    n = B.shape[0]
    support = B != 0
    row_deg = support.sum(axis=1)
    if d is None:
        d = int(row_deg.max())
    if np.any(row_deg > d):
        raise InvalidParams(f"some row has more than d={d} nonzeros")
    if s <= d:
        raise InvalidParams(f"need s > d (s={s}, d={d})")
    if s >= n:
        raise InvalidParams(f"need s < n (s={s}, n={n})")

    workers = np.ones(n, dtype=bool)
    parts = np.ones(B.shape[1], dtype=bool)
    Q = []
    for _ in range(s // d):
        deg = (support & workers[:, None]).sum(axis=0)
        deg = np.where(parts, deg, np.iinfo(int).max)
        j = int(np.argmin(deg))
        Q.append(j)
        parts[j] = False
        workers[support[:, j]] = False
    removed = n - int(workers.sum())
    if removed > s:
        raise InvalidParams(f"greedy removal hit {removed} > s workers")
    K = np.flatnonzero(workers)[: n - s]
    return K, np.array(sorted(Q), dtype=int)


def min_norm_residual(B, K: Iterable[int]) -> float:
    """``min ||a B - 1||_2`` over ``a`` supported on ``K``."""
    B = np.asarray(B)
    K = list(K)
    if not K:
        raise EmptySet("non-straggler set is empty")
    a = least_squares_decoder(B, K)
    return float(np.linalg.norm(a @ B - 1.0))
