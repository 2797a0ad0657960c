"""Exact gradient codes built from cyclic MDS codes over C and R.

The encoding matrix ``B`` is circulant: its columns are the cyclic shifts of
a minimum-weight codeword ``c1`` supported on the first ``s + 1`` positions,
so ``B[i, j] = c1[(i - j) mod n]`` and every worker holds ``s + 1`` parts.
Decoding vectors ``A(K)`` are obtained from a fixed solution ``x'`` of
``x' B = 1`` plus a dual codeword that cancels ``x'`` outside ``K``.

All index sets are 0-based here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from .errors import (InvalidParams, ParityMismatch, SingularTriangular,
                     SingularVandermonde, WrongSetSize)
from .poly import Polynomial, poly_eval_roots_of_unity, poly_interpolate, roots_of_unity

EC_TOL = 1e-8
_CONSTRUCT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ExactScheme:
    """Encoding matrix plus the precomputed data needed to decode it."""

    n: int
    s: int
    field_tag: str  # "complex" or "real"
    B: np.ndarray
    c1: np.ndarray
    x_prime: np.ndarray
    roots: np.ndarray
    dual_multipliers: np.ndarray | None = None
    kind: str = field(default="")

    def __post_init__(self):
        for name in ("B", "c1", "x_prime", "roots", "dual_multipliers"):
            arr = getattr(self, name)
            if arr is not None:
                arr.setflags(write=False)

    @property
    def k(self) -> int:
        """Number of data partitions (columns of ``B``)."""
        return self.B.shape[1]

    @property
    def storage_overhead(self) -> int:
        return int(np.count_nonzero(self.B, axis=1).max())


def circulant_from_column(c1: np.ndarray) -> np.ndarray:
    n = c1.size
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return c1[idx]


def _check_params(n: int, s: int) -> None:
    if not (isinstance(n, (int, np.integer)) and isinstance(s, (int, np.integer))):
        raise InvalidParams("n and s must be integers")
    if s < 1 or s >= n:
        raise InvalidParams(f"need 1 <= s < n, got n={n}, s={s}")


def _tol(B: np.ndarray) -> float:
    return _CONSTRUCT_TOL * (1.0 + float(np.abs(B).max()))


def precompute_x_prime(B: np.ndarray, s: int, tol: float | None = None) -> np.ndarray:
    """Solve ``x'' B' = 1`` on the lower-triangular upper-left block of ``B``.

    ``B'`` is the leading ``(n-s) x (n-s)`` block; the result is padded
    with ``s`` zeros and checked against the full identity ``x' B = 1``.
    """
    n = B.shape[0]
    r = n - s
    if tol is None:
        tol = _tol(B)
    Bp = B[:r, :r]
    diag = np.diag(Bp)
    if np.any(np.abs(diag) <= tol):
        raise SingularTriangular("upper-left block has a zero diagonal entry")
    x = np.zeros(n, dtype=B.dtype)
    # column j of B' is supported on rows j..min(j+s, r-1)
    for j in range(r - 1, -1, -1):
        hi = min(j + s + 1, r)
        acc = x[j + 1:hi] @ Bp[j + 1:hi, j]
        x[j] = (1.0 - acc) / diag[j]
    resid = np.abs(x @ B - 1.0).max()
    if resid > tol * max(1.0, float(np.abs(x).sum())):
        raise SingularTriangular(f"x' B = 1 violated (residual {resid:.3e})")
    return x


def build_complex_scheme(n: int, s: int) -> ExactScheme:
    """Circulant scheme from the Reed-Solomon code on the n-th roots of unity.

    ``c1`` holds ``m(alpha_0), ..., m(alpha_s)`` followed by zeros, where
    ``m(x) = prod_{j=s+1}^{n-1} (x - alpha_j)``. The dual code is GRS on
    the same points with column multipliers ``alpha_j / n``.
    """
    _check_params(n, s)
    alpha = roots_of_unity(n)
    c1 = np.zeros(n, dtype=complex)
    for k in range(s + 1):
        c1[k] = np.prod(alpha[k] - alpha[s + 1:])
    B = circulant_from_column(c1)
    tol = _tol(B)

    ell = alpha / n
    VD = alpha[None, :] ** np.arange(s)[:, None] * ell[None, :]
    # every dual generator row must annihilate every codeword column
    if np.abs(VD @ B).max() > tol:
        raise SingularTriangular("dual multipliers do not annihilate B")

    x_prime = precompute_x_prime(B, s, tol)
    return ExactScheme(n=n, s=s, field_tag="complex", B=B, c1=c1, x_prime=x_prime,
                       roots=alpha, dual_multipliers=ell.astype(complex), kind="complex-mds")


def bch_roots(n: int, s: int) -> np.ndarray:
    """The ``s`` consecutive roots of unity a real BCH code must vanish on."""
    _check_params(n, s)
    if (n - s) % 2 == 0:
        raise ParityMismatch(
            f"real BCH construction needs n and s of different parity (n={n}, s={s})")
    if n % 2 == 0:
        half = s // 2
        exps = np.arange(n // 2 - half, n // 2 + half + 1)
    else:
        nh = n // 2
        exps = np.arange(nh - s // 2 + 1, nh + s // 2 + 1)
    return np.exp(2j * np.pi * exps / n)


def build_real_bch_scheme(n: int, s: int) -> ExactScheme:
    """Circulant scheme from a real cyclic MDS (BCH) code.

    ``c1`` is the coefficient vector of ``G(x) = prod_{r in R} (x - r)``;
    ``R`` is closed under conjugation so ``G`` is real.
    """
    roots = bch_roots(n, s)
    G = Polynomial.from_roots(roots)
    coeffs = G.coeffs
    if np.abs(coeffs.imag).max() > _CONSTRUCT_TOL * (1.0 + np.abs(coeffs).max()):
        raise SingularVandermonde("generator polynomial is not real")
    c1 = np.zeros(n)
    c1[: coeffs.size] = coeffs.real
    B = circulant_from_column(c1)
    x_prime = precompute_x_prime(B, s)
    return ExactScheme(n=n, s=s, field_tag="real", B=B, c1=c1, x_prime=x_prime,
                       roots=roots, kind="real-bch")


def _complement(n: int, K: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    K = np.unique(np.asarray(list(K), dtype=int))
    if K.size and (K[0] < 0 or K[-1] >= n):
        raise WrongSetSize(f"indices out of range for n={n}")
    mask = np.ones(n, dtype=bool)
    mask[K] = False
    return K, np.flatnonzero(mask)


def decode_complex(scheme: ExactScheme, K: Iterable[int]) -> np.ndarray:
    """Decoding vector for the complex scheme, supported on ``K``.

    Interpolates ``F`` of degree < s with ``F(alpha_j) = -x'_j / l_j`` on
    the stragglers, then adds ``y_j = l_j F(alpha_j)`` (evaluated by FFT).
    """
    if scheme.field_tag != "complex":
        raise InvalidParams("decode_complex needs a complex scheme")
    n, s = scheme.n, scheme.s
    K, Kc = _complement(n, K)
    if K.size != n - s:
        raise WrongSetSize(f"|K| must be n - s = {n - s}, got {K.size}")
    alpha, ell, xp = scheme.roots, scheme.dual_multipliers, scheme.x_prime
    targets = -xp[Kc] / ell[Kc]
    F = poly_interpolate(list(zip(alpha[Kc], targets)))
    y = ell * poly_eval_roots_of_unity(F, n)
    a = y + xp
    out = np.zeros(n, dtype=complex)
    out[K] = a[K]
    return out


def _vandermonde(roots: np.ndarray, cols: np.ndarray) -> np.ndarray:
    return roots[:, None] ** cols[None, :]


def _decode_real_raw(scheme: ExactScheme, K: np.ndarray, Kc: np.ndarray) -> np.ndarray:
    roots, xp = scheme.roots, scheme.x_prime
    VKc = _vandermonde(roots, Kc)
    if np.linalg.cond(VKc) > 1e12:
        raise SingularVandermonde("Vandermonde block is numerically singular")
    # f V_{K^c} = -x'_{K^c}  <=>  V_{K^c}^T f^T = -x'_{K^c}^T
    f = np.linalg.solve(VKc.T, -xp[Kc].astype(complex))
    return f @ _vandermonde(roots, np.arange(scheme.n)) + xp


def decode_real(scheme: ExactScheme, K: Iterable[int]) -> np.ndarray:
    """Decoding vector for the real BCH scheme via a dense Vandermonde solve."""
    if scheme.field_tag != "real":
        raise InvalidParams("decode_real needs a real scheme")
    n, s = scheme.n, scheme.s
    K, Kc = _complement(n, K)
    if K.size != n - s:
        raise WrongSetSize(f"|K| must be n - s = {n - s}, got {K.size}")
    a = _decode_real_raw(scheme, K, Kc)
    imag = np.abs(a.imag).max()
    # loose guard; conjugate-closed roots make the exact answer real
    if imag > 1e-6 * (1.0 + np.abs(a).max()):
        raise SingularVandermonde(f"decoding vector not real (imag {imag:.3e})")
    out = np.zeros(n)
    out[K] = a.real[K]
    return out


def decode(scheme: ExactScheme, K: Iterable[int]) -> np.ndarray:
    """Dispatch to the right decoder; supersets of an n-s set are trimmed.

    For ``|K| > n - s`` the first ``n - s`` indices of ``K`` (sorted) are
    used, which keeps the support inside ``K``.
    """
    K = np.unique(np.asarray(list(K), dtype=int))
    need = scheme.n - scheme.s
    if K.size < need:
        raise WrongSetSize(f"need at least {need} non-stragglers, got {K.size}")
    K = K[:need]
    if scheme.field_tag == "complex":
        return decode_complex(scheme, K)
    return decode_real(scheme, K)


def restrict_to_k_partitions(scheme: ExactScheme, k: int) -> ExactScheme:
    """Keep the first ``k`` columns of ``B``; decoders are unchanged."""
    if k < 1 or k > scheme.n:
        raise InvalidParams(f"need 1 <= k <= n, got k={k}")
    if k == scheme.k:
        return scheme
    return replace(scheme, B=np.array(scheme.B[:, :k]))


def all_straggler_sets(n: int, s: int):
    """Every non-straggler set of size ``n - s`` in lexicographic order."""
    from itertools import combinations

    return combinations(range(n), n - s)


def n_sets(n: int, s: int) -> int:
    return math.comb(n, s)
