"""Complex polynomials, roots of unity, evaluation and interpolation.

Coefficients are stored lowest degree first, ``c[0] + c[1] x + ...``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateNode


def roots_of_unity(n: int) -> np.ndarray:
    """Return ``alpha_j = exp(2 pi i j / n)`` for ``j = 0..n-1``."""
    if n < 1:
        raise ValueError("n must be positive")
    return np.exp(2j * np.pi * np.arange(n) / n)


def _trim(coeffs: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(coeffs)
    if nz.size == 0:
        return coeffs[:0]
    return coeffs[: nz[-1] + 1]


class Polynomial:
    """Polynomial with complex coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[complex] = ()):
        c = np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                       dtype=complex).ravel()
        self.coeffs = _trim(c.copy())

    @classmethod
    def from_roots(cls, roots: Iterable[complex]) -> "Polynomial":
        """Monic polynomial ``prod (x - r)``, expanded one factor at a time."""
        c = np.array([1.0 + 0j])
        for r in roots:
            nxt = np.zeros(c.size + 1, dtype=complex)
            nxt[1:] += c
            nxt[:-1] -= r * c
            c = nxt
        return cls(c)

    @property
    def degree(self) -> float:
        # zero polynomial has degree -inf
        return self.coeffs.size - 1 if self.coeffs.size else float("-inf")

    def __len__(self) -> int:
        return self.coeffs.size

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        out = np.zeros_like(x)
        for c in self.coeffs[::-1]:
            out = out * x + c
        return out

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        out = np.zeros(max(a.size, b.size), dtype=complex)
        out[: a.size] += a
        out[: b.size] += b
        return Polynomial(out)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if not self.coeffs.size or not other.coeffs.size:
                return Polynomial()
            return Polynomial(np.convolve(self.coeffs, other.coeffs))
        return Polynomial(self.coeffs * other)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(
            np.all(self.coeffs == other.coeffs))

    def allclose(self, other: "Polynomial", atol: float = 1e-12) -> bool:
        m = max(len(self), len(other))
        a = np.zeros(m, dtype=complex)
        b = np.zeros(m, dtype=complex)
        a[: len(self)] = self.coeffs
        b[: len(other)] = other.coeffs
        return bool(np.allclose(a, b, rtol=0, atol=atol))

    def __repr__(self) -> str:
        return f"Polynomial({self.coeffs.tolist()!r})"


def poly_eval_roots_of_unity(p: Polynomial | Sequence[complex], n: int) -> np.ndarray:
    """Evaluate ``p`` at every n-th root of unity.

    Coefficients of degree >= n are folded modulo ``x^n - 1`` first, after
    which ``p(alpha_j) = n * ifft(c)[j]``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    c = p.coeffs if isinstance(p, Polynomial) else np.asarray(p, dtype=complex)
    folded = np.zeros(n, dtype=complex)
    np.add.at(folded, np.arange(c.size) % n, c)
    return n * np.fft.ifft(folded)


def poly_interpolate(points: Sequence[tuple[complex, complex]], tol: float = 1e-12) -> Polynomial:
    """Unique polynomial of degree < len(points) through ``points``.

    Newton divided differences, then expansion of the Newton form into
    monomial coefficients; O(m^2) overall.
    """
    if len(points) < 1:
        raise ValueError("need at least one point")
    xs = np.array([complex(p[0]) for p in points])
    ys = np.array([complex(p[1]) for p in points])
    m = xs.size
    diffs = np.abs(xs[:, None] - xs[None, :])
    diffs[np.diag_indices(m)] = np.inf
    if diffs.min() <= tol * max(1.0, np.abs(xs).max()):
        raise DuplicateNode("interpolation nodes must be pairwise distinct")

    dd = ys.copy()
    for j in range(1, m):
        dd[j:] = (dd[j:] - dd[j - 1:-1]) / (xs[j:] - xs[: m - j])

    # Horner on the Newton form: p = dd[m-1]; p = p*(x - x_k) + dd[k]
    c = np.array([dd[m - 1]])
    for k in range(m - 2, -1, -1):
        nxt = np.zeros(c.size + 1, dtype=complex)
        nxt[1:] += c
        nxt[:-1] -= xs[k] * c
        nxt[0] += dd[k]
        c = nxt
    return Polynomial(c)
