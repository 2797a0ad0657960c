"""Logical-time simulation of coded distributed gradient descent.

Each iteration: every worker evaluates the gradients of the parts it holds,
sends one linear combination ``B_i N(w)``, a straggler model picks the
responders ``K_t``, and the master forms ``v_t = A(K_t) a`` and steps.
Stragglers are decided by the model, not by wall-clock time, so a run is a
deterministic function of its seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .conditions import epsilon_bound, scheme_epsilon
from .decoders import Decoder, default_decoder_name, get_decoder
from .errors import (DimensionMismatch, InvalidParams, MissingPart, TooFewExamples,
                     WrongSetSize)
from .expander import random_regular_graph, sample_nonstragglers


@dataclass(frozen=True, eq=False)
class Dataset:
    X: np.ndarray  # (m, p)
    y: np.ndarray  # (m,), entries in {-1, +1}

    def __post_init__(self):
        if self.X.ndim != 2 or self.y.shape != (self.X.shape[0],):
            raise DimensionMismatch("X must be (m, p) and y must be (m,)")
        if not np.all(np.isfinite(self.X)):
            raise InvalidParams("features contain NaN or Inf")
        if not np.all(np.isin(self.y, (-1, 1))):
            raise InvalidParams("labels must be -1 or +1")

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


def synthetic_dataset(m: int, p: int, seed: int | None = 0, flip: float = 0.05) -> Dataset:
    """Standard-normal features, labels ``sign(w* . x)`` flipped with prob ``flip``."""
    rng = np.random.default_rng(seed)
    w_star = rng.standard_normal(p)
    X = rng.standard_normal((m, p))
    y = np.where(X @ w_star >= 0, 1.0, -1.0)
    y[rng.random(m) < flip] *= -1
    return Dataset(X, y)


@dataclass(frozen=True, eq=False)
class PartitionedDataset:
    parts: list[Dataset]
    assignment: list[np.ndarray]  # parts held by each worker

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def n(self) -> int:
        return len(self.assignment)

    def union(self) -> Dataset:
        return Dataset(np.vstack([q.X for q in self.parts]),
                       np.concatenate([q.y for q in self.parts]))


def partition(data: Dataset, scheme, seed: int | None = None) -> PartitionedDataset:
    """Shuffle (if seeded), pad to a multiple of k by repeating the last
    examples, and cut into k equal contiguous parts.

    Worker ``i`` is assigned the parts in the support of row ``i`` of B.
    """
    B = np.asarray(scheme.B)
    n, k = B.shape
    if data.m < k:
        raise TooFewExamples(f"need at least {k} examples, got {data.m}")
    order = np.arange(data.m)
    if seed is not None:
        order = np.random.default_rng(seed).permutation(data.m)
    pad = (-data.m) % k
    order = np.concatenate([order, order[data.m - pad:]])
    size = order.size // k
    parts = [Dataset(data.X[idx], data.y[idx])
             for idx in order.reshape(k, size)]
    assignment = [np.flatnonzero(B[i]) for i in range(n)]
    return PartitionedDataset(parts, assignment)


def _sigmoid(z):
    return np.exp(-np.logaddexp(0.0, -z))


def logistic_loss(w: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(np.logaddexp(0.0, -y * (X @ w))))


def logistic_gradient(w: np.ndarray, X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Gradient of the mean logistic loss ``log(1 + exp(-y w.x))``."""
    w = np.asarray(w, dtype=float)
    if X.ndim != 2 or X.shape[1] != w.shape[0] or y.shape != (X.shape[0],):
        raise DimensionMismatch(f"w has {w.shape[0]} entries, X is {X.shape}")
    coef = -y * _sigmoid(-y * (X @ w))
    return coef @ X / X.shape[0]


def part_gradients(w: np.ndarray, pdata: PartitionedDataset) -> np.ndarray:
    """Rows are the per-part gradients, shape (k, p)."""
    return np.stack([logistic_gradient(w, q.X, q.y) for q in pdata.parts])


def gradient_matrix(grads: np.ndarray) -> np.ndarray:
    """``N(w)``: the stacked part gradients divided by the number of parts."""
    return grads / grads.shape[0]


def worker_message(B, i: int, partial: Mapping[int, np.ndarray] | np.ndarray) -> np.ndarray:
    """``(1/k) sum_{j in supp(B_i)} B_ij grad_j`` for worker ``i``.

    ``partial`` maps part index to its gradient (or is the full (k, p) array).
    """
    B = np.asarray(B)
    k = B.shape[1]
    row = B[i]
    out = None
    for j in np.flatnonzero(row):
        try:
            g = partial[int(j)]
        except (KeyError, IndexError):
            raise MissingPart(f"worker {i} lacks part {j}") from None
        term = row[j] * np.asarray(g)
        out = term if out is None else out + term
    return out / k


def master_aggregate(scheme, decoder: Decoder | str, K: Sequence[int],
                     messages: Mapping[int, np.ndarray]) -> np.ndarray:
    """``v = A(K) a`` with ``a_i`` the message of responder ``i`` (0 otherwise)."""
    K = np.unique(np.asarray(list(K), dtype=int))
    if set(messages) != set(K.tolist()):
        raise WrongSetSize("messages must be present exactly for the responders")
    a = get_decoder(decoder)(scheme, K)
    v = None
    for i in K:
        term = a[i] * np.asarray(messages[int(i)])
        v = term if v is None else v + term
    return v


def pack_complex(N: np.ndarray) -> np.ndarray:
    """Pair real columns as ``N_1 + i N_2, N_3 + i N_4, ...``; an odd last column stays real."""
    N = np.asarray(N, dtype=float)
    squeeze = N.ndim == 1
    N = np.atleast_2d(N)
    p = N.shape[1]
    out = N[:, 0::2].astype(complex)
    out[:, : p // 2] += 1j * N[:, 1::2]
    return out[0] if squeeze else out


def unpack_complex(v: np.ndarray, p: int) -> np.ndarray:
    """``e(v) = (Re v_1, Im v_1, Re v_2, ...)`` truncated to ``p`` entries."""
    v = np.asarray(v, dtype=complex)
    out = np.empty(v.shape[:-1] + (2 * v.shape[-1],))
    out[..., 0::2] = v.real
    out[..., 1::2] = v.imag
    return out[..., :p]


@dataclass
class StragglerModel:
    """``fixed-random``: s_t uniform stragglers per iteration.
    ``delay-tail``: shifted-exponential delays, wait for the first n - s_t.
    ``s`` is a constant or a per-iteration schedule.
    """

    kind: str = "fixed-random"
    s: int | Sequence[int] = 0
    seed: int | None = 0
    shift: float = 1.0
    scale: float = 1.0

    def s_at(self, t: int) -> int:
        if isinstance(self.s, (int, np.integer)):
            return int(self.s)
        return int(self.s[t - 1])

    def sets(self, n: int, T: int):
        """Yield ``(s_t, K_t)`` for ``t = 1..T``; K_t sorted, 0-based."""
        if self.kind not in ("fixed-random", "delay-tail"):
            raise InvalidParams(f"unknown straggler model {self.kind!r}")
        rng = np.random.default_rng(self.seed)
        for t in range(1, T + 1):
            st = self.s_at(t)
            if not 0 <= st < n:
                raise InvalidParams(f"s_t = {st} out of range for n = {n}")
            if self.kind == "fixed-random":
                K = sample_nonstragglers(n, st, rng)
            else:
                delay = self.shift + rng.exponential(self.scale, size=n)
                K = np.sort(np.argsort(delay, kind="stable")[: n - st])
            yield st, K


@dataclass
class LearningRate:
    """``c1 / (t + c2)`` when ``constant`` is None, else a constant step."""

    c1: float = 1.0
    c2: float = 1.0
    constant: float | None = None

    def __call__(self, t: int) -> float:
        if self.constant is not None:
            return self.constant
        return self.c1 / (t + self.c2)


@dataclass
class IterRecord:
    t: int
    s_t: int
    K: list[int]
    l2_dev: float
    bound: float
    loss: float


@dataclass
class SimRun:
    records: list[IterRecord]
    w: np.ndarray
    trajectory: np.ndarray  # (T + 1, p), w^(1) .. w^(T+1)
    final_loss: float
    config: dict = field(default_factory=dict)

    def metrics_rows(self) -> list[dict]:
        return [{"t": r.t, "s_t": r.s_t, "l2_dev": r.l2_dev, "bound": r.bound,
                 "loss": r.loss} for r in self.records]


def run_gd(scheme, pdata: PartitionedDataset, T: int,
           lr: Callable[[int], float] | float,
           stragglers: StragglerModel | None = None,
           decoder: Decoder | str | None = None, pack: bool = False) -> SimRun:
    """Coded gradient descent from ``w = 0`` for ``T`` iterations."""
    B = np.asarray(scheme.B)
    n, k = B.shape
    if pdata.k != k or pdata.n != n:
        raise DimensionMismatch("partitioned data does not match the scheme")
    if stragglers is None:
        stragglers = StragglerModel(s=0)
    if decoder is None:
        decoder = default_decoder_name(scheme)
    dec = get_decoder(decoder)
    step = lr if callable(lr) else LearningRate(constant=float(lr))
    eps = scheme_epsilon(scheme)
    full = pdata.union()

    p = full.p
    w = np.zeros(p)
    traj = [w.copy()]
    records = []
    for (st, K), t in zip(stragglers.sets(n, T), range(1, T + 1)):
        grads = part_gradients(w, pdata)
        N = gradient_matrix(grads)
        target = N.sum(axis=0)
        a = dec(scheme, K)
        if pack:
            Np = pack_complex(N)
            msgs = {int(i): B[i] @ Np for i in K}
            v = unpack_complex(sum(a[i] * msgs[i] for i in msgs), p)
        else:
            # same as worker_message on each responder, vectorised over parts
            msgs = {int(i): B[i] @ N for i in K}
            v = sum(a[i] * msgs[i] for i in msgs)
        dev = float(np.linalg.norm(v - target))
        bound = eps(st) * float(np.linalg.norm(N, 2))
        records.append(IterRecord(t=t, s_t=st, K=[int(i) for i in K], l2_dev=dev,
                                  bound=bound, loss=logistic_loss(w, full.X, full.y)))
        w = w - step(t) * np.real(v)
        traj.append(w.copy())
    return SimRun(records=records, w=w, trajectory=np.array(traj),
                  final_loss=logistic_loss(w, full.X, full.y),
                  config={"n": n, "k": k, "T": T, "pack": pack,
                          "decoder": decoder if isinstance(decoder, str) else "custom"})


def run_full_gd(pdata: PartitionedDataset, T: int,
                lr: Callable[[int], float] | float) -> SimRun:
    """Centralised gradient descent on the same (padded) data."""
    step = lr if callable(lr) else LearningRate(constant=float(lr))
    full = pdata.union()
    w = np.zeros(full.p)
    traj = [w.copy()]
    records = []
    for t in range(1, T + 1):
        g = gradient_matrix(part_gradients(w, pdata)).sum(axis=0)
        records.append(IterRecord(t=t, s_t=0, K=[], l2_dev=0.0, bound=0.0,
                                  loss=logistic_loss(w, full.X, full.y)))
        w = w - step(t) * g
        traj.append(w.copy())
    return SimRun(records=records, w=w, trajectory=np.array(traj),
                  final_loss=logistic_loss(w, full.X, full.y), config={"T": T})


SWEEP_FIELDS = ["n", "d", "s", "decoder", "mean_residual", "std", "bound"]


def l2_sweep(n: int, d_values: Sequence[int], s_values: Sequence[int], trials: int = 100,
             decoders: Sequence[str] = ("linear", "optimal"), seed: int = 0,
             draws: int = 10) -> list[dict]:
    """Mean ``||A(K) B - 1||_2`` over ``draws`` random graphs x ``trials`` sets.

    ``bound`` is the graph bound averaged over the drawn graphs.
    """
    if n < 2 or trials < 1 or draws < 1:
        raise InvalidParams("need n >= 2, trials >= 1 and draws >= 1")
    for d in d_values:
        if not 0 < d < n or n * d % 2:
            raise InvalidParams(f"no {d}-regular graph on {n} vertices")
    for s in s_values:
        if not 0 <= s < n:
            raise InvalidParams(f"s = {s} out of range")
    decs = {name: get_decoder(name) for name in decoders}
    from .expander import build_expander_scheme

    rows = []
    root = np.random.SeedSequence(seed)
    d_seeds = root.spawn(len(d_values))
    for d, dseq in zip(d_values, d_seeds):
        graph_seeds = dseq.spawn(draws)
        schemes = [build_expander_scheme(random_regular_graph(n, d, seed=gs))
                   for gs in graph_seeds]
        for s in s_values:
            rng = np.random.default_rng([seed, d, s])
            res = {name: [] for name in decs}
            bounds = []
            for sc in schemes:
                bounds.append(epsilon_bound(n, s, d, sc.bound_lambda))
                for _ in range(trials):
                    K = sample_nonstragglers(n, s, rng)
                    for name, dec in decs.items():
                        res[name].append(float(np.linalg.norm(dec(sc, K) @ sc.B - 1.0)))
            for name in decs:
                r = np.asarray(res[name])
                rows.append({"n": n, "d": d, "s": s, "decoder": name,
                             "mean_residual": float(r.mean()), "std": float(r.std()),
                             "bound": float(np.mean(bounds))})
    return rows
