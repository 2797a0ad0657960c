"""Serialization: scheme JSON, graph adjacency lists, dataset and metrics CSV.

External formats use 1-based indices; conversion happens only here and in
the CLI.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable

import numpy as np

from .coding import ExactScheme
from .errors import InvalidParams
from .expander import ApproxScheme, SpectralGraph, graph_from_adjacency
from .sim import Dataset

EXACT_KINDS = ("complex-mds", "real-bch")
APPROX_KINDS = ("expander", "bipartite", "identity")


def _encode(arr: np.ndarray, as_complex: bool) -> list:
    arr = np.asarray(arr).ravel()
    if as_complex:
        return [[float(z.real), float(z.imag)] for z in arr.astype(complex)]
    return [float(x) for x in arr.real]


def _decode(values: list) -> np.ndarray:
    if values and isinstance(values[0], list):
        a = np.array(values, dtype=float)
        return a[:, 0] + 1j * a[:, 1]
    return np.array(values, dtype=float)


def scheme_to_dict(scheme) -> dict:
    B = np.asarray(scheme.B)
    if isinstance(scheme, ExactScheme):
        cplx = scheme.field_tag == "complex"
        return {
            "kind": scheme.kind, "n": scheme.n, "s": scheme.s, "k": int(B.shape[1]),
            "field": scheme.field_tag,
            "b": _encode(B, cplx),
            "c1": _encode(scheme.c1, cplx),
            "x_prime": _encode(scheme.x_prime, cplx),
            "roots": _encode(scheme.roots, True),
        }
    if isinstance(scheme, ApproxScheme):
        return {"kind": scheme.kind, "n": scheme.n, "d": scheme.d, "k": int(B.shape[1]),
                "field": "real", "b": _encode(B, False),
                "bound_lambda": float(scheme.bound_lambda)}
    raise InvalidParams(f"cannot serialize {type(scheme).__name__}")


def scheme_from_dict(obj: dict):
    kind = obj["kind"]
    n = int(obj["n"])
    k = int(obj.get("k", n))
    B = _decode(obj["b"]).reshape(n, k)
    if kind in EXACT_KINDS:
        field_tag = obj["field"]
        roots = _decode(obj["roots"])
        c1 = _decode(obj["c1"])
        xp = _decode(obj["x_prime"])
        if field_tag == "real":
            B, c1, xp = B.real, c1.real, xp.real
        ell = roots / n if field_tag == "complex" else None
        return ExactScheme(n=n, s=int(obj["s"]), field_tag=field_tag, B=B, c1=c1,
                           x_prime=xp, roots=roots, dual_multipliers=ell, kind=kind)
    if kind in APPROX_KINDS:
        return ApproxScheme(n=n, d=int(obj["d"]), B=B.real, kind=kind,
                            bound_lambda=float(obj["bound_lambda"]))
    raise InvalidParams(f"unknown scheme kind {kind!r}")


def save_scheme(scheme, path) -> None:
    Path(path).write_text(json.dumps(scheme_to_dict(scheme)))


def load_scheme(path):
    return scheme_from_dict(json.loads(Path(path).read_text()))


def write_graph(g: SpectralGraph, path) -> None:
    """One line per vertex, ``v: u1 u2 ... ud`` (1-based, repeated for multi-edges)."""
    lines = []
    A = np.asarray(g.adjacency).astype(int)
    for v in range(A.shape[0]):
        nbrs = np.repeat(np.arange(A.shape[0]), A[v])
        lines.append(f"{v + 1}: " + " ".join(str(u + 1) for u in nbrs))
    Path(path).write_text("\n".join(lines) + "\n")


def read_graph(path) -> SpectralGraph:
    rows = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        head, _, tail = line.partition(":")
        rows.append((int(head) - 1, [int(u) - 1 for u in tail.split()]))
    n = len(rows)
    A = np.zeros((n, n))
    for v, nbrs in rows:
        for u in nbrs:
            A[v, u] += 1
    multigraph = bool(np.any(A > 1) or np.any(np.diag(A)))
    return graph_from_adjacency(A, multigraph=multigraph)


def write_dataset(data: Dataset, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["y"] + [f"x{j + 1}" for j in range(data.p)])
        for yi, xi in zip(data.y, data.X):
            w.writerow([int(yi)] + [repr(float(v)) for v in xi])


def read_dataset(path) -> Dataset:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if not header or header[0] != "y":
            raise InvalidParams("dataset header must start with 'y'")
        rows = [[float(v) for v in row] for row in r if row]
    arr = np.array(rows, dtype=float).reshape(-1, len(header))
    return Dataset(arr[:, 1:], arr[:, 0])


METRIC_FIELDS = ["t", "s_t", "l2_dev", "bound", "loss"]


def write_csv(rows: Iterable[dict], fields: list[str], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
