"""Named decoders with a uniform ``decoder(scheme, K) -> A(K)`` signature."""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import coding, expander
from .errors import InvalidParams

Decoder = Callable[[object, np.ndarray], np.ndarray]


def exact(scheme, K):
    return coding.decode(scheme, K)


def linear(scheme, K):
    return expander.linear_decoder(K, scheme.B.shape[0])


def optimal(scheme, K):
    return expander.optimal_decoder(scheme, K)


def ignore(scheme, K):
    return expander.ignore_stragglers_decoder(K, scheme.B.shape[0])


DECODERS: dict[str, Decoder] = {
    "exact": exact,
    "linear": linear,
    "optimal": optimal,
    "ignore": ignore,
}


def get_decoder(name: str | Decoder) -> Decoder:
    if callable(name):
        return name
    try:
        return DECODERS[name]
    except KeyError:
        raise InvalidParams(f"unknown decoder {name!r}; choose from {sorted(DECODERS)}") from None


def default_decoder_name(scheme) -> str:
    kind = getattr(scheme, "kind", "")
    if kind in ("complex-mds", "real-bch"):
        return "exact"
    if kind == "identity":
        return "ignore"
    return "linear"
