"""Exact and approximate gradient coding for straggler-tolerant distributed GD."""

from .coding import (ExactScheme, build_complex_scheme, build_real_bch_scheme, decode,
                     decode_complex, decode_real, precompute_x_prime,
                     restrict_to_k_partitions)
from .conditions import (VerificationReport, adversarial_straggler_set, check_ec,
                         check_eps_ac, epsilon_bound, epsilon_bound_bipartite,
                         min_norm_residual)
from .expander import (ApproxScheme, BipartiteGraph, SpectralGraph, build_bipartite_scheme,
                       build_expander_scheme, identity_scheme, linear_decoder,
                       margulis_graph, optimal_decoder, random_bipartite_regular_graph,
                       random_regular_graph, spectral_gap)
from .poly import Polynomial, poly_eval_roots_of_unity, poly_interpolate, roots_of_unity

__version__ = "0.1.0"
