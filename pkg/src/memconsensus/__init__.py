"""H2 robustness of discrete-time consensus networks with a tunable memory depth."""
from ._accel import backend, set_threads
from .contfrac import cf_F, cf_G, cf_fixed_point, cf_sequence
from .errors import (AccuracyWarning, DegenerateModeError, NumericError, ParameterError,
                     PreconditionError)
from .graph import (Spectrum, WeightedGraph, barabasi_albert, chain_graph, complete_graph,
                    generate_graph, is_connected, laplacian, load_edge_list, parse_edge_list,
                    ring_lattice, spectrum, star_graph)
from .h2core import (H2Report, h2, h2_closed_small_theta, h2_deep_memory_limit,
                     h2_gramian_bruteforce, h2_half_alpha, h2_limit_half_alpha,
                     h2_lyapunov_oracle, h2_memoryless, h2_pure_memory, h2_table_ii,
                     mode_quantities)
from .search import optimal_depth, optimal_params, sweep_beta
from .simulate import SimConfig, SimResult, estimate_msd, simulate_noise_free
from .stability import (ProtocolParams, consensus_check, consensus_region, is_schur_roots,
                        jury_schur, mode_polynomial, spectral_radius, verify_inheritance)

__version__ = "0.1.0"
