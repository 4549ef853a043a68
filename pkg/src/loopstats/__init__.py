"""Loop-erased walks, wired spanning trees, sandpiles and spanning unicycles
on finite pieces of Z^d: exact counts, exact identities, and seeded Monte
Carlo estimators of the four limit statistics they share.
"""

from .estimates import Estimate, merge_all, pooled_stderr
from .formulas import (TheoremValues, pq_transform,
                       square_lattice_height_probabilities, theorem_values)
from .graph import (SinkedMultigraph, canonical_edge_order, collapse_boundary,
                    from_edge_list_text, from_edges, to_edge_list_text)
from .harness import (ExperimentConfig, bulk_vs_origin, estimate_tau,
                      estimate_zeta, exact_tau_cube, height_histogram,
                      run_experiment)
from .lattice import (Lattice, Region, build_cube_region, directions,
                      read_region, write_region)
from .rng import RandomStream
from .sandpile import (Sandpile, burning_bijection, conditional_height_law,
                       is_recurrent, markov_step, pile_to_csv,
                       pile_to_text_grid, sample_recurrent, stabilize)
from .spanning import (SpanningForest, descendant_edge_count,
                       descendant_neighbor_count, estimate_xi_forest,
                       origin_tree_counts, spanning_tree_count, unicycle_count,
                       wilson_ust)
from .tutte import (TuttePolynomial, mean_height_identity_check, merino_check,
                    tutte_polynomial, tutte_t11_and_dy)
from .unicycle import (Unicycle, check_cycle_bound, cycle_length_bound,
                       edge_girth, estimate_lambda, exact_expected_cycle,
                       sample_ustplus)
from .verify import run_verification_suite
from .walks import Path, Walk, estimate_xi_lerw, loop_erase, sample_exit_walk

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
