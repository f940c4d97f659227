"""latticeflow: coupled lattice models with exact oracles and MCMC samplers.

Three models and their couplings:

* the loop O(2) model / integer Lipschitz heights on the hexagonal lattice,
  with the two-spin representation and black/white site percolations;
* the six-vertex model / graph homomorphisms on the square lattice, with the
  checkerboard spins and black/white bond percolations;
* the random-cluster model on the diagonal sublattice, with planar duality
  and the complex-weighted oriented-loop torus machinery tying it to the
  six-vertex model.

Small systems are solved exactly by enumeration; samplers are cross-checked
against those oracles, and the coupling identities are verified numerically
to within 1e-10 by independent enumerations.
"""

__version__ = "0.1.0"

from .bc import BoundaryCondition
from .hexlattice import HexDomain, SitePerc, hex_ball, rhombus, triangle_edges
from .loop_o2 import (LipschitzFn, LoopConfig, LoopParams, PercolationPair,
                      SpinPair, decompose_loops, height_to_spins, joint_weight,
                      loop_weight, loops_of_spins, resample_white_given_black,
                      sample_percolations, spin_weight, spins_to_height)
from .six_vertex import (BondPercPair, GraphHom, SixVParams, SpinPair6V,
                         edge_orientation, explore_alternating_circuits,
                         height_to_spins_6v, hom_weight,
                         sample_percolations_6v, spin_weight_6v,
                         spins_to_height_6v, vertex_type)
from .squarelattice import (BondPerc, SquareDomain, even_diamond, is_black,
                            square_block, t_neighbors, validate_even_domain)
from .random_cluster import (FKConfig, FKParams, dual_config, fk_weight,
                             self_dual_p, two_point_connected)
from .torus import TorusLattice, TorusLoopConfig, loop_surrounds, loops_from_fk
from .bkw import (BKWParams, bkw_partition_functions, cos_product_observable,
                  loop_expansion_z, p8, torus_spin_observable, w_prime)
from .enumeration import ExactDistribution, enumerate_exact, tv_distance
from .mcmc import (ChainConfig, FKChain, LoopO2Chain, SixVertexChain,
                   fk_heatbath_step, run_chain)
from .observables import (Estimate, circ_event, circuit_surrounds, crossing_h,
                          crossing_v, fit_log_growth, height_variance,
                          loops_around, mean_estimate)
