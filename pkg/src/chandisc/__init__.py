"""Error-probability bounds for discriminating noisy quantum channels.

The package covers three channel families (erasure, depolarizing, amplitude
damping) in two tasks: telling two channels apart, and finding the position
of one anomalous channel among ``m`` identical cells.  For the first two
families the ultimate adaptive error is available in closed form through
outcome counting; for amplitude damping the package brackets the error
between simulation-based adaptive lower bounds, fidelity sandwiches, exact
block values on compressed tensor powers, and an explicit nulling receiver.
"""

from ._kernels import active_backend
from .channels import (ChannelError, KrausChannel, SimulationError, apply, choi,
                       default_xi, heisenberg_weyl, make_qadc, make_qdc, make_qec,
                       maximally_entangled, pbt_error_bound, qadc_pbt_error,
                       tele_covariance_check, zero_sim_error)
from .cpf import (CpfError, CpfSpec, MOptimizationResult, build_cpf_choi_ensemble,
                  compressed_cpf_ensemble, cpf_block_fidelity_lb, cpf_fidelity_lb,
                  cpf_helstrom_iterative, cpf_nonadaptive_fidelity_lb, cpf_pgm_upper,
                  cpf_sim_error, cyclic_shift, general_fidelity_lb, optimize_over_M,
                  theorem1_lower_bound)
from .discrimination import (BoundReport, DiscriminationError, Povm, StateEnsemble,
                             continuity_lower_bound, fidelity_lower_bound,
                             fidelity_upper_bound, gus_unitary_helstrom,
                             helstrom_binary, helstrom_iterative, pgm_error,
                             pgm_povm, success_probability)
from .linalg import (DensityMatrix, LinalgError, SubspaceBasis,
                     compressed_tensor_power, fidelity, hermitize,
                     joint_support_compress, partial_trace, tensor, tensor_all,
                     trace_norm)
from .orc import (OrcError, OrcParams, WeightProfile, f_u, h_m1_closed, h_mu,
                  h_mu_enumerate, h_mu_weights, qdc_binary, qdc_cpf, qec_binary,
                  qec_cpf, weight_profiles)
from .qadc import (OutcomeDistribution, QadcError, fvg_sandwich, nulling_error,
                   nulling_outcome_dist, nulling_unitary, qadc_adaptive_lb,
                   qadc_adaptive_lb_opt, qadc_block_helstrom, qadc_block_pgm,
                   qadc_choi_fidelity, qadc_cpf_adaptive_lb, qadc_cpf_adaptive_lb_opt)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
