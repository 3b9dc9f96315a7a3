"""Certified uncertainty bounds for ergodic averages of Markov models.

The pipeline: build a model (generator, kernel, or SDE), certify a cumulant
bound for an observable from functional-inequality constants, measure the
perturbation by a relative-entropy rate, optimize the variational
divergence to get two-sided bias bounds, and validate the certificate by
simulation.
"""

from .chain import (
    GeneratorMatrix,
    Observable,
    StationaryMeasure,
    TransitionKernel,
    adjoint,
    center_observable,
    check_stationary,
    invariant_measure,
    is_reversible,
    model_from_json,
    model_to_json,
    observable_from_json,
    symmetrize,
    weighted_inner,
)
from .divergence import (
    LambdaFunction,
    XiResult,
    bernstein_lambda,
    bernstein_xi,
    cgf,
    empirical_cgf_lambda,
    linearized_xi,
    relative_entropy,
    solve_tilt_level,
    tilted_measure,
    xi_infimum,
)
from .entropy_rates import (
    EmScheme,
    EntropyRate,
    McEstimate,
    ctmc_relent_rate,
    dtmc_relent_rate,
    em_relent_onestep_mc,
    em_relent_rate,
    em_relent_taylor_bound,
    girsanov_rate_mc,
    init_relent_mc,
    jump_decomposition,
)
from .errors import (
    InvalidModelError,
    MarkovUqError,
    NoCertifiedMethod,
    NumericFailure,
)
from .report import UqBoundReport, assemble_bound
from .rng import path_seeds, substream
from .simulate import (
    PathSample,
    ValidationReport,
    endpoint_states,
    ergodic_average,
    path_ergodic_averages,
    simulate_ctmc,
    simulate_em,
    step_dtmc,
    uniformize,
    validate_bound,
)
from .spectral import (
    BernsteinParams,
    FunctionalConstants,
    HarrisParams,
    HarrisResult,
    LiapunovData,
    asymptotic_variance,
    carlen_loss_beta,
    f_sobolev_lambda,
    harris_xi,
    hessian_constants,
    kappa,
    kappa_lambda,
    liapunov_bernstein_params,
    log_sobolev_constant_numeric,
    log_sobolev_lambda,
    perturbation_kappa_bound,
    poincare_bernstein_params,
    poincare_constant,
    poincare_from_decay,
    reversible_bernstein_params,
)
from .zoo import (
    ExclusionSpec,
    SdeModel,
    ZooModel,
    exclusion_chain,
    hypercube_kernel,
    langevin_model,
    mminfty_generator,
    perturbed_model,
    zoo_model,
    zoo_names,
)

__version__ = "0.1.0"

__all__ = [
    "GeneratorMatrix",
    "TransitionKernel",
    "StationaryMeasure",
    "Observable",
    "invariant_measure",
    "check_stationary",
    "is_reversible",
    "adjoint",
    "symmetrize",
    "center_observable",
    "weighted_inner",
    "model_from_json",
    "model_to_json",
    "observable_from_json",
    "LambdaFunction",
    "XiResult",
    "cgf",
    "relative_entropy",
    "xi_infimum",
    "bernstein_xi",
    "bernstein_lambda",
    "empirical_cgf_lambda",
    "linearized_xi",
    "tilted_measure",
    "solve_tilt_level",
    "FunctionalConstants",
    "BernsteinParams",
    "LiapunovData",
    "HarrisParams",
    "HarrisResult",
    "kappa",
    "kappa_lambda",
    "poincare_constant",
    "poincare_bernstein_params",
    "asymptotic_variance",
    "reversible_bernstein_params",
    "liapunov_bernstein_params",
    "perturbation_kappa_bound",
    "log_sobolev_lambda",
    "f_sobolev_lambda",
    "log_sobolev_constant_numeric",
    "harris_xi",
    "poincare_from_decay",
    "carlen_loss_beta",
    "hessian_constants",
    "EntropyRate",
    "McEstimate",
    "EmScheme",
    "jump_decomposition",
    "ctmc_relent_rate",
    "dtmc_relent_rate",
    "girsanov_rate_mc",
    "em_relent_onestep_mc",
    "em_relent_rate",
    "em_relent_taylor_bound",
    "init_relent_mc",
    "SdeModel",
    "ExclusionSpec",
    "ZooModel",
    "mminfty_generator",
    "hypercube_kernel",
    "exclusion_chain",
    "langevin_model",
    "perturbed_model",
    "zoo_model",
    "zoo_names",
    "PathSample",
    "ValidationReport",
    "simulate_ctmc",
    "uniformize",
    "ergodic_average",
    "simulate_em",
    "step_dtmc",
    "path_ergodic_averages",
    "endpoint_states",
    "validate_bound",
    "UqBoundReport",
    "assemble_bound",
    "substream",
    "path_seeds",
    "MarkovUqError",
    "InvalidModelError",
    "NumericFailure",
    "NoCertifiedMethod",
]
