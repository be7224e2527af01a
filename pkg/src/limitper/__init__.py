"""Limit-periodic potentials, their procyclic hulls, and spectral measurements."""

from .supernatural import INF, Supernatural, factorize, is_prime
from .frequency import (
    FrequencyChain,
    FrequencyModuleView,
    HullComparison,
    bohr_coefficient,
    chain_limit,
    chain_make,
    common_divisor_frequency,
    hulls_isomorphic,
    maximal_chain,
)
from .procyclic import (
    GeneratorCheck,
    MetricResult,
    ProcyclicElement,
    QuotientMap,
    embed_from_subchain,
    is_generator,
    metric,
    orbit_residues,
    quotient,
    restrict_to_subchain,
    subgroup_membership,
    translation_is_minimal,
)
from .potential import (
    ExtractionResult,
    GordonReport,
    PeriodicLayer,
    Potential,
    SamplingFunction,
    gordon_check,
    iid_uniform_potential,
    metric_potential,
    metric_sampling,
    metric_value,
    periodic_potential,
    periodize,
    sample,
    sampled_potential,
    sampling_from_potential,
    sawtooth_potential,
    sawtooth_sampling,
    sawtooth_tail,
    sawtooth_value,
)
from .spectral import (
    BandSet,
    ConditionAReport,
    IDSCurve,
    SpectrumApprox,
    TransferState,
    bands,
    condition_a_check,
    discriminant,
    eigenvalue_count,
    hausdorff_dist,
    ids,
    ids_curve,
    log_holder_report,
    lyapunov_estimate,
    measure_estimate,
    spectrum_approx,
    transfer_product,
)

__version__ = "0.1.0"
