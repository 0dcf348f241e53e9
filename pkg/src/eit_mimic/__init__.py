"""Approximating relative continuum EIT data from point- and complete-electrode measurements."""

from .spectral import (
    TrigCoeffs,
    coeffs_from_samples,
    delta_coeffs,
    evaluate,
    project_mean_free,
    project_PM,
    sobolev_inner,
    sobolev_norm,
    sobolev_weights,
)
from .interp import (
    basis_phi,
    check_zero_sum,
    constant_Cs,
    delta_combination,
    demean,
    interpolate_QM,
    lift_hatQM,
    nodes,
    point_eval_FM,
    recenter_GM,
    sample_hatQM_inverse,
    trapezoid_inner,
)
from .forward import (
    ConcentricConductivity,
    apply_relative_ND,
    current_pattern,
    err_rel,
    mimic_pipeline,
    mimic_pipeline_operator,
    pem_measure,
    relative_eigenvalue,
    relative_l2_error,
)
from .conformal import (
    DiskInclusion,
    MobiusMap,
    mimic_general,
    mobius_for_inclusion,
    pem_measure_general,
    pull_potential,
    push_current,
    upsilon_M_general,
)
from .cem import (
    CemLayout,
    CemSolution,
    discrepancy_opnorm,
    dtn_coefficient,
    electrode_integral,
    hat_upsilon_M,
    solve_cem,
    upsilon_CEM,
)

__version__ = "0.1.0"
