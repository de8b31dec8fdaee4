"""kickspec: spectral machinery of rank-N kicked quantum systems at desk scale.

Three layers:

* number theory (``rationals``, ``equidistribution``): exact fractional
  parts, continued fractions and irrationality type, Weyl sums, extreme
  discrepancy with an independent oracle, Erdos-Turan bounds;
* quantum formulas (``spectral``, ``floquet``): base spectra and their
  eigenphase sequences, power-law kick states, point-mass and cotangent
  diagnostics, truncated Floquet operators with eigen-decomposition,
  trace-norm checks and Wiener-average dynamics;
* experiments (``counting``, ``cli``): shrinking-interval counts, S(x) sets,
  the discrepancy inequality, gamma-window sweeps, and a reproducible CLI.
"""

from .counting import (
    BInverseBounds,
    CellResult,
    CountReport,
    IntervalJ,
    SweepResult,
    b_lower_bounds,
    count_interval,
    count_set_S,
    count_set_bourget,
    default_x_grid,
    divergence_scan,
    gamma_sweep,
    inequality_check,
    make_interval,
)
from .equidistribution import (
    DiscrepancyReport,
    ScalingFit,
    SequenceSpec,
    WeylSum,
    classical_exponent,
    conjectured_exponent,
    discrepancy_exact,
    discrepancy_oracle,
    discrepancy_scaling_fit,
    erdos_turan_bound,
    sequence_points,
    weyl_sum,
)
from .errors import (
    EnsembleError,
    IntervalRangeError,
    OracleSizeError,
    PoleError,
    PrecisionError,
    ProvenanceError,
    ResourceLimitError,
    ToleranceError,
    TrivialPerturbationError,
)
from .floquet import (
    MAX_DIM,
    DynamicsTrace,
    EigenDecomposition,
    FloquetMatrix,
    build_floquet,
    eigen_decompose,
    evolve,
    perturbation_trace_norm,
    truncate_state,
    wiener_average,
)
from .rationals import (
    ContinuedFraction,
    RationalApprox,
    TypeEstimate,
    continued_fraction,
    fractional_part,
    golden_ratio,
    irrational_type_estimate,
    liouville_number,
    nearest_integer_distance,
    sqrt_two,
)
from .spectral import (
    BaseSpectrum,
    Divergent,
    GammaWindow,
    KickEnsemble,
    KickState,
    ThetaSequence,
    alpha_sequence,
    b_inverse_partial,
    b_inverse_per_kick,
    cotangent_residual,
    full_support_state,
    gamma_window,
    orthonormal_ensemble,
    point_mass,
    power_law_state,
    theta_sequence,
)

__version__ = "0.1.0"
