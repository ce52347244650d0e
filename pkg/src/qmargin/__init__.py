"""Optimal discrimination between two quantum states under an error margin.

Closed-form optimal success probabilities, explicit optimal measurements,
and dual certificates for pure-state pairs with arbitrary priors; upper
bounds for mixed-state pairs; and an independent brute-force oracle for
end-to-end verification.
"""

from .bloch import Herm2, PSD_TOL, eigs, frobenius_norm, is_psd, mul, trace_product, vec3
from .instance import (
    DegeneratePrior,
    Domain,
    DomainKind,
    Instance,
    LinearlyDependent,
    MarginOutOfRange,
    NotNormalizable,
    canonicalize,
    classify,
    critical_margins,
)
from .mixed import (
    DensityMatrix,
    DimensionMismatch,
    MixedInstance,
    NotAState,
    fidelity,
    helstrom_mixed,
    load_density_matrix,
    random_density,
    trace_fidelity_inequality_gap,
    upper_bound_mixed,
)
from .oracle import (
    SearchConfig,
    classical_fidelity,
    fullsphere_probe,
    oracle_mixed_weak,
    oracle_pure_strong,
    oracle_pure_weak,
)
from .strong import (
    MarginKind,
    p_max_strong,
    solve_strong,
    strong_critical_margins,
    strong_margin_of_weak,
    weak_margin_of_strong,
)
from .weak import (
    Certificate,
    CertificateReport,
    Diagnostics,
    MarginZeroDegenerate,
    OutOfDomain,
    Povm3,
    PovmReport,
    Solution,
    build_intermediate,
    build_min_error,
    build_single_state,
    certificate_report,
    diagnostics,
    p_max_weak,
    povm_report,
    solve_weak,
)

__version__ = "0.1.0"
