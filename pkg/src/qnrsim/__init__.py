"""Exact amplitude amplification for sampling quadratic nonresidues, simulated."""
from .amplification import (
    AmplificationPlan,
    deterministic_known_set_sample,
    deterministic_single_marked,
    grover_iteration,
    optimal_iterations,
    solve_final_theta,
)
from .errors import (
    CountMismatch,
    InfeasibleAngle,
    InvalidInput,
    MeanOffTarget,
    MemoryCapExceeded,
    NotPrime,
    QnrSimError,
    WrongResidueClass,
)
from .number_theory import (
    OddPrimeInstance,
    is_prime,
    jacobi,
    parity_counts,
    power_residue_indicator,
    qnr_set_bruteforce,
    qnr_shortcut,
)
from .sampler import (
    PredictedFinalState,
    RotationPlan,
    Schedule,
    VerificationReport,
    build_instance,
    predicted_final,
    run_pipeline,
    sample_qnr,
    verify,
)
from .statevector import (
    Indicator,
    StateVector,
    invert_about_mean,
    mean,
    measure,
    negate_zero,
    phase_rotate,
    uniform,
    walsh_hadamard,
)

__version__ = "0.1.0"
