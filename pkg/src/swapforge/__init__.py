"""Sequential entanglement swapping with generalized measurements.

Two maximally entangled pairs (1,2) and (3,4) share their middle wires
(2,3) with one party, who measures them with arbitrary POVMs, possibly
over several rounds.  This package builds the conditional states of every
outcome branch, quantifies entanglement (negativity, I-concurrence),
classifies measurements (entangled/unentangled elements, separable vs
inseparable operations), and ships a CLI for scenario runs, parameter
sweeps, POVM classification, and a built-in verification suite.
"""

from .classify import (
    ClassificationReport,
    ElementClass,
    classify_element,
    classify_measurement,
    lemma1_predicate,
    lemma2_predicate,
)
from .engine import (
    ALL_BRANCHES,
    DisturbanceReport,
    OutcomeRecord,
    SelectOutcome,
    SwapScenario,
    apply_element,
    apply_round,
    average_negativity,
    chain,
    disturbance_check,
    initial_state,
)
from .families import (
    SingleQubitElementParams,
    bell_projective,
    noisy_bell_povm,
    separable_product_povm,
    single_qubit_residual_concurrence,
    wire2_computational_povm,
)
from .linalg import (
    HermitianSpectrum,
    hermitian_eig,
    kron,
    matrix_rank,
    partial_trace,
    partial_transpose,
    permute_subsystems,
    psd_sqrt,
    psd_sqrt_closed_2x2,
    trace_norm,
)
from .measures import (
    BipartiteCut,
    CUT_1_2,
    CUT_12_34,
    CUT_14_23,
    c12_vs_34,
    c14_vs_23,
    i_concurrence,
    is_ppt,
    negativity,
    negativity_closed_form,
    trace_distance,
)
from .states import (
    DensityMatrix,
    Povm,
    PovmElement,
    PureState,
    conjugate_computational,
    max_entangled_state,
    read_povm,
    validate_povm,
    write_povm,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_BRANCHES",
    "BipartiteCut",
    "CUT_12_34",
    "CUT_14_23",
    "CUT_1_2",
    "ClassificationReport",
    "DensityMatrix",
    "DisturbanceReport",
    "ElementClass",
    "HermitianSpectrum",
    "OutcomeRecord",
    "Povm",
    "PovmElement",
    "PureState",
    "SelectOutcome",
    "SingleQubitElementParams",
    "SwapScenario",
    "apply_element",
    "apply_round",
    "average_negativity",
    "bell_projective",
    "c12_vs_34",
    "c14_vs_23",
    "chain",
    "classify_element",
    "classify_measurement",
    "conjugate_computational",
    "disturbance_check",
    "hermitian_eig",
    "i_concurrence",
    "initial_state",
    "is_ppt",
    "kron",
    "lemma1_predicate",
    "lemma2_predicate",
    "matrix_rank",
    "max_entangled_state",
    "negativity",
    "negativity_closed_form",
    "noisy_bell_povm",
    "partial_trace",
    "partial_transpose",
    "permute_subsystems",
    "psd_sqrt",
    "psd_sqrt_closed_2x2",
    "read_povm",
    "separable_product_povm",
    "single_qubit_residual_concurrence",
    "trace_distance",
    "trace_norm",
    "validate_povm",
    "wire2_computational_povm",
    "write_povm",
]
