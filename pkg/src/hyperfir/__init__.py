"""Split hypercomplex nonlinear adaptive FIR filtering over Cl(p,q)."""

from .activations import (
    ACTIVATIONS,
    IDENTITY,
    LOGISTIC,
    TANH,
    Activation,
    get_activation,
    split_apply,
    split_apply_amplitude,
    split_apply_deriv,
)
from .algebra import (
    Multivector,
    ProductTable,
    Signature,
    SignatureMismatchError,
    blade_grade,
    blade_label,
    blade_product,
    component,
    format_multivector,
    geometric_product,
    grade_select,
    modulus,
    parse_multivector,
    principal_involution,
    product_table,
    reverse,
    scalar_product,
    signed_magnitude_sq,
)
from .experiments import (
    RunReport,
    RunSummary,
    SignalSpec,
    StepRow,
    emit_csv,
    generate_signal,
    parse_csv,
    run_training,
)
from .filtering import (
    ConvergenceReport,
    FilterConfig,
    FilterState,
    NonFiniteSignalError,
    StepRecord,
    WrongSignatureError,
    ZeroPriorError,
    aashafa_step,
    convergence_factor,
    cost_gradient,
    finite_difference_gradient,
    forward,
    init_state,
    lambda_bound,
    load_state,
    mu_bound,
    net_input,
    save_state,
    shafa_step,
    sqafa_step,
    state_from_text,
    state_to_text,
    window_energy,
)
from .geometry import (
    IsotropicBladeError,
    blade_inverse,
    dual,
    ipns_member,
    left_contraction,
    opns_member,
    outer_product,
    project,
    project_blade,
    pseudoscalar,
    reject,
    right_contraction,
)

__version__ = "0.1.0"
