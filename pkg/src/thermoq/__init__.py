"""Finite-time precision limits for thermometry with Markovian probes.

The package computes upper bounds on the quantum-Fisher-information rate of
a probe weakly coupled to a thermal sample, together with the explicit
measurement strategies that saturate or approach them: fast
measure-and-prepare schemes, low-temperature coherent protocols on a
two-level probe, and collectively enhanced multi-qubit probes.
"""

__version__ = "0.1.0"

from .spectral import (  # noqa: F401
    BathResponse,
    OhmicDensity,
    bath_response,
    bose_occupation,
    bose_occupation_dT,
    jump_rates,
    lamb_shifts,
    low_T_scaling_exponent,
    principal_value_integral,
)
from .lindblad import (  # noqa: F401
    JumpChannel,
    LindbladModel,
    build_microscopic,
    evolve_with_sensitivity,
    generator_apply,
    model_from_channels,
    qubit_probe_model,
    thermal_bath_map,
)
from .fisher import (  # noqa: F401
    OutcomeDistribution,
    classical_fisher,
    qfi,
    qfi_and_sld,
    qfi_rate_vs_time,
)
from .bounds import (  # noqa: F401
    BoundReport,
    OhmicityBound,
    bound_fixed_H,
    bound_optimal_H,
    bound_with_lamb,
    check_diffusive,
    ohmicity_bound,
    qubit_bound_opt_gauge,
    qubit_explicit_bound,
)
from .strategies import (  # noqa: F401
    StrategyResult,
    ancilla_parity,
    fast_detection,
    map_fisher_rate,
    optimize_strategy,
    qubit_closed_form_state,
    ramsey,
)
from .util import ConvergenceError  # noqa: F401
