"""Random quantum circuits as approximate unitary k-designs: moment operators,
spectral gaps, design depths and Monte-Carlo checks."""

__version__ = "0.1.0"

from .circuits import (  # noqa: E402
    Circuit,
    EnsembleSpec,
    PlacedGate,
    apply_circuit_state,
    circuit_unitary,
    sample_circuit,
    sample_step,
)
from .errors import CapacityError, ConvergenceError, DegenerateGramError, InvalidArgument  # noqa: E402
from .gap import (  # noqa: E402
    GapReport,
    HamiltonianHnk,
    design_depth,
    ground_space_basis,
    h_apply,
    nachtergaele_check,
    scaling_check,
    spectral_gap,
)
from .rng import RngStream  # noqa: E402
