"""Two-qubit NMR relaxation simulator with symmetric quantum discord analysis."""

__version__ = "0.1.0"

from .channels import (
    ChannelSelection,
    QuantumChannel,
    RelaxationParams,
    apply,
    compose,
    gad_channel,
    lift_local,
    pd_channel,
)
from .correlations import (
    CorrelationValues,
    OptimizerSettings,
    ProductProjectiveBasis,
    bell_diagonal_closed_form,
    classical_correlation,
    measure_map,
    measured_mutual_info,
    mutual_info_exact,
    mutual_info_expansion,
    quantum_discord,
)
from .dynamics import (
    SuddenChangeReport,
    Trajectory,
    analytic_sudden_change,
    detect_sudden_change,
    evolve_trajectory,
    subtract_amplitude_damping,
)
from .nmr import (
    DiagonalPopulations,
    TimeGrid,
    diagonal_deviation,
    inject_residual_coherence,
    j_evolution,
    pseudo_epr,
    sampling_grid,
    solve_populations,
)
from .states import (
    BellDiagonalCoeffs,
    BlochDecomposition,
    DensityMatrix,
    DeviationMatrix,
    bell_diagonal_deviation,
    bloch_decompose,
    compose_density,
    extract_deviation,
    partial_trace,
)
