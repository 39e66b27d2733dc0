"""aqolab: gap certification, local schedules and hardness reductions for
rank-one interpolated diagonal Hamiltonians."""

from .config import DEFAULT_CONFIG, RunConfig
from .corpus import gaussian_levels, grover, random_ising, random_spectrum, verification_corpus
from .evolution import (
    EvolutionResult,
    evolve,
    evolve_frozen,
    scaling_experiment,
    uniform_baseline,
    verify_projector_bounds,
)
from .gap_bounds import (
    GapCertificate,
    WindowBracket,
    certificate,
    gap_scan,
    right_region_f,
    window_bracket,
    window_sandwich_check,
)
from .hardness import (
    A1Oracle,
    ExtractionTranscript,
    SatInstance,
    couple_ancilla_plus,
    disambiguate,
    extract_degeneracies,
    extract_degeneracies_noisy,
    f_of_x,
    iqp_amplitude,
    probabilistic_extraction,
    sat_gadget,
)
from .rationalpoly import berlekamp_welch, lagrange_interpolate
from .schedule import HNorms, SchedulePlan, integral_bounds, rate_constant, synthesize
from .spectrum import (
    AffineMap,
    DegeneracySpectrum,
    InterpolatedSpectrum,
    IsingModel,
    SpectralProfile,
    dense_symmetric_matrix,
    enumerate_ising,
    normalize,
    secular_eigenvalues,
    spectral_params,
    symmetric_state_overlap,
    true_gap,
    true_gap_grid,
)

__version__ = "0.1.0"
