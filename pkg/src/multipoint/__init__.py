"""Multipoint zero-range scatterers in three dimensions.

Contact matrices, scattering states, zero-energy bound states and the
multipole localization of the alternating polygon bound state.
"""

__version__ = "0.1.0"

from .errors import (
    CoincidentScatterersError,
    ConfigurationError,
    NotFoundError,
    ResonanceError,
    SingularityError,
)
from .model import (
    AlternatingDistanceTerms,
    Configuration,
    Point3,
    PointScatterer,
    alpha_alternating,
    load_configuration,
    make_polygon,
    make_tetrahedron,
    polygon_alpha,
    save_configuration,
)
from .greens import ContactMatrix, Energy, assemble_contact_matrix, green_plus
from .spectral import (
    BoundStateBasis,
    bound_state_eval,
    bound_state_field,
    bound_state_residual,
    conjecture_scan,
    find_critical_alpha,
    find_critical_alphas,
    zero_energy_null_space,
)
from .scattering import (
    ContactExpansion,
    IncidentWave,
    ScatteringSolution,
    bound_state_solution,
    extract_contact_expansion,
    far_field_amplitude,
    solve_scattering,
    total_field,
)
from .farfield import (
    Direction,
    MultipoleReport,
    fibonacci_directions,
    fit_decay_exponent,
    multipole_coefficient,
    multipole_report,
    series_eval_bound_state,
    sqrt_series_coeffs,
    symmetry_defect,
)
