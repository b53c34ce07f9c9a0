"""Pre- and post-selected quantum ensembles: Dirac distributions, weak values,
and entropies conditioned on post-selection."""

__version__ = "0.1.0"

from .dirac import (
    DiracDistribution,
    OrthogonalityError,
    conditional_dirac,
    dirac_distribution,
    marginal_a,
    marginal_b,
    reconstruct,
)
from .entropy import (
    BoundReport,
    LogBase,
    cerf_adami_conditional,
    conditional_entropy,
    conditional_entropy_selected,
    conditional_entropy_selected_closed,
    entropy_bounds,
    scan_min_entropy,
    von_neumann_entropy,
)
from .linalg import Ket, OrthonormalBasis, inner_product, outer_product, random_orthonormal_basis
from .pointer_sim import (
    PointerModel,
    PostSelectedPointer,
    WeakMeasurementResult,
    analytic_moments,
    postselected_pointer,
    simulate_weak_measurement,
)
from .postselect import (
    TwoStateDensity,
    mixture_reconstruct,
    postselection_probability,
    two_state_density,
    two_state_from_decomposition,
    weak_value,
)
