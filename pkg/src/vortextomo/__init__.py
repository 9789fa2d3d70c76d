"""Tomography of optical vortex states from a single pixelized intensity scan.

A position scan is a compatible (projective) measurement, yet restricted to
a truncated Laguerre-Gauss subspace its pixel projectors stop commuting and
can become informationally complete.  This package builds those induced
POVMs, decides completeness by a singular-value rank test, simulates photon
counting and reconstructs density matrices by maximum likelihood.
"""

__version__ = "0.1.0"

from .completeness import (
    CoefficientMatrix,
    CompletenessReport,
    ScanRow,
    coefficient_matrix,
    completeness_scan,
    flip_conjugate,
    flip_invisible_directions,
    invisible_directions,
    is_informationally_complete,
    kernel_degeneracy_oracle,
    numerical_rank,
)
from .modes import (
    ModeIndex,
    QuadratureSpec,
    Subspace,
    TruncationSpec,
    build_subspace,
    ell_shift,
    gram_matrix,
    lg_amplitude,
    mode_overlap,
)
from .operator_basis import (
    OperatorBasis,
    bloch_compose,
    bloch_decompose,
    gell_mann_basis,
    povm_decompose,
    random_density_matrix,
    validate_density_matrix,
)
from .povm import (
    PixelGrid,
    PovmSet,
    commutator_norm,
    incompatibility_map,
    induced_povm,
    pixel_projector,
    point_projector,
)
from .reconstruction import (
    MlOptions,
    MlResult,
    fidelity,
    log_likelihood,
    ml_reconstruct,
    render_matrix,
    trace_distance,
)
from .simulation import IntensityImage, StateSpec, add_noise, ideal_intensity, make_state

__all__ = [
    "__version__",
    "CoefficientMatrix",
    "CompletenessReport",
    "IntensityImage",
    "MlOptions",
    "MlResult",
    "ModeIndex",
    "OperatorBasis",
    "PixelGrid",
    "PovmSet",
    "QuadratureSpec",
    "ScanRow",
    "StateSpec",
    "Subspace",
    "TruncationSpec",
    "add_noise",
    "bloch_compose",
    "bloch_decompose",
    "build_subspace",
    "coefficient_matrix",
    "commutator_norm",
    "completeness_scan",
    "ell_shift",
    "fidelity",
    "flip_conjugate",
    "flip_invisible_directions",
    "gell_mann_basis",
    "gram_matrix",
    "ideal_intensity",
    "incompatibility_map",
    "induced_povm",
    "invisible_directions",
    "is_informationally_complete",
    "kernel_degeneracy_oracle",
    "lg_amplitude",
    "log_likelihood",
    "make_state",
    "ml_reconstruct",
    "mode_overlap",
    "numerical_rank",
    "pixel_projector",
    "point_projector",
    "povm_decompose",
    "random_density_matrix",
    "render_matrix",
    "trace_distance",
    "validate_density_matrix",
]
