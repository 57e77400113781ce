"""Measure definite and negative definite kernels on finite sets."""

from .errors import (
    EmbeddingError,
    EstimatorError,
    MdkernError,
    SizeError,
    SolverError,
    ValidationError,
)
from .kernel import (
    Kernel,
    NegDefWitness,
    is_negative_definite,
    is_pseudometric,
    quadratic_form,
    sqrt_kernel,
)
from .embedding import (
    PointConfiguration,
    apply_rigid_motion,
    gram_matrix,
    pad_dimension,
    random_rotation,
    schoenberg_embed,
)
from .measurespace import (
    AtomicRepresentation,
    GroundedRepresentation,
    complement_double,
    one_sided_difference,
    pushforward,
    symmetric_difference_kernel,
)
from .crofton import (
    CroftonEstimate,
    CroftonOptions,
    CylinderSpec,
    atom_estimates,
    atom_measures,
    cylinder_measure,
    distance_estimates,
    kappa,
    sqrt_representation,
)
from .cutcone import (
    DecomposeOptions,
    Feasible,
    Infeasible,
    InfeasibilityCertificate,
    decompose,
    verify_certificate,
    verify_limit_closed,
)
from .trees import Tree, distance_kernel, tree_representation
from .actions import (
    EventuallyConstantSet,
    FiniteGroup,
    FiniteGroupAction,
    ZAction,
    defect,
    defect_growth,
    defects,
    group_cylinder_invariance,
    is_left_invariant,
    orbit_kernel,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
