"""Plectic Galois groups, half transfers and CM-point actions on finite models."""

from .abelian import (
    AbHom,
    FinAb,
    fiber_product,
    is_cartesian_square,
    section_of_surjection,
    smith_normal_form,
    solve_hom,
)
from .actions import (
    CMPoint,
    TorusModel,
    check_pi0_equivariance,
    enumerate_cm_points,
    galois_act_on_cm_point,
    make_cm_point,
    make_torus,
    pi0_of_cm_point,
    pi0_plectic_action,
    plectic_act_on_cm_point,
)
from .cm import (
    CMContext,
    CMType,
    EquivariantSection,
    act_on_cm_type,
    act_on_sigma_k,
    cm_context,
    complex_conjugations,
    enumerate_cm_types,
    half_transfer,
    orbit_decomposition,
)
from .config import ModelBundle, available_models, load_model
from .groups import (
    FiniteGroup,
    Subgroup,
    abelianization,
    left_cosets,
    make_group,
    subgroup,
    transfer,
    units_group,
)
from .plectic import (
    GaloisContext,
    PlecticElement,
    as_map_on_gamma,
    compose,
    embed_galois,
    enumerate_plectic_group,
    product_map,
    rebase,
)
from .recip import (
    RecipModel,
    Splitting,
    make_splitting,
    membership_cm_group,
    synthesize_cartesian_model,
    taniyama,
)

__version__ = "0.1.0"
