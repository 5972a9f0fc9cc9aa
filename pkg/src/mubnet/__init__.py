"""Mutually unbiased bases, k-nets over finite-dimensional C*-algebras and
nice error bases: constructions, validators and certificates."""
from .algebra import (
    AlgebraElement,
    AlgebraShape,
    Subspace,
    are_quasi_orthogonal,
    canonical_trace,
    hs_inner,
    hs_norm,
    normalized_trace,
    orthonormalize,
    span_residual,
)
from .classical import ClassicalNet, affine_plane, enumerate_transversals, fake_parallel_class, remove_classes
from .fields import F4Field, PrimeField, QuadraticField, field_of_order
from .kernels import BACKEND
from .knet import GeneralizedKNet, NetSummary, mubs_to_generalized, validate_knet
from .mubs import MubCollection, match_axis, projection_distance, unbiasedness_residual
from .nice import (
    NiceErrorBasis,
    Subgroup,
    catalog,
    enumerate_abelian_order_d_subgroups,
    mubs_from_subgroups,
    prime_square_completion,
    tensor_weyl,
    weyl_basis,
)
from .rigidity import (
    Certificate,
    lambda_gap,
    nice_extension_scan,
    unbiased_vector_search,
    uncompletability_certificate,
    verify_counterexample,
)

__version__ = "0.1.0"
