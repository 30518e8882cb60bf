"""Exact-arithmetic twisted complexes on P^r, shifted dualities, and the
Koszul-derived symmetric half pairs, with independent acyclicity oracles."""

from .complexes import (
    ChainMap,
    ComplexError,
    GradedMatrix,
    TwistedFreeComplex,
    TwistedFreeModule,
    cone,
    direct_sum,
    single_term_complex,
    tensor_complexes,
    tensor_maps,
)
from .duality import (
    DualityDatum,
    SymmetricFormData,
    bilinear_to_form,
    calibrate_epsilon,
    canonical_id,
    check_symmetric,
    compose_duality,
    dualize_complex,
    dualize_map,
    form_to_bilinear,
    pairing_iso,
    square_twist,
    tensor_form,
    transmute,
)
from .fields import QQ, FieldError, PrimeField, Rationals, parse_field_spec
from .koszul import (
    HalfKoszulPair,
    KoszulData,
    MiddleSplit,
    build_even_pair,
    build_koszul,
    build_mu,
    build_odd_pair,
    build_phi,
    delta_datum,
    ext_basis,
    middle_split_injected,
    middle_split_trivial,
    wedge_gram_nu,
    wedge_multiply,
)
from .polynomials import HomogPoly, PolynomialError
from .verify import (
    AcyclicityVerdict,
    acyclic_probabilistic,
    battery_duality_identities,
    graded_window_homology,
    homology_univariate,
    quasi_iso_check,
    quotient_vanishing,
    semiorth_dual_class,
)
from .witt import (
    EpsForm,
    FormError,
    Subspace,
    diagonalize,
    is_lagrangian,
    split_sequence,
    symplectic_basis,
    witt_index_fp,
)

__version__ = "0.1.0"
