"""Rees algebras of maximal ideals of hypersurface rings, computed from scratch."""

from .algebra import (
    DEFAULT_FIELD, GREVLEX, LEX, QQ, Polynomial, PolynomialSyntaxError, PrimeField,
    RationalField, Ring, TermOrder, format_polynomial, parse_polynomial,
)
from .groebner import (
    Budget, GroebnerBasis, GroebnerBudgetExceeded, Ideal, buchberger, contains,
    ideal_equal, normal_form,
)
from .ideals import (
    HilbertData, DepthProbeResult, colon_element, colon_ideal, depth_probe,
    hilbert_numerator, ideal_power, ideal_product, ideal_sum, intersect,
    krull_dimension, minimalize_generators, saturate,
)
from .lab import (
    ReesReport, ReesSetup, build_setup, classify, downgrade_sequence,
    partial_column, presentation_matrix, rees_ideal_downgrade,
    rees_ideal_saturation, symmetric_ideal, verify_main_theorem,
)

__version__ = "0.1.0"
