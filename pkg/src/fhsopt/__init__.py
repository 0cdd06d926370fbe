"""Optimal frequency-hopping sequence sets over finite fields.

Modules
-------
galois
    GF(p^m) arithmetic on integer codes, towers, coset representatives.
fmaps
    Linearized, power and trace-vector maps; difference-balanced functions.
construct
    FHS set container, generic composition and the three constructions.
analyze
    Partial Hamming correlation, bounds and optimality certification.
cli
    The ``fhs`` command.
"""

from .analyze import (OptimalityReport, certify, correlation_profile, niu_bounds,
                      cai_size_bounds, partial_hamming, set_max_correlation, span_profile,
                      verify_hit_lattice)
from .construct import (FhsSet, check_property_Au, check_property_Av, compose_generic,
                        construct_class1, construct_class2, construct_class3, from_provenance)
from .errors import (BudgetError, FhsError, FieldError, HypothesisError, NotIrreducibleError,
                     NotPrimitiveError, VerificationError)
from .fmaps import (DifferenceBalancedFunction, LinearizedMap, PowerMap, TraceVectorMap,
                    dbf_create, dbf_zero_line, frobenius_map, verify_balanced,
                    verify_difference_balanced)
from .galois import GF, FieldElement, Tower, coset_representatives, field_create

__all__ = [name for name in dir() if not name.startswith("_")]
