"""Cone metric spaces reduced to ordinary metric spaces by nonlinear scalarization."""

from .comparison import (
    RationalDecay,
    Scale,
    ScalarComparison,
    Step,
    VectorialComparison,
    check_lemma21,
    check_transfer,
    transfer_psi,
    verify_scalar,
    verify_vectorial,
)
from .cone import TAU, Cone, ConeError, DimensionError, validate_cone
from .cone_metric import (
    InducedMetric,
    TableSpace,
    WeightedLine,
    random_table_space,
    space_from_dict,
    verify_cone_metric_axioms,
    verify_induced_metric,
)
from .fixedpoint import (
    FixedPointReport,
    SelfMap,
    check_condition_C,
    check_condition_C1,
    picard_solve,
    remark23_implication,
    theorem21_implication,
    verify_scalar_contraction,
    verify_uniqueness,
    verify_vector_contraction,
)
from .instances import random_condition_C_instance, random_contraction_instance
from .report import PropertyReport, SuiteReport
from .scalarize import Scalarizer, check_lemma1, check_lemma2, check_oracle

__version__ = "0.1.0"
