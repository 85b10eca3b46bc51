"""Workbench for predimension generic graphs and invariant Keisler measures.

Builds finite approximations of generic graphs cut out by a predimension
bound and forbidden patterns, computes the exact closure/dimension calculus
on them, and certifies measure facts (forced zeros, ergodic decompositions,
product-rule checks) with replayable derivations.
"""

from .graphs import (
    INFINITE,
    Embedding,
    FinGraph,
    InvalidInput,
    ResourceBudget,
    VertexSet,
    automorphisms,
    distance,
    find_embedding,
    from_text,
    girth,
    to_text,
)
from .canonical import canonical_form, canonical_key, tuple_key
from .orbits import OrbitTable, same_orbit, tuple_orbits
from .predimension import (
    AclResult,
    ClosureMode,
    Dim,
    PredimensionSpec,
    acl_approx,
    closure,
    d_independent,
    delta,
    delta_rel,
    dimension,
    weakly_alg_independent,
)
from .classes import ClassSpec, load_class, parse_class_text, preset_p0
from .amalgamation import (
    Extension,
    GenericApproximation,
    build_generic,
    enumerate_extensions,
    free_amalgam,
    independent_type_extension,
)
from .formulas import FormulaInstance, UnsupportedFormula, evaluate, parse_shape
from .inconsistency import certify_inconsistent, replay_certificate
from .independence import STANDARD, STRONG, test_independence_theorem
from .measures import build_constraint_system, certify_zero, solve_feasible
from .ergodic import (
    FiniteAction,
    check_ergodic_finite,
    ergodic_decompose_finite,
)
from .sampling import er_product_check
from .verify import verify_construction_properties
from .compare import compare_fork_vs_zero

__version__ = "0.1.0"
