"""Parametric safety analysis of linear hybrid automata with
Hybrid-Restriction Diagrams."""
from .core import (INF, INFINITY, Bound, DenseVar, LinExpr, Order,
                   ZeroExpression, bound_add, bound_compare, bound_scale,
                   normalize_expression, poly_is_infeasible,
                   poly_space_intersect)
from .engine import (AnalysisConfig, AnalysisResult, Direction, Status,
                     analyze, backward_reach, forward_reach,
                     parametric_unsafe, psa_with_pspsc, semantically_equal)
from .hrd import FALSE, TRUE, DiscreteVar, Manager, Node, OrderingViolation
from .ordering import (AtomOrder, ModelError, OrderingKind, canonical_form,
                       compare_atoms, group_of)
from .wp import SymbolicModel, delta_exp, exists_elim, var_del, xtivity

__version__ = "0.1.0"
