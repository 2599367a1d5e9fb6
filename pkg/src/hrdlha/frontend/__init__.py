"""Model language: AST, parser, printer, validator and benchmark generators."""
from .generators import (FAMILIES, generate, generate_csma, generate_fischer,
                         generate_railroad, generate_reactor)
from .model import (FALSE_PRED, TRUE_PRED, And, Const, DiscreteDecl, DiscTest,
                    Interval, LHAModel, Lin, Mode, ModeTest, Or, Process,
                    Transition)
from .parser import (ModelSyntaxError, ModelValidationError, parse_model,
                     parse_pred)
from .printer import print_model
from .validate import validate
