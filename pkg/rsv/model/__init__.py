from .partition import StatePartition
from .imdp import (
    STOCHASTIC_TOLERANCE,
    ImdpModel,
    ModelValidationError,
    Violation,
    validate_model,
)
from .policy import MissingPolicyError, Policy, validate_policy
from .chain import InducedChain, induce_chain
