"""Domain models - Framework-agnostic value objects, errors and events"""

from .errors import *
from .events import *
from .value_objects import *

__all__ = [
    # Value Objects
    "Verdict",
    "ClauseStatus",
    "CellClass",
    "Budgets",
    "Interval",
    "fraction_text",
    "parse_fraction",
    # Errors
    "BorelDeskError",
    "SpaceMismatchError",
    "DigitBoundsError",
    "BijectivityError",
    "DepthOverflowError",
    "BudgetExceededError",
    "OverlapError",
    "UnresolvedError",
    "LevelOutOfRangeError",
    "VertexNotFoundError",
    "IndexOutOfRangeError",
    "NonMonotoneCutsError",
    "DuplicateWeightError",
    "HorizonExhaustedError",
    "StageBudgetError",
    "RokhlinInfeasibleError",
    "FormatError",
    "FormatSyntaxError",
    "FormatSemanticError",
    "PeriodicityError",
    "NestingError",
    # Events
    "DomainEvent",
    "ValidationCompleted",
    "CertificateIssued",
    "ConstructionCompleted",
]
