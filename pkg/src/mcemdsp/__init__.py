"""Monte Carlo EM detection of imprinting and maternal effects from discordant sib-pair families."""
from .engine import EmConfig, FitResult, Variant, fit, fit_importance
from .genetics import Dataset, FamilyRecord, Theta
from .inference import Effect, TestResult, lrt
from .kernels import BACKEND
from .simulate import DISEASE_MODELS, SCENARIOS, simulate_dataset

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Dataset",
    "DISEASE_MODELS",
    "Effect",
    "EmConfig",
    "FamilyRecord",
    "FitResult",
    "SCENARIOS",
    "TestResult",
    "Theta",
    "Variant",
    "fit",
    "fit_importance",
    "lrt",
    "simulate_dataset",
]
