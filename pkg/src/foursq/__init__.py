"""Sums of four squares under linear restrictions.

Constructive decompositions, a brute-force oracle, and verification
campaigns for representations such as n = x^2 + y^2 + z^2 + 2w^2 with
x + 2y prime.
"""

from .cauchy import bounds, cauchy_1111, cauchy_1113, cauchy_1122, decompose_thm14, interval_I
from .constructive import (
    decompose_cor12,
    decompose_cor13i,
    decompose_cor13ii,
    decompose_thm11,
    decompose_thm12i,
    decompose_thm12ii,
    decompose_thm12iii,
    decompose_thm13,
    lemma_a,
    lemma_b,
)
from .errors import (
    ArityMismatch,
    ConfigError,
    DivisibilityError,
    DomainError,
    FourSqError,
    InternalInvariantViolation,
    LogIntegrityError,
    NoAdmissibleCandidate,
    NotFound,
    ResourceLimit,
    SearchExhausted,
)
from .forms import QuadraticForm, represent_all, represent_constrained
from .harness import CampaignResult, CampaignSpec, check_135, explore_conjecture, run
from .model import FormId, LinearConstraint, Target, Witness

__version__ = "0.1.0"

__all__ = [
    "ArityMismatch",
    "CampaignResult",
    "CampaignSpec",
    "ConfigError",
    "DivisibilityError",
    "DomainError",
    "FormId",
    "FourSqError",
    "InternalInvariantViolation",
    "LinearConstraint",
    "LogIntegrityError",
    "NoAdmissibleCandidate",
    "NotFound",
    "QuadraticForm",
    "ResourceLimit",
    "SearchExhausted",
    "Target",
    "Witness",
    "bounds",
    "cauchy_1111",
    "cauchy_1113",
    "cauchy_1122",
    "check_135",
    "decompose_cor12",
    "decompose_cor13i",
    "decompose_cor13ii",
    "decompose_thm11",
    "decompose_thm12i",
    "decompose_thm12ii",
    "decompose_thm12iii",
    "decompose_thm13",
    "decompose_thm14",
    "explore_conjecture",
    "interval_I",
    "lemma_a",
    "lemma_b",
    "represent_all",
    "represent_constrained",
    "run",
]
