"""Recursive color-reduction engine with machine-checkable certificates."""

from .certificates import (GuaranteeCheck, HaltInfo, ReductionCertificate,
                           ViolationWitness)
from .engine import ReductionTrace, run_reduction
from .levels import (BalanceReport, LevelStructure, build_level_sets,
                     is_properly_shattered, nonshattered_subset,
                     well_balance_report)
from .params import EngineParams, floored_size
from .profiles import RestrictionProfile, VerifiedProfile, classify_colors
from .replay import (ReplayIssue, ReplayReport, input_digest, replay_trace)
from .steps import (base_case_check, step_balanced, step_not_balanced,
                    step_q3)

__all__ = [
    "BalanceReport",
    "EngineParams",
    "GuaranteeCheck",
    "HaltInfo",
    "LevelStructure",
    "ReductionCertificate",
    "ReductionTrace",
    "ReplayIssue",
    "ReplayReport",
    "RestrictionProfile",
    "VerifiedProfile",
    "ViolationWitness",
    "base_case_check",
    "build_level_sets",
    "classify_colors",
    "floored_size",
    "input_digest",
    "is_properly_shattered",
    "nonshattered_subset",
    "replay_trace",
    "run_reduction",
    "step_balanced",
    "step_not_balanced",
    "step_q3",
    "well_balance_report",
]
