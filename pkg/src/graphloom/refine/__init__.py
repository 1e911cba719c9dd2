from .failures import FailureSets, compute_failures
from .candidates import CandidateType, candidate_types
from .oracle import (
    OracleDecision,
    OracleError,
    ProcessOracle,
    ScriptedOracle,
    consult_oracles,
    decisions_to_diff,
)
from .loop import RefinementRound, refine
from .analysis import AgreementReport, AnalysisReport, agreement_audit, category_analysis

__all__ = [
    "FailureSets",
    "compute_failures",
    "CandidateType",
    "candidate_types",
    "OracleDecision",
    "OracleError",
    "ProcessOracle",
    "ScriptedOracle",
    "consult_oracles",
    "decisions_to_diff",
    "RefinementRound",
    "refine",
    "AnalysisReport",
    "AgreementReport",
    "category_analysis",
    "agreement_audit",
]
