"""
Static analysis.

Components:
- derivation: erasing variables from patterns
- safe_functions: protection sites and the MAX, N and EK functions
- unification: sorted unification and origin search
- witness: bounds of the witness function and the per-role growth check
"""

from .derivation import derive, derive_keep
from .safe_functions import (
    F_on_derivative, FunctionSelector, ProtectionSite, SafeFunction,
    evaluate_F, protective_sites,
)
from .unification import Origin, Unifier, origins, unify
from .witness import (
    AnalysisReport, Overall, SkippedAtom, StepVerdict, Verdict, WitnessAnalyzer,
    analyze, check_step, lower_bound, upper_bound,
)

__all__ = [
    'derive', 'derive_keep',
    'F_on_derivative', 'FunctionSelector', 'ProtectionSite', 'SafeFunction',
    'evaluate_F', 'protective_sites',
    'Origin', 'Unifier', 'origins', 'unify',
    'AnalysisReport', 'Overall', 'SkippedAtom', 'StepVerdict', 'Verdict', 'WitnessAnalyzer',
    'analyze', 'check_step', 'lower_bound', 'upper_bound',
]
