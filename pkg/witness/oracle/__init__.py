"""Bounded intruder oracle: deduction closure, invariance check and trace simulation."""

from .invariance import Counterexample, check_invariant_by_intruder, session_messages
from .knowledge import Derivation, Knowledge, closure
from .simulator import SimulationResult, TraceSimulator, simulate

__all__ = [
    'Counterexample', 'check_invariant_by_intruder', 'session_messages',
    'Derivation', 'Knowledge', 'closure',
    'SimulationResult', 'TraceSimulator', 'simulate',
]
