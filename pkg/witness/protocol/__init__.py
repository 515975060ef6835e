"""
Protocol front end.

Components:
- models: Protocol, Step, declarations and diagnostics
- parser: protocol files, context override files and canonical rendering
- validator: well-formedness diagnostics
- roles: generalized roles and the generalized message set
"""

from .models import Diagnostic, FreshDecl, KeyDecl, Protocol, Step
from .parser import parse, parse_context, parse_file, parse_term, render
from .roles import (
    Event, GeneralizedMessageSet, GeneralizedRole, alpha_equivalent,
    collect_generalized_messages, extract_roles,
)
from .validator import has_errors, validate

__all__ = [
    'Diagnostic', 'FreshDecl', 'KeyDecl', 'Protocol', 'Step',
    'parse', 'parse_context', 'parse_file', 'parse_term', 'render',
    'Event', 'GeneralizedMessageSet', 'GeneralizedRole', 'alpha_equivalent',
    'collect_generalized_messages', 'extract_roles',
    'has_errors', 'validate',
]
