#!/usr/bin/env python3
"""
Reproduction script for the bundled worked analyses.
Runs the amended Woo-Lam growth check, the nested-keys evaluations and the
intruder oracle checks, and compares them with the expected results.
"""

import sys
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from witness.algebra.terms import render  # noqa: E402
from witness.analysis.safe_functions import evaluate_F  # noqa: E402
from witness.analysis.witness import Verdict, analyze  # noqa: E402
from witness.lattice.levels import SecurityLevel, render_level  # noqa: E402
from witness.oracle.invariance import check_invariant_by_intruder, session_messages  # noqa: E402
from witness.oracle.simulator import simulate  # noqa: E402
from witness.protocol.parser import parse_file  # noqa: E402

FIXTURES = project_root / "fixtures"

EXPECTED_ROWS = [
    ("A2", "kab^i", Verdict.OK),
    ("A2", "X", Verdict.VACUOUS),
    ("B1", "Nb^i", Verdict.VACUOUS),
    ("B2", "Nb^i", Verdict.VACUOUS),
    ("B2", "Y", Verdict.VACUOUS),
    ("S1", "U", Verdict.OK),
    ("S1", "V", Verdict.OK),
]

EXPECTED_NESTED = {
    "max": SecurityLevel.of("A", "B", "D", "S"),
    "n": SecurityLevel.of("A", "D", "S"),
    "ek": SecurityLevel.of("A", "B"),
}


def check_woolam_table():
    """Growth check of the amended Woo-Lam protocol."""
    print("🔍 Analyzing amended Woo-Lam...")

    report = analyze(parse_file(FIXTURES / "woolam.wl"), "max")
    rows = [(row.role, render(row.atom), row.verdict) for row in report.rows]
    for role, atom, verdict in rows:
        print(f"  - {role} {atom}: {verdict.value}")

    if rows != EXPECTED_ROWS:
        print("❌ Rows differ from the expected table")
        return False
    if not report.secure:
        print("❌ Protocol was not proved secure")
        return False
    print("✅ Seven rows, overall Secure")
    return True


def check_cleartext_variant():
    """The variant sending kab in clear must be rejected."""
    print("🔍 Analyzing the cleartext variant...")

    report = analyze(parse_file(FIXTURES / "woolam_cleartext.wl"), "max")
    if report.secure:
        print("❌ Cleartext variant was accepted")
        return False
    for row in report.violations():
        print(f"  - {row.role} {render(row.atom)}: {render_level(row.lower)} below {render_level(row.rhs)}")
    print("✅ Cleartext variant rejected")
    return True


def check_nested_keys():
    """Values of the three safe functions on the nested-keys message."""
    print("🔍 Evaluating nested keys...")

    protocol = parse_file(FIXTURES / "example1.wl")
    ctx = protocol.context()
    alpha = protocol.atom("alpha")
    message = protocol.steps[0].payload

    ok = True
    for selector, expected in EXPECTED_NESTED.items():
        value = evaluate_F(selector, alpha, message, ctx)
        mark = "✅" if value == expected else "❌"
        print(f"  {mark} F_{selector.upper()}(alpha, {render(message)}) = {render_level(value)}")
        ok = ok and value == expected
    return ok


def check_oracle():
    """Bounded simulation and invariance check on both Woo-Lam variants."""
    print("🔄 Running the intruder oracle...")

    woolam = parse_file(FIXTURES / "woolam.wl")
    result = simulate(woolam, sessions=1, depth=4)
    print(f"📊 Woo-Lam: {result.traces_explored} states, leaked {', '.join(result.leaked) or 'nothing'}")
    if not result.secure:
        return False

    counterexamples = check_invariant_by_intruder("max", session_messages(woolam), woolam.context(), depth=3)
    if counterexamples:
        print(f"❌ Invariance counterexamples: {len(counterexamples)}")
        return False

    leaky = simulate(parse_file(FIXTURES / "woolam_cleartext.wl"), sessions=1, depth=4)
    print(f"📊 Cleartext: leaked {', '.join(leaky.leaked) or 'nothing'}")
    if leaky.leaked != ["kab"]:
        return False

    print("✅ Oracle agrees with the static analysis")
    return True


def main():
    """Main reproduction function."""
    print("🚀 Reproducing the worked analyses")
    print("=" * 50)

    steps = [
        ("Woo-Lam table", check_woolam_table),
        ("cleartext variant", check_cleartext_variant),
        ("nested keys", check_nested_keys),
        ("oracle", check_oracle),
    ]
    for name, step in steps:
        if not step():
            print(f"❌ Reproduction failed: {name}")
            return False

    print("=" * 50)
    print("🎉 All results reproduced!")
    return True


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
