from __future__ import annotations

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))
sys.path.insert(0, os.path.dirname(__file__))

# acceptance verdicts: criterion number -> list of (part, passed, detail)
ACCEPTANCE: dict = {}


def record(criterion: int, part: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE.setdefault(criterion, []).append((part, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        ok = all(p for _, p, _ in parts)
        failed = [f"{name}: {detail}" for name, p, detail in parts if not p]
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += " (" + "; ".join(failed) + ")"
        tr.write_line(line)
