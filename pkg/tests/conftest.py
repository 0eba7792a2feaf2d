"""Collects acceptance outcomes and prints one line per criterion after the run."""
import time
from contextlib import contextmanager

ACCEPTANCE: dict[int, dict] = {}


@contextmanager
def criterion(number: int, title: str, budget: float = 30.0):
    """Time a part of an acceptance criterion; parts of one criterion share a line."""
    entry = ACCEPTANCE.setdefault(number, {"title": title, "ok": True, "seconds": 0.0, "notes": []})
    start = time.perf_counter()
    ok = False
    try:
        yield entry["notes"]
        ok = True
    finally:
        spent = time.perf_counter() - start
        entry["seconds"] += spent
        entry["ok"] &= ok and spent < budget
    assert spent < budget, f"criterion {number} part took {spent:.1f} s (budget {budget} s)"

def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        e = ACCEPTANCE[n]
        notes = "; ".join(e["notes"])
        terminalreporter.write_line(
            f"[{'PASS' if e['ok'] else 'FAIL'}] {n:2d}. {e['title']} ({e['seconds']:.1f} s){': ' + notes if notes else ''}")
