import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_")


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion; an expected failure still reads FAIL."""
    verdicts = {}
    for outcome in ("passed", "failed", "xfailed", "xpassed", "error", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if not m or getattr(rep, "when", "call") not in ("call", "setup"):
                continue
            n = int(m.group(1))
            ok = outcome == "passed"
            verdicts[n] = verdicts.get(n, True) and ok
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(verdicts):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if verdicts[n] else 'FAIL'}")
