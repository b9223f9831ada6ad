import re


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one verdict line per acceptance criterion at the end of the
    run, so the criterion outcomes are visible in any pytest invocation."""
    rows = {}
    for outcome, verdict in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") != "call" and outcome == "passed":
                continue
            m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", getattr(rep, "nodeid", ""))
            if m:
                rows[int(m.group(1))] = verdict
    if rows:
        terminalreporter.write_sep("-", "acceptance criteria")
        for k in sorted(rows):
            terminalreporter.write_line(f"acceptance criterion {k}: {rows[k]}")
