"""Print one line per acceptance criterion at the end of the run."""

ACCEPTANCE_FILE = "test_acceptance.py"


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if ACCEPTANCE_FILE not in getattr(rep, "nodeid", ""):
                continue
            if rep.when != "call" and outcome != "error":
                continue
            props = dict(getattr(rep, "user_properties", []))
            number = props.get("criterion")
            if number is None:
                continue
            status = "PASS" if outcome == "passed" else "FAIL"
            lines.append((number, f"criterion {number:>2}: {status}  {props.get('title', '')}  {props.get('detail', '')}"))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, text in sorted(lines):
        terminalreporter.write_line(text.rstrip())
