import helpers


def pytest_terminal_summary(terminalreporter):
    if not helpers.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(helpers.RESULTS, key=lambda s: int(s.split()[0][2:])):
        terminalreporter.write_line(f"{helpers.RESULTS[label]}  {label}")
